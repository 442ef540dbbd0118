#include "pushrec/segment.hpp"

#include <cmath>
#include <optional>

namespace pushrec::seg {

namespace {

// First confirmed negative-to-positive crossing of x at or after `from`.
// The signal must have been below -band since `from` (armed) and, after the
// sign change, reach +band before falling back below -band (confirmed);
// unconfirmed chatter inside the band is skipped. Returns the first sample
// with x >= 0 of the confirmed transition.
std::optional<Index> upcross(const Vector& x, Index from, double band) {
    const Index n = x.size();
    Index i = from;
    while (i < n) {
        // arm: wait until clearly negative
        while (i < n && x(i) > -band) ++i;
        // candidate sign change
        while (i < n && x(i) < 0.0) ++i;
        if (i >= n) return std::nullopt;
        const Index candidate = i;
        // confirm: reaches +band before dropping below -band again
        Index k = candidate;
        while (k < n && x(k) > -band) {
            if (x(k) >= band) return candidate;
            ++k;
        }
        i = k;  // fell back below -band: chatter, keep scanning
    }
    return std::nullopt;
}

// First sample where a positive velocity has decayed to zero (sign change or
// |v| within the band), armed once v exceeds +band.
std::optional<Index> velocity_zero(const Vector& v, Index from, double band) {
    const Index n = v.size();
    Index i = from;
    while (i < n && v(i) < band) ++i;  // arm on clearly positive motion
    for (; i < n; ++i)
        if (v(i) <= 0.0 || std::abs(v(i)) <= band) return i;
    return std::nullopt;
}

void require_acceleration(const Trial& trial) {
    if (!trial.has_acceleration()) throw MissingKinematics("trial has no acceleration");
}

void require_velocity(const Trial& trial) {
    if (!trial.has_velocity()) throw MissingKinematics("trial has no velocity");
}

// Maximal runs with acceleration below -depth; returns start index of each.
std::vector<Index> valley_starts(const Vector& a, double depth) {
    std::vector<Index> starts;
    bool in_valley = false;
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) < -depth) {
            if (!in_valley) starts.push_back(i);
            in_valley = true;
        } else {
            in_valley = false;
        }
    }
    return starts;
}

// Velocity surge of at least rise_rate * rise_window within any window of
// rise_window seconds ending before sample `limit`.
bool has_rise(const Vector& v, double dt, double rise_rate, double rise_window, Index limit) {
    const auto w = std::max<Index>(1, static_cast<Index>(std::llround(rise_window / dt)));
    const double amount = rise_rate * rise_window;
    for (Index i = 0; i < limit; ++i) {
        const Index hi = std::min(i + w, limit - 1);
        for (Index k = i + 1; k <= hi; ++k)
            if (v(k) - v(i) >= amount) return true;
    }
    return false;
}

}  // namespace

void validate(const Segmentation& segmentation, Index trial_length, bool enforce_phase_count) {
    if (segmentation.labels.size() != segmentation.breakpoints.size() + 1)
        throw ValidationError("phase label count must be breakpoint count + 1");
    Index prev = 0;
    for (const Index b : segmentation.breakpoints) {
        if (b <= prev || b >= trial_length)
            throw ValidationError("breakpoints must be strictly increasing inside the trial");
        prev = b;
    }
    if (enforce_phase_count) {
        const std::size_t expected = segmentation.strategy == StrategyTag::Toe ? 3 : 2;
        if (segmentation.labels.size() != expected)
            throw ValidationError("phase count does not match strategy");
    }
}

Segmentation segment_ankle(const Trial& trial) {
    require_acceleration(trial);
    const auto bp = upcross(trial.acceleration, 0, kCrossingBand);
    if (!bp || *bp + 1 >= trial.length())
        throw NoMilestone("no negative-to-positive acceleration crossing");
    Segmentation s;
    s.strategy = StrategyTag::Ankle;
    s.breakpoints = {*bp};
    s.labels = {"lean_cross", "lean_recover"};
    validate(s, trial.length());
    return s;
}

Segmentation segment_toe(const Trial& trial) {
    require_velocity(trial);
    require_acceleration(trial);
    const auto bp1 = velocity_zero(trial.velocity, 0, kCrossingBand);
    if (!bp1 || *bp1 < 1) throw NoMilestone("velocity never returns to zero");
    const auto bp2 = upcross(trial.acceleration, *bp1, kCrossingBand);
    if (!bp2) throw NoMilestone("acceleration never returns to zero after tiptoe");
    if (*bp2 <= *bp1) throw OrderViolation("acceleration zero found before tiptoe milestone");
    if (*bp2 + 1 >= trial.length()) throw NoMilestone("sole-drop milestone at trial end");
    Segmentation s;
    s.strategy = StrategyTag::Toe;
    s.breakpoints = {*bp1, *bp2};
    s.labels = {"lift_to_tiptoe", "drop_to_sole", "lean_recover"};
    validate(s, trial.length());
    return s;
}

Segmentation segment_one_step(const Trial& trial) {
    require_acceleration(trial);
    Index min_idx = 0;
    trial.acceleration.minCoeff(&min_idx);
    const auto bp = upcross(trial.acceleration, min_idx, kCrossingBand);
    if (!bp || *bp + 1 >= trial.length())
        throw NoMilestone("no acceleration upcross after the step's deceleration");
    Segmentation s;
    s.strategy = StrategyTag::OneStep;
    s.breakpoints = {*bp};
    s.labels = {"step", "lean_after_step"};
    validate(s, trial.length());
    return s;
}

StrategyTag classify_strategy(const Trial& trial, const ClassifierParams& params) {
    require_velocity(trial);
    require_acceleration(trial);

    const auto valleys = valley_starts(trial.acceleration, params.valley_depth);
    const Index rise_limit = valleys.empty() ? trial.length() : valleys.front() + 1;
    const bool toe_rise =
        has_rise(trial.velocity, trial.dt(), params.rise_rate, params.rise_window, rise_limit);

    if (valleys.size() >= 2) return StrategyTag::TwoStep;
    if (valleys.size() == 1) return toe_rise ? StrategyTag::ToeToStep : StrategyTag::OneStep;
    return toe_rise ? StrategyTag::Toe : StrategyTag::Ankle;
}

Segmentation segment(const Trial& trial) {
    if (!trial.strategy) throw UnsupportedStrategy("trial carries no strategy tag");
    switch (*trial.strategy) {
        case StrategyTag::Ankle: return segment_ankle(trial);
        case StrategyTag::Toe: return segment_toe(trial);
        case StrategyTag::OneStep: return segment_one_step(trial);
        case StrategyTag::ToeToStep:
        case StrategyTag::TwoStep:
            throw UnsupportedStrategy("combined strategy " + to_string(*trial.strategy) +
                                      " is not segmented");
    }
    throw UnsupportedStrategy("unknown strategy");
}

}  // namespace pushrec::seg
