#include "pushrec/simulate.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace pushrec::sim {

namespace {

std::size_t active_phase(const GainSchedule& schedule, double t, double dt) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < schedule.size(); ++i)
        if (schedule[i].switch_time <= t + 0.5 * dt) idx = i;
    return idx;
}

void validate_schedule(const GainSchedule& schedule) {
    if (schedule.empty()) throw InvalidSpec("gain schedule is empty");
    if (std::abs(schedule.front().switch_time) > 1e-12)
        throw InvalidSpec("first schedule phase must start at t=0");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i].switch_time > schedule[i - 1].switch_time))
            throw InvalidSpec("schedule switch times must be strictly increasing");
}

// Deterministic, platform-stable uniform in [lo, hi).
class Jitter {
  public:
    explicit Jitter(std::uint32_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_()) * 0x1p-32;
        return lo + (hi - lo) * u;
    }
    double around(double base, double rel) { return base * uniform(1.0 - rel, 1.0 + rel); }

  private:
    std::mt19937 gen_;
};

GainSet critically_damped(double omega) {
    return GainSet{omega * omega, 0.0, 2.0 * omega};
}

// First index at/after `from` whose acceleration is >= 0; the construction
// guarantees exactly one negative-to-positive transition there.
Index scan_upcross(const Vector& a, Index from) {
    for (Index i = from; i < a.size(); ++i)
        if (a(i) >= 0.0) return i;
    throw Error("archetype construction failed: no acceleration upcross");
}

Index scan_velocity_zero(const Vector& v, Index from) {
    for (Index i = from; i < v.size(); ++i)
        if (v(i) <= 0.0) return i;
    throw Error("archetype construction failed: no velocity zero");
}

}  // namespace

StepResult step(const SimState& state, const GainSet& gains, const ReferenceState& reference,
                double accumulated_error, double dt) {
    if (!(dt > 0.0)) throw InvalidSpec("dt must be positive");

    StepResult r;
    r.accumulated_error = accumulated_error + (reference.p_star - state.q) * dt;
    r.acceleration = gains.kp_over_m * (reference.p_star - state.q) +
                     gains.ki_over_m * r.accumulated_error +
                     gains.kd_over_m * (reference.v_star - state.v);
    r.state.v = state.v + r.acceleration * dt;
    r.state.q = state.q + r.state.v * dt;
    r.state.t = state.t + dt;
    return r;
}

Trial simulate_trial(double q0, double v0, const GainSchedule& schedule, double duration,
                     double dt, double mass, const std::vector<Impulse>& impulses,
                     double output_hz) {
    validate_schedule(schedule);
    if (!(duration > 0.0)) throw InvalidSpec("duration must be positive");
    if (!(dt > 0.0)) throw InvalidSpec("dt must be positive");
    if (!(mass > 0.0)) throw InvalidSpec("mass must be positive");
    if (!(output_hz > 0.0)) throw InvalidSpec("output rate must be positive");

    const auto n_steps = static_cast<Index>(std::llround(duration / dt));
    const auto decim = std::max<Index>(1, static_cast<Index>(std::llround(1.0 / (dt * output_hz))));

    std::vector<double> time, pos, vel, acc;
    time.reserve(static_cast<std::size_t>(n_steps / decim) + 1);
    pos.reserve(time.capacity());
    vel.reserve(time.capacity());
    acc.reserve(time.capacity());

    SimState state{q0, v0, 0.0};
    double accumulated = 0.0;
    for (Index k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        for (const Impulse& imp : impulses)
            if (static_cast<Index>(std::llround(imp.time / dt)) == k) state.v += imp.dv;

        const SchedulePhase& phase = schedule[active_phase(schedule, t, dt)];
        // Record the sample before integrating so each row satisfies the
        // control law at its own state exactly.
        accumulated += (phase.reference.p_star - state.q) * dt;
        const double a = phase.gains.kp_over_m * (phase.reference.p_star - state.q) +
                         phase.gains.ki_over_m * accumulated +
                         phase.gains.kd_over_m * (phase.reference.v_star - state.v);
        if (k % decim == 0) {
            time.push_back(t);
            pos.push_back(state.q);
            vel.push_back(state.v);
            acc.push_back(a);
        }
        state.v += a * dt;
        state.q += state.v * dt;
        state.t = t + dt;
    }

    Trial trial;
    trial.mass = mass;
    const auto n = static_cast<Index>(time.size());
    trial.time = Eigen::Map<const Vector>(time.data(), n);
    trial.position = Eigen::Map<const Vector>(pos.data(), n);
    trial.velocity = Eigen::Map<const Vector>(vel.data(), n);
    trial.acceleration = Eigen::Map<const Vector>(acc.data(), n);
    validate(trial);
    return trial;
}

Archetype synth_archetype(StrategyTag tag, std::uint32_t seed, const ArchetypeParams& params) {
    Jitter rng(seed * 0x9e3779b9u + 17u);
    const double j = params.jitter;
    const ReferenceState origin{0.0, 0.0};

    Archetype arch;
    double q0 = 0.0;
    double v0 = 0.0;

    switch (tag) {
        case StrategyTag::Ankle: {
            // Two critically damped phases switching at the analytic
            // acceleration zero crossing t* = 2/w - q0/(v0 + w q0); the
            // acceleration is negative before t* and positive after, giving
            // one sign change. Start state lies inside the stable band, the
            // initial deceleration stays above -valley_depth, and the
            // position swing is large enough that ridge fitting at the
            // default lambda barely shrinks the gains.
            q0 = rng.around(-0.050, j);
            v0 = rng.around(0.24, j);
            const double w1 = rng.around(1.8, j);
            const double w2 = 0.68 * w1;  // in (w1/2, w1): keeps phase 2 positive
            const double b = v0 + w1 * q0;
            const double t_star = 2.0 / w1 - q0 / b;
            arch.schedule = {{0.0, critically_damped(w1), origin},
                             {t_star, critically_damped(w2), origin}};
            break;
        }
        case StrategyTag::Toe: {
            // Heel lift realized as a bounded velocity surge (a derivative
            // term chasing a raised velocity reference), then one gentle
            // critically damped return: velocity crosses zero first, the
            // acceleration 1/w later, and no valley forms.
            q0 = rng.around(0.027, j);
            v0 = rng.around(0.14, j);
            const double w = rng.around(1.0, j);
            const double surge = v0 + rng.around(0.26, j);
            arch.schedule = {{0.0, GainSet{0.0, 0.0, 4.0}, ReferenceState{0.0, surge}},
                             {0.25, critically_damped(w), origin}};
            break;
        }
        case StrategyTag::OneStep: {
            // Hard braking from a fast start: one deep acceleration valley,
            // then a single upcross at t* after the global minimum.
            q0 = rng.around(0.050, j);
            v0 = rng.around(0.43, j);
            const double w = rng.around(6.0, j);
            arch.schedule = {{0.0, critically_damped(w), origin}};
            break;
        }
        case StrategyTag::TwoStep: {
            // One-step braking; shortly after its upcross the reference
            // jumps a step length ahead, and decelerating into the new
            // target digs the second, shallower valley.
            q0 = rng.around(0.070, j);
            v0 = rng.around(0.41, j);
            const double w = rng.around(6.5, j);
            const double b = v0 + w * q0;
            const double t_star = 2.0 / w - q0 / b;
            const double step_length = rng.around(0.35, j);
            arch.schedule = {{0.0, critically_damped(w), origin},
                             {t_star + 0.15, critically_damped(w),
                              ReferenceState{step_length, 0.0}}};
            break;
        }
        case StrategyTag::ToeToStep: {
            // Heel-lift surge as in the toe strategy, then a hard stepping
            // phase producing the single valley.
            q0 = rng.around(0.089, j);
            v0 = rng.around(0.29, j);
            const double ws = rng.around(6.0, j);
            const double surge = v0 + rng.around(0.26, j);
            arch.schedule = {{0.0, GainSet{0.0, 0.0, 4.0}, ReferenceState{0.0, surge}},
                             {0.30, critically_damped(ws), origin}};
            break;
        }
    }

    arch.trial = simulate_trial(q0, v0, arch.schedule, params.duration, params.dt, params.mass,
                                arch.impulses, params.output_hz);
    arch.trial.id = to_string(tag) + "_s" + std::to_string(seed);
    arch.trial.strategy = tag;
    arch.trial.start_mode = (seed % 2 == 0) ? StartMode::Informed : StartMode::Random;

    // Ground-truth milestones from the emitted sequences; the constructions
    // above guarantee each scan hits the intended transition.
    const Vector& a = arch.trial.acceleration;
    const Vector& v = arch.trial.velocity;
    switch (tag) {
        case StrategyTag::Ankle:
            arch.breakpoints = {scan_upcross(a, 1)};
            break;
        case StrategyTag::Toe: {
            const Index bp1 = scan_velocity_zero(v, 1);
            arch.breakpoints = {bp1, scan_upcross(a, bp1 + 1)};
            break;
        }
        case StrategyTag::OneStep: {
            Index min_idx = 0;
            a.minCoeff(&min_idx);
            arch.breakpoints = {scan_upcross(a, min_idx + 1)};
            break;
        }
        case StrategyTag::TwoStep:
        case StrategyTag::ToeToStep:
            break;  // combined strategies are classified but not segmented
    }
    return arch;
}

}  // namespace pushrec::sim
