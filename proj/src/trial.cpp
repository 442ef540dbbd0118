#include "pushrec/trial.hpp"

#include <cmath>

namespace pushrec {

std::string to_string(StrategyTag tag) {
    switch (tag) {
        case StrategyTag::Ankle: return "ankle";
        case StrategyTag::Toe: return "toe";
        case StrategyTag::ToeToStep: return "toe_to_step";
        case StrategyTag::OneStep: return "one_step";
        case StrategyTag::TwoStep: return "two_step";
    }
    return "unknown";
}

std::string to_string(StartMode mode) {
    switch (mode) {
        case StartMode::Informed: return "informed";
        case StartMode::Random: return "random";
        case StartMode::Unknown: return "unknown";
    }
    return "unknown";
}

StrategyTag strategy_from_string(const std::string& s) {
    if (s == "ankle") return StrategyTag::Ankle;
    if (s == "toe") return StrategyTag::Toe;
    if (s == "toe_to_step") return StrategyTag::ToeToStep;
    if (s == "one_step") return StrategyTag::OneStep;
    if (s == "two_step") return StrategyTag::TwoStep;
    throw ValidationError("unknown strategy tag: " + s);
}

StartMode start_mode_from_string(const std::string& s) {
    if (s == "informed") return StartMode::Informed;
    if (s == "random") return StartMode::Random;
    if (s == "unknown") return StartMode::Unknown;
    throw ValidationError("unknown start mode: " + s);
}

double Trial::dt() const {
    if (time.size() < 2) throw ValidationError("trial too short to define dt");
    return (time(time.size() - 1) - time(0)) / static_cast<double>(time.size() - 1);
}

namespace {

void require_finite(const Vector& x, const char* name) {
    if (!x.allFinite()) throw NonFiniteValue(std::string(name) + " contains a non-finite value");
}

}  // namespace

void validate(const Trial& trial) {
    const Index n = trial.time.size();
    if (n < 3) throw ValidationError("trial needs at least 3 samples, got " + std::to_string(n));
    if (trial.position.size() != n)
        throw ValidationError("position length does not match time length");
    if (trial.velocity.size() != 0 && trial.velocity.size() != n)
        throw ValidationError("velocity length does not match time length");
    if (trial.acceleration.size() != 0 && trial.acceleration.size() != n)
        throw ValidationError("acceleration length does not match time length");
    if (!(trial.mass > 0.0)) throw ValidationError("mass must be positive");

    require_finite(trial.time, "time");
    require_finite(trial.position, "position");
    if (trial.velocity.size() > 0) require_finite(trial.velocity, "velocity");
    if (trial.acceleration.size() > 0) require_finite(trial.acceleration, "acceleration");

    const double dt = (trial.time(n - 1) - trial.time(0)) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw ValidationError("time must be strictly increasing");
    for (Index i = 1; i < n; ++i) {
        const double step = trial.time(i) - trial.time(i - 1);
        if (!(step > 0.0)) throw ValidationError("time must be strictly increasing");
        if (std::abs(step - dt) > kTimestepTolerance * dt)
            throw NonUniformTimestep("timestep varies beyond tolerance at sample " +
                                     std::to_string(i));
    }
}

void validate(const TreadmillLog& log) {
    if (log.time.size() != log.speed.size())
        throw ValidationError("treadmill time/speed length mismatch");
    if (log.time.size() < 2) throw ValidationError("treadmill log needs at least 2 samples");
    require_finite(log.time, "treadmill time");
    require_finite(log.speed, "treadmill speed");
    // speeds are belt-speed magnitudes, so the log must start nonnegative
    if (log.speed(0) < 0.0) throw ValidationError("treadmill speed must start nonnegative");
    for (Index i = 1; i < log.time.size(); ++i)
        if (!(log.time(i) > log.time(i - 1)))
            throw ValidationError("treadmill time must be strictly increasing");
}

ReferenceState reference_state(const Trial& trial) {
    if (trial.position.size() == 0) throw MissingKinematics("trial has no position");
    if (!trial.has_velocity()) throw MissingKinematics("trial has no velocity");
    const Index last = trial.length() - 1;
    return ReferenceState{trial.position(last), trial.velocity(last)};
}

}  // namespace pushrec
