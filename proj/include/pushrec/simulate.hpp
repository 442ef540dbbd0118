#pragma once

#include <cstdint>
#include <vector>

#include "pushrec/trial.hpp"

namespace pushrec::sim {

struct SimState {
    double q = 0.0;  // m
    double v = 0.0;  // m/s
    double t = 0.0;  // s
};

// Mass-normalized controller gains; a zero entry deactivates the term.
// Signs are unconstrained.
struct GainSet {
    double kp_over_m = 0.0;  // 1/s^2
    double ki_over_m = 0.0;  // 1/s^3
    double kd_over_m = 0.0;  // 1/s
};

struct SchedulePhase {
    double switch_time = 0.0;  // s, first phase at 0
    GainSet gains;
    ReferenceState reference;
};
using GainSchedule = std::vector<SchedulePhase>;

// Instantaneous velocity change modelling a push.
struct Impulse {
    double time = 0.0;  // s
    double dv = 0.0;    // m/s
};

struct StepResult {
    SimState state;
    double accumulated_error = 0.0;  // m*s, integral of (p* - q)
    double acceleration = 0.0;       // commanded m/s^2
};

// One semi-implicit Euler step. The integral error is advanced first and the
// commanded acceleration uses the updated value, mirroring the discrete
// fitting convention that includes the current sample in the running sum.
StepResult step(const SimState& state, const GainSet& gains, const ReferenceState& reference,
                double accumulated_error, double dt);

// Integrates at `dt` and records (q, v, commanded a) decimated to
// `output_hz`. The integral error carries across schedule switches; impulses
// add their dv at the nearest step.
Trial simulate_trial(double q0, double v0, const GainSchedule& schedule, double duration,
                     double dt = 1e-3, double mass = 70.0,
                     const std::vector<Impulse>& impulses = {}, double output_hz = 100.0);

// Archetype tuning. Base values are jittered per seed by +-jitter relative;
// the defaults keep each tag's trajectory signature valid across that range
// (valley depths clear of valley_depth, rises above the classifier
// threshold, ankle starts inside the stable band and stepping starts
// outside).
struct ArchetypeParams {
    double duration = 3.0;
    double dt = 1e-3;
    double output_hz = 100.0;
    double mass = 70.0;
    double jitter = 0.10;
    double valley_depth = 1.0;  // m/s^2, must match the classifier's
};

// A synthetic trial plus the construction ground truth that oracle tests
// compare against.
struct Archetype {
    Trial trial;
    std::vector<Index> breakpoints;  // phase-end sample indices
    GainSchedule schedule;
    std::vector<Impulse> impulses;
};

Archetype synth_archetype(StrategyTag tag, std::uint32_t seed, const ArchetypeParams& params = {});

}  // namespace pushrec::sim
