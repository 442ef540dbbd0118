#pragma once

#include <string>
#include <vector>

#include "pushrec/trial.hpp"

namespace pushrec::seg {

// Phase boundaries for one trial. breakpoints are exclusive phase ends, so
// phase i spans [breakpoints[i-1], breakpoints[i]) with implicit 0 and
// length bounds.
struct Segmentation {
    std::vector<Index> breakpoints;
    std::vector<std::string> labels;  // one per phase
    StrategyTag strategy = StrategyTag::Ankle;
};

// Structural checks (ordering, label count). With enforce_phase_count the
// phase count must also match the strategy's milestone scheme (Ankle 2,
// Toe 3, OneStep 2); fitting accepts ad-hoc segmentations such as a single
// phase, so it skips that part.
void validate(const Segmentation& segmentation, Index trial_length,
              bool enforce_phase_count = true);

// Hysteresis half-widths for zero-crossing detection (m/s for velocity,
// m/s^2 for acceleration).
inline constexpr double kCrossingBand = 1e-3;

struct ClassifierParams {
    double valley_depth = 1.0;  // m/s^2, acceleration below -depth is a valley
    double rise_rate = 0.5;     // m/s per s, velocity surge threshold
    double rise_window = 0.2;   // s, window the surge must fit in
};

// Ankle: breakpoint at the first negative-to-positive acceleration sign
// change. Phases: crossing lean, recovery lean.
Segmentation segment_ankle(const Trial& trial);

// Toe: first velocity zero (top of tiptoe), then the next acceleration zero
// (full sole restored). Three phases.
Segmentation segment_toe(const Trial& trial);

// One-step: first acceleration upcross after the global minimum (the step's
// deceleration is exhausted). Two phases.
Segmentation segment_one_step(const Trial& trial);

// Decision tree on acceleration valleys and an early velocity surge.
StrategyTag classify_strategy(const Trial& trial, const ClassifierParams& params = {});

// Dispatches on trial.strategy; combined strategies are not segmented.
Segmentation segment(const Trial& trial);

}  // namespace pushrec::seg
