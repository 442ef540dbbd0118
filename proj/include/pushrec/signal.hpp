#pragma once

#include "pushrec/trial.hpp"

namespace pushrec::signal {

// Low-pass filter configuration. Defaults match the conditioning chain used
// for CoM position data: 4th-order Butterworth at 30 Hz, applied
// forward-backward so milestone timing is not shifted by phase lag.
struct FilterSpec {
    int order = 4;
    double cutoff_hz = 30.0;
    double sample_rate_hz = 100.0;
    bool zero_phase = true;
};

void validate(const FilterSpec& spec);

// Butterworth low-pass with unit DC gain. Zero-phase mode runs the cascade
// forward then backward over an odd-reflected extension (3x order samples per
// edge) so edge transients stay out of the returned window.
Vector butterworth_lowpass(const Eigen::Ref<const Vector>& x, const FilterSpec& spec);

// Central differences in the interior, 2nd-order one-sided stencils at the
// endpoints; exact for polynomials up to degree 2, keeps the input length.
Vector differentiate(const Eigen::Ref<const Vector>& x, double dt);

// Filter position, then differentiate once for velocity and twice for
// acceleration. Any velocity/acceleration already present is replaced.
// `extra_cutoff_hz`, when positive, applies an additional low-pass to the raw
// position first (off by default).
Trial derive_kinematics(const Trial& trial, const FilterSpec& spec, double extra_cutoff_hz = 0.0);

// Default treadmill stop threshold (m/s).
inline constexpr double kSpeedEpsilon = 1e-3;

// Cuts the trial so it starts when the treadmill first comes to rest
// (speed falls to <= epsilon after having been above it).
Trial trim_to_push(const Trial& trial, const TreadmillLog& log, double speed_epsilon = kSpeedEpsilon);

// Re-expresses position relative to the first sample. Velocity and
// acceleration are untouched; the pre-shift start is kept in the metadata.
Trial shift_origin(const Trial& trial);

// Keeps samples [start, end).
Trial manual_trim(const Trial& trial, Index start, Index end);

}  // namespace pushrec::signal
