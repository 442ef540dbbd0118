#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "pushrec/errors.hpp"

namespace pushrec {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// The five recovery strategies. "TwoStep" is the only multi-step variant
// observed within scope.
enum class StrategyTag { Ankle, Toe, ToeToStep, OneStep, TwoStep };

enum class StartMode { Informed, Random, Unknown };

std::string to_string(StrategyTag tag);
std::string to_string(StartMode mode);
StrategyTag strategy_from_string(const std::string& s);
StartMode start_mode_from_string(const std::string& s);

// Steady-state reference (p*, v*), conventionally a trial's last sample.
struct ReferenceState {
    double p_star = 0.0;
    double v_star = 0.0;
};

// One push-recovery trial: uniformly sampled CoM kinematics plus metadata.
// Velocity/acceleration may be absent on ingest and derived later.
// Immutable by convention once built; pipeline stages return fresh copies.
struct Trial {
    std::string id;
    Vector time;      // s, uniform step
    Vector position;  // m
    Vector velocity;      // m/s, size 0 when absent
    Vector acceleration;  // m/s^2, size 0 when absent
    double mass = 1.0;    // kg
    std::optional<StrategyTag> strategy;
    StartMode start_mode = StartMode::Unknown;
    bool abandoned = false;
    // Absolute start position before shift_origin zeroed it; kept for
    // initial-state statistics.
    std::optional<double> pre_shift_start;

    Index length() const { return time.size(); }
    double dt() const;
    bool has_velocity() const { return velocity.size() == time.size() && time.size() > 0; }
    bool has_acceleration() const { return acceleration.size() == time.size() && time.size() > 0; }
};

// Treadmill speed record (typically sampled faster than the motion data).
struct TreadmillLog {
    Vector time;   // s, strictly increasing
    Vector speed;  // m/s
};

// Relative tolerance on dt uniformity.
inline constexpr double kTimestepTolerance = 1e-9;

// Checks every Trial invariant; throws ValidationError /
// NonUniformTimestep / NonFiniteValue on the first violation.
void validate(const Trial& trial);
void validate(const TreadmillLog& log);

// (position, velocity) of a trial's last sample, used as (p*, v*).
ReferenceState reference_state(const Trial& trial);

}  // namespace pushrec
