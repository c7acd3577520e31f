#pragma once

#include "agcas/geometry.hpp"

#include <stdexcept>

namespace agcas {

class DynamicsError : public std::runtime_error {
 public:
  enum class Kind { NonFiniteState, InvalidConfig };
  DynamicsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct AircraftState {
  Vec3 position = Vec3::Zero();  // x east, y north, altitude (m)
  double roll = 0.0;             // [-pi, pi)
  double pitch = 0.0;            // (-pi/2, pi/2)
  double heading = 0.0;          // [0, 2pi), clockwise from north
  double p = 0.0;                // body rates, rad/s
  double q = 0.0;
  double r = 0.0;
  double airspeed = 200.0;
  double load_factor = 1.0;

  bool finite() const;
};

/// Stick commands, each in [-1, 1] after clamping.
struct Action {
  double aileron = 0.0;
  double elevator = 0.0;

  Action clamped() const;
};

struct DynamicsConfig {
  double p_max = 3.14;   // rad/s
  double q_max = 0.52;   // rad/s
  double tau_p = 0.3;    // s
  double tau_q = 0.5;    // s
  double v0 = 200.0;     // m/s
  double g0 = 9.80665;   // m/s^2
  double dt = 0.05;      // s

  void validate() const;
};

// Pitch is held strictly inside (-pi/2, pi/2) by this margin.
inline constexpr double kPitchLimitMargin = 1e-3;

/// Coordinated-turn yaw rate for the given attitude, saturated at the
/// rate of an 85 degree banked turn.
double coordinated_turn_rate(double roll, double pitch, double airspeed, double g0);

/// n = V q / g0 + cos(roll) cos(pitch)
double load_factor(const AircraftState& state, const DynamicsConfig& cfg);

/// One semi-implicit Euler step of the rate-commanded kinematic model.
AircraftState step(const AircraftState& state, const Action& action, const DynamicsConfig& cfg);

/// Wraps roll to [-pi, pi), heading to [0, 2pi) and clamps pitch.
void normalize_angles(AircraftState& state);

}  // namespace agcas
