#include "agcas/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace agcas {

bool AircraftState::finite() const {
  return position.allFinite() && std::isfinite(roll) && std::isfinite(pitch) &&
         std::isfinite(heading) && std::isfinite(p) && std::isfinite(q) && std::isfinite(r) &&
         std::isfinite(airspeed) && std::isfinite(load_factor);
}

Action Action::clamped() const {
  return {std::clamp(aileron, -1.0, 1.0), std::clamp(elevator, -1.0, 1.0)};
}

void DynamicsConfig::validate() const {
  for (double v : {p_max, q_max, tau_p, tau_q, v0, g0, dt}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DynamicsError(DynamicsError::Kind::InvalidConfig,
                          "dynamics parameters must be positive and finite");
    }
  }
}

double coordinated_turn_rate(double roll, double pitch, double airspeed, double g0) {
  static const double kMaxTan = std::tan(deg2rad(85.0));
  const double t = std::clamp(std::tan(roll), -kMaxTan, kMaxTan);
  return (g0 / airspeed) * t * std::cos(pitch);
}

double load_factor(const AircraftState& state, const DynamicsConfig& cfg) {
  return state.airspeed * state.q / cfg.g0 + std::cos(state.roll) * std::cos(state.pitch);
}

void normalize_angles(AircraftState& s) {
  s.roll = std::fmod(s.roll + kPi, 2.0 * kPi);
  if (s.roll < 0.0) s.roll += 2.0 * kPi;
  s.roll -= kPi;
  if (s.roll >= kPi) s.roll -= 2.0 * kPi;

  const double pitch_limit = kPi / 2.0 - kPitchLimitMargin;
  s.pitch = std::clamp(s.pitch, -pitch_limit, pitch_limit);

  s.heading = std::fmod(s.heading, 2.0 * kPi);
  if (s.heading < 0.0) s.heading += 2.0 * kPi;
  if (s.heading >= 2.0 * kPi) s.heading = 0.0;
}

AircraftState step(const AircraftState& state, const Action& action, const DynamicsConfig& cfg) {
  cfg.validate();
  if (!state.finite()) {
    throw DynamicsError(DynamicsError::Kind::NonFiniteState, "non-finite aircraft state");
  }
  const Action a = action.clamped();
  const double dt = cfg.dt;

  AircraftState next = state;
  next.p = state.p + dt * (cfg.p_max * a.aileron - state.p) / cfg.tau_p;
  next.q = state.q + dt * (cfg.q_max * a.elevator - state.q) / cfg.tau_q;
  next.r = coordinated_turn_rate(state.roll, state.pitch, state.airspeed, cfg.g0);
  next.roll = state.roll + dt * next.p;
  next.pitch = state.pitch + dt * next.q;
  next.heading = state.heading + dt * next.r;
  normalize_angles(next);

  const double v = state.airspeed;
  next.position.x() += dt * v * std::cos(next.pitch) * std::sin(next.heading);
  next.position.y() += dt * v * std::cos(next.pitch) * std::cos(next.heading);
  next.position.z() += dt * v * std::sin(next.pitch);
  next.load_factor = load_factor(next, cfg);

  if (!next.finite()) {
    throw DynamicsError(DynamicsError::Kind::NonFiniteState, "step produced a non-finite state");
  }
  return next;
}

}  // namespace agcas
