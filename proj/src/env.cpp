#include "agcas/env.hpp"

#include "agcas/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace agcas {

void RewardConfig::validate() const {
  if (!(collision_penalty < 0.0) || !(negg_penalty < 0.0)) {
    throw std::invalid_argument("reward penalties must be negative");
  }
  if (!(total_positive_budget > 0.0)) throw std::invalid_argument("reward budget must be positive");
  if (episode_max_steps == 0) throw std::invalid_argument("episode_max_steps must be positive");
  if (!(smoothness_weight >= 0.0) || !(avoidance_scale >= 0.0)) {
    throw std::invalid_argument("reward weights must be non-negative");
  }
  if (!(roll_ref > 0.0) || !(pitch_ref > 0.0)) {
    throw std::invalid_argument("level-flight reference angles must be positive");
  }
}

void EnvConfig::validate() const {
  lidar.validate();
  dynamics.validate();
  reward.validate();
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::None: return "none";
    case Termination::Collision: return "collision";
    case Termination::NegativeG: return "negative_g";
    case Termination::Timeout: return "timeout";
  }
  return "unknown";
}

double threat_severity(const LidarScan& scan) {
  if (!scan.any_hit) return 0.0;
  return 1.0 - std::min(scan.min_distance, scan.max_range) / scan.max_range;
}

RewardBreakdown compute_reward(const LidarScan& prev_scan, const LidarScan& scan,
                               const AircraftState& state, const Action& action,
                               const Action& prev_action, const TerminalFlags& flags,
                               const RewardConfig& cfg) {
  RewardBreakdown out;
  const double s_prev = threat_severity(prev_scan);
  const double s_now = threat_severity(scan);
  out.avoidance = cfg.avoidance_scale * (s_prev * s_prev - s_now * s_now);

  out.gated = threat_detected(scan);
  if (!out.gated) {
    const double roll_term = std::max(0.0, 1.0 - std::abs(state.roll) / cfg.roll_ref);
    const double pitch_term = std::max(0.0, 1.0 - std::abs(state.pitch) / cfg.pitch_ref);
    out.level = cfg.level_max() * 0.5 * (roll_term * roll_term + pitch_term * pitch_term);
  }

  const Action a = action.clamped();
  const Action b = prev_action.clamped();
  out.smoothness = -cfg.smoothness_weight *
                   (std::abs(a.aileron - b.aileron) + std::abs(a.elevator - b.elevator));

  if (flags.collision) out.sparse += cfg.collision_penalty;
  if (flags.negative_g) out.sparse += cfg.negg_penalty;
  out.total = out.level + out.avoidance + out.smoothness + out.sparse;
  return out;
}

Termination check_termination(double hat, double n, std::size_t step, const RewardConfig& cfg) {
  if (hat <= 0.0) return Termination::Collision;
  if (n < cfg.negg_floor) return Termination::NegativeG;
  if (step >= cfg.episode_max_steps) return Termination::Timeout;
  return Termination::None;
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& tr : rows) {
    const auto& s = tr.state;
    csv::Row row;
    row << tr.step << tr.t << s.position.x() << s.position.y() << s.position.z() << tr.hat
        << s.roll << s.pitch << s.heading << s.p << s.q << s.r << s.load_factor
        << tr.action.aileron << tr.action.elevator << tr.reward.total << tr.reward.level
        << tr.reward.avoidance << tr.reward.smoothness << tr.reward.gated << tr.done;
    out << row.str() << '\n';
  }
}

AircraftState state_from_ic(const InitialCondition& ic, const DynamicsConfig& cfg) {
  AircraftState s;
  s.position = ic.position;
  s.roll = deg2rad(ic.roll_deg);
  s.pitch = deg2rad(ic.pitch_deg);
  s.heading = deg2rad(ic.heading_deg);
  s.airspeed = ic.airspeed;
  normalize_angles(s);
  s.r = coordinated_turn_rate(s.roll, s.pitch, s.airspeed, cfg.g0);
  s.load_factor = load_factor(s, cfg);
  return s;
}

Environment::Environment(std::shared_ptr<const TerrainGrid> terrain, EnvConfig cfg)
    : terrain_(std::move(terrain)), cfg_(std::move(cfg)) {
  if (!terrain_) throw std::invalid_argument("environment needs a terrain grid");
  cfg_.validate();
}

void Environment::sense() {
  if (hat_ <= 0.0) {
    const double range = cfg_.lidar.range_for(state_.airspeed);
    scan_ = LidarScan::contact(cfg_.lidar.rows, cfg_.lidar.cols, range);
    radalt_.max_range = range;
    radalt_.distances.fill(0.0);
    return;
  }
  scan_ = lidar_scan(*terrain_, state_, cfg_.lidar);
  radalt_ = radalt_scan(*terrain_, state_, scan_.max_range);
}

Observation Environment::observe() const {
  Observation obs;
  obs.rows = scan_.rows;
  obs.cols = scan_.cols;
  obs.image = scan_.image;
  const auto& d = cfg_.dynamics;
  auto& sc = obs.scalars;
  sc[0] = state_.roll / kPi;
  sc[1] = state_.pitch / (kPi / 2.0);
  sc[2] = state_.p / d.p_max;
  sc[3] = state_.q / d.q_max;
  sc[4] = state_.r;
  sc[5] = state_.airspeed / d.v0;
  sc[6] = std::clamp(hat_ / 1000.0, 0.0, 5.0);
  for (std::size_t i = 0; i < 3; ++i) sc[7 + i] = radalt_.distances[i] / radalt_.max_range;
  sc[10] = prev_action_.aileron;
  sc[11] = prev_action_.elevator;
  return obs;
}

Observation Environment::reset(const InitialCondition& ic) {
  AircraftState s = state_from_ic(ic, cfg_.dynamics);
  if (!terrain_->contains(s.position.x(), s.position.y())) {
    throw EnvError(EnvError::Kind::InitialConditionOutOfBounds,
                   "initial condition lies outside the terrain extent");
  }
  const double hat = height_above_terrain(*terrain_, s.position);
  if (hat <= 0.0) {
    throw EnvError(EnvError::Kind::InitialConditionBelowTerrain,
                   "initial condition is not above the terrain");
  }
  state_ = s;
  hat_ = hat;
  prev_action_ = {};
  steps_ = 0;
  active_ = true;
  sense();
  return observe();
}

Transition Environment::step(const Action& raw_action) {
  if (!active_) {
    throw EnvError(steps_ == 0 ? EnvError::Kind::NotReset : EnvError::Kind::EpisodeFinished,
                   "step called without an active episode");
  }
  Action action = raw_action.clamped();
  if (cfg_.pitch_only) action.aileron = 0.0;

  const LidarScan prev_scan = scan_;
  state_ = agcas::step(state_, action, cfg_.dynamics);
  ++steps_;

  Transition tr;
  const bool inside = terrain_->contains(state_.position.x(), state_.position.y());
  if (inside) {
    hat_ = height_above_terrain(*terrain_, state_.position);
    sense();
  } else {
    tr.left_extent = true;  // keep the last sensor picture
  }

  TerminalFlags flags;
  flags.collision = inside && hat_ <= 0.0;
  flags.negative_g = state_.load_factor < cfg_.reward.negg_floor;
  tr.reward = compute_reward(prev_scan, scan_, state_, action, prev_action_, flags, cfg_.reward);

  tr.termination = check_termination(hat_, state_.load_factor, steps_, cfg_.reward);
  if (tr.termination == Termination::None && !inside) tr.termination = Termination::Timeout;
  tr.done = tr.termination != Termination::None;
  active_ = !tr.done;
  prev_action_ = action;
  tr.observation = observe();

  trace_.step = steps_;
  trace_.t = static_cast<double>(steps_) * cfg_.dynamics.dt;
  trace_.state = state_;
  trace_.hat = hat_;
  trace_.action = action;
  trace_.reward = tr.reward;
  trace_.done = tr.done;
  return tr;
}

}  // namespace agcas
