#pragma once

#include "agcas/dynamics.hpp"
#include "agcas/icg.hpp"
#include "agcas/sensing.hpp"
#include "agcas/terrain.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace agcas {

class EnvError : public std::runtime_error {
 public:
  enum class Kind { InitialConditionBelowTerrain, InitialConditionOutOfBounds, EpisodeFinished, NotReset };
  EnvError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::size_t kScalarObsSize = 12;
inline constexpr std::size_t kActionSize = 2;

struct Observation {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> image;  // lidar depth image, row-major
  /// phi/pi, theta/(pi/2), p/p_max, q/q_max, r, V/V0, HaT/1000 in [0,5],
  /// three radalt distances / range, previous aileron, previous elevator.
  std::array<double, kScalarObsSize> scalars{};
};

struct RewardConfig {
  double collision_penalty = -250.0;
  double negg_penalty = -250.0;
  double negg_floor = -2.0;
  double total_positive_budget = 250.0;
  std::size_t episode_max_steps = 600;
  double smoothness_weight = 0.05;
  double avoidance_scale = 50.0;
  double roll_ref = kPi / 2.0;
  double pitch_ref = kPi / 4.0;

  double level_max() const { return total_positive_budget / static_cast<double>(episode_max_steps); }
  void validate() const;
};

struct RewardBreakdown {
  double level = 0.0;
  double avoidance = 0.0;
  double smoothness = 0.0;
  double sparse = 0.0;
  bool gated = false;
  double total = 0.0;
};

enum class Termination { None, Collision, NegativeG, Timeout };
std::string_view to_string(Termination t);

struct TerminalFlags {
  bool collision = false;
  bool negative_g = false;
};

struct Transition {
  Observation observation;
  RewardBreakdown reward;
  bool done = false;
  Termination termination = Termination::None;
  bool left_extent = false;  // truncated because the aircraft left the terrain grid
};

/// Threat severity 1 - min_distance / max_range while a hit is present, else 0.
double threat_severity(const LidarScan& scan);

RewardBreakdown compute_reward(const LidarScan& prev_scan, const LidarScan& scan,
                               const AircraftState& state, const Action& action,
                               const Action& prev_action, const TerminalFlags& flags,
                               const RewardConfig& cfg);

/// Priority: collision > negative_g > timeout.
Termination check_termination(double hat, double load_factor, std::size_t step,
                              const RewardConfig& cfg);

struct EnvConfig {
  LidarConfig lidar;
  DynamicsConfig dynamics;
  RewardConfig reward;
  bool pitch_only = false;  // aileron forced to zero

  void validate() const;
};

struct TraceRow {
  std::size_t step = 0;
  double t = 0.0;
  AircraftState state;
  double hat = 0.0;
  Action action;
  RewardBreakdown reward;
  bool done = false;
};

inline constexpr std::string_view kTraceHeader =
    "step,t,x,y,alt,hat,phi,theta,psi,p,q,r,n,aileron,elevator,reward_total,reward_level,"
    "reward_avoid,reward_smooth,gated,done";

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);

/// One aircraft over one terrain. Not thread-safe; independent instances are.
class Environment {
 public:
  Environment(std::shared_ptr<const TerrainGrid> terrain, EnvConfig cfg);

  Observation reset(const InitialCondition& ic);
  Transition step(const Action& action);

  const AircraftState& state() const noexcept { return state_; }
  const LidarScan& scan() const noexcept { return scan_; }
  const RadaltReading& radalt() const noexcept { return radalt_; }
  double hat() const noexcept { return hat_; }
  std::size_t steps() const noexcept { return steps_; }
  bool active() const noexcept { return active_; }
  const EnvConfig& config() const noexcept { return cfg_; }
  const TerrainGrid& terrain() const noexcept { return *terrain_; }
  /// Trace row of the latest step.
  const TraceRow& last_trace() const noexcept { return trace_; }

 private:
  Observation observe() const;
  void sense();

  std::shared_ptr<const TerrainGrid> terrain_;
  EnvConfig cfg_;
  AircraftState state_;
  LidarScan scan_;
  RadaltReading radalt_;
  double hat_ = 0.0;
  Action prev_action_;
  std::size_t steps_ = 0;
  bool active_ = false;
  TraceRow trace_;
};

/// Initial aircraft state for an IC: rates at rest apart from the
/// coordinated-turn yaw rate.
AircraftState state_from_ic(const InitialCondition& ic, const DynamicsConfig& cfg);

}  // namespace agcas
