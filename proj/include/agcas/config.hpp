#pragma once

#include "agcas/agent.hpp"
#include "agcas/env.hpp"
#include "agcas/hyperopt.hpp"
#include "agcas/icg.hpp"
#include "agcas/terrain.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace agcas {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TerrainGenConfig {
  TerrainKind kind = TerrainKind::Ridge;
  std::size_t size = 256;
  double cell_size = 60.0;
  double amplitude = 500.0;
  std::uint64_t seed = 1;
};

struct HyperoptConfig {
  std::size_t budget = 10;
  std::size_t steps_per_trial = 20000;
  std::size_t checkpoints = 4;
  std::size_t eval_episodes = 10;
  std::uint64_t seed = 0;
  hyperopt::SearchSpace space = hyperopt::SearchSpace::sac_default();
};

/// Every section optional; unknown keys rejected; "version" required.
struct RunConfig {
  static constexpr int kVersion = 1;

  TerrainGenConfig terrain;
  LidarConfig lidar;
  DynamicsConfig dynamics;
  RewardConfig reward;
  IcgConfig icg;
  SacConfig sac;
  ArchConfig arch;  // "sac.arch"
  bool pitch_only = false;  // "env.pitch_only"
  HyperoptConfig hyperopt;

  EnvConfig env_config() const;
  void validate() const;
};

/// Throws ConfigError with the offending key path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& cfg);

TerrainGrid generate_terrain(const TerrainGenConfig& cfg);

/// Pitch-only desk-scale scenario: broad ridge, diving initial conditions
/// south of the ridge line with zero roll.
struct Scenario {
  std::shared_ptr<const TerrainGrid> terrain;
  EnvConfig env;
  std::vector<InitialCondition> train_ics;
  std::vector<InitialCondition> eval_ics;

  EnvFactory factory() const;
};

Scenario ridge_scenario(std::size_t lidar_k, bool pitch_only, std::size_t eval_count = 100);

/// `count` entries picked at evenly spaced indices.
std::vector<InitialCondition> spread_subset(const std::vector<InitialCondition>& ics,
                                            std::size_t count);

}  // namespace agcas
