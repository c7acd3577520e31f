#include "agcas/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace agcas {

using json = nlohmann::json;

namespace {

// Strict view of one JSON object: every key must be consumed by a getter.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (seen_.count(key) == 0) throw ConfigError(path_ + "." + key + ": unknown key");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
    out = j_.at(key).get<double>();
  }

  void get(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(path_ + "." + key + ": expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_space(const json& j, const std::string& path, hyperopt::SearchSpace& space) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  space.dimensions.clear();
  for (const auto& [name, spec] : j.items()) {
    Section s(spec, path + "." + name);
    hyperopt::Dimension d;
    d.name = name;
    std::string type = "uniform";
    s.get("type", type);
    if (type == "uniform") {
      d.type = hyperopt::Dimension::Type::Uniform;
    } else if (type == "log_uniform") {
      d.type = hyperopt::Dimension::Type::LogUniform;
    } else if (type == "categorical") {
      d.type = hyperopt::Dimension::Type::Categorical;
    } else {
      throw ConfigError(path + "." + name + ".type: unknown dimension type '" + type + "'");
    }
    s.get("lo", d.lo);
    s.get("hi", d.hi);
    s.get("choices", d.choices);
    space.dimensions.push_back(std::move(d));
  }
}

json space_to_json(const hyperopt::SearchSpace& space) {
  json j = json::object();
  for (const auto& d : space.dimensions) {
    switch (d.type) {
      case hyperopt::Dimension::Type::Uniform:
        j[d.name] = {{"type", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        break;
      case hyperopt::Dimension::Type::LogUniform:
        j[d.name] = {{"type", "log_uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        break;
      case hyperopt::Dimension::Type::Categorical:
        j[d.name] = {{"type", "categorical"}, {"choices", d.choices}};
        break;
    }
  }
  return j;
}

}  // namespace

EnvConfig RunConfig::env_config() const {
  EnvConfig env;
  env.lidar = lidar;
  env.dynamics = dynamics;
  env.reward = reward;
  env.pitch_only = pitch_only;
  return env;
}

void RunConfig::validate() const {
  try {
    env_config().validate();
    icg.validate();
    sac.validate();
    arch.validate();
    hyperopt.space.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (terrain.size < 2 || !(terrain.cell_size > 0.0)) {
    throw ConfigError("terrain: size must be >= 2 and cell_size positive");
  }
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  RunConfig cfg;
  {
    Section root(doc, "$");
    if (!root.has("version")) throw ConfigError("$.version: required");
    int version = 0;
    root.get("version", version);
    if (version != RunConfig::kVersion) {
      throw ConfigError("$.version: unsupported version " + std::to_string(version));
    }

    if (root.has("terrain")) {
      Section s(root.child("terrain"), "$.terrain");
      std::string kind(to_string(cfg.terrain.kind));
      s.get("kind", kind);
      try {
        cfg.terrain.kind = parse_terrain_kind(kind);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("$.terrain.kind: ") + e.what());
      }
      s.get("size", cfg.terrain.size);
      s.get("cell_size", cfg.terrain.cell_size);
      s.get("amplitude", cfg.terrain.amplitude);
      s.get("seed", cfg.terrain.seed);
    }
    if (root.has("lidar")) {
      Section s(root.child("lidar"), "$.lidar");
      if (s.has("k")) {
        std::size_t k = 0;
        s.get("k", k);
        cfg.lidar.rows = cfg.lidar.cols = k;
      }
      s.get("rows", cfg.lidar.rows);
      s.get("cols", cfg.lidar.cols);
      s.get("vertical_spacing", cfg.lidar.vertical_spacing);
      s.get("horizontal_spacing", cfg.lidar.horizontal_spacing);
      s.get("boresight_depression", cfg.lidar.boresight_depression);
      s.get("detection_period", cfg.lidar.detection_period);
      s.get("min_range", cfg.lidar.min_range);
      s.get("max_range_cap", cfg.lidar.max_range_cap);
    }
    if (root.has("dynamics")) {
      Section s(root.child("dynamics"), "$.dynamics");
      s.get("p_max", cfg.dynamics.p_max);
      s.get("q_max", cfg.dynamics.q_max);
      s.get("tau_p", cfg.dynamics.tau_p);
      s.get("tau_q", cfg.dynamics.tau_q);
      s.get("v0", cfg.dynamics.v0);
      s.get("g0", cfg.dynamics.g0);
      s.get("dt", cfg.dynamics.dt);
    }
    if (root.has("reward")) {
      Section s(root.child("reward"), "$.reward");
      s.get("collision_penalty", cfg.reward.collision_penalty);
      s.get("negg_penalty", cfg.reward.negg_penalty);
      s.get("negg_floor", cfg.reward.negg_floor);
      s.get("total_positive_budget", cfg.reward.total_positive_budget);
      s.get("episode_max_steps", cfg.reward.episode_max_steps);
      s.get("smoothness_weight", cfg.reward.smoothness_weight);
      s.get("avoidance_scale", cfg.reward.avoidance_scale);
      s.get("roll_ref", cfg.reward.roll_ref);
      s.get("pitch_ref", cfg.reward.pitch_ref);
    }
    if (root.has("icg")) {
      Section s(root.child("icg"), "$.icg");
      if (s.has("area")) {
        Section a(s.child("area"), s.path("area"));
        Area area;
        a.get("x_min", area.x_min);
        a.get("y_min", area.y_min);
        a.get("x_max", area.x_max);
        a.get("y_max", area.y_max);
        cfg.icg.area = area;
      }
      s.get("roll_start", cfg.icg.roll_start);
      s.get("roll_end", cfg.icg.roll_end);
      s.get("pitch_start", cfg.icg.pitch_start);
      s.get("pitch_end", cfg.icg.pitch_end);
      s.get("attitude_step", cfg.icg.attitude_step);
      s.get("heading_step", cfg.icg.heading_step);
      s.get("collision_min", cfg.icg.collision_min);
      s.get("collision_max", cfg.icg.collision_max);
      s.get("start_hat_candidates", cfg.icg.start_hat_candidates);
      s.get("airspeed", cfg.icg.airspeed);
    }
    if (root.has("sac")) {
      Section s(root.child("sac"), "$.sac");
      s.get("gamma", cfg.sac.gamma);
      s.get("tau", cfg.sac.tau);
      s.get("lr", cfg.sac.lr);
      s.get("batch_size", cfg.sac.batch_size);
      s.get("buffer_capacity", cfg.sac.buffer_capacity);
      s.get("warmup_steps", cfg.sac.warmup_steps);
      s.get("target_entropy", cfg.sac.target_entropy);
      s.get("updates_per_env_step", cfg.sac.updates_per_env_step);
      s.get("initial_alpha", cfg.sac.initial_alpha);
      s.get("seed", cfg.sac.seed);
      if (s.has("arch")) {
        Section a(s.child("arch"), s.path("arch"));
        a.get("conv_channels", cfg.arch.conv_channels);
        a.get("feature_width", cfg.arch.feature_width);
        a.get("hidden", cfg.arch.hidden);
        a.get("actor_head_scale", cfg.arch.actor_head_scale);
      }
    }
    if (root.has("env")) {
      Section s(root.child("env"), "$.env");
      s.get("pitch_only", cfg.pitch_only);
    }
    if (root.has("hyperopt")) {
      Section s(root.child("hyperopt"), "$.hyperopt");
      s.get("budget", cfg.hyperopt.budget);
      s.get("steps_per_trial", cfg.hyperopt.steps_per_trial);
      s.get("checkpoints", cfg.hyperopt.checkpoints);
      s.get("eval_episodes", cfg.hyperopt.eval_episodes);
      s.get("seed", cfg.hyperopt.seed);
      if (s.has("space")) read_space(s.child("space"), s.path("space"), cfg.hyperopt.space);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["version"] = RunConfig::kVersion;
  j["terrain"] = {{"kind", std::string(to_string(c.terrain.kind))}, {"size", c.terrain.size},
                  {"cell_size", c.terrain.cell_size}, {"amplitude", c.terrain.amplitude},
                  {"seed", c.terrain.seed}};
  j["lidar"] = {{"rows", c.lidar.rows}, {"cols", c.lidar.cols},
                {"vertical_spacing", c.lidar.vertical_spacing},
                {"horizontal_spacing", c.lidar.horizontal_spacing},
                {"boresight_depression", c.lidar.boresight_depression},
                {"detection_period", c.lidar.detection_period}, {"min_range", c.lidar.min_range},
                {"max_range_cap", c.lidar.max_range_cap}};
  j["dynamics"] = {{"p_max", c.dynamics.p_max}, {"q_max", c.dynamics.q_max},
                   {"tau_p", c.dynamics.tau_p}, {"tau_q", c.dynamics.tau_q},
                   {"v0", c.dynamics.v0}, {"g0", c.dynamics.g0}, {"dt", c.dynamics.dt}};
  j["reward"] = {{"collision_penalty", c.reward.collision_penalty},
                 {"negg_penalty", c.reward.negg_penalty}, {"negg_floor", c.reward.negg_floor},
                 {"total_positive_budget", c.reward.total_positive_budget},
                 {"episode_max_steps", c.reward.episode_max_steps},
                 {"smoothness_weight", c.reward.smoothness_weight},
                 {"avoidance_scale", c.reward.avoidance_scale}, {"roll_ref", c.reward.roll_ref},
                 {"pitch_ref", c.reward.pitch_ref}};
  nlohmann::ordered_json icg = {{"roll_start", c.icg.roll_start}, {"roll_end", c.icg.roll_end},
                                {"pitch_start", c.icg.pitch_start}, {"pitch_end", c.icg.pitch_end},
                                {"attitude_step", c.icg.attitude_step},
                                {"heading_step", c.icg.heading_step},
                                {"collision_min", c.icg.collision_min},
                                {"collision_max", c.icg.collision_max},
                                {"start_hat_candidates", c.icg.start_hat_candidates},
                                {"airspeed", c.icg.airspeed}};
  if (c.icg.area) {
    icg["area"] = {{"x_min", c.icg.area->x_min}, {"y_min", c.icg.area->y_min},
                   {"x_max", c.icg.area->x_max}, {"y_max", c.icg.area->y_max}};
  }
  j["icg"] = icg;
  j["sac"] = {{"gamma", c.sac.gamma}, {"tau", c.sac.tau}, {"lr", c.sac.lr},
              {"batch_size", c.sac.batch_size}, {"buffer_capacity", c.sac.buffer_capacity},
              {"warmup_steps", c.sac.warmup_steps}, {"target_entropy", c.sac.target_entropy},
              {"updates_per_env_step", c.sac.updates_per_env_step},
              {"initial_alpha", c.sac.initial_alpha}, {"seed", c.sac.seed},
              {"arch",
               {{"conv_channels", c.arch.conv_channels}, {"feature_width", c.arch.feature_width},
                {"hidden", c.arch.hidden}, {"actor_head_scale", c.arch.actor_head_scale}}}};
  j["env"] = {{"pitch_only", c.pitch_only}};
  j["hyperopt"] = {{"budget", c.hyperopt.budget}, {"steps_per_trial", c.hyperopt.steps_per_trial},
                   {"checkpoints", c.hyperopt.checkpoints},
                   {"eval_episodes", c.hyperopt.eval_episodes}, {"seed", c.hyperopt.seed},
                   {"space", space_to_json(c.hyperopt.space)}};
  return j.dump(2);
}

TerrainGrid generate_terrain(const TerrainGenConfig& cfg) {
  return generate_terrain(cfg.kind, cfg.size, cfg.cell_size, cfg.amplitude, cfg.seed);
}

// ---------------------------------------------------------------------------

EnvFactory Scenario::factory() const {
  return [terrain = terrain, env = env] { return Environment(terrain, env); };
}

std::vector<InitialCondition> spread_subset(const std::vector<InitialCondition>& ics,
                                            std::size_t count) {
  if (count >= ics.size()) return ics;
  std::vector<InitialCondition> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ics[i * ics.size() / count]);
  return out;
}

Scenario ridge_scenario(std::size_t lidar_k, bool pitch_only, std::size_t eval_count) {
  TerrainGenConfig tcfg;  // 256 x 256 nodes, 60 m cells, 500 m ridge
  auto grid = std::make_shared<const TerrainGrid>(generate_terrain(tcfg));

  Scenario sc;
  sc.terrain = grid;
  sc.env.lidar = LidarConfig::square(lidar_k);
  sc.env.pitch_only = pitch_only;

  const double cx = 0.5 * (grid->origin_x() + grid->max_x());
  const double ridge_y = grid->max_y() - static_cast<double>(grid->nrows() / 2) * grid->cell_size();
  IcgConfig icg;
  icg.area = Area{cx - 100.0, ridge_y - 2100.0, cx + 100.0, ridge_y - 1900.0};
  if (pitch_only) icg.roll_end = 0.0;  // wings level only
  sc.train_ics = generate_initial_conditions(*grid, icg).conditions;
  sc.eval_ics = spread_subset(sc.train_ics, eval_count);
  return sc;
}

}  // namespace agcas
