#include "commands.hpp"

#include "agcas/agent.hpp"
#include "agcas/config.hpp"
#include "agcas/env.hpp"
#include "agcas/hyperopt.hpp"
#include "agcas/icg.hpp"
#include "agcas/nn.hpp"
#include "agcas/sensing.hpp"
#include "agcas/terrain.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace agcas::cli {
namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

void log(const std::string& msg) { std::cerr << "agcas: " << msg << '\n'; }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

RunConfig config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return load_run_config(path);
}

// --- terrain gen ------------------------------------------------------------

struct TerrainGenArgs {
  std::string kind = "ridge";
  std::size_t size = 256;
  double cell = 60.0;
  double amplitude = 500.0;
  std::uint64_t seed = 1;
  std::string out;
};

int terrain_gen(const TerrainGenArgs& a) {
  TerrainGenConfig cfg;
  cfg.kind = parse_terrain_kind(a.kind);
  cfg.size = a.size;
  cfg.cell_size = a.cell;
  cfg.amplitude = a.amplitude;
  cfg.seed = a.seed;
  const TerrainGrid grid = generate_terrain(cfg);
  auto out = open_out(a.out);
  save_ascii_grid(grid, out);
  finish(out, a.out);
  log("wrote " + std::to_string(grid.ncols()) + "x" + std::to_string(grid.nrows()) + " grid to " + a.out);
  return 0;
}

// --- ic gen -----------------------------------------------------------------

struct IcGenArgs {
  std::string config;
  std::string terrain;
  std::string out;
  std::vector<double> area;
  std::optional<double> roll_start, roll_end, pitch_start, pitch_end;
  std::optional<double> attitude_step, heading_step;
  std::optional<double> collision_min, collision_max, airspeed;
  std::vector<double> hat;
};

int ic_gen(const IcGenArgs& a) {
  IcgConfig cfg = config_or_default(a.config).icg;
  if (a.area.size() == 4) cfg.area = Area{a.area[0], a.area[1], a.area[2], a.area[3]};
  if (a.roll_start) cfg.roll_start = *a.roll_start;
  if (a.roll_end) cfg.roll_end = *a.roll_end;
  if (a.pitch_start) cfg.pitch_start = *a.pitch_start;
  if (a.pitch_end) cfg.pitch_end = *a.pitch_end;
  if (a.attitude_step) cfg.attitude_step = *a.attitude_step;
  if (a.heading_step) cfg.heading_step = *a.heading_step;
  if (a.collision_min) cfg.collision_min = *a.collision_min;
  if (a.collision_max) cfg.collision_max = *a.collision_max;
  if (a.airspeed) cfg.airspeed = *a.airspeed;
  if (!a.hat.empty()) cfg.start_hat_candidates = a.hat;

  const TerrainGrid grid = load_ascii_grid_file(a.terrain);
  const IcgResult result = generate_initial_conditions(grid, cfg);
  auto out = open_out(a.out);
  write_ic_csv(result.conditions, out);
  finish(out, a.out);
  log(std::to_string(result.conditions.size()) + " of " + std::to_string(result.candidates) +
      " candidates kept");
  return 0;
}

// --- lidar render -----------------------------------------------------------

struct LidarArgs {
  std::string config;
  std::string terrain;
  std::string out;
  double x = 0.0, y = 0.0, alt = 0.0;
  double roll = 0.0, pitch = 0.0, heading = 0.0;
  double speed = 200.0;
  std::optional<std::size_t> k;
};

int lidar_render(const LidarArgs& a) {
  LidarConfig lidar = config_or_default(a.config).lidar;
  if (a.k) lidar = LidarConfig::square(*a.k);
  lidar.validate();
  const TerrainGrid grid = load_ascii_grid_file(a.terrain);
  AircraftState s;
  s.position = Vec3(a.x, a.y, a.alt);
  s.roll = deg2rad(a.roll);
  s.pitch = deg2rad(a.pitch);
  s.heading = deg2rad(a.heading);
  s.airspeed = a.speed;
  if (!grid.contains(a.x, a.y)) throw std::runtime_error("pose lies outside the terrain extent");
  if (height_above_terrain(grid, s.position) <= 0.0) throw std::runtime_error("pose is below the terrain");
  const LidarScan scan = lidar_scan(grid, s, lidar);
  auto out = open_out(a.out);
  write_pgm(scan, out);
  finish(out, a.out);
  log("min distance " + std::to_string(scan.min_distance) + " m of " + std::to_string(scan.max_range));
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string terrain;
  std::string ics;
  std::size_t steps = 50000;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

int train_cmd(const TrainArgs& a) {
  RunConfig cfg = config_or_default(a.config);
  if (a.seed) cfg.sac.seed = *a.seed;
  auto grid = std::make_shared<const TerrainGrid>(load_ascii_grid_file(a.terrain));
  const auto ics = read_ic_csv_file(a.ics);
  if (ics.empty()) throw std::runtime_error("initial-condition file '" + a.ics + "' has no rows");
  fs::create_directories(a.out_dir);

  const EnvConfig env_cfg = cfg.env_config();
  const EnvFactory factory = [grid, env_cfg] { return Environment(grid, env_cfg); };

  TrainingOptions opts;
  opts.total_steps = a.steps;
  opts.stop = &g_stop;
  opts.checkpoint_every = std::max<std::size_t>(1, a.steps / 20);
  opts.checkpoint = [total = a.steps](std::size_t step, const SacState& sac) {
    log("step " + std::to_string(step) + "/" + std::to_string(total) + " alpha " +
        std::to_string(sac.alpha()));
    return true;
  };

  g_stop.store(false);
  auto previous = std::signal(SIGINT, on_interrupt);
  TrainResult result = train(factory, cfg.sac, cfg.arch, ics, opts);
  std::signal(SIGINT, previous);

  const std::string policy_path = (fs::path(a.out_dir) / "policy.json").string();
  const std::string log_path = (fs::path(a.out_dir) / "training_log.csv").string();
  nn::save_params(policy_path, result.sac.actor_spec, result.sac.actor);
  auto out = open_out(log_path);
  write_training_log(result.log, out);
  finish(out, log_path);
  log(std::to_string(result.log.size()) + " episodes logged to " + log_path);
  if (result.stopped) {
    log("interrupted; partial outputs written");
    return 1;
  }
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string policy;
  std::string terrain;
  std::string ics;
  std::size_t episodes = 100;
  std::string traces_dir;
  std::string out;
};

int eval_cmd(const EvalArgs& a) {
  const RunConfig cfg = config_or_default(a.config);
  nn::NetworkSpec spec;
  nn::Params actor;
  nn::load_params(a.policy, spec, actor);
  const EnvConfig env_cfg = cfg.env_config();
  if (spec.input.channels != 1 || spec.input.height != env_cfg.lidar.rows ||
      spec.input.width != env_cfg.lidar.cols || spec.side_width() != kScalarObsSize ||
      spec.output_width() != 2 * kActionSize) {
    throw nn::ShapeMismatch("policy '" + a.policy + "' does not match the configured observation (" +
                            std::to_string(env_cfg.lidar.rows) + "x" +
                            std::to_string(env_cfg.lidar.cols) + " lidar)");
  }
  auto grid = std::make_shared<const TerrainGrid>(load_ascii_grid_file(a.terrain));
  const auto ics = read_ic_csv_file(a.ics);
  if (ics.empty()) throw std::runtime_error("initial-condition file '" + a.ics + "' has no rows");
  const EnvFactory factory = [grid, env_cfg] { return Environment(grid, env_cfg); };

  TraceSink sink;
  if (!a.traces_dir.empty()) {
    fs::create_directories(a.traces_dir);
    sink = [dir = a.traces_dir](std::size_t episode, const std::vector<TraceRow>& rows) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%04zu.csv", episode);
      const std::string path = (fs::path(dir) / name).string();
      auto out = open_out(path);
      write_trace_csv(rows, out);
      finish(out, path);
    };
  }
  const EvalReport report = evaluate(actor_policy(spec, actor), factory, ics, a.episodes, sink);
  const std::string json = eval_report_json(report);
  if (a.out.empty()) {
    std::cout << json << '\n';
  } else {
    auto out = open_out(a.out);
    out << json << '\n';
    finish(out, a.out);
  }
  log("collision rate " + std::to_string(report.collision_rate) + " over " +
      std::to_string(report.episodes) + " episodes");
  return 0;
}

// --- hyperopt ---------------------------------------------------------------

struct HyperoptArgs {
  std::string config;
  std::optional<std::size_t> budget;
  std::string out;
  std::string terrain;
  std::string ics;
  std::optional<double> synthetic_lr;
};

void apply_trial_config(const hyperopt::Config& trial, SacConfig& sac) {
  for (const auto& [name, value] : trial) {
    if (name == "lr") {
      sac.lr = value;
    } else if (name == "gamma") {
      sac.gamma = value;
    } else if (name == "tau") {
      sac.tau = value;
    } else if (name == "batch_size") {
      sac.batch_size = static_cast<std::size_t>(std::llround(value));
    } else if (name == "initial_alpha") {
      sac.initial_alpha = value;
    } else {
      throw hyperopt::HyperoptError(hyperopt::HyperoptError::Kind::InvalidSpace,
                                    "no SAC setting named '" + name + "'");
    }
  }
}

int hyperopt_cmd(const HyperoptArgs& a) {
  const RunConfig cfg = config_or_default(a.config);
  const HyperoptConfig& h = cfg.hyperopt;
  h.space.validate();
  const std::size_t budget = a.budget.value_or(h.budget);

  hyperopt::Objective objective;
  if (a.synthetic_lr) {
    objective = hyperopt::synthetic_lr_objective(*a.synthetic_lr, h.checkpoints);
  } else {
    if (a.terrain.empty() || a.ics.empty()) {
      throw std::runtime_error("--terrain and --ics are required unless --synthetic-lr is given");
    }
    // Reject names the trainer cannot consume before any trial runs.
    SacConfig probe = cfg.sac;
    std::mt19937_64 probe_rng(h.seed);
    apply_trial_config(hyperopt::sample_config(h.space, probe_rng), probe);

    auto grid = std::make_shared<const TerrainGrid>(load_ascii_grid_file(a.terrain));
    const auto ics = read_ic_csv_file(a.ics);
    if (ics.empty()) throw std::runtime_error("initial-condition file '" + a.ics + "' has no rows");
    const auto eval_ics = spread_subset(ics, h.eval_episodes);
    const EnvConfig env_cfg = cfg.env_config();
    const EnvFactory factory = [grid, env_cfg] { return Environment(grid, env_cfg); };

    objective = [&, factory, eval_ics](const hyperopt::Config& trial, hyperopt::TrialReporter& reporter) {
      SacConfig sac = cfg.sac;
      apply_trial_config(trial, sac);
      double last = 0.0;
      TrainingOptions opts;
      opts.total_steps = h.steps_per_trial;
      opts.stop = &g_stop;
      opts.checkpoint_every = std::max<std::size_t>(1, h.steps_per_trial / std::max<std::size_t>(1, h.checkpoints));
      opts.checkpoint = [&](std::size_t step, const SacState& state) {
        last = evaluate(state, factory, eval_ics, eval_ics.size()).mean_return;
        return !reporter.report(step, last);
      };
      train(factory, sac, cfg.arch, ics, opts);
      return last;
    };
  }

  g_stop.store(false);
  auto previous = std::signal(SIGINT, on_interrupt);
  const hyperopt::Study study = hyperopt::run_study(h.space, budget, objective, h.seed);
  std::signal(SIGINT, previous);

  auto out = open_out(a.out);
  hyperopt::write_study_csv(study, h.space, out);
  finish(out, a.out);
  log("best trial " + std::to_string(study.best_trial().id) + " objective " +
      std::to_string(*study.best_trial().final_objective));
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Terrain-aware ground collision avoidance training toolkit"};
  app.require_subcommand(1);

  TerrainGenArgs tg;
  auto* terrain = app.add_subcommand("terrain", "Terrain grids");
  terrain->require_subcommand(1);
  auto* tgen = terrain->add_subcommand("gen", "Generate a synthetic terrain grid");
  tgen->add_option("--kind", tg.kind, "Terrain kind")
      ->check(CLI::IsMember({"flat", "ridge", "valley", "fractal"}))
      ->capture_default_str();
  tgen->add_option("--size", tg.size, "Nodes per side")->capture_default_str();
  tgen->add_option("--cell", tg.cell, "Cell size in metres")->capture_default_str();
  tgen->add_option("--amplitude", tg.amplitude, "Relief in metres")->capture_default_str();
  tgen->add_option("--seed", tg.seed)->capture_default_str();
  tgen->add_option("--out", tg.out, "Output .asc path")->required();

  IcGenArgs ig;
  auto* ic = app.add_subcommand("ic", "Initial conditions");
  ic->require_subcommand(1);
  auto* igen = ic->add_subcommand("gen", "Sweep attitudes and headings for diving initial conditions");
  igen->add_option("--config", ig.config, "Run config JSON (icg section)");
  igen->add_option("--terrain", ig.terrain)->required();
  igen->add_option("--out", ig.out, "Output CSV path")->required();
  igen->add_option("--area", ig.area, "x_min y_min x_max y_max")->expected(4);
  igen->add_option("--roll-start", ig.roll_start);
  igen->add_option("--roll-end", ig.roll_end);
  igen->add_option("--pitch-start", ig.pitch_start);
  igen->add_option("--pitch-end", ig.pitch_end);
  igen->add_option("--attitude-step", ig.attitude_step);
  igen->add_option("--heading-step", ig.heading_step);
  igen->add_option("--collision-min", ig.collision_min);
  igen->add_option("--collision-max", ig.collision_max);
  igen->add_option("--hat", ig.hat, "Candidate start heights above terrain");
  igen->add_option("--airspeed", ig.airspeed);

  LidarArgs lr;
  auto* lidar = app.add_subcommand("lidar", "Lidar images");
  lidar->require_subcommand(1);
  auto* render = lidar->add_subcommand("render", "Render the lidar depth image at a pose as PGM");
  render->add_option("--config", lr.config, "Run config JSON (lidar section)");
  render->add_option("--terrain", lr.terrain)->required();
  render->add_option("--x", lr.x)->required();
  render->add_option("--y", lr.y)->required();
  render->add_option("--alt", lr.alt)->required();
  render->add_option("--roll", lr.roll, "deg")->capture_default_str();
  render->add_option("--pitch", lr.pitch, "deg")->capture_default_str();
  render->add_option("--heading", lr.heading, "deg clockwise from north")->capture_default_str();
  render->add_option("--speed", lr.speed, "m/s")->capture_default_str();
  render->add_option("--k", lr.k, "Square image size (overrides config)");
  render->add_option("--out", lr.out)->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a SAC policy");
  train->add_option("--config", tr.config, "Run config JSON");
  train->add_option("--terrain", tr.terrain)->required();
  train->add_option("--ics", tr.ics)->required();
  train->add_option("--steps", tr.steps)->capture_default_str();
  train->add_option("--seed", tr.seed, "Overrides sac.seed");
  train->add_option("--out-dir", tr.out_dir)->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy deterministically");
  eval->add_option("--config", ev.config, "Run config JSON (env sections)");
  eval->add_option("--policy", ev.policy)->required();
  eval->add_option("--terrain", ev.terrain)->required();
  eval->add_option("--ics", ev.ics)->required();
  eval->add_option("--episodes", ev.episodes)->capture_default_str();
  eval->add_option("--traces-dir", ev.traces_dir, "Write one trace CSV per episode");
  eval->add_option("--out", ev.out, "Report JSON path (stdout when omitted)");

  HyperoptArgs ho;
  auto* hopt = app.add_subcommand("hyperopt", "Random search with median pruning");
  hopt->add_option("--config", ho.config, "Run config JSON (hyperopt and sac sections)");
  hopt->add_option("--budget", ho.budget, "Overrides hyperopt.budget");
  hopt->add_option("--out", ho.out, "Study CSV path")->required();
  hopt->add_option("--terrain", ho.terrain);
  hopt->add_option("--ics", ho.ics);
  hopt->add_option("--synthetic-lr", ho.synthetic_lr, "Use a synthetic objective peaking at this lr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*tgen) return terrain_gen(tg);
    if (*igen) return ic_gen(ig);
    if (*render) return lidar_render(lr);
    if (*train) return train_cmd(tr);
    if (*eval) return eval_cmd(ev);
    if (*hopt) return hyperopt_cmd(ho);
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return 1;
  }
  return 2;
}

}  // namespace agcas::cli
