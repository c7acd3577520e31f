#include "agcas/env.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace agcas;

namespace {

std::shared_ptr<const TerrainGrid> flat() {
  static auto g = std::make_shared<const TerrainGrid>(generate_terrain(TerrainKind::Flat, 401, 30.0, 0.0, 0));
  return g;
}

InitialCondition ic_at(double alt, double pitch_deg = 0.0, double roll_deg = 0.0) {
  InitialCondition ic;
  ic.position = Vec3(6000.0, 1000.0, alt);
  ic.pitch_deg = pitch_deg;
  ic.roll_deg = roll_deg;
  ic.airspeed = 200.0;
  return ic;
}

LidarScan scan_with(double min_distance, double max_range = 2000.0) {
  LidarScan s;
  s.rows = s.cols = 1;
  s.max_range = max_range;
  s.any_hit = min_distance < max_range;
  s.min_distance = std::min(min_distance, max_range);
  s.distances = {s.min_distance};
  s.image = {s.min_distance / max_range};
  return s;
}

}  // namespace

TEST(Reset, LevelHighObservation) {
  Environment env(flat(), EnvConfig{});
  const auto obs = env.reset(ic_at(3000.0));
  const std::array<double, 12> expect{0, 0, 0, 0, 0, 1, 3, 1, 1, 1, 0, 0};
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(obs.scalars[i], expect[i], 1e-12) << i;
  for (double v : obs.image) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_EQ(obs.image.size(), 256u);
}

TEST(Reset, DiveSeesTerrainAndBadIcsFail) {
  Environment env(flat(), EnvConfig{});
  env.reset(ic_at(900.0, -30.0));
  EXPECT_TRUE(env.scan().any_hit);
  EXPECT_THROW(env.reset(ic_at(-5.0)), EnvError);
  auto outside = ic_at(500.0);
  outside.position.x() = -10.0;
  EXPECT_THROW(env.reset(outside), EnvError);
}

TEST(Step, NominalLevelFlight) {
  Environment env(flat(), EnvConfig{});
  EXPECT_THROW(env.step(Action{}), EnvError);
  env.reset(ic_at(3000.0));
  const auto tr = env.step(Action{});
  EXPECT_FALSE(tr.done);
  EXPECT_EQ(tr.termination, Termination::None);
  EXPECT_DOUBLE_EQ(tr.reward.sparse, 0.0);
  EXPECT_DOUBLE_EQ(tr.reward.level, 250.0 / 600.0);
  EXPECT_DOUBLE_EQ(tr.reward.avoidance, 0.0);
  EXPECT_DOUBLE_EQ(tr.reward.smoothness, 0.0);
}

TEST(Step, CollisionTerminatesWithPenalty) {
  Environment env(flat(), EnvConfig{});
  env.reset(ic_at(300.0, -60.0));
  Transition tr;
  int penalties = 0;
  while (!(tr = env.step(Action{})).done) penalties += tr.reward.sparse != 0.0;
  EXPECT_EQ(penalties, 0);
  EXPECT_EQ(tr.termination, Termination::Collision);
  EXPECT_DOUBLE_EQ(tr.reward.sparse, -250.0);
  EXPECT_LE(env.hat(), 0.0);
  EXPECT_THROW(env.step(Action{}), EnvError);
}

TEST(Step, NegativeGTerminatesWithPenalty) {
  Environment env(flat(), EnvConfig{});
  env.reset(ic_at(3000.0));
  Transition tr;
  while (!(tr = env.step(Action{0.0, -1.0})).done) {
    EXPECT_GE(env.state().load_factor, -2.0);
  }
  EXPECT_EQ(tr.termination, Termination::NegativeG);
  EXPECT_DOUBLE_EQ(tr.reward.sparse, -250.0);
  EXPECT_LT(env.state().load_factor, -2.0);
}

TEST(Step, PitchOnlyIgnoresAileron) {
  EnvConfig cfg;
  cfg.pitch_only = true;
  Environment env(flat(), cfg);
  env.reset(ic_at(3000.0));
  for (int i = 0; i < 20; ++i) env.step(Action{1.0, 0.2});
  EXPECT_DOUBLE_EQ(env.state().roll, 0.0);
  EXPECT_DOUBLE_EQ(env.last_trace().action.aileron, 0.0);
}

TEST(Termination, Priority) {
  const RewardConfig cfg;
  EXPECT_EQ(check_termination(-0.1, 1.0, 3, cfg), Termination::Collision);
  EXPECT_EQ(check_termination(-0.1, -3.0, 700, cfg), Termination::Collision);
  EXPECT_EQ(check_termination(10.0, -2.5, 700, cfg), Termination::NegativeG);
  EXPECT_EQ(check_termination(10.0, -2.0, 600, cfg), Termination::Timeout);
  EXPECT_EQ(check_termination(10.0, 1.0, 599, cfg), Termination::None);
}

TEST(Reward, MaximaWhenLevelAndClear) {
  const RewardConfig cfg;
  const auto clear = scan_with(1e9);
  const auto r = compute_reward(clear, clear, AircraftState{}, Action{0.3, 0.1}, Action{0.3, 0.1}, {}, cfg);
  EXPECT_DOUBLE_EQ(r.level, cfg.level_max());
  EXPECT_DOUBLE_EQ(r.avoidance, 0.0);
  EXPECT_DOUBLE_EQ(r.smoothness, 0.0);
  EXPECT_FALSE(r.gated);
}

TEST(Reward, ClosingThreatIsPunished) {
  const RewardConfig cfg;
  const auto r = compute_reward(scan_with(1500), scan_with(1000), AircraftState{}, Action{}, Action{}, {}, cfg);
  EXPECT_TRUE(r.gated);
  EXPECT_DOUBLE_EQ(r.level, 0.0);
  EXPECT_LT(r.avoidance, 0.0);
  EXPECT_DOUBLE_EQ(r.avoidance, 50.0 * (0.25 * 0.25 - 0.5 * 0.5));
}

TEST(Reward, SmoothnessAndSparse) {
  const RewardConfig cfg;
  const auto clear = scan_with(1e9);
  TerminalFlags both{true, true};
  const auto r = compute_reward(clear, clear, AircraftState{}, Action{1.0, -1.0}, Action{0.0, 0.0}, both, cfg);
  EXPECT_DOUBLE_EQ(r.smoothness, -0.1);
  EXPECT_DOUBLE_EQ(r.sparse, -500.0);
  EXPECT_DOUBLE_EQ(r.total, r.level + r.avoidance + r.smoothness + r.sparse);
}

TEST(Reward, AvoidanceTelescopes) {
  const RewardConfig cfg;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(100.0, 1999.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LidarScan> seq{scan_with(1e9)};
    for (int i = 0; i < 20; ++i) seq.push_back(scan_with(d(rng)));
    seq.push_back(scan_with(1e9));
    double sum = 0.0;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      sum += compute_reward(seq[i - 1], seq[i], AircraftState{}, Action{}, Action{}, {}, cfg).avoidance;
    }
    EXPECT_NEAR(sum, 0.0, 1e-9);
    const double a = threat_severity(seq[1]), b = threat_severity(seq[20]);
    double inner = 0.0;
    for (std::size_t i = 2; i <= 20; ++i) {
      inner += compute_reward(seq[i - 1], seq[i], AircraftState{}, Action{}, Action{}, {}, cfg).avoidance;
    }
    EXPECT_NEAR(inner, 50.0 * (a * a - b * b), 1e-9);
  }
}

TEST(Episode, LevelBudgetAndObservationRanges) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Environment env(std::make_shared<const TerrainGrid>(generate_terrain(TerrainKind::Fractal, 257, 30.0, 600.0, 3)),
                  EnvConfig{});
  for (int episode = 0; episode < 5; ++episode) {
    InitialCondition ic;
    ic.position = Vec3(3840.0, 3840.0, 1500.0);
    ic.heading_deg = 72.0 * episode;
    env.reset(ic);
    double level = 0.0;
    Transition tr;
    do {
      tr = env.step(Action{u(rng), u(rng)});
      level += tr.reward.level;
      const auto& sc = tr.observation.scalars;
      EXPECT_GE(sc[0], -1.0);
      EXPECT_LT(sc[0], 1.0);
      EXPECT_GT(sc[1], -1.0);
      EXPECT_LT(sc[1], 1.0);
      EXPECT_LE(std::abs(sc[2]), 1.0 + 1e-12);
      EXPECT_LE(std::abs(sc[3]), 1.0 + 1e-12);
      EXPECT_GE(sc[6], 0.0);
      EXPECT_LE(sc[6], 5.0);
      for (int i = 7; i < 10; ++i) {
        EXPECT_GE(sc[i], 0.0);
        EXPECT_LE(sc[i], 1.0);
      }
      EXPECT_LE(std::abs(sc[10]), 1.0);
      EXPECT_LE(std::abs(sc[11]), 1.0);
      EXPECT_EQ(tr.done, tr.termination != Termination::None);
    } while (!tr.done);
    EXPECT_LE(level, 250.0 + 1e-9);
  }
}

TEST(Trace, HeaderMatchesColumns) {
  Environment env(flat(), EnvConfig{});
  env.reset(ic_at(3000.0));
  env.step(Action{});
  std::ostringstream out;
  write_trace_csv({env.last_trace()}, out);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, kTraceHeader);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}
