#include "agcas/icg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

using namespace agcas;

namespace {

const TerrainGrid& flat() {
  static const auto g = generate_terrain(TerrainKind::Flat, 201, 30.0, 0.0, 0);
  return g;
}

}  // namespace

TEST(Predict, FlatGeometry) {
  const Vec3 p(3000, 3000, 1000);
  const auto d = predict_collision_distance(flat(), p, -30.0, 45.0, 2500.0);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(*d, 2000.0, 0.5);
  EXPECT_FALSE(predict_collision_distance(flat(), p, 0.0, 0.0, 2500.0).has_value());
}

TEST(Predict, MatchesLineOfSight) {
  const auto g = generate_terrain(TerrainKind::Fractal, 129, 30.0, 500.0, 6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(1000, 2800), up(-89, 0), uh(0, 360);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), y = ux(rng);
    const Vec3 p(x, y, g.elevation_at(x, y) + 400.0);
    const double pitch = up(rng), heading = uh(rng);
    const auto los = line_of_sight(g, p, velocity_direction(deg2rad(pitch), deg2rad(heading)).normalized(), 2000.0);
    const auto d = predict_collision_distance(g, p, pitch, heading, 2000.0);
    ASSERT_EQ(d.has_value(), los.hit);
    if (los.hit) EXPECT_DOUBLE_EQ(*d, los.distance);
  }
}

TEST(Generate, SlantRangeFilterOnFlat) {
  IcgConfig cfg;
  cfg.start_hat_candidates = {900.0};
  cfg.heading_step = 90.0;
  const auto result = generate_initial_conditions(flat(), cfg);
  EXPECT_EQ(result.candidates, 4u * 16u * 16u);
  bool saw_30 = false;
  for (const auto& ic : result.conditions) {
    EXPECT_NE(ic.pitch_deg, 0.0);
    EXPECT_NE(ic.pitch_deg, -6.0);  // 900 / sin 6 deg = 8610 m
    EXPECT_GE(ic.predicted_impact, 750.0);
    EXPECT_LE(ic.predicted_impact, 2000.0);
    if (ic.pitch_deg == -30.0 && ic.heading_deg == 0.0) {
      saw_30 = true;
      EXPECT_NEAR(ic.predicted_impact, 1800.0, 0.5);
    }
  }
  EXPECT_TRUE(saw_30);
}

TEST(Generate, OrderingAndDeterminism) {
  IcgConfig cfg;
  cfg.heading_step = 45.0;
  const auto g = generate_terrain(TerrainKind::Ridge, 128, 60.0, 500.0, 1);
  const auto a = generate_initial_conditions(g, cfg);
  const auto b = generate_initial_conditions(g, cfg);
  EXPECT_EQ(a.conditions, b.conditions);
  for (std::size_t i = 1; i < a.conditions.size(); ++i) {
    const auto& p = a.conditions[i - 1];
    const auto& q = a.conditions[i];
    const auto key = [](const InitialCondition& c) {
      return std::make_tuple(c.heading_deg, -c.pitch_deg, -c.roll_deg, c.position.z());
    };
    EXPECT_LT(key(p), key(q));
  }
  for (const auto& ic : a.conditions) {
    const auto again = predict_collision_distance(g, ic.position, ic.pitch_deg, ic.heading_deg, cfg.collision_max);
    ASSERT_TRUE(again.has_value());
    EXPECT_EQ(*again, ic.predicted_impact);
    EXPECT_GT(height_above_terrain(g, ic.position), 0.0);
  }
}

TEST(Generate, DefaultCardinality) {
  IcgConfig cfg;
  cfg.start_hat_candidates = {300.0};
  EXPECT_EQ(generate_initial_conditions(flat(), cfg).candidates, 360u * 16u * 16u);
}

TEST(Generate, AreaMustFit) {
  IcgConfig cfg;
  cfg.area = Area{-100.0, 0.0, 500.0, 500.0};
  EXPECT_THROW(generate_initial_conditions(flat(), cfg), IcgError);
}

TEST(Generate, HighStartsYieldNothing) {
  IcgConfig cfg;
  cfg.start_hat_candidates = {5000.0};
  cfg.heading_step = 30.0;
  EXPECT_TRUE(generate_initial_conditions(flat(), cfg).conditions.empty());
}

TEST(SweepValues, InclusiveEnds) {
  EXPECT_EQ(sweep_values(0.0, -90.0, 6.0).size(), 16u);
  EXPECT_EQ(sweep_values(0.0, -90.0, 6.0).back(), -90.0);
  EXPECT_EQ(sweep_values(5.0, 5.0, 1.0), std::vector<double>{5.0});
}

TEST(IcCsv, RoundTrip) {
  IcgConfig cfg;
  cfg.heading_step = 60.0;
  const auto ics = generate_initial_conditions(flat(), cfg).conditions;
  ASSERT_FALSE(ics.empty());
  std::stringstream ss;
  write_ic_csv(ics, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
            "x,y,alt,roll_deg,pitch_deg,heading_deg,airspeed,predicted_impact_m");
  EXPECT_EQ(read_ic_csv(ss), ics);
  std::istringstream bad("x,y\n1,2\n");
  EXPECT_THROW(read_ic_csv(bad), IcgError);
}
