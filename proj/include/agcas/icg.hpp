#pragma once

#include "agcas/terrain.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agcas {

class IcgError : public std::runtime_error {
 public:
  enum class Kind { AreaOutOfBounds, InvalidConfig, MalformedFile };
  IcgError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct Area {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  Vec3 center(double altitude) const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max), altitude}; }
};

struct IcgConfig {
  std::optional<Area> area;        // defaults to the full grid extent
  double roll_start = 0.0;         // deg; sweeps from start towards end
  double roll_end = -90.0;
  double pitch_start = 0.0;
  double pitch_end = -90.0;
  double attitude_step = 6.0;      // deg
  double heading_step = 1.0;       // deg
  double collision_min = 750.0;    // m
  double collision_max = 2000.0;   // m
  std::vector<double> start_hat_candidates{300.0, 600.0, 900.0, 1200.0};
  double airspeed = 200.0;

  void validate() const;
};

struct InitialCondition {
  Vec3 position = Vec3::Zero();
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double heading_deg = 0.0;
  double airspeed = 200.0;
  double predicted_impact = 0.0;

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

struct IcgResult {
  std::vector<InitialCondition> conditions;
  std::size_t candidates = 0;  // poses examined before filtering
};

/// Inclusive sweep values from `start` toward `end` in increments of `step`.
std::vector<double> sweep_values(double start, double end, double step);

/// Straight-line impact distance along the velocity ray of the pose.
std::optional<double> predict_collision_distance(const TerrainGrid& grid, const Vec3& position,
                                                 double pitch_deg, double heading_deg,
                                                 double max_range);

/// Heading-major sweep (then pitch, roll, start height) keeping poses whose
/// predicted impact lies in [collision_min, collision_max].
IcgResult generate_initial_conditions(const TerrainGrid& grid, const IcgConfig& cfg);

void write_ic_csv(const std::vector<InitialCondition>& ics, std::ostream& out);
std::vector<InitialCondition> read_ic_csv(std::istream& in);
std::vector<InitialCondition> read_ic_csv_file(const std::string& path);

}  // namespace agcas
