#include "agcas/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace agcas {

void LidarConfig::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("lidar fan needs at least one ray");
  if (!(vertical_spacing > 0.0) || !(horizontal_spacing > 0.0)) {
    throw std::invalid_argument("lidar spacings must be positive");
  }
  if (!(detection_period > 0.0)) throw std::invalid_argument("detection period must be positive");
  if (!(min_range > 0.0) || !(min_range < max_range_cap)) {
    throw std::invalid_argument("lidar range bounds must satisfy 0 < min_range < max_range_cap");
  }
}

double LidarConfig::range_for(double airspeed) const {
  return std::clamp(airspeed * detection_period, min_range, max_range_cap);
}

LidarScan LidarScan::contact(std::size_t rows, std::size_t cols, double max_range) {
  LidarScan scan;
  scan.rows = rows;
  scan.cols = cols;
  scan.distances.assign(rows * cols, 0.0);
  scan.image.assign(rows * cols, 0.0);
  scan.min_distance = 0.0;
  scan.any_hit = true;
  scan.max_range = max_range;
  return scan;
}

Vec3 body_direction(double elevation_deg, double azimuth_deg) {
  const double e = deg2rad(elevation_deg);
  const double a = deg2rad(azimuth_deg);
  return {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), -std::sin(e)};
}

Vec3 build_ray_direction(const LidarConfig& cfg, std::size_t row, std::size_t col) {
  if (row >= cfg.rows || col >= cfg.cols) throw std::out_of_range("lidar ray index out of range");
  const double azimuth =
      (static_cast<double>(col) - static_cast<double>(cfg.cols - 1) / 2.0) * cfg.horizontal_spacing;
  const double elevation =
      -cfg.boresight_depression - static_cast<double>(row) * cfg.vertical_spacing;
  return body_direction(elevation, azimuth);
}

LidarScan lidar_scan(const TerrainGrid& grid, const AircraftState& state, const LidarConfig& cfg) {
  LidarScan scan;
  scan.rows = cfg.rows;
  scan.cols = cfg.cols;
  scan.max_range = cfg.range_for(state.airspeed);
  scan.distances.resize(cfg.size());
  scan.image.resize(cfg.size());
  scan.min_distance = scan.max_range;

  const Mat3 to_world = body_to_world(state.roll, state.pitch, state.heading);
  for (std::size_t row = 0; row < cfg.rows; ++row) {
    for (std::size_t col = 0; col < cfg.cols; ++col) {
      const Vec3 dir = (to_world * build_ray_direction(cfg, row, col)).normalized();
      const LosResult los = line_of_sight(grid, state.position, dir, scan.max_range);
      const double d = los.hit ? los.distance : scan.max_range;
      const std::size_t i = row * cfg.cols + col;
      scan.distances[i] = d;
      scan.image[i] = std::min(d, scan.max_range) / scan.max_range;
      scan.any_hit = scan.any_hit || los.hit;
      scan.min_distance = std::min(scan.min_distance, d);
    }
  }
  return scan;
}

RadaltReading radalt_scan(const TerrainGrid& grid, const AircraftState& state, double max_range) {
  RadaltReading reading;
  reading.max_range = max_range;
  const Mat3 to_world = body_to_world(state.roll, state.pitch, state.heading);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 dir = (to_world * body_direction(RadaltReading::kElevationsDeg[i], 0.0)).normalized();
    const LosResult los = line_of_sight(grid, state.position, dir, max_range);
    reading.distances[i] = los.hit ? los.distance : max_range;
  }
  return reading;
}

void write_pgm(const LidarScan& scan, std::ostream& out) {
  out << "P2\n" << scan.cols << ' ' << scan.rows << "\n255\n";
  for (std::size_t r = 0; r < scan.rows; ++r) {
    for (std::size_t c = 0; c < scan.cols; ++c) {
      if (c != 0) out << ' ';
      out << static_cast<int>(std::lround(255.0 * scan.pixel(r, c)));
    }
    out << '\n';
  }
}

}  // namespace agcas
