#pragma once

#include "agcas/dynamics.hpp"
#include "agcas/terrain.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace agcas {

/// Pseudo-LiDAR fan geometry. Rows arc downward from the boresight by a
/// constant angular spacing; columns spread symmetrically in azimuth.
/// Square k x k fans set rows == cols; the legacy 3x5 fan is rows=3, cols=5.
struct LidarConfig {
  std::size_t rows = 16;
  std::size_t cols = 16;
  double vertical_spacing = 1.5;       // deg
  double horizontal_spacing = 3.0;     // deg
  double boresight_depression = 0.0;   // deg, positive below body x-axis
  double detection_period = 10.0;      // s
  double min_range = 50.0;             // m
  double max_range_cap = 6000.0;       // m

  static LidarConfig square(std::size_t k) {
    LidarConfig cfg;
    cfg.rows = k;
    cfg.cols = k;
    return cfg;
  }

  std::size_t size() const noexcept { return rows * cols; }
  void validate() const;
  /// clamp(airspeed * detection_period, min_range, max_range_cap)
  double range_for(double airspeed) const;
};

struct LidarScan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> distances;  // row-major; max_range where no hit
  std::vector<double> image;      // distances / max_range, in [0, 1]
  double min_distance = 0.0;
  bool any_hit = false;
  double max_range = 0.0;

  double pixel(std::size_t row, std::size_t col) const { return image[row * cols + col]; }

  /// Scan stand-in once the aircraft is on or below the terrain: every ray
  /// reports contact at zero range.
  static LidarScan contact(std::size_t rows, std::size_t cols, double max_range);
};

struct RadaltReading {
  std::array<double, 3> distances{};  // fore-slant, nadir, aft-slant; max_range where no hit
  static constexpr std::array<double, 3> kElevationsDeg{-75.0, -90.0, -105.0};
  double max_range = 0.0;
};

/// Body-frame unit vector of the fan ray at (row, col).
Vec3 build_ray_direction(const LidarConfig& cfg, std::size_t row, std::size_t col);

/// Body-frame unit vector for an (elevation, azimuth) pair in degrees.
Vec3 body_direction(double elevation_deg, double azimuth_deg);

LidarScan lidar_scan(const TerrainGrid& grid, const AircraftState& state, const LidarConfig& cfg);

RadaltReading radalt_scan(const TerrainGrid& grid, const AircraftState& state, double max_range);

inline bool threat_detected(const LidarScan& scan) { return scan.any_hit; }

/// P2 ASCII graymap, maxval 255, pixel = round(255 * image value).
void write_pgm(const LidarScan& scan, std::ostream& out);

}  // namespace agcas
