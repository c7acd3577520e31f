#pragma once

#include "agcas/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agcas {

class TerrainError : public std::runtime_error {
 public:
  enum class Kind {
    MalformedHeader,
    RowLengthMismatch,
    NonFiniteElevation,
    NoDataPresent,
    InvalidSize,
    OutOfBounds,
    OriginBelowTerrain,
    NonUnitDirection,
  };

  TerrainError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Regular elevation heightfield. Nodes sit on a lattice with spacing
/// `cell_size`; row 0 of `elevations` is the northernmost row.
/// Immutable once constructed.
class TerrainGrid {
 public:
  TerrainGrid(std::size_t ncols, std::size_t nrows, double cell_size, double origin_x,
              double origin_y, std::vector<double> elevations);

  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t nrows() const noexcept { return nrows_; }
  double cell_size() const noexcept { return cell_size_; }
  double origin_x() const noexcept { return origin_x_; }
  double origin_y() const noexcept { return origin_y_; }
  double max_x() const noexcept { return origin_x_ + static_cast<double>(ncols_ - 1) * cell_size_; }
  double max_y() const noexcept { return origin_y_ + static_cast<double>(nrows_ - 1) * cell_size_; }
  const std::vector<double>& elevations() const noexcept { return elevations_; }

  /// Stored value at (col, row), row counted from the north edge.
  double at(std::size_t col, std::size_t row) const { return elevations_[row * ncols_ + col]; }

  bool contains(double x, double y) const noexcept;
  double min_elevation() const;
  double max_elevation() const;

  /// Bilinear interpolation of the four surrounding nodes. Throws OutOfBounds.
  double elevation_at(double x, double y) const;

  /// Largest |dh/dx| and |dh/dy| of the interpolated surface.
  double max_slope_x() const noexcept { return max_slope_x_; }
  double max_slope_y() const noexcept { return max_slope_y_; }

  friend bool operator==(const TerrainGrid&, const TerrainGrid&) = default;

 private:
  std::size_t ncols_;
  std::size_t nrows_;
  double cell_size_;
  double origin_x_;
  double origin_y_;
  std::vector<double> elevations_;
  double max_slope_x_ = 0.0;
  double max_slope_y_ = 0.0;
};

struct LosResult {
  bool hit = false;
  double distance = 0.0;  // meters along the ray, valid when hit
  Vec3 point = Vec3::Zero();
  double hot = 0.0;  // terrain elevation at the hit point
};

enum class TerrainKind { Flat, Ridge, Valley, Fractal };

TerrainKind parse_terrain_kind(std::string_view name);
std::string_view to_string(TerrainKind kind);

TerrainGrid load_ascii_grid(std::istream& in);
TerrainGrid load_ascii_grid_file(const std::string& path);
void save_ascii_grid(const TerrainGrid& grid, std::ostream& out);
std::string save_ascii_grid(const TerrainGrid& grid);

/// Synthetic terrain on a size x size lattice with lower-left corner at the
/// origin. Deterministic for fixed arguments.
TerrainGrid generate_terrain(TerrainKind kind, std::size_t size, double cell_size,
                             double amplitude, std::uint64_t seed);

/// March along `direction` in increments of `step`, refining the first
/// terrain crossing by bisection to 0.01 * step. Segments whose endpoint
/// clearances cannot rule out a dip below the surface are subdivided first,
/// so thin grazing crossings are not stepped over. Rays leaving the grid
/// extent report no hit.
LosResult line_of_sight(const TerrainGrid& grid, const Vec3& origin, const Vec3& direction,
                        double max_range, double step);

/// Same, with step = cell_size / 2.
LosResult line_of_sight(const TerrainGrid& grid, const Vec3& origin, const Vec3& direction,
                        double max_range);

double height_above_terrain(const TerrainGrid& grid, const Vec3& position);

}  // namespace agcas
