#include "agcas/terrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace agcas {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

TerrainGrid::TerrainGrid(std::size_t ncols, std::size_t nrows, double cell_size, double origin_x,
                         double origin_y, std::vector<double> elevations)
    : ncols_(ncols),
      nrows_(nrows),
      cell_size_(cell_size),
      origin_x_(origin_x),
      origin_y_(origin_y),
      elevations_(std::move(elevations)) {
  if (ncols_ < 2 || nrows_ < 2) {
    throw TerrainError(TerrainError::Kind::InvalidSize, "terrain grid needs at least 2x2 nodes");
  }
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw TerrainError(TerrainError::Kind::InvalidSize, "cell size must be positive");
  }
  if (!std::isfinite(origin_x_) || !std::isfinite(origin_y_)) {
    throw TerrainError(TerrainError::Kind::MalformedHeader, "non-finite grid origin");
  }
  if (elevations_.size() != ncols_ * nrows_) {
    throw TerrainError(TerrainError::Kind::RowLengthMismatch,
                       "elevation count does not match ncols * nrows");
  }
  for (double e : elevations_) {
    if (!std::isfinite(e)) {
      throw TerrainError(TerrainError::Kind::NonFiniteElevation, "non-finite elevation");
    }
  }
  // Bilinear slopes are extreme on cell edges.
  for (std::size_t r = 0; r < nrows_; ++r) {
    for (std::size_t c = 0; c < ncols_; ++c) {
      if (c + 1 < ncols_) max_slope_x_ = std::max(max_slope_x_, std::abs(at(c + 1, r) - at(c, r)));
      if (r + 1 < nrows_) max_slope_y_ = std::max(max_slope_y_, std::abs(at(c, r + 1) - at(c, r)));
    }
  }
  max_slope_x_ /= cell_size_;
  max_slope_y_ /= cell_size_;
}

bool TerrainGrid::contains(double x, double y) const noexcept {
  return x >= origin_x_ && x <= max_x() && y >= origin_y_ && y <= max_y();
}

double TerrainGrid::min_elevation() const {
  return *std::min_element(elevations_.begin(), elevations_.end());
}

double TerrainGrid::max_elevation() const {
  return *std::max_element(elevations_.begin(), elevations_.end());
}

double TerrainGrid::elevation_at(double x, double y) const {
  if (!contains(x, y)) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") outside terrain extent";
    throw TerrainError(TerrainError::Kind::OutOfBounds, msg.str());
  }
  const double fx = (x - origin_x_) / cell_size_;
  const double fy = (y - origin_y_) / cell_size_;  // counted from the south edge
  const auto c0 = std::min(static_cast<std::size_t>(fx), ncols_ - 2);
  const auto s0 = std::min(static_cast<std::size_t>(fy), nrows_ - 2);
  const double tx = fx - static_cast<double>(c0);
  const double ty = fy - static_cast<double>(s0);
  const std::size_t r0 = nrows_ - 1 - s0;  // storage row of the southern node pair
  const std::size_t r1 = r0 - 1;
  const double z00 = at(c0, r0);
  const double z10 = at(c0 + 1, r0);
  const double z01 = at(c0, r1);
  const double z11 = at(c0 + 1, r1);
  const double south = z00 + (z10 - z00) * tx;
  const double north = z01 + (z11 - z01) * tx;
  return south + (north - south) * ty;
}

TerrainKind parse_terrain_kind(std::string_view name) {
  if (name == "flat") return TerrainKind::Flat;
  if (name == "ridge") return TerrainKind::Ridge;
  if (name == "valley") return TerrainKind::Valley;
  if (name == "fractal") return TerrainKind::Fractal;
  throw std::invalid_argument("unknown terrain kind: " + std::string(name));
}

std::string_view to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::Flat: return "flat";
    case TerrainKind::Ridge: return "ridge";
    case TerrainKind::Valley: return "valley";
    case TerrainKind::Fractal: return "fractal";
  }
  return "unknown";
}

TerrainGrid load_ascii_grid(std::istream& in) {
  using Kind = TerrainError::Kind;
  std::map<std::string, double> header;
  std::string line;
  std::vector<std::string> pending;  // tokens of the first data line

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    double probe = 0.0;
    if (parse_number(key, probe)) {
      pending.push_back(key);
      std::string tok;
      while (ls >> tok) pending.push_back(tok);
      break;
    }
    key = lower(key);
    static const char* const kKeys[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                        "nodata_value"};
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw TerrainError(Kind::MalformedHeader, "unknown header key '" + key + "'");
    }
    if (header.count(key) != 0) {
      throw TerrainError(Kind::MalformedHeader, "duplicated header key '" + key + "'");
    }
    std::string value_tok, extra;
    double value = 0.0;
    if (!(ls >> value_tok) || !parse_number(value_tok, value) || (ls >> extra)) {
      throw TerrainError(Kind::MalformedHeader, "bad value for header key '" + key + "'");
    }
    header[key] = value;
  }

  for (const char* required : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
    if (header.count(required) == 0) {
      throw TerrainError(Kind::MalformedHeader, std::string("missing header key '") + required + "'");
    }
  }
  const double ncols_d = header["ncols"];
  const double nrows_d = header["nrows"];
  if (ncols_d != std::floor(ncols_d) || nrows_d != std::floor(nrows_d)) {
    throw TerrainError(Kind::MalformedHeader, "ncols/nrows must be integers");
  }
  if (ncols_d < 2 || nrows_d < 2) throw TerrainError(Kind::InvalidSize, "ncols/nrows must be >= 2");
  const auto ncols = static_cast<std::size_t>(ncols_d);
  const auto nrows = static_cast<std::size_t>(nrows_d);
  const bool has_nodata = header.count("nodata_value") != 0;
  const double nodata = has_nodata ? header["nodata_value"] : 0.0;

  std::vector<double> elevations;
  elevations.reserve(ncols * nrows);
  std::size_t rows_read = 0;
  auto consume_row = [&](const std::vector<std::string>& tokens) {
    if (tokens.empty()) return;
    if (rows_read == nrows) {
      throw TerrainError(Kind::RowLengthMismatch, "more data rows than nrows");
    }
    if (tokens.size() != ncols) {
      std::ostringstream msg;
      msg << "row " << rows_read << " has " << tokens.size() << " values, expected " << ncols;
      throw TerrainError(Kind::RowLengthMismatch, msg.str());
    }
    for (const auto& tok : tokens) {
      double v = 0.0;
      const std::string low = lower(tok);
      if (low == "nan" || low == "inf" || low == "-inf" || low == "+inf") {
        throw TerrainError(Kind::NonFiniteElevation, "non-finite elevation '" + tok + "'");
      }
      if (!parse_number(tok, v)) {
        throw TerrainError(Kind::RowLengthMismatch, "unparseable elevation '" + tok + "'");
      }
      if (!std::isfinite(v)) {
        throw TerrainError(Kind::NonFiniteElevation, "non-finite elevation '" + tok + "'");
      }
      if (has_nodata && v == nodata) {
        throw TerrainError(Kind::NoDataPresent, "grid contains NODATA cells");
      }
      elevations.push_back(v);
    }
    ++rows_read;
  };

  consume_row(pending);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    consume_row(tokens);
  }
  if (rows_read != nrows) {
    std::ostringstream msg;
    msg << "expected " << nrows << " data rows, found " << rows_read;
    throw TerrainError(Kind::RowLengthMismatch, msg.str());
  }
  return TerrainGrid(ncols, nrows, header["cellsize"], header["xllcorner"], header["yllcorner"],
                     std::move(elevations));
}

TerrainGrid load_ascii_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open terrain file '" + path + "'");
  return load_ascii_grid(in);
}

void save_ascii_grid(const TerrainGrid& grid, std::ostream& out) {
  out << "ncols " << grid.ncols() << '\n'
      << "nrows " << grid.nrows() << '\n'
      << "xllcorner " << shortest(grid.origin_x()) << '\n'
      << "yllcorner " << shortest(grid.origin_y()) << '\n'
      << "cellsize " << shortest(grid.cell_size()) << '\n';
  char buf[64];
  for (std::size_t r = 0; r < grid.nrows(); ++r) {
    for (std::size_t c = 0; c < grid.ncols(); ++c) {
      double v = grid.at(c, r);
      if (v == 0.0) v = 0.0;  // no "-0.000"
      std::snprintf(buf, sizeof(buf), "%.3f", v);
      if (c != 0) out << ' ';
      out << (std::string_view(buf) == "-0.000" ? "0.000" : buf);
    }
    out << '\n';
  }
}

std::string save_ascii_grid(const TerrainGrid& grid) {
  std::ostringstream out;
  save_ascii_grid(grid, out);
  return out.str();
}

namespace {

// Diamond-square midpoint displacement on a (2^n + 1)^2 lattice.
std::vector<double> midpoint_displacement(std::size_t n_side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> h(n_side * n_side, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * n_side + j]; };
  const std::size_t last = n_side - 1;
  at(0, 0) = unit(rng);
  at(0, last) = unit(rng);
  at(last, 0) = unit(rng);
  at(last, last) = unit(rng);

  double scale = 1.0;
  const double roughness = 0.55;
  for (std::size_t half = last / 2, side = last; half >= 1; side = half, half /= 2) {
    for (std::size_t i = half; i < last; i += side) {
      for (std::size_t j = half; j < last; j += side) {
        const double avg = (at(i - half, j - half) + at(i - half, j + half) +
                            at(i + half, j - half) + at(i + half, j + half)) / 4.0;
        at(i, j) = avg + scale * unit(rng);
      }
    }
    for (std::size_t i = 0; i <= last; i += half) {
      for (std::size_t j = (i / half) % 2 == 0 ? half : 0; j <= last; j += side) {
        double sum = 0.0;
        int count = 0;
        if (i >= half) { sum += at(i - half, j); ++count; }
        if (i + half <= last) { sum += at(i + half, j); ++count; }
        if (j >= half) { sum += at(i, j - half); ++count; }
        if (j + half <= last) { sum += at(i, j + half); ++count; }
        at(i, j) = sum / count + scale * unit(rng);
      }
    }
    scale *= roughness;
  }
  return h;
}

}  // namespace

TerrainGrid generate_terrain(TerrainKind kind, std::size_t size, double cell_size,
                             double amplitude, std::uint64_t seed) {
  if (size < 2) throw TerrainError(TerrainError::Kind::InvalidSize, "terrain size must be >= 2");
  if (!(cell_size > 0.0)) {
    throw TerrainError(TerrainError::Kind::InvalidSize, "cell size must be positive");
  }
  std::vector<double> z(size * size, 0.0);
  const std::size_t mid_row = size / 2;
  // Profile width scales with the grid so the ridge stays a single feature.
  const double sigma = std::max(0.1 * static_cast<double>(size) * cell_size, cell_size);

  switch (kind) {
    case TerrainKind::Flat:
      break;
    case TerrainKind::Ridge:
    case TerrainKind::Valley:
      for (std::size_t r = 0; r < size; ++r) {
        const double d = (static_cast<double>(r) - static_cast<double>(mid_row)) * cell_size;
        const double g = std::exp(-d * d / (2.0 * sigma * sigma));
        const double v = kind == TerrainKind::Ridge ? amplitude * g : amplitude * (1.0 - g);
        std::fill_n(z.begin() + static_cast<std::ptrdiff_t>(r * size), size, v);
      }
      break;
    case TerrainKind::Fractal: {
      std::mt19937_64 rng(seed);
      std::size_t n_side = 2;
      while (n_side + 1 < size) n_side *= 2;
      n_side += 1;
      const auto h = midpoint_displacement(n_side, rng);
      double lo = h[0], hi = h[0];
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
          lo = std::min(lo, h[r * n_side + c]);
          hi = std::max(hi, h[r * n_side + c]);
        }
      }
      const double span = hi > lo ? hi - lo : 1.0;
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
          z[r * size + c] = amplitude * (h[r * n_side + c] - lo) / span;
        }
      }
      break;
    }
  }
  return TerrainGrid(size, size, cell_size, 0.0, 0.0, std::move(z));
}

LosResult line_of_sight(const TerrainGrid& grid, const Vec3& origin, const Vec3& direction,
                        double max_range, double step) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw TerrainError(TerrainError::Kind::NonUnitDirection, "ray direction is not unit length");
  }
  if (!(step > 0.0)) throw std::invalid_argument("line_of_sight step must be positive");
  if (origin.z() <= grid.elevation_at(origin.x(), origin.y())) {
    throw TerrainError(TerrainError::Kind::OriginBelowTerrain, "ray origin is not above terrain");
  }

  // Signed clearance of the ray above terrain at parameter t; nullopt once outside the extent.
  auto clearance = [&](double t, double& out) {
    const Vec3 p = origin + t * direction;
    if (!grid.contains(p.x(), p.y())) return false;
    out = p.z() - grid.elevation_at(p.x(), p.y());
    return true;
  };

  // Clearance changes no faster than this along the ray, so a segment whose
  // endpoint clearances sum to more than lipschitz * length cannot dip below
  // the surface in between. Other segments are split until that holds or
  // they shrink below the refinement tolerance.
  const double lipschitz = std::abs(direction.z()) + std::abs(direction.x()) * grid.max_slope_x() +
                           std::abs(direction.y()) * grid.max_slope_y() + 1e-12;
  const double tol = 0.01 * step;

  auto refine = [&](double lo, double hi) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      double g = 0.0;
      clearance(mid, g);  // inside the extent: the segment endpoints both are
      (g <= 0.0 ? hi : lo) = mid;
    }
    return hi;
  };

  // First parameter in (t0, t1] with clearance <= 0, given c0 > 0 and c1 > 0.
  std::function<std::optional<double>(double, double, double, double)> search =
      [&](double t0, double c0, double t1, double c1) -> std::optional<double> {
    if (c0 + c1 > lipschitz * (t1 - t0) || t1 - t0 <= tol) return std::nullopt;
    const double tm = 0.5 * (t0 + t1);
    double cm = 0.0;
    clearance(tm, cm);
    if (cm <= 0.0) return refine(t0, tm);
    if (auto hit = search(t0, c0, tm, cm)) return hit;
    return search(tm, cm, t1, c1);
  };

  LosResult result;
  auto finish = [&](double t) {
    result.hit = true;
    result.distance = t;
    result.point = origin + t * direction;
    result.hot = grid.elevation_at(result.point.x(), result.point.y());
    result.point.z() = result.hot;
    return result;
  };

  double prev_t = 0.0;
  double prev_gap = 0.0;
  clearance(0.0, prev_gap);
  for (std::size_t i = 1;; ++i) {
    const double t = std::min(static_cast<double>(i) * step, max_range);
    double gap = 0.0;
    if (!clearance(t, gap)) return result;
    if (gap <= 0.0) return finish(refine(prev_t, t));
    if (auto hit = search(prev_t, prev_gap, t, gap)) return finish(*hit);
    prev_t = t;
    prev_gap = gap;
    if (t >= max_range) return result;
  }
}
LosResult line_of_sight(const TerrainGrid& grid, const Vec3& origin, const Vec3& direction,
                        double max_range) {
  return line_of_sight(grid, origin, direction, max_range, grid.cell_size() / 2.0);
}

double height_above_terrain(const TerrainGrid& grid, const Vec3& position) {
  return position.z() - grid.elevation_at(position.x(), position.y());
}

}  // namespace agcas
