#include "agcas/icg.hpp"

#include "agcas/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace agcas {

void IcgConfig::validate() const {
  if (!(collision_min < collision_max)) {
    throw IcgError(IcgError::Kind::InvalidConfig, "collision_min must be below collision_max");
  }
  if (!(attitude_step > 0.0) || !(heading_step > 0.0)) {
    throw IcgError(IcgError::Kind::InvalidConfig, "sweep steps must be positive");
  }
  if (!(airspeed > 0.0)) throw IcgError(IcgError::Kind::InvalidConfig, "airspeed must be positive");
  if (area && (!(area->x_min <= area->x_max) || !(area->y_min <= area->y_max))) {
    throw IcgError(IcgError::Kind::InvalidConfig, "search area bounds are not ordered");
  }
}

std::vector<double> sweep_values(double start, double end, double step) {
  std::vector<double> out;
  const double span = std::abs(end - start);
  const double dir = end >= start ? 1.0 : -1.0;
  const auto n = static_cast<std::size_t>(std::floor(span / step + 1e-9));
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + dir * static_cast<double>(i) * step);
  return out;
}

std::optional<double> predict_collision_distance(const TerrainGrid& grid, const Vec3& position,
                                                 double pitch_deg, double heading_deg,
                                                 double max_range) {
  const Vec3 dir = velocity_direction(deg2rad(pitch_deg), deg2rad(heading_deg)).normalized();
  const LosResult los = line_of_sight(grid, position, dir, max_range);
  if (!los.hit) return std::nullopt;
  return los.distance;
}

IcgResult generate_initial_conditions(const TerrainGrid& grid, const IcgConfig& cfg) {
  cfg.validate();
  const Area area = cfg.area.value_or(
      Area{grid.origin_x(), grid.origin_y(), grid.max_x(), grid.max_y()});
  if (!grid.contains(area.x_min, area.y_min) || !grid.contains(area.x_max, area.y_max)) {
    throw IcgError(IcgError::Kind::AreaOutOfBounds, "search area exceeds the terrain extent");
  }
  const Vec3 center = area.center(0.0);
  const double ground = grid.elevation_at(center.x(), center.y());

  std::vector<double> headings;
  for (std::size_t i = 0; static_cast<double>(i) * cfg.heading_step < 360.0 - 1e-9; ++i) {
    headings.push_back(static_cast<double>(i) * cfg.heading_step);
  }
  const auto pitches = sweep_values(cfg.pitch_start, cfg.pitch_end, cfg.attitude_step);
  const auto rolls = sweep_values(cfg.roll_start, cfg.roll_end, cfg.attitude_step);

  IcgResult result;
  std::vector<std::optional<double>> impacts(cfg.start_hat_candidates.size());
  for (double heading : headings) {
    for (double pitch : pitches) {
      for (std::size_t h = 0; h < cfg.start_hat_candidates.size(); ++h) {
        const Vec3 pos{center.x(), center.y(), ground + cfg.start_hat_candidates[h]};
        impacts[h] = predict_collision_distance(grid, pos, pitch, heading, cfg.collision_max);
      }
      // Roll leaves the velocity ray unchanged, so the impact is shared.
      for (double roll : rolls) {
        for (std::size_t h = 0; h < cfg.start_hat_candidates.size(); ++h) {
          ++result.candidates;
          const auto& impact = impacts[h];
          if (!impact || *impact < cfg.collision_min || *impact > cfg.collision_max) continue;
          InitialCondition ic;
          ic.position = {center.x(), center.y(), ground + cfg.start_hat_candidates[h]};
          ic.roll_deg = roll;
          ic.pitch_deg = pitch;
          ic.heading_deg = heading;
          ic.airspeed = cfg.airspeed;
          ic.predicted_impact = *impact;
          result.conditions.push_back(ic);
        }
      }
    }
  }
  return result;
}

namespace {
constexpr const char* kIcHeader =
    "x,y,alt,roll_deg,pitch_deg,heading_deg,airspeed,predicted_impact_m";
}

void write_ic_csv(const std::vector<InitialCondition>& ics, std::ostream& out) {
  out << kIcHeader << '\n';
  for (const auto& ic : ics) {
    csv::Row row;
    row << ic.position.x() << ic.position.y() << ic.position.z() << ic.roll_deg << ic.pitch_deg
        << ic.heading_deg << ic.airspeed << ic.predicted_impact;
    out << row.str() << '\n';
  }
}

std::vector<InitialCondition> read_ic_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kIcHeader) {
    throw IcgError(IcgError::Kind::MalformedFile, "initial-condition CSV header mismatch");
  }
  std::vector<InitialCondition> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = csv::parse_doubles(line);
    if (v.size() != 8) {
      throw IcgError(IcgError::Kind::MalformedFile, "initial-condition row must have 8 fields");
    }
    InitialCondition ic;
    ic.position = {v[0], v[1], v[2]};
    ic.roll_deg = v[3];
    ic.pitch_deg = v[4];
    ic.heading_deg = v[5];
    ic.airspeed = v[6];
    ic.predicted_impact = v[7];
    out.push_back(ic);
  }
  return out;
}

std::vector<InitialCondition> read_ic_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open initial-condition file '" + path + "'");
  return read_ic_csv(in);
}

}  // namespace agcas
