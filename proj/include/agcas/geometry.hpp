#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>

namespace agcas {

// World frame: x east, y north, z up (altitude). Body frame: x forward,
// y right, z down.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Rotation taking body-frame vectors to the world frame for the given
/// Euler attitude (radians). Heading is measured clockwise from north.
inline Mat3 body_to_world(double roll, double pitch, double heading) {
  const Mat3 body_to_ned = (Eigen::AngleAxisd(heading, Vec3::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                            Eigen::AngleAxisd(roll, Vec3::UnitX()))
                               .toRotationMatrix();
  Mat3 ned_to_enu;
  ned_to_enu << 0, 1, 0,
                1, 0, 0,
                0, 0, -1;
  return ned_to_enu * body_to_ned;
}

/// World-frame unit vector along the body x-axis for a pitch/heading pair.
inline Vec3 velocity_direction(double pitch, double heading) {
  return {std::cos(pitch) * std::sin(heading), std::cos(pitch) * std::cos(heading),
          std::sin(pitch)};
}

}  // namespace agcas
