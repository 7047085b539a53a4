#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace locoma {

using Vec2 = Eigen::Vector2d;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::fmod(a + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

/// 90-degree counter-clockwise rotation of a planar vector.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

inline Eigen::Matrix2d rot2(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

/// Planar base pose. Yaw is stored wrapped to (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double yaw_) : x(x_), y(y_), yaw(wrap_angle(yaw_)) {}

  Vec2 position() const { return {x, y}; }

  bool operator==(const Pose2&) const = default;
};

/// Difference a - b with the yaw component wrapped to (-pi, pi].
struct PoseDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;
};

inline PoseDelta pose_boxminus(const Pose2& a, const Pose2& b) {
  return {a.x - b.x, a.y - b.y, wrap_angle(a.yaw - b.yaw)};
}

/// Shortest-arc interpolation between two yaw angles.
inline double lerp_yaw(double a, double b, double t) {
  return wrap_angle(a + t * wrap_angle(b - a));
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

inline Pose2 lerp_pose(const Pose2& a, const Pose2& b, double t) {
  return {lerp(a.x, b.x, t), lerp(a.y, b.y, t), lerp_yaw(a.yaw, b.yaw, t)};
}

}  // namespace locoma
