#pragma once

#include <array>
#include <cmath>

namespace cuboidkit {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 hadamard(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

/// A point on the floor plane. The second coordinate is world z.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.z * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }

/// Right-handed rotation about +y applied to the (x, z) components.
inline Vec2 rotate_y(Vec2 p, double sin_theta, double cos_theta) {
  return {cos_theta * p.x + sin_theta * p.z, -sin_theta * p.x + cos_theta * p.z};
}

/// Axis-aligned box in an object's local frame. `size` holds full extents.
struct Cuboid {
  Vec3 center;
  Vec3 size;

  double volume() const { return size.x * size.y * size.z; }
  Vec3 min_corner() const { return center - size * 0.5; }
  Vec3 max_corner() const { return center + size * 0.5; }
  friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

/// World-space box rotated by `theta` about the vertical axis. `extents` are
/// full sizes measured before rotation.
struct OrientedCuboid {
  Vec3 center;
  Vec3 extents;
  double theta = 0.0;

  double volume() const { return extents.x * extents.y * extents.z; }
  double bottom() const { return center.y - 0.5 * extents.y; }
  double top() const { return center.y + 0.5 * extents.y; }

  /// Counter-clockwise (in x-z) corners of the floor footprint.
  std::array<Vec2, 4> footprint() const {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double hx = 0.5 * extents.x;
    const double hz = 0.5 * extents.z;
    const std::array<Vec2, 4> local{{{-hx, -hz}, {hx, -hz}, {hx, hz}, {-hx, hz}}};
    std::array<Vec2, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
      out[i] = rotate_y(local[i], s, c) + Vec2{center.x, center.z};
    }
    return out;
  }
};

}  // namespace cuboidkit
