#pragma once

#include <cmath>

namespace ssd {

// Point or vector in the (r, z) half plane.
struct Vec2 {
  double r = 0.0;
  double z = 0.0;

  Vec2 operator+(Vec2 o) const { return {r + o.r, z + o.z}; }
  Vec2 operator-(Vec2 o) const { return {r - o.r, z - o.z}; }
  Vec2 operator*(double s) const { return {r * s, z * s}; }
  double dot(Vec2 o) const { return r * o.r + z * o.z; }
  double norm() const { return std::hypot(r, z); }
  // Clockwise quarter turn: (a, b)^perp = (b, -a).
  Vec2 perp() const { return {z, -r}; }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

}  // namespace ssd
