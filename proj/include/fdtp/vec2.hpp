#pragma once

namespace fdtp {

/// 2D pixel vector, x to the right, y down.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  bool operator==(const Vec2&) const = default;
};

struct IVec2 {
  int x = 0;
  int y = 0;
  bool operator==(const IVec2&) const = default;
};

}  // namespace fdtp
