#pragma once

// Exact rational plane geometry used by the network embedding checks:
// orientation predicates, segment intersection, point-in-polygon, and
// rational points on the unit circle via the tangent half-angle map.

#include "pnet/expr.hpp"

#include <optional>
#include <vector>

namespace pnet {

struct Vec2 {
  Rat x;
  Rat y;

  Vec2() : x(0), y(0) {}
  Vec2(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {}

  Vec2 operator-(const Vec2& o) const { return Vec2(x - o.x, y - o.y); }
  Vec2 operator+(const Vec2& o) const { return Vec2(x + o.x, y + o.y); }
  Vec2 scaled(const Rat& c) const { return Vec2(x * c, y * c); }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Rat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Rat dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

inline int sign(const Rat& r) { return r == 0 ? 0 : (r < 0 ? -1 : 1); }

// Sign of the signed area of triangle (a, b, c): >0 counterclockwise.
inline int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return sign(cross(b - a, c - a));
}

// True if point p lies on the closed segment [a, b].
bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// True if the closed segments [a,b] and [c,d] share any point that is not a
// shared endpoint of the two segments. Collinear overlap counts.
bool segments_conflict(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Strict point-in-polygon test (polygon given as a vertex cycle, any
// orientation). Returns +1 inside, 0 on the boundary, -1 outside.
int point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

// Twice the signed area of a closed polygon (positive when counterclockwise).
Rat polygon_area2(const std::vector<Vec2>& poly);

// Rational point on the unit circle: t -> ((1-t^2)/(1+t^2), 2t/(1+t^2)).
Vec2 circle_point(const Rat& t);

// Counterclockwise angular comparison of direction vectors around a common
// origin: true if a precedes b starting the sweep from direction (1, 0).
bool angle_less(const Vec2& a, const Vec2& b);

}  // namespace pnet
