#include "pnet/geometry.hpp"

#include <stdexcept>

namespace pnet {

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  if (orient(a, b, p) != 0) return false;
  return dot(p - a, p - b) <= 0;
}

bool segments_conflict(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);

  bool share_ac = a == c, share_ad = a == d, share_bc = b == c, share_bd = b == d;
  int shared = int(share_ac) + int(share_ad) + int(share_bc) + int(share_bd);
  if (shared >= 2) return true;  // identical or overlapping at both ends

  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: conflict unless they touch at exactly one shared endpoint.
    if (shared == 1) {
      const Vec2& join = share_ac || share_ad ? a : b;
      const Vec2& a_far = share_ac || share_ad ? b : a;
      const Vec2& c_far = share_ac || share_bc ? d : c;
      // Opposite rays from the joint are fine; same-side overlap is not.
      return dot(a_far - join, c_far - join) > 0;
    }
    return on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) ||
           on_segment(b, c, d);
  }

  if (shared == 1) return false;  // proper shared endpoint, not collinear

  // Endpoint of one lying in the interior of the other.
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;

  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

int point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  size_t n = poly.size();
  if (n < 3) throw std::invalid_argument("degenerate polygon");
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    if (on_segment(p, a, b)) return 0;
    bool crosses_y = (a.y > p.y) != (b.y > p.y);
    if (crosses_y) {
      // x-coordinate of the edge at height p.y, compared exactly.
      // p.x < a.x + (p.y-a.y)*(b.x-a.x)/(b.y-a.y)
      Rat lhs = (p.x - a.x) * (b.y - a.y);
      Rat rhs = (p.y - a.y) * (b.x - a.x);
      bool flip = (b.y - a.y) < 0;
      if (flip ? lhs > rhs : lhs < rhs) inside = !inside;
    }
  }
  return inside ? 1 : -1;
}

Rat polygon_area2(const std::vector<Vec2>& poly) {
  Rat a = 0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

Vec2 circle_point(const Rat& t) {
  Rat d = 1 + t * t;
  return Vec2((1 - t * t) / d, 2 * t / d);
}

bool angle_less(const Vec2& a, const Vec2& b) {
  auto half = [](const Vec2& v) {
    // 0 for the upper half plane including the positive x-axis, 1 below.
    if (v.y > 0 || (v.y == 0 && v.x > 0)) return 0;
    return 1;
  };
  int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0;
}

}  // namespace pnet
