#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace wgff {

using Point = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Signed angle in (-pi, pi] that rotates direction `from` onto direction `to`.
inline double turning_angle(Point from, Point to) { return std::atan2(cross(from, to), dot(from, to)); }

/// Increment of the continuous argument of (w - p) as w runs along the straight segment a -> b.
inline double arg_increment(Point a, Point b, Point p) { return turning_angle(a - p, b - p); }

/// Wraps an angle into [lo, lo + 2pi).
inline double wrap_angle(double a, double lo) {
  double r = std::fmod(a - lo, two_pi);
  if (r < 0) r += two_pi;
  return lo + r;
}

inline double distance_to_segment(Point p, Point a, Point b, Point* closest = nullptr) {
  const Point ab = b - a;
  const double len2 = std::norm(ab);
  double s = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const Point q = a + s * ab;
  if (closest) *closest = q;
  return std::abs(p - q);
}

/// First parameter s in [0,1] along a->b at which the segment touches c->d (collinear overlap included).
inline std::optional<double> segment_hit(Point a, Point b, Point c, Point d) {
  const Point r = b - a;
  const Point q = d - c;
  const double denom = cross(r, q);
  const double scale = std::max({std::abs(r), std::abs(q), 1e-300});
  const double eps = 1e-12 * scale * scale;
  if (std::abs(denom) > eps) {
    const double s = cross(c - a, q) / denom;
    const double u = cross(c - a, r) / denom;
    const double tol = 1e-12;
    if (s >= -tol && s <= 1 + tol && u >= -tol && u <= 1 + tol) return std::clamp(s, 0.0, 1.0);
    return std::nullopt;
  }
  if (std::abs(cross(c - a, r)) > eps) return std::nullopt;  // parallel, not collinear
  const double rr = std::norm(r);
  if (rr == 0) {
    if (distance_to_segment(a, c, d) <= 1e-12 * scale) return 0.0;
    return std::nullopt;
  }
  double s0 = dot(c - a, r) / rr;
  double s1 = dot(d - a, r) / rr;
  if (s0 > s1) std::swap(s0, s1);
  if (s1 < 0 || s0 > 1) return std::nullopt;
  return std::max(s0, 0.0);
}

/// True when the open interiors of the two segments cross or overlap; shared endpoints are allowed.
inline bool segments_cross(Point a, Point b, Point c, Point d) {
  auto same = [](Point x, Point y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  const double scale = std::max({std::norm(b - a), std::norm(d - c), 1e-300});
  const double eps = 1e-12 * scale;
  auto sgn = [eps](double v) { return v > eps ? 1 : (v < -eps ? -1 : 0); };
  const int s1 = sgn(d1), s2 = sgn(d2), s3 = sgn(d3), s4 = sgn(d4);
  if (s1 * s2 < 0 && s3 * s4 < 0) return true;
  if (s1 == 0 && s2 == 0) {  // collinear: overlap of positive length is a crossing
    const Point r = b - a;
    const double rr = std::norm(r);
    if (rr == 0) return false;
    double t0 = dot(c - a, r) / rr, t1 = dot(d - a, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    return std::min(1.0, t1) - std::max(0.0, t0) > 1e-9;
  }
  // a touching point that is not a shared endpoint
  auto on_seg = [&](Point p, Point u, Point v) { return distance_to_segment(p, u, v) <= 1e-12 * std::sqrt(scale); };
  if (s1 == 0 && on_seg(c, a, b) && !same(c, a) && !same(c, b)) return true;
  if (s2 == 0 && on_seg(d, a, b) && !same(d, a) && !same(d, b)) return true;
  if (s3 == 0 && on_seg(a, c, d) && !same(a, c) && !same(a, d)) return true;
  if (s4 == 0 && on_seg(b, c, d) && !same(b, c) && !same(b, d)) return true;
  return false;
}

inline double polygon_signed_area(std::span<const Point> poly) {
  double a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

/// Sutherland-Hodgman clip of `subject` against the half-plane to the left of the directed line a->b.
inline std::vector<Point> clip_halfplane(const std::vector<Point>& subject, Point a, Point b) {
  std::vector<Point> out;
  if (subject.empty()) return out;
  const Point dir = b - a;
  auto side = [&](Point p) { return cross(dir, p - a); };
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Point cur = subject[i];
    const Point nxt = subject[(i + 1) % subject.size()];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc >= 0) != (sn >= 0)) {
      const double s = sc / (sc - sn);
      out.push_back(cur + s * (nxt - cur));
    }
  }
  return out;
}

struct Box {
  Point lo{0, 0};
  Point hi{0, 0};
  bool contains(Point p) const {
    return p.real() >= lo.real() && p.real() <= hi.real() && p.imag() >= lo.imag() && p.imag() <= hi.imag();
  }
};

}  // namespace wgff
