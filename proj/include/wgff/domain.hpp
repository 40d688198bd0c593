#pragma once

// Bounded simply connected domains with a marked boundary point: discs, axis rectangles and
// simple polygons. The boundary is parametrised by arc length, anticlockwise, starting at the
// marked point x.

#include <array>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "wgff/error.hpp"
#include "wgff/geometry.hpp"

namespace wgff {

class Domain {
 public:
  enum class Kind { disc, rectangle, polygon };

  static Domain disc(Point center, double radius, double marked_angle = 0.0) {
    require(radius > 0, "disc radius must be positive");
    Domain d;
    d.kind_ = Kind::disc;
    d.center_ = center;
    d.radius_ = radius;
    d.marked_angle_ = marked_angle;
    d.marked_ = center + std::polar(radius, marked_angle);
    d.perimeter_ = two_pi * radius;
    d.convex_ = true;
    return d;
  }

  /// Axis rectangle; the marked point defaults to the midpoint of the bottom edge.
  static Domain rectangle(Point lo, Point hi, std::optional<Point> marked = std::nullopt) {
    require(hi.real() > lo.real() && hi.imag() > lo.imag(), "rectangle must have positive extent");
    std::vector<Point> pts{lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}};
    const Point x = marked.value_or(Point{0.5 * (lo.real() + hi.real()), lo.imag()});
    Domain d = make_polygon(std::move(pts), x);
    d.kind_ = Kind::rectangle;
    return d;
  }

  static Domain polygon(std::vector<Point> pts, Point marked) {
    require(pts.size() >= 3, "polygon needs at least 3 vertices");
    return make_polygon(std::move(pts), marked);
  }

  Kind kind() const { return kind_; }
  Point marked_point() const { return marked_; }
  double perimeter() const { return perimeter_; }
  bool convex() const { return convex_; }
  Point center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Point>& vertices() const { return poly_; }

  /// Length scale used for relative tolerances.
  double scale() const {
    const Box b = bounding_box();
    return std::max(b.hi.real() - b.lo.real(), b.hi.imag() - b.lo.imag());
  }

  Box bounding_box() const {
    if (kind_ == Kind::disc) return {center_ - Point{radius_, radius_}, center_ + Point{radius_, radius_}};
    Box b{poly_[0], poly_[0]};
    for (Point p : poly_) {
      b.lo = {std::min(b.lo.real(), p.real()), std::min(b.lo.imag(), p.imag())};
      b.hi = {std::max(b.hi.real(), p.real()), std::max(b.hi.imag(), p.imag())};
    }
    return b;
  }

  /// Strict interior; points on the boundary (to relative tolerance 1e-12) are exterior.
  bool contains(Point p) const {
    const double tol = 1e-12 * scale();
    if (kind_ == Kind::disc) return std::abs(p - center_) < radius_ - tol;
    return point_in_polygon(p, poly_) && distance_to_boundary(p) > tol;
  }

  double distance_to_boundary(Point p) const {
    if (kind_ == Kind::disc) return std::abs(radius_ - std::abs(p - center_));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < poly_.size(); ++k)
      best = std::min(best, distance_to_segment(p, poly_[k], poly_[(k + 1) % poly_.size()]));
    return best;
  }

  Point nearest_boundary_point(Point p) const {
    if (kind_ == Kind::disc) {
      const Point d = p - center_;
      const double r = std::abs(d);
      return r > 0 ? center_ + d * (radius_ / r) : marked_;
    }
    double best = std::numeric_limits<double>::infinity();
    Point out = poly_[0];
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      Point q;
      const double dd = distance_to_segment(p, poly_[k], poly_[(k + 1) % poly_.size()], &q);
      if (dd < best) best = dd, out = q;
    }
    return out;
  }

  /// First parameter s in (0,1] at which the segment a->b meets the boundary, for a in the interior.
  std::optional<double> first_exit(Point a, Point b) const {
    if (kind_ == Kind::disc) {
      const Point d = b - a, f = a - center_;
      const double A = std::norm(d), B = 2 * dot(f, d), C = std::norm(f) - radius_ * radius_;
      if (A == 0) return std::nullopt;
      const double disc = B * B - 4 * A * C;
      if (disc < 0) return std::nullopt;
      const double sq = std::sqrt(disc);
      // C <= 0 for interior a: the larger root is the exit.
      const double s = (-B + sq) / (2 * A);
      if (s >= 0 && s <= 1 + 1e-12) return std::min(s, 1.0);
      return std::nullopt;
    }
    std::optional<double> best;
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      auto s = segment_hit(a, b, poly_[k], poly_[(k + 1) % poly_.size()]);
      if (s && *s > 1e-14 && (!best || *s < *best)) best = s;
    }
    return best;
  }

  /// Anticlockwise arc length from the marked point to boundary point p, in [0, perimeter).
  double arc_coordinate(Point p) const {
    if (kind_ == Kind::disc) {
      const double ang = std::arg(p - center_);
      return radius_ * (wrap_angle(ang - marked_angle_, 0.0));
    }
    double best = std::numeric_limits<double>::infinity(), sigma = 0;
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      Point q;
      const Point a = poly_[k], b = poly_[(k + 1) % poly_.size()];
      const double dd = distance_to_segment(p, a, b, &q);
      if (dd < best) best = dd, sigma = cum_[k] + std::abs(q - a);
    }
    double s = sigma - marked_sigma_;
    if (s < 0) s += perimeter_;
    if (s >= perimeter_ - 1e-12 * perimeter_) s = 0;
    return s;
  }

  Point boundary_point(double s) const {
    if (kind_ == Kind::disc) return center_ + std::polar(radius_, marked_angle_ + s / radius_);
    double sigma = std::fmod(marked_sigma_ + s, perimeter_);
    if (sigma < 0) sigma += perimeter_;
    const std::size_t k = edge_at(sigma, false);
    const Point a = poly_[k], b = poly_[(k + 1) % poly_.size()];
    return a + (b - a) * ((sigma - cum_[k]) / std::abs(b - a));
  }

  /// Unit anticlockwise tangent at arc coordinate s; at a corner the incoming edge is used.
  Point tangent(double s) const {
    if (kind_ == Kind::disc) return Point{0, 1} * std::polar(1.0, marked_angle_ + s / radius_);
    double sigma = std::fmod(marked_sigma_ + s, perimeter_);
    if (sigma < 0) sigma += perimeter_;
    return edge_dir(edge_at(sigma, s > 0));
  }

  /// Tangent with which the anticlockwise boundary curve leaves the marked point.
  Point initial_tangent() const {
    if (kind_ == Kind::disc) return tangent(0.0);
    return edge_dir(edge_at(marked_sigma_, false));
  }

  /// The boundary is smooth at x unless x sits on a polygon corner.
  bool smooth_at_marked() const { return kind_ == Kind::disc || !marked_at_corner_; }

  /// Intrinsic winding of the anticlockwise boundary curve from x to arc coordinate s.
  double arc_turning(double s) const {
    if (kind_ == Kind::disc) return s / radius_;
    double total = 0;
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      double sc = cum_[k] - marked_sigma_;
      if (sc < 0) sc += perimeter_;
      if (sc > 1e-12 * perimeter_ && sc < s - 1e-12 * perimeter_) total += corner_turn_[k];
    }
    return total;
  }

  /// Points of the anticlockwise boundary arc from x to arc coordinate s (both endpoints included).
  std::vector<Point> arc_points(double s, double max_step) const {
    std::vector<Point> out{marked_};
    if (s <= 0) return out;
    if (kind_ == Kind::disc) {
      const int n = std::max(1, static_cast<int>(std::ceil(s / max_step)));
      for (int i = 1; i <= n; ++i) out.push_back(boundary_point(s * i / n));
      return out;
    }
    std::vector<std::pair<double, std::size_t>> corners;
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      double sc = cum_[k] - marked_sigma_;
      if (sc < 0) sc += perimeter_;
      if (sc > 1e-12 * perimeter_ && sc < s - 1e-12 * perimeter_) corners.emplace_back(sc, k);
    }
    std::sort(corners.begin(), corners.end());
    for (auto& [sc, k] : corners) out.push_back(poly_[k]);
    out.push_back(boundary_point(s));
    return out;
  }

  /// Topological winding about interior point p of the anticlockwise boundary arc from x to s.
  double boundary_winding_about(Point p, double s) const {
    if (s <= 0) return 0.0;
    if (convex_ && kind_ == Kind::disc) {
      const Point q = boundary_point(s);
      return wrap_angle(std::arg(q - p) - std::arg(marked_ - p), 0.0);
    }
    const auto pts = arc_points(s, perimeter_);
    double w = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) w += arg_increment(pts[i], pts[i + 1], p);
    return w;
  }

  /// arg_{x-D}(x - z): continuous argument on x - D, matching Arg in the direction -tau(x).
  double arg_from_marked(Point z) const {
    const double a0 = std::arg(-initial_tangent());
    if (convex_) return a0 + wrap_angle(std::arg(marked_ - z) - a0, 0.0);
    return continued_arg(z, a0);
  }

  /// Polygonal approximation of the boundary (exact for polygons), anticlockwise.
  std::vector<Point> as_polygon(int disc_sides = 1024) const {
    if (kind_ != Kind::disc) return poly_;
    std::vector<Point> out;
    out.reserve(disc_sides);
    for (int i = 0; i < disc_sides; ++i) out.push_back(center_ + std::polar(radius_, two_pi * i / disc_sides));
    return out;
  }

  double area() const {
    if (kind_ == Kind::disc) return pi * radius_ * radius_;
    return polygon_signed_area(poly_);
  }

 private:
  static Domain make_polygon(std::vector<Point> pts, Point marked) {
    if (polygon_signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      require(std::abs(pts[i] - pts[(i + 1) % n]) > 0, "polygon has repeated vertices");
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        require(!segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]), "polygon is not simple");
      }
    }
    Domain d;
    d.kind_ = Kind::polygon;
    d.poly_ = std::move(pts);
    d.cum_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) d.cum_[k + 1] = d.cum_[k] + std::abs(d.poly_[(k + 1) % n] - d.poly_[k]);
    d.perimeter_ = d.cum_[n];
    d.corner_turn_.resize(n);
    d.convex_ = true;
    for (std::size_t k = 0; k < n; ++k) {
      d.corner_turn_[k] = turning_angle(d.edge_dir((k + n - 1) % n), d.edge_dir(k));
      if (d.corner_turn_[k] < 0) d.convex_ = false;
    }
    require(d.distance_to_boundary(marked) <= 1e-9 * d.scale(), "marked point is not on the boundary");
    d.marked_ = d.nearest_boundary_point(marked);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      Point q;
      const double dd = distance_to_segment(d.marked_, d.poly_[k], d.poly_[(k + 1) % n], &q);
      if (dd < best) best = dd, d.marked_sigma_ = d.cum_[k] + std::abs(q - d.poly_[k]);
    }
    if (d.marked_sigma_ >= d.perimeter_) d.marked_sigma_ -= d.perimeter_;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(d.poly_[k] - d.marked_) <= 1e-12 * d.scale()) {
        d.marked_at_corner_ = true;
        d.marked_sigma_ = d.cum_[k];
        d.marked_ = d.poly_[k];
      }
    if (!d.convex_) d.triangulate();
    return d;
  }

  Point edge_dir(std::size_t k) const {
    const Point v = poly_[(k + 1) % poly_.size()] - poly_[k];
    return v / std::abs(v);
  }

  // Edge containing raw parameter sigma; `incoming` selects the earlier edge at a vertex.
  std::size_t edge_at(double sigma, bool incoming) const {
    const std::size_t n = poly_.size();
    const double tol = 1e-12 * perimeter_;
    for (std::size_t k = 0; k < n; ++k) {
      if (incoming) {
        if (std::abs(sigma - cum_[k]) <= tol) return (k + n - 1) % n;
        if (sigma > cum_[k] && sigma <= cum_[k + 1] + tol) return k;
      } else if (sigma >= cum_[k] - tol && sigma < cum_[k + 1] - tol) {
        return k;
      }
    }
    return incoming ? n - 1 : 0;
  }

  void triangulate() {
    std::vector<std::size_t> idx(poly_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    while (idx.size() > 3) {
      bool clipped = false;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::size_t ip = idx[(i + idx.size() - 1) % idx.size()], ic = idx[i], in = idx[(i + 1) % idx.size()];
        const Point a = poly_[ip], b = poly_[ic], c = poly_[in];
        if (cross(b - a, c - b) <= 0) continue;
        bool ear = true;
        for (std::size_t j : idx) {
          if (j == ip || j == ic || j == in) continue;
          const Point p = poly_[j];
          if (cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0) {
            ear = false;
            break;
          }
        }
        if (!ear) continue;
        tris_.push_back({ip, ic, in});
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      if (!clipped) throw ComputationError("polygon triangulation failed");
    }
    tris_.push_back({idx[0], idx[1], idx[2]});
  }

  int locate_triangle(Point p) const {
    int best = -1;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Point a = poly_[tris_[t][0]], b = poly_[tris_[t][1]], c = poly_[tris_[t][2]];
      const double m = std::min({cross(b - a, p - a), cross(c - b, p - b), cross(a - c, p - c)});
      if (m > best_margin) best_margin = m, best = static_cast<int>(t);
    }
    return best;
  }

  // Continuation of arg(x - w) along a path through the triangulation from near x to z.
  double continued_arg(Point z, double a0) const {
    const double eta = 1e-3;
    const Point w0 = marked_ + 1e-7 * scale() * initial_tangent() * std::polar(1.0, eta);
    const int t0 = locate_triangle(w0), t1 = locate_triangle(z);
    std::vector<int> prev(tris_.size(), -2);
    std::queue<int> q;
    q.push(t0);
    prev[t0] = -1;
    auto shared = [&](int s, int t, Point& mid) {
      int cnt = 0;
      std::array<std::size_t, 2> common{};
      for (auto i : tris_[s])
        for (auto j : tris_[t])
          if (i == j && cnt < 2) common[cnt++] = i;
      if (cnt == 2) mid = 0.5 * (poly_[common[0]] + poly_[common[1]]);
      return cnt == 2;
    };
    while (!q.empty()) {
      const int s = q.front();
      q.pop();
      if (s == t1) break;
      for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        Point mid;
        if (prev[t] == -2 && shared(s, t, mid)) prev[t] = s, q.push(t);
      }
    }
    std::vector<Point> path{z};
    for (int t = t1; prev[t] >= 0; t = prev[t]) {
      Point mid;
      shared(prev[t], t, mid);
      path.push_back(mid);
    }
    path.push_back(w0);
    std::reverse(path.begin(), path.end());
    double value = a0 + eta;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) value += arg_increment(path[i], path[i + 1], marked_);
    return value;
  }

  Kind kind_ = Kind::disc;
  Point center_{0, 0};
  double radius_ = 1;
  double marked_angle_ = 0;
  Point marked_{1, 0};
  double perimeter_ = 0;
  bool convex_ = true;
  std::vector<Point> poly_;
  std::vector<double> cum_;
  std::vector<double> corner_turn_;
  double marked_sigma_ = 0;
  bool marked_at_corner_ = false;
  std::vector<std::array<std::size_t, 3>> tris_;
};

}  // namespace wgff
