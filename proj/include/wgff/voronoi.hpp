#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "wgff/domain.hpp"
#include "wgff/error.hpp"
#include "wgff/geometry.hpp"
#include "wgff/planar_graph.hpp"

namespace wgff {

/// Voronoi cells of the interior vertices of a wired graph, clipped to the domain.
class VoronoiTessellation {
 public:
  explicit VoronoiTessellation(const WiredDomainGraph& w, int disc_sides = 1024)
      : VoronoiTessellation(w.positions(), w.domain(), w.delta(), disc_sides) {}

  VoronoiTessellation(const std::vector<Point>& sites, const Domain& d, double delta, int disc_sides = 1024) : delta_(delta) {
    require(delta > 0, "mesh size must be positive");
    const auto boundary = d.as_polygon(disc_sides);
    const Box bb = d.bounding_box();
    const double big = 2 * std::abs(bb.hi - bb.lo) + 1;
    std::unordered_map<std::int64_t, std::vector<int>> grid;
    auto key = [&](Point p) {
      return std::pair{static_cast<std::int64_t>(std::floor(p.real() / delta)), static_cast<std::int64_t>(std::floor(p.imag() / delta))};
    };
    for (std::size_t i = 0; i < sites.size(); ++i) {
      auto [a, b] = key(sites[i]);
      grid[detail::lattice_key(a, b)].push_back(static_cast<int>(i));
    }
    cells_.resize(sites.size());
    const auto max_rings = static_cast<int>(std::ceil(big / delta)) + 1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const Point p = sites[i];
      const Point lo = bb.lo - Point(delta, delta), hi = bb.hi + Point(delta, delta);
      std::vector<Point> cell{lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}};
      std::vector<std::pair<Point, Point>> planes;  // bisectors, cell on the left
      auto radius = [&] {
        double r = 0;
        for (Point q : cell) r = std::max(r, std::abs(q - p));
        return r;
      };
      const auto [ci, cj] = key(p);
      for (int r = 0; r <= max_rings; ++r) {
        if ((r - 1) * delta > 2 * radius()) break;
        for (std::int64_t a = ci - r; a <= ci + r; ++a)
          for (std::int64_t b = cj - r; b <= cj + r; ++b) {
            if (std::max(std::abs(a - ci), std::abs(b - cj)) != r) continue;
            auto it = grid.find(detail::lattice_key(a, b));
            if (it == grid.end()) continue;
            for (int j : it->second) {
              if (j == static_cast<int>(i)) continue;
              const Point q = sites[j];
              const Point mid = 0.5 * (p + q), n = q - p;
              const Point dir = Point(-n.imag(), n.real());  // left of mid->mid+dir is the side of p
              const auto clipped = clip_halfplane(cell, mid, mid + dir);
              if (clipped.size() != cell.size() || clipped != cell) planes.emplace_back(mid, mid + dir);
              cell = clipped;
            }
          }
      }
      bool inside = d.distance_to_boundary(p) > radius() * (1 + 1e-9);
      if (!inside) {
        // clip the domain by the bisectors so non-convex domains are handled
        std::vector<Point> sub = boundary;
        for (auto [a, b] : planes) sub = clip_halfplane(sub, a, b);
        cell = std::move(sub);
      }
      cells_[i] = std::move(cell);
    }
  }

  std::size_t size() const { return cells_.size(); }
  const std::vector<Point>& cell(std::size_t i) const { return cells_[i]; }
  double delta() const { return delta_; }

  double area(std::size_t i) const { return polygon_signed_area(cells_[i]); }

  /// Integral of f over cell i: centroid times area for cells of diameter below delta, otherwise a degree-5
  /// seven-point rule on the fan of triangles from the vertex centroid.
  double integrate(std::size_t i, const std::function<double(Point)>& f) const {
    const auto& c = cells_[i];
    if (c.size() < 3) return 0.0;
    Point g{0, 0};
    for (Point q : c) g += q;
    g /= static_cast<double>(c.size());
    double diam = 0;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) diam = std::max(diam, std::abs(c[a] - c[b]));
    if (diam < delta_) {
      double a = 0;
      Point cen{0, 0};
      for (std::size_t k = 0; k < c.size(); ++k) {
        const Point p0 = c[k], p1 = c[(k + 1) % c.size()];
        const double t = cross(p0 - g, p1 - g) / 2;
        a += t;
        cen += t * (g + p0 + p1) / 3.0;
      }
      return a > 0 ? f(cen / a) * a : 0.0;
    }
    double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += triangle_rule(g, c[k], c[(k + 1) % c.size()], f);
    return s;
  }

  std::vector<double> cell_integrals(const std::function<double(Point)>& f) const {
    std::vector<double> out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = integrate(i, f);
    return out;
  }

 private:
  static double triangle_rule(Point a, Point b, Point c, const std::function<double(Point)>& f) {
    const double area = cross(b - a, c - a) / 2;
    if (area == 0) return 0.0;
    static const double s15 = std::sqrt(15.0);
    const double a1 = (6 - s15) / 21, a2 = (6 + s15) / 21;
    const double w0 = 9.0 / 40, w1 = (155 - s15) / 1200, w2 = (155 + s15) / 1200;
    auto at = [&](double l1, double l2) { return f(a * (1 - l1 - l2) + b * l1 + c * l2); };
    double s = w0 * at(1.0 / 3, 1.0 / 3);
    s += w1 * (at(a1, a1) + at(1 - 2 * a1, a1) + at(a1, 1 - 2 * a1));
    s += w2 * (at(a2, a2) + at(1 - 2 * a2, a2) + at(a2, 1 - 2 * a2));
    return s * area;
  }

  double delta_;
  std::vector<std::vector<Point>> cells_;
};

/// Built-in test functions: smooth radial bumps, optionally times a monomial in the coordinates.
struct TestFunction {
  Point center{0, 0};
  double radius = 0.25;
  int px = 0, py = 0;

  double operator()(Point z) const {
    const double r2 = std::norm(z - center) / (radius * radius);
    if (r2 >= 1) return 0.0;
    return std::pow(z.real(), px) * std::pow(z.imag(), py) * std::exp(-1 / (1 - r2));
  }
};

inline TestFunction radial_bump(Point center, double radius) {
  require(radius > 0, "bump radius must be positive");
  return {center, radius, 0, 0};
}

/// (h, f) with h extended as constant on each clipped Voronoi cell.
inline double pair_with_test_function(const std::vector<double>& field, const std::vector<double>& cell_integrals) {
  require(field.size() == cell_integrals.size(), "field and tessellation sizes differ");
  double s = 0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field[i] * cell_integrals[i];
  return s;
}

inline double pair_with_test_function(const std::vector<double>& field, const std::function<double(Point)>& f,
                                      const VoronoiTessellation& vor) {
  return pair_with_test_function(field, vor.cell_integrals(f));
}

}  // namespace wgff
