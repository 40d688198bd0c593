#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <functional>
#include <unordered_map>
#include <vector>

#include "wgff/domain.hpp"
#include "wgff/error.hpp"
#include "wgff/geometry.hpp"
#include "wgff/rng.hpp"
#include "wgff/stats.hpp"
#include "wgff/winding.hpp"

namespace wgff {

/// Moebius automorphism of the unit disc sending z0 to 0 and fixing 1.
struct MobiusMap {
  Point z0{0, 0};

  explicit MobiusMap(Point z = {0, 0}) : z0(z) { require(std::abs(z) < 1, "z0 must lie in the open unit disc"); }

  Point phase() const { return (1.0 - std::conj(z0)) / (1.0 - z0); }
  Point operator()(Point w) const { return phase() * (w - z0) / (1.0 - std::conj(z0) * w); }
  Point derivative(Point t) const {
    const Point d = 1.0 - t * std::conj(z0);
    return (1 - std::norm(z0)) / (d * d) * phase();
  }
};

inline Point mobius_derivative(const MobiusMap& m, Point t) {
  require(std::abs(t) <= 1 + 1e-15, "point must lie in the closed unit disc");
  return m.derivative(t);
}

/// arg_{1-D}(1-z), the argument on 1 - D with values in (-pi/2, pi/2).
inline double arg_branch_1_minus_disc(Point z) {
  require(std::abs(z) < 1, "z must lie in the open unit disc");
  return std::arg(1.0 - z);
}

/// Harmonic extension to the unit disc of u(e^{i theta}) = theta, theta in (0, 2pi), by adaptive
/// Gauss-Kronrod quadrature of the Poisson integral.
inline double winding_boundary_function(Point z, double tol = 1e-10) {
  require(std::abs(z) < 1, "z must lie in the open unit disc");
  const double r2 = std::norm(z);
  auto integrand = [&](double th) { return th * (1 - r2) / std::norm(std::polar(1.0, th) - z); };
  // Split at the angle of z so the Poisson peak sits on a panel edge.
  const double a = wrap_angle(std::arg(z), 0.0);
  double total = 0;
  for (auto [lo, hi] : {std::pair{0.0, a}, std::pair{a, two_pi}})
    if (hi > lo) total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 20, tol);
  return total / two_pi;
}

/// Residual of the change-of-coordinates identity for a curve in the closed unit disc starting at 1:
/// [W(psi(gamma), psi(w)) - W(gamma, w)] - [Arg psi'(w) + arg_{1-D}(1-w) - arg_{1-D}(1-psi(w))], w = gamma(1).
/// The image curve is sampled with geometric refinement towards the tip.
inline double check_change_of_coords(const Polyline& poly, const MobiusMap& m) {
  poly.check();
  require(std::abs(poly.pts.front() - Point{1, 0}) < 1e-12, "curve must start at 1");
  const Point w = poly.pts.back();
  require(std::abs(w) < 1, "tip must be interior");
  for (Point p : poly.pts) require(std::abs(p) <= 1 + 1e-12, "curve must lie in the closed unit disc");
  const Point pw = m(w);
  const double lhs_orig = winding_about_end(poly);
  // Winding of the image about psi(w).
  double lhs_img = 0;
  // Images of straight segments are circular arcs; subdivide until every chord is short compared with its
  // distance to psi(w), so the chord polyline is homotopic to the image arc.
  std::function<void(Point, Point, Point, Point, int)> acc = [&](Point a, Point b, Point ma, Point mb, int depth) {
    if (depth < 60 && std::abs(ma - mb) > 0.05 * std::min(std::abs(ma - pw), std::abs(mb - pw))) {
      const Point c = 0.5 * (a + b), mc = m(c);
      acc(a, c, ma, mc, depth + 1);
      acc(c, b, mc, mb, depth + 1);
      return;
    }
    lhs_img += turning_angle(ma - pw, mb - pw);
  };
  const std::size_t last = poly.pts.size() - 2;
  for (std::size_t i = 0; i < last; ++i) acc(poly.pts[i], poly.pts[i + 1], m(poly.pts[i]), m(poly.pts[i + 1]), 0);
  {
    const Point a = poly.pts[last], b = poly.pts[last + 1];
    Point prev = a;
    for (int k = 1; k <= 30; ++k) {
      const Point q = b + (a - b) * std::ldexp(1.0, -k);
      acc(prev, q, m(prev), m(q), 0);
      prev = q;
    }
    // remaining piece: arg(psi(q) - psi(w)) -> Arg psi'(w) + arg(q - w) as q -> w along the segment
    const double limit = std::arg(m.derivative(w) * (a - b));
    lhs_img += std::remainder(limit - std::arg(m(prev) - pw), two_pi);
  }
  const double rhs = std::arg(m.derivative(w)) + std::arg(1.0 - w) - std::arg(1.0 - pw);
  return (lhs_img - lhs_orig) - rhs;
}

/// Bucket grid over the segments of a polyline for nearest-segment queries restricted to a prefix.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  SegmentIndex(const std::vector<Point>& pts, double cell) : pts_(&pts), cell_(cell) {
    require(cell > 0, "cell size must be positive");
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      const Point a = pts[j], b = pts[j + 1];
      const auto [i0, k0] = key({std::min(a.real(), b.real()), std::min(a.imag(), b.imag())});
      const auto [i1, k1] = key({std::max(a.real(), b.real()), std::max(a.imag(), b.imag())});
      for (auto i = i0; i <= i1; ++i)
        for (auto k = k0; k <= k1; ++k) cells_[detail::lattice_key(i, k)].push_back(static_cast<int>(j));
    }
  }

  /// Lower bound on the distance from p to segments [0, nseg), exact when below rings*cell.
  /// On return `seg` holds the nearest segment found, or -1.
  double distance(Point p, int nseg, int& seg, int rings = 3) const {
    seg = -1;
    double best = rings * cell_;
    if (nseg <= 0) return std::numeric_limits<double>::infinity();
    const auto [ci, ck] = key(p);
    for (int r = 0; r <= rings; ++r) {
      if ((r - 1) * cell_ >= best) break;
      for (std::int64_t i = ci - r; i <= ci + r; ++i)
        for (std::int64_t k = ck - r; k <= ck + r; ++k) {
          if (std::max(std::abs(i - ci), std::abs(k - ck)) != r) continue;
          auto it = cells_.find(detail::lattice_key(i, k));
          if (it == cells_.end()) continue;
          for (int j : it->second) {
            if (j >= nseg) continue;
            const double d = distance_to_segment(p, (*pts_)[j], (*pts_)[j + 1]);
            if (d < best) best = d, seg = j;
          }
        }
    }
    return best;
  }

 private:
  std::pair<std::int64_t, std::int64_t> key(Point p) const {
    return {static_cast<std::int64_t>(std::floor(p.real() / cell_)), static_cast<std::int64_t>(std::floor(p.imag() / cell_))};
  }
  const std::vector<Point>* pts_ = nullptr;
  double cell_ = 1;
  std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

enum class CapacityMethod { walk_on_spheres, lattice_walk };

struct CapacityOptions {
  CapacityMethod method = CapacityMethod::walk_on_spheres;
  std::size_t n_paths = 200;
  double lattice_step = 0;  // lattice walk step; 0 means delta/8
  double wos_epsilon = 0;   // walk-on-spheres shell; 0 means 1e-6 * domain scale
};

struct CapacityEstimate {
  double value = 0;  // log R
  double se = 0;
  std::size_t n = 0;
};

/// log R(z, D minus prefixes of a curve) for several prefixes at once, with common random numbers.
/// prefix_points[i] is the number of curve points in prefix i (segments = points - 1); strictly increasing.
/// One Brownian path per sample serves every prefix: it is run in the domain slit by the longest prefix;
/// when it stops on segment j, that exit point is valid for every prefix containing j, and the path is
/// continued in the largest prefix not containing j.
struct CapacityProfile {
  std::vector<int> prefix_points;
  std::vector<double> log_r, log_r_se;  // per prefix
  std::vector<double> t, t_se;          // log R(z, D) - log R(z, D minus prefix), per prefix
  double log_r_domain = 0, log_r_domain_se = 0;
};

namespace detail {

struct SlitWalker {
  const Domain& d;
  const std::vector<Point>& curve;
  const SegmentIndex& idx;
  Point z;
  double eps;
  double step;
  CapacityMethod method;

  // Runs from p in D minus segments [0, nseg) until it stops; returns the hit segment (-1 for the boundary)
  // and sets `exit` to the exit point. `p` is updated to the stopping position.
  int run(Point& p, int nseg, Point& exit, Rng& rng) const {
    if (method == CapacityMethod::walk_on_spheres) {
      for (;;) {
        const double db = d.distance_to_boundary(p);
        int seg;
        const double ds = idx.distance(p, nseg, seg);
        if (seg >= 0 && ds < eps && ds <= db) {
          distance_to_segment(p, curve[seg], curve[seg + 1], &exit);
          return seg;
        }
        if (db < eps) {
          exit = d.nearest_boundary_point(p);
          return -1;
        }
        p += std::polar(std::min(db, ds), two_pi * rng.uniform());
      }
    }
    static const Point dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (;;) {
      const Point q = p + step * dirs[rng.below(4)];
      if (!d.contains(q)) {
        auto s = d.first_exit(p, q);
        exit = p + (s ? *s : 1.0) * (q - p);
        p = exit;
        return -1;
      }
      p = q;
      int seg;
      const double ds = idx.distance(p, nseg, seg, 1);
      if (seg >= 0 && ds < step / 2) {
        distance_to_segment(p, curve[seg], curve[seg + 1], &exit);
        return seg;
      }
    }
  }
};

}  // namespace detail

inline CapacityProfile capacity_profile(const Domain& d, Point z, const std::vector<Point>& curve,
                                        const std::vector<int>& prefix_points, std::uint64_t seed,
                                        const CapacityOptions& opt, double delta) {
  require(d.contains(z), "z must be an interior point");
  require(opt.n_paths >= 2, "need at least two sample paths");
  for (std::size_t i = 0; i < prefix_points.size(); ++i) {
    require(prefix_points[i] >= 1 && static_cast<std::size_t>(prefix_points[i]) <= curve.size(), "prefix out of range");
    if (i) require(prefix_points[i] > prefix_points[i - 1], "prefixes must increase");
  }
  const int m = static_cast<int>(prefix_points.size());
  if (m > 0) {
    const int nseg = prefix_points.back() - 1;
    for (int j = 0; j < nseg; ++j)
      require(distance_to_segment(z, curve[j], curve[j + 1]) > 0, "z lies on the slit");
  }
  const double eps = opt.wos_epsilon > 0 ? opt.wos_epsilon : 1e-6 * d.scale();
  const double step = opt.lattice_step > 0 ? opt.lattice_step : delta / 8;
  const SegmentIndex idx(curve, std::max(delta, 1e-9 * d.scale()));
  const detail::SlitWalker walker{d, curve, idx, z, eps, step, opt.method};

  // rows: per path, log|exit - z| for each prefix plus the empty prefix.
  std::vector<std::vector<double>> rows(opt.n_paths, std::vector<double>(m + 1));
  for (std::size_t i = 0; i < opt.n_paths; ++i) {
    Rng rng(derive_seed(seed, i));
    Point p = z, exit;
    int level = m - 1;  // index into prefix_points of the domain being walked; -1 = no slit
    for (;;) {
      const int nseg = level >= 0 ? prefix_points[level] - 1 : 0;
      const int seg = walker.run(p, nseg, exit, rng);
      const double v = std::log(std::abs(exit - z));
      if (seg < 0) {
        for (int k = 0; k <= level; ++k) rows[i][k] = v;
        rows[i][m] = v;
        break;
      }
      int next = level;
      while (next >= 0 && prefix_points[next] - 1 > seg) rows[i][next] = v, --next;
      level = next;
    }
  }
  CapacityProfile out;
  out.prefix_points = prefix_points;
  Moments dom;
  for (auto& r : rows) dom.add(r[m]);
  out.log_r_domain = dom.mean();
  out.log_r_domain_se = dom.se();
  for (int k = 0; k < m; ++k) {
    Moments a, diff;
    for (auto& r : rows) a.add(r[k]), diff.add(r[m] - r[k]);
    out.log_r.push_back(a.mean());
    out.log_r_se.push_back(a.se());
    out.t.push_back(diff.mean());
    out.t_se.push_back(diff.se());
  }
  return out;
}

/// Monte Carlo log conformal radius of z in D, optionally slit by a polyline, as E log|B_tau - z|.
inline CapacityEstimate conformal_radius_mc(const Domain& d, Point z, const std::vector<Point>& slit, std::uint64_t seed,
                                            const CapacityOptions& opt, double delta) {
  CapacityEstimate e;
  e.n = opt.n_paths;
  if (slit.size() < 2) {
    const auto p = capacity_profile(d, z, slit.empty() ? std::vector<Point>{d.marked_point()} : slit, {}, seed, opt, delta);
    e.value = p.log_r_domain;
    e.se = p.log_r_domain_se;
    return e;
  }
  const auto p = capacity_profile(d, z, slit, {static_cast<int>(slit.size())}, seed, opt, delta);
  e.value = p.log_r[0];
  e.se = p.log_r_se[0];
  return e;
}

/// Capacities along the part of a branch inside D, seen from its tip z = pts.back().
/// Grid: every ceil(L/50)-th prefix plus the longest proper prefix; values are offset so the empty prefix
/// (the exit point alone) has t = 0, then regularised by a running maximum.
struct BranchCapacity {
  std::vector<int> prefix_points;  // first entry is 1 (the exit point alone)
  std::vector<double> t;           // nondecreasing
  std::vector<double> raw_t, t_se;
  double log_r_domain = 0;
};

inline BranchCapacity capacity_along_branch(const Domain& d, const std::vector<Point>& pts, std::uint64_t seed,
                                            const CapacityOptions& opt, double delta, int grid_points = 50) {
  require(pts.size() >= 2, "branch must contain at least one segment");
  const int last = static_cast<int>(pts.size()) - 1;  // index of the tip
  const int stride = std::max(1, (last + grid_points - 1) / grid_points);
  std::vector<int> prefixes;
  for (int k = 1 + stride; k < last; k += stride) prefixes.push_back(k);
  if (last >= 2 && (prefixes.empty() || prefixes.back() != last)) prefixes.push_back(last);
  BranchCapacity out;
  out.prefix_points.push_back(1);
  out.t.push_back(0.0);
  out.raw_t.push_back(0.0);
  out.t_se.push_back(0.0);
  const auto prof = capacity_profile(d, pts.back(), pts, prefixes, seed, opt, delta);
  out.log_r_domain = prof.log_r_domain;
  double run = 0;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    run = std::max(run, prof.t[i]);
    out.prefix_points.push_back(prefixes[i]);
    out.t.push_back(run);
    out.raw_t.push_back(prof.t[i]);
    out.t_se.push_back(prof.t_se[i]);
  }
  return out;
}

}  // namespace wgff
