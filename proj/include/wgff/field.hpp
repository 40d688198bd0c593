#pragma once

#include <vector>

#include "wgff/conformal.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/stats.hpp"
#include "wgff/walk.hpp"
#include "wgff/winding.hpp"

namespace wgff {

namespace detail {

inline std::vector<double> arclengths(const std::vector<Point>& pts) {
  std::vector<double> a(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) a[i] = a[i - 1] + std::abs(pts[i] - pts[i - 1]);
  return a;
}

/// Winding about v = pts.back() of pts followed from pts[0] up to arclength `len` (len below the last segment).
inline double winding_up_to(const std::vector<Point>& pts, const std::vector<double>& arc, double len) {
  const Point v = pts.back();
  double w = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (arc[i + 1] <= len) {
      w += arg_increment(pts[i], pts[i + 1], v);
      continue;
    }
    if (len > arc[i]) {
      const Point c = pts[i] + (pts[i + 1] - pts[i]) * ((len - arc[i]) / (arc[i + 1] - arc[i]));
      w += arg_increment(pts[i], c, v);
    }
    break;
  }
  return w;
}

/// Arclength along the branch where the regularised capacity reaches t, or nullopt beyond the last grid point.
inline std::optional<double> cut_length(const BranchCapacity& cap, const std::vector<double>& arc, double t) {
  if (t >= cap.t.back()) return std::nullopt;
  std::size_t i = 0;
  while (cap.t[i + 1] <= t) ++i;
  const double a0 = arc[cap.prefix_points[i] - 1], a1 = arc[cap.prefix_points[i + 1] - 1];
  return a0 + (t - cap.t[i]) / (cap.t[i + 1] - cap.t[i]) * (a1 - a0);
}

}  // namespace detail

struct TruncatedValue {
  double value = 0;
  bool beyond_branch = false;  // t exceeds the capacity of the whole branch; value is the untruncated one
};

/// h_t(v) = W(gamma_v[-1, t], v) - Arg(-tau(x)) + arg_{x-D}(x - v), the branch cut where its capacity seen
/// from v, offset by log R(v, D), reaches t. On a rough boundary Arg(-tau) is replaced by the constant 0.
inline TruncatedValue truncated_value(const WiredDomainGraph& w, const ExtendedBranch& b, const BranchCapacity& cap, double t) {
  require(t >= 0, "capacity level must be nonnegative");
  const Domain& d = w.domain();
  const Point v = b.pts.back();
  const auto arc = detail::arclengths(b.pts);
  const double corr = d.arg_from_marked(v) - marked_tangent_term(d);
  const auto len = detail::cut_length(cap, arc, t);
  if (!len) return {untruncated_topological_value(w, b), true};
  return {d.boundary_winding_about(v, b.s) + detail::winding_up_to(b.pts, arc, *len) + corr, false};
}

inline std::vector<TruncatedValue> truncated_values(const WiredDomainGraph& w, const ExtendedBranch& b, const std::vector<double>& ts,
                                                    std::uint64_t seed, const CapacityOptions& opt) {
  const auto cap = capacity_along_branch(w.domain(), b.pts, seed, opt, w.delta());
  std::vector<TruncatedValue> out;
  for (double t : ts) out.push_back(truncated_value(w, b, cap, t));
  return out;
}

/// Truncated field at the given vertices (all interior vertices when empty), one value per vertex and level.
/// Capacities use an independent stream per vertex.
struct TruncatedField {
  std::vector<int> vertices;
  std::vector<double> levels;
  std::vector<std::vector<TruncatedValue>> values;  // [vertex][level]
};

inline TruncatedField truncated_field(const SpanningTree& tree, const WiredDomainGraph& w, const std::vector<double>& ts,
                                      std::uint64_t seed, const CapacityOptions& opt, std::vector<int> vertices = {}) {
  if (vertices.empty())
    for (int v = 0; v < w.num_interior(); ++v) vertices.push_back(v);
  TruncatedField f;
  f.levels = ts;
  for (int v : vertices) {
    require(v >= 0 && v < w.num_interior(), "vertex out of range");
    f.values.push_back(truncated_values(w, extended_branch(tree, w, v), ts, derive_seed(seed, v), opt));
  }
  f.vertices = std::move(vertices);
  return f;
}

struct MCorrection {
  double value = 0;
  double se = 0;
  std::size_t n = 0;
  std::size_t short_branches = 0;  // branches whose whole capacity stayed below the cut level
};

/// Monte Carlo m(v): expected winding about v of the part of the branch from v, in a large wired disc
/// standing in for the plane, beyond the point where log R(v, disc minus branch) first drops to 0.
inline MCorrection estimate_m_correction(const PlanarGraph& g, Point v, std::size_t n_samples, double box_radius,
                                         std::uint64_t seed, const CapacityOptions& opt = {}) {
  require(n_samples >= 2, "need at least two samples");
  require(box_radius >= 2, "box too small: radius must be at least 2 so that capacity 0 lies inside");
  require(g.num_vertices() > 0, "box too small: empty graph");
  Box bb{g.pos[0], g.pos[0]};
  for (Point p : g.pos)
    bb.lo = {std::min(bb.lo.real(), p.real()), std::min(bb.lo.imag(), p.imag())},
    bb.hi = {std::max(bb.hi.real(), p.real()), std::max(bb.hi.imag(), p.imag())};
  require(bb.lo.real() <= v.real() - box_radius && bb.hi.real() >= v.real() + box_radius && bb.lo.imag() <= v.imag() - box_radius &&
              bb.hi.imag() >= v.imag() + box_radius,
          "box too small: the graph does not cover the disc");
  const WiredDomainGraph w = clip_and_wire(g, Domain::disc(v, box_radius));
  const int start = w.nearest_vertex(v);
  require(std::abs(w.pos(start) - v) <= 1e-9 * box_radius, "v must be a graph vertex");
  const double level = std::log(box_radius);
  Moments acc;
  MCorrection out;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, 2 * i));
    const auto walk = run_walk(w, start, [&](int u) { return u == w.root(); }, rng);
    const auto b = extended_branch(w, loop_erase(walk));
    double m = 0;
    if (b.pts.size() > 2) {
      const auto cap = capacity_along_branch(w.domain(), b.pts, derive_seed(seed, 2 * i + 1), opt, w.delta());
      const auto arc = detail::arclengths(b.pts);
      const auto len = detail::cut_length(cap, arc, level);
      if (len) {
        Polyline whole{b.pts};
        m = winding_about_end(whole) - detail::winding_up_to(b.pts, arc, *len);
      } else {
        ++out.short_branches;
      }
    } else {
      ++out.short_branches;
    }
    acc.add(m);
  }
  out.value = acc.mean();
  out.se = acc.se();
  out.n = n_samples;
  return out;
}

}  // namespace wgff
