#pragma once

#include <optional>
#include <vector>

#include "wgff/error.hpp"
#include "wgff/geometry.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/walk.hpp"

namespace wgff {

/// Planar polyline. `initial_direction` is the tangent with which the curve leaves its first point when
/// that differs from the first segment (a curve arriving from a smooth boundary arc).
struct Polyline {
  std::vector<Point> pts;
  std::optional<Point> initial_direction;
  bool starts_on_boundary = false;

  void check() const {
    require(pts.size() >= 2, "polyline needs at least two points");
    for (std::size_t i = 1; i < pts.size(); ++i) require(pts[i] != pts[i - 1], "polyline has repeated consecutive points");
  }

  double length() const {
    double l = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) l += std::abs(pts[i] - pts[i - 1]);
    return l;
  }

  double scale() const {
    double s = 0;
    for (Point p : pts) s = std::max(s, std::abs(p - pts[0]));
    return std::max(s, 1e-300);
  }
};

/// W(poly, p): increment of the continuous argument of poly(t) - p.
inline double topological_winding(const Polyline& poly, Point p) {
  poly.check();
  const double tol = 1e-12 * std::max(poly.scale(), std::abs(p - poly.pts[0]));
  double w = 0;
  for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
    if (distance_to_segment(p, poly.pts[i], poly.pts[i + 1]) <= tol) throw InvalidArgument("point lies on the polyline");
    w += arg_increment(poly.pts[i], poly.pts[i + 1], p);
  }
  return w;
}

namespace detail {

inline double checked_turn(Point from, Point to) {
  if (cross(from, to) == 0 && dot(from, to) < 0) throw InvalidArgument("polyline reverses direction");
  return turning_angle(from, to);
}

}  // namespace detail

/// Total signed turning: sum of exterior angles, plus the turn from the initial direction if one is set.
inline double intrinsic_winding(const Polyline& poly) {
  poly.check();
  double w = 0;
  if (poly.initial_direction) w += detail::checked_turn(*poly.initial_direction, poly.pts[1] - poly.pts[0]);
  for (std::size_t i = 1; i + 1 < poly.pts.size(); ++i)
    w += detail::checked_turn(poly.pts[i] - poly.pts[i - 1], poly.pts[i + 1] - poly.pts[i]);
  return w;
}

/// W(poly, poly(1)) with the limiting convention at the endpoint (the last segment contributes nothing).
inline double winding_about_end(const Polyline& poly) {
  poly.check();
  const Point e = poly.pts.back();
  double w = 0;
  for (std::size_t i = 0; i + 2 < poly.pts.size(); ++i) w += arg_increment(poly.pts[i], poly.pts[i + 1], e);
  return w;
}

/// W(poly, poly(0)): the argument of poly(t) - poly(0) starts at the initial direction.
inline double winding_about_start(const Polyline& poly) {
  poly.check();
  const Point s = poly.pts.front();
  double w = poly.initial_direction ? detail::checked_turn(*poly.initial_direction, poly.pts[1] - poly.pts[0]) : 0.0;
  for (std::size_t i = 1; i + 1 < poly.pts.size(); ++i) w += arg_increment(poly.pts[i], poly.pts[i + 1], s);
  return w;
}

/// True when no two segments meet except consecutive ones at their shared point.
inline bool is_simple(const Polyline& poly) {
  const auto& q = poly.pts;
  const std::size_t m = q.size() < 2 ? 0 : q.size() - 1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1) {
        if (cross(q[i + 1] - q[i], q[j + 1] - q[j]) == 0 && dot(q[i + 1] - q[i], q[j + 1] - q[j]) < 0) return false;
        continue;
      }
      if (segment_hit(q[i], q[i + 1], q[j], q[j + 1])) return false;
    }
  return true;
}

inline Polyline concatenate(const Polyline& a, const Polyline& b) {
  require(!a.pts.empty() && !b.pts.empty() && std::abs(a.pts.back() - b.pts.front()) <= 1e-12 * a.scale(),
          "polylines do not join");
  Polyline out = a;
  out.pts.insert(out.pts.end(), b.pts.begin() + 1, b.pts.end());
  return out;
}

/// The part of a tree branch that lies in the domain, oriented from the boundary towards v:
/// pts[0] is the exit point on the boundary (arc coordinate s), pts.back() is v.
struct ExtendedBranch {
  int vertex = 0;
  double s = 0;
  std::vector<Point> pts;
  std::vector<int> vertices;  // graph vertex at each point, -1 for edge-interior points and the exit point
};

inline ExtendedBranch extended_branch(const WiredDomainGraph& w, int v, const std::vector<std::size_t>& edges) {
  require(v >= 0 && v < w.num_interior(), "v must be an interior vertex");
  require(!edges.empty() && w.edge(edges.back()).dst == w.root(), "branch must end at the root");
  ExtendedBranch b;
  b.vertex = v;
  const WiredEdge& last = w.edge(edges.back());
  b.s = w.aux()[last.aux].s;
  for (std::size_t i = edges.size(); i-- > 0;) {
    const auto& pl = w.edge(edges[i]).polyline;
    const int src = i == 0 ? v : w.edge(edges[i - 1]).dst;
    for (std::size_t k = pl.size() - 1; k-- > 0;) {
      if (b.pts.empty()) {
        b.pts.push_back(pl.back());
        b.vertices.push_back(-1);
      }
      b.pts.push_back(pl[k]);
      b.vertices.push_back(k == 0 ? src : -1);
    }
  }
  return b;
}

inline ExtendedBranch extended_branch(const SpanningTree& t, const WiredDomainGraph& w, int v) {
  return extended_branch(w, v, branch_edges(t, w, v));
}

inline ExtendedBranch extended_branch(const WiredDomainGraph& w, const LatticePath& lerw) {
  return extended_branch(w, lerw.start(), lerw.edges);
}

/// The full curve gamma_v(-1, inf): anticlockwise boundary arc from x to the exit point, then the branch to v.
inline Polyline branch_with_boundary(const WiredDomainGraph& w, const ExtendedBranch& b, double arc_step = 0) {
  const Domain& d = w.domain();
  if (arc_step <= 0) arc_step = w.delta() / 4;
  Polyline p;
  p.pts = d.arc_points(b.s, arc_step);
  p.pts.pop_back();
  p.pts.insert(p.pts.end(), b.pts.begin(), b.pts.end());
  p.initial_direction = d.initial_tangent();
  p.starts_on_boundary = true;
  return p;
}

inline Polyline branch_with_boundary(const SpanningTree& t, int v, const WiredDomainGraph& w) {
  return branch_with_boundary(w, extended_branch(t, w, v));
}

/// Intrinsic winding of gamma_v(-1, inf), with the boundary arc's turning taken exactly.
inline double branch_intrinsic_winding(const WiredDomainGraph& w, const ExtendedBranch& b) {
  const Domain& d = w.domain();
  double h = d.arc_turning(b.s) + detail::checked_turn(d.tangent(b.s), b.pts[1] - b.pts[0]);
  for (std::size_t i = 1; i + 1 < b.pts.size(); ++i) h += detail::checked_turn(b.pts[i] - b.pts[i - 1], b.pts[i + 1] - b.pts[i]);
  return h;
}

/// h(v) = W_i(gamma_v(-1, inf)) for every interior vertex, computed outward from the root in O(n).
inline std::vector<double> winding_field(const SpanningTree& t, const WiredDomainGraph& w) {
  const int n = w.num_interior();
  const Domain& d = w.domain();
  std::vector<std::vector<int>> children(n + 1);
  for (int v = 0; v < n; ++v) children[t.parent(w, v)].push_back(v);
  std::vector<double> h(n, 0.0);
  std::vector<Point> last_dir(n);
  std::vector<int> stack;
  for (int v : children[n]) stack.push_back(v);
  std::size_t visited = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++visited;
    const WiredEdge& e = w.edge(t.parent_edge[v]);
    const auto& pl = e.polyline;  // v ... parent; traversed backwards
    double acc;
    Point dir_in;
    if (e.dst == w.root()) {
      const double s = w.aux()[e.aux].s;
      acc = d.arc_turning(s);
      dir_in = d.tangent(s);
    } else {
      acc = h[e.dst];
      dir_in = last_dir[e.dst];
    }
    for (std::size_t k = pl.size() - 1; k-- > 0;) {
      const Point dir = pl[k] - pl[k + 1];
      acc += detail::checked_turn(dir_in, dir);
      dir_in = dir;
    }
    h[v] = acc;
    last_dir[v] = dir_in;
    for (int c : children[v]) stack.push_back(c);
  }
  if (visited != static_cast<std::size_t>(n)) throw InvalidArgument("tree does not span the wired graph");
  return h;
}

/// Arg(-tau(x)) term of the regularised field; zero when the boundary is not smooth at x.
inline double marked_tangent_term(const Domain& d) {
  return d.smooth_at_marked() ? std::arg(-d.initial_tangent()) : 0.0;
}

/// Field value for the whole branch from the topological side: W(gamma_v(-1, inf), v) - Arg(-tau) + arg_{x-D}(x-v).
/// For a smooth marked point this equals the intrinsic winding up to a multiple of 2pi fixed by the branch of Arg.
inline double untruncated_topological_value(const WiredDomainGraph& w, const ExtendedBranch& b) {
  const Domain& d = w.domain();
  const Point v = b.pts.back();
  double wv = d.boundary_winding_about(v, b.s);
  for (std::size_t i = 0; i + 2 < b.pts.size(); ++i) wv += arg_increment(b.pts[i], b.pts[i + 1], v);
  return wv - marked_tangent_term(d) + d.arg_from_marked(v);
}

}  // namespace wgff
