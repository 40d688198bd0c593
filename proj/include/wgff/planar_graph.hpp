#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "wgff/domain.hpp"
#include "wgff/error.hpp"
#include "wgff/geometry.hpp"
#include "wgff/rng.hpp"

namespace wgff {

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
  std::vector<Point> polyline;  // includes both endpoints
};

/// Embedded weighted directed planar graph. Edges are stored grouped by source after finalize().
struct PlanarGraph {
  std::vector<Point> pos;
  std::vector<Edge> edges;
  double delta = 1.0;
  std::vector<int> color;  // bipartition label per vertex when known (honeycomb), else empty
  std::vector<std::size_t> out_begin;

  std::size_t num_vertices() const { return pos.size(); }
  std::size_t num_edges() const { return edges.size(); }

  void add_edge(int u, int v, double w) { edges.push_back({u, v, w, {pos[u], pos[v]}}); }

  void finalize() {
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.src < b.src; });
    out_begin.assign(pos.size() + 1, 0);
    for (const Edge& e : edges) ++out_begin[e.src + 1];
    std::partial_sum(out_begin.begin(), out_begin.end(), out_begin.begin());
  }

  std::size_t out_degree(int v) const { return out_begin[v + 1] - out_begin[v]; }
};

namespace detail {

inline std::int64_t lattice_key(std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffffLL); }

inline std::pair<std::int64_t, std::int64_t> index_range(double lo, double hi, double delta) {
  const double eps = 1e-9;
  return {static_cast<std::int64_t>(std::ceil(lo / delta - eps)), static_cast<std::int64_t>(std::floor(hi / delta + eps))};
}

template <class WeightFn>
PlanarGraph square_lattice(double delta, const Box& box, WeightFn weight) {
  require(delta > 0, "delta must be positive");
  PlanarGraph g;
  g.delta = delta;
  const auto [i0, i1] = index_range(box.lo.real(), box.hi.real(), delta);
  const auto [j0, j1] = index_range(box.lo.imag(), box.hi.imag(), delta);
  if (i1 < i0 || j1 < j0) {
    g.finalize();
    return g;
  }
  const std::int64_t nx = i1 - i0 + 1, ny = j1 - j0 + 1;
  auto id = [&](std::int64_t i, std::int64_t j) { return static_cast<int>((j - j0) * nx + (i - i0)); };
  for (std::int64_t j = j0; j <= j1; ++j)
    for (std::int64_t i = i0; i <= i1; ++i) g.pos.emplace_back(i * delta, j * delta);
  static constexpr int di[4] = {1, 0, -1, 0}, dj[4] = {0, 1, 0, -1};
  for (std::int64_t j = j0; j <= j1; ++j)
    for (std::int64_t i = i0; i <= i1; ++i)
      for (int k = 0; k < 4; ++k) {
        const std::int64_t a = i + di[k], b = j + dj[k];
        if (a < i0 || a > i1 || b < j0 || b > j1) continue;
        g.add_edge(id(i, j), id(a, b), weight(i, j, k));
      }
  (void)ny;
  g.finalize();
  return g;
}

}  // namespace detail

/// Unit-weight square lattice delta*Z^2 restricted to a closed box.
inline PlanarGraph gen_square_lattice(double delta, const Box& box) {
  return detail::square_lattice(delta, box, [](std::int64_t, std::int64_t, int) { return 1.0; });
}

/// p_vert for lattice site (i, j): uniform on [eps, 1 - eps], a function of (seed, i, j) only.
inline double environment_p(std::uint64_t seed, std::int64_t i, std::int64_t j, double epsilon) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(detail::lattice_key(i, j))));
  return epsilon + (1 - 2 * epsilon) * rng.uniform();
}

/// Square lattice in a random environment: vertical weight p/2, horizontal weight (1-p)/2.
inline PlanarGraph gen_random_environment(double delta, const Box& box, double epsilon, std::uint64_t seed) {
  require(epsilon > 0 && epsilon <= 0.5, "epsilon must lie in (0, 1/2]");
  return detail::square_lattice(delta, box, [&](std::int64_t i, std::int64_t j, int k) {
    const double p = environment_p(seed, i, j, epsilon);
    return (k % 2 == 1) ? p / 2 : (1 - p) / 2;
  });
}

/// Honeycomb with unit edge length delta; one sublattice (color 0) at delta*((0,1) + i(sqrt3,0) + j(sqrt3/2,3/2)),
/// the other (color 1) shifted by (0,1)*delta. Keeps vertices accepted by `inside`.
inline PlanarGraph gen_hex_lattice(double delta, const Box& bbox, const std::function<bool(Point)>& inside) {
  require(delta > 0, "delta must be positive");
  PlanarGraph g;
  g.delta = delta;
  const double s3 = std::sqrt(3.0);
  const Point e1{s3 * delta, 0}, e2{s3 / 2 * delta, 1.5 * delta}, a0{0, delta}, shift{0, delta};
  const std::int64_t jmax = static_cast<std::int64_t>(std::ceil((std::abs(bbox.lo.imag()) + std::abs(bbox.hi.imag())) / (1.5 * delta))) + 2;
  const std::int64_t imax =
      static_cast<std::int64_t>(std::ceil((std::abs(bbox.lo.real()) + std::abs(bbox.hi.real())) / (s3 * delta))) + jmax + 2;
  std::unordered_map<std::int64_t, int> ids;  // key over (i, j, color)
  auto key = [](std::int64_t i, std::int64_t j, int c) { return detail::lattice_key(2 * i + c, j); };
  for (std::int64_t j = -jmax; j <= jmax; ++j)
    for (std::int64_t i = -imax; i <= imax; ++i)
      for (int c = 0; c < 2; ++c) {
        const Point p = a0 + double(i) * e1 + double(j) * e2 + (c ? shift : Point{0, 0});
        if (!bbox.contains(p) || !inside(p)) continue;
        ids[key(i, j, c)] = static_cast<int>(g.pos.size());
        g.pos.push_back(p);
        g.color.push_back(c);
      }
  // Neighbours of a color-0 site (i,j): color-1 sites (i,j) above, (i,j-1) lower left, (i+1,j-1) lower right.
  const std::pair<int, int> nb[3] = {{0, 0}, {0, -1}, {1, -1}};
  for (std::int64_t j = -jmax; j <= jmax; ++j)
    for (std::int64_t i = -imax; i <= imax; ++i) {
      auto a = ids.find(key(i, j, 0));
      if (a == ids.end()) continue;
      for (auto [di, dj] : nb) {
        auto b = ids.find(key(i + di, j + dj, 1));
        if (b == ids.end()) continue;
        g.add_edge(a->second, b->second, 1.0);
        g.add_edge(b->second, a->second, 1.0);
      }
    }
  g.finalize();
  return g;
}

inline PlanarGraph gen_hex_lattice(double delta, const Domain& region) {
  return gen_hex_lattice(delta, region.bounding_box(), [&](Point p) { return region.contains(p); });
}

inline PlanarGraph gen_hex_lattice(double delta, const Box& box) {
  return gen_hex_lattice(delta, box, [](Point) { return true; });
}

struct GraphDiagnostics {
  bool positive_weights = true;
  bool planar = true;
  bool no_dead_ends = true;
  bool irreducible = true;
  double max_edge_winding = 0;
  int max_unit_square_count = 0;
};

/// Checks the structural assumptions: positive weights, non-crossing edges, bounded edge winding,
/// bounded density (max vertices in a unit square of the rescaled graph), no dead ends, irreducibility.
inline GraphDiagnostics diagnose(const PlanarGraph& g) {
  GraphDiagnostics d;
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<int>> out(n), in(n);
  for (const Edge& e : g.edges) {
    if (!(e.weight > 0)) d.positive_weights = false;
    out[e.src].push_back(e.dst);
    in[e.dst].push_back(e.src);
    double w = 0;
    for (std::size_t k = 1; k + 1 < e.polyline.size(); ++k)
      w += turning_angle(e.polyline[k] - e.polyline[k - 1], e.polyline[k + 1] - e.polyline[k]);
    d.max_edge_winding = std::max(d.max_edge_winding, std::abs(w));
  }
  for (std::size_t v = 0; v < n; ++v)
    if (out[v].empty() && n > 1) d.no_dead_ends = false;

  // Segments bucketed on a grid of cell size delta.
  const double h = g.delta;
  std::unordered_map<std::int64_t, std::vector<std::pair<Point, Point>>> cells;
  std::unordered_map<std::int64_t, int> density;
  auto cell_of = [h](Point p) {
    return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor(p.real() / h)),
                                                 static_cast<std::int64_t>(std::floor(p.imag() / h))};
  };
  for (Point p : g.pos) {
    auto [i, j] = cell_of(p);
    d.max_unit_square_count = std::max(d.max_unit_square_count, ++density[detail::lattice_key(i, j)]);
  }
  for (const Edge& e : g.edges) {
    if (e.src > e.dst) {
      bool has_reverse = false;
      for (std::size_t k = g.out_begin.empty() ? 0 : g.out_begin[e.dst]; !g.out_begin.empty() && k < g.out_begin[e.dst + 1]; ++k)
        if (g.edges[k].dst == e.src && g.edges[k].polyline.size() == e.polyline.size() &&
            std::equal(e.polyline.begin(), e.polyline.end(), g.edges[k].polyline.rbegin()))
          has_reverse = true;
      if (has_reverse) continue;  // reverse copy of an embedded undirected edge
    }
    for (std::size_t k = 0; k + 1 < e.polyline.size(); ++k) {
      const Point a = e.polyline[k], b = e.polyline[k + 1];
      auto [i0, j0] = cell_of({std::min(a.real(), b.real()), std::min(a.imag(), b.imag())});
      auto [i1, j1] = cell_of({std::max(a.real(), b.real()), std::max(a.imag(), b.imag())});
      for (auto i = i0; i <= i1; ++i)
        for (auto j = j0; j <= j1; ++j) {
          auto& bucket = cells[detail::lattice_key(i, j)];
          for (auto& [c, dd] : bucket)
            if (segments_cross(a, b, c, dd)) d.planar = false;
          bucket.emplace_back(a, b);
        }
    }
  }

  // Irreducibility: strongly connected (forward and backward reachability from vertex 0).
  auto reach = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    if (n == 0) return seen;
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) seen[v] = 1, stack.push_back(v);
    }
    return seen;
  };
  const auto f = reach(out), b = reach(in);
  for (std::size_t v = 0; v < n; ++v)
    if (!f[v] || !b[v]) d.irreducible = false;
  return d;
}

/// Throws InvalidArgument unless the graph meets the structural assumptions with the given constants.
inline void validate(const PlanarGraph& g, int density_bound = 64, double winding_bound = 2 * two_pi) {
  const auto d = diagnose(g);
  require(d.positive_weights, "edge weights must be strictly positive");
  require(d.planar, "embedded edges cross");
  require(d.no_dead_ends, "graph has a vertex without outgoing edges");
  require(d.irreducible, "walk is not irreducible");
  require(d.max_edge_winding <= winding_bound, "edge winding exceeds bound");
  require(d.max_unit_square_count <= density_bound, "vertex density exceeds bound");
}

struct AuxVertex {
  Point pos;
  double s = 0;   // anticlockwise arc coordinate from the marked point
  int from = 0;   // interior vertex whose edge was truncated
};

/// Out-edge of an interior vertex of a wired graph; dst == root() for truncated edges.
struct WiredEdge {
  int dst = 0;
  double weight = 1.0;
  int aux = -1;
  std::vector<Point> polyline;
};

/// Graph clipped to a domain, with every edge leaving the domain cut at its first boundary
/// intersection and redirected to a single root. Interior vertices are numbered 0..n-1, root is n.
class WiredDomainGraph {
 public:
  WiredDomainGraph() = default;

  int num_interior() const { return static_cast<int>(pos_.size()); }
  int root() const { return num_interior(); }
  const Domain& domain() const { return domain_; }
  double delta() const { return delta_; }
  Point pos(int v) const { return v == root() ? domain_.marked_point() : pos_[v]; }
  const std::vector<Point>& positions() const { return pos_; }
  int source_vertex(int v) const { return source_[v]; }
  const std::vector<AuxVertex>& aux() const { return aux_; }

  std::size_t edge_begin(int v) const { return begin_[v]; }
  std::size_t edge_end(int v) const { return begin_[v + 1]; }
  const WiredEdge& edge(std::size_t k) const { return edges_[k]; }
  std::size_t num_edges() const { return edges_.size(); }
  double out_weight(int v) const { return cum_[begin_[v + 1] - 1]; }

  /// Samples the index of an out-edge of v with probability proportional to its weight.
  template <class R>
  std::size_t sample_edge(int v, R& rng) const {
    const std::size_t b = begin_[v], e = begin_[v + 1];
    const double u = rng.uniform() * cum_[e - 1];
    std::size_t k = b;
    while (k + 1 < e && cum_[k] <= u) ++k;
    return k;
  }

  /// Aux vertex indices sorted by arc coordinate along the boundary, starting at x.
  std::vector<int> aux_order() const {
    std::vector<int> idx(aux_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return aux_[a].s < aux_[b].s; });
    return idx;
  }

  /// Interior vertex nearest to p.
  int nearest_vertex(Point p) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int v = 0; v < num_interior(); ++v) {
      const double d = std::norm(pos_[v] - p);
      if (d < bd) bd = d, best = v;
    }
    return best;
  }

  /// Interior index of a source-graph vertex, or -1.
  int interior_index(int source) const {
    auto it = index_of_.find(source);
    return it == index_of_.end() ? -1 : it->second;
  }

  friend WiredDomainGraph clip_and_wire(const PlanarGraph& g, const Domain& domain);

 private:
  Domain domain_;
  double delta_ = 1;
  std::vector<Point> pos_;
  std::vector<int> source_;
  std::unordered_map<int, int> index_of_;
  std::vector<AuxVertex> aux_;
  std::vector<WiredEdge> edges_;
  std::vector<std::size_t> begin_;
  std::vector<double> cum_;
};

inline WiredDomainGraph clip_and_wire(const PlanarGraph& g, const Domain& domain) {
  WiredDomainGraph w;
  w.domain_ = domain;
  w.delta_ = g.delta;
  std::vector<int> idx(g.num_vertices(), -1);
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (domain.contains(g.pos[v])) {
      idx[v] = static_cast<int>(w.pos_.size());
      w.index_of_[static_cast<int>(v)] = idx[v];
      w.pos_.push_back(g.pos[v]);
      w.source_.push_back(static_cast<int>(v));
    }
  if (w.pos_.empty()) throw InvalidArgument("domain contains no graph vertices");
  const int n = w.num_interior();
  std::vector<std::vector<WiredEdge>> out(n);
  for (const Edge& e : g.edges) {
    const int u = idx[e.src];
    if (u < 0) continue;
    WiredEdge we;
    we.weight = e.weight;
    we.polyline.push_back(e.polyline.front());
    bool cut = false;
    for (std::size_t k = 0; k + 1 < e.polyline.size() && !cut; ++k) {
      const Point a = e.polyline[k], b = e.polyline[k + 1];
      auto s = domain.first_exit(a, b);
      const bool last = k + 2 == e.polyline.size();
      if (!s && last && idx[e.dst] < 0) s = 1.0;  // endpoint on or outside the boundary
      if (s) {
        Point hit = a + *s * (b - a);
        hit = domain.nearest_boundary_point(hit);
        we.polyline.push_back(hit);
        we.dst = n;
        we.aux = static_cast<int>(w.aux_.size());
        w.aux_.push_back({hit, domain.arc_coordinate(hit), u});
        cut = true;
      } else {
        we.polyline.push_back(b);
      }
    }
    if (!cut) we.dst = idx[e.dst];
    out[u].push_back(std::move(we));
  }
  if (w.aux_.empty()) throw InvalidArgument("no boundary crossing: root unreachable");
  w.begin_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) {
    require(!out[v].empty(), "interior vertex without outgoing edges");
    w.begin_[v + 1] = w.begin_[v] + out[v].size();
    for (auto& e : out[v]) {
      const double prev = w.cum_.size() > w.begin_[v] ? w.cum_.back() : 0.0;
      w.cum_.push_back(prev + e.weight);
      w.edges_.push_back(std::move(e));
    }
  }
  // Every interior vertex must reach the root.
  std::vector<std::vector<int>> rev(n + 1);
  for (int v = 0; v < n; ++v)
    for (std::size_t k = w.begin_[v]; k < w.begin_[v + 1]; ++k) rev[w.edges_[k].dst].push_back(v);
  std::vector<char> seen(n + 1, 0);
  std::vector<int> stack{n};
  seen[n] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : rev[u])
      if (!seen[v]) seen[v] = 1, stack.push_back(v);
  }
  for (int v = 0; v < n; ++v)
    if (!seen[v]) throw ComputationError("interior vertex cannot reach the root");
  return w;
}

}  // namespace wgff
