#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "wgff/error.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/rng.hpp"

namespace wgff {

/// Vertex sequence of a walk together with the edges it used (edges.size() == vertices.size() - 1).
/// Edge indices refer to the host graph: PlanarGraph::edges or WiredDomainGraph::edge().
struct LatticePath {
  std::vector<int> vertices;
  std::vector<std::size_t> edges;

  int start() const { return vertices.front(); }
  int end() const { return vertices.back(); }
  std::size_t steps() const { return edges.size(); }
};

namespace detail {

inline std::size_t sample_out_edge(const PlanarGraph& g, int v, Rng& rng) {
  const std::size_t b = g.out_begin[v], e = g.out_begin[v + 1];
  if (b == e) throw ComputationError("walk reached a vertex without outgoing edges");
  double total = 0;
  for (std::size_t k = b; k < e; ++k) total += g.edges[k].weight;
  double u = rng.uniform() * total;
  for (std::size_t k = b; k + 1 < e; ++k) {
    u -= g.edges[k].weight;
    if (u < 0) return k;
  }
  return e - 1;
}

}  // namespace detail

/// Discrete-time walk on a planar graph from `start` until `stop(vertex)` holds.
inline LatticePath run_walk(const PlanarGraph& g, int start, const std::function<bool(int)>& stop, Rng& rng,
                            std::size_t max_steps = std::size_t(1) << 40) {
  require(start >= 0 && static_cast<std::size_t>(start) < g.num_vertices(), "start is not a vertex");
  LatticePath p;
  p.vertices.push_back(start);
  int v = start;
  while (!stop(v)) {
    if (p.edges.size() >= max_steps) throw ComputationError("walk step limit exceeded");
    const std::size_t k = detail::sample_out_edge(g, v, rng);
    v = g.edges[k].dst;
    p.edges.push_back(k);
    p.vertices.push_back(v);
  }
  return p;
}

/// Walk on a wired graph; the root has no outgoing edges, so `stop` must hold there.
inline LatticePath run_walk(const WiredDomainGraph& w, int start, const std::function<bool(int)>& stop, Rng& rng,
                            std::size_t max_steps = std::size_t(1) << 40) {
  require(start >= 0 && start <= w.root(), "start is not a vertex");
  LatticePath p;
  p.vertices.push_back(start);
  int v = start;
  while (!stop(v)) {
    if (v == w.root()) throw ComputationError("walk reached the absorbing root without stopping");
    if (p.edges.size() >= max_steps) throw ComputationError("walk step limit exceeded");
    const std::size_t k = w.sample_edge(v, rng);
    v = w.edge(k).dst;
    p.edges.push_back(k);
    p.vertices.push_back(v);
  }
  return p;
}

/// Chronological loop erasure: each cycle is removed at the moment it closes.
inline LatticePath loop_erase(const LatticePath& path) {
  LatticePath out;
  if (path.vertices.empty()) return out;
  std::unordered_map<int, std::size_t> where;
  out.vertices.push_back(path.vertices[0]);
  where[path.vertices[0]] = 0;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const int v = path.vertices[i];
    auto it = where.find(v);
    if (it != where.end()) {
      const std::size_t keep = it->second;
      for (std::size_t j = keep + 1; j < out.vertices.size(); ++j) where.erase(out.vertices[j]);
      out.vertices.resize(keep + 1);
      out.edges.resize(keep);
    } else {
      where[v] = out.vertices.size();
      out.vertices.push_back(v);
      out.edges.push_back(path.edges[i - 1]);
    }
  }
  return out;
}

/// Oriented wired spanning tree: parent_edge[v] is the wired-graph edge index leaving interior vertex v.
struct SpanningTree {
  std::vector<std::size_t> parent_edge;

  int parent(const WiredDomainGraph& w, int v) const { return w.edge(parent_edge[v]).dst; }
  bool operator==(const SpanningTree&) const = default;
};

/// Edge indices of the tree branch from v to the root.
inline std::vector<std::size_t> branch_edges(const SpanningTree& t, const WiredDomainGraph& w, int v) {
  std::vector<std::size_t> out;
  for (int u = v; u != w.root(); u = w.edge(t.parent_edge[u]).dst) {
    out.push_back(t.parent_edge[u]);
    if (out.size() > static_cast<std::size_t>(w.num_interior())) throw ComputationError("parent pointers contain a cycle");
  }
  return out;
}

/// Checks that parent pointers are acyclic and lead every vertex to the root.
inline bool is_spanning_tree(const SpanningTree& t, const WiredDomainGraph& w) {
  const int n = w.num_interior();
  if (static_cast<int>(t.parent_edge.size()) != n) return false;
  std::vector<char> state(n, 0);  // 0 unknown, 1 on stack, 2 reaches root
  for (int v = 0; v < n; ++v) {
    if (t.parent_edge[v] < w.edge_begin(v) || t.parent_edge[v] >= w.edge_end(v)) return false;
  }
  for (int v = 0; v < n; ++v) {
    std::vector<int> stack;
    int u = v;
    while (u != w.root() && state[u] == 0) {
      state[u] = 1;
      stack.push_back(u);
      u = w.edge(t.parent_edge[u]).dst;
    }
    if (u != w.root() && state[u] == 1) return false;
    for (int s : stack) state[s] = 2;
  }
  return true;
}

/// Interior vertices sorted by (y, x).
inline std::vector<int> raster_order(const WiredDomainGraph& w) {
  std::vector<int> order(w.num_interior());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Point pa = w.pos(a), pb = w.pos(b);
    return pa.imag() != pb.imag() ? pa.imag() < pb.imag() : pa.real() < pb.real();
  });
  return order;
}

/// Wilson's algorithm for the wired tree, rooted at the wiring vertex. The law does not depend on `order`.
inline SpanningTree wilson_ust(const WiredDomainGraph& w, const std::vector<int>& order, Rng& rng) {
  const int n = w.num_interior();
  std::vector<char> listed(n, 0);
  for (int v : order) {
    require(v >= 0 && v < n, "order contains a non-interior vertex");
    listed[v] = 1;
  }
  for (int v = 0; v < n; ++v) require(listed[v], "order does not cover all interior vertices");
  std::vector<char> in_tree(n + 1, 0);
  in_tree[n] = 1;
  SpanningTree t;
  t.parent_edge.assign(n, 0);
  for (int start : order) {
    int u = start;
    while (!in_tree[u]) {
      t.parent_edge[u] = w.sample_edge(u, rng);
      u = w.edge(t.parent_edge[u]).dst;
    }
    for (u = start; !in_tree[u]; u = w.edge(t.parent_edge[u]).dst) in_tree[u] = 1;
  }
  return t;
}

inline SpanningTree wilson_ust(const WiredDomainGraph& w, Rng& rng) { return wilson_ust(w, raster_order(w), rng); }

/// Loop-erased walk from v to the root, which has the law of the tree branch from v.
/// Uses last-exit pointers, equivalent to chronological loop erasure.
inline LatticePath sample_branch(const WiredDomainGraph& w, int v, Rng& rng) {
  std::unordered_map<int, std::size_t> next;
  int u = v;
  while (u != w.root()) {
    const std::size_t k = w.sample_edge(u, rng);
    next[u] = k;
    u = w.edge(k).dst;
  }
  LatticePath p;
  p.vertices.push_back(v);
  for (u = v; u != w.root();) {
    const std::size_t k = next[u];
    p.edges.push_back(k);
    u = w.edge(k).dst;
    p.vertices.push_back(u);
  }
  return p;
}

/// Multiscale ordering around v: level j lists, for each cell of the (r/2)6^-j grid, the not yet chosen
/// vertex farthest from v inside B(v, (r/2)(1+2^-j)). Levels stop once B(v, r/2) is exhausted.
struct MultiscaleOrder {
  std::vector<std::vector<int>> levels;

  std::vector<int> flat() const {
    std::vector<int> out;
    for (const auto& l : levels) out.insert(out.end(), l.begin(), l.end());
    return out;
  }
};

inline MultiscaleOrder multiscale_order(const WiredDomainGraph& w, int v, double r, int max_levels = 64) {
  require(v >= 0 && v < w.num_interior(), "v must be an interior vertex");
  require(r > 0, "radius must be positive");
  const Point c = w.pos(v);
  const Domain& d = w.domain();
  require(d.contains(c) && d.distance_to_boundary(c) >= r * (1 - 1e-12), "B(v, r) must lie inside the domain");
  MultiscaleOrder out;
  const int n = w.num_interior();
  std::vector<char> chosen(n, 0);
  std::size_t remaining = 0;
  for (int u = 0; u < n; ++u) remaining += std::abs(w.pos(u) - c) < r / 2;
  for (int j = 0; j < max_levels && remaining > 0; ++j) {
    const double cell = (r / 2) * std::pow(6.0, -j);
    const double radius = (r / 2) * (1 + std::pow(2.0, -j));
    std::unordered_map<std::int64_t, std::pair<int, double>> best;
    for (int u = 0; u < n; ++u) {
      if (chosen[u]) continue;
      const double dist = std::abs(w.pos(u) - c);
      if (dist >= radius) continue;
      const Point q = (w.pos(u) - c) / cell;
      const auto key = detail::lattice_key(static_cast<std::int64_t>(std::floor(q.real())), static_cast<std::int64_t>(std::floor(q.imag())));
      auto it = best.find(key);
      if (it == best.end() || dist > it->second.second || (dist == it->second.second && u < it->second.first))
        best[key] = {u, dist};
    }
    std::vector<std::pair<std::int64_t, int>> level;
    for (auto& [key, val] : best) level.emplace_back(key, val.first);
    std::sort(level.begin(), level.end());
    std::vector<int> ids;
    for (auto& [key, u] : level) {
      chosen[u] = 1;
      ids.push_back(u);
      if (std::abs(w.pos(u) - c) < r / 2) --remaining;
    }
    out.levels.push_back(std::move(ids));
  }
  return out;
}

/// Multiscale ordering followed by the remaining vertices in raster order; a valid Wilson order.
inline std::vector<int> multiscale_wilson_order(const WiredDomainGraph& w, int v, double r) {
  auto order = multiscale_order(w, v, r).flat();
  std::vector<char> seen(w.num_interior(), 0);
  for (int u : order) seen[u] = 1;
  for (int u : raster_order(w))
    if (!seen[u]) order.push_back(u);
  return order;
}

/// Binomial proportion with a Wilson-score confidence interval.
struct ProportionEstimate {
  double p = 0, lo = 0, hi = 0;
  std::size_t successes = 0, trials = 0;
};

inline ProportionEstimate wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  require(trials > 0, "need at least one trial");
  ProportionEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double n = static_cast<double>(trials), p = successes / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  e.p = p;
  e.lo = std::max(0.0, centre - half);
  e.hi = std::min(1.0, centre + half);
  return e;
}

/// Rectangle corner + eta*[0,3]x[0,1] (horizontal) or corner + eta*[0,1]x[0,3] (vertical), with the
/// start ball B1 and target ball B2 of radius eta/4 centred on the axis at eta/2 and 5eta/2.
struct CrossingRect {
  enum class Direction { left_to_right, right_to_left, bottom_to_top, top_to_bottom };
  Point corner{0, 0};
  double eta = 1;
  Direction dir = Direction::left_to_right;

  bool horizontal() const { return dir == Direction::left_to_right || dir == Direction::right_to_left; }
  Box box() const { return {corner, corner + (horizontal() ? Point{3 * eta, eta} : Point{eta, 3 * eta})}; }
  Point ball_centre(bool target) const {
    const bool forward = dir == Direction::left_to_right || dir == Direction::bottom_to_top;
    const double along = (forward != target) ? eta / 2 : 5 * eta / 2;
    return corner + (horizontal() ? Point{along, eta / 2} : Point{eta / 2, along});
  }
};

/// Probability that the walk from the vertex of B1 nearest its centre hits B2 before leaving the open rectangle.
inline ProportionEstimate crossing_probability(const PlanarGraph& g, const CrossingRect& rect, std::size_t n_samples,
                                               std::uint64_t seed) {
  require(n_samples > 0, "n_samples must be positive");
  require(rect.eta > 0, "rectangle size must be positive");
  const Point b1 = rect.ball_centre(false), b2 = rect.ball_centre(true);
  const double rad = rect.eta / 4;
  int start = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const double d = std::abs(g.pos[v] - b1);
    if (d <= rad && d < bd) bd = d, start = static_cast<int>(v);
  }
  if (start < 0) throw InvalidArgument("no vertex inside the start ball");
  const Box box = rect.box();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    int v = start;
    for (;;) {
      if (std::abs(g.pos[v] - b2) <= rad) {
        ++hits;
        break;
      }
      const Point q = g.pos[v];
      if (!(q.real() > box.lo.real() && q.real() < box.hi.real() && q.imag() > box.lo.imag() && q.imag() < box.hi.imag()))
        break;  // vertices on the rectangle's boundary count as exterior
      v = g.edges[detail::sample_out_edge(g, v, rng)].dst;
    }
  }
  return wilson_interval(hits, n_samples);
}

}  // namespace wgff
