#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <unordered_map>
#include <vector>

#include "wgff/error.hpp"
#include "wgff/geometry.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/walk.hpp"
#include "wgff/winding.hpp"

namespace wgff {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

/// Combinatorial map of an embedded undirected graph. Half-edge 2e goes a->b, 2e+1 goes b->a.
struct PlanarMap {
  struct UEdge {
    int a = 0, b = 0;
    std::vector<Point> polyline;  // a ... b
  };
  int num_vertices = 0;
  std::vector<UEdge> edges;
  std::vector<std::vector<int>> rotation;  // half-edges leaving each vertex, anticlockwise
  std::vector<int> rot_pos;                // position of a half-edge in its origin's rotation
  std::vector<int> face_of;                // face to the left of each half-edge
  std::vector<std::vector<int>> faces;     // half-edge cycles

  int origin(int h) const { return h % 2 ? edges[h / 2].b : edges[h / 2].a; }
  int target(int h) const { return h % 2 ? edges[h / 2].a : edges[h / 2].b; }
  static int twin(int h) { return h ^ 1; }

  Point leaving_direction(int h) const {
    const auto& pl = edges[h / 2].polyline;
    return h % 2 ? pl[pl.size() - 2] - pl.back() : pl[1] - pl[0];
  }

  /// `custom` gives, for vertices that need it, an explicit anticlockwise order of their half-edges.
  void build(const std::map<int, std::vector<int>>& custom = {}) {
    rotation.assign(num_vertices, {});
    for (int h = 0; h < 2 * static_cast<int>(edges.size()); ++h) rotation[origin(h)].push_back(h);
    for (int v = 0; v < num_vertices; ++v) {
      if (auto it = custom.find(v); it != custom.end()) {
        rotation[v] = it->second;
        continue;
      }
      auto& r = rotation[v];
      std::stable_sort(r.begin(), r.end(), [&](int x, int y) {
        return std::arg(leaving_direction(x)) < std::arg(leaving_direction(y));
      });
    }
    rot_pos.assign(2 * edges.size(), -1);
    for (int v = 0; v < num_vertices; ++v)
      for (std::size_t i = 0; i < rotation[v].size(); ++i) rot_pos[rotation[v][i]] = static_cast<int>(i);
    face_of.assign(2 * edges.size(), -1);
    faces.clear();
    for (int h0 = 0; h0 < 2 * static_cast<int>(edges.size()); ++h0) {
      if (face_of[h0] >= 0) continue;
      std::vector<int> cyc;
      int h = h0;
      do {
        face_of[h] = static_cast<int>(faces.size());
        cyc.push_back(h);
        h = next(h);
      } while (h != h0);
      faces.push_back(std::move(cyc));
    }
  }

  /// Next half-edge along the face to the left of h.
  int next(int h) const {
    const int t = twin(h);
    const auto& r = rotation[origin(t)];
    const int i = rot_pos[t];
    return r[(i + static_cast<int>(r.size()) - 1) % r.size()];
  }
};

}  // namespace detail

/// Bipartite dimer graph. Black vertices carry colour 0, white colour 1; edges run black -> white.
struct DimerGraph {
  enum class Kind { primal, face, midpoint, plain };
  struct DEdge {
    int black = 0, white = 0;
    double weight = 1.0;
  };

  std::vector<Point> pos;
  std::vector<int> color;
  std::vector<Kind> kind;
  std::vector<int> ref;  // primal vertex, face or undirected edge index, by kind
  std::vector<DEdge> edges;
  std::vector<std::vector<int>> incident;

  std::size_t num_vertices() const { return pos.size(); }

  int add_vertex(Point p, int c, Kind k, int r) {
    pos.push_back(p);
    color.push_back(c);
    kind.push_back(k);
    ref.push_back(r);
    incident.emplace_back();
    return static_cast<int>(pos.size()) - 1;
  }
  int add_edge(int b, int w, double weight) {
    edges.push_back({b, w, weight});
    const int e = static_cast<int>(edges.size()) - 1;
    incident[b].push_back(e);
    incident[w].push_back(e);
    return e;
  }
  int other(int e, int v) const { return edges[e].black == v ? edges[e].white : edges[e].black; }
};

/// Superposition of a wired graph with its dual. The wired root (the removed boundary vertex) and the
/// face containing the marked point are left out.
struct TemperleyGraph {
  DimerGraph dg;
  detail::PlanarMap map;           // undirected wired graph, root included
  std::vector<int> uedge_of;       // wired edge index -> undirected edge
  std::vector<std::array<int, 2>> directed;  // undirected edge -> wired edge a->b, b->a (or -1)
  std::vector<int> primal_vertex;  // interior vertex -> dimer vertex
  std::vector<int> face_vertex;    // face -> dimer vertex, -1 for the removed face
  std::vector<int> mid_vertex;     // undirected edge -> dimer vertex
  int removed_face = -1;
  int root = 0;
};

inline TemperleyGraph temperley_superpose(const WiredDomainGraph& w, int removed_vertex = -1) {
  TemperleyGraph T;
  const int n = w.num_interior();
  if (removed_vertex < 0) removed_vertex = n;
  if (removed_vertex != n) throw InvalidArgument("removed vertex must be the wired boundary vertex");
  T.root = n;
  auto& M = T.map;
  M.num_vertices = n + 1;
  T.uedge_of.assign(w.num_edges(), -1);
  std::map<std::pair<int, int>, std::vector<int>> open;  // (src, dst) interior edges waiting for their reverse
  for (int v = 0; v < n; ++v)
    for (std::size_t k = w.edge_begin(v); k < w.edge_end(v); ++k) {
      const WiredEdge& e = w.edge(k);
      if (e.dst == n) {
        T.uedge_of[k] = static_cast<int>(M.edges.size());
        M.edges.push_back({v, n, e.polyline});
        T.directed.push_back({static_cast<int>(k), -1});
        continue;
      }
      auto& waiting = open[{e.dst, v}];
      if (!waiting.empty()) {
        const int u = waiting.back();
        waiting.pop_back();
        T.uedge_of[k] = u;
        T.directed[u][1] = static_cast<int>(k);
        continue;
      }
      T.uedge_of[k] = static_cast<int>(M.edges.size());
      M.edges.push_back({v, e.dst, e.polyline});
      T.directed.push_back({static_cast<int>(k), -1});
      open[{v, e.dst}].push_back(T.uedge_of[k]);
    }
  // Around the root, anticlockwise on the sphere means clockwise along the boundary.
  std::vector<int> at_root;
  for (int h = 0; h < 2 * static_cast<int>(M.edges.size()); ++h)
    if (M.origin(h) == n) at_root.push_back(h);
  auto s_of = [&](int h) { return w.aux()[w.edge(T.directed[h / 2][0]).aux].s; };
  std::stable_sort(at_root.begin(), at_root.end(), [&](int x, int y) { return s_of(x) > s_of(y); });
  M.build({{n, at_root}});
  // Removed face: bounded by the last and first boundary crossings, so it contains x.
  T.removed_face = M.face_of[at_root.back()];

  DimerGraph& dg = T.dg;
  T.primal_vertex.resize(n);
  for (int v = 0; v < n; ++v) T.primal_vertex[v] = dg.add_vertex(w.pos(v), 0, DimerGraph::Kind::primal, v);
  T.face_vertex.assign(M.faces.size(), -1);
  for (std::size_t f = 0; f < M.faces.size(); ++f) {
    if (static_cast<int>(f) == T.removed_face) continue;
    Point c{0, 0};
    int cnt = 0;
    for (int h : M.faces[f]) {
      const auto& pl = M.edges[h / 2].polyline;
      c += h % 2 ? pl.back() : pl.front();
      ++cnt;
    }
    T.face_vertex[f] = dg.add_vertex(c / double(cnt), 0, DimerGraph::Kind::face, static_cast<int>(f));
  }
  T.mid_vertex.resize(M.edges.size());
  for (std::size_t e = 0; e < M.edges.size(); ++e) {
    const auto& pl = M.edges[e].polyline;
    T.mid_vertex[e] = dg.add_vertex(0.5 * (pl.front() + pl.back()), 1, DimerGraph::Kind::midpoint, static_cast<int>(e));
  }
  if (dg.num_vertices() % 2) throw InvalidArgument("superposition has an odd number of vertices");
  for (std::size_t e = 0; e < M.edges.size(); ++e) {
    const int mid = T.mid_vertex[e];
    for (int side = 0; side < 2; ++side) {
      const int k = T.directed[e][side];
      const int src = side ? M.edges[e].b : M.edges[e].a;
      if (k >= 0 && src != n && w.edge(k).weight > 0) dg.add_edge(T.primal_vertex[src], mid, w.edge(k).weight);
    }
    const int f0 = M.face_of[2 * e], f1 = M.face_of[2 * e + 1];
    if (f0 == f1) continue;  // bridge: always in the tree
    for (int f : {f0, f1})
      if (T.face_vertex[f] >= 0) dg.add_edge(T.face_vertex[f], mid, 1.0);
  }
  return T;
}

/// Perfect matching on a dimer graph: mate edge per vertex.
struct DimerConfiguration {
  std::vector<int> edges;  // matched dimer edges
  std::vector<int> mate;   // per vertex, the matched edge

  bool operator==(const DimerConfiguration& o) const { return mate == o.mate; }
};

inline DimerConfiguration make_configuration(const DimerGraph& dg, std::vector<int> edges) {
  DimerConfiguration c;
  c.mate.assign(dg.num_vertices(), -1);
  for (int e : edges) {
    require(e >= 0 && e < static_cast<int>(dg.edges.size()), "edge index out of range");
    for (int v : {dg.edges[e].black, dg.edges[e].white}) {
      if (c.mate[v] >= 0) throw InvalidArgument("vertex covered twice");
      c.mate[v] = e;
    }
  }
  for (int m : c.mate)
    if (m < 0) throw InvalidArgument("vertex not covered");
  std::sort(edges.begin(), edges.end());
  c.edges = std::move(edges);
  return c;
}

inline double configuration_weight(const DimerGraph& dg, const DimerConfiguration& c) {
  double p = 1;
  for (int e : c.edges) p *= dg.edges[e].weight;
  return p;
}

namespace detail {

inline int find_dimer_edge(const DimerGraph& dg, int a, int b) {
  for (int e : dg.incident[a])
    if (dg.other(e, a) == b) return e;
  throw InvalidArgument("tree does not match the dimer graph");
}

}  // namespace detail

/// Each interior vertex is matched to the midpoint of its parent edge; each kept face to the midpoint of
/// the edge leading towards the removed face in the dual tree.
inline DimerConfiguration tree_to_dimer(const SpanningTree& t, const WiredDomainGraph& w, const TemperleyGraph& T) {
  const int n = w.num_interior();
  require(static_cast<int>(T.primal_vertex.size()) == n && is_spanning_tree(t, w), "tree does not match the dimer graph");
  const auto& M = T.map;
  std::vector<char> in_tree(M.edges.size(), 0);
  std::vector<int> out;
  for (int v = 0; v < n; ++v) {
    const int u = T.uedge_of[t.parent_edge[v]];
    in_tree[u] = 1;
    out.push_back(detail::find_dimer_edge(T.dg, T.primal_vertex[v], T.mid_vertex[u]));
  }
  // dual tree: breadth-first from the removed face across non-tree edges
  std::vector<char> seen(M.faces.size(), 0);
  std::vector<int> queue{T.removed_face};
  seen[T.removed_face] = 1;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (int h : M.faces[queue[q]]) {
      if (in_tree[h / 2]) continue;
      const int g = M.face_of[M.twin(h)];
      if (seen[g]) continue;
      seen[g] = 1;
      queue.push_back(g);
      out.push_back(detail::find_dimer_edge(T.dg, T.face_vertex[g], T.mid_vertex[h / 2]));
    }
  }
  return make_configuration(T.dg, std::move(out));
}

inline SpanningTree dimer_to_tree(const DimerConfiguration& c, const WiredDomainGraph& w, const TemperleyGraph& T) {
  const int n = w.num_interior();
  require(c.mate.size() == T.dg.num_vertices(), "configuration does not belong to this dimer graph");
  SpanningTree t;
  t.parent_edge.resize(n);
  for (int v = 0; v < n; ++v) {
    const int mid = T.dg.other(c.mate[T.primal_vertex[v]], T.primal_vertex[v]);
    const int u = T.dg.ref[mid];
    const int side = T.map.edges[u].a == v ? 0 : 1;
    const int k = T.directed[u][side];
    if (k < 0) throw InvalidArgument("matched edge has no wired edge in that direction");
    t.parent_edge[v] = static_cast<std::size_t>(k);
  }
  if (!is_spanning_tree(t, w)) throw InvalidArgument("matching does not correspond to a spanning tree");
  return t;
}

inline DimerConfiguration sample_dimer(const WiredDomainGraph& w, const TemperleyGraph& T, Rng& rng) {
  return tree_to_dimer(wilson_ust(w, rng), w, T);
}

/// Height per interior vertex, in full turns: the winding of the branch of the associated tree divided by
/// 2pi, minus its value at the anchor vertex.
struct HeightField {
  std::vector<double> values;
  int anchor = -1;  // vertex set to 0, or -1 when the boundary fixes the constant
};

inline int default_height_anchor(const WiredDomainGraph& w) { return w.nearest_vertex(w.domain().marked_point()); }

/// Height of a Temperleyan configuration at the primal vertices: winding of the associated tree branch over
/// 2 pi, with the additive constant fixed by the boundary, or by h(anchor) = 0 when an anchor is given.
inline HeightField dimer_height(const DimerConfiguration& c, const WiredDomainGraph& w, const TemperleyGraph& T, int anchor = -1) {
  require(anchor < w.num_interior(), "anchor out of range");
  const auto h = winding_field(dimer_to_tree(c, w, T), w);
  HeightField out;
  out.anchor = anchor;
  out.values.resize(h.size());
  const double base = anchor < 0 ? 0.0 : h[anchor];
  for (std::size_t v = 0; v < h.size(); ++v) out.values[v] = (h[v] - base) / two_pi;
  return out;
}

/// Honeycomb graph as a dimer graph, with its hexagonal faces.
struct HexDimerGraph {
  DimerGraph dg;
  detail::PlanarMap map;
  int outer_face = -1;
  std::vector<int> dimer_edge_of;  // undirected edge -> dimer edge
  std::vector<Point> face_center;
};

inline HexDimerGraph hex_dimer_graph(const PlanarGraph& g) {
  require(g.color.size() == g.num_vertices(), "host graph has no bipartition labels");
  HexDimerGraph H;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    H.dg.add_vertex(g.pos[v], g.color[v], DimerGraph::Kind::plain, static_cast<int>(v));
  H.map.num_vertices = static_cast<int>(g.num_vertices());
  for (const Edge& e : g.edges) {
    if (e.src > e.dst) continue;
    if (g.color[e.src] == g.color[e.dst]) throw InvalidArgument("host graph is not bipartite");
    const int b = g.color[e.src] == 0 ? e.src : e.dst, wv = b == e.src ? e.dst : e.src;
    H.dimer_edge_of.push_back(H.dg.add_edge(b, wv, e.weight));
    H.map.edges.push_back({e.src, e.dst, e.polyline});
  }
  H.map.build();
  double most_negative = 0;
  for (std::size_t f = 0; f < H.map.faces.size(); ++f) {
    std::vector<Point> poly;
    for (int h : H.map.faces[f]) poly.push_back(H.map.edges[h / 2].polyline[h % 2 ? 1 : 0]);
    const double a = polygon_signed_area(poly);
    Point c{0, 0};
    for (Point p : poly) c += p;
    H.face_center.push_back(c / double(poly.size()));
    if (a < most_negative) most_negative = a, H.outer_face = static_cast<int>(f);
  }
  for (std::size_t f = 0; f < H.map.faces.size(); ++f)
    if (static_cast<int>(f) != H.outer_face && H.map.faces[f].size() != 6) throw InvalidArgument("host graph is not a honeycomb");
  return H;
}

/// Lozenge height on the hexagonal faces: crossing an edge from right to left of its black-to-white
/// direction adds 1, or -2 when the edge carries a dimer. One elementary flip moves one face by 3.
inline std::vector<int> lozenge_height(const DimerConfiguration& c, const HexDimerGraph& H, int anchor_face) {
  const auto& M = H.map;
  require(anchor_face >= 0 && anchor_face < static_cast<int>(M.faces.size()) && anchor_face != H.outer_face, "anchor must be an inner face");
  const int unset = std::numeric_limits<int>::min();
  std::vector<int> h(M.faces.size(), unset);
  h[anchor_face] = 0;
  std::vector<int> queue{anchor_face};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int f = queue[q];
    for (int he : M.faces[f]) {
      const int g = M.face_of[M.twin(he)];
      if (g == H.outer_face || g == f) continue;
      const int e = H.dimer_edge_of[he / 2];
      const bool black_first = H.dg.color[M.origin(he)] == 0;  // f lies left of he
      const int inc = 1 - 3 * (c.mate[H.dg.edges[e].black] == e);
      const int val = h[f] + (black_first ? -inc : inc);
      if (h[g] == unset) {
        h[g] = val;
        queue.push_back(g);
      } else if (h[g] != val) {
        throw InvalidArgument("configuration is not a perfect matching of the honeycomb");
      }
    }
  }
  return h;
}

/// Number of perfect matchings by recursive search with memoisation on the covered set.
inline std::uint64_t count_matchings_brute(const DimerGraph& dg, std::size_t cap = 128) {
  const std::size_t n = dg.num_vertices();
  if (n > cap) throw InvalidArgument("graph exceeds the brute-force size cap");
  if (n == 0) return 1;
  if (n % 2) return 0;
  // process vertices in a sweep order so the frontier of the memo key stays small
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dg.pos[a].real() != dg.pos[b].real() ? dg.pos[a].real() < dg.pos[b].real() : dg.pos[a].imag() < dg.pos[b].imag();
  });
  std::vector<int> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<int>(i);
  using Mask = std::array<std::uint64_t, 2>;
  struct Hash {
    std::size_t operator()(const Mask& m) const { return std::hash<std::uint64_t>()(m[0] * 0x9e3779b97f4a7c15ULL ^ m[1]); }
  };
  std::unordered_map<Mask, std::uint64_t, Hash> memo;
  auto test = [](const Mask& m, int i) { return (m[i / 64] >> (i % 64)) & 1; };
  auto set = [](Mask m, int i) {
    m[i / 64] |= 1ULL << (i % 64);
    return m;
  };
  std::function<std::uint64_t(const Mask&, int)> rec = [&](const Mask& m, int from) -> std::uint64_t {
    int i = from;
    while (i < static_cast<int>(n) && test(m, i)) ++i;
    if (i == static_cast<int>(n)) return 1;
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    const int v = order[i];
    for (int e : dg.incident[v]) {
      const int j = rank[dg.other(e, v)];
      if (test(m, j)) continue;
      total += rec(set(set(m, i), j), i + 1);
    }
    memo[m] = total;
    return total;
  };
  return rec(Mask{0, 0}, 0);
}

/// Weighted count of wired spanning trees oriented towards the root: det of the reduced out-degree
/// Laplacian. Exact (fraction-free elimination on integers) when all weights are integers.
struct TreeCount {
  double weighted = 0;
  std::optional<BigInt> exact;
};

inline TreeCount count_trees_kirchhoff(const WiredDomainGraph& w, int cap = 400) {
  const int n = w.num_interior();
  if (n > cap) throw InvalidArgument("graph exceeds the dense determinant size cap");
  bool integral = true;
  for (std::size_t k = 0; k < w.num_edges(); ++k) integral = integral && std::floor(w.edge(k).weight) == w.edge(k).weight;
  TreeCount out;
  if (integral) {
    std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n, 0));
    for (int v = 0; v < n; ++v)
      for (std::size_t k = w.edge_begin(v); k < w.edge_end(v); ++k) {
        const auto wt = static_cast<long long>(w.edge(k).weight);
        a[v][v] += wt;
        if (w.edge(k).dst != n) a[v][w.edge(k).dst] -= wt;
      }
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n; ++k) {
      if (a[k][k] == 0) {
        int p = k + 1;
        while (p < n && a[p][k] == 0) ++p;
        if (p == n) {
          out.exact = BigInt(0);
          out.weighted = 0;
          return out;
        }
        std::swap(a[k], a[p]);
        sign = -sign;
      }
      for (int i = k + 1; i < n; ++i) {
        for (int j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        a[i][k] = 0;
      }
      prev = a[k][k];
    }
    out.exact = sign * a[n - 1][n - 1];
    out.weighted = out.exact->convert_to<double>();
    return out;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v)
    for (std::size_t k = w.edge_begin(v); k < w.edge_end(v); ++k) {
      a(v, v) += w.edge(k).weight;
      if (w.edge(k).dst != n) a(v, w.edge(k).dst) -= w.edge(k).weight;
    }
  const double det = a.partialPivLu().determinant();
  out.weighted = det;
  return out;
}

}  // namespace wgff
