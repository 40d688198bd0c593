#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "wgff/dimer.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/walk.hpp"
#include "wgff/winding.hpp"

namespace oracle {

/// All wired spanning trees by brute force over parent choices, with their weights.
inline std::map<std::vector<std::size_t>, double> enumerate_trees(const wgff::WiredDomainGraph& w) {
  const int n = w.num_interior();
  std::map<std::vector<std::size_t>, double> out;
  std::vector<std::size_t> choice(n);
  for (int v = 0; v < n; ++v) choice[v] = w.edge_begin(v);
  for (;;) {
    wgff::SpanningTree t{choice};
    if (wgff::is_spanning_tree(t, w)) {
      double weight = 1;
      for (int v = 0; v < n; ++v) weight *= w.edge(choice[v]).weight;
      out[choice] = weight;
    }
    int v = 0;
    while (v < n && ++choice[v] == w.edge_end(v)) choice[v] = w.edge_begin(v), ++v;
    if (v == n) break;
  }
  return out;
}

/// Expected exit time E_v[tau] for the walk on g stopped on the set `stop`, by a dense linear solve.
inline Eigen::VectorXd expected_exit_time(const wgff::PlanarGraph& g, const std::vector<char>& stop) {
  const int n = static_cast<int>(g.num_vertices());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n; ++v) {
    if (stop[v]) continue;
    double tot = 0;
    for (std::size_t k = g.out_begin[v]; k < g.out_begin[v + 1]; ++k) tot += g.edges[k].weight;
    for (std::size_t k = g.out_begin[v]; k < g.out_begin[v + 1]; ++k) a(v, g.edges[k].dst) -= g.edges[k].weight / tot;
    b(v) = 1;
  }
  return a.partialPivLu().solve(b);
}

/// Random simple polyline: a persistent random walk with random step lengths, rejected until simple.
inline wgff::Polyline random_simple_polyline(wgff::Rng& rng, int segments, double step = 0.1) {
  for (;;) {
    wgff::Polyline p;
    wgff::Point z = std::polar(0.5 * rng.uniform(), wgff::two_pi * rng.uniform());
    double heading = wgff::two_pi * rng.uniform();
    p.pts.push_back(z);
    for (int i = 0; i < segments; ++i) {
      heading += (rng.uniform() - 0.5) * 2.0;
      z += std::polar(step * (0.2 + rng.uniform()), heading);
      p.pts.push_back(z);
    }
    if (wgff::is_simple(p)) return p;
  }
}

/// All perfect matchings of a small dimer graph, as sorted edge lists.
inline std::vector<std::vector<int>> enumerate_matchings(const wgff::DimerGraph& dg) {
  std::vector<std::vector<int>> out;
  std::vector<char> used(dg.num_vertices(), 0);
  std::vector<int> cur;
  std::function<void()> rec = [&] {
    int v = 0;
    while (v < static_cast<int>(dg.num_vertices()) && used[v]) ++v;
    if (v == static_cast<int>(dg.num_vertices())) {
      auto m = cur;
      std::sort(m.begin(), m.end());
      out.push_back(m);
      return;
    }
    for (int e : dg.incident[v]) {
      const int u = dg.other(e, v);
      if (used[u]) continue;
      used[u] = used[v] = 1;
      cur.push_back(e);
      rec();
      cur.pop_back();
      used[u] = used[v] = 0;
    }
  };
  rec();
  return out;
}

}  // namespace oracle
