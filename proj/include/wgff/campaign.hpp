#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "wgff/field.hpp"
#include "wgff/voronoi.hpp"
#include "wgff/walk.hpp"
#include "wgff/winding.hpp"

namespace wgff {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(i) for i in [0, n) on `workers` threads; results must be written by index.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < workers; ++k)
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Sample i uses the tree drawn from derive_seed(seed, i), so results do not depend on the worker count.
inline SpanningTree tree_sample(const WiredDomainGraph& w, std::uint64_t seed, std::size_t i) {
  Rng rng(derive_seed(seed, i));
  return wilson_ust(w, rng);
}

/// Untruncated field at the given vertices, one row per tree.
inline std::vector<std::vector<double>> point_samples(const WiredDomainGraph& w, const std::vector<int>& vertices, std::size_t n,
                                                      std::uint64_t seed, unsigned workers = 1) {
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto t = tree_sample(w, seed, i);
    for (int v : vertices) rows[i].push_back(untruncated_topological_value(w, extended_branch(t, w, v)));
  });
  return rows;
}

/// Truncated field at one vertex for each level, one row per tree.
inline std::vector<std::vector<double>> truncated_point_samples(const WiredDomainGraph& w, int v, const std::vector<double>& ts,
                                                                std::size_t n, std::uint64_t seed, const CapacityOptions& opt,
                                                                unsigned workers = 1, std::vector<std::size_t>* beyond = nullptr) {
  std::vector<std::vector<double>> rows(n);
  std::vector<std::vector<char>> past(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto t = tree_sample(w, seed, i);
    for (const auto& tv : truncated_values(w, extended_branch(t, w, v), ts, derive_seed(seed ^ 0x9e3779b97f4a7c15ULL, i), opt)) {
      rows[i].push_back(tv.value);
      past[i].push_back(tv.beyond_branch);
    }
  });
  if (beyond) {
    beyond->assign(ts.size(), 0);
    for (const auto& p : past)
      for (std::size_t k = 0; k < p.size(); ++k) (*beyond)[k] += p[k];
  }
  return rows;
}

/// Pairings (h - offset, f_k) of the winding field with test functions given by cell integrals, one row per tree.
inline std::vector<std::vector<double>> pairing_samples(const WiredDomainGraph& w, const std::vector<std::vector<double>>& cells,
                                                        std::size_t n, std::uint64_t seed, double offset = 0, unsigned workers = 1) {
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, workers, [&](std::size_t i) {
    auto h = winding_field(tree_sample(w, seed, i), w);
    for (double& x : h) x -= offset;
    for (const auto& c : cells) rows[i].push_back(pair_with_test_function(h, c));
  });
  return rows;
}

inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(k));
  return out;
}

}  // namespace wgff
