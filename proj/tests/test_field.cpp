#include <gtest/gtest.h>

#include "wgff/field.hpp"

using namespace wgff;

namespace {

class DiscFixture : public ::testing::Test {
 protected:
  void SetUp() override { w = clip_and_wire(gen_square_lattice(1.0 / 16, {{-1, -1}, {1, 1}}), Domain::disc(0, 1)); }
  WiredDomainGraph w;
};

CapacityOptions small_opt(std::size_t n = 100) {
  CapacityOptions o;
  o.n_paths = n;
  return o;
}

}  // namespace

TEST_F(DiscFixture, InfiniteLevelGivesWindingField) {
  Rng rng(1);
  const auto t = wilson_ust(w, rng);
  const auto h = winding_field(t, w);
  const auto f = truncated_field(t, w, {1e9}, 2, small_opt(20), {0, 17, 100, 200, w.nearest_vertex(0)});
  for (std::size_t i = 0; i < f.vertices.size(); ++i) {
    EXPECT_TRUE(f.values[i][0].beyond_branch);
    EXPECT_NEAR(f.values[i][0].value, h[f.vertices[i]], 1e-6);
  }
}

TEST_F(DiscFixture, LevelZeroKeepsOnlyBoundaryTerms) {
  Rng rng(3);
  const auto t = wilson_ust(w, rng);
  const int v = w.nearest_vertex({0.1, 0.2});
  const auto b = extended_branch(t, w, v);
  const auto cap = capacity_along_branch(w.domain(), b.pts, 4, small_opt(), w.delta());
  const auto tv = truncated_value(w, b, cap, 0.0);
  const Domain& d = w.domain();
  const double expect = d.boundary_winding_about(b.pts.back(), b.s) + d.arg_from_marked(b.pts.back()) - marked_tangent_term(d);
  EXPECT_FALSE(tv.beyond_branch);
  EXPECT_NEAR(tv.value, expect, 1e-12);
}

TEST_F(DiscFixture, MonotoneConsistency) {
  Rng rng(5);
  const auto t = wilson_ust(w, rng);
  for (int v : {w.nearest_vertex(0), w.nearest_vertex({-0.4, 0.3})}) {
    const auto b = extended_branch(t, w, v);
    const auto cap = capacity_along_branch(w.domain(), b.pts, 6, small_opt(), w.delta());
    const auto arc = detail::arclengths(b.pts);
    for (double t1 : {0.2, 0.5, 1.0}) {
      const double t2 = t1 + 0.7;
      const auto a = truncated_value(w, b, cap, t1), c = truncated_value(w, b, cap, t2);
      if (a.beyond_branch || c.beyond_branch) continue;
      // independent: walk the branch points between the two cut lengths
      const double l1 = *detail::cut_length(cap, arc, t1), l2 = *detail::cut_length(cap, arc, t2);
      auto at = [&](double l) {
        std::size_t i = 0;
        while (arc[i + 1] < l) ++i;
        return b.pts[i] + (b.pts[i + 1] - b.pts[i]) * ((l - arc[i]) / (arc[i + 1] - arc[i]));
      };
      std::vector<Point> sub{at(l1)};
      for (std::size_t i = 0; i < b.pts.size(); ++i)
        if (arc[i] > l1 && arc[i] < l2) sub.push_back(b.pts[i]);
      sub.push_back(at(l2));
      double wsub = 0;
      for (std::size_t i = 0; i + 1 < sub.size(); ++i) wsub += arg_increment(sub[i], sub[i + 1], b.pts.back());
      EXPECT_NEAR(c.value - a.value, wsub, 1e-12);
    }
  }
}

TEST_F(DiscFixture, NegativeLevelRejected) {
  Rng rng(7);
  const auto t = wilson_ust(w, rng);
  const auto b = extended_branch(t, w, 0);
  const auto cap = capacity_along_branch(w.domain(), b.pts, 4, small_opt(20), w.delta());
  EXPECT_THROW(truncated_value(w, b, cap, -1), InvalidArgument);
}

TEST_F(DiscFixture, CentreMeanNearBoundaryValue) {
  // E h_t(0) = 3pi/2 for every t in the limit; coarse lattice and moderate sample size here.
  const int v = w.nearest_vertex(0);
  Moments m;
  for (int i = 0; i < 300; ++i) {
    Rng rng(derive_seed(8, i));
    const auto walk = run_walk(w, v, [&](int u) { return u == w.root(); }, rng);
    const auto b = extended_branch(w, loop_erase(walk));
    m.add(truncated_values(w, b, {1.0}, derive_seed(9, i), small_opt(50))[0].value);
  }
  EXPECT_NEAR(m.mean(), 3 * pi / 2, 4 * m.se() + 0.1);
}

TEST(MCorrection, SymmetricLatticeNearZero) {
  const auto g = gen_square_lattice(1.0 / 8, {{-2.5, -2.5}, {2.5, 2.5}});
  const auto m = estimate_m_correction(g, 0, 300, 2, 11, small_opt(60));
  EXPECT_LT(std::abs(m.value), 3 * m.se + 1e-12);
  EXPECT_GT(m.se, 0);
  EXPECT_LT(m.short_branches, 300u);
}

TEST(MCorrection, Deterministic) {
  const auto g = gen_square_lattice(1.0 / 4, {{-2.5, -2.5}, {2.5, 2.5}});
  const auto a = estimate_m_correction(g, 0, 20, 2, 12, small_opt(30));
  const auto b = estimate_m_correction(g, 0, 20, 2, 12, small_opt(30));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.se, b.se);
}

TEST(MCorrection, BoxTooSmall) {
  const auto g = gen_square_lattice(1.0 / 4, {{-2.5, -2.5}, {2.5, 2.5}});
  EXPECT_THROW(estimate_m_correction(g, 0, 10, 1.0, 1), InvalidArgument);
  EXPECT_THROW(estimate_m_correction(g, 0, 10, 3.0, 1), InvalidArgument);
}
