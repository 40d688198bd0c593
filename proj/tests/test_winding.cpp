#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgff/winding.hpp"

using oracle::random_simple_polyline;

using namespace wgff;


TEST(TopologicalWinding, QuarterCircle) {
  Polyline p;
  for (int i = 0; i <= 90; ++i) p.pts.push_back(std::polar(1.0, pi / 2 * i / 90));
  EXPECT_NEAR(topological_winding(p, 0.0), pi / 2, 1e-3);
}

TEST(TopologicalWinding, ClosedSquareAroundCentre) {
  Polyline p{{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
  EXPECT_NEAR(topological_winding(p, {0.5, 0.5}), two_pi, 1e-15);
}

TEST(TopologicalWinding, FarPointBounded) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto p = random_simple_polyline(rng, 30);
    EXPECT_LT(std::abs(topological_winding(p, {100, -40})), pi);
  }
}

TEST(TopologicalWinding, PointOnPolylineRejected) {
  Polyline p{{{0, 0}, {1, 0}}};
  EXPECT_THROW(topological_winding(p, {0.5, 0}), InvalidArgument);
}

TEST(TopologicalWinding, AdditiveOverConcatenation) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    auto p = random_simple_polyline(rng, 40);
    Polyline a{{p.pts.begin(), p.pts.begin() + 20}}, b{{p.pts.begin() + 19, p.pts.end()}};
    const Point q{0.01, -0.02};
    EXPECT_NEAR(topological_winding(concatenate(a, b), q), topological_winding(a, q) + topological_winding(b, q), 1e-12);
  }
}

TEST(IntrinsicWinding, Basics) {
  EXPECT_EQ(intrinsic_winding(Polyline{{{0, 0}, {1, 0}, {2, 0}}}), 0.0);
  EXPECT_NEAR(intrinsic_winding(Polyline{{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}}), 1.5 * pi, 1e-15);
  Polyline stair;
  Point p{0, 0};
  stair.pts.push_back(p);
  for (int k = 0; k < 10; ++k) stair.pts.push_back(p += Point{1, 0}), stair.pts.push_back(p += Point{0, 1});
  stair.pts.push_back(p += Point{1, 0});  // 10 left and 10 right turns
  EXPECT_NEAR(intrinsic_winding(stair), 0.0, 1e-15);
  EXPECT_THROW(intrinsic_winding(Polyline{{{0, 0}, {1, 0}, {0.5, 0}}}), InvalidArgument);
  EXPECT_THROW(intrinsic_winding(Polyline{{{0, 0}}}), InvalidArgument);
}

TEST(IntrinsicWinding, EqualsSumOfEndpointWindings) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    auto p = random_simple_polyline(rng, 2 + static_cast<int>(rng.below(40)));
    ASSERT_TRUE(is_simple(p));
    if (i % 2) p.initial_direction = std::polar(1.0, std::arg(p.pts[1] - p.pts[0]) + (rng.uniform() - 0.5) * 2.0);
    EXPECT_NEAR(intrinsic_winding(p), winding_about_end(p) + winding_about_start(p), 1e-9);
  }
}

class BranchFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    auto g = gen_square_lattice(1.0 / 16, {{-1, -1}, {1, 1}});
    w = clip_and_wire(g, Domain::disc({0, 0}, 1.0));
  }
  WiredDomainGraph w;
};

TEST_F(BranchFixture, FieldMatchesPolylineIntrinsicWinding) {
  Rng rng(4);
  auto t = wilson_ust(w, rng);
  auto h = winding_field(t, w);
  for (int v = 0; v < w.num_interior(); v += 5) {
    auto b = extended_branch(t, w, v);
    EXPECT_NEAR(h[v], branch_intrinsic_winding(w, b), 1e-9);
    auto poly = branch_with_boundary(w, b, 1e-3);
    EXPECT_NEAR(h[v], intrinsic_winding(poly), 1e-9);
    EXPECT_NEAR(h[v], winding_about_end(poly) + winding_about_start(poly), 1e-9);
    EXPECT_TRUE(std::isfinite(h[v]));
  }
}

TEST_F(BranchFixture, TopologicalValueAgreesForSmoothMarkedPoint) {
  Rng rng(5);
  auto t = wilson_ust(w, rng);
  auto h = winding_field(t, w);
  for (int v = 0; v < w.num_interior(); v += 3)
    EXPECT_NEAR(untruncated_topological_value(w, extended_branch(t, w, v)), h[v], 1e-9);
}

TEST_F(BranchFixture, ConcatenationLength) {
  Rng rng(6);
  auto t = wilson_ust(w, rng);
  const int v = w.nearest_vertex({0.3, 0.2});
  auto b = extended_branch(t, w, v);
  auto poly = branch_with_boundary(w, b, 1e-4);
  Polyline branch_only{b.pts};
  // arc part: sampled chords approach the arc length s
  EXPECT_NEAR(poly.length(), b.s + branch_only.length(), 1e-6);
}

TEST(BranchWithBoundary, HalfCircleArc) {
  // One vertex at the centre of a disc of radius 0.5 with an edge exiting opposite x.
  PlanarGraph g;
  g.pos = {{0, 0}, {-1, 0}};
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 0, 1.0);
  g.finalize();
  auto w = clip_and_wire(g, Domain::disc({0, 0}, 0.5));
  SpanningTree t{{0}};
  auto b = extended_branch(t, w, 0);
  EXPECT_NEAR(b.s, pi * 0.5, 1e-12);
  EXPECT_NEAR(w.domain().arc_turning(b.s), pi, 1e-12);
  // arc turns by pi, then a left turn of pi/2 into the radial segment
  EXPECT_NEAR(winding_field(t, w)[0], 1.5 * pi, 1e-12);
}

TEST(BranchWithBoundary, ExitAtMarkedPointHasEmptyArc) {
  PlanarGraph g;
  g.pos = {{0, 0}, {1, 0}};
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 0, 1.0);
  g.finalize();
  auto w = clip_and_wire(g, Domain::rectangle({-1, -1}, {1, 1}, Point{1, 0}));
  SpanningTree t{{0}};
  auto b = extended_branch(t, w, 0);
  EXPECT_EQ(b.s, 0.0);
  auto poly = branch_with_boundary(w, b);
  EXPECT_EQ(poly.pts.size(), 2u);
  // initial tangent (0,1), then a left turn into the inward segment (-1,0)
  EXPECT_NEAR(winding_field(t, w)[0], pi / 2, 1e-15);
}

TEST(BranchWithBoundary, FlatBoundaryStraightEdge) {
  // x on the bottom edge and the single edge exits straight down through x: the arc is empty, the edge
  // is straight, and the only contribution is the junction turn from the tangent into the inward normal.
  PlanarGraph g;
  g.pos = {{0, 0}, {0, -1}};
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 0, 1.0);
  g.finalize();
  auto w = clip_and_wire(g, Domain::rectangle({-1, -0.5}, {1, 1}, Point{0, -0.5}));
  SpanningTree t{{0}};
  EXPECT_NEAR(winding_field(t, w)[0], pi / 2, 1e-15);
  EXPECT_NEAR(untruncated_topological_value(w, extended_branch(t, w, 0)), pi / 2, 1e-12);
}
