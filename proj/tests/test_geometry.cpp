#include <gtest/gtest.h>

#include "wgff/domain.hpp"
#include "wgff/geometry.hpp"

using namespace wgff;

TEST(Geometry, TurningAngleSigns) {
  EXPECT_NEAR(turning_angle({1, 0}, {0, 1}), pi / 2, 1e-15);
  EXPECT_NEAR(turning_angle({1, 0}, {0, -1}), -pi / 2, 1e-15);
  EXPECT_NEAR(turning_angle({1, 0}, {1, 0}), 0.0, 1e-15);
}

TEST(Geometry, WrapAngle) {
  EXPECT_NEAR(wrap_angle(-0.5, 0.0), two_pi - 0.5, 1e-14);
  EXPECT_NEAR(wrap_angle(7.0, 0.0), 7.0 - two_pi, 1e-14);
  EXPECT_NEAR(wrap_angle(1.0, -pi), 1.0, 1e-15);
}

TEST(Geometry, SegmentHitAndCross) {
  auto s = segment_hit({0, 0}, {2, 0}, {1, -1}, {1, 1});
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 0.5, 1e-15);
  EXPECT_FALSE(segment_hit({0, 0}, {2, 0}, {3, -1}, {3, 1}));
  EXPECT_TRUE(segments_cross({0, 0}, {2, 0}, {1, -1}, {1, 1}));
  EXPECT_FALSE(segments_cross({0, 0}, {1, 0}, {1, 0}, {1, 1}));  // shared endpoint
  EXPECT_TRUE(segments_cross({0, 0}, {2, 0}, {1, 0}, {3, 0}));   // collinear overlap
}

TEST(Geometry, PolygonAreaAndInside) {
  std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(polygon_signed_area(sq), 1.0);
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({1.5, 0.5}, sq));
  auto half = clip_halfplane(sq, {0.5, 0}, {0.5, 1});  // keep x <= 0.5
  EXPECT_NEAR(polygon_signed_area(half), 0.5, 1e-15);
}

TEST(Domain, DiscBasics) {
  const auto d = Domain::disc({0, 0}, 1.0);
  EXPECT_TRUE(d.contains({0.5, 0.5}));
  EXPECT_FALSE(d.contains({1, 0}));
  EXPECT_NEAR(std::abs(d.initial_tangent() - Point{0, 1}), 0.0, 1e-15);
  EXPECT_NEAR(d.arc_coordinate({-1, 0}), pi, 1e-14);
  EXPECT_NEAR(std::abs(d.boundary_point(pi / 2) - Point{0, 1}), 0.0, 1e-14);
  EXPECT_NEAR(d.arc_turning(pi), pi, 1e-14);
  auto s = d.first_exit({0, 0}, {2, 0});
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 0.5, 1e-14);
  EXPECT_FALSE(d.first_exit({0, 0}, {0.3, 0}));
}

TEST(Domain, DiscArgFromMarkedMatchesPrincipalBranch) {
  const auto d = Domain::disc({0, 0}, 1.0);
  for (Point z : {Point{0, 0}, Point{0, 0.9}, Point{0.3, -0.8}, Point{-0.99, 0.05}})
    EXPECT_NEAR(d.arg_from_marked(z), std::arg(Point{1, 0} - z), 1e-13);
}

TEST(Domain, DiscBoundaryWinding) {
  const auto d = Domain::disc({0, 0}, 1.0);
  EXPECT_NEAR(d.boundary_winding_about({0, 0}, pi), pi, 1e-13);
  EXPECT_NEAR(d.boundary_winding_about({0, 0}, 1.5 * pi), 1.5 * pi, 1e-13);
  EXPECT_EQ(d.boundary_winding_about({0, 0}, 0.0), 0.0);
}

TEST(Domain, RectangleArcAndCorners) {
  const auto r = Domain::rectangle({0, 0}, {2, 1});
  EXPECT_NEAR(std::abs(r.marked_point() - Point{1, 0}), 0.0, 1e-15);
  EXPECT_TRUE(r.smooth_at_marked());
  EXPECT_NEAR(r.perimeter(), 6.0, 1e-15);
  EXPECT_NEAR(r.arc_coordinate({2, 0.5}), 1.5, 1e-14);
  EXPECT_NEAR(r.arc_turning(0.5), 0.0, 1e-15);
  EXPECT_NEAR(r.arc_turning(1.0), 0.0, 1e-15);  // corner reached, incoming tangent
  EXPECT_NEAR(r.arc_turning(1.5), pi / 2, 1e-15);
  EXPECT_NEAR(r.arc_turning(5.5), 2 * pi, 1e-14);
  EXPECT_NEAR(std::abs(r.tangent(1.0) - Point{1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.tangent(1.5) - Point{0, 1}), 0.0, 1e-15);
  // arg_{x-D} at the centre: x - z points straight down.
  EXPECT_NEAR(r.arg_from_marked({1, 0.5}), -pi / 2, 1e-14);
  EXPECT_NEAR(r.boundary_winding_about({1, 0.5}, 3.0), pi, 1e-13);
}

TEST(Domain, MarkedCornerIsRough) {
  const auto r = Domain::rectangle({0, 0}, {1, 1}, Point{0, 0});
  EXPECT_FALSE(r.smooth_at_marked());
  EXPECT_NEAR(std::abs(r.initial_tangent() - Point{1, 0}), 0.0, 1e-15);
}

TEST(Domain, PolygonValidation) {
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {0.5, 0}), InvalidArgument);  // bow tie
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {0, 1}}, {0.7, 0.7}), InvalidArgument);
  EXPECT_THROW(Domain::disc({0, 0}, -1), InvalidArgument);
}

TEST(Domain, ClockwiseInputIsReoriented) {
  const auto p = Domain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {0.5, 0});
  EXPECT_GT(p.area(), 0);
  EXPECT_NEAR(std::abs(p.initial_tangent() - Point{1, 0}), 0.0, 1e-15);
}

TEST(Domain, NonConvexArgContinuation) {
  // U-shaped domain; x on the bottom edge. Points in both arms are reached by continuation.
  std::vector<Point> u{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  const auto d = Domain::polygon(u, {1.5, 0});
  EXPECT_FALSE(d.convex());
  for (Point z : {Point{0.5, 2.5}, Point{2.5, 2.5}, Point{1.5, 0.5}}) {
    const double a = d.arg_from_marked(z);
    EXPECT_NEAR(std::remainder(a - std::arg(d.marked_point() - z), two_pi), 0.0, 1e-12);
    EXPECT_GT(a, -pi);
    EXPECT_LT(a, 0.0);
  }
}
