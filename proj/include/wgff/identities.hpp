#pragma once

#include <algorithm>
#include <cmath>

#include "wgff/conformal.hpp"
#include "wgff/rng.hpp"
#include "wgff/winding.hpp"

namespace wgff {

/// Random simple polyline: a persistent random walk with random step lengths, rejected until simple.
inline Polyline random_simple_polyline(Rng& rng, int segments, double step = 0.1) {
  for (;;) {
    Polyline p;
    Point z = std::polar(0.5 * rng.uniform(), two_pi * rng.uniform());
    double heading = two_pi * rng.uniform();
    p.pts.push_back(z);
    for (int i = 0; i < segments; ++i) {
      heading += (rng.uniform() - 0.5) * 2.0;
      z += std::polar(step * (0.2 + rng.uniform()), heading);
      p.pts.push_back(z);
    }
    if (is_simple(p)) return p;
  }
}

/// Simple curve from 1 into the unit disc: radius strictly decreasing, angle a small random walk.
inline Polyline random_radial_curve(Rng& rng, int segments, double r_end) {
  Polyline p;
  double theta = 0;
  for (int k = 0; k <= segments; ++k) {
    const double r = 1 - (1 - r_end) * k / segments;
    p.pts.push_back(std::polar(r, theta));
    theta += 0.15 * (2 * rng.uniform() - 1);
  }
  return p;
}

struct IdentitySuite {
  std::size_t cases = 0;
  double max_residual = 0;
};

/// W_i(gamma) = W(gamma, gamma(0)) + W(gamma, gamma(1)) on fuzzed simple polylines.
inline IdentitySuite intrinsic_identity_suite(std::size_t n, std::uint64_t seed) {
  IdentitySuite s;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    auto p = random_simple_polyline(rng, 2 + static_cast<int>(rng.below(40)));
    if (i % 2) p.initial_direction = std::polar(1.0, std::arg(p.pts[1] - p.pts[0]) + (rng.uniform() - 0.5) * 2.0);
    s.max_residual = std::max(s.max_residual, std::abs(intrinsic_winding(p) - winding_about_end(p) - winding_about_start(p)));
    ++s.cases;
  }
  return s;
}

/// Change of winding under a disc automorphism fixing 1, on fuzzed (curve, map) pairs.
inline IdentitySuite change_of_coords_suite(std::size_t n, std::uint64_t seed) {
  IdentitySuite s;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto p = random_radial_curve(rng, 20 + static_cast<int>(rng.below(180)), 0.05 + 0.5 * rng.uniform());
    const MobiusMap m(std::polar(0.8 * std::sqrt(rng.uniform()), two_pi * rng.uniform()));
    s.max_residual = std::max(s.max_residual, std::abs(check_change_of_coords(p, m)));
    ++s.cases;
  }
  return s;
}

/// Relative error of the closed-form Mobius derivative against central differences.
inline IdentitySuite mobius_derivative_suite(std::size_t n, std::uint64_t seed) {
  IdentitySuite s;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    const MobiusMap m(std::polar(0.9 * std::sqrt(rng.uniform()), two_pi * rng.uniform()));
    const Point t = std::polar(0.9 * std::sqrt(rng.uniform()), two_pi * rng.uniform());
    const double h = 1e-5;
    const Point fd = (m(t + h) - m(t - h) - (m(t + 2 * h) - m(t - 2 * h)) / 8.0) / (1.5 * h);
    s.max_residual = std::max(s.max_residual, std::abs(fd - m.derivative(t)) / std::abs(m.derivative(t)));
    ++s.cases;
  }
  return s;
}

}  // namespace wgff
