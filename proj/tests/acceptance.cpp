// Acceptance suite: `acceptance N` runs criterion N and prints one PASS/FAIL line.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "wgff/campaign.hpp"
#include "wgff/dimer.hpp"
#include "wgff/field_stats.hpp"
#include "wgff/identities.hpp"

using namespace wgff;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? " ok" : " FAILED");
  }
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

WiredDomainGraph grid(int k, int m) {
  return clip_and_wire(gen_square_lattice(1, {{0, 0}, {k + 1.0, m + 1.0}}), Domain::rectangle({0, 0}, {k + 1.0, m + 1.0}));
}

WiredDomainGraph unit_disc(double delta) { return clip_and_wire(gen_square_lattice(delta, {{-1, -1}, {1, 1}}), Domain::disc(0, 1)); }

CapacityOptions capacity_options(std::size_t paths) {
  CapacityOptions o;
  o.n_paths = paths;
  return o;
}

// ---------------------------------------------------------------------------------------------------------------

void criterion1(Outcome& out) {
  Stopwatch sw;
  bool counts = true;
  for (int k = 1; k <= 4; ++k)
    for (int m = 1; m <= 4; ++m) {
      const auto w = grid(k, m);
      const auto T = temperley_superpose(w);
      const auto kirchhoff = count_trees_kirchhoff(w);
      if (!kirchhoff.exact || BigInt(count_matchings_brute(T.dg)) != *kirchhoff.exact) counts = false;
    }
  out.check(counts, "matchings = Kirchhoff on all k x m grids, k,m <= 4");
  bool trips = true;
  for (int k : {3, 4}) {
    const auto w = grid(k, k);
    const auto T = temperley_superpose(w);
    for (std::size_t i = 0; i < 10000; ++i) {
      Rng rng(derive_seed(100 + k, i));
      const auto t = wilson_ust(w, rng);
      const auto c = tree_to_dimer(t, w, T);
      const auto back = dimer_to_tree(c, w, T);
      const auto c2 = tree_to_dimer(back, w, T);
      if (!(back == t) || c2.edges != c.edges) trips = false;
    }
  }
  out.check(trips, "tree/dimer round trips over 1e4 samples on 3x3 and 4x4");
  out.check(sw.seconds() < 60, fmt("runtime %.1fs < 60s", sw.seconds()));
}

void criterion2(Outcome& out) {
  Stopwatch sw;
  constexpr std::size_t n = 100000;
  constexpr double p_min = 0.01;
  for (int k : {2, 3}) {
    const auto w = grid(k, k);
    const auto trees = oracle::enumerate_trees(w);
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (const auto& [key, weight] : trees) index.emplace(key, index.size());
    auto order_b = raster_order(w);
    std::reverse(order_b.begin(), order_b.end());
    std::vector<double> a(trees.size(), 0.0), b(trees.size(), 0.0), probs;
    for (const auto& [key, weight] : trees) probs.push_back(weight);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r1(derive_seed(200 + k, i)), r2(derive_seed(300 + k, i));
      a[index.at(wilson_ust(w, r1).parent_edge)] += 1;
      b[index.at(wilson_ust(w, order_b, r2).parent_edge)] += 1;
    }
    const auto gof = chi_square_gof(a, probs);
    const auto two = chi_square_two_sample(a, b);
    out.check(gof.p_value > p_min, fmt("%dx%d chi2 vs enumeration of %zu trees p=%.3f", k, k, trees.size(), gof.p_value));
    out.check(two.p_value > p_min, fmt("%dx%d raster vs reversed order p=%.3f", k, k, two.p_value));
  }
  out.check(sw.seconds() < 300, fmt("runtime %.1fs < 300s", sw.seconds()));
}

void criterion3(Outcome& out) {
  Stopwatch sw;
  const auto a = intrinsic_identity_suite(10000, 31);
  const auto b = change_of_coords_suite(1000, 32);
  const auto c = mobius_derivative_suite(1000, 33);
  out.check(a.max_residual < 1e-9, fmt("intrinsic = start + end winding, max residual %.2e over %zu", a.max_residual, a.cases));
  out.check(b.max_residual < 1e-6, fmt("Mobius change of winding, max residual %.2e over %zu", b.max_residual, b.cases));
  out.check(c.max_residual < 1e-6, fmt("psi' vs finite differences, max rel. error %.2e over %zu", c.max_residual, c.cases));
  out.check(sw.seconds() < 60, fmt("runtime %.1fs < 60s", sw.seconds()));
}

// E[h(z)] - m in the unit disc: 3 pi / 2 + 2 arg(1 - z).
double one_point_target(Point z) { return 1.5 * pi + 2 * std::arg(1.0 - z); }

struct OnePoint {
  double dev = 0, se = 0;  // summed |mean - target| over the two points and its SE
};

OnePoint one_point(Outcome& out, double delta, std::size_t n, bool record) {
  const auto w = unit_disc(delta);
  const std::vector<Point> zs{0, {0, 0.5}};
  const std::vector<int> vs{w.nearest_vertex(zs[0]), w.nearest_vertex(zs[1])};
  const auto m = estimate_m_correction(gen_square_lattice(delta, {{-2.1, -2.1}, {2.1, 2.1}}), 0, 2000, 2, 41, capacity_options(100));
  const auto rows = point_samples(w, vs, n, 42 + static_cast<std::uint64_t>(1 / delta));
  OnePoint r;
  double var = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    Moments acc;
    for (const auto& row : rows) acc.add(row[k]);
    const double mean = acc.mean() - m.value, se = std::hypot(acc.se(), m.se), target = one_point_target(zs[k]);
    const double tol = std::max(0.2, 3 * se);
    if (record)
      out.check(std::abs(mean - target) <= tol, fmt("delta=1/%.0f z=(%.1f,%.1f): mean h - m = %.4f (m=%.4f+-%.4f) vs %.4f, |diff| %.4f <= %.4f",
                                                    1 / delta, zs[k].real(), zs[k].imag(), mean, m.value, m.se, target,
                                                    std::abs(mean - target), tol));
    r.dev += std::abs(mean - target);
    var += se * se;
  }
  r.se = std::sqrt(var);
  return r;
}

void criterion4(Outcome& out) {
  const auto coarse = one_point(out, 1.0 / 24, 2000, false);
  const auto fine = one_point(out, 1.0 / 48, 2000, true);
  // deviation must not grow beyond two combined standard errors
  out.check(fine.dev <= coarse.dev + 2 * std::hypot(coarse.se, fine.se),
            fmt("trend: summed deviation 1/24 %.4f -> 1/48 %.4f (SE %.4f)", coarse.dev, fine.dev, std::hypot(coarse.se, fine.se)));
}

void criterion5(Outcome& out) {
  const auto w = unit_disc(1.0 / 48);
  const std::vector<double> ts{1, 2, 3, 4};
  std::vector<std::size_t> beyond;
  const auto rows = truncated_point_samples(w, w.nearest_vertex(0), ts, 2000, 51, capacity_options(100), 1, &beyond);
  std::vector<double> var;
  std::ostringstream vs;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto e = variance_jackknife(column(rows, k));
    var.push_back(e.value);
    vs << fmt("%sVar(t=%.0f)=%.3f+-%.3f [%zu beyond branch]", k ? ", " : "", ts[k], e.value, e.se, beyond[k]);
  }
  const double tm = mean_of(ts), vm = mean_of(var);
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) sxy += (ts[k] - tm) * (var[k] - vm), sxx += (ts[k] - tm) * (ts[k] - tm);
  const double slope = sxy / sxx;
  out.check(std::abs(slope - 2) <= 0.3, vs.str() + fmt("; slope %.3f within 2 +- 0.3", slope));
}

struct CovarianceSetup {
  WiredDomainGraph w;
  std::vector<std::vector<double>> cells;  // f, g
  double target = 0;
  GreenCalibration cal;
};

CovarianceSetup covariance_setup(const PlanarGraph& g) {
  CovarianceSetup s;
  s.w = clip_and_wire(g, Domain::disc(0, 1));
  const VoronoiTessellation vor(s.w);
  s.cells = {vor.cell_integrals(radial_bump({-0.27, 0}, 0.25)), vor.cell_integrals(radial_bump({0.27, 0}, 0.25))};
  // calibration and target always come from the unit-weight lattice
  const auto u = unit_disc(1.0 / 48);
  const GreenKernel G(u);
  s.cal = calibrate_green(u, G);
  const VoronoiTessellation uv(u);
  s.target = gff_covariance_target(G, s.cal, uv.cell_integrals(radial_bump({-0.27, 0}, 0.25)), uv.cell_integrals(radial_bump({0.27, 0}, 0.25)));
  return s;
}

constexpr std::size_t n_pairing = 4000;
constexpr std::uint64_t pairing_seed = 61;

void covariance_check(Outcome& out, const PlanarGraph& g, double rel_tol, std::uint64_t seed) {
  const auto s = covariance_setup(g);
  out.check(s.cal.max_relative_residual < 0.05,
            fmt("Green calibration constant %.4f from %zu pairs, residual %.4f < 0.05", s.cal.constant, s.cal.pairs, s.cal.max_relative_residual));
  const auto rows = pairing_samples(s.w, s.cells, n_pairing, seed);
  const auto cov = covariance_jackknife(column(rows, 0), column(rows, 1));
  const double tol = rel_tol * std::abs(s.target) + 3 * cov.se;
  out.check(std::abs(cov.value - s.target) <= tol, fmt("Cov((h,f),(h,g)) = %.5f +- %.5f vs 2 c (f, G g) = %.5f, |diff| %.5f <= %.5f", cov.value,
                                                       cov.se, s.target, std::abs(cov.value - s.target), tol));
}

void criterion6(Outcome& out) { covariance_check(out, gen_square_lattice(1.0 / 48, {{-1, -1}, {1, 1}}), 0.10, pairing_seed); }

void criterion7(Outcome& out) {
  covariance_check(out, gen_random_environment(1.0 / 48, {{-1, -1}, {1, 1}}, 0.25, 71), 0.15, 72);
}

void criterion8(Outcome& out) {
  const auto s = covariance_setup(gen_square_lattice(1.0 / 48, {{-1, -1}, {1, 1}}));
  const auto& w = s.w;
  const auto T = temperley_superpose(w);
  double worst = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto t = tree_sample(w, 81, i);
    const auto h = winding_field(t, w);
    const auto hf = dimer_height(tree_to_dimer(t, w, T), w, T);
    for (int v = 0; v < w.num_interior(); ++v) worst = std::max(worst, std::abs(two_pi * hf.values[v] - h[v]));
  }
  out.check(worst < 1e-9, fmt("2 pi height = branch winding on 200 configurations, max error %.2e", worst));
  std::vector<double> smoothed;
  for (std::size_t i = 0; i < n_pairing; ++i) {
    Rng rng(derive_seed(82, i));
    smoothed.push_back(pair_with_test_function(dimer_height(sample_dimer(w, T, rng), w, T).values, s.cells[0]));
  }
  const auto hv = variance_jackknife(smoothed);
  const auto wv = variance_jackknife(column(pairing_samples(w, s.cells, n_pairing, pairing_seed), 0));
  const double scaled = wv.value / (4 * pi * pi), scaled_se = wv.se / (4 * pi * pi);
  const double tol = 2 * std::hypot(hv.se, scaled_se);
  out.check(std::abs(hv.value - scaled) <= tol, fmt("Var(height, f) = %.3e +- %.1e vs Var(h, f)/(2pi)^2 = %.3e +- %.1e, |diff| %.1e <= %.1e", hv.value,
                                                    hv.se, scaled, scaled_se, std::abs(hv.value - scaled), tol));
}

void criterion9(Outcome& out) {
  const auto s = covariance_setup(gen_square_lattice(1.0 / 48, {{-1, -1}, {1, 1}}));
  const auto x = column(pairing_samples(s.w, s.cells, n_pairing, pairing_seed), 0);
  const auto ad = anderson_darling_normal(x);
  out.check(ad.p_value > 0.01, fmt("Anderson-Darling A2*=%.3f p=%.3f > 0.01", ad.statistic, ad.p_value));
  // m4 - 3 m2^2 from raw moments of the mean-shifted sample
  const double mu = mean_of(x);
  std::vector<std::vector<double>> rows;
  for (double v : x) {
    const double d = v - mu;
    rows.push_back({d, d * d, d * d * d, d * d * d * d});
  }
  const auto excess = jackknife_means(rows, [](const std::vector<double>& m) {
    const double a = m[0];
    const double m2 = m[1] - a * a;
    const double m4 = m[3] - 4 * a * m[2] + 6 * a * a * m[1] - 3 * a * a * a * a;
    return m4 - 3 * m2 * m2;
  });
  std::vector<std::vector<double>> single;
  for (double v : x) single.push_back({v});
  const auto m4 = kpoint_moment(single, {4}), m2 = kpoint_moment(single, {2});
  out.check(std::abs(excess.value) <= 3 * excess.se, fmt("m4 = %.4e vs 3 m2^2 = %.4e: difference %.3e +- %.3e within 3 SE", m4.value,
                                                         3 * m2.value * m2.value, excess.value, excess.se));
}

void criterion10(Outcome& out) {
  std::vector<ProportionEstimate> est;
  for (int k : {16, 32, 64}) {
    const double d = 1.0 / k;
    const auto g = gen_square_lattice(d, {{-0.5, -0.5}, {3.5, 1.5}});
    est.push_back(crossing_probability(g, {{0, 0}, 1.0, CrossingRect::Direction::left_to_right}, 40000, 100 + k));
  }
  bool overlap = true, above = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < est.size(); ++i) {
    os << fmt("%sdelta=1/%d p=%.4f [%.4f, %.4f]", i ? ", " : "", 16 << i, est[i].p, est[i].lo, est[i].hi);
    above = above && est[i].p > 0.01;
    for (std::size_t j = 0; j < i; ++j) overlap = overlap && est[i].lo <= est[j].hi && est[j].lo <= est[i].hi;
  }
  out.check(overlap, "crossing " + os.str() + " 95% intervals overlap");
  out.check(above, "all crossing estimates > 0.01");
  const auto m = estimate_m_correction(gen_square_lattice(1.0 / 32, {{-2.1, -2.1}, {2.1, 2.1}}), 0, 1000, 2, 103, capacity_options(100));
  out.check(std::abs(m.value) <= 3 * m.se, fmt("m(0) on Z^2 = %.4f +- %.4f within 3 SE of 0", m.value, m.se));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <criterion 1-10>\n";
    return 2;
  }
  const int c = std::atoi(argv[1]);
  void (*run[])(Outcome&) = {criterion1, criterion2, criterion3, criterion4, criterion5,
                             criterion6, criterion7, criterion8, criterion9, criterion10};
  if (c < 1 || c > 10) {
    std::cerr << "criterion must be between 1 and 10\n";
    return 2;
  }
  Outcome out;
  Stopwatch sw;
  try {
    run[c - 1](out);
  } catch (const std::exception& e) {
    out.check(false, std::string("exception: ") + e.what());
  }
  std::cout << "criterion " << c << ": " << (out.pass ? "PASS" : "FAIL") << " | " << out.detail.str() << fmt(" [%.1fs]", sw.seconds()) << std::endl;
  return out.pass ? 0 : 1;
}
