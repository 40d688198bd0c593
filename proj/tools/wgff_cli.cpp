// wgff: command-line front end for the winding-field toolkit.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include "wgff/campaign.hpp"
#include "wgff/config.hpp"
#include "wgff/dimer.hpp"
#include "wgff/field_stats.hpp"
#include "wgff/identities.hpp"
#include "wgff/io.hpp"

using namespace wgff;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0, exit_fail = 1, exit_usage = 2;

struct Common {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 1;
  unsigned workers = default_workers();
  // graph
  std::string lattice = "square";
  double delta = 1.0 / 16;
  double epsilon = 0.25;
  std::uint64_t env_seed = 1;
  // domain
  std::string domain = "disc";
  double radius = 1;
  std::vector<double> rect{0, 0, 1, 1};
};

void add_common(CLI::App* app, Common& c, bool graph = true) {
  app->add_option("--config", c.config, "Configuration file (flags override its keys)");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Master seed (default: WINDING_GFF_SEED or 1)");
  app->add_option("--workers", c.workers, "Worker threads; results do not depend on this")->check(CLI::PositiveNumber);
  if (!graph) return;
  app->add_option("--lattice", c.lattice, "square, random or hex")->check(CLI::IsMember({"square", "random", "hex"}));
  app->add_option("--delta", c.delta, "Mesh size")->check(CLI::PositiveNumber);
  app->add_option("--epsilon", c.epsilon, "Random-environment ellipticity")->check(CLI::Range(0.0, 0.5));
  app->add_option("--env-seed", c.env_seed, "Random-environment seed");
  app->add_option("--domain", c.domain, "disc (centred at 0) or rectangle")->check(CLI::IsMember({"disc", "rectangle"}));
  app->add_option("--radius", c.radius, "Disc radius")->check(CLI::PositiveNumber);
  app->add_option("--rect", c.rect, "Rectangle x0 y0 x1 y1")->expected(4);
}

/// Fills options absent from the command line from the config file and the seed environment variable,
/// and returns the canonical text of the effective settings.
std::string resolve(CLI::App* app, const Common& c) {
  std::optional<Config> cfg;
  if (!c.config.empty()) cfg = Config::load(c.config);
  std::string canonical = "command=" + app->get_name() + "\n";
  for (CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() == 0) {
      std::optional<std::string> v = cfg ? cfg->lookup(name) : std::nullopt;
      if (!v && name == "seed")
        if (const char* env = std::getenv("WINDING_GFF_SEED")) v = env;
      if (v) {
        opt->clear();
        std::istringstream ss(*v);
        std::string tok;
        while (ss >> tok) opt->add_result(tok);
        opt->run_callback();
      }
    }
    if (name == "workers" || name == "out") continue;  // do not change results
    std::string value;
    for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    canonical += name + "=" + (opt->count() ? value : opt->get_default_str()) + "\n";
  }
  return canonical;
}

Domain make_domain(const Common& c) {
  if (c.domain == "disc") return Domain::disc(0, c.radius);
  return Domain::rectangle({c.rect[0], c.rect[1]}, {c.rect[2], c.rect[3]});
}

PlanarGraph make_graph(const Common& c, const Domain& d) {
  const Box b = d.bounding_box();
  const Box box{b.lo - Point(2 * c.delta, 2 * c.delta), b.hi + Point(2 * c.delta, 2 * c.delta)};
  if (c.lattice == "random") return gen_random_environment(c.delta, box, c.epsilon, c.env_seed);
  if (c.lattice == "hex") return gen_hex_lattice(c.delta, box);
  return gen_square_lattice(c.delta, box);
}

struct Context {
  Common c;
  std::string canonical;
  Domain domain = Domain::disc(0, 1);
  WiredDomainGraph w;

  void load() {
    domain = make_domain(c);
    w = clip_and_wire(make_graph(c, domain), domain);
    std::cerr << "graph: " << w.num_interior() << " interior vertices\n";
  }
  nlohmann::json meta(nlohmann::json extra = nlohmann::json::object()) const { return sidecar(canonical, c.seed, std::move(extra)); }
  fs::path path(const std::string& name) const { return fs::path(c.out) / name; }
};

std::vector<Point> parse_points(const std::vector<double>& xy) {
  require(xy.size() % 2 == 0, "points are given as x y pairs");
  std::vector<Point> out;
  for (std::size_t i = 0; i < xy.size(); i += 2) out.emplace_back(xy[i], xy[i + 1]);
  return out;
}

std::vector<TestFunction> parse_bumps(const std::vector<double>& v) {
  require(v.size() % 3 == 0, "bumps are given as x y radius triples");
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < v.size(); i += 3) out.push_back(radial_bump({v[i], v[i + 1]}, v[i + 2]));
  return out;
}

CapacityOptions capacity(std::size_t paths, const std::string& method) {
  CapacityOptions o;
  o.n_paths = paths;
  o.method = method == "lattice" ? CapacityMethod::lattice_walk : CapacityMethod::walk_on_spheres;
  return o;
}

void emit_json(const Context& ctx, const std::string& name, const nlohmann::json& j) {
  write_with_sidecar(ctx.path(name), j.dump(2) + "\n", ctx.meta());
  std::cout << j.dump(2) << std::endl;
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(5) << std::setfill('0') << i << ext;
  return os.str();
}

void write_raster(const Context& ctx, const std::string& name, const std::vector<Point>& pos, const std::vector<double>& values, int px) {
  if (px <= 0) return;
  const auto r = rasterize(pos, values, ctx.domain.bounding_box(), px, px, &ctx.domain);
  write_with_sidecar(ctx.path(name), r.pgm, ctx.meta(r.meta));
}

// Statistics named in a report suite.
std::vector<MomentEntry> run_suite(const Context& ctx, const std::vector<std::string>& stats, std::size_t n, const std::vector<TestFunction>& bumps,
                                   double tol_mean, double tol_cov_rel, std::size_t m_samples, std::size_t paths) {
  std::vector<MomentEntry> out;
  const auto& w = ctx.w;
  for (const auto& s : stats) {
    std::cerr << "report: " << s << "\n";
    if (s == "identities") {
      const double r = std::max({intrinsic_identity_suite(1000, ctx.c.seed).max_residual, change_of_coords_suite(100, ctx.c.seed).max_residual,
                                 mobius_derivative_suite(100, ctx.c.seed).max_residual});
      out.push_back({"identity_max_residual", r, 0, 0, "TRIVIAL", 1e-6});
    } else if (s == "one_point") {
      require(ctx.domain.kind() == Domain::Kind::disc, "one_point needs a disc domain");
      const auto m = estimate_m_correction(gen_square_lattice(ctx.c.delta, {{-2.1, -2.1}, {2.1, 2.1}}), 0, m_samples, 2,
                                           derive_seed(ctx.c.seed, 1), capacity(paths, "wos"));
      const auto rows = point_samples(w, {w.nearest_vertex(0)}, n, derive_seed(ctx.c.seed, 2), ctx.c.workers);
      Moments acc;
      for (const auto& r : rows) acc.add(r[0]);
      out.push_back({"mean_h_minus_m_at_0", acc.mean() - m.value, std::hypot(acc.se(), m.se), 1.5 * std::numbers::pi, "PAPER", tol_mean});
    } else if (s == "covariance" || s == "fourth_moment") {
      require(bumps.size() >= (s == "covariance" ? 2u : 1u), s + " needs test functions");
      const VoronoiTessellation vor(w);
      std::vector<std::vector<double>> cells;
      for (const auto& f : bumps) cells.push_back(vor.cell_integrals(f));
      const auto rows = pairing_samples(w, cells, n, derive_seed(ctx.c.seed, 3), 0, ctx.c.workers);
      if (s == "covariance") {
        const auto unit = clip_and_wire(gen_square_lattice(ctx.c.delta, ctx.domain.bounding_box()), ctx.domain);
        const GreenKernel G(unit);
        const auto cal = calibrate_green(unit, G);
        const VoronoiTessellation uv(unit);
        const double target = gff_covariance_target(G, cal, uv.cell_integrals(bumps[0]), uv.cell_integrals(bumps[1]));
        const auto cov = covariance_jackknife(column(rows, 0), column(rows, 1));
        out.push_back({"green_calibration_residual", cal.max_relative_residual, 0, 0, "DERIVED", 0.05});
        out.push_back({"cov_pairing_f0_f1", cov.value, cov.se, target, "DERIVED", tol_cov_rel * std::abs(target)});
      } else {
        std::vector<std::vector<double>> single;
        for (const auto& r : rows) single.push_back({r[0]});
        const auto m4 = kpoint_moment(single, {4}), m2 = kpoint_moment(single, {2});
        out.push_back({"fourth_moment_f0", m4.value, m4.se, 3 * m2.value * m2.value, "DERIVED", tol_cov_rel * 3 * m2.value * m2.value});
      }
    } else {
      throw InvalidArgument("unknown statistic '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Winding field of uniform spanning trees: sampling, fields, dimers and moment checks"};
  app.require_subcommand(1);
  Context ctx;
  Common& c = ctx.c;
  std::function<int()> action;
  auto sub = [&](const std::string& name, const std::string& desc, bool graph = true) {
    auto* s = app.add_subcommand(name, desc);
    s->option_defaults()->always_capture_default();
    add_common(s, c, graph);
    return s;
  };

  std::size_t samples = 10, paths = 100, m_samples = 200, identity_cases = 1000;
  int raster = 0;
  double box_radius = 2, tol_mean = 0.2, tol_cov = 0.1;
  std::vector<double> levels{1, 2, 3, 4}, points{0, 0}, bump_spec{-0.27, 0, 0.25, 0.27, 0, 0.25}, deltas{1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<std::string> stats;
  std::string method = "wos", order = "raster";

  auto* gen = sub("gen-graph", "Generate the clipped lattice and write it as JSON");
  gen->callback([&] {
    action = [&] {
      const auto g = make_graph(c, make_domain(c));
      write_with_sidecar(ctx.path("graph.json"), graph_to_json(g).dump() + "\n", ctx.meta());
      std::cerr << "wrote " << ctx.path("graph.json") << " (" << g.num_vertices() << " vertices)\n";
      return exit_ok;
    };
  });

  auto* ust = sub("sample-ust", "Sample wired uniform spanning trees with Wilson's algorithm");
  ust->add_option("--samples", samples, "Number of trees");
  ust->add_option("--order", order, "raster or multiscale")->check(CLI::IsMember({"raster", "multiscale"}));
  ust->callback([&] {
    action = [&] {
      ctx.load();
      const auto& w = ctx.w;
      std::vector<int> ord = raster_order(w);
      if (order == "multiscale") ord = multiscale_wilson_order(w, w.nearest_vertex(0), 0.5 * ctx.domain.distance_to_boundary(w.pos(w.nearest_vertex(0))));
      std::vector<SpanningTree> trees(samples);
      parallel_for(samples, c.workers, [&](std::size_t i) {
        Rng rng(derive_seed(c.seed, i));
        trees[i] = wilson_ust(w, ord, rng);
      });
      for (std::size_t i = 0; i < samples; ++i) {
        auto meta = tree_metadata(derive_seed(c.seed, i), order, w);
        write_with_sidecar(ctx.path(indexed("tree", i, ".csv")), tree_csv(trees[i], w), ctx.meta(meta));
      }
      return exit_ok;
    };
  });

  auto* wf = sub("winding-field", "Winding field of sampled trees as CSV (and optional PGM)");
  wf->add_option("--samples", samples, "Number of trees");
  wf->add_option("--raster", raster, "Raster width in pixels (0: none)");
  wf->callback([&] {
    action = [&] {
      ctx.load();
      for (std::size_t i = 0; i < samples; ++i) {
        const auto h = winding_field(tree_sample(ctx.w, c.seed, i), ctx.w);
        write_with_sidecar(ctx.path(indexed("field", i, ".csv")), field_csv(ctx.w.positions(), h), ctx.meta({{"sample", i}}));
        write_raster(ctx, indexed("field", i, ".pgm"), ctx.w.positions(), h, raster);
      }
      return exit_ok;
    };
  });

  auto* tf = sub("truncated-field", "Truncated field h_t at chosen points and capacity levels");
  tf->add_option("--samples", samples, "Number of trees");
  tf->add_option("--levels", levels, "Capacity levels t");
  tf->add_option("--points", points, "Evaluation points x y ...");
  tf->add_option("--paths", paths, "Capacity Monte Carlo paths per prefix");
  tf->add_option("--method", method, "Capacity estimator: wos or lattice")->check(CLI::IsMember({"wos", "lattice"}));
  tf->callback([&] {
    action = [&] {
      ctx.load();
      std::vector<int> vs;
      for (Point p : parse_points(points)) vs.push_back(ctx.w.nearest_vertex(p));
      std::vector<TruncatedField> fields(samples);
      parallel_for(samples, c.workers, [&](std::size_t i) {
        fields[i] = truncated_field(tree_sample(ctx.w, c.seed, i), ctx.w, levels, derive_seed(c.seed ^ 0x7f4a7c15ULL, i), capacity(paths, method), vs);
      });
      std::ostringstream os;
      os << "sample,vertex_id,x,y,t,value,beyond_branch\n";
      for (std::size_t i = 0; i < samples; ++i)
        for (std::size_t a = 0; a < vs.size(); ++a)
          for (std::size_t k = 0; k < levels.size(); ++k)
            os << i << ',' << vs[a] << ',' << full_precision(ctx.w.pos(vs[a]).real()) << ',' << full_precision(ctx.w.pos(vs[a]).imag()) << ','
               << levels[k] << ',' << full_precision(fields[i].values[a][k].value) << ',' << fields[i].values[a][k].beyond_branch << '\n';
      write_with_sidecar(ctx.path("truncated.csv"), os.str(), ctx.meta());
      return exit_ok;
    };
  });

  auto* em = sub("estimate-m", "Monte Carlo estimate of the centring constant m at a lattice point");
  em->add_option("--samples", samples, "Number of branches");
  em->add_option("--points", points, "Lattice point x y");
  em->add_option("--box-radius", box_radius, "Radius of the disc standing in for the plane (>= 2)");
  em->add_option("--paths", paths, "Capacity Monte Carlo paths per prefix");
  em->callback([&] {
    action = [&] {
      const auto p = parse_points(points).at(0);
      const double r = box_radius + 2 * c.delta;
      PlanarGraph g = c.lattice == "random" ? gen_random_environment(c.delta, {p - Point(r, r), p + Point(r, r)}, c.epsilon, c.env_seed)
                                            : gen_square_lattice(c.delta, {p - Point(r, r), p + Point(r, r)});
      const auto m = estimate_m_correction(g, p, samples, box_radius, c.seed, capacity(paths, "wos"));
      emit_json(ctx, "m.json", {{"m", m.value}, {"se", m.se}, {"n", m.n}, {"short_branches", m.short_branches}});
      return exit_ok;
    };
  });

  auto* sd = sub("sample-dimer", "Sample Temperleyan dimer configurations");
  sd->add_option("--samples", samples, "Number of configurations");
  sd->callback([&] {
    action = [&] {
      ctx.load();
      const auto T = temperley_superpose(ctx.w);
      for (std::size_t i = 0; i < samples; ++i) {
        Rng rng(derive_seed(c.seed, i));
        write_with_sidecar(ctx.path(indexed("dimers", i, ".csv")), dimer_csv(sample_dimer(ctx.w, T, rng), T.dg), ctx.meta({{"sample", i}}));
      }
      return exit_ok;
    };
  });

  auto* hf = sub("height-field", "Height function of sampled Temperleyan configurations");
  hf->add_option("--samples", samples, "Number of configurations");
  hf->add_option("--raster", raster, "Raster width in pixels (0: none)");
  hf->callback([&] {
    action = [&] {
      ctx.load();
      const auto T = temperley_superpose(ctx.w);
      for (std::size_t i = 0; i < samples; ++i) {
        Rng rng(derive_seed(c.seed, i));
        const auto h = dimer_height(sample_dimer(ctx.w, T, rng), ctx.w, T);
        write_with_sidecar(ctx.path(indexed("height", i, ".csv")), height_csv(ctx.w.positions(), h.values), ctx.meta({{"sample", i}}));
        write_raster(ctx, indexed("height", i, ".pgm"), ctx.w.positions(), h.values, raster);
      }
      return exit_ok;
    };
  });

  auto* go = sub("green-oracle", "Discrete Green function, calibration against the disc Green function");
  go->add_option("--points", points, "Points x y ... (pairs of them are evaluated)");
  go->callback([&] {
    action = [&] {
      ctx.load();
      const GreenKernel G(ctx.w);
      nlohmann::json j;
      if (ctx.domain.kind() == Domain::Kind::disc) {
        const auto cal = calibrate_green(ctx.w, G);
        j["calibration"] = {{"constant", cal.constant}, {"max_relative_residual", cal.max_relative_residual}, {"pairs", cal.pairs}};
      }
      const auto ps = parse_points(points);
      j["green"] = nlohmann::json::array();
      for (Point a : ps)
        for (Point b : ps) {
          const int u = ctx.w.nearest_vertex(a), v = ctx.w.nearest_vertex(b);
          j["green"].push_back({{"x", {ctx.w.pos(u).real(), ctx.w.pos(u).imag()}}, {"y", {ctx.w.pos(v).real(), ctx.w.pos(v).imag()}}, {"G", G(u, v)}});
        }
      emit_json(ctx, "green.json", j);
      return exit_ok;
    };
  });

  auto* cc = sub("check-crossing", "Crossing probabilities of the walk across mesh sizes", false);
  cc->add_option("--samples", samples, "Walks per mesh size");
  cc->add_option("--deltas", deltas, "Mesh sizes");
  cc->callback([&] {
    action = [&] {
      nlohmann::json j;
      j["estimates"] = nlohmann::json::array();
      std::vector<ProportionEstimate> est;
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto g = gen_square_lattice(deltas[i], {{-0.5, -0.5}, {3.5, 1.5}});
        est.push_back(crossing_probability(g, {{0, 0}, 1.0, CrossingRect::Direction::left_to_right}, samples, derive_seed(c.seed, i)));
        j["estimates"].push_back({{"delta", deltas[i]}, {"p", est.back().p}, {"lo", est.back().lo}, {"hi", est.back().hi}});
      }
      bool overlap = true, above = true;
      for (std::size_t i = 0; i < est.size(); ++i) {
        above = above && est[i].p > 0.01;
        for (std::size_t k = 0; k < i; ++k) overlap = overlap && est[i].lo <= est[k].hi && est[k].lo <= est[i].hi;
      }
      j["intervals_overlap"] = overlap;
      j["all_above_0.01"] = above;
      j["verdict"] = overlap && above ? "PASS" : "FAIL";
      emit_json(ctx, "crossing.json", j);
      return overlap && above ? exit_ok : exit_fail;
    };
  });

  auto* ci = sub("check-identities", "Fuzz the deterministic winding identities", false);
  ci->add_option("--samples", identity_cases, "Cases per suite");
  ci->callback([&] {
    action = [&] {
      const auto a = intrinsic_identity_suite(identity_cases, c.seed), b = change_of_coords_suite(identity_cases, c.seed + 1),
                 d = mobius_derivative_suite(identity_cases, c.seed + 2);
      const bool ok = a.max_residual < 1e-6 && b.max_residual < 1e-6 && d.max_residual < 1e-6;
      emit_json(ctx, "identities.json",
                {{"intrinsic_to_topological", {{"cases", a.cases}, {"max_residual", a.max_residual}}},
                 {"mobius_change_of_winding", {{"cases", b.cases}, {"max_residual", b.max_residual}}},
                 {"mobius_derivative", {{"cases", d.cases}, {"max_residual", d.max_residual}}},
                 {"verdict", ok ? "PASS" : "FAIL"}});
      return ok ? exit_ok : exit_fail;
    };
  });

  auto* mo = sub("estimate-moments", "Pairings of the winding field with test functions and their moments");
  mo->add_option("--samples", samples, "Number of trees");
  mo->add_option("--bumps", bump_spec, "Radial bumps x y radius ...");
  mo->callback([&] {
    action = [&] {
      ctx.load();
      const VoronoiTessellation vor(ctx.w);
      std::vector<std::vector<double>> cells;
      for (const auto& f : parse_bumps(bump_spec)) cells.push_back(vor.cell_integrals(f));
      const auto rows = pairing_samples(ctx.w, cells, samples, c.seed, 0, c.workers);
      std::ostringstream os;
      os << "sample";
      for (std::size_t k = 0; k < cells.size(); ++k) os << ",f" << k;
      os << '\n';
      for (std::size_t i = 0; i < rows.size(); ++i) {
        os << i;
        for (double v : rows[i]) os << ',' << full_precision(v);
        os << '\n';
      }
      write_with_sidecar(ctx.path("pairings.csv"), os.str(), ctx.meta());
      nlohmann::json j;
      j["moments"] = nlohmann::json::array();
      for (std::size_t a = 0; a < cells.size(); ++a)
        for (std::size_t b = a; b < cells.size(); ++b) {
          std::vector<int> pw(cells.size(), 0);
          pw[a] += 1, pw[b] += 1;
          const auto e = kpoint_moment(rows, pw);
          j["moments"].push_back({{"powers", pw}, {"estimate", e.value}, {"se", e.se}});
        }
      emit_json(ctx, "moments.json", j);
      return exit_ok;
    };
  });

  auto* rep = sub("report", "Run a moment suite and write a JSON report with verdicts");
  rep->add_option("--samples", samples, "Number of trees");
  rep->add_option("--statistics", stats, "identities, one_point, covariance, fourth_moment");
  rep->add_option("--bumps", bump_spec, "Radial bumps x y radius ...");
  rep->add_option("--tol-mean", tol_mean, "Absolute tolerance of the one-point mean");
  rep->add_option("--tol-cov", tol_cov, "Relative tolerance of covariance and fourth moment");
  rep->add_option("--m-samples", m_samples, "Branches used for the centring constant");
  rep->add_option("--paths", paths, "Capacity Monte Carlo paths per prefix");
  rep->callback([&] {
    action = [&] {
      if (!stats.empty()) ctx.load();
      const auto report = moment_report(run_suite(ctx, stats, samples, parse_bumps(bump_spec), tol_mean, tol_cov, m_samples, paths));
      emit_json(ctx, "report.json", report);
      return report["verdict"] == "FAIL" ? exit_fail : exit_ok;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  }
  try {
    for (CLI::App* s : app.get_subcommands()) ctx.canonical = resolve(s, c);
    return action();
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  }
}
