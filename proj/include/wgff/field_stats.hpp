#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "wgff/error.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/rng.hpp"
#include "wgff/stats.hpp"
#include "wgff/voronoi.hpp"

namespace wgff {

/// Reduced Laplacian of the wired graph: L(v,v) = total out-weight of v, L(v,u) = -w(v->u), root removed.
inline Eigen::SparseMatrix<double> wired_laplacian(const WiredDomainGraph& w, bool unit_weights = false) {
  const int n = w.num_interior();
  std::vector<Eigen::Triplet<double>> trip;
  for (int v = 0; v < n; ++v)
    for (std::size_t k = w.edge_begin(v); k < w.edge_end(v); ++k) {
      const double wt = unit_weights ? 1.0 : w.edge(k).weight;
      trip.emplace_back(v, v, wt);
      if (w.edge(k).dst != n) trip.emplace_back(v, w.edge(k).dst, -wt);
    }
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(trip.begin(), trip.end());
  return l;
}

/// Discrete Green function G = L^{-1}: expected visits to y of the walk from x before absorption at the root,
/// divided by the out-weight of y.
class GreenKernel {
 public:
  explicit GreenKernel(const WiredDomainGraph& w) : n_(w.num_interior()), lap_(wired_laplacian(w)) {
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(lap_);
    lu_->factorize(lap_);
    if (lu_->info() != Eigen::Success) throw ComputationError("singular wired Laplacian");
  }

  int size() const { return n_; }
  const Eigen::SparseMatrix<double>& laplacian() const { return lap_; }

  /// Solves L u = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    require(b.size() == n_, "right-hand side has the wrong size");
    Eigen::VectorXd u = lu_->solve(b);
    if (lu_->info() != Eigen::Success) throw ComputationError("Green solve failed");
    return u;
  }

  /// Column y of G: G(., y).
  Eigen::VectorXd column(int y) const {
    require(y >= 0 && y < n_, "vertex out of range");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e(y) = 1;
    return solve(e);
  }

  /// G(x, y); zero when either argument is the root (index n).
  double operator()(int x, int y) const {
    require(x >= 0 && x <= n_ && y >= 0 && y <= n_, "vertex out of range");
    if (x == n_ || y == n_) return 0.0;
    return column(y)(x);
  }

  /// f^T G g for vectors over the interior vertices.
  double bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const { return f.dot(solve(g)); }

 private:
  int n_;
  Eigen::SparseMatrix<double> lap_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

inline double discrete_green(const WiredDomainGraph& w, int x, int y) { return GreenKernel(w)(x, y); }

/// Green function of the unit disc in the log normalisation, log|(1 - x conj(y)) / (x - y)|, for a disc of
/// any centre and radius after rescaling.
inline double continuum_green_disc(const Domain& d, Point x, Point y) {
  require(d.kind() == Domain::Kind::disc, "continuum Green function is only available for discs");
  require(x != y, "Green function diverges on the diagonal");
  const Point a = (x - d.center()) / d.radius(), b = (y - d.center()) / d.radius();
  return std::log(std::abs((1.0 - a * std::conj(b)) / (a - b)));
}

/// Ratio between the continuum disc Green function and the discrete one, fitted on a grid of vertex pairs
/// away from the diagonal and the boundary.
struct GreenCalibration {
  double constant = 0;  // continuum ~= constant * discrete
  double max_relative_residual = 0;
  std::size_t pairs = 0;
};

inline GreenCalibration calibrate_green(const WiredDomainGraph& w, const GreenKernel& g, double inner = 0.6, double min_sep = 0.25,
                                        int grid = 5) {
  const Domain& d = w.domain();
  require(d.kind() == Domain::Kind::disc, "calibration uses the disc Green function");
  std::vector<int> pts;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Point p = d.center() + d.radius() * inner * Point(2.0 * i / (grid - 1) - 1, 2.0 * j / (grid - 1) - 1);
      if (std::abs(p - d.center()) > inner * d.radius() + 1e-12) continue;
      const int v = w.nearest_vertex(p);
      if (std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
    }
  std::vector<double> cont, disc;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const Eigen::VectorXd col = g.column(pts[a]);
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (a == b || std::abs(w.pos(pts[a]) - w.pos(pts[b])) < min_sep * d.radius()) continue;
      cont.push_back(continuum_green_disc(d, w.pos(pts[a]), w.pos(pts[b])));
      disc.push_back(col(pts[b]));
    }
  }
  require(!cont.empty(), "calibration grid has no admissible pairs");
  // least squares through the origin
  double num = 0, den = 0;
  for (std::size_t i = 0; i < cont.size(); ++i) num += cont[i] * disc[i], den += disc[i] * disc[i];
  GreenCalibration c;
  c.constant = num / den;
  c.pairs = cont.size();
  for (std::size_t i = 0; i < cont.size(); ++i)
    c.max_relative_residual = std::max(c.max_relative_residual, std::abs(c.constant * disc[i] / cont[i] - 1));
  return c;
}

/// 2 * calibrated continuum Green function between vertices x and y.
inline double gff_covariance_target(const WiredDomainGraph& w, const GreenKernel& g, const GreenCalibration& cal, int x, int y) {
  require(x != y, "covariance target diverges at x = y");
  return 2 * cal.constant * g(x, y);
}

/// 2 * calibrated continuum Green function paired with two test functions given by their cell integrals.
inline double gff_covariance_target(const GreenKernel& g, const GreenCalibration& cal, const std::vector<double>& f,
                                    const std::vector<double>& h) {
  const Eigen::Map<const Eigen::VectorXd> a(f.data(), static_cast<Eigen::Index>(f.size())), b(h.data(), static_cast<Eigen::Index>(h.size()));
  return 2 * cal.constant * g.bilinear(a, b);
}

/// Sampler of the discrete Gaussian free field with covariance L^{-1} (symmetric weights required).
class DgffSampler {
 public:
  explicit DgffSampler(const WiredDomainGraph& w) : lap_(wired_laplacian(w)) {
    const Eigen::SparseMatrix<double> asym = lap_ - Eigen::SparseMatrix<double>(lap_.transpose());
    if (asym.norm() > 1e-12 * lap_.norm()) throw ComputationError("DGFF sampler needs symmetric weights");
    llt_.compute(lap_);
    if (llt_.info() != Eigen::Success) throw ComputationError("Cholesky factorisation failed");
  }

  std::vector<double> sample(Rng& rng) const {
    const Eigen::Index n = lap_.rows();
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    const Eigen::VectorXd y = llt_.matrixU().solve(z);
    const Eigen::VectorXd x = llt_.permutationPinv() * y;
    return {x.data(), x.data() + n};
  }

 private:
  Eigen::SparseMatrix<double> lap_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

inline std::vector<double> sample_dgff(const WiredDomainGraph& w, Rng& rng) { return DgffSampler(w).sample(rng); }

/// Centered product moment E prod_i (X_i - E X_i)^{k_i} over rows of samples, with a delete-one jackknife SE.
inline Estimate kpoint_moment(const std::vector<std::vector<double>>& samples, const std::vector<int>& powers) {
  const std::size_t n = samples.size();
  require(n >= 2, "need at least two samples");
  const std::size_t k = powers.size();
  for (const auto& r : samples) require(r.size() == k, "each sample must have one value per factor");
  for (int p : powers) require(p >= 0 && p <= 12, "powers must lie in [0, 12]");
  // expand prod (x_j - mean_j)^{k_j} into mixed raw moments of data shifted by the full-sample mean
  std::vector<double> shift(k, 0.0);
  for (const auto& r : samples)
    for (std::size_t j = 0; j < k; ++j) shift[j] += r[j] / n;
  std::vector<std::vector<int>> multi{{}};
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& a : multi)
      for (int e = 0; e <= powers[j]; ++e) {
        next.push_back(a);
        next.back().push_back(e);
      }
    multi = std::move(next);
  }
  std::vector<int> unit(k, -1);  // feature index of the first raw moment of each factor
  for (std::size_t f = 0; f < multi.size(); ++f) {
    int ones = 0, at = -1;
    for (std::size_t j = 0; j < k; ++j)
      if (multi[f][j] != 0) ++ones, at = static_cast<int>(j);
    if (ones == 1 && multi[f][at] == 1) unit[at] = static_cast<int>(f);
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(multi.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < multi.size(); ++f) {
      double p = 1;
      for (std::size_t j = 0; j < k; ++j) p *= std::pow(samples[i][j] - shift[j], multi[f][j]);
      rows[i][f] = p;
    }
  return jackknife_means(rows, [&](const std::vector<double>& m) {
    double s = 0;
    for (std::size_t f = 0; f < multi.size(); ++f) {
      double c = m[f];
      for (std::size_t j = 0; j < k; ++j) {
        const int e = multi[f][j];
        const double mu = powers[j] == 0 ? 0.0 : m[unit[j]];
        c *= std::tgamma(powers[j] + 1.0) / (std::tgamma(e + 1.0) * std::tgamma(powers[j] - e + 1.0)) * std::pow(-mu, powers[j] - e);
      }
      s += c;
    }
    return s;
  });
}

/// Point evaluations of several vertices as a k-point moment; vertices must be distinct.
inline Estimate kpoint_moment(const std::vector<std::vector<double>>& fields, const std::vector<int>& vertices,
                              const std::vector<int>& powers) {
  require(vertices.size() == powers.size(), "one power per point");
  for (std::size_t a = 0; a < vertices.size(); ++a)
    for (std::size_t b = a + 1; b < vertices.size(); ++b) require(vertices[a] != vertices[b], "points must be distinct");
  std::vector<std::vector<double>> rows;
  rows.reserve(fields.size());
  for (const auto& f : fields) {
    std::vector<double> r;
    for (int v : vertices) r.push_back(f.at(v));
    rows.push_back(std::move(r));
  }
  return kpoint_moment(rows, powers);
}

/// Lowest eigenpairs of the unit-weight Dirichlet Laplacian of the wired graph, orthonormal in l2.
struct DirichletEigenbasis {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
};

inline DirichletEigenbasis dirichlet_eigenbasis(const WiredDomainGraph& w, int n_modes, std::uint64_t seed = 1) {
  const int n = w.num_interior();
  require(n_modes >= 1 && n_modes <= n, "n_modes must be between 1 and the number of interior vertices");
  Eigen::SparseMatrix<double> l = wired_laplacian(w, true);
  l = 0.5 * (l + Eigen::SparseMatrix<double>(l.transpose()));
  DirichletEigenbasis out;
  if (n <= 1500) {
    const Eigen::MatrixXd dense(l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw ComputationError("eigensolver failed");
    out.values = es.eigenvalues().head(n_modes);
    out.vectors = es.eigenvectors().leftCols(n_modes);
    return out;
  }
  // block inverse iteration with Rayleigh-Ritz projection
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(l);
  if (ldlt.info() != Eigen::Success) throw ComputationError("eigensolver factorisation failed");
  const int m = std::min(n, n_modes + std::max(10, n_modes / 2));
  Rng rng(seed);
  Eigen::MatrixXd x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n_modes);
  for (int it = 0; it < 500; ++it) {
    Eigen::MatrixXd y = ldlt.solve(x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    const Eigen::MatrixXd h = q.transpose() * (l * q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
    x = q * es.eigenvectors();
    const Eigen::VectorXd cur = es.eigenvalues().head(n_modes);
    if (it > 2 && ((cur - prev).cwiseAbs().array() <= 1e-12 * cur.cwiseAbs().array()).all()) {
      out.values = cur;
      out.vectors = x.leftCols(n_modes);
      return out;
    }
    prev = cur;
  }
  throw ComputationError("eigensolver did not converge");
}

/// sum_{j <= n_modes} (field, e_j)^2 lambda_j^{-1-eta}.
inline double sobolev_norm(const std::vector<double>& field, const DirichletEigenbasis& basis, double eta) {
  require(eta > 0, "eta must be positive");
  require(static_cast<Eigen::Index>(field.size()) == basis.vectors.rows(), "field size does not match the basis");
  const Eigen::Map<const Eigen::VectorXd> f(field.data(), static_cast<Eigen::Index>(field.size()));
  const Eigen::VectorXd c = basis.vectors.transpose() * f;
  double s = 0;
  for (Eigen::Index j = 0; j < c.size(); ++j) s += c(j) * c(j) * std::pow(basis.values(j), -1 - eta);
  return s;
}

inline double sobolev_norm(const std::vector<double>& field, const WiredDomainGraph& w, double eta, int n_modes) {
  return sobolev_norm(field, dirichlet_eigenbasis(w, n_modes), eta);
}

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

struct MomentEntry {
  std::string statistic;
  double estimate = 0;
  double se = 0;
  double target = 0;
  std::string target_provenance;  // PAPER, TRIVIAL or DERIVED
  double tolerance = 0;

  /// PASS within tolerance; INCONCLUSIVE when the standard error alone exceeds the tolerance.
  Verdict verdict() const {
    if (std::abs(estimate - target) <= tolerance) return Verdict::pass;
    if (se > tolerance) return Verdict::inconclusive;
    return Verdict::fail;
  }
};

inline nlohmann::json moment_report(const std::vector<MomentEntry>& entries) {
  nlohmann::json out;
  out["version"] = "winding-gff/report/1";
  out["entries"] = nlohmann::json::array();
  bool failed = false;
  for (const auto& e : entries) {
    require(e.target_provenance == "PAPER" || e.target_provenance == "TRIVIAL" || e.target_provenance == "DERIVED",
            "target provenance must be PAPER, TRIVIAL or DERIVED");
    const Verdict v = e.verdict();
    failed = failed || v == Verdict::fail;
    out["entries"].push_back({{"statistic", e.statistic},
                              {"estimate", e.estimate},
                              {"se", e.se},
                              {"target", e.target},
                              {"target_provenance", e.target_provenance},
                              {"tolerance", e.tolerance},
                              {"verdict", to_string(v)}});
  }
  out["verdict"] = failed ? "FAIL" : "PASS";
  return out;
}

}  // namespace wgff
