#include "contkern/ps_solver.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "contkern/error.hpp"
#include "contkern/quadrature.hpp"

namespace contkern {

namespace {

struct KeyLess {
  bool operator()(const EquationKey& a, const EquationKey& b) const noexcept {
    if (a.source != b.source) return a.source < b.source;
    return GradedLex{}(a.m, b.m);
  }
};

using RowImage = std::map<EquationKey, double, KeyLess>;

// Adds c * mono * s into the image under `source`.
void add_shifted(RowImage& img, EquationSource source, const TruncatedSeries& s, const Monomial& mono, double c) {
  if (c == 0.0) return;
  for (const auto& [m, v] : s.coeffs()) {
    EquationKey key{source, m};
    for (int i = 0; i < kNumVars; ++i) key.m.e[i] += mono.e[i];
    img[key] += c * v;
  }
}

Monomial shifted(Monomial m, VarId v, int by) {
  m[v] += by;
  return m;
}

TruncatedSeries monomial_y(int c) {
  Monomial m;
  m[VarId::Y] = c;
  return TruncatedSeries::monomial(VarSet{VarId::Y}, m);
}

TruncatedSeries monomial_eta(int c) {
  Monomial m;
  m[VarId::ETA] = c;
  return TruncatedSeries::monomial(VarSet{VarId::ETA}, m);
}

double constant_term(const TruncatedSeries& s) { return s.coeff(Monomial{}); }

}  // namespace

void SolverConfig::validate() const {
  if (order < 0) throw ConfigError("solver order N must be non-negative");
  if (ny() < 0 || ny() > order) throw ConfigError("order in y must satisfy 0 <= N_y <= N");
}

std::string_view source_name(EquationSource s) noexcept {
  switch (s) {
    case EquationSource::PdeK: return "pde_k";
    case EquationSource::PdeKbar: return "pde_kbar";
    case EquationSource::BcDiag: return "bc_diag";
    case EquationSource::BcLeft: return "bc_left";
  }
  return "?";
}

std::pair<long, long> count_unknowns(int order, int order_y) {
  if (order < 0 || order_y < 0 || order_y > order) throw Error("count_unknowns: need 0 <= N_y <= N");
  const long n = order;
  const long kbar = (n + 1) * (n + 2) / 2;
  long k = 0;
  if (order_y == order) {
    k = n * (n + 1) * (2 * n + 10) / 12 + n + 1;
  } else {
    for (long l = 0; l <= order_y; ++l) k += (n - l + 1) * (n - l + 2) / 2;
  }
  return {k, kbar};
}

LinearSystem assemble(const ContinuumParams& p, const SolverConfig& cfg) {
  cfg.validate();
  p.validate();
  const int N = cfg.order;
  const int Ny = cfg.ny();

  LinearSystem sys;
  sys.config = cfg;

  {
    const auto nth = p.theta.poly_degree(VarId::Y);
    const auto nlam = p.lambda.poly_degree(VarId::Y);
    if (nth && nlam && Ny < *nth - *nlam) {
      std::ostringstream os;
      os << "order in y " << Ny << " is below the lower bound " << (*nth - *nlam)
         << " implied by the y-degrees of theta and lambda";
      sys.warnings.push_back(os.str());
    }
  }

  const bool trunc = cfg.truncate_params;
  const TruncatedSeries lam = p.lambda.to_series(N, trunc);
  const TruncatedSeries mu = p.mu.to_series(N, trunc);
  const TruncatedSeries sigma = p.sigma.to_series(N, trunc);
  const TruncatedSeries theta = p.theta.to_series(N, trunc);
  const TruncatedSeries W = p.W.to_series(N, trunc);

  const TruncatedSeries lam_xi = substitute_var(lam, VarId::X, VarId::XI);
  const TruncatedSeries dlam_xi = diff(lam_xi, VarId::XI);
  const TruncatedSeries mu_xi = substitute_var(mu, VarId::X, VarId::XI);
  const TruncatedSeries dmu_xi = diff(mu_xi, VarId::XI);
  const TruncatedSeries theta_xi = substitute_var(theta, VarId::X, VarId::XI);
  const TruncatedSeries lam_plus_mu = add(lam, mu);
  const double mu0 = constant_term(mu);

  // int_0^1 sigma(xi, eta, y) eta^l d eta and int_0^1 W(xi, y) y^l dy.
  const TruncatedSeries sigma_xi = substitute_var(sigma, VarId::X, VarId::XI);
  const TruncatedSeries W_xi = substitute_var(W, VarId::X, VarId::XI);
  std::vector<TruncatedSeries> sigma_mom, W_mom;
  std::vector<double> q_mom;
  const TruncatedSeries lam0 = restrict_var(lam, VarId::X, 0.0);
  TruncatedSeries q_series;
  if (!cfg.use_exact_q) q_series = p.q.to_series(N, trunc);
  for (int l = 0; l <= Ny; ++l) {
    sigma_mom.push_back(integrate_unit(mul(sigma_xi, monomial_eta(l)), VarId::ETA));
    W_mom.push_back(integrate_unit(mul(W_xi, monomial_y(l)), VarId::Y));
    const TruncatedSeries weight = mul(lam0, monomial_y(l));
    if (cfg.use_exact_q) {
      q_mom.push_back(integrate01(
          [&](double y) { return p.q.eval(Point{{VarId::Y, y}}) * eval(weight, Point{{VarId::Y, y}}); }, 1e-14));
    } else {
      q_mom.push_back(constant_term(integrate_unit(mul(q_series, weight), VarId::Y)));
    }
  }

  // Unknowns.
  for (int d = 0; d <= N; ++d) {
    // graded lex within degree d: descending (x, xi, y)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) {
        const int c = d - a - b;
        if (c <= Ny) sys.columns.push_back({false, Monomial::of(a, b, c)});
      }
  }
  sys.num_k = static_cast<int>(sys.columns.size());
  for (int d = 0; d <= N; ++d)
    for (int a = d; a >= 0; --a) sys.columns.push_back({true, Monomial::of(a, d - a)});
  sys.num_kbar = static_cast<int>(sys.columns.size()) - sys.num_k;

  std::vector<RowImage> images(sys.columns.size());
  for (std::size_t col = 0; col < sys.columns.size(); ++col) {
    const Unknown& u = sys.columns[col];
    RowImage& img = images[col];
    const Monomial& m = u.m;
    const int a = m[VarId::X], b = m[VarId::XI], c = m[VarId::Y];
    const Monomial xa_xib = Monomial::of(a, b);
    if (!u.is_kbar) {
      if (a > 0) add_shifted(img, EquationSource::PdeK, mu, shifted(m, VarId::X, -1), a);
      if (b > 0) add_shifted(img, EquationSource::PdeK, lam_xi, shifted(m, VarId::XI, -1), -b);
      add_shifted(img, EquationSource::PdeK, dlam_xi, m, -1.0);
      add_shifted(img, EquationSource::PdeK, sigma_mom[static_cast<std::size_t>(c)], xa_xib, -1.0);
      add_shifted(img, EquationSource::PdeKbar, W_mom[static_cast<std::size_t>(c)], xa_xib, -1.0);
      add_shifted(img, EquationSource::BcDiag, lam_plus_mu, Monomial::of(a + b, 0, c), 1.0);
      if (b == 0) {
        EquationKey key{EquationSource::BcLeft, Monomial::of(a)};
        img[key] += -q_mom[static_cast<std::size_t>(c)];
      }
    } else {
      add_shifted(img, EquationSource::PdeK, theta_xi, m, -1.0);
      if (a > 0) add_shifted(img, EquationSource::PdeKbar, mu, shifted(m, VarId::X, -1), a);
      if (b > 0) add_shifted(img, EquationSource::PdeKbar, mu_xi, shifted(m, VarId::XI, -1), b);
      add_shifted(img, EquationSource::PdeKbar, dmu_xi, m, 1.0);
      if (b == 0) {
        EquationKey key{EquationSource::BcLeft, Monomial::of(a)};
        img[key] += mu0;
      }
    }
    std::erase_if(img, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  }

  RowImage rhs;
  add_shifted(rhs, EquationSource::BcDiag, theta, Monomial{}, -1.0);
  std::erase_if(rhs, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });

  std::map<EquationKey, int, KeyLess> row_of;
  for (const auto& img : images)
    for (const auto& [key, v] : img) row_of.emplace(key, 0);
  for (const auto& [key, v] : rhs) row_of.emplace(key, 0);
  int r = 0;
  for (auto& [key, idx] : row_of) {
    idx = r++;
    sys.rows.push_back(key);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t col = 0; col < images.size(); ++col)
    for (const auto& [key, v] : images[col]) triplets.emplace_back(row_of.at(key), static_cast<int>(col), v);
  sys.A.resize(r, static_cast<Eigen::Index>(sys.columns.size()));
  sys.A.setFromTriplets(triplets.begin(), triplets.end());
  sys.A.makeCompressed();
  sys.b = Eigen::VectorXd::Zero(r);
  for (const auto& [key, v] : rhs) sys.b(row_of.at(key)) = v;
  return sys;
}

PsKernelSolution solve_ls(const LinearSystem& sys) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index m = sys.A.rows();
  const Eigen::Index n = sys.A.cols();

  // Minimum-norm least squares via a complete orthogonal decomposition.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Eigen::Index>({m, n, 1})));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::Index rank = 0;
  if (m > 0 && n > 0) {
    cod.compute(Eigen::MatrixXd(sys.A));
    rank = cod.rank();
    x = cod.solve(sys.b);
  }

  PsKernelSolution sol;
  sol.x = std::move(x);
  if (!sol.x.allFinite()) {
    std::ostringstream os;
    os << "least-squares solution is not finite (system " << m << "x" << n << ", numerical rank " << rank << ")";
    throw NumericalError(os.str());
  }
  sol.rank = static_cast<int>(rank);
  sol.residual = residual_norm(sys, sol.x);
  sol.config = sys.config;
  sol.num_unknowns = sys.num_unknowns();
  sol.num_equations = sys.num_equations();

  const int N = sys.config.order;
  Caps kcaps{};
  kcaps[index_of(VarId::X)] = N;
  kcaps[index_of(VarId::XI)] = N;
  kcaps[index_of(VarId::Y)] = sys.config.ny();
  sol.k = TruncatedSeries(VarSet{VarId::X, VarId::XI, VarId::Y}, kcaps);
  Caps kbcaps{};
  kbcaps[index_of(VarId::X)] = N;
  kbcaps[index_of(VarId::XI)] = N;
  sol.kbar = TruncatedSeries(VarSet{VarId::X, VarId::XI}, kbcaps);
  for (std::size_t j = 0; j < sys.columns.size(); ++j) {
    const double v = sol.x(static_cast<Eigen::Index>(j));
    if (v == 0.0) continue;
    if (sys.columns[j].is_kbar)
      sol.kbar.add_term(sys.columns[j].m, v);
    else
      sol.k.add_term(sys.columns[j].m, v);
  }
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

PsKernelSolution solve_power_series(const ContinuumParams& p, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  LinearSystem sys = assemble(p, cfg);
  const double ta = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PsKernelSolution sol = solve_ls(sys);
  sol.assemble_seconds = ta;
  return sol;
}

double residual_norm(const LinearSystem& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.A.cols()) throw Error("residual_norm: coefficient vector has the wrong length");
  return (sys.A * x - sys.b).norm();
}

Eigen::VectorXd pack_coefficients(const LinearSystem& sys, const TruncatedSeries& k, const TruncatedSeries& kbar) {
  Eigen::VectorXd x(sys.num_unknowns());
  for (std::size_t j = 0; j < sys.columns.size(); ++j) {
    const auto& u = sys.columns[j];
    x(static_cast<Eigen::Index>(j)) = u.is_kbar ? kbar.coeff(u.m) : k.coeff(u.m);
  }
  return x;
}

bool optimality_check(const LinearSystem& sys, const Eigen::VectorXd& candidate, const Eigen::VectorXd& reference,
                      double margin) {
  if (candidate.size() != sys.A.cols() || reference.size() != sys.A.cols())
    throw Error("optimality_check: coefficient vectors do not match the system columns");
  return residual_norm(sys, candidate) <= residual_norm(sys, reference) + margin;
}

}  // namespace contkern
