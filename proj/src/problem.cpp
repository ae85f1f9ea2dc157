#include "contkern/problem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "contkern/error.hpp"

namespace contkern {

namespace {

void require_vars(const ParamFunction& f, VarSet allowed, const char* name) {
  for (VarId v : kAllVars) {
    if (f.depends_on(v) && !allowed.contains(v))
      throw ConfigError(std::string("parameter '") + name + "' may not depend on '" + std::string(var_name(v)) + "'");
  }
}

constexpr int kPositivityGrid = 101;

}  // namespace

double sample_point(int i, int n, SamplePlacement placement) {
  const double shift = placement == SamplePlacement::Right ? 0.0 : 1.0;
  return (static_cast<double>(i) - shift) / static_cast<double>(n);
}

void ContinuumParams::validate() const {
  require_vars(lambda, {VarId::X, VarId::Y}, "lambda");
  require_vars(mu, {VarId::X}, "mu");
  require_vars(sigma, {VarId::X, VarId::ETA, VarId::Y}, "sigma");
  require_vars(theta, {VarId::X, VarId::Y}, "theta");
  require_vars(W, {VarId::X, VarId::Y}, "W");
  require_vars(q, {VarId::Y}, "q");
}

void LargeScaleParams::validate() const {
  if (n < 1) throw ConfigError("large-scale problem needs n >= 1");
  const auto un = static_cast<std::size_t>(n);
  if (lambda.size() != un || theta.size() != un || W.size() != un || q.size() != un || sigma.size() != un)
    throw ConfigError("large-scale parameter lists must all have length n");
  for (const auto& row : sigma)
    if (row.size() != un) throw ConfigError("sigma must be n x n");
  auto x_only = [](const ParamFunction& f, const char* name) { require_vars(f, {VarId::X}, name); };
  x_only(mu, "mu");
  for (std::size_t i = 0; i < un; ++i) {
    x_only(lambda[i], "lambda_i");
    x_only(theta[i], "theta_i");
    x_only(W[i], "W_i");
    for (const auto& s : sigma[i]) x_only(s, "sigma_ij");
  }
}

LargeScaleParams sample_continuum(const ContinuumParams& c, int n, SamplePlacement placement) {
  if (n < 1) throw Error("sample_continuum: n must be positive");
  c.validate();
  LargeScaleParams ls;
  ls.n = n;
  ls.placement = placement;
  ls.mu = c.mu;
  const auto un = static_cast<std::size_t>(n);
  ls.sigma.assign(un, std::vector<ParamFunction>(un));
  for (int i = 1; i <= n; ++i) {
    const double yi = sample_point(i, n, placement);
    ls.lambda.push_back(c.lambda.substitute(VarId::Y, yi));
    ls.theta.push_back(c.theta.substitute(VarId::Y, yi));
    ls.W.push_back(c.W.substitute(VarId::Y, yi));
    ls.q.push_back(c.q.eval(Point{{VarId::Y, yi}}));
    const ParamFunction row = c.sigma.substitute(VarId::ETA, yi);
    for (int j = 1; j <= n; ++j)
      ls.sigma[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
          row.substitute(VarId::Y, sample_point(j, n, placement));
  }
  ls.tmpl = c;
  ls.tmpl_has_q = true;
  return ls;
}

ContinuumParams lift_separable(const LargeScaleParams& ls, const LiftOptions& opts) {
  if (!ls.tmpl)
    throw Error(
        "lift_separable: parameters are not given in template form (expressions of i/n, j/n); "
        "build a continuum approximation instead, e.g. with fit_q for sampled data");
  ContinuumParams c = *ls.tmpl;
  if (opts.q_fit_degree) {
    const auto y = q_abscissae(ls.n, ls.placement);
    c.q = fit_q(y, ls.q, *opts.q_fit_degree).as_function(VarId::Y);
  } else if (!ls.tmpl_has_q) {
    throw Error("lift_separable: q is raw data without a template; pass a fit degree (fit_q) to approximate it");
  }
  return c;
}

ParamFunction FitResult::as_function(VarId v) const { return ParamFunction::polynomial(v, coeffs); }

double FitResult::eval(double y) const {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * y + *it;
  return r;
}

std::vector<double> q_abscissae(int n, SamplePlacement placement) {
  std::vector<double> y;
  for (int i = 1; i <= n; ++i) y.push_back(sample_point(i, n, placement));
  return y;
}

FitResult fit_q(std::span<const double> y, std::span<const double> q, int degree) {
  if (y.size() != q.size()) throw Error("fit_q: abscissae and values differ in length");
  if (degree < 0) throw Error("fit_q: negative degree");
  const auto npts = static_cast<Eigen::Index>(y.size());
  if (degree >= npts) throw Error("fit_q: degree must be smaller than the number of data points");

  Eigen::MatrixXd V(npts, degree + 1);
  Eigen::VectorXd b(npts);
  for (Eigen::Index r = 0; r < npts; ++r) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      V(r, k) = p;
      p *= y[static_cast<std::size_t>(r)];
    }
    b(r) = q[static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  qr.setThreshold(1e-12);
  if (qr.rank() < degree + 1) throw Error("fit_q: rank-deficient Vandermonde matrix (duplicate abscissae?)");
  const Eigen::VectorXd c = qr.solve(b);

  FitResult fr;
  fr.degree = degree;
  fr.coeffs.assign(c.data(), c.data() + c.size());
  fr.rms_error = std::sqrt((V * c - b).squaredNorm() / static_cast<double>(npts));
  return fr;
}

PositivityReport check_positivity(const ContinuumParams& p) {
  PositivityReport r;
  r.min_lambda = std::numeric_limits<double>::infinity();
  r.min_mu = std::numeric_limits<double>::infinity();
  for (int a = 0; a < kPositivityGrid; ++a) {
    const double x = a / double(kPositivityGrid - 1);
    const double mu = p.mu.eval(Point{{VarId::X, x}});
    if (mu < r.min_mu) {
      r.min_mu = mu;
      r.argmin_mu_x = x;
    }
    for (int b = 0; b < kPositivityGrid; ++b) {
      const double y = b / double(kPositivityGrid - 1);
      const double lam = p.lambda.eval(Point{{VarId::X, x}, {VarId::Y, y}});
      if (lam < r.min_lambda) {
        r.min_lambda = lam;
        r.argmin_lambda_x = x;
        r.argmin_lambda_y = y;
      }
    }
  }
  r.pass = r.min_lambda > 0.0 && r.min_mu > 0.0;
  return r;
}

PositivityReport check_positivity(const LargeScaleParams& p) {
  PositivityReport r;
  r.min_lambda = std::numeric_limits<double>::infinity();
  r.min_mu = std::numeric_limits<double>::infinity();
  for (int a = 0; a < kPositivityGrid; ++a) {
    const double x = a / double(kPositivityGrid - 1);
    const Point pt{{VarId::X, x}};
    const double mu = p.mu.eval(pt);
    if (mu < r.min_mu) {
      r.min_mu = mu;
      r.argmin_mu_x = x;
    }
    for (int i = 0; i < p.n; ++i) {
      const double lam = p.lambda[static_cast<std::size_t>(i)].eval(pt);
      if (lam < r.min_lambda) {
        r.min_lambda = lam;
        r.argmin_lambda_x = x;
        r.argmin_lambda_y = sample_point(i + 1, p.n, p.placement);
      }
    }
  }
  r.pass = r.min_lambda > 0.0 && r.min_mu > 0.0;
  return r;
}

}  // namespace contkern
