#include "contkern/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "contkern/quadrature.hpp"

namespace contkern {

namespace {

constexpr int kCheckGrid = 101;
constexpr int kConditionGrid = 201;
constexpr double kProportionalTol = 1e-10;
constexpr double kConstancyTol = 1e-8;
constexpr double kConditionTol = 1e-8;
constexpr double kThetaFloor = 1e-12;
constexpr double kZeroIntegral = 1e-12;

double grid_point(int i, int m) { return static_cast<double>(i) / (m - 1); }

double at(const ParamFunction& f, VarId v, double t) {
  Point p;
  p.set(v, t);
  return f.eval(p);
}

double integral_y(const ParamFunction& a, const ParamFunction& b, const ParamFunction& weight_inv_lambda, double mu,
                  bool divide) {
  return integrate01([&](double y) {
    double v = at(a, VarId::Y, y) * at(b, VarId::Y, y);
    if (divide) v /= at(weight_inv_lambda, VarId::Y, y) + mu;
    return v;
  });
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares c in a = c b over a grid, and the fit's sup error.
std::pair<double, double> proportionality(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    bb += b[i] * b[i];
  }
  const double c = bb > 0.0 ? ab / bb : 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - c * b[i]));
  return {c, err};
}

std::vector<double> sample_y(const ParamFunction& f, int m = kCheckGrid) {
  std::vector<double> out;
  for (int i = 0; i < m; ++i) out.push_back(at(f, VarId::Y, grid_point(i, m)));
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Splits f(x, y) into fx(x) fy(y). A single product term keeps its factors
// (the scale goes to the x-part); a sum is tested for rank one numerically.
std::pair<ParamFunction, ParamFunction> split2(const ParamFunction& f, const char* name) {
  if (f.is_zero()) return {ParamFunction(), ParamFunction()};
  if (f.terms().size() == 1) {
    const SeparableTerm& t = f.terms().front();
    auto fx = t.factors_in(VarId::X);
    auto fy = t.factors_in(VarId::Y);
    return {ParamFunction::single({t.scale, fx}), ParamFunction::single({1.0, fy})};
  }
  const int m = 21;
  double best = -1.0, x0 = 0.0, y0 = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double v = std::abs(f.eval(Point{{VarId::X, grid_point(a, m)}, {VarId::Y, grid_point(b, m)}}));
      if (v > best) {
        best = v;
        x0 = grid_point(a, m);
        y0 = grid_point(b, m);
      }
    }
  if (best == 0.0) return {ParamFunction(), ParamFunction()};
  const double f0 = f.eval(Point{{VarId::X, x0}, {VarId::Y, y0}});
  ParamFunction fx = f.substitute(VarId::Y, y0).scaled(1.0 / f0);
  ParamFunction fy = f.substitute(VarId::X, x0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double x = grid_point(a, m), y = grid_point(b, m);
      const double lhs = f.eval(Point{{VarId::X, x}, {VarId::Y, y}});
      const double rhs = at(fx, VarId::X, x) * at(fy, VarId::Y, y);
      if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, best))
        throw NotApplicable(std::string(name) + " is not separable into x- and y-factors");
    }
  return {fx, fy};
}

}  // namespace

SeparableProblem separate(const ContinuumParams& p) {
  p.validate();
  SeparableProblem s;
  const int m = kCheckGrid;
  s.mu = at(p.mu, VarId::X, 0.0);
  for (int i = 0; i < m; ++i)
    if (std::abs(at(p.mu, VarId::X, grid_point(i, m)) - s.mu) > 1e-12 * std::max(1.0, std::abs(s.mu)))
      throw NotApplicable("mu is not constant");
  s.lambda_y = p.lambda.substitute(VarId::X, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double x = grid_point(a, m), y = grid_point(b, m);
      const double l = p.lambda.eval(Point{{VarId::X, x}, {VarId::Y, y}});
      if (std::abs(l - at(s.lambda_y, VarId::Y, y)) > 1e-12 * std::max(1.0, std::abs(l)))
        throw NotApplicable("lambda depends on x");
    }

  std::tie(s.W_x, s.W_y) = split2(p.W, "W");
  std::tie(s.theta_x, s.theta_y) = split2(p.theta, "theta");

  if (!p.sigma.is_zero()) {
    if (p.sigma.terms().size() != 1)
      throw NotApplicable("sigma must be a single product term sigma_x(x) sigma_y(eta) sigma_eta(y)");
    const SeparableTerm& t = p.sigma.terms().front();
    s.sigma_x = ParamFunction::single({t.scale, t.factors_in(VarId::X)});
    s.sigma_y = ParamFunction::single({1.0, t.factors_in(VarId::ETA)}).rename(VarId::ETA, VarId::Y);
    s.sigma_eta = ParamFunction::single({1.0, t.factors_in(VarId::Y)});
  }
  s.q = p.q;
  return s;
}

CyCheck check_cy(const SeparableProblem& p) {
  if (!p.constant_lambda()) throw Error("check_cy: requires constant lambda");
  CyCheck r;
  r.integral = integral_y(p.sigma_y, p.theta_y, p.lambda_y, p.mu, false);
  const auto se = sample_y(p.sigma_eta);
  const auto ty = sample_y(p.theta_y);
  const auto [c, err] = proportionality(se, ty);
  const bool theta_zero = sup_abs(ty) == 0.0;
  if (!theta_zero && err <= kProportionalTol) r.ratio = c;
  if (std::abs(r.integral) < kZeroIntegral) {
    r.applicable = true;
    r.c_y = 0.0;
  } else if (r.ratio) {
    r.applicable = true;
    r.c_y = *r.ratio * r.integral;
  } else {
    r.reason = "no constant c_y: sigma_eta/theta_y is not constant and int sigma_y theta_y = " + fmt(r.integral) +
               " is nonzero";
  }
  return r;
}

namespace {

void require_theta_x(const SeparableProblem& p) {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kConditionGrid; ++i) mn = std::min(mn, std::abs(at(p.theta_x, VarId::X, grid_point(i, kConditionGrid))));
  if (mn < kThetaFloor) throw NotApplicable("theta_x vanishes on [0,1] (min |theta_x| = " + fmt(mn) + ")");
}

// Coefficient of sigma_x in f on the general path:
// (sigma_eta / theta_y) int sigma_y theta_y / (lambda + mu).
double sigma_coupling(const SeparableProblem& p) {
  const double I = integral_y(p.sigma_y, p.theta_y, p.lambda_y, p.mu, true);
  if (std::abs(I) < kZeroIntegral) return 0.0;
  const auto [c, err] = proportionality(sample_y(p.sigma_eta), sample_y(p.theta_y));
  if (err > kProportionalTol)
    throw NotApplicable("no constant c_y: sigma_eta/theta_y is not constant and the sigma integral is nonzero");
  return c * I;
}

}  // namespace

double compute_cx(const SeparableProblem& p, double c_y) {
  require_theta_x(p);
  const double mu = p.mu;
  const ParamFunction dth = p.theta_x.derivative(VarId::X);
  const double th0 = at(p.theta_x, VarId::X, 0.0);
  const double ratio0 = at(dth, VarId::X, 0.0) / th0;
  if (p.constant_lambda()) {
    const double lam = at(p.lambda_y, VarId::Y, 0.0);
    const double qint = integral_y(p.q, p.theta_y, p.lambda_y, mu, false);
    return mu / (lam + mu) * (c_y * at(p.sigma_x, VarId::X, 0.0) + lam * ratio0 + lam / mu * th0 * qint);
  }
  const double a = sigma_coupling(p);
  const double qint = integrate01([&](double y) {
    const double lam = at(p.lambda_y, VarId::Y, y);
    return lam * at(p.q, VarId::Y, y) * at(p.theta_y, VarId::Y, y) / (lam + mu);
  });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < kCheckGrid; ++i) {
    const double lam = at(p.lambda_y, VarId::Y, grid_point(i, kCheckGrid));
    const double cx = mu * at(p.sigma_x, VarId::X, 0.0) * a + mu * lam / (lam + mu) * ratio0 + th0 * qint;
    lo = std::min(lo, cx);
    hi = std::max(hi, cx);
  }
  if (hi - lo > kConstancyTol) throw NotApplicable("c_x depends on y (spread " + fmt(hi - lo) + ")");
  return 0.5 * (lo + hi);
}

double FFunction::operator()(double xi) const {
  double v = offset;
  if (a != 0.0) v += a * at(sigma_x, VarId::X, xi);
  if (b != 0.0) v += b * at(dtheta_x, VarId::X, xi) / at(theta_x, VarId::X, xi);
  return v;
}

double FFunction::derivative(double xi) const {
  double v = 0.0;
  if (a != 0.0) v += a * at(dsigma_x, VarId::X, xi);
  if (b != 0.0) {
    const double t = at(theta_x, VarId::X, xi);
    const double d1 = at(dtheta_x, VarId::X, xi);
    const double d2 = at(ddtheta_x, VarId::X, xi);
    v += b * (d2 * t - d1 * d1) / (t * t);
  }
  return v;
}

FReport build_f(const SeparableProblem& p, double c_x, double c_y) {
  require_theta_x(p);
  FReport r;
  FFunction& f = r.f;
  f.sigma_x = p.sigma_x;
  f.dsigma_x = p.sigma_x.derivative(VarId::X);
  f.theta_x = p.theta_x;
  f.dtheta_x = p.theta_x.derivative(VarId::X);
  f.ddtheta_x = f.dtheta_x.derivative(VarId::X);
  f.offset = -c_x / p.mu;
  if (p.constant_lambda()) {
    const double lam = at(p.lambda_y, VarId::Y, 0.0);
    f.a = c_y / (lam + p.mu);
    f.b = lam / (lam + p.mu);
  } else {
    f.a = sigma_coupling(p);
    // lambda(y)/(lambda(y)+mu) multiplies theta_x'/theta_x; y-independence of
    // f needs either a constant ratio or theta_x' == 0.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < kCheckGrid; ++i) {
      const double lam = at(p.lambda_y, VarId::Y, grid_point(i, kCheckGrid));
      lo = std::min(lo, lam / (lam + p.mu));
      hi = std::max(hi, lam / (lam + p.mu));
    }
    double dmax = 0.0;
    for (int i = 0; i < kConditionGrid; ++i)
      dmax = std::max(dmax, std::abs(at(f.dtheta_x, VarId::X, grid_point(i, kConditionGrid)) /
                                     at(f.theta_x, VarId::X, grid_point(i, kConditionGrid))));
    if ((hi - lo) * dmax > kConstancyTol) throw NotApplicable("f depends on y");
    f.b = dmax == 0.0 ? 0.0 : 0.5 * (lo + hi);
  }

  const double J = integral_y(p.W_y, p.theta_y, p.lambda_y, p.mu, true);
  const ParamFunction Wx = p.W_x;
  double res = 0.0;
  for (int i = 0; i < kConditionGrid; ++i) {
    const double xi = grid_point(i, kConditionGrid);
    const double rhs = at(Wx, VarId::X, xi) * at(p.theta_x, VarId::X, xi) * J;
    res = std::max(res, std::abs(f.derivative(xi) - rhs));
  }
  r.condition_residual = res;
  r.holds = res <= kConditionTol;
  if (!r.holds) throw NotApplicable("compatibility condition on f' fails (sup residual " + fmt(res) + ")");
  return r;
}

ClosedFormKernel::ClosedFormKernel(SeparableProblem p, double c_x, std::optional<double> c_y, FFunction f)
    : p_(std::move(p)), c_x_(c_x), c_y_(c_y), f_(std::move(f)), dtheta_x_(p_.theta_x.derivative(VarId::X)) {}

double ClosedFormKernel::ky(double y) const {
  return at(p_.theta_y, VarId::Y, y) / (at(p_.lambda_y, VarId::Y, y) + p_.mu);
}

double ClosedFormKernel::k(double x, double xi, double y) const {
  return -std::exp(c_x_ * (x - xi) / p_.mu) * at(p_.theta_x, VarId::X, xi) * ky(y);
}

double ClosedFormKernel::kbar(double x, double xi) const { return std::exp(c_x_ * (x - xi) / p_.mu) * f_(xi); }

double ClosedFormKernel::k_x(double x, double xi, double y) const { return c_x_ / p_.mu * k(x, xi, y); }

double ClosedFormKernel::k_xi(double x, double xi, double y) const {
  const double E = std::exp(c_x_ * (x - xi) / p_.mu);
  return -E * ky(y) * (at(dtheta_x_, VarId::X, xi) - c_x_ / p_.mu * at(p_.theta_x, VarId::X, xi));
}

double ClosedFormKernel::kbar_x(double x, double xi) const { return c_x_ / p_.mu * kbar(x, xi); }

double ClosedFormKernel::kbar_xi(double x, double xi) const {
  const double E = std::exp(c_x_ * (x - xi) / p_.mu);
  return E * (f_.derivative(xi) - c_x_ / p_.mu * f_(xi));
}

ClosedFormKernel build_kernels(const SeparableProblem& p, double c_x, std::optional<double> c_y, const FFunction& f) {
  return ClosedFormKernel(p, c_x, c_y, f);
}

ClosedFormKernel solve_closed_form(const ContinuumParams& params) {
  SeparableProblem p = separate(params);
  // theta == 0: k = kbar = 0 solves everything.
  if (sup_abs(sample_y(p.theta_y)) == 0.0 || p.theta_x.is_zero()) {
    FFunction zero;
    return build_kernels(p, 0.0, 0.0, zero);
  }
  std::optional<double> c_y;
  if (p.constant_lambda()) {
    const CyCheck cy = check_cy(p);
    if (!cy.applicable) throw NotApplicable(cy.reason);
    c_y = cy.c_y;
  }
  const double c_x = compute_cx(p, c_y.value_or(0.0));
  const FReport fr = build_f(p, c_x, c_y.value_or(0.0));
  return build_kernels(p, c_x, c_y, fr.f);
}

namespace {

struct Profile {
  ParamFunction shape;
  std::vector<double> coeffs;
};

// Writes every member as coeff * common shape; throws when impossible.
Profile factor_members(const std::vector<ParamFunction>& fs, const char* name) {
  const int m = kCheckGrid;
  std::vector<std::vector<double>> vals;
  std::size_t best = 0;
  double best_norm = 0.0;
  int best_pt = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::vector<double> v;
    for (int a = 0; a < m; ++a) v.push_back(at(fs[i], VarId::X, grid_point(a, m)));
    for (int a = 0; a < m; ++a)
      if (std::abs(v[static_cast<std::size_t>(a)]) > best_norm) {
        best_norm = std::abs(v[static_cast<std::size_t>(a)]);
        best = i;
        best_pt = a;
      }
    vals.push_back(std::move(v));
  }
  Profile pr;
  if (best_norm == 0.0) {
    pr.coeffs.assign(fs.size(), 0.0);
    return pr;
  }
  const double ref = vals[best][static_cast<std::size_t>(best_pt)];
  pr.shape = fs[best].scaled(1.0 / ref);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double c = vals[i][static_cast<std::size_t>(best_pt)];
    for (int a = 0; a < m; ++a)
      if (std::abs(vals[i][static_cast<std::size_t>(a)] - c * vals[best][static_cast<std::size_t>(a)] / ref) >
          1e-10 * best_norm)
        throw Error(std::string("check_largescale_conditions: ") + name + " is not in factored form");
    pr.coeffs.push_back(c);
  }
  return pr;
}

}  // namespace

LargeScaleConditionReport check_largescale_conditions(const LargeScaleParams& ls) {
  ls.validate();
  LargeScaleConditionReport r;
  r.n = ls.n;
  const int m = kCheckGrid;
  const auto un = static_cast<std::size_t>(ls.n);

  const double mu = at(ls.mu, VarId::X, 0.0);
  const double lam = at(ls.lambda[0], VarId::X, 0.0);
  for (int a = 0; a < m; ++a) {
    const double x = grid_point(a, m);
    if (std::abs(at(ls.mu, VarId::X, x) - mu) > 1e-12) throw Error("check_largescale_conditions: mu is not constant");
    for (std::size_t i = 0; i < un; ++i)
      if (std::abs(at(ls.lambda[i], VarId::X, x) - lam) > 1e-12)
        throw Error("check_largescale_conditions: lambda_i must be equal constants");
  }

  ParamFunction sigma_x, theta_x, W_x;
  bool from_template = false;
  if (ls.tmpl) {
    try {
      const SeparableProblem sp = separate(*ls.tmpl);
      for (int i = 1; i <= ls.n; ++i) {
        const double y = sample_point(i, ls.n, ls.placement);
        r.w.push_back(at(sp.W_y, VarId::Y, y));
        r.s1.push_back(at(sp.sigma_y, VarId::Y, y));
        r.s2.push_back(at(sp.sigma_eta, VarId::Y, y));
        r.vartheta.push_back(at(sp.theta_y, VarId::Y, y));
      }
      sigma_x = sp.sigma_x;
      theta_x = sp.theta_x;
      W_x = sp.W_x;
      from_template = true;
    } catch (const NotApplicable&) {
      from_template = false;
    }
  }
  if (!from_template) {
    r.w.clear();
    r.s1.clear();
    r.s2.clear();
    r.vartheta.clear();
    const Profile W = factor_members(ls.W, "W_i");
    const Profile th = factor_members(ls.theta, "theta_i");
    std::vector<ParamFunction> flat;
    for (const auto& row : ls.sigma) flat.insert(flat.end(), row.begin(), row.end());
    const Profile sg = factor_members(flat, "sigma_ij");
    // Rank-one split of the coefficient matrix C_ij = s1_i s2_j.
    std::size_t bi = 0, bj = 0;
    double bv = 0.0;
    for (std::size_t i = 0; i < un; ++i)
      for (std::size_t j = 0; j < un; ++j)
        if (std::abs(sg.coeffs[i * un + j]) > bv) {
          bv = std::abs(sg.coeffs[i * un + j]);
          bi = i;
          bj = j;
        }
    r.s1.assign(un, 0.0);
    r.s2.assign(un, 0.0);
    if (bv > 0.0) {
      for (std::size_t i = 0; i < un; ++i) r.s1[i] = sg.coeffs[i * un + bj];
      for (std::size_t j = 0; j < un; ++j) r.s2[j] = sg.coeffs[bi * un + j] / sg.coeffs[bi * un + bj];
      for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j)
          if (std::abs(sg.coeffs[i * un + j] - r.s1[i] * r.s2[j]) > 1e-10 * bv)
            throw Error("check_largescale_conditions: sigma_ij is not of the form s1_i s2_j sigma_x");
    }
    r.w = W.coeffs;
    r.vartheta = th.coeffs;
    sigma_x = sg.shape;
    theta_x = th.shape;
    W_x = W.shape;
  }

  const auto [c, err] = proportionality(r.vartheta, r.s2);
  if (sup_abs(r.s2) > 0.0 && err <= kProportionalTol) {
    r.proportional = true;
    r.c = c;
  }
  for (std::size_t i = 0; i < un; ++i) {
    r.sum_s1_vartheta += r.s1[i] * r.vartheta[i] / ls.n;
    r.sum_w_vartheta += r.w[i] * r.vartheta[i] / ls.n;
  }

  std::vector<std::string> reasons;
  if (!r.proportional && std::abs(r.sum_s1_vartheta) > kZeroIntegral)
    reasons.push_back("vartheta_i is not proportional to s2_i and (1/n) sum s1_i vartheta_i = " +
                      fmt(r.sum_s1_vartheta) + " is nonzero at this n");

  double mn = std::numeric_limits<double>::infinity();
  for (int a = 0; a < kConditionGrid; ++a) mn = std::min(mn, std::abs(at(theta_x, VarId::X, grid_point(a, kConditionGrid))));
  if (theta_x.is_zero() || mn < kThetaFloor) {
    r.condition_residual = std::numeric_limits<double>::infinity();
    reasons.push_back("theta_x vanishes on [0,1]");
  } else {
    const double c_y = r.proportional ? *r.c * r.sum_s1_vartheta : 0.0;
    const ParamFunction ds = sigma_x.derivative(VarId::X);
    const ParamFunction d1 = theta_x.derivative(VarId::X);
    const ParamFunction d2 = d1.derivative(VarId::X);
    double res = 0.0;
    for (int a = 0; a < kConditionGrid; ++a) {
      const double xi = grid_point(a, kConditionGrid);
      const double t = at(theta_x, VarId::X, xi), t1 = at(d1, VarId::X, xi), t2 = at(d2, VarId::X, xi);
      const double lhs = c_y * at(ds, VarId::X, xi) + lam * (t2 * t - t1 * t1) / (t * t);
      const double rhs = at(W_x, VarId::X, xi) * t * r.sum_w_vartheta;
      res = std::max(res, std::abs(lhs - rhs));
    }
    r.condition_residual = res;
    if (res > kConditionTol) reasons.push_back("finite-n compatibility condition residual " + fmt(res));
  }
  r.conditions_hold = reasons.empty();
  for (const auto& s : reasons) r.reason += (r.reason.empty() ? "" : "; ") + s;
  return r;
}

}  // namespace contkern
