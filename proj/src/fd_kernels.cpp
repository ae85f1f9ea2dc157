#include "contkern/fd_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contkern/error.hpp"

namespace contkern {

TriGrid::TriGrid(int m_) : m(m_) {
  if (m < 2) throw Error("TriGrid: need m >= 2");
}

namespace {

// Linear interpolation of row a (nodes b = 0..a) at xi.
double row_interp(const Eigen::MatrixXd& f, int a, double xi, double h) {
  if (a == 0) return f(0, 0);
  const double s = std::clamp(xi / h, 0.0, static_cast<double>(a));
  const int b0 = std::min(static_cast<int>(s), a - 1);
  const double t = s - b0;
  return (1.0 - t) * f(a, b0) + t * f(a, b0 + 1);
}

// Linear interpolation along the diagonal at x = xi = d.
double diag_interp(const Eigen::MatrixXd& f, double d, int m) {
  const double s = std::clamp(d * m, 0.0, static_cast<double>(m));
  const int a0 = std::min(static_cast<int>(s), m - 1);
  const double t = s - a0;
  return (1.0 - t) * f(a0, a0) + t * f(a0 + 1, a0 + 1);
}

// Linear interpolation along xi = 0 at x.
double col0_interp(const Eigen::MatrixXd& f, double x, int m) {
  const double s = std::clamp(x * m, 0.0, static_cast<double>(m));
  const int a0 = std::min(static_cast<int>(s), m - 1);
  const double t = s - a0;
  return (1.0 - t) * f(a0, 0) + t * f(a0 + 1, 0);
}

double lin(const std::vector<double>& table, double t, int m) {
  const double s = std::clamp(t * m, 0.0, static_cast<double>(m));
  const int a0 = std::min(static_cast<int>(s), m - 1);
  const double w = s - a0;
  return (1.0 - w) * table[static_cast<std::size_t>(a0)] + w * table[static_cast<std::size_t>(a0 + 1)];
}

std::vector<double> tabulate(const ParamFunction& f, int m) {
  std::vector<double> v(static_cast<std::size_t>(m + 1));
  for (int a = 0; a <= m; ++a) v[static_cast<std::size_t>(a)] = f.eval(Point{{VarId::X, static_cast<double>(a) / m}});
  return v;
}

}  // namespace

double LsKernelSolution::value(int i, double x, double xi) const {
  const int m = grid.m;
  const Eigen::MatrixXd& f = k.at(static_cast<std::size_t>(i));
  x = std::clamp(x, 0.0, 1.0);
  xi = std::clamp(xi, 0.0, x);
  const double sx = x * m, sxi = xi * m;
  int a0 = std::min(static_cast<int>(sx), m - 1);
  int b0 = std::min(static_cast<int>(sxi), m - 1);
  const double tx = sx - a0, txi = sxi - b0;
  if (b0 < a0) {
    return (1 - tx) * (1 - txi) * f(a0, b0) + tx * (1 - txi) * f(a0 + 1, b0) + (1 - tx) * txi * f(a0, b0 + 1) +
           tx * txi * f(a0 + 1, b0 + 1);
  }
  // Cell cut by the diagonal: linear on the lower triangle (a0,a0), (a0+1,a0), (a0+1,a0+1).
  return f(a0, a0) + tx * (f(a0 + 1, a0) - f(a0, a0)) + txi * (f(a0 + 1, a0 + 1) - f(a0 + 1, a0));
}

GainTable LsKernelSolution::gain_table(SamplePlacement placement) const {
  const int m = grid.m;
  GainTable t;
  t.sampled = true;
  t.y = q_abscissae(n, placement);
  t.k.resize(m + 1, n);
  for (int b = 0; b <= m; ++b) {
    t.xi.push_back(static_cast<double>(b) / m);
    for (int i = 0; i < n; ++i) t.k(b, i) = k[static_cast<std::size_t>(i)](m, b);
    t.kbar.push_back(k[static_cast<std::size_t>(n)](m, b));
  }
  return t;
}

LsKernelSolution solve_characteristics(const LargeScaleParams& ls, const TriGrid& grid, const FdOptions& opts) {
  ls.validate();
  const PositivityReport pos = check_positivity(ls);
  if (!pos.pass) throw Error("solve_characteristics: lambda_i and mu must be positive");
  const int m = grid.m;
  const int n = ls.n;
  const auto un = static_cast<std::size_t>(n);
  const double h = grid.h();

  // Parameter tables on the nodes t_a = a h.
  std::vector<std::vector<double>> lam(un), dlam(un), theta(un), W(un), bc(un);
  std::vector<std::vector<std::vector<double>>> sigma(un, std::vector<std::vector<double>>(un));
  const std::vector<double> mu = tabulate(ls.mu, m);
  const std::vector<double> dmu = tabulate(ls.mu.derivative(VarId::X), m);
  for (std::size_t i = 0; i < un; ++i) {
    lam[i] = tabulate(ls.lambda[i], m);
    dlam[i] = tabulate(ls.lambda[i].derivative(VarId::X), m);
    theta[i] = tabulate(ls.theta[i], m);
    W[i] = tabulate(ls.W[i], m);
    bc[i].resize(static_cast<std::size_t>(m + 1));
    for (std::size_t a = 0; a <= static_cast<std::size_t>(m); ++a) bc[i][a] = -theta[i][a] / (lam[i][a] + mu[a]);
    for (std::size_t j = 0; j < un; ++j) sigma[i][j] = tabulate(ls.sigma[i][j], m);
  }
  std::vector<double> qlam0(un);
  for (std::size_t j = 0; j < un; ++j) qlam0[j] = ls.q[j] * lam[j][0] / (mu[0] * n);

  LsKernelSolution sol;
  sol.grid = grid;
  sol.n = n;
  sol.k.assign(un + 1, Eigen::MatrixXd::Zero(m + 1, m + 1));
  std::vector<Eigen::MatrixXd> R(un + 1, Eigen::MatrixXd::Zero(m + 1, m + 1));
  std::vector<Eigen::MatrixXd> next = sol.k;

  auto bc_at = [&](std::size_t i, double x) {
    const Point p{{VarId::X, x}};
    return -ls.theta[i].eval(p) / (ls.lambda[i].eval(p) + ls.mu.eval(p));
  };

  double delta = 0.0;
  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    // Source terms of the previous iterate on all nodes, divided by mu(x)
    // (d/dx along a characteristic).
    for (int a = 0; a <= m; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      for (int b = 0; b <= a; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        for (std::size_t i = 0; i < un; ++i) {
          double s = dlam[i][ub] * sol.k[i](a, b) + theta[i][ub] * sol.k[un](a, b);
          double c = 0.0;
          for (std::size_t j = 0; j < un; ++j) c += sigma[j][i][ub] * sol.k[j](a, b);
          R[i](a, b) = (s + c / n) / mu[ua];
        }
        double w = -dmu[ub] * sol.k[un](a, b);
        double c = 0.0;
        for (std::size_t j = 0; j < un; ++j) c += W[j][ub] * sol.k[j](a, b);
        R[un](a, b) = (w + c / n) / mu[ua];
      }
    }

    for (int a = 0; a <= m; ++a) {
      const double x = a * h;
      const double mux = mu[static_cast<std::size_t>(a)];
      // k^i: trace back (x decreasing, xi increasing) to the diagonal.
      for (std::size_t i = 0; i < un; ++i) {
        next[i](a, a) = bc[i][static_cast<std::size_t>(a)];
        for (int b = 0; b < a; ++b) {
          const double xi = b * h;
          const double r1 = lin(lam[i], xi, m) / mux;
          const double xp = x - h;
          double xip = xi + h * r1;
          const double r2 = lin(lam[i], std::min(xip, 1.0), m) / mu[static_cast<std::size_t>(a - 1)];
          xip = xi + h * 0.5 * (r1 + r2);
          if (xip >= xp - 1e-12 * h) {
            // Reaches the diagonal within this step.
            const double rr = 0.5 * (r1 + r2);
            const double d = (x - xi) / (1.0 + rr);
            const double xd = x - d;
            const double gd = diag_interp(R[i], xd, m);
            next[i](a, b) = bc_at(i, xd) + 0.5 * d * (R[i](a, b) + gd);
          } else {
            const double prev = row_interp(next[i], a - 1, xip, h);
            const double g = row_interp(R[i], a - 1, xip, h);
            next[i](a, b) = prev + 0.5 * h * (R[i](a, b) + g);
          }
        }
      }
      // k^{n+1}: trace back (both decreasing) to xi = 0.
      {
        Eigen::MatrixXd& kn = next[un];
        auto boundary = [&](double xb) {
          double s = 0.0;
          for (std::size_t j = 0; j < un; ++j) s += qlam0[j] * col0_interp(next[j], xb, m);
          return s;
        };
        kn(a, 0) = boundary(x);
        for (int b = 1; b <= a; ++b) {
          const double xi = b * h;
          const double r1 = lin(mu, xi, m) / mux;
          double xip = xi - h * r1;
          const double r2 = lin(mu, std::max(xip, 0.0), m) / mu[static_cast<std::size_t>(a - 1)];
          const double rr = 0.5 * (r1 + r2);
          xip = xi - h * rr;
          if (xip <= 1e-12 * h) {
            const double d = xi / rr;
            const double xb = x - d;
            const double gb = col0_interp(R[un], xb, m);
            kn(a, b) = boundary(xb) + 0.5 * d * (R[un](a, b) + gb);
          } else {
            const double prev = row_interp(kn, a - 1, xip, h);
            const double g = row_interp(R[un], a - 1, xip, h);
            kn(a, b) = prev + 0.5 * h * (R[un](a, b) + g);
          }
        }
      }
    }

    delta = 0.0;
    for (std::size_t i = 0; i <= un; ++i)
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= a; ++b) delta = std::max(delta, std::abs(next[i](a, b) - sol.k[i](a, b)));
    std::swap(sol.k, next);
    if (!std::isfinite(delta)) break;
    if (delta < opts.tol) break;
  }
  sol.iterations = std::min(it, opts.max_iter);
  sol.final_delta = delta;
  if (!(delta < opts.tol)) {
    std::ostringstream os;
    os << "solve_characteristics: no convergence after " << sol.iterations << " sweeps (last change " << delta << ")";
    throw NumericalError(os.str());
  }
  return sol;
}

double FdKernel::k_x(int i, double x, double xi) const {
  const double h = sol_.grid.h();
  const double lo = std::max(x - h, xi), hi = std::min(x + h, 1.0);
  if (hi > lo) return (sol_.value(i, hi, xi) - sol_.value(i, lo, xi)) / (hi - lo);
  // Corner x = xi = 1: derivative along the diagonal minus k_xi.
  const double d = (sol_.value(i, x, x) - sol_.value(i, x - h, x - h)) / h;
  return d - k_xi(i, x, xi);
}

double FdKernel::k_xi(int i, double x, double xi) const {
  const double h = sol_.grid.h();
  const double lo = std::max(xi - h, 0.0), hi = std::min(xi + h, x);
  if (hi > lo) return (sol_.value(i, x, hi) - sol_.value(i, x, lo)) / (hi - lo);
  // Corner x = xi = 0.
  const double d = (sol_.value(i, x + h, x + h) - sol_.value(i, x, x)) / h;
  return d - k_x(i, x, xi);
}

RefinementReport refine_study(const LargeScaleParams& ls, const std::vector<int>& m_list, const FdOptions& opts) {
  for (std::size_t i = 1; i < m_list.size(); ++i)
    if (m_list[i] <= m_list[i - 1]) throw Error("refine_study: m_list must be increasing");
  RefinementReport rep;
  rep.m = m_list;
  std::vector<LsKernelSolution> sols;
  for (int m : m_list) {
    sols.push_back(solve_characteristics(ls, TriGrid(m), opts));
    rep.iterations.push_back(sols.back().iterations);
  }
  for (std::size_t s = 0; s + 1 < sols.size(); ++s) {
    const LsKernelSolution& c = sols[s];
    const LsKernelSolution& f = sols[s + 1];
    const int m = c.grid.m;
    double d = 0.0;
    for (int i = 0; i <= c.n; ++i)
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= a; ++b) {
          const double x = static_cast<double>(a) / m, xi = static_cast<double>(b) / m;
          d = std::max(d, std::abs(c.k[static_cast<std::size_t>(i)](a, b) - f.value(i, x, xi)));
        }
    rep.diffs.push_back(d);
  }
  for (std::size_t s = 0; s + 1 < rep.diffs.size(); ++s)
    rep.ratios.push_back(rep.diffs[s + 1] > 0.0 ? rep.diffs[s] / rep.diffs[s + 1] : 0.0);
  return rep;
}

}  // namespace contkern
