#include "contkern/kernel_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "contkern/error.hpp"
#include "contkern/quadrature.hpp"

namespace contkern {

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw Error("uniform_grid: need at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
  return g;
}

void GainTable::validate() const {
  if (xi.empty()) throw Error("gain table: empty xi grid");
  for (std::size_t i = 1; i < xi.size(); ++i)
    if (!(xi[i] > xi[i - 1])) throw Error("gain table: xi grid is not strictly increasing");
  if (k.rows() != static_cast<Eigen::Index>(xi.size()) || k.cols() != static_cast<Eigen::Index>(y.size()))
    throw Error("gain table: k has the wrong shape");
  if (kbar.size() != xi.size()) throw Error("gain table: kbar has the wrong length");
  if (!k.allFinite()) throw Error("gain table: non-finite k entry");
  for (double v : kbar)
    if (!std::isfinite(v)) throw Error("gain table: non-finite kbar entry");
}

void GainTable::write_csv(std::ostream& out) const {
  validate();
  out << "# kind=" << (sampled ? "sampled" : "continuum") << "\n";
  out << std::setprecision(17);
  out << "xi";
  for (double v : y) out << ",k@" << v;
  out << ",kbar\n";
  for (std::size_t a = 0; a < xi.size(); ++a) {
    out << xi[a];
    for (Eigen::Index b = 0; b < k.cols(); ++b) out << "," << k(static_cast<Eigen::Index>(a), b);
    out << "," << kbar[a] << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("gain table line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

GainTable GainTable::read_csv(std::istream& in) {
  GainTable t;
  std::string line;
  int lineno = 0;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("kind=sampled") != std::string::npos) t.sampled = true;
      continue;
    }
    auto cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2 || cells.front() != "xi" || cells.back() != "kbar")
        throw Error("gain table line " + std::to_string(lineno) + ": expected header xi,k@...,kbar");
      for (std::size_t c = 1; c + 1 < cells.size(); ++c) {
        if (cells[c].rfind("k@", 0) != 0) throw Error("gain table header: column '" + cells[c] + "' is not k@<y>");
        t.y.push_back(parse_double(cells[c].substr(2), lineno));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.y.size() + 2)
      throw Error("gain table line " + std::to_string(lineno) + ": expected " + std::to_string(t.y.size() + 2) +
                  " columns");
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(c, lineno));
    rows.push_back(std::move(r));
  }
  if (!have_header) throw Error("gain table: missing header");
  t.k.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.y.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    t.xi.push_back(rows[a].front());
    for (std::size_t b = 0; b < t.y.size(); ++b)
      t.k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b + 1];
    t.kbar.push_back(rows[a].back());
  }
  t.validate();
  return t;
}

void GainTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write gain table '" + path + "'");
  write_csv(out);
}

GainTable GainTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gain table '" + path + "'");
  return read_csv(in);
}

GainTable gains(const ContinuumKernel& kernel, const std::vector<double>& xi, const std::vector<double>& y) {
  GainTable t;
  t.xi = xi;
  t.y = y;
  t.k.resize(static_cast<Eigen::Index>(xi.size()), static_cast<Eigen::Index>(y.size()));
  for (std::size_t a = 0; a < xi.size(); ++a) {
    for (std::size_t b = 0; b < y.size(); ++b)
      t.k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = kernel.k(1.0, xi[a], y[b]);
    t.kbar.push_back(kernel.kbar(1.0, xi[a]));
  }
  return t;
}

GainTable gains(const ContinuumKernel& kernel, int points) {
  const auto g = uniform_grid(points);
  return gains(kernel, g, g);
}

GainTable sample_gains(const ContinuumKernel& kernel, int n, const std::vector<double>& xi, SamplePlacement placement) {
  if (n < 1) throw Error("sample_gains: n must be positive");
  GainTable t = gains(kernel, xi, q_abscissae(n, placement));
  t.sampled = true;
  return t;
}

GainTable sample_gains(const ContinuumKernel& kernel, int n, int xi_points, SamplePlacement placement) {
  return sample_gains(kernel, n, uniform_grid(xi_points), placement);
}

double KernelResiduals::max() const { return std::max({pde_k, pde_kbar, bc_diag, bc_left}); }

KernelResiduals continuum_residual(const ContinuumKernel& kr, const ContinuumParams& p, int m, double quad_tol) {
  const auto g = uniform_grid(m);
  const ParamFunction dlam_xi = p.lambda.derivative(VarId::X);
  const ParamFunction dmu = p.mu.derivative(VarId::X);
  auto mu_at = [&](double x) { return p.mu.eval(Point{{VarId::X, x}}); };
  KernelResiduals r;
  for (double x : g) {
    const double mux = mu_at(x);
    for (double xi : g) {
      if (xi > x) break;
      const double mxi = mu_at(xi);
      const double dmxi = dmu.eval(Point{{VarId::X, xi}});
      const double kb = kr.kbar(x, xi);
      const double wint = integrate01(
          [&](double y) { return p.W.eval(Point{{VarId::X, xi}, {VarId::Y, y}}) * kr.k(x, xi, y); }, quad_tol);
      r.pde_kbar = std::max(r.pde_kbar, std::abs(mux * kr.kbar_x(x, xi) + mxi * kr.kbar_xi(x, xi) + dmxi * kb - wint));
      for (double y : g) {
        const Point py{{VarId::X, xi}, {VarId::Y, y}};
        const double sint = integrate01(
            [&](double eta) {
              return p.sigma.eval(Point{{VarId::X, xi}, {VarId::ETA, eta}, {VarId::Y, y}}) * kr.k(x, xi, eta);
            },
            quad_tol);
        const double res = mux * kr.k_x(x, xi, y) - p.lambda.eval(py) * kr.k_xi(x, xi, y) - p.theta.eval(py) * kb -
                           kr.k(x, xi, y) * dlam_xi.eval(py) - sint;
        r.pde_k = std::max(r.pde_k, std::abs(res));
      }
    }
    for (double y : g) {
      const Point pxy{{VarId::X, x}, {VarId::Y, y}};
      const double bc = kr.k(x, x, y) + p.theta.eval(pxy) / (p.lambda.eval(pxy) + mux);
      r.bc_diag = std::max(r.bc_diag, std::abs(bc));
    }
    const double qint = integrate01(
        [&](double y) {
          return p.q.eval(Point{{VarId::Y, y}}) * p.lambda.eval(Point{{VarId::X, 0.0}, {VarId::Y, y}}) * kr.k(x, 0.0, y);
        },
        quad_tol);
    r.bc_left = std::max(r.bc_left, std::abs(mu_at(0.0) * kr.kbar(x, 0.0) - qint));
  }
  return r;
}

SampledKernel::SampledKernel(const ContinuumKernel& kernel, int n, SamplePlacement placement)
    : kernel_(kernel), n_(n), y_(q_abscissae(n, placement)) {}

double SampledKernel::k(int i, double x, double xi) const {
  return i == n_ ? kernel_.kbar(x, xi) : kernel_.k(x, xi, y_[static_cast<std::size_t>(i)]);
}

double SampledKernel::k_x(int i, double x, double xi) const {
  return i == n_ ? kernel_.kbar_x(x, xi) : kernel_.k_x(x, xi, y_[static_cast<std::size_t>(i)]);
}

double SampledKernel::k_xi(int i, double x, double xi) const {
  return i == n_ ? kernel_.kbar_xi(x, xi) : kernel_.k_xi(x, xi, y_[static_cast<std::size_t>(i)]);
}

KernelResiduals largescale_residual(const LargeScaleKernel& kr, const LargeScaleParams& ls, int m) {
  ls.validate();
  if (kr.n() != ls.n) throw Error("largescale_residual: kernel and parameters have different n");
  const int n = ls.n;
  const auto un = static_cast<std::size_t>(n);
  const auto g = uniform_grid(m);
  auto f = [](const ParamFunction& pf, double x) { return pf.eval(Point{{VarId::X, x}}); };
  std::vector<ParamFunction> dlam;
  for (const auto& l : ls.lambda) dlam.push_back(l.derivative(VarId::X));
  const ParamFunction dmu = ls.mu.derivative(VarId::X);

  KernelResiduals r;
  std::vector<double> kv(un + 1);
  for (double x : g) {
    const double mux = f(ls.mu, x);
    for (double xi : g) {
      if (xi > x) break;
      for (int j = 0; j <= n; ++j) kv[static_cast<std::size_t>(j)] = kr.k(j, x, xi);
      for (std::size_t i = 0; i < un; ++i) {
        double coupling = 0.0;
        for (std::size_t j = 0; j < un; ++j) coupling += f(ls.sigma[j][i], xi) * kv[j];
        coupling /= n;
        const int ii = static_cast<int>(i);
        const double res = mux * kr.k_x(ii, x, xi) - f(ls.lambda[i], xi) * kr.k_xi(ii, x, xi) -
                           f(dlam[i], xi) * kv[i] - coupling - f(ls.theta[i], xi) * kv[un];
        r.pde_k = std::max(r.pde_k, std::abs(res));
      }
      double wsum = 0.0;
      for (std::size_t j = 0; j < un; ++j) wsum += f(ls.W[j], xi) * kv[j];
      wsum /= n;
      const double res =
          mux * kr.k_x(n, x, xi) + f(ls.mu, xi) * kr.k_xi(n, x, xi) + f(dmu, xi) * kv[un] - wsum;
      r.pde_kbar = std::max(r.pde_kbar, std::abs(res));
    }
    for (std::size_t i = 0; i < un; ++i) {
      const double bc = kr.k(static_cast<int>(i), x, x) + f(ls.theta[i], x) / (f(ls.lambda[i], x) + mux);
      r.bc_diag = std::max(r.bc_diag, std::abs(bc));
    }
    double qs = 0.0;
    for (std::size_t j = 0; j < un; ++j) qs += ls.q[j] * f(ls.lambda[j], 0.0) * kr.k(static_cast<int>(j), x, 0.0);
    r.bc_left = std::max(r.bc_left, std::abs(f(ls.mu, 0.0) * kr.k(n, x, 0.0) - qs / n));
  }
  return r;
}

double diff_solutions(const GainTable& a, const GainTable& b) {
  if (a.xi.size() != b.xi.size() || a.y.size() != b.y.size())
    throw Error("diff_solutions: gain tables are on different grids");
  for (std::size_t i = 0; i < a.xi.size(); ++i)
    if (std::abs(a.xi[i] - b.xi[i]) > 1e-12) throw Error("diff_solutions: xi grids differ");
  for (std::size_t i = 0; i < a.y.size(); ++i)
    if (std::abs(a.y[i] - b.y[i]) > 1e-12) throw Error("diff_solutions: y grids differ");
  double d = a.k.size() ? (a.k - b.k).cwiseAbs().maxCoeff() : 0.0;
  for (std::size_t i = 0; i < a.kbar.size(); ++i) d = std::max(d, std::abs(a.kbar[i] - b.kbar[i]));
  return d;
}

}  // namespace contkern
