#include "contkern/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "contkern/error.hpp"

namespace contkern {

InitialProfile parse_initial_profile(const std::string& name) {
  if (name == "sine") return InitialProfile::Sine;
  if (name == "bump") return InitialProfile::Bump;
  throw ConfigError("unknown initial profile '" + name + "' (expected sine or bump)");
}

std::string to_string(InitialProfile p) { return p == InitialProfile::Sine ? "sine" : "bump"; }

void SimConfig::validate() const {
  if (m_x < 16) throw ConfigError("simulation: m_x must be at least 16");
  if (!(t_final > 0.0)) throw ConfigError("simulation: t_final must be positive");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("simulation: cfl must lie in (0, 1)");
  if (!std::isfinite(amplitude)) throw ConfigError("simulation: amplitude must be finite");
  if (!(stable_ratio > 0.0)) throw ConfigError("simulation: stable_ratio must be positive");
}

namespace {

// Piecewise linear interpolation of (xs, ys) at t (clamped).
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
  if (t <= xs.front()) return ys.front();
  if (t >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), t);
  const auto b = static_cast<std::size_t>(it - xs.begin());
  const double w = (t - xs[b - 1]) / (xs[b] - xs[b - 1]);
  return (1.0 - w) * ys[b - 1] + w * ys[b];
}

}  // namespace

Simulator::Simulator(const LargeScaleParams& ls, const SimConfig& cfg, std::optional<GainTable> gains)
    : n_(ls.n), m_(cfg.m_x), h_(1.0 / (cfg.m_x - 1)), cfg_(cfg) {
  cfg.validate();
  ls.validate();
  const auto un = static_cast<std::size_t>(n_);
  lam_.resize(n_, m_);
  W_.resize(n_, m_);
  theta_.resize(n_, m_);
  mu_.resize(m_);
  sigma_.assign(static_cast<std::size_t>(m_), Eigen::MatrixXd(n_, n_));
  q_ = Eigen::Map<const Eigen::VectorXd>(ls.q.data(), n_);
  double speed = 0.0;
  for (int j = 0; j < m_; ++j) {
    const Point p{{VarId::X, j * h_}};
    mu_(j) = ls.mu.eval(p);
    if (!(mu_(j) > 0.0)) throw Error("simulator: mu must be positive");
    speed = std::max(speed, mu_(j));
    for (std::size_t i = 0; i < un; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      lam_(ii, j) = ls.lambda[i].eval(p);
      if (!(lam_(ii, j) > 0.0)) throw Error("simulator: lambda_i must be positive");
      speed = std::max(speed, lam_(ii, j));
      W_(ii, j) = ls.W[i].eval(p);
      theta_(ii, j) = ls.theta[i].eval(p);
      for (std::size_t k = 0; k < un; ++k)
        sigma_[static_cast<std::size_t>(j)](ii, static_cast<Eigen::Index>(k)) = ls.sigma[i][k].eval(p);
    }
  }
  steps_ = static_cast<int>(std::ceil(cfg.t_final * speed / (cfg.cfl * h_)));
  dt_ = cfg.t_final / steps_;

  if (gains) {
    gains->validate();
    if (gains->k.cols() != n_)
      throw Error("simulator: gain table has " + std::to_string(gains->k.cols()) + " k columns, expected " +
                  std::to_string(n_));
    closed_ = true;
    gk_.resize(n_, m_);
    gkbar_.resize(m_);
    for (int i = 0; i < n_; ++i) {
      std::vector<double> col(gains->xi.size());
      for (std::size_t a = 0; a < col.size(); ++a) col[a] = gains->k(static_cast<Eigen::Index>(a), i);
      for (int j = 0; j < m_; ++j) gk_(i, j) = interp(gains->xi, col, j * h_);
    }
    for (int j = 0; j < m_; ++j) gkbar_(j) = interp(gains->xi, gains->kbar, j * h_);
  }
}

SimState Simulator::initial_state() const {
  SimState s;
  s.u.resize(n_, m_);
  s.v = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < m_; ++j) {
    const double sn = std::sin(std::numbers::pi * j * h_);
    const double val = cfg_.initial == InitialProfile::Sine ? sn : sn * sn;
    s.u.col(j).setConstant(cfg_.amplitude * val);
  }
  apply_boundary(s);
  return s;
}

double Simulator::control(const SimState& s) const {
  if (!closed_) return 0.0;
  // Integrand (1/n) sum_i k^i u^i + kbar v, trapezoid weights.
  double acc = 0.0;
  for (int j = 0; j < m_; ++j) {
    const double w = (j == 0 || j == m_ - 1) ? 0.5 * h_ : h_;
    double f = gk_.col(j).dot(s.u.col(j)) / n_;
    if (j < m_ - 1) f += gkbar_(j) * s.v(j);
    acc += w * f;
  }
  const double denom = 1.0 - 0.5 * h_ * gkbar_(m_ - 1);
  if (std::abs(denom) < 1e-14) throw NumericalError("simulator: singular implicit control relation");
  return acc / denom;
}

void Simulator::apply_boundary(SimState& s) const {
  s.u.col(0) = q_ * s.v(0);
  s.U = control(s);
  s.v(m_ - 1) = s.U;
}

void Simulator::rhs(const SimState& s, Eigen::MatrixXd& du, Eigen::VectorXd& dv) const {
  du.setZero(n_, m_);
  dv.setZero(m_);
  for (int j = 0; j < m_; ++j) {
    const auto col = s.u.col(j);
    if (j > 0) {
      du.col(j) = -(lam_.col(j).array() * (col - s.u.col(j - 1)).array()).matrix() / h_ +
                  sigma_[static_cast<std::size_t>(j)] * col / n_ + W_.col(j) * s.v(j);
    }
    if (j < m_ - 1) dv(j) = mu_(j) * (s.v(j + 1) - s.v(j)) / h_ + theta_.col(j).dot(col) / n_;
  }
}

SimState Simulator::step(const SimState& s, double dt) const {
  Eigen::MatrixXd k1u, k2u, k3u, k4u;
  Eigen::VectorXd k1v, k2v, k3v, k4v;
  auto stage = [&](const Eigen::MatrixXd& du, const Eigen::VectorXd& dv, double c) {
    SimState t;
    t.t = s.t + c * dt;
    t.u = s.u + c * dt * du;
    t.v = s.v + c * dt * dv;
    apply_boundary(t);
    return t;
  };
  rhs(s, k1u, k1v);
  rhs(stage(k1u, k1v, 0.5), k2u, k2v);
  rhs(stage(k2u, k2v, 0.5), k3u, k3v);
  rhs(stage(k3u, k3v, 1.0), k4u, k4v);
  SimState out;
  out.t = s.t + dt;
  out.u = s.u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  out.v = s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  apply_boundary(out);
  return out;
}

double Simulator::norm(const SimState& s) const {
  return std::sqrt(h_ * (s.u.squaredNorm() / n_ + s.v.squaredNorm()));
}

void SimReport::write_csv(std::ostream& out) const {
  out << std::setprecision(17) << "t,U,norm\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << "," << U[i] << "," << norm[i] << "\n";
}

void SimReport::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_csv(f);
}

SimReport run(const SimConfig& cfg, const LargeScaleParams& ls, std::optional<GainTable> gains) {
  const Simulator sim(ls, cfg, std::move(gains));
  SimState s = sim.initial_state();
  SimReport r;
  r.initial_norm = sim.norm(s);
  auto record = [&] {
    r.t.push_back(s.t);
    r.U.push_back(s.U);
    r.norm.push_back(sim.norm(s));
  };
  record();
  const double blowup = 1e12 * std::max(r.initial_norm, 1e-300);
  for (int k = 0; k < sim.steps(); ++k) {
    s = sim.step(s, sim.dt());
    record();
    if (!std::isfinite(r.norm.back()) || r.norm.back() > blowup) {
      r.diverged = true;
      break;
    }
  }
  r.final_norm = r.norm.back();
  r.stable = !r.diverged && r.final_norm < cfg.stable_ratio * r.initial_norm;
  return r;
}

double max_control_diff(const SimReport& a, const SimReport& b) {
  if (a.t.size() != b.t.size()) throw Error("max_control_diff: reports have different time grids");
  double d = 0.0;
  for (std::size_t i = 0; i < a.U.size(); ++i) d = std::max(d, std::abs(a.U[i] - b.U[i]));
  return d;
}

double max_abs_control(const SimReport& r) {
  double d = 0.0;
  for (double u : r.U) d = std::max(d, std::abs(u));
  return d;
}

}  // namespace contkern
