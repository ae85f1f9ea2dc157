#pragma once

// Independent reference values for the tests. Nothing here calls the
// library's numerics: integrals use composite Simpson rules, fits use the
// normal equations, and closed-form kernels are typed out by hand.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "contkern/analytic.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;
inline constexpr double pi2 = pi * pi;

inline double simpson(const std::function<double(double)>& f, double a = 0.0, double b = 1.0, int panels = 2000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// k = 35 y (y - 1) e^{35 xi / pi^2}, kbar = 35 / (2 pi^2).
inline double ex1_k(double /*x*/, double xi, double y) { return 35.0 * y * (y - 1.0) * std::exp(35.0 * xi / pi2); }
inline double ex1_kbar() { return 35.0 / (2.0 * pi2); }

// Least-squares polynomial through (y, q) by the normal equations.
inline std::vector<double> normal_fit(const std::vector<double>& y, const std::vector<double>& q, int degree) {
  Eigen::MatrixXd V(static_cast<Eigen::Index>(y.size()), degree + 1);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (int k = 0; k <= degree; ++k) V(static_cast<Eigen::Index>(i), k) = std::pow(y[i], k);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  const Eigen::VectorXd c = (V.transpose() * V).ldlt().solve(V.transpose() * b);
  return {c.data(), c.data() + c.size()};
}

}  // namespace oracle

namespace helpers {

inline contkern::AnalyticFactor poly(contkern::VarId v, std::vector<double> c) {
  return contkern::AnalyticFactor{contkern::factor::Polynomial{std::move(c)}, v};
}

inline contkern::AnalyticFactor expf(contkern::VarId v, double rate) {
  return contkern::AnalyticFactor{contkern::factor::Exp{rate}, v};
}

inline contkern::Point at(double x) { return contkern::Point{{contkern::VarId::X, x}}; }

// Random sparse series over `vars` with degree at most `deg` per variable.
inline contkern::TruncatedSeries random_series(std::mt19937& rng, contkern::VarSet vars, int deg, int terms) {
  using namespace contkern;
  Caps caps{};
  for (VarId v : kAllVars)
    if (vars.contains(v)) caps[static_cast<std::size_t>(index_of(v))] = deg;
  TruncatedSeries s(vars, caps);
  std::uniform_int_distribution<int> e(0, deg);
  std::uniform_int_distribution<int> c(-9, 9);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    for (VarId v : kAllVars)
      if (vars.contains(v)) m[v] = e(rng);
    // Small integers keep products exact in double precision.
    s.add_term(m, c(rng));
  }
  return s;
}

}  // namespace helpers
