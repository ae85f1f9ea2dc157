#include "contkern/builtin.hpp"

#include <cmath>
#include <numbers>

namespace contkern::builtin {

namespace {

using factor::Cos;
using factor::Exp;
using factor::Polynomial;

AnalyticFactor poly(VarId v, std::vector<double> c) { return AnalyticFactor{Polynomial{std::move(c)}, v}; }

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

}  // namespace

ContinuumParams example1() {
  ContinuumParams p;
  p.lambda = ParamFunction::constant(1.0);
  p.mu = ParamFunction::constant(1.0);
  // x^3 (x+1) (eta - 1/2) (y - 1/2)
  p.sigma = ParamFunction::single(
      {1.0, {poly(VarId::X, {0, 0, 0, 1, 1}), poly(VarId::ETA, {-0.5, 1}), poly(VarId::Y, {-0.5, 1})}});
  // x (x+1) e^x (y - 1/2)
  p.W = ParamFunction::single(
      {1.0, {poly(VarId::X, {0, 1, 1}), AnalyticFactor{Exp{1.0}, VarId::X}, poly(VarId::Y, {-0.5, 1})}});
  // -70 e^{35 x / pi^2} y (y - 1)
  p.theta = ParamFunction::single({-70.0, {AnalyticFactor{Exp{35.0 / kPi2}, VarId::X}, poly(VarId::Y, {0, -1, 1})}});
  p.q = ParamFunction::single({1.0, {AnalyticFactor{Cos{2.0 * std::numbers::pi, 0.0}, VarId::Y}}});
  return p;
}

double example1_k(double /*x*/, double xi, double y) { return 35.0 * y * (y - 1.0) * std::exp(35.0 / kPi2 * xi); }

double example1_kbar(double /*x*/, double /*xi*/) { return 35.0 / (2.0 * kPi2); }

namespace {

ContinuumParams example2_template() {
  ContinuumParams p;
  p.lambda = ParamFunction::constant(1.0);
  p.mu = ParamFunction::constant(1.0);
  // x^3 (x+1) (i/n - 1)(j/n - 1): i/n -> eta, j/n -> y
  p.sigma = ParamFunction::single(
      {1.0, {poly(VarId::X, {0, 0, 0, 1, 1}), poly(VarId::ETA, {-1, 1}), poly(VarId::Y, {-1, 1})}});
  p.W = ParamFunction::single({2.0, {poly(VarId::X, {0, 1, 1}), poly(VarId::Y, {0, 1})}});
  p.theta = ParamFunction::single({-70.0, {poly(VarId::X, {0, 1}), poly(VarId::Y, {0, -1, 1})}});
  return p;
}

}  // namespace

LargeScaleParams example2_large_scale(int n) {
  ContinuumParams t = example2_template();
  LargeScaleParams ls = sample_continuum(t, n);
  if (n == static_cast<int>(kExample2Q.size())) {
    ls.q.assign(kExample2Q.begin(), kExample2Q.end());
  } else {
    // Other ensemble sizes reuse the noiseless profile y(y-1).
    for (int i = 1; i <= n; ++i) {
      const double y = sample_point(i, n);
      ls.q[static_cast<std::size_t>(i - 1)] = y * (y - 1.0);
    }
  }
  ls.tmpl_has_q = false;
  return ls;
}

ContinuumParams example2_continuum(int q_fit_degree) {
  return lift_separable(example2_large_scale(), LiftOptions{q_fit_degree});
}

ContinuumParams zero_problem() {
  ContinuumParams p;
  p.lambda = ParamFunction::constant(1.0);
  p.mu = ParamFunction::constant(1.0);
  return p;
}

}  // namespace contkern::builtin
