#include <doctest.h>

#include <cmath>

#include "contkern/builtin.hpp"
#include "contkern/closed_form.hpp"
#include "contkern/kernel_eval.hpp"
#include "support.hpp"

using namespace contkern;
using helpers::poly;

namespace {

ContinuumParams exp_theta_problem(double a) {
  ContinuumParams p = builtin::zero_problem();
  p.theta = ParamFunction::single({1.0, {helpers::expf(VarId::X, a), poly(VarId::Y, {0, -1, 1})}});
  return p;
}

// sigma = 30 eta (eta - 1) 3 y (y - 1), theta = -e^x y (y - 1), lambda = mu = 1.
ContinuumParams cy3_problem() {
  ContinuumParams p = builtin::zero_problem();
  p.sigma = ParamFunction::single({1.0, {poly(VarId::ETA, {0, -30, 30}), poly(VarId::Y, {0, -3, 3})}});
  p.theta = ParamFunction::single({-1.0, {helpers::expf(VarId::X, 1.0), poly(VarId::Y, {0, -1, 1})}});
  return p;
}

}  // namespace

TEST_CASE("example 1 closed form") {
  const ClosedFormKernel kern = solve_closed_form(builtin::example1());
  CHECK(std::abs(kern.c_x()) < 1e-10);
  REQUIRE(kern.c_y());
  CHECK(std::abs(*kern.c_y()) < 1e-10);

  double err = 0.0;
  for (int a = 0; a <= 20; ++a) {
    const double x = a / 20.0;
    for (int b = 0; b <= a; ++b) {
      const double xi = b / 20.0;
      err = std::max(err, std::abs(kern.kbar(x, xi) - oracle::ex1_kbar()));
      for (int c = 0; c <= 20; ++c) {
        const double y = c / 20.0;
        err = std::max(err, std::abs(kern.k(x, xi, y) - oracle::ex1_k(x, xi, y)));
      }
    }
  }
  CHECK(err < 1e-10);
  CHECK(continuum_residual(kern, builtin::example1()).max() < 1e-8);
}

TEST_CASE("nonzero c_y and c_x") {
  const ContinuumParams p = cy3_problem();
  const ClosedFormKernel kern = solve_closed_form(p);
  // c_y = (sigma_eta / theta_y) int sigma_y theta_y with sigma_eta = 3 theta_y.
  const double integral = oracle::simpson([](double e) { return 30.0 * e * (e - 1.0) * e * (e - 1.0); });
  REQUIRE(kern.c_y());
  CHECK(*kern.c_y() == doctest::Approx(3.0 * integral).epsilon(1e-10));
  CHECK(*kern.c_y() == doctest::Approx(3.0));
  // With lambda = mu = 1, theta_x = e^x and kbar = 0 the transport equation of
  // k reduces to 2 c_x - 1 - c_y = 0.
  CHECK(kern.c_x() == doctest::Approx((1.0 + *kern.c_y()) / 2.0));
  CHECK(continuum_residual(kern, p).max() < 1e-8);
}

TEST_CASE("property: theta = e^{a x} y (y-1) gives c_x = a / 2") {
  for (double a : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    const ContinuumParams p = exp_theta_problem(a);
    const ClosedFormKernel kern = solve_closed_form(p);
    CHECK(kern.c_x() == doctest::Approx(a / 2.0).epsilon(1e-10).scale(1.0));
    CHECK(continuum_residual(kern, p, 11).max() < 1e-8);
    // k(x, x, y) = -theta(x, y) / (lambda + mu).
    for (double x : {0.0, 0.4, 1.0})
      CHECK(kern.k(x, x, 0.3) == doctest::Approx(-std::exp(a * x) * 0.3 * (0.3 - 1.0) / 2.0));
  }
}

TEST_CASE("property: closed-form kernels satisfy the kernel equations for scaled example 1") {
  // Scaling sigma and W keeps the conditions (both integrals vanish).
  for (double s : {0.5, 2.0, -1.0}) {
    ContinuumParams p = builtin::example1();
    p.sigma = p.sigma.scaled(s);
    p.W = p.W.scaled(s);
    const ClosedFormKernel kern = solve_closed_form(p);
    CHECK(continuum_residual(kern, p, 11).max() < 1e-8);
  }
}

TEST_CASE("conditions that fail") {
  SUBCASE("example 2 has no constant c_y") {
    try {
      solve_closed_form(builtin::example2_continuum(2));
      FAIL("expected NotApplicable");
    } catch (const NotApplicable& e) {
      CHECK(std::string(e.what()).find("c_y") != std::string::npos);
    }
  }
  SUBCASE("W_y = y breaks the compatibility condition") {
    ContinuumParams p = builtin::example1();
    p.W = ParamFunction::single({1.0, {poly(VarId::X, {0, 1, 1}), helpers::expf(VarId::X, 1.0), poly(VarId::Y, {0, 1})}});
    CHECK_THROWS_AS(solve_closed_form(p), NotApplicable);
  }
  SUBCASE("non-constant mu") {
    ContinuumParams p = builtin::example1();
    p.mu = ParamFunction::polynomial(VarId::X, {1.0, 0.5});
    CHECK_THROWS_AS(separate(p), NotApplicable);
  }
  SUBCASE("sigma with two terms") {
    ContinuumParams p = builtin::example1();
    p.sigma = p.sigma + ParamFunction::single({1.0, {poly(VarId::ETA, {0, 1})}});
    CHECK_THROWS_AS(separate(p), NotApplicable);
  }
  SUBCASE("lambda depending on x") {
    ContinuumParams p = builtin::example1();
    p.lambda = ParamFunction::polynomial(VarId::X, {1.0, 1.0});
    CHECK_THROWS_AS(separate(p), NotApplicable);
  }
}

TEST_CASE("check_cy") {
  SeparableProblem sp = separate(builtin::example1());
  CyCheck c = check_cy(sp);
  CHECK(c.applicable);
  // int (eta - 1/2) eta (eta - 1) = 0 gives c_y = 0 without proportionality.
  CHECK(std::abs(c.integral) < 1e-14);
  CHECK(c.c_y == 0.0);

  sp = separate(builtin::example2_continuum(2));
  c = check_cy(sp);
  CHECK_FALSE(c.applicable);
  // int (eta - 1) eta (eta - 1) = 1/12, up to the factor normalization.
  const double ref = oracle::simpson([](double e) { return (e - 1.0) * e * (e - 1.0); });
  const double scale = sp.sigma_y.eval(Point{{VarId::Y, 0.5}}) * sp.theta_y.eval(Point{{VarId::Y, 0.5}}) /
                       ((0.5 - 1.0) * 0.5 * (0.5 - 1.0));
  CHECK(c.integral == doctest::Approx(scale * ref));
  CHECK_FALSE(c.reason.empty());
}

TEST_CASE("build_f reports the compatibility residual") {
  const SeparableProblem sp = separate(builtin::example1());
  const double cy = check_cy(sp).c_y;
  const FReport r = build_f(sp, compute_cx(sp, cy), cy);
  CHECK(r.holds);
  CHECK(r.condition_residual < 1e-8);
  for (double xi : {0.0, 0.5, 1.0}) CHECK(r.f(xi) == doctest::Approx(oracle::ex1_kbar()));
}

TEST_CASE("large-scale conditions") {
  SUBCASE("sampled example 1") {
    const LargeScaleParams ls = sample_continuum(builtin::example1(), 10);
    const auto r = check_largescale_conditions(ls);
    CHECK(r.n == 10);
    // sigma_eta = y - 1/2 is not a multiple of theta_y = y (y - 1).
    CHECK_FALSE(r.proportional);
    REQUIRE(r.s1.size() == 10);
    REQUIRE(r.vartheta.size() == 10);
    double direct = 0.0;
    for (int i = 0; i < 10; ++i) direct += r.s1[i] * r.vartheta[i] / 10.0;
    CHECK(r.sum_s1_vartheta == doctest::Approx(direct).scale(1.0));
    // (1/n) sum (y_i - 1/2) y_i (y_i - 1) over y_i = i/n vanishes by symmetry
    // about 1/2, as does the continuum integral.
    double s = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double y = i / 10.0;
      s += (y - 0.5) * y * (y - 1.0) / 10.0;
    }
    CHECK(std::abs(s) < 1e-15);
    CHECK(std::abs(r.sum_s1_vartheta) < 1e-12);
  }
  SUBCASE("example 2 is not proportional") {
    const auto r = check_largescale_conditions(builtin::example2_large_scale(10));
    CHECK_FALSE(r.proportional);
    CHECK_FALSE(r.conditions_hold);
    CHECK_FALSE(r.reason.empty());
  }
}
