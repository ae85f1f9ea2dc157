#include <doctest.h>

#include "contkern/builtin.hpp"
#include "contkern/config.hpp"
#include "contkern/error.hpp"
#include "contkern/problem.hpp"
#include "support.hpp"

using namespace contkern;
using helpers::at;
using helpers::poly;

TEST_CASE("sample_continuum") {
  const ContinuumParams c = builtin::example2_continuum(2);
  const LargeScaleParams ls = sample_continuum(c, 10);
  REQUIRE(ls.n == 10);
  SUBCASE("sigma_{n,n} vanishes") {
    for (double x : {0.0, 0.3, 1.0}) CHECK(ls.sigma[9][9].eval(at(x)) == 0.0);
  }
  SUBCASE("theta_5 = 17.5 x") {
    for (double x : {0.0, 0.25, 1.0}) CHECK(ls.theta[4].eval(at(x)) == doctest::Approx(17.5 * x));
  }
  SUBCASE("sigma index convention sigma_{i,j} = sigma(x, i/n, j/n)") {
    // x^3 (x+1) (i/n - 1)(j/n - 1) at x = 0.5, i = 2, j = 7.
    const double x = 0.5, expect = x * x * x * (x + 1) * (0.2 - 1) * (0.7 - 1);
    CHECK(ls.sigma[1][6].eval(at(x)) == doctest::Approx(expect));
  }
  SUBCASE("asymmetric sigma: the first index samples eta") {
    ContinuumParams a = builtin::zero_problem();
    a.sigma = ParamFunction::single({1.0, {poly(VarId::ETA, {0, 1}), poly(VarId::Y, {0, 0, 1})}});
    const LargeScaleParams s = sample_continuum(a, 5);
    CHECK(s.sigma[1][3].eval(at(0.5)) == doctest::Approx(0.4 * 0.8 * 0.8));
    CHECK(s.sigma[3][1].eval(at(0.5)) == doctest::Approx(0.8 * 0.4 * 0.4));
  }
  SUBCASE("constant lambda") {
    for (const auto& l : ls.lambda) CHECK(l.eval(at(0.4)) == 1.0);
  }
  SUBCASE("left placement") {
    const auto left = sample_continuum(c, 10, SamplePlacement::Left);
    CHECK(left.theta[0].eval(at(1.0)) == doctest::Approx(0.0));
    CHECK(sample_point(1, 10, SamplePlacement::Left) == 0.0);
    CHECK(sample_point(10, 10) == 1.0);
  }
}

TEST_CASE("lift_separable reproduces the continuum parameters of the n+1 example") {
  const LargeScaleParams ls = builtin::example2_large_scale(10);
  const ContinuumParams c = lift_separable(ls, LiftOptions{2});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double x = u(rng), y = u(rng), eta = u(rng);
    const Point p{{VarId::X, x}, {VarId::Y, y}, {VarId::ETA, eta}};
    CHECK(c.lambda.eval(p) == doctest::Approx(1.0));
    CHECK(c.mu.eval(p) == doctest::Approx(1.0));
    CHECK(c.sigma.eval(p) == doctest::Approx(x * x * x * (x + 1) * (eta - 1) * (y - 1)));
    CHECK(c.W.eval(p) == doctest::Approx(2 * x * (x + 1) * y));
    CHECK(c.theta.eval(p) == doctest::Approx(-70 * x * y * (y - 1)));
  }
  // q is the degree-2 least-squares fit of the data.
  std::vector<double> y, q(builtin::kExample2Q.begin(), builtin::kExample2Q.end());
  for (int i = 1; i <= 10; ++i) y.push_back(i / 10.0);
  const auto fit = oracle::normal_fit(y, q, 2);
  for (double t : {0.0, 0.5, 1.0})
    CHECK(c.q.eval(Point{{VarId::Y, t}}) == doctest::Approx(fit[0] + fit[1] * t + fit[2] * t * t).epsilon(1e-9));
}

TEST_CASE("property: sample(lift(ls)) reproduces ls") {
  const LargeScaleParams ls = builtin::example2_large_scale(10);
  const LargeScaleParams back = sample_continuum(lift_separable(ls, LiftOptions{2}), 10);
  for (double x : {0.0, 0.37, 1.0}) {
    for (int i = 0; i < 10; ++i) {
      CHECK(back.lambda[i].eval(at(x)) == doctest::Approx(ls.lambda[i].eval(at(x))).epsilon(1e-14));
      CHECK(back.theta[i].eval(at(x)) == doctest::Approx(ls.theta[i].eval(at(x))).epsilon(1e-14));
      CHECK(back.W[i].eval(at(x)) == doctest::Approx(ls.W[i].eval(at(x))).epsilon(1e-14));
      for (int j = 0; j < 10; ++j)
        CHECK(back.sigma[i][j].eval(at(x)) == doctest::Approx(ls.sigma[i][j].eval(at(x))).epsilon(1e-14));
    }
  }
  // The constant family lifts to a constant.
  LargeScaleParams flat = sample_continuum(builtin::zero_problem(), 4);
  const ContinuumParams lifted = lift_separable(flat);
  CHECK_FALSE(lifted.lambda.depends_on(VarId::Y));
  CHECK(lifted.lambda.eval(Point{{VarId::X, 0.2}, {VarId::Y, 0.9}}) == 1.0);
}

TEST_CASE("lift_separable rejects data without a template") {
  LargeScaleParams ls = builtin::example2_large_scale(10);
  ls.tmpl.reset();
  CHECK_THROWS_AS(lift_separable(ls), Error);
}

TEST_CASE("fit_q") {
  std::vector<double> y, q;
  for (int i = 1; i <= 10; ++i) {
    y.push_back(i / 10.0);
    q.push_back(y.back() * (y.back() - 1.0));
  }
  SUBCASE("exact quadratic") {
    const FitResult f = fit_q(y, q, 2);
    REQUIRE(f.coeffs.size() == 3);
    CHECK(std::abs(f.coeffs[0]) < 1e-10);
    CHECK(f.coeffs[1] == doctest::Approx(-1.0));
    CHECK(f.coeffs[2] == doctest::Approx(1.0));
    CHECK(f.rms_error < 1e-12);
  }
  SUBCASE("noisy data against the normal equations") {
    const std::vector<double> d(builtin::kExample2Q.begin(), builtin::kExample2Q.end());
    for (int m = 0; m <= 6; ++m) {
      const FitResult f = fit_q(y, d, m);
      const auto ref = oracle::normal_fit(y, d, m);
      for (int k = 0; k <= m; ++k) CHECK(f.coeffs[k] == doctest::Approx(ref[k]).epsilon(1e-6).scale(1.0));
    }
  }
  SUBCASE("interpolation at M = points - 1") {
    const std::vector<double> yy{0.1, 0.4, 0.6, 0.9}, qq{1.0, -2.0, 0.5, 3.0};
    CHECK(fit_q(yy, qq, 3).rms_error < 1e-10);
  }
  SUBCASE("property: rms non-increasing in M") {
    const std::vector<double> d(builtin::kExample2Q.begin(), builtin::kExample2Q.end());
    double prev = 1e300;
    for (int m = 0; m <= 9; ++m) {
      const double r = fit_q(y, d, m).rms_error;
      CHECK(r <= prev + 1e-14);
      prev = r;
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fit_q(y, q, 10), Error);
    const std::vector<double> dup{0.1, 0.1, 0.5}, qd{1, 2, 3};
    CHECK_THROWS_AS(fit_q(dup, qd, 2), Error);
  }
}

TEST_CASE("check_positivity") {
  ContinuumParams p = builtin::zero_problem();
  auto r = check_positivity(p);
  CHECK(r.pass);
  CHECK(r.min_lambda == 1.0);
  CHECK(r.min_mu == 1.0);

  p.mu = ParamFunction::polynomial(VarId::X, {-0.5, 1.0});
  r = check_positivity(p);
  CHECK_FALSE(r.pass);
  CHECK(r.min_mu == doctest::Approx(-0.5));
  CHECK(r.argmin_mu_x == 0.0);

  p = builtin::zero_problem();
  p.lambda = ParamFunction::single({1.0, {poly(VarId::X, {0, 1}), poly(VarId::Y, {0, 1})}}) + ParamFunction::constant(1.0);
  r = check_positivity(p);
  CHECK(r.pass);
  CHECK(r.min_lambda == doctest::Approx(1.0));
}

TEST_CASE("ContinuumParams::validate rejects misplaced variables") {
  ContinuumParams p = builtin::zero_problem();
  p.mu = ParamFunction::polynomial(VarId::Y, {1.0, 1.0});
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("config parsing") {
  SUBCASE("continuum with terms") {
    const auto cfg = parse_problem(R"({"params": {"lambda": 1, "mu": {"terms": [{"scale": 2, "factors": [
        {"var": "x", "kind": "exp", "rate": 0.5}]}]}, "q": {"exact": "cos2pi"}}})");
    REQUIRE(cfg.continuum);
    CHECK(cfg.q_exact);
    CHECK(cfg.continuum->mu.eval(at(1.0)) == doctest::Approx(2.0 * std::exp(0.5)));
    CHECK(cfg.continuum->q.eval(Point{{VarId::Y, 0.5}}) == doctest::Approx(-1.0));
  }
  SUBCASE("large scale with q data") {
    const auto cfg = load_problem(CONTKERN_DATA_DIR "/example2.json");
    REQUIRE(cfg.large_scale);
    CHECK(cfg.large_scale->n == 10);
    CHECK(cfg.large_scale->q[9] == 0.047);
    CHECK(cfg.q_fit_degree == 2);
    const ContinuumParams c = cfg.to_continuum();
    const ContinuumParams ref = builtin::example2_continuum(2);
    const Point p{{VarId::X, 0.3}, {VarId::Y, 0.6}, {VarId::ETA, 0.2}};
    CHECK(c.sigma.eval(p) == doctest::Approx(ref.sigma.eval(p)));
    CHECK(c.q.eval(p) == doctest::Approx(ref.q.eval(p)));
  }
  SUBCASE("example1 file matches the built-in problem") {
    const ContinuumParams c = load_problem(CONTKERN_DATA_DIR "/example1.json").to_continuum();
    const ContinuumParams ref = builtin::example1();
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      const Point p{{VarId::X, u(rng)}, {VarId::Y, u(rng)}, {VarId::ETA, u(rng)}};
      CHECK(c.sigma.eval(p) == doctest::Approx(ref.sigma.eval(p)));
      CHECK(c.theta.eval(p) == doctest::Approx(ref.theta.eval(p)));
      CHECK(c.W.eval(p) == doctest::Approx(ref.W.eval(p)));
      CHECK(c.q.eval(p) == doctest::Approx(ref.q.eval(p)));
    }
  }
  SUBCASE("large-scale sigma templates: i is the first index") {
    const auto cfg = parse_problem(R"({"form": "large_scale", "n": 4, "params": {"lambda": 1, "mu": 1,
        "sigma": {"terms": [{"factors": [{"var": "i", "kind": "poly", "coeffs": [0, 1]}]}]}, "q": {"data": [0, 0, 0, 0]}}})");
    REQUIRE(cfg.large_scale);
    CHECK(cfg.large_scale->sigma[2][0].eval(at(0.3)) == doctest::Approx(0.75));
    CHECK(cfg.large_scale->sigma[0][2].eval(at(0.3)) == doctest::Approx(0.25));
  }
  SUBCASE("cy3 file") {
    const ContinuumParams c = load_problem(CONTKERN_DATA_DIR "/cy3.json").to_continuum();
    const Point p{{VarId::X, 0.4}, {VarId::Y, 0.3}, {VarId::ETA, 0.8}};
    CHECK(c.sigma.eval(p) == doctest::Approx(30 * 0.8 * (0.8 - 1) * 3 * 0.3 * (0.3 - 1)));
    CHECK(c.theta.eval(p) == doctest::Approx(-std::exp(0.4) * 0.3 * (0.3 - 1)));
    CHECK(c.W.is_zero());
  }
  SUBCASE("errors name the offending field") {
    auto msg = [](const std::string& text) {
      try {
        parse_problem(text);
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(msg(R"({"params": {"mu": 1}})").find("/params/lambda") != std::string::npos);
    CHECK(msg(R"({"params": {"lambda": 1, "mu": {"terms": [{"factors": [{"var": "y", "kind": "poly", "coeffs": [1]}]}]}}})")
              .find("/params/mu/terms/0/factors/0/var") != std::string::npos);
    CHECK(msg(R"({"params": {"lambda": 1, "mu": 1, "kappa": 2}})").find("/params/kappa") != std::string::npos);
    CHECK(msg("{\n  \"params\": [1,\n}").find("<string>:") != std::string::npos);
    CHECK(msg(R"({"form": "large_scale", "n": 3, "params": {"lambda": 1, "mu": 1, "q": {"data": [1, 2]}}})")
              .find("/params/q/data") != std::string::npos);
  }
}
