#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contkern/error.hpp"
#include "contkern/kernel.hpp"
#include "contkern/problem.hpp"

namespace contkern {

/// Raised when the sufficient conditions for separable kernels fail. The
/// message names the condition.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// Separable continuum parameters: lambda(y), constant mu,
/// W = W_x(x) W_y(y), theta = theta_x(x) theta_y(y) and
/// sigma = sigma_x(x) sigma_y(eta) sigma_eta(y), where sigma_y multiplies
/// the integration variable and sigma_eta the free ensemble variable.
/// Every univariate function is stored over X (x-factors) or Y (ensemble
/// factors).
struct SeparableProblem {
  double mu = 1.0;
  ParamFunction lambda_y;
  ParamFunction W_x, W_y;
  ParamFunction sigma_x, sigma_y, sigma_eta;
  ParamFunction theta_x, theta_y;
  ParamFunction q;

  bool constant_lambda() const { return !lambda_y.depends_on(VarId::Y); }
};

/// Splits continuum parameters into separable factors; throws NotApplicable
/// when mu is not constant, lambda depends on x, or a parameter is not a
/// single product term.
SeparableProblem separate(const ContinuumParams& p);

struct CyCheck {
  bool applicable = false;
  double c_y = 0.0;
  double integral = 0.0;              ///< int_0^1 sigma_y theta_y
  std::optional<double> ratio;        ///< c with sigma_eta = c theta_y, when it exists
  std::string reason;
};

/// Existence of c_y = (sigma_eta / theta_y) * int sigma_y theta_y
/// independently of y (constant lambda).
CyCheck check_cy(const SeparableProblem& p);

/// c_x for constant lambda from c_y; on the general (y-varying lambda) path
/// c_y is ignored and the y-independence of c_x is verified on a grid
/// (throws NotApplicable otherwise).
double compute_cx(const SeparableProblem& p, double c_y);

/// f(xi) = a sigma_x(xi) + b theta_x'(xi) / theta_x(xi) - c_x / mu.
struct FFunction {
  double a = 0.0;
  double b = 0.0;
  double offset = 0.0;  ///< -c_x / mu
  ParamFunction sigma_x, dsigma_x, theta_x, dtheta_x, ddtheta_x;

  double operator()(double xi) const;
  double derivative(double xi) const;
};

struct FReport {
  FFunction f;
  double condition_residual = 0.0;  ///< sup over the xi grid of |f' - rhs|
  bool holds = false;
};

/// Builds f and checks the compatibility condition f' = W_x theta_x int W_y
/// theta_y / (lambda + mu) on a 201-point grid (tolerance 1e-8). Throws
/// NotApplicable when the condition fails.
FReport build_f(const SeparableProblem& p, double c_x, double c_y);

/// k = -exp(c_x (x - xi)/mu) theta_x(xi) theta_y(y) / (lambda(y) + mu),
/// kbar = exp(c_x (x - xi)/mu) f(xi).
class ClosedFormKernel final : public ContinuumKernel {
 public:
  ClosedFormKernel(SeparableProblem p, double c_x, std::optional<double> c_y, FFunction f);

  double c_x() const noexcept { return c_x_; }
  std::optional<double> c_y() const noexcept { return c_y_; }
  const FFunction& f() const noexcept { return f_; }
  const SeparableProblem& problem() const noexcept { return p_; }

  double k(double x, double xi, double y) const override;
  double kbar(double x, double xi) const override;
  double k_x(double x, double xi, double y) const override;
  double k_xi(double x, double xi, double y) const override;
  double kbar_x(double x, double xi) const override;
  double kbar_xi(double x, double xi) const override;

 private:
  double ky(double y) const;

  SeparableProblem p_;
  double c_x_;
  std::optional<double> c_y_;
  FFunction f_;
  ParamFunction dtheta_x_;
};

ClosedFormKernel build_kernels(const SeparableProblem& p, double c_x, std::optional<double> c_y, const FFunction& f);

/// Full pipeline: separate, check_cy (constant lambda) or the general
/// conditions, compute_cx, build_f, build_kernels. Throws NotApplicable.
ClosedFormKernel solve_closed_form(const ContinuumParams& p);

/// Conditions of the closed form restated for the n+1 parameters.
struct LargeScaleConditionReport {
  int n = 0;
  std::vector<double> w, s1, s2, vartheta;  ///< factor samples
  bool proportional = false;                ///< vartheta_i = c s2_i
  std::optional<double> c;
  double sum_s1_vartheta = 0.0;             ///< (1/n) sum s1_i vartheta_i
  double sum_w_vartheta = 0.0;              ///< (1/n) sum w_i vartheta_i
  double condition_residual = 0.0;          ///< sup over xi of the finite-n compatibility residual
  bool conditions_hold = false;
  std::string reason;
};

/// Requires factored parameters (constant equal lambda_i, constant mu, and
/// W_i, sigma_ij, theta_i scalar multiples of common x-profiles). Uses the
/// template factors when the parameters were sampled from one, and a
/// numerical factorization otherwise. Throws Error for non-factored input.
LargeScaleConditionReport check_largescale_conditions(const LargeScaleParams& ls);

}  // namespace contkern
