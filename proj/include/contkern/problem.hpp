#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contkern/analytic.hpp"

namespace contkern {

/// Where the i-th member of an n-ensemble sits on [0, 1].
enum class SamplePlacement {
  Right,  ///< y_i = i/n
  Left,   ///< y_i = (i-1)/n
};

/// Ensemble coordinate of member i (1-based).
double sample_point(int i, int n, SamplePlacement placement = SamplePlacement::Right);

/// Continuum kernel-equation parameters.
///
/// Variable conventions: lambda, theta and W are functions of (X, Y); mu of
/// X; q of Y. sigma is a function of (X, ETA, Y) where ETA is the
/// integration variable of the ensemble integral and Y the free ensemble
/// variable, so that sampling gives sigma_{i,j}(x) = sigma(x, i/n, j/n).
struct ContinuumParams {
  ParamFunction lambda;
  ParamFunction mu;
  ParamFunction sigma;
  ParamFunction theta;
  ParamFunction W;
  ParamFunction q;

  /// Checks that every parameter only uses its allowed variables.
  void validate() const;
};

/// Parameters of the n+1 kernel equations. Index vectors are 0-based:
/// lambda[i] is lambda_{i+1}, sigma[i][j] is sigma_{i+1,j+1}.
struct LargeScaleParams {
  int n = 0;
  std::vector<ParamFunction> lambda;
  ParamFunction mu;
  std::vector<std::vector<ParamFunction>> sigma;
  std::vector<ParamFunction> theta;
  std::vector<ParamFunction> W;
  std::vector<double> q;
  SamplePlacement placement = SamplePlacement::Right;

  /// Continuum-form template the parameters were sampled from, when they
  /// are expressible as separable expressions of i/n and j/n.
  std::optional<ContinuumParams> tmpl;
  /// Whether tmpl->q generated q (false when q came from raw data).
  bool tmpl_has_q = false;

  /// Sizes consistent with n; throws otherwise.
  void validate() const;
};

/// Sampling relations: lambda_i(x) = lambda(x, y_i), theta_i, W_i likewise,
/// sigma_{i,j}(x) = sigma(x, y_i, y_j), q_i = q(y_i).
LargeScaleParams sample_continuum(const ContinuumParams& c, int n, SamplePlacement placement = SamplePlacement::Right);

struct LiftOptions {
  /// Polynomial degree fitted to the q_i data when q has no template.
  std::optional<int> q_fit_degree;
};

/// Recovers the continuum parameters from a template-form large-scale
/// problem (i/n -> y, j/n -> eta).
ContinuumParams lift_separable(const LargeScaleParams& ls, const LiftOptions& opts = {});

/// Least-squares polynomial fit of q data.
struct FitResult {
  int degree = 0;
  std::vector<double> coeffs;  ///< ascending powers, size degree + 1
  double rms_error = 0.0;

  ParamFunction as_function(VarId v = VarId::Y) const;
  double eval(double y) const;
};

/// Fits a degree-M polynomial to (y_k, q_k) by an orthogonal factorization of
/// the Vandermonde matrix. Throws on M >= #points or duplicate abscissae.
FitResult fit_q(std::span<const double> y, std::span<const double> q, int degree);

/// Sample abscissae y_i for q data of length n.
std::vector<double> q_abscissae(int n, SamplePlacement placement = SamplePlacement::Right);

struct PositivityReport {
  double min_lambda = 0.0;
  double min_mu = 0.0;
  double argmin_lambda_x = 0.0;
  double argmin_lambda_y = 0.0;
  double argmin_mu_x = 0.0;
  bool pass = false;
};

/// Evaluates lambda and mu on a 101 x 101 grid of [0,1]^2.
PositivityReport check_positivity(const ContinuumParams& p);
/// Evaluates every lambda_i and mu on a 101-point grid.
PositivityReport check_positivity(const LargeScaleParams& p);

}  // namespace contkern
