#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contkern/series.hpp"

namespace contkern {

/// Elementary analytic functions of one variable used to build parameters.
namespace factor {
struct Polynomial {
  std::vector<double> coeffs;  ///< ascending powers
  bool operator==(const Polynomial&) const = default;
};
struct Exp {
  double rate = 0.0;  ///< e^{rate * t}
  bool operator==(const Exp&) const = default;
};
struct Cos {
  double angular = 0.0;  ///< cos(angular * t + phase)
  double phase = 0.0;
  bool operator==(const Cos&) const = default;
};
struct Sin {
  double angular = 0.0;  ///< sin(angular * t + phase)
  double phase = 0.0;
  bool operator==(const Sin&) const = default;
};
struct Constant {
  double value = 1.0;
  bool operator==(const Constant&) const = default;
};
}  // namespace factor

using FactorKind = std::variant<factor::Polynomial, factor::Exp, factor::Cos, factor::Sin, factor::Constant>;

struct AnalyticFactor {
  FactorKind kind;
  VarId var = VarId::X;

  double eval(double t) const;
  /// Derivative as scale * factor (same variable).
  std::pair<double, AnalyticFactor> derivative() const;
  /// k-th Taylor coefficient about 0.
  double taylor_coeff(int k) const;

  bool operator==(const AnalyticFactor&) const = default;
};

/// Univariate Taylor polynomial of degree <= order about the origin.
TruncatedSeries taylor(const AnalyticFactor& f, int order);

/// scale * prod(factors). Several factors may share a variable (e.g.
/// x(x+1)e^x); the term is still a product of univariate functions.
struct SeparableTerm {
  double scale = 1.0;
  std::vector<AnalyticFactor> factors;

  /// Restriction of the term to one variable: the product of its factors in v
  /// (without the scale).
  std::vector<AnalyticFactor> factors_in(VarId v) const;
  VarSet vars() const;
  bool operator==(const SeparableTerm&) const = default;
};

/// Finite sum of separable terms. The empty sum is the zero function.
class ParamFunction {
 public:
  ParamFunction() = default;
  explicit ParamFunction(std::vector<SeparableTerm> terms);

  static ParamFunction constant(double c);
  static ParamFunction polynomial(VarId v, std::vector<double> coeffs, double scale = 1.0);
  static ParamFunction single(SeparableTerm t);

  const std::vector<SeparableTerm>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  VarSet vars() const;
  bool depends_on(VarId v) const { return vars().contains(v); }

  double eval(const Point& p) const;
  /// Partial derivative (product rule per term).
  ParamFunction derivative(VarId v) const;
  /// Fixes a variable to a value; its factors fold into the scales.
  ParamFunction substitute(VarId v, double value) const;
  /// Renames a variable (the target must not already be present).
  ParamFunction rename(VarId from, VarId to) const;

  /// Taylor series: each factor expanded to `order`; when `truncate` is
  /// set the product is cut at total degree `order`.
  TruncatedSeries to_series(int order, bool truncate = true) const;
  /// Largest exponent of v over all terms, or nullopt when some factor in v
  /// is not a polynomial (infinite Taylor series).
  std::optional<int> poly_degree(VarId v) const;

  ParamFunction operator+(const ParamFunction& o) const;
  ParamFunction operator*(const ParamFunction& o) const;
  ParamFunction scaled(double c) const;

  bool operator==(const ParamFunction&) const = default;

 private:
  std::vector<SeparableTerm> terms_;
};

}  // namespace contkern
