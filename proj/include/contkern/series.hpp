#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

namespace contkern {

/// Spatial variables of the kernel equations. ETA only appears inside
/// integrands (the integration copy of the ensemble variable).
enum class VarId : std::uint8_t { X = 0, XI = 1, Y = 2, ETA = 3 };

inline constexpr int kNumVars = 4;
inline constexpr std::array<VarId, kNumVars> kAllVars{VarId::X, VarId::XI, VarId::Y, VarId::ETA};

constexpr int index_of(VarId v) noexcept { return static_cast<int>(v); }
std::string_view var_name(VarId v) noexcept;
VarId parse_var(std::string_view name);

/// Ordered subset of {X, XI, Y, ETA}.
class VarSet {
 public:
  constexpr VarSet() = default;
  VarSet(std::initializer_list<VarId> vs) {
    for (VarId v : vs) insert(v);
  }

  constexpr bool contains(VarId v) const noexcept { return (bits_ >> index_of(v)) & 1u; }
  constexpr void insert(VarId v) noexcept { bits_ |= static_cast<std::uint8_t>(1u << index_of(v)); }
  constexpr void erase(VarId v) noexcept { bits_ &= static_cast<std::uint8_t>(~(1u << index_of(v))); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  int size() const noexcept;
  constexpr VarSet unite(VarSet o) const noexcept {
    VarSet r;
    r.bits_ = bits_ | o.bits_;
    return r;
  }
  constexpr bool operator==(const VarSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Exponent tuple over (X, XI, Y, ETA).
struct Monomial {
  std::array<int, kNumVars> e{};

  int degree() const noexcept { return e[0] + e[1] + e[2] + e[3]; }
  int operator[](VarId v) const noexcept { return e[index_of(v)]; }
  int& operator[](VarId v) noexcept { return e[index_of(v)]; }
  bool operator==(const Monomial&) const = default;

  static Monomial of(int x, int xi = 0, int y = 0, int eta = 0) { return Monomial{{x, xi, y, eta}}; }
};

/// Graded lexicographic order: lower total degree first, ties broken by
/// descending exponents in the variable order (X, XI, Y, ETA).
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const noexcept {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.e > b.e;
  }
};

using Caps = std::array<int, kNumVars>;
using CoeffMap = std::map<Monomial, double, GradedLex>;

/// Multivariate polynomial in up to four variables with per-variable degree
/// caps. Absent monomials are zero. Values are immutable once built; the
/// free functions below return new series.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(VarSet vars, Caps caps) : vars_(vars), caps_(caps) { normalize_caps(); }

  static TruncatedSeries constant(double c);
  /// Single term c * m over `vars` (caps set to the exponents of m).
  static TruncatedSeries monomial(VarSet vars, const Monomial& m, double c = 1.0);
  /// Polynomial in one variable, coefficients in ascending powers.
  static TruncatedSeries univariate(VarId v, std::initializer_list<double> coeffs);

  VarSet vars() const noexcept { return vars_; }
  const Caps& caps() const noexcept { return caps_; }
  int cap(VarId v) const noexcept { return caps_[index_of(v)]; }
  const CoeffMap& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  double coeff(const Monomial& m) const;
  int total_degree() const noexcept;

  /// Accumulates c into monomial m. Throws if m exceeds the caps or uses a
  /// variable outside vars().
  void add_term(const Monomial& m, double c);

  bool operator==(const TruncatedSeries&) const = default;

 private:
  void normalize_caps() noexcept;

  VarSet vars_{};
  Caps caps_{};
  CoeffMap coeffs_{};
};

/// Entries with magnitude below this are dropped.
inline constexpr double kPruneThreshold = 1e-300;

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries scale(const TruncatedSeries& a, double c);
/// Exact product; never re-truncated (caps add).
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
/// Formal partial derivative.
TruncatedSeries diff(const TruncatedSeries& s, VarId v);
/// Integral over v in [0,1]; v leaves the variable set.
TruncatedSeries integrate_unit(const TruncatedSeries& s, VarId v);
/// Identifies `from` with `to` (exponents summed); `from` leaves the set.
/// Renames the variable when `to` is not present.
TruncatedSeries substitute_var(const TruncatedSeries& s, VarId from, VarId to);
/// xi -> x.
TruncatedSeries substitute_diag(const TruncatedSeries& s);
/// Fixes v to a value; v leaves the set.
TruncatedSeries restrict_var(const TruncatedSeries& s, VarId v, double value);
/// Drops monomials of total degree above n.
TruncatedSeries truncate_total(const TruncatedSeries& s, int n);
/// Drops monomials whose v-exponent exceeds n.
TruncatedSeries truncate_var(const TruncatedSeries& s, VarId v, int n);

/// Point assignment for evaluation; NaN marks "unassigned".
struct Point {
  std::array<double, kNumVars> v;
  Point();
  Point(std::initializer_list<std::pair<VarId, double>> assignments);
  Point& set(VarId var, double value) {
    v[index_of(var)] = value;
    return *this;
  }
  bool has(VarId var) const noexcept;
  double operator[](VarId var) const noexcept { return v[index_of(var)]; }
};

/// Evaluates s at p. Throws if p leaves a variable of s unassigned.
double eval(const TruncatedSeries& s, const Point& p);

std::string to_string(const TruncatedSeries& s);

}  // namespace contkern
