#include "contkern/analytic.hpp"

#include <cmath>
#include <numbers>

#include "contkern/error.hpp"

namespace contkern {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double factorial_ratio(double a, int k) {
  // a^k / k!
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= a / i;
  return r;
}

}  // namespace

double AnalyticFactor::eval(double t) const {
  return std::visit(overloaded{
                        [&](const factor::Polynomial& p) {
                          double r = 0.0;
                          for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) r = r * t + *it;
                          return r;
                        },
                        [&](const factor::Exp& e) { return std::exp(e.rate * t); },
                        [&](const factor::Cos& c) { return std::cos(c.angular * t + c.phase); },
                        [&](const factor::Sin& s) { return std::sin(s.angular * t + s.phase); },
                        [&](const factor::Constant& c) { return c.value; },
                    },
                    kind);
}

std::pair<double, AnalyticFactor> AnalyticFactor::derivative() const {
  return std::visit(
      overloaded{
          [&](const factor::Polynomial& p) -> std::pair<double, AnalyticFactor> {
            factor::Polynomial d;
            for (std::size_t k = 1; k < p.coeffs.size(); ++k) d.coeffs.push_back(p.coeffs[k] * static_cast<double>(k));
            return {1.0, AnalyticFactor{d, var}};
          },
          [&](const factor::Exp& e) -> std::pair<double, AnalyticFactor> { return {e.rate, *this}; },
          [&](const factor::Cos& c) -> std::pair<double, AnalyticFactor> {
            return {-c.angular, AnalyticFactor{factor::Sin{c.angular, c.phase}, var}};
          },
          [&](const factor::Sin& s) -> std::pair<double, AnalyticFactor> {
            return {s.angular, AnalyticFactor{factor::Cos{s.angular, s.phase}, var}};
          },
          [&](const factor::Constant&) -> std::pair<double, AnalyticFactor> {
            return {0.0, AnalyticFactor{factor::Constant{0.0}, var}};
          },
      },
      kind);
}

double AnalyticFactor::taylor_coeff(int k) const {
  return std::visit(overloaded{
                        [&](const factor::Polynomial& p) {
                          return k < static_cast<int>(p.coeffs.size()) ? p.coeffs[static_cast<std::size_t>(k)] : 0.0;
                        },
                        [&](const factor::Exp& e) { return factorial_ratio(e.rate, k); },
                        [&](const factor::Cos& c) {
                          // d^k/dt^k cos(a t + b) at 0 = a^k cos(b + k pi/2)
                          return factorial_ratio(c.angular, k) * std::cos(c.phase + k * std::numbers::pi / 2);
                        },
                        [&](const factor::Sin& s) {
                          return factorial_ratio(s.angular, k) * std::sin(s.phase + k * std::numbers::pi / 2);
                        },
                        [&](const factor::Constant& c) { return k == 0 ? c.value : 0.0; },
                    },
                    kind);
}

TruncatedSeries taylor(const AnalyticFactor& f, int order) {
  if (order < 0) throw Error("taylor: negative order");
  Caps caps{};
  caps[index_of(f.var)] = order;
  TruncatedSeries s(VarSet{f.var}, caps);
  // cos/sin phases of k*pi/2 are exact zeros; avoid 1e-17 noise from std::cos.
  const bool trig_zero_phase = std::visit(overloaded{
                                              [](const factor::Cos& c) { return c.phase == 0.0; },
                                              [](const factor::Sin& c) { return c.phase == 0.0; },
                                              [](const auto&) { return false; },
                                          },
                                          f.kind);
  for (int k = 0; k <= order; ++k) {
    double c = f.taylor_coeff(k);
    if (trig_zero_phase) {
      const bool is_cos = std::holds_alternative<factor::Cos>(f.kind);
      const bool vanishes = is_cos ? (k % 2 == 1) : (k % 2 == 0);
      if (vanishes) continue;
      const double a = is_cos ? std::get<factor::Cos>(f.kind).angular : std::get<factor::Sin>(f.kind).angular;
      const int quarter = k % 4;
      const double sign = is_cos ? (quarter == 0 ? 1.0 : -1.0) : (quarter == 1 ? 1.0 : -1.0);
      c = sign * factorial_ratio(a, k);
    }
    if (c == 0.0) continue;
    Monomial m;
    m[f.var] = k;
    s.add_term(m, c);
  }
  return s;
}

std::vector<AnalyticFactor> SeparableTerm::factors_in(VarId v) const {
  std::vector<AnalyticFactor> out;
  for (const auto& f : factors)
    if (f.var == v) out.push_back(f);
  return out;
}

VarSet SeparableTerm::vars() const {
  VarSet s;
  for (const auto& f : factors) s.insert(f.var);
  return s;
}

ParamFunction::ParamFunction(std::vector<SeparableTerm> terms) : terms_(std::move(terms)) {
  std::erase_if(terms_, [](const SeparableTerm& t) { return t.scale == 0.0; });
}

ParamFunction ParamFunction::constant(double c) {
  if (c == 0.0) return {};
  return ParamFunction({SeparableTerm{c, {}}});
}

ParamFunction ParamFunction::polynomial(VarId v, std::vector<double> coeffs, double scale) {
  return ParamFunction({SeparableTerm{scale, {AnalyticFactor{factor::Polynomial{std::move(coeffs)}, v}}}});
}

ParamFunction ParamFunction::single(SeparableTerm t) { return ParamFunction({std::move(t)}); }

VarSet ParamFunction::vars() const {
  VarSet s;
  for (const auto& t : terms_) s = s.unite(t.vars());
  return s;
}

double ParamFunction::eval(const Point& p) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.scale;
    for (const auto& f : t.factors) {
      if (!p.has(f.var)) throw Error("eval: no value assigned to variable '" + std::string(var_name(f.var)) + "'");
      v *= f.eval(p[f.var]);
    }
    sum += v;
  }
  return sum;
}

ParamFunction ParamFunction::derivative(VarId v) const {
  std::vector<SeparableTerm> out;
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      if (t.factors[i].var != v) continue;
      auto [s, d] = t.factors[i].derivative();
      SeparableTerm nt = t;
      nt.scale *= s;
      nt.factors[i] = d;
      out.push_back(std::move(nt));
    }
  }
  return ParamFunction(std::move(out));
}

ParamFunction ParamFunction::substitute(VarId v, double value) const {
  std::vector<SeparableTerm> out;
  for (const auto& t : terms_) {
    SeparableTerm nt;
    nt.scale = t.scale;
    for (const auto& f : t.factors) {
      if (f.var == v)
        nt.scale *= f.eval(value);
      else
        nt.factors.push_back(f);
    }
    out.push_back(std::move(nt));
  }
  return ParamFunction(std::move(out));
}

ParamFunction ParamFunction::rename(VarId from, VarId to) const {
  if (from == to) return *this;
  if (depends_on(to)) throw Error("rename: target variable already present");
  std::vector<SeparableTerm> out = terms_;
  for (auto& t : out)
    for (auto& f : t.factors)
      if (f.var == from) f.var = to;
  return ParamFunction(std::move(out));
}

TruncatedSeries ParamFunction::to_series(int order, bool truncate) const {
  TruncatedSeries sum;
  for (const auto& t : terms_) {
    TruncatedSeries prod = TruncatedSeries::constant(t.scale);
    for (const auto& f : t.factors) prod = mul(prod, taylor(f, order));
    if (truncate) prod = truncate_total(prod, order);
    sum = add(sum, prod);
  }
  return sum;
}

std::optional<int> ParamFunction::poly_degree(VarId v) const {
  int deg = 0;
  for (const auto& t : terms_) {
    int term_deg = 0;
    for (const auto& f : t.factors) {
      if (f.var != v) continue;
      if (const auto* p = std::get_if<factor::Polynomial>(&f.kind)) {
        int d = static_cast<int>(p->coeffs.size()) - 1;
        while (d > 0 && p->coeffs[static_cast<std::size_t>(d)] == 0.0) --d;
        term_deg += std::max(d, 0);
      } else if (!std::holds_alternative<factor::Constant>(f.kind)) {
        return std::nullopt;
      }
    }
    deg = std::max(deg, term_deg);
  }
  return deg;
}

ParamFunction ParamFunction::operator+(const ParamFunction& o) const {
  std::vector<SeparableTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return ParamFunction(std::move(out));
}

ParamFunction ParamFunction::operator*(const ParamFunction& o) const {
  std::vector<SeparableTerm> out;
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      SeparableTerm t{a.scale * b.scale, a.factors};
      t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
      out.push_back(std::move(t));
    }
  }
  return ParamFunction(std::move(out));
}

ParamFunction ParamFunction::scaled(double c) const {
  std::vector<SeparableTerm> out = terms_;
  for (auto& t : out) t.scale *= c;
  return ParamFunction(std::move(out));
}

}  // namespace contkern
