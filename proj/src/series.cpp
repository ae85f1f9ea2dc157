#include "contkern/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "contkern/error.hpp"

namespace contkern {

namespace {

void accumulate(CoeffMap& map, const Monomial& m, double c) {
  auto [it, inserted] = map.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void prune(CoeffMap& map) {
  std::erase_if(map, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

}  // namespace

std::string_view var_name(VarId v) noexcept {
  switch (v) {
    case VarId::X: return "x";
    case VarId::XI: return "xi";
    case VarId::Y: return "y";
    case VarId::ETA: return "eta";
  }
  return "?";
}

VarId parse_var(std::string_view name) {
  if (name == "x") return VarId::X;
  if (name == "xi") return VarId::XI;
  if (name == "y") return VarId::Y;
  if (name == "eta") return VarId::ETA;
  throw Error("unknown variable '" + std::string(name) + "'");
}

int VarSet::size() const noexcept { return std::popcount(bits_); }

TruncatedSeries TruncatedSeries::constant(double c) {
  TruncatedSeries s;
  if (std::abs(c) >= kPruneThreshold) s.coeffs_.emplace(Monomial{}, c);
  return s;
}

TruncatedSeries TruncatedSeries::monomial(VarSet vars, const Monomial& m, double c) {
  TruncatedSeries s(vars, m.e);
  s.add_term(m, c);
  return s;
}

TruncatedSeries TruncatedSeries::univariate(VarId v, std::initializer_list<double> coeffs) {
  Caps caps{};
  caps[index_of(v)] = coeffs.size() == 0 ? 0 : static_cast<int>(coeffs.size()) - 1;
  TruncatedSeries s(VarSet{v}, caps);
  int k = 0;
  for (double c : coeffs) {
    Monomial m;
    m[v] = k++;
    s.add_term(m, c);
  }
  return s;
}

void TruncatedSeries::normalize_caps() noexcept {
  for (VarId v : kAllVars)
    if (!vars_.contains(v)) caps_[index_of(v)] = 0;
}

double TruncatedSeries::coeff(const Monomial& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? 0.0 : it->second;
}

int TruncatedSeries::total_degree() const noexcept {
  int d = 0;
  for (const auto& [m, c] : coeffs_) d = std::max(d, m.degree());
  return d;
}

void TruncatedSeries::add_term(const Monomial& m, double c) {
  for (VarId v : kAllVars) {
    const int e = m[v];
    if (e < 0) throw Error("negative exponent");
    if (e > 0 && !vars_.contains(v))
      throw Error("monomial uses variable '" + std::string(var_name(v)) + "' outside the series");
    if (e > caps_[index_of(v)]) throw Error("monomial exceeds degree cap");
  }
  auto [it, inserted] = coeffs_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kPruneThreshold) coeffs_.erase(it);
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  Caps caps{};
  for (int i = 0; i < kNumVars; ++i) caps[i] = std::max(a.caps()[i], b.caps()[i]);
  TruncatedSeries r(a.vars().unite(b.vars()), caps);
  CoeffMap map = a.coeffs();
  for (const auto& [m, c] : b.coeffs()) accumulate(map, m, c);
  prune(map);
  for (const auto& [m, c] : map) r.add_term(m, c);
  return r;
}

TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b) { return add(a, scale(b, -1.0)); }

TruncatedSeries scale(const TruncatedSeries& a, double c) {
  TruncatedSeries r(a.vars(), a.caps());
  if (c == 0.0) return r;
  for (const auto& [m, v] : a.coeffs()) r.add_term(m, v * c);
  return r;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  Caps caps{};
  for (int i = 0; i < kNumVars; ++i) caps[i] = a.caps()[i] + b.caps()[i];
  TruncatedSeries r(a.vars().unite(b.vars()), caps);
  CoeffMap map;
  for (const auto& [ma, ca] : a.coeffs()) {
    for (const auto& [mb, cb] : b.coeffs()) {
      Monomial m;
      for (int i = 0; i < kNumVars; ++i) m.e[i] = ma.e[i] + mb.e[i];
      accumulate(map, m, ca * cb);
    }
  }
  prune(map);
  for (const auto& [m, c] : map) r.add_term(m, c);
  return r;
}

TruncatedSeries diff(const TruncatedSeries& s, VarId v) {
  Caps caps = s.caps();
  caps[index_of(v)] = std::max(0, caps[index_of(v)] - 1);
  TruncatedSeries r(s.vars(), caps);
  for (const auto& [m, c] : s.coeffs()) {
    const int e = m[v];
    if (e == 0) continue;
    Monomial d = m;
    d[v] = e - 1;
    r.add_term(d, c * e);
  }
  return r;
}

TruncatedSeries integrate_unit(const TruncatedSeries& s, VarId v) {
  VarSet vars = s.vars();
  vars.erase(v);
  TruncatedSeries r(vars, s.caps());
  CoeffMap map;
  for (const auto& [m, c] : s.coeffs()) {
    Monomial d = m;
    d[v] = 0;
    accumulate(map, d, c / (m[v] + 1));
  }
  prune(map);
  for (const auto& [m, c] : map) r.add_term(m, c);
  return r;
}

TruncatedSeries substitute_var(const TruncatedSeries& s, VarId from, VarId to) {
  if (from == to) return s;
  VarSet vars = s.vars();
  Caps caps = s.caps();
  if (vars.contains(from)) {
    vars.erase(from);
    vars.insert(to);
    caps[index_of(to)] += caps[index_of(from)];
    caps[index_of(from)] = 0;
  }
  TruncatedSeries r(vars, caps);
  CoeffMap map;
  for (const auto& [m, c] : s.coeffs()) {
    Monomial d = m;
    d[to] += d[from];
    d[from] = 0;
    accumulate(map, d, c);
  }
  prune(map);
  for (const auto& [m, c] : map) r.add_term(m, c);
  return r;
}

TruncatedSeries substitute_diag(const TruncatedSeries& s) { return substitute_var(s, VarId::XI, VarId::X); }

TruncatedSeries restrict_var(const TruncatedSeries& s, VarId v, double value) {
  VarSet vars = s.vars();
  vars.erase(v);
  TruncatedSeries r(vars, s.caps());
  CoeffMap map;
  for (const auto& [m, c] : s.coeffs()) {
    Monomial d = m;
    d[v] = 0;
    const double f = m[v] == 0 ? 1.0 : std::pow(value, m[v]);
    if (f != 0.0) accumulate(map, d, c * f);
  }
  prune(map);
  for (const auto& [m, c] : map) r.add_term(m, c);
  return r;
}

TruncatedSeries truncate_total(const TruncatedSeries& s, int n) {
  TruncatedSeries r(s.vars(), s.caps());
  for (const auto& [m, c] : s.coeffs())
    if (m.degree() <= n) r.add_term(m, c);
  return r;
}

TruncatedSeries truncate_var(const TruncatedSeries& s, VarId v, int n) {
  TruncatedSeries r(s.vars(), s.caps());
  for (const auto& [m, c] : s.coeffs())
    if (m[v] <= n) r.add_term(m, c);
  return r;
}

Point::Point() { v.fill(std::numeric_limits<double>::quiet_NaN()); }

Point::Point(std::initializer_list<std::pair<VarId, double>> assignments) : Point() {
  for (const auto& [var, value] : assignments) set(var, value);
}

bool Point::has(VarId var) const noexcept { return !std::isnan(v[index_of(var)]); }

double eval(const TruncatedSeries& s, const Point& p) {
  std::array<std::vector<double>, kNumVars> powers;
  for (VarId v : kAllVars) {
    if (!s.vars().contains(v)) continue;
    if (!p.has(v)) throw Error("eval: no value assigned to variable '" + std::string(var_name(v)) + "'");
    auto& pw = powers[index_of(v)];
    pw.resize(static_cast<std::size_t>(s.cap(v)) + 1);
    pw[0] = 1.0;
    for (std::size_t k = 1; k < pw.size(); ++k) pw[k] = pw[k - 1] * p[v];
  }
  double sum = 0.0;
  for (const auto& [m, c] : s.coeffs()) {
    double t = c;
    for (int i = 0; i < kNumVars; ++i)
      if (m.e[i] > 0) t *= powers[i][static_cast<std::size_t>(m.e[i])];
    sum += t;
  }
  return sum;
}

std::string to_string(const TruncatedSeries& s) {
  if (s.is_zero()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : s.coeffs()) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (VarId v : kAllVars) {
      if (m[v] == 0) continue;
      os << '*' << var_name(v);
      if (m[v] > 1) os << '^' << m[v];
    }
  }
  return os.str();
}

}  // namespace contkern
