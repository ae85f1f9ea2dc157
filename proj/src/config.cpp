#include "contkern/config.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "contkern/error.hpp"

namespace contkern {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError((path.empty() ? std::string("/") : path) + ": " + msg);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number_or(const json& obj, const char* key, double dflt, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  return get_number(*it, path + "/" + key);
}

// Maps config variable names to solver variables for one parameter slot.
struct VarMap {
  std::vector<std::pair<std::string, VarId>> entries;

  VarId lookup(const std::string& name, const std::string& path) const {
    for (const auto& [n, v] : entries)
      if (n == name) return v;
    std::string allowed;
    for (const auto& [n, v] : entries) allowed += (allowed.empty() ? "" : ", ") + n;
    fail(path, "variable '" + name + "' is not allowed here (allowed: " + allowed + ")");
  }
};

AnalyticFactor parse_factor(const json& j, const VarMap& vars, const std::string& path) {
  if (!j.is_object()) fail(path, "factor must be an object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) fail(path + "/kind", "missing factor kind");
  auto var_it = j.find("var");
  if (var_it == j.end() || !var_it->is_string()) fail(path + "/var", "missing factor variable");
  AnalyticFactor f;
  f.var = vars.lookup(var_it->get<std::string>(), path + "/var");
  const std::string kind = kind_it->get<std::string>();
  if (kind == "poly") {
    auto c = j.find("coeffs");
    if (c == j.end() || !c->is_array() || c->empty()) fail(path + "/coeffs", "expected a non-empty number array");
    factor::Polynomial p;
    for (std::size_t i = 0; i < c->size(); ++i) p.coeffs.push_back(get_number((*c)[i], path + "/coeffs/" + std::to_string(i)));
    f.kind = p;
  } else if (kind == "exp") {
    f.kind = factor::Exp{number_or(j, "rate", 1.0, path)};
  } else if (kind == "cos") {
    f.kind = factor::Cos{number_or(j, "angular", 1.0, path), number_or(j, "phase", 0.0, path)};
  } else if (kind == "sin") {
    f.kind = factor::Sin{number_or(j, "angular", 1.0, path), number_or(j, "phase", 0.0, path)};
  } else if (kind == "const") {
    f.kind = factor::Constant{number_or(j, "value", 1.0, path)};
  } else {
    fail(path + "/kind", "unknown factor kind '" + kind + "' (poly, exp, cos, sin, const)");
  }
  return f;
}

ParamFunction parse_function(const json& j, const VarMap& vars, const std::string& path) {
  if (j.is_number()) return ParamFunction::constant(j.get<double>());
  if (!j.is_object()) fail(path, "expected a number or an object with \"terms\"");
  auto t = j.find("terms");
  if (t == j.end() || !t->is_array()) fail(path + "/terms", "expected an array of terms");
  std::vector<SeparableTerm> terms;
  for (std::size_t i = 0; i < t->size(); ++i) {
    const std::string tp = path + "/terms/" + std::to_string(i);
    const json& tj = (*t)[i];
    if (!tj.is_object()) fail(tp, "term must be an object");
    SeparableTerm term;
    term.scale = number_or(tj, "scale", 1.0, tp);
    if (auto fs = tj.find("factors"); fs != tj.end()) {
      if (!fs->is_array()) fail(tp + "/factors", "expected an array");
      for (std::size_t k = 0; k < fs->size(); ++k)
        term.factors.push_back(parse_factor((*fs)[k], vars, tp + "/factors/" + std::to_string(k)));
    }
    terms.push_back(std::move(term));
  }
  return ParamFunction(std::move(terms));
}

ParamFunction optional_function(const json& params, const char* key, const VarMap& vars, const std::string& path,
                                std::optional<double> dflt) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (!dflt) fail(path + "/" + key, "required parameter is missing");
    return ParamFunction::constant(*dflt);
  }
  return parse_function(*it, vars, path + "/" + key);
}

SamplePlacement parse_placement(const json& root) {
  auto it = root.find("sample_placement");
  if (it == root.end()) return SamplePlacement::Right;
  if (!it->is_string()) fail("/sample_placement", "expected \"right\" or \"left\"");
  const auto s = it->get<std::string>();
  if (s == "right") return SamplePlacement::Right;
  if (s == "left") return SamplePlacement::Left;
  fail("/sample_placement", "expected \"right\" (y_i = i/n) or \"left\" (y_i = (i-1)/n)");
}

struct QSpec {
  std::optional<ParamFunction> function;
  std::vector<double> data;
  std::optional<int> fit_degree;
  bool exact = false;
};

QSpec parse_q(const json& params, const VarMap& vars, const std::string& path) {
  QSpec q;
  auto it = params.find("q");
  if (it == params.end()) {
    q.function = ParamFunction();
    return q;
  }
  const std::string qp = path + "/q";
  if (it->is_object() && it->contains("exact")) {
    const json& e = (*it)["exact"];
    if (!e.is_string()) fail(qp + "/exact", "expected a function name");
    try {
      q.function = named_q(e.get<std::string>());
    } catch (const Error& err) {
      fail(qp + "/exact", err.what());
    }
    q.exact = true;
  } else if (it->is_object() && it->contains("data")) {
    const json& d = (*it)["data"];
    if (!d.is_array() || d.empty()) fail(qp + "/data", "expected a non-empty number array");
    for (std::size_t i = 0; i < d.size(); ++i) q.data.push_back(get_number(d[i], qp + "/data/" + std::to_string(i)));
    if (auto fd = it->find("fit_degree"); fd != it->end()) {
      if (!fd->is_number_integer() || fd->get<int>() < 0) fail(qp + "/fit_degree", "expected a non-negative integer");
      q.fit_degree = fd->get<int>();
    }
  } else {
    q.function = parse_function(*it, vars, qp);
  }
  return q;
}

ProblemConfig parse_root(const json& root) {
  if (!root.is_object()) fail("", "top level must be an object");
  ProblemConfig cfg;
  if (auto it = root.find("name"); it != root.end()) {
    if (!it->is_string()) fail("/name", "expected a string");
    cfg.name = it->get<std::string>();
  }
  std::string form = "continuum";
  if (auto it = root.find("form"); it != root.end()) {
    if (!it->is_string()) fail("/form", "expected \"continuum\" or \"large_scale\"");
    form = it->get<std::string>();
  }
  cfg.placement = parse_placement(root);
  if (auto it = root.find("n"); it != root.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1) fail("/n", "expected a positive integer");
    cfg.n = it->get<int>();
  }
  auto pit = root.find("params");
  if (pit == root.end() || !pit->is_object()) fail("/params", "missing parameter object");
  const json& params = *pit;
  const std::string pp = "/params";

  for (const auto& [key, val] : params.items()) {
    static const char* known[] = {"lambda", "mu", "sigma", "theta", "W", "q"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(pp + "/" + key, "unknown parameter (lambda, mu, sigma, theta, W, q)");
  }

  if (form == "continuum") {
    const VarMap xy{{{"x", VarId::X}, {"y", VarId::Y}}};
    const VarMap x_only{{{"x", VarId::X}}};
    const VarMap y_only{{{"y", VarId::Y}}};
    const VarMap sig{{{"x", VarId::X}, {"eta", VarId::ETA}, {"y", VarId::Y}}};
    ContinuumParams c;
    c.lambda = optional_function(params, "lambda", xy, pp, std::nullopt);
    c.mu = optional_function(params, "mu", x_only, pp, std::nullopt);
    c.sigma = optional_function(params, "sigma", sig, pp, 0.0);
    c.theta = optional_function(params, "theta", xy, pp, 0.0);
    c.W = optional_function(params, "W", xy, pp, 0.0);
    QSpec q = parse_q(params, y_only, pp);
    cfg.q_exact = q.exact;
    if (q.function) {
      c.q = *q.function;
    } else {
      if (!q.fit_degree) fail(pp + "/q/fit_degree", "q data on a continuum problem needs a fit degree");
      const auto y = q_abscissae(static_cast<int>(q.data.size()), cfg.placement);
      try {
        c.q = fit_q(y, q.data, *q.fit_degree).as_function();
      } catch (const Error& err) {
        fail(pp + "/q", err.what());
      }
      cfg.q_fit_degree = q.fit_degree;
    }
    cfg.continuum = std::move(c);
  } else if (form == "large_scale") {
    if (!root.contains("n")) fail("/n", "large-scale problems need the ensemble size n");
    // Templates in i/n and j/n: i -> y, and for sigma_{i,j} i -> eta, j -> y.
    const VarMap xi{{{"x", VarId::X}, {"i", VarId::Y}}};
    const VarMap x_only{{{"x", VarId::X}}};
    const VarMap i_only{{{"i", VarId::Y}}};
    const VarMap sig{{{"x", VarId::X}, {"i", VarId::ETA}, {"j", VarId::Y}}};
    ContinuumParams t;
    t.lambda = optional_function(params, "lambda", xi, pp, std::nullopt);
    t.mu = optional_function(params, "mu", x_only, pp, std::nullopt);
    t.sigma = optional_function(params, "sigma", sig, pp, 0.0);
    t.theta = optional_function(params, "theta", xi, pp, 0.0);
    t.W = optional_function(params, "W", xi, pp, 0.0);
    QSpec q = parse_q(params, i_only, pp);
    cfg.q_exact = q.exact;
    if (q.function) t.q = *q.function;
    LargeScaleParams ls = sample_continuum(t, cfg.n, cfg.placement);
    if (!q.function) {
      if (static_cast<int>(q.data.size()) != cfg.n)
        fail(pp + "/q/data", "expected " + std::to_string(cfg.n) + " values (one per member)");
      ls.q = q.data;
      ls.tmpl_has_q = false;
      cfg.q_fit_degree = q.fit_degree;
    }
    cfg.large_scale = std::move(ls);
  } else {
    fail("/form", "unknown form '" + form + "' (continuum, large_scale)");
  }
  return cfg;
}

}  // namespace

ParamFunction named_q(const std::string& name) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (name == "cos2pi") return ParamFunction::single({1.0, {AnalyticFactor{factor::Cos{two_pi, 0.0}, VarId::Y}}});
  if (name == "sin2pi") return ParamFunction::single({1.0, {AnalyticFactor{factor::Sin{two_pi, 0.0}, VarId::Y}}});
  if (name == "one") return ParamFunction::constant(1.0);
  if (name == "zero") return ParamFunction();
  throw ConfigError("unknown exact q function '" + name + "' (cos2pi, sin2pi, one, zero)");
}

ContinuumParams ProblemConfig::to_continuum() const {
  if (continuum) return *continuum;
  if (!large_scale) throw ConfigError("problem has no parameters");
  return lift_separable(*large_scale, LiftOptions{q_fit_degree});
}

LargeScaleParams ProblemConfig::to_large_scale() const {
  if (large_scale) return *large_scale;
  if (!continuum) throw ConfigError("problem has no parameters");
  return sample_continuum(*continuum, n, placement);
}

ProblemConfig parse_problem(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": JSON syntax error: " << e.what();
    throw ConfigError(os.str());
  }
  try {
    ProblemConfig cfg = parse_root(root);
    if (cfg.name.empty()) cfg.name = origin;
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

ProblemConfig load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path.string());
}

}  // namespace contkern
