#include "contkern/bench.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "contkern/builtin.hpp"
#include "contkern/error.hpp"
#include "contkern/fd_kernels.hpp"
#include "contkern/kernel_eval.hpp"
#include "contkern/ps_solver.hpp"

namespace contkern {

namespace {

class Example1Exact final : public ContinuumKernel {
 public:
  double k(double x, double xi, double y) const override { return builtin::example1_k(x, xi, y); }
  double kbar(double x, double xi) const override { return builtin::example1_kbar(x, xi); }
  double k_x(double, double, double) const override { return 0.0; }
  double k_xi(double x, double xi, double y) const override { return 35.0 / kPi2 * k(x, xi, y); }
  double kbar_x(double, double) const override { return 0.0; }
  double kbar_xi(double, double) const override { return 0.0; }

 private:
  static constexpr double kPi2 = 9.869604401089358;
};

struct Variant {
  bool example1 = true;
  bool reduced = false;
  bool exact_q = false;
};

Variant variant_of(const std::string& id) {
  if (id == "example1") return {true, false, false};
  if (id == "example1-ry") return {true, true, false};
  if (id == "example1-exactq") return {true, true, true};
  if (id == "example2") return {false, false, false};
  if (id == "example2-ry") return {false, true, false};
  throw Error("unknown benchmark '" + id + "'");
}

}  // namespace

const std::vector<std::string>& bench_examples() {
  static const std::vector<std::string> ids{"example1", "example1-ry", "example1-exactq", "example2", "example2-ry"};
  return ids;
}

double max_gain_diff(const ContinuumKernel& a, const ContinuumKernel& b, int grid) {
  const auto g = uniform_grid(grid);
  double d = 0.0;
  for (double xi : g) {
    d = std::max(d, std::abs(a.kbar(1.0, xi) - b.kbar(1.0, xi)));
    for (double y : g) d = std::max(d, std::abs(a.k(1.0, xi, y) - b.k(1.0, xi, y)));
  }
  return d;
}

std::vector<BenchRow> run_bench(const std::string& example, const std::vector<int>& orders, const BenchOptions& opts) {
  const Variant v = variant_of(example);
  std::vector<BenchRow> rows;
  if (orders.empty()) return rows;

  ContinuumParams p;
  std::optional<LargeScaleParams> ls;
  if (v.example1) {
    p = builtin::example1();
  } else {
    p = builtin::example2_continuum(opts.q_fit_degree);
    p.sigma = p.sigma.scaled(opts.sigma_scale);
    ls = builtin::example2_large_scale(10);
    for (auto& row : ls->sigma)
      for (auto& s : row) s = s.scaled(opts.sigma_scale);
  }

  auto config_for = [&](int order) {
    SolverConfig cfg;
    cfg.order = order;
    cfg.order_y = v.reduced ? std::min(opts.reduced_order_y, order) : order;
    cfg.use_exact_q = v.exact_q;
    return cfg;
  };

  std::optional<GainTable> baseline;
  if (!v.example1 && opts.baseline) baseline = solve_characteristics(*ls, TriGrid(opts.fd_m)).gain_table(ls->placement);

  std::map<int, PsKernelSolution> solved;
  auto solve = [&](int order) -> const PsKernelSolution& {
    auto it = solved.find(order);
    if (it == solved.end()) it = solved.emplace(order, solve_power_series(p, config_for(order))).first;
    return it->second;
  };

  const Example1Exact exact;
  for (int order : orders) {
    const PsKernelSolution& sol = solve(order);
    const double secs = sol.assemble_seconds + sol.solve_seconds;
    BenchRow row;
    row.order = order;
    row.order_y = sol.config.ny();
    row.num_unknowns = sol.num_unknowns;
    row.num_equations = sol.num_equations;
    row.seconds = secs;
    row.residual = sol.residual;
    const SeriesKernel kern(sol);
    if (v.example1) row.max_error = max_gain_diff(kern, exact, opts.grid);
    if (baseline) row.d_np1 = diff_solutions(sample_gains(kern, ls->n, baseline->xi, ls->placement), *baseline);
    if (opts.previous && order > 0) row.d_prev = max_gain_diff(kern, SeriesKernel(solve(order - 1)), opts.grid);
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_time) {
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  const auto old = out.precision(10);
  out << "N,Ny,K,Eq" << (with_time ? ",seconds" : "") << ",residual,max_error,d_np1,d_prev\n";
  for (const BenchRow& r : rows) {
    out << r.order << "," << r.order_y << "," << r.num_unknowns << "," << r.num_equations;
    if (with_time) out << "," << r.seconds;
    out << "," << r.residual << ",";
    opt(r.max_error);
    out << ",";
    opt(r.d_np1);
    out << ",";
    opt(r.d_prev);
    out << "\n";
  }
  out.precision(old);
}

}  // namespace contkern
