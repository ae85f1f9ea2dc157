// contkern command-line front end.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "contkern/bench.hpp"
#include "contkern/builtin.hpp"
#include "contkern/closed_form.hpp"
#include "contkern/config.hpp"
#include "contkern/fd_kernels.hpp"
#include "contkern/kernel_eval.hpp"
#include "contkern/ps_solver.hpp"
#include "contkern/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace contkern;

namespace {

constexpr int kExitNotApplicable = 2;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

json manifest(const std::string& command, const std::vector<std::string>& argv) {
  return json{{"tool", "contkern"},
              {"version", CONTKERN_VERSION},
              {"command", command},
              {"argv", argv},
              {"determinism", "no randomized algorithms; reruns reproduce all numeric fields except timing"}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

void write_gains(const fs::path& path, const GainTable& g) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  g.write_csv(f);
}

std::string stem_or(const std::string& prefix, const ProblemConfig& cfg, const std::string& config_path) {
  if (!prefix.empty()) return prefix;
  if (!cfg.name.empty()) return cfg.name;
  return fs::path(config_path).stem().string();
}

json series_json(const TruncatedSeries& s) {
  json arr = json::array();
  for (const auto& [m, c] : s.coeffs())
    arr.push_back(json{{"x", m[VarId::X]}, {"xi", m[VarId::XI]}, {"y", m[VarId::Y]}, {"c", c}});
  return arr;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(item));
    } else {
      const int a = std::stoi(item.substr(0, dots)), b = std::stoi(item.substr(dots + 2));
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
  }
  return out;
}

// ---- solve

struct SolveArgs {
  std::string config, out_dir = ".", prefix, compare;
  int order = 12;
  std::optional<int> order_y;
  bool exact_q = false;
  int points = 101;
  bool sampled = false;
};

int cmd_solve(const SolveArgs& a, const std::vector<std::string>& argv) {
  Clock clock;
  const ProblemConfig pc = load_problem(a.config);
  const ContinuumParams p = pc.to_continuum();
  SolverConfig cfg;
  cfg.order = a.order;
  cfg.order_y = a.order_y;
  cfg.use_exact_q = a.exact_q;
  const PsKernelSolution sol = solve_power_series(p, cfg);
  const SeriesKernel kern(sol);

  fs::create_directories(a.out_dir);
  const std::string stem = stem_or(a.prefix, pc, a.config);
  const fs::path gains_path = fs::path(a.out_dir) / (stem + "_gains.csv");
  const fs::path coeff_path = fs::path(a.out_dir) / (stem + "_coeffs.json");
  const fs::path report_path = fs::path(a.out_dir) / (stem + "_report.json");
  const GainTable g = a.sampled ? sample_gains(kern, pc.n, a.points, pc.placement) : gains(kern, a.points);
  write_gains(gains_path, g);
  write_json(coeff_path, json{{"order", sol.config.order},
                              {"order_y", sol.config.ny()},
                              {"k", series_json(sol.k)},
                              {"kbar", series_json(sol.kbar)}});

  json rep = manifest("solve", argv);
  rep["config"] = a.config;
  rep["solver"] = {{"order", sol.config.order}, {"order_y", sol.config.ny()}, {"exact_q", cfg.use_exact_q}};
  rep["num_unknowns"] = sol.num_unknowns;
  rep["num_equations"] = sol.num_equations;
  rep["rank"] = sol.rank;
  rep["residual"] = sol.residual;
  if (!a.compare.empty()) {
    if (a.compare != "example1_exact") throw Error("unknown reference '" + a.compare + "' (example1_exact)");
    double err = 0.0;
    for (double xi : g.xi) {
      err = std::max(err, std::abs(kern.kbar(1.0, xi) - builtin::example1_kbar(1.0, xi)));
      for (double y : uniform_grid(a.points))
        err = std::max(err, std::abs(kern.k(1.0, xi, y) - builtin::example1_k(1.0, xi, y)));
    }
    rep["max_error"] = err;
  }
  rep["outputs"] = {gains_path.string(), coeff_path.string()};
  rep["timing_seconds"] = {{"assemble", sol.assemble_seconds}, {"solve", sol.solve_seconds}, {"total", clock.seconds()}};
  write_json(report_path, rep);

  std::cout << "#K=" << sol.num_unknowns << " #Eq=" << sol.num_equations << " rank=" << sol.rank
            << " residual=" << sol.residual;
  if (rep.contains("max_error")) std::cout << " max_error=" << rep["max_error"].get<double>();
  std::cout << "\nwrote " << report_path.string() << "\n";
  return 0;
}

// ---- closed-form

struct ClosedArgs {
  std::string config, out_dir = ".", prefix;
  int points = 101;
};

int cmd_closed_form(const ClosedArgs& a, const std::vector<std::string>& argv) {
  const ProblemConfig pc = load_problem(a.config);
  const ContinuumParams p = pc.to_continuum();
  fs::create_directories(a.out_dir);
  const std::string stem = stem_or(a.prefix, pc, a.config);
  const fs::path report_path = fs::path(a.out_dir) / (stem + "_closed_form.json");
  json rep = manifest("closed-form", argv);
  rep["config"] = a.config;
  try {
    const ClosedFormKernel kern = solve_closed_form(p);
    const fs::path gains_path = fs::path(a.out_dir) / (stem + "_gains.csv");
    write_gains(gains_path, gains(kern, a.points));
    rep["applicable"] = true;
    rep["c_x"] = kern.c_x();
    rep["c_y"] = kern.c_y() ? json(*kern.c_y()) : json(nullptr);
    rep["mu"] = kern.problem().mu;
    rep["f"] = {{"a", kern.f().a}, {"b", kern.f().b}, {"offset", kern.f().offset}};
    rep["kernels"] = {{"k", "-exp(c_x (x - xi) / mu) theta_x(xi) theta_y(y) / (lambda(y) + mu)"},
                      {"kbar", "exp(c_x (x - xi) / mu) (a sigma_x(xi) + b theta_x'(xi) / theta_x(xi) + offset)"}};
    rep["outputs"] = {gains_path.string()};
    write_json(report_path, rep);
    std::cout << "applicable: c_x=" << kern.c_x();
    if (kern.c_y()) std::cout << " c_y=" << *kern.c_y();
    std::cout << "\nwrote " << report_path.string() << "\n";
    return 0;
  } catch (const NotApplicable& e) {
    rep["applicable"] = false;
    rep["reason"] = e.what();
    write_json(report_path, rep);
    std::cout << "not applicable: " << e.what() << "\n";
    return kExitNotApplicable;
  }
}

// ---- fit-q

struct FitArgs {
  std::string config, out;
  std::vector<double> data;
  int degree = 2;
  std::string placement = "right";
};

int cmd_fit_q(const FitArgs& a, const std::vector<std::string>& argv) {
  std::vector<double> q = a.data;
  SamplePlacement placement = a.placement == "left" ? SamplePlacement::Left : SamplePlacement::Right;
  if (a.placement != "left" && a.placement != "right") throw ConfigError("--placement must be left or right");
  if (!a.config.empty()) {
    const ProblemConfig pc = load_problem(a.config);
    if (!pc.large_scale) throw ConfigError(a.config + ": fit-q needs a large_scale problem with q data");
    q = pc.large_scale->q;
    placement = pc.placement;
  }
  if (q.empty()) throw ConfigError("fit-q: give --config or --data");
  const auto y = q_abscissae(static_cast<int>(q.size()), placement);
  const FitResult fit = fit_q(y, q, a.degree);
  json rep = manifest("fit-q", argv);
  rep["degree"] = fit.degree;
  rep["coeffs"] = fit.coeffs;
  rep["rms_error"] = fit.rms_error;
  rep["y"] = y;
  rep["q"] = q;
  if (!a.out.empty()) write_json(a.out, rep);
  std::cout.precision(10);
  std::cout << "coeffs (ascending):";
  for (double c : fit.coeffs) std::cout << " " << c;
  std::cout << "\nrms_error=" << fit.rms_error << "\n";
  return 0;
}

// ---- bench

struct BenchArgs {
  std::string example, orders, out;
  BenchOptions opts;
  bool no_baseline = false, no_previous = false, no_time = false;
};

int cmd_bench(BenchArgs a) {
  a.opts.baseline = !a.no_baseline;
  a.opts.previous = !a.no_previous;
  const auto rows = run_bench(a.example, parse_orders(a.orders), a.opts);
  if (a.out.empty()) {
    write_bench_csv(std::cout, rows, !a.no_time);
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error("cannot write " + a.out);
    write_bench_csv(f, rows, !a.no_time);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

// ---- simulate

struct SimArgs {
  std::string config, gains, out, initial = "sine";
  bool open_loop = false;
  SimConfig cfg;
};

int cmd_simulate(const SimArgs& a, const std::vector<std::string>& argv) {
  const ProblemConfig pc = load_problem(a.config);
  const LargeScaleParams ls = pc.to_large_scale();
  SimConfig cfg = a.cfg;
  cfg.initial = parse_initial_profile(a.initial);
  std::optional<GainTable> g;
  if (!a.open_loop) {
    if (a.gains.empty()) throw ConfigError("simulate: give --gains or --open-loop");
    g = GainTable::load(a.gains);
  }
  Clock clock;
  const SimReport r = run(cfg, ls, g);
  if (!a.out.empty()) {
    r.save(a.out);
    json rep = manifest("simulate", argv);
    rep["config"] = a.config;
    rep["gains"] = a.open_loop ? json(nullptr) : json(a.gains);
    rep["sim"] = {{"m_x", cfg.m_x},     {"t_final", cfg.t_final},     {"cfl", cfg.cfl},
                  {"initial", a.initial}, {"amplitude", cfg.amplitude}, {"stable_ratio", cfg.stable_ratio}};
    rep["initial_norm"] = r.initial_norm;
    rep["final_norm"] = r.final_norm;
    rep["diverged"] = r.diverged;
    rep["stable"] = r.stable;
    rep["max_abs_U"] = max_abs_control(r);
    rep["outputs"] = {a.out};
    rep["timing_seconds"] = clock.seconds();
    write_json(fs::path(a.out).replace_extension(".json"), rep);
  }
  std::cout << "initial_norm=" << r.initial_norm << " final_norm=" << r.final_norm
            << " diverged=" << (r.diverged ? "true" : "false") << " stable=" << (r.stable ? "true" : "false") << "\n";
  return 0;
}

// ---- ls-kernels

struct LsArgs {
  std::string config, out, refine;
  int m = 256;
  FdOptions opts;
};

int cmd_ls_kernels(const LsArgs& a, const std::vector<std::string>& argv) {
  const ProblemConfig pc = load_problem(a.config);
  const LargeScaleParams ls = pc.to_large_scale();
  Clock clock;
  const LsKernelSolution sol = solve_characteristics(ls, TriGrid(a.m), a.opts);
  std::cout << "m=" << a.m << " iterations=" << sol.iterations << " final_delta=" << sol.final_delta << "\n";
  json rep = manifest("ls-kernels", argv);
  rep["config"] = a.config;
  rep["m"] = a.m;
  rep["iterations"] = sol.iterations;
  rep["final_delta"] = sol.final_delta;
  if (!a.refine.empty()) {
    const RefinementReport rr = refine_study(ls, parse_orders(a.refine), a.opts);
    rep["refine"] = {{"m", rr.m}, {"diffs", rr.diffs}, {"ratios", rr.ratios}};
    for (std::size_t i = 0; i < rr.diffs.size(); ++i)
      std::cout << "m=" << rr.m[i] << "->" << rr.m[i + 1] << " diff=" << rr.diffs[i]
                << (i < rr.ratios.size() ? " ratio=" + std::to_string(rr.ratios[i]) : "") << "\n";
  }
  rep["timing_seconds"] = clock.seconds();
  if (!a.out.empty()) {
    write_gains(a.out, sol.gain_table(ls.placement));
    rep["outputs"] = {a.out};
    write_json(fs::path(a.out).replace_extension(".json"), rep);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Backstepping kernels for large-scale hyperbolic systems via continuum approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CONTKERN_VERSION);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Power-series solution of the continuum kernel equations");
  solve->add_option("--config", sa.config, "Problem JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--order,-N", sa.order, "Total order N")->required()->check(CLI::Range(0, 200));
  solve->add_option("--order-y", sa.order_y, "Order N_y in y (default N)");
  solve->add_flag("--exact-q", sa.exact_q, "Boundary integral with quadrature moments of q");
  solve->add_option("--out-dir", sa.out_dir, "Output directory");
  solve->add_option("--prefix", sa.prefix, "Output file prefix (default: problem name)");
  solve->add_option("--compare-exact", sa.compare, "Reference kernels for max_error (example1_exact)");
  solve->add_option("--points", sa.points, "Gain grid points per axis")->check(CLI::Range(2, 100000));
  solve->add_flag("--sampled", sa.sampled, "Write gains sampled at the n members instead of a y grid");

  ClosedArgs ca;
  auto* closed = app.add_subcommand("closed-form", "Separable closed-form kernels, when the conditions hold");
  closed->add_option("--config", ca.config, "Problem JSON")->required()->check(CLI::ExistingFile);
  closed->add_option("--out-dir", ca.out_dir, "Output directory");
  closed->add_option("--prefix", ca.prefix, "Output file prefix");
  closed->add_option("--points", ca.points, "Gain grid points per axis")->check(CLI::Range(2, 100000));

  FitArgs fa;
  auto* fit = app.add_subcommand("fit-q", "Least-squares polynomial fit of boundary data q_i");
  fit->add_option("--config", fa.config, "large_scale problem JSON with q data")->check(CLI::ExistingFile);
  fit->add_option("--data", fa.data, "q_1 ... q_n")->delimiter(',');
  fit->add_option("--degree,-M", fa.degree, "Polynomial degree")->check(CLI::Range(0, 50));
  fit->add_option("--placement", fa.placement, "right (y_i = i/n) or left (y_i = (i-1)/n)");
  fit->add_option("--out", fa.out, "Report JSON");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Benchmark table over a list of orders");
  bench->add_option("--example", ba.example, "example1, example1-ry, example1-exactq, example2, example2-ry")
      ->required()
      ->check(CLI::IsMember(bench_examples()));
  bench->add_option("--orders", ba.orders, "Orders, e.g. 12..20 or 6,10,15")->required();
  bench->add_option("--out", ba.out, "CSV output (default stdout)");
  bench->add_option("--order-y", ba.opts.reduced_order_y, "N_y of the reduced variants");
  bench->add_option("--fd-m", ba.opts.fd_m, "Grid of the n+1 baseline")->check(CLI::Range(2, 4096));
  bench->add_option("--grid", ba.opts.grid, "Comparison grid points per axis")->check(CLI::Range(2, 100000));
  bench->add_option("--fit-degree", ba.opts.q_fit_degree, "q fit degree (example2)");
  bench->add_option("--sigma-scale", ba.opts.sigma_scale, "Multiplies sigma (example2)");
  bench->add_flag("--no-baseline", ba.no_baseline, "Skip d_{n+1}");
  bench->add_flag("--no-previous", ba.no_previous, "Skip d_{N-1}");
  bench->add_flag("--no-time", ba.no_time, "Omit the timing column");

  SimArgs ma;
  auto* sim = app.add_subcommand("simulate", "Closed-loop simulation of the n+1 system");
  sim->add_option("--config", ma.config, "Problem JSON")->required()->check(CLI::ExistingFile);
  auto* gopt = sim->add_option("--gains", ma.gains, "Gain CSV (sampled, n columns)")->check(CLI::ExistingFile);
  sim->add_flag("--open-loop", ma.open_loop, "U = 0")->excludes(gopt);
  sim->add_option("--m-x", ma.cfg.m_x, "Grid points in x");
  sim->add_option("--t-final", ma.cfg.t_final, "Final time");
  sim->add_option("--cfl", ma.cfg.cfl, "CFL number");
  sim->add_option("--initial", ma.initial, "sine or bump");
  sim->add_option("--amplitude", ma.cfg.amplitude, "Initial amplitude");
  sim->add_option("--stable-ratio", ma.cfg.stable_ratio, "Stable when final/initial norm is below this");
  sim->add_option("--out", ma.out, "CSV output t,U,norm (a JSON report is written next to it)");

  LsArgs la;
  auto* lsk = app.add_subcommand("ls-kernels", "Grid solution of the n+1 kernel equations");
  lsk->add_option("--config", la.config, "Problem JSON")->required()->check(CLI::ExistingFile);
  lsk->add_option("--m", la.m, "Grid intervals")->check(CLI::Range(2, 4096));
  lsk->add_option("--tol", la.opts.tol, "Sweep tolerance");
  lsk->add_option("--max-iter", la.opts.max_iter, "Maximum sweeps");
  lsk->add_option("--refine", la.refine, "Refinement study grids, e.g. 64,128,256");
  lsk->add_option("--out", la.out, "Gain CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(sa, args);
    if (*closed) return cmd_closed_form(ca, args);
    if (*fit) return cmd_fit_q(fa, args);
    if (*bench) return cmd_bench(ba);
    if (*sim) return cmd_simulate(ma, args);
    if (*lsk) return cmd_ls_kernels(la, args);
  } catch (const NotApplicable& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    return kExitNotApplicable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
