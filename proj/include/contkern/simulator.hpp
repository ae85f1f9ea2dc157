#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contkern/kernel_eval.hpp"
#include "contkern/problem.hpp"

namespace contkern {

enum class InitialProfile {
  Sine,  ///< u^i = A sin(pi x), v = 0
  Bump,  ///< u^i = A sin^2(pi x), v = 0
};

InitialProfile parse_initial_profile(const std::string& name);
std::string to_string(InitialProfile p);

struct SimConfig {
  int m_x = 256;  ///< grid points in x, spacing 1/(m_x - 1)
  double t_final = 3.0;
  double cfl = 0.4;
  InitialProfile initial = InitialProfile::Sine;
  double amplitude = 1.0;
  /// Stable when the final norm is below this fraction of the initial one.
  double stable_ratio = 1e-3;

  void validate() const;
};

/// Full grid state including boundary nodes; u(i, j) = u^{i+1}(t, x_j).
struct SimState {
  double t = 0.0;
  Eigen::MatrixXd u;
  Eigen::VectorXd v;
  double U = 0.0;
};

/// Method of lines for the n+1 plant: first-order upwind in x, classical
/// RK4 in time, boundary values imposed after every stage.
class Simulator {
 public:
  /// Without gains the loop is open (U = 0). Sampled gain tables must have
  /// n columns; they are interpolated linearly onto the grid.
  Simulator(const LargeScaleParams& ls, const SimConfig& cfg, std::optional<GainTable> gains = std::nullopt);

  int n() const noexcept { return n_; }
  int points() const noexcept { return m_; }
  double h() const noexcept { return h_; }
  /// CFL-limited step with t_final an integer multiple.
  double dt() const noexcept { return dt_; }
  int steps() const noexcept { return steps_; }

  SimState initial_state() const;
  /// Feedback integral by the trapezoid rule. v(1) = U enters the rule, so
  /// the implicit relation is solved for U.
  double control(const SimState& s) const;
  /// Imposes u^i(0) = q_i v(0) and v(1) = U.
  void apply_boundary(SimState& s) const;
  SimState step(const SimState& s, double dt) const;
  /// sqrt(h [(1/n) sum_i sum_j u_ij^2 + sum_j v_j^2]).
  double norm(const SimState& s) const;

 private:
  void rhs(const SimState& s, Eigen::MatrixXd& du, Eigen::VectorXd& dv) const;

  int n_, m_;
  double h_, dt_;
  int steps_;
  SimConfig cfg_;
  Eigen::MatrixXd lam_, W_, theta_;  // n x m
  std::vector<Eigen::MatrixXd> sigma_;  // per grid point, n x n
  Eigen::VectorXd mu_, q_;
  bool closed_ = false;
  Eigen::MatrixXd gk_;  // n x m
  Eigen::VectorXd gkbar_;
};

struct SimReport {
  std::vector<double> t, U, norm;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  bool diverged = false;
  bool stable = false;

  /// Columns t,U,norm.
  void write_csv(std::ostream& out) const;
  void save(const std::string& path) const;
};

SimReport run(const SimConfig& cfg, const LargeScaleParams& ls, std::optional<GainTable> gains = std::nullopt);

/// sup_t |U_a - U_b| over matching time samples.
double max_control_diff(const SimReport& a, const SimReport& b);
double max_abs_control(const SimReport& r);

}  // namespace contkern
