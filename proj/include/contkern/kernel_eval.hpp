#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "contkern/kernel.hpp"
#include "contkern/problem.hpp"

namespace contkern {

std::vector<double> uniform_grid(int points);

/// Control gains at x = 1. Rows of `k` follow `xi`, columns follow `y`.
/// For sampled tables column j holds member j+1 at y = y_{j+1}.
struct GainTable {
  std::vector<double> xi;
  std::vector<double> y;
  bool sampled = false;
  Eigen::MatrixXd k;
  std::vector<double> kbar;

  /// Throws on inconsistent sizes, a non-increasing xi grid or non-finite
  /// entries.
  void validate() const;

  /// CSV: optional "# kind=continuum|sampled" line, header
  /// "xi,k@<y_1>,...,k@<y_m>,kbar", one row per xi.
  void write_csv(std::ostream& out) const;
  static GainTable read_csv(std::istream& in);
  void save(const std::string& path) const;
  static GainTable load(const std::string& path);
};

/// k(1, xi, y) and kbar(1, xi) on the tensor grid.
GainTable gains(const ContinuumKernel& kernel, const std::vector<double>& xi, const std::vector<double>& y);
GainTable gains(const ContinuumKernel& kernel, int points = 101);

/// k_a^i(1, xi) = k(1, xi, y_i), k_a^{n+1}(1, xi) = kbar(1, xi).
GainTable sample_gains(const ContinuumKernel& kernel, int n, const std::vector<double>& xi,
                       SamplePlacement placement = SamplePlacement::Right);
GainTable sample_gains(const ContinuumKernel& kernel, int n, int xi_points = 101,
                       SamplePlacement placement = SamplePlacement::Right);

/// Sup-norm residuals of the four kernel equations. The diagonal condition
/// is measured in its original form k(x,x,.) + theta / (lambda + mu).
struct KernelResiduals {
  double pde_k = 0.0;
  double pde_kbar = 0.0;
  double bc_diag = 0.0;
  double bc_left = 0.0;

  double max() const;
};

/// Evaluates the continuum kernel equations on an m x m x m grid of the
/// prism (points with xi <= x). Ensemble integrals use adaptive quadrature
/// with tolerance `quad_tol`.
KernelResiduals continuum_residual(const ContinuumKernel& kernel, const ContinuumParams& p, int m = 21,
                                   double quad_tol = 1e-10);

/// Kernels of the n+1 equations as differentiable functions (index i is
/// 0-based; i == n is the (n+1)-th kernel).
class LargeScaleKernel {
 public:
  virtual ~LargeScaleKernel() = default;
  virtual int n() const = 0;
  virtual double k(int i, double x, double xi) const = 0;
  virtual double k_x(int i, double x, double xi) const = 0;
  virtual double k_xi(int i, double x, double xi) const = 0;
};

/// k^i(x, xi) = k(x, xi, y_i), k^{n+1} = kbar.
class SampledKernel final : public LargeScaleKernel {
 public:
  SampledKernel(const ContinuumKernel& kernel, int n, SamplePlacement placement = SamplePlacement::Right);
  int n() const override { return n_; }
  double k(int i, double x, double xi) const override;
  double k_x(int i, double x, double xi) const override;
  double k_xi(int i, double x, double xi) const override;

 private:
  const ContinuumKernel& kernel_;
  int n_;
  std::vector<double> y_;
};

/// Sup-norm residuals of the n+1 kernel equations on an m x m triangle grid;
/// pde_k and bc_diag are maxima over all members.
KernelResiduals largescale_residual(const LargeScaleKernel& kernel, const LargeScaleParams& ls, int m = 21);

/// Sup over the shared grid of |a - b| in both k and kbar. Throws when the
/// grids differ.
double diff_solutions(const GainTable& a, const GainTable& b);

}  // namespace contkern
