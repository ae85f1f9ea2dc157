#pragma once

#include <Eigen/Dense>
#include <vector>

#include "contkern/kernel_eval.hpp"
#include "contkern/problem.hpp"

namespace contkern {

/// Nodes (x_a, xi_b) = (a h, b h), 0 <= b <= a <= m, of the triangle
/// 0 <= xi <= x <= 1.
struct TriGrid {
  int m = 256;

  explicit TriGrid(int m_ = 256);
  double h() const noexcept { return 1.0 / m; }
  int num_nodes() const noexcept { return (m + 1) * (m + 2) / 2; }
};

struct FdOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

/// Grid solution of the n+1 kernel equations. k[i] holds k^{i+1} for
/// i < n and k[n] holds k^{n+1}; entry (a, b) is the value at (x_a, xi_b)
/// (only b <= a is meaningful).
struct LsKernelSolution {
  TriGrid grid{256};
  int n = 0;
  std::vector<Eigen::MatrixXd> k;
  int iterations = 0;
  double final_delta = 0.0;

  /// Value at an arbitrary point of the triangle (bilinear interpolation,
  /// linear in the cells cut by the diagonal).
  double value(int i, double x, double xi) const;
  /// Gains at x = 1 on the grid nodes, as a sampled table with y = y_i.
  GainTable gain_table(SamplePlacement placement = SamplePlacement::Right) const;
};

/// Successive approximation along characteristics: each sweep integrates
/// the transport equations from the boundary data (diagonal for k^i, xi = 0
/// for k^{n+1}) with trapezoidal quadrature of the source terms evaluated
/// from the previous iterate. Throws NumericalError when the sup change is
/// still above tol after max_iter sweeps.
LsKernelSolution solve_characteristics(const LargeScaleParams& ls, const TriGrid& grid, const FdOptions& opts = {});

/// Differentiable view of a grid solution (interpolated values, centred
/// differences of width h for derivatives), for largescale_residual.
class FdKernel final : public LargeScaleKernel {
 public:
  explicit FdKernel(const LsKernelSolution& sol) : sol_(sol) {}
  int n() const override { return sol_.n; }
  double k(int i, double x, double xi) const override { return sol_.value(i, x, xi); }
  double k_x(int i, double x, double xi) const override;
  double k_xi(int i, double x, double xi) const override;

 private:
  const LsKernelSolution& sol_;
};

struct RefinementReport {
  std::vector<int> m;
  /// diffs[k]: sup over the nodes of the coarser grid of the difference
  /// between solutions m[k] and m[k+1] (all n+1 kernels).
  std::vector<double> diffs;
  /// ratios[k] = diffs[k] / diffs[k+1].
  std::vector<double> ratios;
  std::vector<int> iterations;
};

RefinementReport refine_study(const LargeScaleParams& ls, const std::vector<int>& m_list, const FdOptions& opts = {});

}  // namespace contkern
