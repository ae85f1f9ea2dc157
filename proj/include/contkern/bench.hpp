#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contkern/kernel.hpp"

namespace contkern {

struct BenchOptions {
  int reduced_order_y = 2;  ///< N_y of the "-ry" and "-exactq" variants
  int fd_m = 256;           ///< grid of the n+1 baseline (example2)
  int grid = 101;           ///< points per axis for gain comparisons at x = 1
  int q_fit_degree = 2;     ///< example2 only
  double sigma_scale = 1.0; ///< example2 only: multiplies sigma
  bool baseline = true;     ///< example2: compute d_{n+1}
  bool previous = true;     ///< compute d_{N-1} (solves order N-1 as well)
};

struct BenchRow {
  int order = 0;
  int order_y = 0;
  long num_unknowns = 0;
  long num_equations = 0;
  double seconds = 0.0;
  double residual = 0.0;
  std::optional<double> max_error;  ///< against the closed form (example1)
  std::optional<double> d_np1;      ///< against the n+1 baseline (example2)
  std::optional<double> d_prev;     ///< against order N-1
};

/// Known ids: example1, example1-ry, example1-exactq, example2, example2-ry.
const std::vector<std::string>& bench_examples();

std::vector<BenchRow> run_bench(const std::string& example, const std::vector<int>& orders,
                                const BenchOptions& opts = {});

/// Columns N,Ny,K,Eq,seconds,residual,max_error,d_np1,d_prev; absent values
/// are empty cells.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_time = true);

/// sup over a grid x grid mesh of (xi, y) of |k_a(1,.,.) - k_b(1,.,.)| and
/// |kbar_a(1,.) - kbar_b(1,.)|.
double max_gain_diff(const ContinuumKernel& a, const ContinuumKernel& b, int grid = 101);

}  // namespace contkern
