#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contkern/problem.hpp"
#include "contkern/series.hpp"

namespace contkern {

/// Options of the truncated power-series kernel solver.
struct SolverConfig {
  int order = 12;                 ///< N, total order of the kernel series
  std::optional<int> order_y;     ///< N_y, order in y of k (defaults to N)
  bool use_exact_q = false;       ///< boundary integral from quadrature moments of q
  bool truncate_params = true;    ///< cut parameter Taylor series at total degree N

  int ny() const noexcept { return order_y.value_or(order); }
  void validate() const;
};

/// Which kernel equation a matched monomial row comes from.
enum class EquationSource : std::uint8_t {
  PdeK = 0,     ///< transport equation of k
  PdeKbar = 1,  ///< transport equation of kbar
  BcDiag = 2,   ///< (lambda + mu) k(x,x,y) + theta = 0
  BcLeft = 3,   ///< mu(0) kbar(x,0) - int q lambda(0,.) k(x,0,.) = 0
};

std::string_view source_name(EquationSource s) noexcept;

/// Unknown coefficient: K_{m} of k (m over x, xi, y) or Kbar_{m} of kbar.
struct Unknown {
  bool is_kbar = false;
  Monomial m;
  bool operator==(const Unknown&) const = default;
};

struct EquationKey {
  EquationSource source = EquationSource::PdeK;
  Monomial m;
  bool operator==(const EquationKey&) const = default;
};

/// Coefficient-matching system A x = b.
struct LinearSystem {
  Eigen::SparseMatrix<double> A;  ///< column-compressed
  Eigen::VectorXd b;
  std::vector<Unknown> columns;   ///< K unknowns (graded lex), then Kbar unknowns
  std::vector<EquationKey> rows;  ///< ordered by (source, graded lex)
  SolverConfig config;
  int num_k = 0;
  int num_kbar = 0;
  std::vector<std::string> warnings;

  int num_unknowns() const noexcept { return static_cast<int>(columns.size()); }
  int num_equations() const noexcept { return static_cast<int>(rows.size()); }
};

/// Truncated power-series kernels (k, kbar).
struct PsKernelSolution {
  TruncatedSeries k;     ///< over (X, XI, Y)
  TruncatedSeries kbar;  ///< over (X, XI)
  Eigen::VectorXd x;     ///< coefficients in LinearSystem column order
  double residual = 0.0; ///< ||A x - b||_2
  int rank = 0;
  SolverConfig config;
  int num_unknowns = 0;
  int num_equations = 0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Number of unknown coefficients (K, Kbar) for orders (N, N_y).
std::pair<long, long> count_unknowns(int order, int order_y);

/// Builds the coefficient-matching system for the continuum kernel equations.
LinearSystem assemble(const ContinuumParams& p, const SolverConfig& cfg);

/// Minimal-norm least-squares solution via a rank-revealing complete
/// orthogonal factorization.
PsKernelSolution solve_ls(const LinearSystem& sys);

/// assemble + solve_ls.
PsKernelSolution solve_power_series(const ContinuumParams& p, const SolverConfig& cfg);

double residual_norm(const LinearSystem& sys, const Eigen::VectorXd& x);

/// Packs series coefficients into the column order of `sys` (monomials
/// outside the unknown set are ignored).
Eigen::VectorXd pack_coefficients(const LinearSystem& sys, const TruncatedSeries& k, const TruncatedSeries& kbar);

/// True iff ||A x_candidate - b|| <= ||A x_reference - b|| + margin.
bool optimality_check(const LinearSystem& sys, const Eigen::VectorXd& candidate, const Eigen::VectorXd& reference,
                      double margin = 1e-10);

}  // namespace contkern
