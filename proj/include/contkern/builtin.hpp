#pragma once

#include <array>
#include <string>
#include <vector>

#include "contkern/problem.hpp"

namespace contkern::builtin {

/// Constant-speed ensemble with c_x = c_y = 0 and closed-form kernels
/// k = 35 y (y-1) e^{35 xi / pi^2}, kbar = 35 / (2 pi^2).
ContinuumParams example1();

/// Closed-form kernels of example1().
double example1_k(double x, double xi, double y);
double example1_kbar(double x, double xi);

/// Noisy samples of y(y-1) at y = i/10, i = 1..10.
inline constexpr std::array<double, 10> kExample2Q{-0.127, -0.119, -0.197, -0.28,  -0.272,
                                                   -0.235, -0.164, -0.113, -0.124, 0.047};

/// Ten-member large-scale system with polynomial i/n, j/n dependence and q
/// given as data (no template for q).
LargeScaleParams example2_large_scale(int n = 10);

/// Continuum of example2_large_scale(): template lifting plus a degree-M
/// polynomial fit of the q data.
ContinuumParams example2_continuum(int q_fit_degree = 2);

/// lambda = mu = 1, everything else zero.
ContinuumParams zero_problem();

}  // namespace contkern::builtin
