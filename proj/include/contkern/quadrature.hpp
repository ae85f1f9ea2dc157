#pragma once

#include <functional>

namespace contkern {

/// Adaptive Gauss-Kronrod integral of f over [a, b]. `tol` bounds the
/// estimated relative error; the result is exact for polynomials of degree
/// below 62 without any subdivision.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                          double* error_estimate = nullptr);

/// Shorthand for integrate_adaptive over [0, 1].
inline double integrate01(const std::function<double(double)>& f, double tol = 1e-13) {
  return integrate_adaptive(f, 0.0, 1.0, tol);
}

}  // namespace contkern
