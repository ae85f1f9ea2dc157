#include "contkern/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace contkern {

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          double* error_estimate) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
  if (error_estimate != nullptr) *error_estimate = err;
  return v;
}

}  // namespace contkern
