#pragma once

#include <functional>

namespace leo {

struct quad_result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;   // intervals in the final partition
};

// Globally adaptive Gauss–Kronrod 7/15 integration of f over [lo, hi].
// Splits the interval with the largest error estimate until the summed
// estimate drops below abs_tol or the interval budget runs out; the caller
// decides whether a result that missed abs_tol is acceptable by inspecting
// .error. Throws quadrature_failure only if the integrand produces NaN.
quad_result integrate(const std::function<double(double)>& f, double lo,
                      double hi, double abs_tol, int max_intervals = 4000);

}  // namespace leo
