#pragma once
// Scalar minimization on a bounded interval: Brent's parabolic/golden
// hybrid, with a plain golden-section fallback.

#include <functional>

namespace hullfit {

struct ScalarMinResult {
  double x = 0.0;
  double fx = 0.0;
  int evals = 0;
};

// Minimizes f on [a, b]. tol is an absolute tolerance on x.
ScalarMinResult brent_min(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-8, int max_iter = 100);

ScalarMinResult golden_min(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-8, int max_iter = 200);

}  // namespace hullfit
