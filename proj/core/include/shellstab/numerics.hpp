#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace shellstab::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Adaptive Gauss-Kronrod integration on [a, b] to the requested relative
// tolerance (measured against the L1 norm of the integrand).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

// Same, additionally subdividing at the listed interior break points.
double integrate_piecewise(const std::function<double(double)>& f, std::vector<double> breaks,
                           double rel_tol = 1e-12);

// Root of a sign-changing function on [lo, hi] by bisection.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iter = 200);

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Nelder-Mead simplex minimization started from x0 with initial edge `step`.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x0, double step, double x_tol,
                           int max_evaluations = 4000);

// Golden-section search for a maximum of a unimodal function on [a, b].
std::pair<double, double> golden_maximize(const std::function<double(double)>& f, double a, double b,
                                          double x_tol);

}  // namespace shellstab::numerics
