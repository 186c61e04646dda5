#include "shellstab/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <numbers>
#include <string>

#include "shellstab/errors.hpp"

namespace shellstab::numerics {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) {
    throw PreconditionError("gauss_legendre: need at least one node");
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) {
    return 0.0;
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };
  auto evaluate = [&](double lo, double hi) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = Rule::integrate(f, lo, hi, 0, 0.0, &error, &l1);
    return Panel{lo, hi, value, error};
  };
  std::priority_queue<Panel> panels;
  panels.push(evaluate(a, b));
  double total = panels.top().value;
  double total_error = panels.top().error;
  constexpr int kMaxPanels = 4000;
  int count = 1;
  while (count < kMaxPanels) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(total);
    if (total_error <= std::max(rel_tol * std::abs(total), floor)) {
      break;
    }
    const Panel worst = panels.top();
    if (worst.error <= floor / kMaxPanels) {
      break;
    }
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = evaluate(worst.lo, mid);
    const Panel right = evaluate(mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

double integrate_piecewise(const std::function<double(double)>& f, std::vector<double> breaks,
                           double rel_tol) {
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += integrate(f, breaks[i], breaks[i + 1], rel_tol);
  }
  return total;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) {
    return lo;
  }
  if (fhi == 0.0) {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw ConvergenceError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) {
      return mid;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x0, double step, double x_tol, int max_evaluations) {
  const std::size_t dim = x0.size();
  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += step;
  }
  std::vector<double> values(dim + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= dim; ++i) {
    values[i] = f(simplex[i]);
    ++evals;
  }
  std::vector<std::size_t> order(dim + 1);
  auto point_along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
    std::vector<double> p(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] = centroid[k] + t * (worst[k] - centroid[k]);
    }
    return p;
  };
  while (evals < max_evaluations) {
    for (std::size_t i = 0; i <= dim; ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];
    double spread = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (spread < x_tol) {
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) {
        continue;
      }
      for (std::size_t k = 0; k < dim; ++k) {
        centroid[k] += simplex[i][k] / dim;
      }
    }
    auto reflected = point_along(centroid, simplex[worst], -1.0);
    const double fr = f(reflected);
    ++evals;
    if (fr < values[best]) {
      auto expanded = point_along(centroid, simplex[worst], -2.0);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    auto contracted = point_along(centroid, simplex[worst], outside ? -0.5 : 0.5);
    const double fc = f(contracted);
    ++evals;
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) {
        continue;
      }
      for (std::size_t k = 0; k < dim; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = f(simplex[i]);
      ++evals;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return MinimizeResult{simplex[best], values[best], evals};
}

std::pair<double, double> golden_maximize(const std::function<double(double)>& f, double a, double b,
                                          double x_tol) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace shellstab::numerics
