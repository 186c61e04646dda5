#include "shellstab/steklov_quotient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shellstab/domains.hpp"
#include "shellstab/errors.hpp"
#include "shellstab/steklov_radial.hpp"

namespace shellstab {

QuotientEvaluation evaluate_quotient(const BoundaryProfile& outer, const ShellGeometry& geom, double threshold) {
  geom.validate();
  const int n = geom.n;
  if (outer.dimension() != n) {
    throw PreconditionError("evaluate_quotient: profile dimension does not match the geometry");
  }
  const SteklovRadialContext ctx(n, geom.r1, geom.r2);
  const auto s = outer.sample();
  QuotientEvaluation out;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    const double r = geom.r2 + s.value[i];
    if (!(r >= geom.r1)) {
      std::ostringstream os;
      os << "evaluate_quotient: outer radius " << r << " falls below R1 = " << geom.r1;
      throw PreconditionError(os.str());
    }
    const double jac = std::pow(r, n - 1);
    out.n_val += s.weight[i] * ctx.f(r) * jac;
    out.d_val += s.weight[i] * ctx.h(r) * jac * std::sqrt(1.0 + s.grad_sq[i] / (r * r));
    out.gradient_norm_sq += s.weight[i] * s.grad_sq[i];
  }
  out.ratio = out.n_val / out.d_val;
  const double sphere = std::pow(geom.r2, n - 1);
  out.gap = sphere * (ctx.f(geom.r2) * out.d_val - ctx.h(geom.r2) * out.n_val);
  if (threshold <= 0.0) {
    threshold = 0.05 * geom.r2;
  }
  out.outside_threshold = outer.w1inf_norm() > threshold;
  return out;
}

StabilityGap stability_gap(const BoundaryProfile& outer, const ShellGeometry& geom) {
  const auto q = evaluate_quotient(outer, geom);
  StabilityGap out;
  out.gap = q.gap;
  if (q.gradient_norm_sq > 0.0) {
    out.lower_bound = q.gap / q.gradient_norm_sq;
  }
  return out;
}

double gap_coefficient(const BoundaryProfile& shape, const ShellGeometry& geom) {
  geom.validate();
  const int n = geom.n;
  const double r2 = geom.r2;
  const SteklovRadialContext ctx(n, geom.r1, r2);
  const double a0 = ctx.a0();
  const double a1 = ctx.a1();
  const double a2 = ctx.a2();
  // The projection absorbs the mean, so only the mean-free part contributes.
  const double m = shape.mean();
  const double value_sq = shape.l2_norm_sq() - m * m * geom.outer_sphere_area() / std::pow(r2, n - 1);
  const double grad_sq = shape.gradient_l2_norm_sq();
  return std::pow(r2, n - 2) * (n * a1 + r2 * a2) / 2.0 * value_sq +
         std::pow(r2, n - 3) * (a0 / 2.0 - r2 * a1 / (2.0 * (n - 1))) * grad_sq;
}

double gap_coefficient_extrapolated(const BoundaryProfile& shape, const ShellGeometry& geom, double eps) {
  if (!(eps > 0.0)) {
    throw PreconditionError("gap_coefficient_extrapolated: eps must be positive");
  }
  auto quotient = [&](double e) {
    const auto u = project_perimeter(shape.scaled(e), geom);
    return evaluate_quotient(u, geom).gap / (e * e);
  };
  const double q1 = quotient(eps);
  const double q2 = quotient(eps / 2.0);
  const double q4 = quotient(eps / 4.0);
  const double r12 = 2.0 * q2 - q1;
  const double r24 = 2.0 * q4 - q2;
  return (4.0 * r24 - r12) / 3.0;
}

ConstantEstimate estimate_constant(const std::vector<double>& ratios) {
  if (ratios.empty()) {
    throw PreconditionError("estimate_constant: no samples");
  }
  ConstantEstimate out;
  out.samples = static_cast<int>(ratios.size());
  out.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  double sum = 0.0;
  for (double r : ratios) {
    sum += r;
  }
  out.mean = sum / out.samples;
  if (out.samples > 1) {
    double ss = 0.0;
    for (double r : ratios) {
      ss += (r - out.mean) * (r - out.mean);
    }
    out.standard_error = std::sqrt(ss / (out.samples - 1) / out.samples);
  }
  out.estimate = out.min_ratio - 3.0 * out.standard_error;
  return out;
}

}  // namespace shellstab
