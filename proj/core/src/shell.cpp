#include "shellstab/shell.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "shellstab/errors.hpp"
#include "shellstab/numerics.hpp"
#include "shellstab/specfun.hpp"

namespace shellstab {

using specfun::BesselOrder;

void ShellGeometry::validate() const {
  if (n != 2 && n != 3) {
    throw PreconditionError("ShellGeometry: dimension must be 2 or 3, got " + std::to_string(n));
  }
  if (!(beta < 0.0)) {
    throw PreconditionError("ShellGeometry: beta must be negative, got " + std::to_string(beta));
  }
  if (!(r1 > 0.0 && r2 > r1 && std::isfinite(r2))) {
    throw PreconditionError("ShellGeometry: radii must satisfy 0 < r1 < r2 < inf");
  }
}

double ShellGeometry::unit_ball_volume() const {
  return n == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0;
}

double ShellGeometry::shell_volume() const {
  return unit_ball_volume() * (std::pow(r2, n) - std::pow(r1, n));
}

double ShellGeometry::outer_sphere_area() const { return n * unit_ball_volume() * std::pow(r2, n - 1); }

RadialEigenpair::RadialEigenpair(const ShellGeometry& geom, double kappa)
    : geom_(geom), kappa_(kappa), nu_(0.5 * geom.n - 1.0) {
  geom_.validate();
  if (!(kappa > 0.0)) {
    throw PreconditionError("RadialEigenpair: kappa must be positive");
  }
  const BesselOrder upper(nu_ + 1.0);
  k_inner_ = specfun::bessel_k_scaled(upper, kappa_ * geom_.r1);
  i_inner_ = specfun::bessel_i_scaled(upper, kappa_ * geom_.r1);

  const double area = geom_.n * geom_.unit_ball_volume();
  const double power = geom_.n - 1.0 - 2.0 * nu_;
  const double mass = numerics::integrate(
      [&](double r) {
        const double c = combo(r, false);
        return c * c * std::pow(r, power);
      },
      geom_.r1, geom_.r2, 1e-13);
  scale_ = 1.0 / std::sqrt(area * mass);
  z_min_ = psi(geom_.r1);
  z_max_ = psi(geom_.r2);
}

double RadialEigenpair::combo(double r, bool derivative) const {
  const double grow = std::exp(kappa_ * (r - geom_.r2));
  const double decay = std::exp(-kappa_ * ((r - geom_.r1) + (geom_.r2 - geom_.r1)));
  const double x = kappa_ * r;
  if (!derivative) {
    const BesselOrder order(nu_);
    return k_inner_ * specfun::bessel_i_scaled(order, x) * grow +
           i_inner_ * specfun::bessel_k_scaled(order, x) * decay;
  }
  const BesselOrder order(nu_ + 1.0);
  return k_inner_ * specfun::bessel_i_scaled(order, x) * grow -
         i_inner_ * specfun::bessel_k_scaled(order, x) * decay;
}

double RadialEigenpair::psi(double r) const { return scale_ * std::pow(r, -nu_) * combo(r, false); }

double RadialEigenpair::psi_prime(double r) const {
  return scale_ * kappa_ * std::pow(r, -nu_) * combo(r, true);
}

double RadialEigenpair::rayleigh_quotient() const {
  const double power = geom_.n - 1.0;
  const double grad = numerics::integrate(
      [&](double r) {
        const double d = psi_prime(r);
        return d * d * std::pow(r, power);
      },
      geom_.r1, geom_.r2, 1e-13);
  const double mass = numerics::integrate(
      [&](double r) {
        const double v = psi(r);
        return v * v * std::pow(r, power);
      },
      geom_.r1, geom_.r2, 1e-13);
  const double edge = psi(geom_.r2);
  return (grad + geom_.beta * std::pow(geom_.r2, power) * edge * edge) / mass;
}

double shell_robin_residual(const ShellGeometry& geom, double kappa) {
  const double nu = 0.5 * geom.n - 1.0;
  const BesselOrder lower(nu);
  const BesselOrder upper(nu + 1.0);
  const double a = specfun::bessel_k_scaled(upper, kappa * geom.r1);
  const double b = specfun::bessel_i_scaled(upper, kappa * geom.r1);
  const double x = kappa * geom.r2;
  const double decay = std::exp(-2.0 * kappa * (geom.r2 - geom.r1));
  const double eta = a * specfun::bessel_i_scaled(lower, x) + b * specfun::bessel_k_scaled(lower, x) * decay;
  const double mu = a * specfun::bessel_i_scaled(upper, x) - b * specfun::bessel_k_scaled(upper, x) * decay;
  return kappa * mu / eta + geom.beta;
}

namespace {

double solve_kappa(const ShellGeometry& geom, const KappaBracket& bracket) {
  geom.validate();
  const double width = geom.r2 - geom.r1;
  const double hi = bracket.hi > 0.0
                        ? bracket.hi
                        : 10.0 * std::max(1.0, std::abs(geom.beta)) * std::max(1.0, 1.0 / width);
  const double lo = bracket.lo;
  if (!(lo > 0.0 && hi > lo && bracket.samples >= 2)) {
    throw PreconditionError("shell_eigenvalue: invalid kappa bracket");
  }
  auto residual = [&](double k) { return shell_robin_residual(geom, k); };

  const double ratio = std::pow(hi / lo, 1.0 / (bracket.samples - 1));
  double left = lo;
  double f_left = residual(left);
  double right = 0.0;
  bool found = false;
  for (int i = 1; i < bracket.samples; ++i) {
    right = i == bracket.samples - 1 ? hi : lo * std::pow(ratio, i);
    const double f_right = residual(right);
    if ((f_left < 0.0) != (f_right < 0.0)) {
      found = true;
      break;
    }
    left = right;
    f_left = f_right;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "shell_eigenvalue: Robin residual has no sign change for kappa in [" << lo << ", " << hi << "]";
    throw ConvergenceError(msg.str());
  }
  double kappa = numerics::bisect(residual, left, right, 1e-9 * right);

  // Newton polish with a central-difference slope, kept inside the bracket.
  for (int it = 0; it < 8; ++it) {
    const double step = 1e-6 * kappa;
    const double slope = (residual(kappa + step) - residual(kappa - step)) / (2.0 * step);
    const double update = residual(kappa) / slope;
    const double next = kappa - update;
    if (!(next > left && next < right)) {
      break;
    }
    kappa = next;
    if (std::abs(update) < 1e-15 * kappa) {
      break;
    }
  }
  return kappa;
}

}  // namespace

double shell_eigenvalue(const ShellGeometry& geom, const KappaBracket& bracket) {
  const double kappa = solve_kappa(geom, bracket);
  return -kappa * kappa;
}

RadialEigenpair shell_eigenfunction(const ShellGeometry& geom, const KappaBracket& bracket) {
  RadialEigenpair pair(geom, solve_kappa(geom, bracket));
  if (!(pair.z_m() > 0.0 && pair.z_M() > pair.z_m())) {
    throw ConvergenceError("shell_eigenfunction: root is not the principal eigenvalue");
  }
  return pair;
}

std::vector<BetaPoint> shell_eigenvalue_beta_curve(const ShellGeometry& geom, const std::vector<double>& betas) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] < 0.0) || (i > 0 && !(betas[i] > betas[i - 1]))) {
      throw PreconditionError("shell_eigenvalue_beta_curve: betas must be negative and strictly increasing");
    }
  }
  std::vector<BetaPoint> curve;
  curve.reserve(betas.size());
  for (double beta : betas) {
    ShellGeometry g = geom;
    g.beta = beta;
    curve.push_back({beta, shell_eigenvalue(g)});
  }
  return curve;
}

}  // namespace shellstab
