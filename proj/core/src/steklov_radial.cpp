#include "shellstab/steklov_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shellstab/errors.hpp"
#include "shellstab/specfun.hpp"

namespace shellstab {

using specfun::BesselOrder;

SteklovRadialContext::SteklovRadialContext(int n, double r1, double r2) : n_(n), r1_(r1), r2_(r2) {
  if (n != 2 && n != 3) {
    throw PreconditionError("SteklovRadialContext: dimension must be 2 or 3");
  }
  if (!(r1 > 0.0 && r2 > r1)) {
    throw PreconditionError("SteklovRadialContext: radii must satisfy 0 < r1 < r2");
  }
  const BesselOrder upper(0.5 * n);
  k_inner_ = specfun::bessel_k(upper, r1);
  i_inner_ = specfun::bessel_i(upper, r1);
}

double SteklovRadialContext::eta(double r) const {
  const BesselOrder order(0.5 * n_ - 1.0);
  return k_inner_ * specfun::bessel_i(order, r) + i_inner_ * specfun::bessel_k(order, r);
}

double SteklovRadialContext::mu(double r) const {
  const BesselOrder order(0.5 * n_);
  return k_inner_ * specfun::bessel_i(order, r) - i_inner_ * specfun::bessel_k(order, r);
}

double SteklovRadialContext::eta_prime(double r) const { return (0.5 * n_ - 1.0) * eta(r) / r + mu(r); }

double SteklovRadialContext::mu_prime(double r) const { return -0.5 * n_ * mu(r) / r + eta(r); }

double SteklovRadialContext::h(double r) const {
  const double e = eta(r);
  return std::pow(r, 2 - n_) * e * e;
}

double SteklovRadialContext::f(double r) const { return std::pow(r, 2 - n_) * eta(r) * mu(r); }

double SteklovRadialContext::h_prime(double r) const { return 2.0 * f(r); }

double SteklovRadialContext::f_prime(double r) const {
  const double e = eta(r);
  const double m = mu(r);
  return std::pow(r, 2 - n_) * (m * m + e * e + (1.0 - n_) * e * m / r);
}

double SteklovRadialContext::h_second(double r) const { return 2.0 * f_prime(r); }

double SteklovRadialContext::f_second(double r) const {
  const double e = eta(r);
  const double m = mu(r);
  const double de = eta_prime(r);
  const double dm = mu_prime(r);
  const double p = m * m + e * e + (1.0 - n_) * e * m / r;
  const double dp = 2.0 * m * dm + 2.0 * e * de + (1.0 - n_) * ((de * m + e * dm) / r - e * m / (r * r));
  return (2.0 - n_) * std::pow(r, 1 - n_) * p + std::pow(r, 2 - n_) * dp;
}

double SteklovRadialContext::eta_over_mu_prime(double r) const {
  const double m = mu(r);
  return (eta_prime(r) * m - eta(r) * mu_prime(r)) / (m * m);
}

double SteklovRadialContext::a0() const { return std::pow(r2_, n_ - 1) * f(r2_) * h(r2_); }

double SteklovRadialContext::a1() const {
  return std::pow(r2_, n_ - 1) * (f(r2_) * h_prime(r2_) - f_prime(r2_) * h(r2_));
}

double SteklovRadialContext::a2() const {
  return std::pow(r2_, n_ - 1) * (f(r2_) * h_second(r2_) - f_second(r2_) * h(r2_));
}

double SteklovRadialContext::a1_from_ratio() const {
  const double fv = f(r2_);
  return std::pow(r2_, n_ - 1) * fv * fv * eta_over_mu_prime(r2_);
}

double radial_solution(int n, double r1, double r) {
  if (!(r1 > 0.0 && r >= r1)) {
    throw PreconditionError("radial_solution: need 0 < r1 <= r");
  }
  const SteklovRadialContext ctx(n, r1, r + 1.0);
  return std::pow(r, 1.0 - 0.5 * n) * ctx.eta(r);
}

double sigma1_shell(int n, double r1, double r2) { return SteklovRadialContext(n, r1, r2).sigma1(); }

SignCertificates sign_certificates(int n, double r1, double r2) {
  const SteklovRadialContext ctx(n, r1, r2);
  SignCertificates out;
  out.a1 = ctx.a1();
  out.a1_negative = out.a1 < 0.0;
  out.combination = (n - 1) * r2 * out.a1 + r2 * r2 * ctx.a2() + 2.0 * n * ctx.a0();
  out.combination_positive = out.combination > 0.0;
  constexpr int kSamples = 200;
  const double start = r1 + 1e-6;
  out.max_ratio_derivative = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double r = start + (r2 - start) * (i + 1) / kSamples;
    out.max_ratio_derivative = std::max(out.max_ratio_derivative, ctx.eta_over_mu_prime(r));
  }
  out.eta_over_mu_decreasing = out.max_ratio_derivative < 0.0;
  return out;
}

double TaylorResiduals::max() const { return std::max({h_outer, h_inner, f_outer}); }

TaylorResiduals taylor_residuals(int n, double r1, double r2, double eps) {
  if (!(eps > 0.0 && eps < 0.5 * r1)) {
    throw PreconditionError("taylor_residuals: need 0 < eps < r1/2");
  }
  const SteklovRadialContext ctx(n, r1, r2);
  auto worst = [&](auto value, double d0, double d1, double d2, double at) {
    double m = 0.0;
    for (int j = -8; j <= 8; ++j) {
      if (j == 0) {
        continue;
      }
      const double t = eps * j / 8.0;
      const double remainder = value(at + t) - d0 - d1 * t - 0.5 * d2 * t * t;
      m = std::max(m, std::abs(remainder) / (eps * t * t));
    }
    return m;
  };
  auto h = [&](double r) { return ctx.h(r); };
  auto f = [&](double r) { return ctx.f(r); };
  TaylorResiduals out;
  out.h_outer = worst(h, ctx.h(r2), ctx.h_prime(r2), ctx.h_second(r2), r2);
  out.h_inner = worst(h, ctx.h(r1), ctx.h_prime(r1), ctx.h_second(r1), r1);
  out.f_outer = worst(f, ctx.f(r2), ctx.f_prime(r2), ctx.f_second(r2), r2);
  return out;
}

}  // namespace shellstab
