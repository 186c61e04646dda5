#include "shellstab/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "shellstab/errors.hpp"

namespace shellstab::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_positive(double x, const char* fn) {
  if (!(x > 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be positive, got " + std::to_string(x));
  }
}

void require_nonnegative(double x, const char* fn) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be non-negative, got " + std::to_string(x));
  }
}

// Ascending series sum_k (-1)^k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)) for J, or
// the same without alternation for I.
double ascending_series(double nu, double x, bool alternating) {
  const double q = 0.25 * x * x;
  double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (k * (k + nu));
    if (alternating) {
      term = -term;
    }
    sum += term;
    if (std::abs(term) < 0.25 * kEps * std::abs(sum)) {
      break;
    }
  }
  return sum;
}

// Hankel asymptotic P and Q series.
void hankel_pq(double nu, double x, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  p = 1.0;
  q = 0.0;
  double t = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = t * (mu - odd * odd) / (8.0 * k * x);
    if (next == 0.0) {
      break;
    }
    if (std::abs(next) > prev) {
      break;
    }
    t = next;
    prev = std::abs(t);
    if (k % 2 == 1) {
      q += ((k - 1) / 2) % 2 == 0 ? t : -t;
    } else {
      p += (k / 2) % 2 == 0 ? t : -t;
    }
    if (std::abs(t) < 0.25 * kEps) {
      break;
    }
  }
}

// Normalized J_0..J_N of integer order by backward (Miller) recurrence.
std::vector<double> miller_sequence(double x, int nmax) {
  const double reach = std::max(x, static_cast<double>(nmax));
  int start = static_cast<int>(reach + 15.0 * std::cbrt(x + 1.0) + 40.0);
  start += start % 2;
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-30;
  for (int k = start; k >= 1; --k) {
    j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e200) {
      for (int m = k - 1; m <= start + 1; ++m) {
        j[m] *= 1e-200;
      }
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) {
    norm += 2.0 * j[k];
  }
  for (double& v : j) {
    v /= norm;
  }
  return j;
}

// Y_0 and Y_1 from the Neumann series over a Miller sequence.
void y01_neumann(double x, double& y0, double& y1) {
  const std::vector<double> j = miller_sequence(x, 2);
  const int top = static_cast<int>(j.size()) - 2;
  const double lg = std::log(0.5 * x) + kEulerGamma;
  double s0 = 0.0;
  double s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top + 1; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / k;
    s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  y0 = (2.0 / kPi) * lg * j[0] - (4.0 / kPi) * s0;
  y1 = -(2.0 / kPi) * j[0] / x + (2.0 / kPi) * lg * j[1] + (2.0 / kPi) * s1;
}

// K_0 and K_1, scaled by e^x.
void k01_scaled(double x, double& k0, double& k1) {
  if (x <= 2.0) {
    const double q = 0.25 * x * x;
    const double lg = std::log(0.5 * x);
    double i0 = 1.0;
    double i1 = 0.5 * x;
    double t0 = 1.0;
    double t1 = 0.5 * x;
    double harmonic = 0.0;
    double s0 = 0.0;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    double s1 = (1.0 - 2.0 * kEulerGamma) * 0.5 * x;
    for (int k = 1; k < 200; ++k) {
      t0 *= q / (static_cast<double>(k) * k);
      t1 *= q / (static_cast<double>(k) * (k + 1));
      harmonic += 1.0 / k;
      i0 += t0;
      i1 += t1;
      s0 += harmonic * t0;
      s1 += (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * kEulerGamma) * t1;
      if (t0 < 0.25 * kEps * i0 && t1 < 0.25 * kEps * i1) {
        break;
      }
    }
    const double scale = std::exp(x);
    k0 = scale * (-(lg + kEulerGamma) * i0 + s0);
    k1 = scale * (1.0 / x + lg * i1 - 0.5 * s1);
    return;
  }
  // Steed's continued fraction CF2 with Temme's normalization, order 0.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 0.25 * kEps) {
      break;
    }
  }
  if (i >= 100000) {
    throw ConvergenceError("bessel_k: continued fraction did not converge at x = " + std::to_string(x));
  }
  h *= a1;
  k0 = std::sqrt(kPi / (2.0 * x)) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

double k_scaled_impl(const BesselOrder& order, double x) {
  double lower;
  double upper;
  double nu;
  if (order.is_integer()) {
    k01_scaled(x, lower, upper);
    nu = 1.0;
  } else {
    lower = std::sqrt(kPi / (2.0 * x));
    upper = lower * (1.0 + 1.0 / x);
    nu = 1.5;
  }
  if (order.value() < nu - 0.75) {
    return lower;
  }
  while (nu < order.value() - 0.25) {
    const double next = lower + (2.0 * nu / x) * upper;
    lower = upper;
    upper = next;
    nu += 1.0;
  }
  return upper;
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu), twice_(static_cast<int>(std::lround(2.0 * nu))) {
  if (!(nu >= 0.0)) {
    throw DomainError("BesselOrder: negative order " + std::to_string(nu) + " is not supported");
  }
  if (nu > kMaxOrder || std::abs(2.0 * nu - twice_) > 1e-12) {
    throw DomainError("BesselOrder: order " + std::to_string(nu) +
                      " is not a supported integer or half-integer");
  }
  nu_ = 0.5 * twice_;
}

namespace detail {

double i_scaled_series(double nu, double x) {
  if (x == 0.0) {
    return nu == 0.0 ? 1.0 : 0.0;
  }
  return ascending_series(nu, x, false) * std::exp(-x);
}

double i_scaled_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double t = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -t * (mu - odd * odd) / (8.0 * k * x);
    if (next == 0.0 || std::abs(next) > prev) {
      break;
    }
    t = next;
    prev = std::abs(t);
    sum += t;
    if (std::abs(t) < 0.25 * kEps * std::abs(sum)) {
      break;
    }
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

double jy_hankel_j(double nu, double x) {
  double p;
  double q;
  hankel_pq(nu, x, p, q);
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double jy_hankel_y(double nu, double x) {
  double p;
  double q;
  hankel_pq(nu, x, p, q);
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

double j_miller(int n, double x) { return miller_sequence(x, n)[n]; }

}  // namespace detail

double bessel_i_scaled(BesselOrder nu, double x) {
  require_nonnegative(x, "bessel_i");
  if (x == 0.0) {
    return nu.value() == 0.0 ? 1.0 : 0.0;
  }
  if (nu.twice() == 1) {
    return std::sqrt(2.0 / (kPi * x)) * 0.5 * (-std::expm1(-2.0 * x));
  }
  if (x <= detail::kISwitch) {
    return detail::i_scaled_series(nu.value(), x);
  }
  return detail::i_scaled_asymptotic(nu.value(), x);
}

double bessel_i(BesselOrder nu, double x) {
  require_nonnegative(x, "bessel_i");
  if (x == 0.0) {
    return nu.value() == 0.0 ? 1.0 : 0.0;
  }
  if (nu.twice() == 1) {
    return std::sqrt(2.0 / (kPi * x)) * std::sinh(x);
  }
  if (x <= detail::kISwitch) {
    return ascending_series(nu.value(), x, false);
  }
  return detail::i_scaled_asymptotic(nu.value(), x) * std::exp(x);
}

double bessel_k_scaled(BesselOrder nu, double x) {
  require_positive(x, "bessel_k");
  return k_scaled_impl(nu, x);
}

double bessel_k(BesselOrder nu, double x) {
  require_positive(x, "bessel_k");
  return k_scaled_impl(nu, x) * std::exp(-x);
}

double bessel_j(BesselOrder nu, double x) {
  require_nonnegative(x, "bessel_j");
  if (x == 0.0) {
    return nu.value() == 0.0 ? 1.0 : 0.0;
  }
  if (nu.twice() == 1) {
    return std::sqrt(2.0 / (kPi * x)) * std::sin(x);
  }
  if (nu.is_integer()) {
    if (x <= detail::kJYSwitch) {
      return detail::j_miller(nu.twice() / 2, x);
    }
    return detail::jy_hankel_j(nu.value(), x);
  }
  if (x <= std::max(4.0, nu.value() + 2.0)) {
    return ascending_series(nu.value(), x, true);
  }
  const double s = std::sqrt(2.0 / (kPi * x));
  double lower = s * std::cos(x);
  double upper = s * std::sin(x);
  for (double order = 0.5; order < nu.value() - 0.25; order += 1.0) {
    const double next = (2.0 * order / x) * upper - lower;
    lower = upper;
    upper = next;
  }
  return upper;
}

double bessel_y(BesselOrder nu, double x) {
  require_positive(x, "bessel_y");
  double lower;
  double upper;
  double order;
  if (nu.is_integer()) {
    if (x > detail::kJYSwitch && nu.value() <= 4.0) {
      return detail::jy_hankel_y(nu.value(), x);
    }
    if (x > detail::kJYSwitch) {
      lower = detail::jy_hankel_y(0.0, x);
      upper = detail::jy_hankel_y(1.0, x);
    } else {
      y01_neumann(x, lower, upper);
    }
    if (nu.value() == 0.0) {
      return lower;
    }
    order = 1.0;
  } else {
    const double s = std::sqrt(2.0 / (kPi * x));
    lower = s * std::sin(x);
    upper = -s * std::cos(x);
    order = 0.5;
  }
  while (order < nu.value() - 0.25) {
    const double next = (2.0 * order / x) * upper - lower;
    lower = upper;
    upper = next;
    order += 1.0;
  }
  return upper;
}

}  // namespace shellstab::specfun
