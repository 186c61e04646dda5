#include "shellstab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shellstab/errors.hpp"
#include "shellstab/numerics.hpp"

namespace shellstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Orthonormal associated Legendre values p[l][m] and theta-derivatives for
// 0 <= m <= l <= lmax at x = cos(theta), s = sin(theta) > 0.
void legendre_table(int lmax, double x, double s, std::vector<double>& p, std::vector<double>& dp) {
  const int width = lmax + 1;
  p.assign(width * width, 0.0);
  dp.assign(width * width, 0.0);
  auto at = [width](int l, int m) { return l * width + m; };
  p[at(0, 0)] = 1.0 / std::sqrt(2.0 * kTwoPi);
  for (int m = 1; m <= lmax; ++m) {
    p[at(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[at(m - 1, m - 1)];
  }
  for (int m = 0; m < lmax; ++m) {
    p[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[at(m, m)];
  }
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[at(l, m)] = a * (x * p[at(l - 1, m)] - b * p[at(l - 2, m)]);
    }
  }
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double lower =
          l > m ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m)) *
                      p[at(l - 1, m)]
                : 0.0;
      dp[at(l, m)] = (l * x * p[at(l, m)] - lower) / s;
    }
  }
}

void require_dimension(int n, int expected, const char* what) {
  if (n != expected) {
    throw PreconditionError(std::string(what) + " requires dimension " + std::to_string(expected));
  }
}

}  // namespace

int default_grid_size(int n, int degree) { return n == 2 ? 8 * (degree + 1) + 64 : 2 * (degree + 1) + 16; }

SphereQuadrature sphere_quadrature(int n, int size) {
  SphereQuadrature q;
  q.n = n;
  if (n == 2) {
    q.theta.resize(size);
    q.weight.assign(size, kTwoPi / size);
    for (int j = 0; j < size; ++j) {
      q.theta[j] = kTwoPi * j / size;
    }
    return q;
  }
  if (n != 3) {
    throw PreconditionError("sphere_quadrature: dimension must be 2 or 3");
  }
  const auto rule = numerics::gauss_legendre(size);
  const int azimuths = 2 * size;
  for (int i = 0; i < size; ++i) {
    const double theta = std::acos(rule.nodes[i]);
    for (int j = 0; j < azimuths; ++j) {
      q.theta.push_back(theta);
      q.phi.push_back(kTwoPi * j / azimuths);
      q.weight.push_back(rule.weights[i] * kTwoPi / azimuths);
    }
  }
  return q;
}

BoundaryProfile::BoundaryProfile(int n, int degree, std::vector<double> coeffs, int grid_size)
    : n_(n), degree_(degree), coeffs_(std::move(coeffs)), grid_size_(grid_size) {
  if (grid_size_ <= 0) {
    grid_size_ = default_grid_size(n_, degree_);
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw PreconditionError("BoundaryProfile: non-finite coefficient");
    }
  }
}

BoundaryProfile BoundaryProfile::fourier(std::vector<double> packed, int grid_size) {
  if (packed.empty() || packed.size() % 2 == 0) {
    throw PreconditionError("BoundaryProfile::fourier: expected 2*kmax+1 packed coefficients");
  }
  const int kmax = static_cast<int>(packed.size() / 2);
  return BoundaryProfile(2, kmax, std::move(packed), grid_size);
}

BoundaryProfile BoundaryProfile::fourier_mode(int k, double cos_amplitude, double sin_amplitude) {
  if (k < 0) {
    throw PreconditionError("fourier_mode: negative mode");
  }
  std::vector<double> packed(2 * k + 1, 0.0);
  if (k == 0) {
    packed[0] = cos_amplitude;
  } else {
    packed[2 * k - 1] = cos_amplitude;
    packed[2 * k] = sin_amplitude;
  }
  return fourier(std::move(packed));
}

BoundaryProfile BoundaryProfile::spherical_harmonics(std::vector<double> packed, int grid_size) {
  const int lmax = static_cast<int>(std::lround(std::sqrt(static_cast<double>(packed.size())))) - 1;
  if (lmax < 0 || static_cast<std::size_t>((lmax + 1) * (lmax + 1)) != packed.size()) {
    throw PreconditionError("BoundaryProfile::spherical_harmonics: expected (lmax+1)^2 coefficients");
  }
  return BoundaryProfile(3, lmax, std::move(packed), grid_size);
}

BoundaryProfile BoundaryProfile::spherical_mode(int l, int m, double amplitude) {
  if (l < 0 || std::abs(m) > l) {
    throw PreconditionError("spherical_mode: need |m| <= l");
  }
  std::vector<double> packed((l + 1) * (l + 1), 0.0);
  packed[l * l + l + m] = amplitude;
  return spherical_harmonics(std::move(packed));
}

BoundaryProfile BoundaryProfile::zero(int n) { return constant(n, 0.0); }

BoundaryProfile BoundaryProfile::constant(int n, double c) {
  if (n == 2) {
    return fourier({c});
  }
  require_dimension(n, 3, "BoundaryProfile::constant");
  return spherical_harmonics({c * std::sqrt(2.0 * kTwoPi)});
}

BoundaryProfile BoundaryProfile::fit_fourier(const std::function<double(double)>& u, int kmax) {
  const int samples = 8 * kmax + 64;
  std::vector<double> packed(2 * kmax + 1, 0.0);
  for (int j = 0; j < samples; ++j) {
    const double t = kTwoPi * j / samples;
    const double v = u(t);
    packed[0] += v / samples;
    for (int k = 1; k <= kmax; ++k) {
      packed[2 * k - 1] += 2.0 * v * std::cos(k * t) / samples;
      packed[2 * k] += 2.0 * v * std::sin(k * t) / samples;
    }
  }
  return fourier(std::move(packed));
}

BoundaryProfile::PlanarJet BoundaryProfile::planar_jet(double theta) const {
  require_dimension(n_, 2, "planar_jet");
  PlanarJet jet{coeffs_[0], 0.0, 0.0};
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double c = 1.0;
  double s = 0.0;
  for (int k = 1; k <= degree_; ++k) {
    const double cn = c * c1 - s * s1;
    const double sn = s * c1 + c * s1;
    c = cn;
    s = sn;
    const double a = coeffs_[2 * k - 1];
    const double b = coeffs_[2 * k];
    jet.value += a * c + b * s;
    jet.d1 += k * (b * c - a * s);
    jet.d2 -= static_cast<double>(k) * k * (a * c + b * s);
  }
  return jet;
}

BoundaryProfile::SphericalJet BoundaryProfile::spherical_jet(double theta, double phi) const {
  require_dimension(n_, 3, "spherical_jet");
  const double x = std::cos(theta);
  const double s = std::max(std::sin(theta), 1e-300);
  std::vector<double> p;
  std::vector<double> dp;
  legendre_table(degree_, x, s, p, dp);
  const int width = degree_ + 1;
  SphericalJet jet{0.0, 0.0, 0.0};
  for (int l = 0; l <= degree_; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double c = coeffs_[l * l + l + m];
      if (c == 0.0) {
        continue;
      }
      const int am = std::abs(m);
      const double pv = p[l * width + am];
      const double dv = dp[l * width + am];
      if (m == 0) {
        jet.value += c * pv;
        jet.d_theta += c * dv;
        continue;
      }
      const double norm = std::sqrt(2.0);
      const double trig = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
      const double dtrig = m > 0 ? -am * std::sin(am * phi) : am * std::cos(am * phi);
      jet.value += c * norm * pv * trig;
      jet.d_theta += c * norm * dv * trig;
      jet.d_phi_over_sin += c * norm * (pv / s) * dtrig;
    }
  }
  return jet;
}

BoundaryProfile::Samples BoundaryProfile::sample() const {
  const SphereQuadrature q = quadrature();
  Samples out;
  out.weight = q.weight;
  out.value.resize(q.weight.size());
  out.grad_sq.resize(q.weight.size());
  for (std::size_t i = 0; i < q.weight.size(); ++i) {
    if (n_ == 2) {
      const auto jet = planar_jet(q.theta[i]);
      out.value[i] = jet.value;
      out.grad_sq[i] = jet.d1 * jet.d1;
    } else {
      const auto jet = spherical_jet(q.theta[i], q.phi[i]);
      out.value[i] = jet.value;
      out.grad_sq[i] = jet.d_theta * jet.d_theta + jet.d_phi_over_sin * jet.d_phi_over_sin;
    }
  }
  return out;
}

double BoundaryProfile::mean() const {
  return n_ == 2 ? coeffs_[0] : coeffs_[0] / std::sqrt(2.0 * kTwoPi);
}

double BoundaryProfile::l2_norm_sq() const {
  double total = 0.0;
  if (n_ == 2) {
    total = kTwoPi * coeffs_[0] * coeffs_[0];
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
      total += std::numbers::pi * coeffs_[i] * coeffs_[i];
    }
    return total;
  }
  for (double c : coeffs_) {
    total += c * c;
  }
  return total;
}

double BoundaryProfile::gradient_l2_norm_sq() const {
  double total = 0.0;
  if (n_ == 2) {
    for (int k = 1; k <= degree_; ++k) {
      total += std::numbers::pi * k * k * (coeffs_[2 * k - 1] * coeffs_[2 * k - 1] + coeffs_[2 * k] * coeffs_[2 * k]);
    }
    return total;
  }
  for (int l = 0; l <= degree_; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double c = coeffs_[l * l + l + m];
      total += l * (l + 1.0) * c * c;
    }
  }
  return total;
}

void BoundaryProfile::dense_extrema(double& value_max, double& grad_max) const {
  value_max = 0.0;
  grad_max = 0.0;
  if (n_ == 2) {
    const int samples = std::max(4096, 64 * (degree_ + 1));
    for (int j = 0; j < samples; ++j) {
      const auto jet = planar_jet(kTwoPi * j / samples);
      value_max = std::max(value_max, std::abs(jet.value));
      grad_max = std::max(grad_max, std::abs(jet.d1));
    }
    return;
  }
  const int rings = 4 * (degree_ + 1) + 32;
  const int azimuths = 2 * rings;
  for (int i = 0; i < rings; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / rings;
    for (int j = 0; j < azimuths; ++j) {
      const auto jet = spherical_jet(theta, kTwoPi * j / azimuths);
      value_max = std::max(value_max, std::abs(jet.value));
      grad_max = std::max(grad_max, std::hypot(jet.d_theta, jet.d_phi_over_sin));
    }
  }
}

double BoundaryProfile::sup_norm() const {
  double v;
  double g;
  dense_extrema(v, g);
  return v;
}

double BoundaryProfile::gradient_sup_norm() const {
  double v;
  double g;
  dense_extrema(v, g);
  return g;
}

double BoundaryProfile::w1inf_norm() const {
  double v;
  double g;
  dense_extrema(v, g);
  return std::max(v, g);
}

bool BoundaryProfile::is_constant() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; });
}

BoundaryProfile BoundaryProfile::shifted(double c) const {
  std::vector<double> packed = coeffs_;
  packed[0] += n_ == 2 ? c : c * std::sqrt(2.0 * kTwoPi);
  return BoundaryProfile(n_, degree_, std::move(packed), grid_size_);
}

BoundaryProfile BoundaryProfile::scaled(double s) const {
  std::vector<double> packed = coeffs_;
  for (double& c : packed) {
    c *= s;
  }
  return BoundaryProfile(n_, degree_, std::move(packed), grid_size_);
}

BoundaryProfile BoundaryProfile::plus(const BoundaryProfile& other) const {
  if (other.n_ != n_) {
    throw PreconditionError("BoundaryProfile::plus: dimension mismatch");
  }
  const BoundaryProfile& big = coeffs_.size() >= other.coeffs_.size() ? *this : other;
  const BoundaryProfile& small = coeffs_.size() >= other.coeffs_.size() ? other : *this;
  std::vector<double> packed = big.coeffs_;
  for (std::size_t i = 0; i < small.coeffs_.size(); ++i) {
    packed[i] += small.coeffs_[i];
  }
  return BoundaryProfile(n_, big.degree_, std::move(packed), 0);
}

BoundaryProfile BoundaryProfile::with_grid(int grid_size) const {
  return BoundaryProfile(n_, degree_, coeffs_, grid_size);
}

}  // namespace shellstab
