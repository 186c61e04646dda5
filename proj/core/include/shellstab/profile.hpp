#pragma once

#include <functional>
#include <vector>

namespace shellstab {

// Quadrature on the unit circle (n = 2, uniform angles) or the unit sphere
// (n = 3, Gauss-Legendre in cos(theta) times uniform azimuth).
struct SphereQuadrature {
  int n = 2;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> weight;
};

SphereQuadrature sphere_quadrature(int n, int size);

// Band-limited scalar field on S^{n-1}. For n = 2 the packed coefficients are
// (a0, a1, b1, a2, b2, ...) of a0 + sum_k a_k cos(k t) + b_k sin(k t). For
// n = 3 they are coefficients of real orthonormal spherical harmonics, index
// l*l + l + m.
class BoundaryProfile {
 public:
  struct PlanarJet {
    double value;
    double d1;
    double d2;
  };
  struct SphericalJet {
    double value;
    double d_theta;
    double d_phi_over_sin;
  };
  struct Samples {
    std::vector<double> value;
    std::vector<double> grad_sq;
    std::vector<double> weight;
  };

  static BoundaryProfile fourier(std::vector<double> packed, int grid_size = 0);
  static BoundaryProfile fourier_mode(int k, double cos_amplitude, double sin_amplitude = 0.0);
  static BoundaryProfile spherical_harmonics(std::vector<double> packed, int grid_size = 0);
  static BoundaryProfile spherical_mode(int l, int m, double amplitude);
  static BoundaryProfile zero(int n);
  static BoundaryProfile constant(int n, double c);
  // Trapezoid projection of an arbitrary periodic function onto modes <= kmax.
  static BoundaryProfile fit_fourier(const std::function<double(double)>& u, int kmax);

  int dimension() const { return n_; }
  int degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  int grid_size() const { return grid_size_; }

  PlanarJet planar_jet(double theta) const;
  SphericalJet spherical_jet(double theta, double phi) const;
  double value_planar(double theta) const { return planar_jet(theta).value; }

  // Profile value and squared tangential gradient on the quadrature grid.
  Samples sample() const;
  SphereQuadrature quadrature() const { return sphere_quadrature(n_, grid_size_); }

  double mean() const;
  double l2_norm_sq() const;
  double gradient_l2_norm_sq() const;
  double sup_norm() const;
  double gradient_sup_norm() const;
  // max(||u||_inf, ||grad u||_inf)
  double w1inf_norm() const;
  bool is_constant() const;

  BoundaryProfile shifted(double c) const;
  BoundaryProfile scaled(double s) const;
  BoundaryProfile plus(const BoundaryProfile& other) const;
  BoundaryProfile with_grid(int grid_size) const;

 private:
  BoundaryProfile(int n, int degree, std::vector<double> coeffs, int grid_size);
  void dense_extrema(double& value_max, double& grad_max) const;

  int n_;
  int degree_;
  std::vector<double> coeffs_;
  int grid_size_;
};

int default_grid_size(int n, int degree);

}  // namespace shellstab
