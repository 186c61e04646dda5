#pragma once

#include <vector>

namespace shellstab {

// Problem parameters: dimension, Robin parameter and the reference shell
// radii.
struct ShellGeometry {
  int n = 2;
  double beta = -1.0;
  double r1 = 1.0;
  double r2 = 2.0;

  void validate() const;
  double unit_ball_volume() const;        // omega_n
  double shell_volume() const;            // |A|
  double outer_sphere_area() const;       // P(B_{r2})
};

// Principal Robin-Neumann eigenpair of the shell. The radial profile is
// normalized to unit L2 norm over the shell.
class RadialEigenpair {
 public:
  RadialEigenpair(const ShellGeometry& geom, double kappa);

  const ShellGeometry& geometry() const { return geom_; }
  double lambda1() const { return -kappa_ * kappa_; }
  double kappa() const { return kappa_; }

  double psi(double r) const;
  double psi_prime(double r) const;
  double z_m() const { return z_min_; }
  double z_M() const { return z_max_; }

  // Rayleigh quotient of the radial profile, evaluated by quadrature.
  double rayleigh_quotient() const;

 private:
  // Unnormalized, scaled-by-e^{kappa(R2-R1)} combination and its derivative factor.
  double combo(double r, bool derivative) const;

  ShellGeometry geom_;
  double kappa_;
  double nu_;
  double k_inner_;
  double i_inner_;
  double scale_ = 1.0;
  double z_min_ = 0.0;
  double z_max_ = 0.0;
};

struct KappaBracket {
  double lo = 1e-6;
  double hi = 0.0;  // 0 selects the default upper end
  int samples = 400;
};

// Robin residual kappa * mu/eta + beta at the outer radius; its first zero
// in kappa is the square root of -lambda1.
double shell_robin_residual(const ShellGeometry& geom, double kappa);

double shell_eigenvalue(const ShellGeometry& geom, const KappaBracket& bracket = {});
RadialEigenpair shell_eigenfunction(const ShellGeometry& geom, const KappaBracket& bracket = {});

struct BetaPoint {
  double beta;
  double lambda1;
};

std::vector<BetaPoint> shell_eigenvalue_beta_curve(const ShellGeometry& geom, const std::vector<double>& betas);

}  // namespace shellstab
