#pragma once

#include <functional>
#include <string>

#include "shellstab/domains.hpp"
#include "shellstab/profile.hpp"
#include "shellstab/shell.hpp"

namespace shellstab {

// Web test function on a convex outer body: w = G(d) with d the distance to
// the outer boundary, G(s) = Psi(R2 - s) for s < R2 - R1 and z_m beyond.
class WebFunction {
 public:
  explicit WebFunction(const ShellGeometry& geom);

  const ShellGeometry& geometry() const { return eig_.geometry(); }
  const RadialEigenpair& eigenpair() const { return eig_; }
  double width() const { return geometry().r2 - geometry().r1; }
  double z_m() const { return eig_.z_m(); }
  double z_M() const { return eig_.z_M(); }

  // G(s) and |grad w| at distance s >= 0.
  double value(double s) const;
  double slope(double s) const;
  // |grad w|^2 + w^2 - z_m^2 at distance s; zero on the plateau.
  double excess(double s) const;

  // Distance at which w reaches level t, from the integral of 1/|grad z|
  // over the levels [t, z_M] of the shell eigenfunction.
  double level_distance(double t) const;
  // G(s) by inverting level_distance.
  double value_by_quadrature(double s) const;

 private:
  double radius_at_level(double t) const;

  RadialEigenpair eig_;
};

WebFunction build_web_function(const ShellGeometry& geom);

struct WebValue {
  double value = 0.0;
  double grad_norm = 0.0;
};

// Throws PreconditionError for points outside the outer body.
WebValue evaluate_web(const WebFunction& web, const ConvexBody& outer, const Point& x);
WebValue evaluate_web(const WebFunction& web, const BoundaryProfile& outer, const Point& x);

enum class HoleIntegration { automatic, rays, monte_carlo };

struct HoleIntegrationOptions {
  HoleIntegration method = HoleIntegration::automatic;  // rays for n = 2, Monte Carlo for n = 3
  int directions = 0;       // ray count (n = 2) or polar nodes (n = 3); 0 selects 512 / 12
  int panels = 4;           // Gauss-Legendre panels per ray segment
  int samples = 20000;      // Monte Carlo samples
  unsigned seed = 1;
};

struct HoleIntegral {
  double value = 0.0;
  double standard_error = 0.0;  // zero for the deterministic rule
  double t_level = 0.0;
  HoleIntegration method = HoleIntegration::rays;
  int samples = 0;
  unsigned seed = 0;
};

// Integral over the hole part not covered by the inner parallel set of the
// same volume, Theta \ K = Theta intersected with {d <= t}, of integrand(d).
// The integrand must vanish for d >= R2 - R1.
HoleIntegral hole_band_integral(const HoledDomain& domain, const WebFunction& web,
                                const std::function<double(double)>& integrand,
                                const HoleIntegrationOptions& options = {});

// Weighted Fraenkel-type term: integral of |grad w|^2 + w^2 - z_m^2 over Theta \ K.
HoleIntegral weak_fraenkel_estimate(const HoledDomain& domain, const WebFunction& web,
                                    const HoleIntegrationOptions& options = {});
double weak_fraenkel_asymmetry(const HoledDomain& domain, const WebFunction& web);

// Modulus applied to the Hausdorff asymmetry: s^2 (n = 2), the inverse of
// t -> sqrt(t log(1/t)) on (0, 1/e) at s^2 (n = 3), s^{(n+1)/2} (n >= 4).
// Throws DomainError when s^2 exceeds the range of that map for n = 3.
double g_modulus(double s, int n);

struct AsymmetryReport {
  double hausdorff_asym = 0.0;
  double g_of_asym = 0.0;
  double weak_fraenkel = 0.0;
  double weak_fraenkel_error = 0.0;
  double alpha = 0.0;
  double t_level = 0.0;
  double z_m = 0.0;
  double z_M = 0.0;
  unsigned seed = 0;

  // One key=value pair per line.
  std::string to_record() const;
};

AsymmetryReport hybrid_asymmetry(const HoledDomain& domain, const HoleIntegrationOptions& options = {});

struct InnerStability {
  double gap = 0.0;    // lambda1(A) - lambda1(Omega)
  double bound = 0.0;  // min{1, |lambda1(A)|} * weak Fraenkel term
  double weak_fraenkel = 0.0;
  bool holds = false;
};

InnerStability inner_stability_check(const HoledDomain& domain, double lambda_omega, double tolerance = 1e-8,
                                     const HoleIntegrationOptions& options = {});

struct WebRayleigh {
  double rq = 0.0;                  // Robin Rayleigh quotient of w on Omega
  double gradient = 0.0;            // int_Omega |grad w|^2
  double mass = 0.0;                // int_Omega w^2
  double boundary = 0.0;            // int over the outer boundary of w^2
  double reference_boundary = 0.0;  // int over the sphere of radius R2 of z^2
  double lambda_shell = 0.0;
  // (lambda1(A) - int |grad w|^2) / (1 - int (w^2 - z_m^2)), both over Theta \ K.
  double chain_bound = 0.0;
};

WebRayleigh web_rayleigh_bounds(const HoledDomain& domain, const WebFunction& web,
                                const HoleIntegrationOptions& options = {});

}  // namespace shellstab
