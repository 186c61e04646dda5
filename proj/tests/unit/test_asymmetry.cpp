#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "shellstab/asymmetry.hpp"
#include "shellstab/domains.hpp"
#include "shellstab/errors.hpp"
#include "shellstab/numerics.hpp"

namespace {

using shellstab::BoundaryProfile;
using shellstab::HoledDomain;
using shellstab::HoleIntegration;
using shellstab::HoleIntegrationOptions;
using shellstab::Point;
using shellstab::ShellGeometry;
using shellstab::WebFunction;

constexpr double kPi = std::numbers::pi;

const ShellGeometry kPlane{2, -1.0, 1.0, 2.0};
const ShellGeometry kSpace{3, -1.0, 1.0, 2.0};

// Radial function, minus the base radius, of the planar star body
// {x : |x - shift| < base + u(angle(x - shift))} seen from the origin.
BoundaryProfile moved_profile(const BoundaryProfile& u, double base, double rotation, const Point& shift,
                              bool reflect = false) {
  auto radius = [&](double t) {
    const Point e(std::cos(t), std::sin(t), 0.0);
    auto outside = [&](double r) {
      const Point y = r * e - shift;
      double a = std::atan2(y.y(), y.x());
      a = (reflect ? -a : a) - rotation;
      return y.norm() - (base + u.value_planar(a));
    };
    return shellstab::numerics::bisect(outside, 0.0, 3.0 * base, 1e-15);
  };
  return BoundaryProfile::fit_fourier([&](double t) { return radius(t) - base; }, 96);
}

BoundaryProfile translated_disc(double radius, double delta) {
  return BoundaryProfile::fit_fourier(
      [&](double t) {
        const double c = std::cos(t);
        return delta * c + std::sqrt(radius * radius - delta * delta * (1.0 - c * c)) - radius;
      },
      96);
}

HoledDomain perturbed_pair() {
  return shellstab::project_constraints(
      HoledDomain(kPlane, BoundaryProfile::fourier({0.0, 0.0, 0.0, 0.04, 0.01, 0.0, -0.008}),
                  BoundaryProfile::fourier({0.0, 0.06, 0.0, 0.0, 0.03, 0.01, 0.0})));
}

TEST(WebFunction, EndpointsAndMonotonicity) {
  for (const auto& g : {kPlane, kSpace}) {
    const auto web = shellstab::build_web_function(g);
    EXPECT_DOUBLE_EQ(web.value(0.0), web.z_M());
    EXPECT_NEAR(web.value(web.width() * (1.0 - 1e-12)), web.z_m(), 1e-12);
    EXPECT_DOUBLE_EQ(web.value(web.width()), web.z_m());
    EXPECT_DOUBLE_EQ(web.value(5.0), web.z_m());
    EXPECT_DOUBLE_EQ(web.slope(web.width()), 0.0);
    EXPECT_DOUBLE_EQ(web.excess(web.width() + 0.1), 0.0);
    double prev = web.value(0.0);
    for (int i = 1; i <= 200; ++i) {
      const double v = web.value(web.width() * i / 200.0);
      EXPECT_LT(v, prev);
      prev = v;
    }
    EXPECT_THROW(web.value(-0.1), shellstab::PreconditionError);
  }
}

TEST(WebFunction, ClosedFormMatchesQuadratureInversion) {
  const auto web = shellstab::build_web_function(kPlane);
  for (int i = 0; i < 100; ++i) {
    const double s = web.width() * i / 100.0;
    EXPECT_NEAR(web.value_by_quadrature(s), web.value(s), 1e-8) << s;
  }
  const auto web3 = shellstab::build_web_function(kSpace);
  const double mid = 0.5 * web3.width();
  EXPECT_NEAR(web3.value_by_quadrature(mid), web3.value(mid), 1e-8);
  EXPECT_NEAR(web.level_distance(web.z_m()), web.width(), 1e-8);
  EXPECT_DOUBLE_EQ(web.level_distance(web.z_M()), 0.0);
}

TEST(WebFunction, SlopeIsTheReciprocalLevelSpacing) {
  const auto web = shellstab::build_web_function(kPlane);
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double t = web.z_m() + frac * (web.z_M() - web.z_m());
    const double h = 1e-5 * (web.z_M() - web.z_m());
    const double dsdt = (web.level_distance(t + h) - web.level_distance(t - h)) / (2.0 * h);
    EXPECT_NEAR(web.slope(web.level_distance(t)), -1.0 / dsdt, 1e-7);
  }
}

TEST(EvaluateWeb, BoundaryPlateauAndRadialCase) {
  const auto web = shellstab::build_web_function(kPlane);
  const auto u = BoundaryProfile::fourier_mode(3, 0.04);
  const double t = 0.4;
  const Point edge = (2.0 + u.value_planar(t)) * Point(std::cos(t), std::sin(t), 0.0);
  EXPECT_NEAR(shellstab::evaluate_web(web, u, edge).value, web.z_M(), 1e-12);
  const auto deep = shellstab::evaluate_web(web, u, Point(0.1, -0.2, 0.0));
  EXPECT_DOUBLE_EQ(deep.value, web.z_m());
  EXPECT_DOUBLE_EQ(deep.grad_norm, 0.0);
  EXPECT_THROW(shellstab::evaluate_web(web, u, Point(2.5, 0.0, 0.0)), shellstab::PreconditionError);

  const auto& eig = web.eigenpair();
  for (double r : {1.0, 1.2, 1.5, 1.9, 2.0}) {
    const Point x = r * Point(std::cos(1.1), std::sin(1.1), 0.0);
    const auto w = shellstab::evaluate_web(web, BoundaryProfile::zero(2), x);
    EXPECT_NEAR(w.value, eig.psi(r), 1e-8);
    EXPECT_NEAR(w.grad_norm, eig.psi_prime(r), 1e-8);
  }
  const auto web3 = shellstab::build_web_function(kSpace);
  const Point x3 = 1.4 * Point(0.6, 0.0, 0.8);
  EXPECT_NEAR(shellstab::evaluate_web(web3, BoundaryProfile::zero(3), x3).value, web3.eigenpair().psi(1.4), 1e-8);
}

TEST(WeakFraenkel, VanishesOnTheShell) {
  for (const auto& g : {kPlane, kSpace}) {
    const auto web = shellstab::build_web_function(g);
    EXPECT_DOUBLE_EQ(shellstab::weak_fraenkel_asymmetry(HoledDomain::shell(g), web), 0.0);
  }
}

TEST(WeakFraenkel, TranslatedHoleInBallIsPositiveAndMatchesMonteCarlo) {
  const auto web = shellstab::build_web_function(kPlane);
  const HoledDomain domain(kPlane, BoundaryProfile::zero(2), translated_disc(1.0, 0.1));
  const auto rays = shellstab::weak_fraenkel_estimate(domain, web);
  EXPECT_GT(rays.value, 0.0);
  EXPECT_DOUBLE_EQ(rays.standard_error, 0.0);
  HoleIntegrationOptions mc;
  mc.method = HoleIntegration::monte_carlo;
  mc.samples = 1000000;
  mc.seed = 17;
  const auto oracle = shellstab::weak_fraenkel_estimate(domain, web, mc);
  EXPECT_GT(oracle.standard_error, 0.0);
  EXPECT_NEAR(rays.value, oracle.value, 3.0 * oracle.standard_error);
}

TEST(WeakFraenkel, PerturbedPairMatchesMonteCarlo) {
  const auto domain = perturbed_pair();
  const auto web = shellstab::build_web_function(kPlane);
  const auto rays = shellstab::weak_fraenkel_estimate(domain, web);
  HoleIntegrationOptions fine;
  fine.method = HoleIntegration::rays;
  fine.directions = 1024;
  fine.panels = 8;
  EXPECT_NEAR(shellstab::weak_fraenkel_estimate(domain, web, fine).value, rays.value, 1e-9);
  HoleIntegrationOptions mc;
  mc.method = HoleIntegration::monte_carlo;
  mc.samples = 1000000;
  mc.seed = 3;
  const auto oracle = shellstab::weak_fraenkel_estimate(domain, web, mc);
  EXPECT_GT(rays.value, 0.0);
  EXPECT_NEAR(rays.value, oracle.value, 3.0 * oracle.standard_error);
}

TEST(WeakFraenkel, MonteCarloIsReproducible) {
  const auto domain = perturbed_pair();
  const auto web = shellstab::build_web_function(kPlane);
  HoleIntegrationOptions mc;
  mc.method = HoleIntegration::monte_carlo;
  mc.samples = 4000;
  mc.seed = 99;
  const auto a = shellstab::weak_fraenkel_estimate(domain, web, mc);
  const auto b = shellstab::weak_fraenkel_estimate(domain, web, mc);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.samples, 4000);
  EXPECT_EQ(a.seed, 99u);
}

TEST(WeakFraenkel, HoleInsideThePlateauGivesZero) {
  // Every point of the hole is farther than R2 - R1 from the outer boundary.
  const auto web = shellstab::build_web_function(kPlane);
  const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(2, 0.05), kPlane);
  const HoledDomain planar(kPlane, u, BoundaryProfile::constant(2, -0.1));
  EXPECT_DOUBLE_EQ(shellstab::weak_fraenkel_asymmetry(planar, web), 0.0);

  const auto web3 = shellstab::build_web_function(kSpace);
  const auto u3 = shellstab::project_perimeter(BoundaryProfile::spherical_mode(2, 0, 0.05), kSpace);
  const HoledDomain spatial(kSpace, u3, BoundaryProfile::constant(3, -0.1));
  const auto est = shellstab::weak_fraenkel_estimate(spatial, web3);
  EXPECT_DOUBLE_EQ(est.value, 0.0);
  EXPECT_GT(est.t_level, web3.width());
}

TEST(WeakFraenkel, InvariantUnderRigidMotions) {
  const auto domain = perturbed_pair();
  const auto web = shellstab::build_web_function(kPlane);
  const double reference = shellstab::weak_fraenkel_asymmetry(domain, web);
  struct Motion {
    double rotation;
    Point shift;
    bool reflect;
  };
  for (const Motion& m : {Motion{0.7, Point::Zero(), false}, Motion{0.0, Point::Zero(), true},
                          Motion{1.9, Point(0.05, -0.03, 0.0), false}}) {
    const HoledDomain moved(kPlane, moved_profile(domain.outer, 2.0, m.rotation, m.shift, m.reflect),
                            moved_profile(domain.inner, 1.0, m.rotation, m.shift, m.reflect));
    EXPECT_NEAR(shellstab::weak_fraenkel_asymmetry(moved, web), reference, 1e-7 * reference);
  }
}

TEST(WeakFraenkel, DominatesTheWeightedL1Distance) {
  const auto domain = perturbed_pair();
  const auto web = shellstab::build_web_function(kPlane);
  const double fraenkel = shellstab::weak_fraenkel_asymmetry(domain, web);
  const double l1 = shellstab::hole_band_integral(domain, web, [&](double d) { return web.value(d) - web.z_m(); }).value;
  EXPECT_GT(l1, 0.0);
  EXPECT_GE(fraenkel, 2.0 * web.z_m() * l1);
}

TEST(WeakFraenkel, SpatialRaysAgreeWithMonteCarlo) {
  const auto domain = shellstab::project_constraints(
      HoledDomain(kSpace, BoundaryProfile::spherical_mode(3, 0, 0.04), BoundaryProfile::spherical_mode(2, 1, 0.05)));
  const auto web = shellstab::build_web_function(kSpace);
  const auto mc = shellstab::weak_fraenkel_estimate(domain, web);
  EXPECT_EQ(mc.method, HoleIntegration::monte_carlo);
  HoleIntegrationOptions rays;
  rays.method = HoleIntegration::rays;
  const auto det = shellstab::weak_fraenkel_estimate(domain, web, rays);
  EXPECT_GT(mc.value, 0.0);
  EXPECT_NEAR(det.value, mc.value, 3.0 * mc.standard_error);
}

TEST(GModulus, Values) {
  for (int n : {2, 3, 4, 5}) {
    EXPECT_DOUBLE_EQ(shellstab::g_modulus(0.0, n), 0.0);
  }
  EXPECT_NEAR(shellstab::g_modulus(0.3, 2), 0.09, 1e-15);
  EXPECT_NEAR(shellstab::g_modulus(0.3, 4), std::pow(0.3, 2.5), 1e-15);
  const double g = shellstab::g_modulus(0.2, 3);
  EXPECT_GT(g, 0.0);
  EXPECT_LT(g, std::exp(-1.0));
  EXPECT_NEAR(std::sqrt(g * std::log(1.0 / g)), 0.04, 1e-10);
  double prev = 0.0;
  for (double s = 0.05; s < 0.75; s += 0.05) {
    const double v = shellstab::g_modulus(s, 3);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(shellstab::g_modulus(0.8, 3), shellstab::DomainError);
  EXPECT_THROW(shellstab::g_modulus(-0.1, 2), shellstab::PreconditionError);
}

TEST(HybridAsymmetry, ShellIsZero) {
  const auto r = shellstab::hybrid_asymmetry(HoledDomain::shell(kPlane));
  EXPECT_LT(r.alpha, 1e-12);
  EXPECT_DOUBLE_EQ(r.weak_fraenkel, 0.0);
  EXPECT_NEAR(r.t_level, 1.0, 1e-12);
  const std::string rec = r.to_record();
  for (const char* key : {"hausdorff_asym=", "g_of_asym=", "weak_fraenkel=", "alpha=", "t_level=", "z_m=", "z_M="}) {
    EXPECT_NE(rec.find(key), std::string::npos) << key;
  }
}

TEST(HybridAsymmetry, RoundOuterSelectsTheHoleTerm) {
  const auto domain = shellstab::project_constraints(
      HoledDomain(kPlane, BoundaryProfile::zero(2), BoundaryProfile::fourier_mode(2, 0.05)));
  const auto r = shellstab::hybrid_asymmetry(domain);
  EXPECT_LT(r.hausdorff_asym, 1e-12);
  EXPECT_GT(r.weak_fraenkel, 0.0);
  EXPECT_DOUBLE_EQ(r.alpha, r.weak_fraenkel);
}

TEST(HybridAsymmetry, ParallelHoleSelectsTheOuterTerm) {
  const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(2, 0.05), kPlane);
  const double t = kPlane.r2 - kPlane.r1;
  const auto k = shellstab::inner_parallel(u, kPlane, t);
  const auto& verts = k.vertices();
  auto radius = [&](double a) {
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    double best = 1e300;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Eigen::Vector2d d = verts[(i + 1) % verts.size()] - verts[i];
      const Eigen::Vector2d nrm(d.y(), -d.x());
      const double proj = nrm.dot(e);
      if (proj > 0.0) {
        best = std::min(best, nrm.dot(verts[i]) / proj);
      }
    }
    return best - kPlane.r1;
  };
  const HoledDomain domain(kPlane, u, BoundaryProfile::fit_fourier(radius, 64));
  const auto r = shellstab::hybrid_asymmetry(domain);
  EXPECT_GT(r.g_of_asym, 0.0);
  EXPECT_LT(r.weak_fraenkel, 1e-3 * r.g_of_asym);
  EXPECT_DOUBLE_EQ(r.alpha, r.g_of_asym);
}

TEST(InnerStability, ShellAndThresholdLogic) {
  const auto web = shellstab::build_web_function(kPlane);
  const double lambda = web.eigenpair().lambda1();
  const auto shell = shellstab::inner_stability_check(HoledDomain::shell(kPlane), lambda);
  EXPECT_DOUBLE_EQ(shell.gap, 0.0);
  EXPECT_DOUBLE_EQ(shell.bound, 0.0);
  EXPECT_TRUE(shell.holds);

  const auto domain = perturbed_pair();
  const auto at = shellstab::inner_stability_check(domain, lambda);
  EXPECT_GT(at.bound, 0.0);
  EXPECT_NEAR(at.bound, std::min(1.0, std::abs(lambda)) * at.weak_fraenkel, 1e-15);
  EXPECT_FALSE(at.holds);
  EXPECT_TRUE(shellstab::inner_stability_check(domain, lambda - 2.0 * at.bound).holds);
}

TEST(WebRayleigh, ShellAttainsTheEigenvalue) {
  for (const auto& g : {kPlane, kSpace}) {
    const auto web = shellstab::build_web_function(g);
    const auto r = shellstab::web_rayleigh_bounds(HoledDomain::shell(g), web);
    EXPECT_NEAR(r.rq, r.lambda_shell, 1e-8);
    EXPECT_NEAR(r.chain_bound, r.lambda_shell, 1e-12);
    EXPECT_NEAR(r.boundary, r.reference_boundary, 1e-12);
  }
}

TEST(WebRayleigh, PerturbedPlanarDomainFollowsTheChain) {
  const auto domain = perturbed_pair();
  const auto web = shellstab::build_web_function(kPlane);
  const auto r = shellstab::web_rayleigh_bounds(domain, web);
  EXPECT_NEAR(r.boundary, r.reference_boundary, 1e-12);
  EXPECT_LE(r.rq, r.chain_bound + 1e-9);
  EXPECT_LT(r.chain_bound, r.lambda_shell);
  // Parallel sets of a planar convex body keep P - 2 pi s, so the chain is tight.
  EXPECT_NEAR(r.rq, r.chain_bound, 1e-8);
}

TEST(WebRayleigh, PerturbedSpatialDomainFollowsTheChain) {
  const auto domain = shellstab::project_constraints(
      HoledDomain(kSpace, BoundaryProfile::spherical_mode(2, 0, 0.05), BoundaryProfile::spherical_mode(3, 2, 0.05)));
  const auto web = shellstab::build_web_function(kSpace);
  HoleIntegrationOptions rays;
  rays.method = HoleIntegration::rays;
  const auto r = shellstab::web_rayleigh_bounds(domain, web, rays);
  EXPECT_NEAR(r.boundary, r.reference_boundary, 1e-10);
  EXPECT_LE(r.rq, r.chain_bound + 1e-7);
  EXPECT_LT(r.chain_bound, r.lambda_shell);
}

}  // namespace
