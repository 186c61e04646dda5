#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "shellstab/domains.hpp"
#include "shellstab/errors.hpp"
#include "shellstab/steklov_quotient.hpp"
#include "shellstab/steklov_radial.hpp"

namespace {

using shellstab::BoundaryProfile;
using shellstab::ShellGeometry;

// Barycentred random profile: modes 2..kmax with k^-2 decay, scaled to the
// requested W^{1,inf} size and projected onto the perimeter constraint.
BoundaryProfile random_profile(std::mt19937_64& rng, const ShellGeometry& g, double eps, int kmax) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> packed(2 * kmax + 1, 0.0);
  for (int k = 2; k <= kmax; ++k) {
    packed[2 * k - 1] = normal(rng) / (k * k);
    packed[2 * k] = normal(rng) / (k * k);
  }
  auto u = BoundaryProfile::fourier(packed);
  u = u.scaled(eps / u.w1inf_norm());
  return shellstab::project_perimeter(u, g);
}

TEST(Quotient, RadialCaseReproducesSigma1) {
  for (int n : {2, 3}) {
    const ShellGeometry g{n, -1.0, 1.0, 2.0};
    const auto q = shellstab::evaluate_quotient(BoundaryProfile::zero(n), g);
    EXPECT_NEAR(q.ratio, shellstab::sigma1_shell(n, 1.0, 2.0), 1e-14 * q.ratio);
    EXPECT_NEAR(q.gap, 0.0, 1e-12);
    EXPECT_GT(q.d_val, 0.0);
    EXPECT_DOUBLE_EQ(q.gradient_norm_sq, 0.0);
    EXPECT_FALSE(q.outside_threshold);
    const auto s = shellstab::stability_gap(BoundaryProfile::zero(n), g);
    EXPECT_NEAR(s.gap, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(s.lower_bound, 0.0);
  }
}

TEST(Quotient, GapMatchesDefinitionThroughAnnulusValues) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(3, 0.02, 0.01), g);
  const auto q = shellstab::evaluate_quotient(u, g);
  const auto a = shellstab::evaluate_quotient(BoundaryProfile::zero(2), g);
  const double area = g.outer_sphere_area() / std::pow(g.r2, g.n - 1);
  EXPECT_NEAR(q.gap, (a.n_val * q.d_val - a.d_val * q.n_val) / area, 1e-13);
}

TEST(Quotient, ProjectedSecondModeHasPositiveGap) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(2, 0.02), g);
  const auto q = shellstab::evaluate_quotient(u, g);
  EXPECT_GT(q.gap, 0.0);
  EXPECT_LT(q.ratio, shellstab::sigma1_shell(2, 1.0, 2.0));
  // Second-order prediction.
  const double predicted = shellstab::gap_coefficient(BoundaryProfile::fourier_mode(2, 1.0), g) * 0.02 * 0.02;
  EXPECT_NEAR(q.gap, predicted, 0.05 * predicted);
}

TEST(Quotient, RejectsProfilesReachingTheInnerRadius) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  EXPECT_THROW(shellstab::evaluate_quotient(BoundaryProfile::constant(2, -1.2), g), shellstab::PreconditionError);
  EXPECT_THROW(shellstab::evaluate_quotient(BoundaryProfile::zero(3), g), shellstab::PreconditionError);
}

TEST(Quotient, FlagsProfilesBeyondTheThreshold) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  EXPECT_FALSE(shellstab::evaluate_quotient(BoundaryProfile::fourier_mode(2, 0.04), g).outside_threshold);
  EXPECT_TRUE(shellstab::evaluate_quotient(BoundaryProfile::fourier_mode(2, 0.06), g).outside_threshold);
  EXPECT_TRUE(shellstab::evaluate_quotient(BoundaryProfile::fourier_mode(2, 0.04), g, 0.05).outside_threshold);
}

TEST(Quotient, GapRatioConvergesAlongARay) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  std::vector<double> ratios;
  for (double eps : {0.04, 0.02, 0.01}) {
    const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(2, eps), g);
    ratios.push_back(shellstab::stability_gap(u, g).lower_bound);
  }
  const double limit = 2.0 * ratios[2] - ratios[1];
  // c_2 / (4 pi) for the unit mode.
  const double expected = shellstab::gap_coefficient(BoundaryProfile::fourier_mode(2, 1.0), g) / (4.0 * std::acos(-1.0));
  EXPECT_GT(limit, 0.0);
  EXPECT_NEAR(limit, expected, 1e-3 * expected);
  EXPECT_LT(std::abs(ratios[2] - limit), std::abs(ratios[1] - limit));
  EXPECT_LT(std::abs(ratios[1] - limit), std::abs(ratios[0] - limit));
}

TEST(Quotient, ClosedFormCoefficientMatchesExtrapolation) {
  for (int n : {2, 3}) {
    for (auto [r1, r2] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.2}, std::pair{0.2, 2.0}}) {
      const ShellGeometry g{n, -1.0, r1, r2};
      for (int k = 1; k <= 5; ++k) {
        const auto shape = n == 2 ? BoundaryProfile::fourier_mode(k, 1.0, 0.3) : BoundaryProfile::spherical_mode(k, 1, 1.0);
        const double closed = shellstab::gap_coefficient(shape, g);
        const double numeric = shellstab::gap_coefficient_extrapolated(shape, g, 0.01 * r2);
        EXPECT_NEAR(numeric, closed, 1e-4 * std::abs(closed)) << n << " " << r1 << " " << r2 << " " << k;
      }
    }
  }
  // Mixed profile with a mean: the mean is absorbed by the projection.
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  const auto mixed = BoundaryProfile::fourier({0.5, 0.0, 0.0, 1.0, -0.4, 0.0, 0.3});
  EXPECT_NEAR(shellstab::gap_coefficient_extrapolated(mixed, g, 0.01), shellstab::gap_coefficient(mixed, g),
              1e-4 * shellstab::gap_coefficient(mixed, g));
}

TEST(Quotient, SecondOrderCoefficientGrowsWithDegree) {
  for (int n : {2, 3}) {
    const ShellGeometry g{n, -1.0, 1.0, 2.0};
    double prev = 0.0;
    for (int k = 2; k <= 8; ++k) {
      const auto shape = n == 2 ? BoundaryProfile::fourier_mode(k, 1.0) : BoundaryProfile::spherical_mode(k, 0, 1.0);
      const double c = shellstab::gap_coefficient(shape, g);
      EXPECT_GT(c, prev) << n << " " << k;
      prev = c;
    }
  }
}

TEST(Quotient, TranslationModeLowersTheQuotient) {
  // Without barycentring, a rigid shift of the outer circle raises N/D.
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  EXPECT_LT(shellstab::gap_coefficient(BoundaryProfile::fourier_mode(1, 1.0), g), 0.0);
  const auto u = shellstab::project_perimeter(BoundaryProfile::fourier_mode(1, 0.02), g);
  EXPECT_LT(shellstab::evaluate_quotient(u, g).gap, 0.0);
}

TEST(Quotient, RandomBarycentredProfilesHavePositiveGap) {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  std::mt19937_64 rng(2024);
  std::vector<double> ratios;
  int tested = 0;
  while (tested < 200) {
    const auto u = random_profile(rng, g, 0.03, 8);
    if (!shellstab::check_convexity(u, g.r2).convex) {
      continue;
    }
    ++tested;
    const auto s = shellstab::stability_gap(u, g);
    EXPECT_GT(s.gap, 0.0);
    ratios.push_back(s.lower_bound);
  }
  const auto c = shellstab::estimate_constant(ratios);
  EXPECT_EQ(c.samples, 200);
  EXPECT_GT(c.estimate, 0.0);
  EXPECT_LE(c.estimate, c.min_ratio);
}

TEST(Quotient, SpatialProfilesHavePositiveGap) {
  const ShellGeometry g{3, -1.0, 1.0, 2.0};
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> packed(36, 0.0);
    for (int l = 2; l <= 5; ++l) {
      for (int m = -l; m <= l; ++m) {
        packed[l * l + l + m] = normal(rng) / (l * l);
      }
    }
    auto u = BoundaryProfile::spherical_harmonics(packed);
    u = shellstab::project_perimeter(u.scaled(0.03 / u.w1inf_norm()), g);
    EXPECT_GT(shellstab::stability_gap(u, g).gap, 0.0);
  }
}

TEST(ConstantEstimate, SummaryStatistics) {
  const auto c = shellstab::estimate_constant({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(c.min_ratio, 1.0);
  EXPECT_DOUBLE_EQ(c.mean, 2.5);
  EXPECT_NEAR(c.standard_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_NEAR(c.estimate, 1.0 - 3.0 * c.standard_error, 1e-15);
  EXPECT_THROW(shellstab::estimate_constant({}), shellstab::PreconditionError);
}

}  // namespace
