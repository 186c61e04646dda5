#pragma once

#include <vector>

#include "shellstab/profile.hpp"
#include "shellstab/shell.hpp"

namespace shellstab {

// Test-function quotient N/D for the first Steklov-Neumann eigenvalue of a
// domain whose outer boundary is r = R2 + u. Only the outer profile enters.
struct QuotientEvaluation {
  double n_val = 0.0;
  double d_val = 0.0;
  double ratio = 0.0;
  // (N(A) D(Omega) - D(A) N(Omega)) / (n omega_n); positive when ratio < sigma1(A).
  double gap = 0.0;
  double gradient_norm_sq = 0.0;
  // ||u||_{W^{1,inf}} exceeds the nearly spherical threshold.
  bool outside_threshold = false;
};

// threshold <= 0 selects 0.05 R2. Throws PreconditionError if R2 + u < R1.
QuotientEvaluation evaluate_quotient(const BoundaryProfile& outer, const ShellGeometry& geom, double threshold = 0.0);

struct StabilityGap {
  double gap = 0.0;
  double lower_bound = 0.0;  // gap / ||grad u||^2, zero for constant profiles
};

StabilityGap stability_gap(const BoundaryProfile& outer, const ShellGeometry& geom);

// Leading coefficient c with gap(eps) = c eps^2 + O(eps^3) along the
// perimeter-projected ray eps * shape, assembled from A0, A1, A2.
double gap_coefficient(const BoundaryProfile& shape, const ShellGeometry& geom);

// Same coefficient extracted from direct evaluations at eps, eps/2, eps/4
// with two Richardson steps.
double gap_coefficient_extrapolated(const BoundaryProfile& shape, const ShellGeometry& geom, double eps);

struct ConstantEstimate {
  int samples = 0;
  double min_ratio = 0.0;
  double mean = 0.0;
  double standard_error = 0.0;
  double estimate = 0.0;  // min_ratio - 3 standard_error
};

// Throws PreconditionError on an empty sample.
ConstantEstimate estimate_constant(const std::vector<double>& ratios);

}  // namespace shellstab
