#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "shellstab/domains.hpp"
#include "shellstab/mesh.hpp"

namespace shellstab {

struct DiscreteEigenResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenvector;
  double residual = 0.0;  // ||A x - lambda B x|| / ||B x||
  double h_max = 0.0;
  std::vector<std::pair<double, double>> refinement_history;  // (h, eigenvalue)
  int iterations = 0;
};

struct EigenSolverOptions {
  // Shift for the Robin problem; NaN selects 2 lambda - 1 with lambda the
  // shell eigenvalue at the mesh's outer perimeter and area. Lowered until
  // the factorization inertia shows no eigenvalue below it.
  double shift = std::numeric_limits<double>::quiet_NaN();
  int block = 4;
  int max_iterations = 500;
  double tolerance = 1e-9;  // on |Ax - lambda Mx| / |Mx|
};

// P1 stiffness K, consistent mass M and consistent outer-edge mass B_out.
struct DiscreteForms {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  Eigen::SparseMatrix<double> outer_mass;
};

DiscreteForms assemble_forms(const Mesh2D& mesh);

// Smallest lambda with (K + beta B_out) x = lambda M x. The eigenvector is
// M-normalized with positive sum.
DiscreteEigenResult robin_neumann_eigenvalue(const Mesh2D& mesh, double beta, const EigenSolverOptions& options = {});

// Smallest sigma with (K + M) x = sigma B_out x; B_out-normalized.
DiscreteEigenResult steklov_neumann_eigenvalue(const Mesh2D& mesh, const EigenSolverOptions& options = {});

enum class Problem { robin_neumann, steklov_neumann };

struct Extrapolation {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<std::pair<double, double>> history;  // (h_max, eigenvalue) per level
  std::vector<double> extrapolants;                // Richardson values from consecutive levels
  double observed_order = 0.0;                     // from the last three levels
  bool monotone = true;                            // successive differences shrink
};

// Levels double both mesh counts starting from the layout for h0; the
// eigenvalues are Richardson-extrapolated assuming O(h^2). Throws
// PreconditionError for fewer than three levels.
Extrapolation refine_and_extrapolate(const HoledDomain& domain, double beta, int levels, double h0 = 0.2,
                                     Problem problem = Problem::robin_neumann);

void write_eigen_result(std::ostream& out, const DiscreteEigenResult& result);
DiscreteEigenResult read_eigen_result(std::istream& in);

}  // namespace shellstab
