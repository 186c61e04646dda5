#include "shellstab/fem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "shellstab/errors.hpp"
#include "shellstab/shell.hpp"

namespace shellstab {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

DiscreteForms assemble_forms(const Mesh2D& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  Triplets k;
  Triplets m;
  Triplets b;
  k.reserve(9 * mesh.triangles.size());
  m.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector2d& p0 = mesh.vertices[t[0]];
    const Eigen::Vector2d& p1 = mesh.vertices[t[1]];
    const Eigen::Vector2d& p2 = mesh.vertices[t[2]];
    const double two_area = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    const double area = 0.5 * two_area;
    // Rotated opposite edges are 2 * area * grad(barycentric).
    const Eigen::Vector2d e[3] = {p2 - p1, p0 - p2, p1 - p0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k.emplace_back(t[i], t[j], e[i].dot(e[j]) / (4.0 * area));
        m.emplace_back(t[i], t[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  for (const auto& edge : mesh.outer_boundary_edges) {
    const double len = (mesh.vertices[edge[1]] - mesh.vertices[edge[0]]).norm();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        b.emplace_back(edge[i], edge[j], len / 6.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  DiscreteForms f;
  f.stiffness.resize(n, n);
  f.mass.resize(n, n);
  f.outer_mass.resize(n, n);
  f.stiffness.setFromTriplets(k.begin(), k.end());
  f.mass.setFromTriplets(m.begin(), m.end());
  f.outer_mass.setFromTriplets(b.begin(), b.end());
  return f;
}

namespace {

Eigen::MatrixXd starting_block(const Mesh2D& mesh, int block) {
  const int n = static_cast<int>(mesh.vertices.size());
  Eigen::MatrixXd x(n, block);
  for (int i = 0; i < n; ++i) {
    const auto& p = mesh.vertices[i];
    const double r = p.norm();
    for (int c = 0; c < block; ++c) {
      switch (c % 4) {
        case 0: x(i, c) = 1.0 + 0.1 * r * r; break;
        case 1: x(i, c) = p.x(); break;
        case 2: x(i, c) = p.y(); break;
        default: x(i, c) = p.x() * p.y() + 0.01 * c * r; break;
      }
    }
  }
  return x;
}

// Block subspace iteration on lhs x = lambda rhs x with
// solve(v) = (lhs - shift rhs)^{-1} v. Updates the block in place and reports
// the leading Ritz value; returns true once the residual meets tolerance.
template <class Solve>
bool subspace_iteration(const SparseMatrix& lhs, const SparseMatrix& rhs, const Solve& solve, Eigen::MatrixXd& x,
                        int max_iterations, double tolerance, DiscreteEigenResult& out) {
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::MatrixXd y = solve(rhs * x);
    const Eigen::MatrixXd a = y.transpose() * (lhs * y);
    const Eigen::MatrixXd b = y.transpose() * (rhs * y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (a + a.transpose()),
                                                                  0.5 * (b + b.transpose()));
    if (ritz.info() != Eigen::Success) {
      throw ConvergenceError("subspace iteration: Rayleigh-Ritz step failed at iteration " +
                             std::to_string(out.iterations + 1));
    }
    x = y * ritz.eigenvectors();
    const Eigen::VectorXd v = x.col(0);
    const Eigen::VectorXd bv = rhs * v;
    out.eigenvalue = v.dot(lhs * v) / v.dot(bv);
    out.residual = (lhs * v - out.eigenvalue * bv).norm() / bv.norm();
    ++out.iterations;
    if (out.residual <= tolerance) {
      return true;
    }
  }
  return false;
}

DiscreteEigenResult finish(const Mesh2D& mesh, const SparseMatrix& lhs, const SparseMatrix& rhs,
                           const Eigen::MatrixXd& x, DiscreteEigenResult out, bool converged, double tolerance) {
  if (!converged) {
    std::ostringstream os;
    os << "subspace iteration: residual " << out.residual << " after " << out.iterations
       << " iterations (target " << tolerance << ")";
    throw ConvergenceError(os.str());
  }
  Eigen::VectorXd v = x.col(0);
  if (v.sum() < 0.0) {
    v = -v;
  }
  v /= std::sqrt(v.dot(rhs * v));
  out.eigenvector = v;
  out.eigenvalue = v.dot(lhs * v) / v.dot(rhs * v);
  out.h_max = mesh.h_max;
  out.refinement_history.emplace_back(mesh.h_max, out.eigenvalue);
  return out;
}

}  // namespace

DiscreteEigenResult robin_neumann_eigenvalue(const Mesh2D& mesh, double beta, const EigenSolverOptions& options) {
  if (!(beta < 0.0)) {
    throw PreconditionError("robin_neumann_eigenvalue: beta must be negative");
  }
  mesh.validate();
  const DiscreteForms f = assemble_forms(mesh);
  const SparseMatrix lhs = f.stiffness + beta * f.outer_mass;
  double shift = options.shift;
  if (std::isnan(shift)) {
    // Shell with the mesh's outer perimeter and area.
    ShellGeometry shell;
    shell.beta = beta;
    shell.r2 = mesh.outer_boundary_length() / (2.0 * std::numbers::pi);
    shell.r1 = std::sqrt(std::max(0.0, shell.r2 * shell.r2 - mesh.area() / std::numbers::pi));
    const double lambda_shell = shell_eigenvalue(shell);
    shift = lambda_shell - std::abs(lambda_shell) - 1.0;
  }
  Eigen::SimplicialLDLT<SparseMatrix> factor;
  factor.analyzePattern(lhs + f.mass);
  // Sylvester inertia: negative pivots count eigenvalues below the shift.
  auto below_spectrum = [&](double s) {
    factor.factorize(SparseMatrix(lhs - s * f.mass));
    return factor.info() == Eigen::Success && (factor.vectorD().array() < 0.0).count() == 0;
  };
  for (int attempt = 0; !below_spectrum(shift); ++attempt) {
    if (attempt == 30) {
      throw ConvergenceError("robin_neumann_eigenvalue: no shift below the spectrum found");
    }
    shift -= 2.0 * std::abs(shift) + 1.0;
  }
  const auto solve = [&](const Eigen::MatrixXd& v) { return Eigen::MatrixXd(factor.solve(v)); };
  const int block = std::clamp(options.block, 1, static_cast<int>(mesh.vertices.size()));
  Eigen::MatrixXd x = starting_block(mesh, block);
  DiscreteEigenResult out;
  bool converged = subspace_iteration(lhs, f.mass, solve, x, 3, options.tolerance, out);
  if (!converged) {
    // Move the shift up under the leading Ritz value, an upper bound for the
    // smallest eigenvalue, keeping the certified one as fallback.
    const double certified = shift;
    const double ritz = out.eigenvalue;
    double candidate = ritz - 0.05 * (std::abs(ritz) + 1.0);
    bool moved = false;
    for (int attempt = 0; attempt < 3 && candidate > certified; ++attempt) {
      if (below_spectrum(candidate)) {
        shift = candidate;
        moved = true;
        break;
      }
      candidate = 0.5 * (candidate + certified);
    }
    if (!moved && !below_spectrum(certified)) {
      throw ConvergenceError("robin_neumann_eigenvalue: shift certification failed");
    }
    converged = subspace_iteration(lhs, f.mass, solve, x, options.max_iterations - out.iterations,
                                   options.tolerance, out);
  }
  return finish(mesh, lhs, f.mass, x, out, converged, options.tolerance);
}

DiscreteEigenResult steklov_neumann_eigenvalue(const Mesh2D& mesh, const EigenSolverOptions& options) {
  mesh.validate();
  if (mesh.outer_boundary_edges.empty()) {
    throw PreconditionError("steklov_neumann_eigenvalue: mesh has no outer boundary");
  }
  const DiscreteForms f = assemble_forms(mesh);
  const SparseMatrix lhs = f.stiffness + f.mass;
  Eigen::SimplicialLDLT<SparseMatrix> factor(lhs);
  if (factor.info() != Eigen::Success) {
    throw ConvergenceError("steklov_neumann_eigenvalue: factorization failed");
  }
  const int block = std::clamp(options.block, 1, static_cast<int>(mesh.outer_boundary_edges.size()));
  Eigen::MatrixXd x = starting_block(mesh, block);
  DiscreteEigenResult out;
  const bool converged = subspace_iteration(
      lhs, f.outer_mass, [&](const Eigen::MatrixXd& v) { return Eigen::MatrixXd(factor.solve(v)); }, x,
      options.max_iterations, options.tolerance, out);
  return finish(mesh, lhs, f.outer_mass, x, out, converged, options.tolerance);
}

Extrapolation refine_and_extrapolate(const HoledDomain& domain, double beta, int levels, double h0, Problem problem) {
  if (levels < 3) {
    throw PreconditionError("refine_and_extrapolate: need at least three levels");
  }
  MeshLayout layout = layout_for(domain, h0);
  Extrapolation out;
  std::vector<double> values;
  for (int level = 0; level < levels; ++level) {
    const Mesh2D mesh = mesh_holed_domain(domain, layout);
    const auto r = problem == Problem::robin_neumann ? robin_neumann_eigenvalue(mesh, beta)
                                                     : steklov_neumann_eigenvalue(mesh);
    out.history.emplace_back(mesh.h_max, r.eigenvalue);
    values.push_back(r.eigenvalue);
    layout.angular *= 2;
    layout.radial *= 2;
  }
  for (std::size_t k = 1; k < values.size(); ++k) {
    out.extrapolants.push_back((4.0 * values[k] - values[k - 1]) / 3.0);
  }
  const std::size_t last = values.size() - 1;
  const double d1 = values[last - 1] - values[last - 2];
  const double d2 = values[last] - values[last - 1];
  out.observed_order = std::log2(std::abs(d1 / d2));
  for (std::size_t k = 2; k < values.size(); ++k) {
    const double prev = values[k - 1] - values[k - 2];
    const double cur = values[k] - values[k - 1];
    if (std::abs(cur) >= std::abs(prev) || (prev > 0.0) != (cur > 0.0)) {
      out.monotone = false;
    }
  }
  out.value = out.extrapolants.back();
  out.error_estimate = std::abs(out.extrapolants.back() - out.extrapolants[out.extrapolants.size() - 2]);
  return out;
}

void write_eigen_result(std::ostream& out, const DiscreteEigenResult& result) {
  out.precision(17);
  out << "eigenresult 1\n";
  out << "eigenvalue " << result.eigenvalue << "\n";
  out << "residual " << result.residual << "\n";
  out << "h_max " << result.h_max << "\n";
  out << "iterations " << result.iterations << "\n";
  out << "history " << result.refinement_history.size() << "\n";
  for (const auto& [h, v] : result.refinement_history) {
    out << h << " " << v << "\n";
  }
  out << "vector " << result.eigenvector.size() << "\n";
  for (Eigen::Index i = 0; i < result.eigenvector.size(); ++i) {
    out << result.eigenvector[i] << "\n";
  }
}

DiscreteEigenResult read_eigen_result(std::istream& in) {
  auto field = [&](const std::string& key) {
    std::string got;
    if (!(in >> got) || got != key) {
      throw PreconditionError("read_eigen_result: expected '" + key + "'");
    }
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "eigenresult" || version != 1) {
    throw PreconditionError("read_eigen_result: not a version 1 eigenresult");
  }
  DiscreteEigenResult r;
  std::size_t count = 0;
  field("eigenvalue");
  in >> r.eigenvalue;
  field("residual");
  in >> r.residual;
  field("h_max");
  in >> r.h_max;
  field("iterations");
  in >> r.iterations;
  field("history");
  in >> count;
  r.refinement_history.resize(count);
  for (auto& [h, v] : r.refinement_history) {
    in >> h >> v;
  }
  field("vector");
  in >> count;
  r.eigenvector.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    in >> r.eigenvector[static_cast<Eigen::Index>(i)];
  }
  if (!in) {
    throw PreconditionError("read_eigen_result: truncated input");
  }
  return r;
}

}  // namespace shellstab
