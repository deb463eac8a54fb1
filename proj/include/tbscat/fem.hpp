#pragma once

// Quadratic Lagrange finite elements for
//
//   -Lap xi + (v - E) xi = f  in the disk,
//   d_n xi - (i sqrt(E) - c / (2R)) xi = g  on the boundary,
//
// with c = 0 (plain) or c = 1 (corrected). The weak form is bilinear: test
// functions are not conjugated, so the system matrix is complex symmetric.

#include <Eigen/SparseCore>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tbscat/mesh.hpp"

namespace tbscat {

class FieldModel;

enum class BoundaryCondition { kPlain, kCorrected };

const char* bc_name(BoundaryCondition bc);
BoundaryCondition parse_bc(const std::string& name);  // "plain" | "corrected"; ConfigInvalid otherwise

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using VectorC = Eigen::VectorXcd;

// Coefficients and data of the boundary value problem. Empty functions mean zero.
struct SourceTerms {
  double energy = 0.0;
  std::function<double(Vec2)> potential;
  std::function<cplx(Vec2)> rhs;                   // f
  std::function<cplx(Vec2, Vec2)> boundary_data;   // g(x, outward normal)
};

// v = v(x1) + v(x2) + v(x3) and f = -Q from the analytic field.
SourceTerms physics_source(const FieldModel& model);

// Data for which xi = u is the exact solution: f = -Lap u + (v - E) u and
// g = d_n u - (i sqrt(E) - c/(2R)) u with the polygon normal.
struct ManufacturedSolution {
  std::function<cplx(Vec2)> value;
  std::function<std::array<cplx, 2>(Vec2)> gradient;
  std::function<cplx(Vec2)> laplacian;
};
SourceTerms manufactured_source(const ManufacturedSolution& u, double energy, std::function<double(Vec2)> potential,
                                BoundaryCondition bc, double radius);

class FemProblem {
 public:
  FemProblem(std::shared_ptr<const Mesh> mesh, SparseMatrixC matrix, VectorC rhs, BoundaryCondition bc, double energy)
      : mesh_(std::move(mesh)), matrix_(std::move(matrix)), rhs_(std::move(rhs)), bc_(bc), energy_(energy) {}

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const SparseMatrixC& matrix() const { return matrix_; }
  const VectorC& rhs() const { return rhs_; }
  BoundaryCondition bc() const { return bc_; }
  double energy() const { return energy_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  SparseMatrixC matrix_;
  VectorC rhs_;
  BoundaryCondition bc_;
  double energy_;
};

// Element integrals use the 6-point degree-4 triangle rule and 3-point Gauss
// on boundary edges. Element work runs in parallel; accumulation is serial in
// element order, so the result is bitwise reproducible.
FemProblem assemble(std::shared_ptr<const Mesh> mesh, const SourceTerms& source, BoundaryCondition bc);

struct SolverOptions {
  std::size_t direct_threshold = 400'000;  // unknowns; above it BiCGSTAB + ILUT
  double tolerance = 1e-10;                 // iterative relative residual target
  int max_iterations = 20'000;
  double ilut_drop = 1e-5;
  int ilut_fill = 30;
};

struct SolveReport {
  std::string method;  // "direct" or "bicgstab"
  int iterations = 0;
  double residual = 0.0;  // ||A x - b|| / ||b||
  std::vector<double> history;
  double seconds = 0.0;
};

// Throws NonConvergence when the relative residual stays above 1e-8.
VectorC solve(const FemProblem& problem, const SolverOptions& options = {}, SolveReport* report = nullptr);

// Quadratic interpolant of nodal values.
class FemField {
 public:
  FemField(std::shared_ptr<const Mesh> mesh, VectorC values);

  const Mesh& mesh() const { return *mesh_; }
  const VectorC& values() const { return values_; }

  // Throws PointOutsideDomain for |x| > R.
  cplx value(Vec2 x) const;
  std::array<cplx, 2> gradient(Vec2 x) const;
  std::optional<cplx> try_value(Vec2 x) const;

  // L2 norm of (field - exact) over the mesh with the 7-point degree-5 rule.
  double l2_error(const std::function<cplx(Vec2)>& exact) const;
  double l2_norm() const;

  // CSV: comment lines, then "node,x,y,re,im".
  void write_csv(std::ostream& os, const std::string& header = {}) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  VectorC values_;
  TriangleLocator locator_;
};

}  // namespace tbscat
