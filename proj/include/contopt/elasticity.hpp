#pragma once

#include <utility>
#include <vector>

#include "contopt/fe_space.hpp"

namespace contopt {

std::pair<double, double> lame_from_engineering(double E, double nu);

struct MaterialModel {
  double E = 1.0;
  double nu = 0.3;
  double lambda = 0.0;
  double mu = 0.0;

  static MaterialModel from_engineering(double E, double nu);
  Mat2 stress(const Mat2& grad_u) const {
    const Mat2 eps = 0.5 * (grad_u + grad_u.transpose());
    return 2.0 * mu * eps + lambda * eps.trace() * Mat2::Identity();
  }
};

// Uniform body force per unit area and uniform traction on Neumann facets.
struct LoadData {
  Vec2 body_force = Vec2::Zero();
  Vec2 traction = Vec2::Zero();
};

// Stiffness matrix of a(u,v) = int 2 mu eps(u):eps(v) + lambda div u div v.
// With eliminate_dirichlet the constrained rows and columns are replaced by
// the identity.
SparseMatrix assemble_elasticity(const FeSpace& space, const MaterialModel& mat, bool eliminate_dirichlet = true);

Vector assemble_load(const FeSpace& space, const LoadData& loads);

// Symmetric elimination of homogeneous Dirichlet unknowns: zero rows and
// columns, unit diagonal, zero right-hand side entries.
void apply_dirichlet(SparseMatrix& K, const std::vector<char>& mask);
void apply_dirichlet(Vector& F, const std::vector<char>& mask);

// Mass matrix of a scalar P1/P2 space and the stiffness of the scalar
// Laplacian; used by the velocity regularization.
SparseMatrix assemble_scalar_mass(const FeSpace& space);
SparseMatrix assemble_scalar_laplace(const FeSpace& space);

}  // namespace contopt
