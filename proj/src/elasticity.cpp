#include "contopt/elasticity.hpp"

#include "contopt/quadrature.hpp"

namespace contopt {

std::pair<double, double> lame_from_engineering(double E, double nu) {
  if (!(E > 0.0)) throw DomainError("Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw DomainError("Poisson ratio must lie in (-1, 0.5)");
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

MaterialModel MaterialModel::from_engineering(double E, double nu) {
  MaterialModel m;
  m.E = E;
  m.nu = nu;
  std::tie(m.lambda, m.mu) = lame_from_engineering(E, nu);
  return m;
}

namespace {

int stiffness_degree(int fe_degree) { return fe_degree == 1 ? 1 : 4; }

}  // namespace

SparseMatrix assemble_elasticity(const FeSpace& space, const MaterialModel& mat, bool eliminate_dirichlet) {
  const TriMesh& mesh = space.mesh();
  const int nl = space.local_dofs();
  const int n = 2 * space.num_dofs();
  const TriangleRule& rule = triangle_rule(stiffness_degree(space.degree()));
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.num_triangles()) * 4 * nl * nl);
  Eigen::Matrix<double, 2 * kMaxLocalDofs, 2 * kMaxLocalDofs> Ke;
  Vec2 dN[kMaxLocalDofs];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    Ke.setZero();
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      shape_gradients(space.degree(), rule.points[q], g, dN);
      const double w = rule.weights[q] * g.area;
      for (int a = 0; a < nl; ++a) {
        for (int b = 0; b < nl; ++b) {
          const double dot = dN[a].dot(dN[b]);
          for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
              double v = mat.mu * dN[a](j) * dN[b](i) + mat.lambda * dN[a](i) * dN[b](j);
              if (i == j) v += mat.mu * dot;
              Ke(2 * a + i, 2 * b + j) += w * v;
            }
          }
        }
      }
    }
    const auto dofs = space.triangle_dofs(t);
    for (int a = 0; a < nl; ++a)
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < nl; ++b)
          for (int j = 0; j < 2; ++j)
            trip.emplace_back(2 * dofs[a] + i, 2 * dofs[b] + j, Ke(2 * a + i, 2 * b + j));
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  if (eliminate_dirichlet) apply_dirichlet(K, space.dirichlet_mask());
  return K;
}

Vector assemble_load(const FeSpace& space, const LoadData& loads) {
  const TriMesh& mesh = space.mesh();
  Vector F = Vector::Zero(2 * space.num_dofs());
  double N[kMaxLocalDofs];
  if (loads.body_force.squaredNorm() > 0.0) {
    const TriangleRule& rule = triangle_rule(space.degree());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double area = element_geometry(mesh, t).area;
      const auto dofs = space.triangle_dofs(t);
      for (size_t q = 0; q < rule.weights.size(); ++q) {
        shape_values(space.degree(), rule.points[q], N);
        for (int a = 0; a < space.local_dofs(); ++a) {
          F.segment<2>(2 * dofs[a]) += rule.weights[q] * area * N[a] * loads.body_force;
        }
      }
    }
  }
  if (loads.traction.squaredNorm() > 0.0) {
    const LineRule& rule = gauss_line_rule(5);
    for (const auto& f : mesh.facets) {
      if (f.label != BoundaryLabel::Neumann) continue;
      const auto fd = space.facet_dofs(f);
      for (size_t q = 0; q < rule.weights.size(); ++q) {
        facet_shape_values(space.degree(), rule.points[q], N);
        for (int a = 0; a < space.facet_dofs_count(); ++a) {
          F.segment<2>(2 * fd[a]) += rule.weights[q] * f.length * N[a] * loads.traction;
        }
      }
    }
  }
  return F;
}

void apply_dirichlet(SparseMatrix& K, const std::vector<char>& mask) {
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      if (mask[it.row()] || mask[it.col()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
}

void apply_dirichlet(Vector& F, const std::vector<char>& mask) {
  for (Eigen::Index i = 0; i < F.size(); ++i) {
    if (mask[i]) F[i] = 0.0;
  }
}

namespace {

template <class Kernel>
SparseMatrix assemble_scalar(const FeSpace& space, int quad_degree, Kernel kernel) {
  const TriMesh& mesh = space.mesh();
  const int nl = space.local_dofs();
  const TriangleRule& rule = triangle_rule(quad_degree);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.num_triangles()) * nl * nl);
  double N[kMaxLocalDofs];
  Vec2 dN[kMaxLocalDofs];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto dofs = space.triangle_dofs(t);
    Eigen::Matrix<double, kMaxLocalDofs, kMaxLocalDofs> Ke = Eigen::Matrix<double, kMaxLocalDofs, kMaxLocalDofs>::Zero();
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      shape_values(space.degree(), rule.points[q], N);
      shape_gradients(space.degree(), rule.points[q], g, dN);
      const double w = rule.weights[q] * g.area;
      for (int a = 0; a < nl; ++a)
        for (int b = 0; b < nl; ++b) Ke(a, b) += w * kernel(N[a], N[b], dN[a], dN[b]);
    }
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nl; ++b) trip.emplace_back(dofs[a], dofs[b], Ke(a, b));
  }
  SparseMatrix M(space.num_dofs(), space.num_dofs());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

}  // namespace

SparseMatrix assemble_scalar_mass(const FeSpace& space) {
  return assemble_scalar(space, 2 * space.degree(),
                         [](double Na, double Nb, const Vec2&, const Vec2&) { return Na * Nb; });
}

SparseMatrix assemble_scalar_laplace(const FeSpace& space) {
  return assemble_scalar(space, 2 * space.degree() - 2,
                         [](double, double, const Vec2& a, const Vec2& b) { return a.dot(b); });
}

}  // namespace contopt
