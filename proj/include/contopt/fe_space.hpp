#pragma once

#include <array>
#include <span>
#include <vector>

#include "contopt/mesh.hpp"

namespace contopt {

constexpr int kMaxLocalDofs = 6;

struct ElementGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;
};

ElementGeometry element_geometry(const TriMesh& mesh, int t);

// Lagrange basis on a triangle in barycentric coordinates. P2 ordering:
// vertices 0,1,2 then edge midpoints 01, 12, 20.
void shape_values(int degree, const std::array<double, 3>& l, double* N);
void shape_gradients(int degree, const std::array<double, 3>& l, const ElementGeometry& g, Vec2* dN);
// Trace on a facet parameterized by s in [0,1]; ordering: start, end, midpoint.
void facet_shape_values(int degree, double s, double* N);

// Scalar Lagrange space; vector fields interleave components (2*dof + c).
class FeSpace {
 public:
  // clamp selects which displacement components Dirichlet facets fix.
  FeSpace(const TriMesh& mesh, int degree = 2, std::array<bool, 2> clamp = {true, true});

  const TriMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int num_dofs() const { return static_cast<int>(dof_points_.size()); }
  int local_dofs() const { return degree_ == 1 ? 3 : 6; }
  int facet_dofs_count() const { return degree_ == 1 ? 2 : 3; }
  std::span<const int> triangle_dofs(int t) const {
    return {elem_dofs_.data() + static_cast<size_t>(t) * local_dofs(), static_cast<size_t>(local_dofs())};
  }
  std::array<int, 3> facet_dofs(const BoundaryFacet& f) const;
  const std::vector<Vec2>& dof_points() const { return dof_points_; }
  // Per vector unknown (size 2*num_dofs): 1 where a Dirichlet condition holds.
  const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
  std::array<bool, 2> clamp() const { return clamp_; }

 private:
  const TriMesh* mesh_;
  int degree_;
  std::array<bool, 2> clamp_;
  std::vector<int> elem_dofs_;
  std::vector<Vec2> dof_points_;
  std::vector<char> dirichlet_;
};

struct PointKinematics {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();  // grad(i,k) = d value_i / d x_k
};

// Vector field evaluation inside triangle t at barycentric l.
PointKinematics eval_vector(const FeSpace& space, const Vector& u, int t, const std::array<double, 3>& l);
// Scalar field evaluation (value and gradient).
double eval_scalar(const FeSpace& space, const Vector& s, int t, const std::array<double, 3>& l, Vec2* grad);

// Barycentric coordinates of the facet point with parameter s in its triangle.
std::array<double, 3> facet_barycentric(const BoundaryFacet& f, double s);

}  // namespace contopt
