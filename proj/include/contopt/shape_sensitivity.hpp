#pragma once

#include <functional>
#include <vector>

#include "contopt/contact.hpp"

namespace contopt {

struct ObjectiveConfig {
  double compliance_weight = 1.0;  // alpha_1
  double volume_weight = 0.0;      // alpha_2
  void validate() const;
};

// Piecewise-linear vector velocity on a host mesh. FE meshes cut from the
// host evaluate it through their parent map, so it is affine on every
// element of the FE mesh.
struct HostVelocity {
  const TriMesh* host = nullptr;
  std::vector<Vec2> nodal;

  PointKinematics eval(int host_triangle, const Vec2& x) const;
};

// Velocity given by the P1 interpolant of a function on the mesh itself.
HostVelocity interpolate_velocity(const TriMesh& mesh, const std::function<Vec2(const Vec2&)>& theta);

struct ObjectiveParts {
  double value = 0.0;
  double compliance = 0.0;
  double volume = 0.0;
};

ObjectiveParts objective(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg);

Vector solve_adjoint(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg);

// Right-hand side L[theta](v) for every vector unknown v (Dirichlet rows 0).
Vector assemble_material_rhs(const ContactSystem& sys, const ContactState& state, const HostVelocity& theta);

struct MaterialDerivativeResult {
  Vector w;
  Vector rhs;
  double relative_residual = 0.0;
  bool unreliable = false;  // biactive warning band non-empty
};

MaterialDerivativeResult solve_material_derivative(const ContactSystem& sys, const ContactState& state,
                                                   const HostVelocity& theta);

// dJ through the material derivative: j'(u).w + int j div theta + int k div_G theta.
double shape_derivative_material(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg,
                                 const HostVelocity& theta, const MaterialDerivativeResult& md);

// dJ through the adjoint: -L[theta](p) + int j div theta + int k div_G theta.
double shape_derivative_distributed(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                                    const ObjectiveConfig& cfg, const HostVelocity& theta);

// The same functional as a vector over host-node velocity unknowns:
// dJ[theta] = sum_i G(2i + c) * theta_i(c).
Vector distributed_gradient(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                            const ObjectiveConfig& cfg, const TriMesh& host);

struct BoundaryDensityPoint {
  Vec2 x = Vec2::Zero();
  double weight = 0.0;
  Vec2 normal = Vec2::Zero();  // outward
  BoundaryLabel label = BoundaryLabel::Free;
  double A = 0.0, B = 0.0, C = 0.0;
  double curvature = 0.0;
};

struct BoundaryDensities {
  std::vector<BoundaryDensityPoint> points;
  int curvature_fallbacks = 0;
  // int (A + B + C) theta . n over the boundary.
  double evaluate(const std::function<Vec2(const Vec2&)>& theta) const;
};

// Curvature source for the (kappa + d/dn) operator; may throw to signal that
// a point is not traceable, in which case zero curvature is used.
using CurvatureFn = std::function<double(const Vec2&)>;

BoundaryDensities shape_derivative_boundary(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                                            const ObjectiveConfig& cfg, const CurvatureFn& curvature);

struct DescentResult {
  Vector theta;  // scalar normal speed at host vertices
  double dJ = 0.0;  // dJ[theta n_ext]
  double h1_norm_sq = 0.0;  // reg^2 |grad theta|^2 + |theta|^2
};

// Solves reg^2 (grad theta, grad psi) + (theta, psi) = -dJ[psi n_ext] on the
// host P1 space. Host vertices flagged in fixed keep theta = 0; n_ext = 0 at
// a vertex removes it from the velocity space.
DescentResult descent_direction(const TriMesh& host, const Vector& gradient, const std::vector<Vec2>& n_ext,
                                const std::vector<char>& fixed, double reg_length);

}  // namespace contopt
