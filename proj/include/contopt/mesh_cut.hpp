#pragma once

#include <vector>

#include "contopt/level_set.hpp"
#include "contopt/mesh.hpp"
#include "contopt/rigid_foundation.hpp"

namespace contopt {

// Where the boundary conditions live on the design box D.
struct BoundaryLayout {
  Vec2 lower = Vec2(0.0, 0.0);
  Vec2 upper = Vec2(2.0, 1.0);
  // Traction segment on the side x = upper.x.
  double neumann_y0 = 0.4;
  double neumann_y1 = 0.6;
  // Free facets whose gap to the foundation is at most this are contact
  // candidates; no foundation means no contact facets.
  const RigidFoundation* foundation = nullptr;
  double contact_distance = 0.1;
  // Discard material not connected to the Dirichlet side instead of
  // rejecting the shape.
  bool drop_detached = false;
  // Shared edges shorter than this do not connect material: a ligament that
  // thin leaves the stiffness matrix nearly singular.
  double min_link_length = 0.0;

  bool on_dirichlet_side(const Vec2& a, const Vec2& b) const;
  bool on_neumann_segment(const Vec2& a, const Vec2& b) const;
  BoundaryLabel label(const Vec2& a, const Vec2& b) const;
};

struct VertexOrigin {
  int vertex = -1;       // background vertex, or -1 for an edge cut
  int edge_start = -1;   // edge cut: background vertices and parameter
  int edge_end = -1;
  double parameter = 0.0;
};

struct CutMesh {
  TriMesh mesh;  // parent[] maps each triangle to its background triangle
  std::vector<VertexOrigin> origin;
  double min_quality = 0.0;
};

// Fraction of an edge within which a cut snaps to the nearer endpoint.
constexpr double kSnapFraction = 0.02;

// Keeps the part {phi < 0} of the background mesh. phi_vertex holds the
// level-set value at each background vertex. Throws InadmissibleShape for an
// empty result, no Dirichlet facet, or (unless layout.drop_detached) material
// not connected to the Dirichlet side.
CutMesh cut_mesh(const TriMesh& background, const std::vector<double>& phi_vertex, const BoundaryLayout& layout);

// Samples phi at the background vertices and cuts.
CutMesh cut_mesh(const TriMesh& background, const LevelSetField& phi, const BoundaryLayout& layout);

}  // namespace contopt
