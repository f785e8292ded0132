#include "contopt/fe_space.hpp"

#include <unordered_map>

namespace contopt {

ElementGeometry element_geometry(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tri[0]];
  const Vec2& b = mesh.vertices[tri[1]];
  const Vec2& c = mesh.vertices[tri[2]];
  const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  if (!(det > 0.0)) throw AssemblyError("degenerate or inverted triangle " + std::to_string(t));
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad_lambda[0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
  g.grad_lambda[1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
  g.grad_lambda[2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
  return g;
}

void shape_values(int degree, const std::array<double, 3>& l, double* N) {
  if (degree == 1) {
    N[0] = l[0];
    N[1] = l[1];
    N[2] = l[2];
    return;
  }
  for (int i = 0; i < 3; ++i) N[i] = l[i] * (2.0 * l[i] - 1.0);
  N[3] = 4.0 * l[0] * l[1];
  N[4] = 4.0 * l[1] * l[2];
  N[5] = 4.0 * l[2] * l[0];
}

void shape_gradients(int degree, const std::array<double, 3>& l, const ElementGeometry& g, Vec2* dN) {
  const auto& G = g.grad_lambda;
  if (degree == 1) {
    dN[0] = G[0];
    dN[1] = G[1];
    dN[2] = G[2];
    return;
  }
  for (int i = 0; i < 3; ++i) dN[i] = (4.0 * l[i] - 1.0) * G[i];
  dN[3] = 4.0 * (l[0] * G[1] + l[1] * G[0]);
  dN[4] = 4.0 * (l[1] * G[2] + l[2] * G[1]);
  dN[5] = 4.0 * (l[2] * G[0] + l[0] * G[2]);
}

void facet_shape_values(int degree, double s, double* N) {
  if (degree == 1) {
    N[0] = 1.0 - s;
    N[1] = s;
    return;
  }
  N[0] = (1.0 - s) * (1.0 - 2.0 * s);
  N[1] = s * (2.0 * s - 1.0);
  N[2] = 4.0 * s * (1.0 - s);
}

std::array<double, 3> facet_barycentric(const BoundaryFacet& f, double s) {
  std::array<double, 3> l{0.0, 0.0, 0.0};
  l[f.local_edge] = 1.0 - s;
  l[(f.local_edge + 1) % 3] = s;
  return l;
}

FeSpace::FeSpace(const TriMesh& mesh, int degree, std::array<bool, 2> clamp)
    : mesh_(&mesh), degree_(degree), clamp_(clamp) {
  if (degree != 1 && degree != 2) throw DomainError("FE degree must be 1 or 2");
  dof_points_ = mesh.vertices;
  const int nl = local_dofs();
  elem_dofs_.resize(static_cast<size_t>(mesh.num_triangles()) * nl);
  std::unordered_map<std::uint64_t, int> edge_dof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    int* d = elem_dofs_.data() + static_cast<size_t>(t) * nl;
    for (int k = 0; k < 3; ++k) d[k] = tri[k];
    if (degree == 1) continue;
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      auto [it, inserted] = edge_dof.try_emplace(key, static_cast<int>(dof_points_.size()));
      if (inserted) dof_points_.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      d[3 + k] = it->second;
    }
  }
  dirichlet_.assign(2 * dof_points_.size(), 0);
  for (const auto& f : mesh.facets) {
    if (f.label != BoundaryLabel::Dirichlet) continue;
    const auto fd = facet_dofs(f);
    for (int i = 0; i < facet_dofs_count(); ++i) {
      for (int c = 0; c < 2; ++c) {
        if (clamp_[c]) dirichlet_[2 * fd[i] + c] = 1;
      }
    }
  }
}

std::array<int, 3> FeSpace::facet_dofs(const BoundaryFacet& f) const {
  const auto d = triangle_dofs(f.triangle);
  const int k = f.local_edge;
  if (degree_ == 1) return {d[k], d[(k + 1) % 3], -1};
  return {d[k], d[(k + 1) % 3], d[3 + k]};
}

PointKinematics eval_vector(const FeSpace& space, const Vector& u, int t, const std::array<double, 3>& l) {
  const ElementGeometry g = element_geometry(space.mesh(), t);
  double N[kMaxLocalDofs];
  Vec2 dN[kMaxLocalDofs];
  shape_values(space.degree(), l, N);
  shape_gradients(space.degree(), l, g, dN);
  PointKinematics k;
  const auto dofs = space.triangle_dofs(t);
  for (int a = 0; a < space.local_dofs(); ++a) {
    const Vec2 ua(u[2 * dofs[a]], u[2 * dofs[a] + 1]);
    k.value += N[a] * ua;
    k.grad += ua * dN[a].transpose();
  }
  return k;
}

double eval_scalar(const FeSpace& space, const Vector& s, int t, const std::array<double, 3>& l, Vec2* grad) {
  double N[kMaxLocalDofs];
  shape_values(space.degree(), l, N);
  const auto dofs = space.triangle_dofs(t);
  double v = 0.0;
  for (int a = 0; a < space.local_dofs(); ++a) v += N[a] * s[dofs[a]];
  if (grad) {
    const ElementGeometry g = element_geometry(space.mesh(), t);
    Vec2 dN[kMaxLocalDofs];
    shape_gradients(space.degree(), l, g, dN);
    grad->setZero();
    for (int a = 0; a < space.local_dofs(); ++a) *grad += s[dofs[a]] * dN[a];
  }
  return v;
}

}  // namespace contopt
