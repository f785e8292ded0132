#include "contopt/shape_sensitivity.hpp"

#include <cmath>

#include "contopt/projections.hpp"
#include "contopt/quadrature.hpp"

namespace contopt {

void ObjectiveConfig::validate() const {
  if (compliance_weight < 0.0 || volume_weight < 0.0) throw ConfigError("objective weights must be nonnegative");
  if (compliance_weight == 0.0 && volume_weight == 0.0) throw ConfigError("objective weights cannot both vanish");
}

PointKinematics HostVelocity::eval(int host_triangle, const Vec2& x) const {
  if (!host || host_triangle < 0 || host_triangle >= host->num_triangles()) {
    throw AssemblyError("velocity field is not available on this element");
  }
  const auto& tri = host->triangles[host_triangle];
  const auto l = barycentric(host->vertices[tri[0]], host->vertices[tri[1]], host->vertices[tri[2]], x);
  const ElementGeometry g = element_geometry(*host, host_triangle);
  PointKinematics k;
  for (int a = 0; a < 3; ++a) {
    k.value += l[a] * nodal[tri[a]];
    k.grad += nodal[tri[a]] * g.grad_lambda[a].transpose();
  }
  return k;
}

HostVelocity interpolate_velocity(const TriMesh& mesh, const std::function<Vec2(const Vec2&)>& theta) {
  HostVelocity v;
  v.host = &mesh;
  v.nodal.reserve(mesh.vertices.size());
  for (const auto& p : mesh.vertices) v.nodal.push_back(theta(p));
  return v;
}

namespace {

int volume_rule_degree(const FeSpace& V) { return V.degree() == 1 ? 2 : 4; }

double divergence(const Mat2& g) { return g.trace(); }

// Facet tangential divergence of theta.
double surface_divergence(const Mat2& grad_theta, const Vec2& tangent) {
  return tangent.dot(grad_theta * tangent);
}

Vec2 facet_tangent(const TriMesh& mesh, const BoundaryFacet& f) {
  return (mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]]) / f.length;
}

// State at a volume quadrature point.
struct VolumeState {
  Mat2 grad_u;
  Mat2 sigma_u;
  Vec2 u;
};

// Volume part of L[theta](v).
double volume_integrand(const MaterialModel& mat, const Vec2& f, const VolumeState& s, const PointKinematics& th,
                        const Vec2& v, const Mat2& grad_v) {
  const double div = divergence(th.grad);
  const Mat2 sigma_v = mat.stress(grad_v);
  return div * f.dot(v) + (sigma_v.cwiseProduct(s.grad_u * th.grad)).sum() +
         (s.sigma_u.cwiseProduct(grad_v * th.grad)).sum() - div * (s.sigma_u.cwiseProduct(grad_v)).sum();
}

// State at a contact quadrature point.
struct ContactPointState {
  Vec2 u;
  double un = 0.0;  // u.n
  double R = 0.0, H = 0.0, S = 0.0, d_alpha = 0.0, d_z = 0.0;
};

ContactPointState contact_point_state(const ContactSystem& sys, const ContactPoint& p, const Vector& u) {
  ContactPointState c;
  c.u.setZero();
  for (int a = 0; a < sys.space().facet_dofs_count(); ++a) c.u += p.N[a] * u.segment<2>(2 * p.dofs[a]);
  c.un = c.u.dot(p.geo.normal);
  const double y = c.un - p.geo.gap;
  c.R = pmax(y);
  c.H = heaviside(y);
  if (sys.has_friction() && p.bound > 0.0) {
    const double alpha = sys.epsilon() * p.bound;
    const double ut = c.u.dot(p.tangent);
    c.S = qproj(alpha, ut);
    const auto jac = ball_jacobian(alpha, ut, sys.problem().config.tie_tolerance);
    c.d_alpha = jac.d_alpha(0);
    c.d_z = jac.d_z(0, 0);
  }
  return c;
}

// Contact part of L[theta](v).
double contact_integrand(double eps, const ContactPoint& p, const ContactPointState& c, const PointKinematics& th,
                         const Vec2& facet_t, const Vec2& v) {
  const Vec2& n = p.geo.normal;
  const Vec2& t = p.tangent;
  const double divg = surface_divergence(th.grad, facet_t);
  const Vec2 dn = p.geo.grad_normal * th.value;  // n'
  const double vn = v.dot(n), vt = v.dot(t);
  const double dgap = p.geo.grad_gap.dot(th.value);  // g'
  double r = -(c.R / eps) * (vn * divg + v.dot(dn));
  r -= (c.H / eps) * (c.u.dot(dn) - dgap) * vn;
  r -= (c.S / eps) * (vt * divg - vn * t.dot(dn));
  r -= (c.d_alpha * p.bound_gradient.dot(th.value) - (c.d_z / eps) * c.un * t.dot(dn)) * vt;
  return r;
}

template <class VolumeFn, class FacetFn, class ContactFn>
void for_each_quadrature_point(const ContactSystem& sys, const VolumeFn& on_volume, const FacetFn& on_neumann,
                               const ContactFn& on_contact) {
  const FeSpace& V = sys.space();
  const TriMesh& mesh = V.mesh();
  const TriangleRule& rule = triangle_rule(volume_rule_degree(V));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = element_geometry(mesh, t).area;
    const auto& tri = mesh.triangles[t];
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = l[0] * mesh.vertices[tri[0]] + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
      on_volume(t, l, x, rule.weights[q] * area);
    }
  }
  const LineRule& lr = gauss_line_rule(5);
  for (const auto& f : mesh.facets) {
    if (f.label != BoundaryLabel::Neumann) continue;
    for (size_t q = 0; q < lr.weights.size(); ++q) {
      on_neumann(f, lr.points[q], mesh.facet_point(f, lr.points[q]), lr.weights[q] * f.length);
    }
  }
  for (const ContactPoint& p : sys.points()) on_contact(p);
}

}  // namespace

ObjectiveParts objective(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg) {
  ObjectiveParts o;
  o.compliance = sys.load().dot(state.u);
  o.volume = sys.space().mesh().total_area();
  o.value = cfg.compliance_weight * o.compliance + cfg.volume_weight * o.volume;
  return o;
}

Vector solve_adjoint(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg) {
  if (cfg.compliance_weight == 0.0) return Vector::Zero(state.u.size());
  const Vector rhs = -cfg.compliance_weight * sys.load();
  SpdSolver solver(1e-10);
  solver.factorize(sys.jacobian(state.u));
  return solver.solve(rhs);
}

Vector assemble_material_rhs(const ContactSystem& sys, const ContactState& state, const HostVelocity& theta) {
  const FeSpace& V = sys.space();
  const TriMesh& mesh = V.mesh();
  const MaterialModel& mat = sys.problem().material;
  const LoadData& loads = sys.problem().loads;
  const double eps = sys.epsilon();
  const int nl = V.local_dofs();
  Vector L = Vector::Zero(2 * V.num_dofs());
  double N[kMaxLocalDofs];
  Vec2 dN[kMaxLocalDofs];

  auto on_volume = [&](int t, const std::array<double, 3>& l, const Vec2& x, double w) {
    const PointKinematics th = theta.eval(mesh.host_triangle(t), x);
    const PointKinematics uk = eval_vector(V, state.u, t, l);
    const VolumeState s{uk.grad, mat.stress(uk.grad), uk.value};
    shape_values(V.degree(), l, N);
    shape_gradients(V.degree(), l, element_geometry(mesh, t), dN);
    const auto dofs = V.triangle_dofs(t);
    for (int a = 0; a < nl; ++a) {
      for (int i = 0; i < 2; ++i) {
        const Vec2 v = N[a] * Vec2::Unit(i);
        const Mat2 gv = Vec2::Unit(i) * dN[a].transpose();
        L[2 * dofs[a] + i] += w * volume_integrand(mat, loads.body_force, s, th, v, gv);
      }
    }
  };
  auto on_neumann = [&](const BoundaryFacet& f, double sp, const Vec2& x, double w) {
    const PointKinematics th = theta.eval(mesh.host_triangle(f.triangle), x);
    const double divg = surface_divergence(th.grad, facet_tangent(mesh, f));
    facet_shape_values(V.degree(), sp, N);
    const auto fd = V.facet_dofs(f);
    for (int a = 0; a < V.facet_dofs_count(); ++a) L.segment<2>(2 * fd[a]) += w * divg * N[a] * loads.traction;
  };
  auto on_contact = [&](const ContactPoint& p) {
    const BoundaryFacet& f = mesh.facets[p.facet];
    const PointKinematics th = theta.eval(mesh.host_triangle(f.triangle), p.x);
    const ContactPointState c = contact_point_state(sys, p, state.u);
    const Vec2 ft = facet_tangent(mesh, f);
    for (int a = 0; a < V.facet_dofs_count(); ++a) {
      for (int i = 0; i < 2; ++i) {
        L[2 * p.dofs[a] + i] += p.weight * contact_integrand(eps, p, c, th, ft, p.N[a] * Vec2::Unit(i));
      }
    }
  };
  for_each_quadrature_point(sys, on_volume, on_neumann, on_contact);
  apply_dirichlet(L, V.dirichlet_mask());
  return L;
}

MaterialDerivativeResult solve_material_derivative(const ContactSystem& sys, const ContactState& state,
                                                   const HostVelocity& theta) {
  MaterialDerivativeResult r;
  r.rhs = assemble_material_rhs(sys, state, theta);
  const SparseMatrix B = sys.jacobian(state.u);
  SpdSolver solver(1e-10);
  solver.factorize(B);
  r.w = solver.solve(r.rhs);
  const double rn = r.rhs.norm();
  r.relative_residual = rn > 0.0 ? (B * r.w - r.rhs).norm() / rn : 0.0;
  const auto diag = biactive_measure(state, sys.problem().config.tie_tolerance, sys.problem().config.warning_band);
  r.unreliable = diag.warning_band_hit();
  return r;
}

namespace {

// int j(u) div theta + int_{Gamma_N} k(u) div_G theta
double transport_terms(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg,
                       const HostVelocity& theta) {
  const FeSpace& V = sys.space();
  const TriMesh& mesh = V.mesh();
  const LoadData& loads = sys.problem().loads;
  double sum = 0.0;
  auto on_volume = [&](int t, const std::array<double, 3>& l, const Vec2& x, double w) {
    const PointKinematics th = theta.eval(mesh.host_triangle(t), x);
    const Vec2 u = eval_vector(V, state.u, t, l).value;
    sum += w * (cfg.compliance_weight * loads.body_force.dot(u) + cfg.volume_weight) * divergence(th.grad);
  };
  auto on_neumann = [&](const BoundaryFacet& f, double sp, const Vec2& x, double w) {
    const PointKinematics th = theta.eval(mesh.host_triangle(f.triangle), x);
    const Vec2 u = eval_vector(V, state.u, f.triangle, facet_barycentric(f, sp)).value;
    sum += w * cfg.compliance_weight * loads.traction.dot(u) * surface_divergence(th.grad, facet_tangent(mesh, f));
  };
  for_each_quadrature_point(sys, on_volume, on_neumann, [](const ContactPoint&) {});
  return sum;
}

}  // namespace

double shape_derivative_material(const ContactSystem& sys, const ContactState& state, const ObjectiveConfig& cfg,
                                 const HostVelocity& theta, const MaterialDerivativeResult& md) {
  return cfg.compliance_weight * sys.load().dot(md.w) + transport_terms(sys, state, cfg, theta);
}

double shape_derivative_distributed(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                                    const ObjectiveConfig& cfg, const HostVelocity& theta) {
  const Vector L = assemble_material_rhs(sys, state, theta);
  return -L.dot(adjoint) + transport_terms(sys, state, cfg, theta);
}

Vector distributed_gradient(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                            const ObjectiveConfig& cfg, const TriMesh& host) {
  const FeSpace& V = sys.space();
  const TriMesh& mesh = V.mesh();
  const MaterialModel& mat = sys.problem().material;
  const LoadData& loads = sys.problem().loads;
  const double eps = sys.epsilon();
  Vector G = Vector::Zero(2 * host.num_vertices());

  // Basis velocities of the host triangle: lambda_a e_c.
  auto host_basis = [&](int h, const Vec2& x, std::array<PointKinematics, 6>& basis, std::array<int, 6>& index) {
    const auto& tri = host.triangles[h];
    const auto l = barycentric(host.vertices[tri[0]], host.vertices[tri[1]], host.vertices[tri[2]], x);
    const ElementGeometry g = element_geometry(host, h);
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 2; ++c) {
        PointKinematics& k = basis[2 * a + c];
        k.value = l[a] * Vec2::Unit(c);
        k.grad = Vec2::Unit(c) * g.grad_lambda[a].transpose();
        index[2 * a + c] = 2 * tri[a] + c;
      }
    }
  };
  std::array<PointKinematics, 6> basis;
  std::array<int, 6> index{};

  auto on_volume = [&](int t, const std::array<double, 3>& l, const Vec2& x, double w) {
    host_basis(mesh.host_triangle(t), x, basis, index);
    const PointKinematics uk = eval_vector(V, state.u, t, l);
    const PointKinematics pk = eval_vector(V, adjoint, t, l);
    const VolumeState s{uk.grad, mat.stress(uk.grad), uk.value};
    const double j = cfg.compliance_weight * loads.body_force.dot(uk.value) + cfg.volume_weight;
    for (int b = 0; b < 6; ++b) {
      G[index[b]] += w * (-volume_integrand(mat, loads.body_force, s, basis[b], pk.value, pk.grad) +
                          j * divergence(basis[b].grad));
    }
  };
  auto on_neumann = [&](const BoundaryFacet& f, double sp, const Vec2& x, double w) {
    host_basis(mesh.host_triangle(f.triangle), x, basis, index);
    const auto l = facet_barycentric(f, sp);
    const Vec2 u = eval_vector(V, state.u, f.triangle, l).value;
    const Vec2 p = eval_vector(V, adjoint, f.triangle, l).value;
    const Vec2 ft = facet_tangent(mesh, f);
    const double coeff = cfg.compliance_weight * loads.traction.dot(u) - loads.traction.dot(p);
    for (int b = 0; b < 6; ++b) G[index[b]] += w * coeff * surface_divergence(basis[b].grad, ft);
  };
  auto on_contact = [&](const ContactPoint& p) {
    const BoundaryFacet& f = mesh.facets[p.facet];
    host_basis(mesh.host_triangle(f.triangle), p.x, basis, index);
    const ContactPointState c = contact_point_state(sys, p, state.u);
    Vec2 pv = Vec2::Zero();
    for (int a = 0; a < V.facet_dofs_count(); ++a) pv += p.N[a] * adjoint.segment<2>(2 * p.dofs[a]);
    const Vec2 ft = facet_tangent(mesh, f);
    for (int b = 0; b < 6; ++b) G[index[b]] -= p.weight * contact_integrand(eps, p, c, basis[b], ft, pv);
  };
  for_each_quadrature_point(sys, on_volume, on_neumann, on_contact);
  return G;
}

double BoundaryDensities::evaluate(const std::function<Vec2(const Vec2&)>& theta) const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight * (p.A + p.B + p.C) * theta(p.x).dot(p.normal);
  return s;
}

namespace {

// Lumped L2 projection of the element gradients of a scalar FE field onto
// the mesh vertices.
std::vector<Vec2> recover_vertex_gradients(const FeSpace& V, const Vector& values) {
  const TriMesh& mesh = V.mesh();
  std::vector<Vec2> g(mesh.num_vertices(), Vec2::Zero());
  std::vector<double> wsum(mesh.num_vertices(), 0.0);
  const TriangleRule& rule = triangle_rule(2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = element_geometry(mesh, t).area;
    const auto& tri = mesh.triangles[t];
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      Vec2 grad;
      eval_scalar(V, values, t, rule.points[q], &grad);
      for (int a = 0; a < 3; ++a) {
        const double w = rule.weights[q] * area * rule.points[q][a];
        g[tri[a]] += w * grad;
        wsum[tri[a]] += w;
      }
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (wsum[v] > 0.0) g[v] /= wsum[v];
  }
  return g;
}

}  // namespace

BoundaryDensities shape_derivative_boundary(const ContactSystem& sys, const ContactState& state, const Vector& adjoint,
                                            const ObjectiveConfig& cfg, const CurvatureFn& curvature) {
  const FeSpace& V = sys.space();
  const TriMesh& mesh = V.mesh();
  const MaterialModel& mat = sys.problem().material;
  const LoadData& loads = sys.problem().loads;
  const double eps = sys.epsilon();
  const int nd = V.num_dofs();

  // Scalar integrands sampled at the dofs: k(u), tau.p and the two contact
  // products. The contact products are only needed next to Gamma_C.
  Vector k_field(nd), tp_field(nd), cn_field = Vector::Zero(nd), ct_field = Vector::Zero(nd);
  for (int i = 0; i < nd; ++i) {
    k_field[i] = cfg.compliance_weight * loads.traction.dot(state.u.segment<2>(2 * i));
    tp_field[i] = loads.traction.dot(adjoint.segment<2>(2 * i));
  }
  const RigidFoundation* found = sys.problem().foundation;
  const bool contact = !sys.points().empty() && found;
  if (contact) {
    std::vector<char> near(mesh.num_vertices(), 0);
    for (const auto& f : mesh.facets) {
      if (f.label == BoundaryLabel::Contact) near[f.v[0]] = near[f.v[1]] = 1;
    }
    std::vector<char> done(nd, 0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      if (!near[tri[0]] && !near[tri[1]] && !near[tri[2]]) continue;
      for (int d : V.triangle_dofs(t)) {
        if (done[d]) continue;
        done[d] = 1;
        try {
          const FoundationPoint g = found->evaluate(V.dof_points()[d]);
          const Vec2 u = state.u.segment<2>(2 * d), p = adjoint.segment<2>(2 * d);
          const Vec2 tg = perp(g.normal);
          cn_field[d] = pmax(u.dot(g.normal) - g.gap) * p.dot(g.normal) / eps;
          if (sys.has_friction()) {
            const double b = sys.problem().friction.bound(V.dof_points()[d]);
            if (b > 0.0) ct_field[d] = qproj(eps * b, u.dot(tg)) * p.dot(tg) / eps;
          }
        } catch (const std::exception&) {
          // Outside the foundation band: the product is not defined there.
        }
      }
    }
  }
  const auto grad_k = recover_vertex_gradients(V, k_field);
  const auto grad_tp = recover_vertex_gradients(V, tp_field);
  std::vector<Vec2> grad_cn, grad_ct;
  if (contact) {
    grad_cn = recover_vertex_gradients(V, cn_field);
    grad_ct = recover_vertex_gradients(V, ct_field);
  }

  BoundaryDensities out;
  const LineRule& lr = gauss_line_rule(5);
  for (const auto& f : mesh.facets) {
    if (f.label == BoundaryLabel::Dirichlet) continue;
    for (size_t q = 0; q < lr.weights.size(); ++q) {
      const double s = lr.points[q];
      BoundaryDensityPoint bp;
      bp.x = mesh.facet_point(f, s);
      bp.weight = lr.weights[q] * f.length;
      bp.normal = f.normal;
      bp.label = f.label;
      try {
        bp.curvature = curvature ? curvature(bp.x) : 0.0;
      } catch (const std::exception&) {
        bp.curvature = 0.0;
        ++out.curvature_fallbacks;
      }
      const auto l = facet_barycentric(f, s);
      const PointKinematics uk = eval_vector(V, state.u, f.triangle, l);
      const PointKinematics pk = eval_vector(V, adjoint, f.triangle, l);
      auto kappa_dn = [&](const Vector& field, const std::vector<Vec2>& grad) {
        const double value = eval_scalar(V, field, f.triangle, l, nullptr);
        const Vec2 g = (1.0 - s) * grad[f.v[0]] + s * grad[f.v[1]];
        return bp.curvature * value + g.dot(f.normal);
      };
      const double j = cfg.compliance_weight * loads.body_force.dot(uk.value) + cfg.volume_weight;
      bp.A = j + (mat.stress(uk.grad).cwiseProduct(pk.grad)).sum() - loads.body_force.dot(pk.value);
      if (f.label == BoundaryLabel::Neumann) {
        bp.A += kappa_dn(k_field, grad_k);
        bp.B = -kappa_dn(tp_field, grad_tp);
      }
      if (f.label == BoundaryLabel::Contact && contact) {
        bp.C = kappa_dn(cn_field, grad_cn) + kappa_dn(ct_field, grad_ct);
      }
      out.points.push_back(bp);
    }
  }
  return out;
}

DescentResult descent_direction(const TriMesh& host, const Vector& gradient, const std::vector<Vec2>& n_ext,
                                const std::vector<char>& fixed, double reg_length) {
  const int nv = host.num_vertices();
  if (gradient.size() != 2 * nv || static_cast<int>(n_ext.size()) != nv || static_cast<int>(fixed.size()) != nv) {
    throw AssemblyError("descent direction inputs do not match the host mesh");
  }
  if (!(reg_length > 0.0)) throw DomainError("regularization length must be positive");
  const FeSpace S(host, 1);
  SparseMatrix A = reg_length * reg_length * assemble_scalar_laplace(S) + assemble_scalar_mass(S);
  Vector g(nv);
  for (int i = 0; i < nv; ++i) g[i] = gradient.segment<2>(2 * i).dot(n_ext[i]);
  const SparseMatrix A_full = A;
  apply_dirichlet(A, fixed);
  Vector rhs = -g;
  apply_dirichlet(rhs, fixed);
  DescentResult r;
  r.theta = solve_spd(A, rhs, 1e-12);
  r.dJ = g.dot(r.theta);
  r.h1_norm_sq = r.theta.dot(A_full * r.theta);
  return r;
}

}  // namespace contopt
