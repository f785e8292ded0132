#include "contopt/contact.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>

#include "contopt/projections.hpp"
#include "contopt/quadrature.hpp"

namespace contopt {

const char* to_string(ContactModel m) {
  switch (m) {
    case ContactModel::None: return "none";
    case ContactModel::Sliding: return "sliding";
    case ContactModel::Tresca: return "tresca";
  }
  return "none";
}

ContactModel contact_model_from_string(const std::string& s) {
  if (s == "none") return ContactModel::None;
  if (s == "sliding") return ContactModel::Sliding;
  if (s == "tresca") return ContactModel::Tresca;
  throw ConfigError("unknown contact model '" + s + "' (expected none, sliding or tresca)");
}

FrictionModel FrictionModel::uniform(double coefficient, double threshold) {
  if (coefficient < 0.0 || threshold < 0.0) throw DomainError("friction data must be nonnegative");
  FrictionModel f;
  f.coefficient.value = coefficient;
  f.threshold.value = threshold;
  return f;
}

ContactSystem::ContactSystem(const ContactProblem& problem) : problem_(problem) {
  if (!problem_.space) throw ConfigError("contact problem without FE space");
  const SolverConfig& c = problem_.config;
  if (!(c.epsilon > 0.0) || !(c.tolerance > 0.0)) throw DomainError("penalty and tolerance must be positive");
  const FeSpace& V = *problem_.space;
  K_ = assemble_elasticity(V, problem_.material, true);
  F_ = assemble_load(V, problem_.loads);
  apply_dirichlet(F_, V.dirichlet_mask());
  load_norm_ = F_.norm();

  if (problem_.model == ContactModel::None) return;
  if (!problem_.foundation) throw ConfigError("contact model requires a rigid foundation");
  friction_active_ = problem_.model == ContactModel::Tresca;
  const TriMesh& mesh = V.mesh();
  const LineRule& rule = gauss_line_rule(5);
  for (int fi = 0; fi < static_cast<int>(mesh.facets.size()); ++fi) {
    const BoundaryFacet& f = mesh.facets[fi];
    if (f.label != BoundaryLabel::Contact) continue;
    const auto fd = V.facet_dofs(f);
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      ContactPoint p;
      p.facet = fi;
      p.s = rule.points[q];
      p.x = mesh.facet_point(f, p.s);
      p.weight = rule.weights[q] * f.length;
      p.dofs = fd;
      facet_shape_values(V.degree(), p.s, p.N.data());
      p.geo = problem_.foundation->evaluate(p.x);
      p.tangent = perp(p.geo.normal);
      if (friction_active_) {
        p.bound = problem_.friction.bound(p.x);
        p.bound_gradient = problem_.friction.bound_gradient(p.x);
        if (p.bound < 0.0) throw DomainError("negative friction bound at a contact point");
      }
      points_.push_back(p);
    }
  }
  build_condensation();
}

void ContactSystem::build_condensation() {
  const auto& mask = space().dirichlet_mask();
  auto c = std::make_shared<Condensed>();
  c->slot.assign(F_.size(), -1);
  for (const ContactPoint& p : points_) {
    for (int a = 0; a < space().facet_dofs_count(); ++a) {
      for (int i = 0; i < 2; ++i) {
        const int r = 2 * p.dofs[a] + i;
        if (mask[r] || c->slot[r] >= 0) continue;
        c->slot[r] = static_cast<int>(c->dofs.size());
        c->dofs.push_back(r);
      }
    }
  }
  const int m = static_cast<int>(c->dofs.size());
  if (m == 0 || m > kMaxCondensed) return;
  try {
    c->K.factorize(K_);
  } catch (const SolverError&) {
    return;  // K alone is singular, e.g. a body held only by contact
  }
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(F_.size(), m);
  for (int k = 0; k < m; ++k) E(c->dofs[k], k) = 1.0;
  c->Z = c->K.solve_columns(E);
  Eigen::MatrixXd Y(m, m);
  for (int k = 0; k < m; ++k) Y.row(k) = c->Z.row(c->dofs[k]);
  Y = 0.5 * (Y + Y.transpose());
  const Eigen::LLT<Eigen::MatrixXd> llt(Y);
  if (llt.info() != Eigen::Success) return;
  c->S = llt.solve(Eigen::MatrixXd::Identity(m, m));
  c->S = 0.5 * (c->S + c->S.transpose());
  condensed_ = std::move(c);
}

Eigen::MatrixXd ContactSystem::condensed_block(const Vector& u) const {
  const Condensed& c = *condensed_;
  const int m = static_cast<int>(c.dofs.size());
  const int nf = space().facet_dofs_count();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
  for (const ContactPoint& p : points_) {
    const Mat2 P = point_block(p, u, true);
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        for (int i = 0; i < 2; ++i) {
          const int r = c.slot[2 * p.dofs[a] + i];
          if (r < 0) continue;
          for (int j = 0; j < 2; ++j) {
            const int col = c.slot[2 * p.dofs[b] + j];
            if (col >= 0) C(r, col) += p.N[a] * p.N[b] * P(i, j);
          }
        }
      }
    }
  }
  return C;
}

bool ContactSystem::step_direction(const Vector& u, const Vector& r, SpdSolver& sparse, Vector& delta) const {
  if (condensed_) {
    // With x = K^-1 b and t its contact part, the contact part w of the
    // solution satisfies (S + C) w = S t, then the solution is x - Z C w.
    // A few refinement sweeps recover the digits lost in forming S.
    const Condensed& c = *condensed_;
    const int m = static_cast<int>(c.dofs.size());
    const Eigen::MatrixXd C = condensed_block(u);
    const Eigen::LLT<Eigen::MatrixXd> llt(c.S + C);
    if (llt.info() == Eigen::Success) {
      const auto contact_part = [&](const Vector& x) {
        Vector t(m);
        for (int k = 0; k < m; ++k) t[k] = x[c.dofs[k]];
        return t;
      };
      const auto apply = [&](const Vector& rhs) {
        Vector x = c.K.solve_columns(rhs);
        x -= c.Z * (C * llt.solve(c.S * contact_part(x)));
        return x;
      };
      const Vector b = -r;
      Vector x = apply(b);
      double rel = 0.0;
      for (int sweep = 0;; ++sweep) {
        Vector res = b - K_ * x;
        const Vector Ct = C * contact_part(x);
        for (int k = 0; k < m; ++k) res[c.dofs[k]] -= Ct[k];
        rel = res.norm() / b.norm();
        if (rel <= 1e-8 || sweep == 4) break;
        x += apply(res);
      }
      // The energy line search only needs a descent direction; a few lost
      // digits on an ill-conditioned cut mesh cost nothing but speed.
      if (rel <= kInexactStep) {
        delta = std::move(x);
        return true;
      }
    }
  }
  try {
    sparse.factorize(contact_matrix(u, true));
    delta = sparse.solve(-r);
    return true;
  } catch (const SolverError&) {
    return false;
  }
}

double ContactSystem::normal_trace(const ContactPoint& p, const Vector& u) const {
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < space().facet_dofs_count(); ++a) v += p.N[a] * u.segment<2>(2 * p.dofs[a]);
  return v.dot(p.geo.normal);
}

double ContactSystem::tangential_trace(const ContactPoint& p, const Vector& u) const {
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < space().facet_dofs_count(); ++a) v += p.N[a] * u.segment<2>(2 * p.dofs[a]);
  return v.dot(p.tangent);
}

Vector ContactSystem::residual(const Vector& u) const {
  Vector R = K_ * u - F_;
  const double inv_eps = 1.0 / epsilon();
  const int nf = space().facet_dofs_count();
  for (const ContactPoint& p : points_) {
    const double rn = pmax(normal_trace(p, u) - p.geo.gap);
    double st = 0.0;
    if (friction_active_ && p.bound > 0.0) st = qproj(epsilon() * p.bound, tangential_trace(p, u));
    if (rn == 0.0 && st == 0.0) continue;
    const Vec2 force = p.weight * inv_eps * (rn * p.geo.normal + st * p.tangent);
    for (int a = 0; a < nf; ++a) R.segment<2>(2 * p.dofs[a]) += p.N[a] * force;
  }
  apply_dirichlet(R, space().dirichlet_mask());
  return R;
}

SparseMatrix ContactSystem::jacobian(const Vector& u, bool active_ties) const {
  return contact_matrix(u, active_ties);
}

Mat2 ContactSystem::point_block(const ContactPoint& p, const Vector& u, bool active_ties) const {
  const double y = normal_trace(p, u) - p.geo.gap;
  const double hn = active_ties ? (y >= 0.0 ? 1.0 : 0.0) : heaviside(y);
  double dz = 0.0;
  if (friction_active_ && p.bound > 0.0) {
    dz = ball_jacobian(epsilon() * p.bound, tangential_trace(p, u), problem_.config.tie_tolerance).d_z(0, 0);
  }
  return p.weight / epsilon() *
         (hn * p.geo.normal * p.geo.normal.transpose() + dz * p.tangent * p.tangent.transpose());
}

SparseMatrix ContactSystem::contact_matrix(const Vector& u, bool active_ties) const {
  const auto& mask = space().dirichlet_mask();
  const int nf = space().facet_dofs_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(points_.size() * 4 * nf * nf);
  for (const ContactPoint& p : points_) {
    // Zero blocks are kept so the sparsity pattern does not depend on u.
    const Mat2 P = point_block(p, u, active_ties);
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        const Mat2 blk = p.N[a] * p.N[b] * P;
        for (int i = 0; i < 2; ++i) {
          const int r = 2 * p.dofs[a] + i;
          if (mask[r]) continue;
          for (int j = 0; j < 2; ++j) {
            const int c = 2 * p.dofs[b] + j;
            if (mask[c]) continue;
            trip.emplace_back(r, c, blk(i, j));
          }
        }
      }
    }
  }
  SparseMatrix C(K_.rows(), K_.cols());
  C.setFromTriplets(trip.begin(), trip.end());
  return K_ + C;
}

double ContactSystem::energy(const Vector& u) const {
  double e = 0.5 * u.dot(K_ * u) - F_.dot(u);
  const double eps = epsilon();
  for (const ContactPoint& p : points_) {
    const double rn = pmax(normal_trace(p, u) - p.geo.gap);
    e += p.weight * rn * rn / (2.0 * eps);
    if (friction_active_ && p.bound > 0.0) {
      const double z = std::abs(tangential_trace(p, u));
      const double alpha = eps * p.bound;
      e += p.weight * (z <= alpha ? z * z / (2.0 * eps) : p.bound * z - 0.5 * eps * p.bound * p.bound);
    }
  }
  return e;
}

ContactState ContactSystem::make_state(const Vector& u) const {
  ContactState st;
  st.u = u;
  st.epsilon = epsilon();
  const double eps = epsilon();
  st.points.reserve(points_.size());
  for (const ContactPoint& p : points_) {
    ContactPointRecord r;
    r.x = p.x;
    r.weight = p.weight;
    r.facet = p.facet;
    r.gap = p.geo.gap;
    r.normal_gap = normal_trace(p, u) - p.geo.gap;
    r.u_t = tangential_trace(p, u);
    r.bound = p.bound;
    r.sigma_nn = -pmax(r.normal_gap) / eps;
    r.sigma_nt = (friction_active_ && p.bound > 0.0) ? -qproj(eps * p.bound, r.u_t) / eps : 0.0;
    const double alpha = eps * p.bound;
    r.contact = r.normal_gap >= 0.0;
    r.stick = std::abs(r.u_t) <= alpha;
    r.slide = std::abs(r.u_t) >= alpha;
    st.points.push_back(r);
  }
  return st;
}

Vector ContactSystem::solve_linearized(const Vector& u, const Vector& rhs) const {
  SpdSolver solver(1e-10);
  const SparseMatrix B = jacobian(u);
  solver.factorize(B);
  Vector b = rhs;
  apply_dirichlet(b, space().dirichlet_mask());
  return solver.solve(b);
}

bool ContactSystem::newton(Vector& u, ContactState& state, Vector& best, double& best_norm) const {
  const SolverConfig& cfg = problem_.config;
  const double scale = load_norm_ > 0.0 ? load_norm_ : 1.0;
  Vector r = residual(u);
  double rnorm = r.norm();
  state.residual_history.push_back(rnorm / scale);
  best = u;
  best_norm = rnorm;
  // A short CG tail only: on a badly conditioned matrix a long one costs
  // more than the Newton steps it would save.
  SpdSolver solver(kInexactStep, 500);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (rnorm <= cfg.tolerance * load_norm_) return true;
    Vector delta;
    if (!step_direction(u, r, solver, delta)) {
      // Singular generalized Jacobian (a body held only by contact with no
      // active point): step with the fully penalized matrix instead.
      solver.factorize(penalty_matrix());
      delta = solver.solve(-r);
    }
    ++state.newton_iterations;
    // The step minimizes the convex penalized energy along delta. Halving
    // on the residual norm stalls under a stiff penalty.
    const double omega = energy_step(u, delta, r);
    const Vector trial = u + omega * delta;
    const Vector rtrial = residual(trial);
    u = trial;
    r = rtrial;
    rnorm = r.norm();
    state.residual_history.push_back(rnorm / scale);
    if (rnorm < best_norm) {
      best_norm = rnorm;
      best = u;
    }
  }
  return rnorm <= cfg.tolerance * load_norm_;
}

ContactState ContactSystem::solve(const Vector& initial) const {
  const SolverConfig& cfg = problem_.config;
  const auto& mask = space().dirichlet_mask();
  Vector u = initial.size() == F_.size() ? initial : Vector::Zero(F_.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (mask[i]) u[i] = 0.0;
  }
  const double scale = load_norm_ > 0.0 ? load_norm_ : 1.0;
  ContactState state;
  Vector best = u;
  double best_norm = residual(u).norm();
  const auto keep_best = [&](const Vector& b, double bn) {
    if (bn < best_norm) {
      best = b;
      best_norm = bn;
    }
  };
  const auto direct = [&](Vector v) {
    Vector b;
    double bn;
    const bool done = newton(v, state, b, bn);
    keep_best(b, bn);
    if (done) u = v;
    return done;
  };
  // Each stage starts from the previous solution so only a few contact
  // points change status.
  const auto continuation = [&](Vector v) {
    for (double e = cfg.continuation_start;; e *= 0.1) {
      const bool last = e <= epsilon() * (1.0 + 1e-9);
      ContactSystem stage = *this;
      stage.problem_.config.epsilon = last ? epsilon() : e;
      Vector b;
      double bn;
      const bool done = stage.newton(v, state, b, bn);
      if (last) {
        keep_best(b, bn);
        if (done) u = v;
        return done;
      }
      if (!done) v = b;
    }
  };
  const Vector start = u;
  bool ok = false;
  if (!(cfg.continuation_start > epsilon())) {
    ok = direct(start);
  } else if (friction_active_) {
    // A direct solve at the target penalty spends most of its iterations on
    // stick/slip flips; the continuation is usually cheaper.
    ok = continuation(start) || direct(start);
  } else {
    ok = direct(start) || continuation(Vector::Zero(F_.size()));
  }
  if (!ok) {
    u = best;
    ok = picard(u, state);
  }
  if (!ok) {
    std::ostringstream os;
    os << "contact solver did not converge: best relative residual " << best_norm / scale << " after "
       << state.newton_iterations << " Newton and " << state.picard_iterations << " fixed-point iterations";
    throw ContactNonConvergence(os.str(), best, state.residual_history);
  }
  ContactState out = make_state(u);
  out.newton_iterations = state.newton_iterations;
  out.picard_iterations = state.picard_iterations;
  out.residual_history = std::move(state.residual_history);
  out.converged = true;
  return out;
}

double ContactSystem::energy_step(const Vector& u, const Vector& delta, const Vector& r0) const {
  // phi(w) = E(u + w delta) is convex with derivative R(u + w delta).delta.
  const double d0 = r0.dot(delta);
  if (!(d0 < 0.0)) return 1.0;
  double lo = 0.0, hi = 1.0, flo = d0, fhi = residual(u + delta).dot(delta);
  if (std::abs(fhi) <= 1e-12 * std::abs(d0)) return 1.0;
  // Expand when the energy still decreases at the full step, e.g. a body
  // that is free to move rigidly until it touches the foundation.
  for (int k = 0; fhi < 0.0 && k < 60; ++k) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = residual(u + hi * delta).dot(delta);
  }
  if (fhi <= 0.0) return hi;
  int side = 0;
  double w = 1.0;
  for (int it = 0; it < problem_.config.line_search_iterations; ++it) {
    w = lo - flo * (hi - lo) / (fhi - flo);
    const double fw = residual(u + w * delta).dot(delta);
    if (std::abs(fw) <= 1e-12 * std::abs(d0) || hi - lo <= 1e-14) break;
    if (fw < 0.0) {
      lo = w;
      flo = fw;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = w;
      fhi = fw;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return w;
}

SparseMatrix ContactSystem::penalty_matrix() const {
  const auto& mask = space().dirichlet_mask();
  const double inv_eps = 1.0 / epsilon();
  const int nf = space().facet_dofs_count();
  std::vector<Eigen::Triplet<double>> trip;
  for (const ContactPoint& p : points_) {
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b)
        for (int i = 0; i < 2; ++i) {
          const int rr = 2 * p.dofs[a] + i, cc = 2 * p.dofs[b] + i;
          if (mask[rr] || mask[cc]) continue;
          trip.emplace_back(rr, cc, p.weight * inv_eps * p.N[a] * p.N[b]);
        }
  }
  SparseMatrix M(K_.rows(), K_.cols());
  M.setFromTriplets(trip.begin(), trip.end());
  return K_ + M;
}

// Fixed point on the projections: the trace terms are frozen at the previous
// iterate and a penalty-mass shift keeps the linear operator SPD.
bool ContactSystem::picard(Vector& u, ContactState& state) const {
  const SolverConfig& cfg = problem_.config;
  SpdSolver solver(kInexactStep, 500);
  solver.factorize(penalty_matrix());
  for (int it = 0; it < cfg.picard_max_iterations; ++it) {
    const Vector r = residual(u);
    const double rel = r.norm() / (load_norm_ > 0.0 ? load_norm_ : 1.0);
    state.residual_history.push_back(rel);
    if (r.norm() <= cfg.tolerance * load_norm_) return true;
    u -= solver.solve(r);
    ++state.picard_iterations;
  }
  return residual(u).norm() <= cfg.tolerance * load_norm_;
}

Vector residual(const ContactSystem& sys, const Vector& u) { return sys.residual(u); }
SparseMatrix generalized_jacobian(const ContactSystem& sys, const Vector& u) { return sys.jacobian(u); }
ContactState solve_contact(const ContactSystem& sys, const Vector& initial) { return sys.solve(initial); }

BiactiveDiagnostics biactive_measure(const ContactState& state, double tol_bi, double warning_band) {
  BiactiveDiagnostics d;
  const double eps = state.epsilon > 0.0 ? state.epsilon : 1.0;
  for (const auto& p : state.points) {
    d.contact_length += p.weight;
    if (std::abs(p.normal_gap) <= tol_bi) d.contact_measure += p.weight;
    if (std::abs(p.normal_gap) / eps <= warning_band) d.near_contact_measure += p.weight;
    if (p.bound > 0.0) {
      const double dev = std::abs(std::abs(p.u_t) - eps * p.bound);
      if (dev <= tol_bi) d.stick_measure += p.weight;
      if (dev / eps <= warning_band) d.near_stick_measure += p.weight;
    }
  }
  return d;
}

}  // namespace contopt
