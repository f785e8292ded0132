#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "contopt/elasticity.hpp"
#include "contopt/linear_solver.hpp"
#include "contopt/rigid_foundation.hpp"

namespace contopt {

enum class ContactModel { None, Sliding, Tresca };

const char* to_string(ContactModel m);
ContactModel contact_model_from_string(const std::string& s);

// value + gradient . (x - origin)
struct AffineField {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Vec2 origin = Vec2::Zero();
  double at(const Vec2& x) const { return value + gradient.dot(x - origin); }
};

struct FrictionModel {
  AffineField coefficient;  // friction coefficient
  AffineField threshold;    // Tresca threshold s

  static FrictionModel uniform(double coefficient, double threshold);
  // Product of coefficient and threshold, and its gradient.
  double bound(const Vec2& x) const { return coefficient.at(x) * threshold.at(x); }
  Vec2 bound_gradient(const Vec2& x) const {
    return coefficient.at(x) * threshold.gradient + threshold.at(x) * coefficient.gradient;
  }
};

struct SolverConfig {
  double epsilon = 1e-6;
  double tolerance = 1e-10;   // relative residual
  int max_iterations = 200;  // per penalty stage
  int line_search_iterations = 60;  // exact energy line search along the Newton step
  double tie_tolerance = 1e-12;
  double warning_band = 1e-6;  // on the stress scale, see biactive_measure
  int picard_max_iterations = 2000;
  // Frictional solves, and frictionless ones whose direct solve fails, run
  // a sequence of penalties from this value down to epsilon, a factor 10 at
  // a time; no continuation when <= epsilon.
  double continuation_start = 1e-2;
};

struct ContactProblem {
  const FeSpace* space = nullptr;
  MaterialModel material;
  LoadData loads;
  const RigidFoundation* foundation = nullptr;  // required unless model is None
  FrictionModel friction;
  ContactModel model = ContactModel::Tresca;
  SolverConfig config;
};

// Precomputed data at one quadrature point of a Contact facet.
struct ContactPoint {
  int facet = -1;
  double s = 0.0;  // facet parameter
  Vec2 x = Vec2::Zero();
  double weight = 0.0;
  std::array<int, 3> dofs{};
  std::array<double, 3> N{};
  FoundationPoint geo;
  Vec2 tangent = Vec2::Zero();  // perp(normal)
  double bound = 0.0;           // friction coefficient times threshold
  Vec2 bound_gradient = Vec2::Zero();
};

struct ContactPointRecord {
  Vec2 x = Vec2::Zero();
  double weight = 0.0;
  int facet = -1;
  double gap = 0.0;
  double normal_gap = 0.0;  // u_n - g_n
  double u_t = 0.0;
  double sigma_nn = 0.0;
  double sigma_nt = 0.0;
  double bound = 0.0;
  bool contact = false;
  bool stick = false;
  bool slide = false;
};

struct ContactState {
  Vector u;
  std::vector<ContactPointRecord> points;
  int newton_iterations = 0;
  int picard_iterations = 0;
  std::vector<double> residual_history;  // relative residuals
  bool converged = false;
  double epsilon = 0.0;
};

struct BiactiveDiagnostics {
  double contact_measure = 0.0;  // |I0|
  double stick_measure = 0.0;    // |J0|
  double near_contact_measure = 0.0;
  double near_stick_measure = 0.0;
  double contact_length = 0.0;  // |Gamma_C|
  double contact_fraction() const { return contact_length > 0 ? contact_measure / contact_length : 0.0; }
  double stick_fraction() const { return contact_length > 0 ? stick_measure / contact_length : 0.0; }
  bool warning_band_hit() const { return near_contact_measure > 0.0 || near_stick_measure > 0.0; }
};

struct ContactNonConvergence : SolverError {
  ContactNonConvergence(const std::string& msg, Vector best, std::vector<double> history)
      : SolverError(msg), best_iterate(std::move(best)), residual_history(std::move(history)) {}
  Vector best_iterate;
  std::vector<double> residual_history;
};

// Assembled penalized contact problem on one mesh.
class ContactSystem {
 public:
  explicit ContactSystem(const ContactProblem& problem);

  const ContactProblem& problem() const { return problem_; }
  const FeSpace& space() const { return *problem_.space; }
  const SparseMatrix& stiffness() const { return K_; }  // Dirichlet-eliminated
  const Vector& load() const { return F_; }             // Dirichlet rows zeroed
  const std::vector<ContactPoint>& points() const { return points_; }
  bool has_friction() const { return friction_active_; }
  double epsilon() const { return problem_.config.epsilon; }

  Vector residual(const Vector& u) const;
  // active_ties counts points with u_n = g_n exactly as in contact; any
  // element of the generalized derivative serves the Newton iteration, but
  // the shape-derivative form uses the default.
  SparseMatrix jacobian(const Vector& u, bool active_ties = false) const;
  double energy(const Vector& u) const;
  // Normal and tangential traces of u at a contact point.
  double normal_trace(const ContactPoint& p, const Vector& u) const;
  double tangential_trace(const ContactPoint& p, const Vector& u) const;

  ContactState solve(const Vector& initial) const;
  ContactState make_state(const Vector& u) const;
  // Solve with the Jacobian at u (Dirichlet rows of rhs are ignored).
  Vector solve_linearized(const Vector& u, const Vector& rhs) const;

 private:
  bool newton(Vector& u, ContactState& state, Vector& best, double& best_norm) const;
  bool picard(Vector& u, ContactState& state) const;
  // K plus the penalty mass on every contact point, normal and tangential.
  SparseMatrix penalty_matrix() const;
  double energy_step(const Vector& u, const Vector& delta, const Vector& r0) const;
  Mat2 point_block(const ContactPoint& p, const Vector& u, bool active_ties) const;
  SparseMatrix contact_matrix(const Vector& u, bool active_ties) const;

  // K is factored once; each Newton matrix differs from it only on the
  // contact unknowns, so steps reduce to a dense system of that size.
  static constexpr int kMaxCondensed = 3000;
  // Relative residual accepted for a Newton direction.
  static constexpr double kInexactStep = 1e-6;
  struct Condensed {
    SpdSolver K{1e-10};
    std::vector<int> dofs;
    std::vector<int> slot;  // unknown -> position in dofs, or -1
    Eigen::MatrixXd Z;      // K^-1 restricted to the contact columns
    Eigen::MatrixXd S;      // K condensed onto the contact unknowns
  };
  void build_condensation();
  // Contact part of the Newton matrix on the condensed unknowns.
  Eigen::MatrixXd condensed_block(const Vector& u) const;
  // Newton step; false when no factorization succeeds.
  bool step_direction(const Vector& u, const Vector& r, SpdSolver& sparse, Vector& delta) const;

  ContactProblem problem_;
  SparseMatrix K_;
  Vector F_;
  double load_norm_ = 0.0;
  std::vector<ContactPoint> points_;
  bool friction_active_ = false;
  std::shared_ptr<const Condensed> condensed_;
};

Vector residual(const ContactSystem& sys, const Vector& u);
SparseMatrix generalized_jacobian(const ContactSystem& sys, const Vector& u);
ContactState solve_contact(const ContactSystem& sys, const Vector& initial);
// Exact-tie measures use tol_bi on u_n - g_n and |u_t| - eps*bound; the
// warning band compares the same quantities divided by epsilon (stress units)
// against config.warning_band.
BiactiveDiagnostics biactive_measure(const ContactState& state, double tol_bi, double warning_band);

}  // namespace contopt
