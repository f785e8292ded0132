#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contopt/contact.hpp"
#include "contopt/shape_sensitivity.hpp"

namespace contopt {

// Warning: reported, never a failure.
enum class CheckStatus { Pass, Fail, Skipped, Warning };
const char* to_string(CheckStatus s);

struct CheckReport {
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Fail;
  double runtime = 0.0;  // seconds
  std::string detail;
  bool passed() const { return status == CheckStatus::Pass; }
};

void write_checks_csv(const std::vector<CheckReport>& reports, const std::string& path);

using VectorFieldFn = std::function<Vec2(const Vec2&)>;

// A rectangular strip [0,L]x[0,H] resting on the half-plane y <= 0 and
// pressed by a uniform traction (0,-p) on its top side. The lateral sides
// are rollers (u_x = 0), so the exact solution is uniform compression with
// penetration eps*p.
struct StripOptions {
  double length = 1.0;
  double height = 0.2;
  int nx = 10;
  int ny = 2;
  int degree = 2;
  double pressure = 0.01;
  double youngs = 1.0;
  double poisson = 0.3;
  ContactModel model = ContactModel::Sliding;
  double friction = 0.0;
  double threshold = 0.0;
  SolverConfig solver;
};

// Owns every object a ContactSystem points to. Optionally the strip is
// displaced by t * warp(x) before assembly.
class ContactSetup {
 public:
  ContactSetup(TriMesh mesh, int degree, std::array<bool, 2> clamp, const MaterialModel& mat, const LoadData& loads,
               std::unique_ptr<RigidFoundation> foundation, const FrictionModel& friction, ContactModel model,
               const SolverConfig& solver);
  const TriMesh& mesh() const { return *mesh_; }
  const FeSpace& space() const { return *space_; }
  const ContactSystem& system() const { return *system_; }
  ContactState solve() const { return system_->solve(Vector()); }

 private:
  std::unique_ptr<TriMesh> mesh_;
  std::unique_ptr<FeSpace> space_;
  std::unique_ptr<RigidFoundation> foundation_;
  std::unique_ptr<ContactSystem> system_;
};

std::unique_ptr<ContactSetup> make_pressed_strip(const StripOptions& opt, const VectorFieldFn& warp = {},
                                                 double t = 0.0);

// Box [0,2]x[0,1] clamped at x = 0, lying above the disk of radius 8 centred
// at (1,-8) with the bottom side as contact candidate and a traction on the
// right side segment y in [0.4, 0.6]. Loads and friction are drawn from rng.
std::unique_ptr<ContactSetup> make_random_beam(std::uint64_t seed, int nx = 16, int ny = 8, int degree = 2);

// Random smooth velocity field built from a few Fourier modes.
VectorFieldFn random_smooth_field(std::uint64_t seed, double amplitude = 0.1);

// Fraction of sampled projection-law violations; witness describes the first.
struct ProjectionLawResult {
  long samples = 0;
  long violations = 0;
  long fd_checks = 0;
  std::string witness;
};
ProjectionLawResult projection_law_battery(long samples, std::uint64_t seed);

CheckReport check_projection_laws(long samples = 100000, std::uint64_t seed = 42);
// Slope report and force-balance report.
std::vector<CheckReport> check_penetration_scaling(const StripOptions& opt = {});
CheckReport check_sign_conditions(int states = 20, std::uint64_t seed = 42);
CheckReport check_jacobian_structure(int states = 20, std::uint64_t seed = 42);
CheckReport check_adjoint_vs_material(int fields = 5, std::uint64_t seed = 42);
// One report per velocity field.
std::vector<CheckReport> check_gradient_fd(const StripOptions& opt = {});
// Boundary density form against the distributed form on the strip; the two
// only agree up to discretization, so a gap above 5% is a warning.
CheckReport check_boundary_form(const StripOptions& opt = {});
CheckReport check_levelset_advection();
CheckReport check_levelset_curvature();
CheckReport check_reinitialization_drift();

std::vector<CheckReport> run_verification_battery(std::uint64_t seed = 42);

}  // namespace contopt
