#include "contopt/verification.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "contopt/level_set.hpp"
#include "contopt/projections.hpp"

namespace contopt {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Warning: return "warning";
  }
  return "fail";
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void write_checks_csv(const std::vector<CheckReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  out << "name,measured,target,tolerance,status,runtime_s,detail\n";
  for (const auto& r : reports) {
    out << r.name << ',' << r.measured << ',' << r.target << ',' << r.tolerance << ',' << to_string(r.status) << ','
        << r.runtime << ',' << csv_quote(r.detail) << '\n';
  }
}

ContactSetup::ContactSetup(TriMesh mesh, int degree, std::array<bool, 2> clamp, const MaterialModel& mat,
                           const LoadData& loads, std::unique_ptr<RigidFoundation> foundation,
                           const FrictionModel& friction, ContactModel model, const SolverConfig& solver)
    : mesh_(std::make_unique<TriMesh>(std::move(mesh))),
      space_(std::make_unique<FeSpace>(*mesh_, degree, clamp)),
      foundation_(std::move(foundation)) {
  ContactProblem p;
  p.space = space_.get();
  p.material = mat;
  p.loads = loads;
  p.foundation = foundation_.get();
  p.friction = friction;
  p.model = model;
  p.config = solver;
  system_ = std::make_unique<ContactSystem>(p);
}

std::unique_ptr<ContactSetup> make_pressed_strip(const StripOptions& opt, const VectorFieldFn& warp, double t) {
  const double L = opt.length, H = opt.height;
  TriMesh mesh = rectangle_mesh(0.0, 0.0, L, H, opt.nx, opt.ny);
  const double tol = 1e-9 * (L + H);
  relabel(mesh, [&](const Vec2& a, const Vec2& b) {
    if (std::abs(a.y()) < tol && std::abs(b.y()) < tol) return BoundaryLabel::Contact;
    if (std::abs(a.y() - H) < tol && std::abs(b.y() - H) < tol) return BoundaryLabel::Neumann;
    return BoundaryLabel::Dirichlet;
  });
  if (warp && t != 0.0) mesh = displaced(mesh, [&](const Vec2& x) -> Vec2 { return t * warp(x); });
  LoadData loads;
  loads.traction = Vec2(0.0, -opt.pressure);
  return std::make_unique<ContactSetup>(
      std::move(mesh), opt.degree, std::array<bool, 2>{true, false},
      MaterialModel::from_engineering(opt.youngs, opt.poisson), loads,
      std::make_unique<RigidFoundation>(RigidFoundation::half_plane(Vec2::Zero(), Vec2(0.0, 1.0))),
      FrictionModel::uniform(opt.friction, opt.threshold), opt.model, opt.solver);
}

std::unique_ptr<ContactSetup> make_random_beam(std::uint64_t seed, int nx, int ny, int degree) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  TriMesh mesh = rectangle_mesh(0.0, 0.0, 2.0, 1.0, nx, ny);
  relabel(mesh, [](const Vec2& a, const Vec2& b) {
    if (a.x() < 1e-12 && b.x() < 1e-12) return BoundaryLabel::Dirichlet;
    if (a.y() < 1e-12 && b.y() < 1e-12) return BoundaryLabel::Contact;
    const Vec2 m = 0.5 * (a + b);
    if (a.x() > 2.0 - 1e-12 && b.x() > 2.0 - 1e-12 && m.y() > 0.4 && m.y() < 0.6) return BoundaryLabel::Neumann;
    return BoundaryLabel::Free;
  });
  LoadData loads;
  loads.traction = Vec2(-0.02 + 0.04 * U(rng), -0.05 + 0.045 * U(rng));
  loads.body_force = Vec2(0.0, -0.002 * U(rng));
  const double friction = 0.05 + 0.45 * U(rng);
  const double threshold = 0.002 + 0.018 * U(rng);
  return std::make_unique<ContactSetup>(std::move(mesh), degree, std::array<bool, 2>{true, true},
                                        MaterialModel::from_engineering(1.0, 0.3), loads,
                                        std::make_unique<RigidFoundation>(RigidFoundation::disk(Vec2(1.0, -8.0), 8.0)),
                                        FrictionModel::uniform(friction, threshold), ContactModel::Tresca,
                                        SolverConfig{});
}

VectorFieldFn random_smooth_field(std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct Mode {
    Vec2 k, a;
    double phase;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < 4; ++m) {
    modes.push_back({Vec2(3.0 * U(rng), 3.0 * U(rng)), Vec2(U(rng), U(rng)), std::numbers::pi * U(rng)});
  }
  return [modes, amplitude](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    for (const auto& m : modes) v += m.a * std::sin(m.k.dot(x) + m.phase);
    return Vec2(amplitude * v / static_cast<double>(modes.size()));
  };
}

ProjectionLawResult projection_law_battery(long samples, std::uint64_t seed) {
  ProjectionLawResult r;
  r.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-3.0, 3.0), A(0.01, 2.0);
  auto fail = [&](const std::string& what) {
    if (r.violations++ == 0) r.witness = what;
  };
  constexpr double kRound = 1e-14;
  constexpr double kStep = 1e-8;
  constexpr double kFdTol = 1e-5;
  constexpr double kKink = 1e-3;  // distance kept from the nonsmooth sets
  for (long i = 0; i < samples; ++i) {
    const double a = U(rng), b = U(rng), al1 = A(rng), al2 = A(rng);
    const double z1 = U(rng), z2 = U(rng), beta = U(rng), h = U(rng);
    const TangentVec<2> w1(U(rng), U(rng)), w2(U(rng), U(rng)), hv(U(rng), U(rng));
    if ((pmax(a) - pmax(b)) * (a - b) < 0.0) fail("pmax monotonicity at " + fmt(a) + "," + fmt(b));
    if (std::abs(pmax(a) - pmax(b)) > std::abs(a - b) + kRound) fail("pmax Lipschitz at " + fmt(a) + "," + fmt(b));
    if ((qproj(al1, z1) - qproj(al1, z2)) * (z1 - z2) < -kRound) fail("q monotonicity at z=" + fmt(z1));
    if (std::abs(qproj(al1, z1) - qproj(al2, z2)) > std::abs(al1 - al2) + std::abs(z1 - z2) + kRound) {
      fail("q Lipschitz at alpha=" + fmt(al1) + " z=" + fmt(z1));
    }
    if ((qproj<2>(al1, w1) - qproj<2>(al1, w2)).dot(w1 - w2) < -kRound) fail("vector q monotonicity");
    if ((qproj<2>(al1, w1) - qproj<2>(al1, w2)).norm() > (w1 - w2).norm() + kRound) fail("vector q Lipschitz");
    if (std::abs(dq(al1, z1, beta, h)) > std::abs(beta) + std::abs(h) + kRound) {
      fail("dq bound at alpha=" + fmt(al1) + " z=" + fmt(z1));
    }
    if (dq<2>(al1, w1, beta, hv).norm() > std::abs(beta) + hv.norm() + kRound) fail("vector dq bound");
    if (std::abs(a) > kKink) {
      ++r.fd_checks;
      const double fd = (pmax(a + kStep * h) - pmax(a)) / kStep;
      if (std::abs(fd - dmax(a, h)) > kFdTol) fail("dmax FD at " + fmt(a));
    }
    if (std::abs(std::abs(z1) - al1) > kKink) {
      ++r.fd_checks;
      const double fd = (qproj(al1 + kStep * beta, z1 + kStep * h) - qproj(al1, z1)) / kStep;
      if (std::abs(fd - dq(al1, z1, beta, h)) > kFdTol) fail("dq FD at alpha=" + fmt(al1) + " z=" + fmt(z1));
    }
    if (std::abs(w1.norm() - al1) > kKink) {
      ++r.fd_checks;
      const TangentVec<2> fd = (qproj<2>(al1 + kStep * beta, w1 + kStep * hv) - qproj<2>(al1, w1)) / kStep;
      if ((fd - dq<2>(al1, w1, beta, hv)).norm() > kFdTol) fail("vector dq FD");
    }
  }
  return r;
}

CheckReport check_projection_laws(long samples, std::uint64_t seed) {
  Stopwatch sw;
  CheckReport r;
  r.name = "projection_laws";
  r.target = 0.0;
  r.tolerance = 0.0;
  if (samples <= 0) throw ConfigError("projection battery needs a positive sample count");
  const auto res = projection_law_battery(samples, seed);
  r.measured = static_cast<double>(res.violations);
  r.status = res.violations == 0 ? CheckStatus::Pass : CheckStatus::Fail;
  r.detail = std::to_string(res.samples) + " samples, " + std::to_string(res.fd_checks) + " FD comparisons";
  if (!res.witness.empty()) r.detail += "; first violation: " + res.witness;
  r.runtime = sw.seconds();
  return r;
}

namespace {

double max_penetration(const ContactState& s) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : s.points) m = std::max(m, p.normal_gap);
  return m;
}

}  // namespace

std::vector<CheckReport> check_penetration_scaling(const StripOptions& base) {
  Stopwatch sw;
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> lx, ly;
  double worst = 0.0;
  std::string detail;
  bool solved = true;
  for (double e : eps) {
    StripOptions opt = base;
    opt.solver.epsilon = e;
    try {
      const auto setup = make_pressed_strip(opt);
      const ContactState s = setup->solve();
      const double d = max_penetration(s);
      detail += "eps=" + fmt(e) + " delta=" + fmt(d) + "; ";
      if (!(d > 0.0)) {
        solved = false;
        continue;
      }
      lx.push_back(std::log(e));
      ly.push_back(std::log(d));
      worst = std::max(worst, std::abs(d / (e * opt.pressure) - 1.0));
    } catch (const std::exception& ex) {
      solved = false;
      detail += "eps=" + fmt(e) + " failed: " + ex.what() + "; ";
    }
  }
  CheckReport slope;
  slope.name = "penetration_scaling_slope";
  slope.target = 1.0;
  slope.tolerance = 0.1;
  if (solved && lx.size() == eps.size()) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    slope.measured = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    slope.status = std::abs(slope.measured - 1.0) <= slope.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  } else {
    slope.measured = std::numeric_limits<double>::quiet_NaN();
    slope.status = CheckStatus::Fail;
  }
  slope.detail = detail;
  CheckReport oracle = slope;
  oracle.name = "penetration_force_balance";
  oracle.target = 0.0;
  oracle.tolerance = 0.05;
  oracle.measured = solved ? worst : std::numeric_limits<double>::quiet_NaN();
  oracle.status = solved && worst <= oracle.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  oracle.detail = "max |delta/(eps p) - 1|; " + detail;
  slope.runtime = oracle.runtime = sw.seconds();
  return {slope, oracle};
}

CheckReport check_sign_conditions(int states, std::uint64_t seed) {
  Stopwatch sw;
  CheckReport r;
  r.name = "contact_sign_conditions";
  r.target = 0.0;
  r.tolerance = 1e-10;
  double worst = 0.0;
  int failures = 0, points = 0;
  std::string detail;
  for (int i = 0; i < states; ++i) {
    try {
      const auto setup = make_random_beam(seed + i);
      const ContactState s = setup->solve();
      if (!s.converged) ++failures;
      for (const auto& p : s.points) {
        ++points;
        worst = std::max(worst, p.sigma_nn);
        worst = std::max(worst, std::abs(p.sigma_nt) - p.bound);
      }
    } catch (const std::exception& ex) {
      ++failures;
      if (detail.empty()) detail = std::string("state ") + std::to_string(i) + ": " + ex.what();
    }
  }
  r.measured = worst;
  r.status = failures == 0 && worst <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  r.detail = std::to_string(states) + " states, " + std::to_string(points) + " points, " + std::to_string(failures) +
             " solver failures; measured = max(sigma_nn, |sigma_nt| - Fs)" + (detail.empty() ? "" : "; " + detail);
  r.runtime = sw.seconds();
  return r;
}

CheckReport check_jacobian_structure(int states, std::uint64_t seed) {
  Stopwatch sw;
  CheckReport r;
  r.name = "jacobian_symmetric_pd";
  r.target = 0.0;
  r.tolerance = 1e-12;
  double worst = 0.0;
  int failures = 0;
  std::string detail;
  for (int i = 0; i < states; ++i) {
    try {
      const auto setup = make_random_beam(seed + 1000 + i);
      const ContactState s = setup->solve();
      const SparseMatrix B = setup->system().jacobian(s.u);
      const SparseMatrix Bt = B.transpose();
      const SparseMatrix D = B - Bt;
      double dmax_abs = 0.0, bmax = 0.0;
      for (int k = 0; k < D.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(D, k); it; ++it) dmax_abs = std::max(dmax_abs, std::abs(it.value()));
      }
      for (int k = 0; k < B.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(B, k); it; ++it) bmax = std::max(bmax, std::abs(it.value()));
      }
      worst = std::max(worst, dmax_abs / bmax);
      SpdSolver chol;
      chol.factorize(B);
    } catch (const std::exception& ex) {
      ++failures;
      if (detail.empty()) detail = std::string("state ") + std::to_string(i) + ": " + ex.what();
    }
  }
  r.measured = worst;
  r.status = failures == 0 && worst <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  r.detail = std::to_string(states) + " states, " + std::to_string(failures) +
             " failures (solve or Cholesky); measured = max |B - B^T| / max |B|" + (detail.empty() ? "" : "; " + detail);
  r.runtime = sw.seconds();
  return r;
}

CheckReport check_adjoint_vs_material(int fields, std::uint64_t seed) {
  Stopwatch sw;
  CheckReport r;
  r.name = "adjoint_vs_material_derivative";
  r.target = 0.0;
  r.tolerance = 1e-8;
  const ObjectiveConfig cfg{15.0, 0.01};
  double worst = 0.0;
  std::string detail;
  try {
    const auto setup = make_random_beam(seed);
    const ContactSystem& sys = setup->system();
    const ContactState s = setup->solve();
    const Vector p = solve_adjoint(sys, s, cfg);
    for (int i = 0; i < fields; ++i) {
      const HostVelocity theta = interpolate_velocity(setup->mesh(), random_smooth_field(seed + 17 * i + 1));
      const double d_dist = shape_derivative_distributed(sys, s, p, cfg, theta);
      const auto md = solve_material_derivative(sys, s, theta);
      const double d_mat = shape_derivative_material(sys, s, cfg, theta, md);
      const double rel = std::abs(d_dist - d_mat) / std::max(std::abs(d_dist), 1e-300);
      worst = std::max(worst, rel);
      detail += fmt(d_dist) + " vs " + fmt(d_mat) + "; ";
    }
    r.measured = worst;
    r.status = worst <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  } catch (const std::exception& ex) {
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.status = CheckStatus::Fail;
    detail += ex.what();
  }
  r.detail = detail;
  r.runtime = sw.seconds();
  return r;
}

std::vector<CheckReport> check_gradient_fd(const StripOptions& base) {
  const double L = base.length, H = base.height;
  const double pi = std::numbers::pi;
  struct Field {
    const char* name;
    VectorFieldFn theta;
  };
  const std::vector<Field> fields = {
      {"normal_bump", [=](const Vec2& x) { return Vec2(0.0, std::sin(pi * x.x() / L) * x.y() / H); }},
      {"lateral_bulge", [=](const Vec2& x) { return Vec2(x.x() / L * (1.0 + 0.5 * std::sin(pi * x.y() / H)), 0.0); }},
      {"translation_like", [=](const Vec2& x) { return Vec2(0.0, 1.0 + 0.5 * (x.y() / H) * (x.y() / H)); }},
  };
  const ObjectiveConfig cfg{1.0, 0.0};
  const std::vector<double> steps = {1e-2, 1e-3, 1e-4};
  constexpr double kNoiseFloor = 1e-6;
  std::vector<CheckReport> out;
  for (const auto& f : fields) {
    Stopwatch sw;
    CheckReport r;
    r.name = std::string("gradient_fd_") + f.name;
    r.target = 0.0;
    r.tolerance = 0.02;
    try {
      const auto base_setup = make_pressed_strip(base);
      const ContactSystem& sys = base_setup->system();
      const ContactState s = base_setup->solve();
      const auto diag = biactive_measure(s, base.solver.tie_tolerance, base.solver.warning_band);
      if (diag.warning_band_hit()) {
        r.status = CheckStatus::Skipped;
        r.detail = "near-biactive band hit";
        r.measured = std::numeric_limits<double>::quiet_NaN();
        r.runtime = sw.seconds();
        out.push_back(r);
        continue;
      }
      const double J0 = objective(sys, s, cfg).value;
      const Vector p = solve_adjoint(sys, s, cfg);
      const double dJ = shape_derivative_distributed(sys, s, p, cfg, interpolate_velocity(base_setup->mesh(), f.theta));
      std::vector<double> errs;
      std::string detail = "dJ=" + fmt(dJ);
      for (double t : steps) {
        const auto moved = make_pressed_strip(base, f.theta, t);
        const ContactState st = moved->solve();
        const double Jt = objective(moved->system(), st, cfg).value;
        const double e = std::abs(dJ - (Jt - J0) / t) / std::abs(dJ);
        errs.push_back(e);
        detail += "; t=" + fmt(t) + " err=" + fmt(e);
      }
      const double slope = std::log(errs.front() / errs.back()) / std::log(steps.front() / steps.back());
      const bool at_floor = *std::max_element(errs.begin(), errs.end()) <= kNoiseFloor;
      detail += "; slope=" + fmt(slope) + (at_floor ? " (noise floor)" : "");
      r.measured = errs[1];
      r.status = errs[1] <= r.tolerance && (slope >= 0.9 || at_floor) ? CheckStatus::Pass : CheckStatus::Fail;
      r.detail = detail;
    } catch (const std::exception& ex) {
      r.measured = std::numeric_limits<double>::quiet_NaN();
      r.status = CheckStatus::Fail;
      r.detail = ex.what();
    }
    r.runtime = sw.seconds();
    out.push_back(r);
  }
  return out;
}

CheckReport check_boundary_form(const StripOptions& base) {
  Stopwatch sw;
  CheckReport r;
  r.name = "boundary_vs_distributed_form";
  r.target = 0.0;
  r.tolerance = 0.05;
  const double L = base.length, H = base.height;
  const VectorFieldFn theta = [=](const Vec2& x) {
    return Vec2(0.0, std::sin(std::numbers::pi * x.x() / L) * x.y() / H);
  };
  try {
    const auto setup = make_pressed_strip(base);
    const ContactSystem& sys = setup->system();
    const ContactState s = setup->solve();
    const ObjectiveConfig cfg{1.0, 0.0};
    const Vector p = solve_adjoint(sys, s, cfg);
    const double distributed =
        shape_derivative_distributed(sys, s, p, cfg, interpolate_velocity(setup->mesh(), theta));
    // Straight sides: zero curvature everywhere.
    const BoundaryDensities d = shape_derivative_boundary(sys, s, p, cfg, [](const Vec2&) { return 0.0; });
    const double boundary = d.evaluate(theta);
    r.measured = std::abs(boundary - distributed) / std::abs(distributed);
    r.status = r.measured <= r.tolerance ? CheckStatus::Pass : CheckStatus::Warning;
    r.detail = "distributed=" + fmt(distributed) + " boundary=" + fmt(boundary);
  } catch (const std::exception& ex) {
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.status = CheckStatus::Fail;
    r.detail = ex.what();
  }
  r.runtime = sw.seconds();
  return r;
}

namespace {

// Distances from c of the zero crossings along grid edges.
std::vector<double> crossing_radii(const LevelSetField& phi, const Vec2& c) {
  const GridSpec& g = phi.grid();
  std::vector<double> r;
  auto edge = [&](int i0, int j0, int i1, int j1) {
    const double a = phi.at(i0, j0), b = phi.at(i1, j1);
    if ((a < 0.0) == (b < 0.0)) return;
    const double s = a / (a - b);
    r.push_back(((1 - s) * g.node(i0, j0) + s * g.node(i1, j1) - c).norm());
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) edge(i, j, i + 1, j);
      if (j + 1 < g.ny) edge(i, j, i, j + 1);
    }
  }
  return r;
}

LevelSetField circle_field(const GridSpec& g, const Vec2& c, double r, double scale = 1.0) {
  std::vector<double> v(g.size());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) v[g.index(i, j)] = scale * ((g.node(i, j) - c).norm() - r);
  }
  return LevelSetField(g, std::move(v));
}

}  // namespace

CheckReport check_levelset_advection() {
  Stopwatch sw;
  CheckReport r;
  r.name = "levelset_advection";
  r.target = 0.0;
  r.tolerance = 1.5;  // grid cells
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 80, 80);
  const Vec2 c(0.5, 0.5);
  const double r0 = 0.25, T = 20 * 0.5 * g.spacing;
  double worst = 0.0;
  std::string detail;
  for (double speed : {1.0, -1.0}) {
    LevelSetField phi = circle_field(g, c, r0);
    const int steps = advect(phi, std::vector<double>(g.size(), speed), T);
    const double expected = r0 + speed * T;
    for (double rad : crossing_radii(phi, c)) worst = std::max(worst, std::abs(rad - expected) / g.spacing);
    detail += "speed " + fmt(speed) + ": " + std::to_string(steps) + " steps; ";
  }
  r.measured = worst;
  r.status = worst <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  r.detail = detail + "measured = max radius error in cells";
  r.runtime = sw.seconds();
  return r;
}

CheckReport check_levelset_curvature() {
  Stopwatch sw;
  CheckReport r;
  r.name = "levelset_curvature";
  r.target = 0.0;
  r.tolerance = 0.05;
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 80, 80);
  const Vec2 c(0.5, 0.5);
  const double rad = 0.2;
  const LevelSetField phi = circle_field(g, c, rad);
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 64.0;
    const double kappa = phi.curvature(c + rad * Vec2(std::cos(a), std::sin(a)));
    worst = std::max(worst, std::abs(kappa * rad - 1.0));
  }
  r.measured = worst;
  r.status = worst <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  r.detail = "radius 0.2 = 16 cells; measured = max |kappa r - 1| over 64 points";
  r.runtime = sw.seconds();
  return r;
}

CheckReport check_reinitialization_drift() {
  Stopwatch sw;
  CheckReport r;
  r.name = "reinitialization_drift";
  r.target = 0.0;
  r.tolerance = 0.25;  // grid cells
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 80, 80);
  const Vec2 c(0.5, 0.5);
  LevelSetField phi = circle_field(g, c, 0.25);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 x = g.node(i, j);
      phi.values()[g.index(i, j)] *= 3.0 + std::sin(7.0 * x.x()) * std::cos(5.0 * x.y());
    }
  }
  try {
    const ReinitReport rep = reinitialize(phi, 40, std::numeric_limits<double>::infinity());
    const auto [lo, hi] = phi.band_gradient_range(5.0 * g.spacing);
    r.measured = rep.max_drift;
    const bool band_ok = lo >= 0.9 && hi <= 1.1;
    r.status = rep.max_drift <= r.tolerance && band_ok ? CheckStatus::Pass : CheckStatus::Fail;
    r.detail = "band |grad phi| in [" + fmt(lo) + ", " + fmt(hi) + "], required [0.9, 1.1]";
  } catch (const std::exception& ex) {
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.status = CheckStatus::Fail;
    r.detail = ex.what();
  }
  r.runtime = sw.seconds();
  return r;
}

std::vector<CheckReport> run_verification_battery(std::uint64_t seed) {
  std::vector<CheckReport> all;
  all.push_back(check_projection_laws(100000, seed));
  for (auto& r : check_penetration_scaling()) all.push_back(r);
  all.push_back(check_sign_conditions(20, seed));
  all.push_back(check_jacobian_structure(20, seed));
  all.push_back(check_adjoint_vs_material(5, seed));
  for (auto& r : check_gradient_fd()) all.push_back(r);
  all.push_back(check_boundary_form());
  all.push_back(check_levelset_advection());
  all.push_back(check_levelset_curvature());
  all.push_back(check_reinitialization_drift());
  return all;
}

}  // namespace contopt
