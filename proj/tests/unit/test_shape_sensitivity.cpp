#include <cmath>

#include "contopt/verification.hpp"
#include "doctest.h"

using namespace contopt;

namespace {

ContactSystem without_contact(const ContactSystem& sys) {
  ContactProblem p = sys.problem();
  p.model = ContactModel::None;
  return ContactSystem(p);
}

}  // namespace

TEST_CASE("objective splits into compliance and volume") {
  const auto beam = make_random_beam(21, 8, 4, 2);
  const ContactState st = beam->solve();
  const ObjectiveConfig cfg{15.0, 0.01};
  const ObjectiveParts parts = objective(beam->system(), st, cfg);
  CHECK(parts.volume == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(parts.compliance == doctest::Approx(beam->system().load().dot(st.u)).epsilon(1e-10));
  CHECK(parts.value == doctest::Approx(15.0 * parts.compliance + 0.01 * parts.volume).epsilon(1e-12));
}

TEST_CASE("volume-only adjoint vanishes") {
  const auto beam = make_random_beam(22, 8, 4, 2);
  const ContactState st = beam->solve();
  const Vector p = solve_adjoint(beam->system(), st, ObjectiveConfig{0.0, 1.0});
  CHECK(p.norm() == 0.0);
}

TEST_CASE("compliance adjoint without contact is minus the displacement") {
  const auto beam = make_random_beam(23, 8, 4, 2);
  const ContactSystem sys = without_contact(beam->system());
  const ContactState st = sys.solve(Vector());
  const Vector p = solve_adjoint(sys, st, ObjectiveConfig{1.0, 0.0});
  CHECK((p + st.u).norm() <= 1e-10 * st.u.norm());
}

TEST_CASE("volume-only derivative is the flux of the velocity") {
  const auto beam = make_random_beam(24, 8, 4, 2);
  const ContactState st = beam->solve();
  const ObjectiveConfig cfg{0.0, 0.5};
  const Vector p = Vector::Zero(st.u.size());
  // div theta = 1 + 2 = 3 everywhere on the 2 x 1 box.
  const HostVelocity theta =
      interpolate_velocity(beam->mesh(), [](const Vec2& x) { return Vec2(x.x(), 2.0 * x.y()); });
  CHECK(shape_derivative_distributed(beam->system(), st, p, cfg, theta) == doctest::Approx(3.0));
  const Vector G = distributed_gradient(beam->system(), st, p, cfg, beam->mesh());
  double via_gradient = 0.0;
  for (int i = 0; i < beam->mesh().num_vertices(); ++i) via_gradient += G.segment<2>(2 * i).dot(theta.nodal[i]);
  CHECK(via_gradient == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("boundary density of the volume term is the weight") {
  const auto beam = make_random_beam(25, 8, 4, 2);
  const ContactState st = beam->solve();
  const ObjectiveConfig cfg{0.0, 0.25};
  const BoundaryDensities d = shape_derivative_boundary(beam->system(), st, Vector::Zero(st.u.size()), cfg,
                                                        [](const Vec2&) { return 0.0; });
  REQUIRE(!d.points.empty());
  for (const auto& q : d.points) {
    CHECK(q.A == doctest::Approx(0.25));
    CHECK(q.B == 0.0);
    CHECK(q.C == 0.0);
  }
  // theta.n is 1 on the vertical sides and 0.5 on the horizontal ones; the
  // clamped side carries no density.
  const double flux = d.evaluate([](const Vec2& x) { return Vec2(x.x() - 1.0, x.y() - 0.5); });
  CHECK(flux == doctest::Approx(0.25 * (1.0 + 0.5 * 2.0 + 0.5 * 2.0)));
}

TEST_CASE("adjoint and material derivatives agree on a Tresca beam") {
  const auto beam = make_random_beam(26, 12, 6, 2);
  const ContactState st = beam->solve();
  const ObjectiveConfig cfg{15.0, 0.01};
  const Vector p = solve_adjoint(beam->system(), st, cfg);
  const VectorFieldFn field = random_smooth_field(26, 0.1);
  const HostVelocity theta = interpolate_velocity(beam->mesh(), field);
  const MaterialDerivativeResult md = solve_material_derivative(beam->system(), st, theta);
  const double a = shape_derivative_distributed(beam->system(), st, p, cfg, theta);
  const double m = shape_derivative_material(beam->system(), st, cfg, theta, md);
  CHECK(std::abs(a - m) <= 1e-8 * std::max(std::abs(a), 1e-12));
}

TEST_CASE("descent direction satisfies the descent identity") {
  const auto beam = make_random_beam(27, 12, 6, 2);
  const ContactState st = beam->solve();
  const ObjectiveConfig cfg{15.0, 0.01};
  const Vector p = solve_adjoint(beam->system(), st, cfg);
  const TriMesh& host = beam->mesh();
  const Vector G = distributed_gradient(beam->system(), st, p, cfg, host);
  std::vector<Vec2> n_ext(host.num_vertices(), Vec2(0.0, 1.0));
  std::vector<char> fixed(host.num_vertices(), 0);
  for (int i = 0; i < host.num_vertices(); ++i) fixed[i] = host.vertices[i].x() < 1e-12;
  const DescentResult d = descent_direction(host, G, n_ext, fixed, 0.2);
  CHECK(d.dJ < 0.0);
  CHECK(d.dJ == doctest::Approx(-d.h1_norm_sq).epsilon(1e-10));
  for (int i = 0; i < host.num_vertices(); ++i) {
    if (fixed[i]) CHECK(d.theta[i] == 0.0);
  }
}

TEST_CASE("boundary form tracks the distributed form on the strip") {
  const CheckReport r = check_boundary_form();
  CHECK(r.status == CheckStatus::Pass);
  CHECK(r.measured <= 0.05);
}
