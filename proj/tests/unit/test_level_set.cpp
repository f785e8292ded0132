#include <cmath>

#include "contopt/level_set.hpp"
#include "doctest.h"

using namespace contopt;

namespace {

LevelSetField circle_field(const GridSpec& g, const Vec2& c, double r, double scale = 1.0) {
  std::vector<double> v(g.size());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) v[g.index(i, j)] = scale * ((g.node(i, j) - c).norm() - r);
  }
  return LevelSetField(g, std::move(v));
}

}  // namespace

TEST_CASE("grid covering the design box") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 2.0, 1.0, 160, 80);
  CHECK(g.nx == 161);
  CHECK(g.ny == 81);
  CHECK(g.spacing == doctest::Approx(0.0125));
  CHECK((g.upper() - Vec2(2.0, 1.0)).norm() < 1e-12);
  CHECK_THROWS(GridSpec::covering(0.0, 0.0, 2.0, 1.0, 160, 60));
}

TEST_CASE("perforated box distance") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 2.0, 1.0, 80, 40);
  const ShapeDescription s = perforated_box(Vec2(0, 0), Vec2(2, 1), 2, 4, 0.1);
  REQUIRE(s.holes.size() == 8);
  for (const auto& h : s.holes) {
    CHECK(shape_distance(s, g, h.center) == doctest::Approx(h.radius));
    CHECK(shape_distance(s, g, h.center + Vec2(h.radius, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  }
  const LevelSetField phi = init_signed_distance(s, g);
  CHECK(phi.has_inside());
  CHECK(phi.has_outside());
  ShapeDescription empty;
  empty.has_box = true;
  empty.box_lower = Vec2(0.501, 0.501);
  empty.box_upper = Vec2(0.502, 0.502);
  CHECK_THROWS_AS(init_signed_distance(empty, g), DomainError);
}

TEST_CASE("signed distance keeps unit gradient near the interface") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 100, 100);
  const LevelSetField phi = circle_field(g, Vec2(0.5, 0.5), 0.3);
  const auto [lo, hi] = phi.band_gradient_range(3.0 * g.spacing);
  CHECK(lo > 0.98);
  CHECK(hi < 1.02);
}

TEST_CASE("curvature of a resolved circle") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 100, 100);
  const double r = 0.25;
  const LevelSetField phi = circle_field(g, Vec2(0.5, 0.5), r);
  for (double a : {0.1, 1.3, 2.9, 4.4}) {
    const Vec2 x = Vec2(0.5, 0.5) + r * Vec2(std::cos(a), std::sin(a));
    CHECK(phi.curvature(x) == doctest::Approx(1.0 / r).epsilon(0.05));
  }
}

TEST_CASE("zero speed leaves the field unchanged") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 40, 40);
  LevelSetField phi = circle_field(g, Vec2(0.5, 0.5), 0.3);
  const std::vector<double> before = phi.values();
  advect(phi, std::vector<double>(g.size(), 0.0), 0.1);
  CHECK(phi.values() == before);
}

TEST_CASE("unit outward speed grows a circle") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 100, 100);
  LevelSetField phi = circle_field(g, Vec2(0.5, 0.5), 0.2);
  const double T = 0.1;
  const int steps = advect(phi, std::vector<double>(g.size(), 1.0), T);
  CHECK(steps > 0);
  // The zero level now sits at radius 0.3.
  for (double a : {0.0, 0.7, 2.0, 3.5, 5.1}) {
    const Vec2 x = Vec2(0.5, 0.5) + 0.3 * Vec2(std::cos(a), std::sin(a));
    CHECK(std::abs(phi.value(x)) <= 1.5 * g.spacing);
  }
}

TEST_CASE("reinitialization restores the distance without moving the interface") {
  const GridSpec g = GridSpec::covering(0.0, 0.0, 1.0, 1.0, 80, 80);
  LevelSetField phi = circle_field(g, Vec2(0.5, 0.5), 0.3, 3.0);
  const LevelSetField before = phi;
  const ReinitReport rep = reinitialize(phi, 60);
  CHECK(rep.max_drift <= 0.25);
  CHECK(zero_level_drift(before, phi) <= 0.25);
  const auto [lo, hi] = phi.band_gradient_range(2.0 * g.spacing);
  CHECK(lo > 0.8);
  CHECK(hi < 1.2);
  CHECK(zero_level_drift(before, before) == 0.0);
}
