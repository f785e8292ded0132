#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "contopt/rigid_foundation.hpp"
#include "doctest.h"

using namespace contopt;

TEST_CASE("disk gap values") {
  const auto d = RigidFoundation::disk(Vec2(1, -8), 8);
  CHECK(d.gap(Vec2(1, 0)) == doctest::Approx(0.0));
  CHECK(d.gap(Vec2(1, 0.5)) == doctest::Approx(0.5));
  CHECK(d.gap(Vec2(0, 0)) == doctest::Approx(0.062257748).epsilon(1e-8));
}

TEST_CASE("disk gap against brute-force distance to the circle") {
  const auto d = RigidFoundation::disk(Vec2(1, -8), 8);
  const Vec2 x(0, 0);
  double best = 1e300;
  for (int k = 0; k < 200000; ++k) {
    const double t = 2 * M_PI * k / 200000.0;
    best = std::min(best, (x - Vec2(1 + 8 * std::cos(t), -8 + 8 * std::sin(t))).norm());
  }
  CHECK(d.gap(x) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("inward normals") {
  const auto d = RigidFoundation::disk(Vec2(1, -8), 8);
  const Vec2 n0 = d.inward_normal(Vec2(1, 0));
  CHECK(n0.x() == doctest::Approx(0.0));
  CHECK(n0.y() == doctest::Approx(-1.0));
  const Vec2 n1 = d.inward_normal(Vec2(0, 0));
  CHECK(n1.x() == doctest::Approx(0.12403).epsilon(1e-4));
  CHECK(n1.y() == doctest::Approx(-0.99228).epsilon(1e-4));
  CHECK_THROWS_AS(d.inward_normal(Vec2(1, -8)), DomainError);
  const auto h = RigidFoundation::half_plane(Vec2(0, 0), Vec2(0, 1));
  const Vec2 n2 = h.inward_normal(Vec2(3.7, 0.2));
  CHECK(n2.x() == doctest::Approx(0.0));
  CHECK(n2.y() == doctest::Approx(-1.0));
}

TEST_CASE("property: finite differences, unit gradient, inward decrease") {
  const auto d = RigidFoundation::disk(Vec2(1, -8), 8);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> X(-1.0, 3.0), Y(-0.3, 0.3);
  const double step = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 x(X(rng), Y(rng));
    const auto p = d.evaluate(x);
    Vec2 fd;
    for (int k = 0; k < 2; ++k) {
      Vec2 a = x, b = x;
      a(k) += step;
      b(k) -= step;
      fd(k) = (d.gap(a) - d.gap(b)) / (2 * step);
    }
    CHECK((fd - p.grad_gap).norm() <= 1e-6);
    CHECK(std::abs(p.grad_gap.norm() - 1.0) <= 1e-10);
    CHECK(d.gap(x + 1e-4 * p.normal) < d.gap(x));
    // Normal gradient against differences of the normal.
    Mat2 dn;
    for (int k = 0; k < 2; ++k) {
      Vec2 a = x, b = x;
      a(k) += step;
      b(k) -= step;
      dn.col(k) = (d.inward_normal(a) - d.inward_normal(b)) / (2 * step);
    }
    CHECK((dn - p.grad_normal).norm() <= 1e-6);
  }
}

TEST_CASE("sampled SDF reproduces a half-plane and enforces its band") {
  const std::string path = "sdf_halfplane_test.txt";
  {
    std::ofstream out(path);
    out << "5 4 0 -0.3 0.5 0.2\n";
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 5; ++i) out << (-0.3 + 0.2 * j) << ' ';
  }
  const auto f = RigidFoundation::sampled(read_sdf_grid(path), 0.25);
  CHECK(f.gap(Vec2(1.1, 0.1)) == doctest::Approx(0.1));
  const auto p = f.evaluate(Vec2(0.7, -0.05));
  CHECK(p.normal.y() == doctest::Approx(-1.0));
  CHECK(p.grad_normal.norm() < 1e-8);
  CHECK_THROWS_AS(f.gap(Vec2(1.0, 0.28)), EvaluationBandError);
  CHECK_THROWS_AS(f.gap(Vec2(5.0, 0.0)), EvaluationBandError);
  const auto g = RigidFoundation::sampled(read_sdf_grid(path), 0.25, true);
  CHECK(g.gap(Vec2(1.1, 0.1)) == doctest::Approx(-0.1));
  std::remove(path.c_str());
}
