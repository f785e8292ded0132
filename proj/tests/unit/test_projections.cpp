#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "contopt/projections.hpp"
#include "doctest.h"

using namespace contopt;

TEST_CASE("pmax and dmax") {
  CHECK(pmax(-1.0) == 0.0);
  CHECK(pmax(0.0) == 0.0);
  CHECK(pmax(2.5) == 2.5);
  CHECK(dmax(-1.0, 5.0) == 0.0);
  CHECK(dmax(0.0, -2.0) == 0.0);
  CHECK(dmax(0.0, 3.0) == 3.0);
  CHECK(dmax(3.0, -2.0) == -2.0);
}

TEST_CASE("heaviside ties to zero") {
  CHECK(heaviside(-0.1) == 0.0);
  CHECK(heaviside(0.1) == 1.0);
  CHECK(heaviside(0.0) == 0.0);
}

TEST_CASE("qproj values") {
  CHECK(qproj(1.0, 0.3) == doctest::Approx(0.3));
  CHECK(qproj(0.5, 3.0) == doctest::Approx(0.5));
  CHECK(qproj(0.5, -3.0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(qproj(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(qproj(-1.0, 1.0), DomainError);
}

TEST_CASE("dq branches") {
  CHECK(dq(1.0, 0.2, 0.7, 4.0) == doctest::Approx(4.0));
  CHECK(dq(1.0, 2.0, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(dq(1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.0));
  // J+ moves with the radius.
  CHECK(dq(1.0, -2.0, 0.3, 5.0) == doctest::Approx(-0.3));
  // J0 with inward direction behaves like the identity.
  CHECK(dq(1.0, 1.0, 0.0, -0.5) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(dq(0.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("ball_jacobian regions") {
  auto a = ball_jacobian(1.0, 0.5, 1e-12);
  CHECK(a.region == BallRegion::JMinus);
  CHECK(a.d_z(0, 0) == 1.0);
  CHECK(a.d_alpha(0) == 0.0);
  auto b = ball_jacobian(1.0, 4.0, 1e-12);
  CHECK(b.region == BallRegion::JPlus);
  CHECK(std::abs(b.d_z(0, 0)) < 1e-15);
  CHECK(b.d_alpha(0) == doctest::Approx(1.0));
  auto c = ball_jacobian(2.0, -2.0, 1e-12);
  CHECK(c.region == BallRegion::JZero);
  CHECK(c.d_z(0, 0) == 1.0);
  CHECK_THROWS_AS(ball_jacobian(0.0, 1.0), DomainError);
}

TEST_CASE("two-dimensional tangent formulas") {
  TangentVec<2> z(3.0, 4.0), h(1.0, -2.0);
  const auto q = qproj<2>(1.0, z);
  CHECK(q.norm() == doctest::Approx(1.0));
  auto jac = ball_jacobian<2>(1.0, z);
  CHECK(jac.region == BallRegion::JPlus);
  // Eigenvalues of d_z lie in [0, alpha/|z|].
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(jac.d_z);
  CHECK(es.eigenvalues().minCoeff() > -1e-15);
  CHECK(es.eigenvalues().maxCoeff() <= doctest::Approx(0.2));
  // Directional derivative against a one-sided difference.
  const double t = 1e-7, beta = 0.3;
  const TangentVec<2> fd = (qproj<2>(1.0 + t * beta, z + t * h) - q) / t;
  CHECK((fd - dq<2>(1.0, z, beta, h)).norm() < 1e-5);
}

TEST_CASE("property: monotone, Lipschitz and bounded derivative (sampled)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0), A(0.01, 2.0);
  for (int i = 0; i < 20000; ++i) {
    const double a = U(rng), b = U(rng), alpha = A(rng), z1 = U(rng), z2 = U(rng), beta = U(rng), h = U(rng);
    CHECK((pmax(a) - pmax(b)) * (a - b) >= 0.0);
    CHECK(std::abs(pmax(a) - pmax(b)) <= std::abs(a - b) + 1e-15);
    CHECK((qproj(alpha, z1) - qproj(alpha, z2)) * (z1 - z2) >= -1e-15);
    CHECK(std::abs(qproj(alpha, z1) - qproj(alpha, z2)) <= std::abs(z1 - z2) + 1e-15);
    CHECK(std::abs(dq(alpha, z1, beta, h)) <= std::abs(beta) + std::abs(h) + 1e-15);
  }
}
