#include <cmath>
#include <random>

#include "contopt/elasticity.hpp"
#include "contopt/linear_solver.hpp"
#include "contopt/quadrature.hpp"
#include "doctest.h"

using namespace contopt;

TEST_CASE("Lame coefficients") {
  auto [l1, m1] = lame_from_engineering(1.0, 0.3);
  CHECK(l1 == doctest::Approx(0.576923).epsilon(1e-6));
  CHECK(m1 == doctest::Approx(0.384615).epsilon(1e-6));
  auto [l2, m2] = lame_from_engineering(1.0, 0.0);
  CHECK(l2 == 0.0);
  CHECK(m2 == doctest::Approx(0.5));
  auto [l3, m3] = lame_from_engineering(210.0, 0.3);
  CHECK(l3 == doctest::Approx(121.153846).epsilon(1e-8));
  CHECK(m3 == doctest::Approx(80.769231).epsilon(1e-8));
  CHECK_THROWS_AS(lame_from_engineering(0.0, 0.3), DomainError);
  CHECK_THROWS_AS(lame_from_engineering(1.0, 0.5), DomainError);
}

TEST_CASE("quadrature integrates monomials exactly") {
  // Reference triangle (0,0),(1,0),(0,1): int x^a y^b = a! b! / (a+b+2)!
  auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  for (int deg : {1, 2, 4, 5}) {
    const auto& r = triangle_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double s = 0.0;
        for (size_t q = 0; q < r.weights.size(); ++q) {
          const double x = r.points[q][1], y = r.points[q][2];
          s += 0.5 * r.weights[q] * std::pow(x, a) * std::pow(y, b);
        }
        CHECK(s == doctest::Approx(exact(a, b)).epsilon(1e-13));
      }
    }
  }
  for (int n = 1; n <= 5; ++n) {
    const auto& r = gauss_line_rule(n);
    for (int a = 0; a <= 2 * n - 1; ++a) {
      double s = 0.0;
      for (size_t q = 0; q < r.weights.size(); ++q) s += r.weights[q] * std::pow(r.points[q], a);
      CHECK(s == doctest::Approx(1.0 / (a + 1)).epsilon(1e-13));
    }
  }
}

namespace {

TriMesh unit_right_triangle() {
  return build_mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {{0, 1, 2}}, nullptr);
}

TriMesh perturbed_mesh(int n, unsigned seed) {
  TriMesh m = rectangle_mesh(0, 0, 1, 1, n, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.2 / n, 0.2 / n);
  std::vector<Vec2> v = m.vertices;
  for (auto& p : v) {
    if (p.x() > 1e-12 && p.x() < 1 - 1e-12 && p.y() > 1e-12 && p.y() < 1 - 1e-12) p += Vec2(U(rng), U(rng));
  }
  return build_mesh(v, m.triangles, nullptr);
}

Vector interpolate(const FeSpace& V, const std::function<Vec2(const Vec2&)>& f) {
  Vector u(2 * V.num_dofs());
  for (int i = 0; i < V.num_dofs(); ++i) u.segment<2>(2 * i) = f(V.dof_points()[i]);
  return u;
}

}  // namespace

TEST_CASE("rigid motions lie in the stiffness kernel") {
  const auto mat = MaterialModel::from_engineering(1.0, 0.3);
  {
    const TriMesh m = unit_right_triangle();
    const FeSpace V(m, 1);
    const SparseMatrix K = assemble_elasticity(V, mat, false);
    CHECK((K * interpolate(V, [](const Vec2&) { return Vec2(1, 0); })).norm() < 1e-14);
    CHECK((K * interpolate(V, [](const Vec2& x) { return Vec2(-x.y(), x.x()); })).norm() < 1e-14);
  }
  for (int deg : {1, 2}) {
    const TriMesh m = perturbed_mesh(5, 3);
    const FeSpace V(m, deg);
    const SparseMatrix K = assemble_elasticity(V, mat, false);
    const double kmax = Eigen::MatrixXd(K).cwiseAbs().maxCoeff();
    for (auto f : {std::function<Vec2(const Vec2&)>([](const Vec2&) { return Vec2(1, 0); }),
                   std::function<Vec2(const Vec2&)>([](const Vec2&) { return Vec2(0, 1); }),
                   std::function<Vec2(const Vec2&)>([](const Vec2& x) { return Vec2(-x.y(), x.x()); })}) {
      const Vector v = interpolate(V, f);
      CHECK((K * v).norm() <= 1e-10 * kmax * v.norm());
    }
    const SparseMatrix Kt = K.transpose();
    CHECK(Eigen::MatrixXd(K - Kt).cwiseAbs().maxCoeff() <= 1e-14 * kmax);
  }
}

TEST_CASE("patch test energy for uniaxial strain") {
  const auto mat = MaterialModel::from_engineering(1.0, 0.3);
  const TriMesh m = rectangle_mesh(0, 0, 1, 1, 1, 1);
  for (int deg : {1, 2}) {
    const FeSpace V(m, deg);
    const SparseMatrix K = assemble_elasticity(V, mat, false);
    const Vector v = interpolate(V, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    CHECK(0.5 * v.dot(K * v) == doctest::Approx(0.673077).epsilon(1e-6));
  }
  CHECK_THROWS_AS(build_mesh({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}, {{0, 1, 2}}, nullptr), AssemblyError);
}

TEST_CASE("load assembly") {
  TriMesh m = rectangle_mesh(0, 0, 0.8, 0.4, 1, 1);
  relabel(m, [](const Vec2& a, const Vec2& b) {
    return (a.y() > 0.39 && b.y() > 0.39) ? BoundaryLabel::Neumann : BoundaryLabel::Free;
  });
  for (int deg : {1, 2}) {
    const FeSpace V(m, deg);
    LoadData loads;
    loads.traction = Vec2(0, -0.01);
    const Vector F = assemble_load(V, loads);
    const Vector v = interpolate(V, [](const Vec2&) { return Vec2(0, 1); });
    CHECK(F.dot(v) == doctest::Approx(-0.008));
    CHECK(assemble_load(V, LoadData{}).norm() == 0.0);
  }
  const TriMesh sq = rectangle_mesh(0, 0, 1, 1, 3, 3);
  const FeSpace V(sq, 2);
  LoadData body;
  body.body_force = Vec2(0, -1);
  const Vector v = interpolate(V, [](const Vec2&) { return Vec2(0, 1); });
  CHECK(assemble_load(V, body).dot(v) == doctest::Approx(-1.0));
}

TEST_CASE("solve_spd") {
  SparseMatrix I(2, 2);
  I.setIdentity();
  Vector F(2);
  F << 1, 2;
  CHECK((solve_spd(I, F) - F).norm() < 1e-15);
  SparseMatrix D(2, 2);
  D.insert(0, 0) = 2;
  D.insert(1, 1) = 4;
  F << 2, 4;
  const Vector x = solve_spd(D, F);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(42);
  std::normal_distribution<double> N;
  Eigen::MatrixXd A(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) A(i, j) = N(rng);
  const Eigen::MatrixXd S = A * A.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
  const SparseMatrix Ssp = S.sparseView();
  Vector b(50);
  for (int i = 0; i < 50; ++i) b[i] = N(rng);
  CHECK((Ssp * solve_spd(Ssp, b) - b).norm() < 1e-10 * b.norm());

  SparseMatrix neg(2, 2);
  neg.insert(0, 0) = 1;
  neg.insert(1, 1) = -1;
  CHECK_THROWS_AS(solve_spd(neg, F), SolverError);
}

TEST_CASE("Dirichlet mask covers exactly the clamped facets") {
  TriMesh m = rectangle_mesh(0, 0, 2, 1, 4, 2);
  relabel(m, [](const Vec2& a, const Vec2& b) {
    return (a.x() < 1e-12 && b.x() < 1e-12) ? BoundaryLabel::Dirichlet : BoundaryLabel::Free;
  });
  const FeSpace V(m, 2);
  CHECK(V.num_dofs() == 15 + 30);  // vertices + edges
  int count = 0;
  for (int i = 0; i < V.num_dofs(); ++i) {
    const bool on = V.dof_points()[i].x() < 1e-12;
    CHECK(static_cast<bool>(V.dirichlet_mask()[2 * i]) == on);
    count += on;
  }
  CHECK(count == 5);
  const FeSpace roller(m, 1, {true, false});
  CHECK(roller.dirichlet_mask()[0] == 1);
  CHECK(roller.dirichlet_mask()[1] == 0);
}

TEST_CASE("mesh text round trip") {
  TriMesh m = rectangle_mesh(0, 0, 1, 1, 2, 2);
  relabel(m, [](const Vec2& a, const Vec2&) { return a.y() < 1e-12 ? BoundaryLabel::Contact : BoundaryLabel::Free; });
  write_mesh(m, "mesh_roundtrip.txt");
  const TriMesh r = read_mesh("mesh_roundtrip.txt");
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.num_triangles() == m.num_triangles());
  REQUIRE(r.facets.size() == m.facets.size());
  for (size_t i = 0; i < r.facets.size(); ++i) CHECK(r.facets[i].label == m.facets[i].label);
  std::remove("mesh_roundtrip.txt");
}

namespace {

// Manufactured u = (x^2, xy): the body force is uniform, -(5 mu + 3 lambda, 0).
double manufactured_error(int deg, int n) {
  const auto mat = MaterialModel::from_engineering(1.0, 0.3);
  const TriMesh m = rectangle_mesh(0, 0, 1, 1, n, n);
  const FeSpace V(m, deg);
  const SparseMatrix K = assemble_elasticity(V, mat, false);
  LoadData loads;
  loads.body_force = Vec2(-(5 * mat.mu + 3 * mat.lambda), 0.0);
  Vector F = assemble_load(V, loads);
  auto exact = [](const Vec2& x) { return Vec2(x.x() * x.x(), x.x() * x.y()); };
  const int N = 2 * V.num_dofs();
  std::vector<char> fixed(N, 0);
  Vector ub = Vector::Zero(N);
  for (int i = 0; i < V.num_dofs(); ++i) {
    const Vec2& p = V.dof_points()[i];
    if (p.x() < 1e-12 || p.x() > 1 - 1e-12 || p.y() < 1e-12 || p.y() > 1 - 1e-12) {
      fixed[2 * i] = fixed[2 * i + 1] = 1;
      ub.segment<2>(2 * i) = exact(p);
    }
  }
  Vector rhs = F - K * ub;
  SparseMatrix A = K;
  apply_dirichlet(A, fixed);
  apply_dirichlet(rhs, fixed);
  const Vector u = solve_spd(A, rhs) + ub;
  const auto& rule = triangle_rule(5);
  double err = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double area = m.triangle_area(t);
    const auto& tri = m.triangles[t];
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] + l[2] * m.vertices[tri[2]];
      err += rule.weights[q] * area * (eval_vector(V, u, t, l).value - exact(x)).squaredNorm();
    }
  }
  return std::sqrt(err);
}

}  // namespace

TEST_CASE("manufactured solution convergence") {
  const double e4 = manufactured_error(1, 4), e8 = manufactured_error(1, 8), e16 = manufactured_error(1, 16);
  CHECK(std::log2(e4 / e8) > 1.8);
  CHECK(std::log2(e8 / e16) > 1.9);
  // Quadratic fields are reproduced exactly by P2.
  CHECK(manufactured_error(2, 4) < 1e-12);
}
