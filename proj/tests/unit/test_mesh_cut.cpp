#include <cmath>
#include <numbers>

#include "contopt/mesh_cut.hpp"
#include "doctest.h"

using namespace contopt;

namespace {

const TriMesh& host() {
  static const TriMesh m = rectangle_mesh(0.0, 0.0, 2.0, 1.0, 50, 25);
  return m;
}

std::vector<double> sample(const std::function<double(const Vec2&)>& f) {
  std::vector<double> v;
  for (const auto& x : host().vertices) v.push_back(f(x));
  return v;
}

double labelled_length(const TriMesh& m, BoundaryLabel l) {
  double s = 0.0;
  for (const auto& f : m.facets) {
    if (f.label == l) s += f.length;
  }
  return s;
}

}  // namespace

TEST_CASE("full box is the background mesh") {
  const CutMesh c = cut_mesh(host(), sample([](const Vec2&) { return -1.0; }), BoundaryLayout{});
  CHECK(c.mesh.num_triangles() == host().num_triangles());
  CHECK(c.mesh.total_area() == doctest::Approx(2.0));
  for (const auto& o : c.origin) CHECK(o.vertex >= 0);
  CHECK(labelled_length(c.mesh, BoundaryLabel::Dirichlet) == doctest::Approx(1.0));
  CHECK(labelled_length(c.mesh, BoundaryLabel::Neumann) == doctest::Approx(0.2));
  CHECK(c.min_quality > 0.5);
}

TEST_CASE("straight cut is exact for a linear level set") {
  const CutMesh c = cut_mesh(host(), sample([](const Vec2& x) { return x.x() - 1.01; }), BoundaryLayout{});
  CHECK(c.mesh.total_area() == doctest::Approx(1.01).epsilon(1e-12));
  const CutMesh on_nodes = cut_mesh(host(), sample([](const Vec2& x) { return x.x() - 1.0; }), BoundaryLayout{});
  CHECK(on_nodes.mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("circular hole area converges to the exact one") {
  const double r = 0.2;
  const CutMesh c = cut_mesh(host(), sample([&](const Vec2& x) { return r - (x - Vec2(1.0, 0.5)).norm(); }),
                             BoundaryLayout{});
  const double exact = 2.0 - std::numbers::pi * r * r;
  CHECK(std::abs(c.mesh.total_area() - exact) <= 1e-3 * exact);
  double free_len = labelled_length(c.mesh, BoundaryLabel::Free);
  // Outer free sides: top, bottom and the right side minus the load segment.
  free_len -= 2.0 + 2.0 + 0.8;
  CHECK(free_len == doctest::Approx(2.0 * std::numbers::pi * r).epsilon(5e-3));
}

TEST_CASE("contact candidates are the facets close to the foundation") {
  const RigidFoundation disk = RigidFoundation::disk(Vec2(1.0, -8.0), 8.0);
  BoundaryLayout layout;
  layout.foundation = &disk;
  layout.contact_distance = 0.1;
  const CutMesh c = cut_mesh(host(), sample([](const Vec2&) { return -1.0; }), layout);
  for (const auto& f : c.mesh.facets) {
    if (f.label != BoundaryLabel::Contact) continue;
    const Vec2 a = c.mesh.vertices[f.v[0]], b = c.mesh.vertices[f.v[1]];
    CHECK(std::max(disk.gap(a), disk.gap(b)) <= 0.1);
  }
  CHECK(labelled_length(c.mesh, BoundaryLabel::Contact) > 0.5);
}

TEST_CASE("empty or unsupported shapes are inadmissible") {
  CHECK_THROWS_AS(cut_mesh(host(), sample([](const Vec2&) { return 1.0; }), BoundaryLayout{}), InadmissibleShape);
  CHECK_THROWS_AS(cut_mesh(host(), sample([](const Vec2& x) { return 0.5 - x.x(); }), BoundaryLayout{}),
                  InadmissibleShape);
}

TEST_CASE("detached material is rejected or dropped") {
  // Strip at the clamped side plus a disk floating near the middle.
  const auto phi = sample([](const Vec2& x) {
    return std::min(x.x() - 0.5, (x - Vec2(1.2, 0.5)).norm() - 0.2);
  });
  CHECK_THROWS_AS(cut_mesh(host(), phi, BoundaryLayout{}), InadmissibleShape);
  BoundaryLayout drop;
  drop.drop_detached = true;
  const CutMesh c = cut_mesh(host(), phi, drop);
  CHECK(c.mesh.total_area() == doctest::Approx(0.5).epsilon(1e-12));

  // The loaded side cut off from the clamp can never be dropped.
  const auto loaded = sample([](const Vec2& x) { return std::min(x.x() - 0.5, 1.6 - x.x()); });
  CHECK_THROWS_AS(cut_mesh(host(), loaded, drop), InadmissibleShape);
}

TEST_CASE("a pinch thinner than the link length does not connect") {
  // Two lobes meeting at the host vertex (1, 0.52); eta sets how far that
  // vertex lies inside, hence the length of the edges joining the lobes.
  const auto hourglass = [](double eta) {
    return sample([eta](const Vec2& x) { return 2.0 * std::abs(x.y() - 0.52) - std::abs(x.x() - 1.0) - eta; });
  };
  BoundaryLayout layout;
  layout.min_link_length = 0.005;
  CHECK_NOTHROW(cut_mesh(host(), hourglass(0.03), layout));
  CHECK_THROWS_AS(cut_mesh(host(), hourglass(0.004), layout), InadmissibleShape);
  layout.min_link_length = 0.0;
  CHECK_NOTHROW(cut_mesh(host(), hourglass(0.004), layout));
}

TEST_CASE("cutting is deterministic") {
  const auto phi = sample([](const Vec2& x) { return 0.13 - (x - Vec2(0.77, 0.41)).norm(); });
  const CutMesh a = cut_mesh(host(), phi, BoundaryLayout{});
  const CutMesh b = cut_mesh(host(), phi, BoundaryLayout{});
  REQUIRE(a.mesh.num_vertices() == b.mesh.num_vertices());
  REQUIRE(a.mesh.num_triangles() == b.mesh.num_triangles());
  for (int i = 0; i < a.mesh.num_vertices(); ++i) CHECK(a.mesh.vertices[i] == b.mesh.vertices[i]);
  CHECK(a.mesh.triangles == b.mesh.triangles);
}
