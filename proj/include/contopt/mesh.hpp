#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "contopt/types.hpp"

namespace contopt {

enum class BoundaryLabel { Dirichlet, Neumann, Contact, Free };

const char* to_string(BoundaryLabel label);
BoundaryLabel label_from_string(const std::string& s);

struct BoundaryFacet {
  std::array<int, 2> v{};  // oriented so the owning triangle lies to the left
  BoundaryLabel label = BoundaryLabel::Free;
  int triangle = -1;
  int local_edge = -1;  // edge k joins local vertices k and k+1
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
};

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryFacet> facets;
  // Host triangle of each triangle in the mesh it was cut from; empty means
  // the mesh is its own host.
  std::vector<int> parent;
  double h_mesh = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double total_area() const;
  int host_triangle(int t) const { return parent.empty() ? t : parent[t]; }
  Vec2 facet_point(const BoundaryFacet& f, double s) const {
    return (1.0 - s) * vertices[f.v[0]] + s * vertices[f.v[1]];
  }
};

using FacetLabeler = std::function<BoundaryLabel(const Vec2& a, const Vec2& b)>;

// Orients triangles, extracts boundary facets and labels them. Throws
// AssemblyError on a degenerate triangle.
TriMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                   const FacetLabeler& labeler, std::vector<int> parent = {});

void relabel(TriMesh& mesh, const FacetLabeler& labeler);

// Moves every vertex x to x + displacement(x), keeping connectivity, labels
// and the parent map. Throws AssemblyError if a triangle inverts.
TriMesh displaced(const TriMesh& mesh, const std::function<Vec2(const Vec2&)>& displacement);

// nx by ny cells on [x0,x1]x[y0,y1], two triangles per cell with alternating
// diagonals. All facets Free.
TriMesh rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

// Quality 4*sqrt(3)*area / sum of squared edge lengths; 1 for equilateral.
double triangle_quality(const TriMesh& mesh, int t);

// Text format:
//   line 1: nv nt nf
//   nv lines: x y
//   nt lines: a b c          (0-based vertex indices)
//   nf lines: a b label      (label: dirichlet|neumann|contact|free)
void write_mesh(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh(const std::string& path);

// Uniform-bin search structure over the triangles of a mesh.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);
  // Returns the triangle containing x (with tolerance) or -1. Barycentric
  // coordinates are written to bary when found.
  int locate(const Vec2& x, std::array<double, 3>* bary = nullptr) const;

 private:
  const TriMesh* mesh_;
  Vec2 lo_, hi_;
  int nbx_ = 1, nby_ = 1;
  std::vector<std::vector<int>> bins_;
};

// Nearest point queries over a fixed point cloud.
class NearestPoint {
 public:
  explicit NearestPoint(const std::vector<Vec2>& points);
  int nearest(const Vec2& x) const;

 private:
  const std::vector<Vec2>* pts_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nbx_ = 1, nby_ = 1;
  std::vector<std::vector<int>> bins_;
};

std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x);

}  // namespace contopt
