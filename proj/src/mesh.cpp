#include "contopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace contopt {

const char* to_string(BoundaryLabel label) {
  switch (label) {
    case BoundaryLabel::Dirichlet: return "dirichlet";
    case BoundaryLabel::Neumann: return "neumann";
    case BoundaryLabel::Contact: return "contact";
    case BoundaryLabel::Free: return "free";
  }
  return "free";
}

BoundaryLabel label_from_string(const std::string& s) {
  if (s == "dirichlet") return BoundaryLabel::Dirichlet;
  if (s == "neumann") return BoundaryLabel::Neumann;
  if (s == "contact") return BoundaryLabel::Contact;
  if (s == "free") return BoundaryLabel::Free;
  throw ConfigError("unknown boundary label '" + s + "'");
}

std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
  const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  const double l1 = ((x - a).x() * (c - a).y() - (x - a).y() * (c - a).x()) / det;
  const double l2 = ((b - a).x() * (x - a).y() - (b - a).y() * (x - a).x()) / det;
  return {1.0 - l1 - l2, l1, l2};
}

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
  return a;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

TriMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                   const FacetLabeler& labeler, std::vector<int> parent) {
  TriMesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  m.parent = std::move(parent);
  if (!m.parent.empty() && m.parent.size() != m.triangles.size()) {
    throw AssemblyError("parent map size does not match triangle count");
  }
  const int nv = m.num_vertices();
  for (int t = 0; t < m.num_triangles(); ++t) {
    auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) {
        throw AssemblyError("triangle " + std::to_string(t) + " references a missing vertex");
      }
    }
    double a = m.triangle_area(t);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    const double scale = (m.vertices[tri[1]] - m.vertices[tri[0]]).squaredNorm() +
                         (m.vertices[tri[2]] - m.vertices[tri[0]]).squaredNorm();
    if (!(a > 1e-14 * scale)) {
      throw AssemblyError("degenerate triangle " + std::to_string(t));
    }
  }

  std::unordered_map<std::uint64_t, int> count;
  count.reserve(3 * m.triangles.size());
  double edge_sum = 0.0;
  for (const auto& tri : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (count[edge_key(a, b)]++ == 0) edge_sum += (m.vertices[b] - m.vertices[a]).norm();
    }
  }
  m.h_mesh = count.empty() ? 0.0 : edge_sum / static_cast<double>(count.size());

  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (count[edge_key(a, b)] != 1) continue;
      BoundaryFacet f;
      f.v = {a, b};
      f.triangle = t;
      f.local_edge = k;
      const Vec2 d = m.vertices[b] - m.vertices[a];
      f.length = d.norm();
      f.normal = Vec2(d.y(), -d.x()) / f.length;
      m.facets.push_back(f);
    }
  }
  relabel(m, labeler);
  return m;
}

void relabel(TriMesh& mesh, const FacetLabeler& labeler) {
  if (!labeler) return;
  for (auto& f : mesh.facets) f.label = labeler(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]]);
}

TriMesh displaced(const TriMesh& mesh, const std::function<Vec2(const Vec2&)>& displacement) {
  std::vector<Vec2> v = mesh.vertices;
  for (auto& x : v) x += displacement(x);
  for (const auto& tri : mesh.triangles) {
    const Vec2 a = v[tri[1]] - v[tri[0]], b = v[tri[2]] - v[tri[0]];
    if (a.x() * b.y() - a.y() * b.x() <= 0.0) throw AssemblyError("displacement inverts a triangle");
  }
  TriMesh out = build_mesh(std::move(v), mesh.triangles, nullptr, mesh.parent);
  if (out.facets.size() != mesh.facets.size()) throw AssemblyError("displacement changed the boundary");
  for (size_t i = 0; i < out.facets.size(); ++i) {
    if (out.facets[i].v != mesh.facets[i].v) throw AssemblyError("displacement changed the boundary");
    out.facets[i].label = mesh.facets[i].label;
  }
  return out;
}

TriMesh rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) {
    throw DomainError("rectangle mesh needs positive extent and cell counts");
  }
  std::vector<Vec2> v;
  v.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      v.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  return build_mesh(std::move(v), std::move(tris), nullptr);
}

double triangle_quality(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += (mesh.vertices[tri[(k + 1) % 3]] - mesh.vertices[tri[k]]).squaredNorm();
  return 4.0 * std::sqrt(3.0) * mesh.triangle_area(t) / s;
}

void write_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write mesh file " + path);
  out.precision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.facets.size() << '\n';
  for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& f : mesh.facets) out << f.v[0] << ' ' << f.v[1] << ' ' << to_string(f.label) << '\n';
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path);
  int nv = 0, nt = 0, nf = 0;
  if (!(in >> nv >> nt >> nf) || nv < 3 || nt < 1 || nf < 0) {
    throw ConfigError("malformed mesh header in " + path);
  }
  std::vector<Vec2> v(nv);
  for (auto& p : v) {
    if (!(in >> p.x() >> p.y())) throw ConfigError("truncated vertex block in " + path);
  }
  std::vector<std::array<int, 3>> t(nt);
  for (auto& tri : t) {
    if (!(in >> tri[0] >> tri[1] >> tri[2])) throw ConfigError("truncated triangle block in " + path);
  }
  std::unordered_map<std::uint64_t, BoundaryLabel> labels;
  for (int i = 0; i < nf; ++i) {
    int a, b;
    std::string name;
    if (!(in >> a >> b >> name)) throw ConfigError("truncated facet block in " + path);
    labels[edge_key(a, b)] = label_from_string(name);
  }
  TriMesh m = build_mesh(std::move(v), std::move(t), nullptr);
  for (auto& f : m.facets) {
    auto it = labels.find(edge_key(f.v[0], f.v[1]));
    if (it == labels.end()) {
      throw ConfigError("boundary facet " + std::to_string(f.v[0]) + "-" + std::to_string(f.v[1]) +
                        " has no label in " + path);
    }
    f.label = it->second;
  }
  return m;
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  lo_ = Vec2::Constant(std::numeric_limits<double>::max());
  hi_ = Vec2::Constant(std::numeric_limits<double>::lowest());
  for (const auto& p : mesh.vertices) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  const int nt = std::max(1, mesh.num_triangles());
  const int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nt) / 2.0)));
  const Vec2 ext = (hi_ - lo_).cwiseMax(1e-300);
  const double aspect = ext.x() / ext.y();
  nbx_ = std::max(1, static_cast<int>(n * std::sqrt(aspect)));
  nby_ = std::max(1, static_cast<int>(n / std::sqrt(aspect)));
  bins_.assign(static_cast<size_t>(nbx_) * nby_, {});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 a = mesh.vertices[mesh.triangles[t][0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      b = b.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / ext.x() * nbx_), 0, nbx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / ext.x() * nbx_), 0, nbx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / ext.y() * nby_), 0, nby_ - 1);
    const int j1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / ext.y() * nby_), 0, nby_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins_[static_cast<size_t>(j) * nbx_ + i].push_back(t);
  }
}

int PointLocator::locate(const Vec2& x, std::array<double, 3>* bary) const {
  const Vec2 ext = (hi_ - lo_).cwiseMax(1e-300);
  const double tol = 1e-10;
  if (x.x() < lo_.x() - tol * ext.x() || x.x() > hi_.x() + tol * ext.x() ||
      x.y() < lo_.y() - tol * ext.y() || x.y() > hi_.y() + tol * ext.y()) {
    return -1;
  }
  const int i = std::clamp(static_cast<int>((x.x() - lo_.x()) / ext.x() * nbx_), 0, nbx_ - 1);
  const int j = std::clamp(static_cast<int>((x.y() - lo_.y()) / ext.y() * nby_), 0, nby_ - 1);
  int best = -1;
  double best_min = -std::numeric_limits<double>::max();
  std::array<double, 3> best_l{};
  for (int t : bins_[static_cast<size_t>(j) * nbx_ + i]) {
    const auto& tri = mesh_->triangles[t];
    const auto l = barycentric(mesh_->vertices[tri[0]], mesh_->vertices[tri[1]], mesh_->vertices[tri[2]], x);
    const double mn = std::min({l[0], l[1], l[2]});
    if (mn > best_min) {
      best_min = mn;
      best = t;
      best_l = l;
    }
  }
  if (best < 0 || best_min < -1e-9) return -1;
  if (bary) *bary = best_l;
  return best;
}

NearestPoint::NearestPoint(const std::vector<Vec2>& points) : pts_(&points) {
  if (points.empty()) throw DomainError("nearest-point search over an empty set");
  lo_ = points[0];
  Vec2 hi = points[0];
  for (const auto& p : points) {
    lo_ = lo_.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 ext = (hi - lo_).cwiseMax(1e-12);
  cell_ = std::max(std::sqrt(ext.x() * ext.y() / static_cast<double>(points.size())) * 2.0, 1e-12);
  nbx_ = static_cast<int>(ext.x() / cell_) + 1;
  nby_ = static_cast<int>(ext.y() / cell_) + 1;
  bins_.assign(static_cast<size_t>(nbx_) * nby_, {});
  for (int k = 0; k < static_cast<int>(points.size()); ++k) {
    const int i = std::clamp(static_cast<int>((points[k].x() - lo_.x()) / cell_), 0, nbx_ - 1);
    const int j = std::clamp(static_cast<int>((points[k].y() - lo_.y()) / cell_), 0, nby_ - 1);
    bins_[static_cast<size_t>(j) * nbx_ + i].push_back(k);
  }
}

int NearestPoint::nearest(const Vec2& x) const {
  const int ci = std::clamp(static_cast<int>(std::floor((x.x() - lo_.x()) / cell_)), 0, nbx_ - 1);
  const int cj = std::clamp(static_cast<int>(std::floor((x.y() - lo_.y()) / cell_)), 0, nby_ - 1);
  int best = -1;
  double best_d = std::numeric_limits<double>::max();
  const int rmax = std::max(nbx_, nby_);
  for (int r = 0; r <= rmax; ++r) {
    for (int j = cj - r; j <= cj + r; ++j) {
      if (j < 0 || j >= nby_) continue;
      for (int i = ci - r; i <= ci + r; ++i) {
        if (i < 0 || i >= nbx_) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
        for (int k : bins_[static_cast<size_t>(j) * nbx_ + i]) {
          const double d = ((*pts_)[k] - x).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = k;
          }
        }
      }
    }
    // Every unvisited bin is at least r cells away from x's bin.
    if (best >= 0 && std::sqrt(best_d) <= r * cell_) break;
  }
  return best;
}

}  // namespace contopt
