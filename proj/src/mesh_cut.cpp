#include "contopt/mesh_cut.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace contopt {

namespace {

double side_tolerance(const BoundaryLayout& l) { return 1e-9 * (l.upper - l.lower).norm(); }

}  // namespace

bool BoundaryLayout::on_dirichlet_side(const Vec2& a, const Vec2& b) const {
  const double tol = side_tolerance(*this);
  return std::abs(a.x() - lower.x()) < tol && std::abs(b.x() - lower.x()) < tol;
}

bool BoundaryLayout::on_neumann_segment(const Vec2& a, const Vec2& b) const {
  const double tol = side_tolerance(*this);
  if (std::abs(a.x() - upper.x()) >= tol || std::abs(b.x() - upper.x()) >= tol) return false;
  const double y = 0.5 * (a.y() + b.y());
  return y > neumann_y0 && y < neumann_y1;
}

BoundaryLabel BoundaryLayout::label(const Vec2& a, const Vec2& b) const {
  if (on_dirichlet_side(a, b)) return BoundaryLabel::Dirichlet;
  if (on_neumann_segment(a, b)) return BoundaryLabel::Neumann;
  if (foundation) {
    try {
      const Vec2 m = 0.5 * (a + b);
      if (std::max({foundation->gap(a), foundation->gap(b), foundation->gap(m)}) <= contact_distance) {
        return BoundaryLabel::Contact;
      }
    } catch (const EvaluationBandError&) {
      // Outside the sampled foundation: not a candidate.
    }
  }
  return BoundaryLabel::Free;
}

CutMesh cut_mesh(const TriMesh& background, const std::vector<double>& phi_in, const BoundaryLayout& layout) {
  const int nv = background.num_vertices();
  if (static_cast<int>(phi_in.size()) != nv) throw DomainError("level-set samples do not match the background mesh");

  // Snap: a vertex whose value makes some incident cut land within the snap
  // fraction of it is moved onto the interface.
  std::vector<double> phi = phi_in;
  for (const auto& tri : background.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      const double pa = phi_in[a], pb = phi_in[b];
      if ((pa < 0.0) == (pb < 0.0) || pa == 0.0 || pb == 0.0) continue;
      const double s = pa / (pa - pb);
      if (s < kSnapFraction) phi[a] = 0.0;
      if (s > 1.0 - kSnapFraction) phi[b] = 0.0;
    }
  }

  CutMesh out;
  std::vector<Vec2> verts;
  std::vector<int> vmap(nv, -1);
  std::map<std::pair<int, int>, int> cuts;
  auto keep_vertex = [&](int v) {
    if (vmap[v] < 0) {
      vmap[v] = static_cast<int>(verts.size());
      verts.push_back(background.vertices[v]);
      out.origin.push_back({v, -1, -1, 0.0});
    }
    return vmap[v];
  };
  auto cut_vertex = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = cuts.find(key);
    if (it != cuts.end()) return it->second;
    const int lo = key.first, hi = key.second;
    const double s = phi[lo] / (phi[lo] - phi[hi]);
    const int id = static_cast<int>(verts.size());
    verts.push_back((1.0 - s) * background.vertices[lo] + s * background.vertices[hi]);
    out.origin.push_back({-1, lo, hi, s});
    cuts.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  std::vector<int> parent;
  auto emit = [&](int a, int b, int c, int t) {
    tris.push_back({a, b, c});
    parent.push_back(background.host_triangle(t));
  };
  for (int t = 0; t < background.num_triangles(); ++t) {
    const auto& tri = background.triangles[t];
    int n_in = 0, n_out = 0;
    for (int v : tri) {
      if (phi[v] < 0.0) ++n_in;
      else if (phi[v] > 0.0) ++n_out;
    }
    if (n_in == 0) continue;
    if (n_out == 0) {
      emit(keep_vertex(tri[0]), keep_vertex(tri[1]), keep_vertex(tri[2]), t);
      continue;
    }
    // Rotate so the walk starts at an inside vertex; the polygon of the
    // inside part is collected in counter-clockwise order.
    int start = 0;
    while (phi[tri[start]] >= 0.0) ++start;
    std::vector<int> poly;
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(start + k) % 3], b = tri[(start + k + 1) % 3];
      if (phi[a] <= 0.0) poly.push_back(keep_vertex(a));
      if ((phi[a] < 0.0 && phi[b] > 0.0) || (phi[a] > 0.0 && phi[b] < 0.0)) poly.push_back(cut_vertex(a, b));
    }
    if (poly.size() == 3) {
      emit(poly[0], poly[1], poly[2], t);
    } else if (poly.size() == 4) {
      // Split the quadrilateral along its shorter diagonal.
      const double d02 = (verts[poly[0]] - verts[poly[2]]).squaredNorm();
      const double d13 = (verts[poly[1]] - verts[poly[3]]).squaredNorm();
      if (d02 <= d13) {
        emit(poly[0], poly[1], poly[2], t);
        emit(poly[0], poly[2], poly[3], t);
      } else {
        emit(poly[0], poly[1], poly[3], t);
        emit(poly[1], poly[2], poly[3], t);
      }
    } else {
      throw AssemblyError("unexpected cut polygon");
    }
  }
  if (tris.empty()) throw InadmissibleShape("the shape contains no material");

  // Material must be connected to the Dirichlet side through shared edges
  // of at least min_link_length.
  const int nt = static_cast<int>(tris.size());
  std::vector<int> comp(nt);
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  std::map<std::pair<int, int>, int> edge_owner;
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(tris[t][k], tris[t][(k + 1) % 3]);
      auto [it, fresh] = edge_owner.emplace(key, t);
      if (!fresh && (verts[key.first] - verts[key.second]).norm() >= layout.min_link_length) {
        comp[find(t)] = find(it->second);
      }
    }
  }
  // Edges on the side x = lower.x are always boundary edges.
  std::vector<char> anchored(nt, 0);
  bool any_dirichlet = false;
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      if (layout.on_dirichlet_side(verts[tris[t][k]], verts[tris[t][(k + 1) % 3]])) {
        any_dirichlet = true;
        anchored[find(t)] = 1;
      }
    }
  }
  if (!any_dirichlet) throw InadmissibleShape("the shape does not touch the Dirichlet side");
  {
    std::size_t kept = 0;
    for (int t = 0; t < nt; ++t) {
      if (anchored[find(t)]) {
        tris[kept] = tris[t];
        parent[kept] = parent[t];
        ++kept;
      } else if (!layout.drop_detached) {
        throw InadmissibleShape("the shape has a component detached from the Dirichlet side");
      } else {
        for (int k = 0; k < 3; ++k) {
          if (layout.on_neumann_segment(verts[tris[t][k]], verts[tris[t][(k + 1) % 3]])) {
            throw InadmissibleShape("the loaded segment is detached from the Dirichlet side");
          }
        }
      }
    }
    tris.resize(kept);
    parent.resize(kept);
  }

  // Drop unused vertices (a snapped vertex may only touch dropped triangles).
  std::vector<int> used(verts.size(), -1);
  std::vector<Vec2> final_verts;
  std::vector<VertexOrigin> final_origin;
  for (auto& tri : tris) {
    for (int& v : tri) {
      if (used[v] < 0) {
        used[v] = static_cast<int>(final_verts.size());
        final_verts.push_back(verts[v]);
        final_origin.push_back(out.origin[v]);
      }
      v = used[v];
    }
  }
  out.origin = std::move(final_origin);
  out.mesh = build_mesh(std::move(final_verts), std::move(tris),
                        [&](const Vec2& a, const Vec2& b) { return layout.label(a, b); }, std::move(parent));

  out.min_quality = 1.0;
  for (int t = 0; t < out.mesh.num_triangles(); ++t) {
    out.min_quality = std::min(out.min_quality, triangle_quality(out.mesh, t));
  }
  return out;
}

CutMesh cut_mesh(const TriMesh& background, const LevelSetField& phi, const BoundaryLayout& layout) {
  std::vector<double> v(background.num_vertices());
  for (int i = 0; i < background.num_vertices(); ++i) v[i] = phi.value(background.vertices[i]);
  return cut_mesh(background, v, layout);
}

}  // namespace contopt
