#include "contopt/rigid_foundation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace contopt {

SdfGrid read_sdf_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open SDF grid file: " + path);
  SdfGrid g;
  if (!(in >> g.nx >> g.ny >> g.x0 >> g.y0 >> g.dx >> g.dy)) {
    throw ConfigError("malformed SDF header in " + path);
  }
  if (g.nx < 2 || g.ny < 2 || g.dx <= 0.0 || g.dy <= 0.0) {
    throw ConfigError("SDF grid needs at least 2x2 nodes and positive spacing: " + path);
  }
  g.values.resize(static_cast<size_t>(g.nx) * g.ny);
  for (double& v : g.values) {
    if (!(in >> v)) throw ConfigError("SDF file " + path + " ended before nx*ny values");
  }
  return g;
}

RigidFoundation RigidFoundation::half_plane(const Vec2& point, const Vec2& outward) {
  const double n = outward.norm();
  if (!(n > 0.0)) throw DomainError("half-plane normal must be nonzero");
  RigidFoundation f;
  f.kind_ = FoundationKind::HalfPlane;
  f.center_ = point;
  f.outward_ = outward / n;
  return f;
}

RigidFoundation RigidFoundation::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  RigidFoundation f;
  f.kind_ = FoundationKind::Disk;
  f.center_ = center;
  f.radius_ = radius;
  return f;
}

RigidFoundation RigidFoundation::sampled(SdfGrid grid, double band, bool negate) {
  if (grid.nx < 2 || grid.ny < 2 || grid.values.size() != static_cast<size_t>(grid.nx) * grid.ny) {
    throw ConfigError("inconsistent SDF grid dimensions");
  }
  if (!(band > 0.0)) throw DomainError("evaluation band must be positive");
  if (negate) {
    for (double& v : grid.values) v = -v;
  }
  RigidFoundation f;
  f.kind_ = FoundationKind::SampledSdf;
  f.grid_ = std::move(grid);
  f.band_ = band;
  return f;
}

double RigidFoundation::sdf_value(const Vec2& x, Vec2* grad) const {
  const SdfGrid& g = grid_;
  const double sx = (x.x() - g.x0) / g.dx;
  const double sy = (x.y() - g.y0) / g.dy;
  if (sx < 0.0 || sy < 0.0 || sx > g.nx - 1 || sy > g.ny - 1) {
    std::ostringstream os;
    os << "point (" << x.x() << ", " << x.y() << ") lies outside the sampled SDF grid";
    throw EvaluationBandError(os.str());
  }
  const int i = std::min(static_cast<int>(sx), g.nx - 2);
  const int j = std::min(static_cast<int>(sy), g.ny - 2);
  const double a = sx - i, b = sy - j;
  auto at = [&](int ii, int jj) { return g.values[static_cast<size_t>(jj) * g.nx + ii]; };
  const double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
  if (grad) {
    (*grad)(0) = ((1 - b) * (v10 - v00) + b * (v11 - v01)) / g.dx;
    (*grad)(1) = ((1 - a) * (v01 - v00) + a * (v11 - v10)) / g.dy;
  }
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

void RigidFoundation::check_band(const Vec2& x, double g) const {
  if (std::abs(g) >= band_) {
    std::ostringstream os;
    os << "foundation query at (" << x.x() << ", " << x.y() << ") has |gap| = " << std::abs(g)
       << " outside the evaluation band " << band_;
    throw EvaluationBandError(os.str());
  }
}

double RigidFoundation::gap(const Vec2& x) const {
  switch (kind_) {
    case FoundationKind::HalfPlane: return (x - center_).dot(outward_);
    case FoundationKind::Disk: return (x - center_).norm() - radius_;
    case FoundationKind::SampledSdf: {
      const double g = sdf_value(x, nullptr);
      check_band(x, g);
      return g;
    }
  }
  return 0.0;
}

Vec2 RigidFoundation::inward_normal(const Vec2& x) const { return evaluate(x).normal; }

FoundationPoint RigidFoundation::evaluate(const Vec2& x) const {
  FoundationPoint p;
  switch (kind_) {
    case FoundationKind::HalfPlane:
      p.gap = (x - center_).dot(outward_);
      p.grad_gap = outward_;
      p.normal = -outward_;
      p.grad_normal.setZero();
      break;
    case FoundationKind::Disk: {
      const Vec2 d = x - center_;
      const double r = d.norm();
      if (!(r > 1e-14 * radius_)) {
        throw DomainError("inward normal undefined at the disk center");
      }
      const Vec2 e = d / r;
      p.gap = r - radius_;
      p.grad_gap = e;
      p.normal = -e;
      p.grad_normal = -(Mat2::Identity() - e * e.transpose()) / r;
      break;
    }
    case FoundationKind::SampledSdf: {
      Vec2 grad;
      p.gap = sdf_value(x, &grad);
      check_band(x, p.gap);
      const double gn = grad.norm();
      if (!(gn > 1e-12)) throw DomainError("sampled SDF has vanishing gradient");
      p.grad_gap = grad;
      p.normal = -grad / gn;
      // The bilinear normal is only piecewise smooth; central differences.
      const double step = 1e-6 * std::min(grid_.dx, grid_.dy);
      for (int k = 0; k < 2; ++k) {
        Vec2 xp = x, xm = x;
        xp(k) += step;
        xm(k) -= step;
        Vec2 gp, gm;
        sdf_value(xp, &gp);
        sdf_value(xm, &gm);
        const Vec2 np = -gp / gp.norm(), nm = -gm / gm.norm();
        p.grad_normal.col(k) = (np - nm) / (2 * step);
      }
      break;
    }
  }
  return p;
}

}  // namespace contopt
