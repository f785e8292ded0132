#pragma once

#include <string>
#include <vector>

#include "contopt/types.hpp"

namespace contopt {

enum class FoundationKind { HalfPlane, Disk, SampledSdf };

// Everything the contact terms and their shape derivatives need at a point.
struct FoundationPoint {
  double gap = 0.0;
  Vec2 grad_gap = Vec2::Zero();
  Vec2 normal = Vec2::Zero();       // inward normal of the obstacle, -grad_gap
  Mat2 grad_normal = Mat2::Zero();  // d(normal)/dx, row i = gradient of normal_i
};

// Sampled signed distance: values[j * nx + i] at (x0 + i*dx, y0 + j*dy).
struct SdfGrid {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, dx = 1.0, dy = 1.0;
  std::vector<double> values;
};

SdfGrid read_sdf_grid(const std::string& path);

class RigidFoundation {
 public:
  // outward points from the obstacle into the free half-plane.
  static RigidFoundation half_plane(const Vec2& point, const Vec2& outward);
  static RigidFoundation disk(const Vec2& center, double radius);
  // negate flips a grid stored with the opposite sign convention.
  static RigidFoundation sampled(SdfGrid grid, double band, bool negate = false);

  FoundationKind kind() const { return kind_; }
  double band() const { return band_; }

  double gap(const Vec2& x) const;
  Vec2 inward_normal(const Vec2& x) const;
  FoundationPoint evaluate(const Vec2& x) const;

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  RigidFoundation() = default;
  double sdf_value(const Vec2& x, Vec2* grad) const;
  void check_band(const Vec2& x, double g) const;

  FoundationKind kind_ = FoundationKind::HalfPlane;
  Vec2 center_ = Vec2::Zero();  // disk center or a point on the plane
  Vec2 outward_ = Vec2(0.0, 1.0);
  double radius_ = 0.0;
  double band_ = 0.0;
  SdfGrid grid_;
};

}  // namespace contopt
