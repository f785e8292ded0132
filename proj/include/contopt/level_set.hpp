#pragma once

#include <vector>

#include "contopt/types.hpp"

namespace contopt {

// Node-centred Cartesian grid: nodes (i, j) at origin + spacing * (i, j),
// 0 <= i < nx, 0 <= j < ny. Node index j * nx + i.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  Vec2 origin = Vec2::Zero();
  double spacing = 1.0;

  // cells_x by cells_y cells covering [x0,x1]x[y0,y1]; the cells must be square.
  static GridSpec covering(double x0, double y0, double x1, double y1, int cells_x, int cells_y);
  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  Vec2 node(int i, int j) const { return origin + spacing * Vec2(i, j); }
  Vec2 upper() const { return node(nx - 1, ny - 1); }
};

class LevelSetField {
 public:
  LevelSetField() = default;
  LevelSetField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return phi_; }
  std::vector<double>& values() { return phi_; }
  double at(int i, int j) const { return phi_[grid_.index(i, j)]; }
  int stamp() const { return stamp_; }
  void set_stamp(int s) { stamp_ = s; }

  // Bilinear interpolation; points outside the grid are clamped onto it.
  double value(const Vec2& x) const;
  // Centred-difference gradient at a node (mirror ghosts at the border).
  Vec2 node_gradient(int i, int j) const;
  // Bilinear interpolation of the nodal gradients.
  Vec2 gradient(const Vec2& x) const;
  // Mean curvature div(grad phi / |grad phi|), bilinearly interpolated.
  // Throws ReinitializationRequired where the gradient vanishes.
  double curvature(const Vec2& x) const;
  double node_curvature(int i, int j) const;

  bool has_inside() const;
  bool has_outside() const;
  // Largest deviation of |grad phi| from 1 over nodes with |phi| <= band.
  double band_gradient_deviation(double band) const;
  // Range of |grad phi| over nodes with |phi| <= band.
  std::pair<double, double> band_gradient_range(double band) const;

 private:
  double mirrored(int i, int j) const;

  GridSpec grid_;
  std::vector<double> phi_;
  int stamp_ = 0;
};

// Axis-aligned material box with circular holes.
struct HoleShape {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct ShapeDescription {
  // Material box; the default covers the whole grid.
  bool has_box = false;
  Vec2 box_lower = Vec2::Zero();
  Vec2 box_upper = Vec2::Zero();
  std::vector<HoleShape> holes;
};

// Regular pattern of rows x cols holes of the given radius inside the box.
ShapeDescription perforated_box(const Vec2& lower, const Vec2& upper, int rows, int cols, double radius);

// Signed distance of the described shape (negative in the material) composed
// with min/max, followed by one reinitialization pass. A box equal to the
// grid extent is pushed one cell outwards so its border nodes stay inside.
// Throws DomainError when no node is inside the material.
LevelSetField init_signed_distance(const ShapeDescription& shape, const GridSpec& grid, int reinit_iters = 30);

// Exact distance composition without reinitialization.
double shape_distance(const ShapeDescription& shape, const GridSpec& grid, const Vec2& x);

// Advances phi_t + theta |grad phi| = 0 to time T with second-order ENO
// upwinding, Heun time stepping and mirror boundary conditions. Returns the
// number of sub-steps taken.
int advect(LevelSetField& phi, const std::vector<double>& theta, double T, double cfl = 0.5);

struct ReinitReport {
  int iterations = 0;
  double max_drift = 0.0;  // zero-level motion in grid cells
};

// Pseudo-time iteration of phi_tau + S(phi0)(|grad phi| - 1) = 0 with the
// subcell fix next to the interface. Throws NumericalError when the zero
// level moves more than max_drift cells.
ReinitReport reinitialize(LevelSetField& phi, int iterations = 30, double max_drift = 0.25);

// Largest motion of the zero crossings along grid edges between two fields,
// in grid cells. Edges crossed in only one of the fields are ignored.
double zero_level_drift(const LevelSetField& before, const LevelSetField& after);

}  // namespace contopt
