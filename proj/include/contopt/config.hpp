#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contopt/contact.hpp"
#include "contopt/level_set.hpp"
#include "contopt/shape_sensitivity.hpp"

namespace contopt {

struct FoundationConfig {
  std::string type = "disk";  // disk | half_plane | sampled
  Vec2 center = Vec2(1.0, -8.0);
  double radius = 8.0;
  Vec2 point = Vec2::Zero();
  Vec2 outward = Vec2(0.0, 1.0);
  std::string path;  // sampled: grid file, relative paths resolve against the config file
  double band = 0.1;
  bool negate = false;

  RigidFoundation build() const;
};

struct ContactSettings {
  ContactModel model = ContactModel::Tresca;
  double friction_coefficient = 0.2;
  double threshold = 1e-2;
  double contact_distance = 0.1;
  SolverConfig solver;
};

struct InitialShapeConfig {
  // Material box; omitted means the whole design domain.
  bool has_box = false;
  Vec2 box_lower = Vec2::Zero();
  Vec2 box_upper = Vec2::Zero();
  int hole_rows = 4;
  int hole_cols = 8;
  double hole_radius = 0.06;
  std::vector<HoleShape> extra_holes;
};

struct OptimizerSettings {
  int max_iterations = 300;
  double cfl = 1.0;  // grid cells of boundary motion for the first trial step
  double backtrack = 0.5;
  int max_halvings = 8;
  int stagnation_window = 10;
  double stagnation_tolerance = 1e-4;  // relative to the initial objective
  int reinit_every = 5;
  double reinit_band_low = 0.8;
  double reinit_band_high = 1.2;
  int reinit_iterations = 30;
  double reinit_max_drift = 0.25;  // grid cells
  double reg_length_cells = 2.0;   // velocity smoothing length in FE cells
  double normal_band_cells = 3.0;  // extended normal kept within this many FE cells of the interface
};

struct OptimizationConfig {
  Vec2 domain_lower = Vec2(0.0, 0.0);
  Vec2 domain_upper = Vec2(2.0, 1.0);
  int grid_cells_x = 160;
  int grid_cells_y = 80;
  int mesh_cells_x = 50;
  int mesh_cells_y = 25;
  int fe_degree = 2;
  double young_modulus = 1.0;
  double poisson_ratio = 0.3;
  Vec2 traction = Vec2(0.0, -0.01);
  Vec2 body_force = Vec2::Zero();
  double neumann_y0 = 0.4;
  double neumann_y1 = 0.6;
  FoundationConfig foundation;
  ContactSettings contact;
  ObjectiveConfig objective{15.0, 0.01};
  InitialShapeConfig initial_shape;
  OptimizerSettings optimizer;
  std::uint64_t seed = 42;
  int vtk_every = 10;  // 0 disables snapshots

  // Throws ConfigError on an out-of-range value.
  void validate() const;
  GridSpec grid() const;
  ShapeDescription shape() const;
};

// Unknown keys at any level raise ConfigError naming the full key path.
OptimizationConfig parse_config(const std::string& json_text, const std::string& base_dir = "");
OptimizationConfig load_config(const std::string& path);
// Round-trips through parse_config.
std::string dump_config(const OptimizationConfig& cfg);

}  // namespace contopt
