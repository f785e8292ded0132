#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contopt/config.hpp"
#include "contopt/mesh_cut.hpp"

namespace contopt {

struct IterationRecord {
  int k = 0;
  double J = 0.0;
  double compliance = 0.0;
  double volume = 0.0;
  double abs_dJ = 0.0;  // |dJ[theta]| along the descent direction
  double step = 0.0;    // accepted pseudo-time T, 0 on the last record
  int halvings = 0;
  int newton_iterations = 0;
  double biactive_contact = 0.0;  // |I0|
  double biactive_stick = 0.0;    // |J0|
  bool warning_band = false;
  bool reinitialized = false;
  double wall_time = 0.0;  // seconds since the run started
};

const char* history_header();
std::string history_row(const IterationRecord& r);

enum class RunStatus { Converged, MaxIterations, Stagnated, Inadmissible, SolverFailure };
const char* to_string(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::MaxIterations;
  std::string message;
  std::vector<IterationRecord> history;
  LevelSetField phi;
  CutMesh final_mesh;
  Vector displacement;  // on final_mesh with the configured FE degree
};

struct RunOptions {
  std::string output_dir;  // empty: nothing is written
  std::function<void(const IterationRecord&)> on_record;
};

// Gradient descent on the level-set shape: contact solve, adjoint, smoothed
// normal velocity, backtracked advection until J decreases, recut.
RunResult run(const OptimizationConfig& cfg, const RunOptions& opts = {});

// One forward, adjoint and gradient evaluation of the given shape.
IterationRecord evaluate_only(const OptimizationConfig& cfg, const LevelSetField& shape);

// Hausdorff distance between the zero level sets of two fields on the same
// grid, from their edge crossings.
double interface_hausdorff(const LevelSetField& a, const LevelSetField& b);

}  // namespace contopt
