#include "contopt/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "contopt/vtk_writer.hpp"

namespace contopt {

const char* history_header() {
  return "k,J,compliance,volume,abs_dJ,step,halvings,newton_iterations,biactive_contact,biactive_stick,warning_band,"
         "reinitialized,wall_time_s";
}

std::string history_row(const IterationRecord& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.k << ',' << r.J << ',' << r.compliance << ',' << r.volume << ',' << r.abs_dJ << ',' << r.step << ','
     << r.halvings << ',' << r.newton_iterations << ',' << r.biactive_contact << ',' << r.biactive_stick << ','
     << (r.warning_band ? 1 : 0) << ',' << (r.reinitialized ? 1 : 0) << ',' << r.wall_time;
  return os.str();
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max_iterations";
    case RunStatus::Stagnated: return "stagnated";
    case RunStatus::Inadmissible: return "inadmissible";
    case RunStatus::SolverFailure: return "solver_failure";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

// Everything tied to one cut shape. Heap members keep the internal pointers
// valid when the evaluation moves.
struct Evaluation {
  std::unique_ptr<CutMesh> cut;
  std::unique_ptr<FeSpace> space;
  std::unique_ptr<ContactSystem> system;
  ContactState state;
  ObjectiveParts parts;
};

// Material nodes not 4-connected through material to the first grid column
// or to a kept node are pushed outside: a floating piece carries no load path
// and makes the elastic problem singular. Pieces holding a kept node stay so
// that the cut rejects the shape.
void remove_islands(LevelSetField& phi, const std::vector<int>& keep) {
  const GridSpec& g = phi.grid();
  auto& v = phi.values();
  std::vector<char> reached(v.size(), 0);
  std::vector<int> stack;
  for (int j = 0; j < g.ny; ++j) {
    const int n = g.index(0, j);
    if (v[n] < 0.0) {
      reached[n] = 1;
      stack.push_back(n);
    }
  }
  for (int n : keep) {
    if (v[n] < 0.0 && !reached[n]) {
      reached[n] = 1;
      stack.push_back(n);
    }
  }
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    const int i = n % g.nx, j = n / g.nx;
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
      const int m = g.index(a, b);
      if (!reached[m] && v[m] < 0.0) {
        reached[m] = 1;
        stack.push_back(m);
      }
    }
  }
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (v[n] < 0.0 && !reached[n]) v[n] = 0.5 * g.spacing;
  }
}

struct Direction {
  Vector theta;                   // normal speed at host vertices
  std::vector<double> grid_theta;  // same, sampled at grid nodes
  double dJ = 0.0;
  double max_speed = 0.0;
};

class Optimizer {
 public:
  explicit Optimizer(const OptimizationConfig& cfg)
      : cfg_(cfg),
        grid_(cfg.grid()),
        host_(rectangle_mesh(cfg.domain_lower.x(), cfg.domain_lower.y(), cfg.domain_upper.x(), cfg.domain_upper.y(),
                             cfg.mesh_cells_x, cfg.mesh_cells_y)),
        locator_(host_) {
    cfg_.validate();
    if (cfg_.contact.model != ContactModel::None) foundation_ = std::make_unique<RigidFoundation>(cfg_.foundation.build());
    layout_.lower = cfg_.domain_lower;
    layout_.upper = cfg_.domain_upper;
    layout_.neumann_y0 = cfg_.neumann_y0;
    layout_.neumann_y1 = cfg_.neumann_y1;
    layout_.foundation = foundation_.get();
    layout_.contact_distance = cfg_.contact.contact_distance;
    // Pieces that only separate once phi is sampled on the coarser host mesh.
    layout_.drop_detached = true;
    layout_.min_link_length = 0.25 * grid_.spacing;
    host_h_ = std::min((cfg_.domain_upper.x() - cfg_.domain_lower.x()) / cfg_.mesh_cells_x,
                       (cfg_.domain_upper.y() - cfg_.domain_lower.y()) / cfg_.mesh_cells_y);

    // The loaded segment never moves: its host vertices carry no velocity and
    // the grid nodes next to it keep their values.
    fixed_.assign(host_.num_vertices(), 0);
    for (int i = 0; i < host_.num_vertices(); ++i) {
      if (on_neumann_side(host_.vertices[i], 1e-9)) fixed_[i] = 1;
    }
    for (int j = 0; j < grid_.ny; ++j) {
      for (int i = 0; i < grid_.nx; ++i) {
        if (on_neumann_side(grid_.node(i, j), host_h_ + 1e-9)) frozen_.push_back(grid_.index(i, j));
      }
    }
    grid_host_.resize(grid_.size());
    for (int j = 0; j < grid_.ny; ++j) {
      for (int i = 0; i < grid_.nx; ++i) {
        auto& gh = grid_host_[grid_.index(i, j)];
        gh.t = locator_.locate(grid_.node(i, j), &gh.bary);
        if (gh.t < 0) throw AssemblyError("grid node outside the host mesh");
      }
    }
  }

  const OptimizationConfig& config() const { return cfg_; }
  const GridSpec& grid() const { return grid_; }
  const TriMesh& host() const { return host_; }

  LevelSetField initial_shape() const { return init_signed_distance(cfg_.shape(), grid_); }

  // Throws InadmissibleShape or SolverError.
  std::unique_ptr<Evaluation> evaluate(const LevelSetField& phi, const Evaluation* previous) const {
    auto e = std::make_unique<Evaluation>();
    e->cut = std::make_unique<CutMesh>(cut_mesh(host_, phi, layout_));
    e->space = std::make_unique<FeSpace>(e->cut->mesh, cfg_.fe_degree);
    ContactProblem p;
    p.space = e->space.get();
    p.material = MaterialModel::from_engineering(cfg_.young_modulus, cfg_.poisson_ratio);
    p.loads.traction = cfg_.traction;
    p.loads.body_force = cfg_.body_force;
    p.foundation = foundation_.get();
    p.model = cfg_.contact.model;
    const double friction = cfg_.contact.model == ContactModel::Tresca ? cfg_.contact.friction_coefficient : 0.0;
    p.friction = FrictionModel::uniform(friction, cfg_.contact.threshold);
    p.config = cfg_.contact.solver;
    e->system = std::make_unique<ContactSystem>(p);
    if (previous) {
      try {
        e->state = e->system->solve(warm_start(*previous, *e->space));
      } catch (const ContactNonConvergence&) {
        // One retry from rest before the shape counts as failed.
        e->state = e->system->solve(Vector());
      }
    } else {
      e->state = e->system->solve(Vector());
    }
    e->parts = objective(*e->system, e->state, cfg_.objective);
    return e;
  }

  Direction direction(const Evaluation& e, const LevelSetField& phi) const {
    const Vector p = solve_adjoint(*e.system, e.state, cfg_.objective);
    Vector G = distributed_gradient(*e.system, e.state, p, cfg_.objective, host_);
    const int nv = host_.num_vertices();
    const double band = cfg_.optimizer.normal_band_cells * host_h_;
    std::vector<Vec2> n_ext(nv, Vec2::Zero());
    for (int i = 0; i < nv; ++i) {
      const Vec2& x = host_.vertices[i];
      if (std::abs(phi.value(x)) > band) continue;
      const Vec2 g = phi.gradient(x);
      const double norm = g.norm();
      if (norm < 1e-12) continue;
      n_ext[i] = g / norm;
      // The box cannot grow past D: drop the component of the gradient that
      // asks a side vertex to move outwards.
      const Vec2 nd = box_normal(x);
      if (nd.squaredNorm() > 0.0 && n_ext[i].dot(nd) > 0.0) {
        const double gi = G.segment<2>(2 * i).dot(n_ext[i]);
        if (gi < 0.0) G.segment<2>(2 * i) -= gi * n_ext[i];
      }
    }
    const DescentResult dr =
        descent_direction(host_, G, n_ext, fixed_, cfg_.optimizer.reg_length_cells * host_h_);
    Direction d;
    d.theta = dr.theta;
    d.dJ = dr.dJ;
    d.grid_theta.resize(grid_.size());
    for (int n = 0; n < grid_.size(); ++n) {
      const auto& gh = grid_host_[n];
      const auto& tri = host_.triangles[gh.t];
      d.grid_theta[n] = gh.bary[0] * d.theta[tri[0]] + gh.bary[1] * d.theta[tri[1]] + gh.bary[2] * d.theta[tri[2]];
      d.max_speed = std::max(d.max_speed, std::abs(d.grid_theta[n]));
    }
    return d;
  }

  // Advects a copy of phi; reinitializes on schedule or when the band
  // gradient drifts out of range. Frozen nodes keep their values.
  LevelSetField trial_shape(const LevelSetField& phi, const Direction& d, double T, int next_k, bool* reinit) const {
    LevelSetField trial = phi;
    advect(trial, d.grid_theta, T);
    restore_frozen(trial, phi);
    remove_islands(trial, frozen_);
    const auto& o = cfg_.optimizer;
    const auto [lo, hi] = trial.band_gradient_range(3.0 * grid_.spacing);
    *reinit = next_k % o.reinit_every == 0 || lo < o.reinit_band_low || hi > o.reinit_band_high;
    if (*reinit) {
      LevelSetField r = trial;
      try {
        reinitialize(r, o.reinit_iterations, o.reinit_max_drift);
        restore_frozen(r, phi);
        trial = std::move(r);
      } catch (const NumericalError&) {
        // Too much drift: keep the advected field and retry next iteration.
        *reinit = false;
      }
    }
    return trial;
  }

  IterationRecord record(int k, const Evaluation& e, const Direction& d) const {
    IterationRecord r;
    r.k = k;
    r.J = e.parts.value;
    r.compliance = e.parts.compliance;
    r.volume = e.parts.volume;
    r.abs_dJ = std::abs(d.dJ);
    r.newton_iterations = e.state.newton_iterations + e.state.picard_iterations;
    const BiactiveDiagnostics b =
        biactive_measure(e.state, cfg_.contact.solver.tie_tolerance, cfg_.contact.solver.warning_band);
    r.biactive_contact = b.contact_measure;
    r.biactive_stick = b.stick_measure;
    r.warning_band = b.warning_band_hit();
    return r;
  }

  void write_snapshot(const std::string& path, const Evaluation& e) const {
    const TriMesh& m = e.cut->mesh;
    std::vector<Vec2> u(m.num_vertices(), Vec2::Zero());
    for (int t = 0; t < m.num_triangles(); ++t) {
      for (int k = 0; k < 3; ++k) {
        std::array<double, 3> l{0.0, 0.0, 0.0};
        l[k] = 1.0;
        u[m.triangles[t][k]] = eval_vector(*e.space, e.state.u, t, l).value;
      }
    }
    VtkMeshWriter w(m);
    w.add_point_vectors("displacement", std::move(u));
    w.write(path, "cut shape");
  }

  void write_field(const std::string& path, const LevelSetField& phi, const Direction* d) const {
    std::vector<std::pair<std::string, const std::vector<double>*>> fields{{"phi", &phi.values()}};
    if (d) fields.emplace_back("theta", &d->grid_theta);
    write_vtk_grid(path, grid_.nx, grid_.ny, grid_.origin.x(), grid_.origin.y(), grid_.spacing, grid_.spacing, fields);
  }

 private:
  struct GridHost {
    int t = -1;
    std::array<double, 3> bary{};
  };

  bool on_neumann_side(const Vec2& x, double dist) const {
    return x.x() >= cfg_.domain_upper.x() - dist && x.y() >= cfg_.neumann_y0 - 1e-9 && x.y() <= cfg_.neumann_y1 + 1e-9;
  }

  // Outward normal of D at a side vertex, the diagonal at corners, else 0.
  Vec2 box_normal(const Vec2& x) const {
    const double tol = 1e-9;
    Vec2 n = Vec2::Zero();
    if (x.x() <= cfg_.domain_lower.x() + tol) n.x() = -1.0;
    if (x.x() >= cfg_.domain_upper.x() - tol) n.x() = 1.0;
    if (x.y() <= cfg_.domain_lower.y() + tol) n.y() = -1.0;
    if (x.y() >= cfg_.domain_upper.y() - tol) n.y() = 1.0;
    return n;
  }

  void restore_frozen(LevelSetField& phi, const LevelSetField& before) const {
    for (int n : frozen_) phi.values()[n] = before.values()[n];
  }

  // Nearest old unknown for every new one; Dirichlet values are reset by the solver.
  static Vector warm_start(const Evaluation& prev, const FeSpace& space) {
    const auto& old_pts = prev.space->dof_points();
    const NearestPoint nearest(old_pts);
    Vector u(2 * space.num_dofs());
    for (int i = 0; i < space.num_dofs(); ++i) {
      const int j = nearest.nearest(space.dof_points()[i]);
      u.segment<2>(2 * i) = prev.state.u.segment<2>(2 * j);
    }
    return u;
  }

  OptimizationConfig cfg_;
  GridSpec grid_;
  TriMesh host_;
  PointLocator locator_;
  std::unique_ptr<RigidFoundation> foundation_;
  BoundaryLayout layout_;
  double host_h_ = 0.0;
  std::vector<char> fixed_;
  std::vector<int> frozen_;
  std::vector<GridHost> grid_host_;
};

std::string numbered(const std::string& dir, const char* stem, int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d.vtk", stem, k);
  return (std::filesystem::path(dir) / buf).string();
}

}  // namespace

RunResult run(const OptimizationConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const Optimizer opt(cfg);
  const auto& o = cfg.optimizer;
  const bool write = !opts.output_dir.empty();
  std::ofstream history;
  if (write) {
    std::filesystem::create_directories(opts.output_dir);
    std::ofstream(std::filesystem::path(opts.output_dir) / "run.json") << dump_config(cfg);
    history.open(std::filesystem::path(opts.output_dir) / "history.csv");
    if (!history) throw ConfigError("cannot write history.csv in " + opts.output_dir);
    history << history_header() << '\n';
  }

  RunResult res;
  res.phi = opt.initial_shape();
  std::unique_ptr<Evaluation> cur;
  try {
    cur = opt.evaluate(res.phi, nullptr);
  } catch (const InadmissibleShape& ex) {
    res.status = RunStatus::Inadmissible;
    res.message = std::string("initial shape: ") + ex.what();
    return res;
  } catch (const SolverError& ex) {
    res.status = RunStatus::SolverFailure;
    res.message = std::string("initial shape: ") + ex.what();
    return res;
  }
  const double J0 = cur->parts.value;

  const auto emit = [&](IterationRecord r) {
    r.wall_time = elapsed();
    res.history.push_back(r);
    if (write) history << history_row(r) << '\n' << std::flush;
    if (opts.on_record) opts.on_record(r);
  };

  bool reinit_last = false;
  for (int k = 0;; ++k) {
    const Direction d = opt.direction(*cur, res.phi);
    IterationRecord rec = opt.record(k, *cur, d);
    rec.reinitialized = reinit_last;
    if (write && cfg.vtk_every > 0 && k % cfg.vtk_every == 0) {
      opt.write_snapshot(numbered(opts.output_dir, "shape", k), *cur);
      opt.write_field(numbered(opts.output_dir, "field", k), res.phi, &d);
    }
    const int w = o.stagnation_window;
    if (static_cast<int>(res.history.size()) >= w &&
        std::abs(rec.J - res.history[res.history.size() - w].J) <= o.stagnation_tolerance * std::abs(J0)) {
      res.status = RunStatus::Converged;
      res.message = "objective change over the window below tolerance";
      emit(rec);
      break;
    }
    if (k >= o.max_iterations) {
      res.status = RunStatus::MaxIterations;
      res.message = "iteration cap reached";
      emit(rec);
      break;
    }
    if (!(d.max_speed > 0.0)) {
      res.status = RunStatus::Stagnated;
      res.message = "zero descent direction";
      emit(rec);
      break;
    }

    // Backtracking on the advection horizon; only a strict decrease is accepted.
    const double T0 = o.cfl * opt.grid().spacing / d.max_speed;
    bool accepted = false;
    std::string last_failure = "no decrease";
    for (int h = 0; h <= o.max_halvings && !accepted; ++h) {
      const double T = T0 * std::pow(o.backtrack, h);
      bool reinit = false;
      LevelSetField trial = opt.trial_shape(res.phi, d, T, k + 1, &reinit);
      try {
        auto next = opt.evaluate(trial, cur.get());
        if (next->parts.value < cur->parts.value) {
          rec.step = T;
          rec.halvings = h;
          cur = std::move(next);
          res.phi = std::move(trial);
          reinit_last = reinit;
          accepted = true;
        }
      } catch (const InadmissibleShape& ex) {
        last_failure = ex.what();
      } catch (const SolverError& ex) {
        last_failure = ex.what();
      } catch (const AssemblyError& ex) {
        last_failure = ex.what();
      }
    }
    if (!accepted) {
      res.status = RunStatus::Stagnated;
      res.message = "line search failed after " + std::to_string(o.max_halvings) + " halvings: " + last_failure;
      emit(rec);
      break;
    }
    emit(rec);
  }

  res.final_mesh = *cur->cut;
  res.displacement = cur->state.u;
  if (write) {
    opt.write_snapshot((std::filesystem::path(opts.output_dir) / "final.vtk").string(), *cur);
  }
  return res;
}

IterationRecord evaluate_only(const OptimizationConfig& cfg, const LevelSetField& shape) {
  const auto start = Clock::now();
  const Optimizer opt(cfg);
  const auto e = opt.evaluate(shape, nullptr);
  IterationRecord r = opt.record(0, *e, opt.direction(*e, shape));
  r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

double interface_hausdorff(const LevelSetField& a, const LevelSetField& b) {
  const auto crossings = [](const LevelSetField& f) {
    std::vector<Vec2> pts;
    const GridSpec& g = f.grid();
    const auto edge = [&](int i0, int j0, int i1, int j1) {
      const double p0 = f.at(i0, j0), p1 = f.at(i1, j1);
      if ((p0 < 0.0) == (p1 < 0.0)) return;
      const double s = p0 / (p0 - p1);
      pts.push_back((1.0 - s) * g.node(i0, j0) + s * g.node(i1, j1));
    };
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (i + 1 < g.nx) edge(i, j, i + 1, j);
        if (j + 1 < g.ny) edge(i, j, i, j + 1);
      }
    }
    return pts;
  };
  const auto pa = crossings(a), pb = crossings(b);
  if (pa.empty() || pb.empty()) {
    return pa.empty() && pb.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    const NearestPoint np(to);
    double d = 0.0;
    for (const auto& x : from) d = std::max(d, (x - to[np.nearest(x)]).norm());
    return d;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace contopt
