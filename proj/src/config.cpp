#include "contopt/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace contopt {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = child(key);
    if (!v.is_number()) throw ConfigError(child_path(key) + " must be a number");
    out = v.get<double>();
  }
  void read(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = child(key);
    if (!v.is_number_integer()) throw ConfigError(child_path(key) + " must be an integer");
    out = v.get<int>();
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = child(key);
    if (!v.is_number_unsigned()) throw ConfigError(child_path(key) + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = child(key);
    if (!v.is_boolean()) throw ConfigError(child_path(key) + " must be true or false");
    out = v.get<bool>();
  }
  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = child(key);
    if (!v.is_string()) throw ConfigError(child_path(key) + " must be a string");
    out = v.get<std::string>();
  }
  void read(const std::string& key, Vec2& out) {
    if (!has(key)) return;
    out = as_vec2(child(key), child_path(key));
  }

  static Vec2 as_vec2(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(path + " must be an array of two numbers");
    }
    return Vec2(v[0].get<double>(), v[1].get<double>());
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + child_path(item.key()));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

RigidFoundation FoundationConfig::build() const {
  if (type == "disk") return RigidFoundation::disk(center, radius);
  if (type == "half_plane") return RigidFoundation::half_plane(point, outward);
  if (type == "sampled") return RigidFoundation::sampled(read_sdf_grid(path), band, negate);
  throw ConfigError("unknown foundation type '" + type + "'");
}

void OptimizationConfig::validate() const {
  require(domain_upper.x() > domain_lower.x() && domain_upper.y() > domain_lower.y(), "domain: upper must exceed lower");
  require(grid_cells_x > 1 && grid_cells_y > 1, "grid: cell counts must exceed 1");
  require(mesh_cells_x > 0 && mesh_cells_y > 0, "mesh: cell counts must be positive");
  require(fe_degree == 1 || fe_degree == 2, "mesh.fe_degree must be 1 or 2");
  require(young_modulus > 0.0, "material.young_modulus must be positive");
  require(poisson_ratio > -1.0 && poisson_ratio < 0.5, "material.poisson_ratio must lie in (-1, 0.5)");
  require(neumann_y0 < neumann_y1, "loads.neumann_segment must be increasing");
  require(foundation.type == "disk" || foundation.type == "half_plane" || foundation.type == "sampled",
          "foundation.type must be disk, half_plane or sampled");
  require(foundation.type != "disk" || foundation.radius > 0.0, "foundation.radius must be positive");
  require(foundation.type != "sampled" || !foundation.path.empty(), "foundation.path is required for a sampled foundation");
  const auto& c = contact;
  require(c.friction_coefficient >= 0.0 && c.threshold >= 0.0, "contact: friction data must be non-negative");
  require(c.contact_distance > 0.0, "contact.contact_distance must be positive");
  require(c.solver.epsilon > 0.0 && c.solver.tolerance > 0.0 && c.solver.warning_band > 0.0,
          "contact: epsilon, tolerance and warning_band must be positive");
  require(c.solver.max_iterations > 0, "contact.max_newton_iterations must be positive");
  objective.validate();
  const auto& o = optimizer;
  require(o.max_iterations >= 0, "optimizer.max_iterations must be non-negative");
  require(o.cfl > 0.0, "optimizer.cfl must be positive");
  require(o.backtrack > 0.0 && o.backtrack < 1.0, "optimizer.backtrack must lie in (0, 1)");
  require(o.max_halvings >= 0, "optimizer.max_halvings must be non-negative");
  require(o.stagnation_window > 0 && o.stagnation_tolerance > 0.0, "optimizer: stagnation window and tolerance must be positive");
  require(o.reinit_every > 0 && o.reinit_iterations > 0 && o.reinit_max_drift > 0.0,
          "optimizer: reinitialization settings must be positive");
  require(o.reinit_band_low > 0.0 && o.reinit_band_low < 1.0 && o.reinit_band_high > 1.0,
          "optimizer.reinit_band must bracket 1");
  require(o.reg_length_cells > 0.0 && o.normal_band_cells > 0.0, "optimizer: length scales must be positive");
  require(initial_shape.hole_rows >= 0 && initial_shape.hole_cols >= 0 && initial_shape.hole_radius >= 0.0,
          "initial_shape.perforation must be non-negative");
  require(vtk_every >= 0, "output.vtk_every must be non-negative");
  try {
    grid();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

GridSpec OptimizationConfig::grid() const {
  return GridSpec::covering(domain_lower.x(), domain_lower.y(), domain_upper.x(), domain_upper.y(), grid_cells_x,
                            grid_cells_y);
}

ShapeDescription OptimizationConfig::shape() const {
  const auto& s = initial_shape;
  const Vec2 lo = s.has_box ? s.box_lower : domain_lower;
  const Vec2 hi = s.has_box ? s.box_upper : domain_upper;
  ShapeDescription d = perforated_box(lo, hi, s.hole_rows, s.hole_cols, s.hole_radius);
  if (s.hole_radius == 0.0) d.holes.clear();
  d.holes.insert(d.holes.end(), s.extra_holes.begin(), s.extra_holes.end());
  return d;
}

OptimizationConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  OptimizationConfig cfg;
  Section top(root, "config");

  if (top.has("domain")) {
    Section s(top.child("domain"), "config.domain");
    s.read("lower", cfg.domain_lower);
    s.read("upper", cfg.domain_upper);
    s.finish();
  }
  if (top.has("grid")) {
    Section s(top.child("grid"), "config.grid");
    s.read("cells_x", cfg.grid_cells_x);
    s.read("cells_y", cfg.grid_cells_y);
    s.finish();
  }
  if (top.has("mesh")) {
    Section s(top.child("mesh"), "config.mesh");
    s.read("cells_x", cfg.mesh_cells_x);
    s.read("cells_y", cfg.mesh_cells_y);
    s.read("fe_degree", cfg.fe_degree);
    s.finish();
  }
  if (top.has("material")) {
    Section s(top.child("material"), "config.material");
    s.read("young_modulus", cfg.young_modulus);
    s.read("poisson_ratio", cfg.poisson_ratio);
    s.finish();
  }
  if (top.has("loads")) {
    Section s(top.child("loads"), "config.loads");
    s.read("traction", cfg.traction);
    s.read("body_force", cfg.body_force);
    Vec2 seg(cfg.neumann_y0, cfg.neumann_y1);
    s.read("neumann_segment", seg);
    cfg.neumann_y0 = seg.x();
    cfg.neumann_y1 = seg.y();
    s.finish();
  }
  if (top.has("foundation")) {
    Section s(top.child("foundation"), "config.foundation");
    auto& f = cfg.foundation;
    s.read("type", f.type);
    // Only the keys of the chosen type are accepted.
    if (f.type == "disk") {
      s.read("center", f.center);
      s.read("radius", f.radius);
    } else if (f.type == "half_plane") {
      s.read("point", f.point);
      s.read("outward", f.outward);
    } else if (f.type == "sampled") {
      s.read("path", f.path);
      s.read("band", f.band);
      s.read("negate", f.negate);
      if (!f.path.empty() && !base_dir.empty() && std::filesystem::path(f.path).is_relative()) {
        f.path = (std::filesystem::path(base_dir) / f.path).string();
      }
    } else {
      throw ConfigError("config.foundation.type must be disk, half_plane or sampled");
    }
    s.finish();
  }
  if (top.has("contact")) {
    Section s(top.child("contact"), "config.contact");
    auto& c = cfg.contact;
    std::string model = to_string(c.model);
    s.read("model", model);
    try {
      c.model = contact_model_from_string(model);
    } catch (const std::exception&) {
      throw ConfigError("config.contact.model must be none, sliding or tresca");
    }
    s.read("friction_coefficient", c.friction_coefficient);
    s.read("threshold", c.threshold);
    s.read("contact_distance", c.contact_distance);
    s.read("epsilon", c.solver.epsilon);
    s.read("tolerance", c.solver.tolerance);
    s.read("max_newton_iterations", c.solver.max_iterations);
    s.read("warning_band", c.solver.warning_band);
    s.read("continuation_start", c.solver.continuation_start);
    s.finish();
  }
  if (top.has("objective")) {
    Section s(top.child("objective"), "config.objective");
    s.read("compliance_weight", cfg.objective.compliance_weight);
    s.read("volume_weight", cfg.objective.volume_weight);
    s.finish();
  }
  if (top.has("initial_shape")) {
    Section s(top.child("initial_shape"), "config.initial_shape");
    auto& is = cfg.initial_shape;
    if (s.has("box")) {
      Section b(s.child("box"), "config.initial_shape.box");
      is.has_box = true;
      is.box_lower = cfg.domain_lower;
      is.box_upper = cfg.domain_upper;
      b.read("lower", is.box_lower);
      b.read("upper", is.box_upper);
      b.finish();
    }
    if (s.has("perforation")) {
      Section p(s.child("perforation"), "config.initial_shape.perforation");
      p.read("rows", is.hole_rows);
      p.read("cols", is.hole_cols);
      p.read("radius", is.hole_radius);
      p.finish();
    }
    if (s.has("holes")) {
      const json& arr = s.child("holes");
      if (!arr.is_array()) throw ConfigError("config.initial_shape.holes must be an array");
      is.extra_holes.clear();
      for (size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "config.initial_shape.holes[" + std::to_string(i) + "]";
        Section h(arr[i], path);
        HoleShape hole;
        if (!h.has("center") || !h.has("radius")) throw ConfigError(path + " needs center and radius");
        h.read("center", hole.center);
        h.read("radius", hole.radius);
        h.finish();
        is.extra_holes.push_back(hole);
      }
    }
    s.finish();
  }
  if (top.has("optimizer")) {
    Section s(top.child("optimizer"), "config.optimizer");
    auto& o = cfg.optimizer;
    s.read("max_iterations", o.max_iterations);
    s.read("cfl", o.cfl);
    s.read("backtrack", o.backtrack);
    s.read("max_halvings", o.max_halvings);
    s.read("stagnation_window", o.stagnation_window);
    s.read("stagnation_tolerance", o.stagnation_tolerance);
    s.read("reinit_every", o.reinit_every);
    Vec2 band(o.reinit_band_low, o.reinit_band_high);
    s.read("reinit_band", band);
    o.reinit_band_low = band.x();
    o.reinit_band_high = band.y();
    s.read("reinit_iterations", o.reinit_iterations);
    s.read("reinit_max_drift", o.reinit_max_drift);
    s.read("reg_length_cells", o.reg_length_cells);
    s.read("normal_band_cells", o.normal_band_cells);
    s.finish();
  }
  top.read("seed", cfg.seed);
  if (top.has("output")) {
    Section s(top.child("output"), "config.output");
    s.read("vtk_every", cfg.vtk_every);
    s.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

OptimizationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string dump_config(const OptimizationConfig& cfg) {
  json j;
  j["domain"] = {{"lower", vec(cfg.domain_lower)}, {"upper", vec(cfg.domain_upper)}};
  j["grid"] = {{"cells_x", cfg.grid_cells_x}, {"cells_y", cfg.grid_cells_y}};
  j["mesh"] = {{"cells_x", cfg.mesh_cells_x}, {"cells_y", cfg.mesh_cells_y}, {"fe_degree", cfg.fe_degree}};
  j["material"] = {{"young_modulus", cfg.young_modulus}, {"poisson_ratio", cfg.poisson_ratio}};
  j["loads"] = {{"traction", vec(cfg.traction)},
                {"body_force", vec(cfg.body_force)},
                {"neumann_segment", json::array({cfg.neumann_y0, cfg.neumann_y1})}};
  const auto& f = cfg.foundation;
  if (f.type == "disk") {
    j["foundation"] = {{"type", f.type}, {"center", vec(f.center)}, {"radius", f.radius}};
  } else if (f.type == "half_plane") {
    j["foundation"] = {{"type", f.type}, {"point", vec(f.point)}, {"outward", vec(f.outward)}};
  } else {
    j["foundation"] = {{"type", f.type}, {"path", f.path}, {"band", f.band}, {"negate", f.negate}};
  }
  const auto& c = cfg.contact;
  j["contact"] = {{"model", to_string(c.model)},
                  {"friction_coefficient", c.friction_coefficient},
                  {"threshold", c.threshold},
                  {"contact_distance", c.contact_distance},
                  {"epsilon", c.solver.epsilon},
                  {"tolerance", c.solver.tolerance},
                  {"max_newton_iterations", c.solver.max_iterations},
                  {"warning_band", c.solver.warning_band},
                  {"continuation_start", c.solver.continuation_start}};
  j["objective"] = {{"compliance_weight", cfg.objective.compliance_weight},
                    {"volume_weight", cfg.objective.volume_weight}};
  const auto& is = cfg.initial_shape;
  json shape;
  if (is.has_box) shape["box"] = {{"lower", vec(is.box_lower)}, {"upper", vec(is.box_upper)}};
  shape["perforation"] = {{"rows", is.hole_rows}, {"cols", is.hole_cols}, {"radius", is.hole_radius}};
  json holes = json::array();
  for (const auto& h : is.extra_holes) holes.push_back({{"center", vec(h.center)}, {"radius", h.radius}});
  shape["holes"] = holes;
  j["initial_shape"] = shape;
  const auto& o = cfg.optimizer;
  j["optimizer"] = {{"max_iterations", o.max_iterations},
                    {"cfl", o.cfl},
                    {"backtrack", o.backtrack},
                    {"max_halvings", o.max_halvings},
                    {"stagnation_window", o.stagnation_window},
                    {"stagnation_tolerance", o.stagnation_tolerance},
                    {"reinit_every", o.reinit_every},
                    {"reinit_band", json::array({o.reinit_band_low, o.reinit_band_high})},
                    {"reinit_iterations", o.reinit_iterations},
                    {"reinit_max_drift", o.reinit_max_drift},
                    {"reg_length_cells", o.reg_length_cells},
                    {"normal_band_cells", o.normal_band_cells}};
  j["seed"] = cfg.seed;
  j["output"] = {{"vtk_every", cfg.vtk_every}};
  return j.dump(2) + "\n";
}

}  // namespace contopt
