#include <filesystem>
#include <fstream>

#include "contopt/config.hpp"
#include "doctest.h"

using namespace contopt;

TEST_CASE("empty document gives the benchmark defaults") {
  const OptimizationConfig c = parse_config("{}");
  CHECK(c.domain_upper == Vec2(2.0, 1.0));
  CHECK(c.grid_cells_x == 160);
  CHECK(c.grid_cells_y == 80);
  CHECK(c.fe_degree == 2);
  CHECK(c.contact.model == ContactModel::Tresca);
  CHECK(c.contact.solver.epsilon == 1e-6);
  CHECK(c.objective.compliance_weight == 15.0);
  CHECK(c.objective.volume_weight == 0.01);
  CHECK(c.traction == Vec2(0.0, -0.01));
  CHECK(c.grid().spacing == doctest::Approx(0.0125));
}

TEST_CASE("unknown keys are rejected with their path") {
  const auto message = [](const std::string& text) {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"colour": 1})").find("config.colour") != std::string::npos);
  CHECK(message(R"({"contact": {"epsilonn": 1e-6}})").find("config.contact.epsilonn") != std::string::npos);
  CHECK(message(R"({"initial_shape": {"box": {"lower": [0, 0], "upper": [1, 1], "up": 2}}})")
            .find("config.initial_shape.box.up") != std::string::npos);
  CHECK(message(R"({"foundation": {"type": "half_plane", "radius": 3}})").find("radius") != std::string::npos);
}

TEST_CASE("malformed and out-of-range values are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"contact": {"model": "coulomb"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"contact": {"epsilon": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mesh": {"fe_degree": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"cells_x": "many"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"cells_x": 100, "cells_y": 80}})"), ConfigError);
}

TEST_CASE("dump and parse round trip") {
  OptimizationConfig c;
  c.fe_degree = 1;
  c.contact.model = ContactModel::Sliding;
  c.contact.solver.epsilon = 1e-5;
  c.initial_shape.hole_rows = 2;
  c.initial_shape.extra_holes.push_back({Vec2(0.3, 0.4), 0.05});
  c.optimizer.reinit_band_low = 0.7;
  c.seed = 9;
  c.vtk_every = 3;
  const OptimizationConfig d = parse_config(dump_config(c));
  CHECK(dump_config(d) == dump_config(c));
  CHECK(d.contact.model == ContactModel::Sliding);
  REQUIRE(d.initial_shape.extra_holes.size() == 1);
  CHECK(d.initial_shape.extra_holes[0].center == Vec2(0.3, 0.4));
  CHECK(d.optimizer.reinit_band_low == 0.7);
}

TEST_CASE("shipped benchmark configuration loads") {
  const std::filesystem::path path = std::filesystem::path(CONTOPT_SOURCE_DIR) / "configs" / "cantilever.json";
  const OptimizationConfig c = load_config(path.string());
  CHECK(c.contact.model == ContactModel::Tresca);
  CHECK(c.foundation.type == "disk");
  CHECK(c.shape().holes.size() == 32);
}

TEST_CASE("sampled foundation path resolves against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "contopt_config_test";
  std::filesystem::create_directories(dir);
  const OptimizationConfig c = parse_config(R"({"foundation": {"type": "sampled", "path": "ground.txt"}})",
                                            dir.string());
  CHECK(std::filesystem::path(c.foundation.path) == dir / "ground.txt");
}
