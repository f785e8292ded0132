#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "contopt/optimizer.hpp"
#include "contopt/verification.hpp"

namespace fs = std::filesystem;
using namespace contopt;

namespace {

struct Overrides {
  std::string output_dir = "out";
  std::optional<int> vtk_every;
  std::optional<int> max_iters;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
};

OptimizationConfig resolve(const std::string& path, const Overrides& ov) {
  OptimizationConfig cfg = load_config(path);
  if (ov.vtk_every) cfg.vtk_every = *ov.vtk_every;
  if (ov.max_iters) cfg.optimizer.max_iterations = *ov.max_iters;
  if (ov.model) cfg.contact.model = contact_model_from_string(*ov.model);
  if (ov.seed) cfg.seed = *ov.seed;
  cfg.validate();
  return cfg;
}

int cmd_optimize(const std::string& path, const Overrides& ov) {
  const OptimizationConfig cfg = resolve(path, ov);
  RunOptions opts;
  opts.output_dir = ov.output_dir;
  opts.on_record = [](const IterationRecord& r) {
    std::printf("%4d  J=%.8g  C=%.6g  V=%.6g  |dJ|=%.3g  T=%.3g  newton=%d\n", r.k, r.J, r.compliance, r.volume,
                r.abs_dJ, r.step, r.newton_iterations);
    std::fflush(stdout);
  };
  const RunResult res = run(cfg, opts);
  std::printf("status: %s (%s)\n", to_string(res.status), res.message.c_str());
  if (!res.history.empty()) std::printf("final J: %.8g after %d iterations\n", res.history.back().J, res.history.back().k);
  return res.status == RunStatus::Converged || res.status == RunStatus::MaxIterations ||
                 res.status == RunStatus::Stagnated
             ? 0
             : 1;
}

int cmd_evaluate(const std::string& path, const Overrides& ov) {
  const OptimizationConfig cfg = resolve(path, ov);
  OptimizationConfig once = cfg;
  once.optimizer.max_iterations = 0;
  RunOptions opts;
  opts.output_dir = ov.output_dir;
  const RunResult res = run(once, opts);
  if (res.history.empty()) {
    std::fprintf(stderr, "evaluation failed: %s\n", res.message.c_str());
    return 1;
  }
  std::cout << history_header() << '\n' << history_row(res.history.front()) << '\n';
  return 0;
}

int cmd_verify(const Overrides& ov) {
  const auto reports = run_verification_battery(ov.seed.value_or(42));
  fs::create_directories(ov.output_dir);
  write_checks_csv(reports, (fs::path(ov.output_dir) / "checks.csv").string());
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("%-32s %-7s measured=%.3g tol=%.3g  %.2fs\n", r.name.c_str(), to_string(r.status), r.measured,
                r.tolerance, r.runtime);
    ok = ok && r.status != CheckStatus::Fail;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set shape optimization of elastic bodies in penalized contact"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output-dir", ov.output_dir, "Directory for all outputs")->capture_default_str();
    sub->add_option("--seed", ov.seed, "Random seed");
  };
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--vtk-every", ov.vtk_every, "Snapshot period in iterations, 0 disables")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-iters", ov.max_iters, "Iteration cap")->check(CLI::NonNegativeNumber);
    sub->add_option("--model", ov.model, "Contact model")->check(CLI::IsMember({"none", "sliding", "tresca"}));
    add_common(sub);
  };
  auto* optimize = app.add_subcommand("optimize", "Run the shape optimization");
  add_run_flags(optimize);
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the initial shape once");
  add_run_flags(evaluate);
  auto* verify = app.add_subcommand("verify", "Run the verification battery and write checks.csv");
  add_common(verify);

  CLI11_PARSE(app, argc, argv);
  try {
    if (optimize->parsed()) return cmd_optimize(config_path, ov);
    if (evaluate->parsed()) return cmd_evaluate(config_path, ov);
    return cmd_verify(ov);
  } catch (const ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
}
