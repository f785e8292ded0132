#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "contopt/optimizer.hpp"
#include "contopt/verification.hpp"

using namespace contopt;

namespace {

struct Outcome {
  CheckStatus status = CheckStatus::Fail;
  std::string summary;
};

Outcome combine(const std::vector<CheckReport>& reports, double runtime_limit) {
  Outcome o;
  bool all_pass = true, any_skip = false;
  double runtime = 0.0;
  for (const auto& r : reports) {
    runtime += r.runtime;
    if (r.status == CheckStatus::Skipped) any_skip = true;
    else if (r.status != CheckStatus::Pass) all_pass = false;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s=%s(measured %.3e, tol %.1e) ", r.name.c_str(), to_string(r.status),
                  r.measured, r.tolerance);
    o.summary += buf;
    if (!r.passed()) o.summary += "[" + r.detail + "] ";
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "runtime %.2fs (limit %.0fs)", runtime, runtime_limit);
  o.summary += buf;
  const bool in_time = runtime <= runtime_limit;
  if (!all_pass || !in_time) o.status = CheckStatus::Fail;
  else o.status = any_skip ? CheckStatus::Skipped : CheckStatus::Pass;
  return o;
}

// The three benchmark runs at the default configuration, shared by 8 and 9.
struct Benchmark {
  RunResult none, sliding, tresca;
  double runtime = 0.0;
};

const Benchmark& benchmark() {
  static const Benchmark b = [] {
    Benchmark out;
    const auto start = std::chrono::steady_clock::now();
    OptimizationConfig cfg;
    cfg.contact.model = ContactModel::None;
    out.none = run(cfg);
    cfg.contact.model = ContactModel::Sliding;
    out.sliding = run(cfg);
    cfg.contact.model = ContactModel::Tresca;
    out.tresca = run(cfg);
    out.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }();
  return b;
}

double final_objective(const RunResult& r) { return r.history.empty() ? 0.0 : r.history.back().J; }

CheckReport monotone_report(const std::string& name, const RunResult& r) {
  CheckReport c;
  c.name = name;
  int rises = 0;
  for (std::size_t i = 1; i < r.history.size(); ++i) rises += !(r.history[i].J < r.history[i - 1].J);
  c.measured = rises;
  const bool ran = r.status != RunStatus::Inadmissible && r.status != RunStatus::SolverFailure && !r.history.empty();
  c.status = ran && rises == 0 ? CheckStatus::Pass : CheckStatus::Fail;
  c.detail = std::string(to_string(r.status)) + " after " + std::to_string(r.history.size()) + " records: " + r.message;
  return c;
}

CheckReport range_report(const std::string& name, double J, double target) {
  CheckReport c;
  c.name = name;
  c.measured = J;
  c.target = target;
  c.tolerance = 0.5 * target;
  c.status = std::abs(J - target) <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  c.detail = "outside [" + std::to_string(target - c.tolerance) + ", " + std::to_string(target + c.tolerance) + "]";
  return c;
}

std::vector<CheckReport> cantilever_reports() {
  const Benchmark& b = benchmark();
  const double jn = final_objective(b.none), js = final_objective(b.sliding), jt = final_objective(b.tresca);
  CheckReport order;
  order.name = "contact_improves_design";
  order.measured = std::min(jn - js, jn - jt);
  order.status = order.measured > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  order.detail = "J none " + std::to_string(jn) + ", sliding " + std::to_string(js) + ", tresca " + std::to_string(jt);
  std::vector<CheckReport> out = {monotone_report("monotone_none", b.none),
                                  monotone_report("monotone_sliding", b.sliding),
                                  monotone_report("monotone_tresca", b.tresca),
                                  order,
                                  range_report("final_J_none", jn, 1.6),
                                  range_report("final_J_sliding", js, 0.7),
                                  range_report("final_J_tresca", jt, 0.7)};
  // Charge the shared wall time once.
  out.front().runtime = b.runtime;
  return out;
}

CheckReport design_difference_report() {
  const Benchmark& b = benchmark();
  CheckReport c;
  c.name = "tresca_vs_sliding_hausdorff_cells";
  c.tolerance = 2.0;
  if (b.sliding.history.empty() || b.tresca.history.empty()) {
    c.detail = "a benchmark run produced no design";
    return c;
  }
  c.measured = interface_hausdorff(b.tresca.phi, b.sliding.phi) / b.tresca.phi.grid().spacing;
  c.status = c.measured > c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  c.detail = "designs within " + std::to_string(c.tolerance) + " cells";
  c.runtime = b.runtime;
  return c;
}

Outcome criterion(int n) {
  switch (n) {
    case 1: return combine({check_projection_laws(100000, 42)}, 5.0);
    case 2: return combine(check_penetration_scaling(), 30.0);
    case 3: return combine({check_sign_conditions(20, 42)}, 600.0);
    case 4: return combine({check_jacobian_structure(20, 42)}, 600.0);
    case 5: return combine({check_adjoint_vs_material(5, 42)}, 60.0);
    case 6: return combine(check_gradient_fd(), 120.0);
    case 7:
      return combine({check_levelset_advection(), check_levelset_curvature(), check_reinitialization_drift()},
                     600.0);
    case 8: return combine(cantilever_reports(), 1800.0);
    case 9: return combine({design_difference_report()}, 1800.0);
    default: break;
  }
  Outcome o;
  o.summary = "unknown criterion";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  bool ok = true;
  for (int n : which) {
    const Outcome o = criterion(n);
    const char* tag = o.status == CheckStatus::Pass ? "PASS" : o.status == CheckStatus::Skipped ? "SKIP" : "FAIL";
    std::printf("criterion %d: %s  %s\n", n, tag, o.summary.c_str());
    std::fflush(stdout);
    if (o.status == CheckStatus::Fail) ok = false;
  }
  return ok ? 0 : 1;
}
