#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "netspec/config.hpp"
#include "netspec/consensus.hpp"
#include "netspec/perturb.hpp"
#include "netspec/spectrum.hpp"
#include "netspec/stage1.hpp"

namespace netspec {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSingular = 3,
  kExitIntegration = 4,
};

/// Inputs of one run after resolving fixtures, generators and seeds.
struct Problem {
  WAssignment target;               // the matrix whose spectrum is wanted (W-bar)
  std::optional<WAssignment> used;  // perturbed W in cyclic-unknown runs
  std::vector<double> y0;

  const WAssignment& effective() const { return used ? *used : target; }
};

/// Loads the graph and W (no perturbation, no y0).
WAssignment resolve_assignment(const RunConfig& cfg);
/// Full resolution including the scenario-2 perturbation and y0. Throws
/// ConfigError on Assumption-1 violations.
Problem resolve_problem(const RunConfig& cfg);

struct RunResult {
  Problem problem;
  Stage1Result stage1;
  std::optional<FlowResult> flow;
  SpectrumTrace spectra;
  nlohmann::json report;
  int exit_code = kExitOk;
};

/// Perturb (scenario 2) -> y0 -> Stage 1 -> Stage 2 with root tracking.
/// Singular A and integrator failures are reported through exit_code and
/// the report rather than thrown.
RunResult run_pipeline(const RunConfig& cfg);

/// Writes stage1_trace.csv, flow_trace.csv, spectrum_trace.csv, report.json.
void write_run_artifacts(const RunResult& r, const std::filesystem::path& dir);

int cmd_run(const RunConfig& cfg, std::ostream& out);
int cmd_oracle(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);

nlohmann::json complex_to_json(const ComplexVector& v);

}  // namespace netspec
