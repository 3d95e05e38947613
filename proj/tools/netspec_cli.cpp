// netspec: distributed graph-spectrum estimation experiments.
//
//   netspec run      --config presets/scenario1_paper.json [--out DIR] [--seed N]
//   netspec oracle   --config CFG | --fixture FILE
//   netspec sweep    --config CFG [--magnitudes 0.2,0.02] [--trials 50]
//   netspec validate --config CFG | --fixture FILE

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netspec/config.hpp"
#include "netspec/errors.hpp"
#include "netspec/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::string fixture;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<double> magnitudes;
  std::optional<std::size_t> trials;
};

netspec::RunConfig build_config(const Options& o) {
  netspec::RunConfig cfg;
  if (!o.config.empty()) {
    cfg = netspec::load_config(o.config);
  } else if (!o.fixture.empty()) {
    if (!std::filesystem::exists(o.fixture)) {
      throw netspec::ConfigError("fixture not found: " + o.fixture);
    }
    cfg.graph.fixture = o.fixture;
    cfg.w.from_fixture = true;
  } else {
    throw netspec::ConfigError("one of --config or --fixture is required");
  }
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) netspec::override_seeds(cfg, *o.seed);
  if (!o.magnitudes.empty()) cfg.sweep.magnitudes = o.magnitudes;
  if (o.trials) cfg.sweep.trials = *o.trials;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed estimation of graph spectra: simulator and oracle"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool allow_fixture) {
    sub->add_option("--config", o.config, "Run configuration (JSON)");
    if (allow_fixture) sub->add_option("--fixture", o.fixture, "Graph/W fixture (JSON)");
    sub->add_option("--out", o.out, "Output directory (overrides the config)");
    sub->add_option("--seed", o.seed, "Master seed replacing every seed in the config");
  };

  CLI::App* run = app.add_subcommand("run", "Run the two-stage algorithm end to end");
  add_common(run, false);
  CLI::App* oracle = app.add_subcommand("oracle", "Print reference coefficients and spectrum");
  add_common(oracle, true);
  CLI::App* sweep = app.add_subcommand("sweep", "Perturbation magnitude sweep");
  add_common(sweep, false);
  sweep->add_option("--magnitudes", o.magnitudes, "Perturbation magnitudes")->delimiter(',');
  sweep->add_option("--trials", o.trials, "Trials per magnitude");
  CLI::App* validate = app.add_subcommand("validate", "Check graph connectivity and the W zero pattern");
  add_common(validate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : netspec::kExitConfig;
  }

  try {
    const netspec::RunConfig cfg = build_config(o);
    if (run->parsed()) return netspec::cmd_run(cfg, std::cout);
    if (oracle->parsed()) return netspec::cmd_oracle(cfg, std::cout);
    if (sweep->parsed()) return netspec::cmd_sweep(cfg, std::cout);
    if (validate->parsed()) return netspec::cmd_validate(cfg, std::cout);
  } catch (const netspec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return netspec::kExitConfig;
  } catch (const netspec::SingularMatrixError& e) {
    std::cerr << "singular matrix: " << e.what() << '\n';
    return netspec::kExitSingular;
  } catch (const netspec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return netspec::kExitFailure;
  }
  return netspec::kExitFailure;
}
