#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netspec/complex.hpp"
#include "netspec/graph.hpp"

namespace netspec {

enum class Scenario { CyclicKnown, CyclicUnknown };

struct GraphSource {
  std::optional<std::filesystem::path> fixture;
  GraphKind kind = GraphKind::Path;
  std::size_t n = 0;
  std::optional<double> edge_prob;
  std::uint64_t seed = 0;
};

struct WSource {
  bool from_fixture = false;
  WKind kind = WKind::Adjacency;
  std::uint64_t seed = 0;
};

struct Y0Source {
  std::optional<std::vector<double>> values;
  bool from_fixture = false;
  std::uint64_t seed = 0;
};

struct PerturbationSource {
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  /// Explicit perturbed W; bypasses the random draws.
  std::optional<std::filesystem::path> fixture;
};

struct SweepSettings {
  std::vector<double> magnitudes;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
};

struct RunConfig {
  Scenario scenario = Scenario::CyclicKnown;
  GraphSource graph;
  WSource w;
  Y0Source y0;

  double alpha = 10.0;
  double beta = 10.0;
  /// Integrator step; nullopt means "auto" (largest step keeping V monotone).
  std::optional<double> step = 1e-3;
  double t_max = 200.0;
  double v_tol = 1e-12;
  double sample_every = 0.1;

  std::optional<PerturbationSource> perturbation;
  /// Externally published spectrum to score the final estimates against.
  std::optional<ComplexVector> reference_spectrum;
  double rank_tol = 1e-9;
  SweepSettings sweep;
  std::filesystem::path output_dir = "out";
};

/// Relative paths inside the document resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Replaces every seed in the config with a sub-stream of `seed`.
void override_seeds(RunConfig& cfg, std::uint64_t seed);

Scenario parse_scenario(std::string_view s);
std::string_view to_string(Scenario s);

}  // namespace netspec
