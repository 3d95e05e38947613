#include "netspec/config.hpp"

#include <fstream>

#include "netspec/errors.hpp"
#include "netspec/rng.hpp"

namespace netspec {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  if (!std::filesystem::exists(path)) throw ConfigError("file not found: " + path.string());
  return path;
}

double positive(const json& j, const char* key, double fallback) {
  const double v = j.value(key, fallback);
  if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

}  // namespace

Scenario parse_scenario(std::string_view s) {
  if (s == "cyclic-known") return Scenario::CyclicKnown;
  if (s == "cyclic-unknown") return Scenario::CyclicUnknown;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

std::string_view to_string(Scenario s) {
  return s == Scenario::CyclicKnown ? "cyclic-known" : "cyclic-unknown";
}

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    cfg.scenario = parse_scenario(doc.at("scenario").get<std::string>());

    const json& g = doc.at("graph");
    if (g.contains("fixture")) {
      cfg.graph.fixture = resolve(base_dir, g.at("fixture").get<std::string>());
    } else {
      cfg.graph.kind = parse_graph_kind(g.at("kind").get<std::string>());
      cfg.graph.n = g.at("n").get<std::size_t>();
      if (g.contains("edge_prob")) cfg.graph.edge_prob = g.at("edge_prob").get<double>();
      cfg.graph.seed = g.value("seed", std::uint64_t{0});
    }

    const json& w = doc.at("w");
    const auto wkind = w.at("kind").get<std::string>();
    if (wkind == "fixture") {
      if (!cfg.graph.fixture) throw ConfigError("w kind 'fixture' needs a graph fixture");
      cfg.w.from_fixture = true;
    } else {
      cfg.w.kind = parse_w_kind(wkind);
      cfg.w.seed = w.value("seed", std::uint64_t{0});
    }

    if (doc.contains("y0")) {
      const json& y = doc.at("y0");
      if (y.contains("values")) {
        cfg.y0.values = y.at("values").get<std::vector<double>>();
      } else if (y.value("from_fixture", false)) {
        cfg.y0.from_fixture = true;
      } else {
        cfg.y0.seed = y.value("seed", std::uint64_t{0});
      }
    }

    if (doc.contains("consensus")) {
      const json& c = doc.at("consensus");
      cfg.alpha = positive(c, "alpha", cfg.alpha);
      cfg.beta = positive(c, "beta", cfg.beta);
      if (c.contains("step")) {
        if (c.at("step").is_string()) {
          if (c.at("step").get<std::string>() != "auto") throw ConfigError("step must be a number or \"auto\"");
          cfg.step.reset();
        } else {
          cfg.step = positive(c, "step", 1e-3);
        }
      }
      cfg.t_max = positive(c, "t_max", cfg.t_max);
      cfg.v_tol = c.value("v_tol", cfg.v_tol);
      if (!(cfg.v_tol >= 0.0)) throw ConfigError("v_tol must be non-negative");
      cfg.sample_every = positive(c, "sample_every", cfg.sample_every);
    }

    if (doc.contains("perturbation") && !doc.at("perturbation").is_null()) {
      const json& p = doc.at("perturbation");
      PerturbationSource ps;
      ps.magnitude = positive(p, "magnitude", 0.0);
      ps.seed = p.value("seed", std::uint64_t{0});
      if (p.contains("fixture")) ps.fixture = resolve(base_dir, p.at("fixture").get<std::string>());
      cfg.perturbation = ps;
    }
    if (cfg.scenario == Scenario::CyclicUnknown && !cfg.perturbation) {
      throw ConfigError("scenario cyclic-unknown requires a perturbation section");
    }

    if (doc.contains("reference_spectrum")) {
      ComplexVector ref;
      for (const auto& z : doc.at("reference_spectrum")) {
        if (z.is_number()) {
          ref.push_back({z.get<double>(), 0.0});
        } else {
          ref.push_back({z.at(0).get<double>(), z.at(1).get<double>()});
        }
      }
      cfg.reference_spectrum = std::move(ref);
    }

    cfg.rank_tol = positive(doc, "rank_tol", cfg.rank_tol);

    if (doc.contains("sweep")) {
      const json& s = doc.at("sweep");
      cfg.sweep.magnitudes = s.value("magnitudes", std::vector<double>{});
      cfg.sweep.trials = s.value("trials", cfg.sweep.trials);
      cfg.sweep.seed = s.value("seed", std::uint64_t{0});
    }

    if (doc.contains("output_dir")) {
      std::filesystem::path out(doc.at("output_dir").get<std::string>());
      cfg.output_dir = out.is_relative() ? base_dir / out : out;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

void override_seeds(RunConfig& cfg, std::uint64_t seed) {
  cfg.graph.seed = derive_seed(seed, 0);
  cfg.w.seed = derive_seed(seed, 1);
  cfg.y0.seed = derive_seed(seed, 2);
  if (cfg.perturbation) cfg.perturbation->seed = derive_seed(seed, 3);
  cfg.sweep.seed = derive_seed(seed, 4);
}

}  // namespace netspec
