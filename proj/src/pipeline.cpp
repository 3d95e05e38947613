#include "netspec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "netspec/csv.hpp"
#include "netspec/errors.hpp"
#include "netspec/fixture.hpp"

namespace netspec {

using nlohmann::json;

namespace {

void require_assumption1(const WAssignment& wa, const std::string& what) {
  const auto v = validate_assumption1(wa);
  if (v.empty()) return;
  std::string msg = what + " violates the graph's zero pattern at";
  for (const Violation& x : v) {
    msg += " (" + std::to_string(x.row) + "," + std::to_string(x.col) + ")";
  }
  throw ConfigError(msg);
}

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

std::optional<ComplexVector> try_roots(const CharPoly& p) {
  try {
    return find_roots(p);
  } catch (const RootFindingError&) {
    return std::nullopt;
  }
}

void print_vector(std::ostream& out, std::span<const double> v) {
  for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << format_double(v[k]);
  out << '\n';
}

void print_spectrum(std::ostream& out, const ComplexVector& z) {
  for (const Complex& c : z) out << "  " << format_double(c.re) << " " << format_double(c.im) << '\n';
}

void print_oracle(std::ostream& out, const std::string& label, const WAssignment& wa) {
  const CharPoly p = charpoly_oracle(wa.w);
  out << label << " x*: ";
  print_vector(out, p.coeffs);
  out << label << " spectrum (re im):\n";
  print_spectrum(out, find_roots(p));
}

}  // namespace

json complex_to_json(const ComplexVector& v) {
  json arr = json::array();
  for (const Complex& z : v) arr.push_back({z.re, z.im});
  return arr;
}

WAssignment resolve_assignment(const RunConfig& cfg) {
  if (cfg.graph.fixture) {
    Fixture f = load_fixture(*cfg.graph.fixture);
    if (cfg.w.from_fixture) return std::move(f.assignment);
    return build_w(f.assignment.graph, cfg.w.kind, cfg.w.seed);
  }
  try {
    const Graph g = generate_graph(cfg.graph.kind, cfg.graph.n, cfg.graph.seed, cfg.graph.edge_prob);
    return build_w(g, cfg.w.kind, cfg.w.seed);
  } catch (const GenerationError& e) {
    throw ConfigError(e.what());
  } catch (const GraphError& e) {
    throw ConfigError(e.what());
  }
}

Problem resolve_problem(const RunConfig& cfg) {
  WAssignment target = resolve_assignment(cfg);
  require_assumption1(target, "W");
  const std::size_t n = target.graph.node_count();

  std::optional<WAssignment> used;
  if (cfg.scenario == Scenario::CyclicUnknown) {
    const PerturbationSource& ps = *cfg.perturbation;
    if (ps.fixture) {
      WAssignment fixed = load_fixture(*ps.fixture).assignment;
      if (!(fixed.graph == target.graph)) {
        throw ConfigError("perturbed W fixture does not share the graph of W");
      }
      require_assumption1(fixed, "perturbed W");
      for (std::size_t k = 0; k < n * n; ++k) {
        if (std::abs(fixed.w.entries()[k] - target.w.entries()[k]) > ps.magnitude) {
          throw ConfigError("perturbed W fixture differs from W by more than the magnitude");
        }
      }
      used = std::move(fixed);
    } else {
      used = perturb_w(target, {ps.magnitude, ps.seed});
    }
  }

  std::vector<double> y0;
  if (cfg.y0.values) {
    y0 = *cfg.y0.values;
  } else if (cfg.y0.from_fixture) {
    if (!cfg.graph.fixture) throw ConfigError("y0 from_fixture needs a graph fixture");
    auto f = load_fixture(*cfg.graph.fixture);
    if (!f.y0) throw ConfigError("graph fixture carries no y0");
    y0 = *f.y0;
  } else {
    y0 = init_y0(n, cfg.y0.seed);
  }
  if (y0.size() != n) throw ConfigError("y0 must have one entry per node");
  return {std::move(target), std::move(used), std::move(y0)};
}

RunResult run_pipeline(const RunConfig& cfg) {
  RunResult res{resolve_problem(cfg), {}, std::nullopt, {}, json::object(), kExitOk};
  const WAssignment& wa = res.problem.effective();
  const Graph& g = wa.graph;
  const std::size_t n = g.node_count();
  json& rep = res.report;

  rep["scenario"] = std::string(to_string(cfg.scenario));
  rep["n"] = n;
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j});
  rep["edges"] = edges;
  rep["w"] = matrix_to_json(wa.w);
  if (res.problem.used) rep["w_bar"] = matrix_to_json(res.problem.target.w);
  rep["y0"] = res.problem.y0;

  // Oracle answers (centralized; never fed back into the distributed run).
  const CharPoly x_star = charpoly_oracle(wa.w);
  const std::optional<ComplexVector> spectrum = try_roots(x_star);
  rep["oracle"]["x_star"] = x_star.coeffs;
  rep["oracle"]["spectrum"] = spectrum ? complex_to_json(*spectrum) : json(nullptr);
  std::optional<ComplexVector> target_spectrum;
  if (res.problem.used) {
    const CharPoly xbar = charpoly_oracle(res.problem.target.w);
    target_spectrum = try_roots(xbar);
    rep["oracle"]["x_bar"] = xbar.coeffs;
    rep["oracle"]["spectrum_bar"] = target_spectrum ? complex_to_json(*target_spectrum) : json(nullptr);
    if (spectrum && target_spectrum) {
      rep["oracle"]["perturbation_spectrum_error"] =
          match_spectra(*spectrum, *target_spectrum).max_abs_error;
    }
  }

  // Stage 1.
  res.stage1 = run_stage1(wa, res.problem.y0);
  const LinearSystem sys = assemble_system(res.stage1.equations);
  const std::size_t a_rank = rank(sys.a, cfg.rank_tol);
  const double cond = condition_estimate(sys.a);
  rep["stage1"]["messages"] = res.stage1.messages;
  rep["stage1"]["rank"] = a_rank;
  rep["stage1"]["condition_estimate"] = std::isfinite(cond) ? json(cond) : json("inf");
  if (a_rank < n) {
    rep["status"] = "singular";
    rep["message"] = "Stage-1 matrix A has rank " + std::to_string(a_rank) + " < " +
                     std::to_string(n) + "; the consensus flow has no unique equilibrium";
    res.exit_code = kExitSingular;
    return res;
  }
  try {
    const std::vector<double> x_solve = solve_dense(sys.a, sys.b, cfg.rank_tol);
    rep["stage1"]["solve_dense_x"] = x_solve;
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) diff = std::max(diff, std::abs(x_solve[k] - x_star.coeffs[k]));
    rep["stage1"]["solve_vs_oracle_inf"] = diff;
  } catch (const SingularMatrixError& e) {
    rep["stage1"]["solve_dense_error"] = e.what();
  }

  // Stage 2.
  ConsensusParams params = ConsensusParams::uniform(g, cfg.alpha, cfg.beta);
  params.step = cfg.step ? *cfg.step : stable_step(res.stage1.equations, g, params);
  params.t_max = cfg.t_max;
  params.v_tol = cfg.v_tol;
  params.sample_every = cfg.sample_every;
  json& cons = rep["consensus"];
  cons["alpha"] = cfg.alpha;
  cons["beta"] = cfg.beta;
  cons["step"] = params.step;
  cons["t_max"] = params.t_max;
  cons["v_tol"] = params.v_tol;
  cons["sample_every"] = params.sample_every;
  cons["stiffness_bound"] = flow_stiffness_bound(res.stage1.equations, g, params);
  try {
    res.flow = integrate(res.stage1.equations, g, params, ConsensusState::zeros(n));
  } catch (const StepSizeError& e) {
    rep["status"] = "step_size_error";
    rep["message"] = e.what();
    res.exit_code = kExitIntegration;
    return res;
  } catch (const DivergenceError& e) {
    rep["status"] = "divergence";
    rep["message"] = e.what();
    res.exit_code = kExitIntegration;
    return res;
  }
  const FlowResult& flow = *res.flow;
  cons["steps"] = flow.steps;
  cons["final_time"] = flow.final_state.time();
  cons["stop_reason"] = flow.stop == StopReason::Tolerance ? "v_tol" : "t_max";
  cons["V_initial"] = flow.trace.samples.front().v;
  cons["V_final"] = flow.trace.samples.back().v;
  cons["samples"] = flow.trace.samples.size();
  const double slope = decay_slope(flow.trace, x_star.coeffs);
  cons["decay_slope"] = std::isfinite(slope) ? json(slope) : json(nullptr);

  res.spectra = spectrum_trace(flow.trace);
  rep["spectrum_trace"]["estimates"] = res.spectra.estimates.size();
  rep["spectrum_trace"]["gaps"] = res.spectra.gaps.size();

  // Final per-node scores.
  json nodes = json::array();
  double worst_coeff = 0.0, worst_spec = 0.0, worst_ref = 0.0, worst_bar = 0.0;
  bool all_roots = true;
  for (NodeId i = 1; i <= n; ++i) {
    const auto xi = flow.final_state.node(i);
    json node{{"node", i}};
    double ce = 0.0;
    for (std::size_t k = 0; k < n; ++k) ce = std::max(ce, std::abs(xi[k] - x_star.coeffs[k]));
    node["coeff_error_inf"] = ce;
    worst_coeff = std::max(worst_coeff, ce);
    const auto roots = try_roots(CharPoly{std::vector<double>(xi.begin(), xi.end())});
    if (!roots) {
      all_roots = false;
      node["roots"] = nullptr;
    } else {
      node["roots"] = complex_to_json(*roots);
      if (spectrum) {
        const double e = match_spectra(*roots, *spectrum).max_abs_error;
        node["spectrum_error"] = e;
        worst_spec = std::max(worst_spec, e);
      }
      if (cfg.reference_spectrum && cfg.reference_spectrum->size() == n) {
        const double e = match_spectra(*roots, *cfg.reference_spectrum).max_abs_error;
        node["spectrum_error_vs_reference"] = e;
        worst_ref = std::max(worst_ref, e);
      }
      if (target_spectrum) {
        const double e = match_spectra(*roots, *target_spectrum).max_abs_error;
        node["spectrum_error_vs_w_bar"] = e;
        worst_bar = std::max(worst_bar, e);
      }
    }
    nodes.push_back(std::move(node));
  }
  rep["final"]["nodes"] = std::move(nodes);
  rep["final"]["max_coeff_error"] = worst_coeff;
  rep["final"]["all_roots_found"] = all_roots;
  if (spectrum) rep["final"]["max_spectrum_error"] = worst_spec;
  if (cfg.reference_spectrum) {
    rep["final"]["reference_spectrum"] = complex_to_json(*cfg.reference_spectrum);
    rep["final"]["max_spectrum_error_vs_reference"] = worst_ref;
  }
  if (target_spectrum) rep["final"]["max_spectrum_error_vs_w_bar"] = worst_bar;
  rep["status"] = "ok";
  return res;
}

void write_run_artifacts(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_csv(dir / "stage1_trace.csv", stage1_trace_table(r.stage1.trace));
  if (r.flow) {
    write_csv(dir / "flow_trace.csv", flow_trace_table(r.flow->trace));
    write_csv(dir / "spectrum_trace.csv", spectrum_table(r.spectra));
  }
  std::ofstream out(dir / "report.json");
  if (!out) throw ConfigError("cannot write report in " + dir.string());
  out << r.report.dump(2) << '\n';
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
  const RunResult r = run_pipeline(cfg);
  write_run_artifacts(r, cfg.output_dir);
  const json& rep = r.report;
  out << "status: " << rep.value("status", std::string("?")) << '\n';
  if (rep.contains("message")) out << "message: " << rep["message"].get<std::string>() << '\n';
  out << "stage 1: rank " << rep["stage1"]["rank"] << ", condition estimate "
      << rep["stage1"]["condition_estimate"] << '\n';
  if (r.flow) {
    const json& c = rep["consensus"];
    out << "stage 2: " << c["steps"] << " steps to t = " << c["final_time"] << " (stop: "
        << c["stop_reason"].get<std::string>() << "), V " << c["V_initial"] << " -> "
        << c["V_final"] << '\n';
    const json& f = rep["final"];
    out << "final max coefficient error: " << f["max_coeff_error"] << '\n';
    if (f.contains("max_spectrum_error"))
      out << "final max spectrum error vs oracle: " << f["max_spectrum_error"] << '\n';
    if (f.contains("max_spectrum_error_vs_reference"))
      out << "final max spectrum error vs reference: " << f["max_spectrum_error_vs_reference"]
          << '\n';
    if (f.contains("max_spectrum_error_vs_w_bar"))
      out << "final max spectrum error vs W-bar: " << f["max_spectrum_error_vs_w_bar"] << '\n';
  }
  out << "artifacts: " << cfg.output_dir.string() << '\n';
  return r.exit_code;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const Problem p = resolve_problem(cfg);
  print_oracle(out, "W", p.target);
  if (p.used) print_oracle(out, "perturbed W", *p.used);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (cfg.sweep.magnitudes.empty()) throw ConfigError("sweep needs a non-empty magnitude list");
  const WAssignment wbar = resolve_assignment(cfg);
  require_assumption1(wbar, "W");
  const SweepReport rep =
      perturbation_sweep(wbar, cfg.sweep.magnitudes, cfg.sweep.trials, cfg.sweep.seed, cfg.rank_tol);
  std::filesystem::create_directories(cfg.output_dir);
  write_csv(cfg.output_dir / "sweep.csv", sweep_table(rep));
  out << "a,trials,nonsingular_fraction,median_spectrum_error,median_condition,root_failures\n";
  for (const SweepSummary& s : rep.summaries) {
    out << format_double(s.magnitude) << ',' << s.trials << ','
        << format_double(s.nonsingular_fraction) << ',' << format_double(s.median_spectrum_error)
        << ',' << format_double(s.median_condition) << ',' << s.root_failures << '\n';
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const WAssignment wa = resolve_assignment(cfg);
  out << "graph: " << wa.graph.node_count() << " nodes, " << wa.graph.edges().size()
      << " edges, connected\n";
  auto violations = validate_assumption1(wa);
  if (cfg.scenario == Scenario::CyclicUnknown && cfg.perturbation && cfg.perturbation->fixture) {
    const WAssignment p = load_fixture(*cfg.perturbation->fixture).assignment;
    for (const Violation& v : validate_assumption1(p)) violations.push_back(v);
  }
  if (violations.empty()) {
    out << "assumption 1: ok\n";
    return kExitOk;
  }
  for (const Violation& v : violations) {
    out << "violation: w(" << v.row << "," << v.col << ") = " << format_double(v.value)
        << " but {" << v.row << "," << v.col << "} is not an edge\n";
  }
  return kExitConfig;
}

}  // namespace netspec
