#include "netspec/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netspec/errors.hpp"
#include "netspec/rng.hpp"
#include "netspec/spectrum.hpp"
#include "netspec/stage1.hpp"

namespace netspec {

namespace {

// wbar + delta, pulled back by ulps if rounding pushed it past wbar +- a.
double perturbed_entry(double wbar, double delta, double a) {
  double w = wbar + delta;
  while (std::abs(w - wbar) > a) w = std::nextafter(w, wbar);
  return w;
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

WAssignment perturb_w(const WAssignment& wbar, const PerturbationSpec& spec) {
  if (!(spec.magnitude > 0.0) || !std::isfinite(spec.magnitude)) {
    throw ConfigError("perturbation magnitude must be positive");
  }
  const double a = spec.magnitude;
  Rng rng(spec.seed);
  DenseMatrix w = wbar.w;
  const Graph& g = wbar.graph;
  for (NodeId i = 1; i <= g.node_count(); ++i) {
    w(i - 1, i - 1) = perturbed_entry(w(i - 1, i - 1), rng.uniform(-a, a), a);
    for (NodeId j : g.neighbors(i)) {
      w(i - 1, j - 1) = perturbed_entry(w(i - 1, j - 1), rng.uniform(-a, a), a);
    }
  }
  return {g, std::move(w)};
}

SweepReport perturbation_sweep(const WAssignment& wbar, std::span<const double> magnitudes,
                               std::size_t trials, std::uint64_t seed, double rank_tol) {
  if (magnitudes.empty()) throw ConfigError("no perturbation magnitudes given");
  if (trials == 0) throw ConfigError("sweep needs at least one trial");
  for (double a : magnitudes)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("magnitudes must be non-negative");

  const std::size_t n = wbar.graph.node_count();
  const ComplexVector reference = find_roots(charpoly_oracle(wbar.w));

  SweepReport report;
  for (double a : magnitudes) {
    std::vector<double> errors, conds;
    std::size_t nonsingular = 0, failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const WAssignment w =
          a > 0.0 ? perturb_w(wbar, {a, derive_seed(seed, 2 * t)}) : wbar;
      const std::vector<double> y0 = init_y0(n, derive_seed(seed, 2 * t + 1));
      const DenseMatrix k = krylov_matrix(w.w, y0);
      const std::size_t r = rank(k, rank_tol);
      const double cond = condition_estimate(k);
      double err = std::numeric_limits<double>::quiet_NaN();
      try {
        err = match_spectra(find_roots(charpoly_oracle(w.w)), reference).max_abs_error;
      } catch (const RootFindingError&) {
        ++failures;
      }
      if (r == n) ++nonsingular;
      errors.push_back(err);
      conds.push_back(cond);
      report.trials.push_back({a, t, r, cond, err});
    }
    report.summaries.push_back({a, trials,
                                static_cast<double>(nonsingular) / static_cast<double>(trials),
                                median(errors), median(conds), failures});
  }
  return report;
}

}  // namespace netspec
