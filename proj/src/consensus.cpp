#include "netspec/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netspec/errors.hpp"

namespace netspec {

namespace {

void check_dims(std::size_t n, std::span<const LocalEquation> eqs, const Graph& g,
                const ConsensusParams& p) {
  if (g.node_count() != n || eqs.size() != n) {
    throw DimensionError("state, equations and graph disagree on the node count");
  }
  for (const LocalEquation& e : eqs) {
    if (e.a.size() != n) throw DimensionError("equation length does not match the node count");
  }
  if (p.alpha.size() != n) throw DimensionError("need one alpha per node");
  if (p.beta.size() != g.edges().size()) throw DimensionError("need one beta per edge");
}

// Flattened view of the network for the integrator's inner loop. Each node
// still evaluates its own derivative through node_derivative().
class FlowSystem {
 public:
  FlowSystem(std::span<const LocalEquation> eqs, const Graph& g, const ConsensusParams& p)
      : n_(g.node_count()), eqs_(eqs), g_(g), p_(p), incident_(n_) {
    const auto& edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      incident_[edges[e].i - 1].push_back({edges[e].j - 1, p.beta[e]});
      incident_[edges[e].j - 1].push_back({edges[e].i - 1, p.beta[e]});
    }
    std::size_t max_deg = 0;
    for (auto& inc : incident_) {
      std::sort(inc.begin(), inc.end(),
                [](const Incident& a, const Incident& b) { return a.other < b.other; });
      max_deg = std::max(max_deg, inc.size());
    }
    scratch_.resize(max_deg);
  }

  void rhs(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& inc = incident_[i];
      for (std::size_t k = 0; k < inc.size(); ++k) {
        scratch_[k] = {x.subspan(inc[k].other * n_, n_), inc[k].beta};
      }
      node_derivative(eqs_[i], p_.alpha[i], x.subspan(i * n_, n_),
                      std::span<const NeighborEstimate>(scratch_.data(), inc.size()),
                      out.subspan(i * n_, n_));
    }
  }

  double v(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto xi = x.subspan(i * n_, n_);
      double r = 0.0;
      for (std::size_t k = 0; k < n_; ++k) r += eqs_[i].a[k] * xi[k];
      r -= eqs_[i].b;
      s += p_.alpha[i] * r * r;
    }
    const auto& edges = g_.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto xi = x.subspan((edges[e].i - 1) * n_, n_);
      const auto xj = x.subspan((edges[e].j - 1) * n_, n_);
      double d2 = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        const double d = xi[k] - xj[k];
        d2 += d * d;
      }
      s += p_.beta[e] * d2;
    }
    return s;
  }

  // Size of the V change that rounding alone can produce at x: residuals and
  // differences are only known to a few ulps of the terms that form them.
  double rounding_floor(std::span<const double> x) const {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double slack = 4.0 * static_cast<double>(n_ + 2) * eps;
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto xi = x.subspan(i * n_, n_);
      double r = 0.0, mag = std::abs(eqs_[i].b);
      for (std::size_t k = 0; k < n_; ++k) {
        r += eqs_[i].a[k] * xi[k];
        mag += std::abs(eqs_[i].a[k] * xi[k]);
      }
      r -= eqs_[i].b;
      const double dr = slack * mag;
      s += p_.alpha[i] * dr * (2.0 * std::abs(r) + dr);
    }
    const auto& edges = g_.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto xi = x.subspan((edges[e].i - 1) * n_, n_);
      const auto xj = x.subspan((edges[e].j - 1) * n_, n_);
      for (std::size_t k = 0; k < n_; ++k) {
        const double d = std::abs(xi[k] - xj[k]);
        const double dd = slack * (std::abs(xi[k]) + std::abs(xj[k]));
        s += p_.beta[e] * dd * (2.0 * d + dd);
      }
    }
    return s;
  }

 private:
  struct Incident {
    std::size_t other;
    double beta;
  };

  std::size_t n_;
  std::span<const LocalEquation> eqs_;
  const Graph& g_;
  const ConsensusParams& p_;
  std::vector<std::vector<Incident>> incident_;
  mutable std::vector<NeighborEstimate> scratch_;
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ConsensusParams ConsensusParams::uniform(const Graph& g, double alpha, double beta) {
  ConsensusParams p;
  p.alpha.assign(g.node_count(), alpha);
  p.beta.assign(g.edges().size(), beta);
  return p;
}

void ConsensusParams::validate(const Graph& g) const {
  if (alpha.size() != g.node_count()) throw ConfigError("need one alpha per node");
  if (beta.size() != g.edges().size()) throw ConfigError("need one beta per edge");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("alpha must be positive");
  for (double b : beta)
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be non-negative");
  if (!(v_tol >= 0.0)) throw ConfigError("v_tol must be non-negative");
  if (!(sample_every > 0.0)) throw ConfigError("sample_every must be positive");
}

ConsensusState::ConsensusState(std::size_t n, std::vector<double> stacked, double time)
    : n_(n), x_(std::move(stacked)), time_(time) {
  if (x_.size() != n * n) throw DimensionError("stacked state must have N*N components");
  if (!all_finite(x_)) throw DimensionError("state is not finite");
}

ConsensusState ConsensusState::zeros(std::size_t n) {
  return ConsensusState(n, std::vector<double>(n * n, 0.0));
}

ConsensusState ConsensusState::replicated(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> s;
  s.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) s.insert(s.end(), x.begin(), x.end());
  return ConsensusState(n, std::move(s));
}

void node_derivative(const LocalEquation& eq, double alpha, std::span<const double> own,
                     std::span<const NeighborEstimate> neighbors, std::span<double> out) {
  const std::size_t n = own.size();
  double r = 0.0;
  for (std::size_t k = 0; k < n; ++k) r += eq.a[k] * own[k];
  r -= eq.b;
  const double scale = -alpha * r;
  for (std::size_t k = 0; k < n; ++k) out[k] = scale * eq.a[k];
  for (const NeighborEstimate& nb : neighbors) {
    for (std::size_t k = 0; k < n; ++k) out[k] -= nb.beta * (own[k] - nb.x[k]);
  }
}

double lyapunov_v(const ConsensusState& state, std::span<const LocalEquation> eqs,
                  const Graph& g, const ConsensusParams& params) {
  check_dims(state.node_count(), eqs, g, params);
  return FlowSystem(eqs, g, params).v(state.stacked());
}

std::vector<double> flow_rhs(const ConsensusState& state, std::span<const LocalEquation> eqs,
                             const Graph& g, const ConsensusParams& params) {
  check_dims(state.node_count(), eqs, g, params);
  std::vector<double> out(state.stacked().size());
  FlowSystem(eqs, g, params).rhs(state.stacked(), out);
  return out;
}

FlowResult integrate(std::span<const LocalEquation> eqs, const Graph& g,
                     const ConsensusParams& params, const ConsensusState& x_init) {
  const std::size_t n = x_init.node_count();
  check_dims(n, eqs, g, params);
  params.validate(g);
  const FlowSystem sys(eqs, g, params);

  const double h = params.step;
  const auto total_steps = static_cast<std::size_t>(std::ceil(params.t_max / h - 1e-9));
  const std::size_t sample_stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.sample_every / h)));
  const double t0 = x_init.time();

  std::vector<double> x = x_init.stacked();
  const std::size_t dim = x.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  FlowTrace trace{n, {}};
  double v = sys.v(x);
  if (!std::isfinite(v)) throw DivergenceError("initial V is not finite", t0);
  trace.samples.push_back({t0, x, v});
  double v_prev_sample = v;
  double floor_prev_sample = sys.rounding_floor(x);

  std::size_t step = 0;
  StopReason stop = StopReason::Horizon;
  if (v <= params.v_tol) stop = StopReason::Tolerance;

  while (stop != StopReason::Tolerance && step < total_steps) {
    sys.rhs(x, k1);
    for (std::size_t k = 0; k < dim; ++k) tmp[k] = x[k] + 0.5 * h * k1[k];
    sys.rhs(tmp, k2);
    for (std::size_t k = 0; k < dim; ++k) tmp[k] = x[k] + 0.5 * h * k2[k];
    sys.rhs(tmp, k3);
    for (std::size_t k = 0; k < dim; ++k) tmp[k] = x[k] + h * k3[k];
    sys.rhs(tmp, k4);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] += (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    ++step;
    const double t = t0 + static_cast<double>(step) * h;

    v = sys.v(x);
    if (!std::isfinite(v) || !all_finite(x)) {
      throw DivergenceError("state became non-finite at t = " + std::to_string(t), t);
    }
    if (v <= params.v_tol) stop = StopReason::Tolerance;

    const bool last = stop == StopReason::Tolerance || step == total_steps;
    if (step % sample_stride == 0 || last) {
      const double floor = sys.rounding_floor(x);
      if (v > v_prev_sample * (1.0 + 1e-9) + floor + floor_prev_sample) {
        throw StepSizeError("V increased from " + std::to_string(v_prev_sample) + " to " +
                                std::to_string(v) + " at t = " + std::to_string(t) +
                                "; reduce the step size",
                            t);
      }
      trace.samples.push_back({t, x, v});
      v_prev_sample = v;
      floor_prev_sample = floor;
    }
  }

  ConsensusState final_state(n, x, t0 + static_cast<double>(step) * h);
  return {std::move(trace), std::move(final_state), stop, step};
}

double flow_stiffness_bound(std::span<const LocalEquation> eqs, const Graph& g,
                            const ConsensusParams& params) {
  check_dims(g.node_count(), eqs, g, params);
  double hyper = 0.0;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    double a2 = 0.0;
    for (double a : eqs[i].a) a2 += a * a;
    hyper = std::max(hyper, params.alpha[i] * a2);
  }
  std::vector<double> degree(g.node_count(), 0.0);
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    degree[g.edges()[e].i - 1] += params.beta[e];
    degree[g.edges()[e].j - 1] += params.beta[e];
  }
  return hyper + 2.0 * *std::max_element(degree.begin(), degree.end());
}

double stable_step(std::span<const LocalEquation> eqs, const Graph& g,
                   const ConsensusParams& params) {
  return 2.5 / flow_stiffness_bound(eqs, g, params);
}

double max_node_error(std::span<const double> stacked, std::span<const double> x_star) {
  const std::size_t n = x_star.size();
  if (stacked.size() != n * n) throw DimensionError("stacked state must have N*N components");
  double m = 0.0;
  for (std::size_t k = 0; k < stacked.size(); ++k) {
    m = std::max(m, std::abs(stacked[k] - x_star[k % n]));
  }
  return m;
}

double decay_slope(const FlowTrace& trace, std::span<const double> x_star) {
  const std::size_t n = x_star.size();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t s = trace.samples.size() / 2; s < trace.samples.size(); ++s) {
    const auto& smp = trace.samples[s];
    double e2 = 0.0;
    for (std::size_t k = 0; k < smp.x.size(); ++k) {
      const double d = smp.x[k] - x_star[k % n];
      e2 += d * d;
    }
    if (e2 > 0.0) pts.emplace_back(smp.t, 0.5 * std::log(e2));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double tm = 0.0, ym = 0.0;
  for (const auto& [t, y] : pts) {
    tm += t;
    ym += y;
  }
  tm /= static_cast<double>(pts.size());
  ym /= static_cast<double>(pts.size());
  double stt = 0.0, sty = 0.0;
  for (const auto& [t, y] : pts) {
    stt += (t - tm) * (t - tm);
    sty += (t - tm) * (y - ym);
  }
  if (stt == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sty / stt;
}

}  // namespace netspec
