#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netspec/graph.hpp"
#include "netspec/stage1.hpp"

namespace netspec {

struct ConsensusParams {
  std::vector<double> alpha;  // alpha_i, index i-1
  std::vector<double> beta;   // beta_{i,j}, aligned with Graph::edges()
  double step = 1e-3;
  double t_max = 200.0;
  double v_tol = 1e-12;
  double sample_every = 0.1;

  static ConsensusParams uniform(const Graph& g, double alpha, double beta);
  /// Throws ConfigError when a field breaks its invariant.
  void validate(const Graph& g) const;
};

/// Stacked estimates x = (x_1, ..., x_N), each x_i of length N.
class ConsensusState {
 public:
  ConsensusState(std::size_t n, std::vector<double> stacked, double time = 0.0);

  static ConsensusState zeros(std::size_t n);
  static ConsensusState replicated(std::span<const double> x);

  std::size_t node_count() const { return n_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::span<const double> node(NodeId i) const { return {x_.data() + (i - 1) * n_, n_}; }
  std::span<double> node(NodeId i) { return {x_.data() + (i - 1) * n_, n_}; }
  const std::vector<double>& stacked() const { return x_; }
  std::vector<double>& stacked() { return x_; }

 private:
  std::size_t n_;
  std::vector<double> x_;
  double time_;
};

struct NeighborEstimate {
  std::span<const double> x;
  double beta;
};

/// Node i's right-hand side:
///   -alpha_i (a_i^T x_i - b_i) a_i - sum_j beta_ij (x_i - x_j).
/// Inputs are exactly what node i holds or hears from its neighbors.
void node_derivative(const LocalEquation& eq, double alpha, std::span<const double> own,
                     std::span<const NeighborEstimate> neighbors, std::span<double> out);

/// V(x) = sum_i alpha_i (a_i^T x_i - b_i)^2 + sum_edges beta_ij |x_i - x_j|^2.
double lyapunov_v(const ConsensusState& state, std::span<const LocalEquation> eqs,
                  const Graph& g, const ConsensusParams& params);

/// Stacked derivative of every node.
std::vector<double> flow_rhs(const ConsensusState& state, std::span<const LocalEquation> eqs,
                             const Graph& g, const ConsensusParams& params);

struct FlowSample {
  double t;
  std::vector<double> x;  // stacked
  double v;
};

struct FlowTrace {
  std::size_t node_count = 0;
  std::vector<FlowSample> samples;  // strictly increasing t
};

enum class StopReason { Tolerance, Horizon };

struct FlowResult {
  FlowTrace trace;
  ConsensusState final_state;
  StopReason stop;
  std::size_t steps;
};

/// Fixed-step classical RK4 until V <= v_tol or t >= t_max. Samples every
/// `sample_every` (rounded to whole steps) plus the final state. Throws
/// StepSizeError if V grows between samples by more than 1e-9 relative (plus
/// the rounding noise of evaluating V at both samples) and DivergenceError on
/// a non-finite state.
FlowResult integrate(std::span<const LocalEquation> eqs, const Graph& g,
                     const ConsensusParams& params, const ConsensusState& x_init);

/// Upper bound on the largest eigenvalue of the quadratic form of V:
/// max_i alpha_i |a_i|^2 + 2 max_i sum_j beta_ij.
double flow_stiffness_bound(std::span<const LocalEquation> eqs, const Graph& g,
                            const ConsensusParams& params);

/// A step for which RK4 keeps V non-increasing on this flow (h * lambda <= 2.5).
double stable_step(std::span<const LocalEquation> eqs, const Graph& g,
                   const ConsensusParams& params);

/// Least-squares slope of log |x(t) - x*| over the second half of the samples.
/// NaN when fewer than two usable samples remain.
double decay_slope(const FlowTrace& trace, std::span<const double> x_star);

/// max_i |x_i - x*|_inf
double max_node_error(std::span<const double> stacked, std::span<const double> x_star);

}  // namespace netspec
