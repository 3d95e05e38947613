#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"

namespace netspec {

/// Node i's row of A x* = b: a_i = (y_i(0), ..., y_i(N-1)), b_i = -y_i(N).
struct LocalEquation {
  std::vector<double> a;
  double b = 0.0;
};

struct RoundMessage {
  NodeId from;
  NodeId to;
  double payload;
  std::size_t round;
};

/// One node of the Stage-1 iteration. It holds its own row of W and nothing
/// else; everything it learns about other nodes arrives as RoundMessages.
class NodeState {
 public:
  NodeState(NodeId id, double self_weight, std::vector<std::pair<NodeId, double>> neighbor_weights,
            double y0);

  NodeId id() const { return id_; }
  const std::vector<NodeId>& neighbors() const { return neighbors_; }
  const std::vector<double>& history() const { return history_; }
  std::size_t round() const { return history_.size() - 1; }

  /// y_i(t) addressed to every neighbor, t = current round.
  std::vector<RoundMessage> emit() const;

  /// y_i(t+1) = w_ii y_i(t) + sum_j w_ij y_j(t). The inbox must hold exactly
  /// one current-round message from each neighbor. Terms are accumulated in
  /// ascending node order, matching a dense row-times-vector product.
  void update(std::span<const RoundMessage> inbox);

  /// Requires N completed rounds (history length N + 1).
  LocalEquation equation() const;

 private:
  NodeId id_;
  double self_weight_;
  std::vector<NodeId> neighbors_;
  std::vector<double> neighbor_weights_;
  std::vector<double> history_;
};

/// Hands node i exactly w_ii and w_ij for j in N_i.
NodeState provision_node(const WAssignment& wa, NodeId i, double y0);

/// In-process synchronous network. Rejects any message that does not
/// travel along a graph edge.
class MessageBus {
 public:
  explicit MessageBus(const Graph& g);

  void post(const RoundMessage& m);
  /// Removes and returns the pending messages addressed to `to`.
  std::vector<RoundMessage> collect(NodeId to);
  std::size_t delivered() const { return delivered_; }
  const std::vector<RoundMessage>& log() const { return log_; }
  void keep_log(bool on) { keep_log_ = on; }

 private:
  const Graph* graph_;
  std::vector<std::vector<RoundMessage>> inboxes_;
  std::vector<RoundMessage> log_;
  std::size_t delivered_ = 0;
  bool keep_log_ = false;
};

struct Stage1Result {
  std::vector<LocalEquation> equations;      // index i-1 for node i
  std::vector<std::vector<double>> trace;    // trace[t][i-1] = y_i(t), t = 0..N
  std::size_t messages = 0;
};

/// y_i(0) independently uniform on [-1, 1].
std::vector<double> init_y0(std::size_t n, std::uint64_t seed);

/// N synchronous rounds; all round-t messages are delivered before any
/// round-t update. Pass a bus to inspect traffic afterwards.
Stage1Result run_stage1(const WAssignment& wa, std::span<const double> y0,
                        MessageBus* bus = nullptr);

struct LinearSystem {
  DenseMatrix a;
  std::vector<double> b;
};

/// Stacks the node rows into (A, b). Centralized; used for diagnostics only.
LinearSystem assemble_system(std::span<const LocalEquation> eqs);

}  // namespace netspec
