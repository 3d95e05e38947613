#include "netspec/stage1.hpp"

#include <algorithm>
#include <string>

#include "netspec/errors.hpp"
#include "netspec/rng.hpp"

namespace netspec {

NodeState::NodeState(NodeId id, double self_weight,
                     std::vector<std::pair<NodeId, double>> neighbor_weights, double y0)
    : id_(id), self_weight_(self_weight), history_{y0} {
  std::sort(neighbor_weights.begin(), neighbor_weights.end());
  for (const auto& [j, w] : neighbor_weights) {
    neighbors_.push_back(j);
    neighbor_weights_.push_back(w);
  }
}

std::vector<RoundMessage> NodeState::emit() const {
  std::vector<RoundMessage> out;
  out.reserve(neighbors_.size());
  for (NodeId j : neighbors_) out.push_back({id_, j, history_.back(), round()});
  return out;
}

void NodeState::update(std::span<const RoundMessage> inbox) {
  if (inbox.size() != neighbors_.size()) {
    throw Error("node " + std::to_string(id_) + " expected " +
                std::to_string(neighbors_.size()) + " messages, got " +
                std::to_string(inbox.size()));
  }
  std::vector<const RoundMessage*> sorted;
  for (const RoundMessage& m : inbox) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const RoundMessage* a, const RoundMessage* b) { return a->from < b->from; });

  const double own = history_.back();
  double acc = 0.0;
  bool self_added = false;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const RoundMessage& m = *sorted[k];
    if (m.from != neighbors_[k] || m.to != id_ || m.round != round()) {
      throw Error("node " + std::to_string(id_) + " received an unexpected message from " +
                  std::to_string(m.from));
    }
    if (!self_added && id_ < m.from) {
      acc += self_weight_ * own;
      self_added = true;
    }
    acc += neighbor_weights_[k] * m.payload;
  }
  if (!self_added) acc += self_weight_ * own;
  history_.push_back(acc);
}

LocalEquation NodeState::equation() const {
  if (history_.size() < 2) throw Error("stage 1 has not run");
  const std::size_t n = history_.size() - 1;
  return {std::vector<double>(history_.begin(), history_.begin() + static_cast<std::ptrdiff_t>(n)),
          -history_.back()};
}

NodeState provision_node(const WAssignment& wa, NodeId i, double y0) {
  std::vector<std::pair<NodeId, double>> row;
  for (NodeId j : wa.graph.neighbors(i)) row.emplace_back(j, wa.w(i - 1, j - 1));
  return NodeState(i, wa.w(i - 1, i - 1), std::move(row), y0);
}

MessageBus::MessageBus(const Graph& g) : graph_(&g), inboxes_(g.node_count()) {}

void MessageBus::post(const RoundMessage& m) {
  if (!graph_->has_edge(m.from, m.to)) {
    throw Error("message " + std::to_string(m.from) + " -> " + std::to_string(m.to) +
                " does not follow an edge");
  }
  inboxes_.at(m.to - 1).push_back(m);
  ++delivered_;
  if (keep_log_) log_.push_back(m);
}

std::vector<RoundMessage> MessageBus::collect(NodeId to) {
  std::vector<RoundMessage> out;
  out.swap(inboxes_.at(to - 1));
  return out;
}

std::vector<double> init_y0(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(n);
  for (double& v : y) v = rng.uniform(-1.0, 1.0);
  return y;
}

Stage1Result run_stage1(const WAssignment& wa, std::span<const double> y0, MessageBus* bus) {
  const std::size_t n = wa.graph.node_count();
  if (y0.size() != n) throw DimensionError("y0 length does not match the node count");

  std::vector<NodeState> nodes;
  nodes.reserve(n);
  for (NodeId i = 1; i <= n; ++i) nodes.push_back(provision_node(wa, i, y0[i - 1]));

  MessageBus local(wa.graph);
  MessageBus& net = bus ? *bus : local;

  for (std::size_t t = 0; t < n; ++t) {
    for (const NodeState& node : nodes)
      for (const RoundMessage& m : node.emit()) net.post(m);
    // Barrier: every round-t message is in flight before anyone updates.
    for (NodeState& node : nodes) node.update(net.collect(node.id()));
  }

  Stage1Result res;
  res.messages = net.delivered();
  res.trace.assign(n + 1, std::vector<double>(n));
  for (const NodeState& node : nodes) {
    res.equations.push_back(node.equation());
    for (std::size_t t = 0; t <= n; ++t) res.trace[t][node.id() - 1] = node.history()[t];
  }
  return res;
}

LinearSystem assemble_system(std::span<const LocalEquation> eqs) {
  const std::size_t n = eqs.size();
  if (n == 0) throw DimensionError("no equations");
  DenseMatrix a(n, n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (eqs[i].a.size() != n) throw DimensionError("equation length mismatch");
    for (std::size_t k = 0; k < n; ++k) a(i, k) = eqs[i].a[k];
    b[i] = eqs[i].b;
  }
  return {std::move(a), std::move(b)};
}

}  // namespace netspec
