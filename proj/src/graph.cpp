#include "netspec/graph.hpp"

#include <algorithm>
#include <string>

#include "netspec/errors.hpp"
#include "netspec/rng.hpp"

namespace netspec {

Graph::Graph(std::size_t node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)), adj_(node_count) {
  if (n_ < 2) throw GraphError("graph needs at least 2 nodes");
  for (Edge& e : edges_) {
    if (e.i == e.j) throw GraphError("self-loop at node " + std::to_string(e.i));
    if (e.i < 1 || e.j < 1 || e.i > n_ || e.j > n_) {
      throw GraphError("edge {" + std::to_string(e.i) + "," + std::to_string(e.j) +
                       "} references a node outside 1.." + std::to_string(n_));
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw GraphError("duplicate edge {" + std::to_string(dup->i) + "," +
                     std::to_string(dup->j) + "}");
  }
  if (!is_connected(n_, edges_)) throw GraphError("graph is not connected");
  for (const Edge& e : edges_) {
    adj_[e.i - 1].push_back(e.j);
    adj_[e.j - 1].push_back(e.i);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

bool Graph::has_edge(NodeId i, NodeId j) const { return edge_index(i, j).has_value(); }

std::optional<std::size_t> Graph::edge_index(NodeId i, NodeId j) const {
  if (i > j) std::swap(i, j);
  const Edge key{i, j};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges) {
  if (node_count == 0) return false;
  std::vector<std::vector<NodeId>> adj(node_count);
  for (const Edge& e : edges) {
    adj[e.i - 1].push_back(e.j - 1);
    adj[e.j - 1].push_back(e.i - 1);
  }
  std::vector<bool> seen(node_count, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == node_count;
}

GraphKind parse_graph_kind(std::string_view s) {
  if (s == "path") return GraphKind::Path;
  if (s == "cycle") return GraphKind::Cycle;
  if (s == "complete") return GraphKind::Complete;
  if (s == "erdos_renyi") return GraphKind::ErdosRenyi;
  throw ConfigError("unknown graph kind '" + std::string(s) + "'");
}

std::string_view to_string(GraphKind k) {
  switch (k) {
    case GraphKind::Path: return "path";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::Complete: return "complete";
    case GraphKind::ErdosRenyi: return "erdos_renyi";
  }
  return "?";
}

Graph generate_graph(GraphKind kind, std::size_t n, std::uint64_t seed,
                     std::optional<double> edge_prob, int max_retries) {
  if (n < 2) throw GenerationError("graph needs at least 2 nodes");
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::Path:
      for (NodeId i = 1; i < n; ++i) edges.push_back({i, i + 1});
      return Graph(n, std::move(edges));
    case GraphKind::Cycle:
      if (n < 3) throw GenerationError("cycle graph needs at least 3 nodes");
      for (NodeId i = 1; i < n; ++i) edges.push_back({i, i + 1});
      edges.push_back({1, n});
      return Graph(n, std::move(edges));
    case GraphKind::Complete:
      for (NodeId i = 1; i <= n; ++i)
        for (NodeId j = i + 1; j <= n; ++j) edges.push_back({i, j});
      return Graph(n, std::move(edges));
    case GraphKind::ErdosRenyi: {
      if (!edge_prob || !(*edge_prob > 0.0 && *edge_prob <= 1.0)) {
        throw GenerationError("erdos_renyi needs edge_prob in (0, 1]");
      }
      Rng rng(seed);
      for (int attempt = 0; attempt < max_retries; ++attempt) {
        edges.clear();
        for (NodeId i = 1; i <= n; ++i)
          for (NodeId j = i + 1; j <= n; ++j)
            if (rng.bernoulli(*edge_prob)) edges.push_back({i, j});
        if (is_connected(n, edges)) return Graph(n, std::move(edges));
      }
      throw GenerationError("no connected erdos_renyi graph after " +
                            std::to_string(max_retries) + " draws");
    }
  }
  throw GenerationError("unknown graph kind");
}

WAssignment::WAssignment(Graph g, DenseMatrix m) : graph(std::move(g)), w(std::move(m)) {
  if (!w.square() || w.rows() != graph.node_count()) {
    throw DimensionError("W must be " + std::to_string(graph.node_count()) + "x" +
                         std::to_string(graph.node_count()));
  }
}

WKind parse_w_kind(std::string_view s) {
  if (s == "adjacency") return WKind::Adjacency;
  if (s == "laplacian") return WKind::Laplacian;
  if (s == "random_weights") return WKind::RandomWeights;
  throw ConfigError("unknown W kind '" + std::string(s) + "'");
}

std::string_view to_string(WKind k) {
  switch (k) {
    case WKind::Adjacency: return "adjacency";
    case WKind::Laplacian: return "laplacian";
    case WKind::RandomWeights: return "random_weights";
  }
  return "?";
}

DenseMatrix adjacency_matrix(const Graph& g) {
  DenseMatrix a(g.node_count(), g.node_count());
  for (const Edge& e : g.edges()) {
    a(e.i - 1, e.j - 1) = 1.0;
    a(e.j - 1, e.i - 1) = 1.0;
  }
  return a;
}

DenseMatrix laplacian_matrix(const Graph& g) {
  DenseMatrix l(g.node_count(), g.node_count());
  for (const Edge& e : g.edges()) {
    l(e.i - 1, e.j - 1) = -1.0;
    l(e.j - 1, e.i - 1) = -1.0;
    l(e.i - 1, e.i - 1) += 1.0;
    l(e.j - 1, e.j - 1) += 1.0;
  }
  return l;
}

WAssignment build_w(const Graph& g, WKind kind, std::uint64_t seed) {
  switch (kind) {
    case WKind::Adjacency: return {g, adjacency_matrix(g)};
    case WKind::Laplacian: return {g, laplacian_matrix(g)};
    case WKind::RandomWeights: {
      Rng rng(seed);
      DenseMatrix w(g.node_count(), g.node_count());
      for (NodeId i = 1; i <= g.node_count(); ++i) {
        w(i - 1, i - 1) = rng.uniform(-1.0, 1.0);
        for (NodeId j : g.neighbors(i)) w(i - 1, j - 1) = rng.uniform(-1.0, 1.0);
      }
      return {g, std::move(w)};
    }
  }
  throw ConfigError("unknown W kind");
}

std::vector<Violation> validate_assumption1(const WAssignment& wa) {
  std::vector<Violation> out;
  const std::size_t n = wa.graph.node_count();
  for (NodeId i = 1; i <= n; ++i)
    for (NodeId j = 1; j <= n; ++j) {
      if (i == j) continue;
      const double v = wa.w(i - 1, j - 1);
      if (v != 0.0 && !wa.graph.has_edge(i, j)) out.push_back({i, j, v});
    }
  return out;
}

}  // namespace netspec
