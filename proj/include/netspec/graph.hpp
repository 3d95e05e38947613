#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "netspec/linalg.hpp"

namespace netspec {

/// Node ids are 1-based: V = {1, ..., N}.
using NodeId = std::size_t;

struct Edge {
  NodeId i;
  NodeId j;  // i < j after normalization

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected, connected simple graph on N >= 2 nodes.
class Graph {
 public:
  /// Throws GraphError on self-loops, duplicates, out-of-range ids or a
  /// disconnected result.
  Graph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return n_; }
  /// Sorted, each edge stored once with i < j.
  const std::vector<Edge>& edges() const { return edges_; }
  /// Sorted ascending.
  const std::vector<NodeId>& neighbors(NodeId i) const { return adj_.at(i - 1); }
  bool has_edge(NodeId i, NodeId j) const;
  std::optional<std::size_t> edge_index(NodeId i, NodeId j) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adj_;
};

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges);

enum class GraphKind { Path, Cycle, Complete, ErdosRenyi };

GraphKind parse_graph_kind(std::string_view s);
std::string_view to_string(GraphKind k);

inline constexpr int kDefaultGenerationRetries = 1000;

/// Erdos-Renyi draws are repeated with fresh randomness until connected;
/// GenerationError after `max_retries` failures.
Graph generate_graph(GraphKind kind, std::size_t n, std::uint64_t seed = 0,
                     std::optional<double> edge_prob = std::nullopt,
                     int max_retries = kDefaultGenerationRetries);

/// A graph together with a matrix W whose rows the nodes own.
struct WAssignment {
  WAssignment(Graph g, DenseMatrix w);

  Graph graph;
  DenseMatrix w;
};

enum class WKind { Adjacency, Laplacian, RandomWeights };

WKind parse_w_kind(std::string_view s);
std::string_view to_string(WKind k);

/// RandomWeights draws w_ii and every directed w_ij on an edge uniformly on
/// [-1, 1], node-major with the diagonal first and neighbors ascending.
WAssignment build_w(const Graph& g, WKind kind, std::uint64_t seed = 0);

DenseMatrix adjacency_matrix(const Graph& g);
DenseMatrix laplacian_matrix(const Graph& g);

struct Violation {
  NodeId row;
  NodeId col;
  double value;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every off-diagonal entry w_ij != 0 with {i, j} not an edge, row-major.
std::vector<Violation> validate_assumption1(const WAssignment& wa);

}  // namespace netspec
