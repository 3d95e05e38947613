#include <gtest/gtest.h>

#include <set>

#include "netspec/csv.hpp"
#include "netspec/errors.hpp"
#include "netspec/fixture.hpp"
#include "netspec/rng.hpp"
#include "netspec/stage1.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace netspec;

TEST(InitY0, DeterministicAndInRange) {
  EXPECT_EQ(init_y0(2, 5), init_y0(2, 5));
  EXPECT_NE(init_y0(6, 1), init_y0(6, 2));
  for (std::uint64_t s = 0; s < 100; ++s)
    for (double v : init_y0(8, s)) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(Stage1, TwoNodeHandExample) {
  const WAssignment wa(generate_graph(GraphKind::Path, 2), DenseMatrix{{1, 1}, {1, 1}});
  const std::vector<double> y0{1, 0};
  const Stage1Result r = run_stage1(wa, y0);
  EXPECT_EQ(r.trace, (std::vector<std::vector<double>>{{1, 0}, {1, 1}, {2, 2}}));
  EXPECT_EQ(r.equations[0].a, (std::vector<double>{1, 1}));
  EXPECT_EQ(r.equations[0].b, -2.0);
  EXPECT_EQ(r.equations[1].a, (std::vector<double>{0, 1}));
  EXPECT_EQ(r.equations[1].b, -2.0);
  const LinearSystem sys = assemble_system(r.equations);
  const auto x = charpoly_oracle(wa.w).coeffs;
  EXPECT_EQ(x, (std::vector<double>{0, -2}));
  EXPECT_EQ(sys.a * std::span<const double>(x), sys.b);
  // two rounds, one message each way per round
  EXPECT_EQ(r.messages, 4u);
}

TEST(Stage1, ZeroEdgeWeightsGiveFixedPoint) {
  const Graph g = generate_graph(GraphKind::Path, 3);
  const WAssignment wa(g, DenseMatrix::identity(3));
  const std::vector<double> y0{0.3, -0.2, 0.9};
  const Stage1Result r = run_stage1(wa, y0);
  for (const auto& y : r.trace) EXPECT_EQ(y, y0);
  EXPECT_LT(rank(assemble_system(r.equations).a), 3u);
}

TEST(Stage1, SixNodeFixtureMatchesKrylovBitForBit) {
  const Fixture f = load_fixture(testpaths::fixture("paper_scenario1.json"));
  const Stage1Result r = run_stage1(f.assignment, *f.y0);
  const LinearSystem sys = assemble_system(r.equations);
  EXPECT_EQ(sys.a, krylov_matrix(f.assignment.w, *f.y0));
}

TEST(Stage1, SixNodeFixtureTraceRegression) {
  const Fixture f = load_fixture(testpaths::fixture("paper_scenario1.json"));
  const Stage1Result r = run_stage1(f.assignment, *f.y0);
  const auto stored =
      stage1_trace_from_table(read_csv(testpaths::fixture("paper_scenario1_stage1_trace.csv")));
  EXPECT_EQ(r.trace, stored);
}

TEST(Stage1, SixNodeSolveMatchesCharPoly) {
  const Fixture f = load_fixture(testpaths::fixture("paper_scenario1.json"));
  const LinearSystem sys = assemble_system(run_stage1(f.assignment, *f.y0).equations);
  const auto x = solve_dense(sys.a, sys.b);
  const auto want = oracle::charpoly_via_eigen(f.assignment.w);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], want[k], 1e-6);
}

TEST(Stage1, StackedIdentityOnRandomGraphs) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Graph g = generate_graph(GraphKind::ErdosRenyi, 3 + s % 8, s, 0.5);
    const WAssignment wa = build_w(g, WKind::RandomWeights, s + 1000);
    const auto y0 = init_y0(g.node_count(), s + 2000);
    const Stage1Result r = run_stage1(wa, y0);
    const LinearSystem sys = assemble_system(r.equations);
    EXPECT_EQ(sys.a, krylov_matrix(wa.w, y0));
    const auto seq = oracle::power_sequence(wa.w, y0);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      EXPECT_EQ(sys.b[i], -seq.back()[i]);
      for (std::size_t t = 0; t <= g.node_count(); ++t) EXPECT_EQ(r.trace[t][i], seq[t][i]);
    }
    const auto x = charpoly_oracle(wa.w).coeffs;
    auto res = sys.a * std::span<const double>(x);
    for (std::size_t k = 0; k < res.size(); ++k) res[k] -= sys.b[k];
    EXPECT_LE(norm_inf(res), 1e-6 * (1.0 + norm_inf(sys.b)));
  }
}

TEST(Stage1, MessagesFollowEdgesAndRounds) {
  const Graph g = generate_graph(GraphKind::ErdosRenyi, 7, 3, 0.4);
  const WAssignment wa = build_w(g, WKind::RandomWeights, 3);
  MessageBus bus(g);
  bus.keep_log(true);
  const Stage1Result r = run_stage1(wa, init_y0(7, 3), &bus);
  const std::size_t n = g.node_count();
  EXPECT_EQ(r.messages, 2 * g.edges().size() * n);
  EXPECT_EQ(bus.log().size(), r.messages);
  std::set<std::tuple<NodeId, NodeId, std::size_t>> seen;
  for (const RoundMessage& m : bus.log()) {
    EXPECT_TRUE(g.has_edge(m.from, m.to));
    EXPECT_LT(m.round, n);
    EXPECT_EQ(m.payload, r.trace[m.round][m.from - 1]);
    EXPECT_TRUE(seen.insert({m.from, m.to, m.round}).second);
  }
}

TEST(MessageBus, RejectsNonEdgeMessages) {
  const Graph g = generate_graph(GraphKind::Path, 3);
  MessageBus bus(g);
  EXPECT_THROW(bus.post({1, 3, 0.0, 0}), Error);
  bus.post({1, 2, 0.5, 0});
  EXPECT_EQ(bus.collect(2).size(), 1u);
  EXPECT_TRUE(bus.collect(2).empty());
}

TEST(NodeState, HoldsOnlyItsOwnRow) {
  const Graph g = generate_graph(GraphKind::Path, 3);
  DenseMatrix w{{1, 2, 0}, {3, 4, 5}, {0, 6, 7}};
  const WAssignment wa(g, w);
  NodeState node = provision_node(wa, 1, 1.0);
  EXPECT_EQ(node.neighbors(), (std::vector<NodeId>{2}));
  // Changing rows other than node 1's cannot affect its update.
  w(1, 0) = 100;
  w(2, 2) = -100;
  NodeState twin = provision_node(WAssignment(g, w), 1, 1.0);
  const std::vector<RoundMessage> inbox{{2, 1, 0.5, 0}};
  node.update(inbox);
  twin.update(inbox);
  EXPECT_EQ(node.history(), twin.history());
  EXPECT_EQ(node.history().back(), 1.0 * 1.0 + 2.0 * 0.5);
}

TEST(NodeState, RejectsWrongInbox) {
  const WAssignment wa = build_w(generate_graph(GraphKind::Path, 3), WKind::Adjacency);
  NodeState node = provision_node(wa, 2, 1.0);
  EXPECT_THROW(node.update(std::vector<RoundMessage>{{1, 2, 0.0, 0}}), Error);
  EXPECT_THROW(node.update(std::vector<RoundMessage>{{1, 2, 0.0, 0}, {1, 2, 0.0, 0}}), Error);
  EXPECT_THROW(node.update(std::vector<RoundMessage>{{1, 2, 0.0, 1}, {3, 2, 0.0, 1}}), Error);
  EXPECT_THROW(node.equation(), Error);
  node.update(std::vector<RoundMessage>{{3, 2, 1.0, 0}, {1, 2, 2.0, 0}});
  EXPECT_EQ(node.history(), (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(node.round(), 1u);
}

TEST(Stage1, CompleteGraphsAlwaysSingular) {
  for (std::size_t n : {3u, 4u}) {
    const WAssignment wa = build_w(generate_graph(GraphKind::Complete, n), WKind::Adjacency);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const LinearSystem sys = assemble_system(run_stage1(wa, init_y0(n, s)).equations);
      EXPECT_LT(rank(sys.a), n);
      EXPECT_EQ(rank(sys.a), oracle::svd_rank(sys.a));
    }
  }
}

TEST(Stage1, RandomWeightsAlmostAlwaysNonsingular) {
  int full = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Graph g = generate_graph(GraphKind::ErdosRenyi, 6, s, 0.5);
    const WAssignment wa = build_w(g, WKind::RandomWeights, derive_seed(s, 1));
    const LinearSystem sys =
        assemble_system(run_stage1(wa, init_y0(6, derive_seed(s, 2))).equations);
    if (rank(sys.a) == 6) ++full;
  }
  EXPECT_GE(full, 99);
}

TEST(Stage1, RejectsWrongY0Length) {
  const WAssignment wa = build_w(generate_graph(GraphKind::Path, 3), WKind::Adjacency);
  EXPECT_THROW(run_stage1(wa, std::vector<double>{1, 2}), DimensionError);
}
