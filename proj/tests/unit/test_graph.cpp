#include <cascadex/error.hpp>
#include <cascadex/graph.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <map>
#include <set>

#include "support.hpp"

using namespace cascadex;
using testing_support::make_graph;

namespace {

void expect_simple_symmetric(const SocialGraph& g) {
  for (NodeIndex i = 0; i < g.n_nodes(); ++i) {
    auto row = g.peers(i);
    EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
    EXPECT_EQ(std::adjacent_find(row.begin(), row.end()), row.end());
    EXPECT_EQ(g.degree(i), row.size());
    for (NodeIndex j : row) {
      EXPECT_NE(i, j);
      EXPECT_TRUE(g.has_edge(j, i));
    }
  }
}

SocialGraph load_text(const std::string& text, GraphFormat fmt, const std::string& name) {
  auto dir = testing_support::temp_dir("graph_" + name);
  testing_support::write_file(dir / "g.txt", text);
  return load_graph(dir / "g.txt", fmt);
}

}  // namespace

TEST(Graph, PathOfTwoEdges) {
  auto g = load_text("0 1\n1 2\n", GraphFormat::EdgeList, "path");
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.n_edges(), 2u);
  EXPECT_EQ(g.degree(*g.index_of(1)), 2u);
}

TEST(Graph, DuplicateCollapsed) {
  auto g = load_text("0 1\n1 0\n", GraphFormat::EdgeList, "dup");
  EXPECT_EQ(g.n_nodes(), 2u);
  EXPECT_EQ(g.n_edges(), 1u);
}

TEST(Graph, SelfLoopDropped) {
  auto g = load_text("0 0\n", GraphFormat::EdgeList, "loop");
  EXPECT_EQ(g.n_nodes(), 1u);
  EXPECT_EQ(g.n_edges(), 0u);
}

TEST(Graph, SparseIdsReindexed) {
  auto g = load_text("# comment\n100 7\n\n7 42\n", GraphFormat::EdgeList, "ids");
  ASSERT_EQ(g.n_nodes(), 3u);
  ASSERT_TRUE(g.index_of(100));
  ASSERT_TRUE(g.index_of(42));
  EXPECT_FALSE(g.index_of(1));
  EXPECT_TRUE(g.has_edge(*g.index_of(7), *g.index_of(42)));
  EXPECT_EQ(g.external_id(*g.index_of(100)), 100);
}

TEST(Graph, MalformedLineNamesLine) {
  try {
    load_text("0 1\n1 2 3\n", GraphFormat::EdgeList, "bad");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    load_text("0 1\n\nx 2\n", GraphFormat::EdgeList, "bad2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_text("5\n", GraphFormat::EdgeList, "bad3"), ParseError);
  EXPECT_THROW(load_text("-1 2\n", GraphFormat::EdgeList, "bad4"), ParseError);
}

TEST(Graph, MissingFile) {
  EXPECT_THROW(load_graph("/nonexistent/cascadex.txt", GraphFormat::EdgeList), Error);
}

TEST(Graph, GmlSubset) {
  const char* text = R"(graph [
  directed 0
  node [ id 3 label "a" ]
  node [ id 5 ]
  node [ id 9 graphics [ x 1 y 2 ] ]
  edge [ source 3 target 5 weight 2 ]
  edge [ source 5 target 3 ]
]
)";
  auto g = load_text(text, GraphFormat::Gml, "gml");
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.n_edges(), 1u);
  EXPECT_EQ(g.degree(*g.index_of(9)), 0u);
  EXPECT_THROW(load_text("graph [ edge [ source 1 ] ]", GraphFormat::Gml, "gml_bad"), ParseError);
}

TEST(Graph, EdgeListRoundTripKeepsIsolated) {
  auto g = SocialGraph::from_edges(4, std::vector<std::pair<NodeIndex, NodeIndex>>{{0, 1}, {1, 2}},
                                   {10, 11, 12, 13});
  auto dir = testing_support::temp_dir("roundtrip");
  save_edge_list(g, dir / "e.txt");
  auto h = load_graph(dir / "e.txt", GraphFormat::EdgeList);
  EXPECT_EQ(h.n_nodes(), 4u);
  EXPECT_EQ(h.n_edges(), 2u);
  ASSERT_TRUE(h.index_of(13));
  EXPECT_EQ(h.degree(*h.index_of(13)), 0u);
  EXPECT_TRUE(h.has_edge(*h.index_of(10), *h.index_of(11)));
}

TEST(Graph, WithNodesAndPermuted) {
  auto g = make_graph(3, {{0, 1}, {1, 2}});
  std::vector<ExternalId> extra{2, 7};
  auto h = g.with_nodes(extra);
  EXPECT_EQ(h.n_nodes(), 4u);
  EXPECT_EQ(h.external_id(3), 7);
  std::vector<NodeIndex> perm{2, 0, 1};
  auto p = g.permuted(perm);
  EXPECT_TRUE(p.has_edge(2, 0));
  EXPECT_TRUE(p.has_edge(0, 1));
  EXPECT_FALSE(p.has_edge(2, 1));
  EXPECT_EQ(p.external_id(2), 0);
  expect_simple_symmetric(p);
  std::vector<NodeIndex> bad{0, 0, 1};
  EXPECT_THROW(g.permuted(bad), std::invalid_argument);
}

TEST(ConfigurationModel, SingleEdge) {
  auto g = configuration_model({{1, 1}}, 3);
  EXPECT_EQ(g.n_edges(), 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
}

TEST(ConfigurationModel, Zeros) {
  auto g = configuration_model({{0, 0, 0}}, 3);
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.n_edges(), 0u);
}

TEST(ConfigurationModel, OddSumRejected) {
  EXPECT_THROW(configuration_model({{1, 2}}, 1), std::invalid_argument);
}

// Enumerate the 15 perfect matchings of the stubs of [2,2,2] and compare the
// distribution of realized edge sets against the generator.
TEST(ConfigurationModel, TwoTwoTwoMatchesEnumeration) {
  const std::vector<NodeIndex> stubs{0, 0, 1, 1, 2, 2};
  std::map<std::set<std::pair<NodeIndex, NodeIndex>>, double> exact;
  std::vector<int> used(6, 0);
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  int matchings = 0;
  auto rec = [&](auto&& self) -> void {
    int first = -1;
    for (int i = 0; i < 6; ++i)
      if (!used[i]) { first = i; break; }
    if (first < 0) {
      std::set<std::pair<NodeIndex, NodeIndex>> es;
      for (auto [a, b] : pairs)
        if (a != b) es.insert({std::min(a, b), std::max(a, b)});
      exact[es] += 1.0;
      ++matchings;
      return;
    }
    used[first] = 1;
    for (int j = first + 1; j < 6; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      pairs.emplace_back(stubs[first], stubs[j]);
      self(self);
      pairs.pop_back();
      used[j] = 0;
    }
    used[first] = 0;
  };
  rec(rec);
  ASSERT_EQ(matchings, 15);
  for (auto& [k, v] : exact) v /= 15.0;

  std::map<std::set<std::pair<NodeIndex, NodeIndex>>, double> seen;
  const int runs = 30000;
  for (int s = 0; s < runs; ++s) {
    auto g = configuration_model({{2, 2, 2}}, static_cast<std::uint64_t>(s));
    std::set<std::pair<NodeIndex, NodeIndex>> es;
    for (NodeIndex i = 0; i < 3; ++i) {
      EXPECT_LE(g.degree(i), 2u);
      for (NodeIndex j : g.peers(i))
        if (i < j) es.insert({i, j});
    }
    // only subsets of the triangle are reachable
    EXPECT_LE(es.size(), 3u);
    seen[es] += 1.0 / runs;
  }
  for (auto& [k, v] : seen) EXPECT_TRUE(exact.count(k));
  for (auto& [k, p] : exact) {
    const double sd = std::sqrt(p * (1 - p) / runs);
    EXPECT_NEAR(seen[k], p, 5 * sd) << k.size() << " edges";
  }
}

TEST(ConfigurationModel, DegreesBoundedAndDeterministic) {
  DegreeSequence seq;
  cascadex::RandomStream rng(5, 1);
  for (int i = 0; i < 300; ++i) seq.degrees.push_back(1 + rng.next_below(12));
  if (std::accumulate(seq.degrees.begin(), seq.degrees.end(), std::size_t{0}) % 2) ++seq.degrees[0];
  auto a = configuration_model(seq, 9);
  auto b = configuration_model(seq, 9);
  expect_simple_symmetric(a);
  for (NodeIndex i = 0; i < a.n_nodes(); ++i) EXPECT_LE(a.degree(i), seq.degrees[i]);
  EXPECT_TRUE(std::ranges::equal(a.column_indices(), b.column_indices()));
  auto c = configuration_model(seq, 10);
  EXPECT_FALSE(std::ranges::equal(a.column_indices(), c.column_indices()));
}

TEST(HolmeKim, MinimalGrowth) {
  auto g = powerlaw_cluster_graph(4, 3, 0.0, 1);
  EXPECT_EQ(g.n_nodes(), 4u);
  EXPECT_EQ(g.n_edges(), 3u);
  EXPECT_EQ(g.degree(3), 3u);
}

TEST(HolmeKim, EdgeCountRange) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto g = powerlaw_cluster_graph(10, 3, 0.1, s);
    EXPECT_EQ(g.n_nodes(), 10u);
    EXPECT_GE(g.n_edges(), 3u * 6u);
    EXPECT_LE(g.n_edges(), 3u * 7u);
    expect_simple_symmetric(g);
  }
}

TEST(HolmeKim, Preconditions) {
  EXPECT_THROW(powerlaw_cluster_graph(2, 3, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(powerlaw_cluster_graph(3, 3, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(powerlaw_cluster_graph(10, 0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(powerlaw_cluster_graph(10, 2, 1.5, 1), std::invalid_argument);
}

TEST(HolmeKim, LargerGraphProperties) {
  auto g = powerlaw_cluster_graph(2000, 3, 0.1, 7);
  auto h = powerlaw_cluster_graph(2000, 3, 0.1, 7);
  expect_simple_symmetric(g);
  EXPECT_TRUE(std::ranges::equal(g.column_indices(), h.column_indices()));
  EXPECT_LE(g.n_edges(), 3u * 1997u);
  EXPECT_GE(g.n_edges(), 3u * 1997u - 100u);
  // every grown node keeps at least m edges
  for (NodeIndex i = 3; i < g.n_nodes(); ++i) EXPECT_GE(g.degree(i), 3u);
  // heavy tail: the hub is far above the mean degree of 6
  EXPECT_GT(g.max_degree(), 40u);
}

TEST(ActivePeerCounts, Triangle) {
  auto g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  std::vector<std::uint8_t> mask{1, 0, 0};
  EXPECT_EQ(active_peer_counts(g, mask), (std::vector<std::uint32_t>{0, 1, 1}));
  std::vector<std::uint8_t> none(3, 0);
  EXPECT_EQ(active_peer_counts(g, none), (std::vector<std::uint32_t>{0, 0, 0}));
}

TEST(ActivePeerCounts, Star) {
  auto g = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  std::vector<std::uint8_t> mask{0, 1, 1, 1, 1};
  EXPECT_EQ(active_peer_counts(g, mask), (std::vector<std::uint32_t>{4, 0, 0, 0, 0}));
}

TEST(ActivePeerCounts, LengthMismatch) {
  auto g = make_graph(3, {{0, 1}});
  std::vector<std::uint8_t> mask{1, 0};
  EXPECT_THROW(active_peer_counts(g, mask), std::invalid_argument);
}

TEST(ActivePeerCounts, BruteForceRandom) {
  cascadex::RandomStream rng(11, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.next_below(49);
    // dense adjacency oracle
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    for (NodeIndex i = 0; i < n; ++i)
      for (NodeIndex j = 0; j < n; ++j)
        if (rng.next_uniform() < 0.1) {
          edges.emplace_back(i, j);
          if (i != j) adj[i][j] = adj[j][i] = 1;
        }
    auto g = SocialGraph::from_edges(n, edges);
    expect_simple_symmetric(g);
    std::vector<std::uint8_t> mask(n);
    for (auto& m : mask) m = rng.next_uniform() < 0.4;
    auto counts = active_peer_counts(g, mask);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t a = 0;
      for (std::size_t j = 0; j < n; ++j) a += adj[i][j] && mask[j];
      ASSERT_EQ(counts[i], a);
    }
  }
}
