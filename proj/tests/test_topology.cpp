#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "p4bft/assets.hpp"
#include "p4bft/topology.hpp"

using namespace p4bft;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(P4BFT_SOURCE_DIR) + "/" + rel, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Floyd-Warshall over the edge list, independent of the BFS implementation.
std::vector<std::vector<std::uint32_t>> floyd(const Topology& t) {
  const auto n = t.switch_count();
  const std::uint32_t inf = 1u << 30;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : t.edges()) d[e.a][e.b] = d[e.b][e.a] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

TEST(Assets, EmbeddedCopiesMatchFiles) {
  EXPECT_EQ(assets::kFig2Edges, slurp("assets/topologies/fig2.edges"));
  EXPECT_EQ(assets::kFig2Attachments, slurp("assets/topologies/fig2.attach"));
  EXPECT_EQ(assets::kInternet2Edges, slurp("assets/topologies/internet2.edges"));
}

TEST(Fig2, Shape) {
  const auto t = fig2_topology();
  EXPECT_EQ(t.switch_count(), 5u);
  EXPECT_EQ(t.link_count(), 6u);
  EXPECT_EQ(t.controller_count(), 5u);
  const SwitchId s1 = *t.find_switch("S1"), s3 = *t.find_switch("S3");
  EXPECT_EQ(t.attachment_switches(), (std::vector<SwitchId>{s1, s3}));
  EXPECT_EQ(t.controllers_at(s1).size(), 2u);
  EXPECT_EQ(t.controllers_at(s3).size(), 3u);
  for (int i = 1; i <= 5; ++i) EXPECT_EQ(*t.find_switch("S" + std::to_string(i)), SwitchId(i - 1));
}

TEST(Internet2, Connected) {
  const auto t = internet2();
  EXPECT_EQ(t.switch_count(), 34u);
  EXPECT_EQ(t.link_count(), 43u);
  const auto h = all_pairs_hops(t);
  for (SwitchId a = 0; a < t.switch_count(); ++a)
    for (SwitchId b = 0; b < t.switch_count(); ++b) EXPECT_NE(h(a, b), kUnreachable);
}

TEST(Validation, RejectsMalformedInput) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidConfig;  // sentinel: no throw
  };
  EXPECT_EQ(code([] { topology_from_text(""); }), Errc::EmptyTopology);
  EXPECT_EQ(code([] { topology_from_text("A A\n"); }), Errc::SelfLoop);
  EXPECT_EQ(code([] { topology_from_text("A B\nB A\n"); }), Errc::DuplicateEdge);
  EXPECT_EQ(code([] { topology_from_text("A B\nC D\n"); }), Errc::Disconnected);
  EXPECT_EQ(code([] { topology_from_text("A B\n", "C1 Z\n"); }), Errc::DanglingAttachment);
  EXPECT_EQ(code([] { topology_from_text("A B C\n"); }), Errc::ParseError);
  EXPECT_EQ(code([] { fat_tree(3); }), Errc::OddK);
  EXPECT_EQ(code([] { random_topology(4, 5.0, 1, 1, 1); }), Errc::InfeasibleDegree);
  EXPECT_EQ(code([] { load_topology("/nonexistent/edges"); }), Errc::ParseError);
}

TEST(TextFormat, RoundTrip) {
  const auto t = fig2_topology();
  const auto u = topology_from_text(to_edge_list(t), to_attachment_list(t));
  EXPECT_EQ(u.edges(), t.edges());
  EXPECT_EQ(u.attachments(), t.attachments());
  const auto single = topology_from_text("X\n", "C1 X\n");
  EXPECT_EQ(single.switch_count(), 1u);
  EXPECT_EQ(topology_from_text(to_edge_list(single)).switch_count(), 1u);
}

TEST(FatTree, Counts) {
  for (std::size_t k : {2u, 4u, 6u, 8u}) {
    const auto t = fat_tree(k);
    EXPECT_EQ(t.switch_count(), 5 * k * k / 4) << k;
    EXPECT_EQ(t.link_count(), k * k * k / 2) << k;
    EXPECT_EQ(all_pairs_hops(t).diameter(), 4u) << k;
  }
}

TEST(Random, DegreeConnectivityAndDeterminism) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = random_topology(128, 4.0, 3, 7, seed);
    EXPECT_EQ(t.link_count(), 256u);
    EXPECT_EQ(t.controller_count(), 7u);
    EXPECT_EQ(t.attachment_switches().size(), 3u);
    const auto h = all_pairs_hops(t);
    EXPECT_NE(h.diameter(), kUnreachable);
    const auto u = random_topology(128, 4.0, 3, 7, seed);
    EXPECT_EQ(u.edges(), t.edges());
    EXPECT_EQ(u.attachments(), t.attachments());
  }
}

TEST(PlaceControllers, EvenSplitDistinctSwitches) {
  Rng rng(5);
  const auto t = place_controllers(internet2(), 17, 7, rng);
  EXPECT_EQ(t.attachment_switches().size(), 7u);
  std::vector<std::size_t> sizes;
  for (SwitchId j : t.attachment_switches()) sizes.push_back(t.controllers_at(j).size());
  for (auto s : sizes) EXPECT_TRUE(s == 2 || s == 3);
  EXPECT_THROW(place_controllers(internet2(), 2, 3, rng), Error);
}

TEST(Paths, BfsAgreesWithFloydWarshall) {
  for (const auto& t : {fig2_topology(), internet2(), fat_tree(4), random_topology(40, 3.0, 1, 1, 9)}) {
    const auto h = all_pairs_hops(t);
    const auto d = floyd(t);
    for (SwitchId a = 0; a < t.switch_count(); ++a) {
      for (SwitchId b = 0; b < t.switch_count(); ++b) {
        ASSERT_EQ(h(a, b), d[a][b]);
        if (a == b) continue;
        const auto path = shortest_path(t, h, a, b);
        ASSERT_EQ(path.size(), d[a][b] + 1);
        for (std::size_t i = 1; i < path.size(); ++i) ASSERT_TRUE(t.has_edge(path[i - 1], path[i]));
      }
    }
  }
}

TEST(Paths, NextHopPrefersLowestId) {
  const auto t = fig2_topology();
  const auto h = all_pairs_hops(t);
  // S3 -> S4 has two shortest paths, via S2 (id 1) and via S5 (id 4).
  EXPECT_EQ(next_hop(t, h, 2, 3), 1u);
  EXPECT_EQ(next_hop(t, h, 3, 3), kNoSwitch);
}

TEST(Failures, LinkAndSwitchRemoval) {
  const auto t = fig2_topology();
  const auto u = t.with_link_removed(Edge{2, 4});  // S3-S5
  EXPECT_EQ(u.link_count(), 5u);
  EXPECT_TRUE(u.is_up(4));
  // Removing S4 leaves S5 hanging off S3 only.
  const auto v = t.with_switch_removed(3);
  EXPECT_FALSE(v.is_up(3));
  EXPECT_EQ(v.up_switches().size(), 4u);
  const auto h = all_pairs_hops(v);
  EXPECT_EQ(h(0, 4), 3u);
  // Cutting S5 off entirely marks it down as well.
  const auto w = v.with_link_removed(Edge{2, 4});
  EXPECT_FALSE(w.is_up(4));
}
