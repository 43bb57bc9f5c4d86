#include <gtest/gtest.h>

#include "p4bft/assets.hpp"
#include "p4bft/sweep.hpp"

using namespace p4bft;

namespace {

SweepConfig internet2_sweep(std::size_t placements, std::uint64_t seed) {
  SweepConfig c;
  c.source = TopologySource::of(internet2());
  c.controllers = 5;
  c.clusters = 2;
  c.placements = placements;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Sweep, DeterministicAcrossRunsAndThreadCounts) {
  auto c = internet2_sweep(12, 7);
  c.threads = 1;
  const auto a = sweep_csv(sweep(c));
  c.threads = 4;
  const auto b = sweep_csv(sweep(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, sweep_csv(sweep(c)));
}

TEST(Sweep, RowsOrderedByIndex) {
  const auto r = sweep(internet2_sweep(8, 3));
  ASSERT_EQ(r.placements.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r.placements[i].index, i);
    EXPECT_EQ(r.placements[i].seed, derive_seed(3, i));
  }
}

TEST(Sweep, SummaryMatchesRows) {
  const auto r = sweep(internet2_sweep(10, 5));
  double sum = 0, lo = 1, hi = -1;
  for (const auto& p : r.placements) {
    EXPECT_DOUBLE_EQ(p.improvement, 1.0 - double(p.p4bft.total_in_network_footprint) /
                                              double(p.soa.total_in_network_footprint));
    sum += p.improvement;
    lo = std::min(lo, p.improvement);
    hi = std::max(hi, p.improvement);
  }
  EXPECT_DOUBLE_EQ(r.improvement.mean, sum / 10);
  EXPECT_DOUBLE_EQ(r.improvement.min, lo);
  EXPECT_DOUBLE_EQ(r.improvement.max, hi);
}

TEST(Sweep, SingleControllerHasNothingToGain) {
  auto c = internet2_sweep(10, 1);
  c.controllers = 1;
  c.clusters = 1;
  const auto r = sweep(c);
  for (const auto& p : r.placements) EXPECT_DOUBLE_EQ(p.improvement, 0.0);
}

TEST(Sweep, FootprintOnlyNeverLoses) {
  auto c = internet2_sweep(20, 2);
  c.policy.weights = {1, 0};
  for (const auto& p : sweep(c).placements) EXPECT_GE(p.improvement, 0.0);
}

TEST(Sweep, RandomSourceDrawsFreshGraphs) {
  SweepConfig c;
  c.source = TopologySource::random(30, 4.0);
  c.controllers = 7;
  c.clusters = 3;
  c.placements = 3;
  const auto a = placement_config(c, 0).topology;
  const auto b = placement_config(c, 1).topology;
  EXPECT_NE(a.edges(), b.edges());
  EXPECT_EQ(sweep(c).placements.size(), 3u);
}

TEST(Sweep, ZeroPlacementsRejected) {
  EXPECT_THROW(sweep(internet2_sweep(0, 1)), Error);
}

TEST(Cdf, Points) {
  const auto pts = cdf_points({0.3, 0.1, 0.2, 0.4});
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_DOUBLE_EQ(pts[0].first, 0.1);
  EXPECT_DOUBLE_EQ(pts[0].second, 0.25);
  EXPECT_DOUBLE_EQ(pts[3].second, 1.0);
  EXPECT_EQ(cdf_csv(pts).substr(0, 10), "value,cdf\n");
}
