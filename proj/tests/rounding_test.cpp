#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/rounding.hpp"
#include "test_support.hpp"

namespace stochmatch {
namespace {

using testing::bipartite_graph;
using testing::three_sigma;

StochasticGraph random_4x4(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> p(0.1, 1.0), w(0.5, 3.0);
  std::vector<testing::E> edges;
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = 4; v < 8; ++v)
      if (rng() % 4) edges.push_back({u, v, p(rng), w(rng)});
  std::vector<int> t(8);
  for (auto& x : t) x = 1 + static_cast<int>(rng() % 3);
  return bipartite_graph(4, 4, edges, t);
}

TEST(Gkps, IntegralInputPassesThrough) {
  const std::vector<EdgeEnds> ends{{0, 2}, {1, 2}, {1, 3}};
  const std::vector<double> x{1.0, 0.0, 1.0};
  Rng rng(1);
  const auto r = gkps_round(4, ends, x, rng);
  EXPECT_EQ(r.indicator, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 2}));
}

TEST(Gkps, StarOfTwoHalvesTree) {
  const std::vector<EdgeEnds> ends{{0, 1}, {0, 2}};
  const std::vector<double> x{0.5, 0.5};
  const auto outcomes = enumerate_gkps_outcomes(3, ends, x);
  ASSERT_EQ(outcomes.size(), 2u);
  for (const auto& o : outcomes) {
    EXPECT_NEAR(o.probability, 0.5, 1e-15);
    EXPECT_EQ(o.indicator[0] + o.indicator[1], 1);
  }
}

TEST(Gkps, StarOfTwoHalvesSampled) {
  const std::vector<EdgeEnds> ends{{0, 1}, {0, 2}};
  const std::vector<double> x{0.5, 0.5};
  const int trials = 100000;
  int first = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(5, {static_cast<std::uint64_t>(t)}));
    const auto r = gkps_round(3, ends, x, rng);
    ASSERT_EQ(r.selected.size(), 1u);
    first += r.indicator[0];
  }
  EXPECT_NEAR(first / double(trials), 0.5, three_sigma(0.5, trials));
}

TEST(Gkps, RejectsBadInput) {
  const std::vector<EdgeEnds> tri{{0, 1}, {1, 2}, {0, 2}};
  const std::vector<double> x{0.5, 0.5, 0.5};
  Rng rng(1);
  try {
    gkps_round(3, tri, x, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_bipartite);
  }
  const std::vector<EdgeEnds> one{{0, 1}};
  const std::vector<double> bad{1.2};
  try {
    gkps_round(2, one, bad, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

// Exact checks over the whole rounding tree.
TEST(Gkps, TreePropertiesOnLpSolutions) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto g = random_4x4(seed);
    const auto x = solve_lp(build_lp_bip(g)).values;
    const auto ends = edge_ends(g);
    const auto outcomes = enumerate_gkps_outcomes(g.node_count(), ends, x);
    double total = 0.0;
    std::vector<double> marginal(x.size(), 0.0);
    for (const auto& o : outcomes) {
      total += o.probability;
      RoundedEdgeSet r;
      r.indicator = o.indicator;
      for (std::size_t e = 0; e < x.size(); ++e) {
        if (o.indicator[e]) {
          r.selected.push_back(e);
          marginal[e] += o.probability;
        }
      }
      EXPECT_TRUE(degree_preserved(g.node_count(), ends, x, r));
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        int deg = 0;
        for (auto e : r.selected) deg += ends[e].u == v || ends[e].v == v;
        EXPECT_LE(deg, g.timeouts[v]);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t e = 0; e < x.size(); ++e) EXPECT_NEAR(marginal[e], x[e], 1e-9);
  }
}

TEST(Gkps, TreeNegativeCorrelationOnFractionalPoint) {
  // Fractional values on a 3x3 grid with node sums below 2.
  const std::vector<EdgeEnds> ends{{0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4},
                                   {1, 5}, {2, 3}, {2, 4}, {2, 5}};
  const std::vector<double> x{0.3, 0.6, 0.4, 0.5, 0.2, 0.7, 0.45, 0.35, 0.55};
  const auto outcomes = enumerate_gkps_outcomes(6, ends, x);
  for (std::size_t v = 0; v < 6; ++v) {
    std::vector<std::size_t> inc;
    for (std::size_t e = 0; e < ends.size(); ++e)
      if (ends[e].u == v || ends[e].v == v) inc.push_back(e);
    for (std::uint32_t s = 1; s < (1u << inc.size()); ++s) {
      for (int b = 0; b <= 1; ++b) {
        double joint = 0.0, product = 1.0;
        for (std::size_t k = 0; k < inc.size(); ++k)
          if (s >> k & 1u) product *= b ? x[inc[k]] : 1.0 - x[inc[k]];
        for (const auto& o : outcomes) {
          bool all = true;
          for (std::size_t k = 0; k < inc.size(); ++k)
            if (s >> k & 1u) all = all && o.indicator[inc[k]] == b;
          if (all) joint += o.probability;
        }
        EXPECT_LE(joint, product + 1e-12) << "node " << v << " set " << s << " b " << b;
      }
    }
  }
}

TEST(Gkps, SampledMarginalsOnRandom4x4) {
  const auto g = random_4x4(42);
  // A fractional point: scaled LP-BIP solution plus a fractional sprinkle.
  auto x = solve_lp(build_lp_bip(g)).values;
  for (std::size_t e = 0; e < x.size(); ++e) x[e] = 0.3 + 0.4 * x[e] * (e % 3) / 2.0;
  const auto ends = edge_ends(g);
  const int trials = 100000;
  std::vector<int> hits(x.size(), 0);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(9, {static_cast<std::uint64_t>(t)}));
    const auto r = gkps_round(g.node_count(), ends, x, rng);
    ASSERT_TRUE(degree_preserved(g.node_count(), ends, x, r));
    for (auto e : r.selected) ++hits[e];
  }
  for (std::size_t e = 0; e < x.size(); ++e)
    EXPECT_NEAR(hits[e] / double(trials), x[e], three_sigma(x[e], trials)) << "edge " << e;
}

TEST(Gkps, StarMatchesLevelSetRounding) {
  // On a star the number of selected edges is floor or ceil of the sum.
  const std::vector<EdgeEnds> ends{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  const std::vector<double> x{0.3, 0.9, 0.6, 0.5};
  for (const auto& o : enumerate_gkps_outcomes(5, ends, x)) {
    int k = 0;
    for (auto b : o.indicator) k += b;
    EXPECT_TRUE(k == 2 || k == 3);
  }
}

}  // namespace
}  // namespace stochmatch
