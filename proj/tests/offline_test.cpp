#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/offline.hpp"
#include "test_support.hpp"

namespace stochmatch {
namespace {

using testing::bipartite_graph;
using testing::general_graph;
using testing::three_sigma;

// High-precision reference values of the argmax and maximum of each mode's
// worst-case ratio.
constexpr double kBipartiteDelta = 0.600414301727;
constexpr double kBipartiteRatio = 0.351563372172;
constexpr double kGeneralDelta = 0.558524732629;
constexpr double kGeneralRatio = 0.269679195529;
constexpr double kOnlineDelta = 0.739701481874;
constexpr double kOnlineRatio = 0.245712226929;

Reality always_present() {
  return [](std::size_t, Rng&) { return true; };
}

TEST(Attenuation, EndpointValues) {
  EXPECT_EQ(attenuation_g(1.0), 1.0 / 3.0);
  EXPECT_EQ(attenuation_h(1.0), 0.5);
  EXPECT_NEAR(attenuation_g(0.5), 0.3875, 1e-15);
  EXPECT_NEAR(attenuation_h(0.5), 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(attenuation_g(1e-9), 0.432332358300863, 1e-6);
  EXPECT_NEAR(attenuation_h(1e-9), 0.632120558748256, 1e-6);
  EXPECT_NEAR(attenuation_h(0.525), 0.580297637127074, 1e-12);
}

TEST(Attenuation, DomainChecked) {
  EXPECT_THROW(attenuation_g(0.0), Error);
  EXPECT_THROW(attenuation_h(1.5), Error);
}

TEST(Attenuation, DecreasingAndBoundedOnGrid) {
  double prev_g = 1.0, prev_h = 1.0;
  for (int i = 1; i <= 1000; ++i) {
    const double p = i / 1000.0;
    const double gv = attenuation_g(p), hv = attenuation_h(p);
    EXPECT_LT(gv, prev_g);
    EXPECT_LT(hv, prev_h);
    EXPECT_GE(gv, 1.0 / 3.0);
    EXPECT_GE(hv, 0.5);
    prev_g = gv;
    prev_h = hv;
  }
}

TEST(SampleY, InverseCdf) {
  EXPECT_EQ(y_from_uniform(0.3, 0.0), 0.0);
  EXPECT_NEAR(y_support_end(0.5), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(y_from_uniform(0.5, std::nextafter(1.0, 0.0)), 2.0 * std::log(2.0), 1e-7);
  EXPECT_NEAR(y_from_uniform(1.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isinf(y_support_end(1.0)));
  for (double p : {0.2, 0.7, 1.0})
    for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(y_cdf(p, y_from_uniform(p, u)), u, 1e-12);
}

TEST(SampleY, KolmogorovSmirnov) {
  const std::size_t n = 100000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  for (double p : {0.1, 0.5, 0.9, 1.0}) {
    Rng rng(derive_seed(3, {static_cast<std::uint64_t>(p * 10)}));
    std::vector<double> ys(n);
    for (auto& y : ys) y = sample_y(p, rng);
    std::sort(ys.begin(), ys.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = y_cdf(p, ys[i]);
      d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
    }
    EXPECT_LT(d, critical) << "p=" << p;
    if (p < 1.0) EXPECT_LT(ys.back(), y_support_end(p));
  }
}

TEST(Algorithm1, SingleCertainEdge) {
  const auto g = bipartite_graph(1, 1, {{0, 1, 1.0, 2.5}});
  Rng rng(1);
  const std::vector<double> x{1.0};
  const auto run = run_algorithm1(g, x, rng, bernoulli_reality(g));
  ASSERT_EQ(run.steps.size(), 1u);
  EXPECT_TRUE(run.steps[0].probed);
  EXPECT_TRUE(run.steps[0].present);
  EXPECT_EQ(run.profit, 2.5);
  check_probe_run(g, run);
}

TEST(Algorithm1, TwoEdgeRaceMatchesIntegral) {
  // Both edges rounded in and present; the lower-Y one blocks the other.
  const double pa = 1.0, pb = 0.5;
  const auto g = bipartite_graph(1, 2, {{0, 1, pa, 1.0}, {0, 2, pb, 1.0}}, {2, 1, 1});
  const double tb = y_support_end(pb);
  const double win_a = testing::simpson(
      [&](double y) { return std::exp(-pa * y) * (1.0 - (1.0 - std::exp(-pb * y)) / pb); }, 0.0,
      tb);
  const std::vector<std::size_t> both{0, 1};
  const int trials = 100000;
  int a_first = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(17, {static_cast<std::uint64_t>(t)}));
    const auto run = probe_in_y_order(g, both, rng, always_present());
    check_probe_run(g, run);
    ASSERT_EQ(run.probe_count(), 1u);
    a_first += run.steps[0].edge == 0;
  }
  EXPECT_NEAR(a_first / double(trials), win_a, three_sigma(win_a, trials));
}

TEST(Algorithm1, EqualProbabilitiesSplitEvenly) {
  const auto g = bipartite_graph(1, 2, {{0, 1, 1.0, 1.0}, {0, 2, 1.0, 1.0}}, {2, 1, 1});
  const std::vector<std::size_t> both{0, 1};
  const int trials = 100000;
  int a_first = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(19, {static_cast<std::uint64_t>(t)}));
    a_first += probe_in_y_order(g, both, rng, always_present()).steps[0].edge == 0;
  }
  EXPECT_NEAR(a_first / double(trials), 0.5, three_sigma(0.5, trials));
}

TEST(Algorithm1, ProbeFrequencyAtLeastAttenuatedLp) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> p(0.1, 1.0), w(0.5, 2.0);
  std::vector<testing::E> edges;
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t v = 5; v < 10; ++v)
      if (gen() % 2) edges.push_back({u, v, p(gen), w(gen)});
  std::vector<int> t(10);
  for (auto& x : t) x = 1 + static_cast<int>(gen() % 3);
  const auto g = bipartite_graph(5, 5, edges, t);
  const auto sol = solve_lp(build_lp_bip(g));
  const auto reality = bernoulli_reality(g);
  const int trials = 100000;
  std::vector<int> probed(g.edges.size(), 0);
  double profit = 0.0, profit_sq = 0.0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(29, {static_cast<std::uint64_t>(k)}));
    const auto run = run_algorithm1(g, sol.values, rng, reality);
    check_probe_run(g, run);
    for (const auto& s : run.steps) probed[s.edge] += s.probed;
    profit += run.profit;
    profit_sq += run.profit * run.profit;
  }
  double bound = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double target = sol.values[e] * attenuation_g(g.edges[e].p);
    const double freq = probed[e] / double(trials);
    EXPECT_GE(freq, target - three_sigma(freq, trials)) << "edge " << e;
    bound += g.edges[e].w * g.edges[e].p * target;
  }
  const double mean = profit / trials;
  const double sd = std::sqrt(profit_sq / trials - mean * mean);
  EXPECT_GE(mean, bound - 3.0 * sd / std::sqrt(double(trials)));
}

TEST(Greedy, SingleEdgeExpectation) {
  const auto g = general_graph(2, {{0, 1, 0.5, 2.0}});
  const int trials = 100000;
  double sum = 0.0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(31, {static_cast<std::uint64_t>(k)}));
    sum += greedy_policy(g, rng, bernoulli_reality(g)).profit;
  }
  // Profit is 0 or 2, so its deviation is 2 sqrt(p(1-p)).
  EXPECT_NEAR(sum / trials, 1.0, 2.0 * three_sigma(0.5, trials));
}

TEST(Greedy, ProbesOnlyMatchedEdges) {
  const auto g = general_graph(3, {{0, 1, 1.0, 0.6}, {1, 2, 1.0, 0.5}});
  Rng rng(2);
  const auto run = greedy_policy(g, rng, bernoulli_reality(g));
  ASSERT_EQ(run.steps.size(), 1u);
  EXPECT_EQ(run.steps[0].edge, 0u);
}

TEST(Greedy, AtMostOneProbePerNode) {
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> p(0.1, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<testing::E> edges;
    for (std::size_t u = 0; u < 7; ++u)
      for (std::size_t v = u + 1; v < 7; ++v)
        if (gen() % 2) edges.push_back({u, v, p(gen), 1.0});
    const auto g = general_graph(7, edges);
    Rng rng(trial);
    const auto run = greedy_policy(g, rng, bernoulli_reality(g));
    check_probe_run(g, run);
  }
}

TEST(Gamma, Examples) {
  const auto g = general_graph(4, {{0, 1, 0.8, 1.0}, {2, 3, 0.4, 2.0}});
  const std::vector<double> x{1.0, 1.0};
  EXPECT_EQ(compute_gamma(g, x, 0.3), 1.0);
  EXPECT_EQ(compute_gamma(g, x, 0.9), 0.0);
  EXPECT_NEAR(compute_gamma(g, x, 0.6), 0.5, 1e-15);
  EXPECT_EQ(compute_gamma(g, std::vector<double>{0.0, 0.0}, 0.5), 0.0);
}

TEST(Patch, ForcedComparisons) {
  const auto greedy = decide_patch(RatioMode::bipartite, 1.0, 0.6022);
  EXPECT_EQ(greedy.chosen, PatchChoice::greedy);
  EXPECT_NEAR(greedy.greedy_branch, 0.6022, 1e-15);
  EXPECT_EQ(decide_patch(RatioMode::bipartite, 0.0, 0.6022).chosen, PatchChoice::algorithm1);
  EXPECT_EQ(decide_patch(RatioMode::general, 0.0, 0.5).chosen, PatchChoice::algorithm1);
  EXPECT_EQ(decide_patch(RatioMode::online, 0.0, 0.5).chosen, PatchChoice::algorithm1);
  EXPECT_EQ(decide_patch(RatioMode::online, 1.0, 0.9).chosen, PatchChoice::greedy);
}

TEST(Patch, EqualizingGammaBalancesBranches) {
  for (auto mode : {RatioMode::bipartite, RatioMode::general, RatioMode::online}) {
    for (int i = 1; i < 100; ++i) {
      const double delta = i / 100.0;
      const double gamma = equalizing_gamma(mode, delta);
      if (gamma < 0.0 || gamma > 1.0) continue;
      const auto d = decide_patch(mode, gamma, delta);
      EXPECT_NEAR(d.greedy_branch, d.rounding_branch, 1e-9) << "delta " << delta;
    }
  }
  const double d = 0.6022;
  const double gamma = attenuation_g(d) / (d + attenuation_g(d) - 1.0 / 3.0);
  EXPECT_NEAR(equalizing_gamma(RatioMode::bipartite, d), gamma, 1e-15);
}

TEST(Patch, OptimizedDeltas) {
  const auto bip = optimize_delta(RatioMode::bipartite);
  EXPECT_NEAR(bip.delta, kBipartiteDelta, 1e-5);
  EXPECT_NEAR(bip.ratio, kBipartiteRatio, 1e-9);
  EXPECT_NEAR(1.0 / bip.ratio, 2.845, 1e-3);
  const double g = attenuation_g(bip.delta);
  EXPECT_NEAR(bip.ratio, bip.delta * g / (bip.delta + g - 1.0 / 3.0), 1e-12);

  const auto gen = optimize_delta(RatioMode::general);
  EXPECT_NEAR(gen.delta, kGeneralDelta, 1e-5);
  EXPECT_NEAR(gen.ratio, kGeneralRatio, 1e-9);
  EXPECT_NEAR(1.0 / gen.ratio, 3.709, 1e-3);

  const auto onl = optimize_delta(RatioMode::online);
  EXPECT_NEAR(onl.delta, kOnlineDelta, 1e-5);
  EXPECT_NEAR(onl.ratio, kOnlineRatio, 1e-9);
}

TEST(Patch, WorstCaseRatioIsMinimumOverGamma) {
  for (auto mode : {RatioMode::bipartite, RatioMode::general, RatioMode::online}) {
    for (double delta : {0.2, 0.5, 0.7, 0.95}) {
      double worst = 1.0;
      for (int i = 0; i <= 10000; ++i) {
        const auto d = decide_patch(mode, i / 10000.0, delta);
        worst = std::min(worst, std::max(d.greedy_branch, d.rounding_branch));
      }
      EXPECT_NEAR(worst_case_ratio(mode, delta), worst, 1e-4);
      EXPECT_LE(worst_case_ratio(mode, delta), worst + 1e-12);
    }
  }
}

TEST(General, BipartitionKeepsHalfTheEdges) {
  const auto g = general_graph(3, {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}});
  const int trials = 100000;
  std::vector<int> crossing(3, 0);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(41, {static_cast<std::uint64_t>(k)}));
    const auto sides = random_bipartition(3, rng);
    for (std::size_t e = 0; e < 3; ++e) crossing[e] += sides[g.edges[e].u] != sides[g.edges[e].v];
  }
  for (int c : crossing) EXPECT_NEAR(c / double(trials), 0.5, three_sigma(0.5, trials));
}

TEST(General, SingleEdgeSeenHalfTheTime) {
  const auto g = general_graph(2, {{0, 1, 1.0, 1.0}});
  const int trials = 100000;
  double profit = 0.0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(43, {static_cast<std::uint64_t>(k)}));
    const auto run = run_general(g, rng, bernoulli_reality(g));
    check_probe_run(g, run);
    profit += run.profit;
  }
  EXPECT_NEAR(profit / trials, 0.5, three_sigma(0.5, trials));
}

TEST(General, ProbeFrequencyAtLeastHalfAttenuatedLp) {
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> p(0.1, 1.0), w(0.5, 2.0);
  std::vector<testing::E> edges;
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t v = u + 1; v < 6; ++v)
      if (gen() % 3) edges.push_back({u, v, p(gen), w(gen)});
  const auto g = general_graph(6, edges, {1, 2, 2, 1, 3, 2});
  const auto lp = solve_lp_gen(g);
  ASSERT_TRUE(lp.converged);
  const auto reality = bernoulli_reality(g);
  const int trials = 100000;
  std::vector<int> probed(g.edges.size(), 0);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(53, {static_cast<std::uint64_t>(k)}));
    const auto run = run_general(g, lp.solution.values, rng, reality);
    check_probe_run(g, run);
    for (const auto& s : run.steps) probed[s.edge] += s.probed;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double target = 0.5 * lp.solution.values[e] * attenuation_h(g.edges[e].p);
    const double freq = probed[e] / double(trials);
    EXPECT_GE(freq, target - three_sigma(freq, trials)) << "edge " << e;
  }
}

TEST(Patched, PlanUsesModeLp) {
  const auto tri = general_graph(3, {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}});
  const auto plan = plan_patched_offline(tri);
  EXPECT_EQ(plan.mode, RatioMode::general);
  EXPECT_NEAR(plan.lp_value, 1.0, 1e-12);
  EXPECT_NEAR(plan.decision.delta, kGeneralDelta, 1e-5);
  EXPECT_EQ(plan.decision.chosen, PatchChoice::greedy);
  const auto bip = plan_patched_offline(bipartite_graph(1, 1, {{0, 1, 0.2, 1.0}}), 0.5);
  EXPECT_EQ(bip.mode, RatioMode::bipartite);
  EXPECT_EQ(bip.decision.delta, 0.5);
  EXPECT_EQ(bip.decision.gamma, 0.0);
  EXPECT_EQ(bip.decision.chosen, PatchChoice::algorithm1);
}

TEST(ProbeRunCheck, DetectsViolations) {
  const auto g = general_graph(3, {{0, 1, 1, 1}, {1, 2, 1, 1}});
  ProbeRun bad;
  bad.steps = {{0, 0.1, true, true}, {1, 0.2, true, true}};
  bad.matching = {0, 1};
  bad.profit = 2.0;
  EXPECT_THROW(check_probe_run(g, bad), Error);
  ProbeRun unordered;
  unordered.steps = {{0, 0.5, true, false}, {1, 0.2, false, false}};
  EXPECT_THROW(check_probe_run(g, unordered), Error);
}

}  // namespace
}  // namespace stochmatch
