#include <algorithm>
#include <cmath>
#include <utility>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/offline.hpp"

namespace stochmatch {

Reality bernoulli_reality(std::vector<double> probabilities) {
  return [p = std::move(probabilities)](std::size_t edge, Rng& rng) {
    return bernoulli(rng, p.at(edge));
  };
}

Reality bernoulli_reality(const StochasticGraph& g) {
  return bernoulli_reality(edge_probabilities(g));
}

std::size_t ProbeRun::probe_count() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const ProbeStep& s) { return s.probed; }));
}

void check_probe_run(const StochasticGraph& g, const ProbeRun& run) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::internal, "probe run: " + m); };
  std::vector<int> probes(g.node_count(), 0);
  std::vector<int> matched(g.node_count(), 0);
  double last_y = -kInfinity;
  double profit = 0.0;
  std::vector<std::size_t> accepted;
  for (const auto& s : run.steps) {
    if (s.edge >= g.edges.size()) fail("edge index out of range");
    if (s.y < last_y) fail("edges not scanned in nondecreasing y order");
    last_y = s.y;
    if (!s.probed) continue;
    const auto& e = g.edges[s.edge];
    if (matched[e.u] || matched[e.v]) fail("probed an edge with a matched endpoint");
    if (++probes[e.u] > g.timeouts[e.u] || ++probes[e.v] > g.timeouts[e.v])
      fail("timeout exceeded");
    if (s.present) {
      matched[e.u] = matched[e.v] = 1;
      profit += e.w;
      accepted.push_back(s.edge);
    }
  }
  auto sorted = run.matching;
  std::sort(sorted.begin(), sorted.end());
  std::sort(accepted.begin(), accepted.end());
  if (sorted != accepted) fail("matching does not equal the accepted probes");
  if (std::abs(profit - run.profit) > 1e-9 * std::max(1.0, profit))
    fail("profit differs from the matched weight");
}

ProbeRun probe_in_y_order(const StochasticGraph& g, std::span<const std::size_t> edges, Rng& rng,
                          const Reality& reality) {
  ProbeRun run;
  run.steps.reserve(edges.size());
  for (auto e : edges) run.steps.push_back({e, sample_y(g.edges[e].p, rng), false, false});
  std::sort(run.steps.begin(), run.steps.end(), [](const ProbeStep& a, const ProbeStep& b) {
    return a.y < b.y || (a.y == b.y && a.edge < b.edge);
  });
  std::vector<bool> matched(g.node_count(), false);
  for (auto& s : run.steps) {
    const auto& e = g.edges[s.edge];
    if (matched[e.u] || matched[e.v]) continue;
    s.probed = true;
    s.present = reality(s.edge, rng);
    if (s.present) {
      matched[e.u] = matched[e.v] = true;
      run.matching.push_back(s.edge);
      run.profit += e.w;
    }
  }
  return run;
}

ProbeRun run_algorithm1(const StochasticGraph& g, std::span<const double> x, Rng& rng,
                        const Reality& reality) {
  const auto rounded = gkps_round(g, x, rng);
  return probe_in_y_order(g, rounded.selected, rng, reality);
}

ProbeRun probe_matching(const StochasticGraph& g, std::span<const std::size_t> matching, Rng& rng,
                        const Reality& reality) {
  ProbeRun run;
  for (std::size_t k = 0; k < matching.size(); ++k) {
    const auto e = matching[k];
    ProbeStep s{e, static_cast<double>(k), true, reality(e, rng)};
    if (s.present) {
      run.matching.push_back(e);
      run.profit += g.edges[e].w;
    }
    run.steps.push_back(s);
  }
  return run;
}

ProbeRun greedy_policy(const StochasticGraph& g, Rng& rng, const Reality& reality) {
  const auto m = max_weight_matching(g);
  return probe_matching(g, m.edges, rng, reality);
}

std::vector<int> random_bipartition(std::size_t node_count, Rng& rng) {
  std::vector<int> sides(node_count);
  for (auto& s : sides) s = bernoulli(rng, 0.5) ? 1 : 0;
  return sides;
}

ProbeRun run_general(const StochasticGraph& g, std::span<const double> x, Rng& rng,
                     const Reality& reality) {
  if (x.size() != g.edges.size())
    throw Error(ErrorCode::invalid_argument, "x must have one value per edge");
  auto sides = random_bipartition(g.node_count(), rng);
  std::vector<std::size_t> crossing;
  std::vector<EdgeEnds> ends;
  std::vector<double> values;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (sides[g.edges[e].u] == sides[g.edges[e].v]) continue;
    crossing.push_back(e);
    ends.push_back({g.edges[e].u, g.edges[e].v});
    values.push_back(x[e]);
  }
  const auto rounded = gkps_round(g.node_count(), ends, values, rng);
  std::vector<std::size_t> selected;
  for (auto k : rounded.selected) selected.push_back(crossing[k]);
  auto run = probe_in_y_order(g, selected, rng, reality);
  run.sides = std::move(sides);
  return run;
}

ProbeRun run_general(const StochasticGraph& g, Rng& rng, const Reality& reality) {
  const auto lp = solve_lp_gen(g);
  return run_general(g, lp.solution.values, rng, reality);
}

double compute_gamma(const StochasticGraph& g, std::span<const double> x, double delta) {
  double total = 0.0, large = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double c = g.edges[e].w * g.edges[e].p * x[e];
    total += c;
    if (g.edges[e].p >= delta) large += c;
  }
  if (total <= 0.0) return 0.0;
  return std::clamp(large / total, 0.0, 1.0);
}

OfflinePlan plan_patched_offline(const StochasticGraph& g, double delta) {
  OfflinePlan plan;
  plan.mode = g.kind == GraphKind::bipartite ? RatioMode::bipartite : RatioMode::general;
  if (delta < 0.0) delta = optimize_delta(plan.mode).delta;
  LpSolution sol = plan.mode == RatioMode::bipartite ? solve_lp(build_lp_bip(g))
                                                     : solve_lp_gen(g).solution;
  plan.x = std::move(sol.values);
  plan.lp_value = sol.objective_value;
  plan.greedy_matching = max_weight_matching(g).edges;
  plan.decision = decide_patch(plan.mode, compute_gamma(g, plan.x, delta), delta);
  return plan;
}

ProbeRun execute_plan(const StochasticGraph& g, const OfflinePlan& plan, Rng& rng,
                      const Reality& reality) {
  if (plan.decision.chosen == PatchChoice::greedy)
    return probe_matching(g, plan.greedy_matching, rng, reality);
  if (plan.mode == RatioMode::bipartite) return run_algorithm1(g, plan.x, rng, reality);
  return run_general(g, plan.x, rng, reality);
}

PatchedRun patched_offline(const StochasticGraph& g, double delta, Rng& rng,
                           const Reality& reality) {
  const auto plan = plan_patched_offline(g, delta);
  return {execute_plan(g, plan, rng, reality), plan.decision};
}

}  // namespace stochmatch
