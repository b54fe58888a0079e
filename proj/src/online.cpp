#include "stochmatch/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/rounding.hpp"

namespace stochmatch {
namespace {

// The buyer's star: node 0 is the buyer, node k + 1 the item of edges[k].
struct Star {
  std::vector<std::size_t> edges;
  std::vector<EdgeEnds> ends;
  std::vector<double> x;
};

Star make_star(const OnlineInstance& inst, std::size_t buyer,
               std::span<const std::size_t> buyer_edges,
               std::span<const std::uint8_t> item_available, std::span<const double> x) {
  Star star;
  for (auto e : buyer_edges) {
    if (!item_available.empty() && !item_available[inst.edges[e].item]) continue;
    star.ends.push_back({0, star.edges.size() + 1});
    star.edges.push_back(e);
    star.x.push_back(x[e]);
  }
  (void)buyer;
  return star;
}

struct ScanEntry {
  std::size_t edge;
  double y;
};

// Rounded edges of the star in increasing Y, ties broken by edge index.
std::vector<ScanEntry> round_and_order(const OnlineInstance& inst, const Star& star, Rng& rng) {
  const auto rounded = gkps_round(star.ends.size() + 1, star.ends, star.x, rng);
  std::vector<ScanEntry> scan;
  scan.reserve(rounded.selected.size());
  for (auto k : rounded.selected) {
    const auto e = star.edges[k];
    scan.push_back({e, sample_y(inst.edges[e].p, rng)});
  }
  std::sort(scan.begin(), scan.end(), [](const ScanEntry& a, const ScanEntry& b) {
    return a.y < b.y || (a.y == b.y && a.edge < b.edge);
  });
  return scan;
}

}  // namespace

BuyerOutcome buyer_subroutine(const OnlineInstance& inst, std::size_t buyer,
                              std::span<const std::uint8_t> item_available,
                              std::span<const double> x, std::span<const double> alpha, Rng& rng,
                              const Reality& reality) {
  if (buyer >= inst.buyers.size()) throw Error(ErrorCode::invalid_argument, "unknown buyer type");
  if (x.size() != inst.edges.size() || alpha.size() != inst.edges.size())
    throw Error(ErrorCode::invalid_argument, "x and alpha need one value per edge");
  std::vector<std::size_t> buyer_edges;
  for (std::size_t e = 0; e < inst.edges.size(); ++e)
    if (inst.edges[e].buyer == buyer) buyer_edges.push_back(e);
  const Star star = make_star(inst, buyer, buyer_edges, item_available, x);

  BuyerOutcome out;
  for (const auto& entry : round_and_order(inst, star, rng)) {
    out.scanned.push_back(entry.edge);
    if (bernoulli(rng, alpha[entry.edge])) {
      out.real_probes.push_back(entry.edge);
      if (reality(entry.edge, rng)) {
        out.matched_edge = entry.edge;
        out.stopped = true;
        break;
      }
    } else if (bernoulli(rng, inst.edges[entry.edge].p)) {
      out.stopped = true;
      break;
    }
  }
  return out;
}

void check_online_run(const OnlineInstance& inst, const OnlineRunResult& run) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::internal, "online run: " + m); };
  std::vector<int> probes(inst.buyers.size(), 0);
  for (auto e : run.real_probes) {
    const auto b = inst.edges.at(e).buyer;
    if (++probes[b] > inst.buyer_timeouts[b]) fail("buyer timeout exceeded");
  }
  std::vector<int> item_used(inst.items.size(), 0), buyer_used(inst.buyers.size(), 0);
  double profit = 0.0;
  for (auto e : run.matching) {
    const auto& edge = inst.edges.at(e);
    if (item_used[edge.item]++ || buyer_used[edge.buyer]++) fail("not a matching");
    if (std::find(run.real_probes.begin(), run.real_probes.end(), e) == run.real_probes.end())
      fail("matched an edge that was never probed");
    profit += edge.w;
  }
  if (std::abs(profit - run.profit) > 1e-9 * std::max(1.0, profit))
    fail("profit differs from the matched weight");
}

OnlineRunResult simulate_online_run(const OnlineInstance& inst, std::span<const double> x,
                                    std::span<const double> alpha, Rng& rng,
                                    const Reality& reality) {
  if (inst.buyers.empty() || inst.rounds < 1)
    throw Error(ErrorCode::invalid_argument, "online instance needs buyer types and rounds");
  OnlineRunResult run;
  run.arrived.assign(inst.buyers.size(), 0);
  std::vector<std::uint8_t> available(inst.items.size(), 1);
  for (int round = 0; round < inst.rounds; ++round) {
    const auto b = static_cast<std::size_t>(uniform_index(rng, inst.buyers.size()));
    if (run.arrived[b]) continue;
    run.arrived[b] = 1;
    const auto out = buyer_subroutine(inst, b, available, x, alpha, rng, reality);
    run.real_probes.insert(run.real_probes.end(), out.real_probes.begin(), out.real_probes.end());
    if (out.matched_edge) {
      const auto& e = inst.edges[*out.matched_edge];
      available[e.item] = 0;
      run.matching.push_back(*out.matched_edge);
      run.profit += e.w;
    }
  }
  return run;
}

Reality online_bernoulli_reality(const OnlineInstance& inst) {
  std::vector<double> p;
  for (const auto& e : inst.edges) p.push_back(e.p);
  return bernoulli_reality(std::move(p));
}

std::uint64_t beta_sample_count(int n, double epsilon) {
  if (n < 1 || !(epsilon > 0.0 && epsilon <= 0.5))
    throw Error(ErrorCode::invalid_argument, "need n >= 1 and epsilon in (0, 1/2]");
  const double dn = n;
  const double z = 3.0 / epsilon + 1.0;
  const double count = std::ceil(6.0 * dn / (epsilon * epsilon * epsilon) *
                                 std::log(2.0 * dn * dn * z));
  if (count >= 9.2e18) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(count);
}

double clamped_alpha(double x, double s_hat) {
  if (s_hat <= 0.0) return 1.0;
  return std::max(0.5, std::min(0.5 * x / s_hat, 1.0));
}

BetaTable estimate_beta(const OnlineInstance& inst, std::span<const double> x,
                        const BetaOptions& options, Rng& rng) {
  if (x.size() != inst.edges.size())
    throw Error(ErrorCode::invalid_argument, "x needs one value per edge");
  BetaTable table;
  table.formula_samples = beta_sample_count(inst.rounds, options.epsilon);
  if (options.samples > 0) {
    table.samples = options.samples;
  } else {
    table.samples = std::min(table.formula_samples, kBetaSampleCap);
    table.capped = table.formula_samples > kBetaSampleCap;
  }

  std::vector<std::uint64_t> safe(inst.edges.size(), 0);
  const auto by_buyer = inst.edges_of_buyer();
  for (std::size_t b = 0; b < inst.buyers.size(); ++b) {
    const Star star = make_star(inst, b, by_buyer[b], {}, x);
    if (star.edges.empty()) continue;
    for (std::uint64_t i = 0; i < table.samples; ++i) {
      for (const auto& entry : round_and_order(inst, star, rng)) {
        ++safe[entry.edge];
        if (bernoulli(rng, inst.edges[entry.edge].p)) break;
      }
    }
  }

  const double threshold = options.epsilon / inst.rounds;
  table.edges.resize(inst.edges.size());
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    auto& est = table.edges[e];
    est.edge = e;
    est.samples = table.samples;
    est.epsilon = options.epsilon;
    est.s_hat = static_cast<double>(safe[e]) / static_cast<double>(table.samples);
    est.alpha = x[e] < threshold ? 1.0 : clamped_alpha(x[e], est.s_hat);
  }
  return table;
}

namespace {

// P[edge a is reached] given the other rounded edges, i.e.
// int_0^{T_a} e^{-p_a y} prod_{a'} (1 - p_{a'} P[Y_{a'} < y]) dy, where each
// factor equals e^{-p' y} before T' and 1 - p' after it. The integrand is a
// single exponential between consecutive breakpoints.
double race_survival(double p_a, std::span<const double> others) {
  const double end = y_support_end(p_a);
  std::vector<double> breaks;
  for (double p : others) {
    const double t = y_support_end(p);
    if (t < end) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(end);
  double total = 0.0;
  double lo = 0.0;
  for (double hi : breaks) {
    if (hi > lo) {
      double rate = p_a;
      double scale = 1.0;
      for (double p : others) {
        if (y_support_end(p) > lo) {
          rate += p;
        } else {
          scale *= 1.0 - p;
        }
      }
      const double upper = std::isinf(hi) ? 0.0 : std::exp(-rate * hi);
      total += scale * (std::exp(-rate * lo) - upper) / rate;
    }
    lo = hi;
  }
  return total;
}

}  // namespace

std::vector<double> exact_beta(const OnlineInstance& inst, std::span<const double> x) {
  if (x.size() != inst.edges.size())
    throw Error(ErrorCode::invalid_argument, "x needs one value per edge");
  std::vector<double> beta(inst.edges.size(), 1.0);
  std::vector<double> reach(inst.edges.size(), 0.0);
  const auto by_buyer = inst.edges_of_buyer();
  for (std::size_t b = 0; b < inst.buyers.size(); ++b) {
    std::vector<std::size_t> positive;
    for (auto e : by_buyer[b])
      if (x[e] > kIntegralSnap) positive.push_back(e);
    const Star star = make_star(inst, b, positive, {}, x);
    if (star.edges.empty()) continue;
    const auto outcomes = enumerate_gkps_outcomes(star.ends.size() + 1, star.ends, star.x);
    for (const auto& outcome : outcomes) {
      std::vector<std::size_t> chosen;
      for (std::size_t k = 0; k < outcome.indicator.size(); ++k)
        if (outcome.indicator[k]) chosen.push_back(star.edges[k]);
      for (auto e : chosen) {
        std::vector<double> others;
        for (auto f : chosen)
          if (f != e) others.push_back(inst.edges[f].p);
        reach[e] += outcome.probability * race_survival(inst.edges[e].p, others);
      }
    }
  }
  for (std::size_t e = 0; e < inst.edges.size(); ++e)
    if (x[e] > kIntegralSnap) beta[e] = reach[e] / x[e];
  return beta;
}

std::vector<double> basic_alphas(std::span<const double> beta) {
  std::vector<double> alpha;
  alpha.reserve(beta.size());
  for (double b : beta) alpha.push_back(std::clamp(0.5 / b, 0.5, 1.0));
  return alpha;
}

double dumping_factor_big_small(double beta, double p, double delta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::invalid_argument, "delta must lie in (0,1)");
  const double target = p <= delta ? attenuation_h(delta) : 0.5;
  return std::clamp(target / beta, 0.0, 1.0);
}

std::vector<std::size_t> online_greedy_matching(const OnlineInstance& inst) {
  return max_weight_matching(inst.type_graph()).edges;
}

OnlineRunResult online_greedy(const OnlineInstance& inst, std::span<const std::size_t> matching,
                              Rng& rng, const Reality& reality) {
  const std::size_t none = inst.edges.size();
  std::vector<std::size_t> edge_of(inst.buyers.size(), none);
  for (auto e : matching) edge_of[inst.edges.at(e).buyer] = e;
  OnlineRunResult run;
  run.arrived.assign(inst.buyers.size(), 0);
  std::vector<std::uint8_t> available(inst.items.size(), 1);
  for (int round = 0; round < inst.rounds; ++round) {
    const auto b = static_cast<std::size_t>(uniform_index(rng, inst.buyers.size()));
    if (run.arrived[b]) continue;
    run.arrived[b] = 1;
    const auto e = edge_of[b];
    if (e == none || !available[inst.edges[e].item]) continue;
    run.real_probes.push_back(e);
    if (reality(e, rng)) {
      available[inst.edges[e].item] = 0;
      run.matching.push_back(e);
      run.profit += inst.edges[e].w;
    }
  }
  return run;
}

OnlineRunResult online_greedy(const OnlineInstance& inst, Rng& rng, const Reality& reality) {
  const auto matching = online_greedy_matching(inst);
  return online_greedy(inst, matching, rng, reality);
}

OnlinePlan plan_online(const OnlineInstance& inst, const OnlinePlanOptions& options, Rng& rng) {
  OnlinePlan plan;
  const auto sol = solve_lp(build_lp_onl(inst));
  plan.x = sol.values;
  plan.lp_value = sol.objective_value;
  const std::size_t m = inst.edges.size();

  const double threshold = options.beta.epsilon / inst.rounds;
  std::vector<bool> undumped(m, false);
  if (options.beta_source == BetaSource::exact) {
    plan.beta = exact_beta(inst, plan.x);
  } else {
    plan.beta_table = estimate_beta(inst, plan.x, options.beta, rng);
    plan.beta.assign(m, 1.0);
    for (std::size_t e = 0; e < m; ++e) {
      const double s = plan.beta_table.edges[e].s_hat;
      if (plan.x[e] < threshold || s <= 0.0) {
        undumped[e] = true;
      } else {
        plan.beta[e] = s / plan.x[e];
      }
    }
  }

  const double delta =
      options.delta < 0.0 ? optimize_delta(RatioMode::online).delta : options.delta;
  const auto graph = inst.type_graph();
  plan.decision = decide_patch(RatioMode::online, compute_gamma(graph, plan.x, delta), delta);
  plan.greedy_matching = online_greedy_matching(inst);
  if (!options.patched) plan.decision.chosen = PatchChoice::algorithm1;

  plan.alpha.assign(m, 1.0);
  for (std::size_t e = 0; e < m; ++e) {
    if (undumped[e]) continue;
    if (options.patched) {
      plan.alpha[e] = dumping_factor_big_small(plan.beta[e], inst.edges[e].p, delta);
    } else if (options.beta_source == BetaSource::estimated) {
      plan.alpha[e] = plan.beta_table.edges[e].alpha;
    } else {
      plan.alpha[e] = std::clamp(0.5 / plan.beta[e], 0.5, 1.0);
    }
  }
  return plan;
}

OnlineRunResult execute_online_plan(const OnlineInstance& inst, const OnlinePlan& plan, Rng& rng,
                                    const Reality& reality) {
  if (plan.decision.chosen == PatchChoice::greedy)
    return online_greedy(inst, plan.greedy_matching, rng, reality);
  return simulate_online_run(inst, plan.x, plan.alpha, rng, reality);
}

PatchedOnlineRun patched_online(const OnlineInstance& inst, double delta, double epsilon, Rng& rng,
                                const Reality& reality) {
  OnlinePlanOptions options;
  options.delta = delta;
  options.beta.epsilon = epsilon;
  options.patched = true;
  const auto plan = plan_online(inst, options, rng);
  return {execute_online_plan(inst, plan, rng, reality), plan.decision};
}

}  // namespace stochmatch
