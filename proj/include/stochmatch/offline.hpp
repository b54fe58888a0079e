#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stochmatch/instance.hpp"
#include "stochmatch/random.hpp"
#include "stochmatch/rounding.hpp"

namespace stochmatch {

// ---------------------------------------------------------------------------
// Attenuation functions and the probing-order distribution.

/// (1/p) ln(1/(1-p)): right end of the support of Y for edge probability p.
/// Infinite at p = 1.
double y_support_end(double p);

/// g(p) = 1/(2+p) * (1 - exp(-(2+p) * y_support_end(p))). Lower bound on the
/// probability that a rounded edge is safe in the bipartite pipeline.
/// Throws Error(invalid_argument) outside (0,1].
double attenuation_g(double p);

/// h(p) = 1/(1+p) * (1 - exp(-(1+p) * y_support_end(p))). Same bound for the
/// general-graph reduction and the online subroutine.
double attenuation_h(double p);

/// Inverse CDF of P[Y <= y] = (1 - exp(-p y)) / p evaluated at u in [0,1).
double y_from_uniform(double p, double u);

/// Draws Y for an edge with probability p.
double sample_y(double p, Rng& rng);

/// Distribution function of Y, clamped to 1 past the support end.
double y_cdf(double p, double y);

// ---------------------------------------------------------------------------
// Probe runs.

/// Edge-presence oracle, consulted once per real probe.
using Reality = std::function<bool(std::size_t edge, Rng& rng)>;

/// Independent Bernoulli(p_e) presence per probe.
Reality bernoulli_reality(std::vector<double> probabilities);
Reality bernoulli_reality(const StochasticGraph& g);

struct ProbeStep {
  std::size_t edge = 0;
  double y = 0.0;
  bool probed = false;
  bool present = false;
};

struct ProbeRun {
  /// Edges considered, in nondecreasing y order.
  std::vector<ProbeStep> steps;
  std::vector<std::size_t> matching;
  double profit = 0.0;
  /// Node bipartition used by the general-graph reduction; empty otherwise.
  std::vector<int> sides;

  std::size_t probe_count() const;
};

/// Throws Error(internal) unless the run is a matching, respects every
/// timeout, scans in nondecreasing y, and profit equals the matched weight.
void check_probe_run(const StochasticGraph& g, const ProbeRun& run);

/// Draws Y_e for the given edges and probes them in increasing Y (ties by
/// edge index), skipping any edge with an already matched endpoint.
ProbeRun probe_in_y_order(const StochasticGraph& g, std::span<const std::size_t> edges, Rng& rng,
                          const Reality& reality);

/// Algorithm 1: GKPS-round x, then probe the rounded edges in Y order.
/// x must be feasible for LP-BIP on g.
ProbeRun run_algorithm1(const StochasticGraph& g, std::span<const double> x, Rng& rng,
                        const Reality& reality);

/// Probes the given matching once per edge (greedy policy body).
ProbeRun probe_matching(const StochasticGraph& g, std::span<const std::size_t> matching, Rng& rng,
                        const Reality& reality);

/// Greedy: probes a maximum weight matching under weights w_e p_e.
ProbeRun greedy_policy(const StochasticGraph& g, Rng& rng, const Reality& reality);

/// Splits nodes into sides 0/1 independently with probability 1/2.
std::vector<int> random_bipartition(std::size_t node_count, Rng& rng);

/// General-graph reduction: random bipartition, then Algorithm 1 on the
/// crossing edges using the given LP-GEN solution restricted to them.
ProbeRun run_general(const StochasticGraph& g, std::span<const double> x, Rng& rng,
                     const Reality& reality);

/// Same, solving LP-GEN first.
ProbeRun run_general(const StochasticGraph& g, Rng& rng, const Reality& reality);

// ---------------------------------------------------------------------------
// Large/small patching.

enum class RatioMode { bipartite, general, online };

enum class PatchChoice { greedy, algorithm1 };

const char* to_string(PatchChoice c) noexcept;

struct PatchDecision {
  double gamma = 0.0;
  double delta = 0.0;
  PatchChoice chosen = PatchChoice::algorithm1;
  double greedy_branch = 0.0;
  double rounding_branch = 0.0;
  double predicted_ratio = 0.0;
};

/// Fraction of the LP objective carried by edges with p_e >= delta. Zero when
/// the objective is zero.
double compute_gamma(const StochasticGraph& g, std::span<const double> x, double delta);

/// Predicted ratios of both branches for a given gamma and delta:
///   bipartite  greedy gamma*delta  vs  gamma/3 + (1-gamma) g(delta)
///   general    greedy gamma*delta  vs  gamma/4 + (1-gamma) h(delta)/2
///   online     (1-1/e) gamma*delta vs (1-1/e)(gamma/2 + (1-gamma) h)/(1 + h (1-1/e))
/// Greedy is chosen when its branch is at least the other one.
PatchDecision decide_patch(RatioMode mode, double gamma, double delta);

/// gamma at which both branches coincide (before clamping to [0,1]).
double equalizing_gamma(RatioMode mode, double delta);

/// min over gamma in [0,1] of the better branch: the guaranteed ratio at delta.
double worst_case_ratio(RatioMode mode, double delta);

struct DeltaOptimum {
  double delta = 0.0;
  double ratio = 0.0;
};

/// Golden-section search for the delta maximizing worst_case_ratio.
DeltaOptimum optimize_delta(RatioMode mode, double tolerance = 1e-6);

/// Precomputed state of the patched offline algorithm: the LP solution, the
/// greedy matching and the branch decision. Executing it is cheap.
struct OfflinePlan {
  RatioMode mode = RatioMode::bipartite;
  std::vector<double> x;
  double lp_value = 0.0;
  std::vector<std::size_t> greedy_matching;
  PatchDecision decision;
};

/// Solves LP-BIP (bipartite) or LP-GEN (general) and decides the branch.
/// A negative delta selects optimize_delta(mode).
OfflinePlan plan_patched_offline(const StochasticGraph& g, double delta = -1.0);

ProbeRun execute_plan(const StochasticGraph& g, const OfflinePlan& plan, Rng& rng,
                      const Reality& reality);

struct PatchedRun {
  ProbeRun run;
  PatchDecision decision;
};

PatchedRun patched_offline(const StochasticGraph& g, double delta, Rng& rng,
                           const Reality& reality);

}  // namespace stochmatch
