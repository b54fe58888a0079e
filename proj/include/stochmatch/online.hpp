#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stochmatch/instance.hpp"
#include "stochmatch/offline.hpp"
#include "stochmatch/random.hpp"

namespace stochmatch {

/// Result of one execution of the buyer subroutine.
struct BuyerOutcome {
  /// Edges of the buyer kept by the rounding, in scan (increasing Y) order.
  std::vector<std::size_t> scanned;
  /// Edges probed for real, in order. At most the buyer's timeout.
  std::vector<std::size_t> real_probes;
  /// Set when a real probe succeeded.
  std::optional<std::size_t> matched_edge;
  /// True when the scan stopped on a success, real or simulated.
  bool stopped = false;
};

/// Subroutine for the first buyer of type `buyer`: rounds x over the edges to
/// available items, draws Y per rounded edge and scans in increasing Y. Each
/// scanned edge is probed for real with probability alpha[e], otherwise its
/// probe is simulated (stop with probability p_e, no profit).
/// `item_available`, `x` and `alpha` are indexed by item and by edge.
BuyerOutcome buyer_subroutine(const OnlineInstance& inst, std::size_t buyer,
                              std::span<const std::uint8_t> item_available,
                              std::span<const double> x, std::span<const double> alpha, Rng& rng,
                              const Reality& reality);

struct OnlineRunResult {
  double profit = 0.0;
  std::vector<std::size_t> matching;      // edge indices
  std::vector<std::size_t> real_probes;   // edge indices, in probe order
  std::vector<std::uint8_t> arrived;      // per buyer type
};

/// Throws Error(internal) unless the run respects buyer timeouts, matches
/// each item and buyer at most once and reports profit equal to the matched
/// weight.
void check_online_run(const OnlineInstance& inst, const OnlineRunResult& run);

/// n = inst.rounds arrivals, uniform over buyer types; the first arrival of a
/// type runs buyer_subroutine on the items still available, repeats are
/// discarded.
OnlineRunResult simulate_online_run(const OnlineInstance& inst, std::span<const double> x,
                                    std::span<const double> alpha, Rng& rng,
                                    const Reality& reality);

Reality online_bernoulli_reality(const OnlineInstance& inst);

// ---------------------------------------------------------------------------
// Dumping factors.

/// ceil((6n / eps^3) ln(2 n^2 Z)) with Z = 3/eps + 1.
std::uint64_t beta_sample_count(int n, double epsilon);

inline constexpr std::uint64_t kBetaSampleCap = 1000000;

struct BetaOptions {
  double epsilon = 0.1;
  /// 0 selects beta_sample_count(rounds, epsilon), capped at kBetaSampleCap.
  std::uint64_t samples = 0;
};

struct BetaEstimate {
  std::size_t edge = 0;
  /// Estimate of beta_ab * x_ab: the fraction of simulations where the edge
  /// was rounded in and reached before any simulated stop.
  double s_hat = 0.0;
  std::uint64_t samples = 0;
  double epsilon = 0.0;
  double alpha = 1.0;
};

struct BetaTable {
  std::vector<BetaEstimate> edges;  // indexed by edge
  std::uint64_t samples = 0;
  /// Formula value before capping.
  std::uint64_t formula_samples = 0;
  bool capped = false;
};

/// max{1/2, min{x / (2 s_hat), 1}}; 1 when s_hat is zero.
double clamped_alpha(double x, double s_hat);

/// Simulates each buyer's subroutine `samples` times over all items with
/// every probe simulated. Edges with x < epsilon / n get alpha = 1.
BetaTable estimate_beta(const OnlineInstance& inst, std::span<const double> x,
                        const BetaOptions& options, Rng& rng);

/// Exact beta_ab for every edge with all items available, by enumerating the
/// rounding tree of each buyer and integrating the Y race in closed form.
/// Edges with x = 0 get beta = 1. Throws Error(cap_exceeded) when a buyer's
/// rounding tree is too large.
std::vector<double> exact_beta(const OnlineInstance& inst, std::span<const double> x);

/// alpha = 1/(2 beta), clamped to [1/2, 1].
std::vector<double> basic_alphas(std::span<const double> beta);

/// alpha = h(delta)/beta for p <= delta, 1/(2 beta) otherwise, clamped to
/// [0,1].
double dumping_factor_big_small(double beta, double p, double delta);

// ---------------------------------------------------------------------------
// Policies.

/// Greedy baseline: a maximum weight matching of the type graph under
/// w_e p_e; the first buyer of each type probes its matched edge.
std::vector<std::size_t> online_greedy_matching(const OnlineInstance& inst);

OnlineRunResult online_greedy(const OnlineInstance& inst,
                              std::span<const std::size_t> matching, Rng& rng,
                              const Reality& reality);
OnlineRunResult online_greedy(const OnlineInstance& inst, Rng& rng, const Reality& reality);

enum class BetaSource { exact, estimated };

struct OnlinePlanOptions {
  /// Negative selects optimize_delta(RatioMode::online).
  double delta = -1.0;
  BetaSource beta_source = BetaSource::estimated;
  BetaOptions beta;
  /// false: basic dumping 1/(2 beta); true: large/small patching.
  bool patched = true;
};

struct OnlinePlan {
  std::vector<double> x;
  double lp_value = 0.0;
  std::vector<double> beta;   // per edge (exact or s_hat / x)
  std::vector<double> alpha;  // per edge
  std::vector<std::size_t> greedy_matching;
  PatchDecision decision;
  BetaTable beta_table;  // empty unless estimated
};

/// Solves LP-ONL, computes beta and dumping factors and, when patched,
/// decides between online greedy and the dumped subroutine.
OnlinePlan plan_online(const OnlineInstance& inst, const OnlinePlanOptions& options, Rng& rng);

OnlineRunResult execute_online_plan(const OnlineInstance& inst, const OnlinePlan& plan, Rng& rng,
                                    const Reality& reality);

struct PatchedOnlineRun {
  OnlineRunResult run;
  PatchDecision decision;
};

PatchedOnlineRun patched_online(const OnlineInstance& inst, double delta, double epsilon, Rng& rng,
                                const Reality& reality);

}  // namespace stochmatch
