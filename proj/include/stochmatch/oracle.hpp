#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "stochmatch/instance.hpp"
#include "stochmatch/random.hpp"

namespace stochmatch {

inline constexpr std::size_t kOracleEdgeCap = 12;

/// Expected profit of the optimal adaptive probing policy, by memoized
/// recursion over (probed edges, matched nodes). Throws Error(cap_exceeded)
/// above max_edges.
double optimal_adaptive_value(const StochasticGraph& g, std::size_t max_edges = kOracleEdgeCap);

/// Exact expected profit of probing `order` with the safe-probing rule
/// (skip an edge whose endpoint is already matched). Requires that for each
/// node the edges of `order` touching it do not exceed its timeout.
double exact_fixed_order_value(const StochasticGraph& g, std::span<const std::size_t> order,
                               std::size_t max_edges = kOracleEdgeCap);

struct PolicyEstimate {
  double mean = 0.0;
  /// 3 * sample standard deviation / sqrt(trials).
  double half_width = 0.0;
  std::size_t trials = 0;
};

/// One trial of a policy: returns the profit of a single execution.
using Policy = std::function<double(Rng&)>;

/// Runs `trials` executions, trial t seeded with derive_seed(seed, {t}).
PolicyEstimate estimate_policy_value(const Policy& policy, std::size_t trials, std::uint64_t seed);

}  // namespace stochmatch
