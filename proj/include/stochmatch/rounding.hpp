#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stochmatch/instance.hpp"
#include "stochmatch/random.hpp"

namespace stochmatch {

struct EdgeEnds {
  std::size_t u = 0;
  std::size_t v = 0;
};

/// 0/1 outcome of dependent rounding.
struct RoundedEdgeSet {
  std::vector<std::uint8_t> indicator;
  std::vector<std::size_t> selected;  // ascending

  bool contains(std::size_t e) const { return indicator[e] != 0; }
};

/// Values within this distance of 0 or 1 count as integral.
inline constexpr double kIntegralSnap = 1e-12;

/// Dependent rounding of Gandhi, Khuller, Parthasarathy and Srinivasan on a
/// bipartite edge set. While a fractional edge remains, picks a cycle of
/// fractional edges (or a maximal path when the fractional support is a
/// forest) and shifts mass alternately along it, choosing the direction so
/// every marginal is preserved. Integral entries pass through unchanged.
///
/// Throws Error(not_bipartite) if the edge set has an odd cycle and
/// Error(invalid_argument) if some x is outside [0,1].
RoundedEdgeSet gkps_round(std::size_t node_count, std::span<const EdgeEnds> edges,
                          std::span<const double> x, Rng& rng);

/// Same, over the edges of a bipartite StochasticGraph.
RoundedEdgeSet gkps_round(const StochasticGraph& g, std::span<const double> x, Rng& rng);

struct RoundingOutcome {
  std::vector<std::uint8_t> indicator;
  double probability = 0.0;
};

/// Every leaf of the rounding tree with its probability. The cycle/path
/// choices are deterministic, so the tree is finite; throws
/// Error(cap_exceeded) beyond max_outcomes leaves.
std::vector<RoundingOutcome> enumerate_gkps_outcomes(std::size_t node_count,
                                                     std::span<const EdgeEnds> edges,
                                                     std::span<const double> x,
                                                     std::size_t max_outcomes = 1u << 16);

std::vector<EdgeEnds> edge_ends(const StochasticGraph& g);

/// True when every node v has at most ceil(sum_{e in delta(v)} x_e) selected
/// edges (sums are taken with a 1e-9 allowance).
bool degree_preserved(std::size_t node_count, std::span<const EdgeEnds> edges,
                      std::span<const double> x, const RoundedEdgeSet& rounded);

}  // namespace stochmatch
