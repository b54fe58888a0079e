#include <algorithm>
#include <cmath>
#include <cstdint>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"

namespace stochmatch {

MatchingResult brute_force_matching(const StochasticGraph& g) {
  require_valid(g);
  const auto inc = g.incidence();
  std::vector<std::size_t> compact(g.node_count(), 0);
  std::size_t m = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (!inc[v].empty()) compact[v] = m++;
  if (m > kMatchingBruteForceNodeCap)
    throw Error(ErrorCode::cap_exceeded, "brute-force matching limited to " +
                                             std::to_string(kMatchingBruteForceNodeCap) +
                                             " non-isolated nodes");

  // edge_at[i*m+j] = edge index + 1, 0 when absent.
  std::vector<std::size_t> edge_at(m * m, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto a = compact[g.edges[e].u], b = compact[g.edges[e].v];
    edge_at[a * m + b] = edge_at[b * m + a] = e + 1;
  }

  const std::uint32_t full = m == 0 ? 0u : static_cast<std::uint32_t>((1u << m) - 1u);
  std::vector<double> best(std::size_t(full) + 1, 0.0);
  std::vector<std::size_t> choice(std::size_t(full) + 1, 0);  // edge + 1, 0 = skip low node
  for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
    const unsigned i = static_cast<unsigned>(__builtin_ctz(mask));
    const std::uint32_t rest = mask & ~(1u << i);
    best[mask] = best[rest];
    choice[mask] = 0;
    for (std::uint32_t r = rest; r; r &= r - 1) {
      const unsigned j = static_cast<unsigned>(__builtin_ctz(r));
      const std::size_t e = edge_at[i * m + j];
      if (!e) continue;
      const double cand = g.edges[e - 1].w * g.edges[e - 1].p + best[rest & ~(1u << j)];
      if (cand > best[mask]) {
        best[mask] = cand;
        choice[mask] = e;
      }
    }
    if (mask == full) break;
  }

  MatchingResult result;
  result.from_lp = false;
  std::uint32_t mask = full;
  while (mask) {
    const unsigned i = static_cast<unsigned>(__builtin_ctz(mask));
    const std::size_t e = choice[mask];
    if (!e) {
      mask &= ~(1u << i);
      continue;
    }
    const auto& edge = g.edges[e - 1];
    result.edges.push_back(e - 1);
    result.weight += edge.w * edge.p;
    mask &= ~(1u << compact[edge.u]);
    mask &= ~(1u << compact[edge.v]);
  }
  std::sort(result.edges.begin(), result.edges.end());
  return result;
}

MatchingResult max_weight_matching(const StochasticGraph& g, const CuttingPlaneOptions& opt) {
  auto lp = solve_with_blossoms(build_lp_match(g), g, BlossomCoefficient::unit, opt);
  bool integral = lp.converged;
  for (double z : lp.solution.values)
    if (std::abs(z - std::round(z)) > 1e-6) integral = false;
  if (!integral) return brute_force_matching(g);

  MatchingResult result;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (std::round(lp.solution.values[e]) == 1.0) {
      result.edges.push_back(e);
      result.weight += g.edges[e].w * g.edges[e].p;
    }
  }
  return result;
}

}  // namespace stochmatch
