#include "stochmatch/oracle.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include "stochmatch/error.hpp"

namespace stochmatch {
namespace {

// Edges and nodes renumbered so that masks fit in 32 bits each.
struct Compact {
  struct CEdge {
    unsigned u, v;
    double p, w;
  };
  std::vector<CEdge> edges;
  std::vector<std::uint32_t> incident;  // per compact node: mask of incident edges
  std::vector<int> timeouts;
};

Compact compact(const StochasticGraph& g, std::span<const std::size_t> edge_ids) {
  Compact c;
  std::vector<int> id(g.node_count(), -1);
  auto node = [&](std::size_t v) {
    if (id[v] < 0) {
      id[v] = static_cast<int>(c.timeouts.size());
      c.timeouts.push_back(g.timeouts[v]);
      c.incident.push_back(0);
    }
    return static_cast<unsigned>(id[v]);
  };
  for (std::size_t k = 0; k < edge_ids.size(); ++k) {
    const auto& e = g.edges.at(edge_ids[k]);
    const unsigned u = node(e.u), v = node(e.v);
    c.edges.push_back({u, v, e.p, e.w});
    c.incident[u] |= 1u << k;
    c.incident[v] |= 1u << k;
  }
  return c;
}

void check_cap(std::size_t edges, std::size_t cap) {
  if (edges > cap || edges > 16)
    throw Error(ErrorCode::cap_exceeded, "exact oracle limited to " + std::to_string(cap) +
                                             " edges, got " + std::to_string(edges));
}

class AdaptiveDp {
 public:
  explicit AdaptiveDp(Compact c) : c_(std::move(c)) {}

  double value(std::uint32_t probed, std::uint32_t matched) {
    const std::uint64_t key = (std::uint64_t(probed) << 32) | matched;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double best = 0.0;
    for (std::size_t k = 0; k < c_.edges.size(); ++k) {
      const auto& e = c_.edges[k];
      const std::uint32_t bit = 1u << k;
      if ((probed & bit) || (matched >> e.u & 1u) || (matched >> e.v & 1u)) continue;
      if (std::popcount(probed & c_.incident[e.u]) >= c_.timeouts[e.u] ||
          std::popcount(probed & c_.incident[e.v]) >= c_.timeouts[e.v])
        continue;
      const double present = e.w + value(probed | bit, matched | (1u << e.u) | (1u << e.v));
      const double absent = value(probed | bit, matched);
      best = std::max(best, e.p * present + (1.0 - e.p) * absent);
    }
    memo_.emplace(key, best);
    return best;
  }

 private:
  Compact c_;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace

double optimal_adaptive_value(const StochasticGraph& g, std::size_t max_edges) {
  require_valid(g);
  check_cap(g.edges.size(), max_edges);
  std::vector<std::size_t> all(g.edges.size());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;
  AdaptiveDp dp(compact(g, all));
  return dp.value(0, 0);
}

double exact_fixed_order_value(const StochasticGraph& g, std::span<const std::size_t> order,
                               std::size_t max_edges) {
  require_valid(g);
  check_cap(order.size(), max_edges);
  std::vector<bool> seen(g.edges.size(), false);
  for (auto e : order) {
    if (e >= g.edges.size() || seen[e])
      throw Error(ErrorCode::invalid_argument, "order must list distinct edge indices");
    seen[e] = true;
  }
  const Compact c = compact(g, order);
  // Distribution over (probed edges, matched nodes).
  std::unordered_map<std::uint64_t, double> dist{{0, 1.0}};
  double expected = 0.0;
  for (std::size_t k = 0; k < c.edges.size(); ++k) {
    const auto& e = c.edges[k];
    std::unordered_map<std::uint64_t, double> next;
    for (const auto& [key, q] : dist) {
      const auto probed = static_cast<std::uint32_t>(key >> 32);
      const auto matched = static_cast<std::uint32_t>(key);
      if ((matched >> e.u & 1u) || (matched >> e.v & 1u)) {
        next[key] += q;
        continue;
      }
      if (std::popcount(probed & c.incident[e.u]) >= c.timeouts[e.u] ||
          std::popcount(probed & c.incident[e.v]) >= c.timeouts[e.v])
        throw Error(ErrorCode::invalid_argument, "probe order can exceed a timeout");
      const std::uint32_t p2 = probed | (1u << k);
      expected += q * e.p * e.w;
      next[(std::uint64_t(p2) << 32) | matched | (1u << e.u) | (1u << e.v)] += q * e.p;
      next[(std::uint64_t(p2) << 32) | matched] += q * (1.0 - e.p);
    }
    dist = std::move(next);
  }
  return expected;
}

PolicyEstimate estimate_policy_value(const Policy& policy, std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw Error(ErrorCode::invalid_argument, "need at least two trials");
  // Welford's running mean and variance.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {t}));
    const double x = policy(rng);
    const double d = x - mean;
    mean += d / static_cast<double>(t + 1);
    m2 += d * (x - mean);
  }
  PolicyEstimate est;
  est.trials = trials;
  est.mean = mean;
  const double var = m2 / static_cast<double>(trials - 1);
  est.half_width = 3.0 * std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
  return est;
}

}  // namespace stochmatch
