#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "stochmatch/instance.hpp"

namespace stochmatch::testing {

struct E {
  std::size_t u, v;
  double p, w;
};

/// General graph on nodes v0..v{n-1}.
inline StochasticGraph general_graph(std::size_t n, const std::vector<E>& edges,
                                     std::vector<int> timeouts = {}) {
  StochasticGraph g;
  g.kind = GraphKind::general;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("v" + std::to_string(i));
  for (const auto& e : edges) g.edges.push_back({e.u, e.v, e.p, e.w});
  g.timeouts = timeouts.empty() ? std::vector<int>(n, 1) : std::move(timeouts);
  return g;
}

/// Bipartite graph; nodes 0..left-1 on side 0, the rest on side 1.
inline StochasticGraph bipartite_graph(std::size_t left, std::size_t right,
                                       const std::vector<E>& edges,
                                       std::vector<int> timeouts = {}) {
  auto g = general_graph(left + right, edges, std::move(timeouts));
  g.kind = GraphKind::bipartite;
  for (std::size_t i = 0; i < left + right; ++i) g.sides.push_back(i < left ? 0 : 1);
  return g;
}

/// Online instance with one round per buyer type. Edge u is the item, v the buyer.
inline OnlineInstance online_instance(std::size_t items, std::size_t buyers,
                                      const std::vector<E>& edges,
                                      std::vector<int> timeouts = {}) {
  OnlineInstance inst;
  for (std::size_t a = 0; a < items; ++a) inst.items.push_back("a" + std::to_string(a));
  for (std::size_t b = 0; b < buyers; ++b) inst.buyers.push_back("b" + std::to_string(b));
  for (const auto& e : edges) inst.edges.push_back({e.u, e.v, e.p, e.w});
  inst.buyer_timeouts = timeouts.empty() ? std::vector<int>(buyers, 1) : std::move(timeouts);
  inst.rounds = static_cast<int>(buyers);
  return inst;
}

/// Three binomial standard deviations of a frequency over n trials.
inline double three_sigma(double p, double n) {
  return 3.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

/// Composite Simpson rule on [a, b] with `intervals` (even) pieces.
template <typename F>
double simpson(F f, double a, double b, int intervals = 20000) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace stochmatch::testing
