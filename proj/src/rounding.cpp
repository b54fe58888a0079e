#include "stochmatch/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "stochmatch/error.hpp"

namespace stochmatch {
namespace {

bool is_fractional(double v) { return v > kIntegralSnap && v < 1.0 - kIntegralSnap; }

double snap(double v) {
  if (v <= kIntegralSnap) return 0.0;
  if (v >= 1.0 - kIntegralSnap) return 1.0;
  return v;
}

// Edges along a cycle or maximal path, alternately increased and decreased.
struct Step {
  std::vector<std::size_t> edges;  // position k gets sign +1 when k is even
  double up = 0.0;                 // shift magnitude of the "+ on even" move
  double down = 0.0;               // shift magnitude of the "- on even" move
};

class FractionalSupport {
 public:
  FractionalSupport(std::size_t node_count, std::span<const EdgeEnds> edges,
                    std::span<const double> x)
      : adj_(node_count) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!is_fractional(x[e])) continue;
      adj_[edges[e].u].push_back({edges[e].v, e});
      adj_[edges[e].v].push_back({edges[e].u, e});
    }
  }

  std::optional<std::vector<std::size_t>> find_cycle() const {
    const std::size_t n = adj_.size();
    std::vector<int> color(n, 0);
    std::vector<std::size_t> pos(n, 0);
    struct Frame {
      std::size_t node;
      std::size_t via;  // edge used to reach node
      std::size_t next = 0;
    };
    const std::size_t none = static_cast<std::size_t>(-1);
    for (std::size_t root = 0; root < n; ++root) {
      if (color[root] != 0 || adj_[root].empty()) continue;
      std::vector<Frame> stack{{root, none}};
      color[root] = 1;
      pos[root] = 0;
      while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next == adj_[top.node].size()) {
          color[top.node] = 2;
          stack.pop_back();
          continue;
        }
        const auto [w, e] = adj_[top.node][top.next++];
        if (e == top.via) continue;
        if (color[w] == 1) {
          std::vector<std::size_t> cycle;
          for (std::size_t k = pos[w] + 1; k < stack.size(); ++k) cycle.push_back(stack[k].via);
          cycle.push_back(e);
          if (cycle.size() % 2 != 0)
            throw Error(ErrorCode::not_bipartite, "odd cycle in the fractional support");
          return cycle;
        }
        if (color[w] == 0) {
          color[w] = 1;
          pos[w] = stack.size();
          stack.push_back({w, e});
        }
      }
    }
    return std::nullopt;
  }

  // Only valid when the support is a forest: walks from a leaf to a leaf.
  std::optional<std::vector<std::size_t>> find_maximal_path() const {
    for (std::size_t start = 0; start < adj_.size(); ++start) {
      if (adj_[start].size() != 1) continue;
      std::vector<std::size_t> path;
      std::size_t node = start;
      std::size_t via = static_cast<std::size_t>(-1);
      for (;;) {
        bool moved = false;
        for (const auto& [w, e] : adj_[node]) {
          if (e == via) continue;
          path.push_back(e);
          via = e;
          node = w;
          moved = true;
          break;
        }
        if (!moved) break;
      }
      return path;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;
};

std::optional<Step> next_step(std::size_t node_count, std::span<const EdgeEnds> edges,
                              std::span<const double> x) {
  FractionalSupport support(node_count, edges, x);
  auto chain = support.find_cycle();
  if (!chain) chain = support.find_maximal_path();
  if (!chain) return std::nullopt;

  Step step;
  step.edges = std::move(*chain);
  step.up = 2.0;
  step.down = 2.0;
  for (std::size_t k = 0; k < step.edges.size(); ++k) {
    const double v = x[step.edges[k]];
    if (k % 2 == 0) {
      step.up = std::min(step.up, 1.0 - v);
      step.down = std::min(step.down, v);
    } else {
      step.up = std::min(step.up, v);
      step.down = std::min(step.down, 1.0 - v);
    }
  }
  return step;
}

void apply(const Step& step, bool go_up, std::vector<double>& x) {
  const double amount = go_up ? step.up : -step.down;
  for (std::size_t k = 0; k < step.edges.size(); ++k) {
    double& v = x[step.edges[k]];
    v = snap(k % 2 == 0 ? v + amount : v - amount);
  }
}

// "up" is taken with probability down / (up + down), which keeps E[x] fixed.
double up_probability(const Step& step) { return step.down / (step.up + step.down); }

std::vector<double> prepare(std::size_t node_count, std::span<const EdgeEnds> edges,
                            std::span<const double> x) {
  if (x.size() != edges.size())
    throw Error(ErrorCode::invalid_argument, "x must have one value per edge");
  std::vector<int> color(node_count, -1);
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count || e.u == e.v)
      throw Error(ErrorCode::invalid_argument, "edge endpoint out of range");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (std::size_t root = 0; root < node_count; ++root) {
    if (color[root] >= 0) continue;
    color[root] = 0;
    std::vector<std::size_t> queue{root};
    for (std::size_t k = 0; k < queue.size(); ++k) {
      for (auto w : adj[queue[k]]) {
        if (color[w] < 0) {
          color[w] = 1 - color[queue[k]];
          queue.push_back(w);
        } else if (color[w] == color[queue[k]]) {
          throw Error(ErrorCode::not_bipartite, "dependent rounding needs a bipartite edge set");
        }
      }
    }
  }
  std::vector<double> values(x.begin(), x.end());
  for (auto& v : values) {
    if (!(v >= -kIntegralSnap && v <= 1.0 + kIntegralSnap))
      throw Error(ErrorCode::invalid_argument, "x values must lie in [0,1]");
    v = snap(v);
  }
  return values;
}

RoundedEdgeSet to_rounded(const std::vector<double>& values) {
  RoundedEdgeSet out;
  out.indicator.resize(values.size());
  for (std::size_t e = 0; e < values.size(); ++e) {
    out.indicator[e] = values[e] >= 0.5 ? 1 : 0;
    if (out.indicator[e]) out.selected.push_back(e);
  }
  return out;
}

}  // namespace

RoundedEdgeSet gkps_round(std::size_t node_count, std::span<const EdgeEnds> edges,
                          std::span<const double> x, Rng& rng) {
  auto values = prepare(node_count, edges, x);
  while (auto step = next_step(node_count, edges, values)) {
    apply(*step, uniform01(rng) < up_probability(*step), values);
  }
  return to_rounded(values);
}

std::vector<EdgeEnds> edge_ends(const StochasticGraph& g) {
  std::vector<EdgeEnds> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges) out.push_back({e.u, e.v});
  return out;
}

RoundedEdgeSet gkps_round(const StochasticGraph& g, std::span<const double> x, Rng& rng) {
  if (g.kind != GraphKind::bipartite)
    throw Error(ErrorCode::not_bipartite, "dependent rounding needs a bipartite instance");
  const auto ends = edge_ends(g);
  return gkps_round(g.node_count(), ends, x, rng);
}

std::vector<RoundingOutcome> enumerate_gkps_outcomes(std::size_t node_count,
                                                     std::span<const EdgeEnds> edges,
                                                     std::span<const double> x,
                                                     std::size_t max_outcomes) {
  std::vector<RoundingOutcome> out;
  struct Pending {
    std::vector<double> values;
    double probability;
  };
  std::vector<Pending> work{{prepare(node_count, edges, x), 1.0}};
  while (!work.empty()) {
    Pending cur = std::move(work.back());
    work.pop_back();
    auto step = next_step(node_count, edges, cur.values);
    if (!step) {
      if (out.size() == max_outcomes)
        throw Error(ErrorCode::cap_exceeded, "rounding tree has too many leaves");
      out.push_back({to_rounded(cur.values).indicator, cur.probability});
      continue;
    }
    const double q = up_probability(*step);
    Pending down = cur;
    apply(*step, true, cur.values);
    apply(*step, false, down.values);
    cur.probability *= q;
    down.probability *= 1.0 - q;
    if (down.probability > 0.0) work.push_back(std::move(down));
    if (cur.probability > 0.0) work.push_back(std::move(cur));
  }
  return out;
}

bool degree_preserved(std::size_t node_count, std::span<const EdgeEnds> edges,
                      std::span<const double> x, const RoundedEdgeSet& rounded) {
  std::vector<double> sum(node_count, 0.0);
  std::vector<int> count(node_count, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    sum[edges[e].u] += x[e];
    sum[edges[e].v] += x[e];
    if (rounded.indicator[e]) {
      ++count[edges[e].u];
      ++count[edges[e].v];
    }
  }
  for (std::size_t v = 0; v < node_count; ++v)
    if (count[v] > static_cast<int>(std::ceil(sum[v] - 1e-9))) return false;
  return true;
}

}  // namespace stochmatch
