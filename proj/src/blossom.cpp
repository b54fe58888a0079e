#include <algorithm>
#include <queue>
#include <set>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"

namespace stochmatch {
namespace {

constexpr double kSupportEps = 1e-12;
constexpr double kViolationEps = 1e-9;

double coefficient(const Edge& e, BlossomCoefficient coef) {
  return coef == BlossomCoefficient::probability ? e.p : 1.0;
}

std::string set_name(const StochasticGraph& g, const OddSet& set) {
  std::string name = "blossom[";
  for (std::size_t i = 0; i < set.nodes.size(); ++i) {
    if (i) name += ",";
    name += g.nodes[set.nodes[i]];
  }
  return name + "]";
}

double violation(double load, std::size_t size) {
  return load - static_cast<double>(size - 1) / 2.0;
}

// Dense weighted adjacency of the support: load[u][v] = sum c_e x_e.
struct Support {
  std::vector<std::vector<double>> load;
  std::vector<std::vector<std::size_t>> adj;
  std::vector<std::size_t> nodes;
};

Support build_support(const StochasticGraph& g, std::span<const double> x,
                      BlossomCoefficient coef) {
  const std::size_t n = g.node_count();
  Support s;
  s.load.assign(n, std::vector<double>(n, 0.0));
  s.adj.assign(n, {});
  std::vector<bool> used(n, false);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (x[e] <= kSupportEps) continue;
    const auto& edge = g.edges[e];
    const double c = coefficient(edge, coef) * x[e];
    s.load[edge.u][edge.v] += c;
    s.load[edge.v][edge.u] += c;
    s.adj[edge.u].push_back(edge.v);
    s.adj[edge.v].push_back(edge.u);
    used[edge.u] = used[edge.v] = true;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (used[v]) s.nodes.push_back(v);
  return s;
}

class Search {
 public:
  explicit Search(const Support& s) : s_(s) {}

  void consider(std::vector<std::size_t> nodes) {
    if (nodes.size() < 3 || nodes.size() % 2 == 0) return;
    std::sort(nodes.begin(), nodes.end());
    double load = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) load += s_.load[nodes[i]][nodes[j]];
    offer(nodes, load);
  }

  void enumerate(std::size_t max_size) {
    std::vector<std::size_t> chosen;
    recurse(0, chosen, 0.0, max_size);
  }

  std::optional<OddSet> best() const {
    if (!found_) return std::nullopt;
    return best_;
  }

 private:
  void offer(const std::vector<std::size_t>& nodes, double load) {
    const double v = violation(load, nodes.size());
    if (v > kViolationEps && (!found_ || v > best_violation_ + 1e-12)) {
      found_ = true;
      best_violation_ = v;
      best_.nodes = nodes;
    }
  }

  void recurse(std::size_t start, std::vector<std::size_t>& chosen, double load,
               std::size_t max_size) {
    if (chosen.size() >= 3 && chosen.size() % 2 == 1) offer(chosen, load);
    if (chosen.size() == max_size) return;
    for (std::size_t i = start; i < s_.nodes.size(); ++i) {
      const std::size_t v = s_.nodes[i];
      double added = 0.0;
      for (auto u : chosen) added += s_.load[u][v];
      chosen.push_back(v);
      recurse(i + 1, chosen, load + added, max_size);
      chosen.pop_back();
    }
  }

  const Support& s_;
  bool found_ = false;
  double best_violation_ = 0.0;
  OddSet best_;
};

// Odd cycles found as non-tree edges joining two BFS nodes of equal depth.
void odd_cycles(const Support& s, Search& search) {
  const std::size_t n = s.adj.size();
  for (auto root : s.nodes) {
    std::vector<long> depth(n, -1);
    std::vector<std::size_t> parent(n, n);
    std::queue<std::size_t> q;
    depth[root] = 0;
    q.push(root);
    while (!q.empty()) {
      auto a = q.front();
      q.pop();
      for (auto b : s.adj[a]) {
        if (depth[b] < 0) {
          depth[b] = depth[a] + 1;
          parent[b] = a;
          q.push(b);
        } else if (depth[b] == depth[a] && a < b) {
          std::vector<std::size_t> left{a}, right{b};
          auto u = a, v = b;
          while (u != v) {
            u = parent[u];
            v = parent[v];
            left.push_back(u);
            if (u != v) right.push_back(v);
          }
          left.insert(left.end(), right.begin(), right.end());
          search.consider(std::move(left));
        }
      }
    }
  }
}

void odd_components(const Support& s, Search& search) {
  const std::size_t n = s.adj.size();
  std::vector<bool> seen(n, false);
  for (auto root : s.nodes) {
    if (seen[root]) continue;
    std::vector<std::size_t> comp{root};
    seen[root] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (auto b : s.adj[comp[k]])
        if (!seen[b]) {
          seen[b] = true;
          comp.push_back(b);
        }
    search.consider(std::move(comp));
  }
}

}  // namespace

double blossom_load(const StochasticGraph& g, std::span<const double> x, const OddSet& set,
                    BlossomCoefficient coef) {
  std::vector<bool> in(g.node_count(), false);
  for (auto v : set.nodes) in[v] = true;
  double load = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (in[g.edges[e].u] && in[g.edges[e].v]) load += coefficient(g.edges[e], coef) * x[e];
  return load;
}

void add_blossom_row(LinearProgram& lp, const StochasticGraph& g, const OddSet& set,
                     BlossomCoefficient coef) {
  if (set.nodes.size() < 3 || set.nodes.size() % 2 == 0)
    throw Error(ErrorCode::invalid_argument, "blossom row needs an odd set of size >= 3");
  std::vector<bool> in(g.node_count(), false);
  for (auto v : set.nodes) in[v] = true;
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (in[g.edges[e].u] && in[g.edges[e].v]) terms.emplace_back(e, coefficient(g.edges[e], coef));
  lp.add_constraint(set_name(g, set), std::move(terms),
                    static_cast<double>(set.nodes.size() - 1) / 2.0);
}

std::optional<OddSet> separate_blossom(const StochasticGraph& g, std::span<const double> x,
                                       std::size_t max_set_size, BlossomCoefficient coef) {
  if (x.size() != g.edges.size())
    throw Error(ErrorCode::invalid_argument, "solution size does not match edge count");
  const Support support = build_support(g, x, coef);
  Search search(support);
  search.enumerate(max_set_size);
  odd_cycles(support, search);
  odd_components(support, search);
  return search.best();
}

CuttingPlaneResult solve_with_blossoms(LinearProgram lp, const StochasticGraph& g,
                                       BlossomCoefficient coef, const CuttingPlaneOptions& opt) {
  CuttingPlaneResult result;
  std::set<OddSet> added;
  for (std::size_t iter = 0;; ++iter) {
    result.solution = solve_lp(lp);
    result.objective_history.push_back(result.solution.objective_value);
    auto cut = separate_blossom(g, result.solution.values, opt.max_set_size, coef);
    if (!cut) {
      result.converged = true;
      return result;
    }
    // A repeated cut means the solver returned a point violating its own row.
    if (iter >= opt.max_iterations || !added.insert(*cut).second) return result;
    add_blossom_row(lp, g, *cut, coef);
    result.cuts.push_back(*cut);
  }
}

CuttingPlaneResult solve_lp_gen(const StochasticGraph& g, const CuttingPlaneOptions& opt) {
  return solve_with_blossoms(build_degree_lp(g), g, BlossomCoefficient::probability, opt);
}

}  // namespace stochmatch
