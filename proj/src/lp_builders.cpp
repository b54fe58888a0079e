#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"

namespace stochmatch {
namespace {

std::string edge_name(const StochasticGraph& g, std::size_t e) {
  return "x[" + g.nodes[g.edges[e].u] + "," + g.nodes[g.edges[e].v] + "]";
}

}  // namespace

LinearProgram build_degree_lp(const StochasticGraph& g) {
  require_valid(g);
  LinearProgram lp;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    lp.add_variable(edge_name(g, e), 0.0, 1.0, g.edges[e].w * g.edges[e].p);
  const auto inc = g.incidence();
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::vector<std::pair<std::size_t, double>> prob, count;
    for (auto e : inc[v]) {
      prob.emplace_back(e, g.edges[e].p);
      count.emplace_back(e, 1.0);
    }
    lp.add_constraint("prob[" + g.nodes[v] + "]", std::move(prob), 1.0);
    lp.add_constraint("timeout[" + g.nodes[v] + "]", std::move(count), g.timeouts[v]);
  }
  return lp;
}

LinearProgram build_lp_bip(const StochasticGraph& g) {
  if (g.kind != GraphKind::bipartite)
    throw Error(ErrorCode::not_bipartite, "LP-BIP needs a bipartite instance");
  return build_degree_lp(g);
}

LinearProgram build_lp_match(const StochasticGraph& g) {
  require_valid(g);
  LinearProgram lp;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    lp.add_variable(edge_name(g, e), 0.0, 1.0, g.edges[e].w * g.edges[e].p);
  const auto inc = g.incidence();
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (auto e : inc[v]) terms.emplace_back(e, 1.0);
    lp.add_constraint("degree[" + g.nodes[v] + "]", std::move(terms), 1.0);
  }
  return lp;
}

LinearProgram build_lp_onl(const OnlineInstance& inst) {
  require_valid(inst);
  LinearProgram lp;
  for (const auto& e : inst.edges)
    lp.add_variable("x[" + inst.items[e.item] + "," + inst.buyers[e.buyer] + "]", 0.0, 1.0,
                    e.w * e.p);
  const auto by_item = inst.edges_of_item();
  for (std::size_t a = 0; a < inst.items.size(); ++a) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (auto e : by_item[a]) terms.emplace_back(e, inst.edges[e].p);
    lp.add_constraint("prob[" + inst.items[a] + "]", std::move(terms), 1.0);
  }
  const auto by_buyer = inst.edges_of_buyer();
  for (std::size_t b = 0; b < inst.buyers.size(); ++b) {
    std::vector<std::pair<std::size_t, double>> prob, count;
    for (auto e : by_buyer[b]) {
      prob.emplace_back(e, inst.edges[e].p);
      count.emplace_back(e, 1.0);
    }
    lp.add_constraint("prob[" + inst.buyers[b] + "]", std::move(prob), 1.0);
    lp.add_constraint("timeout[" + inst.buyers[b] + "]", std::move(count),
                      inst.buyer_timeouts[b]);
  }
  return lp;
}

}  // namespace stochmatch
