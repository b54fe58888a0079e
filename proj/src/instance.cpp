#include "stochmatch/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "stochmatch/error.hpp"
#include "stochmatch/random.hpp"

namespace stochmatch {

using nlohmann::json;

std::vector<std::vector<std::size_t>> StochasticGraph::incidence() const {
  std::vector<std::vector<std::size_t>> inc(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].u < inc.size()) inc[edges[e].u].push_back(e);
    if (edges[e].v < inc.size() && edges[e].v != edges[e].u) inc[edges[e].v].push_back(e);
  }
  return inc;
}

std::vector<std::vector<std::size_t>> OnlineInstance::edges_of_buyer() const {
  std::vector<std::vector<std::size_t>> out(buyers.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].buyer < out.size()) out[edges[e].buyer].push_back(e);
  return out;
}

std::vector<std::vector<std::size_t>> OnlineInstance::edges_of_item() const {
  std::vector<std::vector<std::size_t>> out(items.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].item < out.size()) out[edges[e].item].push_back(e);
  return out;
}

StochasticGraph OnlineInstance::type_graph() const {
  StochasticGraph g;
  g.kind = GraphKind::bipartite;
  g.nodes = items;
  g.nodes.insert(g.nodes.end(), buyers.begin(), buyers.end());
  g.sides.assign(items.size(), 0);
  g.sides.resize(g.nodes.size(), 1);
  g.timeouts.assign(items.size(), 1);
  g.timeouts.insert(g.timeouts.end(), buyer_timeouts.begin(), buyer_timeouts.end());
  for (const auto& e : edges) {
    g.edges.push_back({e.item, items.size() + e.buyer, e.p, e.w});
  }
  auto inc = g.incidence();
  for (std::size_t a = 0; a < items.size(); ++a)
    g.timeouts[a] = std::max<int>(1, static_cast<int>(inc[a].size()));
  return g;
}

namespace {

void check_edge_values(double p, double w, std::size_t index,
                       std::vector<std::string>& out) {
  const std::string where = "edge " + std::to_string(index) + ": ";
  if (!(p > 0.0 && p <= 1.0)) out.push_back(where + "probability out of (0,1]");
  if (!(w > 0.0) || !std::isfinite(w)) out.push_back(where + "weight must be positive and finite");
}

}  // namespace

ValidationReport validate_instance(const StochasticGraph& g) {
  ValidationReport report;
  auto& out = report.violations;
  const std::size_t n = g.node_count();

  if (g.timeouts.size() != n) out.push_back("timeout count does not match node count");
  for (std::size_t v = 0; v < g.timeouts.size() && v < n; ++v)
    if (g.timeouts[v] < 1) out.push_back("node " + g.nodes[v] + ": timeout must be >= 1");

  std::set<std::string> names;
  for (const auto& name : g.nodes)
    if (!names.insert(name).second) out.push_back("duplicate node id " + name);

  const bool bipartite = g.kind == GraphKind::bipartite;
  if (bipartite) {
    if (g.sides.size() != n) {
      out.push_back("bipartite graph needs a side label per node");
    } else {
      for (std::size_t v = 0; v < n; ++v)
        if (g.sides[v] != 0 && g.sides[v] != 1)
          out.push_back("node " + g.nodes[v] + ": side must be 0 or 1");
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    const std::string where = "edge " + std::to_string(e) + ": ";
    check_edge_values(edge.p, edge.w, e, out);
    if (edge.u >= n || edge.v >= n) {
      out.push_back(where + "endpoint out of range");
      continue;
    }
    if (edge.u == edge.v) out.push_back(where + "self-loop");
    auto key = std::minmax(edge.u, edge.v);
    if (!seen.insert({key.first, key.second}).second) out.push_back(where + "duplicate edge");
    if (bipartite && g.sides.size() == n && g.sides[edge.u] == g.sides[edge.v])
      out.push_back(where + "edge inside one side");
  }
  return report;
}

ValidationReport validate_instance(const OnlineInstance& inst) {
  ValidationReport report;
  auto& out = report.violations;

  std::set<std::string> names;
  for (const auto& name : inst.items)
    if (!names.insert(name).second) out.push_back("duplicate node id " + name);
  for (const auto& name : inst.buyers)
    if (!names.insert(name).second) out.push_back("duplicate node id " + name);

  if (inst.buyer_timeouts.size() != inst.buyers.size())
    out.push_back("timeout count does not match buyer type count");
  for (std::size_t b = 0; b < inst.buyer_timeouts.size() && b < inst.buyers.size(); ++b)
    if (inst.buyer_timeouts[b] < 1)
      out.push_back("buyer " + inst.buyers[b] + ": timeout must be >= 1");

  if (inst.rounds < 1) out.push_back("rounds must be >= 1");
  if (inst.rounds != static_cast<int>(inst.buyers.size()))
    out.push_back("rounds must equal the number of buyer types (uniform 1/n arrivals)");

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const auto& edge = inst.edges[e];
    check_edge_values(edge.p, edge.w, e, out);
    if (edge.item >= inst.items.size() || edge.buyer >= inst.buyers.size()) {
      out.push_back("edge " + std::to_string(e) + ": endpoint out of range");
      continue;
    }
    if (!seen.insert({edge.item, edge.buyer}).second)
      out.push_back("edge " + std::to_string(e) + ": duplicate edge");
  }
  return report;
}

ValidationReport validate_instance(const Instance& inst) {
  return std::visit([](const auto& i) { return validate_instance(i); }, inst);
}

namespace {

[[noreturn]] void throw_report(const ValidationReport& report) {
  std::string msg = "invalid instance:";
  for (const auto& v : report.violations) msg += "\n  " + v;
  throw Error(ErrorCode::validation_failed, msg);
}

}  // namespace

void require_valid(const StochasticGraph& g) {
  auto report = validate_instance(g);
  if (!report.ok()) throw_report(report);
}

void require_valid(const OnlineInstance& inst) {
  auto report = validate_instance(inst);
  if (!report.ok()) throw_report(report);
}

const char* to_string(InstanceKind kind) noexcept {
  switch (kind) {
    case InstanceKind::bipartite: return "bipartite";
    case InstanceKind::general: return "general";
    case InstanceKind::online: return "online";
  }
  return "?";
}

InstanceKind parse_instance_kind(std::string_view text) {
  if (text == "bipartite") return InstanceKind::bipartite;
  if (text == "general") return InstanceKind::general;
  if (text == "online") return InstanceKind::online;
  throw Error(ErrorCode::invalid_argument, "unknown instance kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Generation

namespace {

void check_spec(const GeneratorSpec& spec) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
  if (!(spec.density >= 0.0 && spec.density <= 1.0))
    fail("density must lie in [0,1] (cannot exceed the complete graph)");
  if (!(spec.p_min > 0.0 && spec.p_min <= spec.p_max && spec.p_max <= 1.0))
    fail("probability range must satisfy 0 < p_min <= p_max <= 1");
  if (!(spec.w_min > 0.0 && spec.w_min <= spec.w_max && std::isfinite(spec.w_max)))
    fail("weight range must satisfy 0 < w_min <= w_max");
  if (!(spec.t_min >= 1 && spec.t_min <= spec.t_max))
    fail("timeout range must satisfy 1 <= t_min <= t_max");
  if (spec.rounds < 0) fail("rounds must be nonnegative");
  if (spec.kind == InstanceKind::online && spec.rounds != 0 &&
      spec.rounds != static_cast<int>(spec.right))
    fail("online rounds must equal the number of buyer types");
}

double draw_in(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return lo + (hi - lo) * uniform01(rng);
}

// Picks round(density * pairs.size()) pairs, returned in canonical order.
std::vector<std::pair<std::size_t, std::size_t>> choose_pairs(
    std::vector<std::pair<std::size_t, std::size_t>> pairs, double density, Rng& rng) {
  const auto count = static_cast<std::size_t>(
      std::llround(density * static_cast<double>(pairs.size())));
  for (std::size_t i = 0; i < count; ++i) {
    auto j = i + uniform_index(rng, pairs.size() - i);
    std::swap(pairs[i], pairs[j]);
  }
  pairs.resize(count);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

int draw_timeout(Rng& rng, const GeneratorSpec& spec) {
  return spec.t_min + static_cast<int>(uniform_index(
                          rng, static_cast<std::uint64_t>(spec.t_max - spec.t_min + 1)));
}

}  // namespace

Instance generate_random_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);

  if (spec.kind == InstanceKind::online) {
    OnlineInstance inst;
    for (std::size_t a = 0; a < spec.left; ++a) inst.items.push_back("a" + std::to_string(a));
    for (std::size_t b = 0; b < spec.right; ++b) inst.buyers.push_back("b" + std::to_string(b));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < spec.left; ++a)
      for (std::size_t b = 0; b < spec.right; ++b) pairs.emplace_back(a, b);
    for (auto [a, b] : choose_pairs(std::move(pairs), spec.density, rng)) {
      double p = draw_in(rng, spec.p_min, spec.p_max);
      double w = draw_in(rng, spec.w_min, spec.w_max);
      inst.edges.push_back({a, b, p, w});
    }
    for (std::size_t b = 0; b < spec.right; ++b) inst.buyer_timeouts.push_back(draw_timeout(rng, spec));
    inst.rounds = spec.rounds != 0 ? spec.rounds : static_cast<int>(spec.right);
    return inst;
  }

  StochasticGraph g;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (spec.kind == InstanceKind::bipartite) {
    g.kind = GraphKind::bipartite;
    for (std::size_t i = 0; i < spec.left; ++i) g.nodes.push_back("l" + std::to_string(i));
    for (std::size_t i = 0; i < spec.right; ++i) g.nodes.push_back("r" + std::to_string(i));
    g.sides.assign(spec.left, 0);
    g.sides.resize(spec.left + spec.right, 1);
    for (std::size_t i = 0; i < spec.left; ++i)
      for (std::size_t j = 0; j < spec.right; ++j) pairs.emplace_back(i, spec.left + j);
  } else {
    g.kind = GraphKind::general;
    for (std::size_t i = 0; i < spec.nodes; ++i) g.nodes.push_back("v" + std::to_string(i));
    for (std::size_t i = 0; i < spec.nodes; ++i)
      for (std::size_t j = i + 1; j < spec.nodes; ++j) pairs.emplace_back(i, j);
  }
  for (auto [u, v] : choose_pairs(std::move(pairs), spec.density, rng)) {
    double p = draw_in(rng, spec.p_min, spec.p_max);
    double w = draw_in(rng, spec.w_min, spec.w_max);
    g.edges.push_back({u, v, p, w});
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) g.timeouts.push_back(draw_timeout(rng, spec));
  return g;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void parse_fail(const std::string& m) { throw Error(ErrorCode::parse_error, m); }

std::map<std::string, std::size_t> index_names(const std::vector<std::string>& names,
                                               std::map<std::string, std::size_t> into = {},
                                               std::size_t offset = 0) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!into.emplace(names[i], offset + i).second) parse_fail("duplicate node id '" + names[i] + "'");
  return into;
}

std::vector<std::string> read_names(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) parse_fail(std::string("missing array '") + key + "'");
  std::vector<std::string> names;
  for (const auto& n : doc[key]) {
    if (!n.is_string()) parse_fail(std::string("'") + key + "' entries must be strings");
    names.push_back(n.get<std::string>());
  }
  return names;
}

struct RawEdge {
  std::string u, v;
  double p, w;
};

std::vector<RawEdge> read_edges(const json& doc) {
  std::vector<RawEdge> out;
  if (!doc.contains("edges")) return out;
  if (!doc["edges"].is_array()) parse_fail("'edges' must be an array");
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("u") || !e.contains("v") || !e["u"].is_string() ||
        !e["v"].is_string())
      parse_fail("each edge needs string fields 'u' and 'v'");
    if (!e.contains("p") || !e["p"].is_number() || !e.contains("w") || !e["w"].is_number())
      parse_fail("each edge needs numeric fields 'p' and 'w'");
    out.push_back({e["u"].get<std::string>(), e["v"].get<std::string>(), e["p"].get<double>(),
                   e["w"].get<double>()});
  }
  return out;
}

std::size_t lookup(const std::map<std::string, std::size_t>& index, const std::string& name) {
  auto it = index.find(name);
  if (it == index.end()) parse_fail("edge references unknown node '" + name + "'");
  return it->second;
}

int read_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) parse_fail(what + " must be an integer");
  return v.get<int>();
}

}  // namespace

std::string serialize_instance(const Instance& inst) {
  json doc;
  if (const auto* g = std::get_if<StochasticGraph>(&inst)) {
    doc["kind"] = g->kind == GraphKind::bipartite ? "bipartite" : "general";
    doc["nodes"] = g->nodes;
    if (g->kind == GraphKind::bipartite) {
      json sides = json::object();
      for (std::size_t v = 0; v < g->nodes.size() && v < g->sides.size(); ++v)
        sides[g->nodes[v]] = g->sides[v];
      doc["sides"] = sides;
    }
    json edges = json::array();
    for (const auto& e : g->edges)
      edges.push_back({{"u", g->nodes.at(e.u)}, {"v", g->nodes.at(e.v)}, {"p", e.p}, {"w", e.w}});
    doc["edges"] = edges;
    json timeouts = json::object();
    for (std::size_t v = 0; v < g->nodes.size() && v < g->timeouts.size(); ++v)
      timeouts[g->nodes[v]] = g->timeouts[v];
    doc["timeouts"] = timeouts;
  } else {
    const auto& o = std::get<OnlineInstance>(inst);
    doc["kind"] = "online";
    doc["items"] = o.items;
    doc["buyers"] = o.buyers;
    json edges = json::array();
    for (const auto& e : o.edges)
      edges.push_back(
          {{"u", o.items.at(e.item)}, {"v", o.buyers.at(e.buyer)}, {"p", e.p}, {"w", e.w}});
    doc["edges"] = edges;
    json timeouts = json::object();
    for (std::size_t b = 0; b < o.buyers.size() && b < o.buyer_timeouts.size(); ++b)
      timeouts[o.buyers[b]] = o.buyer_timeouts[b];
    doc["timeouts"] = timeouts;
    doc["rounds"] = o.rounds;
  }
  return doc.dump(2) + "\n";
}

Instance parse_instance(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("instance must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) parse_fail("missing string field 'kind'");
  const auto kind = doc["kind"].get<std::string>();
  const json timeouts = doc.value("timeouts", json::object());
  if (!timeouts.is_object()) parse_fail("'timeouts' must be an object");

  if (kind == "online") {
    OnlineInstance inst;
    inst.items = read_names(doc, "items");
    inst.buyers = read_names(doc, "buyers");
    auto items = index_names(inst.items);
    auto buyers = index_names(inst.buyers);
    index_names(inst.buyers, items, inst.items.size());  // ids unique across sides
    for (const auto& e : read_edges(doc)) {
      auto a = items.find(e.u);
      auto b = buyers.find(e.v);
      if (a == items.end() || b == buyers.end())
        parse_fail("online edge must go from an item (u) to a buyer type (v): " + e.u + "-" + e.v);
      inst.edges.push_back({a->second, b->second, e.p, e.w});
    }
    inst.buyer_timeouts.assign(inst.buyers.size(), 1);
    for (const auto& [name, value] : timeouts.items()) {
      if (items.count(name)) parse_fail("item timeouts are unbounded and must not be given ('" + name + "')");
      inst.buyer_timeouts[lookup(buyers, name)] = read_int(value, "timeout of " + name);
    }
    if (doc.contains("rounds")) {
      inst.rounds = read_int(doc["rounds"], "'rounds'");
    } else {
      inst.rounds = static_cast<int>(inst.buyers.size());
    }
    return inst;
  }

  StochasticGraph g;
  if (kind == "bipartite") {
    g.kind = GraphKind::bipartite;
  } else if (kind == "general") {
    g.kind = GraphKind::general;
  } else {
    parse_fail("unknown kind '" + kind + "'");
  }
  g.nodes = read_names(doc, "nodes");
  auto index = index_names(g.nodes);
  for (const auto& e : read_edges(doc))
    g.edges.push_back({lookup(index, e.u), lookup(index, e.v), e.p, e.w});
  g.timeouts.assign(g.nodes.size(), 1);
  for (const auto& [name, value] : timeouts.items())
    g.timeouts[lookup(index, name)] = read_int(value, "timeout of " + name);
  if (g.kind == GraphKind::bipartite) {
    if (!doc.contains("sides") || !doc["sides"].is_object())
      parse_fail("bipartite instance needs a 'sides' object mapping node id to 0 or 1");
    g.sides.assign(g.nodes.size(), -1);
    for (const auto& [name, value] : doc["sides"].items())
      g.sides[lookup(index, name)] = read_int(value, "side of " + name);
  }
  return g;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  out << serialize_instance(inst);
}

std::vector<double> edge_probabilities(const StochasticGraph& g) {
  std::vector<double> p;
  p.reserve(g.edges.size());
  for (const auto& e : g.edges) p.push_back(e.p);
  return p;
}

}  // namespace stochmatch
