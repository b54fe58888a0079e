#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stochmatch {

enum class GraphKind { bipartite, general };

/// Probabilistic edge between node indices u and v. Present with probability
/// p when probed, profit w when matched.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double p = 1.0;
  double w = 1.0;

  bool operator==(const Edge&) const = default;
};

/// Offline Stochastic Matching instance. Nodes are addressed by index; the
/// string ids only matter for serialization. For bipartite graphs `sides`
/// holds a 0/1 label per node, for general graphs it is empty.
struct StochasticGraph {
  GraphKind kind = GraphKind::general;
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<int> timeouts;
  std::vector<int> sides;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  /// incidence()[v] lists the indices of edges touching v.
  std::vector<std::vector<std::size_t>> incidence() const;

  bool operator==(const StochasticGraph&) const = default;
};

struct OnlineEdge {
  std::size_t item = 0;
  std::size_t buyer = 0;
  double p = 1.0;
  double w = 1.0;

  bool operator==(const OnlineEdge&) const = default;
};

/// Online instance: items (unbounded timeouts) and buyer types with
/// timeouts. Each of the `rounds` arrivals draws a buyer type uniformly.
struct OnlineInstance {
  std::vector<std::string> items;
  std::vector<std::string> buyers;
  std::vector<OnlineEdge> edges;
  std::vector<int> buyer_timeouts;
  int rounds = 0;

  std::vector<std::vector<std::size_t>> edges_of_buyer() const;
  std::vector<std::vector<std::size_t>> edges_of_item() const;

  /// The bipartite graph of items and buyer types. Items get side 0 and come
  /// first; buyer b becomes node items.size() + b. Edge indices are kept.
  /// Item timeouts are set to the item degree, which never binds.
  StochasticGraph type_graph() const;

  bool operator==(const OnlineInstance&) const = default;
};

using Instance = std::variant<StochasticGraph, OnlineInstance>;

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const StochasticGraph& g);
ValidationReport validate_instance(const OnlineInstance& inst);
ValidationReport validate_instance(const Instance& inst);

/// Throws Error(validation_failed) listing every violation.
void require_valid(const StochasticGraph& g);
void require_valid(const OnlineInstance& inst);

enum class InstanceKind { bipartite, general, online };

const char* to_string(InstanceKind kind) noexcept;
InstanceKind parse_instance_kind(std::string_view text);

struct GeneratorSpec {
  InstanceKind kind = InstanceKind::bipartite;
  // bipartite: left/right side sizes; online: items/buyer types.
  std::size_t left = 3;
  std::size_t right = 3;
  // general graphs only.
  std::size_t nodes = 5;
  /// Fraction of all admissible node pairs that become edges.
  double density = 0.5;
  double p_min = 0.1;
  double p_max = 1.0;
  double w_min = 1.0;
  double w_max = 1.0;
  int t_min = 1;
  int t_max = 1;
  /// Online only; 0 means one round per buyer type.
  int rounds = 0;
};

/// Deterministic for a fixed (spec, seed). Throws Error(invalid_argument)
/// on infeasible specs.
Instance generate_random_instance(const GeneratorSpec& spec, std::uint64_t seed);

std::string serialize_instance(const Instance& inst);
/// Throws Error(parse_error) on malformed input. Does not validate.
Instance parse_instance(std::string_view json_text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

/// Probability vector of the edges, in edge order.
std::vector<double> edge_probabilities(const StochasticGraph& g);

}  // namespace stochmatch
