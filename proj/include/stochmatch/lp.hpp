#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochmatch/instance.hpp"

namespace stochmatch {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
};

/// sum(terms) <= rhs. Terms are (variable index, coefficient).
struct LpConstraint {
  std::string name;
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
};

/// Maximization LP with bounded variables and <= rows.
struct LinearProgram {
  std::vector<LpVariable> variables;
  std::vector<LpConstraint> constraints;

  std::size_t add_variable(std::string name, double lower, double upper, double objective);
  void add_constraint(std::string name, std::vector<std::pair<std::size_t, double>> terms,
                      double rhs);
};

struct LpSolution {
  std::vector<double> values;
  double objective_value = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Dense two-phase simplex with Bland's rule. Throws Error(infeasible) or
/// Error(unbounded); Error(invalid_argument) for non-finite data or a
/// variable without a finite lower bound.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest violation of bounds and rows by `values` (0 when feasible).
double max_violation(const LinearProgram& lp, std::span<const double> values);

// ---------------------------------------------------------------------------
// Builders. Variable i always corresponds to edge i of the instance.

/// Degree LP: per node sum p_e x_e <= 1 and sum x_e <= t_v, 0 <= x <= 1.
/// Accepts any graph; on a general graph this is LP-GEN without blossoms.
LinearProgram build_degree_lp(const StochasticGraph& g);

/// LP-BIP. Throws Error(not_bipartite) unless g.kind is bipartite.
LinearProgram build_lp_bip(const StochasticGraph& g);

/// Matching LP: maximize sum w_e p_e z_e with sum z_e <= 1 per node.
LinearProgram build_lp_match(const StochasticGraph& g);

/// LP-ONL over the edges of the online instance.
LinearProgram build_lp_onl(const OnlineInstance& inst);

/// Odd node set with at least three members, sorted ascending.
struct OddSet {
  std::vector<std::size_t> nodes;

  bool operator==(const OddSet&) const = default;
  bool operator<(const OddSet& o) const { return nodes < o.nodes; }
};

/// Coefficient used for edge e inside a blossom row: p_e for LP-GEN, 1 for
/// the matching LP.
enum class BlossomCoefficient { probability, unit };

/// Left-hand side sum_{e in E(W)} c_e x_e.
double blossom_load(const StochasticGraph& g, std::span<const double> x, const OddSet& set,
                    BlossomCoefficient coef);

void add_blossom_row(LinearProgram& lp, const StochasticGraph& g, const OddSet& set,
                     BlossomCoefficient coef);

inline constexpr std::size_t kDefaultMaxSetSize = 7;

/// Most violated blossom inequality among all odd sets of size at most
/// max_set_size, plus odd cycles and odd components of the support graph of
/// any size. Returns nullopt when nothing is violated by more than 1e-9.
std::optional<OddSet> separate_blossom(const StochasticGraph& g, std::span<const double> x,
                                       std::size_t max_set_size = kDefaultMaxSetSize,
                                       BlossomCoefficient coef = BlossomCoefficient::probability);

struct CuttingPlaneOptions {
  std::size_t max_set_size = kDefaultMaxSetSize;
  std::size_t max_iterations = 500;
};

struct CuttingPlaneResult {
  LpSolution solution;
  std::vector<OddSet> cuts;
  /// Objective after each solve; first entry has no blossom rows.
  std::vector<double> objective_history;
  bool converged = false;
};

/// LP-GEN by lazy blossom separation. A result with converged == false
/// carries the last solution when the iteration cap was hit.
CuttingPlaneResult solve_lp_gen(const StochasticGraph& g, const CuttingPlaneOptions& opt = {});

/// Runs the same loop on an arbitrary base LP whose variable i is edge i.
CuttingPlaneResult solve_with_blossoms(LinearProgram lp, const StochasticGraph& g,
                                       BlossomCoefficient coef, const CuttingPlaneOptions& opt);

struct MatchingResult {
  std::vector<std::size_t> edges;
  double weight = 0.0;  // sum of w_e p_e
  /// False when the LP optimum stayed fractional and brute force was used.
  bool from_lp = true;
};

inline constexpr std::size_t kMatchingBruteForceNodeCap = 20;

/// Maximum weight matching under weights w_e p_e via the matching LP with
/// blossom rows. Falls back to subset dynamic programming when the LP
/// optimum is not integral; throws Error(cap_exceeded) if that needs more
/// than kMatchingBruteForceNodeCap non-isolated nodes.
MatchingResult max_weight_matching(const StochasticGraph& g, const CuttingPlaneOptions& opt = {});

/// Exact maximum weight matching by dynamic programming over node subsets.
MatchingResult brute_force_matching(const StochasticGraph& g);

}  // namespace stochmatch
