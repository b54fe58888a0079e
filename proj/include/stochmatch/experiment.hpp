#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochmatch/instance.hpp"
#include "stochmatch/online.hpp"

namespace stochmatch {

/// Policies: alg1, greedy and patched. On a general graph alg1 is the
/// bipartition reduction; on an online instance it is the basic dumped
/// algorithm, also accepted under the name basic.
struct ExperimentConfig {
  /// Instance files. Relative paths are resolved by the caller.
  std::vector<std::string> instance_files;
  std::optional<GeneratorSpec> generator;
  std::size_t generated_count = 0;
  std::uint64_t generator_seed = 1;

  std::vector<std::string> policies;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  /// Negative selects the optimized delta of the instance's mode.
  double delta = -1.0;
  BetaSource beta_source = BetaSource::estimated;
  BetaOptions beta;
  /// Adds E[OPT] for offline instances within the oracle cap.
  bool oracle = false;
  std::size_t threads = 1;

  std::string output;
  std::string format = "csv";
};

/// Parses the JSON config. Relative instance paths are resolved against
/// `base_dir` when it is non-empty. Throws Error(parse_error) or
/// Error(invalid_argument).
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::string& base_dir = {});
ExperimentConfig load_experiment_config(const std::string& path);

struct ReportRow {
  std::string instance;
  std::string kind;
  std::string policy;
  double lp_value = 0.0;
  double mean_profit = 0.0;
  double half_width = 0.0;
  /// mean_profit / lp_value, 0 when the LP value is 0.
  double ratio = 0.0;
  /// NaN when not computed.
  double oracle_value = 0.0;
  std::size_t trials = 0;
  /// Per-run invariants held, mean <= LP + half width and, with the oracle,
  /// E[OPT] <= LP + 1e-9.
  bool checks_ok = false;
  /// Non-empty when the row could not be computed.
  std::string error;
};

struct RatioReport {
  std::vector<ReportRow> rows;
  bool all_checks_ok() const;
};

/// One row per (instance, policy), instances in config order. Trial t of
/// instance i under policy k is seeded with derive_seed(seed, {i, k, t}).
/// Throws Error(invalid_argument) on an invalid config; instance failures
/// land in the row's error field.
RatioReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view text);

/// Stable column order, numbers printed with 9 significant digits.
std::string emit_report(const RatioReport& report, ReportFormat format);

}  // namespace stochmatch
