#include "stochmatch/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/offline.hpp"
#include "stochmatch/oracle.hpp"

namespace stochmatch {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
T field(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::parse_error, std::string("config field '") + key + "' has the wrong type");
  }
}

GeneratorSpec parse_generator(const json& j) {
  GeneratorSpec spec;
  spec.kind = parse_instance_kind(field<std::string>(j, "kind", "bipartite"));
  spec.left = field<std::size_t>(j, "left", spec.left);
  spec.right = field<std::size_t>(j, "right", spec.right);
  spec.nodes = field<std::size_t>(j, "nodes", spec.nodes);
  spec.density = field<double>(j, "density", spec.density);
  spec.p_min = field<double>(j, "p_min", spec.p_min);
  spec.p_max = field<double>(j, "p_max", spec.p_max);
  spec.w_min = field<double>(j, "w_min", spec.w_min);
  spec.w_max = field<double>(j, "w_max", spec.w_max);
  spec.t_min = field<int>(j, "t_min", spec.t_min);
  spec.t_max = field<int>(j, "t_max", spec.t_max);
  spec.rounds = field<int>(j, "rounds", spec.rounds);
  return spec;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct LoadedInstance {
  std::string name;
  std::optional<Instance> instance;
  std::string error;
};

std::vector<LoadedInstance> load_instances(const ExperimentConfig& cfg) {
  std::vector<LoadedInstance> out;
  for (const auto& path : cfg.instance_files) {
    LoadedInstance li;
    li.name = std::filesystem::path(path).stem().string();
    try {
      li.instance = load_instance(path);
      const auto report = validate_instance(*li.instance);
      if (!report.ok()) {
        li.error = "invalid instance: " + report.violations.front();
        li.instance.reset();
      }
    } catch (const std::exception& e) {
      li.error = e.what();
    }
    out.push_back(std::move(li));
  }
  if (cfg.generator) {
    for (std::size_t k = 0; k < cfg.generated_count; ++k) {
      LoadedInstance li;
      li.name = "gen-" + std::to_string(k);
      try {
        li.instance = generate_random_instance(*cfg.generator, derive_seed(cfg.generator_seed, {k}));
      } catch (const std::exception& e) {
        li.error = e.what();
      }
      out.push_back(std::move(li));
    }
  }
  return out;
}

const char* kind_name(const Instance& inst) {
  if (const auto* g = std::get_if<StochasticGraph>(&inst))
    return g->kind == GraphKind::bipartite ? "bipartite" : "general";
  return "online";
}

double lp_value(const Instance& inst) {
  if (const auto* g = std::get_if<StochasticGraph>(&inst)) {
    if (g->kind == GraphKind::bipartite) return solve_lp(build_lp_bip(*g)).objective_value;
    return solve_lp_gen(*g).solution.objective_value;
  }
  return solve_lp(build_lp_onl(std::get<OnlineInstance>(inst))).objective_value;
}

Policy offline_policy(const StochasticGraph& g, const std::string& name, double delta) {
  auto reality = bernoulli_reality(g);
  if (name == "greedy") {
    auto matching = max_weight_matching(g).edges;
    return [&g, matching, reality](Rng& rng) {
      const auto run = probe_matching(g, matching, rng, reality);
      check_probe_run(g, run);
      return run.profit;
    };
  }
  if (name == "alg1" || name == "basic" || name == "patched") {
    auto plan = plan_patched_offline(g, delta);
    if (name != "patched") plan.decision.chosen = PatchChoice::algorithm1;
    return [&g, plan = std::move(plan), reality](Rng& rng) {
      const auto run = execute_plan(g, plan, rng, reality);
      check_probe_run(g, run);
      return run.profit;
    };
  }
  throw Error(ErrorCode::invalid_argument, "unknown offline policy '" + name + "'");
}

Policy online_policy(const OnlineInstance& inst, const std::string& name,
                     const ExperimentConfig& cfg, std::uint64_t plan_seed) {
  auto reality = online_bernoulli_reality(inst);
  if (name == "greedy") {
    auto matching = online_greedy_matching(inst);
    return [&inst, matching, reality](Rng& rng) {
      const auto run = online_greedy(inst, matching, rng, reality);
      check_online_run(inst, run);
      return run.profit;
    };
  }
  if (name == "basic" || name == "alg1" || name == "patched") {
    OnlinePlanOptions options;
    options.delta = cfg.delta;
    options.beta_source = cfg.beta_source;
    options.beta = cfg.beta;
    options.patched = name == "patched";
    Rng rng(plan_seed);
    auto plan = plan_online(inst, options, rng);
    return [&inst, plan = std::move(plan), reality](Rng& rng) {
      const auto run = execute_online_plan(inst, plan, rng, reality);
      check_online_run(inst, run);
      return run.profit;
    };
  }
  throw Error(ErrorCode::invalid_argument, "unknown online policy '" + name + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::parse_error, "config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& p : field<std::vector<std::string>>(doc, "instances", {})) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    cfg.instance_files.push_back(path.string());
  }
  if (doc.contains("generator")) {
    const auto& gen = doc.at("generator");
    cfg.generator = parse_generator(gen);
    cfg.generated_count = field<std::size_t>(gen, "count", 1);
    cfg.generator_seed = field<std::uint64_t>(gen, "seed", 1);
  }
  cfg.policies = field<std::vector<std::string>>(doc, "policies", {});
  cfg.trials = field<std::size_t>(doc, "trials", cfg.trials);
  cfg.seed = field<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.delta = field<double>(doc, "delta", cfg.delta);
  cfg.beta.epsilon = field<double>(doc, "epsilon", cfg.beta.epsilon);
  cfg.beta.samples = field<std::uint64_t>(doc, "beta_samples", cfg.beta.samples);
  const auto beta = field<std::string>(doc, "beta", "estimated");
  if (beta == "exact") {
    cfg.beta_source = BetaSource::exact;
  } else if (beta != "estimated") {
    throw Error(ErrorCode::parse_error, "config field 'beta' must be exact or estimated");
  }
  cfg.oracle = field<bool>(doc, "oracle", cfg.oracle);
  cfg.threads = field<std::size_t>(doc, "threads", cfg.threads);
  cfg.output = field<std::string>(doc, "output", "");
  cfg.format = field<std::string>(doc, "format", cfg.format);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_experiment_config(ss.str(), dir);
}

bool RatioReport::all_checks_ok() const {
  for (const auto& r : rows)
    if (!r.checks_ok) return false;
  return true;
}

RatioReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.policies.empty()) throw Error(ErrorCode::invalid_argument, "config lists no policies");
  if (cfg.trials < 2) throw Error(ErrorCode::invalid_argument, "config needs at least two trials");
  if (cfg.instance_files.empty() && !cfg.generator)
    throw Error(ErrorCode::invalid_argument, "config lists no instances");
  parse_report_format(cfg.format);

  const auto instances = load_instances(cfg);
  const std::size_t n_policies = cfg.policies.size();
  RatioReport report;
  report.rows.resize(instances.size() * n_policies);

  // Per-instance values shared by the instance's rows.
  std::vector<double> lp(instances.size(), kNaN), oracle(instances.size(), kNaN);
  std::vector<std::string> errors(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    errors[i] = instances[i].error;
    if (!instances[i].instance) continue;
    try {
      lp[i] = lp_value(*instances[i].instance);
      const auto* g = std::get_if<StochasticGraph>(&*instances[i].instance);
      if (cfg.oracle && g && g->edges.size() <= kOracleEdgeCap)
        oracle[i] = optimal_adaptive_value(*g);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  auto compute_row = [&](std::size_t index) {
    const std::size_t i = index / n_policies, k = index % n_policies;
    ReportRow& row = report.rows[index];
    row.instance = instances[i].name;
    row.policy = cfg.policies[k];
    row.oracle_value = oracle[i];
    row.lp_value = lp[i];
    row.mean_profit = row.half_width = row.ratio = kNaN;
    if (!instances[i].instance || !errors[i].empty()) {
      row.kind = instances[i].instance ? kind_name(*instances[i].instance) : "";
      row.error = errors[i];
      return;
    }
    const Instance& inst = *instances[i].instance;
    row.kind = kind_name(inst);
    try {
      Policy policy;
      if (const auto* g = std::get_if<StochasticGraph>(&inst)) {
        policy = offline_policy(*g, row.policy, cfg.delta);
      } else {
        policy = online_policy(std::get<OnlineInstance>(inst), row.policy, cfg,
                               derive_seed(cfg.seed, {i, k, ~std::uint64_t{0}}));
      }
      const auto est = estimate_policy_value(policy, cfg.trials, derive_seed(cfg.seed, {i, k}));
      row.mean_profit = est.mean;
      row.half_width = est.half_width;
      row.trials = est.trials;
      row.ratio = row.lp_value > 0.0 ? est.mean / row.lp_value : 0.0;
      row.checks_ok = est.mean <= row.lp_value + est.half_width + 1e-9;
      if (!std::isnan(row.oracle_value))
        row.checks_ok = row.checks_ok && row.oracle_value <= row.lp_value + 1e-9 &&
                        est.mean <= row.oracle_value + est.half_width + 1e-9;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.checks_ok = false;
    }
  };

  const std::size_t total = report.rows.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, total));
  if (workers == 1) {
    for (std::size_t r = 0; r < total; ++r) compute_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t r; (r = next.fetch_add(1)) < total;) compute_row(r);
      });
    for (auto& t : pool) t.join();
  }
  return report;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw Error(ErrorCode::invalid_argument, "report format must be csv or json");
}

std::string emit_report(const RatioReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out =
        "instance,kind,policy,lp_value,mean_profit,half_width,ratio,oracle_value,trials,checks_ok,"
        "error\n";
    for (const auto& r : report.rows) {
      out += csv_field(r.instance) + ',' + r.kind + ',' + csv_field(r.policy) + ',' +
             format_number(r.lp_value) + ',' + format_number(r.mean_profit) + ',' +
             format_number(r.half_width) + ',' + format_number(r.ratio) + ',' +
             format_number(r.oracle_value) + ',' + std::to_string(r.trials) + ',' +
             (r.checks_ok ? "1" : "0") + ',' + csv_field(r.error) + '\n';
    }
    return out;
  }
  // Numbers go through the same 9-digit text as the CSV.
  auto number = [](double v) -> json {
    if (std::isnan(v)) return nullptr;
    return std::strtod(format_number(v).c_str(), nullptr);
  };
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = json::object();
    row["instance"] = r.instance;
    row["kind"] = r.kind;
    row["policy"] = r.policy;
    row["lp_value"] = number(r.lp_value);
    row["mean_profit"] = number(r.mean_profit);
    row["half_width"] = number(r.half_width);
    row["ratio"] = number(r.ratio);
    row["oracle_value"] = number(r.oracle_value);
    row["trials"] = r.trials;
    row["checks_ok"] = r.checks_ok;
    row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

}  // namespace stochmatch
