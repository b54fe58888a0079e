// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stochmatch/stochmatch.h"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

struct Failure {
  int code;
};

void check(sm_status status) {
  if (status == SM_OK) return;
  std::cerr << "error: " << sm_last_error() << "\n";
  throw Failure{kExitError};
}

// Owns a string returned by the library.
class OwnedString {
 public:
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { sm_string_free(ptr_); }
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

class InstanceHandle {
 public:
  explicit InstanceHandle(const std::string& path) { check(sm_instance_load(path.c_str(), &ptr_)); }
  InstanceHandle(const InstanceHandle&) = delete;
  InstanceHandle& operator=(const InstanceHandle&) = delete;
  ~InstanceHandle() { sm_instance_free(ptr_); }
  const sm_instance* get() const { return ptr_; }

 private:
  sm_instance* ptr_ = nullptr;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    throw Failure{kExitError};
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{kExitError};
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

sm_lp_kind parse_which(const std::string& which, const std::string& kind) {
  if (which.empty()) {
    if (kind == "online") return SM_LP_ONL;
    return kind == "bipartite" ? SM_LP_BIP : SM_LP_GEN;
  }
  if (which == "bip") return SM_LP_BIP;
  if (which == "gen") return SM_LP_GEN;
  if (which == "match") return SM_LP_MATCH;
  if (which == "onl") return SM_LP_ONL;
  return SM_LP_DEG;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic matching with timeouts: LPs, rounding, policies and experiments"};
  app.set_version_flag("--version", std::string(sm_version()));
  app.require_subcommand(1);

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check an instance file against its invariants");
  validate->add_option("file", validate_path, "Instance JSON")->required();

  // gen
  sm_generator_spec spec;
  sm_generator_spec_default(&spec);
  std::string gen_kind = "bipartite", gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--kind", gen_kind, "bipartite, general or online")
      ->check(CLI::IsMember({"bipartite", "general", "online"}))
      ->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");
  gen->add_option("--left", spec.left, "Left side size, or number of items")->capture_default_str();
  gen->add_option("--right", spec.right, "Right side size, or number of buyer types")
      ->capture_default_str();
  gen->add_option("--nodes", spec.nodes, "Node count of a general graph")->capture_default_str();
  gen->add_option("--density", spec.density, "Fraction of admissible pairs")->capture_default_str();
  gen->add_option("--p-min", spec.p_min)->capture_default_str();
  gen->add_option("--p-max", spec.p_max)->capture_default_str();
  gen->add_option("--w-min", spec.w_min)->capture_default_str();
  gen->add_option("--w-max", spec.w_max)->capture_default_str();
  gen->add_option("--t-min", spec.t_min)->capture_default_str();
  gen->add_option("--t-max", spec.t_max)->capture_default_str();
  gen->add_option("--rounds", spec.rounds, "Online rounds, 0 for one per buyer type")
      ->capture_default_str();

  // solve-lp
  std::string lp_path, lp_which, lp_dump, lp_out;
  auto* solve = app.add_subcommand("solve-lp", "Solve one of the LP relaxations");
  solve->add_option("file", lp_path, "Instance JSON")->required();
  solve->add_option("--which", lp_which, "bip, gen, match, onl or deg (default by kind)")
      ->check(CLI::IsMember({"bip", "gen", "match", "onl", "deg"}));
  solve->add_option("--dump-lp", lp_dump, "Write the final LP as JSON");
  solve->add_option("--out", lp_out, "Solution path (stdout when omitted)");

  // round
  std::string round_path, round_x, round_report = "csv", round_out;
  std::uint64_t round_trials = 100000, round_seed = 1;
  auto* round = app.add_subcommand("round", "Empirical marginals of dependent rounding");
  round->add_option("file", round_path, "Instance JSON")->required();
  round->add_option("--x", round_x, "Solution JSON (solves the LP when omitted)");
  round->add_option("--trials", round_trials)->capture_default_str();
  round->add_option("--seed", round_seed)->capture_default_str();
  round->add_option("--report", round_report)->check(CLI::IsMember({"csv"}))->capture_default_str();
  round->add_option("--output", round_out, "Report path (stdout when omitted)");

  // simulate-offline
  std::string off_path, off_out = "csv", off_summary;
  sm_offline_options off;
  sm_offline_options_default(&off);
  std::string off_policy = off.policy;
  auto* sim_off = app.add_subcommand("simulate-offline", "Run an offline policy repeatedly");
  sim_off->add_option("file", off_path, "Instance JSON")->required();
  sim_off->add_option("--policy", off_policy)
      ->check(CLI::IsMember({"alg1", "greedy", "patched"}))
      ->capture_default_str();
  sim_off->add_option("--trials", off.trials)->capture_default_str();
  sim_off->add_option("--seed", off.seed)->capture_default_str();
  sim_off->add_option("--delta", off.delta, "Large/small threshold (default: optimized)");
  sim_off->add_option("--out", off_out)->check(CLI::IsMember({"csv"}))->capture_default_str();
  sim_off->add_option("--summary", off_summary, "Write a JSON summary ('-' for stderr)");

  // oracle
  std::string oracle_path, oracle_out = "json";
  auto* oracle = app.add_subcommand("oracle", "Exact optimal adaptive policy value");
  oracle->add_option("file", oracle_path, "Instance JSON")->required();
  oracle->add_option("--out", oracle_out)->check(CLI::IsMember({"json"}))->capture_default_str();

  // simulate-online
  std::string on_path, on_out = "csv", on_summary;
  sm_online_options on;
  sm_online_options_default(&on);
  std::string on_policy = on.policy;
  bool on_exact = false;
  auto* sim_on = app.add_subcommand("simulate-online", "Run an online policy repeatedly");
  sim_on->add_option("file", on_path, "Online instance JSON")->required();
  sim_on->add_option("--policy", on_policy)
      ->check(CLI::IsMember({"basic", "greedy", "patched"}))
      ->capture_default_str();
  sim_on->add_option("--trials", on.trials)->capture_default_str();
  sim_on->add_option("--seed", on.seed)->capture_default_str();
  sim_on->add_option("--epsilon", on.epsilon)->capture_default_str();
  sim_on->add_option("--beta-samples", on.beta_samples, "0 uses the sample formula, capped")
      ->capture_default_str();
  sim_on->add_option("--delta", on.delta, "Large/small threshold (default: optimized)");
  sim_on->add_flag("--exact-beta", on_exact, "Compute beta exactly instead of sampling");
  sim_on->add_option("--out", on_out)->check(CLI::IsMember({"csv"}))->capture_default_str();
  sim_on->add_option("--summary", on_summary, "Write a JSON summary ('-' for stderr)");

  // experiment
  std::string exp_path, exp_output;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment config");
  experiment->add_option("config", exp_path, "Experiment config JSON")->required();
  experiment->add_option("--output", exp_output, "Report path (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      InstanceHandle inst(validate_path);
      int ok = 0;
      OwnedString report;
      check(sm_instance_validate(inst.get(), &ok, report.out()));
      write_output(report.str(), "");
      return ok ? 0 : kExitCheckFailed;
    }
    if (*gen) {
      spec.kind = gen_kind.c_str();
      sm_instance* raw = nullptr;
      check(sm_generate(&spec, gen_seed, &raw));
      OwnedString text;
      const sm_status status = sm_instance_to_json(raw, text.out());
      sm_instance_free(raw);
      check(status);
      write_output(text.str(), gen_out);
      return 0;
    }
    if (*solve) {
      InstanceHandle inst(lp_path);
      OwnedString solution, dump;
      const auto which = parse_which(lp_which, sm_instance_kind(inst.get()));
      check(sm_solve_lp(inst.get(), which, solution.out(), lp_dump.empty() ? nullptr : dump.out()));
      if (!lp_dump.empty()) write_output(dump.str(), lp_dump);
      write_output(solution.str(), lp_out);
      return 0;
    }
    if (*round) {
      InstanceHandle inst(round_path);
      const std::string x = round_x.empty() ? std::string() : read_file(round_x);
      OwnedString csv;
      check(sm_round_report(inst.get(), round_x.empty() ? nullptr : x.c_str(), round_trials,
                            round_seed, csv.out()));
      write_output(csv.str(), round_out);
      return 0;
    }
    if (*sim_off) {
      InstanceHandle inst(off_path);
      off.policy = off_policy.c_str();
      OwnedString csv, summary;
      check(sm_simulate_offline(inst.get(), &off, csv.out(),
                                off_summary.empty() ? nullptr : summary.out()));
      write_output(csv.str(), "");
      if (off_summary == "-") std::cerr << summary.str() << "\n";
      else if (!off_summary.empty()) write_output(summary.str(), off_summary);
      return 0;
    }
    if (*oracle) {
      InstanceHandle inst(oracle_path);
      OwnedString json;
      check(sm_oracle(inst.get(), json.out()));
      write_output(json.str(), "");
      return 0;
    }
    if (*sim_on) {
      InstanceHandle inst(on_path);
      on.policy = on_policy.c_str();
      on.exact_beta = on_exact ? 1 : 0;
      OwnedString csv, summary;
      check(sm_simulate_online(inst.get(), &on, csv.out(),
                               on_summary.empty() ? nullptr : summary.out()));
      write_output(csv.str(), "");
      if (on_summary == "-") std::cerr << summary.str() << "\n";
      else if (!on_summary.empty()) write_output(summary.str(), on_summary);
      return 0;
    }
    if (*experiment) {
      OwnedString report;
      int ok = 0;
      check(sm_run_experiment(exp_path.c_str(), exp_output.empty() ? nullptr : exp_output.c_str(),
                              report.out(), &ok));
      if (exp_output.empty()) std::cout << report.str();
      if (!ok) std::cerr << "some experiment checks failed\n";
      return ok ? 0 : kExitCheckFailed;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
