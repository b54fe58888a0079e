#include "stochmatch/stochmatch.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"
#include "stochmatch/error.hpp"
#include "stochmatch/experiment.hpp"
#include "stochmatch/instance.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/offline.hpp"
#include "stochmatch/online.hpp"
#include "stochmatch/oracle.hpp"
#include "stochmatch/rounding.hpp"

struct sm_instance {
  stochmatch::Instance value;
};

namespace {

using nlohmann::json;
using namespace stochmatch;

thread_local std::string last_error;

sm_status to_status(ErrorCode code) { return static_cast<sm_status>(code); }

template <typename F>
sm_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return SM_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SM_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SM_INTERNAL;
  }
}

void require(bool cond, const char* message) {
  if (!cond) throw Error(ErrorCode::invalid_argument, message);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

const StochasticGraph& offline_graph(const sm_instance* inst) {
  const auto* g = std::get_if<StochasticGraph>(&inst->value);
  require(g != nullptr, "operation needs an offline instance");
  return *g;
}

const OnlineInstance& online_instance(const sm_instance* inst) {
  const auto* o = std::get_if<OnlineInstance>(&inst->value);
  require(o != nullptr, "operation needs an online instance");
  return *o;
}

// Graph whose edges index the variables: the type graph for online input.
StochasticGraph as_graph(const sm_instance* inst) {
  if (const auto* g = std::get_if<StochasticGraph>(&inst->value)) return *g;
  return std::get<OnlineInstance>(inst->value).type_graph();
}

json lp_to_json(const LinearProgram& lp) {
  json vars = json::array();
  for (const auto& v : lp.variables)
    vars.push_back({{"name", v.name}, {"lower", number(v.lower)}, {"upper", number(v.upper)},
                    {"objective", v.objective}});
  json rows = json::array();
  for (const auto& c : lp.constraints) {
    json terms = json::array();
    for (const auto& [var, coef] : c.terms) terms.push_back({{"var", var}, {"coef", coef}});
    rows.push_back({{"name", c.name}, {"sense", "<="}, {"rhs", c.rhs}, {"terms", terms}});
  }
  return {{"sense", "maximize"}, {"variables", vars}, {"constraints", rows}};
}

void add_blossoms(LinearProgram& lp, const StochasticGraph& g, const std::vector<OddSet>& cuts,
                  BlossomCoefficient coef) {
  for (const auto& set : cuts) add_blossom_row(lp, g, set, coef);
}

std::vector<double> parse_x(const std::string& text, std::size_t edges) {
  const json doc = json::parse(text);
  std::vector<double> x;
  if (doc.is_array()) {
    x = doc.get<std::vector<double>>();
  } else {
    require(doc.is_object() && doc.contains("values"), "x file needs a values array");
    for (const auto& v : doc.at("values")) x.push_back(v.is_object() ? v.at("x").get<double>()
                                                                      : v.get<double>());
  }
  require(x.size() == edges, "x must have one value per edge");
  return x;
}

double summary_stats(const std::vector<double>& profits, double& half_width) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < profits.size(); ++t) {
    const double d = profits[t] - mean;
    mean += d / static_cast<double>(t + 1);
    m2 += d * (profits[t] - mean);
  }
  const double n = static_cast<double>(profits.size());
  half_width = profits.size() > 1 ? 3.0 * std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return mean;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json decision_json(const PatchDecision& d) {
  return {{"gamma", d.gamma},
          {"delta", d.delta},
          {"chosen", to_string(d.chosen)},
          {"greedy_branch", d.greedy_branch},
          {"rounding_branch", d.rounding_branch},
          {"predicted_ratio", d.predicted_ratio}};
}

}  // namespace

extern "C" {

const char* sm_version(void) { return "0.1.0"; }

const char* sm_last_error(void) { return last_error.c_str(); }

void sm_string_free(char* s) { std::free(s); }

sm_status sm_instance_load(const char* path, sm_instance** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new sm_instance{load_instance(path)};
  });
}

sm_status sm_instance_parse(const char* text, sm_instance** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new sm_instance{parse_instance(text)};
  });
}

void sm_instance_free(sm_instance* inst) { delete inst; }

sm_status sm_instance_to_json(const sm_instance* inst, char** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = dup_string(serialize_instance(inst->value));
  });
}

sm_status sm_instance_save(const sm_instance* inst, const char* path) {
  return guarded([&] {
    require(inst && path, "null argument");
    save_instance(inst->value, path);
  });
}

const char* sm_instance_kind(const sm_instance* inst) {
  if (!inst) return "";
  if (const auto* g = std::get_if<StochasticGraph>(&inst->value))
    return g->kind == GraphKind::bipartite ? "bipartite" : "general";
  return "online";
}

size_t sm_instance_edge_count(const sm_instance* inst) {
  if (!inst) return 0;
  return std::visit([](const auto& v) { return v.edges.size(); }, inst->value);
}

sm_status sm_instance_validate(const sm_instance* inst, int* ok, char** report) {
  return guarded([&] {
    require(inst && ok, "null argument");
    const auto r = validate_instance(inst->value);
    *ok = r.ok() ? 1 : 0;
    if (report) *report = dup_string(json{{"ok", r.ok()}, {"violations", r.violations}}.dump(2));
  });
}

void sm_generator_spec_default(sm_generator_spec* spec) {
  if (!spec) return;
  const GeneratorSpec d;
  spec->kind = "bipartite";
  spec->left = d.left;
  spec->right = d.right;
  spec->nodes = d.nodes;
  spec->density = d.density;
  spec->p_min = d.p_min;
  spec->p_max = d.p_max;
  spec->w_min = d.w_min;
  spec->w_max = d.w_max;
  spec->t_min = d.t_min;
  spec->t_max = d.t_max;
  spec->rounds = d.rounds;
}

sm_status sm_generate(const sm_generator_spec* spec, uint64_t seed, sm_instance** out) {
  return guarded([&] {
    require(spec && spec->kind && out, "null argument");
    GeneratorSpec s;
    s.kind = parse_instance_kind(spec->kind);
    s.left = spec->left;
    s.right = spec->right;
    s.nodes = spec->nodes;
    s.density = spec->density;
    s.p_min = spec->p_min;
    s.p_max = spec->p_max;
    s.w_min = spec->w_min;
    s.w_max = spec->w_max;
    s.t_min = spec->t_min;
    s.t_max = spec->t_max;
    s.rounds = spec->rounds;
    *out = new sm_instance{generate_random_instance(s, seed)};
  });
}

sm_status sm_solve_lp(const sm_instance* inst, sm_lp_kind which, char** solution, char** lp_dump) {
  return guarded([&] {
    require(inst && solution, "null argument");
    json doc;
    LinearProgram lp;
    LpSolution sol;
    bool converged = true;
    std::size_t cuts = 0;
    std::vector<std::string> u_names, v_names;
    switch (which) {
      case SM_LP_BIP:
      case SM_LP_DEG: {
        const auto& g = offline_graph(inst);
        doc["which"] = which == SM_LP_BIP ? "bip" : "deg";
        lp = which == SM_LP_BIP ? build_lp_bip(g) : build_degree_lp(g);
        sol = solve_lp(lp);
        break;
      }
      case SM_LP_GEN: {
        const auto& g = offline_graph(inst);
        doc["which"] = "gen";
        const auto r = solve_lp_gen(g);
        lp = build_degree_lp(g);
        add_blossoms(lp, g, r.cuts, BlossomCoefficient::probability);
        sol = r.solution;
        converged = r.converged;
        cuts = r.cuts.size();
        break;
      }
      case SM_LP_MATCH: {
        const auto g = as_graph(inst);
        doc["which"] = "match";
        const auto r = solve_with_blossoms(build_lp_match(g), g, BlossomCoefficient::unit, {});
        lp = build_lp_match(g);
        add_blossoms(lp, g, r.cuts, BlossomCoefficient::unit);
        sol = r.solution;
        converged = r.converged;
        cuts = r.cuts.size();
        const auto m = max_weight_matching(g);
        doc["matching"] = m.edges;
        doc["matching_weight"] = m.weight;
        break;
      }
      case SM_LP_ONL: {
        doc["which"] = "onl";
        lp = build_lp_onl(online_instance(inst));
        sol = solve_lp(lp);
        break;
      }
      default:
        throw Error(ErrorCode::invalid_argument, "unknown LP kind");
    }
    const auto g = as_graph(inst);
    json values = json::array();
    for (std::size_t e = 0; e < sol.values.size(); ++e)
      values.push_back({{"edge", e},
                        {"u", g.nodes[g.edges[e].u]},
                        {"v", g.nodes[g.edges[e].v]},
                        {"x", sol.values[e]}});
    doc["objective"] = sol.objective_value;
    doc["converged"] = converged;
    doc["cuts"] = cuts;
    doc["values"] = values;
    *solution = dup_string(doc.dump(2));
    if (lp_dump) *lp_dump = dup_string(lp_to_json(lp).dump(2));
  });
}

sm_status sm_round_report(const sm_instance* inst, const char* x_json, uint64_t trials,
                          uint64_t seed, char** csv) {
  return guarded([&] {
    require(inst && csv, "null argument");
    require(trials >= 1, "trials must be positive");
    const auto g = as_graph(inst);
    if (g.kind != GraphKind::bipartite)
      throw Error(ErrorCode::not_bipartite, "rounding needs a bipartite instance");
    std::vector<double> x;
    if (x_json) {
      x = parse_x(x_json, g.edges.size());
    } else if (const auto* o = std::get_if<OnlineInstance>(&inst->value)) {
      x = solve_lp(build_lp_onl(*o)).values;
    } else {
      x = solve_lp(build_lp_bip(g)).values;
    }
    const auto ends = edge_ends(g);
    std::vector<std::uint64_t> hits(g.edges.size(), 0);
    bool degree_ok = true;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, {t}));
      const auto r = gkps_round(g.node_count(), ends, x, rng);
      degree_ok = degree_ok && degree_preserved(g.node_count(), ends, x, r);
      for (auto e : r.selected) ++hits[e];
    }
    std::string out = "edge,u,v,x,marginal,half_width,degree_ok\n";
    const double n = static_cast<double>(trials);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const double f = static_cast<double>(hits[e]) / n;
      const double hw = 3.0 * std::sqrt(x[e] * (1.0 - x[e]) / n);
      out += std::to_string(e) + ',' + g.nodes[g.edges[e].u] + ',' + g.nodes[g.edges[e].v] + ',' +
             fmt(x[e]) + ',' + fmt(f) + ',' + fmt(hw) + ',' + (degree_ok ? "1" : "0") + '\n';
    }
    *csv = dup_string(out);
  });
}

void sm_offline_options_default(sm_offline_options* opt) {
  if (!opt) return;
  opt->policy = "patched";
  opt->trials = 1000;
  opt->seed = 1;
  opt->delta = -1.0;
}

void sm_online_options_default(sm_online_options* opt) {
  if (!opt) return;
  opt->policy = "patched";
  opt->trials = 1000;
  opt->seed = 1;
  opt->delta = -1.0;
  opt->epsilon = 0.1;
  opt->beta_samples = 0;
  opt->exact_beta = 0;
}

sm_status sm_simulate_offline(const sm_instance* inst, const sm_offline_options* opt, char** csv,
                              char** summary) {
  return guarded([&] {
    require(inst && opt && opt->policy && csv, "null argument");
    require(opt->trials >= 1, "trials must be positive");
    const auto& g = offline_graph(inst);
    require_valid(g);
    const std::string policy = opt->policy;
    require(policy == "alg1" || policy == "greedy" || policy == "patched",
            "offline policy must be alg1, greedy or patched");
    auto plan = plan_patched_offline(g, opt->delta);
    if (policy == "alg1") plan.decision.chosen = PatchChoice::algorithm1;
    if (policy == "greedy") plan.decision.chosen = PatchChoice::greedy;
    const auto reality = bernoulli_reality(g);
    std::string out = "trial,profit,probes,decision\n";
    std::vector<double> profits;
    for (std::uint64_t t = 0; t < opt->trials; ++t) {
      Rng rng(derive_seed(opt->seed, {t}));
      const auto run = execute_plan(g, plan, rng, reality);
      check_probe_run(g, run);
      profits.push_back(run.profit);
      out += std::to_string(t) + ',' + fmt(run.profit) + ',' + std::to_string(run.probe_count()) +
             ',' + to_string(plan.decision.chosen) + '\n';
    }
    *csv = dup_string(out);
    if (summary) {
      double hw = 0.0;
      const double mean = summary_stats(profits, hw);
      json doc = {{"policy", policy},      {"trials", opt->trials}, {"lp_value", plan.lp_value},
                  {"mean", mean},          {"half_width", hw},
                  {"ratio", plan.lp_value > 0 ? mean / plan.lp_value : 0.0},
                  {"decision", decision_json(plan.decision)}};
      *summary = dup_string(doc.dump(2));
    }
  });
}

sm_status sm_simulate_online(const sm_instance* inst, const sm_online_options* opt, char** csv,
                             char** summary) {
  return guarded([&] {
    require(inst && opt && opt->policy && csv, "null argument");
    require(opt->trials >= 1, "trials must be positive");
    const auto& o = online_instance(inst);
    require_valid(o);
    const std::string policy = opt->policy;
    require(policy == "basic" || policy == "greedy" || policy == "patched",
            "online policy must be basic, greedy or patched");
    OnlinePlanOptions options;
    options.delta = opt->delta;
    options.beta_source = opt->exact_beta ? BetaSource::exact : BetaSource::estimated;
    options.beta.epsilon = opt->epsilon;
    options.beta.samples = opt->beta_samples;
    options.patched = policy != "basic";
    Rng plan_rng(derive_seed(opt->seed, {~std::uint64_t{0}}));
    auto plan = plan_online(o, options, plan_rng);
    if (policy == "greedy") plan.decision.chosen = PatchChoice::greedy;
    const auto reality = online_bernoulli_reality(o);
    std::string out = "trial,profit,probes,decision\n";
    std::vector<double> profits;
    for (std::uint64_t t = 0; t < opt->trials; ++t) {
      Rng rng(derive_seed(opt->seed, {t}));
      const auto run = execute_online_plan(o, plan, rng, reality);
      check_online_run(o, run);
      profits.push_back(run.profit);
      out += std::to_string(t) + ',' + fmt(run.profit) + ',' +
             std::to_string(run.real_probes.size()) + ',' + to_string(plan.decision.chosen) + '\n';
    }
    *csv = dup_string(out);
    if (summary) {
      double hw = 0.0;
      const double mean = summary_stats(profits, hw);
      json doc = {{"policy", policy},
                  {"trials", opt->trials},
                  {"lp_value", plan.lp_value},
                  {"mean", mean},
                  {"half_width", hw},
                  {"ratio", plan.lp_value > 0 ? mean / plan.lp_value : 0.0},
                  {"decision", decision_json(plan.decision)},
                  {"beta_samples", plan.beta_table.samples},
                  {"beta_formula_samples", plan.beta_table.formula_samples},
                  {"beta_capped", plan.beta_table.capped},
                  {"alpha", plan.alpha}};
      *summary = dup_string(doc.dump(2));
    }
  });
}

sm_status sm_oracle(const sm_instance* inst, char** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    const auto& g = offline_graph(inst);
    const double opt = optimal_adaptive_value(g);
    const bool bip = g.kind == GraphKind::bipartite;
    const double lp = bip ? solve_lp(build_lp_bip(g)).objective_value
                          : solve_lp_gen(g).solution.objective_value;
    json doc = {{"expected_opt", opt},
                {"lp", bip ? "bip" : "gen"},
                {"lp_value", lp},
                {"gap", lp - opt},
                {"lp_bound_holds", opt <= lp + 1e-9}};
    *out = dup_string(doc.dump(2));
  });
}

sm_status sm_run_experiment(const char* config_path, const char* output_path, char** report,
                            int* checks_ok) {
  return guarded([&] {
    require(config_path, "null argument");
    const auto cfg = load_experiment_config(config_path);
    const auto result = run_experiment(cfg);
    const auto text = emit_report(result, parse_report_format(cfg.format));
    const std::string path = output_path ? output_path : cfg.output;
    if (!path.empty()) {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorCode::io_error, "cannot write " + path);
      f << text;
    }
    if (report) *report = dup_string(text);
    if (checks_ok) *checks_ok = result.all_checks_ok() ? 1 : 0;
  });
}

sm_status sm_optimize_delta(sm_ratio_mode mode, double* delta, double* ratio) {
  return guarded([&] {
    require(delta && ratio, "null argument");
    require(mode >= SM_MODE_BIPARTITE && mode <= SM_MODE_ONLINE, "unknown ratio mode");
    const auto r = optimize_delta(static_cast<RatioMode>(mode));
    *delta = r.delta;
    *ratio = r.ratio;
  });
}

sm_status sm_attenuation_g(double p, double* out) {
  return guarded([&] {
    require(out, "null argument");
    *out = attenuation_g(p);
  });
}

sm_status sm_attenuation_h(double p, double* out) {
  return guarded([&] {
    require(out, "null argument");
    *out = attenuation_h(p);
  });
}

}  // extern "C"
