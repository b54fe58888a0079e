/* C interface of the stochmatch library. */
#ifndef STOCHMATCH_H
#define STOCHMATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(STOCHMATCH_BUILDING_LIBRARY)
#define SM_API __attribute__((visibility("default")))
#else
#define SM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
  SM_OK = 0,
  SM_INVALID_ARGUMENT = 1,
  SM_PARSE_ERROR = 2,
  SM_IO_ERROR = 3,
  SM_VALIDATION_FAILED = 4,
  SM_INFEASIBLE = 5,
  SM_UNBOUNDED = 6,
  SM_CAP_EXCEEDED = 7,
  SM_NOT_BIPARTITE = 8,
  SM_INTERNAL = 9
} sm_status;

/* Offline graph or online instance. */
typedef struct sm_instance sm_instance;

SM_API const char* sm_version(void);

/* Message of the last failed call on this thread; "" after a success. */
SM_API const char* sm_last_error(void);

/* Frees strings returned through char** out-parameters. */
SM_API void sm_string_free(char* s);

SM_API sm_status sm_instance_load(const char* path, sm_instance** out);
SM_API sm_status sm_instance_parse(const char* json, sm_instance** out);
SM_API void sm_instance_free(sm_instance* inst);
SM_API sm_status sm_instance_to_json(const sm_instance* inst, char** out);
SM_API sm_status sm_instance_save(const sm_instance* inst, const char* path);
/* "bipartite", "general" or "online". */
SM_API const char* sm_instance_kind(const sm_instance* inst);
SM_API size_t sm_instance_edge_count(const sm_instance* inst);

/* *ok is 1 when every invariant holds. *report receives
   {"ok": bool, "violations": [...]}. */
SM_API sm_status sm_instance_validate(const sm_instance* inst, int* ok, char** report);

typedef struct sm_generator_spec {
  const char* kind; /* "bipartite", "general" or "online" */
  size_t left;      /* bipartite left side, online items */
  size_t right;     /* bipartite right side, online buyer types */
  size_t nodes;     /* general graphs */
  double density;
  double p_min, p_max;
  double w_min, w_max;
  int t_min, t_max;
  int rounds; /* online; 0 selects one round per buyer type */
} sm_generator_spec;

SM_API void sm_generator_spec_default(sm_generator_spec* spec);
SM_API sm_status sm_generate(const sm_generator_spec* spec, uint64_t seed, sm_instance** out);

typedef enum sm_lp_kind {
  SM_LP_BIP = 0,   /* probability and timeout rows, bipartite only */
  SM_LP_GEN = 1,   /* with blossom rows, cutting planes */
  SM_LP_MATCH = 2, /* matching LP under w p, blossoms on general graphs */
  SM_LP_ONL = 3,   /* online instances */
  SM_LP_DEG = 4    /* probability and timeout rows on any graph */
} sm_lp_kind;

/* *solution receives {"which", "objective", "converged", "cuts", "values":
   [{"edge","u","v","x"}], "matching"?}. When lp_dump is non-null it receives
   the final LP (variables and constraints) as JSON. */
SM_API sm_status sm_solve_lp(const sm_instance* inst, sm_lp_kind which, char** solution,
                             char** lp_dump);

/* Rounds x `trials` times and reports per-edge empirical marginals as CSV
   (edge,u,v,x,marginal,half_width,degree_ok). x_json is either a solve output
   or a plain array; NULL solves the instance's LP. Online instances are
   rounded on their type graph. */
SM_API sm_status sm_round_report(const sm_instance* inst, const char* x_json, uint64_t trials,
                                 uint64_t seed, char** csv);

typedef struct sm_offline_options {
  const char* policy; /* "alg1", "greedy" or "patched" */
  uint64_t trials;
  uint64_t seed;
  double delta; /* negative selects the optimized value */
} sm_offline_options;

typedef struct sm_online_options {
  const char* policy; /* "basic", "greedy" or "patched" */
  uint64_t trials;
  uint64_t seed;
  double delta;
  double epsilon;
  uint64_t beta_samples; /* 0 selects the formula value, capped */
  int exact_beta;
} sm_online_options;

SM_API void sm_offline_options_default(sm_offline_options* opt);
SM_API void sm_online_options_default(sm_online_options* opt);

/* Per-trial CSV: trial,profit,probes,decision. *summary (nullable) receives
   {"policy","lp_value","mean","half_width","ratio","decision",...}. */
SM_API sm_status sm_simulate_offline(const sm_instance* inst, const sm_offline_options* opt,
                                     char** csv, char** summary);
SM_API sm_status sm_simulate_online(const sm_instance* inst, const sm_online_options* opt,
                                    char** csv, char** summary);

/* {"expected_opt","lp","lp_value","gap"} for offline instances within the
   oracle edge cap. */
SM_API sm_status sm_oracle(const sm_instance* inst, char** json);

/* Runs the experiment config. The report is written to output_path, or to
   the config's output when output_path is NULL, and returned in *report.
   *checks_ok is 1 when every row passed its checks. */
SM_API sm_status sm_run_experiment(const char* config_path, const char* output_path,
                                   char** report, int* checks_ok);

typedef enum sm_ratio_mode { SM_MODE_BIPARTITE = 0, SM_MODE_GENERAL = 1, SM_MODE_ONLINE = 2 } sm_ratio_mode;

SM_API sm_status sm_optimize_delta(sm_ratio_mode mode, double* delta, double* ratio);
SM_API sm_status sm_attenuation_g(double p, double* out);
SM_API sm_status sm_attenuation_h(double p, double* out);

#ifdef __cplusplus
}
#endif

#endif
