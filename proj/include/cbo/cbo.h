/*
 * cbo: constrained Bayesian optimization with a hull-derived Lagrange
 * multiplier. C interface to the engine.
 *
 * Every function returning cbo_status leaves a thread-local message behind on
 * failure, readable with cbo_last_error(). Strings returned through char**
 * out-parameters are owned by the caller and released with cbo_string_free().
 */
#ifndef CBO_CBO_H_
#define CBO_CBO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CBO_BUILDING_LIBRARY)
#define CBO_API __attribute__((visibility("default")))
#else
#define CBO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as the CLI exit codes. */
typedef enum cbo_status {
  CBO_OK = 0,
  CBO_ERROR = 1,                /* internal failure */
  CBO_CONFIG_ERROR = 2,         /* unparseable or inconsistent configuration */
  CBO_EVALUATOR_ERROR = 3,      /* evaluator could not be started or kept failing */
  CBO_RUN_INPUT_ERROR = 4,      /* missing or corrupt run directory */
  CBO_INVALID_ARGUMENT = 5,     /* null handle, bad index, domain error */
} cbo_status;

typedef struct cbo_campaign cbo_campaign;

typedef enum cbo_phase { CBO_PHASE_INIT = 0, CBO_PHASE_BO = 1 } cbo_phase;

typedef struct cbo_record {
  size_t iteration;
  cbo_phase phase;
  int valid;
  double bv;       /* V; NaN when invalid */
  double rsp_on;   /* mOhm*mm^2 */
  double fom;      /* kW/mm^2 */
  double lambda_used;
  int has_target;
  double target_used;
  double objective_label;
} cbo_record;

typedef struct cbo_progress {
  size_t iteration;
  cbo_phase phase;
  int valid;
  size_t valid_records;
  double incumbent;
  double best_fom;
  double lambda;
  int has_target;
  double target;
  size_t n_training;
} cbo_progress;

typedef void (*cbo_progress_fn)(const cbo_progress* progress, void* user);

CBO_API const char* cbo_version(void);
CBO_API const char* cbo_last_error(void);
CBO_API void cbo_string_free(char* s);

/* Campaigns. Either JSON argument may be NULL; a NULL config means every
 * default. Top-level keys of `overrides_json` replace those of `config_json`. */
CBO_API cbo_status cbo_campaign_create(const char* config_json, const char* overrides_json, cbo_campaign** out);
CBO_API void cbo_campaign_destroy(cbo_campaign* campaign);
CBO_API cbo_status cbo_campaign_set_progress(cbo_campaign* campaign, cbo_progress_fn fn, void* user);
/* Runs to completion. When `write_run_dir` is nonzero the run directory named
 * by the config's "out" key is written, also after an abort. */
CBO_API cbo_status cbo_campaign_run(cbo_campaign* campaign, int write_run_dir);
CBO_API cbo_status cbo_campaign_config_json(const cbo_campaign* campaign, char** out);
CBO_API size_t cbo_campaign_dimension(const cbo_campaign* campaign);
CBO_API size_t cbo_campaign_record_count(const cbo_campaign* campaign);
CBO_API cbo_status cbo_campaign_record(const cbo_campaign* campaign, size_t index, cbo_record* out);
/* Copies the record's design point (native units) into x[0..cap). */
CBO_API cbo_status cbo_campaign_record_x(const cbo_campaign* campaign, size_t index, double* x, size_t cap);
/* JSON summary: incumbent record, best feasible record (when a target is
 * fixed), counts, status and output directory. */
CBO_API cbo_status cbo_campaign_summary(const cbo_campaign* campaign, char** out);

/* Writes scatter.svg, frontier.svg, frontier.csv, convergence.csv into a
 * completed run directory. */
CBO_API cbo_status cbo_report(const char* run_dir);

/* Reference optimum of a builtin evaluator as JSON. `target` may be NULL. */
CBO_API cbo_status cbo_oracle(const char* evaluator, const double* target, size_t resolution, uint64_t seed,
                              size_t samples, char** out);

/* Numeric primitives. */
CBO_API cbo_status cbo_fom(double bv, double rsp_on, double* out);
CBO_API cbo_status cbo_evaluate_builtin(const char* evaluator, const double* x, size_t n, double* bv,
                                        double* rsp_on, double* fom);
/* Writes the indices (into bv/fom) of the upper-hull vertices, ordered by bv,
 * to out_idx (capacity n) and their count to out_n. */
CBO_API cbo_status cbo_upper_hull(const double* bv, const double* fom, size_t n, size_t* out_idx, size_t* out_n);
/* Lagrange multiplier for `target` from the upper hull of the given points. */
CBO_API cbo_status cbo_multiplier(const double* bv, const double* fom, size_t n, double target, double* lambda,
                                  int* clamped);
CBO_API double cbo_lagrangian(double fom, double bv, double lambda, double target);

#ifdef __cplusplus
}
#endif

#endif /* CBO_CBO_H_ */
