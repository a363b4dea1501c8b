/* exeff - extreme effect-variable decomposition of A/B-test distributions.
 *
 * C interface to the shared library. All functions return exeff_status;
 * on any failure exeff_last_error() carries a thread-local message.
 * Objects are opaque handles released with the matching _free call;
 * strings returned through char** are released with exeff_string_free.
 */
#ifndef EXEFF_H
#define EXEFF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum exeff_status {
    EXEFF_OK = 0,
    EXEFF_ERR_INVALID_ARGUMENT = 1,
    EXEFF_ERR_NEGATIVE_MASS = 2,
    EXEFF_ERR_BAD_TOTAL = 3,
    EXEFF_ERR_LENGTH_MISMATCH = 4,
    EXEFF_ERR_SINGULAR_MATRIX = 5,
    EXEFF_ERR_BAD_PERMUTATION = 6,
    EXEFF_ERR_IDENTICAL_DISTRIBUTIONS = 7,
    EXEFF_ERR_DEGENERATE_BOUNDS = 8,
    EXEFF_ERR_EMPTY_SUPPORT = 9,
    EXEFF_ERR_SIZE_OVERFLOW = 10,
    EXEFF_ERR_NO_FEASIBLE_POINT = 11,
    EXEFF_ERR_REJECTION_EXHAUSTED = 12,
    EXEFF_ERR_PARSE = 13,
    EXEFF_ERR_UNKNOWN_HEADER = 14,
    EXEFF_ERR_EMPTY_DATASET = 15,
    EXEFF_ERR_EMPTY_VARIANT = 16,
    EXEFF_ERR_DEGENERATE_BINS = 17,
    EXEFF_ERR_DUPLICATE_ASSIGNMENT = 18,
    EXEFF_ERR_SUPPORT_MISMATCH = 19,
    EXEFF_ERR_SCHEMA = 20,
    EXEFF_ERR_IO = 21,
    EXEFF_ERR_INTERNAL = 22
} exeff_status;

const char* exeff_status_name(exeff_status status);

/* Message describing the most recent failure on this thread. */
const char* exeff_last_error(void);

typedef struct exeff_dataset exeff_dataset; /* source distributions (+ means when ingested) */
typedef struct exeff_result exeff_result;   /* a solved decomposition */

void exeff_dataset_free(exeff_dataset* ds);
void exeff_result_free(exeff_result* res);
void exeff_string_free(char* text);

/* ---- configuration ---- */

typedef struct exeff_solver_config {
    double feasibility_tol; /* basis non-negativity slack, default 1e-9 */
    int starts;             /* local-search restarts, default 64 */
    int max_iters;          /* iterations per start, default 2000 */
    double step_init;       /* default 0.1 */
    double step_shrink;     /* default 0.5 */
    double min_step;        /* default 1e-7 */
    uint64_t seed;
    double det_tol;         /* singularity guard, default 1e-12 */
    int force_general;      /* bypass closed-form shortcuts (testing) */
} exeff_solver_config;

void exeff_solver_config_init(exeff_solver_config* cfg);

typedef struct exeff_binning_config {
    const char* transform;  /* "none" | "log1p", default "log1p" */
    int n_bins;             /* default 64 */
    const char* strategy;   /* "fixed_width" | "quantile", default "quantile" */
    const char* reference;  /* "pooled" | "control", default "pooled" */
    int drop_empty_shared_bins; /* default 1 */
} exeff_binning_config;

void exeff_binning_config_init(exeff_binning_config* cfg);

typedef struct exeff_plant_config {
    size_t k;                   /* variants, default 2 */
    size_t n;                   /* support size, default 8 */
    uint64_t seed;
    double min_det;             /* default 0.05 */
    double basis_concentration; /* default 4.0 */
} exeff_plant_config;

void exeff_plant_config_init(exeff_plant_config* cfg);

/* ---- datasets ---- */

/* Distributions JSON:
 * {"support": [labels], "variants": [{"name": str, "probs": [numbers]}]} */
exeff_status exeff_dataset_parse_json(const char* json_text, exeff_dataset** out);

/* CSV with header unit_id,variant,value; bins the values per config. */
exeff_status exeff_dataset_load_csv(const char* path, const exeff_binning_config* cfg,
                                    exeff_dataset** out);

/* Synthetic planted instance; *out_planted_objective (optional) receives
 * |det| of the planted mixture matrix. */
exeff_status exeff_dataset_plant(const exeff_plant_config* cfg, exeff_dataset** out,
                                 double* out_planted_objective);

/* Samples n_per_variant observations per variant into a CSV file. */
exeff_status exeff_dataset_sample_csv(const exeff_dataset* ds, uint64_t n_per_variant,
                                      uint64_t seed, const char* csv_path);

exeff_status exeff_dataset_to_json(const exeff_dataset* ds, char** out_json);
size_t exeff_dataset_variant_count(const exeff_dataset* ds);
size_t exeff_dataset_support_size(const exeff_dataset* ds);

/* ---- solving ---- */

exeff_status exeff_solve(const exeff_dataset* ds, const exeff_solver_config* cfg,
                         exeff_result** out);

/* Exhaustive grid reference; emits "method": "grid" in the JSON. */
exeff_status exeff_solve_grid(const exeff_dataset* ds, int steps, double feasibility_tol,
                              exeff_result** out);

/* Reads a decomposition JSON back, validated against the dataset shape. */
exeff_status exeff_result_parse_json(const exeff_dataset* ds, const char* json_text,
                                     exeff_result** out);

double exeff_result_objective(const exeff_result* res);
const char* exeff_result_branch(const exeff_result* res);
int exeff_result_no_effect(const exeff_result* res);

/* Decomposition JSON with verification diagnostics. */
exeff_status exeff_result_to_json(const exeff_result* res, const exeff_dataset* ds,
                                  char** out_json);

/* A/B report JSON (means, delta, alpha, beta, flags, decomposition).
 * min_alpha < 0 selects the built-in no-effect cutoff. *out_no_effect
 * (optional) receives the report's no_detectable_effect flag. */
exeff_status exeff_report_json(const exeff_dataset* ds, const exeff_result* res, double min_alpha,
                               char** out_json, int* out_no_effect);

/* Tidy bin,series,probability CSV over sources and basis. */
exeff_status exeff_plotdata_csv(const exeff_dataset* ds, const exeff_result* res, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* EXEFF_H */
