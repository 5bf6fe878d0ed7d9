/* C interface to ncvcox: penalized Cox models, concordance, and nested-CV
 * confidence intervals for the C-index.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an ncvcox_status;
 * on failure ncvcox_last_error() describes the problem for the calling thread.
 * Strings returned by a result stay valid until that result is freed.
 */
#ifndef NCVCOX_H
#define NCVCOX_H

#include <stddef.h>
#include <stdint.h>

#if defined(NCVCOX_BUILDING_LIBRARY)
#define NCVCOX_API __attribute__((visibility("default")))
#else
#define NCVCOX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncvcox_status {
  NCVCOX_OK = 0,
  NCVCOX_ERR_CONFIG = 1,
  NCVCOX_ERR_DATA = 2,
  NCVCOX_ERR_NUMERICAL = 3,
  NCVCOX_ERR_INTERNAL = 4
} ncvcox_status;

typedef enum ncvcox_lambda_rule { NCVCOX_LAMBDA_MAX = 0, NCVCOX_LAMBDA_ONE_SE = 1 } ncvcox_lambda_rule;
typedef enum ncvcox_pooling { NCVCOX_PER_FOLD = 0, NCVCOX_POOLED = 1 } ncvcox_pooling;
typedef enum ncvcox_mse_floor { NCVCOX_ZERO_FLOOR = 0, NCVCOX_A_FALLBACK = 1 } ncvcox_mse_floor;

typedef struct ncvcox_dataset ncvcox_dataset;
typedef struct ncvcox_result ncvcox_result;

/* Penalized Cox fit plus the CV-PL lambda selection used whenever a model is trained. */
typedef struct ncvcox_learner_config {
  double enet_alpha;       /* 1 = lasso, 0 = ridge */
  int n_lambda;
  double lambda_min_ratio; /* <= 0: 0.01 when n > p, else 0.05 */
  double tol;
  int max_iter;
  int selection_folds;
  int lambda_rule;         /* ncvcox_lambda_rule */
} ncvcox_learner_config;

typedef struct ncvcox_cv_config {
  int k;
  double alpha; /* interval miscoverage level */
  uint64_t seed;
  int pooling;  /* ncvcox_pooling */
  int threads;
} ncvcox_cv_config;

typedef struct ncvcox_ncv_config {
  int k;
  int repetitions;
  double alpha;
  uint64_t seed;
  int mse_floor; /* ncvcox_mse_floor */
  int threads;
} ncvcox_ncv_config;

typedef struct ncvcox_sim_config {
  size_t n_train;
  size_t n_test;
  size_t p;
  const double* beta_true; /* length p, or NULL for the default sparse signal */
  double signal;           /* value of the leading ceil(p/10) coefficients when beta_true is NULL */
  double noise_c;
  double censoring_rate;
  int trials;
  uint64_t seed;
} ncvcox_sim_config;

typedef struct ncvcox_coverage_config {
  int k;
  int repetitions;
  double alpha;
  int pooling;   /* naive CV interval construction */
  int mse_floor;
  int threads;
} ncvcox_coverage_config;

NCVCOX_API const char* ncvcox_version(void);
NCVCOX_API const char* ncvcox_last_error(void);

NCVCOX_API void ncvcox_learner_config_default(ncvcox_learner_config* config);
NCVCOX_API void ncvcox_cv_config_default(ncvcox_cv_config* config);
NCVCOX_API void ncvcox_ncv_config_default(ncvcox_ncv_config* config);
NCVCOX_API void ncvcox_sim_config_default(ncvcox_sim_config* config);
NCVCOX_API void ncvcox_coverage_config_default(ncvcox_coverage_config* config);

/* Datasets. `x` is row-major n x p. */
NCVCOX_API ncvcox_status ncvcox_dataset_create(size_t n, size_t p, const double* x, const double* times,
                                               const int* status, ncvcox_dataset** out);
NCVCOX_API ncvcox_status ncvcox_dataset_load_csv(const char* path, const char* time_col, const char* status_col,
                                                 ncvcox_dataset** out);
NCVCOX_API ncvcox_status ncvcox_dataset_write_csv(const ncvcox_dataset* dataset, const char* path);
NCVCOX_API ncvcox_status ncvcox_dataset_variance_filter(const ncvcox_dataset* dataset, size_t top_k,
                                                        ncvcox_dataset** out);
NCVCOX_API size_t ncvcox_dataset_rows(const ncvcox_dataset* dataset);
NCVCOX_API size_t ncvcox_dataset_cols(const ncvcox_dataset* dataset);
NCVCOX_API void ncvcox_dataset_free(ncvcox_dataset* dataset);

/* Synthetic train/test draw of one trial. */
NCVCOX_API ncvcox_status ncvcox_simulate_draw(const ncvcox_sim_config* sim, int trial, ncvcox_dataset** train,
                                              ncvcox_dataset** test);

/* Harrell C-index and its infinitesimal-jackknife variance. */
NCVCOX_API ncvcox_status ncvcox_concordance(size_t n, const double* times, const int* status,
                                            const double* predictors, double* c_index, double* ij_variance);

/* Analyses. Each produces a result holding JSON, and where applicable CSV
 * and a JSON-lines trace. */
NCVCOX_API ncvcox_status ncvcox_fit_path(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                                         ncvcox_result** out);
NCVCOX_API ncvcox_status ncvcox_cv(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                                   const ncvcox_cv_config* config, ncvcox_result** out);
NCVCOX_API ncvcox_status ncvcox_ncv(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                                    const ncvcox_ncv_config* config, ncvcox_result** out);
NCVCOX_API ncvcox_status ncvcox_simulate(const ncvcox_sim_config* sim, const ncvcox_learner_config* learner,
                                         const ncvcox_coverage_config* coverage, ncvcox_result** out);
NCVCOX_API ncvcox_status ncvcox_real_data(const ncvcox_dataset* dataset, size_t n_train, int trials, uint64_t seed,
                                          const ncvcox_learner_config* learner,
                                          const ncvcox_coverage_config* coverage, ncvcox_result** out);
NCVCOX_API ncvcox_status ncvcox_fig2(const ncvcox_sim_config* base, const size_t* n_grid, size_t grid_len,
                                     int replicates, const ncvcox_learner_config* learner, int threads,
                                     ncvcox_result** out);

NCVCOX_API const char* ncvcox_result_json(const ncvcox_result* result);
NCVCOX_API const char* ncvcox_result_csv(const ncvcox_result* result);
NCVCOX_API const char* ncvcox_result_trace(const ncvcox_result* result);
/* Named scalar, e.g. "point", "se", "lo", "hi"; NCVCOX_ERR_CONFIG if absent. */
NCVCOX_API ncvcox_status ncvcox_result_scalar(const ncvcox_result* result, const char* key, double* value);
NCVCOX_API void ncvcox_result_free(ncvcox_result* result);

#ifdef __cplusplus
}
#endif

#endif /* NCVCOX_H */
