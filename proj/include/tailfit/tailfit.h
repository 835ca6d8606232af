/* C interface to the tailfit library. Handles are opaque; every fallible call
 * returns a tf_status and leaves a message in tf_last_error() on failure. */
#ifndef TAILFIT_TAILFIT_H
#define TAILFIT_TAILFIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TF_API __declspec(dllexport)
#else
#define TF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tf_status {
  TF_OK = 0,
  TF_ERR_INVALID_ARGUMENT,
  TF_ERR_THETA_OUT_OF_DOMAIN,
  TF_ERR_PARAM_OUT_OF_RANGE,
  TF_ERR_NON_FINITE_INPUT,
  TF_ERR_ZERO_DENOMINATOR,
  TF_ERR_UNREACHABLE,
  TF_ERR_NO_TAIL_DATA,
  TF_ERR_ZERO_MODEL_VECTOR,
  TF_ERR_SINGULAR_JACOBIAN,
  TF_ERR_UNSUPPORTED_FAMILY,
  TF_ERR_UNDERIDENTIFIED,
  TF_ERR_SPATIAL_NO_DATA,
  TF_ERR_NON_POSITIVE_ZETA,
  TF_ERR_BISECTION_FAILURE,
  TF_ERR_CHOLESKY_FAILURE,
  TF_ERR_IO,
  TF_ERR_PARSE,
  TF_ERR_INTERNAL
} tf_status;

/* Identifier such as "NoTailData". */
TF_API const char* tf_status_name(tf_status status);
/* Message of the last failed call on the calling thread; "" if none. */
TF_API const char* tf_last_error(void);
TF_API const char* tf_version(void);
/* Releases strings returned through char** out-parameters. */
TF_API void tf_string_free(char* text);

/* ---- numeric tables (row-major, with column names) ---- */
typedef struct tf_table tf_table;

TF_API tf_status tf_table_create(size_t rows, size_t cols, const double* row_major, tf_table** out);
TF_API tf_status tf_table_read_csv(const char* path, tf_table** out);
TF_API tf_status tf_table_write_csv(const tf_table* table, const char* path);
TF_API size_t tf_table_rows(const tf_table* table);
TF_API size_t tf_table_cols(const tf_table* table);
TF_API const double* tf_table_data(const tf_table* table);
TF_API const char* tf_table_column_name(const tf_table* table, size_t col);
TF_API void tf_table_free(tf_table* table);

/* ---- site coordinates (id,x,y CSV) ---- */
typedef struct tf_coords tf_coords;

TF_API tf_status tf_coords_create(size_t sites, const double* x, const double* y, tf_coords** out);
TF_API tf_status tf_coords_random(size_t sites, double side, uint64_t seed, tf_coords** out);
TF_API tf_status tf_coords_read_csv(const char* path, tf_coords** out);
TF_API tf_status tf_coords_write_csv(const tf_coords* coords, const char* path);
TF_API size_t tf_coords_size(const tf_coords* coords);
TF_API double tf_coords_x(const tf_coords* coords, size_t site);
TF_API double tf_coords_y(const tf_coords* coords, size_t site);
TF_API void tf_coords_free(tf_coords* coords);

/* ---- simulation ---- */
typedef struct tf_sim_spec tf_sim_spec;

/* model: "m1", "m2", "m3" or "spatial". */
TF_API tf_status tf_sim_spec_create(const char* model, tf_sim_spec** out);
/* Keys: theta, nu, phi, r, lambda, alpha, beta, n, seed, stream, noise
 * ("none" or a Pareto index), margins (uniform|frechet), algorithm
 * (exact|normalized), spectral_cap. */
TF_API tf_status tf_sim_spec_set(tf_sim_spec* spec, const char* key, const char* value);
TF_API tf_status tf_sim_spec_set_coords(tf_sim_spec* spec, const tf_coords* coords);
TF_API tf_status tf_sim_spec_validate(const tf_sim_spec* spec);
/* Validates and draws; column names are x,y or s1..sd. */
TF_API tf_status tf_simulate(const tf_sim_spec* spec, tf_table** out);
/* {"model", "params", "n", "seed", ...} */
TF_API tf_status tf_sim_spec_json(const tf_sim_spec* spec, char** out);
TF_API void tf_sim_spec_free(tf_sim_spec* spec);

/* ---- bivariate M-estimation ---- */
typedef struct tf_fit_options {
  const char* family;   /* "ihr", "ial", "rs", "hr-ad", "al-ad" or long names */
  const char* weights;  /* "g1".."g7"; NULL means g1 */
  size_t column1;
  size_t column2;
  size_t k;             /* exactly one of k and m is nonzero */
  size_t m;
  unsigned restarts;
  uint64_t seed;
  int covariance;       /* nonzero: plug-in covariance (product families) */
} tf_fit_options;

typedef struct tf_fit tf_fit;

TF_API void tf_fit_options_init(tf_fit_options* options);
TF_API tf_status tf_fit_bivariate(const tf_table* data, const tf_fit_options* options, tf_fit** out);
TF_API size_t tf_fit_dimension(const tf_fit* fit);
TF_API double tf_fit_theta(const tf_fit* fit, size_t index);
TF_API double tf_fit_zeta(const tf_fit* fit);
TF_API double tf_fit_sigma(const tf_fit* fit);
TF_API double tf_fit_eta(const tf_fit* fit);
TF_API double tf_fit_objective(const tf_fit* fit);
TF_API size_t tf_fit_k(const tf_fit* fit);
TF_API size_t tf_fit_m(const tf_fit* fit);
TF_API int tf_fit_converged(const tf_fit* fit);
TF_API int tf_fit_at_boundary(const tf_fit* fit);
/* Covariance of (theta, sigma); 0 when it was not requested. */
TF_API int tf_fit_has_covariance(const tf_fit* fit);
TF_API double tf_fit_covariance(const tf_fit* fit, size_t row, size_t col);
TF_API tf_status tf_fit_json(const tf_fit* fit, char** out);
TF_API void tf_fit_free(tf_fit* fit);

/* ---- spatial estimation ---- */
typedef struct tf_spatial_options {
  const char* method;   /* "pairwise", "ls" or "joint" */
  const char* weights;  /* NULL means g1 */
  size_t m;
  unsigned restarts;
  uint64_t seed;
  unsigned threads;     /* 0: TAILFIT_THREADS or hardware concurrency */
} tf_spatial_options;

typedef struct tf_spatial_fit tf_spatial_fit;

TF_API void tf_spatial_options_init(tf_spatial_options* options);
/* Columns of data are the sites of coords, in order. */
TF_API tf_status tf_fit_spatial(const tf_table* data, const tf_coords* coords,
                                const tf_spatial_options* options, tf_spatial_fit** out);
/* NaN for the pairwise method. */
TF_API double tf_spatial_alpha(const tf_spatial_fit* fit);
TF_API double tf_spatial_beta(const tf_spatial_fit* fit);
TF_API size_t tf_spatial_pair_count(const tf_spatial_fit* fit);
TF_API size_t tf_spatial_usable_pairs(const tf_spatial_fit* fit);
/* theta is NaN for excluded pairs. Any out-pointer may be NULL. */
TF_API tf_status tf_spatial_pair(const tf_spatial_fit* fit, size_t index, size_t* site1, size_t* site2,
                                 double* distance, double* theta);
TF_API tf_status tf_spatial_json(const tf_spatial_fit* fit, char** out);
TF_API void tf_spatial_free(tf_spatial_fit* fit);

/* ---- Monte Carlo studies ---- */
typedef struct tf_study tf_study;
typedef struct tf_study_result tf_study_result;

/* Key-value configuration file; see README for the keys. */
TF_API tf_status tf_study_load(const char* path, tf_study** out);
TF_API tf_status tf_study_parse(const char* text, tf_study** out);
TF_API tf_status tf_study_set_seed(tf_study* study, uint64_t seed);
TF_API tf_status tf_study_set_threads(tf_study* study, unsigned threads);
/* Resolved configuration. */
TF_API tf_status tf_study_json(const tf_study* study, char** out);
TF_API tf_status tf_study_run(const tf_study* study, tf_study_result** out);
TF_API tf_status tf_study_write_tidy(const tf_study_result* result, const char* path);
TF_API tf_status tf_study_write_summary(const tf_study_result* result, const char* path);
TF_API size_t tf_study_attempts(const tf_study_result* result);
TF_API size_t tf_study_failures(const tf_study_result* result);
TF_API double tf_study_wall_seconds(const tf_study_result* result);
TF_API void tf_study_free(tf_study* study);
TF_API void tf_study_result_free(tf_study_result* result);

#ifdef __cplusplus
}
#endif

#endif
