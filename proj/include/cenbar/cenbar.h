/*
 * cenbar C API
 *
 * Opaque handles and status codes over the C++ core. Every function that can
 * fail returns a cenbar_status; on failure cenbar_last_error() returns a
 * one-line description that stays valid until the next API call on the same
 * thread. Strings returned through char** are owned by the caller and must be
 * released with cenbar_string_free().
 */
#ifndef CENBAR_H
#define CENBAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CENBAR_BUILDING_LIBRARY)
#    define CENBAR_API __declspec(dllexport)
#  else
#    define CENBAR_API __declspec(dllimport)
#  endif
#else
#  define CENBAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values of the input/degenerate/numerical codes equal the CLI exit codes. */
typedef enum cenbar_status {
    CENBAR_OK = 0,
    CENBAR_ERROR_INPUT = 2,       /* malformed data, schema violation, bad option */
    CENBAR_ERROR_DEGENERATE = 3,  /* constant column, empty tuning grid */
    CENBAR_ERROR_NUMERICAL = 4,   /* solve failure, undefined synthetic value */
    CENBAR_ERROR_IO = 5,          /* file could not be read */
    CENBAR_ERROR_ARGUMENT = 6,    /* null handle or buffer too small */
    CENBAR_ERROR_INTERNAL = 7
} cenbar_status;

typedef struct cenbar_dataset cenbar_dataset;
typedef struct cenbar_fit cenbar_fit;

CENBAR_API const char* cenbar_version(void);
CENBAR_API const char* cenbar_last_error(void);
CENBAR_API void cenbar_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

CENBAR_API cenbar_status cenbar_dataset_read_csv(const char* path, cenbar_dataset** out);
CENBAR_API cenbar_status cenbar_dataset_parse_csv(const char* text, size_t length,
                                                  cenbar_dataset** out);
/* covariates is row-major n x p; covariate names default to x1..xp. */
CENBAR_API cenbar_status cenbar_dataset_create(size_t n, size_t p, const double* times,
                                               const int* events, const double* covariates,
                                               cenbar_dataset** out);
CENBAR_API void cenbar_dataset_free(cenbar_dataset* ds);
CENBAR_API size_t cenbar_dataset_rows(const cenbar_dataset* ds);
CENBAR_API size_t cenbar_dataset_cols(const cenbar_dataset* ds);
CENBAR_API cenbar_status cenbar_dataset_to_csv(const cenbar_dataset* ds, char** out);

/* ---- synthetic response ------------------------------------------------ */

/* Writes the n synthetic responses Y* into out (capacity must be >= n). */
CENBAR_API cenbar_status cenbar_synthetic_response(const cenbar_dataset* ds, double* out,
                                                   size_t capacity);
/* The dataset's CSV rows with a trailing ystar column. Rows parsed from CSV
 * are echoed verbatim; datasets built from arrays are re-serialized. */
CENBAR_API cenbar_status cenbar_transform_csv(const cenbar_dataset* ds, char** out);

/* ---- fitting ----------------------------------------------------------- */

typedef struct cenbar_fit_options {
    int32_t folds;              /* default 5 */
    uint64_t seed;              /* default 42 */
    int32_t fixed_tuning;       /* nonzero: skip CV and use xi, lambda */
    double xi;
    double lambda;
    int64_t screen_k;           /* < 0: no screening; 0: default k; > 0: keep k columns */
    double tol;                 /* default 1e-8 */
    int32_t max_iter;           /* default 1000 */
    double zero_threshold;      /* default 1e-8 */
    int32_t per_fold_transform; /* default 0 */
} cenbar_fit_options;

CENBAR_API void cenbar_fit_options_init(cenbar_fit_options* options);
CENBAR_API cenbar_status cenbar_fit_run(const cenbar_dataset* ds, const cenbar_fit_options* options,
                                        cenbar_fit** out);
CENBAR_API void cenbar_fit_free(cenbar_fit* fit);
CENBAR_API size_t cenbar_fit_num_coefficients(const cenbar_fit* fit);
/* Raw-scale coefficients. */
CENBAR_API cenbar_status cenbar_fit_coefficients(const cenbar_fit* fit, double* out, size_t capacity);
CENBAR_API double cenbar_fit_intercept(const cenbar_fit* fit);
CENBAR_API double cenbar_fit_xi(const cenbar_fit* fit);
CENBAR_API double cenbar_fit_lambda(const cenbar_fit* fit);
/* NaN when tuning was fixed. */
CENBAR_API double cenbar_fit_cv_error(const cenbar_fit* fit);
CENBAR_API int32_t cenbar_fit_iterations(const cenbar_fit* fit);
CENBAR_API int32_t cenbar_fit_converged(const cenbar_fit* fit);
CENBAR_API size_t cenbar_fit_support_size(const cenbar_fit* fit);
CENBAR_API cenbar_status cenbar_fit_report_json(const cenbar_fit* fit, char** out);

/* ---- Monte Carlo ------------------------------------------------------- */

typedef enum cenbar_report_format { CENBAR_FORMAT_JSON = 0, CENBAR_FORMAT_CSV = 1 } cenbar_report_format;

typedef struct cenbar_run_options {
    int64_t reps;                /* > 0 overrides the scenario */
    const char* methods;         /* comma-separated override, or NULL */
    const char* default_methods; /* used when neither override nor scenario names methods */
    int32_t screen;              /* -1: scenario/default, 0: off, 1: on */
    int64_t k;                   /* > 0 overrides the screened size */
    int32_t seed_set;            /* nonzero: seed overrides master_seed */
    uint64_t seed;
    uint32_t threads;            /* 0: hardware concurrency */
    int32_t format;              /* cenbar_report_format */
} cenbar_run_options;

CENBAR_API void cenbar_run_options_init(cenbar_run_options* options);
/* Runs a scenario document and returns the "cenbar-report/1" JSON (or CSV). */
CENBAR_API cenbar_status cenbar_run_scenario(const char* scenario_json,
                                             const cenbar_run_options* options, char** out_report);
/* CSV of the dataset generated for replication rep. */
CENBAR_API cenbar_status cenbar_simulate_dataset(const char* scenario_json,
                                                 const cenbar_run_options* options, uint64_t rep,
                                                 char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* CENBAR_H */
