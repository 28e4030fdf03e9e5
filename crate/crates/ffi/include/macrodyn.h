/* Generated from the macrodyn-ffi crate; edit the Rust source, not this file. */

#ifndef MACRODYN_H
#define MACRODYN_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/*
 * C ABI for the macrodyn library.
 *
 * Conventions:
 * - fallible calls return MdStatus; MD_STATUS_OK is zero,
 * - the failure message of the most recent call on the current thread is
 *   retrievable via md_last_error_message,
 * - heap objects cross the boundary as opaque pointers with paired
 *   md_*_free functions,
 * - flat results use plain C structs.
 */

/*
 * Status code of a fallible call. Matches the process exit codes of the
 * `macrodyn` binary where the classes overlap.
 */
typedef enum MdStatus {
  MD_STATUS_OK = 0,
  MD_STATUS_IO = 3,
  MD_STATUS_PARSE = 4,
  MD_STATUS_VALIDATION = 5,
  MD_STATUS_NUMERIC = 6,
  MD_STATUS_NULL_ARGUMENT = 7,
  MD_STATUS_INVALID_UTF8 = 8,
  MD_STATUS_PANIC = 9,
} MdStatus;

/* Which derived series of a dataset to copy out. */
typedef enum MdSeriesKind {
  MD_SERIES_KIND_POPULATION = 0,
  MD_SERIES_KIND_GDP = 1,
  MD_SERIES_KIND_SURPLUS = 2,
  MD_SERIES_KIND_PER_CAPITA_GDP = 3,
} MdSeriesKind;

/* How a simulation run ended. */
typedef enum MdOutcome {
  MD_OUTCOME_COMPLETED = 0,
  MD_OUTCOME_BLOW_UP = 1,
  MD_OUTCOME_NEGATIVE_SURPLUS = 2,
  MD_OUTCOME_NON_POSITIVE_STATE = 3,
} MdOutcome;

/* Opaque dataset handle. */
typedef struct MdDataset MdDataset;

/* Opaque simulation-trace handle. */
typedef struct MdTrace MdTrace;

/*
 * Fitted trend parameters with fit quality; `r2` is the squared
 * correlation between fitted and observed values.
 */
typedef struct MdTrendFit {
  double c;
  double t0;
  double k;
  double r;
  double r2;
  double sse;
} MdTrendFit;

/*
 * Ordinary-least-squares result. `has_intercept` is false for
 * through-origin fits, in which case `intercept` fields are zero.
 */
typedef struct MdRegression {
  double slope;
  double intercept;
  bool has_intercept;
  double slope_se;
  double t_slope;
  double p_slope;
  double r;
  double r2;
  size_t n;
  size_t dof;
} MdRegression;

/*
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length in bytes.
 * `buf` may be NULL to query only the length.
 */
size_t md_last_error_message(char *buf, size_t cap);

/* Library version as a static NUL-terminated string. */
const char *md_version(void);

/*
 * Loads and validates a dataset CSV
 * (`year,population_millions,gdp_billions[,note]`).
 */
MdStatus md_dataset_load(const char *path, double m, MdDataset **out);

/* Releases a dataset handle. NULL is a no-op. */
void md_dataset_free(MdDataset *ds);

/* Number of rows in the dataset; 0 for NULL. */
size_t md_dataset_len(const MdDataset *ds);

/*
 * Copies a raw or derived series into caller-provided arrays of capacity
 * `cap`; `*written` receives the number of rows copied.
 */
MdStatus md_dataset_series(const MdDataset *ds,
                           MdSeriesKind kind,
                           double *years,
                           double *values,
                           size_t cap,
                           size_t *written);

/*
 * Fits a blow-up trend to (years, values). `free_k` ignores `k` and
 * searches the exponent; `integer_t0` reports the best whole singularity
 * year instead of refining continuously.
 */
MdStatus md_fit_trend(const double *years,
                      const double *values,
                      size_t len,
                      double k,
                      bool free_k,
                      bool integer_t0,
                      MdTrendFit *out);

/* Least squares of y on x, optionally through the origin. */
MdStatus md_ols(const double *x,
                const double *y,
                size_t len,
                bool through_origin,
                MdRegression *out);

/* Pearson correlation of two equal-length arrays. */
MdStatus md_pearson(const double *x, const double *y, size_t len, double *out);

/* Two-tailed Student-t tail probability. */
MdStatus md_p_value(double t_stat, size_t dof, double *out);

/*
 * Runs the two-equation population/surplus model. On success the handle
 * holds yearly samples up to `t_end` or the abort year.
 */
MdStatus md_simulate_compact(double a,
                             double b_ratio,
                             double m,
                             double n0,
                             double s0,
                             double t_start,
                             double t_end,
                             bool use_rk4,
                             double step,
                             MdTrace **out);

/* Releases a trace handle. NULL is a no-op. */
void md_trace_free(MdTrace *trace);

/* Number of stored yearly samples; 0 for NULL. */
size_t md_trace_len(const MdTrace *trace);

/*
 * Outcome of the run; if it aborted and `abort_year` is non-NULL, the year
 * reached is stored there.
 */
MdOutcome md_trace_outcome(const MdTrace *trace, double *abort_year);

/*
 * Reads one stored sample. Surplus and GDP are NaN for models that do not
 * define them; output pointers may individually be NULL.
 */
MdStatus md_trace_row(const MdTrace *trace,
                      size_t index,
                      double *year,
                      double *population,
                      double *surplus,
                      double *gdp);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* MACRODYN_H */
