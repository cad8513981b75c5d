#ifndef EVAGAP_H
#define EVAGAP_H

#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum EvagapStatus {
  EVAGAP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  EVAGAP_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  EVAGAP_STATUS_INVALID_UTF8 = 2,
  // Inputs failed validation or a computation was undefined for them.
  EVAGAP_STATUS_INVALID_INPUT = 3,
  // Inputs were valid but the analysis cannot be completed.
  EVAGAP_STATUS_INFEASIBLE = 4,
  // An index was past the end of a collection.
  EVAGAP_STATUS_OUT_OF_RANGE = 5,
  // An internal panic was caught at the boundary.
  EVAGAP_STATUS_INTERNAL = 99,
} EvagapStatus;

// A validated country economy.
typedef struct EvagapEconomy EvagapEconomy;

// An ordered EVA series, historical or projected.
typedef struct EvagapEvaSeries EvagapEvaSeries;

// One year (or projection offset) of an EVA series.
typedef struct EvagapEvaRecord {
  int32_t year;
  double gdp;
  double nopat;
  double total_wealth;
  double capital_charge;
  double eva;
} EvagapEvaRecord;

typedef struct EvagapEvaSummary {
  double mean;
  double min;
  int32_t min_year;
  double max;
  int32_t max_year;
} EvagapEvaSummary;

// Log-log elasticity estimate with significance.
typedef struct EvagapRegression {
  double slope;
  double intercept;
  double pearson_r;
  double r_squared;
  double t_statistic;
  double p_value;
  size_t n;
} EvagapRegression;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL after a success.
//
// The pointer stays valid until the next evagap call on the same thread.
const char *evagap_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *evagap_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void evagap_string_free(char *s);

// Loads an economy from its JSON configuration text.
//
// Relative series paths resolve against `base_dir`, which may be NULL when
// every series is inline.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum EvagapStatus evagap_economy_from_json(const char *json,
                                           const char *base_dir,
                                           struct EvagapEconomy **out);

// Loads an economy from a JSON file; series paths resolve next to it.
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum EvagapStatus evagap_economy_from_file(const char *path, struct EvagapEconomy **out);

// # Safety
// `econ` must come from this library and not have been freed already.
void evagap_economy_free(struct EvagapEconomy *econ);

// Year-by-year EVA over the economy's history.
//
// # Safety
// `econ` must be a live handle; `out` must be writable.
enum EvagapStatus evagap_economy_eva(const struct EvagapEconomy *econ,
                                     struct EvagapEvaSeries **out);

// Projected EVA under a scenario given as projection JSON text.
//
// Records are keyed by offsets 1..horizon. When `discount_rate` is not NULL
// it receives the scenario's discount rate (the central bank rate when the
// scenario sets none).
//
// # Safety
// `econ` must be a live handle; strings NUL-terminated; `out` writable.
enum EvagapStatus evagap_economy_project_eva(const struct EvagapEconomy *econ,
                                             const char *projection_json,
                                             const char *base_dir,
                                             struct EvagapEvaSeries **out,
                                             double *discount_rate);

// Number of records; 0 for NULL.
//
// # Safety
// `series` must be NULL or a live handle.
size_t evagap_eva_series_len(const struct EvagapEvaSeries *series);

// # Safety
// `series` must be a live handle; `out` must be writable.
enum EvagapStatus evagap_eva_series_record(const struct EvagapEvaSeries *series,
                                           size_t index,
                                           struct EvagapEvaRecord *out);

// Mean, minimum and maximum EVA; ties resolve to the earliest year.
//
// # Safety
// `series` must be a live handle; `out` must be writable.
enum EvagapStatus evagap_eva_series_summary(const struct EvagapEvaSeries *series,
                                            struct EvagapEvaSummary *out);

// # Safety
// `series` must come from this library and not have been freed already.
void evagap_eva_series_free(struct EvagapEvaSeries *series);

// `gdp * (1 - atr)`.
//
// # Safety
// `out` must be writable.
enum EvagapStatus evagap_nopat(double gdp, double atr, double *out);

// # Safety
// `out` must be writable.
enum EvagapStatus evagap_total_wealth(double produced,
                                      double human,
                                      double natural,
                                      double net_foreign,
                                      double *out);

// `nopat - total_wealth * cbr`.
//
// # Safety
// `out` must be writable.
enum EvagapStatus evagap_eva_value(double nopat, double total_wealth, double cbr, double *out);

// # Safety
// `out` must be writable.
enum EvagapStatus evagap_implied_cbr(double gdp,
                                     double atr,
                                     double total_wealth,
                                     double eva_value,
                                     double *out);

// Student's t cumulative distribution.
//
// # Safety
// `out` must be writable.
enum EvagapStatus evagap_student_t_cdf(double t, uint32_t df, double *out);

// Two-sided p-value of a correlation `r` over `n` observations.
//
// # Safety
// `out` must be writable.
enum EvagapStatus evagap_p_value(double r, size_t n, double *out);

// Log-log elasticity of `gdp` with respect to `rd`, both of length `len`
// and aligned by position.
//
// # Safety
// `rd` and `gdp` must each point to `len` readable doubles; `out` writable.
enum EvagapStatus evagap_estimate_elasticity(const double *rd,
                                             const double *gdp,
                                             size_t len,
                                             struct EvagapRegression *out);

// End-of-period present value of `len` cash flows.
//
// # Safety
// `values` must point to `len` readable doubles (may be NULL when `len` is 0).
enum EvagapStatus evagap_present_value(const double *values, size_t len, double rate, double *out);

// First period whose cumulative discounted EVA covers `required`.
//
// `out_years` receives 0 when the requirement is never covered.
//
// # Safety
// `values` must point to `len` readable doubles; `out_years` writable.
enum EvagapStatus evagap_years_to_close(const double *values,
                                        size_t len,
                                        double rate,
                                        double required,
                                        uint32_t *out_years);

// Order-independent sum of non-negative investment amounts.
//
// # Safety
// `amounts` must point to `len` readable doubles; `out` writable.
enum EvagapStatus evagap_total_required_investment(const double *amounts, size_t len, double *out);

// Rating-gap analysis as a JSON document.
//
// `subject_csv` is a one-row peer-format table and `peers_csv` the peer
// table, both with header. The result is written to `out_json` and must be
// released with [`evagap_string_free`]. An indicator left without peers after
// exclusions yields [`EvagapStatus::Infeasible`].
//
// # Safety
// String arguments must be NUL-terminated; `out_json` writable.
enum EvagapStatus evagap_rating_gap_json(const char *subject_csv,
                                         const char *peers_csv,
                                         const char *gap_config_json,
                                         char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVAGAP_H */
