#ifndef HOROLAB_H
#define HOROLAB_H

/* C interface to libhorolab. Every call returns an hl_status; on failure the
   message is available from hl_last_error() on the calling thread until the next
   call. Strings returned through char** are owned by the caller and released
   with hl_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define HL_API __attribute__((visibility("default")))
#else
#define HL_API
#endif

typedef enum {
  HL_OK = 0,
  HL_ERR_ARGUMENT = 1,
  HL_ERR_DOMAIN = 2,
  HL_ERR_CONSISTENCY = 3,
  HL_ERR_PRECONDITION = 4,
  HL_ERR_IO = 5,
  HL_ERR_PARSE = 6,
  HL_ERR_PRECISION = 7,
  HL_ERR_NULL = 8,
  HL_ERR_INTERNAL = 99
} hl_status;

typedef struct hl_curve hl_curve;
typedef struct hl_mobius_spec hl_mobius_spec;
typedef struct hl_unstable_spec hl_unstable_spec;
typedef struct hl_report hl_report;

HL_API const char* hl_version(void);
HL_API const char* hl_last_error(void);
HL_API const char* hl_status_name(hl_status status);
HL_API void hl_string_free(char* s);

/* Curves: {"dims":[...], "rates":[...], "factors":[[[c0, c1, ...], ...], ...]}. */
HL_API hl_status hl_curve_from_json(const char* json, hl_curve** out);
HL_API hl_status hl_curve_load(const char* path, hl_curve** out);
HL_API void hl_curve_free(hl_curve* curve);
HL_API hl_status hl_curve_factor_count(const hl_curve* curve, int* out);
/* Writes phi(s) block after block into out (capacity in doubles); *written gets the length. */
HL_API hl_status hl_curve_eval(const hl_curve* curve, double s, double* out, size_t capacity, size_t* written);

/* Moebius embedding spec, read against the curve's shape:
   {"partition":[[1,2],[3]], "m":[2,1], "mobius":"identity" | [matrix or "identity", ...]}. */
HL_API hl_status hl_mobius_spec_from_json(const hl_curve* curve, const char* json, hl_mobius_spec** out);
HL_API void hl_mobius_spec_free(hl_mobius_spec* spec);

/* Unstable direction spec: {"powers":[...], "null_vectors":[[...], ...]}. */
HL_API hl_status hl_unstable_spec_from_json(const hl_curve* curve, const char* json, hl_unstable_spec** out);
HL_API void hl_unstable_spec_free(hl_unstable_spec* spec);

/* Fraction of grid_n uniform s with the boundary tuple within tol of the set, and a JSON
   document with per-factor diagnostics (diagnostics may be NULL). */
HL_API hl_status hl_obstruct_mobius(const hl_curve* curve, const hl_mobius_spec* spec, double tol, int grid_n,
                                    double* measure, char** diagnostics);
HL_API hl_status hl_obstruct_unstable(const hl_curve* curve, const hl_unstable_spec* spec, double tol, int grid_n,
                                      double* measure, char** diagnostics);

/* Reads either spec kind: a document with "null_vectors" is an unstable spec, otherwise a Moebius spec. */
HL_API hl_status hl_obstruct_json(const hl_curve* curve, const char* spec_json, double tol, int grid_n, double* measure,
                                  char** diagnostics);

/* Property suites: core, weights, curves, bounds, obstructions. out_dir may be NULL. */
HL_API hl_status hl_verify_suite(const char* suite, uint64_t seed, const char* out_dir, int* passed, char** result);
/* Acceptance criterion 1..12. */
HL_API hl_status hl_verify_criterion(int id, uint64_t seed, int* passed, char** result);

/* Experiments. Output paths inside the config are relative to the working directory. */
HL_API hl_status hl_experiment_run_json(const char* config_json, hl_report** out);
HL_API hl_status hl_experiment_run_file(const char* config_path, hl_report** out);
/* Replace the output targets; NULL keeps the current value, "" disables it. */
HL_API hl_status hl_report_set_outputs(hl_report* report, const char* json_path, const char* csv_path,
                                       const char* svg_dir);
HL_API hl_status hl_report_write(const hl_report* report);
HL_API hl_status hl_report_json(const hl_report* report, char** out);
HL_API hl_status hl_report_csv(const hl_report* report, char** out);
HL_API hl_status hl_report_sample_count(const hl_report* report, size_t* out);
/* Cusp fraction above Y for factor (0-based) at the t_index-th configured time. */
HL_API hl_status hl_report_cusp_fraction(const hl_report* report, int t_index, int factor, double Y, double* out);
HL_API void hl_report_free(hl_report* report);

HL_API hl_status hl_c_dJ(int d, double lo, double hi, double* out);
HL_API hl_status hl_haar_cusp_fraction(double Y, double* out);

#ifdef __cplusplus
}
#endif

#endif
