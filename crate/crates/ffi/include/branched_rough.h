#ifndef BRANCHED_ROUGH_H
#define BRANCHED_ROUGH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BrpStatus {
  BRP_STATUS_OK = 0,
  BRP_STATUS_NULL_POINTER = 1,
  BRP_STATUS_INVALID_UTF8 = 2,
  BRP_STATUS_PARSE = 3,
  BRP_STATUS_INVALID_ARGUMENT = 4,
  BRP_STATUS_NUMERICAL = 5,
  BRP_STATUS_BUFFER_TOO_SMALL = 6,
  BRP_STATUS_PANIC = 7,
} BrpStatus;

/*
 Polynomial vector fields `f_1, …, f_d` on `ℝ^e`.
 */
typedef struct BrpField BrpField;

/*
 A truncated branched rough path with `f64` coefficients.
 */
typedef struct BrpRoughPath BrpRoughPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread. Valid until the next
 failing call; never null.
 */
const char *brp_last_error(void);

/*
 Canonical lift of the piecewise-linear path through `n_points` points of
 `ℝ^dim`, stored row-major in `values`. `times` may be null for the grid
 `0, 1, …, n_points − 1`.

 # Safety
 `values` must hold `n_points * dim` doubles and `times`, if non-null,
 `n_points` doubles.
 */
enum BrpStatus brp_lift(const double *times,
                        const double *values,
                        size_t n_points,
                        size_t dim,
                        double p,
                        struct BrpRoughPath **out);

/*
 # Safety
 `json` must be a NUL-terminated string.
 */
enum BrpStatus brp_rough_path_from_json(const char *json, struct BrpRoughPath **out);

/*
 Serializes a rough path; free the string with `brp_string_free`.

 # Safety
 `path` must be a live handle.
 */
enum BrpStatus brp_rough_path_to_json(const struct BrpRoughPath *path, char **out);

/*
 Number of grid points, or 0 for a null handle.

 # Safety
 `path` must be null or a live handle.
 */
size_t brp_rough_path_len(const struct BrpRoughPath *path);

/*
 `‖X‖_{p-var}` over the whole grid.

 # Safety
 `path` must be a live handle.
 */
enum BrpStatus brp_p_variation(const struct BrpRoughPath *path, double p, double *out);

/*
 # Safety
 `json` must be a NUL-terminated string.
 */
enum BrpStatus brp_field_from_json(const char *json, struct BrpField **out);

/*
 Euler scheme on the full grid of `path`, writing the terminal value into
 `out_end`, which holds `out_len ≥ e` doubles.

 # Safety
 Handles must be live; `xi` holds `xi_len` doubles and `out_end` holds
 `out_len` doubles.
 */
enum BrpStatus brp_solve_euler(const struct BrpRoughPath *path,
                               const struct BrpField *field,
                               const double *xi,
                               size_t xi_len,
                               double *out_end,
                               size_t out_len);

/*
 Runs the algebra identity suite at truncation `n` with `d` labels.
 `out_pass` receives 1 if every check passed and 0 otherwise; `out_report`
 may be null, otherwise it receives a JSON report to free with
 `brp_string_free`.

 # Safety
 `out_pass` must be valid for writes; `out_report` null or valid.
 */
enum BrpStatus brp_check_algebra(size_t n,
                                 size_t d,
                                 uint64_t seed,
                                 int32_t *out_pass,
                                 char **out_report);

/*
 # Safety
 `path` must be null or a handle not yet freed.
 */
void brp_rough_path_free(struct BrpRoughPath *path);

/*
 # Safety
 `field` must be null or a handle not yet freed.
 */
void brp_field_free(struct BrpField *field);

/*
 # Safety
 `s` must be null or a string returned by this library and not yet freed.
 */
void brp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRANCHED_ROUGH_H */
