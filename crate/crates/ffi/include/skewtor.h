#ifndef SKEWTOR_H
#define SKEWTOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. Values 2 to 5 match the exit codes of the command-line tool.
 */
typedef enum SkewtorStatus {
  SKEWTOR_STATUS_OK = 0,
  /*
   Computation failed for a reason other than those below.
   */
  SKEWTOR_STATUS_FAILED = 1,
  SKEWTOR_STATUS_INVALID_INPUT = 2,
  SKEWTOR_STATUS_UNSUPPORTED_DIM = 3,
  SKEWTOR_STATUS_UNKNOWN_CATALOG = 4,
  SKEWTOR_STATUS_CONSTRAINT = 5,
  SKEWTOR_STATUS_NULL_POINTER = 6,
  SKEWTOR_STATUS_INVALID_UTF8 = 7,
  SKEWTOR_STATUS_PANIC = 8,
} SkewtorStatus;

/*
 A built catalog entry.
 */
typedef struct SkewtorCatalogEntry SkewtorCatalogEntry;

/*
 A reductive homogeneous model.
 */
typedef struct SkewtorModel SkewtorModel;

/*
 A multivector (homogeneous exterior form).
 */
typedef struct SkewtorMultivector SkewtorMultivector;

/*
 Tolerances; pass NULL wherever one is accepted to use the defaults.
 */
typedef struct SkewtorTolerance {
  double eps_coeff;
  double eps_rank;
} SkewtorTolerance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string. Do not free.
 */
const char *skewtor_version(void);

/*
 Message for the last failed call on this thread, or NULL. The caller owns
 the returned string.

 # Safety
 Free the result with `skewtor_string_free`.
 */
char *skewtor_last_error(void);

/*
 # Safety
 `s` must be NULL or a string returned by this library that has not been freed yet.
 */
void skewtor_string_free(char *s);

/*
 Parses multivector JSON (`{"dim": n, "terms": [{"idx": [..], "c": x}]}`).

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SkewtorStatus skewtor_multivector_from_json(const char *json, struct SkewtorMultivector **out);

/*
 # Safety
 `m` must be NULL or a live handle; it is invalid afterwards.
 */
void skewtor_multivector_free(struct SkewtorMultivector *m);

/*
 Ambient dimension, or 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t skewtor_multivector_dim(const struct SkewtorMultivector *m);

/*
 Degree of the form; -1 for NULL, the zero form or mixed degrees.

 # Safety
 `m` must be NULL or a live handle.
 */
int skewtor_multivector_grade(const struct SkewtorMultivector *m);

/*
 # Safety
 `m` must be a live handle; `out` must be writable. Free the string with `skewtor_string_free`.
 */
enum SkewtorStatus skewtor_multivector_to_json(const struct SkewtorMultivector *m, char **out);

/*
 The 4-form σ_T of a 3-form.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum SkewtorStatus skewtor_sigma_t(const struct SkewtorMultivector *t,
                                   struct SkewtorMultivector **out);

/*
 Classification report of a 3-form, as JSON.

 # Safety
 `t` must be a live handle, `tol` NULL or valid, `out` writable.
 */
enum SkewtorStatus skewtor_classify_json(const struct SkewtorMultivector *t,
                                         const struct SkewtorTolerance *tol,
                                         char **out);

/*
 Clifford form of the first Bianchi identity: is T² + R a scalar?
 `curvature_json` is `{"basis": "lex-eij", "matrix": [[..]]}`.

 # Safety
 `t` must be a live handle, `curvature_json` a NUL-terminated string,
 `tol` NULL or valid, `is_scalar` and `residual` writable (`residual` may be NULL).
 */
enum SkewtorStatus skewtor_bianchi_clifford(const struct SkewtorMultivector *t,
                                            const char *curvature_json,
                                            const struct SkewtorTolerance *tol,
                                            int *is_scalar,
                                            double *residual);

/*
 Builds a catalog family. `params_json` is NULL or an object of numbers,
 e.g. `{"gamma": 0.75}`.

 # Safety
 `name` must be a NUL-terminated string, `params_json` NULL or one,
 `tol` NULL or valid, `out` writable.
 */
enum SkewtorStatus skewtor_catalog_build(const char *name,
                                         const char *params_json,
                                         const struct SkewtorTolerance *tol,
                                         struct SkewtorCatalogEntry **out);

/*
 # Safety
 `e` must be NULL or a live handle; it is invalid afterwards.
 */
void skewtor_catalog_entry_free(struct SkewtorCatalogEntry *e);

/*
 1 if every structural and expected-value check passed, 0 if not, -1 for NULL.

 # Safety
 `e` must be NULL or a live handle.
 */
int skewtor_catalog_entry_passed(const struct SkewtorCatalogEntry *e);

/*
 Full entry (parameters, torsion, curvature, model, checks) as JSON.

 # Safety
 `e` must be a live handle; `out` writable.
 */
enum SkewtorStatus skewtor_catalog_entry_to_json(const struct SkewtorCatalogEntry *e, char **out);

/*
 Torsion form of the entry as a new handle.

 # Safety
 `e` must be a live handle; `out` writable.
 */
enum SkewtorStatus skewtor_catalog_entry_torsion(const struct SkewtorCatalogEntry *e,
                                                 struct SkewtorMultivector **out);

/*
 Homogeneous model of the entry as a new handle. Fails with `Failed` when
 the family has no model attached.

 # Safety
 `e` must be a live handle; `out` writable.
 */
enum SkewtorStatus skewtor_catalog_entry_model(const struct SkewtorCatalogEntry *e,
                                               struct SkewtorModel **out);

/*
 Parses model JSON (the `model` object of a catalog entry).

 # Safety
 `json` must be a NUL-terminated string, `tol` NULL or valid, `out` writable.
 */
enum SkewtorStatus skewtor_model_from_json(const char *json,
                                           const struct SkewtorTolerance *tol,
                                           struct SkewtorModel **out);

/*
 # Safety
 `m` must be NULL or a live handle; it is invalid afterwards.
 */
void skewtor_model_free(struct SkewtorModel *m);

/*
 # Safety
 `m` must be a live handle; `out` writable.
 */
enum SkewtorStatus skewtor_model_to_json(const struct SkewtorModel *m, char **out);

/*
 Runs the model checks. Writes 1/0 to `passed` and, if `report` is not
 NULL, the per-check JSON array.

 # Safety
 `m` must be a live handle, `tol` NULL or valid, `passed` writable,
 `report` NULL or writable.
 */
enum SkewtorStatus skewtor_model_verify(const struct SkewtorModel *m,
                                        const struct SkewtorTolerance *tol,
                                        int *passed,
                                        char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKEWTOR_H */
