/* C interface to the defectflow dipole-removal library. */

#pragma once

/* Generated by cbindgen from defectflow-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a call, mirroring the command-line exit codes.
 */
typedef enum DfStatus {
  /**
   * The call succeeded.
   */
  DF_STATUS_OK = 0,
  /**
   * A documented hypothesis or precondition refused the input.
   */
  DF_STATUS_REFUSED = 2,
  /**
   * Malformed input or an internal inconsistency.
   */
  DF_STATUS_INVALID = 3,
} DfStatus;

/**
 * An opaque parsed document (lattice, values, report, ... as fields).
 */
typedef struct DfDocument DfDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *df_version(void);

/**
 * Message for the most recent failure on this thread, or NULL when the
 * last call succeeded.  The pointer stays valid until this thread's next
 * call into the library; do not free it.
 */
const char *df_last_error(void);

/**
 * Parse a JSON document.  Returns NULL on failure (see
 * [`df_last_error`]); release the handle with [`df_document_free`].
 *
 * # Safety
 *
 * `json` must point to a NUL-terminated string that remains valid for the
 * duration of the call.
 */
struct DfDocument *df_document_parse(const char *json);

/**
 * Serialize a document back to pretty-printed JSON.  Returns NULL on
 * failure; release the string with [`df_string_free`].
 *
 * # Safety
 *
 * `doc` must be a handle from this library that has not been freed.
 */
char *df_document_to_json(const struct DfDocument *doc);

/**
 * Release a document handle.  NULL is ignored.
 *
 * # Safety
 *
 * `doc` must be NULL or a handle from this library that has not already
 * been freed.
 */
void df_document_free(struct DfDocument *doc);

/**
 * Release a string returned by this library.  NULL is ignored.
 *
 * # Safety
 *
 * `s` must be NULL or a string returned by this library that has not
 * already been freed.
 */
void df_string_free(char *s);

/**
 * Run dipole removal on a document carrying a complex (or lattice) and
 * `"values"`.  Returns a new document with the rebuilt values and a
 * `"report"` field, or NULL on failure; a refused hypothesis leaves the
 * reason in [`df_last_error`].  Release the handle with
 * [`df_document_free`].
 *
 * # Safety
 *
 * `doc` must be a handle from this library that has not been freed.
 */
struct DfDocument *df_pipeline_run(const struct DfDocument *doc, double tolerance);

/**
 * Like [`df_pipeline_run`], but randomizes the placement of the kept
 * charge (winding ±1 only) with the given seed.
 *
 * # Safety
 *
 * `doc` must be a handle from this library that has not been freed.
 */
struct DfDocument *df_pipeline_run_seeded(const struct DfDocument *doc,
                                          double tolerance,
                                          uint64_t seed);

/**
 * Total bond energy of a lattice document under the named profile
 * (`"sd"` or `"xy"`), written to `*out`.
 *
 * # Safety
 *
 * `doc` must be a live handle from this library, `profile` a
 * NUL-terminated string, and `out` a valid pointer.
 */
enum DfStatus df_energy(const struct DfDocument *doc, const char *profile, double *out);

/**
 * Relax a lattice document's values by `sweeps` local sweeps under the
 * named profile, keeping the boundary fixed.  Returns a new document, or
 * NULL on failure.
 *
 * # Safety
 *
 * `doc` must be a live handle from this library and `profile` a
 * NUL-terminated string.
 */
struct DfDocument *df_relax(const struct DfDocument *doc, const char *profile, uint32_t sweeps);

/**
 * Count the charges of a lattice document's values: `*out_total` gets the
 * signed total, `*out_cells` the number of carrying cells.
 *
 * # Safety
 *
 * `doc` must be a live handle from this library; `out_total` and
 * `out_cells` must be valid pointers.
 */
enum DfStatus df_total_charge(const struct DfDocument *doc,
                              int64_t *out_total,
                              uintptr_t *out_cells);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
