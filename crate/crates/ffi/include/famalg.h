#ifndef FAMALG_H
#define FAMALG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FamStatus {
  FAM_STATUS_OK = 0,
  /**
   * The report was produced but at least one verdict failed.
   */
  FAM_STATUS_VERDICT_FAILED = 1,
  /**
   * Malformed JSON, unknown object, missing argument.
   */
  FAM_STATUS_USAGE = 2,
  FAM_STATUS_NULL_POINTER = 3,
  FAM_STATUS_INVALID_UTF8 = 4,
  FAM_STATUS_PANIC = 5,
} FamStatus;

/**
 * Opaque workspace handle.
 */
typedef struct FamWorkspace FamWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a workspace from a JSON document. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FamStatus fam_workspace_from_json(const char *json, struct FamWorkspace **out);

/**
 * Loads a workspace from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FamStatus fam_workspace_from_path(const char *path, struct FamWorkspace **out);

/**
 * Number of named objects in the workspace, or 0 for a null handle.
 *
 * # Safety
 * `ws` must be null or a handle from this library.
 */
size_t fam_workspace_object_count(const struct FamWorkspace *ws);

/**
 * Runs the commands listed in the workspace file. `*report` receives the report JSON
 * for `FAM_STATUS_OK` and `FAM_STATUS_VERDICT_FAILED`, otherwise NULL.
 *
 * # Safety
 * `ws` must be a handle from this library and `report` a valid pointer.
 */
enum FamStatus fam_workspace_run(struct FamWorkspace *ws, char **report);

/**
 * Runs one command, given as a JSON object such as
 * `{"cmd": "validate", "object": "R"}`, or an array of them.
 * Constructed objects stay in the workspace.
 *
 * # Safety
 * `ws` must be a handle from this library, `command` a NUL-terminated string and
 * `report` a valid pointer.
 */
enum FamStatus fam_workspace_run_command(struct FamWorkspace *ws,
                                         const char *command,
                                         char **report);

/**
 * Message for the last failing call on this thread, or NULL. Valid until the next call.
 */
const char *fam_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void fam_string_free(char *s);

/**
 * Frees a workspace handle. NULL is ignored.
 *
 * # Safety
 * `ws` must be null or a handle from this library, freed once.
 */
void fam_workspace_free(struct FamWorkspace *ws);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fam_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAMALG_H */
