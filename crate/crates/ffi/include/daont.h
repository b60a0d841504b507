#ifndef DAONT_H
#define DAONT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DaontStatus {
  DAONT_STATUS_OK = 0,
  DAONT_STATUS_NULL_ARGUMENT = 1,
  DAONT_STATUS_INVALID_UTF8 = 2,
  DAONT_STATUS_PARSE_ERROR = 3,
  DAONT_STATUS_UNKNOWN_GRAPH = 4,
  DAONT_STATUS_UNKNOWN_RULE = 5,
  DAONT_STATUS_UNKNOWN_FIXTURE = 6,
  DAONT_STATUS_UNSUPPORTED_QUERY = 7,
  DAONT_STATUS_EVAL_ERROR = 8,
  DAONT_STATUS_PANIC = 9,
} DaontStatus;

// Opaque session handle.
typedef struct DaontSession DaontSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a session with the built-in rule catalogue.
struct DaontSession *daont_session_new(void);

// # Safety
// `session` must come from `daont_session_new` and not be used afterwards.
void daont_session_free(struct DaontSession *session);

// Registers schema plus `turtle` under `graph_id`. `version_out` may be null.
//
// # Safety
// Pointers must be valid; strings must be NUL-terminated.
enum DaontStatus daont_load_turtle(const struct DaontSession *session,
                                   const char *graph_id,
                                   const char *turtle,
                                   uint64_t *version_out);

// Registers a built-in fixture under its own name.
//
// # Safety
// Pointers must be valid; strings must be NUL-terminated.
enum DaontStatus daont_load_fixture(const struct DaontSession *session,
                                    const char *name,
                                    uint64_t *version_out);

// Runs a check and writes the JSON report to `json_out`. `rules_csv` may be
// null to run every rule.
//
// # Safety
// Pointers must be valid; strings must be NUL-terminated.
enum DaontStatus daont_check(const struct DaontSession *session,
                             const char *graph_id,
                             const char *rules_csv,
                             bool infer,
                             char **json_out);

// Evaluates `query` and writes the solutions as a JSON array.
//
// # Safety
// Pointers must be valid; strings must be NUL-terminated.
enum DaontStatus daont_query(const struct DaontSession *session,
                             const char *graph_id,
                             const char *query,
                             char **json_out);

// Adds (or, when `remove` is true, removes) the triples of a Turtle
// fragment. The graph's prefixes are in scope.
//
// # Safety
// Pointers must be valid; strings must be NUL-terminated.
enum DaontStatus daont_apply_facts(const struct DaontSession *session,
                                   const char *graph_id,
                                   const char *turtle,
                                   bool remove,
                                   uint64_t *version_out);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call on the same thread.
const char *daont_last_error_message(void);

// # Safety
// `s` must come from this library, or be null.
void daont_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *daont_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAONT_H */
