#ifndef LESSONSGRAPH_H
#define LESSONSGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum LgStatus {
  LG_STATUS_OK = 0,
  LG_STATUS_NULL_ARGUMENT = 1,
  LG_STATUS_INVALID_UTF8 = 2,
  LG_STATUS_IO = 3,
  LG_STATUS_CORRUPT_GRAPH = 4,
  LG_STATUS_SCHEMA_VERSION = 5,
  LG_STATUS_EMPTY_QUERY = 6,
  LG_STATUS_UNKNOWN_ELEMENT = 7,
  LG_STATUS_INVALID_CONFIG = 8,
  LG_STATUS_INTERNAL = 9,
} LgStatus;

/**
 * Opaque handle to a loaded, immutable graph. Safe to share across threads
 * for concurrent reads.
 */
typedef struct LgGraph LgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a graph file written by `lessonsgraph build`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable. On success
 * `*out` holds a handle to release with [`lg_graph_free`].
 */
enum LgStatus lg_graph_load(const char *path, struct LgGraph **out);

/**
 * # Safety
 * `graph` must come from [`lg_graph_load`] and not have been freed. Null is
 * ignored.
 */
void lg_graph_free(struct LgGraph *graph);

/**
 * Number of nodes in the graph, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t lg_graph_node_count(const struct LgGraph *graph);

/**
 * Ranked failure cases for `query` as `{"results":[...]}` JSON.
 *
 * # Safety
 * `graph` must be a live handle, `query` NUL-terminated, `out` writable.
 * Release `*out` with [`lg_string_free`].
 */
enum LgStatus lg_search_json(const struct LgGraph *graph,
                             const char *query,
                             uint32_t depth,
                             uint32_t limit,
                             char **out);

/**
 * Failure cases related to project element `element_id`, same JSON shape
 * as [`lg_search_json`].
 *
 * # Safety
 * As for [`lg_search_json`].
 */
enum LgStatus lg_recommend_json(const struct LgGraph *graph,
                                const char *element_id,
                                uint32_t depth,
                                uint32_t limit,
                                char **out);

/**
 * Node and relation counts as JSON.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable. Release `*out` with
 * [`lg_string_free`].
 */
enum LgStatus lg_stats_json(const struct LgGraph *graph, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed only once.
 */
void lg_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library on this
 * thread.
 */
const char *lg_last_error_message(void);

/**
 * Library version, statically allocated.
 */
const char *lg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LESSONSGRAPH_H */
