#ifndef HYPERMOTIF_H
#define HYPERMOTIF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Number of triad classes written by [`hm_graph_triad_census`].
#define HM_TRIAD_CLASSES 16

// Result of every fallible call.
typedef enum HmStatus {
  HM_STATUS_OK = 0,
  // A required pointer argument was null.
  HM_STATUS_NULL_POINTER = 1,
  // Bad argument value, unknown name or non-UTF-8 string.
  HM_STATUS_INVALID_ARGUMENT = 2,
  // Unreadable or malformed input data.
  HM_STATUS_DATA_ERROR = 3,
  // Numerical failure such as a diverging integration.
  HM_STATUS_NUMERIC_ERROR = 4,
  // The library panicked; this is a bug.
  HM_STATUS_PANIC = 5,
} HmStatus;

// Hill-kinetics circuit model.
typedef struct HmCircuit HmCircuit;

// Directed network.
typedef struct HmGraph HmGraph;

// Integrated time course.
typedef struct HmTrajectory HmTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hm_version(void);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next library call on the same thread.
const char *hm_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void hm_string_free(char *s);

// Loads a whitespace-separated edge list from `path`.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum HmStatus hm_graph_load(const char *path, bool allow_self_loops, struct HmGraph **out);

// Parses edge-list text held in memory.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum HmStatus hm_graph_parse(const char *text, bool allow_self_loops, struct HmGraph **out);

// Builds a graph on nodes `0..node_count` from `edge_count` index pairs.
//
// # Safety
// `sources` and `targets` must each point to `edge_count` readable values.
enum HmStatus hm_graph_from_edges(size_t node_count,
                                  const uint32_t *sources,
                                  const uint32_t *targets,
                                  size_t edge_count,
                                  struct HmGraph **out);

// # Safety
// `graph` must be null or a live handle from this library.
void hm_graph_free(struct HmGraph *graph);

// Node count, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t hm_graph_node_count(const struct HmGraph *graph);

// Edge count, self-loops included, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t hm_graph_edge_count(const struct HmGraph *graph);

// Writes the 16 triad class counts, labeled by [`hm_triad_class_name`],
// and the self-loop count.
//
// # Safety
// `counts` must hold [`HM_TRIAD_CLASSES`] values; `self_loops` may be null.
enum HmStatus hm_graph_triad_census(const struct HmGraph *graph,
                                    uint64_t *counts,
                                    uint64_t *self_loops);

// MAN label of triad class `index` (0..16), in the order used by
// [`hm_graph_triad_census`], as a static string; null when out of range.
const char *hm_triad_class_name(size_t index);

// Runs the full detection pipeline and returns the report as JSON.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum HmStatus hm_detect_json(const struct HmGraph *graph,
                             size_t ensemble_size,
                             double alpha,
                             uint64_t seed,
                             char **out);

// Number of core topologies joining motifs `a` and `b` by shared nodes.
//
// # Safety
// `a` and `b` must be NUL-terminated motif names; `count` must be writable.
enum HmStatus hm_combination_count(const char *a, const char *b, size_t *count);

// Core topologies joining `a` and `b`, as a JSON array.
//
// # Safety
// `a` and `b` must be NUL-terminated motif names; `out` must be writable.
enum HmStatus hm_combinations_json(const char *a, const char *b, char **out);

// Number of labeled ways to link node-disjoint motifs of sizes `size_a` and
// `size_b`, as a decimal string (the value exceeds 64 bits for large sizes).
//
// # Safety
// `out` must be writable.
enum HmStatus hm_interaction_count(size_t size_a, size_t size_b, bool directed, char **out);

// Circuit from the built-in catalog, such as `"M4-5"`.
//
// # Safety
// `id` must be a NUL-terminated string; `out` must be writable.
enum HmStatus hm_circuit_from_catalog(const char *id, struct HmCircuit **out);

// Circuit from a JSON topology
// `{"variables": [...], "edges": [{"from", "to", "sign", "n", "k"}], "constants": {...}}`.
//
// # Safety
// `topology_json` must be a NUL-terminated string; `out` must be writable.
enum HmStatus hm_circuit_from_json(const char *topology_json, struct HmCircuit **out);

// # Safety
// `circuit` must be null or a live handle.
void hm_circuit_free(struct HmCircuit *circuit);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `circuit` must be null or a live handle.
size_t hm_circuit_dim(const struct HmCircuit *circuit);

// Sets a Hill parameter such as `"k_xy"` (edge X to Y) or `"n_xx"`.
//
// # Safety
// `circuit` must be a live handle; `name` a NUL-terminated string.
enum HmStatus hm_circuit_set_parameter(struct HmCircuit *circuit, const char *name, double value);

// Evaluates the right-hand side at `state`, writing `dim` derivatives.
//
// # Safety
// `state` and `derivative` must each hold `dim` values.
enum HmStatus hm_circuit_rhs(const struct HmCircuit *circuit,
                             const double *state,
                             double *derivative,
                             size_t dim);

// Fixed points with stability labels and eigenvalues, as a JSON array.
//
// # Safety
// `circuit` must be a live handle; `out` must be writable.
enum HmStatus hm_circuit_fixed_points_json(const struct HmCircuit *circuit,
                                           uint64_t seed,
                                           char **out);

// Integrates with fixed-step RK4 from `initial` over `[0, horizon]`.
//
// # Safety
// `circuit` must be a live handle; `initial` must hold `dim` values.
enum HmStatus hm_simulate(const struct HmCircuit *circuit,
                          const double *initial,
                          size_t dim,
                          double horizon,
                          double step,
                          struct HmTrajectory **out);

// # Safety
// `trajectory` must be null or a live handle.
void hm_trajectory_free(struct HmTrajectory *trajectory);

// Number of stored time points (steps + 1), or 0 for a null handle.
//
// # Safety
// `trajectory` must be null or a live handle.
size_t hm_trajectory_len(const struct HmTrajectory *trajectory);

// Copies the state at time point `index` into `state` (`dim` values) and
// its time into `time` when non-null.
//
// # Safety
// `trajectory` must be a live handle; `state` must hold `dim` values.
enum HmStatus hm_trajectory_state(const struct HmTrajectory *trajectory,
                                  size_t index,
                                  double *time,
                                  double *state,
                                  size_t dim);

// Trajectory as CSV with header `t,<variables>`.
//
// # Safety
// `trajectory` must be a live handle; `out` must be writable.
enum HmStatus hm_trajectory_csv(const struct HmTrajectory *trajectory, char **out);

// Steady-state classification of a trajectory with default tolerances, as JSON.
//
// # Safety
// Both handles must be live and `trajectory` must come from `circuit`.
enum HmStatus hm_trajectory_classify_json(const struct HmCircuit *circuit,
                                          const struct HmTrajectory *trajectory,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERMOTIF_H */
