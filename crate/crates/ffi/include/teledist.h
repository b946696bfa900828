#ifndef TELEDIST_H
#define TELEDIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_NULL_POINTER = 1,
  TD_STATUS_INVALID_UTF8 = 2,
  TD_STATUS_PARSE = 3,
  TD_STATUS_INVALID_ARGUMENT = 4,
  TD_STATUS_NETWORK = 5,
  TD_STATUS_SOLVER = 6,
  TD_STATUS_SEARCH = 7,
  TD_STATUS_ALLOY = 8,
  TD_STATUS_PANIC = 9,
} TdStatus;

typedef enum TdStrategy {
  TD_STRATEGY_LINEAR = 0,
  TD_STRATEGY_BINARY = 1,
  TD_STRATEGY_HISTORY = 2,
} TdStrategy;

typedef struct TdCircuit TdCircuit;

typedef struct TdNetwork TdNetwork;

typedef struct TdSolution TdSolution;

/**
 * Solve options. Start from [`td_options_default`].
 */
typedef struct TdOptions {
  /**
   * Layers per subproblem, at least 1.
   */
  size_t window_size;
  enum TdStrategy strategy;
  /**
   * History length for [`TdStrategy::History`], at least 1.
   */
  size_t history_length;
  bool balance;
  /**
   * Minimize weighted teleport cost; needs a cost matrix on the network.
   */
  bool weighted_cost;
  bool prefer_swaps;
  /**
   * Seed for the embedded solver's branching perturbation; 0 is unperturbed.
   */
  uint64_t solver_seed;
  /**
   * Milliseconds allowed per SAT call; 0 means unlimited.
   */
  uint64_t time_limit_ms;
} TdOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *td_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void td_string_free(char *s);

/**
 * Parses `.tfc` text, drops single-qubit gates and packs the rest into layers.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` valid for one write.
 */
enum TdStatus td_circuit_from_tfc(const char *text, struct TdCircuit **out);

/**
 * Parses a layer listing (`qubits N` then `layer i: (q1,q2)...` lines).
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` valid for one write.
 */
enum TdStatus td_circuit_from_layers(const char *text, struct TdCircuit **out);

/**
 * Qubit count, or 0 for null.
 *
 * # Safety
 * `circuit` must be null or a live handle.
 */
size_t td_circuit_qubit_count(const struct TdCircuit *circuit);

/**
 * Layer count, or 0 for null.
 *
 * # Safety
 * `circuit` must be null or a live handle.
 */
size_t td_circuit_layer_count(const struct TdCircuit *circuit);

/**
 * # Safety
 * `circuit` must be null or a handle not yet freed.
 */
void td_circuit_free(struct TdCircuit *circuit);

/**
 * Network of `machines` machines with the given capacities.
 *
 * # Safety
 * `capacities` must hold `machines` values and `out` be valid for one write.
 */
enum TdStatus td_network_new(const size_t *capacities, size_t machines, struct TdNetwork **out);

/**
 * Attaches a row-major `k x k` teleport cost matrix, row = source machine.
 *
 * # Safety
 * `network` must be a live handle and `costs` hold `k * k` values.
 */
enum TdStatus td_network_set_costs(struct TdNetwork *network, const uint32_t *costs);

/**
 * # Safety
 * `network` must be null or a handle not yet freed.
 */
void td_network_free(struct TdNetwork *network);

/**
 * History-seeded binary search over windows of 10 layers, swap preference
 * on, no time limit.
 */
struct TdOptions td_options_default(void);

/**
 * Distributes the circuit's qubits over the network with minimum teleports.
 * `initial` holds one 0-based machine per qubit; null means in-order
 * filling. `options` may be null for the defaults.
 *
 * # Safety
 * Handles must be live, `initial` null or `qubit_count` long, `options`
 * null or valid, and `out` valid for one write.
 */
enum TdStatus td_solve(const struct TdCircuit *circuit,
                       const struct TdNetwork *network,
                       const size_t *initial,
                       const struct TdOptions *options,
                       struct TdSolution **out);

/**
 * Total teleports, or 0 for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t td_solution_teleports(const struct TdSolution *solution);

/**
 * Pairwise exchanges among the teleports, or 0 for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t td_solution_swaps(const struct TdSolution *solution);

/**
 * Teleports with each exchange counted once, or 0 for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t td_solution_adjusted_teleports(const struct TdSolution *solution);

/**
 * Number of placement states: layers plus one.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t td_solution_state_count(const struct TdSolution *solution);

/**
 * Machine of `qubit` in `state`; state 0 is the initial placement.
 *
 * # Safety
 * `solution` must be a live handle and `machine` valid for one write.
 */
enum TdStatus td_solution_machine(const struct TdSolution *solution,
                                  size_t state,
                                  size_t qubit,
                                  size_t *machine);

/**
 * Solution as JSON. Free the string with [`td_string_free`].
 *
 * # Safety
 * `solution` must be a live handle and `out` valid for one write.
 */
enum TdStatus td_solution_to_json(const struct TdSolution *solution, char **out);

/**
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void td_solution_free(struct TdSolution *solution);

/**
 * Alloy model of the whole circuit with teleport bound `teleports`.
 * Negative `vacancies`/`cost` leave that objective out; a cost bound needs a
 * cost matrix on the network. Free the string with [`td_string_free`].
 *
 * # Safety
 * Handles must be live, `initial` null or `qubit_count` long, and `out`
 * valid for one write.
 */
enum TdStatus td_alloy_model(const struct TdCircuit *circuit,
                             const struct TdNetwork *network,
                             const size_t *initial,
                             uint32_t teleports,
                             int64_t vacancies,
                             int64_t cost,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELEDIST_H */
