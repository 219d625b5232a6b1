/* C interface to the dary-cuckoo hash table. */

#ifndef DARY_CUCKOO_H
#define DARY_CUCKOO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  // The insertion walk hit its reassignment budget; the element in hand
  // was dropped and the table keeps the partially rearranged state.
  DC_STATUS_STEP_LIMIT = 1,
  DC_STATUS_DUPLICATE = 2,
  DC_STATUS_NOT_FOUND = 3,
  DC_STATUS_INVALID_ARGUMENT = 4,
  DC_STATUS_NULL_POINTER = 5,
} DcStatus;

// Insertion strategies, mirroring the core crate.
typedef enum DcStrategyKind {
  DC_STRATEGY_KIND_RANDOM_WALK = 0,
  DC_STRATEGY_KIND_RANDOM_WALK_NON_BACKTRACKING = 1,
  DC_STRATEGY_KIND_BFS = 2,
} DcStrategyKind;

// Opaque strategy handle carrying the walk's random stream.
typedef struct DcStrategy DcStrategy;

// Opaque table handle.
typedef struct DcTable DcTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a table with `slots` slots, `d` hash functions per element, and
// a seeded hash family. Writes the handle to `out`.
//
// # Safety
// `out` must be a valid pointer to a `DcTable*`.
enum DcStatus dc_table_new(size_t slots, uint32_t d, uint64_t seed, struct DcTable **out);

// Release a table handle. Null is a no-op.
//
// # Safety
// `table` must have come from `dc_table_new` and not been freed before.
void dc_table_free(struct DcTable *table);

// Create an insertion strategy. The seed fixes the walk's random stream;
// BFS ignores it.
//
// # Safety
// `out` must be a valid pointer to a `DcStrategy*`.
enum DcStatus dc_strategy_new(enum DcStrategyKind kind, uint64_t seed, struct DcStrategy **out);

// Release a strategy handle. Null is a no-op.
//
// # Safety
// `strategy` must have come from `dc_strategy_new` and not been freed
// before.
void dc_strategy_free(struct DcStrategy *strategy);

// Insert `element`, running the strategy's walk with at most `max_steps`
// reassignments. On success or step-limit, the number of reassignments
// performed is written to `reassignments_out` when it is non-null.
//
// Returns `DC_STATUS_STEP_LIMIT` when the walk was cut off; the element
// is not stored but the table keeps the rearrangement that happened on
// the way.
//
// # Safety
// `table` and `strategy` must be live handles from this library.
enum DcStatus dc_table_insert(struct DcTable *table,
                              struct DcStrategy *strategy,
                              uint64_t element,
                              size_t max_steps,
                              size_t *reassignments_out);

// True when `element` is stored.
//
// # Safety
// `table` must be a live handle or null.
bool dc_table_contains(const struct DcTable *table, uint64_t element);

// Look up the slot holding `element` and write it to `slot_out`.
//
// # Safety
// `table` must be a live handle or null; `slot_out` may be null.
enum DcStatus dc_table_slot_of(const struct DcTable *table, uint64_t element, size_t *slot_out);

// Remove `element`; true when it was present.
//
// # Safety
// `table` must be a live handle or null.
bool dc_table_delete(struct DcTable *table, uint64_t element);

// Number of stored elements; 0 for a null handle.
//
// # Safety
// `table` must be a live handle or null.
size_t dc_table_occupancy(const struct DcTable *table);

// Number of slots; 0 for a null handle.
//
// # Safety
// `table` must be a live handle or null.
size_t dc_table_capacity(const struct DcTable *table);

// Hash functions per element; 0 for a null handle.
//
// # Safety
// `table` must be a live handle or null.
uint32_t dc_table_arity(const struct DcTable *table);

// The default reassignment budget for a table of `slots` slots,
// `50 * log2(slots)^2`.
size_t dc_default_max_steps(size_t slots);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DARY_CUCKOO_H */
