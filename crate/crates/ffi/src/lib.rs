//! C ABI over the core table.
//!
//! Handles are opaque pointers owned by the caller: everything returned by
//! a `_new` function must be released with the matching `_free`. All
//! functions are safe to call with null handles and report
//! `DC_STATUS_NULL_POINTER` instead of crashing; value getters on a null
//! table return zero. No function panics across the boundary.
//!
//! The generated header lives at `include/dary_cuckoo.h` and is refreshed
//! by the build script.

use dary_cuckoo::{
    table::default_max_steps, CuckooTable, Error, InsertOutcome, InsertionStrategy, StrategyKind,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    /// The insertion walk hit its reassignment budget; the element in hand
    /// was dropped and the table keeps the partially rearranged state.
    StepLimit = 1,
    Duplicate = 2,
    NotFound = 3,
    InvalidArgument = 4,
    NullPointer = 5,
}

/// Insertion strategies, mirroring the core crate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStrategyKind {
    RandomWalk = 0,
    RandomWalkNonBacktracking = 1,
    Bfs = 2,
}

/// Opaque table handle.
pub struct DcTable {
    inner: CuckooTable,
}

/// Opaque strategy handle carrying the walk's random stream.
pub struct DcStrategy {
    inner: InsertionStrategy,
}

fn status_of(err: &Error) -> DcStatus {
    match err {
        Error::DuplicateElement(_) => DcStatus::Duplicate,
        _ => DcStatus::InvalidArgument,
    }
}

/// Create a table with `slots` slots, `d` hash functions per element, and
/// a seeded hash family. Writes the handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer to a `DcTable*`.
#[no_mangle]
pub unsafe extern "C" fn dc_table_new(
    slots: usize,
    d: u32,
    seed: u64,
    out: *mut *mut DcTable,
) -> DcStatus {
    if out.is_null() {
        return DcStatus::NullPointer;
    }
    match CuckooTable::new(slots, d, seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(DcTable { inner }));
            DcStatus::Ok
        }
        Err(e) => {
            *out = std::ptr::null_mut();
            status_of(&e)
        }
    }
}

/// Release a table handle. Null is a no-op.
///
/// # Safety
/// `table` must have come from `dc_table_new` and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn dc_table_free(table: *mut DcTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Create an insertion strategy. The seed fixes the walk's random stream;
/// BFS ignores it.
///
/// # Safety
/// `out` must be a valid pointer to a `DcStrategy*`.
#[no_mangle]
pub unsafe extern "C" fn dc_strategy_new(
    kind: DcStrategyKind,
    seed: u64,
    out: *mut *mut DcStrategy,
) -> DcStatus {
    if out.is_null() {
        return DcStatus::NullPointer;
    }
    let kind = match kind {
        DcStrategyKind::RandomWalk => StrategyKind::RandomWalkBacktracking,
        DcStrategyKind::RandomWalkNonBacktracking => StrategyKind::RandomWalkNonBacktracking,
        DcStrategyKind::Bfs => StrategyKind::BfsShortestPath,
    };
    *out = Box::into_raw(Box::new(DcStrategy {
        inner: InsertionStrategy::new(kind, seed),
    }));
    DcStatus::Ok
}

/// Release a strategy handle. Null is a no-op.
///
/// # Safety
/// `strategy` must have come from `dc_strategy_new` and not been freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn dc_strategy_free(strategy: *mut DcStrategy) {
    if !strategy.is_null() {
        drop(Box::from_raw(strategy));
    }
}

/// Insert `element`, running the strategy's walk with at most `max_steps`
/// reassignments. On success or step-limit, the number of reassignments
/// performed is written to `reassignments_out` when it is non-null.
///
/// Returns `DC_STATUS_STEP_LIMIT` when the walk was cut off; the element
/// is not stored but the table keeps the rearrangement that happened on
/// the way.
///
/// # Safety
/// `table` and `strategy` must be live handles from this library.
#[no_mangle]
pub unsafe extern "C" fn dc_table_insert(
    table: *mut DcTable,
    strategy: *mut DcStrategy,
    element: u64,
    max_steps: usize,
    reassignments_out: *mut usize,
) -> DcStatus {
    let (Some(table), Some(strategy)) = (table.as_mut(), strategy.as_mut()) else {
        return DcStatus::NullPointer;
    };
    match table.inner.insert(element, &mut strategy.inner, max_steps) {
        Ok(trace) => {
            if !reassignments_out.is_null() {
                *reassignments_out = trace.reassignments;
            }
            match trace.outcome {
                InsertOutcome::Success => DcStatus::Ok,
                InsertOutcome::StepLimitExceeded => DcStatus::StepLimit,
            }
        }
        Err(e) => status_of(&e),
    }
}

/// True when `element` is stored.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_contains(table: *const DcTable, element: u64) -> bool {
    table.as_ref().is_some_and(|t| t.inner.lookup(element).is_some())
}

/// Look up the slot holding `element` and write it to `slot_out`.
///
/// # Safety
/// `table` must be a live handle or null; `slot_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_slot_of(
    table: *const DcTable,
    element: u64,
    slot_out: *mut usize,
) -> DcStatus {
    let Some(table) = table.as_ref() else {
        return DcStatus::NullPointer;
    };
    match table.inner.lookup(element) {
        Some(slot) => {
            if !slot_out.is_null() {
                *slot_out = slot;
            }
            DcStatus::Ok
        }
        None => DcStatus::NotFound,
    }
}

/// Remove `element`; true when it was present.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_delete(table: *mut DcTable, element: u64) -> bool {
    table.as_mut().is_some_and(|t| t.inner.delete(element))
}

/// Number of stored elements; 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_occupancy(table: *const DcTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.occupancy())
}

/// Number of slots; 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_capacity(table: *const DcTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.capacity())
}

/// Hash functions per element; 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dc_table_arity(table: *const DcTable) -> u32 {
    table.as_ref().map_or(0, |t| t.inner.arity())
}

/// The default reassignment budget for a table of `slots` slots,
/// `50 * log2(slots)^2`.
#[no_mangle]
pub extern "C" fn dc_default_max_steps(slots: usize) -> usize {
    default_max_steps(slots)
}
