//! d-ary cuckoo hash tables and the machinery to study them.
//!
//! Every element is given `d` candidate slots by a seeded hash family.
//! Insertion places the element into one of its candidates, evicting the
//! previous occupant if necessary; evicted elements are reinserted the same
//! way, so an insertion traces a walk through the table. The crate provides
//!
//! * [`table::CuckooTable`]: the table itself, with random-walk insertion
//!   (backtracking and non-backtracking) and deterministic shortest-path
//!   (BFS) insertion, all fully reproducible from seeds;
//! * [`graph::BipartiteGraph`]: the element/slot incidence graph, with
//!   maximum matching, Hall-condition witnesses, short-cycle counts, and a
//!   plain-text interchange format;
//! * [`analysis`]: walk-set enumeration, distance-layer ("bad set")
//!   decompositions, neighborhood-expansion certificates, and exact plus
//!   asymptotic surjection counts;
//! * [`bench`]: reproducible experiment runners behind the `cuckoo-bench`
//!   binary, writing deterministic CSV.

pub mod analysis;
pub mod bench;
mod error;
pub mod graph;
pub mod hash;
pub mod table;

pub use error::Error;
pub use hash::HashFamily;
pub use table::{
    CuckooTable, FirstStepRule, InsertOutcome, InsertionStrategy, StrategyKind, WalkStep,
    WalkTrace,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
