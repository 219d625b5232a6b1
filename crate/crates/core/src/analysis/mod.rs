//! Structural analyses of table snapshots and their incidence graphs.
//!
//! Everything in this module is a pure function of an immutable snapshot:
//! walk-set enumeration ([`walks`]), distance-to-empty classification
//! ([`badsets`]), neighborhood-expansion certificates and growth schedules
//! ([`expansion`]), and exact plus asymptotic surjection counting
//! ([`stirling`]). These are the quantities the insertion-time experiments
//! in [`crate::bench`] are checked against.

pub mod badsets;
pub mod expansion;
pub mod stirling;
pub mod walks;

pub use badsets::{choose_distance_cutoff, compute_bad_sets, distance_profile, BadSetParams, BadSetReport};
pub use expansion::{
    expansion_check, failing_set_scan, growth_schedule, upper_neighbor_check, CutoffRule,
    ExpansionCertificate, ExpansionMode, FailingSetScan, GrowthSchedule, NeighborBoundViolation,
    PsParams, ViolatingSet,
};
pub use stirling::{big_ln, stirling_exact, stirling_moser_wyman, MoserWyman, StirlingOracle};
pub use walks::{
    forward_walk_set, forward_walk_set_with_budget, reverse_walk_set, ForwardWalkSet,
    DEFAULT_WALK_BUDGET,
};
