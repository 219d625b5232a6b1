//! Static walk-set enumeration against a fixed table snapshot.
//!
//! A walk of length `i` from element `x` is a sequence of `i` displacement
//! steps: the element in hand picks one of its hash indices, and the
//! occupant of that slot becomes the new element in hand. The first step
//! may use any of the `d` indices; every later step excludes the index
//! under which the just-displaced occupant was stored, leaving `d - 1`
//! choices. Nothing is mutated: every step is resolved against the same
//! snapshot, so these sets describe what a live walk could do from here,
//! not what it does.
//!
//! A step that lands on a free slot ends the walk early. To keep the level
//! populations comparable, such a walk is padded with dummy continuations:
//! a walk finishing at step `j` stands in for `(d-1)^(i-j)` phantom
//! descendants at level `i`. Dummies are pure counts; they never get ids.
//! With that padding, level `i` always carries weight `d * (d-1)^(i-1)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::table::CuckooTable;
use crate::{Error, Result};

/// Default cap on enumerated walks per call, `d * (d-1)^(i-1)` counted
/// with multiplicity.
pub const DEFAULT_WALK_BUDGET: u64 = 10_000_000;

/// All length-`depth` walks from one source element, split into real
/// endpoints and dummy weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardWalkSet {
    pub source: u64,
    pub depth: u32,
    /// Endpoint element -> number of walks arriving there at exactly
    /// `depth` displacements.
    pub real_endpoints: BTreeMap<u64, u64>,
    /// Weighted count of walks that ended on a free slot at some level
    /// `j <= depth`, each contributing `(d-1)^(depth-j)`.
    pub dummy_count: u64,
}

impl ForwardWalkSet {
    /// Number of walks that survive to `depth` displacements.
    pub fn real_walks(&self) -> u64 {
        self.real_endpoints.values().sum()
    }

    /// Number of distinct endpoint elements.
    pub fn distinct_endpoints(&self) -> usize {
        self.real_endpoints.len()
    }

    /// Real walks plus dummy weight; always `d * (d-1)^(depth-1)`.
    pub fn total(&self) -> u64 {
        self.real_walks() + self.dummy_count
    }

    /// Distinct real endpoints lying in `set`, the quantity the
    /// distance-class predicate thresholds.
    pub fn distinct_endpoints_in(&self, set: &BTreeSet<u64>) -> usize {
        self.real_endpoints
            .keys()
            .filter(|x| set.contains(x))
            .count()
    }
}

/// Enumerates every length-`depth` walk from `x` under the default budget.
pub fn forward_walk_set(table: &CuckooTable, x: u64, depth: u32) -> Result<ForwardWalkSet> {
    forward_walk_set_with_budget(table, x, depth, DEFAULT_WALK_BUDGET)
}

/// As [`forward_walk_set`] with an explicit budget on the weighted walk
/// count `d * (d-1)^(depth-1)`.
pub fn forward_walk_set_with_budget(
    table: &CuckooTable,
    x: u64,
    depth: u32,
    budget: u64,
) -> Result<ForwardWalkSet> {
    if depth == 0 {
        return Err(Error::Config("walk depth must be at least 1".to_string()));
    }
    let d = table.arity() as u64;
    let mut tree = d;
    for _ in 1..depth {
        tree = tree.saturating_mul(d - 1);
    }
    if tree > budget {
        return Err(Error::BudgetExceeded { budget });
    }

    // pow[t] = (d-1)^t, the dummy weight of a walk ending t levels early.
    let mut pow = vec![1u64; depth as usize];
    for t in 1..depth as usize {
        pow[t] = pow[t - 1] * (d - 1);
    }

    let mut set = ForwardWalkSet {
        source: x,
        depth,
        real_endpoints: BTreeMap::new(),
        dummy_count: 0,
    };
    descend(table, x, None, 1, depth, &pow, &mut set);
    Ok(set)
}

/// Expands one walk level: element `e` in hand at step `level`, with
/// `ban` the index excluded by the previous displacement.
fn descend(
    table: &CuckooTable,
    e: u64,
    ban: Option<u32>,
    level: u32,
    depth: u32,
    pow: &[u64],
    set: &mut ForwardWalkSet,
) {
    let family = table.family();
    for k in 1..=table.arity() {
        if ban == Some(k) {
            continue;
        }
        let y = family.eval(e, k);
        match table.occupant(y) {
            None => {
                set.dummy_count += pow[(depth - level) as usize];
            }
            Some(w) => {
                if level == depth {
                    *set.real_endpoints.entry(w).or_insert(0) += 1;
                } else {
                    let stored = table
                        .stored_hash_index(w)
                        .expect("occupant must be stored");
                    descend(table, w, Some(stored), level + 1, depth, pow, set);
                }
            }
        }
    }
}

/// Elements that can reach some member of `targets` within at most `j`
/// displacement steps, i.e. elements whose walk sets up to depth `j` touch
/// `targets`.
///
/// The universe is the stored elements together with `targets` itself
/// (`j = 0` returns `targets` verbatim). Computed by one reverse
/// breadth-first sweep: a stored element `w` steps to `t` when `t`
/// occupies a slot `w` hashes to under an index other than `w`'s own
/// stored index; the first step of a walk is unrestricted, which the
/// final expansion accounts for.
pub fn reverse_walk_set(table: &CuckooTable, targets: &BTreeSet<u64>, j: usize) -> BTreeSet<u64> {
    let mut result: BTreeSet<u64> = targets.clone();
    if j == 0 {
        return result;
    }

    // Continuation preimages: slot -> stored elements that may displace
    // its occupant mid-walk (any index except their own stored one).
    let family = table.family();
    let mut continuation: HashMap<usize, Vec<u64>> = HashMap::new();
    for (w, slot) in table.stored_elements() {
        let stored = table
            .stored_hash_index(w)
            .expect("stored element has an index");
        for k in 1..=table.arity() {
            if k == stored {
                continue;
            }
            let y = family.eval(w, k);
            if y != slot && !table.is_free(y) {
                continuation.entry(y).or_default().push(w);
            }
        }
    }

    // Layered sweep to depth j-1: `reached` holds every stored element
    // with a continuation path of at most j-1 steps into `targets`.
    let mut reached: BTreeSet<u64> = targets
        .iter()
        .copied()
        .filter(|&t| table.position_of(t).is_some())
        .collect();
    let mut frontier: VecDeque<(u64, usize)> =
        reached.iter().map(|&t| (t, 0)).collect();
    while let Some((t, dist)) = frontier.pop_front() {
        if dist == j - 1 {
            continue;
        }
        let slot = table.position_of(t).expect("reached elements are stored");
        if let Some(pre) = continuation.get(&slot) {
            for &w in pre {
                if reached.insert(w) {
                    frontier.push_back((w, dist + 1));
                }
            }
        }
    }

    // Unrestricted first step: any element, stored or not, whose candidate
    // slots hold a member of `reached` starts a walk of length <= j into
    // `targets`. Stored sources appear here too, since `reached` walks are
    // also legal with a free first choice.
    for (w, _) in table.stored_elements() {
        if result.contains(&w) {
            continue;
        }
        for y in family.slots(w) {
            if let Some(occ) = table.occupant(y) {
                if reached.contains(&occ) {
                    result.insert(w);
                    break;
                }
            }
        }
    }
    result
}
