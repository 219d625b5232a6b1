//! Distance-to-empty classification of stored elements.
//!
//! Every stored element gets a displacement distance: 0 if one of its
//! candidate slots is free, otherwise 1 + the minimum distance among the
//! occupants of its candidate slots, and infinite when no chain of
//! displacements frees a candidate. `G` collects the elements within a
//! cutoff `M` of a free slot. The level sets `G_i` then collect elements
//! whose depth-`i` walk sets put enough weight on `G` (or on finished
//! walks), and the bad sets `B_i` are what is left over after the first
//! `i` levels. Empirically `|B_i|` shrinks geometrically on healthy
//! instances; the benchmark suite tracks that decay.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::analysis::walks::forward_walk_set;
use crate::table::CuckooTable;
use crate::{Error, Result};

/// Tuning constants for [`compute_bad_sets`].
#[derive(Debug, Clone, PartialEq)]
pub struct BadSetParams {
    /// Slack constant in the level-set threshold; larger admits more.
    pub c0: f64,
    /// Fraction of elements allowed beyond the distance cutoff when the
    /// cutoff is chosen automatically.
    pub alpha: f64,
    /// Deepest walk level to classify.
    pub i_max: usize,
    /// Exponent of the `i^-exponent` factor in the level threshold.
    pub exponent: f64,
}

impl Default for BadSetParams {
    fn default() -> Self {
        BadSetParams {
            c0: 10.0,
            alpha: 0.05,
            i_max: 6,
            exponent: 0.99,
        }
    }
}

/// Output of [`compute_bad_sets`]: the distance core `G`, the level sets,
/// and the shrinking remainder sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BadSetReport {
    pub c0: f64,
    pub alpha: f64,
    pub exponent: f64,
    /// Distance cutoff `M` defining `G`.
    pub cutoff: usize,
    pub i_max: usize,
    /// Number of stored elements classified.
    pub population: usize,
    /// `levels[0]` is `G` itself; `levels[i]` for `i >= 1` holds the
    /// elements whose depth-`i` walk weight into `G`-or-finished meets the
    /// threshold.
    pub levels: Vec<BTreeSet<u64>>,
    /// `bad[i]` = elements in none of `levels[0..=i]`; nested by
    /// construction.
    pub bad: Vec<BTreeSet<u64>>,
    /// `|bad[i]|` per level.
    pub sizes: Vec<usize>,
}

impl BadSetReport {
    /// Key-value lines, fixed key order, one per line.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "population={}", self.population);
        let _ = writeln!(out, "c0={}", self.c0);
        let _ = writeln!(out, "alpha={}", self.alpha);
        let _ = writeln!(out, "exponent={}", self.exponent);
        let _ = writeln!(out, "cutoff={}", self.cutoff);
        let _ = writeln!(out, "i_max={}", self.i_max);
        for (i, level) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "level_size_{i}={}", level.len());
        }
        for (i, size) in self.sizes.iter().enumerate() {
            let _ = writeln!(out, "bad_size_{i}={size}");
        }
        out
    }
}

/// Displacement distance of every stored element, `None` when no chain of
/// moves can free one of its candidate slots. One multi-source sweep from
/// the free slots, `O(n d)`.
pub fn distance_profile(table: &CuckooTable) -> BTreeMap<u64, Option<usize>> {
    let family = table.family();
    // All elements hashing to a slot, stored index or not: these are the
    // elements whose distance may improve through that slot.
    let mut hashes_to: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut dist: BTreeMap<u64, Option<usize>> = BTreeMap::new();
    for (x, _) in table.stored_elements() {
        dist.insert(x, None);
        for y in family.slots(x) {
            hashes_to.entry(y).or_default().push(x);
        }
    }

    let mut queue: VecDeque<(u64, usize)> = VecDeque::new();
    for (x, _) in table.stored_elements() {
        if family.slots(x).any(|y| table.is_free(y)) {
            dist.insert(x, Some(0));
            queue.push_back((x, 0));
        }
    }
    while let Some((w, t)) = queue.pop_front() {
        let slot = table.position_of(w).expect("profiled elements are stored");
        if let Some(candidates) = hashes_to.get(&slot) {
            for &x in candidates {
                let entry = dist.get_mut(&x).expect("stored");
                if entry.is_none() {
                    *entry = Some(t + 1);
                    queue.push_back((x, t + 1));
                }
            }
        }
    }
    dist
}

/// Smallest cutoff `M` leaving at most `alpha * n` stored elements at
/// distance above `M`. Fails when more than `alpha * n` elements have
/// infinite distance, since no finite cutoff can cover those.
pub fn choose_distance_cutoff(table: &CuckooTable, alpha: f64) -> Result<usize> {
    let profile = distance_profile(table);
    let n = profile.len();
    let allowed = alpha * n as f64;
    let unreachable = profile.values().filter(|v| v.is_none()).count();
    if unreachable as f64 > allowed {
        return Err(Error::NoDistanceCutoff { alpha });
    }
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for v in profile.values().flatten() {
        *histogram.entry(*v).or_insert(0) += 1;
    }
    let max_dist = histogram.keys().next_back().copied().unwrap_or(0);
    // Count of elements strictly above each candidate cutoff, high to low.
    let mut above = unreachable;
    let mut cutoff = max_dist;
    for m in (0..=max_dist).rev() {
        if above as f64 > allowed {
            break;
        }
        cutoff = m;
        above += histogram.get(&m).copied().unwrap_or(0);
    }
    Ok(cutoff)
}

/// Classifies every stored element into the level sets and remainder sets
/// for the given distance cutoff.
///
/// Element `x` is in `levels[i]` (for `i >= 1`) when its depth-`i` walk
/// set places at least `d(d-1)^(i-1) / (c0 * i^exponent)` weight on
/// distinct endpoints inside `G` plus finished walks. `bad[i]` removes
/// `levels[0..=i]` from the population; the sets are nested by
/// construction.
pub fn compute_bad_sets(
    table: &CuckooTable,
    params: &BadSetParams,
    cutoff: usize,
) -> Result<BadSetReport> {
    let profile = distance_profile(table);
    let g: BTreeSet<u64> = profile
        .iter()
        .filter(|(_, v)| matches!(v, Some(t) if *t <= cutoff))
        .map(|(x, _)| *x)
        .collect();
    let population: BTreeSet<u64> = profile.keys().copied().collect();

    let d = table.arity() as u64;
    let mut levels = vec![g.clone()];
    for i in 1..=params.i_max {
        let weight = (d * (d - 1).pow(i as u32 - 1)) as f64;
        let threshold = weight / (params.c0 * (i as f64).powf(params.exponent));
        let mut level = BTreeSet::new();
        for &x in &population {
            let walk = forward_walk_set(table, x, i as u32)?;
            let hits = walk.distinct_endpoints_in(&g) as f64 + walk.dummy_count as f64;
            if hits >= threshold {
                level.insert(x);
            }
        }
        levels.push(level);
    }

    let mut bad = Vec::with_capacity(params.i_max + 1);
    let mut remaining = population.clone();
    for level in &levels {
        remaining = remaining.difference(level).copied().collect();
        bad.push(remaining.clone());
    }
    let sizes = bad.iter().map(|b| b.len()).collect();

    Ok(BadSetReport {
        c0: params.c0,
        alpha: params.alpha,
        exponent: params.exponent,
        cutoff,
        i_max: params.i_max,
        population: population.len(),
        levels,
        bad,
        sizes,
    })
}
