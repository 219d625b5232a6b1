//! d-ary cuckoo hash table with random-walk and BFS insertion.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hash::HashFamily;
use crate::{Error, Result};

/// How an insertion walk picks the next hash index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Every step chooses uniformly among all `d` hash indices, so the walk
    /// may immediately push an element back where it came from.
    RandomWalkBacktracking,
    /// After the first step, the evicted element never retries the hash
    /// index it was just evicted from, leaving `d - 1` choices. Only the
    /// index is excluded: if another index maps to the same slot, the walk
    /// may still return there.
    RandomWalkNonBacktracking,
    /// Deterministic shortest augmenting path, found by breadth-first
    /// search. Ties are broken toward the lexicographically smallest
    /// (hash index, slot) sequence.
    BfsShortestPath,
}

/// What the non-backtracking walk does on its very first step, where the
/// element being inserted has no slot it was evicted from.
///
/// The natural convention gives the fresh element all `d` choices, matching
/// how the table actually behaves. `RandomExclusion` instead bans one
/// uniformly chosen index, so every step of the walk has exactly `d - 1`
/// choices; this makes the walk-length distribution comparable with
/// analyses that treat all steps alike. The rule is ignored by the
/// backtracking and BFS strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstStepRule {
    #[default]
    AllChoices,
    RandomExclusion,
}

/// An insertion strategy plus its private random stream.
///
/// The stream is seeded once and advances across consecutive insertions, so
/// a whole build is reproducible from `(table seed, strategy seed)` alone.
#[derive(Debug, Clone)]
pub struct InsertionStrategy {
    kind: StrategyKind,
    first_step: FirstStepRule,
    rng_seed: u64,
    rng: ChaCha8Rng,
}

impl InsertionStrategy {
    pub fn new(kind: StrategyKind, rng_seed: u64) -> Self {
        InsertionStrategy {
            kind,
            first_step: FirstStepRule::default(),
            rng_seed,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
        }
    }

    pub fn random_walk_backtracking(seed: u64) -> Self {
        Self::new(StrategyKind::RandomWalkBacktracking, seed)
    }

    pub fn random_walk_non_backtracking(seed: u64) -> Self {
        Self::new(StrategyKind::RandomWalkNonBacktracking, seed)
    }

    pub fn bfs_shortest_path() -> Self {
        Self::new(StrategyKind::BfsShortestPath, 0)
    }

    pub fn with_first_step(mut self, rule: FirstStepRule) -> Self {
        self.first_step = rule;
        self
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn first_step(&self) -> FirstStepRule {
        self.first_step
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }
}

/// One placement performed during an insertion walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkStep {
    /// Occupant displaced by this placement; `None` when the slot was free.
    pub evicted: Option<u64>,
    /// 1-based hash index the placed element used.
    pub hash_index: u32,
    /// Destination slot.
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Success,
    /// The walk was cut off after `max_steps` reassignments. The table is
    /// left in the state the walk reached: the element displaced by the
    /// final recorded step is out of the table.
    StepLimitExceeded,
}

/// Full record of one insertion.
///
/// Replaying `steps` in order against the pre-insertion state (place the
/// element in hand into `slot`, the evictee becomes the new element in
/// hand) reproduces the post-insertion state exactly. `reassignments` is
/// the number of steps that displaced an occupant, which is how insertion
/// cost is counted throughout this crate: placing into a free slot is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub element: u64,
    pub steps: Vec<WalkStep>,
    pub reassignments: usize,
    pub outcome: InsertOutcome,
}

#[derive(Debug, Clone, Copy)]
struct Occupant {
    element: u64,
    /// 1-based hash index under which the element occupies its slot.
    hash_index: u32,
}

/// A `d`-ary cuckoo hash table over abstract `u64` element ids.
///
/// Each element has `d` candidate slots `h_1(x), ..., h_d(x)` given by a
/// [`HashFamily`]. The table stores at most one element per slot and
/// remembers, for every stored element, which hash index put it there; the
/// non-backtracking walk and the walk-set analyses both need that index.
#[derive(Debug, Clone)]
pub struct CuckooTable {
    family: HashFamily,
    slots: Vec<Option<Occupant>>,
    position_of: HashMap<u64, usize>,
}

impl CuckooTable {
    /// Creates an empty table with `m >= 1` slots and arity `d >= 2`.
    pub fn new(m: usize, d: u32, seed: u64) -> Result<Self> {
        let family = HashFamily::new(m, d, seed)?;
        Ok(CuckooTable {
            family,
            slots: vec![None; m],
            position_of: HashMap::new(),
        })
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn arity(&self) -> u32 {
        self.family.arity()
    }

    pub fn occupancy(&self) -> usize {
        self.position_of.len()
    }

    pub fn load_factor(&self) -> f64 {
        self.occupancy() as f64 / self.capacity() as f64
    }

    /// Default walk budget used when callers do not pin one:
    /// `50 * log2(m)^2`, far above typical walk lengths at loads below the
    /// threshold but small enough to cut off hopeless walks quickly.
    pub fn default_max_steps(&self) -> usize {
        default_max_steps(self.capacity())
    }

    /// Slot currently holding `x`, probing the `d` candidates in order.
    /// Costs at most `d` probes.
    pub fn lookup(&self, x: u64) -> Option<usize> {
        (1..=self.arity()).find_map(|k| {
            let y = self.family.eval(x, k);
            match self.slots[y] {
                Some(occ) if occ.element == x => Some(y),
                _ => None,
            }
        })
    }

    /// Same answer as [`lookup`](Self::lookup) in O(1), via the reverse map.
    pub fn position_of(&self, x: u64) -> Option<usize> {
        self.position_of.get(&x).copied()
    }

    /// 1-based hash index under which `x` occupies its slot.
    pub fn stored_hash_index(&self, x: u64) -> Option<u32> {
        let slot = self.position_of(x)?;
        Some(self.slots[slot].expect("maps disagree").hash_index)
    }

    pub fn occupant(&self, slot: usize) -> Option<u64> {
        self.slots[slot].map(|o| o.element)
    }

    pub fn is_free(&self, slot: usize) -> bool {
        self.slots[slot].is_none()
    }

    /// Stored `(element, slot)` pairs in slot order. The order is
    /// deterministic, which downstream reports rely on.
    pub fn stored_elements(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(y, occ)| occ.map(|o| (o.element, y)))
    }

    /// Unoccupied slots in increasing order.
    pub fn free_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(y, occ)| occ.is_none().then_some(y))
    }

    /// Removes `x` if present; returns whether it was.
    pub fn delete(&mut self, x: u64) -> bool {
        match self.position_of.remove(&x) {
            Some(slot) => {
                debug_assert_eq!(self.slots[slot].map(|o| o.element), Some(x));
                self.slots[slot] = None;
                true
            }
            None => false,
        }
    }

    /// Inserts `x`, displacing occupants per the strategy. Rejects elements
    /// that are already present. The walk gives up once it has performed
    /// `max_steps` reassignments and the element in hand still has no free
    /// slot; the table then stays in the reached state and the trace ends
    /// with the eviction that was never repaired.
    pub fn insert(
        &mut self,
        x: u64,
        strategy: &mut InsertionStrategy,
        max_steps: usize,
    ) -> Result<WalkTrace> {
        if self.position_of.contains_key(&x) {
            return Err(Error::DuplicateElement(x));
        }
        match strategy.kind {
            StrategyKind::BfsShortestPath => Ok(self.insert_bfs(x, max_steps)),
            _ => Ok(self.insert_random_walk(x, strategy, max_steps)),
        }
    }

    fn place(&mut self, element: u64, slot: usize, hash_index: u32) {
        debug_assert_eq!(self.family.eval(element, hash_index), slot);
        self.slots[slot] = Some(Occupant {
            element,
            hash_index,
        });
        self.position_of.insert(element, slot);
    }

    fn insert_random_walk(
        &mut self,
        x: u64,
        strategy: &mut InsertionStrategy,
        max_steps: usize,
    ) -> WalkTrace {
        let d = self.arity();
        let mut steps = Vec::new();
        let mut reassignments = 0usize;
        let mut hand = x;
        let mut banned: Option<u32> = match (strategy.kind, strategy.first_step) {
            (StrategyKind::RandomWalkNonBacktracking, FirstStepRule::RandomExclusion) => {
                Some(strategy.rng.gen_range(1..=d))
            }
            _ => None,
        };
        loop {
            let k = match strategy.kind {
                StrategyKind::RandomWalkBacktracking => strategy.rng.gen_range(1..=d),
                StrategyKind::RandomWalkNonBacktracking => match banned {
                    None => strategy.rng.gen_range(1..=d),
                    Some(b) => {
                        let r = strategy.rng.gen_range(1..d);
                        if r >= b {
                            r + 1
                        } else {
                            r
                        }
                    }
                },
                StrategyKind::BfsShortestPath => unreachable!(),
            };
            let y = self.family.eval(hand, k);
            match self.slots[y] {
                None => {
                    self.place(hand, y, k);
                    steps.push(WalkStep {
                        evicted: None,
                        hash_index: k,
                        slot: y,
                    });
                    return WalkTrace {
                        element: x,
                        steps,
                        reassignments,
                        outcome: InsertOutcome::Success,
                    };
                }
                Some(occ) => {
                    if reassignments == max_steps {
                        // The displacement we are about to make would be
                        // reassignment max_steps + 1; stop instead, leaving
                        // the element in hand out of the table.
                        return WalkTrace {
                            element: x,
                            steps,
                            reassignments,
                            outcome: InsertOutcome::StepLimitExceeded,
                        };
                    }
                    self.position_of.remove(&occ.element);
                    self.place(hand, y, k);
                    steps.push(WalkStep {
                        evicted: Some(occ.element),
                        hash_index: k,
                        slot: y,
                    });
                    reassignments += 1;
                    hand = occ.element;
                    banned = Some(occ.hash_index);
                }
            }
        }
    }

    fn insert_bfs(&mut self, x: u64, max_steps: usize) -> WalkTrace {
        match self.shortest_augmenting_path(x, Some(max_steps)) {
            Some(path) => {
                let reassignments = path.len() - 1;
                let mut steps = Vec::with_capacity(path.len());
                let mut hand = x;
                for (i, &(k, slot)) in path.iter().enumerate() {
                    let evicted = self.slots[slot].map(|o| o.element);
                    debug_assert_eq!(evicted.is_none(), i + 1 == path.len());
                    if let Some(e) = evicted {
                        self.position_of.remove(&e);
                    }
                    self.place(hand, slot, k);
                    steps.push(WalkStep {
                        evicted,
                        hash_index: k,
                        slot,
                    });
                    if let Some(e) = evicted {
                        hand = e;
                    }
                }
                WalkTrace {
                    element: x,
                    steps,
                    reassignments,
                    outcome: InsertOutcome::Success,
                }
            }
            // No augmenting path within the budget. BFS knows this without
            // moving anything, so unlike the random walks it leaves the
            // table untouched.
            None => WalkTrace {
                element: x,
                steps: Vec::new(),
                reassignments: 0,
                outcome: InsertOutcome::StepLimitExceeded,
            },
        }
    }

    /// Reassignments needed to insert `x` along a shortest augmenting path,
    /// or `None` when no free slot is reachable. A free candidate slot
    /// means distance 0. The walk convention matches insertion: the
    /// starting element may use any of its `d` indices, and every displaced
    /// element may use any index other than the one it was stored under.
    pub fn bfs_distance_to_empty(&self, x: u64) -> Option<usize> {
        self.shortest_augmenting_path(x, None)
            .map(|path| path.len() - 1)
    }

    /// BFS over elements. Returns the placement sequence `(hash index,
    /// slot)` of the augmenting path, ending at a free slot, or `None` if
    /// none is reachable within `max_steps` reassignments.
    ///
    /// Ties are broken toward the lexicographically smallest sequence of
    /// (hash index, slot) pairs: the queue is FIFO, indices are scanned in
    /// increasing order, and the first parent to discover an element wins.
    fn shortest_augmenting_path(
        &self,
        x: u64,
        max_steps: Option<usize>,
    ) -> Option<Vec<(u32, usize)>> {
        let d = self.arity();
        // parent[e] = (previous element, hash index, slot) on the shortest
        // path that first discovered e. The start is marked with a sentinel
        // so a walk that loops back to it is not re-queued.
        let mut parent: HashMap<u64, Option<(u64, u32, usize)>> = HashMap::new();
        parent.insert(x, None);
        let mut queue: VecDeque<(u64, usize)> = VecDeque::new();
        queue.push_back((x, 0));
        while let Some((e, depth)) = queue.pop_front() {
            if max_steps.is_some_and(|limit| depth > limit) {
                return None;
            }
            for k in 1..=d {
                let y = self.family.eval(e, k);
                match self.slots[y] {
                    None => {
                        let mut path = vec![(k, y)];
                        let mut cur = e;
                        while let Some((prev, pk, py)) = parent[&cur] {
                            path.push((pk, py));
                            cur = prev;
                        }
                        path.reverse();
                        return Some(path);
                    }
                    Some(occ) => {
                        if let Entry::Vacant(v) = parent.entry(occ.element) {
                            v.insert(Some((e, k, y)));
                            queue.push_back((occ.element, depth + 1));
                        }
                    }
                }
            }
        }
        None
    }

    /// Exhaustive structural self-check: the slot array and the reverse map
    /// are mutually inverse, and every stored element really hashes to its
    /// slot under its recorded index. Intended for tests; costs O(m + n).
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let mut seen = 0usize;
        for (y, occ) in self.slots.iter().enumerate() {
            if let Some(o) = occ {
                seen += 1;
                if self.position_of.get(&o.element) != Some(&y) {
                    return Err(format!("slot {y} holds {} but the map disagrees", o.element));
                }
                if o.hash_index < 1 || o.hash_index > self.arity() {
                    return Err(format!("slot {y}: hash index {} out of range", o.hash_index));
                }
                if self.family.eval(o.element, o.hash_index) != y {
                    return Err(format!(
                        "element {} recorded at slot {y} under index {} but hashes elsewhere",
                        o.element, o.hash_index
                    ));
                }
            }
        }
        if seen != self.position_of.len() {
            return Err(format!(
                "{} occupied slots vs {} mapped elements",
                seen,
                self.position_of.len()
            ));
        }
        Ok(())
    }
}

/// `50 * log2(m)^2`, the default reassignment budget for a table of `m`
/// slots.
pub fn default_max_steps(m: usize) -> usize {
    let lg = (m.max(2) as f64).log2();
    (50.0 * lg * lg).ceil() as usize
}

/// Expected slowdown of the backtracking walk relative to the
/// non-backtracking walk with the same arity: the backtracking walk's
/// expected length is `(d + 1) / (d - 1)` times longer. Returned as an
/// exact reduced fraction `(numerator, denominator)`.
pub fn expected_backtracking_ratio(d: u32) -> Result<(u64, u64)> {
    if d < 2 {
        return Err(Error::ArityTooSmall(d));
    }
    let (num, den) = ((d + 1) as u64, (d - 1) as u64);
    // gcd(d + 1, d - 1) is 2 for odd d and 1 for even d.
    if d % 2 == 1 {
        Ok((num / 2, den / 2))
    } else {
        Ok((num, den))
    }
}
