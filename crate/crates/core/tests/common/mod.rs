//! Oracles shared by the integration suites.
//!
//! Everything in this module is written directly from the definitions,
//! on purpose avoiding the library's own algorithms: brute-force search
//! instead of Hopcroft-Karp, explicit walk enumeration instead of the
//! level-by-level convolution, and an absorbing-chain solve instead of
//! simulation. Agreement between the two sides is then evidence, not
//! tautology.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use dary_cuckoo::{CuckooTable, FirstStepRule, InsertionStrategy, StrategyKind};

/// Maximum-matching size by exhaustive search: every element either stays
/// unmatched or takes one of its free candidate slots. Slots are tracked
/// in a bitmask, so `m <= 64`.
pub fn brute_max_matching(adj: &[Vec<usize>], m: usize) -> usize {
    assert!(m <= 64, "bitmask oracle is limited to 64 slots");
    fn go(adj: &[Vec<usize>], i: usize, used: u64, best: &mut usize, matched: usize) {
        let remaining = adj.len() - i;
        if matched + remaining <= *best {
            return; // cannot beat the incumbent
        }
        if i == adj.len() {
            *best = (*best).max(matched);
            return;
        }
        for &s in &adj[i] {
            if used & (1 << s) == 0 {
                go(adj, i + 1, used | (1 << s), best, matched + 1);
            }
        }
        go(adj, i + 1, used, best, matched);
    }
    let mut best = 0;
    go(adj, 0, 0, &mut best, 0);
    best
}

/// First subset violating Hall's condition (|N(W)| < |W|), by scanning
/// all 2^n - 1 nonempty subsets. `None` means the condition holds.
pub fn brute_hall_violation(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    assert!(n <= 20, "subset scan is limited to 20 elements");
    for mask in 1u32..(1 << n) {
        let mut nbrs = BTreeSet::new();
        let mut size = 0usize;
        for (i, slots) in adj.iter().enumerate() {
            if mask & (1 << i) != 0 {
                size += 1;
                nbrs.extend(slots.iter().copied());
            }
        }
        if nbrs.len() < size {
            let set = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            return Some(set);
        }
    }
    None
}

/// Census of every hypothetical non-backtracking walk of exactly `depth`
/// displacements out of `x`, on the table as it stands.
///
/// The recursion literally walks the move tree: the first move picks any
/// of the `d` hash indexes, later moves any index except the one the
/// element in hand was stored under. A move onto a free slot ends the
/// walk early and is carried as `(d-1)^(moves remaining)` dummies; a move
/// onto an occupant displaces it. The element displaced by move number
/// `depth` is recorded as a real endpoint.
pub struct WalkCensus {
    pub real_endpoints: BTreeMap<u64, u64>,
    pub dummy: u64,
}

impl WalkCensus {
    pub fn total(&self) -> u64 {
        self.real_endpoints.values().sum::<u64>() + self.dummy
    }
}

pub fn enumerate_walks(table: &CuckooTable, x: u64, depth: u32) -> WalkCensus {
    assert!(depth >= 1);
    let mut census = WalkCensus {
        real_endpoints: BTreeMap::new(),
        dummy: 0,
    };
    // (element in hand, banned index, moves already made)
    fn go(
        table: &CuckooTable,
        census: &mut WalkCensus,
        hand: u64,
        ban: Option<u32>,
        moves_done: u32,
        depth: u32,
    ) {
        let d = table.arity();
        let t = moves_done + 1; // number of the move we are about to make
        for k in 1..=d {
            if ban == Some(k) {
                continue;
            }
            let slot = table.family().eval(hand, k);
            match table.occupant(slot) {
                None => {
                    census.dummy += u64::from(d - 1).pow(depth - t);
                }
                Some(w) => {
                    if t == depth {
                        *census.real_endpoints.entry(w).or_insert(0) += 1;
                    } else {
                        let next_ban = table.stored_hash_index(w);
                        go(table, census, w, next_ban, t, depth);
                    }
                }
            }
        }
    }
    go(table, &mut census, x, None, 0, depth);
    census
}

/// Shortest number of displacements that lets `x` in, by exhaustively
/// trying every eviction walk of length 0, 1, ..., `cap`. Along such a
/// walk the set of free slots never changes (each move refills the slot
/// just vacated), so the search can run on the untouched table.
pub fn exhaustive_walk_distance(table: &CuckooTable, x: u64, cap: usize) -> Option<usize> {
    fn reachable(table: &CuckooTable, hand: u64, budget: usize) -> bool {
        let mut hit_free = false;
        let mut occupants = Vec::new();
        for slot in table.family().slots(hand) {
            match table.occupant(slot) {
                None => hit_free = true,
                Some(w) => occupants.push(w),
            }
        }
        if hit_free {
            return true;
        }
        if budget == 0 {
            return false;
        }
        occupants
            .into_iter()
            .any(|w| reachable(table, w, budget - 1))
    }
    (0..=cap).find(|&t| reachable(table, x, t))
}

/// A self-contained description of a tiny table plus one pending insert,
/// extracted from a live table so the absorbing-chain solve and the real
/// walk run on byte-identical inputs.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub d: u32,
    /// element -> its candidate slots in hash-index order (1-based index i
    /// lives at position i-1).
    pub cand: BTreeMap<u64, Vec<usize>>,
    /// element -> 1-based hash index it is currently stored under.
    pub placed: BTreeMap<u64, u32>,
    pub insert: u64,
}

pub fn tiny_instance_from_table(table: &CuckooTable, insert: u64) -> TinyInstance {
    let mut cand = BTreeMap::new();
    let mut placed = BTreeMap::new();
    for (x, _slot) in table.stored_elements() {
        cand.insert(x, table.family().slots(x).collect::<Vec<_>>());
        placed.insert(x, table.stored_hash_index(x).expect("stored element"));
    }
    cand.insert(insert, table.family().slots(insert).collect::<Vec<_>>());
    TinyInstance {
        d: table.arity(),
        cand,
        placed,
        insert,
    }
}

/// Chain state: who is in hand, which index is banned for its next move,
/// and where everybody else sits. `placed` stays sorted by element id so
/// equal configurations hash equally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ChainState {
    hand: u64,
    ban: Option<u32>,
    placed: Vec<(u64, u32)>,
}

impl ChainState {
    fn slot_map(&self, inst: &TinyInstance) -> HashMap<usize, (u64, u32)> {
        self.placed
            .iter()
            .map(|&(e, idx)| (inst.cand[&e][(idx - 1) as usize], (e, idx)))
            .collect()
    }
}

/// Exact expected number of displacements for inserting `inst.insert`
/// with a random-walk strategy, from the absorbing Markov chain over full
/// configurations (placement of every element, element in hand, ban).
///
/// Returns `None` when no free slot is reachable, i.e. the walk would
/// never terminate.
pub fn markov_expected_steps(
    inst: &TinyInstance,
    kind: StrategyKind,
    first_step: FirstStepRule,
) -> Option<f64> {
    assert!(matches!(
        kind,
        StrategyKind::RandomWalkBacktracking | StrategyKind::RandomWalkNonBacktracking
    ));
    let d = inst.d;
    let non_backtracking = kind == StrategyKind::RandomWalkNonBacktracking;

    let mut initial = Vec::new();
    let base = ChainState {
        hand: inst.insert,
        ban: None,
        placed: inst.placed.iter().map(|(&e, &i)| (e, i)).collect(),
    };
    match first_step {
        FirstStepRule::AllChoices => initial.push(base),
        FirstStepRule::RandomExclusion if non_backtracking => {
            for k in 1..=d {
                initial.push(ChainState {
                    ban: Some(k),
                    ..base.clone()
                });
            }
        }
        FirstStepRule::RandomExclusion => initial.push(base),
    }

    // Discover the reachable transient states.
    let mut index: HashMap<ChainState, usize> = HashMap::new();
    let mut states: Vec<ChainState> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for st in &initial {
        if !index.contains_key(st) {
            index.insert(st.clone(), states.len());
            states.push(st.clone());
            queue.push_back(states.len() - 1);
        }
    }
    let mut transitions: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut immediate: Vec<f64> = Vec::new(); // expected cost incurred leaving the state
    let mut can_absorb = false;
    while let Some(si) = queue.pop_front() {
        let st = states[si].clone();
        let slot_map = st.slot_map(inst);
        let allowed: Vec<u32> = (1..=d)
            .filter(|&k| !(non_backtracking && st.ban == Some(k)))
            .collect();
        let p = 1.0 / allowed.len() as f64;
        let mut outs: Vec<(usize, f64)> = Vec::new();
        let mut cost = 0.0;
        for &k in &allowed {
            let slot = inst.cand[&st.hand][(k - 1) as usize];
            match slot_map.get(&slot) {
                None => can_absorb = true, // free slot: walk over, no displacement
                Some(&(victim, victim_idx)) => {
                    cost += p; // this choice displaces someone
                    let mut placed: Vec<(u64, u32)> = st
                        .placed
                        .iter()
                        .copied()
                        .filter(|&(e, _)| e != victim)
                        .collect();
                    placed.push((st.hand, k));
                    placed.sort_unstable();
                    let next = ChainState {
                        hand: victim,
                        ban: non_backtracking.then_some(victim_idx),
                        placed,
                    };
                    let ni = *index.entry(next.clone()).or_insert_with(|| {
                        states.push(next);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    outs.push((ni, p));
                }
            }
        }
        // discovery order equals pop order, so the rows stay aligned
        debug_assert_eq!(transitions.len(), si);
        transitions.push(outs);
        immediate.push(cost);
    }
    if !can_absorb {
        return None;
    }

    // Solve (I - Q) e = cost, then average over the initial states.
    let n = states.len();
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
        for &(j, p) in &transitions[i] {
            row[j] -= p;
        }
    }
    let e = gaussian_solve(a, immediate)?;
    let total: f64 = initial.iter().map(|st| e[index[st]]).sum();
    Some(total / initial.len() as f64)
}

/// Dense Gaussian elimination with partial pivoting. `None` on a
/// (numerically) singular system.
pub fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Mean and standard error of the random-walk insertion cost over
/// `trials` independent walks on clones of `table`.
pub fn simulate_insertion_mean(
    table: &CuckooTable,
    x: u64,
    kind: StrategyKind,
    trials: u64,
    seed: u64,
) -> (f64, f64) {
    let mut sum = 0u64;
    let mut sum_sq = 0u128;
    for t in 0..trials {
        let mut clone = table.clone();
        let mut strategy = InsertionStrategy::new(kind, seed.wrapping_add(t));
        let budget = 100_000;
        let trace = clone
            .insert(x, &mut strategy, budget)
            .expect("tiny instance insert");
        assert_eq!(
            trace.outcome,
            dary_cuckoo::InsertOutcome::Success,
            "budget far beyond any plausible walk"
        );
        let r = trace.reassignments as u64;
        sum += r;
        sum_sq += u128::from(r) * u128::from(r);
    }
    let n = trials as f64;
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 - n * mean * mean) / (n - 1.0);
    (mean, (var.max(0.0) / n).sqrt())
}

/// Random sparse adjacency built like the library does it, but through
/// the public hash API only.
pub fn adjacency_from_seed(n: usize, m: usize, d: u32, seed: u64) -> Vec<Vec<usize>> {
    let family = dary_cuckoo::HashFamily::new(m, d, seed).expect("family");
    (0..n as u64)
        .map(|x| family.slots(x).collect())
        .collect()
}
