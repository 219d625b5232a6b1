//! The element/slot incidence graph of a hash family.
//!
//! Left vertices are elements, right vertices are slots, and element `x` is
//! joined to its `d` candidate slots. A table state is a matching in this
//! graph (each stored element matched to its slot), so questions about
//! insertability become questions about matchings and expansion here.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::hash::HashFamily;
use crate::table::CuckooTable;
use crate::{Error, Result};

/// Immutable bipartite multigraph between `n` elements and `m` slots.
///
/// Adjacency keeps the hash multiset: if two hash indices of an element
/// agree, the slot appears twice. Matching and neighborhood operations
/// collapse parallel edges; only walk-level analyses care about them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    m: usize,
    d: u32,
    seed: u64,
    element_ids: Vec<u64>,
    /// Flat `n * d` slot array; row `i` holds the candidates of element `i`.
    adjacency: Vec<usize>,
}

/// Maximum matching together with the pairing that realizes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    pub size: usize,
    /// Per left vertex, the matched slot.
    pub pairing: Vec<Option<usize>>,
    /// Per slot, the matched left vertex.
    pub reverse: Vec<Option<usize>>,
    /// Whether every left vertex is matched.
    pub is_perfect: bool,
}

/// How [`BipartiteGraph::hall_violation_search`] hunts for a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSearch {
    /// Scan all non-empty subsets in order of size, then lexicographically;
    /// returns the first (hence a smallest) violating set. Only for
    /// `n <= 20`.
    Exhaustive,
    /// Derive a witness from a maximum matching: if some element is
    /// unmatched, the left vertices reachable from unmatched elements by
    /// alternating paths form a violating set. Fast at any size, but the
    /// witness is not necessarily smallest.
    MatchingGuided,
}

/// Simple-cycle census of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCount {
    /// Total simple cycles of (edge) length at most the requested bound.
    pub cycles: u64,
    /// `by_length[l]` = number of cycles with `2l` edges (index 0 and 1
    /// unused; the shortest bipartite cycle has 4 edges).
    pub by_length: Vec<u64>,
    /// Left vertices lying on at least one counted cycle.
    pub on_cycle: Vec<bool>,
}

impl BipartiteGraph {
    /// Builds the incidence graph of `element_ids` under `family`.
    pub fn from_family(family: &HashFamily, element_ids: &[u64]) -> Self {
        let d = family.arity();
        let mut adjacency = Vec::with_capacity(element_ids.len() * d as usize);
        for &x in element_ids {
            for k in 1..=d {
                adjacency.push(family.eval(x, k));
            }
        }
        BipartiteGraph {
            n: element_ids.len(),
            m: family.slot_count(),
            d,
            seed: family.seed(),
            element_ids: element_ids.to_vec(),
            adjacency,
        }
    }

    /// Incidence graph of the elements currently stored in `table`.
    pub fn from_table(table: &CuckooTable) -> Self {
        let ids: Vec<u64> = table.stored_elements().map(|(x, _)| x).collect();
        Self::from_family(table.family(), &ids)
    }

    pub fn left_count(&self) -> usize {
        self.n
    }

    pub fn right_count(&self) -> usize {
        self.m
    }

    pub fn arity(&self) -> u32 {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn element_ids(&self) -> &[u64] {
        &self.element_ids
    }

    /// Candidate slots of left vertex `i`, hash multiset order.
    pub fn slots_of(&self, i: usize) -> &[usize] {
        let d = self.d as usize;
        &self.adjacency[i * d..(i + 1) * d]
    }

    /// Distinct slots adjacent to the left vertices in `set`, sorted.
    pub fn neighbors(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set
            .iter()
            .flat_map(|&i| self.slots_of(i).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Per-slot adjacency with parallel edges collapsed, each list sorted.
    fn slot_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.m];
        for i in 0..self.n {
            let mut prev = usize::MAX;
            let mut row: Vec<usize> = self.slots_of(i).to_vec();
            row.sort_unstable();
            for y in row {
                if y != prev {
                    members[y].push(i);
                    prev = y;
                }
            }
        }
        members
    }

    /// Maximum bipartite matching via Hopcroft-Karp. Deterministic: the
    /// result depends only on the graph, not on hash-map iteration or
    /// randomness. Runs in `O(E sqrt(V))`, comfortable at `n = 10^5`.
    pub fn maximum_matching(&self) -> MatchingResult {
        const NIL: usize = usize::MAX;
        let d = self.d as usize;
        // Deduped adjacency: parallel edges cannot help a matching.
        let mut adj: Vec<usize> = Vec::with_capacity(self.n * d);
        let mut offsets: Vec<usize> = Vec::with_capacity(self.n + 1);
        offsets.push(0);
        let mut row = Vec::with_capacity(d);
        for i in 0..self.n {
            row.clear();
            row.extend_from_slice(self.slots_of(i));
            row.sort_unstable();
            row.dedup();
            adj.extend_from_slice(&row);
            offsets.push(adj.len());
        }

        let mut match_left = vec![NIL; self.n];
        let mut match_right = vec![NIL; self.m];
        let mut dist = vec![0u32; self.n];
        let mut queue = VecDeque::new();

        let bfs = |match_left: &[usize],
                   match_right: &[usize],
                   dist: &mut Vec<u32>,
                   queue: &mut VecDeque<usize>| -> bool {
            const INF: u32 = u32::MAX;
            queue.clear();
            for i in 0..match_left.len() {
                if match_left[i] == NIL {
                    dist[i] = 0;
                    queue.push_back(i);
                } else {
                    dist[i] = INF;
                }
            }
            let mut found = false;
            while let Some(i) = queue.pop_front() {
                for &y in &adj[offsets[i]..offsets[i + 1]] {
                    let j = match_right[y];
                    if j == NIL {
                        found = true;
                    } else if dist[j] == INF {
                        dist[j] = dist[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
            found
        };

        fn dfs(
            i: usize,
            adj: &[usize],
            offsets: &[usize],
            match_left: &mut [usize],
            match_right: &mut [usize],
            dist: &mut [u32],
        ) -> bool {
            const NIL: usize = usize::MAX;
            for idx in offsets[i]..offsets[i + 1] {
                let y = adj[idx];
                let j = match_right[y];
                if j == NIL
                    || (dist[j] == dist[i] + 1
                        && dfs(j, adj, offsets, match_left, match_right, dist))
                {
                    match_left[i] = y;
                    match_right[y] = i;
                    return true;
                }
            }
            dist[i] = u32::MAX;
            false
        }

        let mut size = 0usize;
        while bfs(&match_left, &match_right, &mut dist, &mut queue) {
            for i in 0..self.n {
                if match_left[i] == NIL
                    && dfs(i, &adj, &offsets, &mut match_left, &mut match_right, &mut dist)
                {
                    size += 1;
                }
            }
        }

        let pairing: Vec<Option<usize>> = match_left
            .iter()
            .map(|&y| (y != NIL).then_some(y))
            .collect();
        let reverse: Vec<Option<usize>> = match_right
            .iter()
            .map(|&i| (i != NIL).then_some(i))
            .collect();
        MatchingResult {
            size,
            is_perfect: size == self.n,
            pairing,
            reverse,
        }
    }

    /// Searches for a set of elements with fewer distinct candidate slots
    /// than members, i.e. a witness that no perfect matching exists.
    /// Returns `None` when every set expands (equivalently, when a perfect
    /// matching exists).
    pub fn hall_violation_search(&self, mode: WitnessSearch) -> Result<Option<Vec<usize>>> {
        match mode {
            WitnessSearch::Exhaustive => {
                const MAX_N: usize = 20;
                if self.n > MAX_N {
                    return Err(Error::TooLargeForExhaustive {
                        n: self.n,
                        max: MAX_N,
                    });
                }
                // Advances to the next size-k combination of 0..n in
                // lexicographic order; false once exhausted.
                fn next_combination(combo: &mut [usize], n: usize) -> bool {
                    let size = combo.len();
                    let mut i = size;
                    while i > 0 {
                        i -= 1;
                        if combo[i] != i + n - size {
                            combo[i] += 1;
                            for j in i + 1..size {
                                combo[j] = combo[j - 1] + 1;
                            }
                            return true;
                        }
                    }
                    false
                }

                let mut slot_seen = vec![false; self.m];
                for size in 1..=self.n {
                    let mut combo: Vec<usize> = (0..size).collect();
                    loop {
                        let mut distinct = 0usize;
                        for &i in &combo {
                            for &y in self.slots_of(i) {
                                if !slot_seen[y] {
                                    slot_seen[y] = true;
                                    distinct += 1;
                                }
                            }
                        }
                        for &i in &combo {
                            for &y in self.slots_of(i) {
                                slot_seen[y] = false;
                            }
                        }
                        if distinct < size {
                            return Ok(Some(combo));
                        }
                        if !next_combination(&mut combo, self.n) {
                            break;
                        }
                    }
                }
                Ok(None)
            }
            WitnessSearch::MatchingGuided => {
                let matching = self.maximum_matching();
                if matching.is_perfect {
                    return Ok(None);
                }
                // Left vertices reachable from unmatched ones by paths that
                // alternate non-matching / matching edges. Every neighbor
                // slot of this set is matched back into the set, so the set
                // has deficiency exactly n - |matching|.
                let mut in_set = vec![false; self.n];
                let mut queue: VecDeque<usize> = VecDeque::new();
                for (i, pair) in matching.pairing.iter().enumerate() {
                    if pair.is_none() {
                        in_set[i] = true;
                        queue.push_back(i);
                    }
                }
                while let Some(i) = queue.pop_front() {
                    for &y in self.slots_of(i) {
                        if let Some(j) = matching.reverse[y] {
                            if !in_set[j] {
                                in_set[j] = true;
                                queue.push_back(j);
                            }
                        }
                    }
                }
                let witness: Vec<usize> =
                    (0..self.n).filter(|&i| in_set[i]).collect();
                Ok(Some(witness))
            }
        }
    }

    /// Counts simple cycles with at most `max_len` edges (cycle lengths in
    /// a bipartite graph are even; the shortest is 4). Parallel edges are
    /// collapsed first, so two elements sharing two slots form exactly one
    /// 4-cycle. Each cycle is counted once, rooted at its smallest left
    /// vertex with orientation fixed by its first and last slot.
    ///
    /// `budget` bounds the number of DFS extensions; an instance denser
    /// than the budget allows yields [`Error::BudgetExceeded`].
    pub fn count_short_cycles(&self, max_len: usize, budget: u64) -> Result<CycleCount> {
        let members = self.slot_members();
        let max_pairs = max_len / 2;
        let mut count = CycleCount {
            cycles: 0,
            by_length: vec![0; max_pairs + 1],
            on_cycle: vec![false; self.n],
        };
        if max_pairs < 2 || self.n == 0 {
            return Ok(count);
        }
        let mut work = 0u64;

        struct Dfs<'a> {
            graph: &'a BipartiteGraph,
            members: &'a [Vec<usize>],
            max_pairs: usize,
            budget: u64,
        }

        impl Dfs<'_> {
            /// Extends the alternating path `root .. cur`; `path_left`
            /// holds the left vertices in order, `used_slot` the slots.
            #[allow(clippy::too_many_arguments)]
            fn run(
                &self,
                root: usize,
                cur: usize,
                first_slot: usize,
                path_left: &mut Vec<usize>,
                used_left: &mut [bool],
                used_slot: &mut [bool],
                count: &mut CycleCount,
                work: &mut u64,
            ) -> Result<()> {
                *work += 1;
                if *work > self.budget {
                    return Err(Error::BudgetExceeded {
                        budget: self.budget,
                    });
                }
                let mut closing: Vec<usize> = Vec::new();
                for &y in self.graph.slots_of(cur) {
                    if used_slot[y] || y <= first_slot {
                        continue;
                    }
                    if self.graph.slots_of(root).contains(&y) && !closing.contains(&y) {
                        closing.push(y);
                    }
                }
                if !closing.is_empty() {
                    let pairs = path_left.len();
                    count.cycles += closing.len() as u64;
                    count.by_length[pairs] += closing.len() as u64;
                    for &v in path_left.iter() {
                        count.on_cycle[v] = true;
                    }
                }
                if path_left.len() == self.max_pairs {
                    return Ok(());
                }
                let mut prev = usize::MAX;
                let mut sorted: Vec<usize> = self.graph.slots_of(cur).to_vec();
                sorted.sort_unstable();
                for y in sorted {
                    if y == prev || used_slot[y] {
                        prev = y;
                        continue;
                    }
                    prev = y;
                    used_slot[y] = true;
                    for &nxt in &self.members[y] {
                        if nxt <= root || used_left[nxt] {
                            continue;
                        }
                        used_left[nxt] = true;
                        path_left.push(nxt);
                        self.run(
                            root, nxt, first_slot, path_left, used_left, used_slot, count,
                            work,
                        )?;
                        path_left.pop();
                        used_left[nxt] = false;
                    }
                    used_slot[y] = false;
                }
                Ok(())
            }
        }

        let dfs = Dfs {
            graph: self,
            members: &members,
            max_pairs,
            budget,
        };
        let mut used_left = vec![false; self.n];
        let mut used_slot = vec![false; self.m];
        for root in 0..self.n {
            let mut first_slots: Vec<usize> = self.slots_of(root).to_vec();
            first_slots.sort_unstable();
            first_slots.dedup();
            used_left[root] = true;
            for &y1 in &first_slots {
                used_slot[y1] = true;
                for &x1 in &members[y1] {
                    if x1 <= root {
                        continue;
                    }
                    used_left[x1] = true;
                    let mut path = vec![root, x1];
                    dfs.run(
                        root,
                        x1,
                        y1,
                        &mut path,
                        &mut used_left,
                        &mut used_slot,
                        &mut count,
                        &mut work,
                    )?;
                    used_left[x1] = false;
                }
                used_slot[y1] = false;
            }
            used_left[root] = false;
        }
        Ok(count)
    }

    /// Serializes to the line-based interchange format:
    ///
    /// ```text
    /// n m d seed
    /// x h1 h2 ... hd        (one line per element)
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} {}", self.n, self.m, self.d, self.seed);
        for i in 0..self.n {
            let _ = write!(out, "{}", self.element_ids[i]);
            for &y in self.slots_of(i) {
                let _ = write!(out, " {y}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text).
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::GraphFormat {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad(1, "header must be `n m d seed`"));
        }
        let n: usize = fields[0].parse().map_err(|_| bad(1, "bad n"))?;
        let m: usize = fields[1].parse().map_err(|_| bad(1, "bad m"))?;
        let d: u32 = fields[2].parse().map_err(|_| bad(1, "bad d"))?;
        let seed: u64 = fields[3].parse().map_err(|_| bad(1, "bad seed"))?;
        if m == 0 {
            return Err(bad(1, "m must be positive"));
        }
        if d < 2 {
            return Err(bad(1, "d must be at least 2"));
        }
        let mut element_ids = Vec::with_capacity(n);
        let mut adjacency = Vec::with_capacity(n * d as usize);
        for _ in 0..n {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| bad(n + 1, "fewer element lines than n"))?;
            let lineno = idx + 1;
            let mut it = line.split_whitespace();
            let x: u64 = it
                .next()
                .ok_or_else(|| bad(lineno, "empty line"))?
                .parse()
                .map_err(|_| bad(lineno, "bad element id"))?;
            element_ids.push(x);
            let mut got = 0u32;
            for tok in it {
                let y: usize = tok.parse().map_err(|_| bad(lineno, "bad slot"))?;
                if y >= m {
                    return Err(bad(lineno, "slot out of range"));
                }
                adjacency.push(y);
                got += 1;
            }
            if got != d {
                return Err(bad(lineno, "wrong number of slots"));
            }
        }
        if lines.next().is_some() {
            return Err(bad(n + 2, "trailing content"));
        }
        Ok(BipartiteGraph {
            n,
            m,
            d,
            seed,
            element_ids,
            adjacency,
        })
    }
}

/// Empirical load thresholds below which builds succeed with high
/// probability, per arity. Tabulated for `2 <= d <= 7`; beyond that the
/// threshold approaches `1 - e^-d` and no constant is returned.
pub fn load_threshold(d: u32) -> Result<f64> {
    match d {
        2 => Ok(0.5),
        3 => Ok(0.918),
        4 => Ok(0.977),
        5 => Ok(0.992),
        6 => Ok(0.997),
        7 => Ok(0.999),
        _ => Err(Error::UnknownThreshold(d)),
    }
}
