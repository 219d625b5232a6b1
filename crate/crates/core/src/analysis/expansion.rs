//! Neighborhood expansion of the element/slot graph.
//!
//! A set `S` of elements expands when it sees at least `(d - 1 - p) |S|`
//! distinct slots, where the penalty `p` grows with `|S|` relative to the
//! instance size and vanishes for small sets. Sets below that line are
//! failing sets; instances without failing sets give displacement chains
//! room to grow geometrically, which is what the growth schedule tracks.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::BipartiteGraph;
use crate::{Error, Result};

/// Size scale below which the penalty is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffRule {
    /// `ln ln n`: tightest sets-are-tiny reading.
    LogLog,
    /// `ln(n) / (2d)`: wider zero-penalty window.
    LogOverTwoD,
    /// No penalty at any size (`p` identically zero).
    Infinite,
}

impl CutoffRule {
    pub fn value(self, n: f64, d: u32) -> f64 {
        match self {
            CutoffRule::LogLog => n.ln().ln(),
            CutoffRule::LogOverTwoD => n.ln() / (2.0 * d as f64),
            CutoffRule::Infinite => f64::INFINITY,
        }
    }

    fn label(self) -> &'static str {
        match self {
            CutoffRule::LogLog => "loglog",
            CutoffRule::LogOverTwoD => "log_over_2d",
            CutoffRule::Infinite => "infinite",
        }
    }
}

/// Penalty configuration: arity, the constant `a`, and the small-set
/// cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsParams {
    pub d: u32,
    pub a: f64,
    pub cutoff: CutoffRule,
}

impl PsParams {
    /// Tuned constants per arity (8.1, 15, 24 for d = 3, 4, 5, then
    /// `(d-1) e^(d-1)`), with the wide cutoff window.
    pub fn refined(d: u32) -> Self {
        let a = match d {
            3 => 8.1,
            4 => 15.0,
            5 => 24.0,
            _ => (d as f64 - 1.0) * ((d as f64) - 1.0).exp(),
        };
        PsParams {
            d,
            a,
            cutoff: CutoffRule::LogOverTwoD,
        }
    }

    /// Generic constants `(d-1) e^d` with the `ln ln n` cutoff.
    pub fn baseline(d: u32) -> Self {
        PsParams {
            d,
            a: (d as f64 - 1.0) * (d as f64).exp(),
            cutoff: CutoffRule::LogLog,
        }
    }

    /// Penalty fixed at zero for every size; expansion then demands the
    /// full `(d-1) |S|` distinct slots.
    pub fn zero_penalty(d: u32) -> Self {
        PsParams {
            d,
            a: 1.0,
            cutoff: CutoffRule::Infinite,
        }
    }

    /// The penalty `p` at set size `s` in an instance of `n` elements:
    /// zero below the cutoff, `log_d(a) / (log_d(n/s) - 1)` above, and
    /// infinite once the denominator is non-positive (s >= n/d).
    pub fn penalty(&self, s: f64, n: f64) -> f64 {
        if s < self.cutoff.value(n, self.d) {
            return 0.0;
        }
        let ln_d = (self.d as f64).ln();
        let den = (n / s).ln() / ln_d - 1.0;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            self.a.ln() / ln_d / den
        }
    }

    /// Distinct-slot requirement `(d - 1 - p) s` for a set of size `s`.
    pub fn requirement(&self, s: f64, n: f64) -> f64 {
        (self.d as f64 - 1.0 - self.penalty(s, n)) * s
    }
}

/// How an expansion or failing-set scan walks the subset space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpansionMode {
    /// Every non-empty subset; bounded instance sizes only.
    Exhaustive,
    /// Random subsets of each listed size.
    Sampled {
        sizes: Vec<usize>,
        samples_per_size: usize,
        seed: u64,
    },
}

/// A set found below its distinct-slot requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolatingSet {
    pub members: Vec<usize>,
    pub neighbor_count: usize,
    pub requirement: f64,
}

/// Result of [`expansion_check`]. `exhaustive = false` means a clean
/// certificate is evidence from sampling, not proof.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCertificate {
    pub d: u32,
    pub n: usize,
    pub a: f64,
    pub cutoff: CutoffRule,
    pub exhaustive: bool,
    pub examined: u64,
    /// Total violations encountered; `violations` keeps at most
    /// [`MAX_RECORDED_VIOLATIONS`] of them.
    pub violation_count: u64,
    pub violations: Vec<ViolatingSet>,
}

/// Cap on violating sets materialized in a certificate or scan.
pub const MAX_RECORDED_VIOLATIONS: usize = 10_000;

impl ExpansionCertificate {
    /// Key-value lines, fixed key order, one per line.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "d={}", self.d);
        let _ = writeln!(out, "a={}", self.a);
        let _ = writeln!(out, "cutoff={}", self.cutoff.label());
        let _ = writeln!(out, "exhaustive={}", self.exhaustive);
        let _ = writeln!(out, "examined={}", self.examined);
        let _ = writeln!(out, "violations={}", self.violation_count);
        for (i, v) in self.violations.iter().take(32).enumerate() {
            let members: Vec<String> = v.members.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(
                out,
                "violation_{i}={} neighbors={} requirement={}",
                members.join(","),
                v.neighbor_count,
                v.requirement
            );
        }
        out
    }
}

/// Distinct-neighbor counts for every subset of left vertices, indexed by
/// bitmask. Needs `n <= 20` and at most 256 distinct slots overall.
fn mask_neighbor_counts(graph: &BipartiteGraph) -> Result<Vec<u32>> {
    let n = graph.left_count();
    assert!(n <= 20, "caller checks the exhaustive bound");
    let mut compact: HashMap<usize, usize> = HashMap::new();
    let mut element_bits = vec![[0u64; 4]; n];
    for (i, bits) in element_bits.iter_mut().enumerate() {
        for &y in graph.slots_of(i) {
            let next = compact.len();
            let id = *compact.entry(y).or_insert(next);
            if id >= 256 {
                return Err(Error::Config(
                    "exhaustive subset scan supports at most 256 distinct slots".to_string(),
                ));
            }
            bits[id / 64] |= 1u64 << (id % 64);
        }
    }
    let size = 1usize << n;
    let mut masks = vec![[0u64; 4]; size];
    let mut counts = vec![0u32; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut bits = masks[rest];
        for (word, extra) in bits.iter_mut().zip(element_bits[low]) {
            *word |= extra;
        }
        counts[mask] = bits.iter().map(|w| w.count_ones()).sum();
        masks[mask] = bits;
    }
    Ok(counts)
}

fn mask_members(mask: usize) -> Vec<usize> {
    let mut members = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        members.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    members
}

/// Draws a sorted uniform `size`-subset of `0..len` in place.
fn sample_subset(rng: &mut ChaCha8Rng, pool: &mut [usize], size: usize) -> Vec<usize> {
    let len = pool.len();
    let mut swaps = Vec::with_capacity(size);
    for i in 0..size {
        let j = rng.gen_range(i..len);
        pool.swap(i, j);
        swaps.push((i, j));
    }
    let mut out: Vec<usize> = pool[..size].to_vec();
    for &(i, j) in swaps.iter().rev() {
        pool.swap(i, j);
    }
    out.sort_unstable();
    out
}

/// Checks `|N(S)| >= (d - 1 - p) |S|` over subsets of the graph's left
/// vertices, exhaustively or by sampling.
pub fn expansion_check(
    graph: &BipartiteGraph,
    mode: &ExpansionMode,
    params: &PsParams,
) -> Result<ExpansionCertificate> {
    if params.d != graph.arity() {
        return Err(Error::Config(format!(
            "penalty parameters fix d = {} but the graph has d = {}",
            params.d,
            graph.arity()
        )));
    }
    let n = graph.left_count();
    let nf = n as f64;
    let mut cert = ExpansionCertificate {
        d: params.d,
        n,
        a: params.a,
        cutoff: params.cutoff,
        exhaustive: matches!(mode, ExpansionMode::Exhaustive),
        examined: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    fn record(
        cert: &mut ExpansionCertificate,
        members: Vec<usize>,
        neighbors: usize,
        requirement: f64,
    ) {
        cert.violation_count += 1;
        if cert.violations.len() < MAX_RECORDED_VIOLATIONS {
            cert.violations.push(ViolatingSet {
                members,
                neighbor_count: neighbors,
                requirement,
            });
        }
    }

    match mode {
        ExpansionMode::Exhaustive => {
            const MAX_N: usize = 20;
            if n > MAX_N {
                return Err(Error::TooLargeForExhaustive { n, max: MAX_N });
            }
            if n == 0 {
                return Ok(cert);
            }
            let counts = mask_neighbor_counts(graph)?;
            for (mask, &count) in counts.iter().enumerate().skip(1) {
                let s = mask.count_ones() as f64;
                let requirement = params.requirement(s, nf);
                cert.examined += 1;
                if (count as f64) < requirement {
                    record(&mut cert, mask_members(mask), count as usize, requirement);
                }
            }
        }
        ExpansionMode::Sampled {
            sizes,
            samples_per_size,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut pool: Vec<usize> = (0..n).collect();
            for &s in sizes {
                if s == 0 || s > n {
                    continue;
                }
                let requirement = params.requirement(s as f64, nf);
                for _ in 0..*samples_per_size {
                    let set = sample_subset(&mut rng, &mut pool, s);
                    let neighbors = graph.neighbors(&set).len();
                    cert.examined += 1;
                    if (neighbors as f64) < requirement {
                        record(&mut cert, set, neighbors, requirement);
                    }
                }
            }
        }
    }
    Ok(cert)
}

/// Census of failing sets: subsets with fewer distinct slots than the
/// penalty-adjusted requirement, and (exhaustively) the minimal ones whose
/// proper subsets all pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailingSetScan {
    pub exhaustive: bool,
    pub examined: u64,
    /// `failing_per_size[s]` counts failing sets of size `s` (index 0
    /// unused).
    pub failing_per_size: Vec<u64>,
    /// Minimal failing counts per size; only known in exhaustive mode.
    pub minimal_per_size: Option<Vec<u64>>,
    /// Up to eight witnessed sets: minimal ones when exhaustive, plain
    /// failing ones when sampled.
    pub examples: Vec<Vec<usize>>,
}

/// Scans subsets for the failing-set predicate. Exhaustive mode covers
/// `n <= 18` with a subset dynamic program for exact minimality.
pub fn failing_set_scan(
    graph: &BipartiteGraph,
    mode: &ExpansionMode,
    params: &PsParams,
) -> Result<FailingSetScan> {
    if params.d != graph.arity() {
        return Err(Error::Config(format!(
            "penalty parameters fix d = {} but the graph has d = {}",
            params.d,
            graph.arity()
        )));
    }
    let n = graph.left_count();
    let nf = n as f64;
    const EXAMPLE_CAP: usize = 8;

    match mode {
        ExpansionMode::Exhaustive => {
            const MAX_N: usize = 18;
            if n > MAX_N {
                return Err(Error::TooLargeForExhaustive { n, max: MAX_N });
            }
            let mut scan = FailingSetScan {
                exhaustive: true,
                examined: 0,
                failing_per_size: vec![0; n + 1],
                minimal_per_size: Some(vec![0; n + 1]),
                examples: Vec::new(),
            };
            if n == 0 {
                return Ok(scan);
            }
            let counts = mask_neighbor_counts(graph)?;
            let size = 1usize << n;
            let requirement: Vec<f64> = (0..=n)
                .map(|s| params.requirement(s as f64, nf))
                .collect();
            let mut failing = vec![false; size];
            // has_failing_subset[mask]: some subset of mask (itself
            // included) fails; built bottom-up over one-bit-removed
            // submasks.
            let mut has_failing_subset = vec![false; size];
            for mask in 1..size {
                let s = mask.count_ones() as usize;
                failing[mask] = (counts[mask] as f64) < requirement[s];
                let mut inherited = false;
                let mut rest = mask;
                while rest != 0 && !inherited {
                    let bit = rest & rest.wrapping_neg();
                    inherited |= has_failing_subset[mask ^ bit];
                    rest ^= bit;
                }
                has_failing_subset[mask] = failing[mask] || inherited;
                scan.examined += 1;
                if failing[mask] {
                    scan.failing_per_size[s] += 1;
                    if !inherited {
                        scan.minimal_per_size.as_mut().unwrap()[s] += 1;
                        if scan.examples.len() < EXAMPLE_CAP {
                            scan.examples.push(mask_members(mask));
                        }
                    }
                }
            }
            Ok(scan)
        }
        ExpansionMode::Sampled {
            sizes,
            samples_per_size,
            seed,
        } => {
            let mut scan = FailingSetScan {
                exhaustive: false,
                examined: 0,
                failing_per_size: vec![0; n + 1],
                minimal_per_size: None,
                examples: Vec::new(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut pool: Vec<usize> = (0..n).collect();
            for &s in sizes {
                if s == 0 || s > n {
                    continue;
                }
                let requirement = params.requirement(s as f64, nf);
                for _ in 0..*samples_per_size {
                    let set = sample_subset(&mut rng, &mut pool, s);
                    let neighbors = graph.neighbors(&set).len();
                    scan.examined += 1;
                    if (neighbors as f64) < requirement {
                        scan.failing_per_size[s] += 1;
                        if scan.examples.len() < EXAMPLE_CAP {
                            scan.examples.push(set);
                        }
                    }
                }
            }
            Ok(scan)
        }
    }
}

/// The deterministic growth recursion `s_0 = 1`,
/// `s_i = (d - 1 - p(s_(i-1))) s_(i-1)`, stopped at the first index with
/// `s_i > epsilon * n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSchedule {
    /// `s_0 ..= s_t`.
    pub steps: Vec<f64>,
    /// First index whose step exceeds `epsilon * n`.
    pub t: usize,
    /// Penalty at the stopping scale `epsilon * n`, the worst the
    /// recursion ever sees.
    pub gamma: f64,
    /// Closed-form step-count estimate
    /// `log_(d-1)(n) + ln(a) / ((d-1) ln(d-1-gamma)) * log_(d-1)(log_(d-1)(n))`;
    /// an upper-bound companion to `t`, `NaN` when `gamma >= d - 2`.
    pub t_formula: f64,
}

/// Runs the growth recursion. `n` is real-valued so that astronomically
/// large instance scales, where the penalty stays zero for many rounds,
/// remain expressible.
pub fn growth_schedule(params: &PsParams, epsilon: f64, n: f64) -> Result<GrowthSchedule> {
    if params.d < 3 {
        return Err(Error::Config(
            "growth schedule needs d >= 3".to_string(),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config("epsilon must lie in (0, 1)".to_string()));
    }
    if !n.is_finite() || n <= 1.0 {
        return Err(Error::Config("n must be a finite value above 1".to_string()));
    }
    const MAX_STEPS: usize = 100_000;
    // The recursion can also creep asymptotically toward the stall point
    // p = d - 2 without crossing it; treat a penalty within this margin as
    // stalled rather than iterating on vanishing increments.
    const STALL_MARGIN: f64 = 1e-9;
    let d = params.d as f64;
    let target = epsilon * n;
    let mut steps = vec![1.0f64];
    while *steps.last().unwrap() <= target {
        if steps.len() > MAX_STEPS {
            return Err(Error::Config(
                "growth schedule exceeded the step cap without reaching epsilon*n".to_string(),
            ));
        }
        let s = *steps.last().unwrap();
        let p = params.penalty(s, n);
        if p >= d - 2.0 - STALL_MARGIN {
            return Err(Error::ScheduleStalled {
                step: steps.len(),
                penalty: p,
            });
        }
        steps.push((d - 1.0 - p) * s);
    }
    let t = steps.len() - 1;

    let gamma = params.a.ln() / ((1.0 / epsilon).ln() - d.ln());
    let log_base = (d - 1.0).ln();
    let log_n = n.ln() / log_base;
    let t_formula = log_n
        + params.a.ln() / ((d - 1.0) * (d - 1.0 - gamma).ln()) * (log_n.ln() / log_base);
    Ok(GrowthSchedule {
        steps,
        t,
        gamma,
        t_formula,
    })
}

/// A sampled slot set whose left-neighbor count reached the logarithmic
/// bound `3 d ln(n/|Z|) |Z|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborBoundViolation {
    pub slots: Vec<usize>,
    pub left_neighbors: usize,
    pub bound: f64,
}

/// Samples slot sets `Z` of size at most `n/12` and reports any whose
/// left-neighbor count (elements with a candidate slot in `Z`) reaches
/// `3 d ln(n/|Z|) |Z|`.
pub fn upper_neighbor_check(
    graph: &BipartiteGraph,
    samples: usize,
    seed: u64,
) -> Vec<NeighborBoundViolation> {
    let n = graph.left_count();
    let m = graph.right_count();
    let d = graph.arity() as f64;
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let limit = (n / 12).max(1).min(m);

    // Slot -> distinct adjacent elements, so each sample costs the size of
    // the lists it touches rather than a full pass over the elements.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..n {
        let mut row: Vec<usize> = graph.slots_of(i).to_vec();
        row.sort_unstable();
        row.dedup();
        for y in row {
            members[y].push(i);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..m).collect();
    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;
    let mut violations = Vec::new();
    for _ in 0..samples {
        let size = rng.gen_range(1..=limit);
        let z = sample_subset(&mut rng, &mut pool, size);
        epoch += 1;
        let mut left = 0usize;
        for &y in &z {
            for &i in &members[y] {
                if stamp[i] != epoch {
                    stamp[i] = epoch;
                    left += 1;
                }
            }
        }
        let bound = 3.0 * d * (n as f64 / size as f64).ln() * size as f64;
        if left as f64 >= bound {
            violations.push(NeighborBoundViolation {
                slots: z,
                left_neighbors: left,
                bound,
            });
        }
    }
    violations
}
