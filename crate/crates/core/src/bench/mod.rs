//! Reproducible experiment runners.
//!
//! Everything here is driven by a single master seed. Each trial derives
//! its own seed with [`derive_seed`], and from that seed the trial derives
//! independent seeds for the hash family and for the walk's random stream,
//! so any individual trial can be re-run in isolation. Trials are
//! distributed over a rayon pool but collected by index, which makes every
//! result, and every CSV byte, identical whether the run used one thread
//! or many.
//!
//! A build experiment fills a table of `m = ceil(n / c)` slots with
//! `floor(c * m)` sequentially numbered elements and records one
//! [`TrialRecord`] per insertion. A trial that hits the reassignment
//! budget stops at the failing insertion; its records stay in the output
//! but are excluded from the summary means and show up in the failure
//! rate instead.

pub mod csv;

use rayon::prelude::*;

use crate::hash::mix64;
use crate::table::{
    default_max_steps, expected_backtracking_ratio, CuckooTable, FirstStepRule, InsertOutcome,
    InsertionStrategy, StrategyKind,
};
use crate::{graph::BipartiteGraph, Error, HashFamily, Result};

/// Substream tags for the per-trial seeds.
const TABLE_STREAM: u64 = 0;
const WALK_STREAM: u64 = 1;

/// Tail rows are reported only while at least this many walks survive;
/// deeper empirical survival probabilities are too noisy to publish.
pub const MIN_TAIL_HITS: u64 = 10;

/// Below this many pooled walk lengths a tail report is flagged
/// insufficient.
const MIN_TAIL_SAMPLES: u64 = 100;

/// Half-width multiplier of the normal-approximation binomial confidence
/// interval used in tail rows (95% two-sided).
const TAIL_CI_Z: f64 = 1.96;

/// Deterministic seed for substream `stream` of a master seed.
///
/// Both arguments go through the SplitMix64 finalizer, so consecutive
/// stream numbers give decorrelated seeds without any shared RNG state.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix64(master ^ mix64(stream))
}

fn trial_stream(point: usize, trial: u32) -> u64 {
    ((point as u64) << 32) | trial as u64
}

/// Stable token for a strategy, used in CSV output and on the command
/// line.
pub fn strategy_label(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::RandomWalkBacktracking => "rw",
        StrategyKind::RandomWalkNonBacktracking => "rw-nb",
        StrategyKind::BfsShortestPath => "bfs",
    }
}

/// Inverse of [`strategy_label`].
pub fn parse_strategy(s: &str) -> Option<StrategyKind> {
    match s {
        "rw" => Some(StrategyKind::RandomWalkBacktracking),
        "rw-nb" => Some(StrategyKind::RandomWalkNonBacktracking),
        "bfs" => Some(StrategyKind::BfsShortestPath),
        _ => None,
    }
}

/// Parameters shared by the build, tail, and comparison experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub d: u32,
    /// Target load factor in `(0, 1)`. Slot and element counts are derived
    /// per point: `m = ceil(n / load)`, inserted count `floor(load * m)`.
    pub load: f64,
    /// Table sizes (element counts) to run, one summary point each.
    pub n_values: Vec<u64>,
    /// Independent builds per point.
    pub trials: u32,
    pub strategy: StrategyKind,
    pub first_step: FirstStepRule,
    /// Reassignment budget per insertion; `None` uses
    /// [`default_max_steps`] of the slot count.
    pub max_steps: Option<usize>,
    pub master_seed: u64,
    /// Rayon thread count; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// When false, per-insertion records are dropped after summarizing,
    /// which keeps large builds out of memory. CSV export needs them.
    pub keep_records: bool,
}

impl ExperimentConfig {
    pub fn new(
        d: u32,
        load: f64,
        n: u64,
        trials: u32,
        strategy: StrategyKind,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            d,
            load,
            n_values: vec![n],
            trials,
            strategy,
            first_step: FirstStepRule::default(),
            max_steps: None,
            master_seed,
            jobs: None,
            keep_records: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::ArityTooSmall(self.d));
        }
        if !self.load.is_finite() || self.load <= 0.0 || self.load >= 1.0 {
            return Err(Error::Config(format!(
                "load factor must lie strictly between 0 and 1, got {}",
                self.load
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config("at least one table size is required".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("table sizes must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn single_n(&self, what: &str) -> Result<u64> {
        match self.n_values.as_slice() {
            [n] => Ok(*n),
            _ => Err(Error::Config(format!(
                "{what} takes exactly one table size, got {}",
                self.n_values.len()
            ))),
        }
    }
}

/// `m = ceil(n / c)`.
fn slots_for(n: u64, load: f64) -> u64 {
    (n as f64 / load).ceil() as u64
}

/// Number of elements actually inserted, `floor(c * m)`. Always at least
/// `n` because `c * m >= n`.
fn inserts_for(m: u64, load: f64) -> u64 {
    (load * m as f64).floor() as u64
}

/// One insertion of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    /// The trial's derived seed; all randomness in the trial follows from
    /// it.
    pub seed: u64,
    pub d: u32,
    /// Configured element count of the point this trial belongs to.
    pub n: u64,
    pub m: u64,
    /// Realized load after rounding, `floor(c * m) / m`.
    pub c_actual: f64,
    /// 0-based position of this insertion within its trial.
    pub insertion_index: u64,
    /// Steps of the walk that displaced an occupant, the cost measure.
    pub reassignments: u64,
    pub outcome: InsertOutcome,
    /// Placements performed, including the final free placement on
    /// success; equals `reassignments + 1` for successful insertions.
    pub budget_used: u64,
}

/// Exact running moments of a set of insertion costs. Integer sums keep
/// the statistics deterministic and free of accumulation order effects.
#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    k: u64,
    sum: u128,
    sum_sq: u128,
}

impl Accum {
    fn push(&mut self, x: u64) {
        self.k += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    fn merge(&mut self, other: &Accum) {
        self.k += other.k;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn mean(&self) -> Option<f64> {
        (self.k > 0).then(|| self.sum as f64 / self.k as f64)
    }

    /// Standard error of the mean with the k-1 variance denominator.
    fn se(&self) -> Option<f64> {
        if self.k < 2 {
            return None;
        }
        let k = self.k as f64;
        let mean = self.sum as f64 / k;
        let var = (self.sum_sq as f64 - k * mean * mean) / (k - 1.0);
        Some((var.max(0.0) / k).sqrt())
    }
}

/// Summary of one `(n, m)` point of a build experiment. Means cover only
/// successful trials; failed trials are counted in `failure_rate`.
#[derive(Debug, Clone)]
pub struct PointSummary {
    pub n: u64,
    pub m: u64,
    /// Elements inserted per trial.
    pub count: u64,
    pub c_actual: f64,
    pub trials: u32,
    pub failed_trials: u32,
    pub failure_rate: f64,
    /// Insertions contributing to `mean`/`se`.
    pub samples: u64,
    pub mean: Option<f64>,
    pub se: Option<f64>,
    /// Same statistics restricted to insertion indices at or above
    /// `ceil(0.9 * count)`, the high-load end of the build.
    pub last_decile_samples: u64,
    pub last_decile_mean: Option<f64>,
    pub last_decile_se: Option<f64>,
}

/// Results of [`run_build_experiment`].
#[derive(Debug, Clone)]
pub struct BuildExperiment {
    pub d: u32,
    pub strategy: StrategyKind,
    pub points: Vec<PointSummary>,
    /// All per-insertion records, sorted by `(seed, insertion_index)`.
    /// Empty when the config asked not to keep them.
    pub records: Vec<TrialRecord>,
}

fn opt_stat(x: Option<f64>) -> String {
    x.map(csv::fmt_f64).unwrap_or_else(|| "na".into())
}

impl BuildExperiment {
    /// Plain-text summary, one `key=value` line block per point.
    pub fn to_report(&self) -> String {
        let mut out = format!(
            "build d={} strategy={} points={}\n",
            self.d,
            strategy_label(self.strategy),
            self.points.len()
        );
        for p in &self.points {
            out.push_str(&format!(
                "point n={} m={} count={} c_actual={} trials={} failed={} failure_rate={} \
                 samples={} mean={} se={} last_decile_samples={} last_decile_mean={} \
                 last_decile_se={}\n",
                p.n,
                p.m,
                p.count,
                csv::fmt_f64(p.c_actual),
                p.trials,
                p.failed_trials,
                csv::fmt_f64(p.failure_rate),
                p.samples,
                opt_stat(p.mean),
                opt_stat(p.se),
                p.last_decile_samples,
                opt_stat(p.last_decile_mean),
                opt_stat(p.last_decile_se),
            ));
        }
        out
    }
}

/// Everything a single build trial produces.
struct TrialOutput {
    records: Vec<TrialRecord>,
    failed: bool,
    /// Moments over all insertions of the trial (only used if it
    /// succeeded).
    all: Accum,
    /// Raw walk lengths of the last-decile insertions, for tail pooling.
    last_decile: Vec<u64>,
}

struct PointGeometry {
    n: u64,
    m: u64,
    count: u64,
    c_actual: f64,
    /// First insertion index of the last decile, `ceil(0.9 * count)`.
    decile_lo: u64,
}

fn point_geometry(n: u64, load: f64) -> PointGeometry {
    let m = slots_for(n, load);
    let count = inserts_for(m, load);
    PointGeometry {
        n,
        m,
        count,
        c_actual: count as f64 / m as f64,
        decile_lo: (9 * count).div_ceil(10),
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    geo: &PointGeometry,
    trial_seed: u64,
    kind: StrategyKind,
) -> Result<TrialOutput> {
    let table_seed = derive_seed(trial_seed, TABLE_STREAM);
    let walk_seed = derive_seed(trial_seed, WALK_STREAM);
    let mut table = CuckooTable::new(geo.m as usize, cfg.d, table_seed)?;
    let mut strategy = InsertionStrategy::new(kind, walk_seed).with_first_step(cfg.first_step);
    let max_steps = cfg
        .max_steps
        .unwrap_or_else(|| default_max_steps(geo.m as usize));

    let mut out = TrialOutput {
        records: Vec::new(),
        failed: false,
        all: Accum::default(),
        last_decile: Vec::new(),
    };
    if cfg.keep_records {
        out.records.reserve(geo.count as usize);
    }
    for i in 0..geo.count {
        let trace = table.insert(i, &mut strategy, max_steps)?;
        let reassignments = trace.reassignments as u64;
        if cfg.keep_records {
            out.records.push(TrialRecord {
                seed: trial_seed,
                d: cfg.d,
                n: geo.n,
                m: geo.m,
                c_actual: geo.c_actual,
                insertion_index: i,
                reassignments,
                outcome: trace.outcome,
                budget_used: trace.steps.len() as u64,
            });
        }
        if trace.outcome == InsertOutcome::StepLimitExceeded {
            out.failed = true;
            break;
        }
        out.all.push(reassignments);
        if i >= geo.decile_lo {
            out.last_decile.push(reassignments);
        }
    }
    Ok(out)
}

/// Run `f` on a dedicated rayon pool of `jobs` threads, or on the global
/// pool when `jobs` is `None`.
fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::Config("jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Config(format!("failed to build thread pool: {e}")))?
            .install(f),
    }
}

fn run_point_trials(
    cfg: &ExperimentConfig,
    geo: &PointGeometry,
    point_index: usize,
    kind: StrategyKind,
) -> Result<Vec<TrialOutput>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.master_seed, trial_stream(point_index, t));
            run_trial(cfg, geo, seed, kind)
        })
        .collect()
}

fn summarize_point(cfg: &ExperimentConfig, geo: &PointGeometry, trials: &[TrialOutput]) -> PointSummary {
    let mut all = Accum::default();
    let mut decile = Accum::default();
    let mut failed = 0u32;
    for t in trials {
        if t.failed {
            failed += 1;
            continue;
        }
        all.merge(&t.all);
        for &x in &t.last_decile {
            decile.push(x);
        }
    }
    PointSummary {
        n: geo.n,
        m: geo.m,
        count: geo.count,
        c_actual: geo.c_actual,
        trials: cfg.trials,
        failed_trials: failed,
        failure_rate: failed as f64 / cfg.trials as f64,
        samples: all.k,
        mean: all.mean(),
        se: all.se(),
        last_decile_samples: decile.k,
        last_decile_mean: decile.mean(),
        last_decile_se: decile.se(),
    }
}

/// Build tables at every configured size and summarize insertion costs.
pub fn run_build_experiment(cfg: &ExperimentConfig) -> Result<BuildExperiment> {
    cfg.validate()?;
    with_pool(cfg.jobs, || {
        let mut points = Vec::with_capacity(cfg.n_values.len());
        let mut records = Vec::new();
        for (pi, &n) in cfg.n_values.iter().enumerate() {
            let geo = point_geometry(n, cfg.load);
            let mut trials = run_point_trials(cfg, &geo, pi, cfg.strategy)?;
            points.push(summarize_point(cfg, &geo, &trials));
            for t in &mut trials {
                records.append(&mut t.records);
            }
        }
        records.sort_by_key(|r| (r.seed, r.insertion_index));
        Ok(BuildExperiment {
            d: cfg.d,
            strategy: cfg.strategy,
            points,
            records,
        })
    })
}

/// One row of a tail report: walks of the last decile that ran for at
/// least `ell` reassignments.
#[derive(Debug, Clone, Copy)]
pub struct TailRow {
    pub ell: u64,
    pub survivors: u64,
    /// Empirical survival probability `survivors / samples`.
    pub survival: f64,
    /// Normal-approximation 95% binomial interval, clamped to `[0, 1]`.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Survival table of last-decile walk lengths.
#[derive(Debug, Clone)]
pub struct TailReport {
    pub d: u32,
    pub n: u64,
    pub m: u64,
    pub count: u64,
    pub c_actual: f64,
    pub strategy: StrategyKind,
    pub trials: u32,
    pub failed_trials: u32,
    /// Pooled last-decile insertions from successful trials.
    pub samples: u64,
    /// Rows for `ell = 0, 1, ...` while at least [`MIN_TAIL_HITS`] walks
    /// survive.
    pub rows: Vec<TailRow>,
    /// Least-squares slope of `ln(-ln S)` against `ln ell` over the
    /// reported rows, when fittable.
    pub slope: Option<f64>,
    /// Set when there are too few samples or rows for the table to mean
    /// much; the rows that are present are still exact.
    pub insufficient: bool,
}

impl TailReport {
    pub fn to_report(&self) -> String {
        format!(
            "tail d={} n={} m={} count={} c_actual={} strategy={} trials={} failed={} \
             samples={} rows={} deepest={} slope={} insufficient={}\n",
            self.d,
            self.n,
            self.m,
            self.count,
            csv::fmt_f64(self.c_actual),
            strategy_label(self.strategy),
            self.trials,
            self.failed_trials,
            self.samples,
            self.rows.len(),
            self.rows.last().map(|r| r.ell).unwrap_or(0),
            opt_stat(self.slope),
            self.insufficient,
        )
    }
}

/// Least-squares slope of `y` on `x`; `None` without two distinct `x`
/// values.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Slope of `ln(-ln S(ell))` against `ln ell` over rows with
/// `ell >= 1` and `0 < S < 1`.
pub fn fit_loglog_slope(rows: &[TailRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.ell >= 1 && r.survival > 0.0 && r.survival < 1.0)
        .map(|r| ((r.ell as f64).ln(), (-r.survival.ln()).ln()))
        .collect();
    least_squares_slope(&pts)
}

fn tail_rows(lengths: &[u64]) -> Vec<TailRow> {
    let samples = lengths.len() as u64;
    if samples == 0 {
        return Vec::new();
    }
    let max = *lengths.iter().max().expect("nonempty") as usize;
    let mut counts = vec![0u64; max + 1];
    for &x in lengths {
        counts[x as usize] += 1;
    }
    let mut rows = Vec::new();
    let mut survivors = samples;
    for ell in 0..=max as u64 {
        if survivors < MIN_TAIL_HITS {
            break;
        }
        let p = survivors as f64 / samples as f64;
        let half = TAIL_CI_Z * (p * (1.0 - p) / samples as f64).sqrt();
        rows.push(TailRow {
            ell,
            survivors,
            survival: p,
            ci_low: (p - half).max(0.0),
            ci_high: (p + half).min(1.0),
        });
        survivors -= counts[ell as usize];
    }
    rows
}

/// Pool last-decile walk lengths over all trials of a single point and
/// tabulate their survival function.
pub fn run_tail_experiment(cfg: &ExperimentConfig) -> Result<TailReport> {
    cfg.validate()?;
    let n = cfg.single_n("a tail experiment")?;
    with_pool(cfg.jobs, || {
        let geo = point_geometry(n, cfg.load);
        let trials = run_point_trials(cfg, &geo, 0, cfg.strategy)?;
        let mut lengths = Vec::new();
        let mut failed = 0u32;
        for t in &trials {
            if t.failed {
                failed += 1;
            } else {
                lengths.extend_from_slice(&t.last_decile);
            }
        }
        let rows = tail_rows(&lengths);
        let slope = fit_loglog_slope(&rows);
        let samples = lengths.len() as u64;
        Ok(TailReport {
            d: cfg.d,
            n,
            m: geo.m,
            count: geo.count,
            c_actual: geo.c_actual,
            strategy: cfg.strategy,
            trials: cfg.trials,
            failed_trials: failed,
            samples,
            insufficient: samples < MIN_TAIL_SAMPLES || rows.len() < 3 || slope.is_none(),
            rows,
            slope,
        })
    })
}

/// One load-factor grid point of a threshold scan.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdPoint {
    pub c: f64,
    pub m: u64,
    pub count: u64,
    /// Seeds whose element/slot graph had a perfect matching.
    pub successes: u32,
    pub fraction: f64,
}

/// Fraction of seeds admitting a perfect matching, per load factor.
#[derive(Debug, Clone)]
pub struct ThresholdScan {
    pub d: u32,
    pub n: u64,
    pub trials: u32,
    pub points: Vec<ThresholdPoint>,
    /// Load factor where the fraction crosses 1/2, linearly interpolated
    /// between the first adjacent grid pair that brackets it from above.
    pub crossing: Option<f64>,
}

impl ThresholdScan {
    pub fn to_report(&self) -> String {
        let mut out = format!(
            "threshold d={} n={} trials={} crossing={}\n",
            self.d,
            self.n,
            self.trials,
            opt_stat(self.crossing)
        );
        for p in &self.points {
            out.push_str(&format!(
                "point c={} m={} count={} successes={} fraction={}\n",
                csv::fmt_f64(p.c),
                p.m,
                p.count,
                p.successes,
                csv::fmt_f64(p.fraction)
            ));
        }
        out
    }
}

fn interpolate_crossing(points: &[ThresholdPoint]) -> Option<f64> {
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.fraction >= 0.5 && b.fraction < 0.5 {
            let t = (a.fraction - 0.5) / (a.fraction - b.fraction);
            return Some(a.c + t * (b.c - a.c));
        }
    }
    None
}

/// For each load factor in `grid`, estimate the probability that a random
/// instance with `n` elements still has a perfect matching, then locate
/// the 1/2-crossing.
pub fn run_threshold_scan(
    d: u32,
    n: u64,
    grid: &[f64],
    trials: u32,
    master_seed: u64,
    jobs: Option<usize>,
) -> Result<ThresholdScan> {
    if d < 2 {
        return Err(Error::ArityTooSmall(d));
    }
    if n == 0 {
        return Err(Error::Config("table size must be positive".into()));
    }
    if n > 1_000_000 {
        return Err(Error::Config(format!(
            "threshold scans are matching-bound; keep n at or below 10^6 (got {n})"
        )));
    }
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if grid.is_empty() {
        return Err(Error::Config("load factor grid is empty".into()));
    }
    if grid
        .iter()
        .any(|&c| !c.is_finite() || c <= 0.0 || c >= 1.0)
    {
        return Err(Error::Config(
            "grid load factors must lie strictly between 0 and 1".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "grid load factors must be strictly increasing".into(),
        ));
    }
    with_pool(jobs, || {
        let mut points = Vec::with_capacity(grid.len());
        for (pi, &c) in grid.iter().enumerate() {
            let geo = point_geometry(n, c);
            let ids: Vec<u64> = (0..geo.count).collect();
            let successes: u32 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(master_seed, trial_stream(pi, t));
                    let family = HashFamily::new(geo.m as usize, d, seed)?;
                    let graph = BipartiteGraph::from_family(&family, &ids);
                    Ok(u32::from(graph.maximum_matching().is_perfect))
                })
                .collect::<Result<Vec<u32>>>()?
                .into_iter()
                .sum();
            points.push(ThresholdPoint {
                c,
                m: geo.m,
                count: geo.count,
                successes,
                fraction: successes as f64 / trials as f64,
            });
        }
        let crossing = interpolate_crossing(&points);
        Ok(ThresholdScan {
            d,
            n,
            trials,
            points,
            crossing,
        })
    })
}

/// Per-strategy statistics of a comparison run.
#[derive(Debug, Clone, Copy)]
pub struct StrategyStats {
    pub strategy: StrategyKind,
    pub trials: u32,
    pub failed_trials: u32,
    pub samples: u64,
    pub mean: Option<f64>,
    pub se: Option<f64>,
}

/// Mean insertion cost of all three strategies on identical instances.
#[derive(Debug, Clone)]
pub struct StrategyComparison {
    pub d: u32,
    pub n: u64,
    pub m: u64,
    pub count: u64,
    pub c_actual: f64,
    pub trials: u32,
    /// In `strategy_label` order: rw, rw-nb, bfs.
    pub stats: Vec<StrategyStats>,
    /// Backtracking mean over non-backtracking mean.
    pub measured_ratio: Option<f64>,
    /// The exact expected value of that ratio, `(d + 1) / (d - 1)`.
    pub predicted_ratio: f64,
}

impl StrategyComparison {
    pub fn to_report(&self) -> String {
        let mut out = format!(
            "compare d={} n={} m={} count={} c_actual={} trials={}\n",
            self.d,
            self.n,
            self.m,
            self.count,
            csv::fmt_f64(self.c_actual),
            self.trials
        );
        for s in &self.stats {
            out.push_str(&format!(
                "strategy {} failed={} samples={} mean={} se={}\n",
                strategy_label(s.strategy),
                s.failed_trials,
                s.samples,
                opt_stat(s.mean),
                opt_stat(s.se)
            ));
        }
        out.push_str(&format!(
            "ratio measured={} predicted={}\n",
            opt_stat(self.measured_ratio),
            csv::fmt_f64(self.predicted_ratio)
        ));
        out
    }
}

/// Run the same build under all three strategies. Trial seeds depend only
/// on the trial index, so every strategy sees the same hash families and
/// the same insertion order; `cfg.strategy` is ignored.
pub fn run_strategy_comparison(cfg: &ExperimentConfig) -> Result<StrategyComparison> {
    cfg.validate()?;
    let n = cfg.single_n("a strategy comparison")?;
    with_pool(cfg.jobs, || {
        let geo = point_geometry(n, cfg.load);
        let kinds = [
            StrategyKind::RandomWalkBacktracking,
            StrategyKind::RandomWalkNonBacktracking,
            StrategyKind::BfsShortestPath,
        ];
        let mut stats = Vec::with_capacity(kinds.len());
        for kind in kinds {
            let trials = run_point_trials(cfg, &geo, 0, kind)?;
            let mut all = Accum::default();
            let mut failed = 0u32;
            for t in &trials {
                if t.failed {
                    failed += 1;
                } else {
                    all.merge(&t.all);
                }
            }
            stats.push(StrategyStats {
                strategy: kind,
                trials: cfg.trials,
                failed_trials: failed,
                samples: all.k,
                mean: all.mean(),
                se: all.se(),
            });
        }
        let measured_ratio = match (stats[0].mean, stats[1].mean) {
            (Some(bt), Some(nbt)) if nbt > 0.0 => Some(bt / nbt),
            _ => None,
        };
        let (num, den) = expected_backtracking_ratio(cfg.d)?;
        Ok(StrategyComparison {
            d: cfg.d,
            n,
            m: geo.m,
            count: geo.count,
            c_actual: geo.c_actual,
            trials: cfg.trials,
            stats,
            measured_ratio,
            predicted_ratio: num as f64 / den as f64,
        })
    })
}
