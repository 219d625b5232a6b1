//! Experiment runner for d-ary cuckoo hashing.
//!
//! Every subcommand is deterministic in its arguments: the master seed
//! fixes all randomness, and the thread count only changes how fast the
//! answer arrives. Human-readable summaries go to stdout; CSV goes to the
//! path given with `--out`.
//!
//! Exit codes: 0 success, 2 bad configuration, 3 a search budget was
//! exhausted, 4 the run produced too little data to report.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dary_cuckoo::analysis::{
    choose_distance_cutoff, compute_bad_sets, expansion_check, BadSetParams, ExpansionMode,
    PsParams,
};
use dary_cuckoo::bench::{
    self, csv, run_build_experiment, run_strategy_comparison, run_tail_experiment,
    run_threshold_scan, ExperimentConfig,
};
use dary_cuckoo::graph::BipartiteGraph;
use dary_cuckoo::table::default_max_steps;
use dary_cuckoo::{
    CuckooTable, Error, HashFamily, InsertOutcome, InsertionStrategy, StrategyKind,
};

#[derive(Parser)]
#[command(
    name = "cuckoo-bench",
    version,
    about = "Build, measure, and analyze d-ary cuckoo hash tables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Random walk, all d choices every step.
    Rw,
    /// Random walk that never retries the index it was evicted from.
    RwNb,
    /// Deterministic shortest augmenting path.
    Bfs,
}

impl From<StrategyArg> for StrategyKind {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Rw => StrategyKind::RandomWalkBacktracking,
            StrategyArg::RwNb => StrategyKind::RandomWalkNonBacktracking,
            StrategyArg::Bfs => StrategyKind::BfsShortestPath,
        }
    }
}

/// Flags shared by every experiment that builds tables.
#[derive(Args)]
struct BuildArgs {
    /// Number of hash functions per element.
    #[arg(long, default_value_t = 4)]
    d: u32,
    /// Target load factor in (0, 1); slots are derived as m = ceil(n / load).
    #[arg(long, default_value_t = 0.9)]
    load: f64,
    /// Elements per table. `build` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',', default_value = "100000")]
    n: Vec<u64>,
    /// Independent seeded builds per point.
    #[arg(long, default_value_t = 10)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::RwNb)]
    strategy: StrategyArg,
    /// Reassignment budget per insertion; default is 50 * log2(m)^2.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Worker threads; default lets rayon decide.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write CSV here (summaries always go to stdout).
    #[arg(long)]
    out: Option<String>,
}

impl BuildArgs {
    fn to_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            self.d,
            self.load,
            0,
            self.trials,
            self.strategy.into(),
            self.seed,
        );
        cfg.n_values = self.n.clone();
        cfg.max_steps = self.max_steps;
        cfg.jobs = self.jobs;
        cfg
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Fill tables and record every insertion's walk length.
    Build(BuildArgs),
    /// Survival function of last-decile walk lengths at one size.
    Tail(BuildArgs),
    /// Fraction of seeds with a perfect matching, per load factor.
    Threshold {
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 0.85)]
        c_min: f64,
        #[arg(long, default_value_t = 0.99)]
        c_max: f64,
        #[arg(long, default_value_t = 0.01)]
        c_step: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Mean insertion cost of all three strategies on identical instances.
    Compare(BuildArgs),
    /// Structural reports for one seeded instance.
    Analyze {
        #[command(flatten)]
        build: BuildArgs,
        /// Distance-layer decomposition of the stored elements.
        #[arg(long)]
        bad_sets: bool,
        /// Sampled neighborhood-expansion certificate.
        #[arg(long)]
        expansion: bool,
        /// Short-cycle census of the element/slot graph.
        #[arg(long)]
        cycles: bool,
        /// Fraction of stored elements allowed beyond the distance cutoff.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Slack constant in the layer thresholds.
        #[arg(long, default_value_t = 10.0)]
        c0: f64,
        /// Random subsets drawn per size in the expansion check.
        #[arg(long, default_value_t = 200)]
        samples_per_size: usize,
        /// Count cycles up to this many edges.
        #[arg(long, default_value_t = 8)]
        max_cycle_len: usize,
        /// Work budget for the cycle search.
        #[arg(long, default_value_t = 100_000_000)]
        cycle_budget: u64,
    },
    /// Print a fresh instance's element/slot graph as text.
    ExportGraph {
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long, default_value_t = 0.9)]
        load: f64,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        Error::InsufficientData(_) => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn write_out(path: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// `m = ceil(n / load)` with the same validation as the experiments.
fn derive_slots(n: u64, load: f64) -> Result<usize, Error> {
    if !(load.is_finite() && 0.0 < load && load < 1.0) {
        return Err(Error::Config(format!(
            "load factor must lie strictly between 0 and 1, got {load}"
        )));
    }
    if n == 0 {
        return Err(Error::Config("table size must be positive".into()));
    }
    Ok((n as f64 / load).ceil() as usize)
}

/// Build one fully seeded instance for the analyze/export paths.
fn build_instance(args: &BuildArgs, n: u64) -> Result<CuckooTable, Error> {
    let m = derive_slots(n, args.load)?;
    let count = (args.load * m as f64).floor() as u64;
    let trial_seed = bench::derive_seed(args.seed, 0);
    let mut table = CuckooTable::new(m, args.d, bench::derive_seed(trial_seed, 0))?;
    let mut strategy =
        InsertionStrategy::new(args.strategy.into(), bench::derive_seed(trial_seed, 1));
    let max_steps = args.max_steps.unwrap_or_else(|| default_max_steps(m));
    for x in 0..count {
        let trace = table.insert(x, &mut strategy, max_steps)?;
        if trace.outcome == InsertOutcome::StepLimitExceeded {
            return Err(Error::InsufficientData(format!(
                "build died at insertion {x} of {count}; raise --max-steps or lower --load"
            )));
        }
    }
    Ok(table)
}

fn single_n(args: &BuildArgs) -> Result<u64, Error> {
    match args.n.as_slice() {
        [n] => Ok(*n),
        _ => Err(Error::Config(
            "this subcommand takes exactly one --n value".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Build(args) => {
            let mut cfg = args.to_config();
            cfg.keep_records = args.out.is_some();
            let exp = run_build_experiment(&cfg)?;
            print!("{}", exp.to_report());
            if let Some(path) = &args.out {
                write_out(path, |w| csv::write_build_records(w, &exp.records))?;
            }
            Ok(0)
        }
        Cmd::Tail(args) => {
            let cfg = args.to_config();
            let report = run_tail_experiment(&cfg)?;
            print!("{}", report.to_report());
            if let Some(path) = &args.out {
                write_out(path, |w| csv::write_tail_report(w, &report))?;
            }
            if report.insufficient {
                eprintln!(
                    "warning: only {} samples over {} rows; table is partial",
                    report.samples,
                    report.rows.len()
                );
                return Ok(4);
            }
            Ok(0)
        }
        Cmd::Threshold {
            d,
            n,
            trials,
            seed,
            jobs,
            c_min,
            c_max,
            c_step,
            out,
        } => {
            if !(c_step.is_finite() && c_step > 0.0) || c_min >= c_max {
                return Err(Error::Config(
                    "need c_min < c_max and a positive c_step".into(),
                ));
            }
            let mut grid = Vec::new();
            let mut i = 0u32;
            loop {
                let c = c_min + c_step * i as f64;
                if c > c_max + c_step * 1e-9 {
                    break;
                }
                grid.push(c);
                i += 1;
            }
            let scan = run_threshold_scan(d, n, &grid, trials, seed, jobs)?;
            print!("{}", scan.to_report());
            if let Some(path) = &out {
                write_out(path, |w| csv::write_threshold_scan(w, &scan))?;
            }
            Ok(0)
        }
        Cmd::Compare(args) => {
            let cfg = args.to_config();
            let cmp = run_strategy_comparison(&cfg)?;
            print!("{}", cmp.to_report());
            if let Some(path) = &args.out {
                write_out(path, |w| csv::write_comparison(w, &cmp))?;
            }
            Ok(0)
        }
        Cmd::Analyze {
            build,
            bad_sets,
            expansion,
            cycles,
            alpha,
            c0,
            samples_per_size,
            max_cycle_len,
            cycle_budget,
        } => {
            let n = single_n(&build)?;
            let all = !(bad_sets || expansion || cycles);
            let table = build_instance(&build, n)?;
            let mut out = String::new();
            if bad_sets || all {
                let cutoff = choose_distance_cutoff(&table, alpha)?;
                let params = BadSetParams {
                    c0,
                    alpha,
                    ..BadSetParams::default()
                };
                out.push_str(&compute_bad_sets(&table, &params, cutoff)?.to_report());
            }
            if expansion || all {
                let graph = BipartiteGraph::from_table(&table);
                let stored = graph.left_count();
                let mut sizes = Vec::new();
                let mut s = 1usize;
                while s <= stored / 4 && sizes.len() < 24 {
                    sizes.push(s);
                    s *= 2;
                }
                if sizes.is_empty() {
                    sizes.push(1);
                }
                let mode = ExpansionMode::Sampled {
                    sizes,
                    samples_per_size,
                    seed: bench::derive_seed(build.seed, 2),
                };
                let params = PsParams::refined(build.d);
                out.push_str(&expansion_check(&graph, &mode, &params)?.to_report());
            }
            if cycles || all {
                let graph = BipartiteGraph::from_table(&table);
                let census = graph.count_short_cycles(max_cycle_len, cycle_budget)?;
                out.push_str(&format!(
                    "cycles max_len={} total={}\n",
                    max_cycle_len, census.cycles
                ));
                for (l, &count) in census.by_length.iter().enumerate().skip(2) {
                    out.push_str(&format!("cycle_length={} count={}\n", 2 * l, count));
                }
                let touched = census.on_cycle.iter().filter(|&&b| b).count();
                out.push_str(&format!("elements_on_cycles={touched}\n"));
            }
            print!("{out}");
            if let Some(path) = &build.out {
                write_out(path, |w| w.write_all(out.as_bytes()))?;
            }
            Ok(0)
        }
        Cmd::ExportGraph {
            d,
            load,
            n,
            seed,
            out,
        } => {
            let m = derive_slots(n, load)?;
            let count = (load * m as f64).floor() as u64;
            let family = HashFamily::new(m, d, seed)?;
            let ids: Vec<u64> = (0..count).collect();
            let text = BipartiteGraph::from_family(&family, &ids).to_text();
            match &out {
                Some(path) => write_out(path, |w| w.write_all(text.as_bytes()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
