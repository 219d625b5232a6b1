//! End-to-end checks over the headline numbers: threshold locations, walk
//! cost ratios, size-independence of insertion cost, tail shape, and the
//! agreement between the analysis tools and independent oracles. Each test
//! prints one `ACCEPTANCE` line so a full run reads as a checklist.
//!
//! Run with `--nocapture` to see the lines for passing tests too.

mod common;

use std::collections::BTreeMap;

use dary_cuckoo::analysis::badsets::{choose_distance_cutoff, compute_bad_sets, BadSetParams};
use dary_cuckoo::analysis::stirling::{big_ln, stirling_exact, stirling_moser_wyman};
use dary_cuckoo::analysis::walks::forward_walk_set;
use dary_cuckoo::bench::{
    csv, run_build_experiment, run_strategy_comparison, run_threshold_scan, ExperimentConfig,
};
use dary_cuckoo::graph::{BipartiteGraph, WitnessSearch};
use dary_cuckoo::table::FirstStepRule;
use dary_cuckoo::{CuckooTable, HashFamily, InsertOutcome, InsertionStrategy, StrategyKind};

fn verdict(num: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {num:02} {name}: {tag} ({detail})");
    assert!(pass, "{name}: {detail}");
}

fn build_table(m: usize, d: u32, seed: u64, fill: u64) -> CuckooTable {
    let mut table = CuckooTable::new(m, d, seed).unwrap();
    let mut strategy = InsertionStrategy::new(StrategyKind::RandomWalkNonBacktracking, 1);
    for x in 0..fill {
        let trace = table.insert(x, &mut strategy, 1000).unwrap();
        assert_eq!(trace.outcome, InsertOutcome::Success, "setup fill");
    }
    table
}

#[test]
fn a01_threshold_crossings() {
    let grid3: Vec<f64> = (0..7).map(|k| 0.906 + 0.004 * k as f64).collect();
    let grid4: Vec<f64> = (0..7).map(|k| 0.965 + 0.004 * k as f64).collect();
    let scan3 = run_threshold_scan(3, 100_000, &grid3, 200, 4101, None).unwrap();
    let scan4 = run_threshold_scan(4, 100_000, &grid4, 200, 4102, None).unwrap();
    let c3 = scan3.crossing.unwrap_or(f64::NAN);
    let c4 = scan4.crossing.unwrap_or(f64::NAN);
    let ok3 = (0.908..=0.928).contains(&c3);
    let ok4 = (0.967..=0.987).contains(&c4);
    verdict(
        1,
        "load-threshold crossings",
        ok3 && ok4,
        &format!(
            "d=3 crossing {c3:.4} in [0.908, 0.928]: {ok3}; d=4 crossing {c4:.4} in [0.967, 0.987]: {ok4}"
        ),
    );
}

#[test]
fn a02_backtracking_cost_ratio() {
    let cfg = ExperimentConfig::new(
        4,
        0.5,
        10_000,
        2,
        StrategyKind::RandomWalkBacktracking,
        4201,
    );
    let cmp = run_strategy_comparison(&cfg).unwrap();
    for s in &cmp.stats {
        assert!(s.samples >= 10_000, "need 10^4 insertions per strategy");
        assert_eq!(s.failed_trials, 0);
    }
    let measured = cmp.measured_ratio.unwrap_or(f64::NAN);
    let predicted = cmp.predicted_ratio;
    // The walk we actually run resamples uniformly among the candidates on
    // every step, including right after an undo; its overhead works out to
    // d/(d-1), not the advertised (d+1)/(d-1), and we report the honest
    // measurement rather than tuning the walk to hit the constant.
    let pass = (measured / predicted - 1.0).abs() <= 0.05;
    verdict(
        2,
        "backtracking cost ratio",
        pass,
        &format!(
            "measured rw/rw-nb {measured:.4}, required within 5% of {predicted:.4}; \
             uniform resampling predicts d/(d-1) = {:.4}",
            4.0 / 3.0
        ),
    );
}

#[test]
fn a03_insertion_cost_flat_in_table_size() {
    let runs: [(u64, u32); 3] = [(10_000, 10), (100_000, 2), (1_000_000, 1)];
    let mut details = Vec::new();
    let mut pass = true;
    for kind in [
        StrategyKind::RandomWalkNonBacktracking,
        StrategyKind::BfsShortestPath,
    ] {
        let mut means = Vec::new();
        for &(n, trials) in &runs {
            let mut cfg = ExperimentConfig::new(4, 0.9, n, trials, kind, 99);
            cfg.keep_records = false;
            let exp = run_build_experiment(&cfg).unwrap();
            let point = &exp.points[0];
            assert_eq!(point.failed_trials, 0);
            assert!(
                point.last_decile_samples >= 10_000,
                "need 10^4 decile samples at n={n}"
            );
            means.push(point.last_decile_mean.unwrap());
        }
        let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = means.iter().cloned().fold(0.0, f64::max);
        let spread = hi / lo - 1.0;
        pass &= spread < 0.10;
        details.push(format!(
            "{kind:?} decile means {:.4}/{:.4}/{:.4} spread {:.1}%",
            means[0],
            means[1],
            means[2],
            spread * 100.0
        ));
    }
    verdict(
        3,
        "insertion cost flat in table size",
        pass,
        &format!("{} (allowed 10%)", details.join("; ")),
    );
}

#[test]
fn a04_walk_length_tail_decay() {
    let cfg = ExperimentConfig::new(
        4,
        0.9,
        100_000,
        10,
        StrategyKind::RandomWalkNonBacktracking,
        17,
    );
    let exp = run_build_experiment(&cfg).unwrap();
    assert_eq!(exp.points[0].failed_trials, 0);
    let lengths: Vec<u64> = exp.records.iter().map(|r| r.reassignments).collect();
    let n = lengths.len() as f64;
    let max_len = lengths.iter().copied().max().unwrap() as usize;
    // suffix[l] = number of walks with at least l reassignments
    let mut suffix = vec![0u64; max_len + 2];
    for &l in &lengths {
        suffix[l as usize] += 1;
    }
    for l in (0..=max_len).rev() {
        suffix[l] += suffix[l + 1];
    }
    let survival = |l: usize| suffix.get(l).copied().unwrap_or(0) as f64 / n;

    let s50 = survival(50);
    let small_tail = s50 < 1e-2;

    // Per-step decay rates over dyadic brackets must not increase, the
    // discrete form of log-convexity.
    let mut rates = Vec::new();
    let mut k = 0;
    while (1usize << (k + 1)) <= max_len && suffix[1 << (k + 1)] >= 10 {
        let (a, b) = (1usize << k, 1usize << (k + 1));
        rates.push((survival(a).ln() - survival(b).ln()) / (b - a) as f64);
        k += 1;
    }
    let convex = rates.len() >= 4 && rates.windows(2).all(|w| w[1] <= w[0] * 1.02);

    // Super-polynomial decay: the log-log slope steepens between the
    // shallow and deep halves of the measured range.
    let pts: Vec<(f64, f64)> = (1..=max_len)
        .filter(|&l| suffix[l] >= 10)
        .map(|l| ((l as f64).ln(), survival(l).ln()))
        .collect();
    let mid = pts[pts.len() / 2].0;
    let slope = |ps: &[(f64, f64)]| {
        let m = ps.len() as f64;
        let sx: f64 = ps.iter().map(|p| p.0).sum();
        let sy: f64 = ps.iter().map(|p| p.1).sum();
        let sxx: f64 = ps.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = ps.iter().map(|p| p.0 * p.1).sum();
        (m * sxy - sx * sy) / (m * sxx - sx * sx)
    };
    let shallow: Vec<_> = pts.iter().copied().filter(|p| p.0 < mid).collect();
    let deep: Vec<_> = pts.iter().copied().filter(|p| p.0 >= mid).collect();
    let (s_shallow, s_deep) = (slope(&shallow), slope(&deep));
    let steepens = s_deep <= s_shallow - 1.0;

    verdict(
        4,
        "walk length tail decay",
        small_tail && convex && steepens,
        &format!(
            "{} walks; S(50) = {s50:.2e} (< 1e-2: {small_tail}); dyadic decay rates \
             {:.3}..{:.3} non-increasing: {convex}; log-log slope {s_shallow:.2} -> {s_deep:.2} \
             steepens: {steepens}",
            lengths.len(),
            rates.first().unwrap_or(&f64::NAN),
            rates.last().unwrap_or(&f64::NAN),
        ),
    );
}

#[test]
fn a05_matching_and_hall_against_brute_force() {
    let mut checked = 0u32;
    let mut mismatches = 0u32;
    for s in 0..1000u64 {
        let n = 1 + (s % 12) as usize;
        let m = 3 + ((s / 12) % 12) as usize;
        let family = HashFamily::new(m, 3, 5000 + s).unwrap();
        let elements: Vec<u64> = (0..n as u64).collect();
        let adj: Vec<Vec<usize>> = elements
            .iter()
            .map(|&x| family.slots(x).collect())
            .collect();
        let graph = BipartiteGraph::from_family(&family, &elements);
        let matching = graph.maximum_matching();
        let brute = common::brute_max_matching(&adj, m);
        let witness = graph
            .hall_violation_search(WitnessSearch::Exhaustive)
            .unwrap();
        let mut ok = matching.size == brute;
        ok &= matching.is_perfect == (matching.size == n);
        // Hall's condition holds exactly when the matching is perfect.
        ok &= witness.is_none() == matching.is_perfect;
        if let Some(w) = &witness {
            ok &= graph.neighbors(w).len() < w.len();
        }
        checked += 1;
        if !ok {
            mismatches += 1;
        }
    }
    verdict(
        5,
        "matching and Hall witnesses match brute force",
        mismatches == 0,
        &format!("{checked} random instances, {mismatches} discrepancies"),
    );
}

/// Frozen by `regenerate_chain_pins`: tiny tables where the exact expected
/// walk length is solvable from the absorbing chain over configurations.
/// `(seed, m, fill, expected rw, expected rw-nb)` with `x = 99` inserted.
const CHAIN_PINS: &[(u64, usize, u64, f64, f64)] = &[
    (0, 4, 2, 7.294117647059, 4.296296296296),
    (2, 4, 2, 5.529411764706, 3.703703703704),
    (2, 5, 3, 3.732394366197, 2.459112577924),
    (3, 5, 3, 3.548387096774, 1.750000000000),
    (0, 6, 4, 2.500000000000, 1.714285714286),
    (2, 6, 4, 7.884578079534, 4.487372696768),
];

#[test]
fn a06_walk_cost_matches_exact_chain_on_pinned_tables() {
    assert!(CHAIN_PINS.len() >= 5, "need at least five pinned tables");
    let mut details = Vec::new();
    let mut pass = true;
    for &(seed, m, fill, e_rw, e_nb) in CHAIN_PINS {
        let table = build_table(m, 3, seed, fill);
        let x = 99;
        assert!(table.lookup(x).is_none());
        let inst = common::tiny_instance_from_table(&table, x);
        for (kind, expected) in [
            (StrategyKind::RandomWalkBacktracking, e_rw),
            (StrategyKind::RandomWalkNonBacktracking, e_nb),
        ] {
            let exact = common::markov_expected_steps(&inst, kind, FirstStepRule::AllChoices)
                .expect("pinned chain absorbs");
            assert!(
                (exact - expected).abs() < 1e-9,
                "chain solve drifted on seed {seed}: {exact} vs {expected}"
            );
            let (mean, se) = common::simulate_insertion_mean(&table, x, kind, 100_000, 4600 + seed);
            let dev = (mean - exact).abs() / se.max(1e-12);
            pass &= dev <= 3.0;
            details.push(format!("{dev:.2}"));
        }
    }
    verdict(
        6,
        "walk cost matches exact chain on pinned tables",
        pass,
        &format!(
            "{} pinned tables, 10^5 trials each; |mean - exact| in SEs: {}",
            CHAIN_PINS.len(),
            details.join(", ")
        ),
    );
}

#[test]
fn a07_surjection_asymptotics() {
    let exact = stirling_exact(100, 50).unwrap();
    let approx = stirling_moser_wyman(100, 50).unwrap();
    let rel = (approx.ln_value - big_ln(&exact)).exp() - 1.0;
    let close = rel.abs() <= 0.05;

    let root = stirling_moser_wyman(5, 4).unwrap();
    let r_ok = (root.r - 0.46421).abs() <= 1e-5;
    let growth = root.r.exp() - 1.0;
    let g_ok = (growth - 0.5908).abs() <= 1e-4;
    verdict(
        7,
        "surjection count asymptotics",
        close && r_ok && g_ok,
        &format!(
            "surjections(100, 50) relative error {:.2}% (allowed 5%); ratio-5/4 root \
             {:.6} (pinned 0.46421 +- 1e-5), e^r - 1 = {growth:.6} (pinned 0.5908 +- 1e-4)",
            rel * 100.0,
            root.r
        ),
    );
}

#[test]
fn a08_walk_set_weights_and_dummies() {
    let mut cases = 0u32;
    let mut weight_ok = 0u32;
    let mut census_ok = 0u32;
    let mut s = 0u64;
    while cases < 100 {
        s += 1;
        let m = 6 + (s % 10) as usize;
        let fill = 2 + s % 3;
        let mut table = match CuckooTable::new(m, 3, 8000 + s) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let mut strategy = InsertionStrategy::new(StrategyKind::RandomWalkBacktracking, 2);
        let mut filled = true;
        for x in 0..fill {
            let trace = table.insert(x, &mut strategy, 2000).unwrap();
            filled &= trace.outcome == InsertOutcome::Success;
        }
        if !filled {
            continue;
        }
        let x = 10_000;
        let depth = 1 + (s % 5) as u32;
        let ws = forward_walk_set(&table, x, depth).unwrap();
        let census = common::enumerate_walks(&table, x, depth);
        let d = 3u64;
        let expected_total = d * (d - 1).pow(depth - 1);
        cases += 1;
        if ws.total() == expected_total && census.total() == expected_total {
            weight_ok += 1;
        }
        if ws.real_endpoints == census.real_endpoints && ws.dummy_count == census.dummy {
            census_ok += 1;
        }
    }
    verdict(
        8,
        "walk set weights and dummy continuations",
        weight_ok == 100 && census_ok == 100,
        &format!(
            "100 cases at depth <= 5: total weight d(d-1)^(i-1) on {weight_ok}, \
             endpoint and dummy census matches exhaustive enumeration on {census_ok}"
        ),
    );
}

#[test]
fn a09_bad_set_nesting_and_shrinkage() {
    let params = BadSetParams::default();
    let mut ratios: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut nested = true;
    for seed in 0..30u64 {
        let m = 2223; // 2000 elements at load 0.9
        let table = build_table(m, 4, 9000 + seed, 2000);
        let cutoff = choose_distance_cutoff(&table, params.alpha).unwrap();
        let report = compute_bad_sets(&table, &params, cutoff).unwrap();
        for i in 0..report.bad.len().saturating_sub(1) {
            nested &= report.bad[i + 1].is_subset(&report.bad[i]);
            if report.bad[i].len() >= 20 {
                let ratio = report.bad[i + 1].len() as f64 / report.bad[i].len() as f64;
                ratios.entry(i).or_default().push(ratio);
            }
        }
    }
    let mut medians = Vec::new();
    let mut shrinkage = true;
    for (i, rs) in &mut ratios {
        rs.sort_by(f64::total_cmp);
        let median = rs[rs.len() / 2];
        shrinkage &= median <= 0.75;
        medians.push(format!("level {i}: {median:.3} (n={})", rs.len()));
    }
    verdict(
        9,
        "bad set nesting and shrinkage",
        nested && shrinkage && !medians.is_empty(),
        &format!(
            "30 seeds at n=2000: nesting exact: {nested}; median shrink ratios (allowed 0.75) {}",
            medians.join(", ")
        ),
    );
}

#[test]
fn a10_short_cycle_count() {
    let mut total = 0u64;
    for seed in 0..100u64 {
        let family = HashFamily::new(1000, 3, 10_000 + seed).unwrap();
        let elements: Vec<u64> = (0..1000).collect();
        let graph = BipartiteGraph::from_family(&family, &elements);
        let count = graph.count_short_cycles(4, 1_000_000_000).unwrap();
        total += count.by_length[2];
    }
    let mean = total as f64 / 100.0;
    verdict(
        10,
        "length-4 cycle count",
        mean <= 81.0,
        &format!("mean over 100 seeds at n=m=1000, d=3: {mean:.2} (allowed d^4 = 81)"),
    );
}

#[test]
fn a11_csv_output_deterministic_across_thread_counts() {
    let mut records = Vec::new();
    let mut scans = Vec::new();
    for jobs in [Some(1), Some(4), None] {
        let mut cfg =
            ExperimentConfig::new(4, 0.7, 2000, 4, StrategyKind::RandomWalkBacktracking, 1100);
        cfg.jobs = jobs;
        let exp = run_build_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        csv::write_build_records(&mut buf, &exp.records).unwrap();
        records.push(buf);

        let scan = run_threshold_scan(3, 2000, &[0.90, 0.92, 0.94], 20, 1101, jobs).unwrap();
        let mut buf = Vec::new();
        csv::write_threshold_scan(&mut buf, &scan).unwrap();
        scans.push(buf);
    }
    let pass = records.iter().all(|b| *b == records[0]) && scans.iter().all(|b| *b == scans[0]);
    verdict(
        11,
        "CSV output deterministic across thread counts",
        pass,
        &format!(
            "build records ({} bytes) and threshold scans ({} bytes) byte-identical for \
             1, 4, and default worker threads",
            records[0].len(),
            scans[0].len()
        ),
    );
}

/// Searches small tables whose insertion chain is exactly solvable and
/// prints candidate pins for [`CHAIN_PINS`]. Run manually:
/// `cargo test -p dary-cuckoo --test acceptance regenerate_chain_pins -- --ignored --nocapture`
#[test]
#[ignore]
fn regenerate_chain_pins() {
    for m in 4..=6usize {
        for fill in 2..=4u64 {
            if fill + 1 >= m as u64 {
                continue;
            }
            let mut shown = 0;
            for seed in 0..60u64 {
                let mut table = match CuckooTable::new(m, 3, seed) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let mut strategy =
                    InsertionStrategy::new(StrategyKind::RandomWalkNonBacktracking, 1);
                let mut ok = true;
                for x in 0..fill {
                    match table.insert(x, &mut strategy, 1000) {
                        Ok(t) if t.outcome == InsertOutcome::Success => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let inst = common::tiny_instance_from_table(&table, 99);
                let rw = common::markov_expected_steps(
                    &inst,
                    StrategyKind::RandomWalkBacktracking,
                    FirstStepRule::AllChoices,
                );
                let nb = common::markov_expected_steps(
                    &inst,
                    StrategyKind::RandomWalkNonBacktracking,
                    FirstStepRule::AllChoices,
                );
                let (Some(rw), Some(nb)) = (rw, nb) else {
                    continue;
                };
                if rw < 0.8 {
                    continue;
                }
                println!("    ({seed}, {m}, {fill}, {rw:.12}, {nb:.12}),");
                shown += 1;
                if shown >= 3 {
                    break;
                }
            }
        }
    }
}
