//! CSV output for experiment results.
//!
//! Every writer emits a header row `schema=1,<column names>`, then one row
//! per record. Rows are LF-terminated UTF-8. Floats are printed with
//! `{:.8e}` (nine significant digits), which round-trips through
//! `f64::from_str` and, together with the deterministic runners, makes the
//! files byte-identical across serial and parallel runs of the same
//! configuration.

use std::io::{self, Write};

use super::{StrategyComparison, TailReport, ThresholdScan, TrialRecord};
use crate::table::InsertOutcome;

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

/// Stable string for an insertion outcome, used in CSV and CLI output.
pub fn outcome_label(outcome: InsertOutcome) -> &'static str {
    match outcome {
        InsertOutcome::Success => "success",
        InsertOutcome::StepLimitExceeded => "step-limit",
    }
}

/// One row per insertion, in the order stored in the experiment
/// (sorted by trial seed, then insertion index).
pub fn write_build_records<W: Write>(mut w: W, records: &[TrialRecord]) -> io::Result<()> {
    writeln!(
        w,
        "schema=1,seed,d,n,m,c_actual,insertion_index,reassignments,outcome,budget_used"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.d,
            r.n,
            r.m,
            fmt_f64(r.c_actual),
            r.insertion_index,
            r.reassignments,
            outcome_label(r.outcome),
            r.budget_used
        )?;
    }
    Ok(())
}

/// One row per walk length `ell`, shallowest first.
pub fn write_tail_report<W: Write>(mut w: W, report: &TailReport) -> io::Result<()> {
    writeln!(w, "schema=1,ell,survivors,samples,survival,ci_low,ci_high")?;
    for row in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            row.ell,
            row.survivors,
            report.samples,
            fmt_f64(row.survival),
            fmt_f64(row.ci_low),
            fmt_f64(row.ci_high)
        )?;
    }
    Ok(())
}

/// One row per load-factor grid point, in grid order.
pub fn write_threshold_scan<W: Write>(mut w: W, scan: &ThresholdScan) -> io::Result<()> {
    writeln!(w, "schema=1,d,n,c,m,count,successes,trials,fraction")?;
    for p in &scan.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            scan.d,
            scan.n,
            fmt_f64(p.c),
            p.m,
            p.count,
            p.successes,
            scan.trials,
            fmt_f64(p.fraction)
        )?;
    }
    Ok(())
}

/// One row per insertion strategy.
pub fn write_comparison<W: Write>(mut w: W, cmp: &StrategyComparison) -> io::Result<()> {
    writeln!(
        w,
        "schema=1,strategy,d,n,m,c_actual,trials,failed_trials,samples,mean_reassignments,se_reassignments"
    )?;
    for s in &cmp.stats {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            super::strategy_label(s.strategy),
            cmp.d,
            cmp.n,
            cmp.m,
            fmt_f64(cmp.c_actual),
            s.trials,
            s.failed_trials,
            s.samples,
            s.mean.map(fmt_f64).unwrap_or_else(|| "na".into()),
            s.se.map(fmt_f64).unwrap_or_else(|| "na".into())
        )?;
    }
    Ok(())
}
