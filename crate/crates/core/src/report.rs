//! CSV and key-value outputs.
//!
//! All numbers are written with `.` decimals and a fixed number of places;
//! rows end in `\n`.

use std::io::{self, Write};

use crate::engine::RunResult;
use crate::experiments::{bank_label, SuiteReport};

pub const SERIES_HEADER: [&str; 6] = [
    "iteration",
    "gini",
    "bank_balance_or_inf",
    "total_node_balance",
    "games_played",
    "games_skipped",
];

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn format_gini(g: f64) -> String {
    format!("{g:.6}")
}

/// Per-iteration series of one run.
pub fn write_gini_series<W: Write>(out: W, result: &RunResult) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SERIES_HEADER).map_err(into_io)?;
    for (idx, (gini, stats)) in result.gini_series.iter().zip(&result.iteration_stats).enumerate() {
        let bank = stats
            .bank_balance
            .map_or_else(|| "inf".to_string(), |b| b.to_string());
        w.write_record([
            (idx + 1).to_string(),
            format_gini(*gini),
            bank,
            stats.total_node_balance.to_string(),
            stats.games_played.to_string(),
            stats.games_skipped.to_string(),
        ])
        .map_err(into_io)?;
    }
    w.flush()
}

/// `key=value` lines describing how a run ended.
pub fn write_run_summary<W: Write>(mut out: W, result: &RunResult, seed: u64) -> io::Result<()> {
    writeln!(out, "final_gini={}", format_gini(result.final_gini()))?;
    match result.converged_at {
        Some(k) => writeln!(out, "converged_at={k}")?,
        None => writeln!(out, "converged_at=none")?,
    }
    writeln!(out, "iterations_executed={}", result.iterations_executed())?;
    writeln!(out, "seed={seed}")
}

/// One row per run, in run-key order. Failed runs carry an `error: ...`
/// status and empty result columns.
pub fn write_suite_summary<W: Write>(out: W, report: &SuiteReport) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["network", "group", "bank", "replicate", "final_gini", "converged_at", "status"])
        .map_err(into_io)?;
    for row in &report.rows {
        let key = &row.key;
        let (gini, converged, status) = match &row.outcome {
            Ok(s) => (
                format_gini(s.final_gini),
                s.converged_at.map_or_else(|| "none".to_string(), |k| k.to_string()),
                "ok".to_string(),
            ),
            Err(e) => (String::new(), String::new(), format!("error: {e}")),
        };
        w.write_record([
            key.network.clone(),
            key.group.to_string(),
            bank_label(&key.bank),
            key.replicate.to_string(),
            gini,
            converged,
            status,
        ])
        .map_err(into_io)?;
    }
    w.flush()
}

/// Replicate means per (network, group, bank).
pub fn write_suite_means<W: Write>(out: W, report: &SuiteReport) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["network", "group", "bank", "replicates", "mean_final_gini"])
        .map_err(into_io)?;
    for m in report.means() {
        w.write_record([
            m.network,
            m.group.to_string(),
            bank_label(&m.bank),
            m.replicates.to_string(),
            format_gini(m.mean_final_gini),
        ])
        .map_err(into_io)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Bank, IterationStats};

    fn result() -> RunResult {
        let stats = |bank| IterationStats {
            games_played: 2,
            games_skipped: 0,
            bank_inflow: 0,
            bank_outflow: 2,
            bank_balance: bank,
            total_node_balance: 202,
        };
        RunResult {
            gini_series: vec![0.0, 1.0 / 3.0],
            converged_at: Some(2),
            final_balances: vec![101, 101],
            final_bank: Bank::Finite(1),
            iteration_stats: vec![stats(Some(1)), stats(None)],
        }
    }

    #[test]
    fn series_csv_layout() {
        let mut buf = Vec::new();
        write_gini_series(&mut buf, &result()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iteration,gini,bank_balance_or_inf,total_node_balance,games_played,games_skipped\n\
             1,0.000000,1,202,2,0\n\
             2,0.333333,inf,202,2,0\n"
        );
    }

    #[test]
    fn run_summary_layout() {
        let mut buf = Vec::new();
        write_run_summary(&mut buf, &result(), 42).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "final_gini=0.333333\nconverged_at=2\niterations_executed=2\nseed=42\n"
        );
    }
}
