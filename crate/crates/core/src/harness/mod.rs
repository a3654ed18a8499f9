//! Scenario files, seeded trial execution, the follow-mode comparator and
//! report emission.

mod report;
mod scenario;
mod trial;

pub use report::{
    aggregate, mean_std, quartiles, trials_csv_rows, write_reports, LatencyStats, Quartiles,
    Report, ACCURACY_HEADER, LATENCY_HEADER, PARAMS, TRIALS_HEADER,
};
pub use scenario::{parse_map, HopIncrementSpec, MapSpec, Scenario, TrialSetup, SEED_ENV};
pub use trial::{
    run_benchmark, run_benchmarks, run_trial, run_trials, BenchmarkComparator, ParamOutcome,
    TrialResult,
};

use std::path::Path;

use thiserror::Error;

use crate::sim::SimError;
use crate::sniffer::SnifferError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("scenario line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("scenario field `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sniffer(#[from] SnifferError),
}

/// Runs the scenario and writes its reports into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<Report, HarnessError> {
    let results = run_trials(s)?;
    let report = aggregate(&s.name, &results);
    write_reports(out_dir, &report, &results)?;
    Ok(report)
}

/// One run per update period. Each point gets its own subdirectory
/// `update_<seconds>s`; the combined tables land in `out_dir`.
pub fn sweep(
    s: &Scenario,
    periods_us: &[u64],
    out_dir: &Path,
) -> Result<Vec<Report>, HarnessError> {
    report::ensure_dir(out_dir)?;
    let mut reports = Vec::new();
    let mut accuracy = ACCURACY_HEADER.to_string();
    let mut latency = LATENCY_HEADER.to_string();
    let mut summary = String::new();
    for &period in periods_us {
        let mut point = s.clone();
        point.update_period_us = (period > 0).then_some(period);
        point.name = format!("{}@{}", s.name, period_label(period));
        let report = run_scenario(
            &point,
            &out_dir.join(format!("update_{}", period_label(period))),
        )?;
        accuracy.push_str(&report.accuracy_csv_rows());
        latency.push_str(&report.latency_csv_rows());
        summary.push_str(&report.summary());
        summary.push('\n');
        reports.push(report);
    }
    report::write_file(&out_dir.join("sweep_accuracy.csv"), &accuracy)?;
    report::write_file(&out_dir.join("sweep_latency.csv"), &latency)?;
    report::write_file(&out_dir.join("sweep_summary.txt"), &summary)?;
    Ok(reports)
}

fn period_label(period_us: u64) -> String {
    if period_us == 0 {
        "none".into()
    } else if period_us.is_multiple_of(1_000_000) {
        format!("{}s", period_us / 1_000_000)
    } else {
        format!("{}ms", period_us / 1_000)
    }
}

/// Paired cracker and comparator results on identical seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub cracker: Vec<TrialResult>,
    pub benchmark: Vec<TrialResult>,
    pub cracker_report: Report,
    pub benchmark_report: Report,
}

pub fn compare(s: &Scenario) -> Result<Comparison, HarnessError> {
    let cracker = run_trials(s)?;
    let benchmark = run_benchmarks(s)?;
    Ok(Comparison {
        cracker_report: aggregate(&format!("{}/cracker", s.name), &cracker),
        benchmark_report: aggregate(&format!("{}/benchmark", s.name), &benchmark),
        cracker,
        benchmark,
    })
}

pub const COMPARE_HEADER: &str = "scenario,trial,cracker_capture_pct,benchmark_capture_pct\n";

/// Writes `compare.csv` and `compare_summary.txt`.
pub fn write_comparison(dir: &Path, name: &str, c: &Comparison) -> Result<(), HarnessError> {
    report::ensure_dir(dir)?;
    let mut csv = COMPARE_HEADER.to_string();
    for (a, b) in c.cracker.iter().zip(&c.benchmark) {
        csv.push_str(&format!(
            "{},{},{:.2},{:.2}\n",
            name,
            a.trial,
            a.capture_pct(),
            b.capture_pct()
        ));
    }
    report::write_file(&dir.join("compare.csv"), &csv)?;
    let summary = format!(
        "{}\n{}",
        c.cracker_report.summary(),
        c.benchmark_report.summary()
    );
    report::write_file(&dir.join("compare_summary.txt"), &summary)
}
