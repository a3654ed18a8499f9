use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{HarnessError, TrialResult};

/// Median and quartiles of a sample (linear interpolation between ranks).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quartiles(values: &[u64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Some(Quartiles {
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
    })
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStats {
    pub param: &'static str,
    pub quartiles: Option<Quartiles>,
    pub failed: usize,
}

/// Aggregate over the trials of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub trials: usize,
    /// (param, percentage of trials with an exact match).
    pub accuracy: Vec<(&'static str, f64)>,
    pub latency: Vec<LatencyStats>,
    pub capture_mean_pct: f64,
    pub capture_std_pct: f64,
    /// Set when not a single packet was captured across all trials.
    pub capture_empty: bool,
    pub resyncs: u32,
    pub failures: usize,
}

pub const PARAMS: [&str; 3] = ["c_int", "h_inc", "c_map"];

pub fn aggregate(scenario: &str, results: &[TrialResult]) -> Report {
    let n = results.len().max(1) as f64;
    let pct = |count: usize| 100.0 * count as f64 / n;
    let correct = [
        results.iter().filter(|r| r.c_int.correct()).count(),
        results.iter().filter(|r| r.h_inc.correct()).count(),
        results.iter().filter(|r| r.c_map.correct()).count(),
    ];
    let hops: [Vec<Option<u64>>; 4] = [
        results.iter().map(|r| r.c_int.hops).collect(),
        results.iter().map(|r| r.h_inc.hops).collect(),
        results.iter().map(|r| r.c_map.hops).collect(),
        results.iter().map(TrialResult::total_hops).collect(),
    ];
    let latency = ["c_int", "h_inc", "c_map", "total"]
        .iter()
        .zip(hops.iter())
        .map(|(&param, h)| {
            let done: Vec<u64> = h.iter().flatten().copied().collect();
            LatencyStats {
                param,
                quartiles: quartiles(&done),
                failed: h.len() - done.len(),
            }
        })
        .collect();
    let captures: Vec<f64> = results.iter().map(TrialResult::capture_pct).collect();
    let (capture_mean_pct, capture_std_pct) = mean_std(&captures);
    Report {
        scenario: scenario.to_string(),
        trials: results.len(),
        accuracy: PARAMS.iter().copied().zip(correct.map(pct)).collect(),
        latency,
        capture_mean_pct,
        capture_std_pct,
        capture_empty: results.iter().all(|r| r.packets_captured == 0),
        resyncs: results.iter().map(|r| r.resync_count).sum(),
        failures: results.iter().filter(|r| r.failure.is_some()).count(),
    }
}

impl Report {
    pub fn accuracy_of(&self, param: &str) -> f64 {
        self.accuracy
            .iter()
            .find(|(p, _)| *p == param)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn accuracy_csv_rows(&self) -> String {
        let mut out = String::new();
        for (param, acc) in &self.accuracy {
            writeln!(out, "{},{},{:.2}", self.scenario, param, acc).unwrap();
        }
        out
    }

    pub fn latency_csv_rows(&self) -> String {
        let mut out = String::new();
        for l in &self.latency {
            match l.quartiles {
                Some(q) => writeln!(
                    out,
                    "{},{},{:.1},{:.1},{:.1},{}",
                    self.scenario, l.param, q.median, q.q1, q.q3, l.failed
                ),
                None => writeln!(out, "{},{},NA,NA,NA,{}", self.scenario, l.param, l.failed),
            }
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scenario: {}", self.scenario).unwrap();
        writeln!(out, "trials: {} ({} failed)", self.trials, self.failures).unwrap();
        writeln!(out, "accuracy:").unwrap();
        for (param, acc) in &self.accuracy {
            writeln!(out, "  {param:<6} {acc:6.2}%").unwrap();
        }
        writeln!(out, "latency in hops (median [q1, q3]):").unwrap();
        for l in &self.latency {
            match l.quartiles {
                Some(q) => writeln!(
                    out,
                    "  {:<6} {:8.1} [{:.1}, {:.1}]{}",
                    l.param,
                    q.median,
                    q.q1,
                    q.q3,
                    if l.failed > 0 {
                        format!(" ({} not derived)", l.failed)
                    } else {
                        String::new()
                    }
                ),
                None => writeln!(out, "  {:<6} never derived", l.param),
            }
            .unwrap();
        }
        writeln!(
            out,
            "capture: {:.2}% +/- {:.2}{}",
            self.capture_mean_pct,
            self.capture_std_pct,
            if self.capture_empty {
                " (no packets captured)"
            } else {
                ""
            }
        )
        .unwrap();
        writeln!(out, "resyncs: {}", self.resyncs).unwrap();
        out
    }
}

pub const ACCURACY_HEADER: &str = "scenario,param,accuracy_pct\n";
pub const TRIALS_HEADER: &str = "scenario,trial,hops_cint,hops_hinc,hops_cmap,capture_pct\n";
pub const LATENCY_HEADER: &str = "scenario,param,median_hops,q1_hops,q3_hops,failed\n";

pub fn trials_csv_rows(scenario: &str, results: &[TrialResult]) -> String {
    let hop = |h: Option<u64>| h.map_or_else(|| "failed".to_string(), |h| h.to_string());
    let mut out = String::new();
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{:.2}",
            scenario,
            r.trial,
            hop(r.c_int.hops),
            hop(r.h_inc.hops),
            hop(r.c_map.hops),
            r.capture_pct()
        )
        .unwrap();
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io {
        path: dir.display().to_string(),
        msg: e.to_string(),
    })
}

/// Writes `accuracy.csv`, `trials.csv`, `latency.csv` and `summary.txt` into `dir`.
pub fn write_reports(
    dir: &Path,
    report: &Report,
    results: &[TrialResult],
) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_file(
        &dir.join("accuracy.csv"),
        &(ACCURACY_HEADER.to_string() + &report.accuracy_csv_rows()),
    )?;
    write_file(
        &dir.join("trials.csv"),
        &(TRIALS_HEADER.to_string() + &trials_csv_rows(&report.scenario, results)),
    )?;
    write_file(
        &dir.join("latency.csv"),
        &(LATENCY_HEADER.to_string() + &report.latency_csv_rows()),
    )?;
    write_file(&dir.join("summary.txt"), &report.summary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afh::ChannelMap;
    use crate::harness::ParamOutcome;

    fn result(trial: u32, h_ok: bool, captured: u32) -> TrialResult {
        TrialResult {
            trial,
            c_int: ParamOutcome {
                truth: 100_000,
                derived: Some(100_000),
                hops: Some(150),
            },
            h_inc: ParamOutcome {
                truth: 7,
                derived: Some(if h_ok { 7 } else { 9 }),
                hops: Some(74),
            },
            c_map: ParamOutcome {
                truth: ChannelMap::FULL,
                derived: Some(ChannelMap::FULL),
                hops: Some(74),
            },
            packets_expected: 100,
            packets_captured: captured,
            resync_count: 0,
            lock_us: Some(1),
            data_start_us: 1,
            failure: None,
        }
    }

    #[test]
    fn all_correct_is_100() {
        let rs: Vec<_> = (0..25).map(|t| result(t, true, 100)).collect();
        let r = aggregate("s", &rs);
        assert_eq!(r.accuracy_of("c_int"), 100.0);
        assert_eq!(r.accuracy_of("h_inc"), 100.0);
        assert_eq!(r.accuracy_of("c_map"), 100.0);
        assert_eq!(r.capture_mean_pct, 100.0);
        assert_eq!(r.capture_std_pct, 0.0);
        assert!(!r.capture_empty);
    }

    #[test]
    fn one_wrong_in_25_is_96() {
        let rs: Vec<_> = (0..25).map(|t| result(t, t != 3, 100)).collect();
        assert_eq!(aggregate("s", &rs).accuracy_of("h_inc"), 96.0);
    }

    #[test]
    fn empty_capture_is_flagged() {
        let rs: Vec<_> = (0..3).map(|t| result(t, true, 0)).collect();
        let r = aggregate("s", &rs);
        assert_eq!(r.capture_mean_pct, 0.0);
        assert!(r.capture_empty);
        assert!(r.summary().contains("no packets captured"));
    }

    #[test]
    fn quartiles_interpolate() {
        let q = quartiles(&[1, 2, 3, 4]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (1.75, 2.5, 3.25));
        assert!(quartiles(&[]).is_none());
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - 2.138089935299395).abs() < 1e-12);
    }

    #[test]
    fn failed_hops_render_as_failed() {
        let mut r = result(0, true, 50);
        r.c_map.hops = None;
        let rows = trials_csv_rows("x", &[r]);
        assert_eq!(rows, "x,0,150,74,failed,50.00\n");
    }
}
