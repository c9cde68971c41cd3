//! `report.json` and the combined result writer.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::results::{write_csv, ResultRow};
use crate::stats::{counting_success_rate, estimate_coefficient, mean_std, CoefficientReport, Complexity, SuccessRate};

/// Fractions of `n` reported for the counting protocol.
pub const COUNTING_THRESHOLDS: [f64; 2] = [0.5, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSummary {
    pub n: usize,
    pub b: Option<u32>,
    pub rates: Vec<SuccessRate>,
    pub mean_r0_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub scheduler: String,
    pub n: usize,
    pub runs: usize,
    pub mean_window: f64,
    pub mean_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Runs stop when the active graph first has the target shape.
    pub convergence: String,
    pub protocols: Vec<String>,
    pub detectors: Vec<String>,
    pub runs: usize,
    pub coefficients: CoefficientReport,
    pub counting: Vec<CountingSummary>,
    pub census: Vec<CensusSummary>,
}

/// Everything in the report is a function of the rows and `complexity`,
/// so re-analyzing a `results.csv` reproduces it.
pub fn build_report(rows: &[ResultRow], complexity: Complexity) -> Report {
    let mut protocols: Vec<String> = rows.iter().map(|r| r.protocol.clone()).collect();
    protocols.sort();
    protocols.dedup();
    let mut detectors: Vec<String> = rows.iter().map(|r| r.detector.clone()).collect();
    detectors.sort();
    detectors.dedup();

    let mut counting_cells: BTreeMap<usize, Vec<ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.r0.is_some()) {
        counting_cells.entry(r.n).or_default().push(r.clone());
    }
    let counting = counting_cells
        .into_iter()
        .map(|(n, cell)| {
            let rates = COUNTING_THRESHOLDS
                .iter()
                .map(|&t| counting_success_rate(&cell, t).expect("rows carry counters"))
                .collect();
            let fractions: Vec<f64> = cell.iter().map(|r| r.r0.unwrap_or(0) as f64 / n as f64).collect();
            CountingSummary { n, b: cell[0].b, rates, mean_r0_fraction: mean_std(&fractions).0 }
        })
        .collect();

    let mut census_cells: BTreeMap<(String, usize), Vec<u64>> = BTreeMap::new();
    for r in rows {
        if let Some(w) = r.census_window {
            census_cells.entry((r.scheduler.clone(), r.n)).or_default().push(w);
        }
    }
    let census = census_cells
        .into_iter()
        .map(|((scheduler, n), ws)| {
            let vals: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
            let mean = mean_std(&vals).0;
            CensusSummary { scheduler, n, runs: ws.len(), mean_window: mean, mean_normalized: mean / n as f64 }
        })
        .collect();

    Report {
        convergence: "structural".into(),
        protocols,
        detectors,
        runs: rows.len(),
        coefficients: estimate_coefficient(rows, complexity),
        counting,
        census,
    }
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `results.csv` and `report.json` into `dir`, creating it if needed.
pub fn write_results(rows: &[ResultRow], report: &Report, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("results.csv");
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).map_err(|e| Error::io(&csv_path, std::io::Error::other(e)))?;
    std::fs::write(&csv_path, buf).map_err(|e| Error::io(&csv_path, e))?;
    let json_path = dir.join("report.json");
    std::fs::write(&json_path, report_json(report)).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_results_have_absent_cells() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_report(&[], Complexity::Cubic);
        assert!(report.coefficients.cells.is_empty());
        let (csv, json) = write_results(&[], &report, dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 1);
        let parsed: Report = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        std::fs::write(&file, "x").unwrap();
        let err = write_results(&[], &build_report(&[], Complexity::Cubic), &file.join("sub")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
