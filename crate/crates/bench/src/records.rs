//! CSV row types and the per-cell summary statistics.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const ROWS_FILE: &str = "sweep_rows.csv";
pub const SUMMARY_FILE: &str = "sweep_summary.csv";

/// Column order of [`ROWS_FILE`].
pub const ROW_COLUMNS: [&str; 11] = [
    "family",
    "N",
    "method",
    "seed",
    "fidelity",
    "success_probability",
    "clock_residual",
    "controlled_u_count",
    "elementary_exp_count",
    "wall_time_ms",
    "error",
];

/// One solved (or failed) instance. Numeric fields are empty on error rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: String,
    pub seed: u64,
    pub fidelity: Option<f64>,
    pub success_probability: Option<f64>,
    pub clock_residual: Option<f64>,
    pub controlled_u_count: Option<u64>,
    pub elementary_exp_count: Option<u64>,
    pub wall_time_ms: f64,
    pub error: String,
}

impl SweepRecord {
    pub fn key(&self) -> (String, usize, String) {
        (self.family.clone(), self.n, self.method.clone())
    }

    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: String,
    pub instances: usize,
    pub errors: usize,
    pub mean_fidelity: Option<f64>,
    pub std_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub mean_success_probability: Option<f64>,
    pub std_success_probability: Option<f64>,
    pub mean_clock_residual: Option<f64>,
    pub mean_controlled_u_count: Option<f64>,
    pub mean_elementary_exp_count: Option<f64>,
}

/// Mean and sample standard deviation, summed in input order.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

/// One summary row per cell, in order of first appearance.
pub fn summarize(rows: &[SweepRecord]) -> Vec<SummaryRecord> {
    let mut keys: Vec<(String, usize, String)> = Vec::new();
    for r in rows {
        if !keys.contains(&r.key()) {
            keys.push(r.key());
        }
    }
    keys.into_iter()
        .map(|key| {
            let cell: Vec<&SweepRecord> = rows.iter().filter(|r| r.key() == key).collect();
            let ok: Vec<&SweepRecord> = cell.iter().copied().filter(|r| !r.is_error()).collect();
            let col = |f: fn(&SweepRecord) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let fid = col(|r| r.fidelity);
            let succ = col(|r| r.success_probability);
            let mean = |v: Vec<f64>| mean_std(&v).map(|(m, _)| m);
            SummaryRecord {
                family: key.0,
                n: key.1,
                method: key.2,
                instances: cell.len(),
                errors: cell.len() - ok.len(),
                mean_fidelity: mean_std(&fid).map(|(m, _)| m),
                std_fidelity: mean_std(&fid).map(|(_, s)| s),
                min_fidelity: fid.iter().copied().reduce(f64::min),
                mean_success_probability: mean_std(&succ).map(|(m, _)| m),
                std_success_probability: mean_std(&succ).map(|(_, s)| s),
                mean_clock_residual: mean(col(|r| r.clock_residual)),
                mean_controlled_u_count: mean(col(|r| r.controlled_u_count.map(|c| c as f64))),
                mean_elementary_exp_count: mean(col(|r| r.elementary_exp_count.map(|c| c as f64))),
            }
        })
        .collect()
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(BenchError::csv(path))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(BenchError::csv(path))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(BenchError::io(path))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row).map_err(BenchError::csv(path))?;
    }
    writer.flush().map_err(BenchError::io(path))
}
