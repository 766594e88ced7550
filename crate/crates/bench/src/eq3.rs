//! Repeated shot-sampled runs of the 2×2 worked example
//! `A = [[1, -1/2], [-1/2, 1]]`, `b = (1, 0)`, whose solution `(4/3, 2/3)`
//! gives outcome probabilities `0.8 / 0.2`.

use std::fs;
use std::path::{Path, PathBuf};

use hhl_core::linalg::{ComplexMatrix, ProblemInstance};
use hhl_core::pipeline::{run_hhl, HhlConfig};
use hhl_core::statevector::StateVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::records::write_csv;

pub const COUNTS_FILE: &str = "eq3_counts.csv";
pub const RATIOS_FILE: &str = "eq3_ratios.csv";
pub const EXPECTED_PROBABILITIES: [f64; 2] = [0.8, 0.2];

pub fn worked_example() -> ProblemInstance {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, -0.5], &[-0.5, 1.0]]).expect("2×2 literal");
    ProblemInstance::new(a, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        .expect("worked example is well posed")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq3Run {
    pub run: usize,
    pub seed: u64,
    pub shots: u64,
    pub count_0: u64,
    pub count_1: u64,
    pub p0: f64,
    pub p1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq3Ratio {
    pub run: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct Eq3Outcome {
    pub runs: Vec<Eq3Run>,
    pub ratios: Vec<Eq3Ratio>,
    pub mean_p0: f64,
    pub mean_p1: f64,
    pub mean_ratio: f64,
    pub counts_path: PathBuf,
    pub ratios_path: PathBuf,
}

impl Eq3Outcome {
    /// Single-run binomial standard deviation of outcome `k` at `shots` shots.
    pub fn binomial_sigma(&self, k: usize) -> f64 {
        let p = EXPECTED_PROBABILITIES[k];
        let shots = self.runs.first().map_or(1, |r| r.shots) as f64;
        (p * (1.0 - p) / shots).sqrt()
    }
}

/// `repeats` end-to-end solves, each sampled with `shots` shots at seed
/// `seed + run`. Writes [`COUNTS_FILE`] and [`RATIOS_FILE`] into `output_dir`.
pub fn run_eq3_experiment(
    repeats: usize,
    shots: u64,
    seed: u64,
    output_dir: &Path,
) -> Result<Eq3Outcome> {
    if repeats == 0 || shots == 0 {
        return Err(BenchError::Config(
            "repeats and shots must be positive".into(),
        ));
    }
    fs::create_dir_all(output_dir).map_err(BenchError::io(output_dir))?;
    let problem = worked_example();
    let mut runs = Vec::with_capacity(repeats);
    let mut ratios = Vec::with_capacity(repeats);
    for run in 0..repeats {
        let run_seed = seed.wrapping_add(run as u64);
        let config = HhlConfig {
            shots,
            seed: run_seed,
            ..HhlConfig::default()
        };
        let result = run_hhl(&problem, &config)?;
        let state = StateVector::from_amplitudes(result.solution_amplitudes)?;
        let hist = state.sample_counts(&[0], shots, run_seed)?;
        let (count_0, count_1) = (hist.count("0"), hist.count("1"));
        runs.push(Eq3Run {
            run,
            seed: run_seed,
            shots,
            count_0,
            count_1,
            p0: count_0 as f64 / shots as f64,
            p1: count_1 as f64 / shots as f64,
        });
        ratios.push(Eq3Ratio {
            run,
            ratio: count_0 as f64 / count_1 as f64,
        });
    }
    let counts_path = output_dir.join(COUNTS_FILE);
    let ratios_path = output_dir.join(RATIOS_FILE);
    write_csv(&counts_path, &runs)?;
    write_csv(&ratios_path, &ratios)?;
    let n = repeats as f64;
    Ok(Eq3Outcome {
        mean_p0: runs.iter().map(|r| r.p0).sum::<f64>() / n,
        mean_p1: runs.iter().map(|r| r.p1).sum::<f64>() / n,
        mean_ratio: ratios.iter().map(|r| r.ratio).sum::<f64>() / n,
        runs,
        ratios,
        counts_path,
        ratios_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_experiment() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_eq3_experiment(4, 2_000, 11, dir.path()).unwrap();
        assert_eq!(out.runs.len(), 4);
        assert!(out.runs.iter().all(|r| r.count_0 + r.count_1 == 2_000));
        assert!((out.mean_p0 + out.mean_p1 - 1.0).abs() < 1e-12);
        let header = fs::read_to_string(&out.counts_path).unwrap();
        assert_eq!(
            header.lines().next().unwrap(),
            "run,seed,shots,count_0,count_1,p0,p1"
        );
        let ratios = fs::read_to_string(&out.ratios_path).unwrap();
        assert_eq!(ratios.lines().count(), 5);
    }

    #[test]
    fn rejects_empty_experiment() {
        let dir = tempfile::tempdir().unwrap();
        assert!(run_eq3_experiment(0, 10, 0, dir.path())
            .unwrap_err()
            .is_config_error());
    }
}
