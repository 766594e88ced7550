//! The family × size × method sweep.
//!
//! Cells run one after another in [`SweepConfig::cells`] order and their
//! instances run concurrently on a worker pool. Each finished cell is appended
//! to the rows CSV and flushed, so an interrupted sweep can resume from the
//! last complete cell and still produce the same bytes as an uninterrupted one.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hhl_core::families::generate;
use hhl_core::pipeline::run_hhl;

use crate::config::{Cell, SweepConfig};
use crate::error::{BenchError, Result};
use crate::records::{
    read_csv, summarize, write_csv, SummaryRecord, SweepRecord, ROWS_FILE, SUMMARY_FILE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Keep complete cells from an existing rows file instead of starting over.
    pub resume: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { resume: true }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows_path: PathBuf,
    pub summary_path: PathBuf,
    pub rows: Vec<SweepRecord>,
    pub summary: Vec<SummaryRecord>,
    /// Cells taken from a previous run rather than recomputed.
    pub resumed_cells: usize,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_sweep_with(config, SweepOptions::default())
}

pub fn run_sweep_with(config: &SweepConfig, options: SweepOptions) -> Result<SweepOutcome> {
    config.validate()?;
    let dir = config.resolved_output_dir();
    fs::create_dir_all(&dir).map_err(BenchError::io(&dir))?;
    let rows_path = dir.join(ROWS_FILE);
    let summary_path = dir.join(SUMMARY_FILE);
    let cells = config.cells();

    let kept = if options.resume && rows_path.exists() {
        complete_prefix(config, &cells, &read_csv(&rows_path)?)
    } else {
        Vec::new()
    };
    let resumed_cells = kept.len() / config.repeats;
    write_csv(&rows_path, &kept)?;
    if kept.is_empty() {
        // Header only, so an interrupted first cell still leaves a valid file.
        let mut w = csv::Writer::from_path(&rows_path).map_err(BenchError::csv(&rows_path))?;
        w.write_record(crate::records::ROW_COLUMNS)
            .map_err(BenchError::csv(&rows_path))?;
        w.flush().map_err(BenchError::io(&rows_path))?;
    }

    let pool = WorkerPool::new(config.workers)?;
    for cell in &cells[resumed_cells..] {
        let rows = pool.run_cell(config, cell);
        append_rows(&rows_path, &rows)?;
    }

    let rows: Vec<SweepRecord> = read_csv(&rows_path)?;
    let summary = summarize(&rows);
    write_csv(&summary_path, &summary)?;
    Ok(SweepOutcome {
        rows_path,
        summary_path,
        rows,
        summary,
        resumed_cells,
    })
}

/// Rows of the leading cells that are fully present and in order.
fn complete_prefix(config: &SweepConfig, cells: &[Cell], rows: &[SweepRecord]) -> Vec<SweepRecord> {
    let mut kept = Vec::new();
    for (chunk, cell) in rows.chunks(config.repeats).zip(cells) {
        let complete = chunk.len() == config.repeats
            && chunk
                .iter()
                .enumerate()
                .all(|(i, r)| r.key() == cell.key() && r.seed == config.instance_seed(i));
        if !complete {
            break;
        }
        kept.extend_from_slice(chunk);
    }
    kept
}

fn append_rows(path: &Path, rows: &[SweepRecord]) -> Result<()> {
    let file = OpenOptions::new()
        .append(true)
        .open(path)
        .map_err(BenchError::io(path))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    for row in rows {
        writer.serialize(row).map_err(BenchError::csv(path))?;
    }
    writer.flush().map_err(BenchError::io(path))
}

/// Solves instance `index` of `cell`, turning any failure into an error row.
pub fn run_instance(
    config: &SweepConfig,
    cell: &Cell,
    index: usize,
    deadline: Instant,
) -> SweepRecord {
    let seed = config.instance_seed(index);
    let mut record = SweepRecord {
        family: cell.template.family.to_string(),
        n: cell.dim,
        method: cell.method.label(),
        seed,
        fidelity: None,
        success_probability: None,
        clock_residual: None,
        controlled_u_count: None,
        elementary_exp_count: None,
        wall_time_ms: 0.0,
        error: String::new(),
    };
    let start = Instant::now();
    if start > deadline {
        record.error = format!("timeout: cell exceeded {} s", config.cell_timeout_secs);
        return record;
    }
    let outcome = generate(&cell.template.spec(cell.dim, seed))
        .and_then(|problem| run_hhl(&problem, &config.solver_config(cell.method, seed)));
    match outcome {
        Ok(r) => {
            record.fidelity = Some(r.fidelity);
            record.success_probability = Some(r.success_probability);
            record.clock_residual = Some(r.clock_residual);
            record.controlled_u_count = Some(r.cost.controlled_u_count);
            record.elementary_exp_count = Some(r.cost.elementary_exp_count);
        }
        Err(e) => record.error = e.to_string(),
    }
    if config.record_wall_time {
        record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    record
}

struct WorkerPool {
    #[cfg(feature = "parallel")]
    pool: rayon::ThreadPool,
}

impl WorkerPool {
    fn new(workers: Option<usize>) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.unwrap_or(0))
                .build()
                .map_err(|e| BenchError::Config(format!("cannot start worker pool: {e}")))?;
            Ok(Self { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(Self {})
        }
    }

    fn run_cell(&self, config: &SweepConfig, cell: &Cell) -> Vec<SweepRecord> {
        let deadline = Instant::now() + Duration::from_secs_f64(config.cell_timeout_secs);
        let run = |i: usize| run_instance(config, cell, i, deadline);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.pool
                .install(|| (0..config.repeats).into_par_iter().map(run).collect())
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..config.repeats).map(run).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FamilyTemplate;
    use hhl_core::families::Family;
    use hhl_core::hamiltonian::MethodConfig;

    fn small_config(dir: &Path) -> SweepConfig {
        let mut cfg = SweepConfig::new(
            vec![
                FamilyTemplate {
                    representable: true,
                    ..FamilyTemplate::new(Family::Diagonal)
                },
                FamilyTemplate::new(Family::Moderate),
            ],
            vec![4, 8],
            vec![MethodConfig::Exact],
        );
        cfg.repeats = 3;
        cfg.output_dir = Some(dir.to_path_buf());
        cfg
    }

    #[test]
    fn per_instance_errors_do_not_abort() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_sweep(&small_config(dir.path())).unwrap();
        // Moderate needs N ≥ 8, so its N = 4 cell is all error rows.
        assert_eq!(out.rows.len(), 4 * 3);
        let moderate4: Vec<_> = out
            .rows
            .iter()
            .filter(|r| r.family == "moderate" && r.n == 4)
            .collect();
        assert!(moderate4
            .iter()
            .all(|r| r.is_error() && r.fidelity.is_none()));
        assert!(out
            .rows
            .iter()
            .filter(|r| r.family == "diagonal")
            .all(|r| r.fidelity.unwrap() > 1.0 - 1e-8));
        assert_eq!(out.summary.len(), 4);
    }

    #[test]
    fn resume_reuses_complete_cells() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let first = run_sweep(&cfg).unwrap();
        let full = fs::read(&first.rows_path).unwrap();

        // Cut the file in the middle of the third cell.
        let text = String::from_utf8(full.clone()).unwrap();
        let truncated: String = text
            .lines()
            .take(1 + 3 * 2 + 1)
            .map(|l| format!("{l}\n"))
            .collect();
        fs::write(&first.rows_path, truncated).unwrap();
        let resumed = run_sweep(&cfg).unwrap();
        assert_eq!(resumed.resumed_cells, 2);
        assert_eq!(fs::read(&resumed.rows_path).unwrap(), full);

        let fresh = run_sweep_with(&cfg, SweepOptions { resume: false }).unwrap();
        assert_eq!(fresh.resumed_cells, 0);
        assert_eq!(fs::read(&fresh.rows_path).unwrap(), full);
    }

    #[test]
    fn expired_deadline_records_timeouts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let cell = &cfg.cells()[0];
        let r = run_instance(&cfg, cell, 0, Instant::now() - Duration::from_secs(1));
        assert!(r.error.starts_with("timeout"));
    }
}
