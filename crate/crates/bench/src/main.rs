use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hhl_bench::config::{default_output_dir, SweepConfig, OUTPUT_DIR_ENV};
use hhl_bench::{emit_plots, run_eq3_experiment, run_sweep_with, BenchError, SweepOptions};
use hhl_core::io::{parse_config, parse_problem, result_json};
use hhl_core::pipeline::run_hhl;

#[derive(Parser)]
#[command(
    name = "hhl-bench",
    version,
    about = "Benchmarks for the state-vector HHL simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a family × size × method sweep described by a JSON config.
    Sweep {
        config: PathBuf,
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        base_seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        max_qubits: Option<usize>,
        #[arg(long)]
        cell_timeout_secs: Option<f64>,
        /// Discard any existing rows instead of resuming.
        #[arg(long)]
        fresh: bool,
        #[arg(long)]
        record_wall_time: bool,
    },
    /// Repeated shot-sampled solves of the 2×2 worked example.
    Eq3 {
        #[arg(long, default_value_t = 50)]
        repeats: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
    },
    /// Render SVG charts from the CSVs in a directory.
    Plot {
        dir: PathBuf,
        /// Where to write the SVGs; defaults to the input directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve one problem file and print the result as JSON.
    Solve {
        problem: PathBuf,
        /// Solver config; overrides any config embedded in the problem file.
        config: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(command: Command) -> Result<(), BenchError> {
    match command {
        Command::Sweep {
            config,
            output_dir,
            repeats,
            shots,
            base_seed,
            workers,
            max_qubits,
            cell_timeout_secs,
            fresh,
            record_wall_time,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            cfg.repeats = repeats.unwrap_or(cfg.repeats);
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.base_seed = base_seed.unwrap_or(cfg.base_seed);
            cfg.workers = workers.or(cfg.workers);
            cfg.max_qubits = max_qubits.unwrap_or(cfg.max_qubits);
            cfg.cell_timeout_secs = cell_timeout_secs.unwrap_or(cfg.cell_timeout_secs);
            cfg.record_wall_time |= record_wall_time;
            let out = run_sweep_with(&cfg, SweepOptions { resume: !fresh })?;
            let errors = out.rows.iter().filter(|r| r.is_error()).count();
            println!(
                "{} rows ({} errors, {} cells resumed)\n{}\n{}",
                out.rows.len(),
                errors,
                out.resumed_cells,
                out.rows_path.display(),
                out.summary_path.display()
            );
        }
        Command::Eq3 {
            repeats,
            shots,
            seed,
            output_dir,
        } => {
            let dir = output_dir.unwrap_or_else(default_output_dir);
            let out = run_eq3_experiment(repeats, shots, seed, &dir)?;
            println!(
                "mean p0 = {:.5}  mean p1 = {:.5}  mean ratio = {:.4}\n{}\n{}",
                out.mean_p0,
                out.mean_p1,
                out.mean_ratio,
                out.counts_path.display(),
                out.ratios_path.display()
            );
        }
        Command::Plot { dir, output_dir } => {
            let out = output_dir.unwrap_or_else(|| dir.clone());
            for svg in emit_plots(&dir, &out)? {
                println!("{}", svg.display());
            }
        }
        Command::Solve { problem, config } => {
            let doc = parse_problem(&read(&problem)?)?;
            let cfg = match config {
                Some(path) => parse_config(&read(&path)?)?,
                None => doc.config.clone().unwrap_or_default(),
            };
            let result = run_hhl(&doc.instance()?, &cfg)?;
            println!("{}", result_json(&result));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
