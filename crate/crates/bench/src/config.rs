use std::path::{Path, PathBuf};

use hhl_core::families::{Family, FamilySpec, DEFAULT_KAPPA};
use hhl_core::hamiltonian::MethodConfig;
use hhl_core::pipeline::{HhlConfig, MAX_AUTO_CLOCK};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HHL_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "results";
pub const DEFAULT_REPEATS: usize = 50;
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_MAX_QUBITS: usize = 24;
pub const DEFAULT_CELL_TIMEOUT_SECS: f64 = 600.0;

/// Largest dimension swept per family unless a template overrides it.
pub fn default_size_cap(family: Family) -> usize {
    match family {
        Family::Diagonal => 1024,
        Family::Tridiagonal => 256,
        Family::Moderate | Family::Dense => 32,
    }
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

/// One family entry in a sweep; the seed and dimension are filled per instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyTemplate {
    pub family: Family,
    #[serde(default = "default_kappa")]
    pub kappa_target: f64,
    #[serde(default)]
    pub representable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
}

impl FamilyTemplate {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            kappa_target: DEFAULT_KAPPA,
            representable: false,
            density: None,
            max_dim: None,
        }
    }

    pub fn size_cap(&self) -> usize {
        self.max_dim
            .unwrap_or_else(|| default_size_cap(self.family))
    }

    pub fn spec(&self, dim: usize, seed: u64) -> FamilySpec {
        FamilySpec {
            family: self.family,
            dim,
            kappa_target: self.kappa_target,
            seed,
            representable: self.representable,
            density: self.density,
        }
    }
}

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}
fn default_shots() -> u64 {
    DEFAULT_SHOTS
}
fn default_max_qubits() -> usize {
    DEFAULT_MAX_QUBITS
}
fn default_timeout() -> f64 {
    DEFAULT_CELL_TIMEOUT_SECS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub families: Vec<FamilyTemplate>,
    pub sizes: Vec<usize>,
    pub methods: Vec<MethodConfig>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Passed through to the solver config; sweeps score amplitudes directly.
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub base_seed: u64,
    /// Fixed clock width; derived per instance when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_c: Option<usize>,
    /// Worker threads for instances; defaults to the rayon pool size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
    #[serde(default = "default_timeout")]
    pub cell_timeout_secs: f64,
    /// Write measured wall time; off by default so output bytes are reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

/// One `(family, N, method)` combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub template: FamilyTemplate,
    pub dim: usize,
    pub method: MethodConfig,
}

impl Cell {
    pub fn key(&self) -> (String, usize, String) {
        (
            self.template.family.to_string(),
            self.dim,
            self.method.label(),
        )
    }
}

impl SweepConfig {
    pub fn new(
        families: Vec<FamilyTemplate>,
        sizes: Vec<usize>,
        methods: Vec<MethodConfig>,
    ) -> Self {
        Self {
            families,
            sizes,
            methods,
            repeats: DEFAULT_REPEATS,
            shots: DEFAULT_SHOTS,
            output_dir: None,
            base_seed: 0,
            n_c: None,
            workers: None,
            max_qubits: DEFAULT_MAX_QUBITS,
            cell_timeout_secs: DEFAULT_CELL_TIMEOUT_SECS,
            record_wall_time: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(BenchError::io(path))?;
        Self::from_json(&text).map_err(|e| match e {
            BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if self.families.is_empty() || self.sizes.is_empty() || self.methods.is_empty() {
            return fail("families, sizes and methods must all be non-empty".into());
        }
        if self.repeats == 0 {
            return fail("repeats must be at least 1".into());
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2 || !n.is_power_of_two()) {
            return fail(format!("size {n} is not a power of two ≥ 2"));
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        if self.cell_timeout_secs.is_nan() || self.cell_timeout_secs <= 0.0 {
            return fail("cell_timeout_secs must be positive".into());
        }
        for method in &self.methods {
            if let MethodConfig::Trotter { steps: 0, .. } = method {
                return fail("Trotter steps must be positive".into());
            }
        }
        let clock = self.n_c.unwrap_or(MAX_AUTO_CLOCK);
        for cell in self.cells() {
            let qubits = cell.dim.trailing_zeros() as usize + clock + 1;
            if qubits > self.max_qubits {
                return fail(format!(
                    "{} N = {} needs up to {qubits} qubits, above max_qubits = {}",
                    cell.template.family, cell.dim, self.max_qubits
                ));
            }
        }
        Ok(())
    }

    /// Cells in sweep order (family, then size, then method), skipping sizes
    /// above each family's cap.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for template in &self.families {
            for &dim in &self.sizes {
                if dim > template.size_cap() {
                    continue;
                }
                for method in &self.methods {
                    cells.push(Cell {
                        template: template.clone(),
                        dim,
                        method: *method,
                    });
                }
            }
        }
        cells
    }

    pub fn instance_seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    pub fn solver_config(&self, method: MethodConfig, seed: u64) -> HhlConfig {
        HhlConfig {
            method,
            n_clock: self.n_c,
            shots: self.shots,
            seed,
            ..HhlConfig::default()
        }
    }

    /// Explicit directory, else the environment variable, else `results`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(default_output_dir)
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}
