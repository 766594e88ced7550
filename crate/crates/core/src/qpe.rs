//! Quantum phase estimation on the clock register and its exact uncompute.
//!
//! The clock value `m` is read with bit `k` on clock qubit `k`. After the
//! forward circuit an eigenvector with `e^{iλt} = e^{2πi m/2^{n_c}}` leaves the
//! clock in `|m⟩`, so `λ̃ = 2πm / (2^{n_c} t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HhlError, Result};
use crate::exec::Exec;
use crate::hamiltonian::{evolution_ladder, EvolutionOperator, HamiltonianBackend};
use crate::linalg::ComplexMatrix;
use crate::statevector::{gates, RegisterLayout, StateVector};
use crate::TOLERANCE;

/// Largest register for which [`qft`] builds a dense matrix.
pub const MAX_QFT_MATRIX_QUBITS: usize = 12;

/// Dense QFT: entry `(j, k)` is `ω^{jk} / √(2^n)` with `ω = e^{2πi/2^n}`.
pub fn qft(n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_QFT_MATRIX_QUBITS {
        return Err(HhlError::RegisterTooLarge {
            qubits: n,
            max: MAX_QFT_MATRIX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    Ok(ComplexMatrix::from_fn(dim, |j, k| {
        // Reduce jk mod 2^n before taking the angle to keep phases exact.
        let e = (j * k) % dim;
        Complex64::from_polar(norm, 2.0 * PI * e as f64 / dim as f64)
    }))
}

fn swap_gate() -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| {
        let swapped = (j & 1) << 1 | (j >> 1);
        if i == swapped {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// QFT circuit on `qubits` (`qubits[0]` least significant).
pub fn apply_qft(state: &mut StateVector, qubits: &[usize], exec: Exec) {
    let n = qubits.len();
    let h = gates::h();
    for j in (0..n).rev() {
        state.apply_matrix_unchecked(exec, &h, &[qubits[j]], &[]);
        for k in (0..j).rev() {
            let phase = gates::phase(PI / (1u64 << (j - k)) as f64);
            state.apply_matrix_unchecked(exec, &phase, &[qubits[j]], &[qubits[k]]);
        }
    }
    let swap = swap_gate();
    for i in 0..n / 2 {
        state.apply_matrix_unchecked(exec, &swap, &[qubits[i], qubits[n - 1 - i]], &[]);
    }
}

/// Adjoint of [`apply_qft`]: the same gates in reverse with conjugated phases.
pub fn apply_inverse_qft(state: &mut StateVector, qubits: &[usize], exec: Exec) {
    let n = qubits.len();
    let swap = swap_gate();
    for i in (0..n / 2).rev() {
        state.apply_matrix_unchecked(exec, &swap, &[qubits[i], qubits[n - 1 - i]], &[]);
    }
    let h = gates::h();
    for j in 0..n {
        for k in 0..j {
            let phase = gates::phase(-PI / (1u64 << (j - k)) as f64);
            state.apply_matrix_unchecked(exec, &phase, &[qubits[j]], &[qubits[k]]);
        }
        state.apply_matrix_unchecked(exec, &h, &[qubits[j]], &[]);
    }
}

/// Running totals of controlled-`U` uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpeCost {
    /// Applications of `U`, counting `U^{2^k}` as `2^k`.
    pub controlled_u: u64,
    /// Single-term exponentials or block-encoding queries behind those applications.
    pub elementary_exponentials: u64,
}

/// Controlled powers of `U` for a fixed layout, ready to drive the forward
/// and inverse circuits.
#[derive(Debug, Clone)]
pub struct PhaseEstimator {
    layout: RegisterLayout,
    ladder: Vec<EvolutionOperator>,
    adjoints: Vec<ComplexMatrix>,
    exec: Exec,
}

impl PhaseEstimator {
    /// `ladder[k]` must be `U^{2^k}` on the data register.
    pub fn new(layout: RegisterLayout, ladder: Vec<EvolutionOperator>) -> Result<Self> {
        layout.validate()?;
        if ladder.len() != layout.n_clock {
            return Err(HhlError::DimensionMismatch {
                expected: layout.n_clock,
                found: ladder.len(),
            });
        }
        let dim = 1usize << layout.n_data;
        for rung in &ladder {
            if rung.matrix.dim() != dim {
                return Err(HhlError::DimensionMismatch {
                    expected: dim,
                    found: rung.matrix.dim(),
                });
            }
            rung.matrix.check_unitary(1e-9)?;
        }
        let adjoints = ladder.iter().map(|r| r.matrix.adjoint()).collect();
        Ok(Self {
            layout,
            ladder,
            adjoints,
            exec: Exec::default(),
        })
    }

    pub fn from_backend(
        layout: RegisterLayout,
        backend: &HamiltonianBackend,
        t: f64,
    ) -> Result<Self> {
        Self::new(layout, evolution_ladder(backend, t, layout.n_clock)?)
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn ladder(&self) -> &[EvolutionOperator] {
        &self.ladder
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        let needed = self.layout.n_data + self.layout.n_clock;
        if state.num_qubits() < needed {
            return Err(HhlError::DimensionMismatch {
                expected: needed,
                found: state.num_qubits(),
            });
        }
        Ok(())
    }

    /// Hadamards on the clock, the controlled `U^{2^k}` ladder, then the
    /// inverse QFT. The clock must start in `|0…0⟩`.
    pub fn forward(&self, state: &mut StateVector, cost: &mut QpeCost) -> Result<()> {
        self.check_state(state)?;
        let clock = self.layout.clock_qubits();
        let mass = clock_residual(state, &self.layout)?;
        if mass > TOLERANCE {
            return Err(HhlError::ClockRegisterNotCleared { mass });
        }
        let data = self.layout.data_qubits();
        let h = gates::h();
        for &q in &clock {
            state.apply_matrix_unchecked(self.exec, &h, &[q], &[]);
        }
        for (k, rung) in self.ladder.iter().enumerate() {
            state.apply_matrix_unchecked(self.exec, &rung.matrix, &data, &[clock[k]]);
            cost.controlled_u += rung.power;
            cost.elementary_exponentials += rung.elementary_exponentials;
        }
        apply_inverse_qft(state, &clock, self.exec);
        Ok(())
    }

    /// Exact adjoint of [`forward`](Self::forward).
    pub fn inverse(&self, state: &mut StateVector, cost: &mut QpeCost) -> Result<()> {
        self.check_state(state)?;
        let clock = self.layout.clock_qubits();
        let data = self.layout.data_qubits();
        apply_qft(state, &clock, self.exec);
        for k in (0..self.ladder.len()).rev() {
            state.apply_matrix_unchecked(self.exec, &self.adjoints[k], &data, &[clock[k]]);
            cost.controlled_u += self.ladder[k].power;
            cost.elementary_exponentials += self.ladder[k].elementary_exponentials;
        }
        let h = gates::h();
        for &q in &clock {
            state.apply_matrix_unchecked(self.exec, &h, &[q], &[]);
        }
        Ok(())
    }
}

/// Probability mass on clock values other than zero.
pub fn clock_residual(state: &StateVector, layout: &RegisterLayout) -> Result<f64> {
    let probs = state.marginal(&layout.clock_qubits())?;
    Ok(probs[1..].iter().sum::<f64>().max(0.0))
}

/// `λ̃_m = 2πm / (2^{n_c} t)`.
pub fn bin_eigenvalue(m: usize, n_clock: usize, t: f64) -> f64 {
    2.0 * PI * m as f64 / ((1u64 << n_clock) as f64 * t)
}

/// Clock readout after the forward circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub clock_distribution: Vec<f64>,
    pub peak_bin: usize,
    pub implied_eigenvalue: f64,
}

impl PhaseEstimate {
    pub fn from_state(state: &StateVector, layout: &RegisterLayout, t: f64) -> Result<Self> {
        let clock_distribution = state.marginal(&layout.clock_qubits())?;
        let peak_bin = clock_distribution
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (m, &p)| {
                if p > best.1 {
                    (m, p)
                } else {
                    best
                }
            })
            .0;
        Ok(Self {
            implied_eigenvalue: bin_eigenvalue(peak_bin, layout.n_clock, t),
            clock_distribution,
            peak_bin,
        })
    }
}
