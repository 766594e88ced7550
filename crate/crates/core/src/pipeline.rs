//! The end-to-end solver: state preparation, phase estimation, eigenvalue
//! inversion, post-selection, uncompute and scoring.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HhlError, Result};
use crate::exec::Exec;
use crate::hamiltonian::{MethodConfig, DEFAULT_TAYLOR_TOLERANCE};
use crate::linalg::{
    hermitian_eigendecomposition, norm2, normalized_solution, solve_linear, ProblemInstance,
    Spectrum,
};
use crate::qpe::{bin_eigenvalue, clock_residual, PhaseEstimator, QpeCost};
use crate::statevector::{fidelity, gates, RegisterLayout, StateVector};
use crate::TOLERANCE;

/// Widest clock register the automatic grid search will try.
pub const MAX_AUTO_CLOCK: usize = 7;
/// Clock width used when no grid up to [`MAX_AUTO_CLOCK`] fits the spectrum.
pub const FALLBACK_CLOCK: usize = 6;
/// Default `C` as a fraction of the smallest populated bin eigenvalue.
pub const C_FRACTION: f64 = 0.9;
/// Below this ancilla-|1⟩ probability the run is abandoned.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-12;
/// Largest bin-0 mass tolerated when eigenvalues fall between clock bins.
pub const LEAKY_BIN_ZERO_THRESHOLD: f64 = 0.05;

const GRID_TOLERANCE: f64 = 1e-9;

fn default_shots() -> u64 {
    10_000
}

fn default_epsilon() -> f64 {
    DEFAULT_TAYLOR_TOLERANCE
}

/// Solver configuration. Unset clock parameters are derived from the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhlConfig {
    #[serde(flatten)]
    pub method: MethodConfig,
    #[serde(default, rename = "n_c", skip_serializing_if = "Option::is_none")]
    pub n_clock: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Target precision; bounds the Taylor truncation error of the block backend.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl Default for HhlConfig {
    fn default() -> Self {
        Self {
            method: MethodConfig::Exact,
            n_clock: None,
            t: None,
            c: None,
            shots: default_shots(),
            seed: 0,
            epsilon: default_epsilon(),
        }
    }
}

impl HhlConfig {
    pub fn with_method(method: MethodConfig) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Clock parameters actually used for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockSetup {
    pub n_clock: usize,
    pub t: f64,
    pub c: f64,
    /// Every eigenvalue sits exactly on a clock bin.
    pub representable: bool,
}

impl ClockSetup {
    /// Fractional clock position `λ t 2^{n_c} / 2π`.
    pub fn bin_position(&self, lambda: f64) -> f64 {
        lambda * self.t * (1u64 << self.n_clock) as f64 / (2.0 * PI)
    }

    pub fn bin_eigenvalue(&self, m: usize) -> f64 {
        bin_eigenvalue(m, self.n_clock, self.t)
    }

    /// Largest bin-0 probability accepted before inversion.
    pub fn bin_zero_threshold(&self) -> f64 {
        if self.representable {
            TOLERANCE
        } else {
            LEAKY_BIN_ZERO_THRESHOLD
        }
    }
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= GRID_TOLERANCE * x.abs().max(1.0)
}

fn on_grid(eigenvalues: &[f64], n_clock: usize, t: f64) -> bool {
    let top = (1u64 << n_clock) as f64;
    eigenvalues.iter().all(|&l| {
        let m = l * t * top / (2.0 * PI);
        near_integer(m) && m.round() >= 1.0 && m.round() < top
    })
}

/// Smallest clock width (and matching `t`) placing every eigenvalue on an
/// integer bin, searching `n_c ≤ MAX_AUTO_CLOCK`.
pub fn detect_clock_grid(eigenvalues: &[f64]) -> Option<(usize, f64)> {
    let lmax = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if lmax.is_nan() || lmax <= 0.0 || eigenvalues.iter().any(|&l| l <= 0.0) {
        return None;
    }
    for n_clock in 1..=MAX_AUTO_CLOCK {
        let top = 1usize << n_clock;
        for m_top in 1..top {
            let unit = lmax / m_top as f64;
            if eigenvalues
                .iter()
                .all(|&l| near_integer(l / unit) && (l / unit).round() >= 1.0)
            {
                return Some((n_clock, 2.0 * PI / (top as f64 * unit)));
            }
        }
    }
    None
}

/// `t` mapping `λ_max` onto the top clock bin `2^{n_c} − 1`.
pub fn default_time(n_clock: usize, lambda_max: f64) -> f64 {
    let top = (1u64 << n_clock) as f64;
    2.0 * PI * (top - 1.0) / (top * lambda_max)
}

/// Resolves `n_c`, `t` and `C` for a positive-definite spectrum.
pub fn resolve_clock(spectrum: &Spectrum, config: &HhlConfig) -> Result<ClockSetup> {
    let eig = &spectrum.eigenvalues;
    let lmin = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lmin <= 0.0 {
        return Err(HhlError::IndefiniteMatrix {
            min_eigenvalue: lmin,
        });
    }
    let (n_clock, t) = match (config.n_clock, config.t) {
        (Some(n), Some(t)) => (n, t),
        (Some(n), None) => (n, default_time(n, lmax)),
        (None, Some(t)) => {
            let n = (1..=MAX_AUTO_CLOCK)
                .find(|&n| on_grid(eig, n, t))
                .unwrap_or(FALLBACK_CLOCK);
            (n, t)
        }
        (None, None) => {
            detect_clock_grid(eig).unwrap_or((FALLBACK_CLOCK, default_time(FALLBACK_CLOCK, lmax)))
        }
    };
    if n_clock == 0 {
        return Err(HhlError::InvalidConfig(
            "clock width n_c must be at least 1".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(HhlError::InvalidConfig(format!(
            "evolution time t = {t} must be positive"
        )));
    }
    let mut setup = ClockSetup {
        n_clock,
        t,
        c: 0.0,
        representable: on_grid(eig, n_clock, t),
    };
    let top = (1usize << n_clock) as f64;
    let wrap = setup.bin_position(lmax);
    if wrap.round() >= top {
        return Err(HhlError::InvalidConfig(format!(
            "λ_max = {lmax} lands on clock position {wrap:.3} ≥ 2^n_c = {top}; reduce t"
        )));
    }
    let smallest_bin = eig
        .iter()
        .map(|&l| setup.bin_eigenvalue((setup.bin_position(l).round() as usize).max(1)))
        .fold(f64::INFINITY, f64::min);
    setup.c = match config.c {
        None => C_FRACTION * smallest_bin,
        Some(c) if c > 0.0 && c <= smallest_bin * (1.0 + GRID_TOLERANCE) => c,
        Some(c) => {
            return Err(HhlError::InvalidConfig(format!(
                "C = {c} must lie in (0, {smallest_bin}]"
            )))
        }
    };
    Ok(setup)
}

/// Exact amplitude encoding of `b / ‖b‖` on `log2 N` qubits.
///
/// Built as a binary tree of controlled SU(2) rotations: qubit `k` is rotated
/// conditioned on the value of all higher qubits, splitting each subtree's
/// weight between its two halves. The lower qubits are still `|0⟩` when
/// qubit `k` is reached, so each rotation touches a single amplitude pair.
pub fn prepare_b(b: &[Complex64]) -> Result<StateVector> {
    let n = b.len();
    if !n.is_power_of_two() {
        return Err(HhlError::NonPowerOfTwoDimension(n));
    }
    let norm = norm2(b);
    if norm == 0.0 {
        return Err(HhlError::ZeroVector);
    }
    let qubits = n.trailing_zeros() as usize;
    let mut state = StateVector::zero(qubits)?;
    // weights[k][p]: squared norm of the block of b with prefix p above qubit k.
    let mut weights: Vec<Vec<f64>> = vec![b.iter().map(|a| a.norm_sqr()).collect()];
    for _ in 0..qubits {
        let prev = weights.last().unwrap();
        weights.push(prev.chunks(2).map(|p| p[0] + p[1]).collect());
    }
    let amps = state.amplitudes_mut();
    for k in (0..qubits).rev() {
        let level = &weights[k];
        for prefix in 0..n >> (k + 1) {
            let i0 = prefix << (k + 1);
            let i1 = i0 | 1 << k;
            let total = level[2 * prefix] + level[2 * prefix + 1];
            if total == 0.0 {
                continue;
            }
            let (a, c) = if k == 0 {
                // Leaf rotation carries the complex phases.
                let s = total.sqrt();
                (b[i0] / s, b[i1] / s)
            } else {
                let s = total.sqrt();
                (
                    Complex64::new(level[2 * prefix].sqrt() / s, 0.0),
                    Complex64::new(level[2 * prefix + 1].sqrt() / s, 0.0),
                )
            };
            let g = gates::with_first_column(a, c);
            let v = amps[i0];
            amps[i0] = g[(0, 0)] * v;
            amps[i1] = g[(1, 0)] * v;
        }
    }
    Ok(state)
}

/// Places a data-register state into the full `(ancilla, clock, data)` layout.
pub fn embed_data(layout: &RegisterLayout, data: &StateVector) -> Result<StateVector> {
    if data.num_qubits() != layout.n_data {
        return Err(HhlError::DimensionMismatch {
            expected: layout.n_data,
            found: data.num_qubits(),
        });
    }
    let mut full = StateVector::zero(layout.total_qubits())?;
    full.amplitudes_mut()[..data.amplitudes().len()].copy_from_slice(data.amplitudes());
    Ok(full)
}

/// Rotates the ancilla by `2 arcsin(C/λ̃_m)` on clock value `m`, for every
/// `m ≥ 1`. Ratios above one are clamped to a full rotation.
pub fn eigenvalue_inversion(
    state: &mut StateVector,
    layout: &RegisterLayout,
    c: f64,
    t: f64,
    bin_zero_threshold: f64,
) -> Result<()> {
    if state.num_qubits() != layout.total_qubits() {
        return Err(HhlError::DimensionMismatch {
            expected: layout.total_qubits(),
            found: state.num_qubits(),
        });
    }
    let bin_zero = state.marginal(&layout.clock_qubits())?[0];
    if bin_zero > bin_zero_threshold {
        return Err(HhlError::ZeroEigenvalueBin {
            probability: bin_zero,
        });
    }
    let rotations: Vec<(f64, f64)> = (0..1usize << layout.n_clock)
        .map(|m| {
            if m == 0 {
                (1.0, 0.0)
            } else {
                let ratio = (c / bin_eigenvalue(m, layout.n_clock, t)).min(1.0);
                ((1.0 - ratio * ratio).max(0.0).sqrt(), ratio)
            }
        })
        .collect();
    let half = 1usize << layout.ancilla_qubit();
    let (low, high) = state.amplitudes_mut().split_at_mut(half);
    for (idx, (a0, a1)) in low.iter_mut().zip(high.iter_mut()).enumerate() {
        let (cos, sin) = rotations[layout.clock_value(idx)];
        let (x0, x1) = (*a0, *a1);
        *a0 = x0 * cos - x1 * sin;
        *a1 = x0 * sin + x1 * cos;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HhlCost {
    /// Controlled-`U` applications in the forward phase estimation.
    pub controlled_u_count: u64,
    /// Elementary exponentials behind those applications.
    pub elementary_exp_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhlResult {
    #[serde(with = "crate::io::complex_vec")]
    pub solution_amplitudes: Vec<Complex64>,
    pub success_probability: f64,
    /// Norm `C′` of the clock-zero, ancilla-one component before renormalisation.
    pub post_norm: f64,
    pub fidelity: f64,
    pub clock_residual: f64,
    pub cost: HhlCost,
    pub method: String,
    pub clock: ClockSetup,
}

/// Runs the solver with the default executor.
pub fn run_hhl(problem: &ProblemInstance, config: &HhlConfig) -> Result<HhlResult> {
    run_hhl_with(problem, config, Exec::default())
}

pub fn run_hhl_with(
    problem: &ProblemInstance,
    config: &HhlConfig,
    exec: Exec,
) -> Result<HhlResult> {
    let n = problem.dim();
    if !n.is_power_of_two() {
        return Err(HhlError::NonPowerOfTwoDimension(n));
    }
    let spectrum = hermitian_eigendecomposition(&problem.matrix)?;
    let clock = resolve_clock(&spectrum, config)?;
    let layout = RegisterLayout::new(clock.n_clock, n.trailing_zeros() as usize)?;
    let backend = config
        .method
        .build(&problem.matrix, &spectrum, config.epsilon)?;
    let qpe = PhaseEstimator::from_backend(layout, &backend, clock.t)?.with_exec(exec);

    let mut state = embed_data(&layout, &prepare_b(&problem.rhs)?)?;
    let mut forward = QpeCost::default();
    qpe.forward(&mut state, &mut forward)?;
    let bin_zero_threshold = match config.method {
        MethodConfig::Trotter { .. } => LEAKY_BIN_ZERO_THRESHOLD,
        _ => clock.bin_zero_threshold(),
    };
    eigenvalue_inversion(&mut state, &layout, clock.c, clock.t, bin_zero_threshold)?;

    let ancilla = layout.ancilla_qubit();
    let measurement = state.measure_qubit(ancilla)?;
    let success_probability = measurement.p1;
    if success_probability < MIN_SUCCESS_PROBABILITY {
        return Err(HhlError::PostSelectionImpossible {
            probability: success_probability,
        });
    }
    let mut state = measurement.into_collapsed(1)?;
    qpe.inverse(&mut state, &mut QpeCost::default())?;
    let clock_residual = clock_residual(&state, &layout)?;

    let offset = 1usize << ancilla;
    let raw: Vec<Complex64> = state.amplitudes()[offset..offset + n].to_vec();
    let component = norm2(&raw);
    if component == 0.0 {
        return Err(HhlError::PostSelectionImpossible { probability: 0.0 });
    }
    let solution_amplitudes: Vec<Complex64> = raw.iter().map(|a| a / component).collect();
    let reference = normalized_solution(problem)?;
    Ok(HhlResult {
        fidelity: fidelity(&reference, &solution_amplitudes)?,
        solution_amplitudes,
        post_norm: (success_probability * component * component).sqrt(),
        success_probability,
        clock_residual,
        cost: HhlCost {
            controlled_u_count: forward.controlled_u,
            elementary_exp_count: forward.elementary_exponentials,
        },
        method: config.method.label(),
        clock,
    })
}

/// `|x_i|² / ‖x‖²` for the classical solution.
pub fn expected_outcome_distribution(problem: &ProblemInstance) -> Result<Vec<f64>> {
    let x = solve_linear(problem)?;
    let total: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    Ok(x.iter().map(|a| a.norm_sqr() / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::TrotterOrder;
    use crate::linalg::ComplexMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn worked_example() -> ProblemInstance {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, -0.5], &[-0.5, 1.0]]).unwrap();
        ProblemInstance::new(a, real(&[1.0, 0.0])).unwrap()
    }

    /// Random unitary from Gram-Schmidt on Gaussian-ish columns.
    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        while cols.len() < n {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            for u in &cols {
                let p = crate::linalg::inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
            let nv = norm2(&v);
            if nv > 1e-6 {
                cols.push(v.iter().map(|x| x / nv).collect());
            }
        }
        ComplexMatrix::from_fn(n, |i, j| cols[j][i])
    }

    /// Positive-definite matrix with eigenvalues on integer bins.
    fn grid_problem(n: usize, seed: u64) -> (ProblemInstance, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eig: Vec<f64> = (0..n)
            .map(|_| rng.random_range(1..16) as f64 / 4.0)
            .collect();
        let u = random_unitary(n, &mut rng);
        let a = u
            .matmul(&ComplexMatrix::from_real_diagonal(&eig))
            .matmul(&u.adjoint())
            .hermitian_part();
        let b: Vec<Complex64> = (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        (ProblemInstance::new(a, b).unwrap(), eig)
    }

    #[test]
    fn prepare_b_examples() {
        let s = prepare_b(&real(&[1.0, 0.0])).unwrap();
        assert_eq!(s.amplitudes(), &real(&[1.0, 0.0])[..]);
        let s = prepare_b(&real(&[1.0; 8])).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| (a - c(8f64.sqrt().recip(), 0.0)).norm() < 1e-15));
        let s = prepare_b(&real(&[3.0, 4.0])).unwrap();
        assert!((s.amplitudes()[0] - c(0.6, 0.0)).norm() <= 1e-12);
        assert!((s.amplitudes()[1] - c(0.8, 0.0)).norm() <= 1e-12);
        assert!(matches!(
            prepare_b(&real(&[0.0, 0.0])),
            Err(HhlError::ZeroVector)
        ));
    }

    #[test]
    fn prepare_b_complex_and_sparse() {
        let b = vec![
            c(0.0, 0.0),
            c(1.0, -2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-0.5, 0.1),
            c(0.0, 0.0),
            c(0.0, 3.0),
            c(0.2, 0.2),
        ];
        let s = prepare_b(&b).unwrap();
        let nb = norm2(&b);
        for (got, want) in s.amplitudes().iter().zip(&b) {
            assert!((got - want / nb).norm() <= 1e-12);
        }
    }

    #[test]
    fn grid_detection() {
        let (n, t) = detect_clock_grid(&[0.5, 1.5]).unwrap();
        assert_eq!(n, 2);
        assert!((t - PI).abs() < 1e-12);
        let (n, t) = detect_clock_grid(&[1.0, 3.0]).unwrap();
        assert_eq!((n, (t * 4.0 / PI).round()), (2, 2.0));
        assert_eq!(detect_clock_grid(&[1.0, 2f64.sqrt()]), None);
        assert_eq!(detect_clock_grid(&[-1.0, 1.0]), None);
    }

    #[test]
    fn clock_resolution_defaults() {
        let s = hermitian_eigendecomposition(&worked_example().matrix).unwrap();
        let setup = resolve_clock(&s, &HhlConfig::default()).unwrap();
        assert_eq!(setup.n_clock, 2);
        assert!(setup.representable);
        assert!((setup.c - 0.45).abs() < 1e-12);

        let irr = ComplexMatrix::from_real_diagonal(&[1.0, 2f64.sqrt()]);
        let s = hermitian_eigendecomposition(&irr).unwrap();
        let setup = resolve_clock(&s, &HhlConfig::default()).unwrap();
        assert_eq!(setup.n_clock, FALLBACK_CLOCK);
        assert!(!setup.representable);
        assert!((setup.bin_position(2f64.sqrt()) - 63.0).abs() < 1e-9);
    }

    #[test]
    fn clock_resolution_errors() {
        let s =
            hermitian_eigendecomposition(&ComplexMatrix::from_real_diagonal(&[-1.0, 2.0])).unwrap();
        assert!(matches!(
            resolve_clock(&s, &HhlConfig::default()),
            Err(HhlError::IndefiniteMatrix { .. })
        ));
        let s = hermitian_eigendecomposition(&worked_example().matrix).unwrap();
        let too_big = HhlConfig {
            c: Some(0.6),
            ..HhlConfig::default()
        };
        assert!(matches!(
            resolve_clock(&s, &too_big),
            Err(HhlError::InvalidConfig(_))
        ));
        let wraps = HhlConfig {
            n_clock: Some(2),
            t: Some(2.0 * PI),
            ..HhlConfig::default()
        };
        assert!(matches!(
            resolve_clock(&s, &wraps),
            Err(HhlError::InvalidConfig(_))
        ));
    }

    #[test]
    fn inversion_single_bin_full_rotation() {
        let layout = RegisterLayout::new(2, 1).unwrap();
        // Clock value 2 at t = π: λ̃ = 1.
        let mut s = StateVector::basis(layout.total_qubits(), 2 << layout.n_data).unwrap();
        eigenvalue_inversion(&mut s, &layout, 1.0, PI, 1e-10).unwrap();
        let m = s.measure_qubit(layout.ancilla_qubit()).unwrap();
        assert!((m.p1 - 1.0).abs() < 1e-15);

        let mut s = StateVector::basis(layout.total_qubits(), 2 << layout.n_data).unwrap();
        eigenvalue_inversion(&mut s, &layout, 0.5, PI, 1e-10).unwrap();
        let m = s.measure_qubit(layout.ancilla_qubit()).unwrap();
        assert!((m.p1 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn inversion_rejects_bin_zero() {
        let layout = RegisterLayout::new(2, 1).unwrap();
        let mut s = StateVector::zero(layout.total_qubits()).unwrap();
        assert!(matches!(
            eigenvalue_inversion(&mut s, &layout, 0.5, PI, 1e-10),
            Err(HhlError::ZeroEigenvalueBin { .. })
        ));
    }

    #[test]
    fn worked_example_branch_ratio() {
        let problem = worked_example();
        let s = hermitian_eigendecomposition(&problem.matrix).unwrap();
        let layout = RegisterLayout::new(2, 1).unwrap();
        let backend = MethodConfig::Exact
            .build(&problem.matrix, &s, 1e-12)
            .unwrap();
        let qpe = PhaseEstimator::from_backend(layout, &backend, PI).unwrap();
        let mut state = embed_data(&layout, &prepare_b(&problem.rhs).unwrap()).unwrap();
        qpe.forward(&mut state, &mut QpeCost::default()).unwrap();
        eigenvalue_inversion(&mut state, &layout, 0.5, PI, 1e-10).unwrap();
        let anc = 1usize << layout.ancilla_qubit();
        let branch = |m: usize| -> f64 {
            (0..2)
                .map(|d| state.amplitudes()[anc | m << layout.n_data | d].norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        assert!((branch(1) / branch(3) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn worked_example_end_to_end() {
        let problem = worked_example();
        let r = run_hhl(&problem, &HhlConfig::default()).unwrap();
        let expected = [2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()];
        let phase = r.solution_amplitudes[0] / r.solution_amplitudes[0].norm();
        for (a, e) in r.solution_amplitudes.iter().zip(expected) {
            assert!((a / phase - c(e, 0.0)).norm() <= 1e-10);
        }
        assert!(r.fidelity >= 1.0 - 1e-12);
        assert!(r.clock_residual <= 1e-10);
        let probs: Vec<f64> = r.solution_amplitudes.iter().map(|a| a.norm_sqr()).collect();
        assert!((probs[0] - 0.8).abs() < 1e-10 && (probs[1] - 0.2).abs() < 1e-10);
        assert_eq!(r.cost.controlled_u_count, 3);
        // β = (1, 1)/√2 over λ̃ = (0.5, 1.5), C = 0.45.
        let expected_p = 0.5 * (0.45f64 / 0.5).powi(2) + 0.5 * (0.45f64 / 1.5).powi(2);
        assert!((r.success_probability - expected_p).abs() <= 1e-9);
    }

    #[test]
    fn identity_problem() {
        let b = vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.9, -0.4), c(0.0, 0.5)];
        let problem = ProblemInstance::new(ComplexMatrix::identity(4), b.clone()).unwrap();
        let r = run_hhl(&problem, &HhlConfig::default()).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-12);
        assert!((r.success_probability - r.clock.c.powi(2)).abs() <= 1e-12);
        let nb = norm2(&b);
        for (a, e) in r.solution_amplitudes.iter().zip(&b) {
            assert!((a - e / nb).norm() <= 1e-10);
        }
    }

    #[test]
    fn expected_distributions() {
        let p = expected_outcome_distribution(&worked_example()).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12);
        let id = ProblemInstance::new(ComplexMatrix::identity(2), real(&[1.0, 0.0])).unwrap();
        assert_eq!(expected_outcome_distribution(&id).unwrap(), vec![1.0, 0.0]);
        let d = ProblemInstance::new(
            ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            real(&[0.5f64.sqrt(), 0.5f64.sqrt()]),
        )
        .unwrap();
        let p = expected_outcome_distribution(&d).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn random_grid_problem_is_exact() {
        let (problem, _) = grid_problem(8, 77);
        let r = run_hhl(&problem, &HhlConfig::default()).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-8, "{}", r.fidelity);
        assert!(r.clock_residual <= 1e-10);
        assert!(r.clock.representable);
    }

    #[test]
    fn non_representable_leaks_but_runs() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2f64.sqrt()]);
        let problem = ProblemInstance::new(a, real(&[1.0, 1.0])).unwrap();
        let r = run_hhl(&problem, &HhlConfig::default()).unwrap();
        assert!(r.clock_residual > 0.0);
        assert!(r.fidelity > 0.9 && r.fidelity < 1.0);
    }

    #[test]
    fn trotter_fidelity_improves_with_steps() {
        let a = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.2, 0.0, 0.1],
            &[0.2, 1.5, 0.3, 0.0],
            &[0.0, 0.3, 0.8, 0.2],
            &[0.1, 0.0, 0.2, 1.2],
        ])
        .unwrap();
        let problem = ProblemInstance::new(a, real(&[1.0, 0.5, -0.3, 0.2])).unwrap();
        let fids: Vec<f64> = [1u64, 2, 4, 8, 16]
            .iter()
            .map(|&steps| {
                let cfg = HhlConfig::with_method(MethodConfig::Trotter {
                    steps,
                    order: TrotterOrder::First,
                });
                run_hhl(&problem, &cfg).unwrap().fidelity
            })
            .collect();
        assert!(fids.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{fids:?}");
        let exact = run_hhl(&problem, &HhlConfig::default()).unwrap().fidelity;
        assert!((fids[4] - exact).abs() < 1e-2);
    }

    #[test]
    fn block_backend_matches_exact() {
        let (problem, _) = grid_problem(4, 5);
        let exact = run_hhl(&problem, &HhlConfig::default()).unwrap();
        let block = run_hhl(
            &problem,
            &HhlConfig::with_method(MethodConfig::Block { taylor_k: None }),
        )
        .unwrap();
        assert!(block.fidelity >= 1.0 - 1e-8);
        assert!((block.success_probability - exact.success_probability).abs() <= 1e-9);
        assert!(block.cost.elementary_exp_count > 0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (problem, _) = grid_problem(16, 9);
        let cfg = HhlConfig::default();
        let a = run_hhl_with(&problem, &cfg, Exec::Sequential).unwrap();
        let b = run_hhl_with(&problem, &cfg, Exec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_json() {
        let cfg: HhlConfig = serde_json::from_str(
            r#"{"method":"trotter","steps":4,"order":1,"n_c":3,"C":0.2,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(
            cfg.method,
            MethodConfig::Trotter {
                steps: 4,
                order: TrotterOrder::First
            }
        );
        assert_eq!(
            (cfg.n_clock, cfg.c, cfg.t, cfg.seed, cfg.shots),
            (Some(3), Some(0.2), None, 7, 10_000)
        );
        let back: HhlConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let d: HhlConfig = serde_json::from_str(r#"{"method":"exact"}"#).unwrap();
        assert_eq!(d, HhlConfig::default());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn exact_grid_fidelity(seed in any::<u64>(), log_n in 1usize..=3) {
            let (problem, eig) = grid_problem(1 << log_n, seed);
            let r = run_hhl(&problem, &HhlConfig::default()).unwrap();
            prop_assert!(r.fidelity >= 1.0 - 1e-8);
            prop_assert!(r.clock_residual <= 1e-10);
            prop_assert!(r.success_probability <= 1.0);
            // C² Σ|β_j/λ_j|² / Σ|β_j|².
            let s = hermitian_eigendecomposition(&problem.matrix).unwrap();
            let beta = s.coefficients(&problem.rhs);
            let nb: f64 = beta.iter().map(|x| x.norm_sqr()).sum();
            let predicted: f64 = beta.iter().zip(&s.eigenvalues)
                .map(|(b, l)| (b * r.clock.c / l).norm_sqr()).sum::<f64>() / nb;
            prop_assert!((r.success_probability - predicted).abs() <= 1e-9);
            let mut sorted = eig.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assert!(sorted.iter().zip(&s.eigenvalues).all(|(a, b)| (a - b).abs() < 1e-9));
        }

        #[test]
        fn rhs_scaling_invariance(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
            prop_assume!(re.hypot(im) > 1e-3);
            let (problem, _) = grid_problem(4, seed);
            let scale = c(re, im);
            let scaled = ProblemInstance::new(
                problem.matrix.clone(),
                problem.rhs.iter().map(|b| b * scale).collect(),
            ).unwrap();
            let r1 = run_hhl(&problem, &HhlConfig::default()).unwrap();
            let r2 = run_hhl(&scaled, &HhlConfig::default()).unwrap();
            prop_assert!((r1.fidelity - r2.fidelity).abs() <= 1e-10);
            let overlap = crate::statevector::fidelity(&r1.solution_amplitudes, &r2.solution_amplitudes).unwrap();
            prop_assert!(overlap >= 1.0 - 1e-10);
        }
    }
}
