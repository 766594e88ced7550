//! Dense state-vector simulation.
//!
//! Qubit `q` is bit `q` of the basis-state index (qubit 0 is the least
//! significant bit). A [`RegisterLayout`] places the data register on the low
//! qubits, the clock register above it and the single ancilla on the most
//! significant qubit, so an index reads `ancilla | clock | data` from high to
//! low bits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HhlError, Result};
use crate::exec::Exec;
use crate::linalg::{inner, ComplexMatrix, ONE, ZERO};
use crate::TOLERANCE;

/// Amplitude budget for a single state vector.
pub const MAX_QUBITS: usize = 26;

/// Probability below which a measurement branch cannot be collapsed onto.
pub const ZERO_BRANCH_PROBABILITY: f64 = 1e-14;

/// `(ancilla, clock, data)` register layout, most to least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub n_clock: usize,
    pub n_data: usize,
}

impl RegisterLayout {
    pub const N_ANCILLA: usize = 1;

    pub fn new(n_clock: usize, n_data: usize) -> Result<Self> {
        let layout = Self { n_clock, n_data };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        let qubits = self.total_qubits();
        if qubits > MAX_QUBITS {
            return Err(HhlError::RegisterTooLarge {
                qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn total_qubits(&self) -> usize {
        Self::N_ANCILLA + self.n_clock + self.n_data
    }

    pub fn data_qubits(&self) -> Vec<usize> {
        (0..self.n_data).collect()
    }

    pub fn clock_qubit(&self, k: usize) -> usize {
        self.n_data + k
    }

    pub fn clock_qubits(&self) -> Vec<usize> {
        (0..self.n_clock).map(|k| self.clock_qubit(k)).collect()
    }

    pub fn ancilla_qubit(&self) -> usize {
        self.n_data + self.n_clock
    }

    /// Clock register value encoded in basis index `idx`.
    #[inline]
    pub fn clock_value(&self, idx: usize) -> usize {
        (idx >> self.n_data) & ((1 << self.n_clock) - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `|0…0⟩` over the full `(ancilla, clock, data)` register.
pub fn init_state(layout: &RegisterLayout) -> Result<StateVector> {
    layout.validate()?;
    StateVector::zero(layout.total_qubits())
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(HhlError::RegisterTooLarge {
                qubits: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalisation
    /// is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(HhlError::NonPowerOfTwoDimension(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(HhlError::RegisterTooLarge {
                qubits: num_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(num_qubits)?;
        s.amplitudes[0] = ZERO;
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        let amps = &self.amplitudes;
        Exec::default().sum(amps.len(), |i| amps[i].norm_sqr())
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(HhlError::ZeroVector);
        }
        let inv = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            Err(HhlError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn check_operands(&self, targets: &[usize], controls: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in targets.iter().chain(controls) {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(HhlError::IndexOverlap(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Applies `u` to `targets`, conditioned on every qubit in `controls`
    /// being `|1⟩`. Bit `i` of the local index of `u` is `targets[i]`.
    pub fn apply_unitary(
        &mut self,
        u: &ComplexMatrix,
        targets: &[usize],
        controls: &[usize],
    ) -> Result<()> {
        self.apply_unitary_with(Exec::default(), u, targets, controls)
    }

    pub fn apply_unitary_with(
        &mut self,
        exec: Exec,
        u: &ComplexMatrix,
        targets: &[usize],
        controls: &[usize],
    ) -> Result<()> {
        self.check_operands(targets, controls)?;
        let expected = 1usize << targets.len();
        if u.dim() != expected {
            return Err(HhlError::DimensionMismatch {
                expected,
                found: u.dim(),
            });
        }
        u.check_unitary(TOLERANCE)?;
        self.apply_matrix_unchecked(exec, u, targets, controls);
        Ok(())
    }

    /// Gate kernel without operand validation. The array is split into
    /// contiguous chunks spanning every target qubit, so chunks are
    /// independent and can be processed in parallel.
    pub(crate) fn apply_matrix_unchecked(
        &mut self,
        exec: Exec,
        u: &ComplexMatrix,
        targets: &[usize],
        controls: &[usize],
    ) {
        let k = targets.len();
        let d = 1usize << k;
        const MIN_CHUNK_BITS: usize = 12;
        let chunk_bits = targets
            .iter()
            .map(|&t| t + 1)
            .max()
            .unwrap_or(0)
            .max(MIN_CHUNK_BITS.min(self.num_qubits));
        let chunk_len = 1usize << chunk_bits;

        let mut low_ctrl = 0usize;
        let mut high_ctrl = 0usize;
        for &c in controls {
            if c < chunk_bits {
                low_ctrl |= 1 << c;
            } else {
                high_ctrl |= 1 << (c - chunk_bits);
            }
        }

        let offsets: Vec<usize> = (0..d)
            .map(|l| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| l >> i & 1 == 1)
                    .map(|(_, &t)| 1usize << t)
                    .sum()
            })
            .collect();
        let mut sorted_targets = targets.to_vec();
        sorted_targets.sort_unstable();
        let spread = |mut r: usize| -> usize {
            for &t in &sorted_targets {
                let low = r & ((1 << t) - 1);
                r = ((r >> t) << (t + 1)) | low;
            }
            r
        };
        let base_count = chunk_len >> k;

        let diagonal = if u.is_diagonal() {
            Some(u.diagonal())
        } else {
            None
        };

        exec.for_each_chunk(&mut self.amplitudes, chunk_len, |ci, chunk| {
            if ci & high_ctrl != high_ctrl {
                return;
            }
            let mut gathered = vec![ZERO; d];
            for b in (0..base_count).map(spread) {
                if b & low_ctrl != low_ctrl {
                    continue;
                }
                if let Some(diag) = &diagonal {
                    for (l, off) in offsets.iter().enumerate() {
                        chunk[b + off] *= diag[l];
                    }
                    continue;
                }
                for (g, off) in gathered.iter_mut().zip(&offsets) {
                    *g = chunk[b + off];
                }
                for (r, off) in offsets.iter().enumerate() {
                    let row = u.row(r);
                    let mut acc = ZERO;
                    for (m, g) in row.iter().zip(&gathered) {
                        acc += m * g;
                    }
                    chunk[b + off] = acc;
                }
            }
        });
    }

    /// Probability that each listed qubit reads the bits of the returned index.
    /// Entry `m` of the result has bit `i` equal to the value of `qubits[i]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_operands(qubits, &[])?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let m = qubits
                .iter()
                .enumerate()
                .fold(0usize, |m, (i, &q)| m | ((idx >> q & 1) << i));
            probs[m] += p;
        }
        Ok(probs)
    }

    /// Projective measurement of one qubit, returning both branches.
    pub fn measure_qubit(&self, qubit: usize) -> Result<Measurement> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let amps = &self.amplitudes;
        let p1 = Exec::default().sum(amps.len(), |i| {
            if i & mask != 0 {
                amps[i].norm_sqr()
            } else {
                0.0
            }
        });
        let total = self.norm_sqr();
        let p1 = p1 / total;
        let p0 = 1.0 - p1;
        let collapse = |outcome: usize, p: f64| -> Option<StateVector> {
            if p < ZERO_BRANCH_PROBABILITY {
                return None;
            }
            let scale = 1.0 / (p * total).sqrt();
            let amplitudes = amps
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if (i >> qubit & 1) == outcome {
                        a * scale
                    } else {
                        ZERO
                    }
                })
                .collect();
            Some(StateVector {
                num_qubits: self.num_qubits,
                amplitudes,
            })
        };
        Ok(Measurement {
            p0,
            p1,
            collapsed0: collapse(0, p0),
            collapsed1: collapse(1, p1),
        })
    }

    /// Draws `shots` samples from the marginal distribution of `qubits`.
    pub fn sample_counts(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<ShotHistogram> {
        if shots == 0 {
            return Err(HhlError::InvalidConfig("shots must be at least 1".into()));
        }
        let probs = self.marginal(qubits)?;
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| HhlError::InvalidConfig(format!("cannot sample: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tallies = vec![0u64; probs.len()];
        for _ in 0..shots {
            tallies[dist.sample(&mut rng)] += 1;
        }
        let width = qubits.len();
        let counts = tallies
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| (format!("{m:0width$b}"), c))
            .collect();
        Ok(ShotHistogram {
            counts,
            shots,
            seed,
        })
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        fidelity(&self.amplitudes, &other.amplitudes)
    }
}

/// Both post-measurement branches; a branch with probability below
/// [`ZERO_BRANCH_PROBABILITY`] is absent.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub p0: f64,
    pub p1: f64,
    collapsed0: Option<StateVector>,
    collapsed1: Option<StateVector>,
}

impl Measurement {
    pub fn probability(&self, outcome: u8) -> f64 {
        if outcome == 0 {
            self.p0
        } else {
            self.p1
        }
    }

    pub fn collapsed(&self, outcome: u8) -> Result<&StateVector> {
        let branch = if outcome == 0 {
            &self.collapsed0
        } else {
            &self.collapsed1
        };
        branch.as_ref().ok_or(HhlError::ZeroProbabilityBranch {
            outcome,
            probability: self.probability(outcome),
        })
    }

    pub fn into_collapsed(self, outcome: u8) -> Result<StateVector> {
        let probability = self.probability(outcome);
        let branch = if outcome == 0 {
            self.collapsed0
        } else {
            self.collapsed1
        };
        branch.ok_or(HhlError::ZeroProbabilityBranch {
            outcome,
            probability,
        })
    }
}

/// Outcome counts keyed by bitstring. The rightmost character is the first
/// measured qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotHistogram {
    pub fn count(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }
}

/// `|⟨a|b⟩|²` for amplitude vectors.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(HhlError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(inner(a, b).norm_sqr().min(1.0))
}

/// Single-qubit gate matrices.
pub mod gates {
    use num_complex::Complex64;

    use crate::linalg::ComplexMatrix;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn h() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()
    }

    /// `diag(1, e^{iφ})`.
    pub fn phase(phi: f64) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, phi)])
    }

    /// `R_y(θ)`: maps `|0⟩` to `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn ry(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).unwrap()
    }

    /// The SU(2) matrix whose first column is the unit vector `(a, b)`.
    pub fn with_first_column(a: Complex64, b: Complex64) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => a,
            (1, 0) => b,
            (0, 1) => -b.conj(),
            _ => a.conj(),
        })
    }
}
