use serde::{Deserialize, Serialize};

use super::pauli::{right_multiply_exp, PauliTermList};
use crate::error::{HhlError, Result};
use crate::linalg::ComplexMatrix;

/// Product-formula order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum TrotterOrder {
    /// Lie-Trotter: one forward sweep per step.
    First,
    /// Symmetric Strang splitting: half-step forward sweep, half-step reverse sweep.
    Second,
}

impl TrotterOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }

    /// `(c_i, d_i)` weights of the forward and reverse sweeps in each stage.
    pub fn stage_coefficients(self) -> Vec<(f64, f64)> {
        match self {
            TrotterOrder::First => vec![(1.0, 0.0)],
            TrotterOrder::Second => vec![(0.5, 0.5)],
        }
    }
}

impl From<TrotterOrder> for u8 {
    fn from(o: TrotterOrder) -> u8 {
        o.as_u8()
    }
}

impl TryFrom<u8> for TrotterOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            other => Err(format!("unsupported product-formula order {other}")),
        }
    }
}

/// A product-formula schedule for `e^{iAt}` built from a Pauli expansion of `A`.
///
/// Each step of length `h = t / steps` is, for every stage `(c, d)`,
/// `(∏_{k=1}^{Λ} e^{i A_k c h}) (∏_{k=Λ}^{1} e^{i A_k d h})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub terms: PauliTermList,
    pub order: TrotterOrder,
    pub steps: u64,
    pub stage_coefficients: Vec<(f64, f64)>,
}

impl TrotterPlan {
    pub fn new(terms: PauliTermList, order: TrotterOrder, steps: u64) -> Result<Self> {
        if steps == 0 {
            return Err(HhlError::InvalidConfig(
                "Trotter steps must be positive".into(),
            ));
        }
        let stage_coefficients = order.stage_coefficients();
        debug_assert!(
            (stage_coefficients.iter().map(|(c, d)| c + d).sum::<f64>() - 1.0).abs() < 1e-15
        );
        Ok(Self {
            terms,
            order,
            steps,
            stage_coefficients,
        })
    }

    pub fn step_size(&self, t: f64) -> f64 {
        t / self.steps as f64
    }

    /// Number of single-term exponentials in one step.
    pub fn exponentials_per_step(&self) -> u64 {
        let sweeps: usize = self
            .stage_coefficients
            .iter()
            .map(|&(c, d)| (c != 0.0) as usize + (d != 0.0) as usize)
            .sum();
        (sweeps * self.terms.term_count()) as u64
    }

    /// One step of length `h` as a dense matrix.
    pub fn step_matrix(&self, h: f64) -> ComplexMatrix {
        let n = 1usize << self.terms.num_qubits;
        let mut m = ComplexMatrix::identity(n);
        for &(c, d) in &self.stage_coefficients {
            if c != 0.0 {
                for term in &self.terms.terms {
                    right_multiply_exp(&mut m, &term.word, term.coefficient * c * h);
                }
            }
            if d != 0.0 {
                for term in self.terms.terms.iter().rev() {
                    right_multiply_exp(&mut m, &term.word, term.coefficient * d * h);
                }
            }
        }
        m
    }
}

/// The full product formula: `steps` repetitions of the step at `h = t / steps`.
pub fn trotter_unitary(plan: &TrotterPlan, t: f64) -> ComplexMatrix {
    plan.step_matrix(plan.step_size(t)).pow(plan.steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::pauli_decompose;
    use crate::linalg::unitary_exponential;

    fn plan_for(a: &ComplexMatrix, order: TrotterOrder, steps: u64) -> TrotterPlan {
        TrotterPlan::new(pauli_decompose(a).unwrap(), order, steps).unwrap()
    }

    fn spectral_error(a: &ComplexMatrix, order: TrotterOrder, steps: u64, t: f64) -> f64 {
        let exact = unitary_exponential(a, t).unwrap();
        let approx = trotter_unitary(&plan_for(a, order, steps), t);
        approx.max_abs_diff(&exact)
    }

    /// Least-squares slope of log(error) against log(steps).
    fn loglog_slope(points: &[(f64, f64)]) -> f64 {
        let n = points.len() as f64;
        let (sx, sy) = points
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
        let (mx, my) = (sx / n, sy / n);
        let num: f64 = points
            .iter()
            .map(|(x, y)| (x.ln() - mx) * (y.ln() - my))
            .sum();
        let den: f64 = points.iter().map(|(x, _)| (x.ln() - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn single_term_is_exact() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 0.7], &[0.7, 0.0]]).unwrap();
        for steps in [1, 3, 10] {
            assert!(spectral_error(&a, TrotterOrder::First, steps, 1.3) <= 1e-10);
        }
    }

    #[test]
    fn commuting_terms_exact_in_one_step() {
        let a = ComplexMatrix::from_real_diagonal(&[0.3, 1.1, -0.4, 2.0]);
        assert!(spectral_error(&a, TrotterOrder::First, 1, 2.5) <= 1e-10);
        assert!(spectral_error(&a, TrotterOrder::Second, 1, 2.5) <= 1e-10);
    }

    #[test]
    fn worked_example_terms_commute() {
        // I and X commute, so the product formula is exact at every step count.
        let a = ComplexMatrix::from_real_rows(&[&[1.0, -0.5], &[-0.5, 1.0]]).unwrap();
        for steps in [4, 8, 16, 32, 64] {
            assert!(spectral_error(&a, TrotterOrder::First, steps, 1.0) <= 1e-12);
        }
    }

    #[test]
    fn error_order_on_noncommuting_matrix() {
        // 1·I − 0.5·X + 0.4·Z: X and Z anticommute.
        let a = ComplexMatrix::from_real_rows(&[&[1.4, -0.5], &[-0.5, 0.6]]).unwrap();
        for (order, expected) in [(TrotterOrder::First, -1.0), (TrotterOrder::Second, -2.0)] {
            let points: Vec<(f64, f64)> = [4u64, 8, 16, 32, 64]
                .iter()
                .map(|&r| (r as f64, spectral_error(&a, order, r, 1.0)))
                .collect();
            assert!(points.windows(2).all(|w| w[1].1 < w[0].1));
            let slope = loglog_slope(&points);
            assert!(
                (slope - expected).abs() <= 0.1,
                "order {order:?}: slope {slope}"
            );
        }
    }

    #[test]
    fn stage_weights_sum_to_one() {
        for order in [TrotterOrder::First, TrotterOrder::Second] {
            let total: f64 = order.stage_coefficients().iter().map(|(c, d)| c + d).sum();
            assert_eq!(total, 1.0);
        }
    }

    #[test]
    fn order_serde_round_trip() {
        assert_eq!(serde_json::to_string(&TrotterOrder::Second).unwrap(), "2");
        assert_eq!(
            serde_json::from_str::<TrotterOrder>("1").unwrap(),
            TrotterOrder::First
        );
        assert!(serde_json::from_str::<TrotterOrder>("4").is_err());
    }
}
