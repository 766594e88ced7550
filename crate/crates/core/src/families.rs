//! Seeded benchmark matrices: diagonal, tridiagonal, moderately dense and
//! fully dense Hermitian positive-definite systems.
//!
//! Diagonal and dense instances start from a chosen spectrum, so their
//! condition number is set directly; dense ones are then rotated by a random
//! unitary. Tridiagonal and moderate instances are built from a random
//! sparsity structure and then shifted and scaled, `A ← (A₀ + σI)/s`, with
//! `σ` solving `(λ_max + σ)/(λ_min + σ) = κ`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HhlError, Result};
use crate::linalg::{
    hermitian_eigendecomposition, inner, norm2, ComplexMatrix, ProblemInstance, Spectrum,
    NONZERO_THRESHOLD,
};

/// Largest clock value used for representable spectra (`n_c ≤ 7`).
pub const MAX_GRID_BIN: u32 = 127;
pub const DEFAULT_KAPPA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Diagonal,
    Tridiagonal,
    Moderate,
    Dense,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Diagonal,
        Family::Tridiagonal,
        Family::Moderate,
        Family::Dense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Diagonal => "diagonal",
            Family::Tridiagonal => "tridiagonal",
            Family::Moderate => "moderate",
            Family::Dense => "dense",
        }
    }

    /// Whether the family is generated from a prescribed spectrum.
    pub fn spectral(self) -> bool {
        matches!(self, Family::Diagonal | Family::Dense)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = HhlError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| HhlError::Format(format!("unknown matrix family {s:?}")))
    }
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub dim: usize,
    #[serde(default = "default_kappa")]
    pub kappa_target: f64,
    #[serde(default)]
    pub seed: u64,
    /// Place every eigenvalue on an integer clock bin.
    #[serde(default)]
    pub representable: bool,
    /// Nonzeros per row for the moderate family; defaults to `N/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
}

impl FamilySpec {
    pub fn new(family: Family, dim: usize, seed: u64) -> Self {
        Self {
            family,
            dim,
            kappa_target: DEFAULT_KAPPA,
            seed,
            representable: false,
            density: None,
        }
    }

    pub fn representable(mut self, on: bool) -> Self {
        self.representable = on;
        self
    }

    pub fn kappa(mut self, kappa: f64) -> Self {
        self.kappa_target = kappa;
        self
    }

    /// Nonzeros per row for the moderate family after defaults are applied.
    pub fn moderate_density(&self) -> Result<usize> {
        let n = self.dim;
        let limit = n.div_ceil(2);
        match self.density {
            Some(d) if d >= 3 && d < limit => Ok(d),
            Some(d) => Err(HhlError::InfeasibleSpec(format!(
                "moderate density {d} outside [3, N/2) for N = {n}"
            ))),
            None if n >= 8 => Ok((n / 4).clamp(3, limit - 1)),
            None => Err(HhlError::InfeasibleSpec(format!(
                "moderate family needs N ≥ 8 to fit 3 ≤ nonzeros < N/2, got N = {n}"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if n < 2 || !n.is_power_of_two() {
            return Err(HhlError::InfeasibleSpec(format!(
                "dimension must be a power of two ≥ 2, got {n}"
            )));
        }
        if !(self.kappa_target >= 1.0 && self.kappa_target.is_finite()) {
            return Err(HhlError::InfeasibleSpec(format!(
                "kappa_target must be finite and ≥ 1, got {}",
                self.kappa_target
            )));
        }
        if self.representable {
            if !self.family.spectral() {
                return Err(HhlError::InfeasibleSpec(format!(
                    "{} matrices are built structurally; representable spectra need diagonal or dense",
                    self.family
                )));
            }
            if self.kappa_target > MAX_GRID_BIN as f64 {
                return Err(HhlError::InfeasibleSpec(format!(
                    "kappa_target {} exceeds the {MAX_GRID_BIN}-bin clock grid",
                    self.kappa_target
                )));
            }
        } else if !self.family.spectral() && self.kappa_target == 1.0 {
            return Err(HhlError::InfeasibleSpec(format!(
                "a shifted {} matrix cannot reach kappa = 1",
                self.family
            )));
        }
        if self.family == Family::Moderate {
            self.moderate_density()?;
        }
        Ok(())
    }
}

/// Builds the instance described by `spec`. Identical specs give
/// bit-identical instances.
pub fn generate(spec: &FamilySpec) -> Result<ProblemInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.dim;
    let kappa = spec.kappa_target;
    let matrix = match spec.family {
        Family::Diagonal => {
            let mut eig = sample_spectrum(n, kappa, spec.representable, &mut rng);
            eig.shuffle(&mut rng);
            ComplexMatrix::from_real_diagonal(&eig)
        }
        Family::Dense => {
            let eig = sample_spectrum(n, kappa, spec.representable, &mut rng);
            let u = random_unitary(n, &mut rng);
            u.matmul(&ComplexMatrix::from_real_diagonal(&eig))
                .matmul(&u.adjoint())
                .hermitian_part()
        }
        Family::Tridiagonal => {
            let mut a = ComplexMatrix::zeros(n);
            for i in 0..n {
                a[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
                if i + 1 < n {
                    let v = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
                    a[(i, i + 1)] = v;
                    a[(i + 1, i)] = v;
                }
            }
            shift_to_kappa(a, kappa)?
        }
        Family::Moderate => {
            let density = spec.moderate_density()?;
            let mut a = ComplexMatrix::zeros(n);
            for (i, j) in sparsity_pattern(n, density, &mut rng) {
                let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a[(i, j)] = v;
                a[(j, i)] = v.conj();
            }
            for i in 0..n {
                a[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            }
            shift_to_kappa(a, kappa)?
        }
    };
    let rhs = random_unit_vector(n, &mut rng);
    ProblemInstance::new(matrix, rhs)
}

/// Eigenvalues in `[1/κ, 1]` including both endpoints. On the grid they are
/// `m / m_hi` for integers `m ∈ [m_lo, m_hi]`, `m_hi = round(κ m_lo) ≤ 127`.
fn sample_spectrum(n: usize, kappa: f64, representable: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if representable {
        let m_lo = ((MAX_GRID_BIN as f64 / kappa).floor() as u32).max(1);
        let m_hi = ((kappa * m_lo as f64).round() as u32).clamp(m_lo, MAX_GRID_BIN);
        let mut bins = vec![m_lo, m_hi];
        bins.extend((2..n).map(|_| rng.random_range(m_lo..=m_hi)));
        bins.into_iter().map(|m| m as f64 / m_hi as f64).collect()
    } else {
        let lo = 1.0 / kappa;
        let mut eig = vec![lo, 1.0];
        eig.extend((2..n).map(|_| rng.random_range(lo..=1.0)));
        eig
    }
}

/// Haar-like random unitary: Gram-Schmidt on complex Gaussian columns.
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for u in &cols {
                let p = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
        }
        let norm = norm2(&v);
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Uniform on the complex unit sphere.
fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = norm2(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Symmetric off-diagonal pattern with at most `density - 1` partners per row,
/// so that with the diagonal every row holds at most `density` nonzeros.
fn sparsity_pattern(n: usize, density: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let cap = density - 1;
    let mut degree = vec![0usize; n];
    let mut linked = vec![false; n * n];
    let mut edges = Vec::new();
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    for &i in &rows {
        while degree[i] < cap {
            let candidates: Vec<usize> = (0..n)
                .filter(|&j| j != i && degree[j] < cap && !linked[i * n + j])
                .collect();
            let Some(&j) = candidates.get(rng.random_range(0..candidates.len().max(1))) else {
                break;
            };
            linked[i * n + j] = true;
            linked[j * n + i] = true;
            degree[i] += 1;
            degree[j] += 1;
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges
}

/// `(A + σI)/(λ_max + σ)` with `σ` chosen so the condition number is `κ` and
/// the largest eigenvalue is one.
fn shift_to_kappa(a: ComplexMatrix, kappa: f64) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eigendecomposition(&a)?;
    let lmin = spectrum.eigenvalues[0];
    let lmax = *spectrum.eigenvalues.last().unwrap();
    if lmax - lmin <= 1e-9 * lmax.abs().max(1.0) {
        return Err(HhlError::InfeasibleSpec(
            "generated matrix has a flat spectrum; no shift reaches the target kappa".into(),
        ));
    }
    let sigma = (lmax - kappa * lmin) / (kappa - 1.0);
    let scale = 1.0 / (lmax + sigma);
    let n = a.dim();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        let v = if i == j { a[(i, j)] + sigma } else { a[(i, j)] };
        v * scale
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyCensus {
    pub nnz_per_row_max: usize,
    pub kappa: f64,
    pub spectral_range: (f64, f64),
}

/// Structure and conditioning of an instance (nonzero threshold `1e-12`).
pub fn family_census(problem: &ProblemInstance) -> Result<FamilyCensus> {
    let spectrum: Spectrum = hermitian_eigendecomposition(&problem.matrix)?;
    let lo = spectrum.eigenvalues[0];
    let hi = *spectrum.eigenvalues.last().unwrap();
    Ok(FamilyCensus {
        nnz_per_row_max: problem.matrix.max_row_nonzeros(NONZERO_THRESHOLD),
        kappa: problem.condition_number,
        spectral_range: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{run_hhl, HhlConfig};
    use proptest::prelude::*;

    fn census(spec: &FamilySpec) -> FamilyCensus {
        family_census(&generate(spec).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_representable_is_exact() {
        let spec = FamilySpec::new(Family::Diagonal, 2, 3).representable(true);
        let p = generate(&spec).unwrap();
        assert!(p.matrix.is_diagonal());
        let r = run_hhl(&p, &HhlConfig::default()).unwrap();
        assert!(r.clock.representable);
        assert!(r.clock_residual <= 1e-10);
        assert!(r.fidelity >= 1.0 - 1e-10);
    }

    #[test]
    fn tridiagonal_structure() {
        let p = generate(&FamilySpec::new(Family::Tridiagonal, 4, 1)).unwrap();
        assert!(p.matrix.max_row_nonzeros(NONZERO_THRESHOLD) <= 3);
        for i in 0..4usize {
            for j in 0..4usize {
                if i.abs_diff(j) > 1 {
                    assert_eq!(p.matrix[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        p.matrix.check_hermitian().unwrap();
    }

    #[test]
    fn dense_kappa_within_ten_percent() {
        let c = census(&FamilySpec::new(Family::Dense, 16, 8).kappa(5.0));
        assert!((4.5..=5.5).contains(&c.kappa), "{}", c.kappa);
    }

    #[test]
    fn census_examples() {
        let id = ProblemInstance::new(
            ComplexMatrix::identity(4),
            vec![Complex64::new(1.0, 0.0); 4],
        )
        .unwrap();
        let c = family_census(&id).unwrap();
        assert_eq!((c.nnz_per_row_max, c.kappa), (1, 1.0));
        let a = ComplexMatrix::from_real_rows(&[&[1.0, -0.5], &[-0.5, 1.0]]).unwrap();
        let eq = ProblemInstance::new(a, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let c = family_census(&eq).unwrap();
        assert_eq!(c.nnz_per_row_max, 2);
        assert!((c.kappa - 3.0).abs() < 1e-12);
        assert_eq!(
            census(&FamilySpec::new(Family::Dense, 8, 0)).nnz_per_row_max,
            8
        );
    }

    #[test]
    fn moderate_density_bounds() {
        for n in [8usize, 16, 32, 64] {
            let c = census(&FamilySpec::new(Family::Moderate, n, n as u64));
            assert!(
                c.nnz_per_row_max >= 3 && c.nnz_per_row_max < n / 2,
                "N={n}: {}",
                c.nnz_per_row_max
            );
        }
        let bad = FamilySpec {
            density: Some(8),
            ..FamilySpec::new(Family::Moderate, 16, 0)
        };
        assert!(matches!(generate(&bad), Err(HhlError::InfeasibleSpec(_))));
        assert!(matches!(
            generate(&FamilySpec::new(Family::Moderate, 4, 0)),
            Err(HhlError::InfeasibleSpec(_))
        ));
    }

    #[test]
    fn infeasible_specs() {
        for spec in [
            FamilySpec::new(Family::Dense, 8, 0).kappa(0.5),
            FamilySpec::new(Family::Dense, 6, 0),
            FamilySpec::new(Family::Tridiagonal, 8, 0).representable(true),
            FamilySpec::new(Family::Tridiagonal, 8, 0).kappa(1.0),
            FamilySpec::new(Family::Diagonal, 8, 0)
                .kappa(500.0)
                .representable(true),
        ] {
            assert!(
                matches!(generate(&spec), Err(HhlError::InfeasibleSpec(_))),
                "{spec:?}"
            );
        }
    }

    #[test]
    fn kappa_one_spectral() {
        let c = census(
            &FamilySpec::new(Family::Dense, 4, 2)
                .kappa(1.0)
                .representable(true),
        );
        assert!((c.kappa - 1.0).abs() < 1e-9);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{f}\""));
        }
        assert!("sparse".parse::<Family>().is_err());
        let spec: FamilySpec = serde_json::from_str(r#"{"family":"dense","dim":8}"#).unwrap();
        assert_eq!(spec, FamilySpec::new(Family::Dense, 8, 0));
    }

    fn any_family() -> impl Strategy<Value = Family> {
        prop_oneof![
            Just(Family::Diagonal),
            Just(Family::Tridiagonal),
            Just(Family::Moderate),
            Just(Family::Dense)
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn generated_instances_are_valid(family in any_family(), log_n in 3usize..=5,
                                         seed in any::<u64>(), kappa in 1.5f64..20.0, rep in any::<bool>()) {
            let spec = FamilySpec::new(family, 1 << log_n, seed).kappa(kappa)
                .representable(rep && family.spectral());
            let p = generate(&spec).unwrap();
            p.matrix.check_hermitian().unwrap();
            let c = family_census(&p).unwrap();
            prop_assert!(c.spectral_range.0 > 0.0);
            prop_assert!((c.kappa / kappa - 1.0).abs() <= 0.1, "kappa {} vs {}", c.kappa, kappa);
            prop_assert!((norm2(&p.rhs) - 1.0).abs() <= 1e-12);
            prop_assert_eq!(generate(&spec).unwrap(), p);
        }

        #[test]
        fn representable_instances_clear_the_clock(seed in any::<u64>(), log_n in 1usize..=4, dense in any::<bool>()) {
            let family = if dense { Family::Dense } else { Family::Diagonal };
            let p = generate(&FamilySpec::new(family, 1 << log_n, seed).representable(true)).unwrap();
            let r = run_hhl(&p, &HhlConfig::default()).unwrap();
            prop_assert!(r.clock.representable);
            prop_assert!(r.clock_residual <= 1e-10);
            prop_assert!(r.fidelity >= 1.0 - 1e-8);
        }
    }
}
