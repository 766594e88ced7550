use std::fmt;

use num_complex::Complex64;

use crate::error::{HhlError, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Coefficients at or below this magnitude are dropped from a decomposition.
pub const COEFFICIENT_CUTOFF: f64 = 1e-12;

/// A tensor product of single-qubit Paulis in symplectic form.
///
/// Qubit `q` carries X if bit `q` of `x` is set, Z if bit `q` of `z` is set
/// and Y if both are. The textual form lists the most significant qubit first,
/// so `"XI"` is X on qubit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    pub num_qubits: usize,
    pub x: usize,
    pub z: usize,
}

impl PauliWord {
    pub fn identity(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len();
        let (mut x, mut z) = (0, 0);
        for (i, ch) in s.chars().enumerate() {
            let bit = 1 << (n - 1 - i);
            match ch {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                other => return Err(HhlError::Format(format!("invalid Pauli letter {other:?}"))),
            }
        }
        Ok(Self {
            num_qubits: n,
            x,
            z,
        })
    }

    fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// `P[col ^ x][col]`: the single nonzero entry in column `col`.
    #[inline]
    pub fn column_entry(&self, col: usize) -> Complex64 {
        let y_count = (self.x & self.z).count_ones();
        let sign = if (col & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        i_pow(y_count) * sign
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = 1usize << self.num_qubits;
        let mut m = ComplexMatrix::zeros(n);
        for col in 0..n {
            m[(col ^ self.x, col)] = self.column_entry(col);
        }
        m
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Sort key giving lexicographic order on the textual form (I < X < Y < Z).
    fn sort_key(&self) -> Vec<u8> {
        (0..self.num_qubits)
            .rev()
            .map(|q| self.letter(q) as u8)
            .collect()
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.num_qubits).rev() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub word: PauliWord,
}

/// Real-weighted sum of Pauli words, sorted lexicographically by word.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTermList {
    pub num_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliTermList {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = 1usize << self.num_qubits;
        let mut m = ComplexMatrix::zeros(n);
        for term in &self.terms {
            for col in 0..n {
                m[(col ^ term.word.x, col)] += term.word.column_entry(col) * term.coefficient;
            }
        }
        m
    }

    /// True when every pair of terms commutes.
    pub fn is_commuting(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, a)| {
            self.terms[i + 1..]
                .iter()
                .all(|b| a.word.commutes_with(&b.word))
        })
    }
}

/// Expands a Hermitian `2^n × 2^n` matrix in the Pauli basis.
///
/// For every X pattern `x` the coefficients over all Z patterns are one
/// Walsh-Hadamard transform of the diagonal `c ↦ A[c][c^x]`, so the whole
/// expansion costs `O(N² log N)`.
pub fn pauli_decompose(a: &ComplexMatrix) -> Result<PauliTermList> {
    let n = a.dim();
    if !n.is_power_of_two() {
        return Err(HhlError::NonPowerOfTwoDimension(n));
    }
    a.check_hermitian()?;
    let num_qubits = n.trailing_zeros() as usize;

    let mut terms = Vec::new();
    let mut buf = vec![ZERO; n];
    for x in 0..n {
        let mut any = false;
        for (c, slot) in buf.iter_mut().enumerate() {
            *slot = a[(c, c ^ x)];
            any |= *slot != ZERO;
        }
        if !any {
            continue;
        }
        walsh_hadamard(&mut buf);
        for (z, &sum) in buf.iter().enumerate() {
            let y_count = (x & z).count_ones();
            let coeff = i_pow(y_count) * sum / n as f64;
            if coeff.norm() > COEFFICIENT_CUTOFF {
                debug_assert!(coeff.im.abs() <= 1e-9 * coeff.norm().max(1.0));
                terms.push(PauliTerm {
                    coefficient: coeff.re,
                    word: PauliWord { num_qubits, x, z },
                });
            }
        }
    }
    terms.sort_by_cached_key(|t| t.word.sort_key());
    Ok(PauliTermList { num_qubits, terms })
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Right-multiplies `m` in place by `e^{iθP}` = `cos θ I + i sin θ P`.
pub(crate) fn right_multiply_exp(m: &mut ComplexMatrix, word: &PauliWord, theta: f64) {
    let n = m.dim();
    if word.is_identity() {
        let phase = Complex64::from_polar(1.0, theta);
        *m = m.scale(phase);
        return;
    }
    let (s, c) = theta.sin_cos();
    let is = Complex64::new(0.0, s);
    // (M P)[r][col] = M[r][col ^ x] · P[col ^ x][col]
    let col_factor: Vec<Complex64> = (0..n).map(|col| is * word.column_entry(col)).collect();
    let mut row = vec![ZERO; n];
    for r in 0..n {
        row.copy_from_slice(m.row(r));
        for col in 0..n {
            let partner = col ^ word.x;
            m[(r, col)] = row[col] * c + row[partner] * col_factor[col];
        }
    }
}
