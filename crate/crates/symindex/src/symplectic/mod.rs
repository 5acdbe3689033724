//! Symplectic matrices over the exact scalar tower, the ⋄-product, basic
//! normal forms and splitting numbers.

mod normal_form;
mod spectrum;

pub use normal_form::{
    exact_cos_sin, ratio_from_cos, ratio_from_cos_sin, BasicNormalForm, N2Kind,
    NormalFormDecomposition,
};
pub use spectrum::{circle_spectrum, nu_at, splitting_numbers, total_circle_multiplicity, SpectrumEntry};

use crate::numeric::{compare, scalar_eq, NumericError, ScalarValue};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("matrix is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rotation ratio {0} has no exact matrix realization in the quadratic tower")]
    UnsupportedAngle(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("matrix does not match any assembled basic-form layout: {0}")]
    UnsupportedLayout(String),
    #[error("spectrum cannot be certified over the supported tower: {0}")]
    UnresolvableSpectrum(String),
}

/// A `2n × 2n` matrix over the exact scalar tower, kept symplectic
/// (`MᵀJM = J`) by construction.
#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    n: usize,
    entries: Vec<ScalarValue>,
}

impl SymplecticMatrix {
    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarValue {
        &self.entries[i * 2 * self.n + j]
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![ScalarValue::zero(); 4 * n * n];
        for i in 0..2 * n {
            entries[i * 2 * n + i] = ScalarValue::one();
        }
        SymplecticMatrix { n, entries }
    }

    /// Build from rows, verifying `MᵀJM = J` exactly.
    pub fn from_rows(n: usize, rows: Vec<Vec<ScalarValue>>) -> Result<Self, SymplecticError> {
        if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
            return Err(SymplecticError::DimensionMismatch(format!(
                "expected {0}x{0} entries",
                2 * n
            )));
        }
        let m = SymplecticMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        };
        m.verify_symplectic()?;
        Ok(m)
    }

    pub(crate) fn from_entries_unchecked(n: usize, entries: Vec<ScalarValue>) -> Self {
        debug_assert_eq!(entries.len(), 4 * n * n);
        SymplecticMatrix { n, entries }
    }

    pub fn verify_symplectic(&self) -> Result<(), SymplecticError> {
        let t = self.transpose();
        let jm = self.mul_j_left()?;
        let prod = t.mul_raw(&jm)?;
        let n = self.n;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let expect = j_entry(n, i, j);
                if !scalar_eq(prod.entry(i, j), &expect) {
                    return Err(SymplecticError::NotSymplectic(format!(
                        "(MᵀJM)[{i}][{j}] != J[{i}][{j}]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        let n2 = 2 * self.n;
        let mut entries = vec![ScalarValue::zero(); n2 * n2];
        for i in 0..n2 {
            for j in 0..n2 {
                entries[j * n2 + i] = self.entry(i, j).clone();
            }
        }
        SymplecticMatrix { n: self.n, entries }
    }

    /// `J · M` with the standard block symplectic matrix `J`.
    fn mul_j_left(&self) -> Result<SymplecticMatrix, SymplecticError> {
        let n = self.n;
        let n2 = 2 * n;
        let mut entries = vec![ScalarValue::zero(); n2 * n2];
        for i in 0..n {
            for j in 0..n2 {
                // row i of J·M is -row (n+i) of M; row n+i is +row i of M.
                entries[i * n2 + j] = self.entry(n + i, j).neg();
                entries[(n + i) * n2 + j] = self.entry(i, j).clone();
            }
        }
        Ok(SymplecticMatrix { n, entries })
    }

    fn mul_raw(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix, SymplecticError> {
        if self.n != other.n {
            return Err(SymplecticError::DimensionMismatch(
                "product of different sizes".into(),
            ));
        }
        let n2 = 2 * self.n;
        let mut entries = vec![ScalarValue::zero(); n2 * n2];
        for i in 0..n2 {
            for j in 0..n2 {
                let mut acc = ScalarValue::zero();
                for k in 0..n2 {
                    let a = self.entry(i, k);
                    let b = other.entry(k, j);
                    if a.is_zero_exact() || b.is_zero_exact() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                entries[i * n2 + j] = acc;
            }
        }
        Ok(SymplecticMatrix { n: self.n, entries })
    }

    /// Exact matrix product; both factors symplectic, hence so is the result.
    pub fn mul(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix, SymplecticError> {
        self.mul_raw(other)
    }

    /// `M⁻¹ = -J Mᵀ J`, exact.
    pub fn inverse(&self) -> Result<SymplecticMatrix, SymplecticError> {
        let t = self.transpose();
        let jt = t.mul_j_left()?; // J Mᵀ
        // -J (J Mᵀ)... note -J·X = (J·X) with rows swapped/negated twice; use
        // J(JMᵀ) = -Mᵀ trick: M⁻¹ = -J Mᵀ J = J⁻¹ Mᵀ J with J⁻¹ = -J.
        let jtj = mul_j_right(&jt)?; // J Mᵀ J
        Ok(neg_matrix(&jtj))
    }

    pub fn pow(&self, m: u64) -> Result<SymplecticMatrix, SymplecticError> {
        let mut acc = SymplecticMatrix::identity(self.n);
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul_raw(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.mul_raw(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        let n2 = 2 * self.n;
        (0..n2)
            .map(|i| (0..n2).map(|j| self.entry(i, j).to_f64()).collect())
            .collect()
    }
}

fn neg_matrix(m: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix {
        n: m.n,
        entries: m.entries.iter().map(|e| e.neg()).collect(),
    }
}

/// `M · J`.
fn mul_j_right(m: &SymplecticMatrix) -> Result<SymplecticMatrix, SymplecticError> {
    let n = m.n;
    let n2 = 2 * n;
    let mut entries = vec![ScalarValue::zero(); n2 * n2];
    for i in 0..n2 {
        for j in 0..n {
            // column j of M·J is +column (n+j) of M; column n+j is -column j.
            entries[i * n2 + j] = m.entry(i, n + j).clone();
            entries[i * n2 + n + j] = m.entry(i, j).neg();
        }
    }
    Ok(SymplecticMatrix { n, entries })
}

fn j_entry(n: usize, i: usize, j: usize) -> ScalarValue {
    if i < n && j == i + n {
        ScalarValue::from_int(-1)
    } else if i >= n && j == i - n {
        ScalarValue::one()
    } else {
        ScalarValue::zero()
    }
}

/// The standard symplectic matrix `J` of half-dimension `n` (not itself
/// returned as `SymplecticMatrix` since `JᵀJJ = J` holds anyway).
pub fn standard_j(n: usize) -> SymplecticMatrix {
    let n2 = 2 * n;
    let mut entries = vec![ScalarValue::zero(); n2 * n2];
    for i in 0..n2 {
        for j in 0..n2 {
            entries[i * n2 + j] = j_entry(n, i, j);
        }
    }
    SymplecticMatrix { n, entries }
}

/// The ⋄-product: block interleaving of `[[A1,B1],[C1,D1]]` and
/// `[[A2,B2],[C2,D2]]` into a `2(m1+m2)`-dimensional symplectic matrix.
pub fn diamond(a: &SymplecticMatrix, b: &SymplecticMatrix) -> SymplecticMatrix {
    let (m1, m2) = (a.n, b.n);
    let n = m1 + m2;
    let n2 = 2 * n;
    let mut entries = vec![ScalarValue::zero(); n2 * n2];
    let mut put = |i: usize, j: usize, v: ScalarValue| entries[i * n2 + j] = v;
    for i in 0..2 * m1 {
        for j in 0..2 * m1 {
            let ti = if i < m1 { i } else { n + (i - m1) };
            let tj = if j < m1 { j } else { n + (j - m1) };
            put(ti, tj, a.entry(i, j).clone());
        }
    }
    for i in 0..2 * m2 {
        for j in 0..2 * m2 {
            let ti = if i < m2 { m1 + i } else { n + m1 + (i - m2) };
            let tj = if j < m2 { m1 + j } else { n + m1 + (j - m2) };
            put(ti, tj, b.entry(i, j).clone());
        }
    }
    SymplecticMatrix { n, entries }
}

/// ⋄-product over a list of blocks.
pub fn diamond_all(blocks: &[SymplecticMatrix]) -> Result<SymplecticMatrix, SymplecticError> {
    let mut it = blocks.iter();
    let first = it
        .next()
        .ok_or_else(|| SymplecticError::DimensionMismatch("empty diamond product".into()))?;
    let mut acc = first.clone();
    for b in it {
        acc = diamond(&acc, b);
    }
    Ok(acc)
}

/// Ordering on exact scalars used to canonicalize ratio lists.
pub fn exact_scalar_cmp(a: &ScalarValue, b: &ScalarValue) -> Ordering {
    compare(a, b).unwrap_or(Ordering::Equal)
}

pub(crate) use exact_scalar_cmp as exact_cmp;

#[cfg(test)]
mod tests {
    use super::*;

    fn n1(lambda: i64, b: i64) -> SymplecticMatrix {
        BasicNormalForm::N1 {
            lambda: lambda as i8,
            b: b as i8,
        }
        .realize()
        .unwrap()
    }

    #[test]
    fn identity_diamond() {
        let i2 = SymplecticMatrix::identity(1);
        let i4 = diamond(&i2, &i2);
        assert_eq!(i4.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                assert!(scalar_eq(
                    i4.entry(i, j),
                    &SymplecticMatrix::identity(2).entry(i, j).clone()
                ));
            }
        }
    }

    #[test]
    fn shear_diamond_blocks() {
        // N1(1,1) ⋄ N1(1,1) has A = I₂, B = I₂, C = 0, D = I₂ in block form.
        let m = diamond(&n1(1, 1), &n1(1, 1));
        let expect = [
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!(scalar_eq(m.entry(i, j), &ScalarValue::from_int(expect[i][j])));
            }
        }
        m.verify_symplectic().unwrap();
    }

    #[test]
    fn rotation_diamond_symplectic() {
        let r1 = BasicNormalForm::R {
            ratio: ScalarValue::from_ratio(1, 3),
        }
        .realize()
        .unwrap();
        let r2 = BasicNormalForm::R {
            ratio: ScalarValue::from_ratio(1, 8),
        }
        .realize()
        .unwrap();
        let m = diamond(&r1, &r2);
        m.verify_symplectic().unwrap();
        // Entries interleave the two rotation blocks.
        assert!(scalar_eq(m.entry(0, 0), r1.entry(0, 0)));
        assert!(scalar_eq(m.entry(1, 1), r2.entry(0, 0)));
        assert!(scalar_eq(m.entry(0, 2), r1.entry(0, 1)));
        assert!(scalar_eq(m.entry(1, 3), r2.entry(0, 1)));
    }

    #[test]
    fn inverse_and_pow() {
        let r = BasicNormalForm::R {
            ratio: ScalarValue::from_ratio(1, 6),
        }
        .realize()
        .unwrap();
        let inv = r.inverse().unwrap();
        let prod = r.mul(&inv).unwrap();
        let id = SymplecticMatrix::identity(1);
        for i in 0..2 {
            for j in 0..2 {
                assert!(scalar_eq(prod.entry(i, j), id.entry(i, j)));
            }
        }
        // R(2π/6)^6 = I
        let p = r.pow(6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(scalar_eq(p.entry(i, j), id.entry(i, j)));
            }
        }
    }
}
