//! Unit-circle spectra with geometric multiplicities, the frozen per-block
//! splitting-number table, and total circle multiplicity `e(M)`.

use super::{exact_cmp, NormalFormDecomposition, SymplecticError, SymplecticMatrix};
use super::normal_form::{ratio_from_cos, ratio_from_cos_sin};
use crate::numeric::{compare, scalar_eq, NumericError, ScalarValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;

/// One unit-circle eigenvalue `ω = e^{2πi·ratio}` with its geometric
/// multiplicity `ν_ω`.
#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub ratio: ScalarValue,
    pub multiplicity: u32,
}

fn rat(n: i64, d: i64) -> ScalarValue {
    ScalarValue::from_ratio(n, d)
}

fn one_minus(ratio: &ScalarValue) -> ScalarValue {
    ScalarValue::one().sub(ratio).expect("exact ratio")
}

/// All unit-circle eigenvalues of a matrix assembled from basic blocks (2×2
/// closed blocks and `N2`-shaped 4×4 blocks), with geometric multiplicities.
pub fn circle_spectrum(m: &SymplecticMatrix) -> Result<Vec<SpectrumEntry>, SymplecticError> {
    let n = m.half_dim();
    let mut found: Vec<SpectrumEntry> = Vec::new();
    let mut push = |ratio: ScalarValue, mult: u32| {
        for e in found.iter_mut() {
            if scalar_eq(&e.ratio, &ratio) {
                e.multiplicity += mult;
                return;
            }
        }
        found.push(SpectrumEntry {
            ratio,
            multiplicity: mult,
        });
    };
    let mut o = 0usize;
    while o < n {
        if super::normal_form::block_closed(m, &[o]) {
            let a = m.entry(o, o).clone();
            let b = m.entry(o, n + o).clone();
            let c = m.entry(n + o, o).clone();
            let d = m.entry(n + o, n + o).clone();
            for (ratio, mult) in spectrum_2x2(&a, &b, &c, &d)? {
                push(ratio, mult);
            }
            o += 1;
        } else if o + 1 < n && super::normal_form::block_closed(m, &[o, o + 1]) {
            // N2-shaped: repeated rotation on the diagonal, zero lower-left.
            let a00 = m.entry(o, o);
            let a10 = m.entry(o + 1, o);
            let lower_left_zero = [
                (n + o, o),
                (n + o, o + 1),
                (n + o + 1, o),
                (n + o + 1, o + 1),
            ]
            .iter()
            .all(|&(i, j)| m.entry(i, j).is_zero_exact());
            if !lower_left_zero {
                return Err(SymplecticError::UnresolvableSpectrum(
                    "4x4 block is not upper block-triangular".into(),
                ));
            }
            let ratio = ratio_from_cos_sin(a00, a10).ok_or_else(|| {
                SymplecticError::UnresolvableSpectrum(
                    "4x4 rotation angle outside the exact table".into(),
                )
            })?;
            // Geometric multiplicity 1 at each of ω, ω̄ for a genuine N2
            // (nontrivial Jordan structure); 2 if the off-diagonal vanishes.
            let b_zero = [
                (o, n + o),
                (o, n + o + 1),
                (o + 1, n + o),
                (o + 1, n + o + 1),
            ]
            .iter()
            .all(|&(i, j)| m.entry(i, j).is_zero_exact());
            let mult = if b_zero { 2 } else { 1 };
            push(ratio.clone(), mult);
            push(one_minus(&ratio), mult);
            o += 2;
        } else {
            return Err(SymplecticError::UnresolvableSpectrum(format!(
                "no closed block at half-offset {o}"
            )));
        }
    }
    found.sort_by(|x, y| exact_cmp(&x.ratio, &y.ratio));
    Ok(found)
}

/// Unit-circle eigenvalues of one exact 2×2 symplectic block.
fn spectrum_2x2(
    a: &ScalarValue,
    b: &ScalarValue,
    c: &ScalarValue,
    d: &ScalarValue,
) -> Result<Vec<(ScalarValue, u32)>, SymplecticError> {
    let tr = a.add(d).map_err(NumericError::from)?;
    let two = ScalarValue::from_int(2);
    match compare(&tr, &two).map_err(NumericError::from)? {
        Ordering::Greater => return Ok(vec![]),
        Ordering::Equal => {
            // Eigenvalue 1; multiplicity 2 iff the block is the identity.
            let is_id = scalar_eq(a, &ScalarValue::one())
                && scalar_eq(d, &ScalarValue::one())
                && b.is_zero_exact()
                && c.is_zero_exact();
            return Ok(vec![(ScalarValue::zero(), if is_id { 2 } else { 1 })]);
        }
        Ordering::Less => {}
    }
    match compare(&tr, &two.neg()).map_err(NumericError::from)? {
        Ordering::Less => return Ok(vec![]),
        Ordering::Equal => {
            let minus_one = ScalarValue::from_int(-1);
            let is_neg_id = scalar_eq(a, &minus_one)
                && scalar_eq(d, &minus_one)
                && b.is_zero_exact()
                && c.is_zero_exact();
            return Ok(vec![(rat(1, 2), if is_neg_id { 2 } else { 1 })]);
        }
        Ordering::Greater => {}
    }
    // Elliptic: eigenvalues e^{±iθ} with cos θ = tr/2.
    let cos = tr.scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
    let w = ratio_from_cos(&cos).ok_or_else(|| {
        SymplecticError::UnresolvableSpectrum(format!(
            "elliptic trace {tr} not recognized over the supported angle tower"
        ))
    })?;
    if w.is_zero_exact() {
        return Ok(vec![(ScalarValue::zero(), 2)]);
    }
    if scalar_eq(&w, &rat(1, 2)) {
        return Ok(vec![(rat(1, 2), 2)]);
    }
    Ok(vec![(w.clone(), 1), (one_minus(&w), 1)])
}

/// Splitting-number pair `(S⁺, S⁻)`.
pub type SplittingPair = (u32, u32);

/// `S^±_M(ω)` summed over blocks of a decomposition via the additivity rule.
///
/// Per-block entries, frozen after oracle validation:
/// `N1(1,1)`, `I₂` → (1,1) at ω=1; `N1(1,-1)` → (0,0);
/// `N1(-1,-1)`, `-I₂` → (1,1) at ω=-1; `N1(-1,1)` → (0,0);
/// `R(θ)` → (0,1) at `e^{iθ}` and (1,0) at `e^{-iθ}`;
/// nontrivial `N2` → (1,1) at both conjugate positions, trivial `N2` → (0,0);
/// zero at every ω off the spectrum.
pub fn splitting_numbers(
    d: &NormalFormDecomposition,
    omega_ratio: &ScalarValue,
) -> Result<SplittingPair, SymplecticError> {
    let mut s_plus = 0u32;
    let mut s_minus = 0u32;
    let at_one = omega_ratio.is_zero_exact();
    let at_minus_one = scalar_eq(omega_ratio, &rat(1, 2));
    if at_one {
        s_plus += d.p_minus + d.p_zero;
        s_minus += d.p_minus + d.p_zero;
    }
    if at_minus_one {
        s_plus += d.q_zero + d.q_plus;
        s_minus += d.q_zero + d.q_plus;
    }
    let eq = |x: &ScalarValue, y: &ScalarValue| -> Result<bool, SymplecticError> {
        Ok(compare(x, y).map_err(NumericError::from)? == Ordering::Equal)
    };
    for ratio in &d.rotations {
        if eq(omega_ratio, ratio)? {
            s_minus += 1; // stored angle: (0,1)
        }
        if eq(omega_ratio, &one_minus(ratio))? {
            s_plus += 1; // conjugate angle: (1,0)
        }
    }
    for ratio in &d.nontrivial_n2 {
        if eq(omega_ratio, ratio)? || eq(omega_ratio, &one_minus(ratio))? {
            s_plus += 1;
            s_minus += 1;
        }
    }
    // Trivial N2 blocks contribute (0,0) everywhere; off-circle blocks have
    // no unit eigenvalues at all.
    Ok((s_plus, s_minus))
}

/// `e(M)`: total algebraic multiplicity of unit-circle eigenvalues.
pub fn total_circle_multiplicity(d: &NormalFormDecomposition) -> u32 {
    2 * d.half_dim() - d.off_circle_dim
}

/// ν_ω computed from the decomposition (geometric multiplicity at
/// `ω = e^{2πi·ratio}`).
pub fn nu_at(d: &NormalFormDecomposition, omega_ratio: &ScalarValue) -> Result<u32, SymplecticError> {
    let mut nu = 0u32;
    if omega_ratio.is_zero_exact() {
        nu += d.p_minus + 2 * d.p_zero + d.p_plus;
    }
    if scalar_eq(omega_ratio, &rat(1, 2)) {
        nu += d.q_minus + 2 * d.q_zero + d.q_plus;
    }
    let eq = |x: &ScalarValue, y: &ScalarValue| -> Result<bool, SymplecticError> {
        Ok(compare(x, y).map_err(NumericError::from)? == Ordering::Equal)
    };
    for ratio in &d.rotations {
        if eq(omega_ratio, ratio)? || eq(omega_ratio, &one_minus(ratio))? {
            nu += 1;
        }
    }
    for ratio in d.nontrivial_n2.iter().chain(&d.trivial_n2) {
        if eq(omega_ratio, ratio)? || eq(omega_ratio, &one_minus(ratio))? {
            nu += 1;
        }
    }
    Ok(nu)
}
