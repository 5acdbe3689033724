//! The index iteration engine: the precise iteration formulas for `i(γ,m)`
//! and `ν(γ,m)`, the conversion `i(yᵐ) = i(γ,m) - n`, the mean index, the
//! Bott-type two-sided estimate, and the jump-window identities.

use crate::numeric::{brackets, compare, NumericError, ScalarValue};
use crate::symplectic::{
    splitting_numbers, total_circle_multiplicity, NormalFormDecomposition, SymplecticError,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IterationError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error("invalid path data: {0}")]
    InvalidData(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
}

/// A symplectic path described by its initial index `i(γ,1)` and the normal
/// form decomposition of its endpoint. `ν(γ,1)` is determined by the
/// decomposition.
#[derive(Clone, Debug)]
pub struct PathIndexData {
    i1: i64,
    n: u32,
    decomposition: NormalFormDecomposition,
}

impl PathIndexData {
    pub fn new(
        i1: i64,
        n: u32,
        decomposition: NormalFormDecomposition,
    ) -> Result<Self, IterationError> {
        decomposition.validate()?;
        if decomposition.half_dim() != n {
            return Err(IterationError::InvalidData(format!(
                "decomposition fills half-dimension {}, path has n = {}",
                decomposition.half_dim(),
                n
            )));
        }
        let d = &decomposition;
        if d.off_circle_dim == 0 {
            // Per-block parity: N1(1,1), I₂, N1(-1,·), -I₂ and R(θ) force odd
            // contributions; N1(1,-1) and N2 blocks even; an off-circle part
            // leaves the parity free.
            let odd_blocks =
                d.p_minus + d.p_zero + d.q_minus + d.q_zero + d.q_plus + d.rotation_count();
            if (i1 - odd_blocks as i64) % 2 != 0 {
                return Err(IterationError::InvalidData(format!(
                    "i(γ,1) = {i1} has the wrong parity for this block content"
                )));
            }
        }
        Ok(PathIndexData {
            i1,
            n,
            decomposition: decomposition.canonicalized(),
        })
    }

    pub fn i1(&self) -> i64 {
        self.i1
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nu1(&self) -> u32 {
        self.decomposition.nu_one()
    }

    pub fn decomposition(&self) -> &NormalFormDecomposition {
        &self.decomposition
    }

    /// `e(M)`: total algebraic multiplicity on the unit circle.
    pub fn circle_multiplicity(&self) -> u32 {
        total_circle_multiplicity(&self.decomposition)
    }

    /// `S^±(1)` of the endpoint.
    pub fn splitting_at_one(&self) -> (u32, u32) {
        splitting_numbers(&self.decomposition, &ScalarValue::zero())
            .expect("exact ω = 1 lookup cannot fail")
    }

    /// All angle ratios carried by unit-circle eigenvalues, for smallness
    /// checks: rotations, both N2 families, plus 1/2 per -1-eigenvalue block.
    pub fn unit_angle_ratios(&self) -> Vec<ScalarValue> {
        let d = &self.decomposition;
        let mut out: Vec<ScalarValue> = Vec::new();
        out.extend(d.rotations.iter().cloned());
        out.extend(d.nontrivial_n2.iter().cloned());
        out.extend(d.trivial_n2.iter().cloned());
        if d.q_minus + d.q_zero + d.q_plus > 0 {
            out.push(ScalarValue::from_ratio(1, 2));
        }
        out
    }
}

/// Indices of the m-th iterate.
#[derive(Clone, Debug)]
pub struct IterationResult {
    pub m: u64,
    /// `i(γ,m)`.
    pub i_m: BigInt,
    /// `ν(γ,m)`.
    pub nu_m: u32,
    /// `i(yᵐ) = i(γ,m) - n`.
    pub i_ekeland: BigInt,
}

impl IterationResult {
    /// Top of the critical band in the variational grading:
    /// `i(yᵐ) + ν(yᵐ) - 1`.
    pub fn band_top(&self) -> BigInt {
        &self.i_ekeland + BigInt::from(self.nu_m) - 1
    }
}

/// `î(γ,1)`, exact whenever the rotation ratios share one quadratic field;
/// guarded high-precision otherwise.
#[derive(Clone, Debug)]
pub struct MeanIndex {
    pub value: ScalarValue,
}

fn even_factor(m: u64) -> i64 {
    // (1 + (-1)^m)/2 as an integer parity branch.
    i64::from(m % 2 == 0)
}

fn scaled_bracket(m: u64, ratio: &ScalarValue) -> Result<(BigInt, i64), NumericError> {
    let scaled = ratio.scale(&BigRational::from_integer(BigInt::from(m)));
    let b = brackets(&scaled)?;
    Ok((b.ceil, i64::from(b.phi)))
}

/// `i(γ,m)` and `ν(γ,m)` by the precise iteration formulas, plus the
/// variational conversion.
pub fn iterate(d: &PathIndexData, m: u64) -> Result<IterationResult, IterationError> {
    if m == 0 {
        return Err(IterationError::InvalidData("iterate needs m >= 1".into()));
    }
    let dec = &d.decomposition;
    let (p_minus, p_zero) = (dec.p_minus as i64, dec.p_zero as i64);
    let (q_minus, q_zero, q_plus) = (dec.q_minus as i64, dec.q_zero as i64, dec.q_plus as i64);
    let r = dec.rotations.len() as i64;
    let r_star = dec.nontrivial_n2.len() as i64;
    let r_zero = dec.trivial_n2.len() as i64;
    let even = even_factor(m);

    let mut i_m = BigInt::from(m) * BigInt::from(d.i1 + p_minus + p_zero - r);
    i_m += BigInt::from(-r - p_minus - p_zero - even * (q_zero + q_plus));

    let mut phi_rot_sum = 0i64;
    for ratio in &dec.rotations {
        let (ceil, phi) = scaled_bracket(m, ratio)?;
        i_m += 2 * ceil;
        phi_rot_sum += phi;
    }
    let mut phi_n2n_sum = 0i64;
    for ratio in &dec.nontrivial_n2 {
        let (_, phi) = scaled_bracket(m, ratio)?;
        phi_n2n_sum += phi;
    }
    i_m += BigInt::from(2 * (phi_n2n_sum - r_star));

    let mut phi_n2t_sum = 0i64;
    for ratio in &dec.trivial_n2 {
        let (_, phi) = scaled_bracket(m, ratio)?;
        phi_n2t_sum += phi;
    }

    let nu_m = d.nu1() as i64
        + even * (q_minus + 2 * q_zero + q_plus)
        + 2 * (r + r_star + r_zero)
        - 2 * (phi_rot_sum + phi_n2n_sum + phi_n2t_sum);
    debug_assert!(nu_m >= 1 && nu_m <= 2 * d.n as i64);

    let i_ekeland = &i_m - BigInt::from(d.n);
    Ok(IterationResult {
        m,
        i_m,
        nu_m: nu_m as u32,
        i_ekeland,
    })
}

/// `î(γ,1) = i(γ,1) + p- + p0 - r + Σ θ_j/π`.
pub fn mean_index(d: &PathIndexData) -> MeanIndex {
    let dec = &d.decomposition;
    let base = d.i1 + dec.p_minus as i64 + dec.p_zero as i64 - dec.rotations.len() as i64;
    let mut value = ScalarValue::from_int(base);
    for ratio in &dec.rotations {
        // θ/π = 2 · (θ/2π)
        let term = ratio.scale_int(2);
        value = match value.add(&term) {
            Ok(v) => v,
            Err(NumericError::MixedRadicals { .. }) => {
                // Ratios from distinct quadratic fields: fall back on a
                // guarded high-precision sum.
                return mean_index_guarded(d);
            }
            Err(e) => unreachable!("exact ratio addition cannot fail otherwise: {e}"),
        };
    }
    MeanIndex { value }
}

fn mean_index_guarded(d: &PathIndexData) -> MeanIndex {
    let dec = &d.decomposition;
    let base = d.i1 + dec.p_minus as i64 + dec.p_zero as i64 - dec.rotations.len() as i64;
    let mut value = BigRational::from_integer(BigInt::from(base));
    let mut guard = BigRational::new(BigInt::from(1), BigInt::from(10u8).pow(38));
    for ratio in &dec.rotations {
        let (v, g) = ratio
            .scale_int(2)
            .to_interval_parts()
            .expect("rotation ratios are exact");
        value += v;
        guard += g;
    }
    MeanIndex {
        value: ScalarValue::approx(value, guard).expect("positive guard"),
    }
}

/// Both inequalities of the Bott-type estimate at iterate `m`; requires a
/// leading `N1(1,1)` factor.
pub fn bott_estimate_check(d: &PathIndexData, m: u64) -> Result<bool, IterationError> {
    if d.decomposition.p_minus == 0 {
        return Err(IterationError::HypothesisUnmet(
            "estimate requires an N1(1,1) factor (p- >= 1)".into(),
        ));
    }
    bott_inequality_raw(d, m)
}

/// The two-sided inequality itself, without the hypothesis gate; paths
/// lacking the `N1(1,1)` factor can violate it, which makes this the
/// negative control.
pub fn bott_inequality_raw(d: &PathIndexData, m: u64) -> Result<bool, IterationError> {
    let e_half = BigInt::from(d.circle_multiplicity() / 2);
    let at_m = iterate(d, m)?;
    let at_m1 = iterate(d, m + 1)?;
    let diff = &at_m1.i_m - &at_m.i_m - BigInt::from(d.i1);
    let lower = BigInt::from(at_m.nu_m) - &e_half + 1;
    let upper = BigInt::from(d.nu1() as i64 - at_m1.nu_m as i64) + &e_half;
    Ok(lower <= diff && diff <= upper)
}

/// `[(i(y,1) + 2S⁺(y) - ν(y,1) + n) / 2]`, the orbit's contribution to the
/// variational lower bound.
pub fn rho_contribution(d: &PathIndexData) -> i64 {
    let (s_plus, _) = d.splitting_at_one();
    let num = d.i1 + 2 * s_plus as i64 - d.nu1() as i64 + d.n as i64;
    num.div_euclid(2)
}

/// One verified identity of a jump window.
#[derive(Clone, Debug, Serialize)]
pub struct WindowCheck {
    pub label: &'static str,
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub lhs: BigInt,
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub rhs: BigInt,
    pub satisfied: bool,
}

/// The jump-window identities and bounds around `2T`, each reported as
/// `(lhs, rhs, satisfied)`.
#[derive(Clone, Debug, Serialize)]
pub struct JumpWindowReport {
    pub checks: Vec<WindowCheck>,
    pub all_satisfied: bool,
}

pub fn jump_window(
    d: &PathIndexData,
    m_center: u64,
    t: u64,
) -> Result<JumpWindowReport, IterationError> {
    if m_center == 0 {
        return Err(IterationError::InvalidData("window needs m >= 1".into()));
    }
    let nu1 = BigInt::from(d.nu1());
    let two_t = BigInt::from(2) * BigInt::from(t);
    let e_half = BigInt::from(d.circle_multiplicity() / 2);
    let (s_plus, _) = d.splitting_at_one();
    let before = iterate(d, 2 * m_center - 1)?;
    let center = iterate(d, 2 * m_center)?;
    let after = iterate(d, 2 * m_center + 1)?;

    let mut checks = Vec::new();
    {
        let mut eq = |label: &'static str, lhs: BigInt, rhs: BigInt| {
            let satisfied = lhs == rhs;
            checks.push(WindowCheck {
                label,
                lhs,
                rhs,
                satisfied,
            });
        };
        eq("nu(2m-1) = nu(1)", BigInt::from(before.nu_m), nu1.clone());
        eq("nu(2m+1) = nu(1)", BigInt::from(after.nu_m), nu1.clone());
        eq(
            "i(2m-1)+nu(2m-1) = 2T - (i1 + 2S+ - nu1)",
            &before.i_m + BigInt::from(before.nu_m),
            &two_t - (BigInt::from(d.i1) + BigInt::from(2 * s_plus) - &nu1),
        );
        eq(
            "i(2m+1) = 2T + i1",
            after.i_m.clone(),
            &two_t + BigInt::from(d.i1),
        );
    }
    let lower_rhs = &two_t - &e_half;
    let lower_ok = center.i_m >= lower_rhs;
    checks.push(WindowCheck {
        label: "i(2m) >= 2T - e/2",
        lhs: center.i_m.clone(),
        rhs: lower_rhs,
        satisfied: lower_ok,
    });
    let upper_lhs = &center.i_m + BigInt::from(center.nu_m);
    let upper_rhs = &two_t + &e_half - 1;
    let upper_ok = upper_lhs <= upper_rhs;
    checks.push(WindowCheck {
        label: "i(2m)+nu(2m) <= 2T + e/2 - 1",
        lhs: upper_lhs,
        rhs: upper_rhs,
        satisfied: upper_ok,
    });
    let all_satisfied = checks.iter().all(|c| c.satisfied);
    Ok(JumpWindowReport {
        checks,
        all_satisfied,
    })
}

/// Exact comparison of a mean index against an integer threshold.
pub fn mean_index_exceeds(value: &ScalarValue, threshold: i64) -> Result<bool, NumericError> {
    Ok(compare(value, &ScalarValue::from_int(threshold))? == Ordering::Greater)
}

// --- wire format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathDataWire {
    i1: i64,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu1: Option<u32>,
    decomposition: NormalFormDecomposition,
}

impl Serialize for PathIndexData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PathDataWire {
            i1: self.i1,
            n: self.n,
            nu1: Some(self.nu1()),
            decomposition: self.decomposition.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PathIndexData {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = PathDataWire::deserialize(de)?;
        let data = PathIndexData::new(wire.i1, wire.n, wire.decomposition)
            .map_err(serde::de::Error::custom)?;
        if let Some(nu1) = wire.nu1 {
            if nu1 != data.nu1() {
                return Err(serde::de::Error::custom(format!(
                    "declared nu1 = {nu1} but the decomposition gives {}",
                    data.nu1()
                )));
            }
        }
        Ok(data)
    }
}

/// Table row `(m, i(γ,m), ν(γ,m), i(yᵐ), i(yᵐ)+ν(yᵐ)-1)` for report output.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRow {
    pub m: u64,
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub i_gamma: BigInt,
    pub nu: u32,
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub i_ekeland: BigInt,
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub band_top: BigInt,
}

pub fn iteration_rows(
    d: &PathIndexData,
    ms: impl Iterator<Item = u64>,
) -> Result<Vec<IterationRow>, IterationError> {
    ms.map(|m| {
        let r = iterate(d, m)?;
        Ok(IterationRow {
            m,
            i_gamma: r.i_m.clone(),
            nu: r.nu_m,
            i_ekeland: r.i_ekeland.clone(),
            band_top: r.band_top(),
        })
    })
    .collect()
}
