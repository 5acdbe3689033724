//! Basic normal forms, exact angle realizations, and the block decomposition
//! carrying `(p-, p0, p+, q-, q0, q+, r, θ_j, r*, α_j, r0, β_j, M0)`.

use super::{diamond_all, exact_cmp, SymplecticError, SymplecticMatrix};
use crate::numeric::{compare, scalar_eq, NumericError, ScalarValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum N2Kind {
    Trivial,
    Nontrivial,
}

/// The 2×2 and 4×4 canonical symplectic blocks.
#[derive(Clone, Debug)]
pub enum BasicNormalForm {
    /// `[[λ, b], [0, λ]]` with `λ = ±1`, `b ∈ {1, 0, -1}`.
    N1 { lambda: i8, b: i8 },
    /// `diag(λ, 1/λ)` with `λ = ±2`.
    D { lambda: i8 },
    /// Plane rotation with angle ratio `θ/2π ∈ (0,1) \ {1/2}`.
    R { ratio: ScalarValue },
    /// `[[R(θ), b], [0, R(θ)]]`; only the angle ratio and the sign class of
    /// `(b₂-b₃)sinθ` matter downstream.
    N2 { ratio: ScalarValue, kind: N2Kind },
    /// Eigenvalues entirely off the unit circle, realized as `D(2)^{⋄ dim/2}`.
    OffCircleBlock { dim: usize },
}

fn rat(n: i64, d: i64) -> ScalarValue {
    ScalarValue::from_ratio(n, d)
}

fn half_sqrt(d: u64) -> ScalarValue {
    ScalarValue::surd(BigRational::zero(), BigRational::new(1.into(), 2.into()), d).unwrap()
}

/// Exact `(cos 2πw, sin 2πw)` for rational `w` with denominator dividing 12
/// or 8; other angles have no single-radical realization.
pub fn exact_cos_sin(ratio: &ScalarValue) -> Option<(ScalarValue, ScalarValue)> {
    let r = ratio.as_rational()?;
    let twelve = BigRational::from_integer(12.into());
    let eight = BigRational::from_integer(8.into());
    let table12 = |k: i64| -> (ScalarValue, ScalarValue) {
        let c = match k.rem_euclid(12) {
            0 => rat(1, 1),
            1 | 11 => half_sqrt(3),
            2 | 10 => rat(1, 2),
            3 | 9 => rat(0, 1),
            4 | 8 => rat(-1, 2),
            5 | 7 => half_sqrt(3).neg(),
            6 => rat(-1, 1),
            _ => unreachable!(),
        };
        let s = match k.rem_euclid(12) {
            0 | 6 => rat(0, 1),
            1 | 5 => rat(1, 2),
            2 | 4 => half_sqrt(3),
            3 => rat(1, 1),
            7 | 11 => rat(-1, 2),
            8 | 10 => half_sqrt(3).neg(),
            9 => rat(-1, 1),
            _ => unreachable!(),
        };
        (c, s)
    };
    let idx12 = r * &twelve;
    if idx12.is_integer() {
        let k: BigInt = idx12.to_integer();
        let k = (&k % BigInt::from(12) + BigInt::from(12)) % BigInt::from(12);
        return Some(table12(i64::try_from(k).ok()?));
    }
    let idx8 = r * &eight;
    if idx8.is_integer() {
        let k: BigInt = idx8.to_integer();
        let k = (&k % BigInt::from(8) + BigInt::from(8)) % BigInt::from(8);
        let k = i64::try_from(k).ok()?;
        let h2 = half_sqrt(2);
        let (c, s) = match k {
            1 => (h2.clone(), h2),
            3 => (h2.neg(), h2),
            5 => (h2.clone().neg(), h2.neg()),
            7 => (h2.clone(), h2.neg()),
            _ => return None, // even k/8 reduce to k/4 and were caught above
        };
        return Some((c, s));
    }
    None
}

/// Reverse lookup: angle ratio in `[0,1)` from an exact `(cos, sin)` pair.
pub fn ratio_from_cos_sin(c: &ScalarValue, s: &ScalarValue) -> Option<ScalarValue> {
    for q in [12u64, 8] {
        for k in 0..q {
            let cand = ScalarValue::Rational(BigRational::new(BigInt::from(k), BigInt::from(q)));
            if let Some((tc, ts)) = exact_cos_sin(&cand) {
                if scalar_eq(&tc, c) && scalar_eq(&ts, s) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Angle ratios `w ∈ [0, 1/2]` with `cos 2πw` equal to the given exact value;
/// this also covers denominators 5 and 10 whose sines are not single surds.
pub fn ratio_from_cos(c: &ScalarValue) -> Option<ScalarValue> {
    let quarter_surd = |num: i64, sqrt_coeff: i64| {
        ScalarValue::surd(
            BigRational::new(num.into(), 4.into()),
            BigRational::new(sqrt_coeff.into(), 4.into()),
            5,
        )
        .unwrap()
    };
    let candidates: Vec<(ScalarValue, ScalarValue)> = vec![
        (rat(1, 10), quarter_surd(1, 1)),   // cos 36° = (1+√5)/4
        (rat(1, 5), quarter_surd(-1, 1)),   // cos 72° = (√5-1)/4
        (rat(3, 10), quarter_surd(1, -1)),  // cos 108° = (1-√5)/4
        (rat(2, 5), quarter_surd(-1, -1)),  // cos 144° = -(1+√5)/4
    ];
    for (w, cv) in candidates {
        if scalar_eq(&cv, c) {
            return Some(w);
        }
    }
    for q in [12u64, 8] {
        for k in 0..=q / 2 {
            let cand = ScalarValue::Rational(BigRational::new(BigInt::from(k), BigInt::from(q)));
            if let Some((tc, _)) = exact_cos_sin(&cand) {
                if scalar_eq(&tc, c) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

impl BasicNormalForm {
    pub fn realize(&self) -> Result<SymplecticMatrix, SymplecticError> {
        match self {
            BasicNormalForm::N1 { lambda, b } => {
                if ![-1i8, 1].contains(lambda) || ![-1i8, 0, 1].contains(b) {
                    return Err(SymplecticError::InvalidDecomposition(format!(
                        "N1({lambda},{b}) outside λ=±1, b∈{{-1,0,1}}"
                    )));
                }
                Ok(SymplecticMatrix::from_entries_unchecked(
                    1,
                    vec![
                        ScalarValue::from_int(*lambda as i64),
                        ScalarValue::from_int(*b as i64),
                        ScalarValue::zero(),
                        ScalarValue::from_int(*lambda as i64),
                    ],
                ))
            }
            BasicNormalForm::D { lambda } => {
                if ![-2i8, 2].contains(lambda) {
                    return Err(SymplecticError::InvalidDecomposition(format!(
                        "D({lambda}) outside λ=±2"
                    )));
                }
                Ok(SymplecticMatrix::from_entries_unchecked(
                    1,
                    vec![
                        ScalarValue::from_int(*lambda as i64),
                        ScalarValue::zero(),
                        ScalarValue::zero(),
                        ScalarValue::from_ratio(1, *lambda as i64),
                    ],
                ))
            }
            BasicNormalForm::R { ratio } => {
                check_rotation_ratio(ratio)?;
                let (c, s) = exact_cos_sin(ratio)
                    .ok_or_else(|| SymplecticError::UnsupportedAngle(format!("{ratio}")))?;
                Ok(SymplecticMatrix::from_entries_unchecked(
                    1,
                    vec![c.clone(), s.neg(), s, c],
                ))
            }
            BasicNormalForm::N2 { ratio, kind } => {
                check_rotation_ratio(ratio)?;
                let (c, s) = exact_cos_sin(ratio)
                    .ok_or_else(|| SymplecticError::UnsupportedAngle(format!("{ratio}")))?;
                // b = ±R(θ) gives (b₂-b₃)sinθ = ∓2sin²θ: minus sign for +R
                // (non-trivial), plus sign for -R (trivial).
                let sign = match kind {
                    N2Kind::Nontrivial => 1,
                    N2Kind::Trivial => -1,
                };
                let bc = c.scale_int(sign);
                let bs = s.scale_int(sign);
                let z = ScalarValue::zero;
                #[rustfmt::skip]
                let rows = vec![
                    c.clone(), s.neg(),  bc.clone(), bs.neg(),
                    s.clone(), c.clone(), bs.clone(), bc.clone(),
                    z(), z(), c.clone(), s.neg(),
                    z(), z(), s.clone(), c.clone(),
                ];
                Ok(SymplecticMatrix::from_entries_unchecked(2, rows))
            }
            BasicNormalForm::OffCircleBlock { dim } => {
                if dim % 2 != 0 || *dim == 0 {
                    return Err(SymplecticError::InvalidDecomposition(
                        "off-circle block dimension must be even and positive".into(),
                    ));
                }
                let d2 = BasicNormalForm::D { lambda: 2 }.realize()?;
                diamond_all(&vec![d2; dim / 2])
            }
        }
    }
}

fn check_rotation_ratio(ratio: &ScalarValue) -> Result<(), SymplecticError> {
    let in_range = compare(ratio, &ScalarValue::zero()).map(|o| o == Ordering::Greater)
        .and_then(|lo| {
            Ok(lo && compare(ratio, &ScalarValue::one())? == Ordering::Less
                && compare(ratio, &rat(1, 2))? != Ordering::Equal)
        })
        .map_err(NumericError::from)?;
    if in_range {
        Ok(())
    } else {
        Err(SymplecticError::InvalidDecomposition(format!(
            "rotation ratio {ratio} outside (0,1)\\{{1/2}}"
        )))
    }
}

/// The block content of Theorem-style normal form decompositions. Ratio lists
/// hold `θ/2π` values, kept sorted by the canonicalization step.
#[derive(Clone, Debug, Default)]
pub struct NormalFormDecomposition {
    pub p_minus: u32,
    pub p_zero: u32,
    pub p_plus: u32,
    pub q_minus: u32,
    pub q_zero: u32,
    pub q_plus: u32,
    pub rotations: Vec<ScalarValue>,
    pub nontrivial_n2: Vec<ScalarValue>,
    pub trivial_n2: Vec<ScalarValue>,
    pub off_circle_dim: u32,
}

impl NormalFormDecomposition {
    pub fn validate(&self) -> Result<(), SymplecticError> {
        if self.off_circle_dim % 2 != 0 {
            return Err(SymplecticError::InvalidDecomposition(
                "off_circle_dim must be even".into(),
            ));
        }
        for ratio in self
            .rotations
            .iter()
            .chain(&self.nontrivial_n2)
            .chain(&self.trivial_n2)
        {
            check_rotation_ratio(ratio)?;
        }
        Ok(())
    }

    /// Half-dimension `n` of the symplectic space the decomposition fills.
    pub fn half_dim(&self) -> u32 {
        self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.rotations.len() as u32
            + 2 * self.nontrivial_n2.len() as u32
            + 2 * self.trivial_n2.len() as u32
            + self.off_circle_dim / 2
    }

    /// ν(γ,1): the eigenvalue-1 count `p- + 2p0 + p+`.
    pub fn nu_one(&self) -> u32 {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    pub fn rotation_count(&self) -> u32 {
        self.rotations.len() as u32
    }

    /// Sort ratio lists so decompositions compare by value.
    pub fn canonicalize(&mut self) {
        self.rotations.sort_by(exact_cmp);
        self.nontrivial_n2.sort_by(exact_cmp);
        self.trivial_n2.sort_by(exact_cmp);
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// Value equality disregarding ratio-list order.
    pub fn same_as(&self, other: &Self) -> bool {
        let (a, b) = (self.clone().canonicalized(), other.clone().canonicalized());
        let (self_, other) = (&a, &b);
        let counts = |d: &Self| {
            (
                d.p_minus, d.p_zero, d.p_plus, d.q_minus, d.q_zero, d.q_plus,
                d.off_circle_dim,
            )
        };
        counts(self_) == counts(other)
            && self_.rotations.len() == other.rotations.len()
            && self_.nontrivial_n2.len() == other.nontrivial_n2.len()
            && self_.trivial_n2.len() == other.trivial_n2.len()
            && self_
                .rotations
                .iter()
                .zip(&other.rotations)
                .all(|(a, b)| scalar_eq(a, b))
            && self_
                .nontrivial_n2
                .iter()
                .zip(&other.nontrivial_n2)
                .all(|(a, b)| scalar_eq(a, b))
            && self_
                .trivial_n2
                .iter()
                .zip(&other.trivial_n2)
                .all(|(a, b)| scalar_eq(a, b))
    }

    /// Blocks in canonical order.
    pub fn blocks(&self) -> Vec<BasicNormalForm> {
        let mut out = Vec::new();
        let push_n = |out: &mut Vec<BasicNormalForm>, count: u32, lambda: i8, b: i8| {
            for _ in 0..count {
                out.push(BasicNormalForm::N1 { lambda, b });
            }
        };
        push_n(&mut out, self.p_minus, 1, 1);
        push_n(&mut out, self.p_zero, 1, 0);
        push_n(&mut out, self.p_plus, 1, -1);
        push_n(&mut out, self.q_minus, -1, 1);
        push_n(&mut out, self.q_zero, -1, 0);
        push_n(&mut out, self.q_plus, -1, -1);
        for ratio in &self.rotations {
            out.push(BasicNormalForm::R { ratio: ratio.clone() });
        }
        for ratio in &self.nontrivial_n2 {
            out.push(BasicNormalForm::N2 {
                ratio: ratio.clone(),
                kind: N2Kind::Nontrivial,
            });
        }
        for ratio in &self.trivial_n2 {
            out.push(BasicNormalForm::N2 {
                ratio: ratio.clone(),
                kind: N2Kind::Trivial,
            });
        }
        if self.off_circle_dim > 0 {
            out.push(BasicNormalForm::OffCircleBlock {
                dim: self.off_circle_dim as usize,
            });
        }
        out
    }

    /// A concrete matrix whose decomposition round-trips (for angle ratios
    /// realizable in the quadratic tower).
    pub fn realize(&self) -> Result<SymplecticMatrix, SymplecticError> {
        self.validate()?;
        let blocks: Vec<SymplecticMatrix> = self
            .blocks()
            .iter()
            .map(|b| b.realize())
            .collect::<Result<_, _>>()?;
        if blocks.is_empty() {
            return Err(SymplecticError::InvalidDecomposition("empty decomposition".into()));
        }
        diamond_all(&blocks)
    }

    /// Read the decomposition back off a matrix assembled from basic blocks,
    /// optionally undoing a declared conjugation `m = P⁻¹ B P`.
    pub fn decompose(
        m: &SymplecticMatrix,
        conjugator: Option<&SymplecticMatrix>,
    ) -> Result<Self, SymplecticError> {
        let target = match conjugator {
            Some(p) => p.mul(m)?.mul(&p.inverse()?)?,
            None => m.clone(),
        };
        let n = target.half_dim();
        let mut out = NormalFormDecomposition::default();
        let mut o = 0usize;
        while o < n {
            if block_closed(&target, &[o]) {
                classify_single(&target, o, &mut out)?;
                o += 1;
            } else if o + 1 < n && block_closed(&target, &[o, o + 1]) {
                classify_n2(&target, o, &mut out)?;
                o += 2;
            } else {
                return Err(SymplecticError::UnsupportedLayout(format!(
                    "no closed 2x2 or 4x4 block at half-offset {o}"
                )));
            }
        }
        Ok(out.canonicalized())
    }
}

/// True when the half-coordinates `planes` interact with nothing outside
/// themselves.
pub(crate) fn block_closed(m: &SymplecticMatrix, planes: &[usize]) -> bool {
    let n = m.half_dim();
    let mine: Vec<usize> = planes
        .iter()
        .flat_map(|&p| [p, n + p])
        .collect();
    for &i in &mine {
        for j in 0..2 * n {
            if mine.contains(&j) {
                continue;
            }
            if !m.entry(i, j).is_zero_exact() || !m.entry(j, i).is_zero_exact() {
                return false;
            }
        }
    }
    true
}

fn classify_single(
    m: &SymplecticMatrix,
    o: usize,
    out: &mut NormalFormDecomposition,
) -> Result<(), SymplecticError> {
    let n = m.half_dim();
    let a = m.entry(o, o);
    let b = m.entry(o, n + o);
    let c = m.entry(n + o, o);
    let d = m.entry(n + o, n + o);
    let int_val = |v: &ScalarValue| -> Option<i64> {
        v.as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| i64::try_from(r.to_integer()).ok())
    };
    if c.is_zero_exact() {
        if let (Some(av), Some(dv)) = (int_val(a), int_val(d)) {
            if av == dv && (av == 1 || av == -1) {
                if let Some(bv) = int_val(b) {
                    if (-1..=1).contains(&bv) {
                        match (av, bv) {
                            (1, 1) => out.p_minus += 1,
                            (1, 0) => out.p_zero += 1,
                            (1, -1) => out.p_plus += 1,
                            (-1, 1) => out.q_minus += 1,
                            (-1, 0) => out.q_zero += 1,
                            (-1, -1) => out.q_plus += 1,
                            _ => unreachable!(),
                        }
                        return Ok(());
                    }
                }
            }
        }
    }
    // Rotation block: [[c, -s], [s, c]] with s ≠ 0.
    if scalar_eq(a, d) && scalar_eq(&b.neg(), c) && !c.is_zero_exact() {
        if let Some(ratio) = ratio_from_cos_sin(a, c) {
            check_rotation_ratio(&ratio)?;
            out.rotations.push(ratio);
            return Ok(());
        }
    }
    // Anything with both eigenvalues off the unit circle: |trace| > 2.
    let tr = a.add(d)?;
    let two = ScalarValue::from_int(2);
    let above = compare(&tr, &two).map_err(NumericError::from)?;
    let below = compare(&tr, &two.neg()).map_err(NumericError::from)?;
    if above == Ordering::Greater || below == Ordering::Less {
        out.off_circle_dim += 2;
        return Ok(());
    }
    Err(SymplecticError::UnsupportedLayout(format!(
        "2x2 block at half-offset {o} is not a basic normal form"
    )))
}

fn classify_n2(
    m: &SymplecticMatrix,
    o: usize,
    out: &mut NormalFormDecomposition,
) -> Result<(), SymplecticError> {
    let n = m.half_dim();
    let sub = |i: usize, j: usize| m.entry(i, j);
    // C block must vanish, A and D must agree and be a rotation.
    for (i, j) in [(n + o, o), (n + o, o + 1), (n + o + 1, o), (n + o + 1, o + 1)] {
        if !sub(i, j).is_zero_exact() {
            return Err(SymplecticError::UnsupportedLayout(
                "4x4 block has nonzero lower-left corner".into(),
            ));
        }
    }
    let a00 = sub(o, o);
    let a01 = sub(o, o + 1);
    let a10 = sub(o + 1, o);
    let a11 = sub(o + 1, o + 1);
    let same_rotation = scalar_eq(a00, a11)
        && scalar_eq(&a01.neg(), a10)
        && scalar_eq(a00, sub(n + o, n + o))
        && scalar_eq(a01, sub(n + o, n + o + 1))
        && scalar_eq(a10, sub(n + o + 1, n + o))
        && scalar_eq(a11, sub(n + o + 1, n + o + 1));
    if !same_rotation {
        return Err(SymplecticError::UnsupportedLayout(
            "4x4 block diagonal is not a repeated rotation".into(),
        ));
    }
    let ratio = ratio_from_cos_sin(a00, a10).ok_or_else(|| {
        SymplecticError::UnsupportedAngle("4x4 rotation angle outside the exact table".into())
    })?;
    check_rotation_ratio(&ratio)?;
    // Kind from the sign of (b₂ - b₃)·sinθ.
    let b2 = sub(o, n + o + 1);
    let b3 = sub(o + 1, n + o);
    let s = a10;
    let prod = b2.sub(b3).map_err(NumericError::from)?.mul(s).map_err(NumericError::from)?;
    let sign = prod.sign().map_err(NumericError::from)?;
    let kind = match sign {
        Ordering::Greater => N2Kind::Trivial,
        Ordering::Less => N2Kind::Nontrivial,
        Ordering::Equal => {
            return Err(SymplecticError::UnsupportedLayout(
                "N2 block with b₂ = b₃".into(),
            ))
        }
    };
    match kind {
        N2Kind::Trivial => out.trivial_n2.push(ratio),
        N2Kind::Nontrivial => out.nontrivial_n2.push(ratio),
    }
    Ok(())
}

// --- JSON schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionWire {
    p: [u32; 3],
    q: [u32; 3],
    rot: Vec<ScalarValue>,
    n2n: Vec<ScalarValue>,
    n2t: Vec<ScalarValue>,
    off: u32,
}

impl Serialize for NormalFormDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let canon = self.clone().canonicalized();
        DecompositionWire {
            p: [canon.p_minus, canon.p_zero, canon.p_plus],
            q: [canon.q_minus, canon.q_zero, canon.q_plus],
            rot: canon.rotations,
            n2n: canon.nontrivial_n2,
            n2t: canon.trivial_n2,
            off: canon.off_circle_dim,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalFormDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = DecompositionWire::deserialize(d)?;
        let out = NormalFormDecomposition {
            p_minus: wire.p[0],
            p_zero: wire.p[1],
            p_plus: wire.p[2],
            q_minus: wire.q[0],
            q_zero: wire.q[1],
            q_plus: wire.q[2],
            rotations: wire.rot,
            nontrivial_n2: wire.n2n,
            trivial_n2: wire.n2t,
            off_circle_dim: wire.off,
        };
        out.validate().map_err(serde::de::Error::custom)?;
        Ok(out.canonicalized())
    }
}
