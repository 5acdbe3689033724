//! Common-index-jump machinery: assemble the Kronecker vector `v`, the
//! tangent space `V` of the closure of `{Tv mod 1}`, cube-vertex selection
//! `χ = ψ(a)`, the `T`-scan with exact verification of every returned tuple,
//! and the order-interchange experiment for pairs of orbits.

use crate::iteration::{jump_window, mean_index, IterationError, PathIndexData};
use crate::numeric::{
    brackets, compare, frac_f64, rational_relation_check, NumericError, ScalarValue,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KroneckerError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("declared relations are inconsistent: {0}")]
    InconsistentRelations(String),
    #[error("tangent space is trivial: every component of v is rational")]
    TrivialTangentSpace,
    #[error("vertex sampling failed to avoid the deleted hyperplanes")]
    EmptyA,
    #[error("search exhausted at T = {0} without a verified tuple")]
    SearchExhausted(u64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// The assembled jump-search problem.
#[derive(Clone, Debug)]
pub struct JumpProblem {
    paths: Vec<PathIndexData>,
    mean_indices: Vec<ScalarValue>,
    big_m: u64,
    m0: u64,
    eps: BigRational,
    /// `v = (1/(M·î_1), …, 1/(M·î_q), α_{1,1}/î_1, …, α_{q,μ_q}/î_q)`.
    v: Vec<ScalarValue>,
    relations: Vec<Vec<BigInt>>,
    rational_mask: Vec<bool>,
}

/// A cube vertex `χ = ψ(a)` with its witness point `a ∈ A(v)`.
#[derive(Clone, Debug, Serialize)]
pub struct VertexChoice {
    #[serde(serialize_with = "crate::numeric::serialize_rational_vec")]
    pub a: Vec<BigRational>,
    pub chi: Vec<u8>,
}

/// A verified jump tuple `(T, m_1, …, m_q)`.
#[derive(Clone, Debug, Serialize)]
pub struct JumpTuple {
    pub t: u64,
    pub m: Vec<u64>,
    /// `max_k |{T v_k} - χ_k|`, exact.
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    pub residual: BigRational,
}

/// `ψ(x) = 0` for `x >= 0`, `1` for `x < 0`.
fn psi(x: &BigRational) -> u8 {
    u8::from(x.is_negative())
}

impl JumpProblem {
    pub fn paths(&self) -> &[PathIndexData] {
        &self.paths
    }

    pub fn mean_indices(&self) -> &[ScalarValue] {
        &self.mean_indices
    }

    pub fn big_m(&self) -> u64 {
        self.big_m
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    pub fn v(&self) -> &[ScalarValue] {
        &self.v
    }

    pub fn dimension(&self) -> usize {
        self.v.len()
    }

    pub fn relations(&self) -> &[Vec<BigInt>] {
        &self.relations
    }
}

/// Per-path angle components `θ/π` entering `v`, in canonical order:
/// the `S⁻`-weighted unit-circle angles sorted ascending.
fn jump_angles(d: &PathIndexData) -> Vec<ScalarValue> {
    let dec = d.decomposition();
    let mut ws: Vec<ScalarValue> = Vec::new();
    ws.extend(dec.rotations.iter().cloned());
    for w in &dec.nontrivial_n2 {
        ws.push(w.clone());
        ws.push(ScalarValue::one().sub(w).expect("exact ratio"));
    }
    for _ in 0..(dec.q_zero + dec.q_plus) {
        ws.push(ScalarValue::from_ratio(1, 2));
    }
    ws.sort_by(crate::symplectic::exact_scalar_cmp);
    ws.iter().map(|w| w.scale_int(2)).collect()
}

/// Least `M` with `M·θ/π ∈ Z` for every rational unit-circle angle across
/// the paths, times the lcm of denominators of rational mean indices.
fn common_denominator(paths: &[PathIndexData], means: &[ScalarValue]) -> Result<u64, KroneckerError> {
    let mut m: u64 = 1;
    for d in paths {
        for w in d.unit_angle_ratios() {
            if let Some(r) = w.as_rational() {
                // θ/π = 2r: denominator of 2r.
                let two_r = r * BigRational::from_integer(2.into());
                let den = two_r
                    .denom()
                    .to_u64()
                    .ok_or_else(|| KroneckerError::Invalid("angle denominator overflow".into()))?;
                m = m.lcm(&den);
            }
        }
    }
    for mean in means {
        if let Some(r) = mean.as_rational() {
            let den = r
                .denom()
                .to_u64()
                .ok_or_else(|| KroneckerError::Invalid("mean denominator overflow".into()))?;
            m = m.lcm(&den);
        }
    }
    Ok(m)
}

/// Build the jump problem. Declared relations (integer vectors `k` with
/// `k·v ∈ Z`) cover the irrational components; relations among rational
/// components are derived automatically.
pub fn build_problem(
    paths: Vec<PathIndexData>,
    eps: BigRational,
    m0: u64,
    declared_relations: Vec<Vec<BigInt>>,
) -> Result<JumpProblem, KroneckerError> {
    if paths.is_empty() {
        return Err(KroneckerError::Invalid("need at least one path".into()));
    }
    if !eps.is_positive() {
        return Err(KroneckerError::Invalid("eps must be positive".into()));
    }
    if m0 == 0 {
        return Err(KroneckerError::Invalid("M0 must be positive".into()));
    }
    let mut means = Vec::new();
    for d in &paths {
        if d.decomposition().p_minus == 0 {
            return Err(KroneckerError::HypothesisUnmet(
                "every path needs an N1(1,1) factor (p- >= 1)".into(),
            ));
        }
        let mean = mean_index(d).value;
        if !mean.is_exact() {
            return Err(KroneckerError::Invalid(
                "mean index is not exactly representable; supply same-field angle data".into(),
            ));
        }
        match compare(&mean, &ScalarValue::zero())? {
            Ordering::Greater => {}
            _ => {
                return Err(KroneckerError::HypothesisUnmet(
                    "mean indices must be positive".into(),
                ))
            }
        }
        means.push(mean);
    }
    let big_m = common_denominator(&paths, &means)?;
    let m_rat = BigRational::from_integer(BigInt::from(big_m));
    let mut v: Vec<ScalarValue> = Vec::new();
    for mean in &means {
        let mi = mean.scale(&m_rat);
        v.push(mi.recip()?);
    }
    for (d, mean) in paths.iter().zip(&means) {
        let inv = mean.recip()?;
        for alpha in jump_angles(d) {
            v.push(alpha.mul(&inv).map_err(|_| {
                KroneckerError::Invalid(
                    "angle and mean index live in different quadratic fields".into(),
                )
            })?);
        }
    }
    let rational_mask: Vec<bool> = v.iter().map(|x| x.is_rational()).collect();
    // Singleton relations for rational components.
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    for (k, x) in v.iter().enumerate() {
        if let Some(r) = x.as_rational() {
            let mut rel = vec![BigInt::zero(); v.len()];
            rel[k] = r.denom().clone();
            relations.push(rel);
        }
    }
    for rel in declared_relations {
        if rel.len() != v.len() {
            return Err(KroneckerError::InconsistentRelations(format!(
                "relation length {} does not match h = {}",
                rel.len(),
                v.len()
            )));
        }
        if !rational_relation_check(&rel, &v)? {
            return Err(KroneckerError::InconsistentRelations(
                "declared relation does not evaluate to an integer".into(),
            ));
        }
        relations.push(rel);
    }
    Ok(JumpProblem {
        paths,
        mean_indices: means,
        big_m,
        m0,
        eps,
        v,
        relations,
        rational_mask,
    })
}

/// Full integer relation lattice generators for exact components, derived
/// from their quadratic-field coordinates. Builders that know their
/// arithmetic use this to declare relations.
pub fn derive_integer_relations(values: &[ScalarValue]) -> Vec<Vec<BigInt>> {
    let h = values.len();
    // Radical-coefficient matrix: one row per distinct radicand.
    let mut radicands: Vec<u64> = values
        .iter()
        .filter_map(|x| x.radicand())
        .collect();
    radicands.sort_unstable();
    radicands.dedup();
    let rows: Vec<Vec<BigRational>> = radicands
        .iter()
        .map(|&d| {
            values
                .iter()
                .map(|x| match x.parts() {
                    Some((_, b, dd)) if dd == d => b,
                    _ => BigRational::zero(),
                })
                .collect()
        })
        .collect();
    // Rational kernel of the radical matrix.
    let kernel = rational_nullspace(&rows, h);
    let mut out = Vec::new();
    for k in kernel {
        // Integer-scale and adjust so k·v lands in Z, not just Q.
        let mut den = BigInt::one();
        for c in &k {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = k.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        // k·v is rational; scale once more by its denominator.
        let mut acc = BigRational::zero();
        for (c, x) in ints.iter().zip(values) {
            if let Some((a, _, _)) = x.parts() {
                acc += a * BigRational::from_integer(c.clone());
            }
        }
        let extra = acc.denom().clone();
        out.push(ints.into_iter().map(|c| c * &extra).collect());
    }
    out
}

/// Rational nullspace basis of a small dense matrix given by rows.
fn rational_nullspace(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone().recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..cols {
                    let sub = &m[rank][c] * &f;
                    m[i][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut vect = vec![BigRational::zero(); cols];
        vect[f] = BigRational::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            vect[pc] = -m[r][f].clone();
        }
        basis.push(vect);
    }
    basis
}

/// Exact rational basis of `V`, the common kernel of all declared relations.
pub fn tangent_space(p: &JumpProblem) -> Vec<Vec<BigRational>> {
    let rows: Vec<Vec<BigRational>> = p
        .relations
        .iter()
        .map(|k| k.iter().map(|c| BigRational::from_integer(c.clone())).collect())
        .collect();
    rational_nullspace(&rows, p.v.len())
}

/// A random rational point of `A(v)` (nonzero in every irrational coordinate)
/// with its vertex `χ = ψ(a)`. A negated seed returns the negated point, so
/// the two vertices of the symmetric pair are both reachable.
pub fn pick_vertex(p: &JumpProblem, seed: i64) -> Result<VertexChoice, KroneckerError> {
    let basis = tangent_space(p);
    if basis.is_empty() {
        return Err(KroneckerError::TrivialTangentSpace);
    }
    let negate = seed < 0;
    let seed_abs = seed.unsigned_abs().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed_abs);
    for _ in 0..1000 {
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-9..=9)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let mut a = vec![BigRational::zero(); p.v.len()];
        for (c, b) in coeffs.iter().zip(&basis) {
            for (ai, bi) in a.iter_mut().zip(b) {
                *ai += bi * BigRational::from_integer(BigInt::from(*c));
            }
        }
        if negate {
            for ai in a.iter_mut() {
                *ai = -ai.clone();
            }
        }
        // Deleted hyperplanes: a_k = 0 is forbidden at irrational v_k.
        let admissible = a
            .iter()
            .zip(&p.rational_mask)
            .all(|(ai, &is_rat)| is_rat || !ai.is_zero());
        if admissible {
            let chi = a.iter().map(psi).collect();
            return Ok(VertexChoice { a, chi });
        }
    }
    Err(KroneckerError::EmptyA)
}

/// Exact componentwise residual `max_k |{T v_k} - χ_k|`, or `None` when some
/// component cannot be evaluated.
fn exact_residual(p: &JumpProblem, t: u64, chi: &[u8]) -> Result<BigRational, KroneckerError> {
    let mut worst = BigRational::zero();
    let t_big = BigInt::from(t);
    for (vk, &c) in p.v.iter().zip(chi) {
        let scaled = vk.scale_bigint(&t_big);
        let frac = brackets(&scaled)?.frac;
        let (center, _) = frac.to_interval_parts()?;
        let diff = (center - BigRational::from_integer(BigInt::from(c))).abs();
        if diff > worst {
            worst = diff;
        }
    }
    Ok(worst)
}

/// Exact check `max_k |{T v_k} - χ_k| < ε`, avoiding rational rounding of
/// surd fractional parts.
fn residual_below(p: &JumpProblem, t: u64, chi: &[u8]) -> Result<bool, KroneckerError> {
    let t_big = BigInt::from(t);
    for (vk, &c) in p.v.iter().zip(chi) {
        let scaled = vk.scale_bigint(&t_big);
        let frac = brackets(&scaled)?.frac;
        let target = ScalarValue::from_int(i64::from(c));
        let diff = frac.sub(&target)?;
        let abs = match diff.sign()? {
            Ordering::Less => diff.neg(),
            _ => diff,
        };
        if compare(&abs, &ScalarValue::rational(p.eps.clone()))? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `m_k = ([T/(M·î_k)] + χ_k)·M`.
fn tuple_iterates(p: &JumpProblem, t: u64, chi: &[u8]) -> Result<Option<Vec<u64>>, KroneckerError> {
    let q = p.paths.len();
    let t_big = BigInt::from(t);
    let mut out = Vec::with_capacity(q);
    for k in 0..q {
        let floor = brackets(&p.v[k].scale_bigint(&t_big))?.floor;
        let m = (floor + BigInt::from(chi[k])) * BigInt::from(p.big_m);
        match m.to_u64() {
            Some(mk) if mk >= 1 => out.push(mk),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Eq.-style smallness of every unit angle at the tuple iterates:
/// `min({m_k·θ/π}, 1 - {m_k·θ/π}) < (2M+1)·ε`.
pub fn angle_smallness(p: &JumpProblem, m: &[u64]) -> Result<bool, KroneckerError> {
    let delta = BigRational::from_integer(BigInt::from(2 * p.big_m + 1)) * &p.eps;
    let delta = ScalarValue::rational(delta);
    for (d, &mk) in p.paths.iter().zip(m) {
        for w in d.unit_angle_ratios() {
            for ratio in [w.clone(), ScalarValue::one().sub(&w)?] {
                // θ/π = 2·ratio at iterate m_k.
                let x = ratio.scale_int(2).scale_bigint(&BigInt::from(mk));
                let frac = brackets(&x)?.frac;
                let dist = match compare(&frac, &ScalarValue::from_ratio(1, 2))? {
                    Ordering::Greater => ScalarValue::one().sub(&frac)?,
                    _ => frac,
                };
                if compare(&dist, &delta)? != Ordering::Less {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Scan `T = M0, 2M0, …` for up to `count` tuples satisfying the residual
/// bound, each re-verified through the iteration formulas before being
/// returned. An f64 prefilter rejects hopeless `T` cheaply; every accepted
/// tuple is confirmed in exact arithmetic.
pub fn find_tuples(
    p: &JumpProblem,
    c: &VertexChoice,
    count: usize,
    t_bound: u64,
) -> Result<Vec<JumpTuple>, KroneckerError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let v_f: Vec<f64> = p.v.iter().map(|x| x.to_f64()).collect();
    let chi_f: Vec<f64> = c.chi.iter().map(|&x| f64::from(x)).collect();
    let eps_f = p.eps.to_f64().unwrap_or(0.0);
    // |T·v| stays below ~1e9 here, so the f64 fractional parts are exact to
    // ~1.2e-7; the margin keeps the prefilter sound.
    let margin = 3e-7;
    let mut found = Vec::new();
    let mut t = p.m0;
    while t <= t_bound {
        let mut pass = true;
        for (vf, cf) in v_f.iter().zip(&chi_f) {
            let x = t as f64 * vf;
            let r = (frac_f64(x) - cf).abs();
            if r >= eps_f + margin {
                pass = false;
                break;
            }
        }
        if pass && residual_below(p, t, &c.chi)? {
            if let Some(m) = tuple_iterates(p, t, &c.chi)? {
                let mut verified = true;
                for (d, &mk) in p.paths.iter().zip(&m) {
                    let report = jump_window(d, mk, t)?;
                    if !report.all_satisfied {
                        verified = false;
                        break;
                    }
                }
                if verified && angle_smallness(p, &m)? {
                    let residual = exact_residual(p, t, &c.chi)?;
                    found.push(JumpTuple { t, m, residual });
                    if found.len() >= count {
                        return Ok(found);
                    }
                }
            }
        }
        t += p.m0;
    }
    if found.is_empty() {
        Err(KroneckerError::SearchExhausted(t_bound))
    } else {
        Ok(found)
    }
}

/// Outcome of the order-interchange experiment.
#[derive(Clone, Debug, Serialize)]
pub struct CommutationReport {
    pub found: bool,
    pub witness: Option<(VertexChoice, JumpTuple, JumpTuple)>,
    /// Set when `a_α·î_α = a_β·î_β` holds identically on `V`, the structural
    /// obstruction to interchanging the orders.
    pub forced_equality: bool,
    pub detail: String,
}

/// `m_k·î_k` as an exact scalar.
fn weighted_mean(p: &JumpProblem, m: &[u64], k: usize) -> ScalarValue {
    p.mean_indices[k].scale_bigint(&BigInt::from(m[k]))
}

/// Search for a vertex pair interchanging the order of `m_α·î_α` and
/// `m_β·î_β` between the two members of a symmetric vertex pair.
pub fn commutation_experiment(
    p: &JumpProblem,
    alpha: usize,
    beta: usize,
    t_bound: u64,
    seed: u64,
    attempts: usize,
) -> Result<CommutationReport, KroneckerError> {
    let q = p.paths.len();
    if q < 2 || alpha >= q || beta >= q || alpha == beta {
        return Err(KroneckerError::Invalid(
            "experiment needs two distinct valid path indices".into(),
        ));
    }
    // Structural diagnostic: does x_α·î_α - x_β·î_β vanish on all of V?
    let basis = tangent_space(p);
    if basis.is_empty() {
        return Err(KroneckerError::TrivialTangentSpace);
    }
    let mut forced = true;
    for b in &basis {
        let lhs = p.mean_indices[alpha].scale(&b[alpha]);
        let rhs = p.mean_indices[beta].scale(&b[beta]);
        if compare(&lhs, &rhs)? != Ordering::Equal {
            forced = false;
            break;
        }
    }
    if forced {
        return Ok(CommutationReport {
            found: false,
            witness: None,
            forced_equality: true,
            detail: "a_alpha * mean_alpha - a_beta * mean_beta = 0 for every a in V; \
                     the order of the two orbits cannot interchange"
                .into(),
        });
    }
    for attempt in 0..attempts {
        let s = (seed.wrapping_add(attempt as u64) % (i64::MAX as u64 - 1) + 1) as i64;
        let plus = pick_vertex(p, s)?;
        let minus = pick_vertex(p, -s)?;
        let tuples_plus = match find_tuples(p, &plus, 3, t_bound) {
            Ok(ts) => ts,
            Err(KroneckerError::SearchExhausted(_)) => continue,
            Err(e) => return Err(e),
        };
        let tuples_minus = match find_tuples(p, &minus, 3, t_bound) {
            Ok(ts) => ts,
            Err(KroneckerError::SearchExhausted(_)) => continue,
            Err(e) => return Err(e),
        };
        for tp in &tuples_plus {
            for tm in &tuples_minus {
                let fwd = compare(
                    &weighted_mean(p, &tp.m, alpha),
                    &weighted_mean(p, &tp.m, beta),
                )?;
                let rev = compare(
                    &weighted_mean(p, &tm.m, alpha),
                    &weighted_mean(p, &tm.m, beta),
                )?;
                let (hit, vertex, first, second) = match (fwd, rev) {
                    (Ordering::Greater, Ordering::Less) => (true, &plus, tp, tm),
                    (Ordering::Less, Ordering::Greater) => (true, &minus, tm, tp),
                    _ => (false, &plus, tp, tm),
                };
                if hit {
                    return Ok(CommutationReport {
                        found: true,
                        witness: Some((vertex.clone(), first.clone(), second.clone())),
                        forced_equality: false,
                        detail: format!(
                            "orders interchange between T = {} and T = {}",
                            first.t, second.t
                        ),
                    });
                }
            }
        }
    }
    Ok(CommutationReport {
        found: false,
        witness: None,
        forced_equality: false,
        detail: format!("no interchanging pair found under T <= {t_bound}"),
    })
}

/// Empirical distribution check for `{k·α}`: the largest deviation of the
/// hit frequency from the interval length over seeded random intervals.
pub fn equidistribution_deviation(
    alpha: &ScalarValue,
    k_max: u64,
    intervals: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let af = alpha.to_f64();
    let mut spans: Vec<(f64, f64)> = Vec::with_capacity(intervals);
    for _ in 0..intervals {
        let a: f64 = rng.gen_range(0.0..1.0);
        let b: f64 = rng.gen_range(0.0..1.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        spans.push((lo, hi));
    }
    let mut hits = vec![0u64; spans.len()];
    let mut x = 0.0f64;
    for _ in 1..=k_max {
        x += af;
        x -= x.floor();
        for (i, (lo, hi)) in spans.iter().enumerate() {
            if x >= *lo && x < *hi {
                hits[i] += 1;
            }
        }
    }
    spans
        .iter()
        .zip(&hits)
        .map(|((lo, hi), &h)| ((h as f64 / k_max as f64) - (hi - lo)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::NormalFormDecomposition;

    fn surd(a: (i64, i64), b: (i64, i64), d: u64) -> ScalarValue {
        ScalarValue::surd(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
            d,
        )
        .unwrap()
    }

    fn shear_three() -> PathIndexData {
        PathIndexData::new(
            5,
            4,
            NormalFormDecomposition {
                p_minus: 1,
                p_plus: 3,
                ..Default::default()
            },
        )
        .unwrap()
    }

    /// N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ R(θ) with irrational θ/2π.
    fn rotation_path(ratio: ScalarValue) -> PathIndexData {
        PathIndexData::new(
            4,
            4,
            NormalFormDecomposition {
                p_minus: 1,
                p_plus: 2,
                rotations: vec![ratio],
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn single_orbit_mean_six() {
        // î = 6, M = 1: v = (1/6); χ = 0 needs {T/6} < ε: T = 6 first.
        let p = build_problem(
            vec![shear_three()],
            BigRational::new(1.into(), 20.into()),
            1,
            vec![],
        )
        .unwrap();
        assert_eq!(p.big_m(), 1);
        assert_eq!(p.dimension(), 1);
        let vertex = VertexChoice {
            a: vec![BigRational::one()],
            chi: vec![0],
        };
        let tuples = find_tuples(&p, &vertex, 1, 1000).unwrap();
        assert_eq!(tuples[0].t, 6);
        assert_eq!(tuples[0].m, vec![1]);
        // i(γ, 2m+1) = 2T + i(γ,1): 3rd iterate of the 6m-1 family.
        let r = crate::iteration::iterate(&shear_three(), 3).unwrap();
        assert_eq!(r.i_m, BigInt::from(2 * 6 + 5));
    }

    #[test]
    fn dichotomy_for_one_irrational_rotation() {
        // v = (1/(Mβ), 1 - 4/β) with β = 4 + θ/π: the single relation
        // v_2 + 4M·v_1 = 1 forces χ to the two vertices (0,1) and (1,0).
        let ratio = surd((-1, 1), (1, 1), 2); // √2 - 1
        let path = rotation_path(ratio);
        let rels = derive_integer_relations(
            &build_problem(
                vec![path.clone()],
                BigRational::new(1.into(), 100.into()),
                1,
                vec![],
            )
            .unwrap()
            .v,
        );
        let p = build_problem(
            vec![path],
            BigRational::new(1.into(), 100.into()),
            1,
            rels,
        )
        .unwrap();
        assert_eq!(p.dimension(), 2);
        let basis = tangent_space(&p);
        assert_eq!(basis.len(), 1, "dim V = 1");
        let plus = pick_vertex(&p, 7).unwrap();
        let minus = pick_vertex(&p, -7).unwrap();
        assert_ne!(plus.chi, minus.chi);
        let mut chis = vec![plus.chi.clone(), minus.chi.clone()];
        chis.sort();
        assert_eq!(chis, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn rational_components_force_zero_vertex() {
        // Rational mean index: v_1 ∈ Q, relation derived automatically.
        let p = build_problem(
            vec![shear_three()],
            BigRational::new(1.into(), 20.into()),
            1,
            vec![],
        )
        .unwrap();
        assert!(matches!(
            pick_vertex(&p, 3),
            Err(KroneckerError::TrivialTangentSpace)
        ));
    }

    #[test]
    fn uniform_distribution_sanity() {
        let alpha = surd((0, 1), (1, 1), 2);
        let dev = equidistribution_deviation(&alpha, 1_000_000, 20, 42);
        assert!(dev < 0.02, "deviation {dev}");
    }

    #[test]
    fn m0_divides_t() {
        let ratio = surd((-1, 1), (1, 1), 2);
        let path = rotation_path(ratio);
        let v = build_problem(
            vec![path.clone()],
            BigRational::new(1.into(), 50.into()),
            1,
            vec![],
        )
        .unwrap()
        .v
        .clone();
        let rels = derive_integer_relations(&v);
        let p = build_problem(
            vec![path],
            BigRational::new(1.into(), 50.into()),
            3,
            rels,
        )
        .unwrap();
        let vertex = pick_vertex(&p, 5).unwrap();
        let tuples = find_tuples(&p, &vertex, 2, 2_000_000).unwrap();
        for t in &tuples {
            assert_eq!(t.t % 3, 0);
        }
    }
}
