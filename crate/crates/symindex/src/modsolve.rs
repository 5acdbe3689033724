//! Ceiling-congruence solving: find `p'` with `Σ_j E(p'·α_j) ≡ l (mod N)`
//! for `l` in a target set, by brute scan and by constructive
//! Kronecker-window strategies keyed on the declared rational dependences
//! among the `α_j`.

use crate::iteration::{iterate, IterationError, PathIndexData};
use crate::numeric::{brackets, ceil_of_sum, frac_f64, NumericError, ScalarValue};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModSolveError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error("no solution with p' <= {0}")]
    NotFound(u64),
    #[error("unsupported case: {0}")]
    CaseUnsupported(String),
    #[error("window search exhausted after n <= {bound} for window {window}")]
    WindowSearchExhausted { bound: u64, window: String },
    #[error("paths do not fit the required normal-form shapes: {0}")]
    ShapeMismatch(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// Declared rational dependence `α_target = Σ coeff_i · α_base_i + offset`.
#[derive(Clone, Debug)]
pub struct AffineRelation {
    pub target: usize,
    pub terms: Vec<(usize, BigRational)>,
    pub offset: BigRational,
}

/// `Σ_j E(p'·α_j) ≡ l (mod N)`, `l ∈ targets`.
#[derive(Clone, Debug)]
pub struct CongruenceProblem {
    pub alphas: Vec<ScalarValue>,
    pub modulus: u64,
    pub targets: BTreeSet<u64>,
    pub relations: Vec<AffineRelation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    Brute,
    Window(&'static str),
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceSolution {
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub p_prime: BigInt,
    pub l_hit: u64,
    pub strategy: Strategy,
}

fn canon_mod(l: i64, n: u64) -> u64 {
    l.rem_euclid(n as i64) as u64
}

/// Guarded stand-in value for a composite `Σ c_i·α_i + offset` spanning
/// distinct quadratic fields; the relation carries the exact arithmetic.
pub fn composite_alpha(
    bases: &[(ScalarValue, BigRational)],
    offset: &BigRational,
) -> Result<ScalarValue, ModSolveError> {
    let mut value = offset.clone();
    let mut guard = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(30));
    for (alpha, c) in bases {
        let (v, g) = alpha.scale(c).to_interval_parts()?;
        value += v;
        guard += g;
    }
    Ok(ScalarValue::approx(value, guard)?)
}

impl CongruenceProblem {
    pub fn new(
        alphas: Vec<ScalarValue>,
        modulus: u64,
        targets: impl IntoIterator<Item = i64>,
        relations: Vec<AffineRelation>,
    ) -> Result<Self, ModSolveError> {
        if modulus == 0 {
            return Err(ModSolveError::InvalidProblem("modulus must be >= 1".into()));
        }
        if !(2..=3).contains(&alphas.len()) {
            return Err(ModSolveError::InvalidProblem(
                "only two or three ceiling terms are supported".into(),
            ));
        }
        for a in &alphas {
            if a.is_zero_exact() {
                return Err(ModSolveError::InvalidProblem("alphas must be nonzero".into()));
            }
        }
        for (j, a) in alphas.iter().enumerate() {
            if !a.is_exact() && !relations.iter().any(|r| r.target == j) {
                return Err(ModSolveError::InvalidProblem(format!(
                    "alpha_{j} is approximate and no relation defines it"
                )));
            }
        }
        let targets = targets.into_iter().map(|l| canon_mod(l, modulus)).collect();
        let problem = CongruenceProblem {
            alphas,
            modulus,
            targets,
            relations,
        };
        problem.verify_relations()?;
        Ok(problem)
    }

    fn verify_relations(&self) -> Result<(), ModSolveError> {
        for rel in &self.relations {
            if rel.target >= self.alphas.len()
                || rel.terms.iter().any(|(i, _)| *i >= self.alphas.len())
            {
                return Err(ModSolveError::InvalidProblem(
                    "relation index out of range".into(),
                ));
            }
            for (i, _) in &rel.terms {
                if !self.alphas[*i].is_exact() {
                    return Err(ModSolveError::InvalidProblem(
                        "relation bases must be exact scalars".into(),
                    ));
                }
            }
            if !self.alphas[rel.target].is_exact() {
                // A relation target across distinct quadratic fields has no
                // single-radical form; its guarded value stands in for
                // display and prefilters while every bracket evaluation goes
                // through the relation.
                continue;
            }
            let mut acc = ScalarValue::rational(rel.offset.clone());
            for (i, c) in &rel.terms {
                acc = acc.add(&self.alphas[*i].scale(c)).map_err(|_| {
                    ModSolveError::InvalidProblem(
                        "exact relation target cannot span distinct quadratic fields".into(),
                    )
                })?;
            }
            let diff = self.alphas[rel.target].sub(&acc).map_err(|_| {
                ModSolveError::InvalidProblem(
                    "exact relation target cannot span distinct quadratic fields".into(),
                )
            })?;
            if !diff.is_zero_exact() {
                return Err(ModSolveError::InvalidProblem(format!(
                    "declared relation for alpha_{} does not hold",
                    rel.target
                )));
            }
        }
        Ok(())
    }

    /// Exact `E(p'·α_j)`, evaluating relation-backed composite terms through
    /// their declared relation (cross-field floors are exact).
    fn ceil_term(&self, j: usize, p_prime: &BigInt) -> Result<BigInt, ModSolveError> {
        let scale = BigRational::from_integer(p_prime.clone());
        if self.alphas[j].is_exact() {
            return Ok(brackets(&self.alphas[j].scale(&scale))?.ceil);
        }
        let rel = self
            .relations
            .iter()
            .find(|r| r.target == j)
            .ok_or_else(|| {
                ModSolveError::InvalidProblem(format!(
                    "alpha_{j} is approximate and no relation defines it"
                ))
            })?;
        let mut terms: Vec<ScalarValue> =
            vec![ScalarValue::rational(&rel.offset * &scale)];
        for (i, c) in &rel.terms {
            terms.push(self.alphas[*i].scale(&(c * &scale)));
        }
        Ok(ceil_of_sum(&terms)?)
    }

    /// `Σ_j E(p'·α_j) mod N`, exact.
    pub fn residue(&self, p_prime: &BigInt) -> Result<u64, ModSolveError> {
        let n = BigInt::from(self.modulus);
        let r = self.ceiling_sum(p_prime)?.mod_floor(&n);
        Ok(r.to_u64().expect("residue fits"))
    }

    /// Exact ceiling sum `Σ_j E(p'·α_j)`.
    pub fn ceiling_sum(&self, p_prime: &BigInt) -> Result<BigInt, ModSolveError> {
        let mut total = BigInt::zero();
        for j in 0..self.alphas.len() {
            total += self.ceil_term(j, p_prime)?;
        }
        Ok(total)
    }

    pub fn verify(&self, sol: &CongruenceSolution) -> Result<bool, ModSolveError> {
        let r = self.residue(&sol.p_prime)?;
        Ok(r == sol.l_hit && self.targets.contains(&r))
    }
}

/// Minimal `p' <= bound` hitting any target, by exhaustive scan with an f64
/// prefilter and exact confirmation.
pub fn solve_brute(p: &CongruenceProblem, bound: u64) -> Result<CongruenceSolution, ModSolveError> {
    let n = p.modulus;
    let alphas_f: Vec<f64> = p.alphas.iter().map(|a| a.to_f64()).collect();
    for pp in 1..=bound {
        // f64 ceiling sum; products stay far below 2^53 for supported
        // parameter sizes, so only near-integer points need exact help.
        let mut sum = 0i64;
        let mut uncertain = false;
        for &af in &alphas_f {
            let x = pp as f64 * af;
            if (x - x.round()).abs() < 1e-6 * x.abs().max(1.0) {
                uncertain = true;
                break;
            }
            sum += x.ceil() as i64;
        }
        let candidate = uncertain || p.targets.contains(&canon_mod(sum, n));
        if candidate {
            let exact = p.residue(&BigInt::from(pp))?;
            if p.targets.contains(&exact) {
                return Ok(CongruenceSolution {
                    p_prime: BigInt::from(pp),
                    l_hit: exact,
                    strategy: Strategy::Brute,
                });
            }
        }
    }
    Err(ModSolveError::NotFound(bound))
}

// --- window machinery --------------------------------------------------------

/// Open interval over the `(-1, 1)` representative of a fractional part.
#[derive(Clone, Debug)]
struct Window {
    lo: BigRational,
    hi: BigRational,
}

fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Window {
    fn new(lo: BigRational, hi: BigRational) -> Self {
        Window { lo, hi }
    }

    fn describe(&self) -> String {
        format!("({}, {})", self.lo, self.hi)
    }

    /// Representative of `{x}` in `(-1,1)` lying in the window, if any.
    fn member(&self, frac: &ScalarValue) -> Result<Option<ScalarValue>, NumericError> {
        for cand in [frac.clone(), frac.sub(&ScalarValue::one())?] {
            let lo = crate::numeric::compare(&cand, &ScalarValue::rational(self.lo.clone()))?;
            let hi = crate::numeric::compare(&cand, &ScalarValue::rational(self.hi.clone()))?;
            if lo == std::cmp::Ordering::Greater && hi == std::cmp::Ordering::Less {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    fn member_f64(&self, frac: f64, slack: f64) -> bool {
        let lo = rational_f64(&self.lo);
        let hi = rational_f64(&self.hi);
        [frac, frac - 1.0]
            .iter()
            .any(|&x| x > lo - slack && x < hi + slack)
    }
}

const WINDOW_SCAN_BOUND: u64 = 20_000_000;

/// Scan `n = 1, 2, ...` for `{n·base}` in `window` (as a `(-1,1)`
/// representative), returning `(n, representative)`.
fn kronecker_scan(
    base: &ScalarValue,
    window: &Window,
) -> Result<(u64, ScalarValue), ModSolveError> {
    let base_f = base.to_f64();
    for n in 1..=WINDOW_SCAN_BOUND {
        let xf = frac_f64(n as f64 * base_f);
        let slack = 1e-7 * (n as f64).max(1.0).sqrt();
        if window.member_f64(xf, slack) {
            let scaled = base.scale(&BigRational::from_integer(BigInt::from(n)));
            let frac = brackets(&scaled)?.frac;
            if let Some(rep) = window.member(&frac)? {
                return Ok((n, rep));
            }
        }
    }
    Err(ModSolveError::WindowSearchExhausted {
        bound: WINDOW_SCAN_BOUND,
        window: window.describe(),
    })
}

/// Two-component scan: `{n·base1} ∈ w1` and `{n·base2}` in a window that may
/// depend on the achieved first representative.
fn kronecker_scan2(
    base1: &ScalarValue,
    base2: &ScalarValue,
    w1: &Window,
    w2_of: impl Fn(&ScalarValue) -> Result<Window, ModSolveError>,
) -> Result<(u64, ScalarValue, ScalarValue), ModSolveError> {
    let b1f = base1.to_f64();
    let b2f = base2.to_f64();
    for n in 1..=WINDOW_SCAN_BOUND {
        let slack = 1e-7 * (n as f64).max(1.0).sqrt();
        let x1 = frac_f64(n as f64 * b1f);
        if !w1.member_f64(x1, slack) {
            continue;
        }
        let s1 = base1.scale(&BigRational::from_integer(BigInt::from(n)));
        let f1 = brackets(&s1)?.frac;
        let Some(rep1) = w1.member(&f1)? else { continue };
        let w2 = w2_of(&rep1)?;
        let x2 = frac_f64(n as f64 * b2f);
        if !w2.member_f64(x2, slack) {
            continue;
        }
        let s2 = base2.scale(&BigRational::from_integer(BigInt::from(n)));
        let f2 = brackets(&s2)?.frac;
        if let Some(rep2) = w2.member(&f2)? {
            return Ok((n, rep1, rep2));
        }
    }
    Err(ModSolveError::WindowSearchExhausted {
        bound: WINDOW_SCAN_BOUND,
        window: w1.describe(),
    })
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Normalized single-base relation `alpha[target] = coeff·alpha[base] + offset`.
struct SingleBase {
    target: usize,
    base: usize,
    coeff: BigRational,
    offset: BigRational,
}

fn normalize_single(rel: &AffineRelation) -> Result<SingleBase, ModSolveError> {
    let nonzero: Vec<_> = rel.terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    if nonzero.len() != 1 {
        return Err(ModSolveError::CaseUnsupported(
            "expected a single-base relation".into(),
        ));
    }
    Ok(SingleBase {
        target: rel.target,
        base: nonzero[0].0,
        coeff: nonzero[0].1.clone(),
        offset: rel.offset.clone(),
    })
}

/// Constructive solution by the sub-case strategy matching the declared
/// dependence structure. The returned solution always re-verifies exactly.
pub fn solve_window(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let sol = match (p.alphas.len(), p.relations.len()) {
        (2, 0) => window_pair_independent(p)?,
        (2, 1) => window_pair_dependent(p)?,
        (3, 0) => window_triple_independent(p)?,
        (3, 1) => window_triple_rank3(p)?,
        (3, 2) => window_triple_rank2(p)?,
        (j, r) => {
            return Err(ModSolveError::CaseUnsupported(format!(
                "no strategy for J = {j} with {r} relations"
            )))
        }
    };
    if !p.targets.contains(&sol.l_hit) {
        return Err(ModSolveError::CaseUnsupported(format!(
            "constructive class {} is not among the targets",
            sol.l_hit
        )));
    }
    let exact = p.residue(&sol.p_prime)?;
    if exact != sol.l_hit {
        return Err(ModSolveError::InvalidProblem(format!(
            "window construction produced residue {exact}, expected {}",
            sol.l_hit
        )));
    }
    Ok(sol)
}

/// Independent pair: pick `{nα₁/N} ∈ (0, 1/N)` and `{nα₂/N} ∈ (1-1/N, 1)`,
/// landing on `E(Nε) + E(-Nε') = 1`.
fn window_pair_independent(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let n_mod = p.modulus as i64;
    let inv_n = rational(1, n_mod);
    let b1 = p.alphas[0].scale(&inv_n);
    let b2 = p.alphas[1].scale(&inv_n);
    let w1 = Window::new(big(0), inv_n.clone());
    let w2 = Window::new(-inv_n.clone(), big(0));
    let (n, _, _) = kronecker_scan2(&b1, &b2, &w1, |_| Ok(w2.clone()))?;
    Ok(CongruenceSolution {
        p_prime: BigInt::from(n),
        l_hit: canon_mod(1, p.modulus),
        strategy: Strategy::Window("1.1"),
    })
}

/// Dependent pair `α_t = (r2/s2)·α_b + r3/s3`: scan `{n·s3·α_b}` into the
/// sub-case window, then `p' = n·s2·s3·N`.
fn window_pair_dependent(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let mut rel = normalize_single(&p.relations[0])?;
    if rel.coeff.is_positive() && rel.coeff < BigRational::one() {
        // Swap roles so the slope is >= 1: α_b = (s2/r2)α_t - r3·s2/(s3·r2).
        let coeff = rel.coeff.recip();
        let offset = -&rel.offset * &coeff;
        rel = SingleBase {
            target: rel.base,
            base: rel.target,
            coeff,
            offset,
        };
    }
    let r2 = rel.coeff.numer().clone();
    let s2 = rel.coeff.denom().clone();
    let s3 = rel.offset.denom().clone();
    let n_mod = BigInt::from(p.modulus);
    let alpha_base = &p.alphas[rel.base];

    let s2n = BigRational::from_integer(&s2 * &n_mod);
    let r2n = BigRational::from_integer(&r2 * &n_mod);
    let one = BigRational::one();

    let (label, window, l_expect): (&'static str, Window, i64) = if rel.coeff.is_negative() {
        // (i): ε ∈ (0, min(1/(s2·N), -1/(r2·N))): E(s2Nε) + E(r2Nε) = 1 + 0.
        let hi = (&one / &s2n).min(-(&one / &r2n));
        ("1.2(i)", Window::new(big(0), hi), 1)
    } else if rel.coeff == BigRational::one() {
        // (ii-a): ε ∈ (1/(s2·N), 2/(s2·N)): 2·E(s2Nε) = 4.
        ("1.2(ii-a)", Window::new(&one / &s2n, big(2) / &s2n), 4)
    } else {
        // (ii-b): slope > 1: ε ∈ (max(-1/(s2N), -2/(r2N)), -1/(r2N)):
        // E(s2Nε) + E(r2Nε) = 0 + (-1).
        let lo = (-(&one / &s2n)).max(big(-2) / &r2n);
        ("1.2(ii-b)", Window::new(lo, -(&one / &r2n)), -1)
    };
    let base = alpha_base.scale(&BigRational::from_integer(s3.clone()));
    let (n, _) = kronecker_scan(&base, &window)?;
    let p_prime = BigInt::from(n) * &s2 * &s3 * &n_mod;
    Ok(CongruenceSolution {
        p_prime,
        l_hit: canon_mod(l_expect, p.modulus),
        strategy: Strategy::Window(label),
    })
}

/// Independent triple: all `{nα_j/N}` into `(1 - 1/N, 1)`, giving `l = 0`.
fn window_triple_independent(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let n_mod = p.modulus as i64;
    let inv_n = rational(1, n_mod);
    let w = Window::new(-inv_n.clone(), big(0));
    let b: Vec<ScalarValue> = p.alphas.iter().map(|a| a.scale(&inv_n)).collect();
    let bf: Vec<f64> = b.iter().map(|x| x.to_f64()).collect();
    for n in 1..=WINDOW_SCAN_BOUND {
        let slack = 1e-7 * (n as f64).max(1.0).sqrt();
        if !bf
            .iter()
            .all(|&x| w.member_f64(frac_f64(n as f64 * x), slack))
        {
            continue;
        }
        let mut all = true;
        for bj in &b {
            let frac = brackets(&bj.scale(&BigRational::from_integer(BigInt::from(n))))?.frac;
            if w.member(&frac)?.is_none() {
                all = false;
                break;
            }
        }
        if all {
            return Ok(CongruenceSolution {
                p_prime: BigInt::from(n),
                l_hit: 0,
                strategy: Strategy::Window("2.1"),
            });
        }
    }
    Err(ModSolveError::WindowSearchExhausted {
        bound: WINDOW_SCAN_BOUND,
        window: w.describe(),
    })
}

/// Rank-3 triple: `α_t = (r1/s1)α_a + (r2/s2)α_b + r3/s3` with the base pair
/// independent; `p' = n·s1·s2·s3·N`.
fn window_triple_rank3(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let rel = &p.relations[0];
    let nonzero: Vec<_> = rel.terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    if nonzero.is_empty() || nonzero.len() > 2 {
        return Err(ModSolveError::CaseUnsupported(
            "rank-3 strategy needs a relation over the other two terms".into(),
        ));
    }
    let (base_a, c1) = (nonzero[0].0, nonzero[0].1.clone());
    let (base_b, c2) = if nonzero.len() == 2 {
        (nonzero[1].0, nonzero[1].1.clone())
    } else {
        let unused = (0..3)
            .find(|i| *i != rel.target && *i != nonzero[0].0)
            .expect("three alphas");
        (unused, BigRational::zero())
    };
    let r1 = c1.numer().clone();
    let s1 = c1.denom().clone();
    let r2 = c2.numer().clone();
    let s2 = c2.denom().clone();
    let s3 = rel.offset.denom().clone();
    let n_mod = BigInt::from(p.modulus);
    let one = BigRational::one();
    let s1s2n = BigRational::from_integer(&s1 * &s2 * &n_mod);

    let b1 = p.alphas[base_a].scale(&BigRational::from_integer(s3.clone()));
    let b2 = p.alphas[base_b].scale(&BigRational::from_integer(s3.clone()));

    let combo = &r1 * &s2 + &r2 * &s1;
    type WindowFn = Box<dyn Fn(&ScalarValue) -> Result<Window, ModSolveError>>;
    let (label, l_expect, w1, w2_of, swap): (&'static str, i64, Window, WindowFn, bool) =
        if !c1.is_negative() && !c2.is_negative() {
            // (i): both slopes >= 0, sum > 0: small negative ε's: 0 + 0 + 0.
            let lo = (-(&one / &s1s2n)).max(-(&one / BigRational::from_integer(&combo * &n_mod)));
            let w = Window::new(lo, big(0));
            let w2 = w.clone();
            (
                "2.2(i)",
                0,
                w,
                Box::new(move |_: &ScalarValue| Ok(w2.clone())) as WindowFn,
                false,
            )
        } else if !c1.is_positive() && !c2.is_positive() {
            // (ii): both slopes <= 0, sum < 0: small positive ε's: 1 + 1 + 0.
            let hi = (&one / &s1s2n).min(-(&one / BigRational::from_integer(&combo * &n_mod)));
            let w = Window::new(big(0), hi);
            let w2 = w.clone();
            (
                "2.2(ii)",
                2,
                w,
                Box::new(move |_: &ScalarValue| Ok(w2.clone())) as WindowFn,
                false,
            )
        } else {
            // (iii)/(iv): mixed signs. Stage ε₁ > 0 tiny, then pick ε₂ > 0
            // with (r⁺/s⁺)ε₁ + (r⁻/s⁻)ε₂ ∈ (-1/(s1·s2·N), 0):
            // E(s1s2Nε₁) = E(s1s2Nε₂) = 1 and the combined term ceils to 0.
            let swap = !c1.is_positive();
            let (ra, sa, rb, sb) = if swap {
                (r2.clone(), s2.clone(), r1.clone(), s1.clone())
            } else {
                (r1.clone(), s1.clone(), r2.clone(), s2.clone())
            };
            let cap = BigRational::new(-&rb, BigInt::from(2) * &ra * &sb * &sb * &n_mod);
            let hi1 = cap.min(&one / &s1s2n);
            let w1 = Window::new(big(0), hi1);
            let s1s2n_c = s1s2n.clone();
            let n_mod_c = n_mod.clone();
            let label = if swap { "2.2(iv)" } else { "2.2(iii)" };
            let w2_of: WindowFn = Box::new(move |eps1: &ScalarValue| {
                let (e1, _) = eps1.to_interval_parts().map_err(ModSolveError::Numeric)?;
                let slope = BigRational::new(-(&sb * &ra), &sa * &rb);
                let lo = &slope * &e1;
                let hi = (&one / &s1s2n_c)
                    .min(-(&one / BigRational::from_integer(&sa * &rb * &n_mod_c)) + &lo);
                Ok(Window::new(lo, hi))
            });
            (label, 2, w1, w2_of, swap)
        };
    let (first, second) = if swap { (&b2, &b1) } else { (&b1, &b2) };
    let (n, _, _) = kronecker_scan2(first, second, &w1, w2_of)?;
    let p_prime = BigInt::from(n) * &s1 * &s2 * &s3 * &n_mod;
    Ok(CongruenceSolution {
        p_prime,
        l_hit: canon_mod(l_expect, p.modulus),
        strategy: Strategy::Window(label),
    })
}

/// Rank-2 triple: `α₂ = (r1/s1)α₁ + r2/s2` and `α₃ = (r3/s3)α₁ + r4/s4`;
/// `p' = n·s1·s2·s3·s4·N`.
fn window_triple_rank2(p: &CongruenceProblem) -> Result<CongruenceSolution, ModSolveError> {
    let mut rels: Vec<SingleBase> = p
        .relations
        .iter()
        .map(normalize_single)
        .collect::<Result<_, _>>()?;
    if rels[0].base != rels[1].base {
        // Chain substitution, e.g. α₃ = c'·α₂ + o' with α₂ = c·α₁ + o.
        let (i, j) = if rels[1].base == rels[0].target {
            (0, 1)
        } else if rels[0].base == rels[1].target {
            (1, 0)
        } else {
            return Err(ModSolveError::CaseUnsupported(
                "relations do not share a base".into(),
            ));
        };
        let coeff = &rels[j].coeff * &rels[i].coeff;
        let offset = &rels[j].coeff * &rels[i].offset + &rels[j].offset;
        rels[j] = SingleBase {
            target: rels[j].target,
            base: rels[i].base,
            coeff,
            offset,
        };
    }
    let (first, second) = (&rels[0], &rels[1]);
    if first.coeff.is_zero() || second.coeff.is_zero() {
        return Err(ModSolveError::CaseUnsupported(
            "rank-2 strategy needs nonzero slopes".into(),
        ));
    }
    let r1 = first.coeff.numer().clone();
    let s1 = first.coeff.denom().clone();
    let s2 = first.offset.denom().clone();
    let r3 = second.coeff.numer().clone();
    let s3 = second.coeff.denom().clone();
    let s4 = second.offset.denom().clone();
    let n_mod = BigInt::from(p.modulus);
    let one = BigRational::one();

    let s1s3n = BigRational::from_integer(&s1 * &s3 * &n_mod);
    let r1s3n = BigRational::from_integer(&r1 * &s3 * &n_mod);
    let s1r3n = BigRational::from_integer(&s1 * &r3 * &n_mod);

    let (label, l_expect, window): (&'static str, i64, Window) =
        if r1.is_positive() && r3.is_positive() {
            // (i): ε slightly negative: 0 + 0 + 0.
            let lo = (-(&one / &r1s3n))
                .max(-(&one / &s1r3n))
                .max(-(&one / &s1s3n));
            ("2.3(i)", 0, Window::new(lo, big(0)))
        } else if r1.is_negative() && r3.is_negative() {
            // (ii): ε slightly negative: 0 + 1 + 1.
            let lo = (&one / &r1s3n).max(&one / &s1r3n).max(-(&one / &s1s3n));
            ("2.3(ii)", 2, Window::new(lo, big(0)))
        } else if r1.is_positive() {
            // (iii): r1 > 0, r3 < 0: ε slightly positive: 1 + 1 + 0.
            let hi = (&one / &r1s3n).min(-(&one / &s1r3n)).min(&one / &s1s3n);
            ("2.3(iii)", 2, Window::new(big(0), hi))
        } else {
            // (iv): r1 < 0, r3 > 0: ε slightly positive: 1 + 0 + 1.
            let hi = (-(&one / &r1s3n)).min(&one / &s1r3n).min(&one / &s1s3n);
            ("2.3(iv)", 2, Window::new(big(0), hi))
        };
    let base = p.alphas[first.base].scale(&BigRational::from_integer(&s2 * &s4));
    let (n, _) = kronecker_scan(&base, &window)?;
    let p_prime = BigInt::from(n) * &s1 * &s2 * &s3 * &s4 * &n_mod;
    Ok(CongruenceSolution {
        p_prime,
        l_hit: canon_mod(l_expect, p.modulus),
        strategy: Strategy::Window(label),
    })
}

// --- instance construction from path data -------------------------------------

/// Which degenerate-family case a path pair falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InstanceCase {
    /// Two irrational rotations plus a rational elliptic block.
    RationalThird,
    /// Three irrational rotations.
    AllIrrational,
    /// Two irrational rotations plus `N1(-1,1)`.
    NegativeShear,
}

/// Back-substitution data for turning a congruence solution into iterates of
/// both orbits sharing one critical degree.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma56Map {
    pub case: InstanceCase,
    /// `2s + r` of the first path's rational rotation `θ/2π = r/s`.
    pub two_s_plus_r: i64,
    pub s: i64,
    pub r: i64,
    /// `(r1, s1)` of the second path's rational angle (`(0, 1)` when absent).
    pub r1: i64,
    pub s1: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma56Witness {
    /// Iterate of the second orbit.
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub orbit2_iterate: BigInt,
    /// Iterate of the first orbit.
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub orbit1_iterate: BigInt,
    /// The shared even degree `2K`.
    #[serde(serialize_with = "crate::numeric::serialize_bigint")]
    pub degree: BigInt,
    pub l: i64,
}

fn rational_ratio(ratio: &ScalarValue) -> Option<(i64, i64)> {
    let r = ratio.as_rational()?;
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Build the congruence problem tying a rational-rotation path to a partner
/// path of one of the admissible shapes, together with its back-substitution
/// map.
pub fn lemma56_instance(
    path1: &PathIndexData,
    path2: &PathIndexData,
) -> Result<(CongruenceProblem, Lemma56Map), ModSolveError> {
    let d1 = path1.decomposition();
    let shape1_ok = path1.n() == 4
        && path1.i1() == 4
        && d1.p_minus == 1
        && d1.p_plus == 2
        && d1.p_zero + d1.q_minus + d1.q_zero + d1.q_plus == 0
        && d1.rotations.len() == 1
        && d1.nontrivial_n2.is_empty()
        && d1.trivial_n2.is_empty()
        && d1.off_circle_dim == 0;
    if !shape1_ok {
        return Err(ModSolveError::ShapeMismatch(
            "first path must be N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ R(θ) with i(γ,1) = 4".into(),
        ));
    }
    let (r, s) = rational_ratio(&d1.rotations[0]).ok_or_else(|| {
        ModSolveError::ShapeMismatch("first path's rotation ratio must be rational".into())
    })?;
    let two_s_plus_r = 2 * s + r;

    let d2 = path2.decomposition();
    if path2.n() != 4 || d2.p_minus != 1 || d2.off_circle_dim != 0 {
        return Err(ModSolveError::ShapeMismatch(
            "second path must start with one N1(1,1) factor and be elliptic".into(),
        ));
    }
    // The shear third block would force an odd initial index, incompatible
    // with i(y,1) = 4.
    if d2.p_plus == 1 && d2.rotations.len() == 2 {
        return Err(ModSolveError::ShapeMismatch(
            "third block N1(1,-1) forces i(y_2, 1) ∈ 2ℕ-1, contradicting i(y_2, 1) = 4".into(),
        ));
    }
    if path2.i1() != 4 {
        return Err(ModSolveError::ShapeMismatch(format!(
            "second path must have i(γ,1) = 4, got {}",
            path2.i1()
        )));
    }
    let irrational: Vec<ScalarValue> = d2
        .rotations
        .iter()
        .filter(|w| w.as_rational().is_none())
        .cloned()
        .collect();
    let rational_rot: Vec<ScalarValue> = d2
        .rotations
        .iter()
        .filter(|w| w.as_rational().is_some())
        .cloned()
        .collect();
    if !d2.nontrivial_n2.is_empty() || !d2.trivial_n2.is_empty() {
        return Err(ModSolveError::ShapeMismatch(
            "second path may not carry N2 blocks".into(),
        ));
    }
    let signature = (
        d2.p_zero,
        d2.q_minus,
        d2.q_zero,
        d2.p_plus,
        irrational.len(),
        rational_rot.len(),
    );
    let (case, r1, s1) = match signature {
        // Third elliptic block I₂ ≅ R(2π): ratio 1/1.
        (1, 0, 0, 0, 2, 0) => (InstanceCase::RationalThird, 1i64, 1i64),
        // -I₂ ≅ R(π): ratio 1/2.
        (0, 0, 1, 0, 2, 0) => (InstanceCase::RationalThird, 1, 2),
        // Genuine rational third rotation.
        (0, 0, 0, 0, 2, 1) => {
            let (rr, ss) = rational_ratio(&rational_rot[0]).expect("filtered rational");
            (InstanceCase::RationalThird, rr, ss)
        }
        // Three irrational rotations.
        (0, 0, 0, 0, 3, 0) => (InstanceCase::AllIrrational, 0, 1),
        // N1(-1, 1) third block.
        (0, 1, 0, 0, 2, 0) => (InstanceCase::NegativeShear, 0, 1),
        _ => {
            return Err(ModSolveError::ShapeMismatch(
                "second path's block content matches no admissible case".into(),
            ))
        }
    };

    let (alphas, modulus, targets): (Vec<ScalarValue>, i64, Vec<i64>) = match case {
        InstanceCase::RationalThird => {
            let mult = two_s_plus_r * s1;
            let alphas = irrational.iter().map(|w| w.scale_int(mult)).collect();
            (alphas, (s1 + r1) * two_s_plus_r, vec![-1, 1, 4])
        }
        InstanceCase::AllIrrational => {
            let alphas = irrational
                .iter()
                .map(|w| w.scale_int(two_s_plus_r))
                .collect();
            (alphas, two_s_plus_r, vec![0, 2, 5])
        }
        InstanceCase::NegativeShear => {
            let alphas = irrational
                .iter()
                .map(|w| w.scale_int(2 * two_s_plus_r))
                .collect();
            (alphas, 3 * two_s_plus_r, vec![-1, 1, 4])
        }
    };
    if modulus < 2 {
        return Err(ModSolveError::ShapeMismatch(
            "derived modulus is degenerate".into(),
        ));
    }
    let relations = derive_affine_relations(&alphas);
    let problem = CongruenceProblem::new(alphas, modulus as u64, targets, relations)?;
    Ok((
        problem,
        Lemma56Map {
            case,
            two_s_plus_r,
            s,
            r,
            r1,
            s1,
        },
    ))
}

/// Exact affine dependences over Q among exact scalars, as single-base
/// relations `α_t = c·α_b + o` against the lowest usable base index.
pub fn derive_affine_relations(alphas: &[ScalarValue]) -> Vec<AffineRelation> {
    let mut out = Vec::new();
    'outer: for t in 1..alphas.len() {
        let (at, bt, dt) = match alphas[t].parts() {
            Some(p) => p,
            None => continue,
        };
        if bt.is_zero() {
            continue;
        }
        for b in 0..t {
            let (ab, bb, db) = match alphas[b].parts() {
                Some(p) => p,
                None => continue,
            };
            if dt != db || bb.is_zero() {
                continue;
            }
            // α_t = (bt/bb)·α_b + (at - ab·bt/bb).
            let coeff = &bt / &bb;
            let offset = &at - &ab * &coeff;
            out.push(AffineRelation {
                target: t,
                terms: vec![(b, coeff)],
                offset,
            });
            continue 'outer;
        }
    }
    out
}

impl Lemma56Map {
    /// Turn a congruence solution into iterates of both orbits meeting at the
    /// same even degree, verified through the iteration formulas.
    pub fn witness(
        &self,
        problem: &CongruenceProblem,
        sol: &CongruenceSolution,
        path1: &PathIndexData,
        path2: &PathIndexData,
    ) -> Result<Lemma56Witness, ModSolveError> {
        let n_mod = BigInt::from(problem.modulus);
        let sigma = problem.ceiling_sum(&sol.p_prime)?;
        let l_prime = BigInt::from(sol.l_hit);
        if !((&sigma - &l_prime).mod_floor(&n_mod)).is_zero() {
            return Err(ModSolveError::InvalidProblem(
                "solution does not satisfy its own congruence".into(),
            ));
        }
        let q_raw = &sol.p_prime + (&sigma - &l_prime) / &n_mod;
        let (l, orbit2_iterate, q) = match self.case {
            InstanceCase::RationalThird => {
                let l = sol.l_hit as i64 - 3;
                let p = BigInt::from(self.two_s_plus_r) * &sol.p_prime;
                let k = &p * BigInt::from(self.s1);
                let q = &q_raw * BigInt::from(self.s1 + self.r1);
                (l, k, q)
            }
            InstanceCase::AllIrrational => {
                let l = sol.l_hit as i64 - 4;
                let k = BigInt::from(self.two_s_plus_r) * &sol.p_prime;
                (l, k, q_raw.clone())
            }
            InstanceCase::NegativeShear => {
                let l = sol.l_hit as i64 - 3;
                let k = BigInt::from(2) * BigInt::from(self.two_s_plus_r) * &sol.p_prime;
                let q = BigInt::from(3) * &q_raw;
                (l, k, q)
            }
        };
        let delta = match l {
            -4 => -1i64,
            -2 => 0,
            1 => 1,
            other => {
                return Err(ModSolveError::InvalidProblem(format!(
                    "target class maps to unexpected offset l = {other}"
                )))
            }
        };
        let m1 = &q * BigInt::from(self.s) + BigInt::from(delta);
        let degree = BigInt::from(2) * &q * BigInt::from(self.two_s_plus_r)
            + BigInt::from(2) * BigInt::from(l);

        let k_u64 = orbit2_iterate
            .to_u64()
            .ok_or_else(|| ModSolveError::InvalidProblem("iterate overflow".into()))?;
        let orbit2 = iterate(path2, k_u64)?;
        if orbit2.band_top() != degree {
            return Err(ModSolveError::InvalidProblem(format!(
                "second orbit band top {} does not meet degree {degree}",
                orbit2.band_top()
            )));
        }
        let m_u64 = m1
            .to_u64()
            .ok_or_else(|| ModSolveError::InvalidProblem("iterate overflow".into()))?;
        let orbit1 = iterate(path1, m_u64)?;
        let orbit1_degree = if delta == 0 {
            orbit1.band_top() - BigInt::from(2)
        } else {
            orbit1.band_top()
        };
        if orbit1_degree != degree {
            return Err(ModSolveError::InvalidProblem(format!(
                "first orbit degree {orbit1_degree} does not meet degree {degree}"
            )));
        }
        Ok(Lemma56Witness {
            orbit2_iterate,
            orbit1_iterate: m1,
            degree,
            l,
        })
    }
}
