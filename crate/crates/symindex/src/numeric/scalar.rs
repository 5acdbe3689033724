//! Exact scalar tower: rationals, quadratic surds `a + b√d`, and guarded
//! high-precision approximations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use super::NumericError;

/// A real scalar that every integrality decision in the toolkit can trust.
///
/// `Rational` and `Surd` are exact. `Approx` carries a guard band: any
/// floor/ceiling or ordering query that the band cannot decide is rejected
/// instead of silently rounded.
#[derive(Clone, Debug)]
pub enum ScalarValue {
    Rational(BigRational),
    /// `a + b√d` with `b ≠ 0` and `d` square-free, `d > 1`. Provably irrational.
    Surd {
        a: BigRational,
        b: BigRational,
        d: u64,
    },
    /// A high-precision approximation `value` with `|true - value| <= guard`.
    Approx {
        value: BigRational,
        guard: BigRational,
    },
}

/// Largest factor `f` with `f*f | n`, returned as `(f, n / f^2)`.
fn extract_square(n: u64) -> (u64, u64) {
    let mut f = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            f *= p;
            rest /= p * p;
        }
        p += 1;
    }
    (f, rest)
}

impl ScalarValue {
    pub fn zero() -> Self {
        ScalarValue::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ScalarValue::Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        ScalarValue::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ScalarValue::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(r: BigRational) -> Self {
        ScalarValue::Rational(r)
    }

    /// Build `a + b√d`, normalizing square factors of `d` into `b` and
    /// collapsing to a rational when `b = 0` or `d` reduces to 1.
    pub fn surd(a: BigRational, b: BigRational, d: u64) -> Result<Self, NumericError> {
        if d == 0 {
            return Err(NumericError::InvalidSurd("radicand must be positive".into()));
        }
        let (f, rest) = extract_square(d);
        let b = b * BigRational::from_integer(BigInt::from(f));
        if rest <= 1 || b.is_zero() {
            // √1 = 1 and b = 0 both degenerate to a rational value.
            let a = if rest == 1 { a + &b } else { a };
            return Ok(ScalarValue::Rational(a));
        }
        Ok(ScalarValue::Surd { a, b, d: rest })
    }

    pub fn sqrt_of(d: u64) -> Result<Self, NumericError> {
        Self::surd(BigRational::zero(), BigRational::one(), d)
    }

    pub fn approx(value: BigRational, guard: BigRational) -> Result<Self, NumericError> {
        if !guard.is_positive() {
            return Err(NumericError::InvalidGuard);
        }
        Ok(ScalarValue::Approx { value, guard })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ScalarValue::Approx { .. })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ScalarValue::Rational(_))
    }

    /// Exact rational value, if this scalar is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ScalarValue::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, ScalarValue::Rational(r) if r.is_zero())
    }

    /// Radicand when this value is a surd.
    pub fn radicand(&self) -> Option<u64> {
        match self {
            ScalarValue::Surd { d, .. } => Some(*d),
            _ => None,
        }
    }

    /// Decompose into `(rational part, coefficient of √d, d)`; rationals give
    /// `b = 0` with `d = 0`.
    pub fn parts(&self) -> Option<(BigRational, BigRational, u64)> {
        match self {
            ScalarValue::Rational(r) => Some((r.clone(), BigRational::zero(), 0)),
            ScalarValue::Surd { a, b, d } => Some((a.clone(), b.clone(), *d)),
            ScalarValue::Approx { .. } => None,
        }
    }

    pub fn neg(&self) -> ScalarValue {
        match self {
            ScalarValue::Rational(r) => ScalarValue::Rational(-r),
            ScalarValue::Surd { a, b, d } => ScalarValue::Surd {
                a: -a,
                b: -b,
                d: *d,
            },
            ScalarValue::Approx { value, guard } => ScalarValue::Approx {
                value: -value,
                guard: guard.clone(),
            },
        }
    }

    pub fn add(&self, other: &ScalarValue) -> Result<ScalarValue, NumericError> {
        use ScalarValue::*;
        Ok(match (self, other) {
            (Rational(x), Rational(y)) => Rational(x + y),
            (Rational(x), Surd { a, b, d }) | (Surd { a, b, d }, Rational(x)) => {
                ScalarValue::surd(a + x, b.clone(), *d)?
            }
            (Surd { a, b, d }, Surd { a: a2, b: b2, d: d2 }) => {
                if d != d2 {
                    return Err(NumericError::MixedRadicals { left: *d, right: *d2 });
                }
                ScalarValue::surd(a + a2, b + b2, *d)?
            }
            (Approx { value, guard }, other) | (other, Approx { value, guard }) => {
                let (v2, g2) = other.to_interval_parts()?;
                ScalarValue::Approx {
                    value: value + v2,
                    guard: guard + g2,
                }
            }
        })
    }

    pub fn sub(&self, other: &ScalarValue) -> Result<ScalarValue, NumericError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> ScalarValue {
        match self {
            ScalarValue::Rational(r) => ScalarValue::Rational(r * c),
            ScalarValue::Surd { a, b, d } => {
                if c.is_zero() {
                    ScalarValue::zero()
                } else {
                    ScalarValue::Surd {
                        a: a * c,
                        b: b * c,
                        d: *d,
                    }
                }
            }
            ScalarValue::Approx { value, guard } => ScalarValue::Approx {
                value: value * c,
                guard: guard * c.abs(),
            },
        }
    }

    pub fn scale_int(&self, c: i64) -> ScalarValue {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn scale_bigint(&self, c: &BigInt) -> ScalarValue {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    pub fn mul(&self, other: &ScalarValue) -> Result<ScalarValue, NumericError> {
        use ScalarValue::*;
        Ok(match (self, other) {
            (Rational(x), _) => other.scale(x),
            (_, Rational(y)) => self.scale(y),
            (Surd { a, b, d }, Surd { a: a2, b: b2, d: d2 }) => {
                if d != d2 {
                    return Err(NumericError::MixedRadicals { left: *d, right: *d2 });
                }
                let di = BigRational::from_integer(BigInt::from(*d));
                ScalarValue::surd(a * a2 + b * b2 * di, a * b2 + b * a2, *d)?
            }
            (Approx { .. }, _) | (_, Approx { .. }) => {
                let (v1, g1) = self.to_interval_parts()?;
                let (v2, g2) = other.to_interval_parts()?;
                // |xy - v1 v2| <= |v1| g2 + |v2| g1 + g1 g2
                let guard = v1.abs() * &g2 + v2.abs() * &g1 + &g1 * &g2;
                ScalarValue::Approx {
                    value: v1 * v2,
                    guard,
                }
            }
        })
    }

    /// Multiplicative inverse; stays in the same quadratic field.
    pub fn recip(&self) -> Result<ScalarValue, NumericError> {
        match self {
            ScalarValue::Rational(r) => {
                if r.is_zero() {
                    Err(NumericError::DivisionByZero)
                } else {
                    Ok(ScalarValue::Rational(r.recip()))
                }
            }
            ScalarValue::Surd { a, b, d } => {
                // 1/(a+b√d) = (a-b√d)/(a²-b²d); the norm is nonzero since the
                // value is irrational.
                let di = BigRational::from_integer(BigInt::from(*d));
                let norm = a * a - b * b * di;
                debug_assert!(!norm.is_zero());
                ScalarValue::surd(a / &norm, -(b / &norm), *d)
            }
            ScalarValue::Approx { value, guard } => {
                if value.abs() <= *guard {
                    return Err(NumericError::GuardViolation(
                        "reciprocal of an approximation that may be zero".into(),
                    ));
                }
                let lo = (value - guard).abs();
                let v = value.recip();
                // |1/x - 1/v| <= g / (|v| * lo)
                let guard = guard / (value.abs() * lo);
                Ok(ScalarValue::Approx { value: v, guard })
            }
        }
    }

    pub fn div(&self, other: &ScalarValue) -> Result<ScalarValue, NumericError> {
        self.mul(&other.recip()?)
    }

    /// `(center, guard)` view; exact values get a zero guard. The center of
    /// a surd is a 64-bit-tight rational enclosure midpoint.
    pub fn to_interval_parts(&self) -> Result<(BigRational, BigRational), NumericError> {
        Ok(match self {
            ScalarValue::Rational(r) => (r.clone(), BigRational::zero()),
            ScalarValue::Surd { a, b, d } => {
                // Rational enclosure of b√d tight enough for interval work.
                let (lo, hi) = sqrt_bounds(*d, 64);
                let center = a + b * (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                let guard = b.abs() * (hi - lo);
                (center, guard)
            }
            ScalarValue::Approx { value, guard } => (value.clone(), guard.clone()),
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Rational(r) => rational_to_f64(r),
            ScalarValue::Surd { a, b, d } => {
                rational_to_f64(a) + rational_to_f64(b) * (*d as f64).sqrt()
            }
            ScalarValue::Approx { value, .. } => rational_to_f64(value),
        }
    }

    /// Sign of an exact value; `Approx` decides only outside its guard band.
    pub fn sign(&self) -> Result<Ordering, NumericError> {
        match self {
            ScalarValue::Rational(r) => Ok(r.cmp(&BigRational::zero())),
            ScalarValue::Surd { a, b, d } => Ok(surd_sign(a, b, *d)),
            ScalarValue::Approx { value, guard } => {
                if value.abs() > *guard {
                    Ok(value.cmp(&BigRational::zero()))
                } else {
                    Err(NumericError::GuardViolation(
                        "sign query within guard band of zero".into(),
                    ))
                }
            }
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range intermediate; fall back on a digit-limited quotient.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Sign of `a + b√d` decided exactly by comparing squares.
fn surd_sign(a: &BigRational, b: &BigRational, d: u64) -> Ordering {
    let sa = a.cmp(&BigRational::zero());
    let sb = b.cmp(&BigRational::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: compare a² against b²d; equality cannot happen since
    // d is square-free and b ≠ 0.
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(BigInt::from(d));
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => unreachable!("square-free radicand cannot square to a rational"),
    }
}

/// Rational `(lo, hi)` with `lo <= √d <= hi` and `hi - lo <= 2^-bits · √d`-ish.
pub(crate) fn sqrt_bounds(d: u64, bits: u64) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    let scaled = BigInt::from(d) * &scale * &scale;
    let root = scaled.sqrt(); // floor square root
    let lo = BigRational::new(root.clone(), scale.clone());
    let hi = BigRational::new(root + 1u8, scale);
    (lo, hi)
}

/// Exact comparison across the tower. `Approx` values compare only when the
/// gap exceeds the sum of the guards.
pub fn compare(x: &ScalarValue, y: &ScalarValue) -> Result<Ordering, NumericError> {
    use ScalarValue::*;
    match (x, y) {
        (Approx { .. }, _) | (_, Approx { .. }) => {
            let (v1, g1) = x.to_interval_parts()?;
            let (v2, g2) = y.to_interval_parts()?;
            let diff = v1 - v2;
            let slack = g1 + g2;
            if diff > slack {
                Ok(Ordering::Greater)
            } else if diff < -slack {
                Ok(Ordering::Less)
            } else {
                Err(NumericError::GuardViolation(
                    "comparison within combined guard bands".into(),
                ))
            }
        }
        (Rational(a), Rational(b)) => Ok(a.cmp(b)),
        _ => {
            let (a1, b1, d1) = x.parts().expect("exact");
            let (a2, b2, d2) = y.parts().expect("exact");
            if d1 == d2 || b1.is_zero() || b2.is_zero() {
                let d = if b1.is_zero() { d2 } else { d1 };
                Ok(surd_sign(&(a1 - a2), &(b1 - b2), d.max(2)))
            } else {
                // Distinct radicals: decide sign of A + B√p - C√q by a
                // squaring cascade.
                Ok(cross_radical_sign(&(a1 - a2), &b1, d1, &b2, d2))
            }
        }
    }
}

/// Sign of `A + B√p - C√q` with `p ≠ q` square-free, `B, C ≠ 0`.
fn cross_radical_sign(
    a: &BigRational,
    b: &BigRational,
    p: u64,
    c: &BigRational,
    q: u64,
) -> Ordering {
    // Compare A + B√p against C√q.
    let lhs_sign = surd_sign(a, b, p);
    let rhs_sign = c.cmp(&BigRational::zero());
    if lhs_sign != rhs_sign {
        return match (lhs_sign, rhs_sign) {
            (Ordering::Equal, s) => s.reverse(),
            (s, Ordering::Equal) => s,
            (s, _) => s,
        };
    }
    if lhs_sign == Ordering::Equal {
        return Ordering::Equal;
    }
    // Same nonzero sign σ: compare squares, then multiply verdict by σ.
    // (A + B√p)² = A² + B²p + 2AB√p  vs  C²q.
    let pp = BigRational::from_integer(BigInt::from(p));
    let qq = BigRational::from_integer(BigInt::from(q));
    let sq_a = a * a + b * b * pp - c * c * qq;
    let sq_b = BigRational::from_integer(BigInt::from(2)) * a * b;
    let cmp_squares = surd_sign(&sq_a, &sq_b, p);
    if lhs_sign == Ordering::Greater {
        cmp_squares
    } else {
        cmp_squares.reverse()
    }
}

pub fn scalar_eq(x: &ScalarValue, y: &ScalarValue) -> bool {
    matches!(compare(x, y), Ok(Ordering::Equal))
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Rational(r) => write!(f, "{}", r),
            ScalarValue::Surd { a, b, d } => {
                if a.is_zero() {
                    write!(f, "{}*sqrt({})", b, d)
                } else {
                    write!(f, "{} + {}*sqrt({})", a, b, d)
                }
            }
            ScalarValue::Approx { value, guard } => {
                write!(f, "~{} (guard {})", rational_to_f64(value), rational_to_f64(guard))
            }
        }
    }
}
