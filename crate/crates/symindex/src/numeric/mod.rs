//! Exact number tower and the four bracket functions `[a]`, `E(a)`, `φ(a)`,
//! `{a}` on which every integrality decision in the toolkit rests.

mod encode;
mod scalar;

pub use encode::{parse_rational_text, parse_scalar_text, serialize_bigint, serialize_rational, serialize_rational_vec};
pub use scalar::{compare, scalar_eq, ScalarValue};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    /// An `Approx` value was queried too close to an integer (or another
    /// value) for its guard band to decide. The caller must escalate
    /// precision or supply an exact form.
    #[error("guard violation: {0}")]
    GuardViolation(String),
    #[error("values live in different quadratic fields: sqrt({left}) vs sqrt({right})")]
    MixedRadicals { left: u64, right: u64 },
    #[error("invalid surd: {0}")]
    InvalidSurd(String),
    #[error("guard must be positive")]
    InvalidGuard,
    #[error("division by zero")]
    DivisionByZero,
    #[error("length mismatch: {0} coefficients vs {1} values")]
    LengthMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Default guard band for approximate values: 10⁻³⁰.
pub fn default_guard() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(10u8).pow(30))
}

/// The four bracket functions of a single scalar, computed together.
#[derive(Clone, Debug)]
pub struct BracketResult {
    pub floor: BigInt,
    pub ceil: BigInt,
    /// `E(x) - [x]`: 0 exactly when `x` is an integer, 1 otherwise.
    pub phi: u8,
    /// `{x} = x - [x]`, kept exact for exact inputs.
    pub frac: ScalarValue,
}

/// `[x]`, `E(x)`, `φ(x)`, `{x}`. Exact for `Rational`/`Surd`; an `Approx`
/// within guard of an integer is rejected.
pub fn brackets(x: &ScalarValue) -> Result<BracketResult, NumericError> {
    let floor = floor_scalar(x)?;
    let frac = x.sub(&ScalarValue::Rational(BigRational::from_integer(floor.clone())))?;
    let phi = u8::from(!frac.is_zero_exact());
    let ceil = if phi == 0 { floor.clone() } else { &floor + 1 };
    Ok(BracketResult { floor, ceil, phi, frac })
}

/// `[x]` alone.
pub fn floor_scalar(x: &ScalarValue) -> Result<BigInt, NumericError> {
    match x {
        ScalarValue::Rational(r) => Ok(r.numer().div_floor(r.denom())),
        ScalarValue::Surd { .. } => {
            // Start from a float hint and correct by exact comparison.
            let mut k = BigInt::from(x.to_f64().floor() as i64);
            loop {
                let lo = ScalarValue::Rational(BigRational::from_integer(k.clone()));
                match compare(x, &lo)? {
                    Ordering::Less => {
                        k -= 1;
                        continue;
                    }
                    _ => {
                        let hi = ScalarValue::Rational(BigRational::from_integer(&k + 1));
                        match compare(x, &hi)? {
                            Ordering::Less => return Ok(k),
                            _ => {
                                k += 1;
                                continue;
                            }
                        }
                    }
                }
            }
        }
        ScalarValue::Approx { value, guard } => {
            let lo = value - guard;
            let hi = value + guard;
            let f_lo = lo.numer().div_floor(lo.denom());
            let f_hi = hi.numer().div_floor(hi.denom());
            if f_lo == f_hi {
                Ok(f_lo)
            } else {
                Err(NumericError::GuardViolation(format!(
                    "floor undecidable: value within {} of an integer",
                    guard
                )))
            }
        }
    }
}

/// `E(x) = min{k ∈ Z | k >= x}`.
pub fn ceil_scalar(x: &ScalarValue) -> Result<BigInt, NumericError> {
    Ok(brackets(x)?.ceil)
}

/// `φ(x)` as an integer in {0, 1}.
pub fn phi_scalar(x: &ScalarValue) -> Result<i64, NumericError> {
    Ok(i64::from(brackets(x)?.phi))
}

/// Fractional part `{x}`.
pub fn frac_scalar(x: &ScalarValue) -> Result<ScalarValue, NumericError> {
    Ok(brackets(x)?.frac)
}

/// Exact floor of a sum of exact scalars whose radicals may differ (at most
/// two distinct radicands): the f64 hint is confirmed by cross-radical
/// comparison against integer shifts.
pub fn floor_of_sum(terms: &[ScalarValue]) -> Result<BigInt, NumericError> {
    // Collapse same-field parts first.
    let mut by_field: Vec<ScalarValue> = Vec::new();
    for t in terms {
        if !t.is_exact() {
            return Err(NumericError::GuardViolation(
                "floor of a sum with approximate terms".into(),
            ));
        }
        let mut merged = false;
        for slot in by_field.iter_mut() {
            if let Ok(sum) = slot.add(t) {
                *slot = sum;
                merged = true;
                break;
            }
        }
        if !merged {
            by_field.push(t.clone());
        }
    }
    match by_field.len() {
        0 => Ok(BigInt::from(0)),
        1 => floor_scalar(&by_field[0]),
        2 => {
            let (x, y) = (&by_field[0], &by_field[1]);
            let mut k = BigInt::from((x.to_f64() + y.to_f64()).floor() as i64);
            // x + y >= k  <=>  x >= k - y, decided exactly across radicals.
            loop {
                let lo = ScalarValue::Rational(BigRational::from_integer(k.clone())).sub(y)?;
                if compare(x, &lo)? == Ordering::Less {
                    k -= 1;
                    continue;
                }
                let hi = ScalarValue::Rational(BigRational::from_integer(&k + 1)).sub(y)?;
                if compare(x, &hi)? != Ordering::Less {
                    k += 1;
                    continue;
                }
                return Ok(k);
            }
        }
        more => Err(NumericError::InvalidSurd(format!(
            "floor of a sum spanning {more} distinct quadratic fields"
        ))),
    }
}

/// Exact ceiling of a sum across (at most two) quadratic fields.
pub fn ceil_of_sum(terms: &[ScalarValue]) -> Result<BigInt, NumericError> {
    let negated: Vec<ScalarValue> = terms.iter().map(|t| t.neg()).collect();
    Ok(-floor_of_sum(&negated)?)
}

/// True iff `Σ coeffs_i · values_i` is an integer, decided exactly for
/// `Rational`/`Surd` entries.
pub fn rational_relation_check(
    coeffs: &[BigInt],
    values: &[ScalarValue],
) -> Result<bool, NumericError> {
    if coeffs.len() != values.len() {
        return Err(NumericError::LengthMismatch(coeffs.len(), values.len()));
    }
    let mut rat = BigRational::zero();
    // Coefficient of √d per radicand.
    let mut radical: std::collections::BTreeMap<u64, BigRational> = Default::default();
    let mut approx: Option<(BigRational, BigRational)> = None;
    for (c, v) in coeffs.iter().zip(values) {
        if c.is_zero() {
            continue;
        }
        let cr = BigRational::from_integer(c.clone());
        match v {
            ScalarValue::Rational(r) => rat += r * &cr,
            ScalarValue::Surd { a, b, d } => {
                rat += a * &cr;
                *radical.entry(*d).or_insert_with(BigRational::zero) += b * &cr;
            }
            ScalarValue::Approx { value, guard } => {
                let (av, ag) = approx.unwrap_or((BigRational::zero(), BigRational::zero()));
                approx = Some((av + value * &cr, ag + guard * cr.abs()));
            }
        }
    }
    let radicals_vanish = radical.values().all(|b| b.is_zero());
    match approx {
        None => Ok(radicals_vanish && rat.is_integer()),
        Some((av, ag)) => {
            if !radicals_vanish {
                // An exact irrational remainder plus a guarded value can only
                // certify "integer" if the approx cancels it, which a guard
                // band can never prove. Widen the guard by the radical
                // enclosure widths so the rejection stays sound.
                let mut total = av + rat;
                let mut guard = ag;
                for (d, b) in &radical {
                    let (lo, hi) = scalar::sqrt_bounds(*d, 64);
                    total += b * (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                    guard += b.abs() * (hi - lo);
                }
                return near_integer_reject(&total, &guard);
            }
            near_integer_reject(&(av + rat), &ag)
        }
    }
}

fn near_integer_reject(v: &BigRational, guard: &BigRational) -> Result<bool, NumericError> {
    let f = v.numer().div_floor(v.denom());
    let frac = v - BigRational::from_integer(f);
    let dist = frac.clone().min(BigRational::from_integer(BigInt::from(1)) - &frac);
    if dist <= *guard {
        Err(NumericError::GuardViolation(
            "relation sum within guard of an integer".into(),
        ))
    } else {
        Ok(false)
    }
}

/// `{x}` evaluated in f64, for prefilters only.
pub fn frac_f64(x: f64) -> f64 {
    let f = x.fract();
    if f < 0.0 {
        f + 1.0
    } else {
        f
    }
}

/// Parse a decimal string like `"-12.375"` or `"1e-30"` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational, NumericError> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| NumericError::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(NumericError::Parse(format!("empty number {s:?}")));
    }
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let num: BigInt = digits
        .parse()
        .map_err(|_| NumericError::Parse(format!("bad digits in {s:?}")))?;
    let shift = frac_part.len() as i64 - exp;
    let ten = BigInt::from(10u8);
    Ok(if shift >= 0 {
        BigRational::new(num, ten.pow(shift.to_u32().ok_or_else(|| NumericError::Parse("exponent overflow".into()))?))
    } else {
        BigRational::from_integer(num * ten.pow((-shift) as u32))
    })
}

/// Render a rational as an exact decimal string when its denominator is of
/// the form 2^a·5^b, otherwise `None`.
pub fn to_decimal_string(r: &BigRational) -> Option<String> {
    let mut den = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r.numer() * BigInt::from(10u8).pow(places) / r.denom();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let s = if places == 0 {
        digits
    } else {
        let pad = format!("{:0>width$}", digits, width = places as usize + 1);
        let split = pad.len() - places as usize;
        format!("{}.{}", &pad[..split], &pad[split..])
    };
    Some(if neg { format!("-{s}") } else { s })
}
