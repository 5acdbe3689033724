//! Equivariant Morse bookkeeping: critical type numbers with their rule set,
//! the iteration period `K(u)`, Morse series against the even Betti sequence,
//! squeeze equalities and alternating sums.

use crate::iteration::{iterate, mean_index, IterationError, PathIndexData};
use crate::numeric::{compare, NumericError, ScalarValue};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorseError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error("path is degenerate at some iterate: {0}")]
    DegeneratePath(String),
    #[error("mean index must exceed 2 for a finite truncation, got {0}")]
    MeanIndexTooSmall(String),
    #[error("profile violates the critical type rules: {0}")]
    RuleViolation(String),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
}

/// `K(u)`: `K' = lcm` of the denominators of all rational angle ratios on
/// the unit-circle spectrum (eigenvalue -1 counts as ratio 1/2), doubled
/// when `i(u²) - i(u)` is odd while `K'` is odd.
pub fn compute_k(d: &PathIndexData) -> Result<u64, MorseError> {
    let dec = d.decomposition();
    let mut k_prime: u64 = 1;
    if dec.q_minus + dec.q_zero + dec.q_plus > 0 {
        k_prime = 2;
    }
    for ratio in dec
        .rotations
        .iter()
        .chain(&dec.nontrivial_n2)
        .chain(&dec.trivial_n2)
    {
        if let Some(r) = ratio.as_rational() {
            let s = r
                .denom()
                .to_u64()
                .ok_or_else(|| MorseError::RuleViolation("angle denominator overflow".into()))?;
            k_prime = k_prime.lcm(&s);
        }
    }
    let i1 = iterate(d, 1)?.i_m;
    let i2 = iterate(d, 2)?.i_m;
    let diff_odd = !((&i2 - &i1) % BigInt::from(2)).is_zero();
    Ok(if diff_odd && k_prime % 2 == 1 {
        2 * k_prime
    } else {
        k_prime
    })
}

/// Critical band `(i(yᵐ), i(yᵐ) + ν(yᵐ) - 1)` in the variational grading.
pub fn critical_band(d: &PathIndexData, m: u64) -> Result<(BigInt, BigInt), MorseError> {
    let r = iterate(d, m)?;
    Ok((r.i_ekeland.clone(), r.band_top()))
}

/// Critical type numbers of one orbit, keyed by the residue class of `m`
/// modulo `K(u)` (class `K` stands for multiples of `K`).
#[derive(Clone, Debug)]
pub struct CriticalTypeProfile {
    orbit: PathIndexData,
    k_period: u64,
    /// residue class in `1..=K` (value `K` represents `m ≡ 0`) → `k_0..k_{ν-1}`.
    k_table: BTreeMap<u64, Vec<u32>>,
}

fn residue_class(m: u64, k: u64) -> u64 {
    let r = m % k;
    if r == 0 {
        k
    } else {
        r
    }
}

impl CriticalTypeProfile {
    /// Build and validate a profile against the critical type rules.
    pub fn new(
        orbit: PathIndexData,
        k_table: BTreeMap<u64, Vec<u32>>,
    ) -> Result<Self, MorseError> {
        let k_period = compute_k(&orbit)?;
        let profile = CriticalTypeProfile {
            orbit,
            k_period,
            k_table,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn orbit(&self) -> &PathIndexData {
        &self.orbit
    }

    pub fn k_period(&self) -> u64 {
        self.k_period
    }

    pub fn k_numbers(&self, m: u64) -> &[u32] {
        self.k_table
            .get(&residue_class(m, self.k_period))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    fn validate(&self) -> Result<(), MorseError> {
        if self.k_table.len() != self.k_period as usize {
            return Err(MorseError::RuleViolation(format!(
                "table must cover residues 1..={}, got {} entries",
                self.k_period,
                self.k_table.len()
            )));
        }
        let i1 = iterate(&self.orbit, 1)?.i_ekeland;
        for m in 1..=self.k_period {
            let row = self.k_table.get(&m).ok_or_else(|| {
                MorseError::RuleViolation(format!("missing residue class {m}"))
            })?;
            let it = iterate(&self.orbit, m)?;
            let nu = it.nu_m as usize;
            if row.len() != nu {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: expected ν = {nu} entries, got {}",
                    row.len()
                )));
            }
            // Endpoint values are 0 or 1.
            if row[0] > 1 || row[nu - 1] > 1 {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: k_0 and k_(ν-1) must be 0 or 1"
                )));
            }
            let interior_positive = (1..nu.saturating_sub(1)).any(|l| row[l] >= 1);
            if row[0] == 1 && nu > 1 && row[1..].iter().any(|&k| k != 0) {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: k_0 = 1 forces the rest of the row to vanish"
                )));
            }
            if nu > 1 && row[nu - 1] == 1 && row[..nu - 1].iter().any(|&k| k != 0) {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: k_(ν-1) = 1 forces the rest of the row to vanish"
                )));
            }
            if interior_positive && (row[0] != 0 || row[nu - 1] != 0) {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: interior support forces k_0 = k_(ν-1) = 0"
                )));
            }
            // Odd index offset kills k_0.
            let diff = &it.i_ekeland - &i1;
            if !(&diff % BigInt::from(2)).is_zero() && row[0] != 0 {
                return Err(MorseError::RuleViolation(format!(
                    "class {m}: i(yᵐ) - i(y) odd forces k_0 = 0"
                )));
            }
        }
        Ok(())
    }

    /// `Σ_l (-1)^{i(yᵐ)+l} k_l(yᵐ)`.
    pub fn alternating_sum(&self, m: u64) -> Result<i64, MorseError> {
        let it = iterate(&self.orbit, m)?;
        let base_even = (&it.i_ekeland % BigInt::from(2)).is_zero();
        let mut sum = 0i64;
        for (l, &k) in self.k_numbers(m).iter().enumerate() {
            let even = base_even == (l % 2 == 0);
            sum += if even { k as i64 } else { -(k as i64) };
        }
        Ok(sum)
    }
}

/// Auto-filled profile for a path that is nondegenerate at every iterate:
/// `k_0(yᵐ) = 1` iff `i(yᵐ) - i(y)` is even.
pub fn nondegenerate_profile(d: &PathIndexData) -> Result<CriticalTypeProfile, MorseError> {
    let dec = d.decomposition();
    let structurally_nondeg = d.nu1() == 1
        && dec.q_minus + dec.q_zero + dec.q_plus == 0
        && dec
            .rotations
            .iter()
            .chain(&dec.nontrivial_n2)
            .chain(&dec.trivial_n2)
            .all(|r| r.as_rational().is_none());
    if !structurally_nondeg {
        return Err(MorseError::DegeneratePath(
            "profile auto-fill needs ν(yᵐ) = 1 for every m".into(),
        ));
    }
    let k = compute_k(d)?;
    let i1 = iterate(d, 1)?.i_ekeland;
    let mut table = BTreeMap::new();
    for m in 1..=k {
        let im = iterate(d, m)?.i_ekeland;
        let even = ((&im - &i1) % BigInt::from(2)).is_zero();
        table.insert(m, vec![u32::from(even)]);
    }
    CriticalTypeProfile::new(d.clone(), table)
}

/// One Morse-series contribution, for the reproducibility ledger.
#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    pub orbit: usize,
    pub m: u64,
    pub degree: i64,
    pub rank: u32,
}

/// The Morse series `M_i` on `0..=i_max` with its contribution ledger.
#[derive(Clone, Debug)]
pub struct MorseSeries {
    pub i_max: i64,
    pub counts: Vec<u64>,
    pub ledger: Vec<Contribution>,
    /// Largest degree below any band straddling `i_max`; inequalities are
    /// only meaningful up to here.
    pub safe_degree: i64,
}

impl MorseSeries {
    pub fn m_at(&self, i: i64) -> u64 {
        if (0..=self.i_max).contains(&i) {
            self.counts[i as usize]
        } else {
            0
        }
    }
}

/// Betti sequence of the ambient level sets: 1 in even degrees, 0 otherwise.
pub fn betti(i: i64) -> u64 {
    u64::from(i >= 0 && i % 2 == 0)
}

/// Assemble the Morse series of a census up to `i_max`. Every orbit must
/// have mean index > 2 so the truncation is finite.
pub fn assemble_series(
    census: &[CriticalTypeProfile],
    i_max: i64,
) -> Result<MorseSeries, MorseError> {
    if i_max < 0 {
        return Err(MorseError::PreconditionUnmet("i_max must be >= 0".into()));
    }
    let mut counts = vec![0u64; (i_max + 1) as usize];
    let mut ledger = Vec::new();
    let mut safe_degree = i_max;
    for (idx, profile) in census.iter().enumerate() {
        let mean = mean_index(&profile.orbit).value;
        match compare(&mean, &ScalarValue::from_int(2)) {
            Ok(Ordering::Greater) => {}
            Ok(_) => return Err(MorseError::MeanIndexTooSmall(format!("{mean}"))),
            Err(e) => return Err(MorseError::Numeric(e)),
        }
        // î > 2 gives i(yᵐ) ≥ m·î - 3n - 2 growth, so this stop bound is safe.
        let mean_f = mean.to_f64();
        let m_stop = (((i_max + 3 * profile.orbit.n() as i64 + 4) as f64) / (mean_f - 1.0))
            .ceil()
            .max(4.0) as u64
            + 4;
        for m in 1..=m_stop {
            let it = iterate(&profile.orbit, m)?;
            let lo = &it.i_ekeland;
            let hi = it.band_top();
            if *lo > BigInt::from(i_max) {
                continue;
            }
            if hi > BigInt::from(i_max) {
                // Band straddles the truncation edge.
                let lo_i = lo.to_i64().unwrap_or(i64::MAX);
                safe_degree = safe_degree.min(lo_i - 1);
            }
            let row = profile.k_numbers(m);
            for (l, &k) in row.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let degree = lo + BigInt::from(l);
                if degree < BigInt::zero() || degree > BigInt::from(i_max) {
                    continue;
                }
                let deg = degree.to_i64().expect("degree fits i64");
                counts[deg as usize] += k as u64;
                ledger.push(Contribution {
                    orbit: idx,
                    m,
                    degree: deg,
                    rank: k,
                });
            }
        }
    }
    ledger.sort_by_key(|c| (c.orbit, c.m, c.degree));
    Ok(MorseSeries {
        i_max,
        counts,
        ledger,
        safe_degree,
    })
}

/// Per-degree verdicts for `M_i >= b_i` and the alternating partial sums.
#[derive(Clone, Debug, Serialize)]
pub struct MorseReport {
    pub checked_up_to: i64,
    pub pointwise_failures: Vec<i64>,
    pub alternating_failures: Vec<i64>,
    pub all_pass: bool,
}

pub fn morse_inequalities(series: &MorseSeries) -> MorseReport {
    let top = series.safe_degree.min(series.i_max);
    let mut pointwise_failures = Vec::new();
    let mut alternating_failures = Vec::new();
    let mut alt_m: i64 = 0;
    let mut alt_b: i64 = 0;
    for i in 0..=top {
        let m = series.m_at(i) as i64;
        let b = betti(i) as i64;
        if m < b {
            pointwise_failures.push(i);
        }
        alt_m = m - alt_m;
        alt_b = b - alt_b;
        if alt_m < alt_b {
            alternating_failures.push(i);
        }
    }
    let all_pass = pointwise_failures.is_empty() && alternating_failures.is_empty();
    MorseReport {
        checked_up_to: top,
        pointwise_failures,
        alternating_failures,
        all_pass,
    }
}

/// The squeeze equality between two degrees where the series touches the
/// Betti numbers: with `M_{i1} = b_{i1}`, `M_{i2} = b_{i2}` and the Morse
/// inequalities holding through `i2`, the alternating sums over `[i1, i2]`
/// must agree exactly.
pub fn squeeze(series: &MorseSeries, i1: i64, i2: i64) -> Result<bool, MorseError> {
    if i1 > i2 || i1 < 0 || i2 > series.safe_degree.min(series.i_max) {
        return Err(MorseError::PreconditionUnmet(format!(
            "need 0 <= i1 <= i2 <= {}",
            series.safe_degree.min(series.i_max)
        )));
    }
    if series.m_at(i1) != betti(i1) || series.m_at(i2) != betti(i2) {
        return Err(MorseError::PreconditionUnmet(
            "squeeze needs M = b at both endpoints".into(),
        ));
    }
    let report = morse_inequalities(series);
    if !report.all_pass || report.checked_up_to < i2 {
        return Err(MorseError::PreconditionUnmet(
            "squeeze needs the Morse inequalities through i2".into(),
        ));
    }
    let mut lhs: i64 = 0;
    let mut rhs: i64 = 0;
    let mut sign = 1i64;
    for i in (i1..=i2).rev() {
        lhs += sign * series.m_at(i) as i64;
        rhs += sign * betti(i) as i64;
        sign = -sign;
    }
    Ok(lhs == rhs)
}

/// Signed alternating span `Σ_{i1 <= i <= i2} (-1)^{i2 - i} M_i`, for window
/// computations.
pub fn alternating_span(series: &MorseSeries, i1: i64, i2: i64) -> i64 {
    let mut acc = 0i64;
    let mut sign = 1i64;
    for i in (i1..=i2).rev() {
        acc += sign * series.m_at(i) as i64;
        sign = -sign;
    }
    acc
}

// --- census wire format ------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileWire {
    #[serde(rename = "K")]
    k: u64,
    k_table: BTreeMap<String, Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CensusEntryWire {
    path: PathIndexData,
    profile: ProfileWire,
}

/// Parse a census document: a list of `{path, profile}` entries.
pub fn census_from_json(doc: &str) -> Result<Vec<CriticalTypeProfile>, MorseError> {
    let wires: Vec<CensusEntryWire> = serde_json::from_str(doc)
        .map_err(|e| MorseError::PreconditionUnmet(format!("census parse: {e}")))?;
    wires
        .into_iter()
        .map(|w| {
            let mut table = BTreeMap::new();
            for (k, v) in w.profile.k_table {
                let key: u64 = k.parse().map_err(|_| {
                    MorseError::PreconditionUnmet(format!("bad residue class key {k:?}"))
                })?;
                table.insert(key, v);
            }
            let profile = CriticalTypeProfile::new(w.path, table)?;
            if profile.k_period != w.profile.k {
                return Err(MorseError::RuleViolation(format!(
                    "declared K = {} but the orbit gives K = {}",
                    w.profile.k, profile.k_period
                )));
            }
            Ok(profile)
        })
        .collect()
}

pub fn census_to_json(census: &[CriticalTypeProfile]) -> String {
    let wires: Vec<CensusEntryWire> = census
        .iter()
        .map(|p| CensusEntryWire {
            path: p.orbit.clone(),
            profile: ProfileWire {
                k: p.k_period,
                k_table: p
                    .k_table
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            },
        })
        .collect();
    serde_json::to_string_pretty(&wires).expect("census serialization")
}
