//! Independent ground truth: crossing-count computation of the index
//! functions for concrete linear Hamiltonian paths, splitting-number probes
//! by spectral-parameter rotation, and the explicit weakly non-resonant
//! ellipsoid systems.

mod crossing;
mod nmat;

pub use crossing::{crossing_index, splitting_probe};

use crate::iteration::{IterationError, PathIndexData};
use crate::numeric::{brackets, scalar_eq, NumericError, ScalarValue};
use crate::symplectic::{NormalFormDecomposition, SymplecticError};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error("adaptive subdivision could not isolate crossings on t ∈ [{0}, {1}]")]
    ResolutionFailure(f64, f64),
    #[error("perturbation ladder did not stabilize: {0}")]
    NoStabilization(String),
    #[error("radii must come with declared exact arithmetic: {0}")]
    UndeclaredArithmetic(String),
    #[error("unsupported path: {0}")]
    Unsupported(String),
}

/// One autonomous stretch `γ(t) = exp(2π·(t - t_0)·J·A)·γ(t_0)`.
///
/// Durations are measured in full-turn units (a plane with generator rate 1
/// completes one rotation per unit of `t`), which keeps periods of rotational
/// systems exactly representable.
#[derive(Clone, Debug)]
pub struct PathSegment {
    /// Symmetric `2n × 2n` generator.
    pub a: Vec<Vec<ScalarValue>>,
    pub duration: ScalarValue,
}

/// A piecewise-autonomous linear Hamiltonian path starting at the identity.
/// The public JSON form carries a single segment `{"n", "A", "tau"}`.
#[derive(Clone, Debug)]
pub struct LinearPath {
    n: usize,
    segments: Vec<PathSegment>,
}

impl LinearPath {
    pub fn new(n: usize, a: Vec<Vec<ScalarValue>>, duration: ScalarValue) -> Result<Self, OracleError> {
        Self::piecewise(n, vec![PathSegment { a, duration }])
    }

    pub fn piecewise(n: usize, segments: Vec<PathSegment>) -> Result<Self, OracleError> {
        if segments.is_empty() {
            return Err(OracleError::Unsupported("path needs at least one segment".into()));
        }
        for seg in &segments {
            if seg.a.len() != 2 * n || seg.a.iter().any(|r| r.len() != 2 * n) {
                return Err(OracleError::Unsupported(format!(
                    "generator must be {0}x{0}",
                    2 * n
                )));
            }
            for i in 0..2 * n {
                for j in 0..i {
                    if !scalar_eq(&seg.a[i][j], &seg.a[j][i]) {
                        return Err(OracleError::Unsupported(
                            "generator must be symmetric".into(),
                        ));
                    }
                }
            }
            match seg.duration.sign() {
                Ok(std::cmp::Ordering::Greater) => {}
                _ => {
                    return Err(OracleError::Unsupported(
                        "segment duration must be positive".into(),
                    ))
                }
            }
        }
        Ok(LinearPath { n, segments })
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    /// Total duration in turn units, as f64.
    pub fn duration_f64(&self) -> f64 {
        self.segments.iter().map(|s| s.duration.to_f64()).sum()
    }

    /// The m-fold iterate of a single-segment path, as the same generator run
    /// m times as long. (Piecewise paths would need endpoint conjugation and
    /// are not needed for iteration checks.)
    pub fn iterated(&self, m: u64) -> Result<LinearPath, OracleError> {
        if self.segments.len() != 1 {
            return Err(OracleError::Unsupported(
                "iterates are defined here for single-segment paths".into(),
            ));
        }
        let seg = &self.segments[0];
        LinearPath::new(
            self.n,
            seg.a.clone(),
            seg.duration.scale_int(m as i64),
        )
    }

    /// Plane rates when every segment generator is a direct sum of scalar
    /// plane blocks `a_i · I₂`; the exact-enumeration pipeline applies then.
    pub(crate) fn plane_rates(&self) -> Option<Vec<ScalarValue>> {
        if self.segments.len() != 1 {
            return None;
        }
        let a = &self.segments[0].a;
        let n = self.n;
        let mut rates = Vec::with_capacity(n);
        for k in 0..n {
            let rate = &a[k][k];
            if !scalar_eq(rate, &a[n + k][n + k]) {
                return None;
            }
            rates.push(rate.clone());
        }
        // Everything off the plane diagonals must vanish.
        for i in 0..2 * n {
            for j in 0..2 * n {
                let on_diag = i == j;
                if !on_diag && !a[i][j].is_zero_exact() {
                    return None;
                }
            }
        }
        Some(rates)
    }
}

// --- wire format ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathWire {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<ScalarValue>>,
    tau: ScalarValue,
}

impl Serialize for LinearPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.segments.len() != 1 {
            return Err(serde::ser::Error::custom(
                "only single-segment paths have a wire form",
            ));
        }
        PathWire {
            n: self.n,
            a: self.segments[0].a.clone(),
            tau: self.segments[0].duration.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = PathWire::deserialize(d)?;
        LinearPath::new(wire.n, wire.a, wire.tau).map_err(serde::de::Error::custom)
    }
}

// --- ellipsoid systems -----------------------------------------------------------

/// One closed characteristic of an ellipsoid: its period (turn units), the
/// full linearized path over one period, and the index data the iteration
/// engine consumes.
#[derive(Clone, Debug)]
pub struct EllipsoidOrbit {
    pub period: ScalarValue,
    pub path: LinearPath,
    pub data: PathIndexData,
}

/// A weakly non-resonant ellipsoid described by its squared radii, with its
/// complete census of closed characteristics.
#[derive(Clone, Debug)]
pub struct EllipsoidSystem {
    pub radii_sq: Vec<ScalarValue>,
    pub orbits: Vec<EllipsoidOrbit>,
}

/// Build the full orbit census from squared radii `r_j²`. Every pairwise
/// ratio `r_i²/r_j²` must be certifiably irrational (surd-backed in one
/// common quadratic field); rational or guarded ratios are rejected.
pub fn build_ellipsoid(radii_sq: &[ScalarValue]) -> Result<EllipsoidSystem, OracleError> {
    let n = radii_sq.len();
    if n == 0 {
        return Err(OracleError::UndeclaredArithmetic("no radii given".into()));
    }
    for r in radii_sq {
        if !r.is_exact() {
            return Err(OracleError::UndeclaredArithmetic(
                "squared radii must be exact (rational or surd)".into(),
            ));
        }
        match r.sign() {
            Ok(std::cmp::Ordering::Greater) => {}
            _ => {
                return Err(OracleError::UndeclaredArithmetic(
                    "squared radii must be positive".into(),
                ))
            }
        }
    }
    // Pairwise ratios, kept for the rotation angles.
    let mut ratios = vec![vec![None; n]; n];
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let ratio = radii_sq[j].div(&radii_sq[i]).map_err(|e| match e {
                NumericError::MixedRadicals { .. } => OracleError::UndeclaredArithmetic(
                    "squared radii must share one quadratic field".into(),
                ),
                other => OracleError::Numeric(other),
            })?;
            if ratio.is_rational() {
                return Err(OracleError::UndeclaredArithmetic(format!(
                    "squared radius ratio r_{j}²/r_{i}² is rational; the system is resonant"
                )));
            }
            ratios[j][i] = Some(ratio);
        }
    }
    let mut orbits = Vec::with_capacity(n);
    for j in 0..n {
        // Generator: plane i rotates at rate 1/r_i² turns per unit time.
        let mut a = vec![vec![ScalarValue::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            let rate = radii_sq[i].recip()?;
            a[i][i] = rate.clone();
            a[n + i][n + i] = rate;
        }
        let period = radii_sq[j].clone();
        let path = LinearPath::new(n, a, period.clone())?;
        // Transversal rotations: fractional parts of r_j²/r_i², i ≠ j.
        let mut rotations = Vec::new();
        for i in 0..n {
            if i == j {
                continue;
            }
            let ratio = ratios[j][i].clone().expect("filled above");
            let frac = brackets(&ratio)?.frac;
            rotations.push(frac);
        }
        let decomposition = NormalFormDecomposition {
            p_minus: 1,
            rotations,
            ..Default::default()
        };
        // The initial index comes from the crossing count, not from a closed
        // form.
        let i1 = crossing_index(&path, &ScalarValue::rational(BigRational::zero()))?;
        let data = PathIndexData::new(i1, n as u32, decomposition)?;
        orbits.push(EllipsoidOrbit {
            period,
            path,
            data,
        });
    }
    Ok(EllipsoidSystem {
        radii_sq: radii_sq.to_vec(),
        orbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::{iterate, mean_index, mean_index_exceeds};

    fn sqrt(d: u64) -> ScalarValue {
        ScalarValue::sqrt_of(d).unwrap()
    }

    #[test]
    fn two_plane_system() {
        let sys = build_ellipsoid(&[ScalarValue::one(), sqrt(2)]).unwrap();
        assert_eq!(sys.orbits.len(), 2);
        for orbit in &sys.orbits {
            assert_eq!(orbit.data.nu1(), 1);
            assert_eq!(orbit.data.circle_multiplicity(), 4);
            assert!(mean_index_exceeds(&mean_index(&orbit.data).value, 2).unwrap());
        }
        // Short orbit: i(γ,1) = n + 2[1/√2] = 2; long: 2 + 2[√2] = 4.
        assert_eq!(sys.orbits[0].data.i1(), 2);
        assert_eq!(sys.orbits[1].data.i1(), 4);
        // Ekeland index of the short prime orbit is 0.
        assert_eq!(
            iterate(&sys.orbits[0].data, 1).unwrap().i_ekeland,
            num_bigint::BigInt::from(0)
        );
    }

    #[test]
    fn equal_radii_rejected() {
        let r = ScalarValue::one();
        assert!(matches!(
            build_ellipsoid(&[r.clone(), r]),
            Err(OracleError::UndeclaredArithmetic(_))
        ));
    }

    #[test]
    fn mixed_field_rejected() {
        assert!(matches!(
            build_ellipsoid(&[sqrt(2), sqrt(3)]),
            Err(OracleError::UndeclaredArithmetic(_))
        ));
    }

    #[test]
    fn four_plane_census() {
        // Same-field squared radii: 1, √2, 1+√2, 2+3√2 (all ratios irrational).
        let one = BigRational::from_integer(1.into());
        let radii = vec![
            ScalarValue::one(),
            sqrt(2),
            ScalarValue::surd(one.clone(), one.clone(), 2).unwrap(),
            ScalarValue::surd(
                BigRational::from_integer(2.into()),
                BigRational::from_integer(3.into()),
                2,
            )
            .unwrap(),
        ];
        let sys = build_ellipsoid(&radii).unwrap();
        assert_eq!(sys.orbits.len(), 4);
        for orbit in &sys.orbits {
            assert_eq!(orbit.data.nu1(), 1, "nondegenerate");
            assert_eq!(orbit.data.circle_multiplicity(), 8, "elliptic");
        }
    }
}
