//! Shared builders for the integration and acceptance suites.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use symindex::iteration::PathIndexData;
use symindex::numeric::ScalarValue;
use symindex::symplectic::NormalFormDecomposition;

pub fn rat(n: i64, d: i64) -> ScalarValue {
    ScalarValue::from_ratio(n, d)
}

pub fn surd(a: (i64, i64), b: (i64, i64), d: u64) -> ScalarValue {
    ScalarValue::surd(
        BigRational::new(BigInt::from(a.0), BigInt::from(a.1)),
        BigRational::new(BigInt::from(b.0), BigInt::from(b.1)),
        d,
    )
    .unwrap()
}

pub fn sqrt(d: u64) -> ScalarValue {
    ScalarValue::sqrt_of(d).unwrap()
}

/// N1(1,1) ⋄ N1(1,-1)^⋄3 with i(γ,1) = 5: the 6m-5 family.
pub fn shear_three() -> PathIndexData {
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

/// N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ hyperbolic with i(γ,1) = 4: the 5m-5 family.
pub fn shear_two_hyperbolic() -> PathIndexData {
    PathIndexData::new(
        4,
        4,
        NormalFormDecomposition {
            p_minus: 1,
            p_plus: 2,
            off_circle_dim: 2,
            ..Default::default()
        },
    )
    .unwrap()
}

/// N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ R(θ) with the given angle ratio, i(γ,1) = 4.
pub fn shear_two_rotation(ratio: ScalarValue) -> PathIndexData {
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

/// N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ N1(-1,1) with i(γ,1) = 4: 5m-5 with parity nullity.
pub fn shear_two_negative() -> PathIndexData {
    PathIndexData::new(
        4,
        4,
        NormalFormDecomposition {
            p_minus: 1,
            p_plus: 2,
            q_minus: 1,
            ..Default::default()
        },
    )
    .unwrap()
}

/// N1(1,1) ⋄ N1(1,-1)^⋄2 ⋄ I₂ with i(γ,1) = 4: the 6m-6 family.
pub fn shear_two_identity() -> PathIndexData {
    PathIndexData::new(
        4,
        4,
        NormalFormDecomposition {
            p_minus: 1,
            p_zero: 1,
            p_plus: 2,
            ..Default::default()
        },
    )
    .unwrap()
}

/// Elliptic partner shape: N1(1,1) ⋄ R(w1) ⋄ R(w2) ⋄ R(w3), i(γ,1) = 4.
/// All ratios must lie in (0,1) \ {1/2}.
pub fn rotation_triple(w1: ScalarValue, w2: ScalarValue, w3: ScalarValue) -> PathIndexData {
    PathIndexData::new(
        4,
        4,
        NormalFormDecomposition {
            p_minus: 1,
            rotations: vec![w1, w2, w3],
            ..Default::default()
        },
    )
    .unwrap()
}

/// Same-field squared-radius families for ellipsoid systems (all pairwise
/// ratios irrational inside one quadratic field).
pub fn radius_sets(n: usize) -> Vec<Vec<ScalarValue>> {
    let build = |d: u64| -> Vec<ScalarValue> {
        // 1, √d, 1+√d, 3+2√d: pairwise ratios stay irrational in Q(√d).
        let mut v = vec![
            ScalarValue::one(),
            sqrt(d),
            surd((1, 1), (1, 1), d),
            surd((3, 1), (2, 1), d),
        ];
        v.truncate(n.max(2));
        v
    };
    vec![build(2), build(3), build(5), build(7), build(13)]
}
