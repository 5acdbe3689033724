//! The frozen per-block splitting-number table, reproduced by the limit
//! probe on realized paths (half-dimension <= 2).

use num_rational::BigRational;
use symindex::numeric::ScalarValue;
use symindex::oracle::{splitting_probe, LinearPath, PathSegment};
use symindex::symplectic::{splitting_numbers, NormalFormDecomposition};

fn rat(n: i64, d: i64) -> ScalarValue {
    ScalarValue::from_ratio(n, d)
}

fn diag2(a: i64, b: i64) -> Vec<Vec<ScalarValue>> {
    vec![
        vec![ScalarValue::from_int(a), ScalarValue::zero()],
        vec![ScalarValue::zero(), ScalarValue::from_int(b)],
    ]
}

fn rotation_path(turns: ScalarValue) -> LinearPath {
    LinearPath::new(1, diag2(1, 1), turns).unwrap()
}

/// Path ending at a positive shear (same homotopy component as N1(1,1)).
fn shear_up_path() -> LinearPath {
    LinearPath::new(1, diag2(0, -1), ScalarValue::one()).unwrap()
}

/// Path ending at a negative shear (component of N1(1,-1)).
fn shear_down_path() -> LinearPath {
    LinearPath::new(1, diag2(0, 1), ScalarValue::one()).unwrap()
}

/// Half turn, then a shear segment appended on the left: the endpoint is
/// `N1(-1, b)` with `sign(b) = sign`.
fn negative_shear_path(sign: i64) -> LinearPath {
    LinearPath::piecewise(
        1,
        vec![
            PathSegment {
                a: diag2(1, 1),
                duration: rat(1, 2),
            },
            PathSegment {
                a: diag2(0, sign),
                duration: ScalarValue::one(),
            },
        ],
    )
    .unwrap()
}

/// Hyperbolic endpoint: off-diagonal symmetric generator.
fn hyperbolic_path() -> LinearPath {
    LinearPath::new(
        1,
        vec![
            vec![ScalarValue::zero(), ScalarValue::from_int(-1)],
            vec![ScalarValue::from_int(-1), ScalarValue::zero()],
        ],
        rat(1, 4),
    )
    .unwrap()
}

/// 4-dimensional path ending at an N2-type block with angle ratio `w` and
/// off-diagonal sign `c` (+1 nontrivial, -1 trivial).
fn n2_path(w: (i64, i64), c: i64) -> LinearPath {
    let ratio = BigRational::new(w.0.into(), w.1.into());
    let z = ScalarValue::zero;
    let wv = ScalarValue::rational(ratio);
    let cv = ScalarValue::from_int(-c);
    // A = [[0, wJ], [-wJ, -cI]] (symmetric), so J·A = [[wJ, cI], [0, wJ]]
    // up to the symplectic block bookkeeping.
    let rows = vec![
        vec![z(), z(), z(), wv.neg()],
        vec![z(), z(), wv.clone(), z()],
        vec![z(), wv.clone(), cv.clone(), z()],
        vec![wv.neg(), z(), z(), cv.clone()],
    ];
    LinearPath::new(2, rows, ScalarValue::one()).unwrap()
}

fn probe(path: &LinearPath, w: ScalarValue) -> (u32, u32) {
    splitting_probe(path, &w, 12).expect("probe stabilizes")
}

#[test]
fn identity_block_at_one() {
    // Full turn ends at I₂: (1,1) at ω = 1.
    assert_eq!(probe(&rotation_path(ScalarValue::one()), ScalarValue::zero()), (1, 1));
}

#[test]
fn shear_blocks_at_one() {
    assert_eq!(probe(&shear_up_path(), ScalarValue::zero()), (1, 1));
    assert_eq!(probe(&shear_down_path(), ScalarValue::zero()), (0, 0));
}

#[test]
fn negative_one_blocks() {
    // -I₂ (half turn): (1,1) at ω = -1.
    assert_eq!(probe(&rotation_path(rat(1, 2)), rat(1, 2)), (1, 1));
    // N1(-1,-1)-component: (1,1); N1(-1,+1)-component: (0,0).
    assert_eq!(probe(&negative_shear_path(-1), rat(1, 2)), (1, 1));
    assert_eq!(probe(&negative_shear_path(1), rat(1, 2)), (0, 0));
}

#[test]
fn rotation_blocks_split_one_sided() {
    // Endpoint R(2π/5): (0,1) at the stored angle, (1,0) at the conjugate.
    let path = rotation_path(rat(1, 5));
    assert_eq!(probe(&path, rat(1, 5)), (0, 1));
    assert_eq!(probe(&path, rat(4, 5)), (1, 0));
    // Off the spectrum entirely.
    assert_eq!(probe(&path, rat(2, 5)), (0, 0));
}

#[test]
fn off_circle_block_is_silent() {
    let path = hyperbolic_path();
    assert_eq!(probe(&path, ScalarValue::zero()), (0, 0));
    assert_eq!(probe(&path, rat(1, 2)), (0, 0));
    assert_eq!(probe(&path, rat(1, 3)), (0, 0));
}

#[test]
fn n2_blocks_by_kind() {
    assert_eq!(probe(&n2_path((1, 5), 1), rat(1, 5)), (1, 1), "nontrivial");
    assert_eq!(probe(&n2_path((1, 5), 1), rat(4, 5)), (1, 1), "nontrivial conjugate");
    assert_eq!(probe(&n2_path((1, 5), -1), rat(1, 5)), (0, 0), "trivial");
    assert_eq!(probe(&n2_path((1, 5), -1), rat(4, 5)), (0, 0), "trivial conjugate");
}

#[test]
fn probes_match_frozen_table_blockwise() {
    // Cross-check the additive table against probes through decompositions.
    let one = ScalarValue::zero(); // ratio of ω = 1
    let cases: Vec<(NormalFormDecomposition, LinearPath, ScalarValue)> = vec![
        (
            NormalFormDecomposition {
                p_minus: 1,
                ..Default::default()
            },
            shear_up_path(),
            one.clone(),
        ),
        (
            NormalFormDecomposition {
                p_plus: 1,
                ..Default::default()
            },
            shear_down_path(),
            one.clone(),
        ),
        (
            NormalFormDecomposition {
                p_zero: 1,
                ..Default::default()
            },
            rotation_path(ScalarValue::one()),
            one,
        ),
        (
            NormalFormDecomposition {
                q_zero: 1,
                ..Default::default()
            },
            rotation_path(rat(1, 2)),
            rat(1, 2),
        ),
        (
            NormalFormDecomposition {
                rotations: vec![rat(1, 5)],
                ..Default::default()
            },
            rotation_path(rat(1, 5)),
            rat(1, 5),
        ),
        (
            NormalFormDecomposition {
                nontrivial_n2: vec![rat(1, 5)],
                ..Default::default()
            },
            n2_path((1, 5), 1),
            rat(1, 5),
        ),
        (
            NormalFormDecomposition {
                trivial_n2: vec![rat(1, 5)],
                ..Default::default()
            },
            n2_path((1, 5), -1),
            rat(1, 5),
        ),
    ];
    for (dec, path, omega) in cases {
        let table = splitting_numbers(&dec, &omega).unwrap();
        let probed = probe(&path, omega);
        assert_eq!(table, probed, "table vs probe for {dec:?}");
    }
}
