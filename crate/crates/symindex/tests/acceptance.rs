//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime. Every tolerance is pinned in code; the expected values
//! come from independent evaluation routes (plain integer arithmetic, f64
//! ceilings with integrality guards, brute scans, crossing counts).

mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;
use symindex::iteration::{
    bott_estimate_check, bott_inequality_raw, iterate, mean_index, mean_index_exceeds,
    rho_contribution, PathIndexData,
};
use symindex::kronecker::{
    build_problem, commutation_experiment, derive_integer_relations, equidistribution_deviation,
    find_tuples, pick_vertex,
};
use symindex::modsolve::{
    composite_alpha, lemma56_instance, solve_brute, solve_window, AffineRelation,
    CongruenceProblem, ModSolveError, Strategy,
};
use symindex::morse::{
    assemble_series, betti, compute_k, morse_inequalities, nondegenerate_profile, squeeze,
    CriticalTypeProfile,
};
use symindex::numeric::{brackets, scalar_eq, ScalarValue};
use symindex::oracle::{build_ellipsoid, crossing_index, splitting_probe, LinearPath, PathSegment};
use symindex::symplectic::{nu_at, splitting_numbers, NormalFormDecomposition};

struct Criterion {
    name: &'static str,
    budget: f64,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str, budget_secs: f64) -> Self {
        Criterion {
            name,
            budget: budget_secs,
            started: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        println!(
            "PASS {:<28} {:>8.2}s (budget {:.0}s)",
            self.name, elapsed, self.budget
        );
        assert!(
            elapsed < self.budget,
            "{} exceeded its runtime budget: {elapsed:.2}s >= {:.0}s",
            self.name,
            self.budget
        );
    }
}

/// Independent ceiling for rational arguments: plain integer arithmetic.
fn ceil_ratio_int(num: i64, den: i64) -> i64 {
    num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0)
}

/// Independent ceiling for m·(√2 - 1): f64 with an integrality guard.
fn ceil_m_sqrt2_minus_1(m: i64) -> i64 {
    let x = m as f64 * (2.0_f64.sqrt() - 1.0);
    assert!(
        (x - x.round()).abs() > 1e-6,
        "guard: m·(√2-1) suspiciously close to an integer at m = {m}"
    );
    x.ceil() as i64
}

#[test]
fn criterion_1_iteration_closed_forms() {
    let c = Criterion::start("1 iteration closed forms", 1.0);

    let six = shear_three();
    let five = shear_two_hyperbolic();
    let rot_surd = shear_two_rotation(surd((-1, 1), (1, 1), 2));
    let rot_third = shear_two_rotation(rat(1, 3));
    let neg = shear_two_negative();
    let ident = shear_two_identity();

    for m in 1..=1000i64 {
        let mu = m as u64;
        let r = iterate(&six, mu).unwrap();
        assert_eq!(r.i_ekeland, BigInt::from(6 * m - 5));
        assert_eq!(r.nu_m, 4);

        let r = iterate(&five, mu).unwrap();
        assert_eq!(r.i_ekeland, BigInt::from(5 * m - 5));
        assert_eq!(r.nu_m, 3);

        let r = iterate(&rot_surd, mu).unwrap();
        let e = ceil_m_sqrt2_minus_1(m);
        assert_eq!(r.i_ekeland, BigInt::from(4 * m + 2 * e - 6));
        assert_eq!(r.nu_m, 3); // irrational ratio: φ = 1 for every m

        let r = iterate(&rot_third, mu).unwrap();
        let e = ceil_ratio_int(m, 3);
        let phi = i64::from(m % 3 != 0);
        assert_eq!(r.i_ekeland, BigInt::from(4 * m + 2 * e - 6));
        assert_eq!(r.nu_m as i64, 5 - 2 * phi);

        let r = iterate(&neg, mu).unwrap();
        assert_eq!(r.i_ekeland, BigInt::from(5 * m - 5));
        assert_eq!(r.nu_m as i64, 3 + i64::from(m % 2 == 0));

        let r = iterate(&ident, mu).unwrap();
        assert_eq!(r.i_ekeland, BigInt::from(6 * m - 6));
        assert_eq!(r.nu_m, 5);
    }

    // Band tops of the rational-rotation family at the triple around q·s:
    // 2q(2s+r) - 8 / - 2 / + 2 with θ/2π = r/s = 1/3.
    let (s, r_num) = (3i64, 1i64);
    let period_weight = 2 * s + r_num; // 7
    for q in 1..=300i64 {
        let base = 2 * q * period_weight;
        let at = |m: i64| iterate(&rot_third, m as u64).unwrap().band_top();
        assert_eq!(at(q * s - 1), BigInt::from(base - 8));
        assert_eq!(at(q * s), BigInt::from(base - 2));
        assert_eq!(at(q * s + 1), BigInt::from(base + 2));
    }
    c.finish();
}

#[test]
fn criterion_2_splitting_table() {
    let c = Criterion::start("2 splitting table", 30.0);

    // Per-block unit table plus vanishing off the spectrum.
    let one = ScalarValue::zero();
    let half = rat(1, 2);
    let table: Vec<(NormalFormDecomposition, ScalarValue, (u32, u32))> = vec![
        (NormalFormDecomposition { p_minus: 1, ..Default::default() }, one.clone(), (1, 1)),
        (NormalFormDecomposition { p_zero: 1, ..Default::default() }, one.clone(), (1, 1)),
        (NormalFormDecomposition { p_plus: 1, ..Default::default() }, one.clone(), (0, 0)),
        (NormalFormDecomposition { q_minus: 1, ..Default::default() }, half.clone(), (0, 0)),
        (NormalFormDecomposition { q_zero: 1, ..Default::default() }, half.clone(), (1, 1)),
        (NormalFormDecomposition { q_plus: 1, ..Default::default() }, half.clone(), (1, 1)),
        (NormalFormDecomposition { rotations: vec![rat(1, 5)], ..Default::default() }, rat(1, 5), (0, 1)),
        (NormalFormDecomposition { rotations: vec![rat(1, 5)], ..Default::default() }, rat(4, 5), (1, 0)),
        (NormalFormDecomposition { nontrivial_n2: vec![rat(1, 5)], ..Default::default() }, rat(1, 5), (1, 1)),
        (NormalFormDecomposition { trivial_n2: vec![rat(1, 5)], ..Default::default() }, rat(1, 5), (0, 0)),
        (NormalFormDecomposition { off_circle_dim: 2, ..Default::default() }, one.clone(), (0, 0)),
    ];
    for (dec, w, expect) in &table {
        assert_eq!(&splitting_numbers(dec, w).unwrap(), expect, "{dec:?} at {w}");
        // Off-spectrum vanishing.
        assert_eq!(splitting_numbers(dec, &rat(3, 7)).unwrap(), (0, 0));
        // 0 <= S± <= ν.
        let (sp, sm) = splitting_numbers(dec, w).unwrap();
        let nu = nu_at(dec, w).unwrap();
        assert!(sp <= nu && sm <= nu);
    }
    // Additivity over the ⋄-product at shared and disjoint positions.
    let a = NormalFormDecomposition { p_minus: 1, p_plus: 3, ..Default::default() };
    assert_eq!(splitting_numbers(&a, &one).unwrap(), (1, 1));
    let b = NormalFormDecomposition {
        p_minus: 2,
        q_zero: 1,
        rotations: vec![rat(1, 5), rat(1, 3)],
        ..Default::default()
    };
    assert_eq!(splitting_numbers(&b, &one).unwrap(), (2, 2));
    assert_eq!(splitting_numbers(&b, &half).unwrap(), (1, 1));
    assert_eq!(splitting_numbers(&b, &rat(1, 5)).unwrap(), (0, 1));

    // Probe reproduction on realized paths, half-dimension <= 2.
    let diag2 = |a: i64, b: i64| -> Vec<Vec<ScalarValue>> {
        vec![
            vec![ScalarValue::from_int(a), ScalarValue::zero()],
            vec![ScalarValue::zero(), ScalarValue::from_int(b)],
        ]
    };
    let rotation_path = |turns: ScalarValue| LinearPath::new(1, diag2(1, 1), turns).unwrap();
    let negative_shear = |sign: i64| {
        LinearPath::piecewise(
            1,
            vec![
                PathSegment { a: diag2(1, 1), duration: rat(1, 2) },
                PathSegment { a: diag2(0, sign), duration: ScalarValue::one() },
            ],
        )
        .unwrap()
    };
    let n2_path = |c: i64| {
        let z = ScalarValue::zero;
        let wv = rat(1, 5);
        let cv = ScalarValue::from_int(-c);
        LinearPath::new(
            2,
            vec![
                vec![z(), z(), z(), wv.neg()],
                vec![z(), z(), wv.clone(), z()],
                vec![z(), wv.clone(), cv.clone(), z()],
                vec![wv.neg(), z(), z(), cv.clone()],
            ],
            ScalarValue::one(),
        )
        .unwrap()
    };
    let hyperbolic = LinearPath::new(
        1,
        vec![
            vec![ScalarValue::zero(), ScalarValue::from_int(-1)],
            vec![ScalarValue::from_int(-1), ScalarValue::zero()],
        ],
        rat(1, 4),
    )
    .unwrap();
    let probes: Vec<(LinearPath, ScalarValue, (u32, u32))> = vec![
        (LinearPath::new(1, diag2(0, -1), ScalarValue::one()).unwrap(), one.clone(), (1, 1)),
        (rotation_path(ScalarValue::one()), one.clone(), (1, 1)),
        (LinearPath::new(1, diag2(0, 1), ScalarValue::one()).unwrap(), one.clone(), (0, 0)),
        (negative_shear(-1), half.clone(), (1, 1)),
        (rotation_path(rat(1, 2)), half.clone(), (1, 1)),
        (negative_shear(1), half.clone(), (0, 0)),
        (rotation_path(rat(1, 5)), rat(1, 5), (0, 1)),
        (rotation_path(rat(1, 5)), rat(4, 5), (1, 0)),
        (n2_path(1), rat(1, 5), (1, 1)),
        (n2_path(1), rat(4, 5), (1, 1)),
        (n2_path(-1), rat(1, 5), (0, 0)),
        (hyperbolic, one.clone(), (0, 0)),
    ];
    for (path, w, expect) in &probes {
        let got = splitting_probe(path, w, 12).unwrap();
        assert_eq!(&got, expect, "probe at {w}");
    }
    c.finish();
}

#[test]
fn criterion_3_oracle_equivalence() {
    let c = Criterion::start("3 oracle equivalence", 120.0);
    for radii in radius_sets(4) {
        for n in [2usize, 3, 4] {
            let system = build_ellipsoid(&radii[..n]).unwrap();
            assert_eq!(system.orbits.len(), n);
            for orbit in &system.orbits {
                for m in 1..=20u64 {
                    let path = orbit.path.iterated(m).unwrap();
                    let by_crossing = crossing_index(&path, &ScalarValue::zero()).unwrap();
                    let by_formula = iterate(&orbit.data, m).unwrap().i_m;
                    assert_eq!(BigInt::from(by_crossing), by_formula, "n={n} m={m}");
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_4_ellipsoid_census() {
    let c = Criterion::start("4 ellipsoid census", 60.0);
    for radii in radius_sets(4) {
        let n = radii.len();
        let system = build_ellipsoid(&radii).unwrap();
        assert_eq!(system.orbits.len(), n, "exactly n prime orbits");
        let mut profiles = Vec::new();
        for orbit in &system.orbits {
            assert_eq!(orbit.data.nu1(), 1, "nondegenerate");
            assert_eq!(orbit.data.circle_multiplicity(), 2 * n as u32, "elliptic");
            assert!(mean_index_exceeds(&mean_index(&orbit.data).value, 2).unwrap());
            profiles.push(nondegenerate_profile(&orbit.data).unwrap());
        }
        // Lower-bound consistency: every contribution is at least [n/2] + 1.
        let rho_min = system
            .orbits
            .iter()
            .map(|o| rho_contribution(&o.data))
            .min()
            .unwrap();
        assert!(
            rho_min >= (n as i64) / 2 + 1,
            "rho contributions {rho_min} vs [n/2]+1"
        );
        let series = assemble_series(&profiles, 200).unwrap();
        let report = morse_inequalities(&series);
        assert!(report.all_pass, "Morse inequalities to 200: {report:?}");
        assert!(report.checked_up_to >= 180, "truncation left enough range");
        for i in (1..=report.checked_up_to).step_by(2) {
            assert_eq!(series.m_at(i), 0, "M_odd = 0 at {i}");
        }
    }
    c.finish();
}

#[test]
fn criterion_5_common_index_jump() {
    let c = Criterion::start("5 common index jump", 300.0);

    // Four-orbit ellipsoid, ε = 10⁻³, M0 = 1, at least 3 verified tuples.
    let radii = &radius_sets(4)[0];
    let system = build_ellipsoid(radii).unwrap();
    let paths: Vec<PathIndexData> = system.orbits.iter().map(|o| o.data.clone()).collect();
    let eps = BigRational::new(BigInt::one(), BigInt::from(1000));
    let probe = build_problem(paths.clone(), eps.clone(), 1, Vec::new()).unwrap();
    let relations = derive_integer_relations(probe.v());
    let problem = build_problem(paths, eps, 1, relations).unwrap();
    assert_eq!(problem.big_m(), 1, "irrational angle data keeps M = 1");
    let vertex = pick_vertex(&problem, 11).unwrap();
    let tuples = find_tuples(&problem, &vertex, 3, 100_000_000).unwrap();
    assert!(tuples.len() >= 3, "at least three tuples");
    // find_tuples re-verifies the window identities and the angle smallness
    // with δ = (2M+1)ε before returning; re-assert the residuals here.
    for t in &tuples {
        assert!(t.residual < BigRational::new(BigInt::one(), BigInt::from(1000)));
    }

    // Single-rotation fixture: the vertex dichotomy and the 4-vs-6 gap.
    let ratio = surd((-1, 1), (1, 1), 2); // θ/2π = √2 - 1
    let path = shear_two_rotation(ratio.clone());
    let eps_small = BigRational::new(BigInt::one(), BigInt::from(100));
    let probe = build_problem(vec![path.clone()], eps_small.clone(), 1, Vec::new()).unwrap();
    let rels = derive_integer_relations(probe.v());
    let problem = build_problem(vec![path.clone()], eps_small, 1, rels).unwrap();
    let plus = pick_vertex(&problem, 5).unwrap();
    let minus = pick_vertex(&problem, -5).unwrap();
    let mut chis = vec![plus.chi.clone(), minus.chi.clone()];
    chis.sort();
    assert_eq!(chis, vec![vec![0, 1], vec![1, 0]], "vertex dichotomy");
    let delta = BigRational::new(BigInt::from(2 * problem.big_m() + 1), BigInt::one())
        * problem.eps();
    for vertex in [&plus, &minus] {
        let tuples = find_tuples(&problem, vertex, 2, 10_000_000).unwrap();
        for t in &tuples {
            let m1 = t.m[0];
            // {m₁·θ/π} against the window bound (2M+1)ε.
            let frac = brackets(&ratio.scale_int(2 * m1 as i64)).unwrap().frac;
            let (f, _) = frac.to_interval_parts().unwrap();
            let gap_is_four = vertex.chi == vec![1, 0];
            if gap_is_four {
                assert!(f < delta, "fractional window on the small side");
            } else {
                assert!(f > BigRational::one() - &delta, "window on the large side");
            }
            // Index gap 4 vs 6 across the jump center.
            let lo = iterate(&path, 2 * m1).unwrap();
            let hi = iterate(&path, 2 * m1 + 1).unwrap();
            let gap = (&hi.i_ekeland - &lo.i_ekeland).to_i64().unwrap();
            assert_eq!(gap, if gap_is_four { 4 } else { 6 });
        }
    }
    c.finish();
}

#[test]
fn criterion_6_commutation_experiment() {
    let c = Criterion::start("6 commutation experiment", 300.0);
    // Three orbits with mean indices in distinct quadratic fields.
    let orbits = vec![
        shear_two_rotation(surd((-1, 1), (1, 1), 2)),
        shear_two_rotation(surd((-1, 1), (1, 1), 3)),
        shear_two_rotation(surd((-2, 1), (1, 1), 5)),
    ];
    let eps = BigRational::new(BigInt::one(), BigInt::from(60));
    let probe = build_problem(orbits.clone(), eps.clone(), 1, Vec::new()).unwrap();
    let rels = derive_integer_relations(probe.v());
    let problem = build_problem(orbits, eps, 1, rels).unwrap();
    let report = commutation_experiment(&problem, 0, 1, 100_000_000, 3, 12).unwrap();
    assert!(report.found, "swap witness exists: {}", report.detail);
    let (_, t1, t2) = report.witness.as_ref().unwrap();
    assert_ne!(t1.t, t2.t);

    // Rigged problem: identical data for the pair forces the diagnostic.
    let twin = shear_two_rotation(surd((-1, 1), (1, 1), 2));
    let orbits = vec![twin.clone(), twin.clone()];
    let eps = BigRational::new(BigInt::one(), BigInt::from(60));
    let probe = build_problem(orbits.clone(), eps.clone(), 1, Vec::new()).unwrap();
    let rels = derive_integer_relations(probe.v());
    let problem = build_problem(orbits, eps, 1, rels).unwrap();
    let report = commutation_experiment(&problem, 0, 1, 1_000_000, 3, 4).unwrap();
    assert!(!report.found);
    assert!(report.forced_equality, "diagnostic: {}", report.detail);
    c.finish();
}

// --- criterion 7 ---------------------------------------------------------------

struct SubCaseGen {
    rng: ChaCha8Rng,
}

impl SubCaseGen {
    fn new(seed: u64) -> Self {
        SubCaseGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn small_rat(&mut self, lo: i64, hi: i64, den_hi: i64) -> BigRational {
        let num = self.rng.gen_range(lo..=hi);
        let den = self.rng.gen_range(1..=den_hi);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Positive irrational surd in the given field.
    fn positive_surd(&mut self, d: u64) -> ScalarValue {
        loop {
            let a = self.small_rat(0, 4, 3);
            let b = self.small_rat(1, 3, 3);
            let v = surd(
                (a.numer().to_i64().unwrap(), a.denom().to_i64().unwrap()),
                (b.numer().to_i64().unwrap(), b.denom().to_i64().unwrap()),
                d,
            );
            if matches!(v.sign(), Ok(std::cmp::Ordering::Greater)) {
                return v;
            }
        }
    }

    fn modulus(&mut self) -> u64 {
        self.rng.gen_range(3..=12)
    }

    fn nonzero_coeff(&mut self, positive: bool) -> BigRational {
        loop {
            let num = self.rng.gen_range(1..=5);
            let den = self.rng.gen_range(1..=4);
            let c = BigRational::new(BigInt::from(num), BigInt::from(den));
            if !c.is_zero() {
                return if positive { c } else { -c };
            }
        }
    }
}

fn check_window_instance(problem: &CongruenceProblem, label: &str) {
    let sol = solve_window(problem).unwrap_or_else(|e| panic!("{label}: {e}"));
    assert!(
        problem.verify(&sol).unwrap(),
        "{label}: solution fails its own congruence"
    );
    match &sol.strategy {
        Strategy::Window(tag) => assert!(
            tag.starts_with(label),
            "{label}: dispatched to {tag} instead"
        ),
        Strategy::Brute => panic!("{label}: window solver fell back to brute"),
    }
    // Independent confirmation by exhaustive scan.
    let brute = solve_brute(problem, 10_000_000).unwrap_or_else(|e| panic!("{label} brute: {e}"));
    assert!(problem.verify(&brute).unwrap());
}

#[test]
fn criterion_7_ceiling_congruences() {
    let c = Criterion::start("7 ceiling congruences", 600.0);
    let per_case = 100usize;

    // 1.1: independent pair across two fields.
    let mut g = SubCaseGen::new(71);
    for _ in 0..per_case {
        let n = g.modulus();
        let p = CongruenceProblem::new(
            vec![g.positive_surd(2), g.positive_surd(3)],
            n,
            [-1, 1, 4],
            vec![],
        )
        .unwrap();
        check_window_instance(&p, "1.1");
    }

    // 1.2(i): negative slope; (ii-a): slope 1; (ii-b): slope > 1.
    let pair_dependent = |g: &mut SubCaseGen, coeff: BigRational| {
        let a1 = g.positive_surd(2);
        let offset = g.small_rat(-3, 3, 4);
        let a2_val = a1.scale(&coeff).add(&ScalarValue::rational(offset.clone()));
        let a2 = match a2_val {
            Ok(v) if !v.is_zero_exact() => v,
            _ => return None,
        };
        let rel = AffineRelation {
            target: 1,
            terms: vec![(0, coeff)],
            offset,
        };
        let n = g.modulus();
        CongruenceProblem::new(vec![a1, a2], n, [-1, 1, 4], vec![rel]).ok()
    };
    let mut count = 0;
    while count < per_case {
        let coeff = -g.nonzero_coeff(true);
        if let Some(p) = pair_dependent(&mut g, coeff) {
            check_window_instance(&p, "1.2(i)");
            count += 1;
        }
    }
    let mut count = 0;
    while count < per_case {
        if let Some(p) = pair_dependent(&mut g, BigRational::one()) {
            check_window_instance(&p, "1.2(ii-a)");
            count += 1;
        }
    }
    let mut count = 0;
    while count < per_case {
        // Any positive slope ≠ 1: slopes below 1 are normalized by the swap.
        let coeff = g.nonzero_coeff(true);
        if coeff == BigRational::one() {
            continue;
        }
        if let Some(p) = pair_dependent(&mut g, coeff) {
            check_window_instance(&p, "1.2(ii-b)");
            count += 1;
        }
    }

    // 2.1: independent triple.
    for _ in 0..per_case {
        let n = g.modulus();
        let p = CongruenceProblem::new(
            vec![g.positive_surd(2), g.positive_surd(3), g.positive_surd(5)],
            n,
            [0, 2, 5],
            vec![],
        )
        .unwrap();
        check_window_instance(&p, "2.1");
    }

    // 2.2(i)-(iv): rank-3 triples; the composite third term spans two fields.
    let rank3 = |g: &mut SubCaseGen, c1: BigRational, c2: BigRational| {
        let a1 = g.positive_surd(2);
        let a2 = g.positive_surd(3);
        let offset = g.small_rat(-2, 3, 3);
        let a3 = composite_alpha(
            &[(a1.clone(), c1.clone()), (a2.clone(), c2.clone())],
            &offset,
        )
        .ok()?;
        let rel = AffineRelation {
            target: 2,
            terms: vec![(0, c1), (1, c2)],
            offset,
        };
        let n = g.modulus();
        CongruenceProblem::new(vec![a1, a2, a3], n, [0, 2, 5], vec![rel]).ok()
    };
    for (label, sign1, sign2) in [
        ("2.2(i)", true, true),
        ("2.2(ii)", false, false),
        ("2.2(iii)", true, false),
        ("2.2(iv)", false, true),
    ] {
        let mut count = 0;
        while count < per_case {
            let c1 = g.nonzero_coeff(sign1);
            let c2 = g.nonzero_coeff(sign2);
            if let Some(p) = rank3(&mut g, c1, c2) {
                check_window_instance(&p, label);
                count += 1;
            }
        }
    }

    // 2.3(i)-(iv): rank-2 triples over one base.
    let rank2 = |g: &mut SubCaseGen, c1: BigRational, c3: BigRational| {
        let a1 = g.positive_surd(5);
        let o2 = g.small_rat(-2, 3, 3);
        let o4 = g.small_rat(-2, 3, 3);
        let a2 = a1.scale(&c1).add(&ScalarValue::rational(o2.clone())).ok()?;
        let a3 = a1.scale(&c3).add(&ScalarValue::rational(o4.clone())).ok()?;
        if a2.is_zero_exact() || a3.is_zero_exact() {
            return None;
        }
        let rels = vec![
            AffineRelation {
                target: 1,
                terms: vec![(0, c1)],
                offset: o2,
            },
            AffineRelation {
                target: 2,
                terms: vec![(0, c3)],
                offset: o4,
            },
        ];
        let n = g.modulus();
        CongruenceProblem::new(vec![a1, a2, a3], n, [0, 2, 5], rels).ok()
    };
    for (label, sign1, sign3) in [
        ("2.3(i)", true, true),
        ("2.3(ii)", false, false),
        ("2.3(iii)", true, false),
        ("2.3(iv)", false, true),
    ] {
        let mut count = 0;
        while count < per_case {
            let c1 = g.nonzero_coeff(sign1);
            let c3 = g.nonzero_coeff(sign3);
            if let Some(p) = rank2(&mut g, c1, c3) {
                check_window_instance(&p, label);
                count += 1;
            }
        }
    }

    // Instance construction from path data, with back-substitution closure.
    let path1 = shear_two_rotation(rat(1, 3));
    let partner_rational = rotation_triple(surd((-1, 1), (1, 1), 2), surd((-5, 4), (1, 1), 2), rat(1, 4));
    let (problem, map) = lemma56_instance(&path1, &partner_rational).unwrap();
    assert_eq!(problem.modulus, 5 * 7, "N = (s1+r1)(2s+r) for r1/s1 = 1/4");
    let sol = solve_window(&problem).unwrap();
    let witness = map.witness(&problem, &sol, &path1, &partner_rational).unwrap();
    assert!((&witness.degree % BigInt::from(2)).is_zero());

    let partner_triple = rotation_triple(
        surd((-1, 1), (1, 1), 2),
        surd((-5, 4), (1, 1), 2),
        surd((-13, 10), (1, 1), 2),
    );
    let (problem, map) = lemma56_instance(&path1, &partner_triple).unwrap();
    assert_eq!(problem.modulus, 7, "N = 2s+r");
    let sol = solve_window(&problem).unwrap();
    map.witness(&problem, &sol, &path1, &partner_triple).unwrap();

    // Shear third block: rejected with the parity reason.
    let shear_partner = PathIndexData::new(
        5,
        4,
        NormalFormDecomposition {
            p_minus: 1,
            p_plus: 1,
            rotations: vec![surd((-1, 1), (1, 1), 2), surd((-5, 4), (1, 1), 2)],
            ..Default::default()
        },
    )
    .unwrap();
    match lemma56_instance(&path1, &shear_partner) {
        Err(ModSolveError::ShapeMismatch(msg)) => {
            assert!(msg.contains("2ℕ-1"), "parity reason present: {msg}")
        }
        other => panic!("expected the parity rejection, got {other:?}"),
    }
    c.finish();
}

#[test]
fn criterion_8_morse_algebra() {
    let c = Criterion::start("8 morse algebra", 30.0);

    // Squeeze equality on an ellipsoid census wherever M = b at both ends.
    let system = build_ellipsoid(&radius_sets(4)[0]).unwrap();
    let profiles: Vec<CriticalTypeProfile> = system
        .orbits
        .iter()
        .map(|o| nondegenerate_profile(&o.data).unwrap())
        .collect();
    let series = assemble_series(&profiles, 160).unwrap();
    let top = series.safe_degree.min(160);
    let mut squeezed = 0;
    for i1 in (0..top - 2).step_by(2) {
        for i2 in [i1 + 2, i1 + 6] {
            if i2 > top {
                continue;
            }
            if series.m_at(i1) == betti(i1) && series.m_at(i2) == betti(i2) {
                assert!(squeeze(&series, i1, i2).unwrap(), "squeeze at [{i1}, {i2}]");
                squeezed += 1;
            }
        }
    }
    assert!(squeezed > 20, "enough squeeze windows exercised: {squeezed}");

    // Synthetic 3-orbit window: the alternating three-term sum at the jump
    // center is -1, while every orbit's own alternating sum is 1.
    let (series, t, profiles) = claim_window_scenario();
    let two_t = 2 * t as i64;
    let m = |i: i64| series.m_at(i) as i64;
    assert_eq!(m(two_t - 2), 1);
    assert_eq!(m(two_t - 4), 1);
    assert_eq!(m(two_t - 6), 1);
    assert_eq!(
        m(two_t - 3) - m(two_t - 4) + m(two_t - 5),
        -1,
        "three-term alternating sum at the window"
    );
    for profile in &profiles {
        for mm in 1..=12u64 {
            assert_eq!(profile.alternating_sum(mm).unwrap(), 1, "per-orbit sum");
        }
    }
    c.finish();
}

/// Build the three-orbit window scenario: a rational-rotation orbit whose
/// even-iterate band has interior support, plus two irrational-elliptic
/// partners landing at the window edges.
fn claim_window_scenario() -> (symindex::morse::MorseSeries, u64, Vec<CriticalTypeProfile>) {
    let orbit1 = shear_two_rotation(rat(1, 3));
    let orbit2 = rotation_triple(
        surd((-1, 1), (1, 1), 2),
        surd((-5, 4), (1, 1), 2),
        surd((-13, 10), (1, 1), 2),
    );
    let orbit3 = rotation_triple(
        surd((-4, 3), (1, 1), 2),
        surd((2, 1), (-1, 1), 2),
        surd((-7, 5), (1, 1), 2),
    );
    let paths = vec![orbit1.clone(), orbit2.clone(), orbit3.clone()];
    let eps = BigRational::new(BigInt::one(), BigInt::from(1000));
    let probe = build_problem(paths.clone(), eps.clone(), 1, Vec::new()).unwrap();
    let rels = derive_integer_relations(probe.v());
    let problem = build_problem(paths, eps, 1, rels).unwrap();

    // Profiles: orbit 1 carries interior support k₂ on its full-period
    // classes (band [i, i+4]), top support on the short classes; the others
    // are nondegenerate.
    let k1 = compute_k(&orbit1).unwrap();
    assert_eq!(k1, 3);
    let mut table = BTreeMap::new();
    for class in 1..=k1 {
        let nu = iterate(&orbit1, class).unwrap().nu_m;
        let mut row = vec![0u32; nu as usize];
        row[nu as usize - 1 - if nu == 5 { 2 } else { 0 }] = 1;
        table.insert(class, row);
    }
    let profile1 = CriticalTypeProfile::new(orbit1.clone(), table).unwrap();
    let profile2 = nondegenerate_profile(&orbit2).unwrap();
    let profile3 = nondegenerate_profile(&orbit3).unwrap();

    // Find a tuple where the partners land on the window edges 2T-2 and
    // 2T-6 while the rational orbit's interior support sits at 2T-4.
    for seed in 1..200i64 {
        let vertex = pick_vertex(&problem, seed).unwrap();
        let Ok(tuples) = find_tuples(&problem, &vertex, 4, 40_000_000) else {
            continue;
        };
        for tuple in tuples {
            let t = tuple.t;
            let two_t = BigInt::from(2 * t);
            let band1 = iterate(&orbit1, 2 * tuple.m[0]).unwrap();
            if band1.band_top() != &two_t - 2 {
                continue;
            }
            let spots: Vec<BigInt> = [(&orbit2, tuple.m[1]), (&orbit3, tuple.m[2])]
                .iter()
                .map(|(o, m)| iterate(o, 2 * m).unwrap().i_ekeland)
                .collect();
            let hits_edges = (spots[0] == &two_t - 2 && spots[1] == &two_t - 6)
                || (spots[0] == &two_t - 6 && spots[1] == &two_t - 2);
            if !hits_edges {
                continue;
            }
            let i_max = 2 * t as i64 + 6;
            let series = assemble_series(
                &[profile1.clone(), profile2.clone(), profile3.clone()],
                i_max,
            )
            .unwrap();
            return (series, t, vec![profile1, profile2, profile3]);
        }
    }
    panic!("no aligned window tuple found in the scanned seeds");
}

#[test]
fn criterion_9_property_suites() {
    let c = Criterion::start("9 property suites", 300.0);
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    // Bracket laws on mixed random scalars.
    for _ in 0..2000 {
        let x = random_scalar(&mut rng);
        let b = brackets(&x).unwrap();
        assert_eq!(&b.ceil - &b.floor, BigInt::from(b.phi));
        let back = x
            .sub(&b.frac)
            .unwrap()
            .sub(&ScalarValue::Rational(BigRational::from_integer(b.floor.clone())))
            .unwrap();
        assert!(back.is_zero_exact());
        // Shift by an integer.
        let k: i64 = rng.gen_range(-40..=40);
        let shifted = brackets(&x.add(&ScalarValue::from_int(k)).unwrap()).unwrap();
        assert_eq!(shifted.floor, &b.floor + k);
        assert_eq!(shifted.phi, b.phi);
        assert!(scalar_eq(&shifted.frac, &b.frac));
    }

    // Decomposition round-trip on 1000 random valid decompositions, n <= 4.
    let mut done = 0;
    while done < 1000 {
        let d = random_realizable_decomposition(&mut rng);
        let m = d.realize().unwrap();
        let back = NormalFormDecomposition::decompose(&m, None).unwrap();
        assert!(back.same_as(&d), "round trip of {d:?}");
        done += 1;
    }

    // Bott-type two-sided estimate on 1000 random hypothesis-satisfying data.
    let mut done = 0;
    while done < 1000 {
        let Some(data) = random_path_data(&mut rng, true) else {
            continue;
        };
        if !mean_index_exceeds(&mean_index(&data).value, 0).unwrap_or(false) {
            continue;
        }
        for m in 1..=100u64 {
            assert!(bott_estimate_check(&data, m).unwrap());
        }
        done += 1;
    }
    // Negative control: without the N1(1,1) factor the raw inequality can
    // fail (the hypothesis is not decorative).
    let control = PathIndexData::new(
        1,
        1,
        NormalFormDecomposition {
            q_minus: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(!bott_inequality_raw(&control, 2).unwrap());

    // Uniform distribution sanity for surd ratios.
    for (d, seed) in [(2u64, 5u64), (3, 6), (5, 7)] {
        let dev = equidistribution_deviation(&sqrt(d), 1_000_000, 20, seed);
        assert!(dev < 0.02, "√{d} deviation {dev}");
    }
    c.finish();
}

fn random_scalar(rng: &mut ChaCha8Rng) -> ScalarValue {
    match rng.gen_range(0..3) {
        0 => rat(rng.gen_range(-400..=400), rng.gen_range(1..=40)),
        1 => surd(
            (rng.gen_range(-20..=20), rng.gen_range(1..=6)),
            (rng.gen_range(1..=9), rng.gen_range(1..=6)),
            [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)],
        ),
        _ => surd(
            (rng.gen_range(-20..=20), rng.gen_range(1..=6)),
            (rng.gen_range(-9..=-1), rng.gen_range(1..=6)),
            [2u64, 3, 5, 7][rng.gen_range(0..4)],
        ),
    }
}

/// Rotation ratios whose exact matrix realizations exist in the quadratic
/// tower (denominators dividing 12 or 8, excluding the half turn).
fn realizable_ratio(rng: &mut ChaCha8Rng) -> ScalarValue {
    let table = [
        (1i64, 3i64),
        (2, 3),
        (1, 4),
        (3, 4),
        (1, 6),
        (5, 6),
        (1, 8),
        (3, 8),
        (5, 8),
        (7, 8),
        (1, 12),
        (5, 12),
        (7, 12),
        (11, 12),
    ];
    let (n, d) = table[rng.gen_range(0..table.len())];
    rat(n, d)
}

fn random_realizable_decomposition(rng: &mut ChaCha8Rng) -> NormalFormDecomposition {
    loop {
        let mut budget = 4u32; // half-dimension budget
        let mut d = NormalFormDecomposition::default();
        // 4x4 blocks first so they fit.
        if budget >= 2 && rng.gen_bool(0.3) {
            d.nontrivial_n2.push(realizable_ratio(rng));
            budget -= 2;
        }
        if budget >= 2 && rng.gen_bool(0.2) {
            d.trivial_n2.push(realizable_ratio(rng));
            budget -= 2;
        }
        while budget > 0 {
            match rng.gen_range(0..8) {
                0 => d.p_minus += 1,
                1 => d.p_zero += 1,
                2 => d.p_plus += 1,
                3 => d.q_minus += 1,
                4 => d.q_zero += 1,
                5 => d.q_plus += 1,
                6 => d.rotations.push(realizable_ratio(rng)),
                _ => d.off_circle_dim += 2,
            }
            budget -= 1;
        }
        if d.half_dim() >= 1 {
            // Distinct ratios keep the canonical-order comparison stable.
            let mut all: Vec<String> = d
                .rotations
                .iter()
                .chain(&d.nontrivial_n2)
                .chain(&d.trivial_n2)
                .map(|r| format!("{r}"))
                .collect();
            all.sort();
            all.dedup();
            if all.len()
                == d.rotations.len() + d.nontrivial_n2.len() + d.trivial_n2.len()
            {
                return d;
            }
        }
    }
}

/// Random valid index data; `need_shear` forces an N1(1,1) factor.
fn random_path_data(rng: &mut ChaCha8Rng, need_shear: bool) -> Option<PathIndexData> {
    let mut d = random_realizable_decomposition(rng);
    if need_shear && d.p_minus == 0 {
        d.p_minus += 1;
    }
    // Swap some rational ratios for surds.
    for r in d.rotations.iter_mut() {
        if rng.gen_bool(0.5) {
            *r = surd((-1, 1), (1, 1), [2u64, 3, 5][rng.gen_range(0..3)]);
        }
    }
    let n = d.half_dim();
    let odd_blocks = d.p_minus + d.p_zero + d.q_minus + d.q_zero + d.q_plus + d.rotation_count();
    let mut i1 = rng.gen_range(2..=9);
    if d.off_circle_dim == 0 && (i1 - odd_blocks as i64) % 2 != 0 {
        i1 += 1;
    }
    PathIndexData::new(i1, n, d).ok()
}
