use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use symindex::iteration::{iterate, jump_window, PathIndexData};
use symindex::kronecker::*;
use symindex::numeric::{brackets, frac_f64, ScalarValue};
use symindex::symplectic::NormalFormDecomposition;

fn rat(n: i64, d: i64) -> ScalarValue { ScalarValue::from_ratio(n, d) }
fn surd(a: (i64, i64), b: (i64, i64), d: u64) -> ScalarValue {
    ScalarValue::surd(BigRational::new(a.0.into(), a.1.into()), BigRational::new(b.0.into(), b.1.into()), d).unwrap()
}

fn main() {
    let orbit1 = PathIndexData::new(4, 4, NormalFormDecomposition {
        p_minus: 1, p_plus: 2, rotations: vec![rat(1,3)], ..Default::default() }).unwrap();
    let orbit2 = PathIndexData::new(4, 4, NormalFormDecomposition {
        p_minus: 1, rotations: vec![surd((-1,1),(1,1),2), surd((-5,4),(1,1),2), surd((-13,10),(1,1),2)], ..Default::default() }).unwrap();
    let orbit3 = PathIndexData::new(4, 4, NormalFormDecomposition {
        p_minus: 1, rotations: vec![surd((-4,3),(1,1),2), surd((2,1),(-1,1),2), surd((-7,5),(1,1),2)], ..Default::default() }).unwrap();
    let paths = vec![orbit1.clone(), orbit2.clone(), orbit3.clone()];
    let eps = BigRational::new(BigInt::one(), BigInt::from(1000));
    let probe = build_problem(paths.clone(), eps.clone(), 1, Vec::new()).unwrap();
    let rels = derive_integer_relations(probe.v());
    let problem = build_problem(paths.clone(), eps, 1, rels).unwrap();
    let vertex = pick_vertex(&problem, 1).unwrap();
    println!("chi = {:?}", vertex.chi);
    println!("v f64 = {:?}", problem.v().iter().map(|x| x.to_f64()).collect::<Vec<_>>());
    // manual prefilter count
    let vf: Vec<f64> = problem.v().iter().map(|x| x.to_f64()).collect();
    let cf: Vec<f64> = vertex.chi.iter().map(|&c| c as f64).collect();
    let mut pass = 0u64;
    let mut best = (1.0f64, 0u64);
    for t in 1..=40_000_000u64 {
        let mut worst: f64 = 0.0;
        for (v, c) in vf.iter().zip(&cf) {
            let r = (frac_f64(t as f64 * v) - c).abs();
            worst = worst.max(r);
            if worst >= 2e-3 { break; }
        }
        if worst < best.0 { best = (worst, t); }
        if worst < 1.1e-3 {
            pass += 1;
            if pass < 6 {
                println!("candidate T={t} worst={worst:.2e}");
                // verify windows
                let m: Vec<u64> = (0..3).map(|k| {
                    let fl = brackets(&problem.v()[k].scale_int(t as i64)).unwrap().floor;
                    let mk = (fl + BigInt::from(vertex.chi[k])) * BigInt::from(problem.big_m());
                    u64::try_from(mk).unwrap()
                }).collect();
                for (idx, (d, mk)) in paths.iter().zip(&m).enumerate() {
                    let w = jump_window(d, *mk, t).unwrap();
                    if !w.all_satisfied {
                        for c in &w.checks { if !c.satisfied { println!("  orbit{idx} FAIL {}: {} vs {}", c.label, c.lhs, c.rhs); } }
                    } else { println!("  orbit{idx} ok (m={mk})"); }
                }
            }
        }
    }
    println!("prefilter-passing T count: {pass}, best residual {:.3e} at T={}", best.0, best.1);
}
