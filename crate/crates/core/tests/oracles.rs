//! Closed-form and brute-force oracles for the corpus values.

use std::f64::consts::SQRT_2;

use bestprox::corpus::{corpus_case, run_case, CaseFile, RENORMED_DIM};
use bestprox::metric::{MetricSpec, Point};
use bestprox::sets::{dist_to_set, SetDescriptor, SymbolicSequence};
use bestprox::solver::{error_bound, solve_first_kind, Problem};
use bestprox::admissible_pairs_first_kind;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn case(name: &str) -> CaseFile {
    corpus_case(name).unwrap()
}

fn problem(c: &CaseFile) -> Problem {
    Problem::new(
        c.space.clone(),
        c.a.clone(),
        c.b.clone(),
        c.map_t.clone(),
        c.map_g.clone(),
        &c.analysis,
    )
    .unwrap()
}

#[test]
fn segment_orbits_halve_exactly() {
    // both the plain and the reflected segment case give t_n = 2^-n from t_0 = 1
    for name in ["c1", "c2"] {
        let c = case(name);
        let out = solve_first_kind(&problem(&c), &Point::new(vec![0.0, 1.0]), &c.solve.config()).unwrap();
        for (n, s) in out.trace.steps.iter().enumerate() {
            let t = 0.5f64.powi(n as i32);
            assert_eq!(s.x_n.coords(), &[0.0, t], "{name} n={n}");
            if let Some(r) = s.ratio {
                assert!((r - 0.5).abs() < 1e-12, "{name} ratio {r}");
            }
        }
    }
}

#[test]
fn error_bound_is_the_geometric_tail() {
    for (alpha, d01) in [(0.5f64, 0.5f64), (0.25, 3.0), (0.9, 0.01)] {
        for n in 0..30u32 {
            let expected = alpha.powi(n as i32) / (1.0 - alpha) * d01;
            assert!((error_bound(alpha, d01, n).unwrap() - expected).abs() <= 1e-15 * expected.max(1.0));
        }
    }
}

#[test]
fn inverse_sequence_gap_by_enumeration() {
    let mut best = f64::INFINITY;
    for n in 1..=2000u32 {
        let a = -1.0 / n as f64;
        best = best.min(1.0 - a);
        for m in 1..=2000u32 {
            best = best.min(1.0 + 1.0 / m as f64 - a);
        }
    }
    // every pair exceeds 1 and the minimum approaches it
    assert!(best > 1.0 && best - 1.0 < 1e-3);
    let r = run_case(&case("c4")).unwrap().report;
    assert_eq!(r.gap, 1.0);
    assert!(!r.attained);
}

#[test]
fn distance_to_inverse_sequence_is_unattained() {
    let set = SetDescriptor::profiled(
        vec![],
        vec![SymbolicSequence::affine(vec![0.0], vec![-1.0], 1, false)],
        false,
    );
    let brute = (1..=100_000u32)
        .map(|n| 1.0 + 1.0 / n as f64)
        .fold(f64::INFINITY, f64::min);
    assert!(brute > 1.0);
    let d = dist_to_set(&MetricSpec::real_line(), &Point::new(vec![1.0]), &set).unwrap();
    assert_eq!(d.value, 1.0);
    assert!(!d.attained);
    assert_eq!(d.witness.coords(), &[0.0]);
}

#[test]
fn punctured_axis_proximal_points_by_grid() {
    // (s, h) with s >= 1, h in {0, 1} against (0, y), y != 0
    let mut pairs = Vec::new();
    let mut best = f64::INFINITY;
    for i in 0..=40 {
        let s = 1.0 + i as f64 * 0.25;
        for h in [0.0, 1.0] {
            for j in -80..=80 {
                if j == 0 {
                    continue;
                }
                let y = j as f64 * 0.025;
                let d = ((s * s) + (h - y) * (h - y)).sqrt();
                if d < best - 1e-12 {
                    best = d;
                    pairs.clear();
                }
                if (d - best).abs() <= 1e-12 {
                    pairs.push(((s, h), y));
                }
            }
        }
    }
    assert_eq!(best, 1.0);
    assert_eq!(pairs, vec![((1.0, 1.0), 1.0)]);
    let r = run_case(&case("c5")).unwrap().report;
    assert_eq!(r.a0.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(), vec![vec![1.0, 1.0]]);
    assert_eq!(r.b0.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(), vec![vec![0.0, 1.0]]);
}

fn renormed(v: &[f64]) -> f64 {
    let l2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let linf = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    l2.max(SQRT_2 * linf)
}

#[test]
fn renormed_norm_and_gap_by_hand() {
    let c = case("c6");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let x: Vec<f64> = (0..RENORMED_DIM).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..RENORMED_DIM).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let d = c.space.distance(&Point::new(x), &Point::new(y)).unwrap();
        assert!((d - renormed(&diff)).abs() <= 1e-12);
    }
    // basis shifts e1 + e_n sit in A at distance sqrt2 from 2 e1 and from each other
    let mut z = vec![0.0; RENORMED_DIM];
    z[0] = 2.0;
    for n in 1..RENORMED_DIM {
        let mut y = vec![0.0; RENORMED_DIM];
        y[0] = 1.0;
        y[n] = 1.0;
        assert!((renormed(&y) - SQRT_2).abs() < 1e-15);
        let diff: Vec<f64> = z.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!((renormed(&diff) - SQRT_2).abs() < 1e-15);
    }
    let r = run_case(&c).unwrap().report;
    assert!((r.gap - SQRT_2).abs() <= 1e-12);
}

#[test]
fn reflector_admissible_pairs_by_exact_enumeration() {
    // u, x rationals in [0, 1] with |u - (3 - x)| = 1
    let mut found = Vec::new();
    for q in 1..=24i64 {
        for p in 0..=q {
            for s in 1..=24i64 {
                for r in 0..=s {
                    let x = Rational64::new(p, q);
                    let u = Rational64::new(r, s);
                    let tx = Rational64::from_integer(3) - x;
                    if tx - u == Rational64::from_integer(1) && !found.contains(&(u, x)) {
                        found.push((u, x));
                    }
                }
            }
        }
    }
    let one = Rational64::from_integer(1);
    assert_eq!(found, vec![(one, one)]);

    let c = case("c7");
    let run = run_case(&c).unwrap();
    let pairs = admissible_pairs_first_kind(&c.space, &c.map_t, &c.a, &run.prox, &c.analysis).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0].0.coords(), &[1.0]);
    assert_eq!(pairs[0].1.coords(), &[1.0]);
    for p in 0..=12i64 {
        let x = Point::from_rationals(vec![Rational64::new(p, 12)]);
        let tx = c.map_t.apply(&x).unwrap();
        assert_eq!(tx.exact().unwrap()[0], Rational64::from_integer(3) - Rational64::new(p, 12));
    }
}
