//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use bestprox::certify::{admissible_pairs_first_kind, Witness};
use bestprox::corpus::{corpus, corpus_case, run_case, run_corpus, CaseFile, CaseRun};
use bestprox::metric::{validate_metric_axioms, MetricSpec, Point};
use bestprox::pair::gap;
use bestprox::sets::{contains, dist_to_set, enumerate_profiled, SymbolicSequence};
use bestprox::solver::{error_bound, solve_first_kind, solve_second_kind, Problem};
use bestprox::{check_isometry, estimate_alpha_first_kind, estimate_alpha_second_kind, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn case(name: &str) -> CaseFile {
    corpus_case(name).unwrap_or_else(|| panic!("missing case {name}"))
}

fn timed_run(c: &CaseFile) -> Result<(CaseRun, Duration), String> {
    let start = Instant::now();
    let run = run_case(c).map_err(|e| e.to_string())?;
    Ok((run, start.elapsed()))
}

fn within_second(d: Duration) -> Result<(), String> {
    ensure(d < Duration::from_secs(1), || format!("runtime {d:?} >= 1 s"))
}

fn problem_of(c: &CaseFile) -> Result<Problem, String> {
    Problem::new(
        c.space.clone(),
        c.a.clone(),
        c.b.clone(),
        c.map_t.clone(),
        c.map_g.clone(),
        &c.analysis,
    )
    .map_err(|e| e.to_string())
}

/// Renormed sequence space, truncated at 50 coordinates.
fn criterion_1() -> Outcome {
    let c = case("c6");
    let (run, elapsed) = timed_run(&c)?;
    within_second(elapsed)?;
    let r = &run.report;
    ensure((r.gap - SQRT_2).abs() <= 1e-9 && r.attained, || {
        format!("gap {} attained {}", r.gap, r.attained)
    })?;

    // 100 points of A: random directions in the slice x1 = 1, scaled into the ball
    let n = c.space.dim;
    let z = Point::new({
        let mut v = vec![0.0; n];
        v[0] = 2.0;
        v
    });
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100 {
        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        y[0] = 0.0;
        let scale = rng.gen_range(0.0..1.0) / c.space.norm(&y).max(1e-300);
        let mut y: Vec<f64> = y.iter().map(|v| v * scale).collect();
        y[0] = 1.0;
        let y = Point::new(y);
        if !contains(&c.a, &y, 1e-12).map_err(|e| e.to_string())? {
            continue;
        }
        let d = c.space.distance(&z, &y).map_err(|e| e.to_string())?;
        ensure((d - SQRT_2).abs() <= 1e-9, || format!("d(z, {y}) = {d}"))?;
        checked += 1;
    }

    let ac = r.cert("approx_compact").ok_or("no approx_compact report")?;
    ensure(ac.verdict == Verdict::Fails, || format!("approx_compact {:?}", ac.verdict))?;
    let Some(Witness::Sequence {
        sequence: SymbolicSequence::BasisShift(seq),
        ..
    }) = &ac.witness
    else {
        return Err(format!("unexpected witness {:?}", ac.witness));
    };
    let terms = seq.terms();
    let mut worst: f64 = 0.0;
    for (i, u) in terms.iter().enumerate() {
        ensure(
            u.coords()[0] == 1.0 && u.coords().iter().filter(|v| **v != 0.0).count() == 2,
            || format!("term {u} is not e1 + e_n"),
        )?;
        for v in &terms[i + 1..] {
            worst = worst.max((c.space.distance(u, v).unwrap() - SQRT_2).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("pairwise distance off by {worst:e}"))?;
    let wac = r.cert("wac_ab").ok_or("no wac_ab report")?;
    ensure(wac.verdict == Verdict::Holds, || format!("wac(A,B) {:?}", wac.verdict))?;
    Ok(format!(
        "gap {:.12}, 100 sampled y at sqrt2, {} shift terms pairwise sqrt2 (max dev {worst:.1e}), {elapsed:?}",
        r.gap,
        terms.len()
    ))
}

/// Two rays against the punctured vertical axis.
fn criterion_2() -> Outcome {
    let c = case("c5");
    let (run, elapsed) = timed_run(&c)?;
    within_second(elapsed)?;
    let r = &run.report;
    ensure((r.gap - 1.0).abs() <= 1e-9, || format!("gap {}", r.gap))?;
    let coords = |v: &[Point]| v.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>();
    ensure(coords(&r.a0) == vec![vec![1.0, 1.0]], || format!("A0 {:?}", coords(&r.a0)))?;
    ensure(coords(&r.b0) == vec![vec![0.0, 1.0]], || format!("B0 {:?}", coords(&r.b0)))?;
    ensure(r.closure.a0.is_closed(), || format!("A0 closure {:?}", r.closure.a0))?;
    let wac = r.cert("wac_ba").ok_or("no wac_ba report")?;
    ensure(wac.verdict == Verdict::Fails, || format!("wac(B,A) {:?}", wac.verdict))?;
    let Some(Witness::Sequence {
        sequence: SymbolicSequence::Affine(seq),
        point,
        ..
    }) = &wac.witness
    else {
        return Err(format!("unexpected witness {:?}", wac.witness));
    };
    ensure(
        seq.c == vec![0.0, 0.0] && seq.a == vec![0.0, -1.0] && point.coords() == [1.0, 0.0],
        || format!("witness ({seq:?}, {point})"),
    )?;
    // replay: d(y_n, q) → d(c, q) = gap, yet q is not reached from B
    let lim = c.space.distance(&seq.limit(), point).unwrap();
    let reach = dist_to_set(&c.space, point, &c.b).map_err(|e| e.to_string())?;
    ensure((lim - r.gap).abs() <= 1e-9 && !reach.attained, || {
        format!("replay: limit {lim}, attained {}", reach.attained)
    })?;
    Ok(format!("A0 = {{(1,1)}}, B0 = {{(0,1)}}, WAC(B,A) fails at q = (1,0), {elapsed:?}"))
}

/// Sequences whose gap is approached but never attained.
fn criterion_3() -> Outcome {
    let (run, elapsed) = timed_run(&case("c4"))?;
    within_second(elapsed)?;
    let r = &run.report;
    ensure(r.gap == 1.0 && !r.attained, || format!("gap {} attained {}", r.gap, r.attained))?;
    ensure(r.a0.is_empty() && r.b0.is_empty(), || "proximal sets not empty".into())?;
    let wac = r.cert("wac_ab").ok_or("no wac_ab report")?;
    ensure(wac.verdict == Verdict::Fails, || format!("wac {:?}", wac.verdict))?;
    Ok(format!("gap 1 not attained, A0 = B0 = empty, WAC fails, {elapsed:?}"))
}

/// Segment cases, first and second kind.
fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for name in ["c1", "c2"] {
        let c = case(name);
        let start = Instant::now();
        let pr = problem_of(&c)?;
        let x0 = Point::new(vec![0.0, 1.0]);
        let out = solve_first_kind(&pr, &x0, &c.solve.config()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        within_second(elapsed)?;
        let target = Point::new(vec![0.0, 0.0]);
        ensure(out.x_star.coord_dist(&target) <= 1e-6, || format!("{name}: x* {}", out.x_star))?;
        let steps = &out.trace.steps;
        ensure(steps.len() <= 40, || format!("{name}: {} iterations", steps.len()))?;
        for s in steps {
            if let Some(ratio) = s.ratio {
                ensure((0.5 - 1e-6..=0.55).contains(&ratio), || format!("{name}: ratio {ratio}"))?;
            }
        }
        let d01 = c.space.distance(&steps[0].x_next, &steps[0].x_n).unwrap();
        for (n, s) in steps.iter().enumerate() {
            let actual = c.space.distance(&s.x_n, &out.x_star).unwrap();
            let bound = error_bound(0.5, d01, n as u32).unwrap();
            ensure(actual <= bound, || format!("{name}: n={n} d={actual} bound={bound}"))?;
        }
        if name == "c2" {
            let samples = enumerate_profiled(&c.a, c.analysis.density);
            let iso = check_isometry(&c.space, &c.map_g, &samples).map_err(|e| e.to_string())?;
            ensure(iso.holds(), || format!("c2 isometry {:?}", iso.verdict))?;
        }
        notes.push(format!("{name} {} iters", steps.len()));
    }
    let c = case("c3");
    let start = Instant::now();
    let pr = problem_of(&c)?;
    let mut images = Vec::new();
    for x0 in [Point::new(vec![0.0, 1.0]), Point::new(vec![0.0, 0.7])] {
        let out = solve_second_kind(&pr, &x0, &c.solve.config()).map_err(|e| e.to_string())?;
        for s in &out.trace.steps {
            if let Some(ratio) = s.ratio {
                ensure((0.5 - 1e-6..=0.55).contains(&ratio), || format!("c3: ratio {ratio}"))?;
            }
        }
        images.push(c.map_t.apply(&out.x_star).map_err(|e| e.to_string())?);
    }
    within_second(start.elapsed())?;
    let spread = c.space.distance(&images[0], &images[1]).unwrap();
    ensure(spread <= 1e-6, || format!("c3: image spread {spread:e}"))?;
    notes.push(format!("c3 image spread {spread:.1e}"));
    Ok(notes.join(", "))
}

/// Rational reflector on [0, 1] → [2, 3].
fn criterion_5() -> Outcome {
    let c = case("c7");
    let run = run_case(&c).map_err(|e| e.to_string())?;
    let est = estimate_alpha_first_kind(&c.space, &c.map_t, &c.a, &run.prox, &c.analysis)
        .map_err(|e| e.to_string())?;
    ensure(est.verdict == Verdict::Vacuous && est.alpha_estimate == Some(0.0), || {
        format!("{:?} alpha {:?}", est.verdict, est.alpha_estimate)
    })?;
    let pairs = admissible_pairs_first_kind(&c.space, &c.map_t, &c.a, &run.prox, &c.analysis)
        .map_err(|e| e.to_string())?;
    let coords: Vec<(f64, f64)> = pairs.iter().map(|(u, x)| (u.coords()[0], x.coords()[0])).collect();
    ensure(coords == vec![(1.0, 1.0)], || format!("admissible pairs {coords:?}"))?;
    Ok("vacuous, alpha 0, admissible pairs exactly {(1, 1)}".into())
}

/// Implications and strictness witnesses across the corpus.
fn criterion_6() -> Outcome {
    let reports = run_corpus().map_err(|e| e.to_string())?;
    let violations: usize = reports.iter().map(|r| r.implications.violations).sum();
    ensure(violations == 0, || format!("{violations} violations"))?;
    let by = |prefix: &str| reports.iter().find(|r| r.case.starts_with(prefix)).unwrap();
    ensure(by("c6").implications.wac_without_approx_compact, || {
        "c6 does not witness WAC without approximative compactness".into()
    })?;
    ensure(by("c5").implications.a0_closed_without_wac_ba, || {
        "c5 does not witness A0 closed without WAC(B,A)".into()
    })?;
    let checks: usize = reports.iter().map(|r| r.implications.checks.len()).sum();
    Ok(format!("{checks} implication checks over {} cases, 0 violations, both strictness witnesses", reports.len()))
}

fn random_sample(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| Point::new((0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()))
        .collect()
}

fn with_density(mut c: CaseFile, density: usize) -> CaseFile {
    c.analysis.density = density;
    c
}

/// Axioms, gap invariants, determinism and density monotonicity.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let specs = [
        MetricSpec::euclidean(3),
        MetricSpec::real_line(),
        MetricSpec::p_norm(3, 1.0),
        MetricSpec::p_norm(4, 3.5),
        MetricSpec::max_combined(5, SQRT_2),
        MetricSpec::discrete(2),
    ];
    for spec in &specs {
        // 22 points give 22³ = 10648 ordered triples
        let sample = random_sample(&mut rng, spec.dim, 22);
        let report = validate_metric_axioms(spec, &sample);
        ensure(report.passed && report.triples_checked >= 10_000, || {
            format!("{:?}: {:?}", spec.kind, report.violation)
        })?;
    }

    for c in corpus() {
        let ab = gap(&c.space, &c.a, &c.b, &c.analysis).map_err(|e| e.to_string())?;
        let ba = gap(&c.space, &c.b, &c.a, &c.analysis).map_err(|e| e.to_string())?;
        ensure(ab.gap == ba.gap && ab.attained == ba.attained, || {
            format!("{}: gap {} vs {}", c.name, ab.gap, ba.gap)
        })?;
        let xs = enumerate_profiled(&c.a, c.analysis.density.min(51));
        let ys = enumerate_profiled(&c.b, c.analysis.density.min(51));
        for x in &xs {
            for y in &ys {
                let d = c.space.distance(x, y).unwrap();
                ensure(ab.gap <= d + 1e-12, || format!("{}: gap {} > d({x}, {y}) = {d}", c.name, ab.gap))?;
            }
        }
    }

    let first: Vec<String> = run_corpus().map_err(|e| e.to_string())?.iter().map(|r| r.to_json()).collect();
    let second: Vec<String> = run_corpus().map_err(|e| e.to_string())?.iter().map(|r| r.to_json()).collect();
    ensure(first == second, || "corpus reports differ between runs".into())?;

    let mut compared = 0;
    for c in corpus() {
        let coarse = with_density(c.clone(), 51);
        let fine = with_density(c.clone(), 101);
        let pc = problem_of(&coarse)?;
        let pf = problem_of(&fine)?;
        for second_kind in [false, true] {
            let est = |c: &CaseFile, p: &Problem| {
                if second_kind {
                    estimate_alpha_second_kind(&c.space, &c.map_t, &c.a, &p.prox, &c.analysis)
                } else {
                    estimate_alpha_first_kind(&c.space, &c.map_t, &c.a, &p.prox, &c.analysis)
                }
                .map_err(|e| e.to_string())
            };
            let lo = est(&coarse, &pc)?.alpha_estimate.unwrap_or(0.0);
            let hi = est(&fine, &pf)?.alpha_estimate.unwrap_or(0.0);
            ensure(lo <= hi + 1e-12, || format!("{}: alpha {lo} at 51 > {hi} at 101", c.name))?;
            compared += 1;
        }
    }
    Ok(format!(
        "{} specs x 10648 triples, gap invariants on {} pairs, byte-identical reports, {compared} monotone alpha pairs",
        specs.len(),
        corpus().len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("renormed space: gap, d(z,y), approx-compactness, WAC", criterion_1),
        ("punctured axis: proximal sets, closedness, WAC(B,A)", criterion_2),
        ("inverse sequences: unattained gap, WAC fails", criterion_3),
        ("segment cases: convergence, ratios, bounds, uniqueness", criterion_4),
        ("rational reflector: vacuous contraction", criterion_5),
        ("implication suite", criterion_6),
        ("property suite", criterion_7),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {title} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {title} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
