//! Case files, the built-in corpus and the analyze → certify → solve pipeline.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::certify::{
    check_approx_compact, check_implications, check_isometry, check_preserves_isometric_distance,
    check_wac, estimate_alpha_first_kind, estimate_alpha_second_kind, CertReport, ImplicationInputs,
    ImplicationReport, Verdict, Witness,
};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::metric::{MetricSpec, Point};
use crate::pair::{is_closed_in_profile, AnalysisConfig, ClosureVerdict, ProximalData, SubsetProfile};
use crate::sets::{enumerate_profiled, SetDescriptor, SymbolicSequence};
use crate::solver::{solve_first_kind, solve_second_kind, ContractionKind, IterationTrace, Problem, SolveConfig};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredFlags {
    #[serde(rename = "A_closed")]
    pub a_closed: bool,
    #[serde(rename = "B_closed")]
    pub b_closed: bool,
}

fn first_kind() -> ContractionKind {
    ContractionKind::First
}

/// Solver settings plus the iteration kind and start points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(default = "first_kind")]
    pub kind: ContractionKind,
    #[serde(default)]
    pub starts: Vec<Point>,
    #[serde(default = "defaults::eps_eq")]
    pub eps_eq: f64,
    #[serde(default = "defaults::eps_stop")]
    pub eps_stop: f64,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hint: Option<f64>,
}

mod defaults {
    use crate::solver::SolveConfig;

    pub fn eps_eq() -> f64 {
        SolveConfig::default().eps_eq
    }
    pub fn eps_stop() -> f64 {
        SolveConfig::default().eps_stop
    }
    pub fn max_iter() -> usize {
        SolveConfig::default().max_iter
    }
    pub fn gap_tol() -> f64 {
        1e-9
    }
    pub fn x_tol() -> f64 {
        1e-6
    }
    pub fn alpha_tol() -> f64 {
        1e-6
    }
}

impl Default for SolveSection {
    fn default() -> Self {
        SolveSection::new(ContractionKind::First, Vec::new())
    }
}

impl SolveSection {
    pub fn new(kind: ContractionKind, starts: Vec<Point>) -> Self {
        let c = SolveConfig::default();
        SolveSection {
            kind,
            starts,
            eps_eq: c.eps_eq,
            eps_stop: c.eps_stop,
            max_iter: c.max_iter,
            alpha_hint: c.alpha_hint,
        }
    }

    pub fn config(&self) -> SolveConfig {
        SolveConfig {
            eps_eq: self.eps_eq,
            eps_stop: self.eps_stop,
            max_iter: self.max_iter,
            alpha_hint: self.alpha_hint,
        }
    }
}

/// Expected outputs; every present field becomes one assertion.
///
/// Verdict and witness keys name certificates: `isometry`,
/// `preserves_isometric_distance`, `contraction_first_kind`,
/// `contraction_second_kind`, `approx_compact`, `wac_ab`, `wac_ba`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default = "defaults::gap_tol")]
    pub gap_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attained: Option<bool>,
    #[serde(default, rename = "A0", skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<Point>>,
    #[serde(default, rename = "B0", skip_serializing_if = "Option::is_none")]
    pub b0: Option<Vec<Point>>,
    #[serde(default, rename = "A0_empty", skip_serializing_if = "Option::is_none")]
    pub a0_empty: Option<bool>,
    #[serde(default, rename = "B0_empty", skip_serializing_if = "Option::is_none")]
    pub b0_empty: Option<bool>,
    #[serde(default, rename = "A0_closed", skip_serializing_if = "Option::is_none")]
    pub a0_closed: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, Verdict>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witness_points: BTreeMap<String, Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "defaults::alpha_tol")]
    pub alpha_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Point>,
    #[serde(default = "defaults::x_tol")]
    pub x_tol: f64,
    /// Bound on `d(T x*, T x*')` across all starts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implication_violations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub space: MetricSpec,
    #[serde(rename = "A")]
    pub a: SetDescriptor,
    #[serde(rename = "B")]
    pub b: SetDescriptor,
    #[serde(rename = "map_T")]
    pub map_t: MapSpec,
    #[serde(default)]
    pub map_g: MapSpec,
    pub declared_flags: DeclaredFlags,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl CaseFile {
    pub fn from_json(text: &str) -> Result<CaseFile> {
        let case: CaseFile = serde_json::from_str(text)?;
        case.validate()?;
        Ok(case)
    }

    pub fn load(path: &Path) -> Result<CaseFile> {
        CaseFile::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case files serialise")
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        for set in [&self.a, &self.b] {
            set.validate()?;
            let d = set.dim()?;
            if d != self.space.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.space.dim,
                    found: d,
                });
            }
        }
        self.map_t.validate()?;
        self.map_g.validate()?;
        self.analysis.validate()?;
        self.solve.config().validate()?;
        for s in &self.solve.starts {
            s.check_dim(self.space.dim)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    #[serde(rename = "A0")]
    pub a0: ClosureVerdict,
    #[serde(rename = "B0")]
    pub b0: ClosureVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub start: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Point>,
    pub iters: usize,
    pub alpha_observed: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub kind: ContractionKind,
    pub ran: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Outcome of the first start.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Point>,
    pub iters: usize,
    pub alpha_observed: f64,
    pub runs: Vec<RunSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub analysis: AnalysisConfig,
    pub solve: SolveConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub gap: f64,
    pub attained: bool,
    #[serde(rename = "a0")]
    pub a0: Vec<Point>,
    #[serde(rename = "b0")]
    pub b0: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_pair: Option<(Point, Point)>,
    pub certs: Vec<CertReport>,
    pub closure: ClosureReport,
    pub implications: ImplicationReport,
    pub solve: SolveSummary,
    pub config: ResolvedConfig,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl CaseReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    /// Certificate by name, with `wac_ab` / `wac_ba` for the two WAC orders.
    pub fn cert(&self, key: &str) -> Option<&CertReport> {
        let idx = CERT_KEYS.iter().position(|k| *k == key)?;
        self.certs.get(idx)
    }
}

/// Certificate keys in the order they appear in [`CaseReport::certs`].
pub const CERT_KEYS: [&str; 7] = [
    "isometry",
    "preserves_isometric_distance",
    "contraction_first_kind",
    "contraction_second_kind",
    "approx_compact",
    "wac_ab",
    "wac_ba",
];

/// Everything produced by one case run.
#[derive(Clone, Debug)]
pub struct CaseRun {
    pub report: CaseReport,
    pub prox: ProximalData,
    pub traces: Vec<IterationTrace>,
}

fn dedup_coords(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.coords() == p.coords()) {
            out.push(p);
        }
    }
    out
}

fn same_point_set(got: &[Point], want: &[Point], tol: f64) -> bool {
    got.len() == want.len()
        && want.iter().all(|w| got.iter().any(|g| g.coord_dist(w) <= tol))
        && got.iter().all(|g| want.iter().any(|w| g.coord_dist(w) <= tol))
}

fn witness_point(w: &Witness) -> &Point {
    match w {
        Witness::Pair { x, .. } => x,
        Witness::Quadruple { x, .. } => x,
        Witness::Sequence { point, .. } => point,
        Witness::Unattained { point, .. } => point,
    }
}

/// Runs the full pipeline on one case.
pub fn run_case(case: &CaseFile) -> Result<CaseRun> {
    case.validate()?;
    let spec = &case.space;
    let cfg = &case.analysis;
    let solve_cfg = case.solve.config();
    let problem = Problem::new(
        spec.clone(),
        case.a.clone(),
        case.b.clone(),
        case.map_t.clone(),
        case.map_g.clone(),
        cfg,
    )?;
    let prox = problem.prox.clone();
    let samples = dedup_coords(enumerate_profiled(&case.a, cfg.density));

    let mut wac_ab = check_wac(spec, &case.a, &case.b, &prox, cfg)?;
    wac_ab.property = "wac_ab".into();
    let mut wac_ba = check_wac(spec, &case.b, &case.a, &prox.swapped(), cfg)?;
    wac_ba.property = "wac_ba".into();
    let certs = vec![
        check_isometry(spec, &case.map_g, &samples)?,
        check_preserves_isometric_distance(spec, &case.map_t, &case.map_g, &samples)?,
        estimate_alpha_first_kind(spec, &case.map_t, &case.a, &prox, cfg)?,
        estimate_alpha_second_kind(spec, &case.map_t, &case.a, &prox, cfg)?,
        check_approx_compact(spec, &case.a, &case.b, cfg)?,
        wac_ab,
        wac_ba,
    ];

    let seqs = |s: &SetDescriptor| -> Vec<SymbolicSequence> {
        s.declared_sequences().into_iter().cloned().collect()
    };
    let closure = ClosureReport {
        a0: is_closed_in_profile(
            spec,
            &SubsetProfile {
                set: &case.a,
                partner: &case.b,
                gap: prox.gap,
            },
            &prox.a0_sample,
            &seqs(&case.a),
            cfg,
        ),
        b0: is_closed_in_profile(
            spec,
            &SubsetProfile {
                set: &case.b,
                partner: &case.a,
                gap: prox.gap,
            },
            &prox.b0_sample,
            &seqs(&case.b),
            cfg,
        ),
    };
    let implications = check_implications(&ImplicationInputs {
        a_closed: case.declared_flags.a_closed,
        b_closed: case.declared_flags.b_closed,
        approx_compact: Some(&certs[4]),
        wac_ab: Some(&certs[5]),
        wac_ba: Some(&certs[6]),
        a0_closure: Some(&closure.a0),
        b0_closure: Some(&closure.b0),
    })?;

    let kind = case.solve.kind;
    let contraction = match kind {
        ContractionKind::First => &certs[2],
        ContractionKind::Second => &certs[3],
    };
    let mut solve = SolveSummary {
        kind,
        ran: false,
        reason: None,
        x_star: None,
        iters: 0,
        alpha_observed: 0.0,
        runs: Vec::new(),
    };
    let mut traces = Vec::new();
    if !prox.attained {
        solve.reason = Some("gap not attained: proximal set is empty".into());
    } else if !matches!(contraction.verdict, Verdict::Holds | Verdict::Vacuous) {
        solve.reason = Some(format!("{} verdict is {:?}", contraction.property, contraction.verdict).to_lowercase());
    } else if case.solve.starts.is_empty() {
        solve.reason = Some("no start points".into());
    } else {
        solve.ran = true;
        for start in &case.solve.starts {
            let out = match kind {
                ContractionKind::First => solve_first_kind(&problem, start, &solve_cfg),
                ContractionKind::Second => solve_second_kind(&problem, start, &solve_cfg),
            };
            solve.runs.push(match out {
                Ok(o) => {
                    let s = RunSummary {
                        start: start.clone(),
                        x_star: Some(o.x_star.clone()),
                        iters: o.trace.steps.len(),
                        alpha_observed: o.trace.alpha_observed,
                        converged: o.trace.converged,
                        error: None,
                    };
                    traces.push(o.trace);
                    s
                }
                Err(e) => RunSummary {
                    start: start.clone(),
                    x_star: None,
                    iters: 0,
                    alpha_observed: 0.0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            });
        }
        if let Some(first) = solve.runs.first() {
            solve.x_star = first.x_star.clone();
            solve.iters = first.iters;
            solve.alpha_observed = first.alpha_observed;
        }
    }

    let mut report = CaseReport {
        case: case.name.clone(),
        gap: prox.gap,
        attained: prox.attained,
        a0: prox.a0_sample.clone(),
        b0: prox.b0_sample.clone(),
        limit_pair: prox.limit_pair.clone(),
        certs,
        closure,
        implications,
        solve,
        config: ResolvedConfig {
            analysis: cfg.clone(),
            solve: solve_cfg,
        },
        assertions: Vec::new(),
        passed: true,
    };
    if let Some(exp) = &case.expected {
        report.assertions = evaluate(exp, &report, &problem)?;
    }
    report.passed = report.assertions.iter().all(|a| a.passed);
    Ok(CaseRun {
        report,
        prox,
        traces,
    })
}

fn evaluate(exp: &Expected, r: &CaseReport, problem: &Problem) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| {
        out.push(Assertion { name, passed, detail });
    };
    if let Some(g) = exp.gap {
        push(
            "gap".into(),
            (r.gap - g).abs() <= exp.gap_tol,
            format!("got {} want {} ± {:e}", r.gap, g, exp.gap_tol),
        );
    }
    if let Some(a) = exp.attained {
        push("attained".into(), r.attained == a, format!("got {} want {a}", r.attained));
    }
    if let Some(e) = exp.a0_empty {
        push("A0_empty".into(), r.a0.is_empty() == e, format!("{} points", r.a0.len()));
    }
    if let Some(e) = exp.b0_empty {
        push("B0_empty".into(), r.b0.is_empty() == e, format!("{} points", r.b0.len()));
    }
    if let Some(want) = &exp.a0 {
        push(
            "A0".into(),
            same_point_set(&r.a0, want, exp.gap_tol),
            format!("{} points", r.a0.len()),
        );
    }
    if let Some(want) = &exp.b0 {
        push(
            "B0".into(),
            same_point_set(&r.b0, want, exp.gap_tol),
            format!("{} points", r.b0.len()),
        );
    }
    if let Some(c) = exp.a0_closed {
        push(
            "A0_closed".into(),
            r.closure.a0.is_closed() == c,
            format!("{:?}", r.closure.a0),
        );
    }
    for (key, want) in &exp.verdicts {
        let got = r.cert(key).map(|c| c.verdict);
        push(
            format!("verdict {key}"),
            got == Some(*want),
            format!("got {got:?} want {want:?}"),
        );
    }
    for (key, want) in &exp.witness_points {
        let got = r.cert(key).and_then(|c| c.witness.as_ref()).map(witness_point);
        push(
            format!("witness {key}"),
            got.is_some_and(|p| p.coord_dist(want) <= exp.gap_tol),
            format!("got {}", got.map_or("none".into(), |p| p.to_string())),
        );
    }
    if let Some(a) = exp.alpha {
        let key = match r.solve.kind {
            ContractionKind::First => "contraction_first_kind",
            ContractionKind::Second => "contraction_second_kind",
        };
        let got = r.cert(key).and_then(|c| c.alpha_estimate);
        push(
            "alpha".into(),
            got.is_some_and(|g| (g - a).abs() <= exp.alpha_tol),
            format!("got {got:?} want {a}"),
        );
    }
    if let Some(x) = &exp.x_star {
        let ok = !r.solve.runs.is_empty()
            && r.solve
                .runs
                .iter()
                .all(|run| run.x_star.as_ref().is_some_and(|s| s.coord_dist(x) <= exp.x_tol));
        push("x_star".into(), ok, format!("runs {}", r.solve.runs.len()));
    }
    if let Some(tol) = exp.image_spread {
        let images: Vec<Point> = r
            .solve
            .runs
            .iter()
            .filter_map(|run| run.x_star.as_ref())
            .map(|x| problem.t.apply(x))
            .collect::<Result<_>>()?;
        let spread = images
            .iter()
            .flat_map(|a| images.iter().map(move |b| problem.spec.dist(a, b)))
            .fold(0.0, f64::max);
        push(
            "image_spread".into(),
            images.len() == r.solve.runs.len() && images.len() >= 2 && spread <= tol,
            format!("spread {spread:e} over {} runs", images.len()),
        );
    }
    if let Some(v) = exp.implication_violations {
        push(
            "implication_violations".into(),
            r.implications.violations == v,
            format!("got {}", r.implications.violations),
        );
    }
    Ok(out)
}

fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec())
}

fn verdicts(items: &[(&str, Verdict)]) -> BTreeMap<String, Verdict> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn segment(x: f64, lo: f64, hi: f64) -> SetDescriptor {
    SetDescriptor::interval(pt(&[x, 0.0]), 1, lo, hi)
}

fn line_case(name: &str, description: &str, lo: f64, t: MapSpec, g: MapSpec, solve: SolveSection) -> CaseFile {
    CaseFile {
        name: name.into(),
        description: Some(description.into()),
        space: MetricSpec::euclidean(2),
        a: segment(0.0, lo, 1.0),
        b: segment(1.0, lo, 1.0),
        map_t: t,
        map_g: g,
        declared_flags: DeclaredFlags {
            a_closed: true,
            b_closed: true,
        },
        solve,
        analysis: AnalysisConfig::default(),
        expected: None,
    }
}

fn c1() -> CaseFile {
    let mut c = line_case(
        "c1_line_identity",
        "Parallel unit segments, T(0,t) = (1,t/2), g = identity, first kind",
        0.0,
        MapSpec::builtin("line_half"),
        MapSpec::identity(),
        SolveSection::new(ContractionKind::First, vec![pt(&[0.0, 1.0])]),
    );
    c.expected = Some(Expected {
        gap: Some(1.0),
        attained: Some(true),
        verdicts: verdicts(&[
            ("isometry", Verdict::Holds),
            ("contraction_first_kind", Verdict::Holds),
            ("approx_compact", Verdict::Holds),
            ("wac_ab", Verdict::Holds),
            ("wac_ba", Verdict::Holds),
        ]),
        alpha: Some(0.5),
        x_star: Some(pt(&[0.0, 0.0])),
        implication_violations: Some(0),
        ..expected_defaults()
    });
    c
}

fn c2() -> CaseFile {
    let mut c = line_case(
        "c2_line_reflection",
        "Segments over [-1,1], T(0,t) = (1,-t/2), g(0,t) = (0,-t), first kind",
        -1.0,
        MapSpec::builtin("line_reflect_half"),
        MapSpec::affine(vec![vec![1.0, 0.0], vec![0.0, -1.0]], vec![0.0, 0.0]),
        SolveSection::new(ContractionKind::First, vec![pt(&[0.0, 1.0])]),
    );
    c.expected = Some(Expected {
        gap: Some(1.0),
        attained: Some(true),
        verdicts: verdicts(&[
            ("isometry", Verdict::Holds),
            ("preserves_isometric_distance", Verdict::Holds),
            ("contraction_first_kind", Verdict::Holds),
        ]),
        alpha: Some(0.5),
        x_star: Some(pt(&[0.0, 0.0])),
        implication_violations: Some(0),
        ..expected_defaults()
    });
    c
}

fn c3() -> CaseFile {
    let mut c = line_case(
        "c3_line_second_kind",
        "Parallel unit segments, T(0,t) = (1,t/2), second kind from two starts",
        0.0,
        MapSpec::builtin("line_half"),
        MapSpec::identity(),
        SolveSection::new(ContractionKind::Second, vec![pt(&[0.0, 1.0]), pt(&[0.0, 0.7])]),
    );
    c.expected = Some(Expected {
        gap: Some(1.0),
        verdicts: verdicts(&[
            ("preserves_isometric_distance", Verdict::Holds),
            ("contraction_second_kind", Verdict::Holds),
        ]),
        alpha: Some(0.5),
        x_star: Some(pt(&[0.0, 0.0])),
        image_spread: Some(1e-6),
        implication_violations: Some(0),
        ..expected_defaults()
    });
    c
}

fn c4() -> CaseFile {
    CaseFile {
        name: "c4_inverse_sequences".into(),
        description: Some("A = {-1/n}, B = {1+1/n} with 1: gap 1 approached but never attained".into()),
        space: MetricSpec::real_line(),
        a: SetDescriptor::profiled(
            vec![],
            vec![SymbolicSequence::affine(vec![0.0], vec![-1.0], 1, false)],
            false,
        ),
        b: SetDescriptor::profiled(
            vec![pt(&[1.0])],
            vec![SymbolicSequence::affine(vec![1.0], vec![1.0], 1, true)],
            true,
        ),
        map_t: MapSpec::affine(vec![vec![-1.0]], vec![1.0]),
        map_g: MapSpec::identity(),
        declared_flags: DeclaredFlags {
            a_closed: false,
            b_closed: true,
        },
        solve: SolveSection::new(ContractionKind::First, vec![]),
        analysis: AnalysisConfig::default(),
        expected: Some(Expected {
            gap: Some(1.0),
            attained: Some(false),
            a0_empty: Some(true),
            b0_empty: Some(true),
            verdicts: verdicts(&[("wac_ab", Verdict::Fails)]),
            witness_points: [("wac_ab".to_string(), pt(&[1.0]))].into_iter().collect(),
            implication_violations: Some(0),
            ..expected_defaults()
        }),
    }
}

fn c5() -> CaseFile {
    CaseFile {
        name: "c5_punctured_axis".into(),
        description: Some(
            "Two horizontal rays from (1,1) and (1,0) against the vertical axis without the origin".into(),
        ),
        space: MetricSpec::euclidean(2),
        a: SetDescriptor::union(vec![
            SetDescriptor::ray(pt(&[1.0, 1.0]), vec![1.0, 0.0]),
            SetDescriptor::ray(pt(&[1.0, 0.0]), vec![1.0, 0.0]),
        ]),
        b: SetDescriptor::union(vec![
            SetDescriptor::open_ray(pt(&[0.0, 0.0]), vec![0.0, 1.0]),
            SetDescriptor::open_ray(pt(&[0.0, 0.0]), vec![0.0, -1.0]),
            SetDescriptor::profiled(
                vec![],
                vec![SymbolicSequence::affine(vec![0.0, 0.0], vec![0.0, -1.0], 1, false)],
                false,
            ),
        ]),
        map_t: MapSpec::affine(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.0, 1.0]),
        map_g: MapSpec::identity(),
        declared_flags: DeclaredFlags {
            a_closed: true,
            b_closed: false,
        },
        solve: SolveSection::new(ContractionKind::First, vec![pt(&[1.0, 1.0])]),
        analysis: AnalysisConfig::default(),
        expected: Some(Expected {
            gap: Some(1.0),
            attained: Some(true),
            a0: Some(vec![pt(&[1.0, 1.0])]),
            b0: Some(vec![pt(&[0.0, 1.0])]),
            a0_closed: Some(true),
            verdicts: verdicts(&[("wac_ba", Verdict::Fails)]),
            witness_points: [("wac_ba".to_string(), pt(&[1.0, 0.0]))].into_iter().collect(),
            x_star: Some(pt(&[1.0, 1.0])),
            implication_violations: Some(0),
            ..expected_defaults()
        }),
    }
}

/// Truncation dimension of the renormed sequence-space case.
pub const RENORMED_DIM: usize = 50;

fn c6() -> CaseFile {
    let n = RENORMED_DIM;
    let spec = MetricSpec::max_combined(n, SQRT_2);
    let e1 = Point::basis(n, 0);
    let mut z = vec![0.0; n];
    z[0] = 2.0;
    CaseFile {
        name: "c6_renormed_l2".into(),
        description: Some(
            "max(l2, sqrt2 linf) norm in 50 dimensions: A = {x1 = 1, |x| <= sqrt2}, B = {2 e1}".into(),
        ),
        space: spec.clone(),
        a: SetDescriptor::union(vec![
            SetDescriptor::AffineSlice {
                index: 0,
                value: 1.0,
                bound: SQRT_2,
                norm: spec,
            },
            SetDescriptor::profiled(vec![], vec![SymbolicSequence::basis_shift(e1.clone(), 1)], true),
        ]),
        b: SetDescriptor::finite(vec![Point::new(z)]),
        map_t: MapSpec::builtin("constant_two_e1"),
        map_g: MapSpec::identity(),
        declared_flags: DeclaredFlags {
            a_closed: true,
            b_closed: true,
        },
        solve: SolveSection::new(ContractionKind::Second, vec![e1]),
        analysis: AnalysisConfig {
            density: 3,
            ..AnalysisConfig::default()
        },
        expected: Some(Expected {
            gap: Some(SQRT_2),
            attained: Some(true),
            verdicts: verdicts(&[
                ("approx_compact", Verdict::Fails),
                ("wac_ab", Verdict::Holds),
                ("contraction_second_kind", Verdict::Vacuous),
            ]),
            implication_violations: Some(0),
            ..expected_defaults()
        }),
    }
}

fn c7() -> CaseFile {
    CaseFile {
        name: "c7_rational_reflector".into(),
        description: Some("A = [0,1], B = [2,3], T x = 3 - x on rationals and 2 + x otherwise".into()),
        space: MetricSpec::real_line(),
        a: SetDescriptor::real_interval(0.0, 1.0),
        b: SetDescriptor::real_interval(2.0, 3.0),
        map_t: MapSpec::builtin("rational_reflector"),
        map_g: MapSpec::identity(),
        declared_flags: DeclaredFlags {
            a_closed: true,
            b_closed: true,
        },
        solve: SolveSection::new(
            ContractionKind::First,
            vec![Point::from_rationals(vec![Rational64::from_integer(1)])],
        ),
        analysis: AnalysisConfig::default(),
        expected: Some(Expected {
            gap: Some(1.0),
            attained: Some(true),
            verdicts: verdicts(&[("contraction_first_kind", Verdict::Vacuous)]),
            alpha: Some(0.0),
            x_star: Some(pt(&[1.0])),
            implication_violations: Some(0),
            ..expected_defaults()
        }),
    }
}

fn expected_defaults() -> Expected {
    Expected {
        gap_tol: defaults::gap_tol(),
        alpha_tol: defaults::alpha_tol(),
        x_tol: defaults::x_tol(),
        ..Expected::default()
    }
}

/// The built-in cases, ordered by name.
pub fn corpus() -> Vec<CaseFile> {
    vec![c1(), c2(), c3(), c4(), c5(), c6(), c7()]
}

pub fn corpus_list() -> Vec<String> {
    corpus().into_iter().map(|c| c.name).collect()
}

pub fn corpus_case(name: &str) -> Option<CaseFile> {
    corpus().into_iter().find(|c| c.name == name || c.name.split('_').next() == Some(name))
}

/// Runs every built-in case; reports are in corpus order.
pub fn run_corpus() -> Result<Vec<CaseReport>> {
    corpus().iter().map(|c| run_case(c).map(|r| r.report)).collect()
}
