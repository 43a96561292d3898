//! Proximal iteration: from `x₀ ∈ A₀`, pick `x_{n+1} ∈ A₀` with
//! `d(g x_{n+1}, T xₙ) = d(A, B)` until the steps vanish.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::metric::{MetricSpec, Point};
use crate::pair::{proximal_sets, AnalysisConfig, ProximalData};
use crate::sets::{contains_unchecked, dist_to_set, SetDescriptor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub eps_eq: f64,
    pub eps_stop: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_hint: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            eps_eq: 1e-9,
            eps_stop: 1e-10,
            max_iter: 10_000,
            alpha_hint: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_stop > 0.0) || !(self.eps_stop <= self.eps_eq) {
            return Err(Error::InvalidConfig("need 0 < eps_stop <= eps_eq".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if let Some(a) = self.alpha_hint {
            if !(0.0..1.0).contains(&a) {
                return Err(Error::InvalidAlpha(a));
            }
        }
        Ok(())
    }
}

/// Which distance the stopping rule watches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    /// Steps `d(x_{n+1}, xₙ)`.
    First,
    /// Image steps `d(T x_{n+1}, T xₙ)`.
    Second,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub x_n: Point,
    pub tx_n: Point,
    pub x_next: Point,
    /// `d(g x_{n+1}, T xₙ) − gap`.
    pub residual: f64,
    pub step: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub kind: ContractionKind,
    pub steps: Vec<TraceStep>,
    pub converged: bool,
    /// Largest step ratio from the second step on, ignoring near-converged steps.
    pub alpha_observed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub x_star: Point,
    pub trace: IterationTrace,
}

/// Everything a proximal iteration needs: the space, the pair, the maps and
/// the proximal-set samples.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: MetricSpec,
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    pub t: MapSpec,
    pub g: MapSpec,
    pub prox: ProximalData,
}

impl Problem {
    pub fn new(
        spec: MetricSpec,
        a: SetDescriptor,
        b: SetDescriptor,
        t: MapSpec,
        g: MapSpec,
        analysis: &AnalysisConfig,
    ) -> Result<Problem> {
        t.validate()?;
        g.validate()?;
        let prox = proximal_sets(&spec, &a, &b, analysis)?;
        Ok(Problem {
            spec,
            a,
            b,
            t,
            g,
            prox,
        })
    }

    /// `x ∈ A` with `d(x, B)` attained at the gap.
    pub fn in_a0(&self, x: &Point, eps: f64) -> Result<bool> {
        x.check_dim(self.spec.dim)?;
        if !contains_unchecked(&self.a, x, eps) {
            return Ok(false);
        }
        let r = dist_to_set(&self.spec, x, &self.b)?;
        Ok(r.attained && (r.value - self.prox.gap).abs() <= eps)
    }

    fn single_convex_a(&self) -> bool {
        match &self.a {
            SetDescriptor::Union { .. } | SetDescriptor::Profiled { .. } => false,
            other => other.is_parametric_convex(),
        }
    }

    /// Closed-form step: project `T xₙ` onto `A`, then undo the (orthogonal
    /// affine) isometry `g`.
    fn projected_step(&self, tx: &Point, cfg: &SolveConfig) -> Result<Option<Point>> {
        if !(self.spec.is_euclidean() && self.single_convex_a()) {
            return Ok(None);
        }
        let Some((m, o)) = self.g.as_affine(self.spec.dim) else {
            return Ok(None);
        };
        let w = dist_to_set(&self.spec, tx, &self.a)?.witness;
        let shifted: Vec<f64> = w.coords().iter().zip(&o).map(|(w, o)| w - o).collect();
        let u: Vec<f64> = (0..self.spec.dim)
            .map(|j| m.iter().zip(&shifted).map(|(row, s)| row[j] * s).sum())
            .collect();
        let u = Point::new(u);
        let gu = self.g.apply(&u)?;
        if gu.coord_dist(&w) > cfg.eps_eq || !contains_unchecked(&self.a, &u, cfg.eps_eq) {
            return Ok(None);
        }
        Ok(Some(u))
    }

    fn argmin_step(&self, tx: &Point) -> Result<(Point, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, u) in self.prox.a0_sample.iter().enumerate() {
            let d = self.spec.dist(&self.g.apply(u)?, tx);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.ok_or(Error::EmptyProximalSet)?;
        Ok((self.prox.a0_sample[i].clone(), d))
    }
}

/// One proximal step: `u ∈ A₀` minimising `d(g u, T xₙ)`, required to reach
/// the gap within `eps_eq`.
pub fn proximal_step(problem: &Problem, x_n: &Point, cfg: &SolveConfig) -> Result<Point> {
    let tx = problem.t.apply(x_n)?;
    step_from_image(problem, x_n, &tx, cfg)
}

fn step_from_image(problem: &Problem, x_n: &Point, tx: &Point, cfg: &SolveConfig) -> Result<Point> {
    if !problem.prox.attained {
        return Err(Error::EmptyProximalSet);
    }
    let gap = problem.prox.gap;
    let (u, value) = match problem.projected_step(tx, cfg)? {
        Some(u) => {
            let v = problem.spec.dist(&problem.g.apply(&u)?, tx);
            (u, v)
        }
        None => problem.argmin_step(tx)?,
    };
    if value > gap + cfg.eps_eq {
        return Err(Error::SubproblemInfeasible { excess: value - gap });
    }
    if u.coord_dist(x_n) == 0.0 {
        // keep the caller's point, exact tag included
        return Ok(x_n.clone());
    }
    Ok(u)
}

fn run(problem: &Problem, x0: &Point, cfg: &SolveConfig, kind: ContractionKind) -> Result<SolveOutcome> {
    cfg.validate()?;
    if !problem.prox.attained {
        return Err(Error::EmptyProximalSet);
    }
    let gap = problem.prox.gap;
    if !problem.in_a0(x0, cfg.eps_eq)? {
        let distance = dist_to_set(&problem.spec, x0, &problem.b)?.value;
        return Err(Error::StartNotProximal { distance, gap });
    }
    let spec = &problem.spec;
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut x = x0.clone();
    let mut tx = problem.t.apply(&x)?;
    let mut prev_step: Option<f64> = None;
    let mut growth_run = 0;
    let mut alpha_observed: f64 = 0.0;
    for n in 0..cfg.max_iter {
        if problem.t.domain_check && !contains_unchecked(&problem.b, &tx, cfg.eps_eq) {
            return Err(Error::MapOutsideTarget { step: n });
        }
        let next = step_from_image(problem, &x, &tx, cfg)?;
        let t_next = problem.t.apply(&next)?;
        let residual = spec.dist(&problem.g.apply(&next)?, &tx) - gap;
        let step = match kind {
            ContractionKind::First => spec.dist(&next, &x),
            ContractionKind::Second => spec.dist(&t_next, &tx),
        };
        let ratio = prev_step.filter(|p| *p > 0.0).map(|p| step / p);
        if let Some(r) = ratio {
            if step >= 10.0 * cfg.eps_stop {
                alpha_observed = alpha_observed.max(r);
            }
            growth_run = if r > 1.0 { growth_run + 1 } else { 0 };
        }
        steps.push(TraceStep {
            x_n: x.clone(),
            tx_n: tx.clone(),
            x_next: next.clone(),
            residual,
            step,
            ratio,
        });
        x = next;
        tx = t_next;
        if step <= cfg.eps_stop {
            let final_residual = spec.dist(&problem.g.apply(&x)?, &tx) - gap;
            if final_residual > 2.0 * cfg.eps_eq {
                return Err(Error::ResidualExceeded {
                    excess: final_residual,
                });
            }
            return Ok(SolveOutcome {
                x_star: x,
                trace: IterationTrace {
                    kind,
                    steps,
                    converged: true,
                    alpha_observed,
                },
            });
        }
        if growth_run >= 3 {
            return Err(Error::NoConvergence {
                iterations: n + 1,
                last_step: step,
                diverging: true,
            });
        }
        prev_step = Some(step);
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        last_step: steps.last().map_or(f64::NAN, |s| s.step),
        diverging: false,
    })
}

/// Iterates proximal steps, stopping on `d(x_{n+1}, xₙ) <= eps_stop`.
pub fn solve_first_kind(problem: &Problem, x0: &Point, cfg: &SolveConfig) -> Result<SolveOutcome> {
    run(problem, x0, cfg, ContractionKind::First)
}

/// Iterates proximal steps, stopping on `d(T x_{n+1}, T xₙ) <= eps_stop`.
pub fn solve_second_kind(problem: &Problem, x0: &Point, cfg: &SolveConfig) -> Result<SolveOutcome> {
    run(problem, x0, cfg, ContractionKind::Second)
}

/// A-priori bound `αⁿ d(x₁, x₀) / (1 − α)` on `d(xₙ, x*)`.
pub fn error_bound(alpha: f64, d01: f64, n: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(alpha.powi(n as i32) * d01 / (1.0 - alpha))
}

impl IterationTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.steps.first().map_or(0, |s| s.x_n.dim());
        let tdim = self.steps.first().map_or(0, |s| s.tx_n.dim());
        let mut header = vec!["n".to_string()];
        header.extend((0..dim).map(|i| format!("x_{i}")));
        header.extend((0..tdim).map(|i| format!("Tx_{i}")));
        header.extend(["residual", "step", "ratio"].map(String::from));
        w.write_record(&header)?;
        for (n, s) in self.steps.iter().enumerate() {
            let mut row = vec![n.to_string()];
            row.extend(s.x_n.coords().iter().map(f64::to_string));
            row.extend(s.tx_n.coords().iter().map(f64::to_string));
            row.push(s.residual.to_string());
            row.push(s.step.to_string());
            row.push(s.ratio.map(|r| r.to_string()).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV for `.csv` paths, JSON otherwise.
    pub fn export(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            self.write_csv(file)
        } else {
            serde_json::to_writer_pretty(file, self)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    fn line(lo: f64, t: MapSpec, g: MapSpec) -> Problem {
        Problem::new(
            MetricSpec::euclidean(2),
            SetDescriptor::interval(p(&[0.0, 0.0]), 1, lo, 1.0),
            SetDescriptor::interval(p(&[1.0, 0.0]), 1, lo, 1.0),
            t,
            g,
            &AnalysisConfig::default(),
        )
        .unwrap()
    }

    fn reflection() -> MapSpec {
        MapSpec::affine(vec![vec![1.0, 0.0], vec![0.0, -1.0]], vec![0.0, 0.0])
    }

    #[test]
    fn single_steps() {
        let cfg = SolveConfig::default();
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        assert_eq!(proximal_step(&pr, &p(&[0.0, 1.0]), &cfg).unwrap(), p(&[0.0, 0.5]));
        let pr = line(-1.0, MapSpec::builtin("line_reflect_half"), reflection());
        assert_eq!(proximal_step(&pr, &p(&[0.0, 1.0]), &cfg).unwrap(), p(&[0.0, 0.5]));
    }

    #[test]
    fn argmin_route_agrees_with_projection() {
        let cfg = SolveConfig::default();
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        let exact = proximal_step(&pr, &p(&[0.0, 0.5]), &cfg).unwrap();
        let (u, v) = pr.argmin_step(&p(&[1.0, 0.25])).unwrap();
        assert!((exact.coord_dist(&u)) < 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_kind_line_orbit() {
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        let out = solve_first_kind(&pr, &p(&[0.0, 1.0]), &SolveConfig::default()).unwrap();
        assert!(out.x_star.coord_dist(&p(&[0.0, 0.0])) < 1e-6);
        assert!(out.trace.steps.len() <= 40);
        for (n, s) in out.trace.steps.iter().enumerate() {
            // closed-form orbit t_n = 2^-n
            assert_eq!(s.x_n.coords()[1], 0.5f64.powi(n as i32));
            if let Some(r) = s.ratio {
                assert_eq!(r, 0.5);
            }
        }
        assert_eq!(out.trace.alpha_observed, 0.5);
    }

    #[test]
    fn start_at_solution_returns_immediately() {
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        let out = solve_first_kind(&pr, &p(&[0.0, 0.0]), &SolveConfig::default()).unwrap();
        assert_eq!(out.x_star, p(&[0.0, 0.0]));
        assert!(out.trace.steps.len() <= 1);
    }

    #[test]
    fn start_outside_a0_is_rejected() {
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        assert!(matches!(
            solve_first_kind(&pr, &p(&[0.5, 0.5]), &SolveConfig::default()),
            Err(Error::StartNotProximal { .. })
        ));
    }

    #[test]
    fn expanding_map_is_flagged() {
        // t ↦ 2t on [0, 1] leaves the unit interval: the subproblem turns infeasible
        let pr = line(
            0.0,
            MapSpec::affine(vec![vec![0.0, 0.0], vec![0.0, 2.0]], vec![1.0, 0.0]),
            MapSpec::identity(),
        );
        let err = solve_first_kind(&pr, &p(&[0.0, 0.1]), &SolveConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::NoConvergence { diverging: true, .. } | Error::SubproblemInfeasible { .. }
        ));
    }

    #[test]
    fn error_bound_values() {
        assert_eq!(error_bound(0.5, 0.5, 0).unwrap(), 1.0);
        assert!((error_bound(0.5, 0.5, 10).unwrap() - 9.765625e-4).abs() < 1e-15);
        assert!(matches!(error_bound(1.0, 1.0, 1), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn csv_header() {
        let pr = line(0.0, MapSpec::builtin("line_half"), MapSpec::identity());
        let out = solve_first_kind(&pr, &p(&[0.0, 1.0]), &SolveConfig::default()).unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,x_0,x_1,Tx_0,Tx_1,residual,step,ratio");
        assert!(lines.next().unwrap().ends_with(','));
    }
}
