//! Empirical certificates for the hypotheses of the proximal iteration and
//! for set-level properties of the pair.
//!
//! Every `fails` verdict carries a witness that can be replayed through the
//! defining inequality or limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::metric::{MetricSpec, Point};
use crate::pair::{AnalysisConfig, ClosureVerdict, ProximalData};
use crate::sets::{dist_to_set, enumerate_profiled, SetDescriptor, SymbolicSequence};

/// Tolerance for distance identities (isometry, preserved isometric distance).
pub const IDENTITY_TOL: f64 = 1e-10;

/// A contraction estimate counts as a contraction below `1 − CONTRACTION_MARGIN`.
pub const CONTRACTION_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Vacuous,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `lhs` and `rhs` are the two sides of the violated identity.
    Pair { x: Point, y: Point, lhs: f64, rhs: f64 },
    /// `(u, x)` and `(v, y)` admissible with `ratio` = numerator / denominator.
    Quadruple {
        u: Point,
        x: Point,
        v: Point,
        y: Point,
        ratio: f64,
    },
    /// A declared sequence and a point whose limiting distance matters.
    Sequence {
        sequence: SymbolicSequence,
        point: Point,
        limit_distance: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        separation: Option<f64>,
    },
    /// `d(point, S)` equals the gap but is only approached, at `limit`.
    Unattained { point: Point, limit: Point, distance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub property: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_estimate: Option<f64>,
    pub samples_used: usize,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CertReport {
    fn new(property: &str, verdict: Verdict, samples_used: usize, eps: f64) -> Self {
        CertReport {
            property: property.into(),
            verdict,
            witness: None,
            alpha_estimate: None,
            samples_used,
            eps,
            note: None,
        }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }
}

fn identity_check(
    property: &str,
    samples: &[Point],
    sides: impl Fn(&Point, &Point) -> Result<(f64, f64)>,
) -> Result<CertReport> {
    if samples.len() < 2 {
        return Ok(CertReport::new(property, Verdict::Inconclusive, samples.len(), IDENTITY_TOL)
            .with_note("fewer than two samples"));
    }
    for (i, x) in samples.iter().enumerate() {
        for y in &samples[i + 1..] {
            let (lhs, rhs) = sides(x, y)?;
            if (lhs - rhs).abs() > IDENTITY_TOL {
                return Ok(
                    CertReport::new(property, Verdict::Fails, samples.len(), IDENTITY_TOL).with_witness(
                        Witness::Pair {
                            x: x.clone(),
                            y: y.clone(),
                            lhs,
                            rhs,
                        },
                    ),
                );
            }
        }
    }
    Ok(CertReport::new(property, Verdict::Holds, samples.len(), IDENTITY_TOL))
}

/// `d(gx, gy) = d(x, y)` on all sample pairs.
pub fn check_isometry(spec: &MetricSpec, g: &MapSpec, samples: &[Point]) -> Result<CertReport> {
    identity_check("isometry", samples, |x, y| {
        Ok((spec.distance(&g.apply(x)?, &g.apply(y)?)?, spec.distance(x, y)?))
    })
}

/// `d(T g x, T g y) = d(T x, T y)` on all sample pairs.
pub fn check_preserves_isometric_distance(
    spec: &MetricSpec,
    t: &MapSpec,
    g: &MapSpec,
    samples: &[Point],
) -> Result<CertReport> {
    identity_check("preserves_isometric_distance", samples, |x, y| {
        let lhs = spec.distance(&t.apply(&g.apply(x)?)?, &t.apply(&g.apply(y)?)?)?;
        let rhs = spec.distance(&t.apply(x)?, &t.apply(y)?)?;
        Ok((lhs, rhs))
    })
}

/// Points `u ∈ A` with `d(u, image) = gap` within `eps_eq`: sampled `A₀`
/// points plus the closed-form nearest point of `A`.
fn admissible_partners(
    spec: &MetricSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    image: &Point,
    eps: f64,
) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = prox
        .a0_sample
        .iter()
        .filter(|u| (spec.dist(u, image) - prox.gap).abs() <= eps)
        .cloned()
        .collect();
    let r = dist_to_set(spec, image, a)?;
    if r.attained
        && (r.value - prox.gap).abs() <= eps
        && !out.iter().any(|u| u.coord_dist(&r.witness) == 0.0)
    {
        out.push(r.witness);
    }
    Ok(out)
}

/// Enumerated `x ∈ A` grouped by image `T x` (first-appearance order).
struct ImageGroup {
    image: Point,
    xs: Vec<Point>,
    partners: Vec<Point>,
}

fn image_groups(
    spec: &MetricSpec,
    t: &MapSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
) -> Result<(Vec<ImageGroup>, usize)> {
    let xs = enumerate_profiled(a, cfg.density);
    let count = xs.len();
    let mut groups: Vec<ImageGroup> = Vec::new();
    for x in xs {
        let image = t.apply(&x)?;
        match groups.iter_mut().find(|g| g.image.coords() == image.coords()) {
            Some(g) => {
                if !g.xs.iter().any(|q| q.coords() == x.coords()) {
                    g.xs.push(x);
                }
            }
            None => groups.push(ImageGroup {
                image,
                xs: vec![x],
                partners: Vec::new(),
            }),
        }
    }
    if prox.attained {
        for g in &mut groups {
            g.partners = admissible_partners(spec, a, prox, &g.image, cfg.eps_eq)?;
        }
    }
    Ok((groups, count))
}

/// All admissible pairs `(u, x)`: `x` enumerated in `A`, `u ∈ A` with
/// `d(u, T x) = gap` within `eps_eq`.
pub fn admissible_pairs_first_kind(
    spec: &MetricSpec,
    t: &MapSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
) -> Result<Vec<(Point, Point)>> {
    let (groups, _) = image_groups(spec, t, a, prox, cfg)?;
    Ok(groups
        .iter()
        .flat_map(|g| {
            g.xs
                .iter()
                .flat_map(move |x| g.partners.iter().map(move |u| (u.clone(), x.clone())))
        })
        .collect())
}

fn farthest(spec: &MetricSpec, us: &[Point], vs: &[Point], via: &dyn Fn(&Point) -> Result<Point>) -> Result<(f64, usize, usize)> {
    let mapped_u: Vec<Point> = us.iter().map(via).collect::<Result<_>>()?;
    let mapped_v: Vec<Point> = vs.iter().map(via).collect::<Result<_>>()?;
    let mut best = (-1.0, 0, 0);
    for (i, u) in mapped_u.iter().enumerate() {
        for (j, v) in mapped_v.iter().enumerate() {
            let d = spec.dist(u, v);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    Ok(best)
}

fn closest_distinct(spec: &MetricSpec, xs: &[Point], ys: &[Point], eps: f64) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let d = spec.dist(x, y);
            if d > eps && best.is_none_or(|b| d < b.0) {
                best = Some((d, i, j));
            }
        }
    }
    best
}

fn estimate_alpha(
    property: &str,
    spec: &MetricSpec,
    t: &MapSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
    second_kind: bool,
) -> Result<CertReport> {
    let eps = cfg.eps_eq;
    let (groups, count) = image_groups(spec, t, a, prox, cfg)?;
    let via_t = |p: &Point| t.apply(p);
    let plain = |p: &Point| Ok(p.clone());
    let mut sup: Option<(f64, Witness)> = None;
    for (i, g1) in groups.iter().enumerate() {
        if g1.partners.is_empty() {
            continue;
        }
        for g2 in &groups[i..] {
            if g2.partners.is_empty() {
                continue;
            }
            // the denominator: d(x, y) over distinct sources, or d(Tx, Ty)
            let (den, xi, yi) = if second_kind {
                let d = spec.dist(&g1.image, &g2.image);
                if d <= eps {
                    continue;
                }
                (d, 0, 0)
            } else {
                match closest_distinct(spec, &g1.xs, &g2.xs, eps) {
                    Some(c) => c,
                    None => continue,
                }
            };
            let (num, ui, vi) = if second_kind {
                farthest(spec, &g1.partners, &g2.partners, &via_t)?
            } else {
                farthest(spec, &g1.partners, &g2.partners, &plain)?
            };
            let ratio = num / den;
            if sup.as_ref().is_none_or(|(s, _)| ratio > *s) {
                sup = Some((
                    ratio,
                    Witness::Quadruple {
                        u: g1.partners[ui].clone(),
                        x: g1.xs[xi].clone(),
                        v: g2.partners[vi].clone(),
                        y: g2.xs[yi].clone(),
                        ratio,
                    },
                ));
            }
        }
    }
    let mut report = match sup {
        None => {
            let mut r = CertReport::new(property, Verdict::Vacuous, count, eps)
                .with_note("no admissible quadruple with distinct sources");
            r.alpha_estimate = Some(0.0);
            r
        }
        Some((alpha, w)) => {
            let verdict = if alpha <= 1.0 - CONTRACTION_MARGIN {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            let mut r = CertReport::new(property, verdict, count, eps);
            r.alpha_estimate = Some(alpha);
            if verdict == Verdict::Fails {
                r.witness = Some(w);
            }
            r
        }
    };
    if !prox.attained {
        report = report.with_note("gap not attained: no admissible pairs");
    }
    Ok(report)
}

/// Supremum of `d(u, v) / d(x, y)` over admissible quadruples: `d(u, Tx) =
/// d(v, Ty) = gap` and `d(x, y) > eps_eq`.
pub fn estimate_alpha_first_kind(
    spec: &MetricSpec,
    t: &MapSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
) -> Result<CertReport> {
    estimate_alpha("contraction_first_kind", spec, t, a, prox, cfg, false)
}

/// Supremum of `d(Tu, Tv) / d(Tx, Ty)` over admissible quadruples with
/// `d(Tx, Ty) > eps_eq`.
pub fn estimate_alpha_second_kind(
    spec: &MetricSpec,
    t: &MapSpec,
    a: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
) -> Result<CertReport> {
    estimate_alpha("contraction_second_kind", spec, t, a, prox, cfg, true)
}

fn min_separation(spec: &MetricSpec, terms: &[Point]) -> f64 {
    let mut sep = f64::INFINITY;
    for (i, x) in terms.iter().enumerate() {
        for y in &terms[i + 1..] {
            sep = sep.min(spec.dist(x, y));
        }
    }
    sep
}

/// Approximative compactness of `A` with respect to `B`.
///
/// Fails on a declared divergent sequence that minimises `d(y, ·)` over `A`
/// for an enumerated `y ∈ B` while its terms stay pairwise separated. Without
/// divergent declarations the space is a genuine finite-dimensional one, where
/// minimising sequences are bounded and therefore have convergent
/// subsequences. Divergent declarations that never minimise leave the question
/// open.
pub fn check_approx_compact(
    spec: &MetricSpec,
    a: &SetDescriptor,
    b: &SetDescriptor,
    cfg: &AnalysisConfig,
) -> Result<CertReport> {
    let property = "approx_compact";
    let eps = cfg.eps_eq;
    let ys = enumerate_profiled(b, cfg.density);
    let divergent: Vec<&SymbolicSequence> = a
        .declared_sequences()
        .into_iter()
        .filter(|s| s.limit().is_none())
        .collect();
    if divergent.is_empty() {
        return Ok(CertReport::new(property, Verdict::Holds, ys.len(), eps)
            .with_note("finite dimension: minimising sequences are bounded"));
    }
    for seq in &divergent {
        let terms = seq.first_terms(usize::MAX);
        if terms.len() < 2 {
            continue;
        }
        let separation = min_separation(spec, &terms);
        if separation <= eps {
            continue;
        }
        for y in &ys {
            let d_ya = dist_to_set(spec, y, a)?.value;
            if terms.iter().all(|u| (spec.dist(y, u) - d_ya).abs() <= eps) {
                return Ok(CertReport::new(property, Verdict::Fails, ys.len(), eps).with_witness(
                    Witness::Sequence {
                        sequence: (*seq).clone(),
                        point: y.clone(),
                        limit_distance: d_ya,
                        separation: Some(separation),
                    },
                ));
            }
        }
    }
    Ok(CertReport::new(property, Verdict::Inconclusive, ys.len(), eps)
        .with_note("divergent sequences declared but none minimises"))
}

/// Limit of `d(x_n, p)` along a declared sequence (tail term for divergent ones).
fn limit_distance(spec: &MetricSpec, seq: &SymbolicSequence, p: &Point) -> Option<f64> {
    match seq.limit() {
        Some(l) => Some(spec.dist(&l, p)),
        None => seq.first_terms(usize::MAX).last().map(|t| spec.dist(t, p)),
    }
}

/// Property WAC of the pair `(A, B)`: whenever `d(x_n, p) → d(A, B)` for a
/// sequence in `A` and `p ∈ B`, then `p ∈ B₀`. `prox` must describe `(A, B)`
/// in this order (use [`ProximalData::swapped`] for `(B, A)`).
pub fn check_wac(
    spec: &MetricSpec,
    a: &SetDescriptor,
    b: &SetDescriptor,
    prox: &ProximalData,
    cfg: &AnalysisConfig,
) -> Result<CertReport> {
    let property = "wac";
    let eps = cfg.eps_eq;
    let ps = enumerate_profiled(b, cfg.density);
    let in_b0 = |p: &Point| -> Result<bool> {
        if !prox.attained {
            return Ok(false);
        }
        if prox.b0_sample.iter().any(|q| q.coord_dist(p) <= eps) {
            return Ok(true);
        }
        let r = dist_to_set(spec, p, a)?;
        Ok(r.attained && (r.value - prox.gap).abs() <= eps)
    };
    for seq in a.declared_sequences() {
        for p in &ps {
            let Some(lim) = limit_distance(spec, seq, p) else { continue };
            if (lim - prox.gap).abs() <= eps && !in_b0(p)? {
                return Ok(CertReport::new(property, Verdict::Fails, ps.len(), eps).with_witness(
                    Witness::Sequence {
                        sequence: seq.clone(),
                        point: p.clone(),
                        limit_distance: lim,
                        separation: None,
                    },
                ));
            }
        }
    }
    // a point at distance exactly the gap that is never reached is approached
    // by some sequence of A without belonging to B₀
    for p in &ps {
        let r = dist_to_set(spec, p, a)?;
        if (r.value - prox.gap).abs() <= eps && !r.attained {
            return Ok(CertReport::new(property, Verdict::Fails, ps.len(), eps).with_witness(
                Witness::Unattained {
                    point: p.clone(),
                    limit: r.witness,
                    distance: r.value,
                },
            ));
        }
    }
    Ok(CertReport::new(property, Verdict::Holds, ps.len(), eps))
}

/// Inputs of [`check_implications`] for one case.
#[derive(Clone, Debug, Default)]
pub struct ImplicationInputs<'a> {
    pub a_closed: bool,
    pub b_closed: bool,
    pub approx_compact: Option<&'a CertReport>,
    pub wac_ab: Option<&'a CertReport>,
    pub wac_ba: Option<&'a CertReport>,
    pub a0_closure: Option<&'a ClosureVerdict>,
    pub b0_closure: Option<&'a ClosureVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub name: String,
    pub premise: bool,
    pub conclusion: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub checks: Vec<ImplicationCheck>,
    pub violations: usize,
    /// WAC(A, B) holds while approximative compactness fails.
    pub wac_without_approx_compact: bool,
    /// `A₀` is closed while WAC(B, A) fails.
    pub a0_closed_without_wac_ba: bool,
}

/// Cross-checks the one-directional implications between the certificates:
///
/// * approximatively compact ∧ `A` closed ⇒ WAC(A, B)
/// * WAC(B, A) ∧ `A` closed ⇒ `A₀` closed
/// * `A`, `B` closed ∧ approximatively compact ⇒ `B₀` closed
pub fn check_implications(inputs: &ImplicationInputs<'_>) -> Result<ImplicationReport> {
    let need = |r: Option<&CertReport>, name: &str| r.cloned().ok_or_else(|| Error::MissingReport(name.into()));
    let need_v = |v: Option<&ClosureVerdict>, name: &str| {
        v.cloned().ok_or_else(|| Error::MissingReport(name.into()))
    };
    let ac = need(inputs.approx_compact, "approx_compact")?;
    let wac_ab = need(inputs.wac_ab, "wac(A,B)")?;
    let wac_ba = need(inputs.wac_ba, "wac(B,A)")?;
    let a0 = need_v(inputs.a0_closure, "A0 closure")?;
    let b0 = need_v(inputs.b0_closure, "B0 closure")?;
    let check = |name: &str, premise: bool, conclusion: bool| ImplicationCheck {
        name: name.into(),
        premise,
        conclusion,
        consistent: !premise || conclusion,
    };
    let checks = vec![
        check(
            "approx_compact and A closed => wac(A,B)",
            ac.holds() && inputs.a_closed,
            wac_ab.holds(),
        ),
        check(
            "wac(B,A) and A closed => A0 closed",
            wac_ba.holds() && inputs.a_closed,
            a0.is_closed(),
        ),
        check(
            "A, B closed and approx_compact => B0 closed",
            inputs.a_closed && inputs.b_closed && ac.holds(),
            b0.is_closed(),
        ),
    ];
    Ok(ImplicationReport {
        violations: checks.iter().filter(|c| !c.consistent).count(),
        checks,
        wac_without_approx_compact: wac_ab.holds() && ac.fails(),
        a0_closed_without_wac_ba: a0.is_closed() && wac_ba.fails(),
    })
}
