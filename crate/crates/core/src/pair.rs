//! Gap, proximal subsets and closedness diagnostics for a pair `(A, B)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricSpec, Point, METRIC_TOL};
use crate::sets::{
    contains_unchecked, dist_to_atom, dist_to_sequence, dist_to_set, enumerate_profiled,
    limit_wins, unimodal_argmin, AffineSequence, Atom, SetDescriptor, SymbolicSequence, TERM_INDEX_BOUND,
};

/// Resolution and tolerance knobs for the pair analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Tolerance for "achieves the gap".
    pub eps_eq: f64,
    /// Terms per sequence in brute-force lattice scans.
    pub seq_terms: usize,
    /// Samples per parameter when a parametric set must be enumerated for the gap.
    pub grid_points: usize,
    /// Samples per parameter when collecting proximal subsets and certificates.
    pub density: usize,
    pub max_proj_rounds: usize,
    pub proj_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            eps_eq: 1e-9,
            seq_terms: 200,
            grid_points: 100,
            density: 101,
            max_proj_rounds: 10_000,
            proj_tol: 1e-12,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_eq > 0.0) || !(self.proj_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.seq_terms == 0 || self.grid_points < 2 || self.density < 2 {
            return Err(Error::InvalidConfig(
                "need at least one sequence term and two grid points".into(),
            ));
        }
        if self.max_proj_rounds == 0 {
            return Err(Error::InvalidConfig("max_proj_rounds must be positive".into()));
        }
        Ok(())
    }
}

/// Infimum over one pair of atoms, with the realising (or limiting) points.
#[derive(Clone, Debug)]
struct PairInf {
    value: f64,
    attained: bool,
    x: Point,
    y: Point,
}

impl PairInf {
    fn swap(self) -> PairInf {
        PairInf {
            x: self.y,
            y: self.x,
            ..self
        }
    }
}

/// `d(A, B)` with attainment and a best (or limiting) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: f64,
    pub attained: bool,
    pub best_pair: (Point, Point),
}

fn atom_key(atom: &Atom<'_>) -> String {
    match atom {
        Atom::Points(p) => serde_json::to_string(p),
        Atom::Sequence(s) => serde_json::to_string(s),
        Atom::Convex(c) => serde_json::to_string(c),
    }
    .unwrap_or_default()
}

fn points_vs(spec: &MetricSpec, pts: &[Point], other: &Atom<'_>) -> Result<Option<PairInf>> {
    let mut best: Option<PairInf> = None;
    for p in pts {
        if let Some(r) = dist_to_atom(spec, p, other)? {
            if best.as_ref().is_none_or(|b| better(r.value, r.attained, b)) {
                best = Some(PairInf {
                    value: r.value,
                    attained: r.attained,
                    x: p.clone(),
                    y: r.witness,
                });
            }
        }
    }
    Ok(best)
}

fn better(value: f64, attained: bool, than: &PairInf) -> bool {
    value < than.value - METRIC_TOL
        || (value <= than.value + METRIC_TOL && attained && !than.attained)
        || (value < than.value && attained == than.attained)
}

fn seq_vs_seq(spec: &MetricSpec, s: &AffineSequence, t: &AffineSequence, terms: usize) -> PairInf {
    let xs: Vec<Point> = (s.n_min..s.n_min + terms as u64).map(|n| s.term(n)).collect();
    let ys: Vec<Point> = (t.n_min..t.n_min + terms as u64).map(|n| t.term(n)).collect();
    let mut best: Option<PairInf> = None;
    let mut offer = |c: PairInf| {
        if best.as_ref().is_none_or(|b| better(c.value, c.attained, b)) {
            best = Some(c);
        }
    };
    for x in &xs {
        for y in &ys {
            offer(PairInf {
                value: spec.dist(x, y),
                attained: true,
                x: x.clone(),
                y: y.clone(),
            });
        }
    }
    // limit lines: x fixed at lim s against all of t, and symmetrically
    let ls = s.limit();
    let r = dist_to_sequence(spec, &ls, t);
    offer(PairInf {
        value: r.value,
        attained: s.limit_in_set && r.attained,
        x: ls.clone(),
        y: r.witness,
    });
    let lt = t.limit();
    let r = dist_to_sequence(spec, &lt, s);
    offer(PairInf {
        value: r.value,
        attained: t.limit_in_set && r.attained,
        x: r.witness,
        y: lt.clone(),
    });
    offer(PairInf {
        value: spec.dist(&ls, &lt),
        attained: s.limit_in_set && t.limit_in_set,
        x: ls,
        y: lt,
    });
    best.expect("lattice is nonempty")
}

/// `inf_n d(term_n, K)`: convex in `1/n` when `K` is convex, so unimodal in `n`.
fn seq_vs_convex(spec: &MetricSpec, s: &AffineSequence, k: &Atom<'_>) -> Result<PairInf> {
    let eval = |p: &Point| -> Result<crate::sets::SetDistance> {
        dist_to_atom(spec, p, k)?.ok_or(Error::EmptySet)
    };
    // surface unsupported geometry before the search
    eval(&s.term(s.n_min))?;
    let hi = TERM_INDEX_BOUND.max(s.n_min);
    let (n, v) = unimodal_argmin(
        |n| eval(&s.term(n)).map(|r| r.value).unwrap_or(f64::INFINITY),
        s.n_min,
        hi,
    );
    let lim = s.limit();
    let rl = eval(&lim)?;
    let v_tail = eval(&s.term(hi))?.value;
    if limit_wins(v, v_tail, rl.value) {
        Ok(PairInf {
            value: rl.value.min(v),
            attained: s.limit_in_set && rl.attained,
            x: lim,
            y: rl.witness,
        })
    } else {
        let x = s.term(n);
        let r = eval(&x)?;
        Ok(PairInf {
            value: r.value,
            attained: r.attained,
            x,
            y: r.witness,
        })
    }
}

fn alternating_projections(
    spec: &MetricSpec,
    p: &SetDescriptor,
    q: &SetDescriptor,
    cfg: &AnalysisConfig,
) -> Result<PairInf> {
    let start = enumerate_profiled(p, 2)
        .into_iter()
        .next()
        .ok_or(Error::EmptySet)?;
    let mut x = start;
    let mut y = dist_to_set(spec, &x, q)?.witness;
    for _ in 0..cfg.max_proj_rounds {
        let nx = dist_to_set(spec, &y, p)?.witness;
        let ny = dist_to_set(spec, &nx, q)?.witness;
        let moved = nx.coord_dist(&x).max(ny.coord_dist(&y));
        x = nx;
        y = ny;
        if moved < cfg.proj_tol {
            break;
        }
    }
    Ok(PairInf {
        value: spec.dist(&x, &y),
        attained: true,
        x,
        y,
    })
}

fn convex_vs_convex(
    spec: &MetricSpec,
    p: &SetDescriptor,
    q: &SetDescriptor,
    cfg: &AnalysisConfig,
) -> Result<PairInf> {
    if spec.is_euclidean() && p.is_parametric_convex() && q.is_parametric_convex() {
        match alternating_projections(spec, p, q, cfg) {
            Err(Error::Unsupported(_)) => {}
            other => return other,
        }
    }
    let forward = points_vs(spec, &enumerate_profiled(p, cfg.grid_points), &Atom::Convex(q))?;
    let backward = points_vs(spec, &enumerate_profiled(q, cfg.grid_points), &Atom::Convex(p))?
        .map(PairInf::swap);
    let mut best = forward.ok_or(Error::EmptySet)?;
    if let Some(b) = backward {
        if better(b.value, b.attained, &best) {
            best = b;
        }
    }
    Ok(best)
}

fn pair_inf(spec: &MetricSpec, p: &Atom<'_>, q: &Atom<'_>, cfg: &AnalysisConfig) -> Result<Option<PairInf>> {
    Ok(match (p, q) {
        (Atom::Points(pts), other) => points_vs(spec, pts, other)?,
        (other, Atom::Points(pts)) => points_vs(spec, pts, other)?.map(PairInf::swap),
        (Atom::Sequence(s), Atom::Sequence(t)) => Some(seq_vs_seq(spec, s, t, cfg.seq_terms)),
        (Atom::Sequence(s), k @ Atom::Convex(_)) => Some(seq_vs_convex(spec, s, k)?),
        (k @ Atom::Convex(_), Atom::Sequence(s)) => Some(seq_vs_convex(spec, s, k)?.swap()),
        (Atom::Convex(a), Atom::Convex(b)) => Some(convex_vs_convex(spec, a, b, cfg)?),
    })
}

fn discrete_gap(a: &SetDescriptor, b: &SetDescriptor, cfg: &AnalysisConfig) -> Result<GapResult> {
    let ea = enumerate_profiled(a, cfg.grid_points);
    let eb = enumerate_profiled(b, cfg.grid_points);
    let (x0, y0) = (
        ea.first().cloned().ok_or(Error::EmptySet)?,
        eb.first().cloned().ok_or(Error::EmptySet)?,
    );
    let shared = ea
        .iter()
        .find(|x| contains_unchecked(b, x, 0.0))
        .or_else(|| eb.iter().find(|y| contains_unchecked(a, y, 0.0)));
    Ok(match shared {
        Some(p) => GapResult {
            gap: 0.0,
            attained: true,
            best_pair: (p.clone(), p.clone()),
        },
        None => GapResult {
            gap: 1.0,
            attained: true,
            best_pair: (x0, y0),
        },
    })
}

/// `d(A, B) = inf { d(x, y) : x ∈ A, y ∈ B }`.
///
/// Pairs of atoms are handled by closed forms where possible (point versus
/// anything, sequence versus convex body via a unimodal index search,
/// alternating projections for convex bodies in a Euclidean space) and by
/// enumeration otherwise. Each atom pair is evaluated in a canonical order, so
/// `gap(A, B)` and `gap(B, A)` agree exactly.
pub fn gap(spec: &MetricSpec, a: &SetDescriptor, b: &SetDescriptor, cfg: &AnalysisConfig) -> Result<GapResult> {
    spec.validate()?;
    a.validate()?;
    b.validate()?;
    for s in [a, b] {
        let d = s.dim()?;
        if d != spec.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dim,
                found: d,
            });
        }
    }
    if spec.is_discrete() {
        return discrete_gap(a, b, cfg);
    }
    let (atoms_a, atoms_b) = (a.atoms(), b.atoms());
    let mut results: Vec<PairInf> = Vec::new();
    for p in &atoms_a {
        for q in &atoms_b {
            let r = if atom_key(p) <= atom_key(q) {
                pair_inf(spec, p, q, cfg)?
            } else {
                pair_inf(spec, q, p, cfg)?.map(PairInf::swap)
            };
            results.extend(r);
        }
    }
    let value = results
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    if !value.is_finite() {
        return Err(Error::EmptySet);
    }
    let near: Vec<&PairInf> = results
        .iter()
        .filter(|r| r.value <= value + METRIC_TOL)
        .collect();
    let attained = near.iter().any(|r| r.attained);
    let best = near
        .iter()
        .find(|r| r.attained == attained)
        .expect("a minimal pair exists");
    Ok(GapResult {
        gap: value,
        attained,
        best_pair: (best.x.clone(), best.y.clone()),
    })
}

/// Samples of the proximal subsets `A₀`, `B₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximalData {
    pub gap: f64,
    pub attained: bool,
    pub a0_sample: Vec<Point>,
    pub b0_sample: Vec<Point>,
    pub pairs: Vec<(Point, Point)>,
    pub eps_eq: f64,
    /// Limiting pair realising the infimum in the closure when it is not attained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_pair: Option<(Point, Point)>,
}

impl ProximalData {
    /// The same data for the reversed pair `(B, A)`.
    pub fn swapped(&self) -> ProximalData {
        ProximalData {
            gap: self.gap,
            attained: self.attained,
            a0_sample: self.b0_sample.clone(),
            b0_sample: self.a0_sample.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|(x, y)| (y.clone(), x.clone()))
                .collect(),
            eps_eq: self.eps_eq,
            limit_pair: self
                .limit_pair
                .as_ref()
                .map(|(x, y)| (y.clone(), x.clone())),
        }
    }
}

fn bits_key(p: &Point) -> Vec<u64> {
    p.coords().iter().map(|c| (c + 0.0).to_bits()).collect()
}

fn dedup(points: Vec<Point>) -> Vec<Point> {
    let mut seen = HashSet::new();
    points
        .into_iter()
        .filter(|p| seen.insert(bits_key(p)))
        .collect()
}

/// Collects every enumerated point of `A` (resp. `B`) whose distance to the
/// other set is attained within `eps_eq` of the gap, together with the
/// realising partner. Empty when the gap is not attained.
pub fn proximal_sets(
    spec: &MetricSpec,
    a: &SetDescriptor,
    b: &SetDescriptor,
    cfg: &AnalysisConfig,
) -> Result<ProximalData> {
    cfg.validate()?;
    let g = gap(spec, a, b, cfg)?;
    let mut data = ProximalData {
        gap: g.gap,
        attained: g.attained,
        a0_sample: Vec::new(),
        b0_sample: Vec::new(),
        pairs: Vec::new(),
        eps_eq: cfg.eps_eq,
        limit_pair: None,
    };
    if !g.attained {
        data.limit_pair = Some(g.best_pair);
        return Ok(data);
    }
    let (mut a0, mut b0, mut pairs) = (Vec::new(), Vec::new(), Vec::new());
    for x in enumerate_profiled(a, cfg.density) {
        let r = dist_to_set(spec, &x, b)?;
        if r.attained && (r.value - g.gap).abs() <= cfg.eps_eq {
            a0.push(x.clone());
            b0.push(r.witness.clone());
            pairs.push((x, r.witness));
        }
    }
    for y in enumerate_profiled(b, cfg.density) {
        let r = dist_to_set(spec, &y, a)?;
        if r.attained && (r.value - g.gap).abs() <= cfg.eps_eq {
            a0.push(r.witness.clone());
            b0.push(y.clone());
            pairs.push((r.witness, y));
        }
    }
    let (x, y) = g.best_pair;
    if (spec.dist(&x, &y) - g.gap).abs() <= cfg.eps_eq {
        a0.push(x.clone());
        b0.push(y.clone());
        pairs.push((x, y));
    }
    let mut seen = HashSet::new();
    data.pairs = pairs
        .into_iter()
        .filter(|(x, y)| seen.insert((bits_key(x), bits_key(y))))
        .collect();
    data.a0_sample = dedup(a0);
    data.b0_sample = dedup(b0);
    Ok(data)
}

/// A proximal subset `S₀ = { x ∈ S : d(x, partner) = gap attained }`.
#[derive(Clone, Copy, Debug)]
pub struct SubsetProfile<'a> {
    pub set: &'a SetDescriptor,
    pub partner: &'a SetDescriptor,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClosureVerdict {
    Closed { reason: String },
    NotClosed { sequence: SymbolicSequence, limit: Point },
    Inconclusive { reason: String },
}

impl ClosureVerdict {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosureVerdict::Closed { .. })
    }
}

fn in_subset(spec: &MetricSpec, profile: &SubsetProfile<'_>, x: &Point, eps: f64) -> Result<bool> {
    if !contains_unchecked(profile.set, x, eps) {
        return Ok(false);
    }
    let r = dist_to_set(spec, x, profile.partner)?;
    Ok(r.attained && (r.value - profile.gap).abs() <= eps)
}

fn enumerated_subset(
    spec: &MetricSpec,
    profile: &SubsetProfile<'_>,
    density: usize,
    eps: f64,
) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for x in enumerate_profiled(profile.set, density) {
        if in_subset(spec, profile, &x, eps)? {
            out.push(x);
        }
    }
    Ok(dedup(out))
}

/// Closedness of a proximal subset, judged from the declared sequences.
///
/// In order: a declared convergent sequence whose first `seq_terms` terms all
/// lie in the subset but whose limit does not is a witness of non-closedness;
/// an empty subset is closed; a subset of a closed set paired with a closed
/// partner in finite dimension is closed (bounded pairing sequences have
/// convergent subsequences); a subset whose enumeration does not grow when
/// the density is doubled is finite, hence closed. Anything else is
/// inconclusive.
pub fn is_closed_in_profile(
    spec: &MetricSpec,
    profile: &SubsetProfile<'_>,
    subset_sample: &[Point],
    sequences: &[SymbolicSequence],
    cfg: &AnalysisConfig,
) -> ClosureVerdict {
    match closure_rules(spec, profile, subset_sample, sequences, cfg) {
        Ok(v) => v,
        Err(e) => ClosureVerdict::Inconclusive {
            reason: format!("evaluation failed: {e}"),
        },
    }
}

fn closure_rules(
    spec: &MetricSpec,
    profile: &SubsetProfile<'_>,
    subset_sample: &[Point],
    sequences: &[SymbolicSequence],
    cfg: &AnalysisConfig,
) -> Result<ClosureVerdict> {
    let eps = cfg.eps_eq;
    for seq in sequences {
        let Some(limit) = seq.limit() else { continue };
        let mut all_in = true;
        for t in seq.first_terms(cfg.seq_terms) {
            if !in_subset(spec, profile, &t, eps)? {
                all_in = false;
                break;
            }
        }
        if all_in && !in_subset(spec, profile, &limit, eps)? {
            return Ok(ClosureVerdict::NotClosed {
                sequence: seq.clone(),
                limit,
            });
        }
    }
    if subset_sample.is_empty() {
        return Ok(ClosureVerdict::Closed {
            reason: "empty".into(),
        });
    }
    if profile.set.is_closed() && profile.partner.is_closed() && !spec.is_discrete() {
        return Ok(ClosureVerdict::Closed {
            reason: "closed pair in finite dimension".into(),
        });
    }
    let coarse = enumerated_subset(spec, profile, cfg.density, eps)?;
    let fine = enumerated_subset(spec, profile, 2 * cfg.density - 1, eps)?;
    if !coarse.is_empty() && coarse == fine {
        return Ok(ClosureVerdict::Closed {
            reason: format!("finite ({} points, stable under refinement)", coarse.len()),
        });
    }
    Ok(ClosureVerdict::Inconclusive {
        reason: "no declared sequence decides closedness".into(),
    })
}
