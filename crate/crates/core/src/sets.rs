//! Set descriptors for the two sides of a proximity problem.
//!
//! A set is a finite cloud, a convex parametric body (interval, box, ball,
//! affine slice, ray), a union, or a *profiled* set: a finite core plus
//! symbolic sequences with declared limit behaviour. Profiled sets let the
//! gap analysis tell an infimum that is attained apart from one that is only
//! approached along a sequence whose limit lies outside the set.

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{dot, l2, small_rational, MetricSpec, Point, METRIC_TOL};

/// Largest sequence index inspected by membership and infimum searches.
pub const TERM_INDEX_BOUND: u64 = 1_000_000;

/// Parameter bound used when enumerating rays.
pub const RAY_PARAM_BOUND: f64 = 1e3;

/// `x_n = c + a / n` for `n >= n_min`, coordinate-wise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSequence {
    pub c: Vec<f64>,
    pub a: Vec<f64>,
    pub n_min: u64,
    pub limit_in_set: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisShift {
    pub base: Point,
    /// First 0-based coordinate index that is shifted.
    pub start_index: usize,
}

/// `u_n = base + e_n` for `n = start_index, start_index + 1, …` (0-based).
///
/// The terms are pairwise separated, so the sequence has no limit; in a
/// finite truncation it has one term per remaining coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisShiftSequence {
    pub basis_shift: BasisShift,
    pub divergent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolicSequence {
    Affine(AffineSequence),
    BasisShift(BasisShiftSequence),
}

impl AffineSequence {
    pub fn new(c: Vec<f64>, a: Vec<f64>, n_min: u64, limit_in_set: bool) -> Self {
        AffineSequence {
            c,
            a,
            n_min,
            limit_in_set,
        }
    }

    pub fn term(&self, n: u64) -> Point {
        let n = n as f64;
        Point::new(self.c.iter().zip(&self.a).map(|(c, a)| c + a / n).collect())
    }

    pub fn limit(&self) -> Point {
        Point::new(self.c.clone())
    }

    fn is_constant(&self) -> bool {
        self.a.iter().all(|a| *a == 0.0)
    }
}

impl BasisShiftSequence {
    pub fn new(base: Point, start_index: usize) -> Self {
        BasisShiftSequence {
            basis_shift: BasisShift { base, start_index },
            divergent: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis_shift.base.dim()
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.basis_shift.start_index..self.dim()
    }

    pub fn term(&self, index: usize) -> Point {
        let mut c = self.basis_shift.base.coords().to_vec();
        c[index] += 1.0;
        Point::new(c)
    }

    pub fn terms(&self) -> Vec<Point> {
        self.indices().map(|i| self.term(i)).collect()
    }
}

impl SymbolicSequence {
    pub fn affine(c: Vec<f64>, a: Vec<f64>, n_min: u64, limit_in_set: bool) -> Self {
        SymbolicSequence::Affine(AffineSequence::new(c, a, n_min, limit_in_set))
    }

    pub fn basis_shift(base: Point, start_index: usize) -> Self {
        SymbolicSequence::BasisShift(BasisShiftSequence::new(base, start_index))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymbolicSequence::Affine(s) => s.c.len(),
            SymbolicSequence::BasisShift(s) => s.dim(),
        }
    }

    /// Declared limit; `None` for divergent sequences.
    pub fn limit(&self) -> Option<Point> {
        match self {
            SymbolicSequence::Affine(s) => Some(s.limit()),
            SymbolicSequence::BasisShift(_) => None,
        }
    }

    pub fn limit_in_set(&self) -> bool {
        match self {
            SymbolicSequence::Affine(s) => s.limit_in_set,
            SymbolicSequence::BasisShift(_) => false,
        }
    }

    /// The first `count` terms in ascending index order.
    pub fn first_terms(&self, count: usize) -> Vec<Point> {
        match self {
            SymbolicSequence::Affine(s) => (s.n_min..s.n_min.saturating_add(count as u64))
                .map(|n| s.term(n))
                .collect(),
            SymbolicSequence::BasisShift(s) => s.indices().take(count).map(|i| s.term(i)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SymbolicSequence::Affine(s) => {
                if s.c.len() != s.a.len() {
                    return Err(Error::InvalidSet("sequence c and a differ in length".into()));
                }
                if s.n_min == 0 {
                    return Err(Error::InvalidSet("n_min must be positive".into()));
                }
            }
            SymbolicSequence::BasisShift(s) => {
                if !s.divergent {
                    return Err(Error::InvalidSet("basis_shift sequences are divergent".into()));
                }
                if s.basis_shift.start_index >= s.dim() {
                    return Err(Error::InvalidSet("basis_shift start_index out of range".into()));
                }
            }
        }
        Ok(())
    }
}

/// One of the sets `A`, `B` (or a part of one).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetDescriptor {
    FiniteCloud {
        points: Vec<Point>,
    },
    /// `{ base with coordinate `axis` replaced by t : lo <= t <= hi }`.
    Interval {
        base: Point,
        axis: usize,
        lo: f64,
        hi: f64,
    },
    #[serde(rename = "box")]
    AxisBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Euclidean ball.
    Ball {
        center: Point,
        radius: f64,
        #[serde(default = "yes")]
        closed: bool,
    },
    /// `{ x : x[index] = value, ‖x‖ <= bound }` with `‖·‖` given by `norm`.
    AffineSlice {
        index: usize,
        value: f64,
        bound: f64,
        norm: MetricSpec,
    },
    /// `{ base + t·direction : t >= 0 }`, or `t > 0` when the base is excluded.
    Ray {
        base: Point,
        direction: Vec<f64>,
        #[serde(default = "yes")]
        include_base: bool,
    },
    Union {
        parts: Vec<SetDescriptor>,
    },
    Profiled {
        #[serde(default)]
        core: Vec<Point>,
        #[serde(default)]
        sequences: Vec<SymbolicSequence>,
        closed: bool,
    },
}

fn yes() -> bool {
    true
}

/// Result of a point-to-set infimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDistance {
    pub value: f64,
    pub attained: bool,
    /// Minimising point, or the limiting point when the infimum is not attained.
    pub witness: Point,
}

/// A piece of a set that admits its own distance routine.
#[derive(Clone, Debug)]
pub(crate) enum Atom<'a> {
    Points(Vec<Point>),
    Sequence(&'a AffineSequence),
    Convex(&'a SetDescriptor),
}

impl SetDescriptor {
    pub fn finite(points: Vec<Point>) -> Self {
        SetDescriptor::FiniteCloud { points }
    }

    pub fn interval(base: Point, axis: usize, lo: f64, hi: f64) -> Self {
        SetDescriptor::Interval { base, axis, lo, hi }
    }

    /// `[lo, hi]` on the real line.
    pub fn real_interval(lo: f64, hi: f64) -> Self {
        SetDescriptor::interval(Point::new(vec![0.0]), 0, lo, hi)
    }

    pub fn ray(base: Point, direction: Vec<f64>) -> Self {
        SetDescriptor::Ray {
            base,
            direction,
            include_base: true,
        }
    }

    pub fn open_ray(base: Point, direction: Vec<f64>) -> Self {
        SetDescriptor::Ray {
            base,
            direction,
            include_base: false,
        }
    }

    pub fn ball(center: Point, radius: f64) -> Self {
        SetDescriptor::Ball {
            center,
            radius,
            closed: true,
        }
    }

    pub fn union(parts: Vec<SetDescriptor>) -> Self {
        SetDescriptor::Union { parts }
    }

    pub fn profiled(core: Vec<Point>, sequences: Vec<SymbolicSequence>, closed: bool) -> Self {
        SetDescriptor::Profiled {
            core,
            sequences,
            closed,
        }
    }

    pub fn dim(&self) -> Result<usize> {
        match self {
            SetDescriptor::FiniteCloud { points } => {
                points.first().map(Point::dim).ok_or(Error::EmptySet)
            }
            SetDescriptor::Interval { base, .. } => Ok(base.dim()),
            SetDescriptor::AxisBox { lo, .. } => Ok(lo.len()),
            SetDescriptor::Ball { center, .. } => Ok(center.dim()),
            SetDescriptor::AffineSlice { norm, .. } => Ok(norm.dim),
            SetDescriptor::Ray { base, .. } => Ok(base.dim()),
            SetDescriptor::Union { parts } => parts.first().ok_or(Error::EmptySet)?.dim(),
            SetDescriptor::Profiled {
                core, sequences, ..
            } => core
                .first()
                .map(Point::dim)
                .or_else(|| sequences.first().map(SymbolicSequence::dim))
                .ok_or(Error::EmptySet),
        }
    }

    /// Structural checks: consistent dimensions, ordered bounds, and the
    /// profiled closed flag agreeing with the declared sequences.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim()?;
        let same = |d: usize| -> Result<()> {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
            Ok(())
        };
        match self {
            SetDescriptor::FiniteCloud { points } => {
                for p in points {
                    same(p.dim())?;
                }
            }
            SetDescriptor::Interval { axis, lo, hi, .. } => {
                if *axis >= dim {
                    return Err(Error::InvalidSet("interval axis out of range".into()));
                }
                if !(lo <= hi) {
                    return Err(Error::InvalidSet("interval needs lo <= hi".into()));
                }
            }
            SetDescriptor::AxisBox { lo, hi } => {
                same(hi.len())?;
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    return Err(Error::InvalidSet("box needs lo <= hi".into()));
                }
            }
            SetDescriptor::Ball { radius, .. } => {
                if !(*radius >= 0.0) {
                    return Err(Error::InvalidSet("ball radius must be non-negative".into()));
                }
            }
            SetDescriptor::AffineSlice {
                index,
                value,
                bound,
                norm,
            } => {
                norm.validate()?;
                if *index >= dim {
                    return Err(Error::InvalidSet("slice index out of range".into()));
                }
                let mut center = vec![0.0; dim];
                center[*index] = *value;
                if norm.norm(&center) > bound + METRIC_TOL {
                    return Err(Error::EmptySet);
                }
            }
            SetDescriptor::Ray { direction, .. } => {
                same(direction.len())?;
                if direction.iter().all(|d| *d == 0.0) {
                    return Err(Error::InvalidSet("ray direction must be nonzero".into()));
                }
            }
            SetDescriptor::Union { parts } => {
                for p in parts {
                    p.validate()?;
                    same(p.dim()?)?;
                }
            }
            SetDescriptor::Profiled {
                core,
                sequences,
                closed,
            } => {
                for p in core {
                    same(p.dim())?;
                }
                for s in sequences {
                    s.validate()?;
                    same(s.dim())?;
                    if *closed && s.limit().is_some() && !s.limit_in_set() {
                        return Err(Error::InvalidSet(
                            "closed profiled set declares a sequence whose limit is outside it"
                                .into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Structural closedness; unions are reported closed only when every part is.
    pub fn is_closed(&self) -> bool {
        match self {
            SetDescriptor::Ball { closed, .. } => *closed,
            SetDescriptor::Ray { include_base, .. } => *include_base,
            SetDescriptor::Union { parts } => parts.iter().all(SetDescriptor::is_closed),
            SetDescriptor::Profiled { closed, .. } => *closed,
            _ => true,
        }
    }

    /// Closed convex bodies with closed-form Euclidean projections.
    pub fn is_parametric_convex(&self) -> bool {
        match self {
            SetDescriptor::Interval { .. }
            | SetDescriptor::AxisBox { .. }
            | SetDescriptor::AffineSlice { .. } => true,
            SetDescriptor::Ball { closed, .. } => *closed,
            SetDescriptor::Ray { include_base, .. } => *include_base,
            SetDescriptor::FiniteCloud { points } => points.len() == 1,
            _ => false,
        }
    }

    /// Every sequence declared anywhere inside the descriptor, in order.
    pub fn declared_sequences(&self) -> Vec<&SymbolicSequence> {
        match self {
            SetDescriptor::Profiled { sequences, .. } => sequences.iter().collect(),
            SetDescriptor::Union { parts } => {
                parts.iter().flat_map(|p| p.declared_sequences()).collect()
            }
            _ => Vec::new(),
        }
    }

    pub(crate) fn atoms(&self) -> Vec<Atom<'_>> {
        let mut out = Vec::new();
        self.push_atoms(&mut out);
        out
    }

    fn push_atoms<'a>(&'a self, out: &mut Vec<Atom<'a>>) {
        match self {
            SetDescriptor::FiniteCloud { points } => out.push(Atom::Points(points.clone())),
            SetDescriptor::Union { parts } => parts.iter().for_each(|p| p.push_atoms(out)),
            SetDescriptor::Profiled {
                core, sequences, ..
            } => {
                if !core.is_empty() {
                    out.push(Atom::Points(core.clone()));
                }
                for s in sequences {
                    match s {
                        SymbolicSequence::Affine(a) => out.push(Atom::Sequence(a)),
                        SymbolicSequence::BasisShift(b) => out.push(Atom::Points(b.terms())),
                    }
                }
            }
            other => out.push(Atom::Convex(other)),
        }
    }
}

pub(crate) fn euclid_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Golden-section minimisation of a convex function on `[lo, hi]`; endpoints
/// are always compared so boundary minima are returned exactly.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut best = (lo, f(lo));
    for t in [hi, c, d] {
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Minimises a unimodal function over the integers `lo..=hi`, preferring the
/// smallest index on ties.
pub(crate) fn unimodal_argmin(f: impl Fn(u64) -> f64, lo: u64, hi: u64) -> (u64, f64) {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 3 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1 + 1;
        }
    }
    let mut best = (lo, f(lo));
    for n in lo + 1..=hi {
        let v = f(n);
        if v < best.1 {
            best = (n, v);
        }
    }
    best
}

fn interval_point(base: &Point, axis: usize, t: f64) -> Point {
    let mut c = base.coords().to_vec();
    c[axis] = t;
    Point::new(c)
}

/// Closest term of an affine sequence in coordinate (Euclidean) distance.
fn closest_term_coord(seq: &AffineSequence, x: &Point) -> Point {
    if seq.is_constant() {
        return seq.limit();
    }
    let diff: Vec<f64> = x.coords().iter().zip(&seq.c).map(|(x, c)| x - c).collect();
    let s = dot(&seq.a, &diff) / dot(&seq.a, &seq.a);
    let mut candidates = vec![seq.n_min, TERM_INDEX_BOUND.max(seq.n_min)];
    if s > 0.0 {
        let n = 1.0 / s;
        if n.is_finite() && n < TERM_INDEX_BOUND as f64 {
            candidates.push((n.floor() as u64).max(seq.n_min));
            candidates.push((n.ceil() as u64).max(seq.n_min));
        }
    }
    candidates
        .into_iter()
        .map(|n| seq.term(n))
        .min_by(|p, q| x.coord_dist(p).total_cmp(&x.coord_dist(q)))
        .unwrap()
}

/// Membership with tolerance: `x` lies within `eps` (coordinate distance) of
/// the set. Excluded boundaries of open bodies and excluded sequence limits
/// stay excluded regardless of `eps`.
pub fn contains(set: &SetDescriptor, x: &Point, eps: f64) -> Result<bool> {
    x.check_dim(set.dim()?)?;
    Ok(contains_unchecked(set, x, eps))
}

pub(crate) fn contains_unchecked(set: &SetDescriptor, x: &Point, eps: f64) -> bool {
    match set {
        SetDescriptor::FiniteCloud { points } => points.iter().any(|p| x.coord_dist(p) <= eps),
        SetDescriptor::Interval { base, axis, lo, hi } => {
            let t = x.coords()[*axis].clamp(*lo, *hi);
            x.coord_dist(&interval_point(base, *axis, t)) <= eps
        }
        SetDescriptor::AxisBox { lo, hi } => {
            let clamped: Vec<f64> = x
                .coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.clamp(*l, *h))
                .collect();
            euclid_dist(x.coords(), &clamped) <= eps
        }
        SetDescriptor::Ball {
            center,
            radius,
            closed,
        } => {
            let r = x.coord_dist(center);
            if *closed {
                r <= radius + eps
            } else {
                r < *radius
            }
        }
        SetDescriptor::AffineSlice {
            index,
            value,
            bound,
            norm,
        } => (x.coords()[*index] - value).abs() <= eps && norm.norm(x.coords()) <= bound + eps,
        SetDescriptor::Ray {
            base,
            direction,
            include_base,
        } => {
            let diff = x.sub(base);
            let t = (dot(&diff, direction) / dot(direction, direction)).max(0.0);
            let near = x.coord_dist(&base.offset(direction, t)) <= eps;
            near && (*include_base || x.coord_dist(base) > eps)
        }
        SetDescriptor::Union { parts } => parts.iter().any(|p| contains_unchecked(p, x, eps)),
        SetDescriptor::Profiled {
            core, sequences, ..
        } => {
            core.iter().any(|p| x.coord_dist(p) <= eps)
                || sequences.iter().any(|s| match s {
                    SymbolicSequence::Affine(a) => {
                        x.coord_dist(&closest_term_coord(a, x)) <= eps
                            || (a.limit_in_set && x.coord_dist(&a.limit()) <= eps)
                    }
                    SymbolicSequence::BasisShift(b) => {
                        b.indices().any(|i| x.coord_dist(&b.term(i)) <= eps)
                    }
                })
        }
    }
}

fn pick_best(candidates: impl IntoIterator<Item = SetDistance>) -> Option<SetDistance> {
    let all: Vec<SetDistance> = candidates.into_iter().collect();
    let min = all.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    // among (near-)minimal candidates prefer an attained one, then the first
    let mut best: Option<SetDistance> = None;
    for c in all {
        if c.value > min + METRIC_TOL {
            continue;
        }
        match &best {
            None => best = Some(c),
            Some(b) if !b.attained && c.attained => best = Some(c),
            _ => {}
        }
    }
    best.map(|mut b| {
        b.value = b.value.min(min);
        b
    })
}

pub(crate) fn dist_to_points(spec: &MetricSpec, x: &Point, points: &[Point]) -> Option<SetDistance> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let d = spec.dist(x, p);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, d)| SetDistance {
        value: d,
        attained: true,
        witness: points[i].clone(),
    })
}

/// Whether the infimum over a sequence is its limit rather than a term: the
/// limit is strictly closer, or the tail term at the index bound is as good
/// as the best term while still strictly above the limit (the distance is
/// convex in `1/n`, so it keeps decreasing towards the limit).
pub(crate) fn limit_wins(v_best: f64, v_tail: f64, lim: f64) -> bool {
    lim < v_best - METRIC_TOL || (v_tail > lim && v_tail <= v_best + METRIC_TOL)
}

/// Infimum of `d(x, term_n)` over `n in [n_min, TERM_INDEX_BOUND]`, compared
/// with the distance to the limit. For a norm metric `n ↦ d(x, c + a/n)` is
/// convex in `1/n`, hence unimodal in `n`.
pub(crate) fn dist_to_sequence(spec: &MetricSpec, x: &Point, seq: &AffineSequence) -> SetDistance {
    let hi = TERM_INDEX_BOUND.max(seq.n_min);
    let (n_best, v_best) = unimodal_argmin(|n| spec.dist(x, &seq.term(n)), seq.n_min, hi);
    let limit = seq.limit();
    let lim = spec.dist(x, &limit);
    let v_tail = spec.dist(x, &seq.term(hi));
    if limit_wins(v_best, v_tail, lim) {
        SetDistance {
            value: lim.min(v_best),
            attained: seq.limit_in_set,
            witness: limit,
        }
    } else {
        SetDistance {
            value: v_best,
            attained: true,
            witness: seq.term(n_best),
        }
    }
}

fn dist_to_convex(spec: &MetricSpec, x: &Point, set: &SetDescriptor) -> Result<SetDistance> {
    let attained = |witness: Point, value: f64| SetDistance {
        value,
        attained: true,
        witness,
    };
    match set {
        SetDescriptor::Interval { base, axis, lo, hi } => {
            // only the axis coordinate is free; clamping it is optimal for
            // every absolute monotone norm
            let w = interval_point(base, *axis, x.coords()[*axis].clamp(*lo, *hi));
            let d = spec.dist(x, &w);
            Ok(attained(w, d))
        }
        SetDescriptor::AxisBox { lo, hi } => {
            let w = Point::new(
                x.coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            );
            let d = spec.dist(x, &w);
            Ok(attained(w, d))
        }
        SetDescriptor::Ball {
            center,
            radius,
            closed,
        } => {
            if !spec.is_euclidean() {
                return Err(Error::Unsupported(
                    "ball distance requires a Euclidean metric".into(),
                ));
            }
            let diff = x.sub(center);
            let r = l2(&diff);
            if r <= *radius {
                return Ok(attained(x.clone(), 0.0));
            }
            let w = center.offset(&diff, radius / r);
            Ok(SetDistance {
                value: r - radius,
                attained: *closed,
                witness: w,
            })
        }
        SetDescriptor::AffineSlice {
            index,
            value,
            bound,
            norm,
        } => {
            let mut y = x.coords().to_vec();
            y[*index] = *value;
            if norm.norm(&y) <= bound + METRIC_TOL {
                // x − y is supported on one coordinate, which is a lower bound
                // for any absolute monotone norm
                let w = Point::new(y);
                let d = spec.dist(x, &w);
                return Ok(attained(w, d));
            }
            if spec.is_euclidean() && norm.is_euclidean() {
                let r = (bound * bound - value * value).max(0.0).sqrt();
                let mut off = y.clone();
                off[*index] = 0.0;
                let len = l2(&off);
                let scale = if len > r { r / len } else { 1.0 };
                let mut w: Vec<f64> = off.iter().map(|v| v * scale).collect();
                w[*index] = *value;
                let w = Point::new(w);
                let d = spec.dist(x, &w);
                return Ok(attained(w, d));
            }
            Err(Error::Unsupported(
                "affine slice distance outside the coordinate-drop and Euclidean cases".into(),
            ))
        }
        SetDescriptor::Ray {
            base,
            direction,
            include_base,
        } => {
            let diff = x.sub(base);
            let t = if spec.is_euclidean() {
                (dot(&diff, direction) / dot(direction, direction)).max(0.0)
            } else {
                let dir_norm = spec.norm(direction);
                let reach = 2.0 * spec.norm(&diff) / dir_norm + 1.0;
                golden_min(|t| spec.dist(x, &base.offset(direction, t)), 0.0, reach).0
            };
            let w = if t == 0.0 {
                base.clone()
            } else {
                base.offset(direction, t)
            };
            let d = spec.dist(x, &w);
            Ok(SetDistance {
                value: d,
                attained: t > 0.0 || *include_base,
                witness: w,
            })
        }
        SetDescriptor::FiniteCloud { points } => {
            dist_to_points(spec, x, points).ok_or(Error::EmptySet)
        }
        _ => unreachable!("not a convex atom"),
    }
}

pub(crate) fn dist_to_atom(spec: &MetricSpec, x: &Point, atom: &Atom<'_>) -> Result<Option<SetDistance>> {
    Ok(match atom {
        Atom::Points(pts) => dist_to_points(spec, x, pts),
        Atom::Sequence(seq) => Some(dist_to_sequence(spec, x, seq)),
        Atom::Convex(set) => Some(dist_to_convex(spec, x, set)?),
    })
}

/// `d(x, S) = inf { d(x, s) : s ∈ S }` with attainment and a witness.
pub fn dist_to_set(spec: &MetricSpec, x: &Point, set: &SetDescriptor) -> Result<SetDistance> {
    x.check_dim(spec.dim)?;
    x.check_dim(set.dim()?)?;
    if spec.is_discrete() {
        if contains_unchecked(set, x, 0.0) {
            return Ok(SetDistance {
                value: 0.0,
                attained: true,
                witness: x.clone(),
            });
        }
        let first = enumerate_profiled(set, 2)
            .into_iter()
            .next()
            .ok_or(Error::EmptySet)?;
        return Ok(SetDistance {
            value: 1.0,
            attained: true,
            witness: first,
        });
    }
    let mut results = Vec::new();
    for atom in set.atoms() {
        if let Some(r) = dist_to_atom(spec, x, &atom)? {
            results.push(r);
        }
    }
    pick_best(results).ok_or(Error::EmptySet)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * (k as f64 / (n - 1) as f64))
            .collect(),
    }
}

fn exact_grid(lo: f64, hi: f64, n: usize) -> Option<Vec<Rational64>> {
    let (lo, hi) = (small_rational(lo)?, small_rational(hi)?);
    let span = hi.checked_sub(&lo)?;
    match n {
        0 => Some(Vec::new()),
        1 => Some(vec![lo]),
        _ => (0..n)
            .map(|k| {
                let r = Rational64::new(k as i64, (n - 1) as i64);
                lo.checked_add(&span.checked_mul(&r)?)
            })
            .collect(),
    }
}

/// Largest `t >= 0` with `‖center + t·e_axis‖ <= bound` (bisection).
fn slice_reach(norm: &MetricSpec, center: &[f64], axis: usize, bound: f64) -> f64 {
    let at = |t: f64| {
        let mut v = center.to_vec();
        v[axis] = t;
        norm.norm(&v)
    };
    let mut hi = bound.max(1.0);
    while at(hi) <= bound {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if at(mid) <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Deterministic finite sample of a set.
///
/// Profiled sets yield the core followed by `n` terms of each sequence (basis
/// shifts stop at the truncation dimension). Parametric sets are discretised
/// with `n` samples per parameter and always include boundary points:
/// interval endpoints, box corners, ball axis extremes, slice reach points
/// along every free axis, and the base of a closed ray (rays are truncated at
/// [`RAY_PARAM_BOUND`]). Interval samples carry exact rational tags when the
/// endpoints and base are recognisably rational.
pub fn enumerate_profiled(set: &SetDescriptor, n: usize) -> Vec<Point> {
    match set {
        SetDescriptor::FiniteCloud { points } => points.clone(),
        SetDescriptor::Interval { base, axis, lo, hi } => {
            let ts = grid(*lo, *hi, n);
            let base_exact: Option<Vec<Rational64>> =
                (0..base.dim()).map(|i| base.rational_coord(i)).collect();
            let exact = base_exact.zip(exact_grid(*lo, *hi, n));
            ts.iter()
                .enumerate()
                .map(|(k, t)| {
                    let p = interval_point(base, *axis, *t);
                    match &exact {
                        Some((b, g)) => {
                            let mut q = b.clone();
                            q[*axis] = g[k];
                            Point::with_exact(p.coords().to_vec(), q)
                        }
                        None => p,
                    }
                })
                .collect()
        }
        SetDescriptor::AxisBox { lo, hi } => {
            let axes: Vec<Vec<f64>> = lo.iter().zip(hi).map(|(l, h)| grid(*l, *h, n)).collect();
            let mut out = vec![Vec::new()];
            for axis in &axes {
                out = out
                    .into_iter()
                    .flat_map(|prefix: Vec<f64>| {
                        axis.iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push(*v);
                            p
                        })
                    })
                    .collect();
            }
            out.into_iter().map(Point::new).collect()
        }
        SetDescriptor::Ball {
            center,
            radius,
            closed,
        } => {
            let axes: Vec<Vec<f64>> = center
                .coords()
                .iter()
                .map(|c| grid(c - radius, c + radius, n))
                .collect();
            let mut cells = vec![Vec::new()];
            for axis in &axes {
                cells = cells
                    .into_iter()
                    .flat_map(|prefix: Vec<f64>| {
                        axis.iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push(*v);
                            p
                        })
                    })
                    .collect();
            }
            let mut out: Vec<Point> = cells
                .into_iter()
                .map(Point::new)
                .filter(|p| {
                    let r = p.coord_dist(center);
                    if *closed {
                        r <= *radius
                    } else {
                        r < *radius
                    }
                })
                .collect();
            if *closed {
                for i in 0..center.dim() {
                    for s in [-1.0, 1.0] {
                        let mut c = center.coords().to_vec();
                        c[i] += s * radius;
                        let p = Point::new(c);
                        if !out.iter().any(|q| q.coord_dist(&p) <= METRIC_TOL) {
                            out.push(p);
                        }
                    }
                }
            }
            out
        }
        SetDescriptor::AffineSlice {
            index,
            value,
            bound,
            norm,
        } => {
            let mut center = vec![0.0; norm.dim];
            center[*index] = *value;
            let mut out = vec![Point::new(center.clone())];
            for axis in (0..norm.dim).filter(|a| a != index) {
                let reach = slice_reach(norm, &center, axis, *bound);
                for t in grid(-reach, reach, n) {
                    if t == 0.0 {
                        continue;
                    }
                    let mut c = center.clone();
                    c[axis] = t;
                    out.push(Point::new(c));
                }
            }
            out
        }
        SetDescriptor::Ray {
            base,
            direction,
            include_base,
        } => {
            let ts: Vec<f64> = if *include_base {
                grid(0.0, RAY_PARAM_BOUND, n)
            } else {
                (1..=n)
                    .map(|k| RAY_PARAM_BOUND * (k as f64 / n as f64))
                    .collect()
            };
            ts.into_iter()
                .map(|t| {
                    if t == 0.0 {
                        base.clone()
                    } else {
                        base.offset(direction, t)
                    }
                })
                .collect()
        }
        SetDescriptor::Union { parts } => parts
            .iter()
            .flat_map(|p| enumerate_profiled(p, n))
            .collect(),
        SetDescriptor::Profiled {
            core, sequences, ..
        } => {
            let mut out = core.clone();
            for s in sequences {
                out.extend(s.first_terms(n));
            }
            out
        }
    }
}
