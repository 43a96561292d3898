//! Points and the metrics used by every other module.
//!
//! All supported metrics except `discrete` are induced by absolute, monotone
//! norms on coordinate space. Several closed-form distance routines in
//! [`crate::sets`] rely on that (coordinate clamping is optimal for boxes,
//! dropping one coordinate is optimal for affine slices).

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for arithmetic noise at metric level.
pub const METRIC_TOL: f64 = 1e-12;

/// Largest denominator accepted when recognising an untagged float as rational.
pub const RATIONAL_DENOM_BOUND: i64 = 1_000_000;

/// A finite-dimensional point, optionally carrying exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    coords: Vec<f64>,
    exact: Option<Vec<Rational64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Plain(Vec<f64>),
    Tagged {
        coords: Vec<f64>,
        exact: Vec<Rational64>,
    },
}

impl TryFrom<PointRepr> for Point {
    type Error = String;

    fn try_from(repr: PointRepr) -> std::result::Result<Self, Self::Error> {
        match repr {
            PointRepr::Plain(coords) => Ok(Point::new(coords)),
            PointRepr::Tagged { coords, exact } => {
                if coords.len() != exact.len() {
                    return Err(format!(
                        "exact tag has {} entries for {} coordinates",
                        exact.len(),
                        coords.len()
                    ));
                }
                for (c, q) in coords.iter().zip(&exact) {
                    if (c - ratio_to_f64(q)).abs() > METRIC_TOL {
                        return Err(format!("coordinate {c} inconsistent with exact value {q}"));
                    }
                }
                Ok(Point {
                    coords,
                    exact: Some(exact),
                })
            }
        }
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        match p.exact {
            None => PointRepr::Plain(p.coords),
            Some(exact) => PointRepr::Tagged {
                coords: p.coords,
                exact,
            },
        }
    }
}

pub(crate) fn ratio_to_f64(q: &Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Recognises floats that are exactly `n / d` for some `d <= RATIONAL_DENOM_BOUND`.
///
/// Walks the continued-fraction convergents of `x` and accepts the first one
/// whose float quotient reproduces `x` bit for bit.
pub fn small_rational(x: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        return Some(Rational64::from_integer(x as i64));
    }
    let (mut h_prev, mut h) = (0i64, 1i64);
    let (mut k_prev, mut k) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 9.0e15 {
            break;
        }
        let a = a as i64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > RATIONAL_DENOM_BOUND {
            break;
        }
        if h_next as f64 / k_next as f64 == x {
            return Some(Rational64::new(h_next, k_next));
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point {
            coords,
            exact: None,
        }
    }

    /// Builds a point from exact rationals; the float coordinates are derived.
    pub fn from_rationals(values: Vec<Rational64>) -> Self {
        Point {
            coords: values.iter().map(ratio_to_f64).collect(),
            exact: Some(values),
        }
    }

    /// Float coordinates with an exact tag; the two must agree within [`METRIC_TOL`].
    pub(crate) fn with_exact(coords: Vec<f64>, exact: Vec<Rational64>) -> Self {
        debug_assert!(coords
            .iter()
            .zip(&exact)
            .all(|(c, q)| (c - ratio_to_f64(q)).abs() <= METRIC_TOL));
        Point {
            coords,
            exact: Some(exact),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Point::new(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Point::new(c)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn exact(&self) -> Option<&[Rational64]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact value of coordinate `i` if it is tagged or recognisably rational.
    pub fn rational_coord(&self, i: usize) -> Option<Rational64> {
        match &self.exact {
            Some(q) => Some(q[i]),
            None => small_rational(self.coords[i]),
        }
    }

    /// True when every coordinate is rational (tagged or recognised).
    pub fn is_rational(&self) -> bool {
        (0..self.dim()).all(|i| self.rational_coord(i).is_some())
    }

    /// Drops the exact tag.
    pub fn untagged(&self) -> Point {
        Point::new(self.coords.clone())
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `self + t * dir`, untagged.
    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        Point::new(
            self.coords
                .iter()
                .zip(dir)
                .map(|(a, d)| a + t * d)
                .collect(),
        )
    }

    /// Euclidean distance in coordinate space, used for tolerances and dedup.
    pub fn coord_dist(&self, other: &Point) -> f64 {
        l2(&self.sub(other))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match self.exact.as_ref().map(|q| q[i]) {
                Some(q) if *q.denom() != 1 => write!(f, "{q}")?,
                _ => write!(f, "{c}")?,
            }
        }
        write!(f, ")")
    }
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Euclidean,
    PNorm,
    MaxCombinedL2Linf,
    RealLine,
    Discrete,
}

/// Describes the ambient metric `d`.
///
/// `max_combined_l2_linf` is `max(‖x−y‖₂, w·‖x−y‖∞)`; with `w = √2` it is the
/// finite truncation of the renormed ℓ₂ space in the `c6` corpus case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl MetricSpec {
    pub fn euclidean(dim: usize) -> Self {
        MetricSpec {
            kind: MetricKind::Euclidean,
            dim,
            p: None,
            weight: None,
        }
    }

    pub fn real_line() -> Self {
        MetricSpec {
            kind: MetricKind::RealLine,
            dim: 1,
            p: None,
            weight: None,
        }
    }

    pub fn p_norm(dim: usize, p: f64) -> Self {
        MetricSpec {
            kind: MetricKind::PNorm,
            dim,
            p: Some(p),
            weight: None,
        }
    }

    pub fn max_combined(dim: usize, weight: f64) -> Self {
        MetricSpec {
            kind: MetricKind::MaxCombinedL2Linf,
            dim,
            p: None,
            weight: Some(weight),
        }
    }

    pub fn discrete(dim: usize) -> Self {
        MetricSpec {
            kind: MetricKind::Discrete,
            dim,
            p: None,
            weight: None,
        }
    }

    pub fn weight(&self) -> f64 {
        self.weight.unwrap_or(std::f64::consts::SQRT_2)
    }

    pub fn exponent(&self) -> f64 {
        self.p.unwrap_or(2.0)
    }

    /// Parameter sanity: `dim >= 1`, `p >= 1`, positive weight, 1-D real line.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dim must be positive".into()));
        }
        match self.kind {
            MetricKind::PNorm => {
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidSpec("p_norm requires p".into()))?;
                if !(p >= 1.0) || !p.is_finite() {
                    return Err(Error::InvalidSpec(format!("p must be a finite real >= 1, got {p}")));
                }
            }
            MetricKind::MaxCombinedL2Linf => {
                let w = self.weight();
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidSpec(format!("weight must be positive, got {w}")));
                }
            }
            MetricKind::RealLine if self.dim != 1 => {
                return Err(Error::InvalidSpec("real_line has dim 1".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Euclidean geometry: projections and alternating projections are exact.
    pub fn is_euclidean(&self) -> bool {
        match self.kind {
            MetricKind::Euclidean | MetricKind::RealLine => true,
            MetricKind::PNorm => self.p == Some(2.0),
            _ => false,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.kind == MetricKind::Discrete
    }

    /// The norm of a difference vector; `distance(x, y) = norm(x − y)`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self.kind {
            MetricKind::Euclidean | MetricKind::RealLine => l2(v),
            MetricKind::PNorm => {
                let p = self.exponent();
                v.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p)
            }
            MetricKind::MaxCombinedL2Linf => l2(v).max(self.weight() * linf(v)),
            MetricKind::Discrete => {
                if v.iter().all(|a| *a == 0.0) {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        x.check_dim(self.dim)?;
        y.check_dim(self.dim)?;
        Ok(self.dist(x, y))
    }

    /// Unchecked variant for hot loops where dimensions are already validated.
    pub(crate) fn dist(&self, x: &Point, y: &Point) -> f64 {
        self.norm(&x.sub(y))
    }
}

pub fn distance(spec: &MetricSpec, x: &Point, y: &Point) -> Result<f64> {
    spec.distance(x, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Parameter,
    NonNegativity,
    Identity,
    Symmetry,
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// The offending points (one, two or three of them).
    pub points: Vec<Point>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub triples_checked: usize,
    pub violation: Option<AxiomViolation>,
}

/// Exhaustively checks the metric axioms on all ordered triples of `sample`.
///
/// A violating triple is reported first; a spec whose parameters are out of
/// range but still yields a metric on the sample (e.g. a negative weight,
/// which `max` silently ignores) is reported as an [`Axiom::Parameter`]
/// violation. Dimension mismatches are reported as an identity violation on
/// the offending point.
pub fn validate_metric_axioms(spec: &MetricSpec, sample: &[Point]) -> AxiomReport {
    let fail = |axiom, points: Vec<Point>, detail: String, checked| AxiomReport {
        passed: false,
        triples_checked: checked,
        violation: Some(AxiomViolation {
            axiom,
            points,
            detail,
        }),
    };
    if let Some(p) = sample.iter().find(|p| p.dim() != spec.dim) {
        return fail(
            Axiom::Identity,
            vec![p.clone()],
            format!("point has dimension {}, spec has {}", p.dim(), spec.dim),
            0,
        );
    }

    let n = sample.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = spec.dist(&sample[i], &sample[j]);
        }
    }
    for i in 0..n {
        let x = &sample[i];
        if d[i * n + i] != 0.0 {
            return fail(
                Axiom::Identity,
                vec![x.clone()],
                format!("d(x,x) = {}", d[i * n + i]),
                0,
            );
        }
        for j in 0..n {
            let y = &sample[j];
            let dxy = d[i * n + j];
            if !(dxy >= 0.0) {
                return fail(
                    Axiom::NonNegativity,
                    vec![x.clone(), y.clone()],
                    format!("d(x,y) = {dxy}"),
                    0,
                );
            }
            if dxy != d[j * n + i] {
                return fail(
                    Axiom::Symmetry,
                    vec![x.clone(), y.clone()],
                    format!("d(x,y) = {dxy}, d(y,x) = {}", d[j * n + i]),
                    0,
                );
            }
            if dxy <= METRIC_TOL && x.coord_dist(y) > METRIC_TOL {
                return fail(
                    Axiom::Identity,
                    vec![x.clone(), y.clone()],
                    format!("distinct points at distance {dxy}"),
                    0,
                );
            }
        }
    }
    let mut checked = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                checked += 1;
                let lhs = d[i * n + k];
                let rhs = d[i * n + j] + d[j * n + k];
                if lhs > rhs + METRIC_TOL {
                    return fail(
                        Axiom::Triangle,
                        vec![sample[i].clone(), sample[j].clone(), sample[k].clone()],
                        format!("d(x,z) = {lhs} > d(x,y) + d(y,z) = {rhs}"),
                        checked,
                    );
                }
            }
        }
    }
    if let Err(e) = spec.validate() {
        return fail(Axiom::Parameter, Vec::new(), e.to_string(), checked);
    }
    AxiomReport {
        passed: true,
        triples_checked: checked,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn e(dim: usize, i: usize) -> Point {
        Point::basis(dim, i)
    }

    #[test]
    fn pythagorean_distance() {
        let spec = MetricSpec::euclidean(2);
        let d = spec
            .distance(&Point::new(vec![0.0, 0.0]), &Point::new(vec![3.0, 4.0]))
            .unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn combined_norm_example_distances() {
        let n = 50;
        let spec = MetricSpec::max_combined(n, SQRT_2);
        let mut z = vec![0.0; n];
        z[0] = 2.0;
        let d = spec.distance(&Point::new(z), &e(n, 0)).unwrap();
        assert!((d - SQRT_2).abs() < 1e-12);

        // e1 + en vs e1 + em: l2 = √2, linf = 1, so max(√2, √2·1) = √2.
        for (i, j) in [(1, 2), (3, 17), (48, 49)] {
            let mut a = vec![0.0; n];
            a[0] = 1.0;
            a[i] = 1.0;
            let mut b = vec![0.0; n];
            b[0] = 1.0;
            b[j] = 1.0;
            let d = spec.distance(&Point::new(a), &Point::new(b)).unwrap();
            assert!((d - SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn combined_norm_is_exact_max() {
        let spec = MetricSpec::max_combined(3, 1.7);
        let x = Point::new(vec![0.3, -1.2, 2.5]);
        let y = Point::new(vec![-0.4, 0.9, 0.1]);
        let v = x.sub(&y);
        assert_eq!(spec.dist(&x, &y), l2(&v).max(1.7 * linf(&v)));
    }

    #[test]
    fn dimension_mismatch_is_typed() {
        let spec = MetricSpec::euclidean(2);
        let err = spec
            .distance(&Point::new(vec![0.0]), &Point::new(vec![1.0, 2.0]))
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn axioms_pass_on_small_euclidean_sample() {
        let spec = MetricSpec::euclidean(2);
        let pts = vec![
            Point::new(vec![0.0, 0.0]),
            Point::new(vec![1.0, 0.5]),
            Point::new(vec![-2.0, 3.0]),
        ];
        let r = validate_metric_axioms(&spec, &pts);
        assert!(r.passed);
        assert_eq!(r.triples_checked, 27);
    }

    #[test]
    fn negative_weight_is_reported() {
        let spec = MetricSpec::max_combined(2, -1.0);
        let pts = vec![Point::new(vec![0.0, 0.0]), Point::new(vec![1.0, 1.0])];
        let r = validate_metric_axioms(&spec, &pts);
        assert!(!r.passed);
        assert_eq!(r.violation.unwrap().axiom, Axiom::Parameter);
    }

    #[test]
    fn sub_unit_exponent_breaks_triangle_with_witness() {
        let spec = MetricSpec::p_norm(2, 0.5);
        let pts = vec![
            Point::new(vec![0.0, 0.0]),
            Point::new(vec![1.0, 0.0]),
            Point::new(vec![1.0, 1.0]),
        ];
        let r = validate_metric_axioms(&spec, &pts);
        let v = r.violation.unwrap();
        assert_eq!(v.axiom, Axiom::Triangle);
        assert_eq!(v.points.len(), 3);

        // replay the witness
        let d02 = spec.dist(&pts[0], &pts[2]);
        let d01 = spec.dist(&pts[0], &pts[1]);
        let d12 = spec.dist(&pts[1], &pts[2]);
        assert!(d02 > d01 + d12);
    }

    #[test]
    fn discrete_metric_values() {
        let spec = MetricSpec::discrete(2);
        let a = Point::new(vec![0.0, 1.0]);
        let b = Point::new(vec![0.0, 1.5]);
        assert_eq!(spec.dist(&a, &a), 0.0);
        assert_eq!(spec.dist(&a, &b), 1.0);
    }

    #[test]
    fn small_rational_recognition() {
        assert_eq!(small_rational(0.5), Some(Rational64::new(1, 2)));
        assert_eq!(small_rational(0.1), Some(Rational64::new(1, 10)));
        assert_eq!(small_rational(-3.0), Some(Rational64::from_integer(-3)));
        assert_eq!(small_rational(37.0 / 99.0), Some(Rational64::new(37, 99)));
        assert_eq!(small_rational(SQRT_2 / 2.0), None);
        assert_eq!(small_rational(std::f64::consts::PI), None);
    }

    #[test]
    fn exact_point_json_roundtrip() {
        let p = Point::from_rationals(vec![Rational64::new(1, 3), Rational64::new(2, 1)]);
        let s = serde_json::to_string(&p).unwrap();
        let q: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(q.is_exact());

        let plain: Point = serde_json::from_str("[1.0, 2.5]").unwrap();
        assert!(!plain.is_exact());
        assert_eq!(serde_json::to_string(&plain).unwrap(), "[1.0,2.5]");
    }

    #[test]
    fn inconsistent_exact_tag_rejected() {
        let bad = r#"{"coords":[0.5],"exact":[[1,3]]}"#;
        assert!(serde_json::from_str::<Point>(bad).is_err());
    }

    #[test]
    fn metric_spec_json_shape() {
        let spec = MetricSpec::max_combined(50, SQRT_2);
        let v: serde_json::Value = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["kind"], "max_combined_l2_linf");
        assert_eq!(v["dim"], 50);
        let back: MetricSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
        let parsed: MetricSpec = serde_json::from_str(r#"{"kind":"p_norm","dim":3,"p":1.5}"#).unwrap();
        assert_eq!(parsed.exponent(), 1.5);
    }
}
