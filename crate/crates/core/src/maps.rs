//! Self-maps `g : A → A` and cross maps `T : A → B`.

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{small_rational, Point};

/// Names accepted by [`MapKind::Builtin`].
pub const BUILTIN_MAPS: &[&str] = &[
    "identity",
    "line_half",
    "line_reflect_half",
    "line_square",
    "constant_two_e1",
    "rational_reflector",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// `x ↦ M x + o`.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Builtin { name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    #[serde(flatten)]
    pub kind: MapKind,
    /// Verify that every image lands in the target set during a solve.
    #[serde(default)]
    pub domain_check: bool,
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec::builtin("identity")
    }
}

impl MapSpec {
    pub fn builtin(name: &str) -> Self {
        MapSpec {
            kind: MapKind::Builtin { name: name.into() },
            domain_check: false,
        }
    }

    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Self {
        MapSpec {
            kind: MapKind::Affine { matrix, offset },
            domain_check: false,
        }
    }

    pub fn identity() -> Self {
        MapSpec::builtin("identity")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            MapKind::Builtin { name } => {
                if !BUILTIN_MAPS.contains(&name.as_str()) {
                    return Err(Error::UnknownMap(name.clone()));
                }
            }
            MapKind::Affine { matrix, offset } => {
                if matrix.len() != offset.len() {
                    return Err(Error::InvalidMap(format!(
                        "matrix has {} rows but offset has {} entries",
                        matrix.len(),
                        offset.len()
                    )));
                }
                let cols = matrix.first().map_or(0, Vec::len);
                if cols == 0 || matrix.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidMap("matrix rows must be nonempty and equal".into()));
                }
                if matrix.iter().flatten().chain(offset).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidMap("non-finite entry".into()));
                }
            }
        }
        Ok(())
    }

    /// `(M, o)` when the map is affine (the identity counts).
    pub fn as_affine(&self, dim: usize) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        match &self.kind {
            MapKind::Affine { matrix, offset } => Some((matrix.clone(), offset.clone())),
            MapKind::Builtin { name } if name == "identity" => {
                let m = (0..dim)
                    .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                Some((m, vec![0.0; dim]))
            }
            _ => None,
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        match &self.kind {
            MapKind::Affine { matrix, offset } => apply_affine(matrix, offset, x),
            MapKind::Builtin { name } => apply_builtin(name, x),
        }
    }
}

fn apply_affine(matrix: &[Vec<f64>], offset: &[f64], x: &Point) -> Result<Point> {
    let cols = matrix.first().map_or(0, Vec::len);
    x.check_dim(cols)?;
    if let Some(exact) = x.exact() {
        if let Some(q) = affine_exact(matrix, offset, exact) {
            return Ok(Point::from_rationals(q));
        }
    }
    let y = matrix
        .iter()
        .zip(offset)
        .map(|(row, o)| row.iter().zip(x.coords()).map(|(m, v)| m * v).sum::<f64>() + o)
        .collect();
    Ok(Point::new(y))
}

fn affine_exact(matrix: &[Vec<f64>], offset: &[f64], x: &[Rational64]) -> Option<Vec<Rational64>> {
    matrix
        .iter()
        .zip(offset)
        .map(|(row, o)| {
            let mut acc = small_rational(*o)?;
            for (m, v) in row.iter().zip(x) {
                acc = acc.checked_add(&small_rational(*m)?.checked_mul(v)?)?;
            }
            Some(acc)
        })
        .collect()
}

fn need_dim(x: &Point, dim: usize, name: &str) -> Result<()> {
    if x.dim() != dim {
        return Err(Error::InvalidMap(format!("`{name}` acts on dimension {dim}, got {}", x.dim())));
    }
    Ok(())
}

fn apply_builtin(name: &str, x: &Point) -> Result<Point> {
    match name {
        "identity" => Ok(x.clone()),
        // (s, t) ↦ (1, t/2)
        "line_half" => {
            need_dim(x, 2, name)?;
            Ok(Point::new(vec![1.0, x.coords()[1] / 2.0]))
        }
        // (s, t) ↦ (1, −t/2)
        "line_reflect_half" => {
            need_dim(x, 2, name)?;
            Ok(Point::new(vec![1.0, -x.coords()[1] / 2.0]))
        }
        // (s, t) ↦ (1, t²)
        "line_square" => {
            need_dim(x, 2, name)?;
            let t = x.coords()[1];
            Ok(Point::new(vec![1.0, t * t]))
        }
        // constant 2·e₁ in the input's dimension
        "constant_two_e1" => {
            let mut c = vec![0.0; x.dim()];
            c[0] = 2.0;
            Ok(Point::new(c))
        }
        // 3 − x on exact rationals in [0, 1], 2 + x otherwise; only an
        // explicit exact tag marks a point as rational
        "rational_reflector" => {
            need_dim(x, 1, name)?;
            if let Some(q) = x.exact().map(|e| e[0]) {
                if q >= Rational64::zero() && q <= Rational64::from_integer(1) {
                    let r = Rational64::from_integer(3).checked_sub(&q);
                    return Ok(Point::from_rationals(vec![r.expect("bounded operand")]));
                }
                let r = Rational64::from_integer(2).checked_add(&q);
                if let Some(r) = r {
                    return Ok(Point::from_rationals(vec![r]));
                }
            }
            Ok(Point::new(vec![2.0 + x.coords()[0]]))
        }
        other => Err(Error::UnknownMap(other.into())),
    }
}
