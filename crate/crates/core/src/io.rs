//! Polygon files and named presets.
//!
//! File format (JSON):
//! `{"name": "...", "vertices": [{"angle": "p/q", "length": "a/b" | null}, ...]}`.
//! Record k holds the interior angle at vertex k (in units of π) and the
//! length of side k, which runs from vertex k to vertex k+1. Either every
//! length is given or exactly two are null and solved by closure. An angle
//! may also be a plain JSON number (a float multiple of π); such files are
//! only accepted after rationalization.

use std::f64::consts::PI;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::cyclo::{Cyclo, Field};
use crate::error::{Error, Result};
use crate::exactgeom::{rationalize_angles, rationalize_angles_on_grid, Polygon, RationalAngle};
use crate::shapes;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AngleField {
    Exact(String),
    Approx(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexRecord {
    pub angle: AngleField,
    #[serde(default)]
    pub length: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolygonFile {
    #[serde(default)]
    pub name: Option<String>,
    pub vertices: Vec<VertexRecord>,
}

/// How to turn float angles into rational ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rationalize {
    /// Reject float angles.
    Never,
    /// Best approximation with denominator ≤ Q.
    MaxDen(i64),
    /// Truncate to a fixed denominator.
    Grid(i64),
}

/// Exact rational from "a/b", an integer, or a finite decimal "1.25".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(q) = BigRational::from_str(s) {
        return Ok(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}")))?;
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a rational number: {s:?}")));
    }
    let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
    let num = BigInt::from_str(&digits).map_err(|e| Error::Parse(e.to_string()))?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(num, den);
    Ok(if neg { -q } else { q })
}

fn exact_angle(s: &str) -> Result<RationalAngle> {
    let q = parse_rational(s)?;
    let p = q.numer().to_string().parse::<i64>();
    let d = q.denom().to_string().parse::<i64>();
    match (p, d) {
        (Ok(p), Ok(d)) => RationalAngle::new(p, d),
        _ => Err(Error::Parse(format!("angle {s} is too large"))),
    }
}

impl PolygonFile {
    pub fn parse(text: &str) -> Result<PolygonFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn has_float_angles(&self) -> bool {
        self.vertices
            .iter()
            .any(|v| matches!(v.angle, AngleField::Approx(_)))
    }

    pub fn to_polygon(&self, mode: Rationalize) -> Result<Polygon> {
        if self.vertices.len() < 3 {
            return Err(Error::Invalid("a polygon needs at least 3 vertices".into()));
        }
        let angles: Vec<RationalAngle> = if self.has_float_angles() {
            let floats = self
                .vertices
                .iter()
                .map(|v| match &v.angle {
                    AngleField::Approx(x) => Ok(x * PI),
                    AngleField::Exact(s) => {
                        let a = exact_angle(s)?;
                        Ok(a.p() as f64 / a.q() as f64 * PI)
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            match mode {
                Rationalize::Never => {
                    return Err(Error::Parse(
                        "float angles need --rationalize Q or --grid-den D".into(),
                    ))
                }
                Rationalize::MaxDen(q) => rationalize_angles(&floats, q)?,
                Rationalize::Grid(d) => rationalize_angles_on_grid(&floats, d)?,
            }
        } else {
            self.vertices
                .iter()
                .map(|v| match &v.angle {
                    AngleField::Exact(s) => exact_angle(s),
                    AngleField::Approx(_) => unreachable!(),
                })
                .collect::<Result<_>>()?
        };
        let n = angles
            .iter()
            .fold(1i64, |acc, a| num_integer::lcm(acc, a.q()));
        let field = Field::get(n as usize);
        let lengths = self
            .vertices
            .iter()
            .map(|v| {
                v.length
                    .as_deref()
                    .map(|s| {
                        let q = parse_rational(s)?;
                        if !q.is_positive() {
                            return Err(Error::Invalid(format!("length {s} is not positive")));
                        }
                        Ok(Cyclo::from_rational(&field, &q))
                    })
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        Polygon::new(angles, lengths, self.name.clone())
    }

    /// Writes rational side lengths; sides with irrational length become
    /// null, so a polygon with two solved sides round-trips.
    pub fn from_polygon(poly: &Polygon) -> PolygonFile {
        PolygonFile {
            name: poly.name().map(str::to_string),
            vertices: poly
                .angles()
                .iter()
                .zip(poly.lengths())
                .map(|(a, l)| VertexRecord {
                    angle: AngleField::Exact(format!("{}/{}", a.p(), a.q())),
                    length: l.as_rational().map(|q| q.to_string()),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polygon file serializes")
    }
}

pub fn load_polygon(path: &std::path::Path, mode: Rationalize) -> Result<Polygon> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    PolygonFile::parse(&text)?.to_polygon(mode)
}

fn args(spec: &str, count: usize) -> Result<Vec<BigRational>> {
    let v: Vec<BigRational> = if spec.is_empty() {
        Vec::new()
    } else {
        spec.split(',').map(parse_rational).collect::<Result<_>>()?
    };
    if v.len() != count {
        return Err(Error::Parse(format!(
            "expected {count} comma-separated parameters, got {}",
            v.len()
        )));
    }
    Ok(v)
}

/// Names accepted by `preset`.
pub const PRESETS: &[&str] = &[
    "square[:side]",
    "rectangle:w,h",
    "parallelogram:a",
    "broken-rectangle:x1,x2,y1,y2",
    "l-shape",
    "broken-parallelogram[:b,h1,w1,h2]",
    "equilateral[:side]",
    "pi5-triangle[:leg]",
    "rationalized-triangle",
];

/// Built-in polygons, e.g. "parallelogram:2/3" or "broken-rectangle:1,2,1,2".
pub fn preset(spec: &str) -> Result<Polygon> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let one = BigRational::one();
    let or_one = |p: &str| -> Result<BigRational> {
        if p.is_empty() {
            Ok(one.clone())
        } else {
            Ok(args(p, 1)?.remove(0))
        }
    };
    match name {
        "square" => shapes::square(&or_one(params)?),
        "rectangle" => {
            let a = args(params, 2)?;
            shapes::rectangle(&a[0], &a[1])
        }
        "parallelogram" => shapes::pi3_parallelogram(&args(params, 1)?[0]),
        "broken-rectangle" => {
            let a = args(params, 4)?;
            shapes::broken_rectangle(&a[0], &a[1], &a[2], &a[3])
        }
        "l-shape" => Ok(shapes::l_shape()),
        "broken-parallelogram" if params.is_empty() => Ok(shapes::default_broken_parallelogram()),
        "broken-parallelogram" => {
            let a = args(params, 4)?;
            shapes::broken_parallelogram(&a[0], &a[1], &a[2], &a[3])
        }
        "equilateral" => shapes::equilateral_triangle(&or_one(params)?),
        "pi5-triangle" => shapes::pi5_isosceles_triangle(&or_one(params)?),
        "rationalized-triangle" => shapes::rationalized_right_triangle(),
        _ => Err(Error::Parse(format!(
            "unknown shape {name:?}; known: {}",
            PRESETS.join(", ")
        ))),
    }
}
