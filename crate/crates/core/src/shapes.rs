//! Named polygon families used throughout the examples and tests.

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::cyclo::{Cyclo, Field};
use crate::error::{Error, Result};
use crate::exactgeom::{rationalize_angles_on_grid, Polygon, RationalAngle};

fn angles(v: &[(i64, i64)]) -> Vec<RationalAngle> {
    v.iter()
        .map(|&(p, q)| RationalAngle::new(p, q).expect("valid built-in angle"))
        .collect()
}

fn build(name: &str, ang: Vec<RationalAngle>, lengths: &[Option<&BigRational>]) -> Result<Polygon> {
    let n = ang.iter().fold(1i64, |acc, a| num_integer::lcm(acc, a.q()));
    let field = Field::get(n as usize);
    let exact = lengths
        .iter()
        .map(|l| l.map(|q| Cyclo::from_rational(&field, q)))
        .collect();
    Polygon::new(ang, exact, Some(name.to_string()))
}

fn positive(what: &str, v: &BigRational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} must be positive")))
    }
}

pub fn square(side: &BigRational) -> Result<Polygon> {
    rectangle(side, side).map(|p| p.renamed("square"))
}

pub fn rectangle(w: &BigRational, h: &BigRational) -> Result<Polygon> {
    positive("width", w)?;
    positive("height", h)?;
    build(
        "rectangle",
        angles(&[(1, 2); 4]),
        &[Some(w), Some(h), Some(w), Some(h)],
    )
}

/// Parallelogram with angle π/3 at the origin, sides `a` (horizontal) and 1.
pub fn pi3_parallelogram(a: &BigRational) -> Result<Polygon> {
    positive("side a", a)?;
    let one = BigRational::one();
    build(
        "pi/3-parallelogram",
        angles(&[(1, 3), (2, 3), (1, 3), (2, 3)]),
        &[Some(a), Some(&one), Some(a), Some(&one)],
    )
}

/// Single-bay broken rectangle with vertices A(0,0) B(x2,0) C(x2,y1)
/// D(x1,y1) E(x1,y2) F(0,y2).
pub fn broken_rectangle(
    x1: &BigRational,
    x2: &BigRational,
    y1: &BigRational,
    y2: &BigRational,
) -> Result<Polygon> {
    positive("x1", x1)?;
    positive("y1", y1)?;
    if x2 <= x1 || y2 <= y1 {
        return Err(Error::Invalid(
            "broken rectangle needs x1 < x2 and y1 < y2".into(),
        ));
    }
    let dx = x2 - x1;
    let dy = y2 - y1;
    build(
        "broken rectangle",
        angles(&[(1, 2), (1, 2), (1, 2), (3, 2), (1, 2), (1, 2)]),
        &[Some(x2), Some(y1), Some(&dx), Some(&dy), Some(x1), Some(y2)],
    )
}

/// The L-shape: broken rectangle with x1 = y1 = 1, x2 = y2 = 2.
pub fn l_shape() -> Polygon {
    let one = BigRational::one();
    let two = &one + &one;
    broken_rectangle(&one, &two, &one, &two).expect("L-shape is valid")
}

/// Single-bay broken parallelogram with a π/3 corner: headings 0°, 90°,
/// 180°, 90°, 180°, 240°. The last two sides are closed exactly, so the
/// slanted side has length 2(h1 + h2)/√3.
pub fn broken_parallelogram(
    b: &BigRational,
    h1: &BigRational,
    w1: &BigRational,
    h2: &BigRational,
) -> Result<Polygon> {
    for (what, v) in [("b", b), ("h1", h1), ("w1", w1), ("h2", h2)] {
        positive(what, v)?;
    }
    build(
        "broken parallelogram",
        angles(&[(1, 3), (1, 2), (1, 2), (3, 2), (1, 2), (2, 3)]),
        &[Some(b), Some(h1), Some(w1), Some(h2), None, None],
    )
}

/// Default member of the broken-parallelogram family: b = 3, h1 = w1 = h2 = 1.
pub fn default_broken_parallelogram() -> Polygon {
    let q = |v: i64| BigRational::from_integer(v.into());
    broken_parallelogram(&q(3), &q(1), &q(1), &q(1)).expect("valid built-in shape")
}

pub fn equilateral_triangle(side: &BigRational) -> Result<Polygon> {
    positive("side", side)?;
    build(
        "equilateral triangle",
        angles(&[(1, 3); 3]),
        &[Some(side), Some(side), Some(side)],
    )
}

/// Isosceles triangle with apex angle π/5 at vertex 0 and legs `leg`.
pub fn pi5_isosceles_triangle(leg: &BigRational) -> Result<Polygon> {
    positive("leg", leg)?;
    build(
        "pi/5 isosceles triangle",
        angles(&[(1, 5), (2, 5), (2, 5)]),
        &[Some(leg), None, None],
    )
}

/// Right triangle with acute angles (√2/4)π and ((2−√2)/4)π truncated to
/// thousandths: (353/1000, 147/1000, 1/2)π, first side of unit length.
pub fn rationalized_right_triangle() -> Result<Polygon> {
    let pi = std::f64::consts::PI;
    let r2 = 2f64.sqrt();
    let ang = rationalize_angles_on_grid(&[r2 / 4.0 * pi, (2.0 - r2) / 4.0 * pi, pi / 2.0], 1000)?;
    let one = BigRational::one();
    build(
        "rationalized right triangle",
        ang,
        &[Some(&one), None, None],
    )
}
