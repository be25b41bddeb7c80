//! Exact rational-angle polygons.
//!
//! Side k runs from vertex k to vertex k+1 and its direction is the integer
//! index `d_k`, meaning the angle d_k·π/N with N the lcm of the angle
//! denominators. The interior angle at vertex k sits between sides k-1 and k.
//!
//! Besides its concrete exact vertices, every polygon carries a *formal*
//! description: two non-parallel sides are eliminated through the closure
//! constraints and every vertex is written as a linear form in the remaining
//! n-2 free side lengths with coefficients in Q(ζ). Two formal vectors are
//! equal iff they agree for every polygon with the same angles, which is the
//! notion of equality the unfolding needs.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::contfrac::{best_rational, gcd, lcm};
use crate::cyclo::{Cyclo, Field};
use crate::error::{Error, Result};

/// The angle (p/q)·π with gcd(p, q) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalAngle {
    p: i64,
    q: i64,
}

impl RationalAngle {
    /// Builds (p/q)·π, reducing the fraction.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invalid("zero angle denominator".into()));
        }
        let (mut p, mut q) = (p, q);
        if q < 0 {
            p = -p;
            q = -q;
        }
        let g = gcd(p, q).max(1);
        let (p, q) = (p / g, q / g);
        if p <= 0 || p >= 2 * q {
            return Err(Error::Invalid(format!("angle {p}/{q}·π outside (0, 2π)")));
        }
        Ok(RationalAngle { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn radians(&self) -> f64 {
        std::f64::consts::PI * self.p as f64 / self.q as f64
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(self.p.into(), self.q.into())
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A direction jπ/N stored as j modulo 2N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirectionIndex {
    j: i64,
    half_order: i64,
}

impl DirectionIndex {
    pub fn new(j: i64, half_order: i64) -> Self {
        DirectionIndex {
            j: j.rem_euclid(2 * half_order),
            half_order,
        }
    }

    pub fn index(&self) -> i64 {
        self.j
    }

    pub fn half_order(&self) -> i64 {
        self.half_order
    }

    pub fn radians(&self) -> f64 {
        std::f64::consts::PI * self.j as f64 / self.half_order as f64
    }

    /// Mirror image of this direction in a line with direction `axis`.
    pub fn reflect_in(&self, axis: DirectionIndex) -> DirectionIndex {
        DirectionIndex::new(2 * axis.j - self.j, self.half_order)
    }

    pub fn rotate(&self, by: i64) -> DirectionIndex {
        DirectionIndex::new(self.j + by, self.half_order)
    }
}

/// A planar vector with exact coordinates in Q(ζ) and a cached float value.
#[derive(Clone, Debug)]
pub struct ExactVector {
    value: Cyclo,
    approx: [f64; 2],
}

impl ExactVector {
    pub fn new(value: Cyclo) -> Self {
        let (x, y) = value.to_complex();
        ExactVector {
            value,
            approx: [x, y],
        }
    }

    pub fn value(&self) -> &Cyclo {
        &self.value
    }

    pub fn approx(&self) -> [f64; 2] {
        self.approx
    }

    pub fn norm(&self) -> f64 {
        self.approx[0].hypot(self.approx[1])
    }

    pub fn add(&self, o: &ExactVector) -> ExactVector {
        ExactVector::new(self.value.add(&o.value))
    }

    pub fn sub(&self, o: &ExactVector) -> ExactVector {
        ExactVector::new(self.value.sub(&o.value))
    }

    pub fn scale(&self, q: &BigRational) -> ExactVector {
        ExactVector::new(self.value.scale(q))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl PartialEq for ExactVector {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for ExactVector {}

impl fmt::Display for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector written as Σ_f a_f·c_f over the free side lengths a_f.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalVector(pub Vec<Cyclo>);

impl FormalVector {
    pub fn zero(field: &Arc<Field>, dim: usize) -> Self {
        FormalVector(vec![Cyclo::zero(field); dim])
    }

    pub fn add(&self, o: &FormalVector) -> FormalVector {
        FormalVector(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &FormalVector) -> FormalVector {
        FormalVector(self.0.iter().zip(&o.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn neg(&self) -> FormalVector {
        FormalVector(self.0.iter().map(Cyclo::neg).collect())
    }

    pub fn conj(&self) -> FormalVector {
        FormalVector(self.0.iter().map(Cyclo::conj).collect())
    }

    pub fn mul_zeta(&self, k: i64) -> FormalVector {
        FormalVector(self.0.iter().map(|c| c.mul_zeta(k)).collect())
    }

    pub fn scale_int(&self, k: i64) -> FormalVector {
        FormalVector(self.0.iter().map(|c| c.scale_int(k)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Cyclo::is_zero)
    }

    pub fn reduce(&self) -> FormalVector {
        FormalVector(self.0.iter().map(Cyclo::reduce).collect())
    }

    /// Rational coordinates, concatenated over the free sides.
    pub fn coords(&self) -> Vec<BigRational> {
        self.0.iter().flat_map(Cyclo::coords).collect()
    }
}

/// A simple polygon with rational angles and exact side lengths.
#[derive(Clone, Debug)]
pub struct Polygon {
    name: Option<String>,
    angles: Vec<RationalAngle>,
    lengths: Vec<Cyclo>,
    lengths_approx: Vec<f64>,
    field: Arc<Field>,
    half_order: i64,
    directions: Vec<i64>,
    vertices: Vec<ExactVector>,
    free_sides: Vec<usize>,
    eliminated: (usize, usize),
    formal_vertices: Vec<FormalVector>,
    warnings: Vec<String>,
}

/// Directions of all sides, d_0 = 0, for angles summing to (n-2)π.
fn side_directions(angles: &[RationalAngle], half_order: i64) -> Vec<i64> {
    let mut dirs = Vec::with_capacity(angles.len());
    let mut d = 0i64;
    dirs.push(0);
    for a in &angles[1..] {
        d += half_order - a.p * half_order / a.q;
        dirs.push(d.rem_euclid(2 * half_order));
    }
    dirs
}

fn check_angle_sum(angles: &[RationalAngle]) -> Result<()> {
    let n = angles.len();
    if n < 3 {
        return Err(Error::Invalid(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    let total = angles
        .iter()
        .fold(BigRational::zero(), |acc, a| acc + a.as_rational());
    let want = BigRational::from_integer(BigInt::from(n as i64 - 2));
    if total != want {
        return Err(Error::ClosureViolation(format!(
            "angles sum to {total}·π, expected {want}·π"
        )));
    }
    Ok(())
}

fn parallel(dirs: &[i64], half_order: i64, a: usize, b: usize) -> bool {
    (dirs[a] - dirs[b]).rem_euclid(half_order) == 0
}

/// Coefficients (s_f, t_f) with a_{k0} = Σ s_f a_f and a_{k1} = Σ t_f a_f.
fn closure_coefficients(
    field: &Arc<Field>,
    dirs: &[i64],
    k0: usize,
    k1: usize,
    free: &[usize],
) -> Vec<(Cyclo, Cyclo)> {
    let (d0, d1) = (dirs[k0], dirs[k1]);
    free.iter()
        .map(|&f| {
            let df = dirs[f];
            let s = Cyclo::sin_ratio(field, d1 - df, d1 - d0).neg();
            let t = Cyclo::sin_ratio(field, df - d0, d1 - d0).neg();
            (s, t)
        })
        .collect()
}

impl Polygon {
    /// Builds a polygon from angles and side lengths. Either every length is
    /// given (the chain must close exactly) or exactly two non-parallel sides
    /// are left open and solved from the closure constraints.
    pub fn new(
        angles: Vec<RationalAngle>,
        lengths: Vec<Option<Cyclo>>,
        name: Option<String>,
    ) -> Result<Polygon> {
        let n = angles.len();
        if lengths.len() != n {
            return Err(Error::Invalid(format!(
                "{} angles but {} lengths",
                n,
                lengths.len()
            )));
        }
        check_angle_sum(&angles)?;
        let half_order = angles.iter().fold(1i64, |acc, a| lcm(acc, a.q));
        let field = Field::get(half_order as usize);
        let dirs = side_directions(&angles, half_order);

        let open: Vec<usize> = (0..n).filter(|&k| lengths[k].is_none()).collect();
        let (k0, k1) = match open.len() {
            0 => {
                let mut pair = None;
                'outer: for b in (0..n).rev() {
                    for a in (0..b).rev() {
                        if !parallel(&dirs, half_order, a, b) {
                            pair = Some((a, b));
                            break 'outer;
                        }
                    }
                }
                pair.ok_or(Error::SingularSystem)?
            }
            2 => {
                if parallel(&dirs, half_order, open[0], open[1]) {
                    return Err(Error::SingularSystem);
                }
                (open[0], open[1])
            }
            k => {
                return Err(Error::Invalid(format!(
                    "need n-2 = {} fixed lengths, got {}",
                    n - 2,
                    n - k
                )))
            }
        };
        let free: Vec<usize> = (0..n).filter(|&k| k != k0 && k != k1).collect();
        for &f in &free {
            let a = lengths[f].as_ref().expect("free side has a length");
            if a.to_f64() <= 0.0 {
                return Err(Error::Invalid(format!("side {f} has non-positive length")));
            }
        }
        let coeffs = closure_coefficients(&field, &dirs, k0, k1, &free);
        let solve = |pick: fn(&(Cyclo, Cyclo)) -> &Cyclo| {
            free.iter()
                .zip(&coeffs)
                .fold(Cyclo::zero(&field), |acc, (&f, c)| {
                    acc.add(&pick(c).mul(lengths[f].as_ref().unwrap()))
                })
        };
        let a0 = solve(|c| &c.0);
        let a1 = solve(|c| &c.1);
        for (k, solved) in [(k0, &a0), (k1, &a1)] {
            match &lengths[k] {
                Some(given) if given != solved => {
                    return Err(Error::ClosureViolation(format!(
                        "side {k} has length {:.6} but closure requires {:.6}",
                        given.to_f64(),
                        solved.to_f64()
                    )))
                }
                _ => {}
            }
            if solved.to_f64() <= 1e-12 {
                return Err(Error::NonpositiveLength(k));
            }
        }
        let mut full = Vec::with_capacity(n);
        for k in 0..n {
            full.push(if k == k0 {
                a0.clone()
            } else if k == k1 {
                a1.clone()
            } else {
                lengths[k].clone().unwrap()
            });
        }

        // concrete vertices
        let mut vertices = Vec::with_capacity(n);
        let mut v = Cyclo::zero(&field);
        for k in 0..n {
            vertices.push(ExactVector::new(v.clone()));
            v = v.add(&full[k].mul_zeta(dirs[k]));
        }
        if !v.is_zero() {
            return Err(Error::ClosureViolation(
                "side chain does not return to start".into(),
            ));
        }

        // formal vertices over the free sides
        let dim = free.len();
        let mut side_forms = Vec::with_capacity(n);
        for k in 0..n {
            let mut form = FormalVector::zero(&field, dim);
            if k == k0 || k == k1 {
                for (fi, c) in coeffs.iter().enumerate() {
                    let coef = if k == k0 { &c.0 } else { &c.1 };
                    form.0[fi] = coef.mul_zeta(dirs[k]);
                }
            } else {
                let fi = free.iter().position(|&f| f == k).unwrap();
                form.0[fi] = Cyclo::zeta_pow(&field, dirs[k]);
            }
            side_forms.push(form);
        }
        let mut formal_vertices = Vec::with_capacity(n);
        let mut acc = FormalVector::zero(&field, dim);
        for form in &side_forms {
            formal_vertices.push(acc.clone());
            acc = acc.add(form);
        }
        debug_assert!(acc.is_zero());

        let lengths_approx = full.iter().map(Cyclo::to_f64).collect();
        let poly = Polygon {
            name,
            angles,
            lengths: full,
            lengths_approx,
            field,
            half_order,
            directions: dirs,
            vertices,
            free_sides: free,
            eliminated: (k0, k1),
            formal_vertices,
            warnings: Vec::new(),
        };
        poly.check_simple()?;
        if poly.signed_area() <= 0.0 {
            return Err(Error::Invalid(
                "vertices are not in counter-clockwise order".into(),
            ));
        }
        Ok(poly)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                if segments_touch(a, b, c, d) {
                    return Err(Error::SelfIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn with_warnings(mut self, w: Vec<String>) -> Self {
        self.warnings = w;
        self
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[RationalAngle] {
        &self.angles
    }

    pub fn lengths(&self) -> &[Cyclo] {
        &self.lengths
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// N = lcm of the angle denominators.
    pub fn half_order(&self) -> i64 {
        self.half_order
    }

    pub fn direction(&self, side: usize) -> DirectionIndex {
        DirectionIndex::new(self.directions[side], self.half_order)
    }

    pub fn directions(&self) -> &[i64] {
        &self.directions
    }

    pub fn vertices(&self) -> &[ExactVector] {
        &self.vertices
    }

    pub fn vertex_f64(&self, k: usize) -> [f64; 2] {
        self.vertices[k % self.n()].approx()
    }

    pub fn vertices_f64(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(ExactVector::approx).collect()
    }

    pub fn edge(&self, k: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertex_f64(k), self.vertex_f64(k + 1))
    }

    pub fn free_sides(&self) -> &[usize] {
        &self.free_sides
    }

    pub fn eliminated_sides(&self) -> (usize, usize) {
        self.eliminated
    }

    pub fn formal_vertices(&self) -> &[FormalVector] {
        &self.formal_vertices
    }

    /// Number of free parameters of the angle-similar family, n − 2.
    pub fn formal_dim(&self) -> usize {
        self.free_sides.len()
    }

    /// Concrete value of a formal vector for this polygon's side lengths.
    pub fn evaluate(&self, v: &FormalVector) -> ExactVector {
        let mut acc = Cyclo::zero(&self.field);
        for (c, &f) in v.0.iter().zip(&self.free_sides) {
            acc = acc.add(&c.mul(&self.lengths[f]));
        }
        ExactVector::new(acc)
    }

    /// Float evaluation of a formal vector, without exact products.
    pub fn evaluate_f64(&self, v: &FormalVector) -> [f64; 2] {
        let mut acc = [0.0, 0.0];
        for (c, &f) in v.0.iter().zip(&self.free_sides) {
            let (x, y) = c.to_complex();
            let a = self.lengths_approx[f];
            acc[0] += x * a;
            acc[1] += y * a;
        }
        acc
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.lengths_approx.clone()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.lengths_f64().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn signed_area(&self) -> f64 {
        let v = self.vertices_f64();
        let n = v.len();
        (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let v = self.vertices_f64();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in v {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }

    /// Strict interior test; points within `tol` of the boundary are outside.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        if self.distance_to_boundary(p) <= tol {
            return false;
        }
        point_in_polygon(&self.vertices_f64(), p)
    }

    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        (0..self.n())
            .map(|k| {
                let (a, b) = self.edge(k);
                segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the side nearest to `p`.
    pub fn nearest_edge(&self, p: [f64; 2]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for k in 0..self.n() {
            let (a, b) = self.edge(k);
            let d = segment_distance(p, a, b);
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    }

    /// Outward unit normal of side k.
    pub fn outward_normal(&self, k: usize) -> [f64; 2] {
        let t = self.direction(k).radians();
        [t.sin(), -t.cos()]
    }

    /// Human-readable description of side lengths.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.name {
            s.push_str(&format!("{n}: "));
        }
        let parts: Vec<String> = self
            .angles
            .iter()
            .zip(&self.lengths)
            .map(|(a, l)| format!("({}π, {:.6})", a, l.to_f64()))
            .collect();
        s.push_str(&parts.join(" "));
        s
    }
}

pub(crate) fn point_in_polygon(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub(crate) fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    const EPS: f64 = 1e-9;
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > EPS && o2 < -EPS) || (o1 < -EPS && o2 > EPS))
        && ((o3 > EPS && o4 < -EPS) || (o3 < -EPS && o4 > EPS))
    {
        return true;
    }
    segment_distance(c, a, b) < EPS
        || segment_distance(d, a, b) < EPS
        || segment_distance(a, c, d) < EPS
        || segment_distance(b, c, d) < EPS
}

fn rational_lengths(field: &Arc<Field>, lengths: &[Option<BigRational>]) -> Vec<Option<Cyclo>> {
    lengths
        .iter()
        .map(|l| l.as_ref().map(|q| Cyclo::from_rational(field, q)))
        .collect()
}

/// Checks angles and exact rational lengths and builds the polygon.
pub fn validate_polygon(angles: &[RationalAngle], lengths: &[BigRational]) -> Result<Polygon> {
    let half_order = angles.iter().fold(1i64, |acc, a| lcm(acc, a.q));
    let field = Field::get(half_order.max(1) as usize);
    let given: Vec<Option<BigRational>> = lengths.iter().cloned().map(Some).collect();
    for (k, l) in lengths.iter().enumerate() {
        if !l.is_positive() {
            return Err(Error::Invalid(format!("side {k} has non-positive length")));
        }
    }
    Polygon::new(angles.to_vec(), rational_lengths(&field, &given), None)
}

/// Completes n−2 fixed lengths to a closed chain.
pub fn solve_closure(
    angles: &[RationalAngle],
    fixed: &[Option<BigRational>],
) -> Result<Vec<Cyclo>> {
    let n = angles.len();
    let open = fixed.iter().filter(|l| l.is_none()).count();
    if fixed.len() != n || open != 2 {
        return Err(Error::Invalid(format!(
            "expected exactly {} fixed lengths out of {}",
            n.saturating_sub(2),
            n
        )));
    }
    check_angle_sum(angles)?;
    let half_order = angles.iter().fold(1i64, |acc, a| lcm(acc, a.q));
    let field = Field::get(half_order as usize);
    let dirs = side_directions(angles, half_order);
    let unknown: Vec<usize> = (0..n).filter(|&k| fixed[k].is_none()).collect();
    if parallel(&dirs, half_order, unknown[0], unknown[1]) {
        return Err(Error::SingularSystem);
    }
    let poly = Polygon::new(angles.to_vec(), rational_lengths(&field, fixed), None)?;
    Ok(poly.lengths().to_vec())
}

/// Replaces one angle by whatever makes the sum exactly (n−2)π, picking the
/// angle whose replacement stays closest to `targets` (angle/π). None when no
/// choice fits under the cap.
fn balance(fracs: &[(i64, i64)], targets: &[f64], max_den: i64) -> Option<Vec<(i64, i64)>> {
    let n = fracs.len();
    let target = BigRational::from_integer(BigInt::from(n as i64 - 2));
    let total = fracs
        .iter()
        .fold(BigRational::zero(), |acc, &(p, q)| acc + rational(p, q));
    if total == target {
        return Some(fracs.to_vec());
    }
    let mut best: Option<(f64, Vec<(i64, i64)>)> = None;
    for idx in 0..n {
        let (p, q) = fracs[idx];
        let adjusted = rational(p, q) + &target - &total;
        let (Some(ap), Some(aq)) = (adjusted.numer().to_i64(), adjusted.denom().to_i64()) else {
            continue;
        };
        if aq <= max_den && ap > 0 && ap < 2 * aq {
            let err = (ap as f64 / aq as f64 - targets[idx]).abs();
            if best.as_ref().map_or(true, |b| err < b.0) {
                let mut out = fracs.to_vec();
                out[idx] = (ap, aq);
                best = Some((err, out));
            }
        }
    }
    best.map(|b| b.1)
}

fn to_angles(fracs: Vec<(i64, i64)>) -> Result<Vec<RationalAngle>> {
    fracs
        .into_iter()
        .map(|(p, q)| RationalAngle::new(p, q))
        .collect()
}

/// Best rational approximations p/q (q ≤ `max_den`) of angle/π, re-balanced
/// so that the angles sum to exactly (n−2)π. If the best approximations
/// cannot be balanced within the cap, the others are approximated with
/// progressively smaller caps.
pub fn rationalize_angles(angles: &[f64], max_den: i64) -> Result<Vec<RationalAngle>> {
    if max_den < 2 {
        return Err(Error::Invalid("denominator cap must be at least 2".into()));
    }
    if angles.len() < 3 {
        return Err(Error::Invalid("polygon needs at least 3 angles".into()));
    }
    for &a in angles {
        if !(a > 0.0 && a < 2.0 * std::f64::consts::PI) {
            return Err(Error::Invalid(format!("angle {a} outside (0, 2π)")));
        }
    }
    let approx = |cap: i64| -> Vec<(i64, i64)> {
        angles
            .iter()
            .map(|&a| best_rational(a / std::f64::consts::PI, cap))
            .collect()
    };
    let targets: Vec<f64> = angles.iter().map(|a| a / std::f64::consts::PI).collect();
    if let Some(f) = balance(&approx(max_den), &targets, max_den) {
        return to_angles(f);
    }
    let mut cap = max_den - 1;
    while cap >= 1 {
        if let Some(f) = balance(&approx(cap), &targets, max_den) {
            return to_angles(f);
        }
        cap -= 1;
    }
    Err(Error::CannotBalance(max_den))
}

/// Truncates every angle/π to a multiple of 1/`den` (a fixed decimal grid
/// such as thousandths). The last angle that was not already on the grid
/// absorbs the residual, so the sum is exactly (n−2)π.
pub fn rationalize_angles_on_grid(angles: &[f64], den: i64) -> Result<Vec<RationalAngle>> {
    if den < 1 || angles.len() < 3 {
        return Err(Error::Invalid("bad grid rationalization input".into()));
    }
    let scaled: Vec<f64> = angles
        .iter()
        .map(|&a| a / std::f64::consts::PI * den as f64)
        .collect();
    let mut nums: Vec<i64> = scaled.iter().map(|&x| (x + 1e-9).floor() as i64).collect();
    let off_grid = (0..angles.len())
        .rev()
        .find(|&i| (scaled[i] - scaled[i].round()).abs() > 1e-9);
    let target = (angles.len() as i64 - 2) * den;
    let residual = target - nums.iter().sum::<i64>();
    if residual != 0 {
        let idx = off_grid.ok_or(Error::CannotBalance(den))?;
        nums[idx] += residual;
    }
    nums.into_iter()
        .map(|p| RationalAngle::new(p, den))
        .collect()
}

pub(crate) fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
