//! Sign prescriptions on an EPP and semiclassical wave functions built as
//! finite coherent sums of plane waves over the EPP images.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::Polygon;
use crate::quantize::QuantizedMomentum;
use crate::unfold::{Epp, PolygonImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn letter(&self) -> char {
        match self {
            BoundaryCondition::Dirichlet => 'D',
            BoundaryCondition::Neumann => 'N',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignPrescription {
    /// ±1 per EPP image, image 0 fixed to +1.
    pub eta: Vec<i8>,
    /// Induced condition on each side of the base polygon.
    pub bc: Vec<BoundaryCondition>,
}

impl SignPrescription {
    pub fn is_dirichlet(&self) -> bool {
        self.bc.iter().all(|b| *b == BoundaryCondition::Dirichlet)
    }

    pub fn is_neumann(&self) -> bool {
        self.bc.iter().all(|b| *b == BoundaryCondition::Neumann)
    }

    /// e.g. "DNDN".
    pub fn code(&self) -> String {
        self.bc.iter().map(|b| b.letter()).collect()
    }

    pub fn label(&self) -> &'static str {
        if self.is_dirichlet() {
            "dirichlet"
        } else if self.is_neumann() {
            "neumann"
        } else {
            "mixed"
        }
    }
}

/// Union–find tracking the parity of each element relative to its root.
struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu {
            parent: (0..n).collect(),
            parity: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (r, pp) = self.find(p);
        self.parent[x] = r;
        self.parity[x] ^= pp;
        (r, self.parity[x])
    }

    /// Imposes parity(a) ^ parity(b) = rel; false on contradiction.
    fn union(&mut self, a: usize, b: usize, rel: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ rel;
        true
    }
}

/// All consistent prescriptions with η_0 = +1, Dirichlet first.
pub fn enumerate_prescriptions(epp: &Epp) -> Vec<SignPrescription> {
    let n = epp.polygon.n();
    let m = epp.images.len();
    let mut out = Vec::new();
    // bit e set ⇒ side e is Neumann
    for mask in 0u64..(1u64 << n) {
        let mut dsu = ParityDsu::new(m);
        let mut ok = true;
        'outer: for (i, row) in epp.glue.iter().enumerate() {
            for (e, g) in row.iter().enumerate() {
                let rel = if mask >> e & 1 == 1 { 0 } else { 1 };
                if !dsu.union(i, g.image, rel) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if !ok {
            continue;
        }
        let eta = (0..m)
            .map(|i| {
                let (r, p) = dsu.find(i);
                // the EPP is connected, so every image shares image 0's root
                debug_assert_eq!(r, dsu.find(0).0);
                if p == dsu.find(0).1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let bc = (0..n)
            .map(|e| {
                if mask >> e & 1 == 1 {
                    BoundaryCondition::Neumann
                } else {
                    BoundaryCondition::Dirichlet
                }
            })
            .collect();
        out.push(SignPrescription { eta, bc });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Σ η e^{+iθ}
    Plus,
    /// Σ η e^{−iθ}
    Minus,
    /// Σ η cos θ = (Ψ⁺ + Ψ⁻)/2
    Cos,
    /// Σ η sin θ = (Ψ⁺ − Ψ⁻)/2i
    Sin,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneWaveTerm {
    pub eta: i8,
    pub alpha: f64,
    pub p: [f64; 2],
}

/// Ψ(x) = amplitude · Σ_k η_k f(p_k·x + α_k), with f fixed by the branch.
#[derive(Clone, Debug, Serialize)]
pub struct Swf {
    pub terms: Vec<PlaneWaveTerm>,
    pub energy: f64,
    pub branch: Branch,
    pub amplitude: f64,
    pub momentum: [f64; 2],
}

fn linear_f64(img: &PolygonImage) -> [[f64; 2]; 2] {
    let th = std::f64::consts::PI * img.iso.rotation as f64 / img.iso.half_order as f64;
    let (c, s) = (th.cos(), th.sin());
    let f = if img.iso.reflecting { -1.0 } else { 1.0 };
    [[c, -s * f], [s, c * f]]
}

/// Largest |p·P/2π − round| over the gluing shifts, scaled by |p||P|.
fn quantization_defect(epp: &Epp, p: [f64; 2]) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    epp.glue
        .iter()
        .flatten()
        .filter(|g| !g.internal)
        .map(|g| {
            let s = g.shift_f64;
            let x = (p[0] * s[0] + p[1] * s[1]) / tau;
            (x - x.round()).abs() / (1.0 + x.abs())
        })
        .fold(0.0, f64::max)
}

/// Compiles the ± pair: p_k = L_kᵀp and α_k = p·t_k for image k = (L_k, t_k).
pub fn compile_swf(
    epp: &Epp,
    prescription: &SignPrescription,
    momentum: &QuantizedMomentum,
) -> Result<(Swf, Swf)> {
    let p = momentum.vector;
    let defect = quantization_defect(epp, p);
    if defect > 1e-9 {
        return Err(Error::UnquantizedMomentum(format!(
            "p·P/2π misses an integer by {defect:.3e}"
        )));
    }
    if prescription.eta.len() != epp.images.len() {
        return Err(Error::Invalid("prescription does not match the EPP".into()));
    }
    let terms: Vec<PlaneWaveTerm> = epp
        .images
        .iter()
        .zip(&prescription.eta)
        .map(|(img, &eta)| {
            let l = linear_f64(img);
            let t = img.translation_f64;
            PlaneWaveTerm {
                eta,
                alpha: p[0] * t[0] + p[1] * t[1],
                p: [
                    l[0][0] * p[0] + l[1][0] * p[1],
                    l[0][1] * p[0] + l[1][1] * p[1],
                ],
            }
        })
        .collect();
    let plus = Swf {
        terms,
        energy: momentum.energy(),
        branch: Branch::Plus,
        amplitude: 1.0,
        momentum: p,
    };
    let minus = Swf {
        branch: Branch::Minus,
        ..plus.clone()
    };
    Ok((plus, minus))
}

impl Swf {
    fn phase(t: &PlaneWaveTerm, x: [f64; 2]) -> f64 {
        t.p[0] * x[0] + t.p[1] * x[1] + t.alpha
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let th = Self::phase(t, x);
            let eta = t.eta as f64;
            s += eta
                * match self.branch {
                    Branch::Plus => Complex64::new(th.cos(), th.sin()),
                    Branch::Minus => Complex64::new(th.cos(), -th.sin()),
                    Branch::Cos => Complex64::new(th.cos(), 0.0),
                    Branch::Sin => Complex64::new(th.sin(), 0.0),
                };
        }
        s * self.amplitude
    }

    pub fn evaluate_many(&self, xs: &[[f64; 2]]) -> Vec<Complex64> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    pub fn gradient(&self, x: [f64; 2]) -> [Complex64; 2] {
        let mut g = [Complex64::new(0.0, 0.0); 2];
        for t in &self.terms {
            let th = Self::phase(t, x);
            let eta = t.eta as f64;
            // d/dθ of the branch function
            let d = match self.branch {
                Branch::Plus => Complex64::new(-th.sin(), th.cos()),
                Branch::Minus => Complex64::new(-th.sin(), -th.cos()),
                Branch::Cos => Complex64::new(-th.sin(), 0.0),
                Branch::Sin => Complex64::new(th.cos(), 0.0),
            };
            g[0] += eta * t.p[0] * d;
            g[1] += eta * t.p[1] * d;
        }
        [g[0] * self.amplitude, g[1] * self.amplitude]
    }

    pub fn with_branch(&self, branch: Branch) -> Swf {
        Swf {
            branch,
            ..self.clone()
        }
    }

    pub fn momentum_norm(&self) -> f64 {
        self.momentum[0].hypot(self.momentum[1])
    }
}

/// The same sum evaluated by mapping the point into every image and
/// taking p·g_k(x) directly, without the compiled affine phases.
pub fn evaluate_images(
    epp: &Epp,
    prescription: &SignPrescription,
    p: [f64; 2],
    branch: Branch,
    x: [f64; 2],
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (img, &eta) in epp.images.iter().zip(&prescription.eta) {
        let y = img.iso.apply_f64(x, img.translation_f64);
        let th = p[0] * y[0] + p[1] * y[1];
        let eta = eta as f64;
        s += eta
            * match branch {
                Branch::Plus => Complex64::new(th.cos(), th.sin()),
                Branch::Minus => Complex64::new(th.cos(), -th.sin()),
                Branch::Cos => Complex64::new(th.cos(), 0.0),
                Branch::Sin => Complex64::new(th.sin(), 0.0),
            };
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct RealPair {
    pub cos: Swf,
    pub sin: Swf,
    /// True when the combination is identically zero.
    pub cos_degenerate: bool,
    pub sin_degenerate: bool,
}

/// Splits a ± pair into Σ η cos θ and Σ η sin θ; a combination that
/// vanishes on the polygon is reported as degenerate.
pub fn real_combinations(pair: &(Swf, Swf), poly: &Polygon) -> RealPair {
    let cos = pair.0.with_branch(Branch::Cos);
    let sin = pair.0.with_branch(Branch::Sin);
    let pts = interior_samples(poly, 64, 0x5eed);
    let scale = pair.0.terms.len() as f64 * pair.0.amplitude.abs();
    let vanishes = |f: &Swf| pts.iter().all(|&x| f.evaluate(x).norm() <= 1e-10 * scale);
    RealPair {
        cos_degenerate: vanishes(&cos),
        sin_degenerate: vanishes(&sin),
        cos,
        sin,
    }
}

/// Seeded rejection sampling of points strictly inside the polygon.
pub fn interior_samples(poly: &Polygon, count: usize, seed: u64) -> Vec<[f64; 2]> {
    let (lo, hi) = poly.bounding_box();
    let tol = 1e-9 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if poly.contains(x, tol) {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeResidual {
    pub side: usize,
    pub condition: BoundaryCondition,
    /// max |Ψ| (Dirichlet) or max |∂Ψ/∂n|/|p| (Neumann), divided by the
    /// number of terms and the amplitude.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub edges: Vec<EdgeResidual>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_boundary(
    swf: &Swf,
    poly: &Polygon,
    prescription: &SignPrescription,
    samples_per_edge: usize,
    tol: f64,
) -> BoundaryReport {
    let scale = swf.terms.len() as f64 * swf.amplitude.abs().max(f64::MIN_POSITIVE);
    let pn = swf.momentum_norm().max(1.0);
    let s = samples_per_edge.max(2);
    let edges: Vec<EdgeResidual> = (0..poly.n())
        .map(|k| {
            let (a, b) = poly.edge(k);
            let nrm = poly.outward_normal(k);
            let bc = prescription.bc[k];
            let mut worst: f64 = 0.0;
            for i in 0..s {
                let t = i as f64 / (s - 1) as f64;
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let r = match bc {
                    BoundaryCondition::Dirichlet => swf.evaluate(x).norm(),
                    BoundaryCondition::Neumann => {
                        let g = swf.gradient(x);
                        (g[0] * nrm[0] + g[1] * nrm[1]).norm() / pn
                    }
                };
                worst = worst.max(r / scale);
            }
            EdgeResidual {
                side: k,
                condition: bc,
                residual: worst,
            }
        })
        .collect();
    let max_residual = edges.iter().map(|e| e.residual).fold(0.0, f64::max);
    BoundaryReport {
        edges,
        max_residual,
        pass: max_residual < tol,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HelmholtzReport {
    /// max ||p_k| − |p||/|p|
    pub norm_spread: f64,
    /// max |Δ_hΨ + 2EΨ| / (E·max|Ψ|) over the sample points
    pub fd_residual: f64,
    pub pass: bool,
}

pub fn verify_helmholtz(swf: &Swf, poly: &Polygon) -> Result<HelmholtzReport> {
    let p0 = swf.momentum_norm();
    let spread = swf
        .terms
        .iter()
        .map(|t| (t.p[0].hypot(t.p[1]) - p0).abs() / p0.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if spread > 1e-12 {
        return Err(Error::MomentumMismatch);
    }
    let pts = interior_samples(poly, 100, 0xfd);
    let h = 1e-3 / p0.max(1.0);
    let e = swf.energy;
    let mut worst: f64 = 0.0;
    let mut vmax: f64 = 0.0;
    for &x in &pts {
        let f = |dx: f64, dy: f64| swf.evaluate([x[0] + dx, x[1] + dy]);
        let c = f(0.0, 0.0);
        let lap = (f(h, 0.0) + f(-h, 0.0) + f(0.0, h) + f(0.0, -h) - 4.0 * c) / (h * h);
        worst = worst.max((lap + 2.0 * e * c).norm());
        vmax = vmax.max(c.norm());
    }
    let fd = if vmax > 0.0 { worst / (e * vmax) } else { 0.0 };
    Ok(HelmholtzReport {
        norm_spread: spread,
        fd_residual: fd,
        pass: fd < 1e-6,
    })
}

/// x ↦ m·x + t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: [f64; 2],
}

impl Affine2 {
    /// Mirror in the line through `point` with direction angle `theta`.
    pub fn reflection(point: [f64; 2], theta: f64) -> Affine2 {
        let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let m = [[c, s], [s, -c]];
        let t = [
            point[0] - (m[0][0] * point[0] + m[0][1] * point[1]),
            point[1] - (m[1][0] * point[0] + m[1][1] * point[1]),
        ];
        Affine2 { m, t }
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * x[0] + self.m[0][1] * x[1] + self.t[0],
            self.m[1][0] * x[0] + self.m[1][1] * x[1] + self.t[1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

/// Classifies Ψ∘S against ±Ψ at 200 interior points.
pub fn symmetry_probe(swf: &Swf, poly: &Polygon, sym: &Affine2) -> Result<Parity> {
    let verts = poly.vertices_f64();
    let (lo, hi) = poly.bounding_box();
    let tol = 1e-9 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    for v in &verts {
        let w = sym.apply(*v);
        if !verts
            .iter()
            .any(|u| (u[0] - w[0]).hypot(u[1] - w[1]) <= tol)
        {
            return Err(Error::SymmetryNotAutomorphism);
        }
    }
    let pts = interior_samples(poly, 200, 0x5a5a);
    let vals: Vec<Complex64> = pts.iter().map(|&x| swf.evaluate(x)).collect();
    let scale = vals
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut even = true;
    let mut odd = true;
    for (x, v) in pts.iter().zip(&vals) {
        let w = swf.evaluate(sym.apply(*x));
        even &= (w - v).norm() <= 1e-9 * scale;
        odd &= (w + v).norm() <= 1e-9 * scale;
    }
    Ok(match (even, odd) {
        (true, _) => Parity::Even,
        (false, true) => Parity::Odd,
        _ => Parity::Neither,
    })
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
pub fn triangulate(v: &[[f64; 2]]) -> Vec<[[f64; 2]; 3]> {
    let cross = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let n = idx.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (v[idx[(i + n - 1) % n]], v[idx[i]], v[idx[(i + 1) % n]]);
            if cross(a, b, c) <= 0.0 {
                return false;
            }
            idx.iter().all(|&j| {
                let p = v[j];
                p == a
                    || p == b
                    || p == c
                    || !(cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0)
            })
        });
        let i = ear.unwrap_or(0);
        out.push([v[idx[(i + n - 1) % n]], v[idx[i]], v[idx[(i + 1) % n]]]);
        idx.remove(i);
    }
    out.push([v[idx[0]], v[idx[1]], v[idx[2]]]);
    out
}

const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// ∫ f over the polygon: collapsed-square Gauss–Legendre, 16 points per
/// triangle.
pub fn integrate(poly: &Polygon, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let mut total = 0.0;
    for [a, b, c] in triangulate(&poly.vertices_f64()) {
        let j = ((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])).abs();
        for &(u, wu) in &GL4 {
            for &(w, ww) in &GL4 {
                let x = [
                    a[0] + u * (b[0] - a[0]) + u * w * (c[0] - b[0]),
                    a[1] + u * (b[1] - a[1]) + u * w * (c[1] - b[1]),
                ];
                total += wu * ww * u * j * f(x);
            }
        }
    }
    total
}

/// Rescales to unit L² norm over the polygon.
pub fn normalize(swf: &Swf, poly: &Polygon) -> Result<Swf> {
    let n2 = integrate(poly, |x| swf.evaluate(x).norm_sqr());
    if !(n2 > 0.0) {
        return Err(Error::Invalid(
            "wave function vanishes on the polygon".into(),
        ));
    }
    Ok(Swf {
        amplitude: swf.amplitude / n2.sqrt(),
        ..swf.clone()
    })
}

/// Samples on a w×h grid over the bounding box; None outside the polygon.
pub fn grid(swf: &Swf, poly: &Polygon, w: usize, h: usize) -> Vec<([f64; 2], Option<Complex64>)> {
    let (lo, hi) = poly.bounding_box();
    let mut out = Vec::with_capacity(w * h);
    for j in 0..h {
        // top row first
        let y = hi[1] - (j as f64 + 0.5) * (hi[1] - lo[1]) / h as f64;
        for i in 0..w {
            let x = lo[0] + (i as f64 + 0.5) * (hi[0] - lo[0]) / w as f64;
            let v = poly.contains([x, y], 0.0).then(|| swf.evaluate([x, y]));
            out.push(([x, y], v));
        }
    }
    out
}

pub fn grid_csv(samples: &[([f64; 2], Option<Complex64>)]) -> String {
    let mut s = String::from("x,y,re,im,abs2\n");
    for (x, v) in samples {
        if let Some(v) = v {
            let _ = writeln!(
                s,
                "{:.9},{:.9},{:.12e},{:.12e},{:.12e}",
                x[0],
                x[1],
                v.re,
                v.im,
                v.norm_sqr()
            );
        }
    }
    s
}

/// Binary 8-bit graymap of |Ψ|², scaled to the maximum.
pub fn grid_pgm(samples: &[([f64; 2], Option<Complex64>)], w: usize, h: usize) -> Vec<u8> {
    let vals: Vec<f64> = samples
        .iter()
        .map(|(_, v)| v.map_or(0.0, |v| v.norm_sqr()))
        .collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(vals.iter().map(|v| {
        if max > 0.0 {
            (255.0 * v / max).round() as u8
        } else {
            0
        }
    }));
    out
}

/// Distinct energies ≤ `emax` whose classical aperiodic momenta carry a
/// nonvanishing SWF under the given prescription.
pub fn realized_levels(
    epp: &Epp,
    lat: &crate::lattice::PeriodLattice,
    prescription: &SignPrescription,
    emax: f64,
) -> Result<Vec<f64>> {
    use crate::quantize::{momentum_aperiodic, spectrum, SkeletonKind, SpectrumOptions};
    let levels = spectrum(
        lat,
        emax,
        &[SkeletonKind::ClassicalAperiodic],
        &SpectrumOptions::default(),
    )?;
    let mut out = Vec::new();
    for level in levels {
        for &(m, n) in &level.labels {
            let q = momentum_aperiodic(lat, m, n)?;
            let pair = compile_swf(epp, prescription, &q)?;
            let real = real_combinations(&pair, &epp.polygon);
            if !(real.cos_degenerate && real.sin_degenerate) {
                out.push(level.energy);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::PeriodLattice;
    use crate::quantize::momentum_aperiodic;
    use crate::shapes;
    use crate::unfold::{build_epp, period_basis};
    use num_rational::BigRational;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    /// Exhaustive search over η with η_0 = +1.
    fn brute(epp: &Epp) -> Vec<(Vec<i8>, Vec<BoundaryCondition>)> {
        let m = epp.images.len();
        let n = epp.polygon.n();
        let mut out = Vec::new();
        'mask: for mask in 0u64..(1u64 << (m - 1)) {
            let eta: Vec<i8> = (0..m)
                .map(|i| {
                    if i > 0 && mask >> (i - 1) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            let mut bc = vec![None; n];
            for (i, row) in epp.glue.iter().enumerate() {
                for (e, g) in row.iter().enumerate() {
                    let same = eta[i] == eta[g.image];
                    match bc[e] {
                        None => bc[e] = Some(same),
                        Some(s) if s != same => continue 'mask,
                        _ => {}
                    }
                }
            }
            let bc = bc
                .into_iter()
                .map(|s| {
                    if s.unwrap() {
                        BoundaryCondition::Neumann
                    } else {
                        BoundaryCondition::Dirichlet
                    }
                })
                .collect();
            out.push((eta, bc));
        }
        out
    }

    fn check_counts(poly: Polygon, expect: usize) {
        let epp = build_epp(&poly).unwrap();
        let fast = enumerate_prescriptions(&epp);
        let slow = brute(&epp);
        assert_eq!(fast.len(), expect, "{}", poly.describe());
        assert_eq!(slow.len(), expect);
        for p in &fast {
            assert!(slow.iter().any(|(e, b)| *e == p.eta && *b == p.bc));
        }
        assert!(fast.iter().any(|p| p.is_dirichlet()));
        assert!(fast.iter().any(|p| p.is_neumann()));
    }

    #[test]
    fn prescription_counts() {
        check_counts(shapes::pi3_parallelogram(&r(2, 3)).unwrap(), 2);
        check_counts(shapes::equilateral_triangle(&r(1, 1)).unwrap(), 2);
        check_counts(shapes::rectangle(&r(3, 2), &r(1, 1)).unwrap(), 4);
        check_counts(shapes::l_shape(), 4);
    }

    fn square_swf(m: i64, n: i64, neumann: bool) -> (Epp, SignPrescription, (Swf, Swf)) {
        let poly = shapes::square(&r(1, 1)).unwrap();
        let epp = build_epp(&poly).unwrap();
        let basis = period_basis(&epp).unwrap();
        let lat = PeriodLattice::from_basis(&basis, None).unwrap();
        let pres = enumerate_prescriptions(&epp)
            .into_iter()
            .find(|p| {
                if neumann {
                    p.is_neumann()
                } else {
                    p.is_dirichlet()
                }
            })
            .unwrap();
        let q = momentum_aperiodic(&lat, m, n).unwrap();
        let pair = compile_swf(&epp, &pres, &q).unwrap();
        (epp, pres, pair)
    }

    #[test]
    fn square_dirichlet_is_sine_product() {
        let (epp, pres, pair) = square_swf(1, 1, false);
        let poly = &epp.polygon;
        let real = real_combinations(&pair, poly);
        // one of the two real parts is identically zero for the square
        assert!(real.cos_degenerate != real.sin_degenerate);
        let f = if real.cos_degenerate {
            &real.sin
        } else {
            &real.cos
        };
        let c = f.evaluate([0.5, 0.5]).re;
        assert!(c.abs() > 1.0);
        for x in interior_samples(poly, 50, 1) {
            let want = (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin();
            assert!((f.evaluate(x).re / c - want).abs() < 1e-12);
            let direct = evaluate_images(&epp, &pres, pair.0.momentum, Branch::Plus, x);
            assert!((direct - pair.0.evaluate(x)).norm() < 1e-12);
            assert!((pair.0.evaluate(x) - pair.1.evaluate(x).conj()).norm() < 1e-12);
        }
        for v in poly.vertices_f64() {
            assert!(pair.0.evaluate(v).norm() < 1e-12);
        }
        let rep = verify_boundary(&pair.0, poly, &pres, 1000, 1e-9);
        assert!(rep.pass, "{rep:?}");
        let h = verify_helmholtz(&pair.0, poly).unwrap();
        assert!(h.pass, "{h:?}");
    }

    #[test]
    fn neumann_magnitude_at_vertices() {
        let (epp, pres, pair) = square_swf(2, 1, true);
        for v in epp.polygon.vertices_f64() {
            assert!((pair.0.evaluate(v).norm() - 4.0).abs() < 1e-12);
        }
        assert!(verify_boundary(&pair.0, &epp.polygon, &pres, 200, 1e-9).pass);
    }

    #[test]
    fn unquantized_momentum_is_rejected_and_fails_boundary() {
        let (epp, pres, pair) = square_swf(1, 1, false);
        let bad = QuantizedMomentum {
            m: 1,
            n: 1,
            vector: [3.0, 3.3],
            kind: crate::quantize::SkeletonKind::ClassicalAperiodic,
            ratio: None,
            flagged: false,
        };
        assert!(matches!(
            compile_swf(&epp, &pres, &bad),
            Err(Error::UnquantizedMomentum(_))
        ));
        let mut forced = pair.0.clone();
        for t in &mut forced.terms {
            t.p = [t.p[0] * 1.1, t.p[1] * 1.1];
        }
        forced.momentum = [forced.momentum[0] * 1.1, forced.momentum[1] * 1.1];
        assert!(!verify_boundary(&forced, &epp.polygon, &pres, 200, 1e-9).pass);
        forced.terms[0].p[0] *= 1.5;
        assert!(matches!(
            verify_helmholtz(&forced, &epp.polygon),
            Err(Error::MomentumMismatch)
        ));
    }

    #[test]
    fn square_ground_mode_is_diagonal_symmetric() {
        let (epp, _, pair) = square_swf(1, 1, false);
        let diag = Affine2::reflection([0.0, 0.0], std::f64::consts::FRAC_PI_4);
        assert_eq!(
            symmetry_probe(&pair.0, &epp.polygon, &diag).unwrap(),
            Parity::Even
        );
        let off = Affine2::reflection([0.3, 0.0], 0.0);
        assert!(matches!(
            symmetry_probe(&pair.0, &epp.polygon, &off),
            Err(Error::SymmetryNotAutomorphism)
        ));
    }

    #[test]
    fn l_shape_realized_dirichlet_levels() {
        let poly = shapes::l_shape();
        let epp = build_epp(&poly).unwrap();
        let lat = PeriodLattice::from_basis(&period_basis(&epp).unwrap(), None).unwrap();
        let d = enumerate_prescriptions(&epp)
            .into_iter()
            .find(|p| p.is_dirichlet())
            .unwrap();
        let got = realized_levels(&epp, &lat, &d, 60.0).unwrap();
        let h = std::f64::consts::PI.powi(2) / 2.0;
        // m, n ≥ 1 with m² + n² ≤ 12: 2, 5, 8, 10
        let want: Vec<f64> = [2.0, 5.0, 8.0, 10.0].iter().map(|u| u * h).collect();
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn quadrature_and_normalization() {
        let poly = shapes::l_shape();
        let area = integrate(&poly, |_| 1.0);
        assert!((area - poly.signed_area()).abs() < 1e-12);
        // ∫ x² over the unit square by exact polynomial integration: 1/3
        let sq = shapes::square(&r(1, 1)).unwrap();
        assert!((integrate(&sq, |x| x[0] * x[0]) - 1.0 / 3.0).abs() < 1e-14);
        let (_, _, pair) = square_swf(1, 2, false);
        let n = normalize(&pair.0, &sq).unwrap();
        assert!((integrate(&sq, |x| n.evaluate(x).norm_sqr()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pgm_header_and_size() {
        let (epp, _, pair) = square_swf(1, 1, false);
        let g = grid(&pair.0, &epp.polygon, 8, 4);
        let pgm = grid_pgm(&g, 8, 4);
        assert!(pgm.starts_with(b"P5\n8 4\n255\n"));
        assert_eq!(pgm.len(), b"P5\n8 4\n255\n".len() + 32);
        assert!(grid_csv(&g).lines().count() > 1);
    }
}
