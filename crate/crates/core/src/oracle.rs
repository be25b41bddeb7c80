//! Finite-difference eigenvalues of −½Δ on rasterized polygons, spectrum
//! matching, and the broken-rectangle deformation experiments.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::Polygon;
use crate::shapes;
use crate::swf::BoundaryCondition;

/// Unknowns above this count go to the sparse shift-invert solver.
pub const DENSE_LIMIT: usize = 600;

#[derive(Clone, Debug)]
pub struct GridDomain {
    pub h: f64,
    pub origin: [f64; 2],
    /// Nodes per row and column, boundary nodes included.
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
    /// Unknown index of each interior node.
    pub index: Vec<Option<usize>>,
    /// (i, j) of each unknown.
    pub nodes: Vec<(usize, usize)>,
    /// Links from an unknown across the boundary: (unknown, neighbour node, condition).
    pub boundary_links: Vec<(usize, usize, BoundaryCondition)>,
}

impl GridDomain {
    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
        ]
    }

    pub fn mask_area(&self) -> f64 {
        self.nodes.len() as f64 * self.h * self.h
    }
}

/// Grid nodes at the bounding-box corner plus integer multiples of h;
/// nodes on the boundary are excluded. Each cut link takes the condition
/// of the polygon edge nearest to its midpoint. Requires h ≤ min edge / 8.
pub fn rasterize(poly: &Polygon, h: f64, bc: &[BoundaryCondition]) -> Result<GridDomain> {
    rasterize_with(poly, h, bc, 8.0)
}

/// As `rasterize`, with h ≤ min edge / `per_edge`.
pub fn rasterize_with(
    poly: &Polygon,
    h: f64,
    bc: &[BoundaryCondition],
    per_edge: f64,
) -> Result<GridDomain> {
    let limit = poly.min_edge_length() / per_edge;
    if !(h > 0.0) || h > limit * (1.0 + 1e-12) {
        return Err(Error::TooCoarse { h, limit });
    }
    if bc.len() != poly.n() {
        return Err(Error::Invalid(format!(
            "{} boundary conditions for {} sides",
            bc.len(),
            poly.n()
        )));
    }
    let (lo, hi) = poly.bounding_box();
    let nx = ((hi[0] - lo[0]) / h).round() as usize + 1;
    let ny = ((hi[1] - lo[1]) / h).round() as usize + 1;
    let tol = 1e-9 * h;
    let mut mask = vec![false; nx * ny];
    let mut index = vec![None; nx * ny];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let p = [lo[0] + i as f64 * h, lo[1] + j as f64 * h];
            if poly.contains(p, tol) {
                mask[j * nx + i] = true;
                index[j * nx + i] = Some(nodes.len());
                nodes.push((i, j));
            }
        }
    }
    let mut boundary_links = Vec::new();
    for (u, &(i, j)) in nodes.iter().enumerate() {
        for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let (a, b) = (i as i64 + di, j as i64 + dj);
            let inside = a >= 0
                && b >= 0
                && (a as usize) < nx
                && (b as usize) < ny
                && mask[b as usize * nx + a as usize];
            if !inside {
                let mid = [
                    lo[0] + (i as f64 + 0.5 * di as f64) * h,
                    lo[1] + (j as f64 + 0.5 * dj as f64) * h,
                ];
                let e = poly.nearest_edge(mid);
                let node = (b.max(0) as usize) * nx + a.max(0) as usize;
                boundary_links.push((u, node, bc[e]));
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::TooCoarse { h, limit });
    }
    Ok(GridDomain {
        h,
        origin: lo,
        nx,
        ny,
        mask,
        index,
        nodes,
        boundary_links,
    })
}

/// −½Δ with the 5-point stencil. Dirichlet links keep the full diagonal
/// weight; Neumann links use a mirror ghost equal to the node, dropping
/// the link.
pub fn assemble(dom: &GridDomain) -> CscMatrix<f64> {
    let n = dom.unknowns();
    let w = 0.5 / (dom.h * dom.h);
    let mut coo = CooMatrix::new(n, n);
    let mut diag = vec![4.0 * w; n];
    for &(u, _, bc) in &dom.boundary_links {
        if bc == BoundaryCondition::Neumann {
            diag[u] -= w;
        }
    }
    for (u, &(i, j)) in dom.nodes.iter().enumerate() {
        coo.push(u, u, diag[u]);
        if i + 1 < dom.nx {
            if let Some(v) = dom.index[j * dom.nx + i + 1] {
                coo.push(u, v, -w);
                coo.push(v, u, -w);
            }
        }
        if j + 1 < dom.ny {
            if let Some(v) = dom.index[(j + 1) * dom.nx + i] {
                coo.push(u, v, -w);
                coo.push(v, u, -w);
            }
        }
    }
    CscMatrix::from(&coo)
}

/// The `count` lowest eigenvalues of −½Δ_h, ascending.
pub fn fd_eigenvalues(dom: &GridDomain, count: usize) -> Result<Vec<f64>> {
    let n = dom.unknowns();
    if count == 0 || count > n.div_ceil(4).max(1) {
        return Err(Error::Invalid(format!(
            "{count} eigenvalues requested from {n} unknowns"
        )));
    }
    let a = assemble(dom);
    if n <= DENSE_LIMIT {
        let mut d = DMatrix::zeros(n, n);
        for (i, j, v) in a.triplet_iter() {
            d[(i, j)] = *v;
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(d).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.truncate(count);
        return Ok(ev);
    }
    shift_invert_lanczos(&a, count, -1.0)
}

/// Lanczos with full reorthogonalization on (A − σ)⁻¹, σ below the
/// spectrum.
pub fn shift_invert_lanczos(a: &CscMatrix<f64>, count: usize, sigma: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    let mut shifted = CooMatrix::new(n, n);
    for (i, j, v) in a.triplet_iter() {
        shifted.push(i, j, *v);
    }
    for i in 0..n {
        shifted.push(i, i, -sigma);
    }
    let chol = CscCholesky::factor(&CscMatrix::from(&shifted))
        .map_err(|e| Error::ConvergenceFailure(format!("Cholesky failed: {e:?}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c05);
    let mut q = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
    q /= q.norm();
    let max_steps = n.min(12 * count + 200);
    let mut basis: Vec<DVector<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut next_check = (2 * count + 20).min(max_steps);
    loop {
        let k = basis.len() - 1;
        let mut w = DMatrix::from_column_slice(n, 1, basis[k].as_slice());
        chol.solve_mut(&mut w);
        let mut w = w.column(0).into_owned();
        let ak = basis[k].dot(&w);
        alpha.push(ak);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let bk = w.norm();
        let steps = alpha.len();
        if steps >= next_check || steps == max_steps || bk < 1e-14 {
            let t = DMatrix::from_fn(steps, steps, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut pairs: Vec<(f64, f64)> = (0..steps)
                .map(|i| {
                    (
                        eig.eigenvalues[i],
                        (bk * eig.eigenvectors[(steps - 1, i)]).abs(),
                    )
                })
                .collect();
            pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
            let want = count.min(steps);
            let converged = pairs[..want]
                .iter()
                .all(|&(theta, res)| res <= 1e-10 * theta.abs());
            if (converged && want == count) || steps == max_steps || bk < 1e-14 {
                if !converged && want < count {
                    return Err(Error::ConvergenceFailure(format!(
                        "Lanczos found {want} of {count} eigenvalues"
                    )));
                }
                if !converged {
                    return Err(Error::ConvergenceFailure(format!(
                        "Lanczos residuals above tolerance after {steps} steps"
                    )));
                }
                let mut ev: Vec<f64> = pairs[..count].iter().map(|p| sigma + 1.0 / p.0).collect();
                ev.sort_by(f64::total_cmp);
                return Ok(ev);
            }
            next_check = (steps + count + 10).min(max_steps);
        }
        beta.push(bk);
        basis.push(w / bk);
    }
}

/// Empirical convergence order from three levels at h, h/2, h/4.
pub fn richardson_order(e_h: f64, e_h2: f64, e_h4: f64) -> f64 {
    ((e_h - e_h2) / (e_h2 - e_h4)).abs().log2()
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelMatch {
    pub index: usize,
    pub reference: f64,
    pub matched: f64,
    pub matched_index: usize,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    pub rows: Vec<LevelMatch>,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    /// Fraction of numerical levels up to the largest reference level that
    /// no reference level picked.
    pub unmatched_fraction: f64,
    pub pass: bool,
}

/// Matches every semiclassical level to its nearest numerical one.
pub fn compare_spectra(semiclassical: &[f64], numerical: &[f64], rel_tol: f64) -> MatchReport {
    let mut rows = Vec::with_capacity(semiclassical.len());
    let mut used = vec![false; numerical.len()];
    for (i, &e) in semiclassical.iter().enumerate() {
        let Some((j, &m)) = numerical
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()))
        else {
            break;
        };
        used[j] = true;
        rows.push(LevelMatch {
            index: i,
            reference: e,
            matched: m,
            matched_index: j,
            rel_error: (m / e - 1.0).abs(),
        });
    }
    let max_rel_error = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let mean_rel_error = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.rel_error).sum::<f64>() / rows.len() as f64
    };
    let top = semiclassical
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        * (1.0 + rel_tol);
    let in_range: Vec<usize> = (0..numerical.len())
        .filter(|&j| numerical[j] <= top)
        .collect();
    let unmatched = in_range.iter().filter(|&&j| !used[j]).count();
    MatchReport {
        pass: rows.len() == semiclassical.len() && max_rel_error < rel_tol,
        unmatched_fraction: if in_range.is_empty() {
            0.0
        } else {
            unmatched as f64 / in_range.len() as f64
        },
        rows,
        max_rel_error,
        mean_rel_error,
    }
}

pub fn match_csv(report: &MatchReport) -> String {
    let mut s = String::from("level_index,numerical,semiclassical,rel_error\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{:.12e},{:.12e},{:.6e}",
            r.index + 1,
            r.matched,
            r.reference,
            r.rel_error
        );
    }
    s
}

/// Single-bay broken rectangle 0 < x1 < x2, 0 < y1 < y2.
#[derive(Clone, Debug, PartialEq)]
pub struct BrokenRectangle {
    pub x1: BigRational,
    pub x2: BigRational,
    pub y1: BigRational,
    pub y2: BigRational,
}

impl BrokenRectangle {
    pub fn polygon(&self) -> Result<Polygon> {
        shapes::broken_rectangle(&self.x1, &self.x2, &self.y1, &self.y2)
    }

    /// E = ½π²(m²C_x²/x1² + n²C_y²/y1²) for m, n ≥ 1, ascending with
    /// multiplicity.
    pub fn dirichlet_levels(&self, emax: f64) -> Vec<f64> {
        let cx = (&self.x2 / &self.x1).denom().to_f64().unwrap_or(f64::NAN);
        let cy = (&self.y2 / &self.y1).denom().to_f64().unwrap_or(f64::NAN);
        let (x1, y1) = (self.x1.to_f64().unwrap(), self.y1.to_f64().unwrap());
        let pi2 = std::f64::consts::PI.powi(2);
        let mut out = Vec::new();
        for m in 1.. {
            let ex = 0.5 * pi2 * (m as f64 * cx / x1).powi(2);
            if ex > emax {
                break;
            }
            for n in 1.. {
                let e = ex + 0.5 * pi2 * (n as f64 * cy / y1).powi(2);
                if e > emax {
                    break;
                }
                out.push(e);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// x ↦ x + g(x, y), y ↦ y + h(x, y): the ramp pulling x2 in to x3 on the
/// lower arm, identity elsewhere.
#[derive(Clone, Debug, Serialize)]
pub struct DeformationMap {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub y1: f64,
    pub eps: f64,
}

impl DeformationMap {
    pub fn g(&self, x: f64, y: f64) -> f64 {
        if x >= self.x1 && x <= self.x2 && y <= self.y1 {
            -(x - self.x1) * (self.x2 - self.x3) / (self.x2 - self.x1)
        } else {
            0.0
        }
    }

    pub fn h(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }

    /// ∂g/∂x (∂g/∂y vanishes away from the seam y = y1).
    pub fn dg_dx(&self, x: f64, y: f64) -> f64 {
        if x > self.x1 && x < self.x2 && y < self.y1 {
            -(self.x2 - self.x3) / (self.x2 - self.x1)
        } else {
            0.0
        }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] + self.g(p[0], p[1]), p[1] + self.h(p[0], p[1])]
    }

    /// sup |g|, |h| and first derivatives on a sample grid, and whether
    /// they stay within ε.
    pub fn check_bounds(&self, poly: &Polygon, samples: usize) -> (f64, bool) {
        let (lo, hi) = poly.bounding_box();
        let mut sup: f64 = 0.0;
        for j in 0..=samples {
            for i in 0..=samples {
                let x = lo[0] + (hi[0] - lo[0]) * i as f64 / samples as f64;
                let y = lo[1] + (hi[1] - lo[1]) * j as f64 / samples as f64;
                if !poly.contains([x, y], 0.0) {
                    continue;
                }
                sup = sup
                    .max(self.g(x, y).abs())
                    .max(self.h(x, y).abs())
                    .max(self.dg_dx(x, y).abs());
            }
        }
        (sup, sup <= self.eps * (1.0 + 1e-12))
    }
}

/// Moves the side at x = x2 of the lower arm to x = x3.
pub fn deform_domain(
    base: &BrokenRectangle,
    x3: &BigRational,
) -> Result<(Polygon, DeformationMap)> {
    if !(x3 > &base.x1 && x3 <= &base.x2) {
        return Err(Error::OutOfRange(format!(
            "x3 = {x3} must lie in ({}, {}]",
            base.x1, base.x2
        )));
    }
    let poly = shapes::broken_rectangle(&base.x1, x3, &base.y1, &base.y2)?;
    let span = &base.x2 - &base.x1;
    let shift = &base.x2 - x3;
    let eps = if span > BigRational::from_integer(1.into()) {
        shift.clone()
    } else {
        &shift / &span
    };
    let f = |q: &BigRational| q.to_f64().unwrap();
    Ok((
        poly,
        DeformationMap {
            x1: f(&base.x1),
            x2: f(&base.x2),
            x3: f(x3),
            y1: f(&base.y1),
            eps: f(&eps.abs()),
        },
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub eps: f64,
    pub x3: f64,
    pub eta: f64,
    pub map_sup: f64,
    pub map_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Study {
    pub base_levels: Vec<f64>,
    pub rows: Vec<StudyRow>,
    pub decreasing: bool,
}

/// For each ε, η = max over the first `count` ordered Dirichlet levels of
/// |E'_n/E_n − 1| between the deformed and the base domain at spacing h.
pub fn perturbation_study(
    base: &BrokenRectangle,
    eps: &[BigRational],
    count: usize,
    h: f64,
) -> Result<Study> {
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid(
            "ε sequence must be strictly decreasing".into(),
        ));
    }
    let poly = base.polygon()?;
    let d = vec![BoundaryCondition::Dirichlet; 6];
    let base_levels = fd_eigenvalues(&rasterize(&poly, h, &d)?, count)?;
    let span = &base.x2 - &base.x1;
    let one = BigRational::from_integer(1.into());
    let mut rows = Vec::new();
    for e in eps {
        let x3 = if span > one {
            &base.x2 - e
        } else {
            &base.x2 - e * &span
        };
        let (dpoly, map) = deform_domain(base, &x3)?;
        let (map_sup, map_ok) = map.check_bounds(&poly, 200);
        let levels = if e.is_zero_ratio() {
            base_levels.clone()
        } else {
            fd_eigenvalues(&rasterize(&dpoly, h, &d)?, count)?
        };
        let eta = base_levels
            .iter()
            .zip(&levels)
            .map(|(a, b)| (b / a - 1.0).abs())
            .fold(0.0, f64::max);
        rows.push(StudyRow {
            eps: e.to_f64().unwrap(),
            x3: x3.to_f64().unwrap(),
            eta,
            map_sup,
            map_ok,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].eta < w[0].eta);
    Ok(Study {
        base_levels,
        rows,
        decreasing,
    })
}

trait ZeroRatio {
    fn is_zero_ratio(&self) -> bool;
}

impl ZeroRatio for BigRational {
    fn is_zero_ratio(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

pub fn study_csv(study: &Study) -> String {
    let mut s = String::from("epsilon,x3,eta,map_sup,map_ok\n");
    for r in &study.rows {
        let _ = writeln!(
            s,
            "{:.9},{:.9},{:.9e},{:.9},{}",
            r.eps, r.x3, r.eta, r.map_sup, r.map_ok
        );
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct IncompletenessReport {
    pub k: i64,
    /// Largest |E'/E − 1| over matched levels.
    pub max_rel_error: f64,
    pub bound: f64,
    pub bound_ok: bool,
    /// At every fixed n, level m of the x2 = 2 family is matched iff k | m.
    pub every_kth: bool,
    /// Unmatched share of the x2 = 2 levels.
    pub unmatched_fraction: f64,
}

/// Compares the Dirichlet families of the broken rectangles (1, 2, 1, 2)
/// and (1, 2 − 1/k, 1, 2) in exact integer units of π²/2.
pub fn incompleteness_check(k: i64, n_max: i64, m_max: i64) -> Result<IncompletenessReport> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    let x2 = &two - BigRational::new(1.into(), k.into());
    // C_x = denominator of x2/x1
    let cx_base = (&two / &one).denom().to_i64().unwrap();
    let cx_fine = (&x2 / &one).denom().to_i64().unwrap();
    let mut max_rel: f64 = 0.0;
    let mut every_kth = true;
    let (mut total, mut unmatched) = (0usize, 0usize);
    for n in 1..=n_max {
        let fine: Vec<i64> = (1..=m_max).map(|m| (m * cx_fine).pow(2) + n * n).collect();
        let base: Vec<i64> = (1..=m_max * k)
            .map(|m| (m * cx_base).pow(2) + n * n)
            .collect();
        for &e in &fine {
            let nearest = base
                .iter()
                .min_by_key(|&&b| (b - e).abs())
                .copied()
                .unwrap_or(i64::MAX);
            max_rel = max_rel.max((e as f64 / nearest as f64 - 1.0).abs());
        }
        for (i, b) in base.iter().enumerate() {
            let m = i as i64 + 1;
            let hit = fine.contains(b);
            every_kth &= hit == (m % k == 0);
            total += 1;
            unmatched += usize::from(!hit);
        }
    }
    let bound = 1.0 / (k - 1) as f64;
    Ok(IncompletenessReport {
        k,
        max_rel_error: max_rel,
        bound,
        bound_ok: max_rel < bound,
        every_kth,
        unmatched_fraction: unmatched as f64 / total.max(1) as f64,
    })
}
