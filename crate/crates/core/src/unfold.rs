//! Unfolding a rational polygon into its elementary polygon pattern (EPP).
//!
//! Images are placed by isometries z ↦ ζ^r z + t or z ↦ ζ^r z̄ + t whose
//! translations are formal vectors, so "is this image a translate of that
//! one" is decided exactly for the whole angle-similar family. The 2N images
//! glued along their edges form a closed translation surface; its homology
//! gives the periods.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactgeom::{segment_distance, DirectionIndex, ExactVector, FormalVector, Polygon};

/// z ↦ ζ^rotation·z + translation, or with z̄ when `reflecting`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    pub reflecting: bool,
    pub rotation: i64,
    pub half_order: i64,
    pub translation: FormalVector,
}

impl Isometry {
    pub fn identity(poly: &Polygon) -> Isometry {
        Isometry {
            reflecting: false,
            rotation: 0,
            half_order: poly.half_order(),
            translation: FormalVector::zero(poly.field(), poly.formal_dim()),
        }
    }

    pub fn rotation_index(&self) -> DirectionIndex {
        DirectionIndex::new(self.rotation, self.half_order)
    }

    pub fn linear_key(&self) -> (bool, i64) {
        (self.reflecting, self.rotation)
    }

    pub fn apply_linear(&self, v: &FormalVector) -> FormalVector {
        if self.reflecting {
            v.conj().mul_zeta(self.rotation)
        } else {
            v.mul_zeta(self.rotation)
        }
    }

    pub fn apply(&self, v: &FormalVector) -> FormalVector {
        self.apply_linear(v).add(&self.translation)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let rotation = if self.reflecting {
            self.rotation - other.rotation
        } else {
            self.rotation + other.rotation
        };
        Isometry {
            reflecting: self.reflecting != other.reflecting,
            rotation: rotation.rem_euclid(2 * self.half_order),
            half_order: self.half_order,
            translation: self.apply(&other.translation).reduce(),
        }
    }

    /// Float image of a point, given the float value of the translation.
    pub fn apply_f64(&self, p: [f64; 2], t: [f64; 2]) -> [f64; 2] {
        let th = std::f64::consts::PI * self.rotation as f64 / self.half_order as f64;
        let (c, s) = (th.cos(), th.sin());
        let (x, y) = if self.reflecting {
            (p[0], -p[1])
        } else {
            (p[0], p[1])
        };
        [c * x - s * y + t[0], s * x + c * y + t[1]]
    }

    pub fn is_translation(&self) -> bool {
        !self.reflecting && self.rotation == 0
    }
}

/// One placed copy of the polygon.
#[derive(Clone, Debug)]
pub struct PolygonImage {
    pub index: usize,
    pub iso: Isometry,
    pub translation_f64: [f64; 2],
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonImage {
    fn new(poly: &Polygon, index: usize, iso: Isometry) -> PolygonImage {
        let t = poly.evaluate_f64(&iso.translation);
        let vertices = poly
            .vertices_f64()
            .into_iter()
            .map(|v| iso.apply_f64(v, t))
            .collect();
        PolygonImage {
            index,
            iso,
            translation_f64: t,
            vertices,
        }
    }

    /// Odd images are mirror images of the base polygon.
    pub fn parity(&self) -> bool {
        self.iso.reflecting
    }

    /// Direction index of this image's copy of side `e`.
    pub fn edge_direction(&self, poly: &Polygon, e: usize) -> i64 {
        let d = poly.directions()[e];
        let r = if self.iso.reflecting {
            self.iso.rotation - d
        } else {
            self.iso.rotation + d
        };
        r.rem_euclid(2 * poly.half_order())
    }

    pub fn edge(&self, e: usize) -> ([f64; 2], [f64; 2]) {
        let n = self.vertices.len();
        (self.vertices[e], self.vertices[(e + 1) % n])
    }

    /// Inward unit normal of edge `e` (images keep or flip orientation).
    pub fn inward_normal(&self, e: usize) -> [f64; 2] {
        let (a, b) = self.edge(e);
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = d[0].hypot(d[1]);
        let left = [-d[1] / l, d[0] / l];
        if self.iso.reflecting {
            [-left[0], -left[1]]
        } else {
            left
        }
    }
}

/// Reflects `image` across its copy of side `edge`.
pub fn reflect_image(poly: &Polygon, image: &PolygonImage, edge: usize) -> PolygonImage {
    let iso = reflect_iso(poly, &image.iso, edge);
    PolygonImage::new(poly, usize::MAX, iso)
}

fn reflect_iso(poly: &Polygon, iso: &Isometry, edge: usize) -> Isometry {
    let two_n = 2 * poly.half_order();
    let d = poly.directions()[edge];
    let delta = if iso.reflecting {
        iso.rotation - d
    } else {
        iso.rotation + d
    };
    // R(z) = ζ^{2δ} z̄ + A − ζ^{2δ} Ā with A = iso(v_e) collapses to
    // t' = t + w − ζ^{2δ} w̄, w the linear image of v_e
    let w = iso.apply_linear(&poly.formal_vertices()[edge]);
    let t = iso
        .translation
        .add(&w)
        .sub(&w.conj().mul_zeta(2 * delta))
        .reduce();
    Isometry {
        reflecting: !iso.reflecting,
        rotation: (2 * delta - iso.rotation).rem_euclid(two_n),
        half_order: iso.half_order,
        translation: t,
    }
}

/// The 2q_k images obtained by reflecting around vertex k.
pub fn unfold_vertex(poly: &Polygon, vertex: usize) -> Vec<PolygonImage> {
    let n = poly.n();
    let sides = [(vertex + n - 1) % n, vertex];
    let mut seen = HashMap::new();
    let mut out = vec![PolygonImage::new(poly, 0, Isometry::identity(poly))];
    seen.insert(out[0].iso.linear_key(), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for &e in &sides {
            let iso = reflect_iso(poly, &out[i].iso, e);
            if seen.contains_key(&iso.linear_key()) {
                continue;
            }
            let k = out.len();
            seen.insert(iso.linear_key(), k);
            out.push(PolygonImage::new(poly, k, iso));
            queue.push_back(k);
        }
    }
    out
}

/// How image `i`'s edge e is glued to image `image`'s edge e: crossing it
/// moves into the copy of `image` translated by `shift` (zero when the
/// neighbour is already in place, i.e. an internal edge).
#[derive(Clone, Debug)]
pub struct Glue {
    pub image: usize,
    pub internal: bool,
    pub shift: FormalVector,
    pub shift_f64: [f64; 2],
}

/// A pair of parallel boundary edges identified by a simple period.
#[derive(Clone, Debug)]
pub struct EdgePair {
    pub side: usize,
    pub a: usize,
    pub b: usize,
    /// Crossing a's edge leads into b translated by this vector.
    pub period: FormalVector,
    pub period_f64: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct Epp {
    pub polygon: Polygon,
    pub images: Vec<PolygonImage>,
    pub glue: Vec<Vec<Glue>>,
    pub edge_pairs: Vec<EdgePair>,
    /// BFS tree: parent image and side for every image but the first.
    pub parent: Vec<Option<(usize, usize)>>,
    pub c: usize,
}

pub fn build_epp(poly: &Polygon) -> Result<Epp> {
    let n = poly.n();
    let half = poly.half_order() as usize;
    let cap = 16 * half;
    let scale = {
        let (lo, hi) = poly.bounding_box();
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    };
    let mut images = vec![PolygonImage::new(poly, 0, Isometry::identity(poly))];
    let mut parent = vec![None];
    let mut lookup: HashMap<(bool, i64), usize> = HashMap::new();
    lookup.insert(images[0].iso.linear_key(), 0);
    let mut glue: Vec<Vec<Option<Glue>>> = vec![vec![None; n]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for e in 0..n {
            if glue[i][e].is_some() {
                continue;
            }
            let iso = reflect_iso(poly, &images[i].iso, e);
            let j = match lookup.get(&iso.linear_key()) {
                Some(&j) => j,
                None => {
                    let j = images.len();
                    if j >= cap {
                        return Err(Error::OrbitExplosion(cap));
                    }
                    lookup.insert(iso.linear_key(), j);
                    images.push(PolygonImage::new(poly, j, iso.clone()));
                    parent.push(Some((i, e)));
                    glue.push(vec![None; n]);
                    queue.push_back(j);
                    j
                }
            };
            let t = poly.evaluate_f64(&iso.translation);
            let tj = images[j].translation_f64;
            let close = (t[0] - tj[0]).hypot(t[1] - tj[1]) <= 1e-9 * scale.max(1.0);
            let (internal, shift) = if close && iso.translation == images[j].iso.translation {
                (true, FormalVector::zero(poly.field(), poly.formal_dim()))
            } else {
                (
                    false,
                    iso.translation.sub(&images[j].iso.translation).reduce(),
                )
            };
            let shift_f64 = [t[0] - tj[0], t[1] - tj[1]];
            glue[j][e] = Some(Glue {
                image: i,
                internal,
                shift: shift.neg(),
                shift_f64: [-shift_f64[0], -shift_f64[1]],
            });
            glue[i][e] = Some(Glue {
                image: j,
                internal,
                shift,
                shift_f64: if internal { [0.0, 0.0] } else { shift_f64 },
            });
            if internal {
                glue[j][e].as_mut().unwrap().shift_f64 = [0.0, 0.0];
            }
        }
    }
    if images.len() != 2 * half {
        return Err(Error::Invalid(format!(
            "unfolding produced {} images, expected 2N = {}",
            images.len(),
            2 * half
        )));
    }
    let glue: Vec<Vec<Glue>> = glue
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|g| g.expect("every edge glued"))
                .collect()
        })
        .collect();
    let mut edge_pairs = Vec::new();
    for (i, row) in glue.iter().enumerate() {
        for (e, g) in row.iter().enumerate() {
            if !g.internal && i < g.image {
                edge_pairs.push(EdgePair {
                    side: e,
                    a: i,
                    b: g.image,
                    period: g.shift.clone(),
                    period_f64: g.shift_f64,
                });
            }
        }
    }
    Ok(Epp {
        polygon: poly.clone(),
        images,
        glue,
        edge_pairs,
        parent,
        c: half,
    })
}

impl Epp {
    pub fn image_count(&self) -> usize {
        self.images.len()
    }

    /// Number of distinct segments carrying a copy of each side: internal
    /// edges are shared by two images, boundary edges are not.
    pub fn side_segment_counts(&self) -> Vec<usize> {
        let n = self.polygon.n();
        let mut counts = vec![0usize; n];
        for (i, row) in self.glue.iter().enumerate() {
            for (e, g) in row.iter().enumerate() {
                if !g.internal || i < g.image {
                    counts[e] += 1;
                }
            }
        }
        counts
    }

    /// Distinct simple periods up to sign.
    pub fn simple_periods(&self) -> Vec<FormalVector> {
        let mut out: Vec<FormalVector> = Vec::new();
        for p in &self.edge_pairs {
            let neg = p.period.neg();
            if !out.iter().any(|q| *q == p.period || *q == neg) {
                out.push(p.period.clone());
            }
        }
        out
    }

    /// Text dump: one line per image, then the boundary pairing table.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# images {} C {}", self.images.len(), self.c);
        let _ = writeln!(s, "# index rotation reflecting tx ty translation");
        for im in &self.images {
            let t = &im.iso.translation;
            let exact: Vec<String> = t.0.iter().map(|c| format!("[{c}]")).collect();
            let _ = writeln!(
                s,
                "{} {} {} {:.12} {:.12} {}",
                im.index + 1,
                im.iso.rotation,
                im.iso.reflecting as u8,
                im.translation_f64[0],
                im.translation_f64[1],
                exact.join(" ")
            );
        }
        let _ = writeln!(s, "# pairs side image_a image_b px py");
        for p in &self.edge_pairs {
            let _ = writeln!(
                s,
                "{} {} {} {:.12} {:.12}",
                p.side + 1,
                p.a + 1,
                p.b + 1,
                p.period_f64[0],
                p.period_f64[1]
            );
        }
        s
    }
}

/// Genus from the angles: g = 1 + (N/2)·Σ (p_k − 1)/q_k.
pub fn genus(poly: &Polygon) -> Result<usize> {
    let n = BigRational::from_integer(BigInt::from(poly.half_order()));
    let mut sum = BigRational::zero();
    for a in poly.angles() {
        sum += BigRational::new(BigInt::from(a.p() - 1), BigInt::from(a.q()));
    }
    let g = BigRational::from_integer(1.into()) + n * sum / BigRational::from_integer(2.into());
    if !g.is_integer() {
        return Err(Error::NonIntegerGenus(g.to_string()));
    }
    num_traits::ToPrimitive::to_usize(&g.to_integer())
        .ok_or_else(|| Error::NonIntegerGenus(g.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PeriodKind {
    /// A simple period realised by a channel of periodic orbits inside the EPP.
    SimpleInternal,
    /// A simple period whose straight segment cannot avoid the branch points.
    Structural,
    Compound,
}

impl PeriodKind {
    pub fn label(&self) -> &'static str {
        match self {
            PeriodKind::SimpleInternal => "simple-internal",
            PeriodKind::Structural => "structural",
            PeriodKind::Compound => "compound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Period {
    pub vector: FormalVector,
    pub value: ExactVector,
    pub kind: PeriodKind,
}

impl Period {
    pub fn approx(&self) -> [f64; 2] {
        self.value.approx()
    }
}

/// Homology basis of the glued EPP surface with its periods.
#[derive(Clone, Debug)]
pub struct PeriodBasis {
    pub genus: usize,
    pub periods: Vec<Period>,
    pub vertex_classes: usize,
    pub edges: usize,
    pub faces: usize,
}

impl PeriodBasis {
    /// Rank over Q of the period vectors in the plane for this polygon.
    pub fn planar_rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = self
            .periods
            .iter()
            .map(|p| p.value.value().coords())
            .collect();
        rational_rank(rows)
    }

    /// Rank over Q of the formal period vectors (family-wide relations).
    pub fn formal_rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = self.periods.iter().map(|p| p.vector.coords()).collect();
        rational_rank(rows)
    }
}

pub(crate) fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                for k in c..cols {
                    let sub = &rows[rank][k] * &f;
                    rows[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// 2g periods from a tree–cotree decomposition of the glued EPP: a
/// spanning tree of the vertex graph, a spanning tree of the face graph on
/// the remaining edges, and one homology cycle per leftover edge.
pub fn period_basis(epp: &Epp) -> Result<PeriodBasis> {
    let poly = &epp.polygon;
    let n = poly.n();
    let f = epp.images.len();
    let g = genus(poly)?;

    // vertex classes of corners (image, vertex)
    let mut corners = UnionFind::new(f * n);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, row) in epp.glue.iter().enumerate() {
        for (e, gl) in row.iter().enumerate() {
            let j = gl.image;
            corners.union(i * n + e, j * n + e);
            corners.union(i * n + (e + 1) % n, j * n + (e + 1) % n);
            if (i, e) < (j, e) {
                edges.push((i, e));
            }
        }
    }
    let mut class_id = HashMap::new();
    for c in 0..f * n {
        let r = corners.find(c);
        let next = class_id.len();
        class_id.entry(r).or_insert(next);
    }
    let v = class_id.len();
    let e_count = edges.len();
    let chi = v as i64 - e_count as i64 + f as i64;
    let found = (2 - chi).max(0) as usize;
    if found != 2 * g {
        return Err(Error::RankMismatch {
            found,
            expected: 2 * g,
        });
    }

    // primal spanning tree over vertex classes
    let mut vt = UnionFind::new(v);
    let mut in_tree = vec![false; e_count];
    for (k, &(i, e)) in edges.iter().enumerate() {
        let a = class_id[&corners.find(i * n + e)];
        let b = class_id[&corners.find(i * n + (e + 1) % n)];
        in_tree[k] = vt.union(a, b);
    }

    // dual spanning tree on the other edges, with developed shifts
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); f];
    for (k, &(i, e)) in edges.iter().enumerate() {
        if !in_tree[k] {
            adj[i].push((e, k));
            adj[epp.glue[i][e].image].push((e, k));
        }
    }
    let zero = FormalVector::zero(poly.field(), poly.formal_dim());
    let mut shift: Vec<Option<FormalVector>> = vec![None; f];
    let mut in_cotree = vec![false; e_count];
    shift[0] = Some(zero.clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for &(e, k) in &adj[i] {
            let gl = &epp.glue[i][e];
            let j = gl.image;
            if shift[j].is_none() {
                let s = shift[i].as_ref().unwrap().add(&gl.shift).reduce();
                shift[j] = Some(s);
                in_cotree[k] = true;
                queue.push_back(j);
            }
        }
    }
    if shift.iter().any(Option::is_none) {
        return Err(Error::RankMismatch {
            found: 0,
            expected: 2 * g,
        });
    }

    let simple = epp.simple_periods();
    let mut periods = Vec::new();
    for (k, &(i, e)) in edges.iter().enumerate() {
        if in_tree[k] || in_cotree[k] {
            continue;
        }
        let gl = &epp.glue[i][e];
        let vec = shift[i]
            .as_ref()
            .unwrap()
            .add(&gl.shift)
            .sub(shift[gl.image].as_ref().unwrap())
            .reduce();
        let neg = vec.neg();
        let kind = if simple.iter().any(|s| *s == vec || *s == neg) {
            PeriodKind::Structural
        } else {
            PeriodKind::Compound
        };
        periods.push(Period {
            value: poly.evaluate(&vec),
            vector: vec,
            kind,
        });
    }
    if periods.len() != 2 * g {
        return Err(Error::RankMismatch {
            found: periods.len(),
            expected: 2 * g,
        });
    }
    Ok(PeriodBasis {
        genus: g,
        periods,
        vertex_classes: v,
        edges: e_count,
        faces: f,
    })
}

/// A periodic orbit channel: a boundary pair whose period is realised by a
/// straight segment crossing only internal edges.
#[derive(Clone, Debug)]
pub struct Poc {
    pub pair: usize,
    pub period: FormalVector,
    pub period_f64: [f64; 2],
    pub direction: f64,
    /// Fraction of sampled starting points on the edge that close up.
    pub coverage: f64,
}

/// Traces the straight segment from `start` (on the boundary of `face`)
/// along `step`. Succeeds iff it crosses only internal edges, avoids
/// vertices and ends in `target_face`.
fn trace_internal(
    epp: &Epp,
    face: usize,
    start: [f64; 2],
    step: [f64; 2],
    target_face: usize,
    tol: f64,
) -> bool {
    let len = step[0].hypot(step[1]);
    let u = [step[0] / len, step[1] / len];
    let mut face = face;
    let mut p = start;
    let mut travelled = 0.0;
    for _ in 0..(4 * epp.images.len() + 8) {
        let im = &epp.images[face];
        let n = im.vertices.len();
        // nearest exit beyond the current point
        let mut best: Option<(f64, usize)> = None;
        for e in 0..n {
            let (a, b) = im.edge(e);
            if let Some(s) = ray_segment(p, u, a, b) {
                if s > tol && best.map_or(true, |(bs, _)| s < bs) {
                    best = Some((s, e));
                }
            }
        }
        let Some((s, e)) = best else {
            return false;
        };
        if travelled + s >= len - tol {
            return face == target_face && (travelled + s - len).abs() <= 10.0 * tol;
        }
        let q = [p[0] + s * u[0], p[1] + s * u[1]];
        if im
            .vertices
            .iter()
            .any(|v| (v[0] - q[0]).hypot(v[1] - q[1]) < 10.0 * tol)
        {
            return false;
        }
        let gl = &epp.glue[face][e];
        if !gl.internal {
            return false;
        }
        face = gl.image;
        p = q;
        travelled += s;
    }
    false
}

fn ray_segment(p: [f64; 2], u: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Option<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let den = u[0] * d[1] - u[1] * d[0];
    if den.abs() < 1e-14 {
        return None;
    }
    let w = [a[0] - p[0], a[1] - p[1]];
    let s = (w[0] * d[1] - w[1] * d[0]) / den;
    let t = (w[0] * u[1] - w[1] * u[0]) / den;
    (-1e-12..=1.0 + 1e-12).contains(&t).then_some(s)
}

/// Simple periods that carry a periodic orbit channel inside the EPP.
pub fn find_pocs(epp: &Epp, samples: usize) -> Vec<Poc> {
    let scale = {
        let (lo, hi) = epp.polygon.bounding_box();
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    };
    let tol = 1e-9 * scale.max(1.0);
    let mut out = Vec::new();
    for (k, pair) in epp.edge_pairs.iter().enumerate() {
        let p = pair.period_f64;
        let (a, b) = epp.images[pair.a].edge(pair.side);
        let mut hits = 0;
        for s in 0..samples {
            let t = (s as f64 + 0.5) / samples as f64;
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            // x on a's edge is the same surface point as x − P on b's edge
            let y = [x[0] - p[0], x[1] - p[1]];
            let nb = epp.images[pair.b].inward_normal(pair.side);
            let na = epp.images[pair.a].inward_normal(pair.side);
            let ok = if nb[0] * p[0] + nb[1] * p[1] > 0.0 {
                trace_internal(epp, pair.b, y, p, pair.a, tol)
            } else if na[0] * p[0] + na[1] * p[1] < 0.0 {
                trace_internal(epp, pair.a, x, [-p[0], -p[1]], pair.b, tol)
            } else {
                false
            };
            if ok {
                hits += 1;
            }
        }
        if hits > 0 {
            out.push(Poc {
                pair: k,
                period: pair.period.clone(),
                period_f64: p,
                direction: p[1].atan2(p[0]),
                coverage: hits as f64 / samples as f64,
            });
        }
    }
    out
}

/// Marks basis periods that coincide (up to sign) with a POC period as
/// simple-internal.
pub fn classify_periods(basis: &mut PeriodBasis, pocs: &[Poc]) {
    for p in &mut basis.periods {
        let neg = p.vector.neg();
        if pocs.iter().any(|c| c.period == p.vector || c.period == neg) {
            p.kind = PeriodKind::SimpleInternal;
        }
    }
}

/// Distance from `p` to the nearest EPP boundary edge (float helper).
pub fn distance_to_epp_boundary(epp: &Epp, p: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, row) in epp.glue.iter().enumerate() {
        for (e, g) in row.iter().enumerate() {
            if !g.internal {
                let (a, b) = epp.images[i].edge(e);
                best = best.min(segment_distance(p, a, b));
            }
        }
    }
    best
}
