//! Momentum and energy quantization on a period lattice (ħ = m = 1).

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cyclo::{dot, wedge_i};
use crate::error::{Error, Result};
use crate::exactgeom::ExactVector;
use crate::lattice::PeriodLattice;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SkeletonKind {
    ClassicalAperiodic,
    ClassicalPeriodic,
    Quantum,
}

impl SkeletonKind {
    pub fn label(&self) -> &'static str {
        match self {
            SkeletonKind::ClassicalAperiodic => "aperiodic",
            SkeletonKind::ClassicalPeriodic => "periodic",
            SkeletonKind::Quantum => "quantum",
        }
    }

    pub fn parse(s: &str) -> Option<SkeletonKind> {
        match s.trim() {
            "aperiodic" | "classical-aperiodic" => Some(SkeletonKind::ClassicalAperiodic),
            "periodic" | "classical-periodic" => Some(SkeletonKind::ClassicalPeriodic),
            "quantum" => Some(SkeletonKind::Quantum),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantizedMomentum {
    pub m: i64,
    pub n: i64,
    pub vector: [f64; 2],
    pub kind: SkeletonKind,
    /// Transverse-to-longitudinal ratio for quantum momenta.
    pub ratio: Option<f64>,
    /// Set when the small-transverse condition is violated.
    pub flagged: bool,
}

impl QuantizedMomentum {
    pub fn energy(&self) -> f64 {
        0.5 * (self.vector[0] * self.vector[0] + self.vector[1] * self.vector[1])
    }

    pub fn norm(&self) -> f64 {
        self.vector[0].hypot(self.vector[1])
    }
}

fn dotf(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn crossf(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Solves p·D1 = 2πmC1, p·D2 = 2πnC2.
pub fn momentum_aperiodic(lat: &PeriodLattice, m: i64, n: i64) -> Result<QuantizedMomentum> {
    let (c1, c2) = lat.c()?;
    if m == 0 && n == 0 {
        return Err(Error::Invalid("(m, n) = (0, 0) carries no momentum".into()));
    }
    let (d1, d2) = (lat.d1(), lat.d2());
    let cross2 = crossf(d1, d2).powi(2);
    let (a, b) = ((m * c1) as f64, (n * c2) as f64);
    let k1 = TWO_PI * (a * dotf(d2, d2) - b * dotf(d1, d2)) / cross2;
    let k2 = TWO_PI * (b * dotf(d1, d1) - a * dotf(d1, d2)) / cross2;
    Ok(QuantizedMomentum {
        m,
        n,
        vector: [k1 * d1[0] + k2 * d2[0], k1 * d1[1] + k2 * d2[1]],
        kind: SkeletonKind::ClassicalAperiodic,
        ratio: None,
        flagged: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSkeletonData {
    /// C2·(D2·D1) = k·C1·|D2|².
    pub k: i64,
    /// Angle between D1 and D2.
    pub alpha: f64,
    pub pair: (usize, usize),
}

/// Some(k) iff C2·(D2·D1) = k·C1·|D2|² holds exactly for an integer k.
pub fn periodic_skeleton_check(lat: &PeriodLattice) -> Option<PeriodicSkeletonData> {
    let (c1, c2) = lat.c().ok()?;
    let d1 = lat.relations.d1.value();
    let d2 = lat.relations.d2.value();
    let num = dot(d2, d1);
    let den = dot(d2, d2);
    let ratio = if num.is_zero() {
        BigRational::zero()
    } else {
        num.rational_ratio(&den)?
    };
    let k = ratio * BigRational::new(c2.into(), c1.into());
    if !k.is_integer() {
        return None;
    }
    let (a, b) = (lat.d1(), lat.d2());
    let alpha = crossf(a, b).abs().atan2(dotf(a, b));
    Some(PeriodicSkeletonData {
        k: k.to_integer().to_i64()?,
        alpha,
        pair: lat.relations.pair,
    })
}

/// p = 2πnC2·D2/|D2|².
pub fn momentum_periodic(
    lat: &PeriodLattice,
    data: &PeriodicSkeletonData,
    n: i64,
) -> Result<QuantizedMomentum> {
    if data.pair != lat.relations.pair || periodic_skeleton_check(lat).as_ref() != Some(data) {
        return Err(Error::NotPeriodicSkeleton);
    }
    if n == 0 {
        return Err(Error::Invalid("periodic momentum needs n ≠ 0".into()));
    }
    let (_, c2) = lat.c()?;
    let d2 = lat.d2();
    let s = TWO_PI * (n * c2) as f64 / dotf(d2, d2);
    Ok(QuantizedMomentum {
        m: data.k * n,
        n,
        vector: [s * d2[0], s * d2[1]],
        kind: SkeletonKind::ClassicalPeriodic,
        ratio: None,
        flagged: false,
    })
}

/// Periodic momentum along a POC period D_l = (p_l/q_l)·D2, using
/// C_l = C2·p_l/q_l: p = 2πnC_l·D_l/|D_l|².
pub fn poc_momentum(
    lat: &PeriodLattice,
    data: &PeriodicSkeletonData,
    poc: &ExactVector,
    n: i64,
) -> Result<QuantizedMomentum> {
    let base = momentum_periodic(lat, data, n)?;
    let ratio = poc
        .value()
        .rational_ratio(lat.relations.d2.value())
        .ok_or_else(|| Error::Invalid("POC period is not a rational multiple of D2".into()))?;
    let (_, c2) = lat.c()?;
    let cl = ratio.abs() * BigRational::from_integer(c2.into());
    if !cl.is_integer() {
        return Err(Error::NotInLattice);
    }
    let cl = cl.to_integer().to_i64().ok_or(Error::NotInLattice)? as f64;
    let d = poc.approx();
    let sign = if ratio < BigRational::zero() {
        -1.0
    } else {
        1.0
    };
    let s = sign * TWO_PI * n as f64 * cl / dotf(d, d);
    Ok(QuantizedMomentum {
        vector: [s * d[0], s * d[1]],
        ..base
    })
}

/// Quantum momentum with longitudinal part p_n^per along D2 and transverse
/// part √(2E_{0,m}) fixed by √(2E_{0,m})·|D1|·sin α = 2mπC1. A negative m
/// selects the opposite transverse sign.
pub fn quantum_momentum(
    lat: &PeriodLattice,
    data: &PeriodicSkeletonData,
    m: i64,
    n: i64,
    max_ratio: f64,
) -> Result<QuantizedMomentum> {
    let per = momentum_periodic(lat, data, n)?;
    let (c1, _) = lat.c()?;
    let d1 = lat.d1();
    let d2 = lat.d2();
    let l2 = d2[0].hypot(d2[1]);
    let transverse = TWO_PI * (m * c1) as f64 / (d1[0].hypot(d1[1]) * data.alpha.sin());
    // unit normal to D2 on the side of D1
    let mut nrm = [-d2[1] / l2, d2[0] / l2];
    if dotf(nrm, d1) < 0.0 {
        nrm = [-nrm[0], -nrm[1]];
    }
    let ratio = transverse.abs() / per.norm();
    Ok(QuantizedMomentum {
        m,
        n,
        vector: [
            per.vector[0] + transverse * nrm[0],
            per.vector[1] + transverse * nrm[1],
        ],
        kind: SkeletonKind::Quantum,
        ratio: Some(ratio),
        flagged: ratio > max_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub m: i64,
    pub n: i64,
    pub energy: f64,
    pub kind: SkeletonKind,
    pub degeneracy: usize,
    /// All (m, n) labels merged into this level.
    pub labels: Vec<(i64, i64)>,
    pub flagged: bool,
    pub momentum: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Largest transverse/longitudinal ratio before a quantum level is flagged.
    pub max_ratio: f64,
    /// Relative tolerance for merging degenerate levels.
    pub merge_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            max_ratio: 0.2,
            merge_tol: 1e-9,
        }
    }
}

fn label_bounds(lat: &PeriodLattice, emax: f64) -> Result<(i64, i64)> {
    let (c1, c2) = lat.c()?;
    let pmax = (2.0 * emax).sqrt();
    let (d1, d2) = (lat.d1(), lat.d2());
    let m = (pmax * d1[0].hypot(d1[1]) / (TWO_PI * c1 as f64)).floor() as i64 + 1;
    let n = (pmax * d2[0].hypot(d2[1]) / (TWO_PI * c2 as f64)).floor() as i64 + 1;
    Ok((m, n))
}

fn merge(mut raw: Vec<QuantizedMomentum>, tol: f64) -> Vec<SpectrumEntry> {
    raw.sort_by(|a, b| {
        a.energy()
            .total_cmp(&b.energy())
            .then(a.kind.cmp(&b.kind))
            .then((a.m, a.n).cmp(&(b.m, b.n)))
    });
    let mut out: Vec<SpectrumEntry> = Vec::new();
    for q in raw {
        let e = q.energy();
        if let Some(last) = out
            .iter_mut()
            .rev()
            .take_while(|l| (l.energy - e).abs() <= tol * e.abs().max(1e-300))
            .find(|l| l.kind == q.kind)
        {
            last.degeneracy += 1;
            last.labels.push((q.m, q.n));
            last.flagged |= q.flagged;
            continue;
        }
        out.push(SpectrumEntry {
            m: q.m,
            n: q.n,
            energy: e,
            kind: q.kind,
            degeneracy: 1,
            labels: vec![(q.m, q.n)],
            flagged: q.flagged,
            momentum: q.vector,
        });
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.kind.cmp(&b.kind)));
    out
}

/// All levels with E ≤ `emax` for the requested skeleton kinds, merged
/// within each kind by energy and sorted ascending.
pub fn spectrum(
    lat: &PeriodLattice,
    emax: f64,
    kinds: &[SkeletonKind],
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumEntry>> {
    if !(emax > 0.0) {
        return Err(Error::Invalid("E_max must be positive".into()));
    }
    lat.c()?;
    let (bm, bn) = label_bounds(lat, emax)?;
    let skeleton = periodic_skeleton_check(lat);
    let mut raw = Vec::new();
    for &kind in kinds {
        match kind {
            SkeletonKind::ClassicalAperiodic => {
                for m in -bm..=bm {
                    for n in -bn..=bn {
                        if m == 0 && n == 0 {
                            continue;
                        }
                        let q = momentum_aperiodic(lat, m, n)?;
                        if q.energy() <= emax * (1.0 + opts.merge_tol) {
                            raw.push(q);
                        }
                    }
                }
            }
            SkeletonKind::ClassicalPeriodic => {
                let Some(data) = &skeleton else { continue };
                for n in (-bn..=bn).filter(|&n| n != 0) {
                    let q = momentum_periodic(lat, data, n)?;
                    if q.energy() <= emax * (1.0 + opts.merge_tol) {
                        raw.push(q);
                    }
                }
            }
            SkeletonKind::Quantum => {
                let Some(data) = &skeleton else { continue };
                // transverse momenta are bounded like the aperiodic ones
                let bm_q = (bm as f64 / data.alpha.sin().max(1e-12)).ceil() as i64 + 1;
                for m in -bm_q..=bm_q {
                    for n in (-bn..=bn).filter(|&n| n != 0) {
                        let q = quantum_momentum(lat, data, m, n, opts.max_ratio)?;
                        if q.energy() <= emax * (1.0 + opts.merge_tol) {
                            raw.push(q);
                        }
                    }
                }
            }
        }
    }
    Ok(merge(raw, opts.merge_tol))
}

pub fn spectrum_csv(levels: &[SpectrumEntry]) -> String {
    let mut s = String::from("level_index,m,n,kind,energy,degeneracy,flag\n");
    for (i, l) in levels.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.12e},{},{}",
            i + 1,
            l.m,
            l.n,
            l.kind.label(),
            l.energy,
            l.degeneracy,
            if l.flagged { "ratio" } else { "" }
        );
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct WavelengthRow {
    pub period: usize,
    pub length: f64,
    /// 2π/|p·D̂|; infinite when p ⟂ D.
    pub wavelength: f64,
    /// |D|/λ = |p·D|/2π.
    pub count: f64,
    pub integer: bool,
    /// r1·m + r2·n from D = r1·D1/C1 + r2·D2/C2, when available.
    pub law_count: Option<i64>,
}

/// Checks that every period holds an integer number of wavelengths.
pub fn wavelength_report(lat: &PeriodLattice, p: &QuantizedMomentum) -> Vec<WavelengthRow> {
    let w12 = wedge_i(lat.relations.d1.value(), lat.relations.d2.value());
    lat.periods
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let a = d.approx();
            let len = a[0].hypot(a[1]);
            let proj = dotf(p.vector, a).abs() / len;
            let count = dotf(p.vector, a).abs() / TWO_PI;
            let law = lat.rational.as_ref().and_then(|r| {
                if p.kind != SkeletonKind::ClassicalAperiodic {
                    return None;
                }
                let coef = |c: crate::cyclo::Cyclo| {
                    if c.is_zero() {
                        Some(BigRational::zero())
                    } else {
                        c.rational_ratio(&w12)
                    }
                };
                let a1 = coef(wedge_i(d.value(), lat.relations.d2.value()))?;
                let a2 = coef(wedge_i(lat.relations.d1.value(), d.value()))?;
                let r1 = (a1 * BigRational::from_integer(r.c1.into()))
                    .to_integer()
                    .to_i64()?;
                let r2 = (a2 * BigRational::from_integer(r.c2.into()))
                    .to_integer()
                    .to_i64()?;
                Some((r1 * p.m + r2 * p.n).abs())
            });
            WavelengthRow {
                period: k,
                length: len,
                wavelength: if proj > 0.0 {
                    TWO_PI / proj
                } else {
                    f64::INFINITY
                },
                count,
                integer: (count - count.round()).abs() <= 1e-9 * count.max(1.0),
                law_count: law,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{Cyclo, Field};
    use crate::shapes;
    use crate::unfold::{build_epp, period_basis};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn square_lattice() -> PeriodLattice {
        let f = Field::get(2);
        let two = Cyclo::from_integer(&f, 2);
        PeriodLattice::new(
            vec![
                ExactVector::new(two.clone()),
                ExactVector::new(two.mul_zeta(1)),
            ],
            (0, 1),
        )
        .unwrap()
    }

    #[test]
    fn square_ground_channel() {
        let lat = square_lattice();
        let p = momentum_aperiodic(&lat, 1, 1).unwrap();
        let pi = std::f64::consts::PI;
        assert!((p.vector[0] - pi).abs() < 1e-12 && (p.vector[1] - pi).abs() < 1e-12);
        assert!((p.energy() - pi * pi).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_pair_has_k_zero() {
        let lat = square_lattice();
        let d = periodic_skeleton_check(&lat).unwrap();
        assert_eq!(d.k, 0);
        let p = momentum_periodic(&lat, &d, 1).unwrap();
        assert!(p.vector[0].abs() < 1e-12);
        assert!((p.vector[1] - std::f64::consts::PI).abs() < 1e-12);
        let q0 = quantum_momentum(&lat, &d, 0, 1, 0.2).unwrap();
        assert_eq!(q0.vector, p.vector);
        let q1 = quantum_momentum(&lat, &d, 1, 1, 0.2).unwrap();
        assert!(q1.flagged);
    }

    #[test]
    fn skew_irrational_pair_has_no_skeleton() {
        // D1 = 1, D2 = ζ with ζ = e^{iπ/5}: D2·D1/|D2|² = cos(π/5) is irrational
        let f = Field::get(5);
        let one = Cyclo::one(&f);
        let lat = PeriodLattice::new(
            vec![
                ExactVector::new(one.clone()),
                ExactVector::new(one.mul_zeta(1)),
            ],
            (0, 1),
        )
        .unwrap();
        assert!(periodic_skeleton_check(&lat).is_none());
    }

    #[test]
    fn quantized_momenta_hold_integer_wavelengths() {
        let poly = shapes::pi3_parallelogram(&q(3, 5)).unwrap();
        let basis = period_basis(&build_epp(&poly).unwrap()).unwrap();
        let lat = PeriodLattice::from_basis(&basis, None).unwrap();
        for (m, n) in [(1, 1), (2, -1), (0, 3)] {
            let p = momentum_aperiodic(&lat, m, n).unwrap();
            for row in wavelength_report(&lat, &p) {
                assert!(row.integer, "{row:?}");
                assert_eq!(Some(row.count.round() as i64), row.law_count);
            }
        }
        let mut bad = momentum_aperiodic(&lat, 1, 1).unwrap();
        bad.vector[0] *= 1.01;
        assert!(wavelength_report(&lat, &bad).iter().any(|r| !r.integer));
    }

    #[test]
    fn spectrum_is_sorted_and_merged() {
        let lat = square_lattice();
        let s = spectrum(
            &lat,
            60.0,
            &[SkeletonKind::ClassicalAperiodic],
            &SpectrumOptions::default(),
        )
        .unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        // E = (π²/2)(m² + n²): levels 1, 2, 4, 5, 8, 9, 10 in units of π²/2
        let units: Vec<i64> = s
            .iter()
            .map(|e| (e.energy / (pi2 / 2.0)).round() as i64)
            .collect();
        assert_eq!(units, vec![1, 2, 4, 5, 8, 9, 10]);
        assert_eq!(s[0].degeneracy, 4);
        assert!(s.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    fn parallelogram(p: i64, qq: i64) -> PeriodLattice {
        let poly = shapes::pi3_parallelogram(&q(qq, p)).unwrap();
        let basis = period_basis(&build_epp(&poly).unwrap()).unwrap();
        PeriodLattice::from_basis(&basis, None).unwrap()
    }

    #[test]
    fn parallelogram_closed_form_momentum() {
        for (p, qq) in [(1, 1), (3, 2), (5, 3)] {
            let lat = parallelogram(p, qq);
            assert_eq!(lat.c().unwrap(), (qq, qq));
            let (d1, d2) = (lat.d1(), lat.d2());
            let s = 4.0 * std::f64::consts::PI * (p * p) as f64 / (9.0 * qq as f64);
            for (m, n) in [(1, 1), (1, 0), (2, -3), (-4, 7)] {
                let got = momentum_aperiodic(&lat, m, n).unwrap().vector;
                let (a, b) = ((2 * m - n) as f64, (2 * n - m) as f64);
                let want = [s * (a * d1[0] + b * d2[0]), s * (a * d1[1] + b * d2[1])];
                for i in 0..2 {
                    assert!((got[i] - want[i]).abs() < 1e-9 * (1.0 + want[i].abs()));
                }
            }
        }
    }

    #[test]
    fn rotated_pair_is_perpendicular_and_k0_spectra_agree() {
        let lat = parallelogram(3, 2);
        let (a, b) = (&lat.relations.d1, &lat.relations.d2);
        let rot = lat.with_pair_vectors(a.sub(b), a.add(b)).unwrap();
        let data = periodic_skeleton_check(&rot).unwrap();
        assert_eq!(data.k, 0);
        assert!((data.alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // every emitted momentum is a genuine lattice momentum
        let p = momentum_periodic(&rot, &data, 1).unwrap();
        for d in &rot.periods {
            let x = dotf(p.vector, d.approx()) / TWO_PI;
            assert!((x - x.round()).abs() < 1e-9);
        }
        let opts = SpectrumOptions {
            max_ratio: f64::INFINITY,
            ..Default::default()
        };
        let emax = 400.0;
        let energies = |kind| -> Vec<f64> {
            let mut v: Vec<f64> = spectrum(&rot, emax, &[kind], &opts)
                .unwrap()
                .iter()
                .flat_map(|e| {
                    let labels = e.labels.iter().filter(|l| l.1 != 0).count();
                    std::iter::repeat(e.energy).take(labels)
                })
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let ap = energies(SkeletonKind::ClassicalAperiodic);
        let qu = energies(SkeletonKind::Quantum);
        assert!(!ap.is_empty());
        assert_eq!(ap.len(), qu.len());
        for (x, y) in ap.iter().zip(&qu) {
            assert!((x - y).abs() < 1e-9 * x);
        }
    }

    #[test]
    fn broken_rectangle_levels() {
        // periods (2x1, 0), (2x2, 0), (0, 2y1), (0, 2y2) for x1=y1=1, x2=y2=2... scaled
        let f = Field::get(2);
        let v = |x: i64, y: i64| {
            ExactVector::new(
                Cyclo::from_integer(&f, x).add(&Cyclo::from_integer(&f, y).mul_zeta(1)),
            )
        };
        let (x1, y1) = (2, 1);
        let lat =
            PeriodLattice::new(vec![v(2 * x1, 0), v(0, 2 * y1), v(3, 0), v(0, 5)], (0, 1)).unwrap();
        let (cx, cy) = lat.c().unwrap();
        assert_eq!((cx, cy), (4, 2));
        let pi = std::f64::consts::PI;
        for (m, n) in [(1, 1), (2, 3), (-1, 4)] {
            let p = momentum_aperiodic(&lat, m, n).unwrap();
            let px = pi * (m * cx) as f64 / x1 as f64;
            let py = pi * (n * cy) as f64 / y1 as f64;
            assert!((p.vector[0] - px).abs() < 1e-9 && (p.vector[1] - py).abs() < 1e-9);
            let e = 0.5 * pi * pi * ((m * cx) as f64 / x1 as f64).powi(2)
                + 0.5 * pi * pi * ((n * cy) as f64 / y1 as f64).powi(2);
            assert!((p.energy() - e).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn poc_momentum_matches_periodic() {
        let lat = square_lattice();
        let data = periodic_skeleton_check(&lat).unwrap();
        let f = Field::get(2);
        // D_l = 3·D2, C_l = 3
        let dl = ExactVector::new(Cyclo::from_integer(&f, 6).mul_zeta(1));
        let a = poc_momentum(&lat, &data, &dl, 2).unwrap();
        // (3/2)·D2 needs q_l = 2 to divide C2 = 1
        let half = ExactVector::new(Cyclo::from_integer(&f, 3).mul_zeta(1));
        assert!(matches!(
            poc_momentum(&lat, &data, &half, 1),
            Err(Error::NotInLattice)
        ));
        let b = momentum_periodic(&lat, &data, 2).unwrap();
        assert!((a.vector[1] - b.vector[1]).abs() < 1e-12 && a.vector[0].abs() < 1e-12);
    }
}
