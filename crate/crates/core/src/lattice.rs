//! Real and rational relations between periods and a chosen planar pair.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::contfrac::{best_convergent, best_rational};
use crate::cyclo::{wedge_i, Cyclo};
use crate::error::{Error, Result};
use crate::exactgeom::ExactVector;
use crate::unfold::{Period, PeriodBasis};

/// A real coefficient num/den, both real elements of Q(ζ) (here imaginary
/// ones, since they come from wedges, which does not affect the ratio).
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub num: Cyclo,
    pub den: Cyclo,
    pub value: f64,
    /// Exact value when the ratio is rational.
    pub rational: Option<BigRational>,
}

impl Coefficient {
    fn new(num: Cyclo, den: Cyclo) -> Coefficient {
        let rational = num.rational_ratio(&den);
        let value = match &rational {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => {
                let (a, b) = (num.to_complex(), den.to_complex());
                // both purely imaginary or both real
                if b.1.abs() > b.0.abs() {
                    a.1 / b.1
                } else {
                    a.0 / b.0
                }
            }
        };
        Coefficient {
            num,
            den,
            value,
            rational,
        }
    }

    fn floor(&self) -> BigInt {
        match &self.rational {
            Some(q) => q.floor().to_integer(),
            None => BigInt::from(self.value.floor() as i64),
        }
    }

    fn minus_integer(&self, k: &BigInt) -> Coefficient {
        let kq = BigRational::from_integer(k.clone());
        Coefficient {
            num: self.num.sub(&self.den.scale(&kq)),
            den: self.den.clone(),
            value: self.value - k.to_f64().unwrap_or(0.0),
            rational: self.rational.as_ref().map(|q| q - &kq),
        }
    }
}

/// D_k = a_k1·D1 + a_k2·D2 for every basis period outside the pair.
#[derive(Clone, Debug)]
pub struct Relation {
    pub k: usize,
    pub coeffs: [Coefficient; 2],
    /// Integer parts removed during reduction into [0, 1).
    pub shift: [BigInt; 2],
}

#[derive(Clone, Debug)]
pub struct RealRelations {
    pub pair: (usize, usize),
    pub d1: ExactVector,
    pub d2: ExactVector,
    pub relations: Vec<Relation>,
}

/// Rational data of a doubly rational polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRelations {
    /// (k, [p_k1/q_k1, p_k2/q_k2]) with reduced coefficients in [0, 1).
    pub coeffs: Vec<(usize, [BigRational; 2])>,
    pub c1: i64,
    pub c2: i64,
    /// True when rationality was inferred from floats rather than proved.
    pub heuristic: bool,
    /// True when irrational coefficients were replaced by approximants.
    pub approximated: bool,
}

impl RationalRelations {
    /// n_ki = C_i / q_ki.
    pub fn multipliers(&self) -> Vec<(usize, [i64; 2])> {
        self.coeffs
            .iter()
            .map(|(k, a)| {
                let n1 = self.c1 / a[0].denom().to_i64().unwrap_or(1);
                let n2 = self.c2 / a[1].denom().to_i64().unwrap_or(1);
                (*k, [n1, n2])
            })
            .collect()
    }
}

fn lcm_of<'a>(it: impl Iterator<Item = &'a BigRational>) -> i64 {
    it.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
        .to_i64()
        .unwrap_or(i64::MAX)
}

/// Default pair: the two smallest real-independent periods, ties broken by
/// coordinates.
pub fn default_pair(periods: &[Period]) -> Result<(usize, usize)> {
    let mut order: Vec<usize> = (0..periods.len()).collect();
    let key = |i: usize| {
        let a = periods[i].approx();
        (a[0].hypot(a[1]), a[0], a[1])
    };
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
    });
    for (x, &i) in order.iter().enumerate() {
        if periods[i].value.is_zero() {
            continue;
        }
        for &j in &order[x + 1..] {
            if !wedge_i(periods[i].value.value(), periods[j].value.value()).is_zero() {
                return Ok((i.min(j), i.max(j)));
            }
        }
    }
    Err(Error::DegeneratePair(0, 0))
}

/// Coefficients of every basis period in the chosen pair, reduced into [0, 1).
pub fn real_relations(basis: &PeriodBasis, pair: Option<(usize, usize)>) -> Result<RealRelations> {
    real_relations_of(
        &basis
            .periods
            .iter()
            .map(|p| p.value.clone())
            .collect::<Vec<_>>(),
        match pair {
            Some(p) => p,
            None => default_pair(&basis.periods)?,
        },
    )
}

/// Same as [`real_relations`] on an arbitrary list of vectors.
pub fn real_relations_of(vectors: &[ExactVector], pair: (usize, usize)) -> Result<RealRelations> {
    let (i, j) = pair;
    if i >= vectors.len() || j >= vectors.len() || i == j {
        return Err(Error::Invalid(format!("bad period pair ({i}, {j})")));
    }
    let d1 = vectors[i].clone();
    let d2 = vectors[j].clone();
    let w12 = wedge_i(d1.value(), d2.value());
    if w12.is_zero() {
        return Err(Error::DegeneratePair(i, j));
    }
    let mut relations = Vec::new();
    for (k, dk) in vectors.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let a1 = Coefficient::new(wedge_i(dk.value(), d2.value()), w12.clone());
        let a2 = Coefficient::new(wedge_i(d1.value(), dk.value()), w12.clone());
        let (f1, f2) = (a1.floor(), a2.floor());
        relations.push(Relation {
            k,
            coeffs: [a1.minus_integer(&f1), a2.minus_integer(&f2)],
            shift: [f1, f2],
        });
    }
    Ok(RealRelations {
        pair,
        d1,
        d2,
        relations,
    })
}

/// Rational relations iff every coefficient is exactly rational.
pub fn detect_drpb(rel: &RealRelations) -> Option<RationalRelations> {
    let mut coeffs = Vec::new();
    for r in &rel.relations {
        let a1 = r.coeffs[0].rational.clone()?;
        let a2 = r.coeffs[1].rational.clone()?;
        coeffs.push((r.k, [a1, a2]));
    }
    Some(finish(coeffs, false, false))
}

fn finish(
    coeffs: Vec<(usize, [BigRational; 2])>,
    heuristic: bool,
    approximated: bool,
) -> RationalRelations {
    let c1 = lcm_of(coeffs.iter().map(|(_, a)| &a[0]));
    let c2 = lcm_of(coeffs.iter().map(|(_, a)| &a[1]));
    RationalRelations {
        coeffs,
        c1,
        c2,
        heuristic,
        approximated,
    }
}

/// Float fallback: a coefficient counts as rational when a continued
/// fraction with denominator ≤ 10⁶ reproduces it to 1e-9. Flagged heuristic.
pub fn detect_drpb_float(rel: &RealRelations) -> Option<RationalRelations> {
    let mut coeffs = Vec::new();
    for r in &rel.relations {
        let mut pair = Vec::with_capacity(2);
        for c in &r.coeffs {
            let q = match &c.rational {
                Some(q) => q.clone(),
                None => {
                    let (p, d) = best_convergent(c.value, 1_000_000);
                    if (c.value - p as f64 / d as f64).abs() >= 1e-9 {
                        return None;
                    }
                    BigRational::new(p.into(), d.into())
                }
            };
            pair.push(q);
        }
        let a2 = pair.pop().unwrap();
        let a1 = pair.pop().unwrap();
        coeffs.push((r.k, [a1, a2]));
    }
    Some(finish(coeffs, true, false))
}

/// Replaces irrational coefficients by their best approximation of the
/// second kind with q ≤ `max_den` (the last convergent), which guarantees
/// |a − p/q| ≤ 1/(q·Q). Rational coefficients pass through unchanged.
pub fn rationalize_relations(rel: &RealRelations, max_den: i64) -> Result<RationalRelations> {
    if max_den < 2 {
        return Err(Error::Invalid("denominator cap must be at least 2".into()));
    }
    let mut approximated = false;
    let coeffs = rel
        .relations
        .iter()
        .map(|r| {
            let mut pick = |c: &Coefficient| match &c.rational {
                Some(q) => q.clone(),
                None => {
                    approximated = true;
                    rationalize_value(c.value, max_den)
                }
            };
            let a1 = pick(&r.coeffs[0]);
            let a2 = pick(&r.coeffs[1]);
            (r.k, [a1, a2])
        })
        .collect();
    Ok(finish(coeffs, false, approximated))
}

/// Approximant used by [`rationalize_relations`] for a single real value.
pub fn rationalize_value(x: f64, max_den: i64) -> BigRational {
    let (p, q) = best_convergent(x, max_den);
    BigRational::new(p.into(), q.into())
}

/// Closest fraction (first kind), offered for comparison in reports.
pub fn closest_fraction(x: f64, max_den: i64) -> BigRational {
    let (p, q) = best_rational(x, max_den);
    BigRational::new(p.into(), q.into())
}

/// D = r1·(D1/C1) + r2·(D2/C2) with integer r_i.
pub fn reduce_period(
    d: &ExactVector,
    rel: &RealRelations,
    rational: &RationalRelations,
) -> Result<(BigInt, BigInt)> {
    let w12 = wedge_i(rel.d1.value(), rel.d2.value());
    let a1 = wedge_i(d.value(), rel.d2.value())
        .rational_ratio(&w12)
        .or_else(|| {
            wedge_i(d.value(), rel.d2.value())
                .is_zero()
                .then(BigRational::zero)
        })
        .ok_or(Error::NotInLattice)?;
    let a2 = wedge_i(rel.d1.value(), d.value())
        .rational_ratio(&w12)
        .or_else(|| {
            wedge_i(rel.d1.value(), d.value())
                .is_zero()
                .then(BigRational::zero)
        })
        .ok_or(Error::NotInLattice)?;
    let r1 = a1 * BigRational::from_integer(rational.c1.into());
    let r2 = a2 * BigRational::from_integer(rational.c2.into());
    if !r1.is_integer() || !r2.is_integer() {
        return Err(Error::NotInLattice);
    }
    Ok((r1.to_integer(), r2.to_integer()))
}

/// Everything the quantizer needs about a period lattice.
#[derive(Clone, Debug)]
pub struct PeriodLattice {
    pub periods: Vec<ExactVector>,
    pub relations: RealRelations,
    pub rational: Option<RationalRelations>,
}

impl PeriodLattice {
    pub fn new(periods: Vec<ExactVector>, pair: (usize, usize)) -> Result<PeriodLattice> {
        let relations = real_relations_of(&periods, pair)?;
        let rational = detect_drpb(&relations);
        Ok(PeriodLattice {
            periods,
            relations,
            rational,
        })
    }

    pub fn from_basis(basis: &PeriodBasis, pair: Option<(usize, usize)>) -> Result<PeriodLattice> {
        let pair = match pair {
            Some(p) => p,
            None => default_pair(&basis.periods)?,
        };
        PeriodLattice::new(
            basis.periods.iter().map(|p| p.value.clone()).collect(),
            pair,
        )
    }

    /// Re-express the lattice on another pair of its periods.
    pub fn with_pair(&self, pair: (usize, usize)) -> Result<PeriodLattice> {
        PeriodLattice::new(self.periods.clone(), pair)
    }

    /// Uses two new vectors (typically integer combinations of periods)
    /// as the pair; the existing periods still fix C1 and C2.
    pub fn with_pair_vectors(&self, d1: ExactVector, d2: ExactVector) -> Result<PeriodLattice> {
        let mut periods = self.periods.clone();
        let k = periods.len();
        periods.push(d1);
        periods.push(d2);
        PeriodLattice::new(periods, (k, k + 1))
    }

    /// The lattice generated by all periods, as a pair of generators with
    /// C1 = C2 = 1. Independent of the pair choice; requires rational
    /// relations.
    pub fn full_lattice(&self) -> Result<PeriodLattice> {
        if self.rational.is_none() {
            return Err(Error::NotDoublyRational);
        }
        let w12 = wedge_i(self.relations.d1.value(), self.relations.d2.value());
        let mut coords = Vec::new();
        for p in &self.periods {
            let a1 = wedge_i(p.value(), self.relations.d2.value());
            let a2 = wedge_i(self.relations.d1.value(), p.value());
            let r = |c: Cyclo| {
                if c.is_zero() {
                    Some(BigRational::zero())
                } else {
                    c.rational_ratio(&w12)
                }
            };
            coords.push([
                r(a1).ok_or(Error::NotDoublyRational)?,
                r(a2).ok_or(Error::NotDoublyRational)?,
            ]);
        }
        let den = coords
            .iter()
            .flat_map(|c| c.iter())
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let denq = BigRational::from_integer(den.clone());
        let ints: Vec<[BigInt; 2]> = coords
            .iter()
            .map(|c| [(&c[0] * &denq).to_integer(), (&c[1] * &denq).to_integer()])
            .collect();
        let [h1, h2] = hermite_2d(ints);
        let gen = |h: &[BigInt; 2]| {
            let x = BigRational::new(h[0].clone(), den.clone());
            let y = BigRational::new(h[1].clone(), den.clone());
            ExactVector::new(
                self.relations
                    .d1
                    .value()
                    .scale(&x)
                    .add(&self.relations.d2.value().scale(&y)),
            )
        };
        PeriodLattice::new(vec![gen(&h1), gen(&h2)], (0, 1))
    }

    /// Adds rational approximants for irrational relations.
    pub fn rationalized(mut self, max_den: i64) -> Result<PeriodLattice> {
        if self.rational.is_none() {
            self.rational = Some(rationalize_relations(&self.relations, max_den)?);
        }
        Ok(self)
    }

    pub fn is_doubly_rational(&self) -> bool {
        self.rational
            .as_ref()
            .is_some_and(|r| !r.approximated && !r.heuristic)
    }

    pub fn d1(&self) -> [f64; 2] {
        self.relations.d1.approx()
    }

    pub fn d2(&self) -> [f64; 2] {
        self.relations.d2.approx()
    }

    pub fn c(&self) -> Result<(i64, i64)> {
        self.rational
            .as_ref()
            .map(|r| (r.c1, r.c2))
            .ok_or(Error::NotDoublyRational)
    }

    /// Generators D1/C1 and D2/C2 as floats.
    pub fn generators(&self) -> Result<[[f64; 2]; 2]> {
        let (c1, c2) = self.c()?;
        let (d1, d2) = (self.d1(), self.d2());
        Ok([
            [d1[0] / c1 as f64, d1[1] / c1 as f64],
            [d2[0] / c2 as f64, d2[1] / c2 as f64],
        ])
    }

    /// Text report: periods, a_ki table, verdict, C1/C2.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let (i, j) = self.relations.pair;
        for (k, p) in self.periods.iter().enumerate() {
            let a = p.approx();
            let tag = if k == i {
                " (D1)"
            } else if k == j {
                " (D2)"
            } else {
                ""
            };
            let _ = writeln!(s, "D{} = ({:.12}, {:.12}){}", k + 1, a[0], a[1], tag);
        }
        // a_k reduced into [0, 1); int_k holds the integer parts removed.
        let _ = writeln!(s, "k,a_k1,a_k2,exact_k1,exact_k2,int_k1,int_k2");
        for r in &self.relations.relations {
            let ex = |c: &Coefficient| {
                c.rational
                    .as_ref()
                    .map_or("irrational".to_string(), |q| q.to_string())
            };
            let _ = writeln!(
                s,
                "{},{:.12},{:.12},{},{},{},{}",
                r.k + 1,
                r.coeffs[0].value,
                r.coeffs[1].value,
                ex(&r.coeffs[0]),
                ex(&r.coeffs[1]),
                r.shift[0],
                r.shift[1]
            );
        }
        match &self.rational {
            Some(r) if r.approximated => {
                let _ = writeln!(s, "DRPB=no (rationalized: C1={}, C2={})", r.c1, r.c2);
            }
            Some(r) if r.heuristic => {
                let _ = writeln!(s, "DRPB=yes (heuristic) C1={} C2={}", r.c1, r.c2);
            }
            Some(r) => {
                let _ = writeln!(s, "DRPB=yes C1={} C2={}", r.c1, r.c2);
            }
            None => {
                let _ = writeln!(s, "DRPB=no (irrational relations)");
            }
        }
        s
    }
}

/// Z-basis (upper triangular) of the lattice spanned by integer vectors of
/// full rank 2.
fn hermite_2d(mut rows: Vec<[BigInt; 2]>) -> [[BigInt; 2]; 2] {
    rows.retain(|r| !(r[0].is_zero() && r[1].is_zero()));
    loop {
        let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][0].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let p = *nz
            .iter()
            .min_by_key(|&&i| rows[i][0].magnitude().clone())
            .unwrap();
        for &i in &nz {
            if i != p {
                let f = rows[i][0].div_floor(&rows[p][0]);
                let (a, b) = (&rows[p][0] * &f, &rows[p][1] * &f);
                rows[i][0] -= a;
                rows[i][1] -= b;
            }
        }
    }
    let h1 = rows
        .iter()
        .find(|r| !r[0].is_zero())
        .cloned()
        .expect("periods span the plane");
    let g = rows
        .iter()
        .filter(|r| r[0].is_zero())
        .fold(BigInt::zero(), |acc, r| acc.gcd(&r[1]));
    [h1, [BigInt::zero(), g]]
}
