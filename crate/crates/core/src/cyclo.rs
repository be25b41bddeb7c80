//! Exact arithmetic in the cyclotomic field Q(ζ) with ζ = e^{iπ/N}.
//!
//! Every vertex, translation and period of an unfolded rational polygon is a
//! rational combination of powers of ζ, where N is the lcm of the angle
//! denominators. Elements are stored in the redundant negacyclic basis
//! ζ^0..ζ^{N-1} (using ζ^N = -1), which makes rotations and complex
//! conjugation cheap index permutations. Equality and hashing go through the
//! canonical form, the remainder modulo the cyclotomic polynomial Φ_{2N}.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The field Q(e^{iπ/N}) together with its reduction data.
#[derive(Debug)]
pub struct Field {
    n: usize,
    degree: usize,
    /// Nonzero coefficients (power, coefficient) of Φ_{2N} below the leading term.
    modulus: Vec<(usize, i64)>,
    cos_sin: Vec<(f64, f64)>,
}

impl Field {
    /// Returns the shared field for half-order `n` (ζ is a primitive 2n-th root).
    pub fn get(n: usize) -> Arc<Field> {
        assert!(n >= 1, "cyclotomic half-order must be positive");
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Field>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("field cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Field::build(n)))
            .clone()
    }

    fn build(n: usize) -> Field {
        let phi = cyclotomic_poly(2 * n);
        let degree = phi.len() - 1;
        let modulus = phi[..degree]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let cos_sin = (0..n)
            .map(|j| {
                let t = std::f64::consts::PI * j as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        Field {
            n,
            degree,
            modulus,
            cos_sin,
        }
    }

    /// N, so that ζ = e^{iπ/N}.
    pub fn half_order(&self) -> usize {
        self.n
    }

    /// Degree of the field over Q, φ(2N).
    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Integer coefficients of Φ_m, lowest power first.
pub fn cyclotomic_poly(m: usize) -> Vec<i64> {
    fn rec(m: usize, memo: &mut HashMap<usize, Vec<i64>>) -> Vec<i64> {
        if let Some(p) = memo.get(&m) {
            return p.clone();
        }
        // x^m - 1 divided by Φ_d for every proper divisor d
        let mut num = vec![0i64; m + 1];
        num[0] = -1;
        num[m] = 1;
        for d in 1..m {
            if m % d == 0 {
                let den = rec(d, memo);
                num = poly_div_exact(&num, &den);
            }
        }
        memo.insert(m, num.clone());
        num
    }
    let mut memo = HashMap::new();
    rec(m, &mut memo)
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    debug_assert!(lead == 1);
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// An element of Q(ζ).
#[derive(Clone)]
pub struct Cyclo {
    field: Arc<Field>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclo {
    pub fn zero(field: &Arc<Field>) -> Self {
        Cyclo {
            field: field.clone(),
            num: vec![BigInt::zero(); field.n],
            den: BigInt::one(),
        }
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::from_integer(field, 1)
    }

    pub fn from_integer(field: &Arc<Field>, v: i64) -> Self {
        let mut z = Self::zero(field);
        z.num[0] = BigInt::from(v);
        z
    }

    pub fn from_rational(field: &Arc<Field>, q: &BigRational) -> Self {
        let mut z = Self::zero(field);
        z.num[0] = q.numer().clone();
        z.den = q.denom().clone();
        z.normalize_den();
        z
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(field: &Arc<Field>, k: i64) -> Self {
        let two_n = 2 * field.n as i64;
        let k = k.rem_euclid(two_n) as usize;
        let mut z = Self::zero(field);
        if k < field.n {
            z.num[k] = BigInt::one();
        } else {
            z.num[k - field.n] = -BigInt::one();
        }
        z
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn check(&self, other: &Cyclo) {
        assert_eq!(
            self.field.n, other.field.n,
            "mixing elements of different cyclotomic fields"
        );
    }

    fn normalize_den(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.num.iter_mut() {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        self.check(other);
        if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| a + b)
                .collect();
            let mut z = Cyclo {
                field: self.field.clone(),
                num,
                den: self.den.clone(),
            };
            if !z.den.is_one() {
                z.normalize_den();
            }
            return z;
        }
        let l = self.den.lcm(&other.den);
        let fa = &l / &self.den;
        let fb = &l / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        let mut z = Cyclo {
            field: self.field.clone(),
            num,
            den: l,
        };
        z.normalize_den();
        z
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Cyclo {
        let mut z = Cyclo {
            field: self.field.clone(),
            num: self.num.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        z.normalize_den();
        z
    }

    pub fn scale_int(&self, k: i64) -> Cyclo {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Negacyclic product.
    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        self.check(other);
        let n = self.field.n;
        let mut num = vec![BigInt::zero(); n];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                let k = i + j;
                if k < n {
                    num[k] += p;
                } else {
                    num[k - n] -= p;
                }
            }
        }
        let mut z = Cyclo {
            field: self.field.clone(),
            num,
            den: &self.den * &other.den,
        };
        z.normalize_den();
        z
    }

    /// Multiplication by ζ^k.
    pub fn mul_zeta(&self, k: i64) -> Cyclo {
        let n = self.field.n;
        let two_n = 2 * n as i64;
        let k = k.rem_euclid(two_n) as usize;
        let mut num = vec![BigInt::zero(); n];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = i + k;
            let wraps = p / n;
            let slot = p % n;
            num[slot] = if wraps % 2 == 0 { c.clone() } else { -c };
        }
        Cyclo {
            field: self.field.clone(),
            num,
            den: self.den.clone(),
        }
    }

    /// Complex conjugate (ζ ↦ ζ^{-1}).
    pub fn conj(&self) -> Cyclo {
        let n = self.field.n;
        let mut num = vec![BigInt::zero(); n];
        num[0] = self.num[0].clone();
        for i in 1..n {
            if !self.num[i].is_zero() {
                num[n - i] = -&self.num[i];
            }
        }
        Cyclo {
            field: self.field.clone(),
            num,
            den: self.den.clone(),
        }
    }

    /// Real part (z + z̄)/2.
    pub fn re(&self) -> Cyclo {
        self.add(&self.conj())
            .scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Canonical coordinates: numerators in the power basis ζ^0..ζ^{φ-1}
    /// and a positive common denominator, fully reduced.
    pub fn canonical(&self) -> (Vec<BigInt>, BigInt) {
        let f = &self.field;
        let mut r = self.num.clone();
        for d in (f.degree..f.n).rev() {
            if r[d].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut r[d]);
            let base = d - f.degree;
            for &(j, m) in &f.modulus {
                r[base + j] -= &c * m;
            }
        }
        r.truncate(f.degree);
        let mut g = self.den.clone();
        for c in &r {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        let den = &self.den / &g;
        if !g.is_one() {
            for c in r.iter_mut() {
                *c /= &g;
            }
        }
        (r, den)
    }

    /// The same element with its representation replaced by the canonical
    /// one; keeps coefficients small along long chains of operations.
    pub fn reduce(&self) -> Cyclo {
        let (mut num, den) = self.canonical();
        num.resize(self.field.n, BigInt::zero());
        Cyclo {
            field: self.field.clone(),
            num,
            den,
        }
    }

    /// Canonical coordinates as rationals.
    pub fn coords(&self) -> Vec<BigRational> {
        let (r, den) = self.canonical();
        r.into_iter()
            .map(|c| BigRational::new(c, den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().0.iter().all(Zero::is_zero)
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let (r, den) = self.canonical();
        if r[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(r[0].clone(), den))
        } else {
            None
        }
    }

    /// Returns `q` with `self == q * other` when such a rational exists.
    /// `other` must be nonzero.
    pub fn rational_ratio(&self, other: &Cyclo) -> Option<BigRational> {
        self.check(other);
        let (a, ad) = self.canonical();
        let (b, bd) = other.canonical();
        let pivot = b.iter().position(|c| !c.is_zero())?;
        // self = (a/ad), other = (b/bd), q = (a_p/ad)/(b_p/bd)
        let q = BigRational::new(&a[pivot] * &bd, &b[pivot] * &ad);
        let ok = a.iter().zip(&b).all(|(x, y)| {
            BigRational::new(x.clone(), ad.clone()) == BigRational::new(y.clone(), bd.clone()) * &q
        });
        ok.then_some(q)
    }

    /// Double-precision complex value.
    pub fn to_complex(&self) -> (f64, f64) {
        let f = &self.field;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let fast = den.is_finite() && den < 1e300;
        let big_den = BigRational::from_integer(self.den.clone());
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = match c.to_f64() {
                Some(x) if fast && x.is_finite() => x / den,
                // scale through an exact ratio when either side overflows
                _ => (BigRational::from_integer(c.clone()) / &big_den)
                    .to_f64()
                    .unwrap_or(f64::NAN),
            };
            re += v * f.cos_sin[j].0;
            im += v * f.cos_sin[j].1;
        }
        (re, im)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().0
    }

    /// (ω - 1)^{-1} for ω = ζ^k ≠ 1, from Σ_{j<r} j ω^j = r/(ω - 1).
    pub fn inv_zeta_minus_one(field: &Arc<Field>, k: i64) -> Cyclo {
        let two_n = 2 * field.n as i64;
        let k = k.rem_euclid(two_n);
        assert!(k != 0, "ζ^k - 1 is zero");
        let order = two_n / k.gcd(&two_n);
        let mut acc = Cyclo::zero(field);
        for j in 1..order {
            acc = acc.add(&Cyclo::zeta_pow(field, k * j).scale_int(j));
        }
        acc.scale(&BigRational::new(BigInt::one(), BigInt::from(order)))
    }

    /// sin(xπ/N) / sin(yπ/N) as an exact element; requires sin(yπ/N) ≠ 0.
    pub fn sin_ratio(field: &Arc<Field>, x: i64, y: i64) -> Cyclo {
        // (ζ^x - ζ^-x) / (ζ^y - ζ^-y) = (ζ^x - ζ^-x) ζ^y / (ζ^{2y} - 1)
        let top = Cyclo::zeta_pow(field, x).sub(&Cyclo::zeta_pow(field, -x));
        top.mul_zeta(y)
            .mul(&Cyclo::inv_zeta_minus_one(field, 2 * y))
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.field.n == other.field.n && self.canonical() == other.canonical()
    }
}

impl Eq for Cyclo {}

impl Hash for Cyclo {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.n.hash(state);
        self.canonical().hash(state);
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    /// Canonical form, e.g. `3/2 + 1/2·z^1` with z = e^{iπ/N}.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, den) = self.canonical();
        let mut terms = Vec::new();
        for (j, c) in r.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), den.clone());
            if j == 0 {
                terms.push(format!("{}", q));
            } else {
                terms.push(format!("{}·z^{}", q, j));
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// i·(u × v) = (ū v - u v̄)/2, purely imaginary and always in the field.
pub fn wedge_i(u: &Cyclo, v: &Cyclo) -> Cyclo {
    u.conj()
        .mul(v)
        .sub(&u.mul(&v.conj()))
        .scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
}

/// u · v = (ū v + u v̄)/2, real.
pub fn dot(u: &Cyclo, v: &Cyclo) -> Cyclo {
    u.conj().mul(v).re()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p = cyclotomic_poly(2000);
        assert_eq!(p.len(), 801);
        assert_eq!(p.iter().filter(|&&c| c != 0).count(), 5);
    }

    #[test]
    fn zeta_relations_reduce_to_zero() {
        // 1 - ζ + ζ^2 = 0 for ζ = e^{iπ/3}
        let f = Field::get(3);
        let z = Cyclo::one(&f)
            .sub(&Cyclo::zeta_pow(&f, 1))
            .add(&Cyclo::zeta_pow(&f, 2));
        assert!(z.is_zero());
        assert_eq!(Cyclo::zeta_pow(&f, 6), Cyclo::one(&f));
        assert_eq!(Cyclo::zeta_pow(&f, 3), Cyclo::from_integer(&f, -1));
    }

    #[test]
    fn conjugate_and_rotation_agree_with_floats() {
        let f = Field::get(5);
        let z = Cyclo::zeta_pow(&f, 2)
            .scale_int(3)
            .add(&Cyclo::zeta_pow(&f, 7));
        let (x, y) = z.to_complex();
        let (cx, cy) = z.conj().to_complex();
        assert!((x - cx).abs() < 1e-12 && (y + cy).abs() < 1e-12);
        let (rx, ry) = z.mul_zeta(3).to_complex();
        let t = 3.0 * std::f64::consts::PI / 5.0;
        assert!((rx - (x * t.cos() - y * t.sin())).abs() < 1e-12);
        assert!((ry - (x * t.sin() + y * t.cos())).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_zeta_minus_one() {
        for n in [2usize, 3, 5, 6, 12] {
            let f = Field::get(n);
            for k in 1..(2 * n as i64) {
                let inv = Cyclo::inv_zeta_minus_one(&f, k);
                let w = Cyclo::zeta_pow(&f, k).sub(&Cyclo::one(&f));
                assert_eq!(inv.mul(&w), Cyclo::one(&f), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn sin_ratio_matches_floats() {
        let f = Field::get(6);
        let r = Cyclo::sin_ratio(&f, 1, 2);
        let expect = (std::f64::consts::PI / 6.0).sin() / (std::f64::consts::PI / 3.0).sin();
        let (re, im) = r.to_complex();
        assert!((re - expect).abs() < 1e-12 && im.abs() < 1e-12);
        // sin(π/2)/sin(π/6) = 2 exactly
        assert_eq!(
            Cyclo::sin_ratio(&f, 3, 1).as_rational(),
            Some(BigRational::from_integer(2.into()))
        );
    }

    #[test]
    fn rational_ratio_detects_multiples() {
        let f = Field::get(3);
        let u = Cyclo::zeta_pow(&f, 1).add(&Cyclo::one(&f));
        let v = u.scale(&BigRational::new(3.into(), 7.into()));
        assert_eq!(
            v.rational_ratio(&u),
            Some(BigRational::new(3.into(), 7.into()))
        );
        assert_eq!(Cyclo::zeta_pow(&f, 1).rational_ratio(&u), None);
    }

    #[test]
    fn wedge_and_dot_of_unit_vectors() {
        let f = Field::get(4);
        let u = Cyclo::one(&f);
        let v = Cyclo::zeta_pow(&f, 2); // i
        assert_eq!(dot(&u, &v), Cyclo::zero(&f));
        // i·(u×v) = i·1
        assert_eq!(wedge_i(&u, &v), Cyclo::zeta_pow(&f, 2));
    }
}
