//! Best rational approximation by continued fractions.

/// Continued-fraction convergents p/q of `x` with q ≤ `max_den`.
pub fn convergents(x: f64, max_den: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// The fraction p/q with 1 ≤ q ≤ `max_den` minimising |x − p/q|; ties go to
/// the smaller denominator. Candidates are convergents and semiconvergents.
pub fn best_rational(x: f64, max_den: i64) -> (i64, i64) {
    assert!(max_den >= 1);
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut best = (x.round() as i64, 1i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            // largest semiconvergent that still fits
            let k = (max_den - q0) / q1.max(1);
            if k >= 1 && q1 > 0 {
                consider(&mut best, x, k * p1 + p0, k * q1 + q0);
            }
            break;
        }
        let p2 = a * p1 + p0;
        consider(&mut best, x, p2, q2);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    let g = gcd(best.0.abs(), best.1);
    (best.0 / g.max(1), best.1 / g.max(1))
}

/// Best approximation of the second kind: the last convergent p/q with
/// q ≤ `max_den`, which minimises |q·x − p| and guarantees
/// |x − p/q| < 1/(q·(max_den + 1)).
pub fn best_convergent(x: f64, max_den: i64) -> (i64, i64) {
    assert!(max_den >= 1);
    *convergents(x, max_den)
        .last()
        .unwrap_or(&(x.floor() as i64, 1))
}

fn consider(best: &mut (i64, i64), x: f64, p: i64, q: i64) {
    if q < 1 {
        return;
    }
    let e_new = (x - p as f64 / q as f64).abs();
    let e_old = (x - best.0 as f64 / best.1 as f64).abs();
    if e_new < e_old || (e_new == e_old && q < best.1) {
        *best = (p, q);
    }
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(x: f64, max_den: i64) -> (i64, i64) {
        let mut best = (x.round() as i64, 1);
        let mut err = (x - best.0 as f64).abs();
        for q in 1..=max_den {
            let p = (x * q as f64).round() as i64;
            let e = (x - p as f64 / q as f64).abs();
            if e < err {
                err = e;
                best = (p, q);
            }
        }
        best
    }

    #[test]
    fn sqrt2_with_cap_100() {
        assert_eq!(best_rational(2f64.sqrt(), 100), (140, 99));
        assert_eq!(best_rational(2f64.sqrt(), 98), (99, 70));
    }

    #[test]
    fn rationals_pass_through() {
        assert_eq!(best_rational(1.5, 7), (3, 2));
        assert_eq!(best_rational(1.0 / 3.0, 3), (1, 3));
    }

    #[test]
    fn golden_ratio_cap_50() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(best_rational(phi, 50), brute(phi, 50));
        assert_eq!(best_rational(phi, 50), (55, 34));
    }

    #[test]
    fn second_kind_sqrt2() {
        // 140/99 is closer to √2 than 99/70, but |70√2 − 99| < |99√2 − 140|
        assert_eq!(best_convergent(2f64.sqrt(), 100), (99, 70));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(best_convergent(phi, 50), (55, 34));
    }

    #[test]
    fn convergents_of_pi() {
        let c = convergents(std::f64::consts::PI, 200);
        assert_eq!(c, vec![(3, 1), (22, 7), (333, 106), (355, 113)]);
    }

    proptest::proptest! {
        #[test]
        fn agrees_with_brute_force(x in -5.0f64..5.0, q in 1i64..300) {
            let (p1, q1) = best_rational(x, q);
            let (p2, q2) = brute(x, q);
            let e1 = (x - p1 as f64 / q1 as f64).abs();
            let e2 = (x - p2 as f64 / q2 as f64).abs();
            proptest::prop_assert!(q1 <= q);
            proptest::prop_assert!(e1 <= e2 + 1e-15);
        }

        #[test]
        fn convergent_is_second_kind_best(x in 0.0f64..5.0, cap in 1i64..300) {
            let (p, d) = best_convergent(x, cap);
            proptest::prop_assert!(d <= cap);
            let e = (d as f64 * x - p as f64).abs();
            for qq in 1..=cap {
                let pp = (x * qq as f64).round();
                proptest::prop_assert!(e <= (qq as f64 * x - pp).abs() + 1e-9);
            }
            proptest::prop_assert!((x - p as f64 / d as f64).abs() <= 1.0 / (d as f64 * cap as f64) + 1e-15);
        }
    }
}
