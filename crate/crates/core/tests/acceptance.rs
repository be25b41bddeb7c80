//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Every check compares library output against an oracle computed here
//! from closed forms or brute force, never against the library itself.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use billiard_core::contfrac::best_convergent;
use billiard_core::cyclo::{Cyclo, Field};
use billiard_core::exactgeom::{ExactVector, Polygon};
use billiard_core::lattice::{rationalize_relations, real_relations_of, PeriodLattice};
use billiard_core::oracle::{
    compare_spectra, fd_eigenvalues, incompleteness_check, perturbation_study, rasterize,
    BrokenRectangle,
};
use billiard_core::quantize::{
    momentum_aperiodic, periodic_skeleton_check, spectrum, SkeletonKind, SpectrumOptions,
};
use billiard_core::shapes;
use billiard_core::swf::{
    compile_swf, enumerate_prescriptions, interior_samples, realized_levels, symmetry_probe,
    verify_boundary, Affine2, BoundaryCondition, Branch, Parity, SignPrescription, Swf,
};
use billiard_core::unfold::{build_epp, genus, period_basis, Epp};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;

type Outcome = Result<String, String>;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.1?}, limit {limit:?}"))
}

fn lattice(poly: &Polygon) -> (Epp, PeriodLattice) {
    let epp = build_epp(poly).unwrap();
    let lat = PeriodLattice::from_basis(&period_basis(&epp).unwrap(), None).unwrap();
    (epp, lat)
}

/// g = 1 + (N/2)·Σ(p_k − 1)/q_k with N the lcm of the angle denominators.
fn genus_by_hand(angles: &[(i64, i64)]) -> i64 {
    let n = angles.iter().fold(1i64, |acc, &(_, d)| acc.lcm(&d));
    let twice_sum: i64 = angles.iter().map(|&(p, d)| (p - 1) * (n / d)).sum();
    assert_eq!(twice_sum % 2, 0);
    1 + twice_sum / 2
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let cases: Vec<(&str, Polygon, Vec<(i64, i64)>)> = vec![
        (
            "parallelogram a=2/3",
            shapes::pi3_parallelogram(&q(2, 3)).unwrap(),
            vec![(1, 3), (2, 3), (1, 3), (2, 3)],
        ),
        (
            "broken rectangle",
            shapes::broken_rectangle(&q(1, 1), &q(3, 2), &q(1, 1), &q(5, 3)).unwrap(),
            vec![(1, 2), (1, 2), (1, 2), (3, 2), (1, 2), (1, 2)],
        ),
        (
            "broken parallelogram",
            shapes::default_broken_parallelogram(),
            vec![(1, 3), (1, 2), (1, 2), (3, 2), (1, 2), (2, 3)],
        ),
    ];
    let want = [(2, 4), (2, 4), (5, 10)];
    let mut seen = Vec::new();
    for ((name, poly, angles), (g_want, np_want)) in cases.iter().zip(want) {
        let g = genus(poly).map_err(|e| e.to_string())?;
        let basis = period_basis(&build_epp(poly).unwrap()).map_err(|e| e.to_string())?;
        ensure(genus_by_hand(angles) == g_want, || {
            format!("{name}: oracle genus differs")
        })?;
        ensure(g as i64 == g_want && basis.periods.len() == np_want, || {
            format!(
                "{name}: g={g}, periods={} (want {g_want}, {np_want})",
                basis.periods.len()
            )
        })?;
        ensure(basis.periods.len() == 2 * g, || {
            format!("{name}: periods ≠ 2g")
        })?;
        seen.push(format!("{name} g={g}/{}", basis.periods.len()));
    }
    let tri = shapes::rationalized_right_triangle().unwrap();
    let tri_angles = [(353, 1000), (147, 1000), (1, 2)];
    let g = genus(&tri).map_err(|e| e.to_string())?;
    let images = build_epp(&tri).map_err(|e| e.to_string())?.image_count();
    ensure(genus_by_hand(&tri_angles) == 250, || {
        "triangle oracle genus".into()
    })?;
    ensure(g == 250 && images == 2000, || {
        format!("triangle g={g}, images={images}")
    })?;
    seen.push(format!("triangle g={g}, {images} images"));
    within(t, Duration::from_secs(60))?;
    Ok(seen.join("; "))
}

/// Expands merged levels into one energy per (m, n) label.
fn multiset(levels: &[billiard_core::quantize::SpectrumEntry]) -> Vec<f64> {
    let mut v: Vec<f64> = levels
        .iter()
        .flat_map(|l| std::iter::repeat(l.energy).take(l.labels.len()))
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn same_multiset(a: &[f64], b: &[f64], rel: f64) -> Result<(), String> {
    ensure(a.len() == b.len(), || {
        format!("{} levels vs {}", a.len(), b.len())
    })?;
    for (x, y) in a.iter().zip(b) {
        ensure((x - y).abs() <= rel * y.abs(), || format!("{x} vs {y}"))?;
    }
    Ok(())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let tol = 1e-9;
    let opts = SpectrumOptions {
        max_ratio: f64::INFINITY,
        ..Default::default()
    };
    for (p, qq) in [(1i64, 1i64), (3, 2), (5, 3)] {
        let (_, lat) = lattice(&shapes::pi3_parallelogram(&q(qq, p)).unwrap());
        let unit = PI * PI * (p * p) as f64;
        // the closed forms give |p|²; energies here are |p|²/2
        let e_gen = |m: i64, n: i64| 16.0 / 9.0 * unit * (m * m + n * n - m * n) as f64 / 2.0;
        let e_rot = |m: i64, n: i64| 4.0 / 9.0 * unit * (3 * m * m + n * n) as f64 / 2.0;

        for m in -20..=20i64 {
            for n in -20..=20i64 {
                if (m, n) == (0, 0) {
                    continue;
                }
                let e = momentum_aperiodic(&lat, m, n)
                    .map_err(|e| e.to_string())?
                    .energy();
                ensure((e - e_gen(m, n)).abs() <= tol * e_gen(m, n), || {
                    format!(
                        "a={qq}/{p} ({m},{n}): {e} vs generic closed form {}",
                        e_gen(m, n)
                    )
                })?;
                ensure(
                    (e_rot(m - n, m + n) - e_gen(m, n)).abs() <= tol * e_gen(m, n),
                    || format!("substitution fails at ({m},{n})"),
                )?;
            }
        }
        // m² + n² − mn ≥ ¾·max(|m|,|n|)², so labels under this cap have
        // |m|,|n| ≤ 20 and the search box below is complete
        let cap = e_gen(1, 0) * 300.0;
        let mut want = Vec::new();
        for m in -21..=21i64 {
            for n in -21..=21i64 {
                if (m, n) != (0, 0) && e_gen(m, n) <= cap {
                    want.push(e_gen(m, n));
                }
            }
        }
        let got = spectrum(&lat, cap, &[SkeletonKind::ClassicalAperiodic], &opts)
            .map_err(|e| e.to_string())?;
        same_multiset(&multiset(&got), &sorted(want), tol)
            .map_err(|e| format!("a={qq}/{p} spectrum vs generic closed form: {e}"))?;

        // rotated periods D1 ± D2, D3 ± D4 with D3 = D1/a, D4 = D2/a
        let (d1, d2) = (lat.relations.d1.clone(), lat.relations.d2.clone());
        let inv_a = q(p, qq);
        let (d3, d4) = (d1.scale(&inv_a), d2.scale(&inv_a));
        let rot = PeriodLattice::new(
            vec![d1.sub(&d2), d1.add(&d2), d3.sub(&d4), d3.add(&d4)],
            (0, 1),
        )
        .map_err(|e| e.to_string())?;
        ensure(rot.c().ok() == Some((qq, qq)), || {
            format!("rotated C = {:?}", rot.c())
        })?;
        let data = periodic_skeleton_check(&rot).ok_or("rotated pair has no k")?;
        ensure(data.k == 0, || format!("rotated pair k = {}", data.k))?;
        let cap_rot = e_rot(0, 1) * 400.0;
        let mut want_rot = Vec::new();
        let mut want_per = Vec::new();
        for m in -30..=30i64 {
            for n in -30..=30i64 {
                if (m, n) != (0, 0) && e_rot(m, n) <= cap_rot {
                    want_rot.push(e_rot(m, n));
                    if n != 0 {
                        want_per.push(e_rot(m, n));
                    }
                }
            }
        }
        let ap = spectrum(&rot, cap_rot, &[SkeletonKind::ClassicalAperiodic], &opts)
            .map_err(|e| e.to_string())?;
        same_multiset(&multiset(&ap), &sorted(want_rot), tol)
            .map_err(|e| format!("a={qq}/{p} rotated aperiodic spectrum: {e}"))?;
        let qu =
            spectrum(&rot, cap_rot, &[SkeletonKind::Quantum], &opts).map_err(|e| e.to_string())?;
        same_multiset(&multiset(&qu), &sorted(want_per), tol)
            .map_err(|e| format!("a={qq}/{p} rotated periodic-skeleton spectrum: {e}"))?;
    }

    // broken rectangles: E = ½π²((m·C_x/x1)² + (n·C_y/y1)²)
    for (x1, x2, y1, y2) in [
        (q(1, 1), q(2, 1), q(1, 1), q(2, 1)),
        (q(1, 1), q(3, 2), q(1, 1), q(5, 3)),
        (q(2, 1), q(3, 1), q(1, 2), q(5, 4)),
    ] {
        let poly = shapes::broken_rectangle(&x1, &x2, &y1, &y2).unwrap();
        let (_, lat) = lattice(&poly);
        let cx = (&x2 / &x1).denom().clone();
        let cy = (&y2 / &y1).denom().clone();
        let f = |v: &BigRational| num_traits::ToPrimitive::to_f64(v).unwrap();
        let kx = f(&BigRational::from_integer(cx)) / f(&x1);
        let ky = f(&BigRational::from_integer(cy)) / f(&y1);
        let e_br =
            |m: i64, n: i64| 0.5 * PI * PI * ((m as f64 * kx).powi(2) + (n as f64 * ky).powi(2));
        let cap = 40.0 * e_br(1, 1);
        let mut want = Vec::new();
        for m in -60..=60i64 {
            for n in -60..=60i64 {
                if (m, n) != (0, 0) && e_br(m, n) <= cap {
                    want.push(e_br(m, n));
                }
            }
        }
        let got = spectrum(&lat, cap, &[SkeletonKind::ClassicalAperiodic], &opts)
            .map_err(|e| e.to_string())?;
        same_multiset(&multiset(&got), &sorted(want), tol)
            .map_err(|e| format!("broken rectangle ({x1},{x2},{y1},{y2}) vs closed form: {e}"))?;
    }
    within(t, Duration::from_secs(5))?;
    Ok("parallelogram generic and rotated-pair closed forms for |m|,|n| ≤ 20, substitution identity, broken-rectangle closed form".into())
}

/// Counts sign vectors (η_0 = +1) for which every side sees only equal or
/// only opposite signs across its gluings.
fn brute_force_prescriptions(epp: &Epp) -> usize {
    let m = epp.images.len();
    let n = epp.polygon.n();
    let mut count = 0;
    for bits in 0u64..(1 << (m - 1)) {
        let eta = |i: usize| {
            if i == 0 || bits >> (i - 1) & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let consistent = (0..n).all(|e| {
            let rel: Vec<i32> = (0..m).map(|i| eta(i) * eta(epp.glue[i][e].image)).collect();
            rel.iter().all(|&r| r == rel[0])
        });
        count += consistent as usize;
    }
    count
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let cases = [
        (
            "parallelogram",
            shapes::pi3_parallelogram(&q(2, 3)).unwrap(),
            2,
        ),
        (
            "equilateral",
            shapes::equilateral_triangle(&q(1, 1)).unwrap(),
            2,
        ),
        (
            "rectangle",
            shapes::rectangle(&q(2, 1), &q(1, 1)).unwrap(),
            4,
        ),
        (
            "broken rectangle",
            shapes::broken_rectangle(&q(1, 1), &q(2, 1), &q(1, 1), &q(2, 1)).unwrap(),
            4,
        ),
    ];
    let mut seen = Vec::new();
    for (name, poly, want) in cases {
        let epp = build_epp(&poly).unwrap();
        let got = enumerate_prescriptions(&epp).len();
        let brute = brute_force_prescriptions(&epp);
        ensure(got == want && brute == want, || {
            format!("{name}: enumerate {got}, brute force {brute}, want {want}")
        })?;
        seen.push(format!("{name} {got}"));
    }
    within(t, Duration::from_secs(5))?;
    Ok(seen.join(", "))
}

/// Least-squares complex scale c with ours ≈ c·reference, and the
/// remaining max deviation relative to max |ours|.
fn fit(ours: &[Complex64], reference: &[Complex64]) -> (Complex64, f64) {
    let num: Complex64 = reference.iter().zip(ours).map(|(r, o)| r.conj() * o).sum();
    let den: f64 = reference.iter().map(|r| r.norm_sqr()).sum();
    let c = num / den;
    let peak = ours.iter().map(|o| o.norm()).fold(0.0, f64::max);
    let dev = ours
        .iter()
        .zip(reference)
        .map(|(o, r)| (o - c * r).norm())
        .fold(0.0, f64::max);
    (c, dev / peak)
}

fn check_against(
    swf: &Swf,
    pts: &[[f64; 2]],
    reference: impl Fn(f64, f64) -> Complex64,
    what: &str,
) -> Result<(), String> {
    let ours: Vec<Complex64> = pts.iter().map(|&x| swf.evaluate(x)).collect();
    let theirs: Vec<Complex64> = pts.iter().map(|x| reference(x[0], x[1])).collect();
    let peak = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak(&ours) < 1e-9 {
        // a degenerate state: the closed form must vanish as well
        return ensure(peak(&theirs) < 1e-9, || {
            format!("{what}: SWF vanishes, closed form does not")
        });
    }
    let (c, dev) = fit(&ours, &theirs);
    ensure(c.norm() > 1e-9 && dev < 1e-12, || {
        format!("{what}: deviation {dev:.2e} (scale {c})")
    })
}

/// Boundary residuals, equal |p_k| and conjugate branches.
fn generic_checks(
    plus: &Swf,
    minus: &Swf,
    poly: &Polygon,
    pres: &SignPrescription,
    what: &str,
) -> Result<(), String> {
    let b = verify_boundary(plus, poly, pres, 1000, 1e-9);
    ensure(b.pass, || {
        format!("{what}: boundary residual {:.2e}", b.max_residual)
    })?;
    let norm = plus.momentum_norm();
    for t in &plus.terms {
        let r = t.p[0].hypot(t.p[1]);
        ensure((r - norm).abs() <= 1e-12 * norm.max(1.0), || {
            format!("{what}: |p_k| = {r} vs {norm}")
        })?;
    }
    for x in interior_samples(poly, 50, 7) {
        let (a, b) = (plus.evaluate(x), minus.evaluate(x));
        ensure((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()), || {
            format!("{what}: ± not conjugate")
        })?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let s3 = 3f64.sqrt();
    let h = 0.5;
    let mut checked = 0;
    for (p, qq) in [(1i64, 1i64), (3, 2), (5, 3)] {
        let poly = shapes::pi3_parallelogram(&q(qq, p)).unwrap();
        let (epp, lat) = lattice(&poly);
        let pres = enumerate_prescriptions(&epp);
        let dir = pres
            .iter()
            .find(|p| p.is_dirichlet())
            .ok_or("no Dirichlet")?;
        let neu = pres.iter().find(|p| p.is_neumann()).ok_or("no Neumann")?;
        let pts = interior_samples(&poly, 300, 11);
        for (m, n) in [(1i64, 1i64), (2, 1), (3, -1), (1, 3), (4, -2)] {
            let mom = momentum_aperiodic(&lat, m, n).map_err(|e| e.to_string())?;
            let (a, b) = (mom.vector[0], mom.vector[1]);
            if a.abs() < 1e-9 || b.abs() < 1e-9 {
                continue;
            }
            // the three image pairs written out by hand
            let u = |x: f64, y: f64| {
                [
                    (x, y),
                    (h * x - h * s3 * y, h * s3 * x + h * y),
                    (h * x + h * s3 * y, h * s3 * x - h * y),
                ]
            };
            let plane_pair = |sign: f64| {
                move |x: f64, y: f64| {
                    let [(x0, y0), _, _] = u(x, y);
                    let e = |arg: f64| Complex64::from_polar(1.0, sign * a * arg);
                    e(x0) * (b * y0).sin()
                        - e(-h * x + h * s3 * y) * (b * (h * s3 * x + h * y)).sin()
                        + e(-h * x - h * s3 * y) * (b * (h * s3 * x - h * y)).sin()
                }
            };
            let dir_cos_sin = |x: f64, y: f64| {
                let [(x0, y0), (x1, y1), (x2, y2)] = u(x, y);
                Complex64::from(
                    (a * x0).cos() * (b * y0).sin() - (a * x1).cos() * (b * y1).sin()
                        + (a * x2).cos() * (b * y2).sin(),
                )
            };
            let dir_sin_sin = |x: f64, y: f64| {
                let [(x0, y0), (x1, y1), (x2, y2)] = u(x, y);
                Complex64::from(
                    (a * x0).sin() * (b * y0).sin() + (a * x1).sin() * (b * y1).sin()
                        - (a * x2).sin() * (b * y2).sin(),
                )
            };
            let neu_cos_cos = |x: f64, y: f64| {
                let [(x0, y0), (x1, y1), (x2, y2)] = u(x, y);
                Complex64::from(
                    (a * x0).cos() * (b * y0).cos()
                        + (a * x1).cos() * (b * y1).cos()
                        + (a * x2).cos() * (b * y2).cos(),
                )
            };
            let neu_sin_cos = |x: f64, y: f64| {
                let [(x0, y0), (x1, y1), (x2, y2)] = u(x, y);
                Complex64::from(
                    (a * x0).sin() * (b * y0).cos()
                        - (a * x1).sin() * (b * y1).cos()
                        - (a * x2).sin() * (b * y2).cos(),
                )
            };
            let tag = |form: &str| format!("a={qq}/{p} ({m},{n}) {form}");
            let (dp, dm) = compile_swf(&epp, dir, &mom).map_err(|e| e.to_string())?;
            generic_checks(&dp, &dm, &poly, dir, &tag("Dirichlet"))?;
            check_against(&dp, &pts, plane_pair(1.0), &tag("complex +"))?;
            check_against(&dm, &pts, plane_pair(-1.0), &tag("complex −"))?;
            check_against(
                &dp.with_branch(Branch::Sin),
                &pts,
                dir_cos_sin,
                &tag("Dirichlet cos·sin"),
            )?;
            check_against(
                &dp.with_branch(Branch::Cos),
                &pts,
                dir_sin_sin,
                &tag("Dirichlet sin·sin"),
            )?;
            let (np, nm) = compile_swf(&epp, neu, &mom).map_err(|e| e.to_string())?;
            generic_checks(&np, &nm, &poly, neu, &tag("Neumann"))?;
            check_against(
                &np.with_branch(Branch::Cos),
                &pts,
                neu_cos_cos,
                &tag("Neumann cos·cos"),
            )?;
            check_against(
                &np.with_branch(Branch::Sin),
                &pts,
                neu_sin_cos,
                &tag("Neumann sin·cos"),
            )?;
            checked += 1;
        }
    }

    for (x1, x2, y1, y2) in [
        (q(1, 1), q(2, 1), q(1, 1), q(2, 1)),
        (q(1, 1), q(3, 2), q(1, 1), q(5, 3)),
    ] {
        let poly = shapes::broken_rectangle(&x1, &x2, &y1, &y2).unwrap();
        let (epp, lat) = lattice(&poly);
        let pts = interior_samples(&poly, 300, 13);
        for (m, n) in [(1i64, 1i64), (2, 1), (1, 3)] {
            let mom = momentum_aperiodic(&lat, m, n).map_err(|e| e.to_string())?;
            let (px, py) = (mom.vector[0], mom.vector[1]);
            if px.abs() < 1e-9 || py.abs() < 1e-9 {
                continue;
            }
            for pres in enumerate_prescriptions(&epp) {
                // side 0 runs along y = 0, side 1 along x = x2
                let horiz_d = pres.bc[0] == BoundaryCondition::Dirichlet;
                let vert_d = pres.bc[1] == BoundaryCondition::Dirichlet;
                let fx = move |x: f64| {
                    if vert_d {
                        (px * x).sin()
                    } else {
                        (px * x).cos()
                    }
                };
                let fy = move |y: f64| {
                    if horiz_d {
                        (py * y).sin()
                    } else {
                        (py * y).cos()
                    }
                };
                let eq = match (horiz_d, vert_d) {
                    (true, true) => "sin·sin",
                    (false, false) => "cos·cos",
                    (true, false) => "cos·sin",
                    (false, true) => "sin·cos",
                };
                let what = format!("broken rectangle ({x1},{x2},{y1},{y2}) ({m},{n}) {eq}");
                let (sp, sm) = compile_swf(&epp, &pres, &mom).map_err(|e| e.to_string())?;
                generic_checks(&sp, &sm, &poly, &pres, &what)?;
                check_against(&sp, &pts, |x, y| Complex64::from(fx(x) * fy(y)), &what)?;
                checked += 1;
            }
        }
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!(
        "{checked} momentum/prescription cases reproduced to 1e-12"
    ))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let poly = shapes::pi3_parallelogram(&q(1, 1)).unwrap();
    let (epp, lat) = lattice(&poly);
    let dir = enumerate_prescriptions(&epp)
        .into_iter()
        .find(|p| p.is_dirichlet())
        .ok_or("no Dirichlet")?;
    // rhombus (0,0) (1,0) (3/2,√3/2) (1/2,√3/2); long diagonal at π/6
    let centre = [0.75, 3f64.sqrt() / 4.0];
    let flip_x = Affine2::reflection(centre, PI / 6.0 + PI / 2.0);
    let flip_y = Affine2::reflection(centre, PI / 6.0);
    // independent check of the two maps: they swap the expected vertices
    let near = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]) < 1e-12;
    ensure(
        near(flip_x.apply([0.0, 0.0]), [1.5, 3f64.sqrt() / 2.0]),
        || "x-map".into(),
    )?;
    ensure(
        near(flip_y.apply([1.0, 0.0]), [0.5, 3f64.sqrt() / 2.0]),
        || "y-map".into(),
    )?;
    let pts = interior_samples(&poly, 200, 5);
    let mut cases = 0;
    for (m, n) in [(1i64, 1i64), (2, 1), (3, 1), (1, 3), (3, -1), (4, 1)] {
        let mom = momentum_aperiodic(&lat, m, n).map_err(|e| e.to_string())?;
        let (plus, _) = compile_swf(&epp, &dir, &mom).map_err(|e| e.to_string())?;
        for (branch, want_y) in [(Branch::Sin, Parity::Even), (Branch::Cos, Parity::Odd)] {
            let f = plus.with_branch(branch);
            if pts.iter().all(|&x| f.evaluate(x).norm() < 1e-9) {
                continue;
            }
            let px = symmetry_probe(&f, &poly, &flip_x).map_err(|e| e.to_string())?;
            let py = symmetry_probe(&f, &poly, &flip_y).map_err(|e| e.to_string())?;
            ensure(px == Parity::Odd && py == want_y, || {
                format!("({m},{n}) {branch:?}: x {px:?}, y {py:?}")
            })?;
            // same verdict from direct evaluation
            let scale = pts
                .iter()
                .map(|&x| f.evaluate(x).norm())
                .fold(0.0, f64::max);
            let sy = if want_y == Parity::Even { 1.0 } else { -1.0 };
            for &x in &pts {
                let v = f.evaluate(x);
                ensure(
                    (f.evaluate(flip_x.apply(x)) + v).norm() <= 1e-9 * scale,
                    || "x parity".into(),
                )?;
                ensure(
                    (f.evaluate(flip_y.apply(x)) - sy * v).norm() <= 1e-9 * scale,
                    || "y parity".into(),
                )?;
            }
            cases += 1;
        }
    }
    ensure(cases >= 6, || format!("only {cases} non-vanishing cases"))?;
    within(t, Duration::from_secs(2))?;
    Ok(format!(
        "{cases} Dirichlet states: all x-odd; cos·sin form y-even, sin·sin form y-odd"
    ))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let poly = shapes::l_shape();
    let (epp, lat) = lattice(&poly);
    let dir = enumerate_prescriptions(&epp)
        .into_iter()
        .find(|p| p.is_dirichlet())
        .ok_or("no Dirichlet")?;
    let emax = 60.0;
    let mut closed = Vec::new();
    for m in 1..10i64 {
        for n in 1..10i64 {
            let e = 0.5 * PI * PI * (m * m + n * n) as f64;
            if e <= emax && !closed.iter().any(|c: &f64| (c - e).abs() < 1e-9) {
                closed.push(e);
            }
        }
    }
    let closed = sorted(closed);
    let semi = realized_levels(&epp, &lat, &dir, emax).map_err(|e| e.to_string())?;
    same_multiset(&semi, &closed, 1e-9).map_err(|e| format!("realized levels: {e}"))?;
    let dom = rasterize(&poly, 1.0 / 128.0, &dir.bc).map_err(|e| e.to_string())?;
    let fd = fd_eigenvalues(&dom, 40).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for e in &closed {
        let best = fd
            .iter()
            .map(|f| (f / e - 1.0).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    ensure(worst < 0.02, || {
        format!("L-shape worst relative error {worst:.3e}")
    })?;
    let rep = compare_spectra(&closed, &fd, 0.02);
    ensure(rep.pass, || {
        format!("compare_spectra max {:.3e}", rep.max_rel_error)
    })?;

    let square = shapes::square(&q(1, 1)).unwrap();
    let bc = vec![BoundaryCondition::Dirichlet; 4];
    let e: Vec<f64> = [16.0, 32.0, 64.0]
        .iter()
        .map(|k| fd_eigenvalues(&rasterize(&square, 1.0 / k, &bc).unwrap(), 1).unwrap()[0])
        .collect();
    let order = ((e[0] - e[1]) / (e[1] - e[2])).log2();
    let lib = billiard_core::oracle::richardson_order(e[0], e[1], e[2]);
    ensure(order >= 1.8 && (order - lib).abs() < 1e-9, || {
        format!("Richardson order {order:.3} (library {lib:.3})")
    })?;
    within(t, Duration::from_secs(180))?;
    Ok(format!(
        "{} levels ≤ 60 matched, worst {:.2}%; square order {:.3}",
        closed.len(),
        100.0 * worst,
        order
    ))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let k = 100i64;
    let (n_max, m_max) = (10i64, 20i64);
    let rep = incompleteness_check(k, n_max, m_max).map_err(|e| e.to_string())?;
    // (1, 2 − 1/k, 1, 2): C_x = k; (1, 2, 1, 2): C_x = 1. Units of π²/2.
    let mut worst: f64 = 0.0;
    let mut every_kth = true;
    for n in 1..=n_max {
        let fine: Vec<i64> = (1..=m_max).map(|m| (m * k).pow(2) + n * n).collect();
        for mb in 1..=m_max * k {
            let e = mb * mb + n * n;
            let hit = fine.contains(&e);
            every_kth &= hit == (mb % k == 0);
        }
        for e in &fine {
            let nearest = (1..=m_max * k)
                .map(|mb| mb * mb + n * n)
                .min_by_key(|b| (b - e).abs())
                .unwrap();
            worst = worst.max((*e as f64 / nearest as f64 - 1.0).abs());
        }
    }
    let bound = 1.0 / (k - 1) as f64;
    ensure(worst < bound && every_kth, || {
        format!("oracle: worst {worst}, every k-th {every_kth}")
    })?;
    ensure(
        rep.bound_ok && rep.every_kth && (rep.max_rel_error - worst).abs() < 1e-15,
        || format!("library: {rep:?}"),
    )?;
    within(t, Duration::from_secs(1))?;
    Ok(format!(
        "k=100: max |E'/E−1| = {worst:.1e} < 1/99; every 100th level matched"
    ))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let base = BrokenRectangle {
        x1: q(1, 1),
        x2: q(2, 1),
        y1: q(1, 1),
        y2: q(2, 1),
    };
    let eps = [q(1, 10), q(1, 20), q(1, 40)];
    let study = perturbation_study(&base, &eps, 10, 1.0 / 128.0).map_err(|e| e.to_string())?;
    let etas: Vec<f64> = study.rows.iter().map(|r| r.eta).collect();
    ensure(etas.windows(2).all(|w| w[1] < w[0]), || {
        format!("η not decreasing: {etas:?}")
    })?;
    // the ε-accuracy bounds directly: x' = x − (x − x1)(x2 − x3)/(x2 − x1) on the lower arm
    for (e, row) in eps.iter().zip(&study.rows) {
        let e = num_traits::ToPrimitive::to_f64(e).unwrap();
        let x3 = 2.0 - e;
        let g = |x: f64, y: f64| {
            if x >= 1.0 && y <= 1.0 {
                -(x - 1.0) * (2.0 - x3)
            } else {
                0.0
            }
        };
        let mut sup: f64 = 0.0;
        for i in 0..=200 {
            for j in 0..=200 {
                let (x, y) = (2.0 * i as f64 / 200.0, 2.0 * j as f64 / 200.0);
                if x > 1.0 && y > 1.0 {
                    continue;
                }
                let d = 1e-6;
                let gx = if x + d <= 2.0 {
                    (g(x + d, y) - g(x, y)) / d
                } else {
                    (g(x, y) - g(x - d, y)) / d
                };
                sup = sup.max(g(x, y).abs()).max(gx.abs());
            }
        }
        ensure(sup <= e * (1.0 + 1e-6) && row.map_ok, || {
            format!("ε={e}: map sup {sup}, library {}", row.map_sup)
        })?;
        ensure((-g(2.0, 0.5) - e).abs() < 1e-12, || {
            "map does not move x2 onto x3".into()
        })?;
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "η = {}",
        etas.iter()
            .map(|e| format!("{e:.3e}"))
            .collect::<Vec<_>>()
            .join(" > ")
    ))
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let big_q = 100i64;
    let r2 = 2f64.sqrt();
    // D1 = (1, 0), D2 = (0, 1), D3 = (√2, 0) exactly in Q(e^{iπ/4})
    let f = Field::get(4);
    let d1 = ExactVector::new(Cyclo::one(&f));
    let d2 = ExactVector::new(Cyclo::zeta_pow(&f, 2));
    let d3 = ExactVector::new(Cyclo::zeta_pow(&f, 1).add(&Cyclo::zeta_pow(&f, -1)));
    let rel = real_relations_of(&[d1, d2, d3], (0, 1)).map_err(|e| e.to_string())?;
    ensure(rel.relations[0].coeffs[0].rational.is_none(), || {
        "√2 detected as rational".into()
    })?;
    let rat = rationalize_relations(&rel, big_q).map_err(|e| e.to_string())?;
    let shift = BigRational::from_integer(rel.relations[0].shift[0].clone());
    let a = &rat.coeffs[0].1[0] + shift;
    ensure(a == q(99, 70), || format!("got {a}"))?;
    ensure(best_convergent(r2, big_q) == (99, 70), || {
        "best_convergent".into()
    })?;
    // brute force: 99/70 minimizes |q·a − p| over q ≤ Q and meets the bound
    let mut best = (f64::INFINITY, 0, 0);
    for d in 1..=big_q {
        let p = (r2 * d as f64).round() as i64;
        let err = (r2 * d as f64 - p as f64).abs();
        if err < best.0 - 1e-15 {
            best = (err, p, d);
        }
    }
    ensure((best.1, best.2) == (99, 70), || {
        format!("brute force picks {}/{}", best.1, best.2)
    })?;
    let err = (r2 - 99.0 / 70.0).abs();
    ensure(err <= 1.0 / (70.0 * big_q as f64), || {
        format!("error {err} exceeds 1/(qQ)")
    })?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("99/70, |√2 − 99/70| = {err:.3e} ≤ 1/(70·100)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("genus and period counts", criterion_1),
        ("spectrum closed forms", criterion_2),
        ("prescription counts", criterion_3),
        ("SWF verification", criterion_4),
        ("rhombus parity", criterion_5),
        ("oracle agreement", criterion_6),
        ("incompleteness", criterion_7),
        ("deformation trend", criterion_8),
        ("rationalization", criterion_9),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!(
                "criterion {} {name}: PASS ({:.1?}) {msg}",
                i + 1,
                t.elapsed()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "criterion {} {name}: FAIL ({:.1?}) {msg}",
                    i + 1,
                    t.elapsed()
                );
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
