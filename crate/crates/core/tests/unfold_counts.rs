use std::time::Instant;

use billiard_core::shapes;
use billiard_core::unfold::{build_epp, find_pocs, genus, period_basis};
use num_rational::BigRational;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

#[test]
fn small_polygons() {
    for (poly, images, g) in [
        (shapes::pi3_parallelogram(&q(2, 3)).unwrap(), 6, 2),
        (shapes::l_shape(), 4, 2),
        (shapes::default_broken_parallelogram(), 12, 5),
        (shapes::equilateral_triangle(&q(1, 1)).unwrap(), 6, 1),
        (shapes::pi5_isosceles_triangle(&q(1, 1)).unwrap(), 10, 2),
    ] {
        let epp = build_epp(&poly).unwrap();
        assert_eq!(epp.image_count(), images, "{}", poly.describe());
        let basis = period_basis(&epp).unwrap();
        assert_eq!(basis.genus, g);
        assert_eq!(basis.periods.len(), 2 * g);
        let pocs = find_pocs(&epp, 32);
        eprintln!(
            "{}: planar rank {} formal rank {} pocs {} pairs {} segs {:?}",
            poly.name().unwrap(),
            basis.planar_rank(),
            basis.formal_rank(),
            pocs.len(),
            epp.edge_pairs.len(),
            epp.side_segment_counts()
        );
        for p in &basis.periods {
            eprintln!("   {:?} {:?}", p.approx(), p.kind);
        }
    }
}

#[test]
fn rationalized_triangle() {
    let t0 = Instant::now();
    let tri = shapes::rationalized_right_triangle().unwrap();
    let epp = build_epp(&tri).unwrap();
    assert_eq!(epp.image_count(), 2000);
    assert_eq!(genus(&tri).unwrap(), 250);
    let basis = period_basis(&epp).unwrap();
    assert_eq!(basis.periods.len(), 500);
    eprintln!("triangle took {:?}", t0.elapsed());
}
