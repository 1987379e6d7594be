//! Side moves of equiangular polygons and the two vertex moves.

mod common;

use bwstab::deform::{deform, isoperimetric_ratio, kappa, regular_polygon_stats, varrho, vertex_shift, find_vertex_shift, EquiangularPolygon};
use bwstab::geometry::mixed::{bw_deficit, mixed_area_betke_auto, mixed_area_minkowski};
use bwstab::{ConvexPolygon, Error, Vec2};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_equiangular(seed: u64, k: usize) -> EquiangularPolygon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EquiangularPolygon::random(k, 0.5, 1.5, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn side_move_closed_forms(seed in any::<u64>(), kk in 0usize..3, i in 0usize..9, t in -1e-3..1e-3f64) {
        let k = [5, 7, 9][kk];
        let p = random_equiangular(seed, k);
        let q = p.perturb_side(i, t).unwrap();
        let base = p.to_polygon().unwrap();
        prop_assert!((q.perimeter() - base.perimeter() - p.perimeter_change(t)).abs() < 1e-9);
        let da = mixed_area_minkowski(&q, &q.reflect()) - mixed_area_minkowski(&base, &base.reflect());
        prop_assert!((da - p.mixed_area_change(i, t).unwrap()).abs() < 1e-9);
        // the moved polygon is still equiangular
        prop_assert!(EquiangularPolygon::from_polygon(&q).is_some());
    }

    #[test]
    fn derivative_matches_finite_differences(seed in any::<u64>(), i in 0usize..5) {
        let p = random_equiangular(seed, 5);
        let d = p.ratio_derivative(i).unwrap();
        let fd = p.ratio_derivative_fd(i, 1e-3).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs(), "{} {}", d, fd);
    }

    #[test]
    fn descent_exists_off_the_regular_polygon(seed in any::<u64>(), kk in 0usize..3) {
        let k = [5, 7, 9][kk];
        let p = random_equiangular(seed, k);
        prop_assume!(!p.is_regular(1e-6));
        let m = p.descent_move().unwrap();
        prop_assert!(m.decreases_ratio());
        let q = p.to_polygon().unwrap();
        prop_assert!(deform(&q).unwrap().decreases_ratio());
    }

    #[test]
    fn vertex_shift_keeps_the_mixed_area(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_convex(&mut rng, 5);
        if let Some((v, _)) = find_vertex_shift(&p) {
            let m = vertex_shift(&p, v).unwrap();
            prop_assert!(m.after.perimeter < m.before.perimeter);
            prop_assert!((m.after.self_mixed_area - m.before.self_mixed_area).abs() < 1e-9 * m.before.self_mixed_area.max(1.0));
        }
    }

    #[test]
    fn any_polygon_but_odd_regular_can_be_improved(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_convex(&mut rng, n);
        let m = deform(&p).unwrap();
        prop_assert!(m.after.ratio <= m.before.ratio);
        prop_assert!((m.before.ratio - isoperimetric_ratio(&p)).abs() < 1e-9 * m.before.ratio);
    }
}

#[test]
fn pentagon_constants() {
    assert!((kappa(5) - 1.4530850560107218).abs() < 1e-15);
    assert!((varrho(5) - 0.6180339887498949).abs() < 1e-15);
}

#[test]
fn regular_odd_polygons() {
    let mut last = 0.0;
    for k in [5, 7, 9, 11] {
        let s = regular_polygon_stats(k).unwrap();
        assert!((s.unit_self_mixed_area - s.unit_self_mixed_area_closed).abs() < 1e-9);
        assert!(s.ratio > last);
        last = s.ratio;
        assert!(s.deficit > 0.0);
        let p = ConvexPolygon::regular(k, 1.0, Vec2::ZERO, 0.1).unwrap();
        assert!(bw_deficit(&p) > 0.0);
        assert!(matches!(deform(&p), Err(Error::NotApplicable(_))));
    }
    assert!((regular_polygon_stats(7).unwrap().ratio - 12.148_744_695_291_628).abs() < 1e-9);
}

#[test]
fn vertex_slide_keeps_betke_value() {
    let p = ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.99, 0.99), Vec2::new(0.0, 1.0)]).unwrap();
    let m = deform(&p).unwrap();
    let before = mixed_area_betke_auto(&p, &p.reflect()).unwrap();
    let after = mixed_area_betke_auto(&m.polygon, &m.polygon.reflect()).unwrap();
    assert!((before - after).abs() < 1e-9);
    assert!(m.after.perimeter < m.before.perimeter);
}

#[test]
fn regular_derivative_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in [5, 7, 9, 11] {
        let p = EquiangularPolygon::regular(k, rng.random_range(0.1..3.0)).unwrap();
        for i in 0..k {
            assert!(p.ratio_derivative(i).unwrap().abs() < 1e-9);
        }
    }
}

