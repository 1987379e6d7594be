//! Properties of the Hessian enclosures, the certificates and the verifier.

mod common;

use bwstab::hexagon::build_frame;
use bwstab::lemma::certify::{certify, form_f64, test_vector_f64, Inequality};
use bwstab::lemma::{
    eval_f, eval_f_point, fd_gradient, fd_hessian_ftilde, hessian_ftilde, hessian_minor, rotated_box, rotated_box_contains_image, spot_check_gradient, verify, BasisChange,
    LemmaPoint, VerifyConfig, VerifyStatus, A1, SIDE_MAX, T_MAX,
};
use bwstab::taylor::EnclosureMode;
use bwstab::{ConvexPolygon, IntervalBox};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotated_point(u: [f64; 5]) -> [f64; 5] {
    let b = rotated_box();
    std::array::from_fn(|i| b.get(i).lo() + u[i] * b.get(i).width())
}

/// A sub-box of the rotated box with relative size `scale` around `u`.
fn sub_box(u: [f64; 5], scale: f64) -> IntervalBox {
    let b = rotated_box();
    let bounds: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let d = b.get(i);
            let w = d.width() * scale;
            let lo = d.lo() + u[i] * (d.width() - w);
            (lo, lo + w)
        })
        .collect();
    IntervalBox::from_bounds(&bounds).unwrap()
}

fn sample_in(b: &IntervalBox, rng: &mut ChaCha8Rng) -> [f64; 5] {
    std::array::from_fn(|i| {
        let d = b.get(i);
        d.lo() + rng.random_range(0.0..=1.0) * d.width()
    })
}

/// Near-exact Hessian at a point: the point-box enclosure midpoint.
fn point_hessian(basis: &BasisChange, y: &[f64; 5]) -> Vec<Vec<f64>> {
    hessian_ftilde(basis, &IntervalBox::point(y).unwrap(), 2, EnclosureMode::Fallback).unwrap().enclosure.midpoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_differences_match_point_enclosure(u in prop::array::uniform5(0.0..1.0f64)) {
        let basis = BasisChange::new();
        let y = rotated_point(u);
        let h = 1e-4;
        let fd = fd_hessian_ftilde(&basis, &y, h).unwrap();
        let ad = point_hessian(&basis, &y);
        let tol = (1e-5f64).max(1e3 * h * h);
        for i in 0..5 {
            for j in 0..5 {
                prop_assert!((fd[i][j] - ad[i][j]).abs() <= tol * ad[i][j].abs().max(1.0), "{} {} {} {}", i, j, fd[i][j], ad[i][j]);
            }
        }
    }

    #[test]
    fn enclosure_contains_pointwise_hessians(u in prop::array::uniform5(0.0..1.0f64), scale in 0.01..0.3f64, seed in any::<u64>()) {
        let basis = BasisChange::new();
        let b = sub_box(u, scale);
        let enh = hessian_ftilde(&basis, &b, 6, EnclosureMode::Enhanced).unwrap().enclosure;
        let fb = hessian_ftilde(&basis, &b, 6, EnclosureMode::Fallback).unwrap().enclosure;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let y = sample_in(&b, &mut rng);
            let p = hessian_ftilde(&basis, &IntervalBox::point(&y).unwrap(), 2, EnclosureMode::Fallback).unwrap().enclosure;
            for i in 0..5 {
                for j in 0..5 {
                    prop_assert!(p.get(i, j).is_subset_of(&enh.get(i, j)));
                }
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                prop_assert!(enh.get(i, j).width() <= fb.get(i, j).width());
            }
        }
    }

    #[test]
    fn passing_leaves_hold_at_samples(u in prop::array::uniform5(0.0..1.0f64), face in 0usize..4, v in prop::array::uniform3(-1.0..1.0f64), seed in any::<u64>()) {
        let basis = BasisChange::new();
        let b = sub_box(u, 0.02);
        let vb = IntervalBox::from_bounds(&v.map(|c| (c.min(0.95), c.min(0.95) + 0.05))).unwrap();
        let h = hessian_minor(&basis, &b, 6, EnclosureMode::Enhanced).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ineq in [Inequality::Quadratic, Inequality::Norm] {
            if !certify(ineq, &h.enclosure, face, &vb).passes() {
                continue;
            }
            for _ in 0..100 {
                let y = sample_in(&b, &mut rng);
                let hy: Vec<Vec<f64>> = point_hessian(&basis, &y).into_iter().take(4).map(|r| r[..4].to_vec()).collect();
                let vv: Vec<f64> = (0..3).map(|i| vb.get(i).lo() + rng.random_range(0.0..=1.0) * vb.get(i).width()).collect();
                prop_assert!(form_f64(ineq, &hy, &test_vector_f64(face, &vv)) >= -1e-9);
            }
        }
    }

    #[test]
    fn lemma_function_dominates_distance(a2 in A1..=SIDE_MAX, a3 in A1..=SIDE_MAX, t in prop::array::uniform3(0.0..=T_MAX)) {
        let p = LemmaPoint::new(a2, a3, t).unwrap();
        prop_assert!(eval_f_point(&p).unwrap() >= p.dist2_to_critical_line() - 1e-9);
    }
}

/// `L(H0)^2 - 6√3 A(H2, -H2)` from the hexagon closed forms for a triangle
/// with sides `(2, a2, a3)`.
fn hexagon_gap(p: &LemmaPoint) -> f64 {
    // vertices ordered so that side i is opposite vertex i
    let t = ConvexPolygon::triangle_from_sides(p.a3, A1, p.a2).unwrap();
    let f = build_frame(&t, p.t).unwrap();
    assert!((f.triangle.a[0] - A1).abs() < 1e-12 && (f.triangle.a[1] - p.a2).abs() < 1e-12);
    let l = f.h0_perimeter_closed();
    l * l - 6.0 * 3f64.sqrt() * f.h2_self_mixed_closed()
}

#[test]
fn lemma_function_bounds_the_hexagon_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for _ in 0..1000 {
        let p = LemmaPoint::new(rng.random_range(A1..=SIDE_MAX), rng.random_range(A1..=SIDE_MAX), std::array::from_fn(|_| rng.random_range(0.0..=T_MAX))).unwrap();
        let g = hexagon_gap(&p);
        let f = eval_f_point(&p).unwrap();
        assert!(g >= f - 1e-9, "{g} < {f}");
        assert!(f >= p.dist2_to_critical_line() - 1e-9);
    }
    // equality on the critical line, where the side and width vectors are parallel
    for t in [0.0, 0.05, 0.1, T_MAX] {
        let p = LemmaPoint::new(A1, A1, [t; 3]).unwrap();
        assert!((hexagon_gap(&p) - eval_f_point(&p).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn critical_line_spot_checks() {
    for c in spot_check_gradient().unwrap() {
        assert!(c.value.abs() <= 1e-12, "{c:?}");
        assert!(c.fd_gradient_norm <= 1e-6, "{c:?}");
        assert!(c.ad_gradient_contains_zero, "{c:?}");
    }
    let g = fd_gradient(&[2.05, 2.03, 0.1, 0.05, 0.02], 1e-5).unwrap();
    assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3);
    assert!(eval_f(&[2.05, 2.03, 0.1, 0.05, 0.02]).unwrap() > 0.0);
}

#[test]
fn rotated_box_holds_the_image() {
    assert!(rotated_box_contains_image());
}

#[test]
fn enclosures_shrink_with_the_box() {
    let basis = BasisChange::new();
    let c = [2.05, 2.05, 0.0, 0.0, 0.15];
    let mut last = f64::INFINITY;
    for w in [1e-1, 1e-2, 1e-3, 1e-4] {
        let b = IntervalBox::from_bounds(&c.map(|x| (x - w / 2.0, x + w / 2.0))).unwrap();
        let mw = hessian_ftilde(&basis, &b, 6, EnclosureMode::Enhanced).unwrap().enclosure.max_width();
        assert!(mw < last, "{w}: {mw} !< {last}");
        last = mw;
    }
    assert!(last < 1e-2);
}

fn small_config(workers: usize) -> VerifyConfig {
    VerifyConfig { max_subsets: 300, workers: Some(workers), ..VerifyConfig::default() }
}

#[test]
fn counts_do_not_depend_on_worker_count() {
    for ineq in [Inequality::Quadratic, Inequality::Norm] {
        let a = verify(ineq, &small_config(1), None).unwrap();
        let b = verify(ineq, &small_config(3), None).unwrap();
        assert_eq!(a.status.label(), b.status.label());
        assert_eq!((a.subsets_processed, a.boxes_examined, a.hessian_evaluations, a.max_depth), (b.subsets_processed, b.boxes_examined, b.hessian_evaluations, b.max_depth));
        let fa = serde_json::to_string(&a.status).unwrap();
        let fb = serde_json::to_string(&b.status).unwrap();
        assert_eq!(fa, fb);
    }
}

#[test]
fn logs_do_not_depend_on_worker_count() {
    let run = |w| {
        let mut buf: Vec<u8> = Vec::new();
        verify(Inequality::Norm, &small_config(w), Some(&mut buf as &mut (dyn std::io::Write + Send))).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let (a, b) = (run(1), run(2));
    assert!(a.starts_with("# bwstab verify log v1"));
    assert_eq!(a, b);
}

#[test]
fn budget_exhaustion_is_reported() {
    let cfg = VerifyConfig { max_subsets: 10, ..VerifyConfig::default() };
    let r = verify(Inequality::Quadratic, &cfg, None).unwrap();
    assert!(matches!(r.status, VerifyStatus::BudgetExceeded { .. }));
}

#[test]
fn enlarged_box_is_not_certified() {
    // far along the diagonal of the width parameters the bound is false
    let wbox = IntervalBox::from_bounds(&[(2.0, 2.2), (2.0, 2.2), (-0.14, 0.14), (-0.14, 0.14), (0.0, 3.0)]).unwrap();
    let q = verify(Inequality::Quadratic, &VerifyConfig { wbox: wbox.clone(), max_subsets: 2_000, ..VerifyConfig::default() }, None).unwrap();
    assert!(matches!(q.status, VerifyStatus::Failed { center_value, .. } if center_value < 0.0), "{}", q.status.label());
    let n = verify(Inequality::Norm, &VerifyConfig { wbox, max_subsets: 2_000, ..VerifyConfig::default() }, None).unwrap();
    assert!(!n.is_verified());
}
