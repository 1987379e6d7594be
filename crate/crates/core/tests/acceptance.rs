//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any of them fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use bwstab::deform::{EquiangularPolygon, isoperimetric_ratio};
use bwstab::geometry::dtr::d_tr;
use bwstab::geometry::mixed::{bw_deficit, mixed_area_betke_auto, mixed_area_minkowski, mixed_area_oracle};
use bwstab::hexagon::{build_frame, chain_values, decompose};
use bwstab::interval::round::{Exact, Stepped};
use bwstab::lemma::certify::Inequality;
use bwstab::lemma::{eval_f_jet, spot_check_gradient, verify, LemmaPoint, VerifyConfig, A1, SIDE_MAX, T_MAX};
use bwstab::stability::{perturbed_triangle, stability_scan};
use bwstab::taylor::{hessian_enclosure, EnclosureMode};
use bwstab::{ConvexPolygon, IntervalBox, Vec2};
use common::{bump_hexagon, primitive_checks, random_convex, random_triangle, rel_err, to_f64, twice_area_exact};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok { Ok(msg) } else { Err(msg) }
}

fn mixed_area_formulas() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_betke, mut worst_oracle) = (0f64, 0f64);
    for _ in 0..1000 {
        let n = rng.random_range(3..=12);
        let m = rng.random_range(3..=12);
        let p = random_convex(&mut rng, n);
        let q = random_convex(&mut rng, m);
        let mink = mixed_area_minkowski(&p, &q);
        let scale = mink.abs().max(1.0);
        let betke = mixed_area_betke_auto(&p, &q).map_err(|e| e.to_string())?;
        worst_betke = worst_betke.max((mink - betke).abs() / scale);
        worst_oracle = worst_oracle.max((mink - mixed_area_oracle(&p, &q)).abs() / scale);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst_betke <= 1e-9 && worst_oracle <= 1e-9 && secs < 10.0,
        format!("1000 pairs, max scaled error betke {worst_betke:.2e} oracle {worst_oracle:.2e}, {secs:.2}s"),
    )
}

fn triangle_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0f64;
    for _ in 0..100 {
        let t = random_triangle(&mut rng);
        let exact = to_f64(&twice_area_exact(t.vertices()));
        worst = worst.max(rel_err(mixed_area_minkowski(&t, &t.reflect()), exact));
    }
    ensure(worst <= 1e-12, format!("100 triangles, max relative error {worst:.2e}"))
}

fn regular_odd_polygons() -> Check {
    let mut worst = 0f64;
    for k in [5usize, 7, 9, 11] {
        let s = (std::f64::consts::PI / k as f64).sin();
        // side 1/k, so perimeter 1
        let p = ConvexPolygon::regular(k, 1.0 / (2.0 * k as f64 * s), Vec2::ZERO, 0.3).map_err(|e| e.to_string())?;
        let expect = 1.0 / (4.0 * k as f64 * s);
        worst = worst.max((mixed_area_minkowski(&p, &p.reflect()) - expect).abs());
    }
    ensure(worst <= 1e-9, format!("k = 5, 7, 9, 11, max error {worst:.2e}"))
}

fn bump_hexagons() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for eps in [1e-2, 1e-4] {
        let h = bump_hexagon(eps);
        let err = rel_err(bw_deficit(&h), 36.0 * eps);
        let d = d_tr(&h, 1e-10).map_err(|e| e.to_string())?;
        ok &= err <= 1e-9 && d.rho >= eps.sqrt();
        lines.push(format!("eps {eps:e}: deficit rel err {err:.1e}, d_tr {:.6} vs {:.6}", d.rho, eps.sqrt()));
    }
    ensure(ok, lines.join("; "))
}

fn hessian_anchor() -> Check {
    let x0 = IntervalBox::point(&[2.0, 2.0, 0.0, 0.0, 0.0]).map_err(|e| e.to_string())?;
    let j = eval_f_jet(&x0, 6).map_err(|e| e.to_string())?;
    let h = hessian_enclosure(&j, &j, &x0, EnclosureMode::Enhanced).map_err(|e| e.to_string())?;
    let expect = [
        [12.0, -6.0, 0.0, 0.0, 0.0],
        [-6.0, 12.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 24.0, -12.0, -12.0],
        [0.0, 0.0, -12.0, 24.0, -12.0],
        [0.0, 0.0, -12.0, -12.0, 24.0],
    ];
    let entries_ok = (0..5).all(|i| (0..5).all(|k| h.get(i, k).contains(expect[i][k]) && h.get(i, k).width() <= 1e-9));
    let m = nalgebra::DMatrix::from_fn(5, 5, |i, k| h.get(i, k).mid());
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let target = [0.0, 6.0, 18.0, 36.0, 36.0];
    let eig_err = eig.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(
        entries_ok && eig_err <= 1e-9,
        format!("entries enclosed: {entries_ok}, max width {:.1e}, eigenvalue error {eig_err:.1e}", h.max_width()),
    )
}

fn critical_line() -> Check {
    let checks = spot_check_gradient().map_err(|e| e.to_string())?;
    let value = checks.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
    let grad = checks.iter().map(|c| c.fd_gradient_norm).fold(0.0, f64::max);
    ensure(value <= 1e-12 && grad <= 1e-6, format!("{} points, max |f| {value:.1e}, max gradient norm {grad:.1e}", checks.len()))
}

fn lemma_verification() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for ineq in [Inequality::Quadratic, Inequality::Norm] {
        let r = verify(ineq, &VerifyConfig::default(), None).map_err(|e| e.to_string())?;
        ok &= r.is_verified() && r.subsets_processed <= 1_000_000 && r.wall_time_secs <= 1800.0;
        lines.push(format!(
            "{} {} with {} subsets in {:.1}s (reference {} in {})",
            ineq.name(),
            r.status.label(),
            r.subsets_processed,
            r.wall_time_secs,
            r.reference_subsets,
            r.reference_wall_time
        ));
    }
    ensure(ok, lines.join("; "))
}

fn lemma_numeric_form() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let p = LemmaPoint::new(rng.random_range(A1..=SIDE_MAX), rng.random_range(A1..=SIDE_MAX), std::array::from_fn(|_| rng.random_range(0.0..=T_MAX)))
            .map_err(|e| e.to_string())?;
        // side i opposite vertex i, so the sides come out as (2, a2, a3)
        let t = ConvexPolygon::triangle_from_sides(p.a3, A1, p.a2).map_err(|e| e.to_string())?;
        let f = build_frame(&t, p.t).map_err(|e| e.to_string())?;
        let l = f.h0_perimeter_closed();
        let gap = l * l - 6.0 * 3f64.sqrt() * f.h2_self_mixed_closed();
        worst = worst.min(gap - p.dist2_to_critical_line());
    }
    ensure(worst >= -1e-9, format!("10000 points, min of gap minus squared distance {worst:.3e}"))
}

fn chain_inequality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let delta = 10f64.powf(rng.random_range(-6.0..-1.5));
        let k = perturbed_triangle(&mut rng, delta).map_err(|e| e.to_string())?;
        let d = decompose(&k).map_err(|e| e.to_string())?;
        let r = chain_values(&k, &d);
        worst = worst.min(r.deficit_k - r.deficit_h1).min(r.deficit_h1 - r.deficit_h0);
    }
    ensure(worst >= -1e-9, format!("200 perturbed triangles, min step {worst:.3e}"))
}

fn stability() -> Check {
    let s = stability_scan(200, 1).map_err(|e| e.to_string())?;
    ensure(
        s.samples.len() == 200 && s.violations == 0,
        format!("{} samples from {} candidates, {} violations, max d_tr/sqrt(eps) {:.2}", s.samples.len(), s.candidates, s.violations, s.max_ratio),
    )
}

fn deformation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut closed_err, mut fd_err, mut no_descent, mut regular) = (0f64, 0f64, 0usize, 0usize);
    for _ in 0..100 {
        let p = EquiangularPolygon::random(5, 0.5, 1.5, &mut rng).map_err(|e| e.to_string())?;
        let base = p.to_polygon().map_err(|e| e.to_string())?;
        for i in 0..5 {
            let t = rng.random_range(-1e-3..1e-3);
            let q = p.perturb_side(i, t).map_err(|e| e.to_string())?;
            let dl = q.perimeter() - base.perimeter();
            let da = mixed_area_minkowski(&q, &q.reflect()) - mixed_area_minkowski(&base, &base.reflect());
            closed_err = closed_err.max((dl - p.perimeter_change(t)).abs());
            closed_err = closed_err.max((da - p.mixed_area_change(i, t).map_err(|e| e.to_string())?).abs());
            let d = p.ratio_derivative(i).map_err(|e| e.to_string())?;
            let fd = p.ratio_derivative_fd(i, 1e-3).map_err(|e| e.to_string())?;
            fd_err = fd_err.max((d - fd).abs() / d.abs());
        }
        if p.is_regular(1e-9) {
            regular += 1;
            continue;
        }
        match p.descent_move() {
            Ok(m) if m.decreases_ratio() && m.after.ratio < isoperimetric_ratio(&base) => {}
            _ => no_descent += 1,
        }
    }
    ensure(
        closed_err <= 1e-9 && fd_err <= 1e-6 && no_descent == 0,
        format!("100 pentagons ({regular} regular), closed-form error {closed_err:.1e}, derivative relative error {fd_err:.1e}, {no_descent} without descent"),
    )
}

fn interval_soundness() -> Check {
    let bad = primitive_checks::<Stepped>(12, 50_000) + primitive_checks::<Exact>(13, 50_000);
    ensure(bad == 0, format!("100000 directed-rounding checks, {bad} failures"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("mixed-area formulas agree", mixed_area_formulas),
        ("triangle identity", triangle_identity),
        ("regular odd polygons", regular_odd_polygons),
        ("bump hexagon", bump_hexagons),
        ("Hessian at the anchor", hessian_anchor),
        ("critical line", critical_line),
        ("interval verification", lemma_verification),
        ("hexagon gap lower bound", lemma_numeric_form),
        ("deficit chain", chain_inequality),
        ("stability scan", stability),
        ("deformation", deformation),
        ("interval soundness", interval_soundness),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let (label, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2}: {label}  {name}: {detail} [{:.1}s]", n + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
