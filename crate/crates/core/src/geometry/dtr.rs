//! Distance to the nearest regular triangle in the sandwich sense: the least
//! `rho >= 0` such that some regular triangle `T` with centroid `z` satisfies
//! `T ⊂ K ⊂ z + (1 + rho)(T - z)`.
//!
//! For a fixed rotation the problem is a linear program after the substitution
//! `tau = 1/r`, `z' = z/r` (`r` the inradius of `T`). The outer loop scans the
//! rotation on a grid and refines the best cells by golden-section search. The
//! result is an upper bound with an explicit witness; it is approximate.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
use serde::Serialize;

use super::{ConvexPolygon, Vec2};
use crate::error::{Error, Result};

/// Rotation samples over one period `[0, 2π/3)`.
pub const THETA_GRID: usize = 64;
const PERIOD: f64 = std::f64::consts::TAU / 3.0;
const REFINE_CELLS: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct DtrResult {
    pub rho: f64,
    /// Inner regular triangle of the witness.
    pub triangle: ConvexPolygon,
    pub center: Vec2,
    pub theta: f64,
    pub inradius: f64,
    /// Always true: the optimizer gives an upper bound, not a certified value.
    pub approximate: bool,
}

/// Outward unit normals of a regular triangle rotated by `theta`.
pub fn triangle_normals(theta: f64) -> [Vec2; 3] {
    [0, 1, 2].map(|k| Vec2::polar(theta + PERIOD * k as f64))
}

/// Regular triangle with centroid `z`, inradius `r` and side normals `triangle_normals(theta)`.
pub fn regular_triangle(z: Vec2, r: f64, theta: f64) -> Result<ConvexPolygon> {
    let n = triangle_normals(theta);
    // vertex opposite side k sits at z - 2 r n_k; that order is counterclockwise
    ConvexPolygon::new(vec![z - n[0] * (2.0 * r), z - n[1] * (2.0 * r), z - n[2] * (2.0 * r)])
}

/// Best `(rho, z)` for a fixed rotation via the linear program; `None` on solver failure.
fn solve_fixed_theta(k: &ConvexPolygon, normals_k: &[(Vec2, f64)], theta: f64) -> Option<(f64, Vec2)> {
    let n = triangle_normals(theta);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let zx = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let zy = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let tau = lp.add_var(0.0, (0.0, f64::INFINITY));
    let big_r = lp.add_var(1.0, (0.0, f64::INFINITY));
    // K ⊂ z + R (T - z):  h_K(n_k) tau - <z', n_k> - R <= 0
    for nk in &n {
        lp.add_constraint(&[(tau, k.h(*nk)), (zx, -nk.x), (zy, -nk.y), (big_r, -1.0)], ComparisonOp::Le, 0.0);
    }
    // T ⊂ K:  <z', u> - h_K(u) tau <= 2 <n_k, u>  for every vertex of T
    for &(u, hu) in normals_k {
        for nk in &n {
            lp.add_constraint(&[(zx, u.x), (zy, u.y), (tau, -hu)], ComparisonOp::Le, 2.0 * nk.dot(u));
        }
    }
    let sol = match lp.solve() {
        Ok(SolveOutcome::Solution(s)) => s,
        _ => return None,
    };
    let t = sol[tau];
    if !(t > 0.0) {
        return None;
    }
    Some((sol[big_r] - 1.0, Vec2::new(sol[zx] / t, sol[zy] / t)))
}

/// Exact sandwich ratio for a given center and rotation: the largest inscribed
/// triangle and the smallest circumscribed homothetic copy. Returns `(rho, r_in)`.
pub fn polish(k: &ConvexPolygon, z: Vec2, theta: f64) -> Option<(f64, f64)> {
    let n = triangle_normals(theta);
    let mut r_in = f64::INFINITY;
    for e in k.edges() {
        let slack = k.h(e.normal) - z.dot(e.normal);
        if slack < 0.0 {
            return None;
        }
        for nk in &n {
            let d = nk.dot(e.normal);
            if d < 0.0 {
                r_in = r_in.min(slack / (-2.0 * d));
            }
        }
    }
    let r_out = n.iter().map(|nk| k.h(*nk) - z.dot(*nk)).fold(f64::NEG_INFINITY, f64::max);
    (r_in > 0.0 && r_in.is_finite()).then(|| ((r_out / r_in - 1.0).max(0.0), r_in))
}

fn consider(best: &mut Option<(f64, Vec2, f64)>, cand: Option<(f64, Vec2, f64)>) {
    if let Some(c) = cand {
        if best.is_none_or(|b| c.0 < b.0) {
            *best = Some(c);
        }
    }
}

/// Approximate `d_tr(K)`. `tol` bounds the rotation refinement.
pub fn d_tr(k: &ConvexPolygon, tol: f64) -> Result<DtrResult> {
    if !(tol > 0.0) {
        return Err(crate::error::domain("tolerance must be positive"));
    }
    let c = k.centroid();
    let s = k.scale();
    let kn = k.translate(-c).scale_about(Vec2::ZERO, 1.0 / s)?;
    let normals: Vec<(Vec2, f64)> = kn.edges().iter().map(|e| (e.normal, kn.h(e.normal))).collect();

    let eval = |theta: f64| -> Option<(f64, Vec2, f64)> {
        let (_, z) = solve_fixed_theta(&kn, &normals, theta)?;
        let (rho, _) = polish(&kn, z, theta)?;
        Some((rho, z, theta))
    };

    let grid: Vec<Option<(f64, Vec2, f64)>> = (0..THETA_GRID).map(|i| eval(PERIOD * i as f64 / THETA_GRID as f64)).collect();
    let mut best: Option<(f64, Vec2, f64)> = None;
    for g in &grid {
        consider(&mut best, *g);
    }
    if best.is_none() {
        return Err(Error::Approximation { best_rho: f64::INFINITY });
    }

    let mut order: Vec<usize> = (0..THETA_GRID).filter(|&i| grid[i].is_some()).collect();
    order.sort_by(|&a, &b| grid[a].unwrap().0.total_cmp(&grid[b].unwrap().0));
    let step = PERIOD / THETA_GRID as f64;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for &i in order.iter().take(REFINE_CELLS) {
        let center = PERIOD * i as f64 / THETA_GRID as f64;
        let (mut a, mut b) = (center - step, center + step);
        let f = |t: f64| eval(t).map_or(f64::INFINITY, |r| r.0);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        while b - a > tol.min(1e-6) {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = f(x2);
            }
        }
        consider(&mut best, eval(0.5 * (a + b)));
    }

    let (rho, z, theta) = best.expect("checked above");
    let (_, r_in) = polish(&kn, z, theta).ok_or(Error::Approximation { best_rho: rho })?;
    let center = c + z * s;
    let inradius = r_in * s;
    Ok(DtrResult { rho, triangle: regular_triangle(center, inradius, theta)?, center, theta: theta.rem_euclid(PERIOD), inradius, approximate: true })
}

/// Check `T ⊂ K ⊂ z + (1 + rho)(T - z)` up to `tol` (relative to the scale of `K`),
/// comparing support functions over the normals of both polygons.
pub fn sandwich_holds(k: &ConvexPolygon, t: &ConvexPolygon, z: Vec2, rho: f64, tol: f64) -> bool {
    let eps = tol * k.scale().max(1.0);
    let outer = t.translate(-z).scale_about(Vec2::ZERO, 1.0 + rho).map(|o| o.translate(z));
    let Ok(outer) = outer else { return false };
    k.contains_polygon(t, eps) && outer.contains_polygon(k, eps) && {
        // support comparison also along the normals of K for the outer containment
        k.edges().iter().all(|e| k.h(e.normal) <= outer.h(e.normal) + eps)
    }
}
