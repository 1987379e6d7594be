//! Three independent routes to the planar mixed area `A(P, Q)`.

use super::{ConvexPolygon, Vec2};
use crate::error::{Error, Result};

/// Angular distance under which a reference direction counts as colliding
/// with an edge normal.
pub const ANGLE_TOL: f64 = 1e-12;

/// Retries of the automatic reference direction.
pub const MAX_W_RETRIES: usize = 32;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `A(P, Q) = 1/2 Σ_u h_Q(u) S_P(u)` over the edge normals of `P`.
pub fn mixed_area_minkowski(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    0.5 * p.edges().iter().map(|e| q.h(e.normal) * e.length).sum::<f64>()
}

/// `(A(P ⊕ Q) - A(P) - A(Q)) / 2`.
pub fn mixed_area_oracle(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    0.5 * (p.minkowski_sum(q).area() - p.area() - q.area())
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs()
}

/// `w` strictly inside the cone spanned by `a` and `b` (which are not parallel).
fn in_open_cone(w: Vec2, a: Vec2, b: Vec2) -> bool {
    let det = a.cross(b);
    if det == 0.0 {
        return false;
    }
    // w = s a + t b by Cramer's rule
    let s = w.cross(b) / det;
    let t = a.cross(w) / det;
    s > 0.0 && t > 0.0
}

fn collision(w: Vec2, p: &ConvexPolygon, q: &ConvexPolygon) -> bool {
    p.edges().iter().any(|e| angle_between(w, e.normal) < ANGLE_TOL)
        || q.edges().iter().any(|e| angle_between(w, -e.normal) < ANGLE_TOL)
}

/// The `k`-th automatic reference direction: `(1, 0)` rotated by `2π frac(k/φ)`.
pub fn auto_direction(k: usize) -> Vec2 {
    let frac = (k as f64 * INV_GOLDEN).fract();
    Vec2::polar(std::f64::consts::TAU * frac)
}

/// Betke's formula: `2 A(P, Q) = Σ |det(u, v)| S_P(u) S_Q(v)` over pairs of
/// normals `u` of `P`, `v` of `Q` whose cone `pos{u, -v}` contains `w`.
///
/// `w` is normalized internally; a `w` within [`ANGLE_TOL`] of a normal of `P`
/// or of `-Q` is rejected with a suggested replacement.
pub fn mixed_area_betke(p: &ConvexPolygon, q: &ConvexPolygon, w: Vec2) -> Result<f64> {
    let w = w.normalized().ok_or_else(|| crate::error::domain("reference direction must be nonzero"))?;
    if collision(w, p, q) {
        let suggested = (1..=MAX_W_RETRIES)
            .map(|k| w.rotate(1e-3 * auto_direction(k).angle()))
            .find(|&c| !collision(c, p, q))
            .unwrap_or_else(|| w.rotate(1e-3));
        return Err(Error::RetryWithPerturbedW { rejected: w, suggested });
    }
    let ep = p.edges();
    let eq = q.edges();
    let mut sum = 0.0;
    for a in &ep {
        for b in &eq {
            if in_open_cone(w, a.normal, -b.normal) {
                sum += a.normal.cross(b.normal).abs() * a.length * b.length;
            }
        }
    }
    Ok(0.5 * sum)
}

/// Betke's formula with the deterministic automatic reference direction.
pub fn mixed_area_betke_auto(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<f64> {
    let mut last = None;
    for k in 0..MAX_W_RETRIES {
        match mixed_area_betke(p, q, auto_direction(k)) {
            Err(e @ Error::RetryWithPerturbedW { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `L(P)^2 - 6√3 A(P, -P)`, nonnegative for every convex polygon.
pub fn bw_deficit(p: &ConvexPolygon) -> f64 {
    let l = p.perimeter();
    l * l - 6.0 * 3f64.sqrt() * mixed_area_minkowski(p, &p.reflect())
}
