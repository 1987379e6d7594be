//! Hexagons associated with a maximal-area inscribed triangle.
//!
//! For a triangle `T = [v1, v2, v3]` with side `a_i` opposite `v_i` and
//! height `h_i`, the body `K` reaches `t_i h_i` beyond side `a_i`. The outer
//! hexagon `H2` is cut out by the three lines through `v_i` parallel to `a_i`
//! and the three parallel lines at distance `t_i h_i` beyond the sides. The
//! inner hexagons replace each side `a_i` of `T` by a tent: through a point
//! `q_i` of `K` on the outer line (`H1`), or through the point `p_i` of the
//! outer line on the perpendicular bisector of `a_i` (`H0`).

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{mixed_area_minkowski, ConvexPolygon, Vec2};

/// Tolerance for clamping width parameters into `[0, 1]`.
pub const CLAMP_TOL: f64 = 1e-9;
/// Slack allowed in the deficit chain, relative to `max(1, L(K)^2)`.
pub const CHAIN_SLACK: f64 = 1e-9;

const TIE_TOL: f64 = 1e-12;

/// Maximal-area triangle with vertices among those of `k`, found by exhaustive
/// search. Ties (within a relative `1e-12`) go to the lexicographically
/// smallest index triple. Vertices are returned counterclockwise.
pub fn max_inscribed_triangle(k: &ConvexPolygon) -> ConvexPolygon {
    let v = k.vertices();
    let n = v.len();
    let mut best = (0usize, 1usize, 2usize);
    let mut best_area = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let area = 0.5 * (v[j] - v[i]).cross(v[l] - v[i]);
                if area > best_area * (1.0 + TIE_TOL) {
                    best_area = area;
                    best = (i, j, l);
                }
            }
        }
    }
    ConvexPolygon::new(vec![v[best.0], v[best.1], v[best.2]]).expect("three vertices of a convex polygon in order")
}

/// Side lengths, heights and outward side normals of a triangle; index `i`
/// refers to the side opposite vertex `i`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TriangleFrame {
    pub v: [Vec2; 3],
    pub a: [f64; 3],
    pub h: [f64; 3],
    pub n: [Vec2; 3],
}

impl TriangleFrame {
    pub fn new(t: &ConvexPolygon) -> Result<Self> {
        if t.len() != 3 {
            return Err(domain(format!("expected a triangle, got {} vertices", t.len())));
        }
        let v = [t.vertex(0), t.vertex(1), t.vertex(2)];
        let two_area = 2.0 * t.area();
        let mut a = [0.0; 3];
        let mut h = [0.0; 3];
        let mut n = [Vec2::ZERO; 3];
        for i in 0..3 {
            let (p, q) = (v[(i + 1) % 3], v[(i + 2) % 3]);
            a[i] = p.dist(q);
            h[i] = two_area / a[i];
            n[i] = (q - p).perp_cw() * (1.0 / a[i]);
        }
        Ok(TriangleFrame { v, a, h, n })
    }

    pub fn side_midpoint(&self, i: usize) -> Vec2 {
        (self.v[(i + 1) % 3] + self.v[(i + 2) % 3]) * 0.5
    }

    pub fn area(&self) -> f64 {
        0.5 * self.a[0] * self.h[0]
    }

    pub fn perimeter(&self) -> f64 {
        self.a.iter().sum()
    }

    /// Offset of the line through vertex `i` parallel to side `i`, along `n_i`.
    fn vertex_offset(&self, i: usize) -> f64 {
        self.v[i].dot(self.n[i])
    }

    /// Offset of the outer line parallel to side `i`, along `n_i`.
    fn outer_offset(&self, i: usize, t: f64) -> f64 {
        self.v[(i + 1) % 3].dot(self.n[i]) + t * self.h[i]
    }
}

fn intersect_lines(n1: Vec2, c1: f64, n2: Vec2, c2: f64) -> Result<Vec2> {
    let det = n1.cross(n2);
    if det.abs() < 1e-300 {
        return Err(Error::InvariantViolation("parallel lines in hexagon frame".into()));
    }
    Ok(Vec2::new((c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det))
}

/// `t_i = width(K, n_i) / h_i - 1`, clamped into `[0, 1]` when within [`CLAMP_TOL`].
pub fn width_params(k: &ConvexPolygon, t: &ConvexPolygon) -> Result<[f64; 3]> {
    let fr = TriangleFrame::new(t)?;
    let mut out = [0.0; 3];
    for i in 0..3 {
        let raw = k.width(fr.n[i]) / fr.h[i] - 1.0;
        out[i] = if raw < -CLAMP_TOL {
            return Err(Error::InvariantViolation(format!("t_{} = {raw} < 0: K is narrower than T", i + 1)));
        } else if raw > 1.0 + CLAMP_TOL {
            return Err(Error::InvariantViolation(format!("t_{} = {raw} > 1 contradicts maximality of T", i + 1)));
        } else {
            raw.clamp(0.0, 1.0)
        };
    }
    Ok(out)
}

/// The parts of the construction that depend only on `T` and `t`.
#[derive(Debug, Clone, Serialize)]
pub struct HexagonFrame {
    pub triangle: TriangleFrame,
    pub t: [f64; 3],
    /// `w[i][j]`: vertex line `i` meets outer line `j` (`i != j`); diagonal unused.
    pub w: [[Vec2; 3]; 3],
    pub p: [Vec2; 3],
    /// `[v1, p3, v2, p1, v3, p2]`, counterclockwise when convex.
    pub h0: Vec<Vec2>,
    pub h0_convex: bool,
    pub h2: ConvexPolygon,
}

impl HexagonFrame {
    /// Perimeter of `H0` from its vertex list, valid whether or not it is convex.
    pub fn h0_perimeter(&self) -> f64 {
        (0..6).map(|i| self.h0[i].dist(self.h0[(i + 1) % 6])).sum()
    }

    /// `Σ sqrt(a_i^2 + 4 t_i^2 h_i^2)`.
    pub fn h0_perimeter_closed(&self) -> f64 {
        let f = &self.triangle;
        (0..3).map(|i| (f.a[i] * f.a[i] + 4.0 * self.t[i] * self.t[i] * f.h[i] * f.h[i]).sqrt()).sum()
    }

    /// `2 A(T) (1 + t1 t2 + t2 t3 + t3 t1)`.
    pub fn h2_self_mixed_closed(&self) -> f64 {
        let t = self.t;
        2.0 * self.triangle.area() * (1.0 + t[0] * t[1] + t[1] * t[2] + t[2] * t[0])
    }
}

fn is_convex_ccw(v: &[Vec2]) -> bool {
    let n = v.len();
    (0..n).all(|i| {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        (b - a).cross(c - b) >= 0.0
    })
}

/// Build `H0` and `H2` from a triangle and parameters `t_i >= 0`, without `K`.
pub fn build_frame(t: &ConvexPolygon, params: [f64; 3]) -> Result<HexagonFrame> {
    if params.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(domain(format!("width parameters must be nonnegative, got {params:?}")));
    }
    let fr = TriangleFrame::new(t)?;
    let mut w = [[Vec2::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                // the vertex line has outward normal -n_i
                w[i][j] = intersect_lines(-fr.n[i], -fr.vertex_offset(i), fr.n[j], fr.outer_offset(j, params[j]))?;
            }
        }
    }
    let p: [Vec2; 3] = [0, 1, 2].map(|i| fr.side_midpoint(i) + fr.n[i] * (params[i] * fr.h[i]));
    let h0 = vec![fr.v[0], p[2], fr.v[1], p[0], fr.v[2], p[1]];
    let h0_convex = is_convex_ccw(&h0);
    // counterclockwise around H2: outer line 3 (w13 -> w23), vertex line 2, outer 1, vertex 3, outer 2, vertex 1
    let ring = vec![w[0][2], w[1][2], w[1][0], w[2][0], w[2][1], w[0][1]];
    let h2 = ConvexPolygon::new(ring.clone()).or_else(|_| ConvexPolygon::hull_of(&ring))?;
    Ok(HexagonFrame { triangle: fr, t: params, w, p, h0, h0_convex, h2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct HexagonDecomposition {
    pub triangle: ConvexPolygon,
    pub frame: HexagonFrame,
    pub q: [Vec2; 3],
    pub h1: ConvexPolygon,
}

impl HexagonDecomposition {
    pub fn t(&self) -> [f64; 3] {
        self.frame.t
    }
}

/// Midpoint of the face of `k` with outward direction `u`.
fn support_face_midpoint(k: &ConvexPolygon, u: Vec2) -> Vec2 {
    let hk = k.h(u);
    let tol = 1e-12 * k.scale() * u.norm();
    let on: Vec<Vec2> = k.vertices().iter().copied().filter(|v| v.dot(u) >= hk - tol).collect();
    let along = u.perp_cw();
    let lo = on.iter().copied().min_by(|a, b| a.dot(along).total_cmp(&b.dot(along))).expect("nonempty face");
    let hi = on.iter().copied().max_by(|a, b| a.dot(along).total_cmp(&b.dot(along))).expect("nonempty face");
    (lo + hi) * 0.5
}

/// Full decomposition of `k` for the triangle `t` and parameters `params`,
/// validating `T ⊂ H1 ⊂ K ⊂ H2`.
pub fn build_hexagons(k: &ConvexPolygon, t: &ConvexPolygon, params: [f64; 3]) -> Result<HexagonDecomposition> {
    let frame = build_frame(t, params)?;
    let fr = frame.triangle;
    let q: [Vec2; 3] = [0, 1, 2].map(|i| support_face_midpoint(k, fr.n[i]));
    let ring = vec![fr.v[0], q[2], fr.v[1], q[0], fr.v[2], q[1]];
    let h1 = ConvexPolygon::new(ring.clone()).or_else(|_| ConvexPolygon::hull_of(&ring))?;
    let tol = 1e-9 * k.scale().max(1.0);
    let checks = [
        (h1.contains_polygon(t, tol), "T ⊂ H1"),
        (k.contains_polygon(&h1, tol), "H1 ⊂ K"),
        (frame.h2.contains_polygon(k, tol), "K ⊂ H2"),
    ];
    for (ok, what) in checks {
        if !ok {
            return Err(Error::InvariantViolation(format!("containment {what} fails")));
        }
    }
    // the points q_i must lie on the outer lines
    for i in 0..3 {
        let off = q[i].dot(fr.n[i]) - fr.outer_offset(i, params[i]);
        if off.abs() > tol {
            return Err(Error::InvariantViolation(format!("q_{} is {off} off the outer line", i + 1)));
        }
    }
    Ok(HexagonDecomposition { triangle: t.clone(), frame, q, h1 })
}

/// Decompose `k` with its maximal inscribed triangle.
pub fn decompose(k: &ConvexPolygon) -> Result<HexagonDecomposition> {
    let t = max_inscribed_triangle(k);
    let params = width_params(k, &t)?;
    build_hexagons(k, &t, params)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    /// `L(K)^2 - 6√3 A(K, -K)`.
    pub deficit_k: f64,
    /// `L(H1)^2 - 6√3 A(H2, -H2)`.
    pub deficit_h1: f64,
    /// `L(H0)^2 - 6√3 A(H2, -H2)`.
    pub deficit_h0: f64,
    pub t: [f64; 3],
    pub h0_convex: bool,
    pub slack: f64,
}

const SIX_ROOT3: f64 = 10.392_304_845_413_264;

/// Compute the three deficits and check they decrease, within
/// `CHAIN_SLACK * max(1, L(K)^2)`.
pub fn chain_check(k: &ConvexPolygon) -> Result<ChainReport> {
    let d = decompose(k)?;
    let report = chain_values(k, &d);
    if report.deficit_k < report.deficit_h1 - report.slack || report.deficit_h1 < report.deficit_h0 - report.slack {
        return Err(Error::InvariantViolation(format!(
            "deficit chain broken: {} >= {} >= {} fails",
            report.deficit_k, report.deficit_h1, report.deficit_h0
        )));
    }
    Ok(report)
}

pub fn chain_values(k: &ConvexPolygon, d: &HexagonDecomposition) -> ChainReport {
    let lk = k.perimeter();
    let a_h2 = mixed_area_minkowski(&d.frame.h2, &d.frame.h2.reflect());
    let l1 = d.h1.perimeter();
    let l0 = d.frame.h0_perimeter();
    ChainReport {
        deficit_k: lk * lk - SIX_ROOT3 * mixed_area_minkowski(k, &k.reflect()),
        deficit_h1: l1 * l1 - SIX_ROOT3 * a_h2,
        deficit_h0: l0 * l0 - SIX_ROOT3 * a_h2,
        t: d.t(),
        h0_convex: d.frame.h0_convex,
        slack: CHAIN_SLACK * (lk * lk).max(1.0),
    }
}

/// For a triangle with sides `r1, r2, r3` and area at least `xi * r1`,
/// check `r2 + r3 >= r1 + xi^2 / r1` (up to `1e-12`).
pub fn claim_33_check(r1: f64, r2: f64, r3: f64, xi: f64) -> Result<bool> {
    let s = [r1, r2, r3];
    if s.iter().any(|x| !(*x > 0.0)) || r1 + r2 < r3 || r2 + r3 < r1 || r3 + r1 < r2 {
        return Err(domain(format!("({r1}, {r2}, {r3}) are not the sides of a triangle")));
    }
    if !(0.0..=r1).contains(&xi) {
        return Err(domain(format!("xi = {xi} outside [0, {r1}]")));
    }
    let p = 0.5 * (r1 + r2 + r3);
    let area = (p * (p - r1) * (p - r2) * (p - r3)).max(0.0).sqrt();
    if area < xi * r1 * (1.0 - 1e-12) {
        return Err(domain(format!("area {area} below xi * r1 = {}", xi * r1)));
    }
    Ok(r2 + r3 >= r1 + xi * xi / r1 - 1e-12)
}
