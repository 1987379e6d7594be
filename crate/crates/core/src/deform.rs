//! Perimeter-reducing deformations of convex polygons, and the first-order
//! behaviour of `A(P, -P) / L(P)^2` under moving one side of an equiangular
//! polygon.

use std::f64::consts::{PI, TAU};

use rand::{Rng, RngExt};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::dtr::d_tr;
use crate::geometry::mixed::{bw_deficit, mixed_area_minkowski};
use crate::geometry::{ConvexPolygon, Vec2};

/// Cone memberships and angle comparisons use this slack (radians or
/// Cramer coefficients).
pub const CONE_TOL: f64 = 1e-12;

/// Two angles closer than this count as halving a normal cone.
pub const HALVE_TOL: f64 = 1e-9;

/// Relative tolerance for recognising an equiangular polygon.
pub const EQUIANGULAR_TOL: f64 = 1e-9;

/// Relative change of `A(P, -P)` still counted as none in a vertex shift.
const SAME_AREA_TOL: f64 = 1e-12;

/// `L(P_t) - L(P) = κ t` when one side line moves outward by `t`.
pub fn kappa(k: usize) -> f64 {
    let a = TAU / k as f64;
    2.0 * (1.0 - a.cos()) / a.sin()
}

/// Coefficient of the mixed-area change: `sin(π/k) / sin(2π/k)`.
pub fn varrho(k: usize) -> f64 {
    (PI / k as f64).sin() / (TAU / k as f64).sin()
}

/// `L(P)^2 / A(P, -P)`.
pub fn isoperimetric_ratio(p: &ConvexPolygon) -> f64 {
    let l = p.perimeter();
    l * l / mixed_area_minkowski(p, &p.reflect())
}

/// A polygon whose edge `i` points in direction `phase + 2πi/k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquiangularPolygon {
    sides: Vec<f64>,
    phase: f64,
}

impl EquiangularPolygon {
    /// Side lengths must be positive and the edge vectors must close up.
    pub fn new(sides: Vec<f64>, phase: f64) -> Result<Self> {
        let k = sides.len();
        if k < 3 {
            return Err(domain("equiangular polygon needs at least 3 sides"));
        }
        if sides.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(domain("side lengths must be positive and finite"));
        }
        let p = EquiangularPolygon { sides, phase };
        let gap = p.closure_gap();
        if gap > EQUIANGULAR_TOL * p.perimeter() {
            return Err(domain(format!("edge vectors do not close (gap {gap:e})")));
        }
        Ok(p)
    }

    pub fn regular(k: usize, side: f64) -> Result<Self> {
        Self::new(vec![side; k], 0.0)
    }

    /// Recognise an equiangular polygon; `None` if some exterior angle differs
    /// from `2π/k`.
    pub fn from_polygon(p: &ConvexPolygon) -> Option<Self> {
        let edges = p.edges();
        let k = edges.len();
        let step = TAU / k as f64;
        for i in 0..k {
            let a = edges[i].end - edges[i].start;
            let b = edges[(i + 1) % k].end - edges[(i + 1) % k].start;
            let turn = a.cross(b).atan2(a.dot(b));
            if (turn - step).abs() > EQUIANGULAR_TOL {
                return None;
            }
        }
        let phase = (edges[0].end - edges[0].start).angle();
        let sides = edges.iter().map(|e| e.length).collect();
        let q = EquiangularPolygon { sides, phase };
        // the rebuilt polygon starts at the origin
        Some(q).filter(|q| q.closure_gap() <= 1e-7 * q.perimeter())
    }

    /// Project side lengths onto the closure constraint, then check positivity.
    pub fn closed_from(sides: &[f64], phase: f64) -> Result<Self> {
        let k = sides.len();
        let mut e = sides.to_vec();
        // the two constraint rows are orthogonal with squared norm k/2
        let (mut cx, mut cy) = (0.0, 0.0);
        for (i, &s) in e.iter().enumerate() {
            let d = Self::direction_of(phase, k, i);
            cx += s * d.x;
            cy += s * d.y;
        }
        for (i, s) in e.iter_mut().enumerate() {
            let d = Self::direction_of(phase, k, i);
            *s -= 2.0 / k as f64 * (cx * d.x + cy * d.y);
        }
        Self::new(e, phase)
    }

    /// Random equiangular polygon with sides drawn from `[lo, hi]` before projection.
    pub fn random<R: Rng + ?Sized>(k: usize, lo: f64, hi: f64, rng: &mut R) -> Result<Self> {
        if !(0.0 < lo && lo < hi) {
            return Err(domain("need 0 < lo < hi"));
        }
        for _ in 0..1000 {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
            let phase = rng.random_range(0.0..TAU);
            if let Ok(p) = Self::closed_from(&raw, phase) {
                if p.sides.iter().all(|&e| e > 1e-3 * hi) {
                    return Ok(p);
                }
            }
        }
        Err(domain("could not sample a closed equiangular polygon"))
    }

    fn direction_of(phase: f64, k: usize, i: usize) -> Vec2 {
        Vec2::polar(phase + TAU * i as f64 / k as f64)
    }

    fn closure_gap(&self) -> f64 {
        let k = self.k();
        (0..k).fold(Vec2::ZERO, |acc, i| acc + self.direction(i) * self.sides[i]).norm()
    }

    pub fn k(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> f64 {
        self.sides[i % self.k()]
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        let mean = self.perimeter() / self.k() as f64;
        self.sides.iter().all(|e| (e - mean).abs() <= tol * mean)
    }

    /// Unit direction of edge `i`.
    pub fn direction(&self, i: usize) -> Vec2 {
        Self::direction_of(self.phase, self.k(), i % self.k())
    }

    /// Exterior unit normal of edge `i`.
    pub fn normal(&self, i: usize) -> Vec2 {
        self.direction(i).perp_cw()
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }

    pub fn vertices(&self) -> Vec<Vec2> {
        let mut v = Vec2::ZERO;
        (0..self.k())
            .map(|i| {
                let here = v;
                v = v + self.direction(i) * self.sides[i];
                here
            })
            .collect()
    }

    pub fn to_polygon(&self) -> Result<ConvexPolygon> {
        ConvexPolygon::new(self.vertices())
    }

    /// The offset `m` with `-u_i` strictly inside `pos{u_{i+m-1}, u_{i+m}}`,
    /// read off the normal fan. `None` when `-u_i` is itself a normal.
    pub fn opposite_offset(&self, i: usize) -> Option<usize> {
        let k = self.k();
        let target = -self.normal(i);
        (1..k).find(|&m| {
            let a = self.normal(i + m - 1);
            let b = self.normal(i + m);
            in_cone(target, a, b, CONE_TOL) && a.cross(target).abs() > CONE_TOL && target.cross(b).abs() > CONE_TOL
        })
    }

    fn opposite_pair(&self, i: usize) -> Result<f64> {
        let m = self.opposite_offset(i).ok_or_else(|| domain(format!("side {i} has a parallel opposite side")))?;
        Ok(self.side(i + m) + self.side(i + m - 1))
    }

    /// The polygon bounded by the other side lines and side line `i` moved
    /// outward by `t`, built from the line intersections.
    pub fn perturb_side(&self, i: usize, t: f64) -> Result<ConvexPolygon> {
        let k = self.k();
        let i = i % k;
        let verts = self.vertices();
        let mut offsets: Vec<f64> = (0..k).map(|j| self.normal(j).dot(verts[j])).collect();
        offsets[i] += t;
        let corner = |j: usize| -> Option<Vec2> {
            let (a, b) = ((j + k - 1) % k, j);
            intersect_lines(self.normal(a), offsets[a], self.normal(b), offsets[b])
        };
        let moved: Vec<Vec2> = (0..k).map(corner).collect::<Option<_>>().ok_or_else(|| domain("side lines do not intersect"))?;
        for j in 0..k {
            let len = (moved[(j + 1) % k] - moved[j]).dot(self.direction(j));
            if !(len > 0.0) {
                return Err(domain(format!("moving side {i} by {t} collapses side {j}")));
            }
        }
        ConvexPolygon::new(moved)
    }

    /// Closed form of `L(P_{i,t}) - L(P)`.
    pub fn perimeter_change(&self, t: f64) -> f64 {
        kappa(self.k()) * t
    }

    /// Closed form of `A(P_{i,t}, -P_{i,t}) - A(P, -P)`.
    pub fn mixed_area_change(&self, i: usize, t: f64) -> Result<f64> {
        Ok(self.opposite_pair(i)? * varrho(self.k()) * t)
    }

    /// `A(P, -P)` by the support-function formula.
    pub fn self_mixed_area(&self) -> Result<f64> {
        let p = self.to_polygon()?;
        Ok(mixed_area_minkowski(&p, &p.reflect()))
    }

    /// `d/dt [A(P_{i,t}, -P_{i,t}) / L(P_{i,t})^2]` at `t = 0`.
    pub fn ratio_derivative(&self, i: usize) -> Result<f64> {
        let l = self.perimeter();
        let a = self.self_mixed_area()?;
        Ok((self.opposite_pair(i)? * varrho(self.k()) * l - a * 2.0 * kappa(self.k())) / (l * l * l))
    }

    /// Five-point central difference of `A / L^2` along the side move, for
    /// cross-checks.
    pub fn ratio_derivative_fd(&self, i: usize, h: f64) -> Result<f64> {
        let r = |t: f64| -> Result<f64> {
            let p = self.perturb_side(i, t)?;
            Ok(1.0 / isoperimetric_ratio(&p))
        };
        Ok((8.0 * (r(h)? - r(-h)?) - (r(2.0 * h)? - r(-2.0 * h)?)) / (12.0 * h))
    }

    /// Move the side with the largest derivative magnitude in the direction
    /// that lowers `L^2 / A(P, -P)`, shrinking the step until it does.
    pub fn descent_move(&self) -> Result<DeformMove> {
        let k = self.k();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..k {
            let d = self.ratio_derivative(i)?;
            if best.is_none_or(|(_, b)| d.abs() > b.abs()) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.expect("k >= 3");
        let before = self.to_polygon()?;
        let r0 = isoperimetric_ratio(&before);
        if d.abs() <= 1e-12 * r0.recip() / self.perimeter() {
            return Err(Error::NotApplicable("every side derivative vanishes".into()));
        }
        let mut t = 1e-3 * self.perimeter() * d.signum();
        for _ in 0..60 {
            if let Ok(after) = self.perturb_side(i, t) {
                if isoperimetric_ratio(&after) < r0 {
                    return Ok(DeformMove::new(MoveKind::SidePerturbation { side: i, t, derivative: d }, &before, after));
                }
            }
            t *= 0.5;
        }
        Err(Error::NotApplicable(format!("no decreasing step along side {i}")))
    }
}

fn intersect_lines(n1: Vec2, c1: f64, n2: Vec2, c2: f64) -> Option<Vec2> {
    let det = n1.cross(n2);
    if det.abs() < 1e-300 {
        return None;
    }
    Some(Vec2::new((c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det))
}

/// `w` in the closed cone `pos{a, b}` (angle below π), with slack on the
/// Cramer coefficients relative to `|w|`.
fn in_cone(w: Vec2, a: Vec2, b: Vec2, tol: f64) -> bool {
    let det = a.cross(b);
    if det <= 0.0 {
        return false;
    }
    let s = w.cross(b) / det;
    let t = a.cross(w) / det;
    let slack = tol * w.norm();
    s >= -slack && t >= -slack
}

/// Exterior normals of the two edges meeting at vertex `j` (incoming, outgoing).
fn vertex_cone(p: &ConvexPolygon, j: usize) -> (Vec2, Vec2) {
    let e = p.edges();
    let n = e.len();
    (e[(j + n - 1) % n].normal, e[j].normal)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum MoveKind {
    /// Vertex `vertex` slid along its outgoing edge; `opposite` is the vertex
    /// whose normal cone contains the reflected cone.
    VertexSlide { vertex: usize, opposite: usize, fraction: f64 },
    /// Vertex `vertex` moved parallel to edge `edge` by `step`.
    VertexShift { vertex: usize, edge: usize, step: f64 },
    /// Side line `side` of an equiangular polygon moved outward by `t`.
    SidePerturbation { side: usize, t: f64, derivative: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeStats {
    pub perimeter: f64,
    pub self_mixed_area: f64,
    pub ratio: f64,
}

impl ShapeStats {
    pub fn of(p: &ConvexPolygon) -> Self {
        let perimeter = p.perimeter();
        let self_mixed_area = mixed_area_minkowski(p, &p.reflect());
        ShapeStats { perimeter, self_mixed_area, ratio: perimeter * perimeter / self_mixed_area }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformMove {
    pub kind: MoveKind,
    pub polygon: ConvexPolygon,
    pub before: ShapeStats,
    pub after: ShapeStats,
}

impl DeformMove {
    fn new(kind: MoveKind, before: &ConvexPolygon, after: ConvexPolygon) -> Self {
        DeformMove { kind, before: ShapeStats::of(before), after: ShapeStats::of(&after), polygon: after }
    }

    pub fn decreases_ratio(&self) -> bool {
        self.after.ratio < self.before.ratio
    }
}

/// A vertex pair `(v1, v2)` with `-N(v1) ⊆ N(v2)`.
pub fn find_vertex_slide(p: &ConvexPolygon) -> Option<(usize, usize)> {
    let n = p.len();
    (0..n).find_map(|v1| opposite_containing(p, v1).map(|v2| (v1, v2)))
}

fn opposite_containing(p: &ConvexPolygon, v1: usize) -> Option<usize> {
    let n = p.len();
    let (a, b) = vertex_cone(p, v1);
    (0..n).filter(|&v2| v2 != v1).find(|&v2| {
        let (c, d) = vertex_cone(p, v2);
        in_cone(-a, c, d, CONE_TOL) && in_cone(-b, c, d, CONE_TOL)
    })
}

/// Slide vertex `v1` halfway towards its successor. Needs some vertex whose
/// normal cone contains `-N(v1)`; the perimeter drops and `A(P, -P)` is kept.
pub fn vertex_slide(p: &ConvexPolygon, v1: usize) -> Result<DeformMove> {
    let n = p.len();
    let v1 = v1 % n;
    let v2 = opposite_containing(p, v1).ok_or_else(|| Error::NotApplicable(format!("no vertex cone contains the reflected cone at vertex {v1}")))?;
    let fraction = 0.5;
    let mut verts = p.vertices().to_vec();
    verts[v1] = verts[v1] + (p.vertex(v1 + 1) - verts[v1]) * fraction;
    let after = ConvexPolygon::new(verts)?;
    Ok(DeformMove::new(MoveKind::VertexSlide { vertex: v1, opposite: v2, fraction }, p, after))
}

/// A vertex `v` and edge `e` with `-u_e ∈ N(v)` not halving the cone, when
/// no vertex slide applies.
pub fn find_vertex_shift(p: &ConvexPolygon) -> Option<(usize, usize)> {
    if find_vertex_slide(p).is_some() {
        return None;
    }
    let n = p.len();
    (0..n).find_map(|v| shift_edge(p, v).map(|e| (v, e)))
}

fn shift_edge(p: &ConvexPolygon, v: usize) -> Option<usize> {
    let (a, b) = vertex_cone(p, v);
    p.edges().iter().position(|e| {
        let w = -e.normal;
        if !in_cone(w, a, b, CONE_TOL) {
            return false;
        }
        let ta = a.cross(w).atan2(a.dot(w)).abs();
        let tb = w.cross(b).atan2(w.dot(b)).abs();
        (ta - tb).abs() > HALVE_TOL
    })
}

/// Move vertex `v` along the support line parallel to the qualifying edge,
/// in the direction that shortens its two edges. The step starts at
/// `1e-3 L(P)` and halves until the polygon stays convex, `L` drops and
/// `A(P, -P)` is unchanged (large steps can change the normal fan enough to
/// break the last property).
pub fn vertex_shift(p: &ConvexPolygon, v: usize) -> Result<DeformMove> {
    let n = p.len();
    let v = v % n;
    if let Some((a, b)) = find_vertex_slide(p) {
        return Err(Error::NotApplicable(format!("vertices {a} and {b} admit a vertex slide instead")));
    }
    let edge = shift_edge(p, v).ok_or_else(|| Error::NotApplicable(format!("no reflected edge normal splits the cone at vertex {v} unevenly")))?;
    let x = p.vertex(v);
    let prev = p.vertex(v + n - 1);
    let next = p.vertex(v + 1);
    let along = p.edges()[edge].normal.perp_cw();
    let pull = (x - prev).normalized().unwrap_or(Vec2::ZERO) + (x - next).normalized().unwrap_or(Vec2::ZERO);
    let dir = if along.dot(pull) > 0.0 { -along } else { along };
    let l0 = p.perimeter();
    let a0 = mixed_area_minkowski(p, &p.reflect());
    let mut step = 1e-3 * l0;
    for _ in 0..60 {
        let mut verts = p.vertices().to_vec();
        verts[v] = x + dir * step;
        if let Ok(after) = ConvexPolygon::new(verts) {
            let same_area = || (mixed_area_minkowski(&after, &after.reflect()) - a0).abs() <= SAME_AREA_TOL * a0;
            if after.len() == n && after.perimeter() < l0 && same_area() {
                return Ok(DeformMove::new(MoveKind::VertexShift { vertex: v, edge, step }, p, after));
            }
        }
        step *= 0.5;
    }
    Err(Error::NotApplicable(format!("no perimeter-decreasing step at vertex {v}")))
}

/// First applicable move: vertex slide, vertex shift, then side perturbation
/// of an equiangular polygon. Regular polygons with an odd number of sides
/// admit none.
pub fn deform(p: &ConvexPolygon) -> Result<DeformMove> {
    if let Some((v1, _)) = find_vertex_slide(p) {
        return vertex_slide(p, v1);
    }
    if let Some((v, _)) = find_vertex_shift(p) {
        return vertex_shift(p, v);
    }
    match EquiangularPolygon::from_polygon(p) {
        Some(q) if !q.is_regular(1e-9) => {
            let mut m = q.descent_move()?;
            // report in the caller's coordinates
            let shift = p.vertex(0) - q.vertices()[0];
            m.polygon = m.polygon.translate(shift);
            Ok(m)
        }
        Some(_) => Err(Error::NotApplicable("regular polygon with an odd number of sides".into())),
        None => Err(Error::NotApplicable("no deformation move found".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularPolygonStats {
    pub k: usize,
    /// `L^2 / A(P, -P)` computed from the polygon.
    pub ratio: f64,
    /// `4k sin(π/k)`.
    pub ratio_closed: f64,
    /// Unit-perimeter `A(P, -P)` and its closed form `1 / (4k sin(π/k))`.
    pub unit_self_mixed_area: f64,
    pub unit_self_mixed_area_closed: f64,
    pub deficit: f64,
    pub dtr: f64,
    /// `√(2 cos(π/5)) - 1`.
    pub dtr_lower_bound: f64,
}

/// Quantities of the unit-perimeter regular `k`-gon, `k` odd and at least 5.
/// Fails with an invariant violation if `L^2/A(P,-P) < 20 sin(π/5)` or
/// `d_tr < 0.25`.
pub fn regular_polygon_stats(k: usize) -> Result<RegularPolygonStats> {
    if k < 5 || k % 2 == 0 {
        return Err(domain(format!("k = {k} must be odd and at least 5")));
    }
    let s = (PI / k as f64).sin();
    // circumradius of unit perimeter
    let p = ConvexPolygon::regular(k, 1.0 / (2.0 * k as f64 * s), Vec2::ZERO, 0.0)?;
    let a = mixed_area_minkowski(&p, &p.reflect());
    let l = p.perimeter();
    let dtr = d_tr(&p, 1e-9)?.rho;
    let stats = RegularPolygonStats {
        k,
        ratio: l * l / a,
        ratio_closed: 4.0 * k as f64 * s,
        unit_self_mixed_area: a / (l * l),
        unit_self_mixed_area_closed: 1.0 / (4.0 * k as f64 * s),
        deficit: bw_deficit(&p),
        dtr,
        dtr_lower_bound: (2.0 * (PI / 5.0).cos()).sqrt() - 1.0,
    };
    if stats.ratio < 20.0 * (PI / 5.0).sin() * (1.0 - 1e-12) {
        return Err(Error::InvariantViolation(format!("L^2/A = {} below 20 sin(π/5)", stats.ratio)));
    }
    if stats.dtr < 0.25 {
        return Err(Error::InvariantViolation(format!("d_tr = {} below 0.25", stats.dtr)));
    }
    Ok(stats)
}
