//! Convex polygons in the plane: support functions, perimeter and area,
//! Minkowski sums, and the mixed-area formulas built on the normal fan.

pub mod dtr;
pub mod mixed;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use mixed::{bw_deficit, mixed_area_betke, mixed_area_betke_auto, mixed_area_minkowski, mixed_area_oracle};

/// Relative tolerance for merging nearly collinear or repeated vertices.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` from the positive x-axis.
    #[inline]
    pub fn polar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// `det(self, o)`, positive when `o` is counterclockwise from `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Rotation by -90 degrees; the outward normal direction of a CCW edge.
    #[inline]
    pub fn perp_cw(self) -> Vec2 {
        Vec2 { x: self.y, y: -self.x }
    }

    #[inline]
    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2 { x: self.x * s, y: self.y * s }
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2 { x: -self.x, y: -self.y }
    }
}

/// One edge of a convex polygon together with its exterior unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub normal: Vec2,
    pub length: f64,
    pub start: Vec2,
    pub end: Vec2,
}

/// The edges of a polygon in counterclockwise order of their normals.
pub type EdgeFan = Vec<Edge>;

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

fn scale_of(points: &[Vec2]) -> f64 {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    (xmax - xmin).hypot(ymax - ymin)
}

/// Drop vertices whose turn is below the merge tolerance (repeats and
/// collinear points). Returns `None` if a clockwise turn remains.
fn merge_degenerate(mut pts: Vec<Vec2>) -> std::result::Result<Vec<Vec2>, String> {
    let scale = scale_of(&pts);
    let tol = MERGE_TOL * scale * scale;
    loop {
        let n = pts.len();
        if n < 3 {
            return Ok(pts);
        }
        let mut removed = false;
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let turn = (cur - prev).cross(next - cur);
            if turn.abs() <= tol {
                pts.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    let n = pts.len();
    for i in 0..n {
        let prev = pts[(i + n - 1) % n];
        let cur = pts[i];
        let next = pts[(i + 1) % n];
        if (cur - prev).cross(next - cur) < 0.0 {
            return Err(format!("vertex {i} at ({}, {}) is reflex or the order is clockwise", cur.x, cur.y));
        }
    }
    // a strictly left-turning closed polyline can still wind more than once
    let total: f64 = (0..n)
        .map(|i| {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            (b - a).cross(c - b).atan2((b - a).dot(c - b))
        })
        .sum();
    if (total - std::f64::consts::TAU).abs() > 1e-6 {
        return Err("vertex sequence winds more than once".into());
    }
    Ok(pts)
}

/// Convex hull (Andrew's monotone chain), counterclockwise, collinear points dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.iter().copied().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

impl ConvexPolygon {
    /// Build from counterclockwise vertices. Nearly collinear and repeated
    /// vertices are merged; anything else non-convex is rejected.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let merged = merge_degenerate(vertices).map_err(Error::InvalidPolygon)?;
        if merged.len() < 3 {
            return Err(Error::InvalidPolygon(format!("only {} distinct vertices after merging", merged.len())));
        }
        Ok(ConvexPolygon { vertices: merged })
    }

    /// Build from vertices listed in either orientation.
    pub fn from_cycle(mut vertices: Vec<Vec2>) -> Result<Self> {
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    /// Convex hull of an arbitrary point set.
    pub fn hull_of(points: &[Vec2]) -> Result<Self> {
        Self::new(convex_hull(points))
    }

    /// Regular `k`-gon with circumradius `r` centered at `center`, first vertex at angle `phase`.
    pub fn regular(k: usize, r: f64, center: Vec2, phase: f64) -> Result<Self> {
        if k < 3 {
            return Err(domain("regular polygon needs k >= 3"));
        }
        let step = std::f64::consts::TAU / k as f64;
        Self::new((0..k).map(|i| center + Vec2::polar(phase + step * i as f64) * r).collect())
    }

    /// Triangle with the given side lengths: side `a` from the origin along +x,
    /// the third vertex above it. Sides are opposite to vertex 0, 1, 2 respectively
    /// for vertices `(0,0)`, `(a,0)`, apex: `|apex - (a,0)| = b`, `|apex| = c`.
    pub fn triangle_from_sides(a: f64, b: f64, c: f64) -> Result<Self> {
        let x = (a * a + c * c - b * b) / (2.0 * a);
        let y2 = c * c - x * x;
        if !(y2 > 0.0) {
            return Err(domain(format!("side lengths ({a}, {b}, {c}) do not form a triangle")));
        }
        Self::new(vec![Vec2::ZERO, Vec2::new(a, 0.0), Vec2::new(x, y2.sqrt())])
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex `i` modulo the vertex count.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Bounding-box diagonal, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        scale_of(&self.vertices)
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edges(&self) -> EdgeFan {
        let n = self.len();
        (0..n)
            .map(|i| {
                let start = self.vertices[i];
                let end = self.vertices[(i + 1) % n];
                let d = end - start;
                let length = d.norm();
                Edge { normal: d.perp_cw() * (1.0 / length), length, start, end }
            })
            .collect()
    }

    /// `h_P(u) = max <u, v>` over vertices; `u` need not be unit.
    pub fn support(&self, u: Vec2) -> Result<f64> {
        if !(u.norm() > 0.0) {
            return Err(domain("support function needs a nonzero direction"));
        }
        Ok(self.h(u))
    }

    #[inline]
    pub(crate) fn h(&self, u: Vec2) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width in direction `u` (unit): `h(u) + h(-u)`.
    pub fn width(&self, u: Vec2) -> f64 {
        self.h(u) + self.h(-u)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.len();
        (0..n).map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n])).sum()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let o = self.vertices[0];
        let mut acc = Vec2::ZERO;
        let mut a2 = 0.0;
        for i in 0..n {
            let p = self.vertices[i] - o;
            let q = self.vertices[(i + 1) % n] - o;
            let c = p.cross(q);
            a2 += c;
            acc += (p + q) * c;
        }
        o + acc * (1.0 / (3.0 * a2))
    }

    /// Point reflection `-P` through the origin.
    pub fn reflect(&self) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|&v| -v).collect() }
    }

    pub fn translate(&self, z: Vec2) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|&v| v + z).collect() }
    }

    /// Homothety `center + s (P - center)`, `s > 0`.
    pub fn scale_about(&self, center: Vec2, s: f64) -> Result<ConvexPolygon> {
        if !(s > 0.0) {
            return Err(domain("scale factor must be positive"));
        }
        Ok(ConvexPolygon { vertices: self.vertices.iter().map(|&v| center + (v - center) * s).collect() })
    }

    /// Image under the linear map with rows `m[0]`, `m[1]`.
    pub fn transform(&self, m: [[f64; 2]; 2]) -> Result<ConvexPolygon> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(domain("linear map is singular"));
        }
        let mut vs: Vec<Vec2> = self
            .vertices
            .iter()
            .map(|v| Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y))
            .collect();
        if det < 0.0 {
            vs.reverse();
        }
        ConvexPolygon::new(vs)
    }

    /// Minkowski sum by merging the two edge sequences in angular order.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let p = rotate_to_lowest(&self.vertices);
        let q = rotate_to_lowest(&other.vertices);
        let (n, m) = (p.len(), q.len());
        let mut out = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0usize, 0usize);
        while i < n || j < m {
            out.push(p[i % n] + q[j % m]);
            let ep = p[(i + 1) % n] - p[i % n];
            let eq = q[(j + 1) % m] - q[j % m];
            let c = if i >= n {
                -1.0
            } else if j >= m {
                1.0
            } else {
                ep.cross(eq)
            };
            if c > 0.0 {
                i += 1;
            } else if c < 0.0 {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        // merging parallel edges can leave collinear points; the sum of
        // valid polygons is always a valid polygon
        ConvexPolygon::new(out.clone()).unwrap_or_else(|_| ConvexPolygon::hull_of(&out).expect("minkowski sum of polygons is a polygon"))
    }

    /// Whether `x` lies in the polygon up to `tol` (absolute distance).
    pub fn contains_point(&self, x: Vec2, tol: f64) -> bool {
        self.edges().iter().all(|e| (x - e.start).dot(e.normal) <= tol)
    }

    /// `other ⊆ self` up to `tol`, compared through support functions at the
    /// normals of `self` (exact for polygons).
    pub fn contains_polygon(&self, other: &ConvexPolygon, tol: f64) -> bool {
        self.edges().iter().all(|e| other.h(e.normal) <= self.h(e.normal) + tol)
    }
}

pub fn signed_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let o = v[0];
    0.5 * (1..n - 1).map(|i| (v[i] - o).cross(v[i + 1] - o)).sum::<f64>()
}

fn rotate_to_lowest(v: &[Vec2]) -> Vec<Vec2> {
    let start = (0..v.len())
        .min_by(|&a, &b| v[a].y.total_cmp(&v[b].y).then(v[a].x.total_cmp(&v[b].x)))
        .unwrap_or(0);
    v[start..].iter().chain(&v[..start]).copied().collect()
}
