//! Truncated multivariate Taylor jets with interval coefficients.
//!
//! A jet stores `c_α = ∂^α g / α!` for every multi-index `|α| <= degree`,
//! densely, in graded lexicographic order. Built over a box (constant terms
//! equal to the box, linear terms one), every coefficient encloses the
//! corresponding Taylor coefficient of `g` at every point of the box.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::interval::{Interval, IntervalBox};

pub const MAX_DEGREE: usize = 6;
const NONE: u32 = u32::MAX;

/// Multi-index tables shared by all jets of a given shape.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    degree: usize,
    /// Exponents, `nvars` per coefficient.
    exps: Vec<u8>,
    /// Total degree per coefficient.
    deg: Vec<u8>,
    /// `prefix[d]` = number of multi-indices with total degree `<= d`.
    prefix: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `mul[i * n + j]` = index of `α_i + α_j`, or `NONE` past the degree.
    mul: Vec<u32>,
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>) {
    if parts == 1 {
        cur.push(total as u8);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in (0..=total).rev() {
        cur.push(first as u8);
        compositions(total - first, parts - 1, out, cur);
        cur.pop();
    }
}

impl JetSpace {
    fn build(nvars: usize, degree: usize) -> JetSpace {
        let mut all = Vec::new();
        let mut prefix = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            compositions(d, nvars, &mut all, &mut Vec::new());
            prefix.push(all.len());
        }
        let n = all.len();
        let index: HashMap<Vec<u8>, usize> = all.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let deg: Vec<u8> = all.iter().map(|e| e.iter().sum()).collect();
        let mut mul = vec![NONE; n * n];
        let mut sum = vec![0u8; nvars];
        for i in 0..n {
            for j in 0..n {
                if deg[i] as usize + deg[j] as usize > degree {
                    continue;
                }
                for k in 0..nvars {
                    sum[k] = all[i][k] + all[j][k];
                }
                mul[i * n + j] = index[&sum] as u32;
            }
        }
        JetSpace { nvars, degree, exps: all.concat(), deg, prefix, index, mul }
    }

    /// Shared tables for `nvars` variables up to `degree`.
    pub fn get(nvars: usize, degree: usize) -> Result<Arc<JetSpace>> {
        if nvars == 0 || nvars > 8 {
            return Err(domain(format!("jets support 1..=8 variables, got {nvars}")));
        }
        if degree > MAX_DEGREE {
            return Err(domain(format!("jet degree {degree} exceeds {MAX_DEGREE}")));
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().expect("jet space cache poisoned");
        Ok(map.entry((nvars, degree)).or_insert_with(|| Arc::new(JetSpace::build(nvars, degree))).clone())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deg.is_empty()
    }

    pub fn exponent(&self, i: usize) -> &[u8] {
        &self.exps[i * self.nvars..(i + 1) * self.nvars]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    fn unit(&self, var: usize) -> usize {
        1 + var
    }
}

/// A truncated Taylor expansion with interval coefficients.
#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<Interval>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, c: Interval) -> Jet {
        let mut coeffs = vec![Interval::ZERO; space.len()];
        coeffs[0] = c;
        Jet { space: space.clone(), coeffs }
    }

    /// The coordinate function `x_var` over `bx`.
    pub fn lift(bx: &IntervalBox, var: usize, degree: usize) -> Result<Jet> {
        if var >= bx.dim() {
            return Err(domain(format!("variable {var} out of range for a {}-dimensional box", bx.dim())));
        }
        let space = JetSpace::get(bx.dim(), degree)?;
        Ok(Self::lift_in(&space, bx.get(var), var))
    }

    /// All coordinate functions over `bx`.
    pub fn lift_all(bx: &IntervalBox, degree: usize) -> Result<Vec<Jet>> {
        let space = JetSpace::get(bx.dim(), degree)?;
        Ok((0..bx.dim()).map(|v| Self::lift_in(&space, bx.get(v), v)).collect())
    }

    fn lift_in(space: &Arc<JetSpace>, value: Interval, var: usize) -> Jet {
        let mut j = Jet::constant(space, value);
        if space.degree >= 1 {
            j.coeffs[space.unit(var)] = Interval::ONE;
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn degree(&self) -> usize {
        self.space.degree
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    /// Coefficient of the multi-index `alpha`; zero beyond the degree.
    pub fn coeff(&self, alpha: &[u8]) -> Interval {
        self.space.index_of(alpha).map_or(Interval::ZERO, |i| self.coeffs[i])
    }

    pub fn value(&self) -> Interval {
        self.coeffs[0]
    }

    /// First partial derivatives.
    pub fn gradient(&self) -> Vec<Interval> {
        (0..self.nvars()).map(|v| if self.degree() >= 1 { self.coeffs[self.space.unit(v)] } else { Interval::ZERO }).collect()
    }

    fn check(&self, other: &Jet) {
        assert!(Arc::ptr_eq(&self.space, &other.space), "jets from different spaces");
    }

    pub fn add_const(&self, c: Interval) -> Jet {
        let mut out = self.clone();
        accumulate(&mut out.coeffs[0], c);
        out
    }

    pub fn scale(&self, c: Interval) -> Jet {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|&x| if x == Interval::ZERO { x } else { x * c }).collect() }
    }

    /// Truncated product, skipping exactly-zero coefficients.
    pub fn mul_jet(&self, other: &Jet) -> Jet {
        self.check(other);
        let sp = &*self.space;
        let n = sp.len();
        let mut out = vec![Interval::ZERO; n];
        let nz_b: Vec<usize> = (0..n).filter(|&j| other.coeffs[j] != Interval::ZERO).collect();
        for i in 0..n {
            let a = self.coeffs[i];
            if a == Interval::ZERO {
                continue;
            }
            let limit = sp.prefix[sp.degree - sp.deg[i] as usize];
            let row = &sp.mul[i * n..(i + 1) * n];
            for &j in &nz_b {
                if j >= limit {
                    break;
                }
                let k = row[j] as usize;
                accumulate(&mut out[k], a * other.coeffs[j]);
            }
        }
        Jet { space: self.space.clone(), coeffs: out }
    }

    /// Truncated square, using each unordered pair once.
    pub fn sqr(&self) -> Jet {
        let sp = &*self.space;
        let n = sp.len();
        let mut out = vec![Interval::ZERO; n];
        let nz: Vec<usize> = (0..n).filter(|&j| self.coeffs[j] != Interval::ZERO).collect();
        for (p, &i) in nz.iter().enumerate() {
            let a = self.coeffs[i];
            let limit = sp.prefix[sp.degree - sp.deg[i] as usize];
            if i < limit {
                accumulate(&mut out[sp.mul[i * n + i] as usize], a.sqr());
            }
            let row = &sp.mul[i * n..(i + 1) * n];
            for &j in &nz[p + 1..] {
                if j >= limit {
                    break;
                }
                accumulate(&mut out[row[j] as usize], (a * self.coeffs[j]).scale(2.0));
            }
        }
        Jet { space: self.space.clone(), coeffs: out }
    }

    /// `Σ_k g_k u^k` with `u = self - value`, by Horner's rule.
    fn compose(&self, g: &[Interval]) -> Jet {
        let mut u = self.clone();
        u.coeffs[0] = Interval::ZERO;
        let d = self.degree();
        let mut acc = Jet::constant(&self.space, g[d]);
        for k in (0..d).rev() {
            acc = acc.mul_jet(&u).add_const(g[k]);
        }
        acc
    }

    /// Square root; the constant term must be strictly positive.
    pub fn sqrt(&self) -> Result<Jet> {
        let c = self.value();
        if !(c.lo() > 0.0) {
            return Err(domain(format!("jet sqrt with constant term {c} not strictly positive")));
        }
        let root = c.sqrt()?;
        let inv = c.recip()?;
        // binomial(1/2, k)
        const B: [f64; 7] = [1.0, 0.5, -0.125, 0.0625, -0.0390625, 0.02734375, -0.0205078125];
        let mut g = Vec::with_capacity(self.degree() + 1);
        let mut p = root;
        for b in B.iter().take(self.degree() + 1) {
            g.push(p.scale(*b));
            p = p * inv;
        }
        Ok(self.compose(&g))
    }

    /// Reciprocal; the constant term must exclude zero.
    pub fn recip(&self) -> Result<Jet> {
        let inv = self.value().recip()?;
        let mut g = Vec::with_capacity(self.degree() + 1);
        let mut p = inv;
        for _ in 0..=self.degree() {
            g.push(p);
            p = -(p * inv);
        }
        Ok(self.compose(&g))
    }
}

#[inline]
fn accumulate(slot: &mut Interval, x: Interval) {
    *slot = if *slot == Interval::ZERO { x } else { *slot + x };
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        self.check(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| if b == Interval::ZERO { a } else if a == Interval::ZERO { b } else { a + b }).collect();
        Jet { space: self.space.clone(), coeffs }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self.check(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| if b == Interval::ZERO { a } else if a == Interval::ZERO { -b } else { a - b }).collect();
        Jet { space: self.space.clone(), coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        self.mul_jet(o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|&a| -a).collect() }
    }
}

/// A dense row-major matrix of intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix { rows, cols, entries: vec![Interval::ZERO; rows * cols] }
    }

    pub fn from_f64(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntervalMatrix { rows: r, cols: c, entries: rows.iter().flat_map(|x| x.iter().map(|&v| Interval::point(v))).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.entries[i * self.cols + j] = v;
    }

    /// Leading principal `k x k` submatrix.
    pub fn leading_minor(&self, k: usize) -> IntervalMatrix {
        let mut m = IntervalMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn midpoint(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).mid()).collect()).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.entries.iter().map(|e| e.width()).fold(0.0, f64::max)
    }

    pub fn contains(&self, m: &[Vec<f64>]) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j).contains(m[i][j])))
    }

    /// Entrywise intersection; `None` if some entries are disjoint.
    pub fn intersect(&self, o: &IntervalMatrix) -> Option<IntervalMatrix> {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.intersect(b)).collect::<Option<Vec<_>>>()?;
        Some(IntervalMatrix { rows: self.rows, cols: self.cols, entries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnclosureMode {
    /// Midpoint expansion with remainders of every order, intersected.
    Enhanced,
    /// Degree-two coefficients of the over-box jet only.
    Fallback,
}

/// Factor turning the coefficient of `β + e_i + e_j` in `g` into the
/// coefficient of `(y - m)^β` in `∂_i ∂_j g`.
fn second_derivative_factor(beta: &[u8], i: usize, j: usize) -> f64 {
    if i == j {
        (beta[i] as f64 + 2.0) * (beta[i] as f64 + 1.0)
    } else {
        (beta[i] as f64 + 1.0) * (beta[j] as f64 + 1.0)
    }
}

/// Enclosure of the Hessian of `g` over `bx`, given the jet of `g` over the
/// box and the jet at its midpoint (both built from the same coordinates).
///
/// For each remainder order `r`, the second derivative is expanded around the
/// midpoint with the exact midpoint coefficients below order `r` and the
/// over-box coefficients at order `r`. Order zero is the fallback enclosure.
/// Enhanced mode intersects all orders, so it is never wider than fallback.
pub fn hessian_enclosure(over_box: &Jet, at_mid: &Jet, bx: &IntervalBox, mode: EnclosureMode) -> Result<IntervalMatrix> {
    let n = over_box.nvars();
    if at_mid.nvars() != n || bx.dim() != n || at_mid.degree() != over_box.degree() {
        return Err(domain("jet and box shapes disagree"));
    }
    let d = over_box.degree();
    if d < 2 {
        return Err(domain("a Hessian needs jets of degree at least 2"));
    }
    let sp = over_box.space.clone();
    let mid = bx.midpoint();
    // powers[k][p] = (x_k - m_k)^p over the box
    let powers: Vec<Vec<Interval>> = (0..n)
        .map(|k| {
            let h = bx.get(k) - Interval::point(mid[k]);
            (0..=d - 2).map(|p| h.powi(p as u32)).collect()
        })
        .collect();

    let max_order = match mode {
        EnclosureMode::Enhanced => d - 2,
        EnclosureMode::Fallback => 0,
    };
    let mut out = IntervalMatrix::zeros(n, n);
    let mut alpha = vec![0u8; n];
    for i in 0..n {
        for j in i..n {
            let mut best: Option<Interval> = None;
            for r in 0..=max_order {
                let mut acc = Interval::ZERO;
                for b in 0..sp.prefix[r] {
                    let beta = sp.exponent(b);
                    let bdeg = sp.deg[b] as usize;
                    alpha.copy_from_slice(beta);
                    alpha[i] += 1;
                    alpha[j] += 1;
                    let idx = sp.index[&alpha];
                    let c = if bdeg < r { at_mid.coeffs[idx] } else { over_box.coeffs[idx] };
                    if c == Interval::ZERO {
                        continue;
                    }
                    let mut term = c.scale(second_derivative_factor(beta, i, j));
                    for (k, &e) in beta.iter().enumerate() {
                        if e > 0 {
                            term = term * powers[k][e as usize];
                        }
                    }
                    accumulate(&mut acc, term);
                }
                best = Some(match best {
                    // every order encloses the true value, so the intersection is nonempty
                    Some(prev) => prev.intersect(&acc).unwrap_or(prev),
                    None => acc,
                });
            }
            let v = best.expect("at least one order");
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    Ok(out)
}
