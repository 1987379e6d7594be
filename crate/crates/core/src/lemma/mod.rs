//! The five-variable hexagon deficit bound and its Hessian certificate.
//!
//! With the first side of the triangle fixed at 2, the remaining sides
//! `a2, a3` and the width parameters `t1, t2, t3` determine a lower bound
//! `f` for `L(H0)^2 - 6√3 A(H2, -H2)`. The certificate shows that the Hessian
//! of `f`, restricted to the complement of the critical direction
//! `(0, 0, 1, 1, 1)`, has all eigenvalues at least 2 over the parameter box.

pub mod certify;
pub mod verify;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::interval::{Interval, IntervalBox};
use crate::taylor::{hessian_enclosure, EnclosureMode, IntervalMatrix, Jet};

pub use certify::{certify_norm, certify_quadratic, Certificate, Inequality};
pub use verify::{verify, VerifyConfig, VerifyReport, VerifyStatus};

/// Fixed first side.
pub const A1: f64 = 2.0;
/// Upper end of the side range `[2, 2 + 1/6]`.
pub const SIDE_MAX: f64 = 2.0 + 1.0 / 6.0;
/// Upper end of the width-parameter range `[0, 1/6]`.
pub const T_MAX: f64 = 1.0 / 6.0;

/// A point of the parameter box: `a2, a3 ∈ [2, 2 + 1/6]`, `t_i ∈ [0, 1/6]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaPoint {
    pub a2: f64,
    pub a3: f64,
    pub t: [f64; 3],
}

impl LemmaPoint {
    pub fn new(a2: f64, a3: f64, t: [f64; 3]) -> Result<Self> {
        let p = LemmaPoint { a2, a3, t };
        if !p.in_domain() {
            return Err(domain(format!("point {:?} outside the parameter box", p.as_array())));
        }
        Ok(p)
    }

    pub fn in_domain(&self) -> bool {
        let side = |a: f64| (A1..=SIDE_MAX).contains(&a);
        side(self.a2) && side(self.a3) && self.t.iter().all(|t| (0.0..=T_MAX).contains(t))
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a2, self.a3, self.t[0], self.t[1], self.t[2]]
    }

    pub fn t0(&self) -> f64 {
        (self.t[0] + self.t[1] + self.t[2]) / 3.0
    }

    /// `(a2 - 2)^2 + (a3 - 2)^2 + Σ (t_i - t0)^2`, the squared distance to the critical line.
    pub fn dist2_to_critical_line(&self) -> f64 {
        let t0 = self.t0();
        (self.a2 - 2.0).powi(2) + (self.a3 - 2.0).powi(2) + self.t.iter().map(|t| (t - t0).powi(2)).sum::<f64>()
    }
}

/// The box of parameter points.
pub fn parameter_box() -> IntervalBox {
    IntervalBox::from_bounds(&[(A1, SIDE_MAX), (A1, SIDE_MAX), (0.0, T_MAX), (0.0, T_MAX), (0.0, T_MAX)]).expect("static bounds")
}

/// The box in rotated coordinates that contains the image of the parameter box.
pub fn rotated_box() -> IntervalBox {
    IntervalBox::from_bounds(&[(A1, SIDE_MAX), (A1, SIDE_MAX), (-0.14, 0.14), (-0.14, 0.14), (0.0, 0.3)]).expect("static bounds")
}

/// Arithmetic needed to evaluate the lemma function on floats, intervals and jets.
pub trait LemmaScalar: Sized + Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn sqr(&self) -> Self;
    fn add_c(&self, c: Interval) -> Self;
    fn mul_c(&self, c: Interval) -> Self;
    /// Square root of a strictly positive argument.
    fn sqrt(&self) -> Result<Self>;
    fn recip(&self) -> Result<Self>;
}

impl LemmaScalar for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sqr(&self) -> Self {
        self * self
    }
    fn add_c(&self, c: Interval) -> Self {
        self + c.mid()
    }
    fn mul_c(&self, c: Interval) -> Self {
        self * c.mid()
    }
    fn sqrt(&self) -> Result<Self> {
        if !(*self > 0.0) {
            return Err(domain(format!("sqrt of nonpositive {self}")));
        }
        Ok(f64::sqrt(*self))
    }
    fn recip(&self) -> Result<Self> {
        if *self == 0.0 {
            return Err(domain("reciprocal of zero"));
        }
        Ok(1.0 / self)
    }
}

impl LemmaScalar for Interval {
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn sqr(&self) -> Self {
        Interval::sqr(self)
    }
    fn add_c(&self, c: Interval) -> Self {
        *self + c
    }
    fn mul_c(&self, c: Interval) -> Self {
        *self * c
    }
    fn sqrt(&self) -> Result<Self> {
        if !(self.lo() > 0.0) {
            return Err(domain(format!("sqrt of interval {self} touching zero")));
        }
        Interval::sqrt(self)
    }
    fn recip(&self) -> Result<Self> {
        Interval::recip(self)
    }
}

impl LemmaScalar for Jet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sqr(&self) -> Self {
        Jet::sqr(self)
    }
    fn add_c(&self, c: Interval) -> Self {
        self.add_const(c)
    }
    fn mul_c(&self, c: Interval) -> Self {
        self.scale(c)
    }
    fn sqrt(&self) -> Result<Self> {
        Jet::sqrt(self)
    }
    fn recip(&self) -> Result<Self> {
        Jet::recip(self)
    }
}

fn c(x: f64) -> Interval {
    Interval::point(x)
}

/// `16 A(T)^2` by Heron's formula for sides `2, a2, a3`.
pub fn eval_f2<T: LemmaScalar>(a2: &T, a3: &T) -> T {
    let s = a2.add(a3);
    let p1 = s.add_c(c(A1));
    let p2 = s.add_c(c(-A1));
    let p3 = a3.sub(a2).add_c(c(A1));
    let p4 = a2.sub(a3).add_c(c(A1));
    p1.mul(&p2).mul(&p3.mul(&p4))
}

/// The lemma function at `x = (a2, a3, t1, t2, t3)`.
pub fn eval_f<T: LemmaScalar>(x: &[T; 5]) -> Result<T> {
    let [a2, a3, t1, t2, t3] = x;
    let f2 = eval_f2(a2, a3);
    let perim = a2.add(a3).add_c(c(A1));
    let q = t1.mul_c(c(0.5)).add(&t2.mul(&a2.recip()?)).add(&t3.mul(&a3.recip()?));
    let f1 = perim.sqr().add(&f2.mul(&q.sqr()));
    let sym = t1.mul(t2).add(&t2.mul(t3)).add(&t3.mul(t1)).add_c(Interval::ONE);
    let root = f2.sqrt().map_err(|_| domain("degenerate triangle: Heron product not positive"))?;
    Ok(f1.sub(&root.mul(&sym).mul_c(Interval::sqrt_of(27.0))))
}

pub fn eval_f_point(p: &LemmaPoint) -> Result<f64> {
    eval_f(&p.as_array())
}

/// Certified enclosure of `f` over a 5-dimensional box.
pub fn eval_f_box(bx: &IntervalBox) -> Result<Interval> {
    if bx.dim() != 5 {
        return Err(domain("the lemma function takes five arguments"));
    }
    let x: [Interval; 5] = std::array::from_fn(|i| bx.get(i));
    eval_f(&x)
}

/// The orthogonal change of coordinates `x = S y`. The first two coordinates
/// are kept; the last three are rotated so that `y5` runs along `(1,1,1)/√3`.
#[derive(Debug, Clone)]
pub struct BasisChange {
    /// `s[i][j]`: component `i` of basis vector `j`.
    pub s: [[Interval; 5]; 5],
}

impl Default for BasisChange {
    fn default() -> Self {
        let r2 = Interval::sqrt_of(0.5);
        let r6 = Interval::sqrt_of(6.0).recip().expect("nonzero");
        let r3 = Interval::sqrt_of(3.0).recip().expect("nonzero");
        let z = Interval::ZERO;
        let one = Interval::ONE;
        BasisChange {
            s: [
                [one, z, z, z, z],
                [z, one, z, z, z],
                [z, z, r2, r6, r3],
                [z, z, -r2, r6, r3],
                [z, z, z, r6.scale(-2.0), r3],
            ],
        }
    }
}

impl BasisChange {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x = S y` for any scalar type.
    pub fn apply<T: LemmaScalar>(&self, y: &[T; 5]) -> [T; 5] {
        std::array::from_fn(|i| {
            let mut acc: Option<T> = None;
            for (j, yj) in y.iter().enumerate() {
                let e = self.s[i][j];
                if e == Interval::ZERO {
                    continue;
                }
                let term = if e == Interval::ONE { yj.clone() } else { yj.mul_c(e) };
                acc = Some(match acc {
                    Some(a) => a.add(&term),
                    None => term,
                });
            }
            acc.expect("every row of S is nonzero")
        })
    }

    /// `y = Sᵀ x` in plain floats.
    pub fn to_rotated(&self, x: &[f64; 5]) -> [f64; 5] {
        std::array::from_fn(|j| (0..5).map(|i| self.s[i][j].mid() * x[i]).sum())
    }

    /// Enclosure of `Sᵀ S`.
    pub fn gram(&self) -> IntervalMatrix {
        let mut m = IntervalMatrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = Interval::ZERO;
                for k in 0..5 {
                    acc = acc + self.s[k][i] * self.s[k][j];
                }
                m.set(i, j, acc);
            }
        }
        m
    }
}

/// `f̃(y) = f(S y)`.
pub fn eval_ftilde<T: LemmaScalar>(basis: &BasisChange, y: &[T; 5]) -> Result<T> {
    eval_f(&basis.apply(y))
}

/// Jet of `f̃` over `ybox` up to `degree`.
pub fn eval_ftilde_jet(basis: &BasisChange, ybox: &IntervalBox, degree: usize) -> Result<Jet> {
    if ybox.dim() != 5 {
        return Err(domain("the lemma function takes five arguments"));
    }
    let v = Jet::lift_all(ybox, degree)?;
    let y: [Jet; 5] = v.try_into().expect("five lifts");
    eval_ftilde(basis, &y)
}

/// Jet of `f` itself (identity basis) over `xbox`.
pub fn eval_f_jet(xbox: &IntervalBox, degree: usize) -> Result<Jet> {
    if xbox.dim() != 5 {
        return Err(domain("the lemma function takes five arguments"));
    }
    let v = Jet::lift_all(xbox, degree)?;
    let x: [Jet; 5] = v.try_into().expect("five lifts");
    eval_f(&x)
}

/// Hessian enclosure over a box together with the Hessian at its midpoint.
#[derive(Debug, Clone)]
pub struct HessianData {
    pub enclosure: IntervalMatrix,
    /// Midpoints of the point-box Hessian at the box center.
    pub at_center: Vec<Vec<f64>>,
}

/// Full 5x5 Hessian of `f̃` over `ybox`.
pub fn hessian_ftilde(basis: &BasisChange, ybox: &IntervalBox, degree: usize, mode: EnclosureMode) -> Result<HessianData> {
    let over = eval_ftilde_jet(basis, ybox, degree)?;
    let mid = IntervalBox::point(&ybox.midpoint())?;
    let at = eval_ftilde_jet(basis, &mid, degree)?;
    let enclosure = hessian_enclosure(&over, &at, ybox, mode)?;
    let center = hessian_enclosure(&at, &at, &mid, EnclosureMode::Fallback)?;
    Ok(HessianData { enclosure, at_center: center.midpoint() })
}

/// The leading 4x4 block of the Hessian of `f̃` over `ybox`.
pub fn hessian_minor(basis: &BasisChange, ybox: &IntervalBox, degree: usize, mode: EnclosureMode) -> Result<HessianData> {
    let full = hessian_ftilde(basis, ybox, degree, mode)?;
    Ok(HessianData {
        enclosure: full.enclosure.leading_minor(4),
        at_center: full.at_center.iter().take(4).map(|r| r[..4].to_vec()).collect(),
    })
}

/// Central-difference gradient of float `f` with step `h`.
pub fn fd_gradient(x: &[f64; 5], h: f64) -> Result<[f64; 5]> {
    let mut g = [0.0; 5];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut p = *x;
        let mut m = *x;
        p[i] += h;
        m[i] -= h;
        *gi = (eval_f(&p)? - eval_f(&m)?) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian of float `f̃` with step `h`.
pub fn fd_hessian_ftilde(basis: &BasisChange, y: &[f64; 5], h: f64) -> Result<[[f64; 5]; 5]> {
    let f = |d: &[(usize, f64)]| -> Result<f64> {
        let mut p = *y;
        for &(i, s) in d {
            p[i] += s;
        }
        eval_ftilde(basis, &p)
    };
    let mut out = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in i..5 {
            let v = if i == j {
                (f(&[(i, h)])? - 2.0 * f(&[])? + f(&[(i, -h)])?) / (h * h)
            } else {
                (f(&[(i, h), (j, h)])? - f(&[(i, h), (j, -h)])? - f(&[(i, -h), (j, h)])? + f(&[(i, -h), (j, -h)])?) / (4.0 * h * h)
            };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientSpotCheck {
    pub t: f64,
    pub value: f64,
    pub fd_gradient_norm: f64,
    /// Whether every AD gradient enclosure at the point box contains zero.
    pub ad_gradient_contains_zero: bool,
}

/// Gradient of `f` on the critical line `(2, 2, t, t, t)` for `t ∈ {0, 1/24, 1/12, 1/8, 1/6}`.
pub fn spot_check_gradient() -> Result<Vec<GradientSpotCheck>> {
    [0.0, 1.0 / 24.0, 1.0 / 12.0, 1.0 / 8.0, 1.0 / 6.0]
        .into_iter()
        .map(|t| {
            let x = [2.0, 2.0, t, t, t];
            let g = fd_gradient(&x, 1e-5)?;
            let jet = eval_f_jet(&IntervalBox::point(&x)?, 2)?;
            Ok(GradientSpotCheck {
                t,
                value: eval_f(&x)?,
                fd_gradient_norm: g.iter().map(|v| v * v).sum::<f64>().sqrt(),
                ad_gradient_contains_zero: jet.gradient().iter().all(|iv| iv.contains(0.0)),
            })
        })
        .collect()
}

/// Interval check that `Sᵀ` maps the parameter box into the rotated box,
/// enclosing each rotated coordinate directly.
pub fn rotated_box_contains_image() -> bool {
    let basis = BasisChange::new();
    let pbox = parameter_box();
    let rbox = rotated_box();
    let per_axis = (0..5).all(|j| {
        let mut acc = Interval::ZERO;
        for i in 0..5 {
            acc = acc + basis.s[i][j] * pbox.get(i);
        }
        acc.is_subset_of(&rbox.get(j))
    });
    per_axis
}
