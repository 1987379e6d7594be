//! Interval certificates for `v̄ᵀ H v̄ >= 2 |v̄|^2` and `|H v̄|^2 >= 4 |v̄|^2`
//! over a box of test vectors with one coordinate fixed at 1.

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalBox};
use crate::taylor::IntervalMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inequality {
    /// `v̄ᵀ H v̄ - 2 |v̄|^2 >= 0`.
    Quadratic,
    /// `|H v̄|^2 - 4 |v̄|^2 >= 0`.
    Norm,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::Quadratic => "quadratic",
            Inequality::Norm => "norm",
        }
    }
}

/// The interval value of a certificate form; passes when its lower end is `>= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub form: Interval,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.form.lo() >= 0.0
    }

    pub fn margin(&self) -> f64 {
        self.form.lo()
    }
}

/// Test vector with coordinate `face` equal to 1 and the others from `vbox`.
pub fn test_vector(face: usize, vbox: &IntervalBox) -> Vec<Interval> {
    let n = vbox.dim() + 1;
    let mut it = vbox.dims().iter();
    (0..n).map(|i| if i == face { Interval::ONE } else { *it.next().expect("vbox has n - 1 dims") }).collect()
}

/// Same with float coordinates.
pub fn test_vector_f64(face: usize, v: &[f64]) -> Vec<f64> {
    let mut it = v.iter();
    (0..v.len() + 1).map(|i| if i == face { 1.0 } else { *it.next().expect("n - 1 coordinates") }).collect()
}

fn mul_unit(a: Interval, b: Interval) -> Interval {
    if a == Interval::ONE {
        b
    } else if b == Interval::ONE {
        a
    } else {
        a * b
    }
}

/// `vᵀ M v` for a symmetric `M`, expanded around the midpoint `c` of `v`:
/// `cᵀMc + 2 (Mc)·d + dᵀMd` with `d = v - c`. The error is quadratic in the
/// radius of `v` instead of linear.
pub fn centered_form(m: &IntervalMatrix, v: &[Interval]) -> Interval {
    let n = v.len();
    let c: Vec<Interval> = v.iter().map(|x| Interval::point(x.mid())).collect();
    let d: Vec<Interval> = v.iter().zip(&c).map(|(x, c)| *x - *c).collect();
    let mut acc = Interval::ZERO;
    for i in 0..n {
        let mut mc = Interval::ZERO;
        for j in 0..n {
            mc = mc + mul_unit(m.get(i, j), c[j]);
        }
        acc = acc + mul_unit(mc, c[i]) + (mc * d[i]).scale(2.0) + m.get(i, i) * d[i].sqr();
        for j in i + 1..n {
            acc = acc + (m.get(i, j) * (d[i] * d[j])).scale(2.0);
        }
    }
    acc
}

/// `Σ (H_ii - 2) v_i^2 + 2 Σ_{i<j} H_ij v_i v_j` with dedicated squares,
/// intersected with the centered expansion.
pub fn quadratic_form(h: &IntervalMatrix, v: &[Interval]) -> Interval {
    let n = v.len();
    let mut acc = Interval::ZERO;
    let mut shifted = h.clone();
    for i in 0..n {
        shifted.set(i, i, h.get(i, i).add_f64(-2.0));
        acc = acc + mul_unit(shifted.get(i, i), v[i].sqr());
        for j in i + 1..n {
            acc = acc + mul_unit(h.get(i, j), mul_unit(v[i], v[j])).scale(2.0);
        }
    }
    let centered = centered_form(&shifted, v);
    acc.intersect(&centered).unwrap_or(acc)
}

/// `H² - 4I` for a symmetric `H`, diagonal entries as sums of squares.
fn gram_shifted(h: &IntervalMatrix) -> IntervalMatrix {
    let n = h.rows();
    let mut g = IntervalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = Interval::ZERO;
            for k in 0..n {
                s = s + if i == j { h.get(k, i).sqr() } else { h.get(k, i) * h.get(k, j) };
            }
            if i == j {
                s = s.add_f64(-4.0);
            }
            g.set(i, j, s);
            g.set(j, i, s);
        }
    }
    g
}

/// `Σ_i [(H v)_i^2 - 4 v_i^2]`, each row enclosed two ways and intersected:
/// expanded around the diagonal term, and as a square of the row sum.
pub fn norm_form(h: &IntervalMatrix, v: &[Interval]) -> Interval {
    let n = v.len();
    let mut acc = Interval::ZERO;
    for i in 0..n {
        let d = h.get(i, i);
        let mut off = Interval::ZERO;
        for j in 0..n {
            if j != i {
                off = off + mul_unit(h.get(i, j), v[j]);
            }
        }
        let vi2 = v[i].sqr();
        let expanded = mul_unit(d.sqr().add_f64(-4.0), vi2) + (mul_unit(d, v[i]) * off).scale(2.0) + off.sqr();
        let direct = (mul_unit(d, v[i]) + off).sqr() - vi2.scale(4.0);
        // both enclose the same real quantity
        acc = acc + expanded.intersect(&direct).unwrap_or(expanded);
    }
    let centered = centered_form(&gram_shifted(h), v);
    acc.intersect(&centered).unwrap_or(acc)
}

pub fn certify_quadratic(h: &IntervalMatrix, face: usize, vbox: &IntervalBox) -> Certificate {
    Certificate { form: quadratic_form(h, &test_vector(face, vbox)) }
}

pub fn certify_norm(h: &IntervalMatrix, face: usize, vbox: &IntervalBox) -> Certificate {
    Certificate { form: norm_form(h, &test_vector(face, vbox)) }
}

pub fn certify(ineq: Inequality, h: &IntervalMatrix, face: usize, vbox: &IntervalBox) -> Certificate {
    match ineq {
        Inequality::Quadratic => certify_quadratic(h, face, vbox),
        Inequality::Norm => certify_norm(h, face, vbox),
    }
}

/// Float value of the form at a single matrix and vector.
pub fn form_f64(ineq: Inequality, h: &[Vec<f64>], v: &[f64]) -> f64 {
    let n = v.len();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    match ineq {
        Inequality::Quadratic => (0..n).map(|i| (0..n).map(|j| v[i] * h[i][j] * v[j]).sum::<f64>()).sum::<f64>() - 2.0 * vv,
        Inequality::Norm => (0..n).map(|i| (0..n).map(|j| h[i][j] * v[j]).sum::<f64>().powi(2)).sum::<f64>() - 4.0 * vv,
    }
}
