//! Outward-rounded interval arithmetic over `f64` and axis-aligned boxes.
//!
//! Every arithmetic result encloses the exact real result of the operation
//! applied to any pair of points from the operands. Rounding is delegated to
//! [`round::Active`], selected at compile time.

pub mod round;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use round::{Active as R, Rounding};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(domain(format!("non-finite endpoint in [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    #[inline]
    pub(crate) const fn raw(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    #[inline]
    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest interval containing both `a` and `b`.
    pub fn spanning(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// A float inside the interval close to its center.
    #[inline]
    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value in the interval.
    #[inline]
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    #[inline]
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// `{x * x : x in self}`, tighter than `self * self` when the interval straddles zero.
    pub fn sqr(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: R::mul_down(self.lo, self.lo), hi: R::mul_up(self.hi, self.hi) }
        } else if self.hi <= 0.0 {
            Interval { lo: R::mul_down(self.hi, self.hi), hi: R::mul_up(self.lo, self.lo) }
        } else {
            let m = self.mag();
            Interval { lo: 0.0, hi: R::mul_up(m, m) }
        }
    }

    /// Integer power with even powers treated as squares.
    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => *self,
            _ if n % 2 == 0 => self.sqr().powi(n / 2),
            _ => *self * self.powi(n - 1),
        }
    }

    pub fn checked_div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains(0.0) {
            return Err(domain(format!("division by interval [{}, {}] containing zero", rhs.lo, rhs.hi)));
        }
        let c = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in c {
            lo = lo.min(R::div_down(a, b));
            hi = hi.max(R::div_up(a, b));
        }
        Ok(Interval { lo, hi })
    }

    pub fn recip(&self) -> Result<Interval> {
        Interval::ONE.checked_div(self)
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(domain(format!("sqrt of interval [{}, {}] with negative part", self.lo, self.hi)));
        }
        Ok(Interval { lo: R::sqrt_down(self.lo), hi: R::sqrt_up(self.hi) })
    }

    /// Enclosure of `x * c` for a float constant `c`.
    #[inline]
    pub fn scale(&self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval { lo: R::mul_down(self.lo, c), hi: R::mul_up(self.hi, c) }
        } else {
            Interval { lo: R::mul_down(self.hi, c), hi: R::mul_up(self.lo, c) }
        }
    }

    #[inline]
    pub fn add_f64(&self, c: f64) -> Interval {
        Interval { lo: R::add_down(self.lo, c), hi: R::add_up(self.hi, c) }
    }

    /// Enclosure of the real constant `sqrt(n)`.
    pub fn sqrt_of(n: f64) -> Interval {
        Interval { lo: R::sqrt_down(n), hi: R::sqrt_up(n) }
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: R::add_down(self.lo, rhs.lo), hi: R::add_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: R::sub_down(self.lo, rhs.hi), hi: R::sub_up(self.hi, rhs.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        // sign-case split keeps the common all-positive/all-negative cases at two products
        if a >= 0.0 {
            if c >= 0.0 {
                Interval { lo: R::mul_down(a, c), hi: R::mul_up(b, d) }
            } else if d <= 0.0 {
                Interval { lo: R::mul_down(b, c), hi: R::mul_up(a, d) }
            } else {
                Interval { lo: R::mul_down(b, c), hi: R::mul_up(b, d) }
            }
        } else if b <= 0.0 {
            if c >= 0.0 {
                Interval { lo: R::mul_down(a, d), hi: R::mul_up(b, c) }
            } else if d <= 0.0 {
                Interval { lo: R::mul_down(b, d), hi: R::mul_up(a, c) }
            } else {
                Interval { lo: R::mul_down(a, d), hi: R::mul_up(a, c) }
            }
        } else if c >= 0.0 {
            Interval { lo: R::mul_down(a, d), hi: R::mul_up(b, d) }
        } else if d <= 0.0 {
            Interval { lo: R::mul_down(b, c), hi: R::mul_up(a, c) }
        } else {
            Interval {
                lo: R::mul_down(a, d).min(R::mul_down(b, c)),
                hi: R::mul_up(a, c).max(R::mul_up(b, d)),
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Serialized as a `[lo, hi]` pair.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

/// A product of closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IntervalBox {
    dims: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Result<Self> {
        if dims.is_empty() {
            return Err(domain("box must have at least one dimension"));
        }
        Ok(IntervalBox { dims })
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let dims = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    pub fn point(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().copied().map(Interval::point).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    #[inline]
    pub fn get(&self, i: usize) -> Interval {
        self.dims[i]
    }

    pub fn width(&self) -> f64 {
        self.dims.iter().map(Interval::width).fold(0.0, f64::max)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::mid).collect()
    }

    pub fn is_point(&self) -> bool {
        self.dims.iter().all(Interval::is_point)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.dims.iter().zip(x).all(|(d, &v)| d.contains(v))
    }

    pub fn is_subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim() && self.dims.iter().zip(&other.dims).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox> {
        if self.dim() != other.dim() {
            return Err(domain("hull of boxes with different dimensions"));
        }
        Ok(IntervalBox { dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a.hull(b)).collect() })
    }

    /// Split `dim` at its midpoint. Zero-width dimensions are rejected.
    pub fn bisect(&self, dim: usize) -> Result<(IntervalBox, IntervalBox)> {
        let Some(d) = self.dims.get(dim) else {
            return Err(domain(format!("split dimension {dim} out of range for a {}-box", self.dim())));
        };
        if d.is_point() {
            return Err(domain(format!("split dimension {dim} has zero width")));
        }
        let m = d.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.dims[dim] = Interval::raw(d.lo, m);
        right.dims[dim] = Interval::raw(m, d.hi);
        Ok((left, right))
    }
}
