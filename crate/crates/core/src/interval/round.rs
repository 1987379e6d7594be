//! Directed rounding for `f64` operations.
//!
//! Two backends are provided. [`Stepped`] performs the native operation and
//! moves one ulp outward, except for results that are exact anyway (a zero
//! operand or sum, or a product by a power of two). [`Exact`] uses error-free
//! transformations (TwoSum, FMA residuals) to learn the sign of the rounding
//! error and only steps when the native result is on the wrong side, which
//! yields the correctly rounded directed result. Near overflow or underflow,
//! where the transformations stop being exact, it falls back to stepping.

/// A set of directed-rounding primitives. Every `*_down` result is `<=` the
/// exact real result and every `*_up` result is `>=` it.
pub trait Rounding {
    fn add_down(a: f64, b: f64) -> f64;
    fn add_up(a: f64, b: f64) -> f64;
    fn mul_down(a: f64, b: f64) -> f64;
    fn mul_up(a: f64, b: f64) -> f64;
    fn div_down(a: f64, b: f64) -> f64;
    fn div_up(a: f64, b: f64) -> f64;
    fn sqrt_down(a: f64) -> f64;
    fn sqrt_up(a: f64) -> f64;

    fn sub_down(a: f64, b: f64) -> f64 {
        Self::add_down(a, -b)
    }
    fn sub_up(a: f64, b: f64) -> f64 {
        Self::add_up(a, -b)
    }
}

/// Portable one-ulp outward stepping after every native operation.
#[derive(Debug, Clone, Copy)]
pub struct Stepped;

// A zero operand or a zero sum means the native addition was exact (a sum
// that rounds to zero, or to a subnormal, is always exact).
#[inline]
fn exact_sum(a: f64, b: f64, s: f64) -> bool {
    a == 0.0 || b == 0.0 || s == 0.0
}

#[inline]
fn is_power_of_two(x: f64) -> bool {
    const MANTISSA: u64 = (1 << 52) - 1;
    x.is_normal() && x.to_bits() & MANTISSA == 0
}

// Multiplication by zero, or by a power of two with a normal result, is exact.
#[inline]
fn exact_product(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 || b == 0.0 {
        return Some(0.0);
    }
    if is_power_of_two(a) || is_power_of_two(b) {
        let p = a * b;
        if p.is_normal() {
            return Some(p);
        }
    }
    None
}

impl Rounding for Stepped {
    #[inline]
    fn add_down(a: f64, b: f64) -> f64 {
        let s = a + b;
        if exact_sum(a, b, s) && s.is_finite() {
            return s;
        }
        s.next_down()
    }
    #[inline]
    fn add_up(a: f64, b: f64) -> f64 {
        let s = a + b;
        if exact_sum(a, b, s) && s.is_finite() {
            return s;
        }
        s.next_up()
    }
    #[inline]
    fn mul_down(a: f64, b: f64) -> f64 {
        exact_product(a, b).unwrap_or_else(|| (a * b).next_down())
    }
    #[inline]
    fn mul_up(a: f64, b: f64) -> f64 {
        exact_product(a, b).unwrap_or_else(|| (a * b).next_up())
    }
    #[inline]
    fn div_down(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        (a / b).next_down()
    }
    #[inline]
    fn div_up(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        (a / b).next_up()
    }
    #[inline]
    fn sqrt_down(a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        a.sqrt().next_down().max(0.0)
    }
    #[inline]
    fn sqrt_up(a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        a.sqrt().next_up()
    }
}

/// Correctly rounded directed operations via error-free transformations.
#[derive(Debug, Clone, Copy)]
pub struct Exact;

// Below this magnitude FMA residuals may underflow and stop being exact.
const TINY: f64 = 1e-280;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

/// Adjust `approx` given the sign of `exact - approx`.
#[inline]
fn settle_down(approx: f64, err_sign: f64) -> f64 {
    if err_sign < 0.0 {
        approx.next_down()
    } else {
        approx
    }
}

#[inline]
fn settle_up(approx: f64, err_sign: f64) -> f64 {
    if err_sign > 0.0 {
        approx.next_up()
    } else {
        approx
    }
}

impl Exact {
    #[inline]
    fn mul_err(a: f64, b: f64, p: f64) -> Option<f64> {
        if !p.is_finite() || p.abs() < TINY {
            None
        } else {
            Some(a.mul_add(b, -p))
        }
    }

    // sign of (a/b - q)
    #[inline]
    fn div_err(a: f64, b: f64, q: f64) -> Option<f64> {
        if !q.is_finite() || q.abs() < TINY || a.abs() < TINY {
            None
        } else {
            let r = (-q).mul_add(b, a);
            Some(if b > 0.0 { r } else { -r })
        }
    }
}

impl Rounding for Exact {
    #[inline]
    fn add_down(a: f64, b: f64) -> f64 {
        let s = a + b;
        if !s.is_finite() {
            return s.next_down();
        }
        settle_down(s, two_sum_err(a, b, s))
    }
    #[inline]
    fn add_up(a: f64, b: f64) -> f64 {
        let s = a + b;
        if !s.is_finite() {
            return s.next_up();
        }
        settle_up(s, two_sum_err(a, b, s))
    }
    #[inline]
    fn mul_down(a: f64, b: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let p = a * b;
        match Self::mul_err(a, b, p) {
            Some(e) => settle_down(p, e),
            None => p.next_down(),
        }
    }
    #[inline]
    fn mul_up(a: f64, b: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let p = a * b;
        match Self::mul_err(a, b, p) {
            Some(e) => settle_up(p, e),
            None => p.next_up(),
        }
    }
    #[inline]
    fn div_down(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let q = a / b;
        match Self::div_err(a, b, q) {
            Some(e) => settle_down(q, e),
            None => q.next_down(),
        }
    }
    #[inline]
    fn div_up(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let q = a / b;
        match Self::div_err(a, b, q) {
            Some(e) => settle_up(q, e),
            None => q.next_up(),
        }
    }
    #[inline]
    fn sqrt_down(a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let s = a.sqrt();
        if a < TINY || !s.is_finite() {
            return s.next_down().max(0.0);
        }
        settle_down(s, (-s).mul_add(s, a))
    }
    #[inline]
    fn sqrt_up(a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let s = a.sqrt();
        if a < TINY || !s.is_finite() {
            return s.next_up();
        }
        settle_up(s, (-s).mul_add(s, a))
    }
}

#[cfg(not(feature = "exact-rounding"))]
pub type Active = Stepped;
#[cfg(feature = "exact-rounding")]
pub type Active = Exact;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_backend_is_tight_on_representable_results() {
        assert_eq!(Exact::add_down(1.0, 3.0), 4.0);
        assert_eq!(Exact::add_up(2.0, 4.0), 6.0);
        assert_eq!(Exact::mul_down(-1.0, 4.0), -4.0);
        assert_eq!(Exact::div_up(1.0, 4.0), 0.25);
        assert_eq!(Exact::sqrt_down(9.0), 3.0);
        assert_eq!(Exact::sqrt_up(4.0), 2.0);
    }

    #[test]
    fn exact_backend_brackets_inexact_results() {
        let lo = Exact::div_down(1.0, 3.0);
        let hi = Exact::div_up(1.0, 3.0);
        assert_eq!(lo.next_up(), hi);
        let lo = Exact::add_down(0.1, 0.2);
        let hi = Exact::add_up(0.1, 0.2);
        assert!(lo < hi && lo.next_up() == hi);
    }

    #[test]
    fn stepped_backend_always_widens() {
        assert!(Stepped::add_down(1.0, 3.0) < 4.0);
        assert!(Stepped::add_up(1.0, 3.0) > 4.0);
        assert_eq!(Stepped::mul_up(0.0, 5.0), 0.0);
        assert_eq!(Stepped::mul_down(-1.0, 0.3), -0.3);
        assert_eq!(Stepped::mul_up(2.0, 2.0), 4.0);
        assert!(Stepped::mul_up(3.0, 3.0) > 9.0);
        assert!(Stepped::mul_down(f64::MIN_POSITIVE, 0.5) < f64::MIN_POSITIVE * 0.5);
        assert_eq!(Stepped::add_down(2.0, -2.0), 0.0);
        assert_eq!(Stepped::add_up(0.0, 0.1), 0.1);
        assert_eq!(Stepped::sqrt_down(0.0), 0.0);
    }
}
