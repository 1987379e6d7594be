//! Shared generators and exact-arithmetic oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use bwstab::interval::round::Rounding;
use bwstab::{ConvexPolygon, Vec2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Random float with a random binary exponent in `[-emax, emax]` and a full
/// random mantissa, occasionally replaced by a special value.
pub fn random_float<R: Rng + ?Sized>(rng: &mut R, emax: i32) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => 1.0,
        2 => -1.0,
        3 => 2f64.powi(rng.random_range(-emax..=emax)),
        4 => rng.random_range(-16i32..=16) as f64,
        _ => {
            let m: f64 = rng.random_range(1.0..2.0);
            let s = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            s * m * 2f64.powi(rng.random_range(-emax..=emax))
        }
    }
}

/// Exact real `op(a, b)` for the four arithmetic operations.
pub fn exact_op(op: usize, a: &BigRational, b: &BigRational) -> Option<BigRational> {
    match op {
        0 => Some(a + b),
        1 => Some(a - b),
        2 => Some(a * b),
        _ => (!b.is_zero()).then(|| a / b),
    }
}

/// Run `n` random directed-rounding checks (add, sub, mul, div, sqrt) and
/// count those whose result fails to enclose the exact value.
pub fn primitive_checks<R: Rounding>(seed: u64, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut done = 0;
    while done < n {
        let a = random_float(&mut rng, 60);
        let b = random_float(&mut rng, 60);
        let (ea, eb) = (rat(a), rat(b));
        let op = rng.random_range(0..5);
        let ok = match op {
            4 => {
                let x = a.abs();
                sqrt_enclosed(x, R::sqrt_down(x), R::sqrt_up(x))
            }
            _ => {
                let (lo, hi) = match op {
                    0 => (R::add_down(a, b), R::add_up(a, b)),
                    1 => (R::sub_down(a, b), R::sub_up(a, b)),
                    2 => (R::mul_down(a, b), R::mul_up(a, b)),
                    _ if b == 0.0 => continue,
                    _ => (R::div_down(a, b), R::div_up(a, b)),
                };
                exact_op(op, &ea, &eb).is_some_and(|x| in_closed(&x, lo, hi))
            }
        };
        done += 1;
        if !ok {
            bad += 1;
        }
    }
    bad
}

pub fn in_closed(x: &BigRational, lo: f64, hi: f64) -> bool {
    rat(lo) <= *x && *x <= rat(hi)
}

/// `lo <= √x <= hi` decided exactly by squaring.
pub fn sqrt_enclosed(x: f64, lo: f64, hi: f64) -> bool {
    let x = rat(x);
    (lo <= 0.0 || rat(lo) * rat(lo) <= x) && rat(hi) * rat(hi) >= x && hi >= 0.0
}

/// Exact `2 * area` of a polygon as a rational.
pub fn twice_area_exact(v: &[Vec2]) -> BigRational {
    let n = v.len();
    let mut s = BigRational::zero();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        s += rat(a.x) * rat(b.y) - rat(b.x) * rat(a.y);
    }
    s
}

pub fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// Convex polygon with `n` vertices on a random ellipse inside `[-10, 10]^2`.
pub fn random_convex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ConvexPolygon {
    loop {
        let c = Vec2::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let (rx, ry) = (rng.random_range(0.5..6.0), rng.random_range(0.5..6.0));
        let rot = rng.random_range(0.0..TAU);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Vec2> = angles.iter().map(|&a| c + Vec2::new(rx * a.cos(), ry * a.sin()).rotate(rot)).collect();
        if pts.iter().any(|p| p.x.abs() > 10.0 || p.y.abs() > 10.0) {
            continue;
        }
        if let Ok(p) = ConvexPolygon::new(pts) {
            if p.len() == n {
                return p;
            }
        }
    }
}

pub fn random_triangle<R: Rng + ?Sized>(rng: &mut R) -> ConvexPolygon {
    loop {
        let pts: Vec<Vec2> = (0..3).map(|_| Vec2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))).collect();
        if let Ok(t) = ConvexPolygon::from_cycle(pts) {
            if t.len() == 3 && t.area() > 1e-3 {
                return t;
            }
        }
    }
}

/// Regular triangle of side 2 with an isosceles cap of height `√eps` on every side.
pub fn bump_hexagon(eps: f64) -> ConvexPolygon {
    let v = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(1.0, 3f64.sqrt())];
    let mut pts = Vec::new();
    for i in 0..3 {
        let (a, b) = (v[i], v[(i + 1) % 3]);
        let out = (b - a).perp_cw().normalized().unwrap();
        pts.push(a);
        pts.push((a + b) * 0.5 + out * eps.sqrt());
    }
    ConvexPolygon::new(pts).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
