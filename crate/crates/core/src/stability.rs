//! Empirical check of `d_tr(K) <= 400 √ε` on random near-regular triangles,
//! where `ε = L(K)^2 / (6√3 A(K, -K)) - 1`.

use std::f64::consts::TAU;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::dtr::d_tr;
use crate::geometry::mixed::mixed_area_minkowski;
use crate::geometry::{ConvexPolygon, Vec2};

pub const STABILITY_CONSTANT: f64 = 400.0;

/// Samples must satisfy `d_tr <= 1/36`.
pub const DTR_LIMIT: f64 = 1.0 / 36.0;

/// Samples must satisfy `ε <= 1/1080^2`.
pub const EPS_LIMIT: f64 = 1.0 / (1080.0 * 1080.0);

const DTR_TOL: f64 = 1e-10;

/// A regular triangle of circumradius 1 with random center and rotation, its
/// vertices moved by at most `delta`, and with probability 1/2 an outward bump
/// of height at most `delta` on each side.
pub fn perturbed_triangle<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> Result<ConvexPolygon> {
    let center = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let phase = rng.random_range(0.0..TAU);
    let mut pts: Vec<Vec2> = (0..3)
        .map(|i| {
            let jitter = Vec2::polar(rng.random_range(0.0..TAU)) * (delta * rng.random_range(0.0..1.0f64).sqrt());
            center + Vec2::polar(phase + TAU * i as f64 / 3.0) + jitter
        })
        .collect();
    if rng.random_bool(0.5) {
        for i in 0..3 {
            let (a, b) = (pts[i], pts[(i + 1) % 3]);
            let s = rng.random_range(0.2..0.8);
            let out = (b - a).perp_cw().normalized().ok_or_else(|| domain("degenerate side"))?;
            pts.push(a + (b - a) * s + out * (delta * rng.random_range(0.0..1.0)));
        }
    }
    ConvexPolygon::hull_of(&pts)
}

/// `L^2 / (6√3 A(K, -K)) - 1`.
pub fn relative_deficit(k: &ConvexPolygon) -> f64 {
    let l = k.perimeter();
    l * l / (6.0 * 3f64.sqrt() * mixed_area_minkowski(k, &k.reflect())) - 1.0
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySample {
    pub index: usize,
    pub delta: f64,
    pub vertex_count: usize,
    pub epsilon: f64,
    pub dtr: f64,
    /// `400 √ε`.
    pub bound: f64,
    /// `d_tr / √ε`.
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityScan {
    pub seed: u64,
    pub requested: usize,
    pub candidates: usize,
    pub rejected_dtr: usize,
    pub rejected_epsilon: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub samples: Vec<StabilitySample>,
}

/// Draw candidates until `n` of them satisfy both sample limits, recording
/// each accepted sample. Gives up after `50 n` candidates.
pub fn stability_scan(n: usize, seed: u64) -> Result<StabilityScan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = StabilityScan { seed, requested: n, candidates: 0, rejected_dtr: 0, rejected_epsilon: 0, violations: 0, max_ratio: 0.0, samples: Vec::with_capacity(n) };
    while scan.samples.len() < n {
        if scan.candidates >= 50 * n.max(1) {
            return Err(domain(format!("only {} of {n} candidates met the sample limits", scan.samples.len())));
        }
        scan.candidates += 1;
        // log-uniform in [1e-6, 1e-3]
        let delta = 10f64.powf(rng.random_range(-6.0..-3.0));
        let k = perturbed_triangle(&mut rng, delta)?;
        let epsilon = relative_deficit(&k);
        if epsilon > EPS_LIMIT {
            scan.rejected_epsilon += 1;
            continue;
        }
        let dtr = d_tr(&k, DTR_TOL)?.rho;
        if dtr > DTR_LIMIT {
            scan.rejected_dtr += 1;
            continue;
        }
        let root = epsilon.max(0.0).sqrt();
        let bound = STABILITY_CONSTANT * root;
        let holds = dtr <= bound;
        let ratio = if root > 0.0 { dtr / root } else { f64::INFINITY };
        if !holds {
            scan.violations += 1;
        }
        scan.max_ratio = scan.max_ratio.max(ratio);
        scan.samples.push(StabilitySample { index: scan.samples.len(), delta, vertex_count: k.len(), epsilon, dtr, bound, ratio, holds });
    }
    Ok(scan)
}
