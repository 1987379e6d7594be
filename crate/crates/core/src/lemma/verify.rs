//! Adaptive bisection over the rotated parameter box times the test-vector faces.
//!
//! Tasks are processed level by level. Each level is mapped in parallel and
//! collected in order, so counts and logs do not depend on the worker count.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::certify::{certify, form_f64, test_vector_f64, Inequality};
use super::{hessian_minor, rotated_box, BasisChange, HessianData};
use crate::error::{domain, Result};
use crate::interval::{Interval, IntervalBox};
use crate::taylor::{EnclosureMode, MAX_DEGREE};

/// Version of the per-subset log format.
pub const LOG_FORMAT_VERSION: u32 = 1;
/// Float value of the form below which a box center counts as a counterexample.
const COUNTEREXAMPLE_TOL: f64 = -1e-9;
/// Frontier boxes kept in a budget report.
const FRONTIER_SNAPSHOT: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub max_depth: u32,
    pub max_subsets: u64,
    pub degree: usize,
    pub mode: EnclosureMode,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Box in rotated coordinates; defaults to the lemma's box.
    pub wbox: IntervalBox,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_depth: 60, max_subsets: 10_000_000, degree: MAX_DEGREE, mode: EnclosureMode::Enhanced, workers: None, wbox: rotated_box() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxSnapshot {
    pub wbox: IntervalBox,
    pub face: usize,
    pub vbox: IntervalBox,
    pub depth: u32,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerifyStatus {
    Verified,
    /// The form is negative (in floats) at the center of this box.
    Failed { subset: BoxSnapshot, center_value: f64 },
    BudgetExceeded { reason: String, frontier_size: usize, frontier: Vec<BoxSnapshot> },
}

impl VerifyStatus {
    pub fn label(&self) -> &'static str {
        match self {
            VerifyStatus::Verified => "VERIFIED",
            VerifyStatus::Failed { .. } => "FAILED",
            VerifyStatus::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub inequality: Inequality,
    #[serde(flatten)]
    pub status: VerifyStatus,
    /// Leaves whose certificate passed.
    pub subsets_processed: u64,
    /// All boxes examined, including those that were split.
    pub boxes_examined: u64,
    pub hessian_evaluations: u64,
    pub max_depth: u32,
    pub wall_time_secs: f64,
    /// Leaf count and wall time of the original computation, for comparison only.
    pub reference_subsets: u64,
    pub reference_wall_time: &'static str,
    pub degree: usize,
    pub mode: EnclosureMode,
}

impl VerifyReport {
    pub fn is_verified(&self) -> bool {
        matches!(self.status, VerifyStatus::Verified)
    }
}

#[derive(Clone)]
struct Task {
    wbox: IntervalBox,
    face: usize,
    vbox: IntervalBox,
    depth: u32,
    hessian: Option<Arc<HessianData>>,
}

impl Task {
    fn snapshot(&self) -> BoxSnapshot {
        BoxSnapshot { wbox: self.wbox.clone(), face: self.face, vbox: self.vbox.clone(), depth: self.depth }
    }
}

enum Outcome {
    Pass { margin: f64 },
    Counterexample { value: f64 },
    Split(Box<(Task, Task)>, Option<f64>),
}

/// Widest dimension relative to the initial widths among `range`, ties to the lowest index.
fn widest(task: &Task, w0: &[f64], range: std::ops::Range<usize>) -> Option<usize> {
    let widths: Vec<f64> = task.wbox.dims().iter().chain(task.vbox.dims()).map(|d| d.width()).collect();
    let mut best: Option<(usize, f64)> = None;
    for i in range {
        if w0[i] <= 0.0 || widths[i] <= 0.0 {
            continue;
        }
        let rel = widths[i] / w0[i];
        if best.is_none_or(|(_, b)| rel > b) {
            best = Some((i, rel));
        }
    }
    best.map(|(i, _)| i)
}

/// Dimension to split: a test-vector dimension when `vector_bound`, otherwise
/// a parameter dimension.
fn split_dim(task: &Task, w0: &[f64], vector_bound: bool) -> Option<usize> {
    let nw = task.wbox.dim();
    let (first, second) = if vector_bound { (nw..w0.len(), 0..nw) } else { (0..nw, nw..w0.len()) };
    widest(task, w0, first).or_else(|| widest(task, w0, second))
}

fn process(task: &Task, ineq: Inequality, cfg: &VerifyConfig, basis: &BasisChange, w0: &[f64]) -> Result<(Outcome, bool)> {
    let (hd, fresh) = match &task.hessian {
        Some(h) => (h.clone(), false),
        None => match hessian_minor(basis, &task.wbox, cfg.degree, cfg.mode) {
            Ok(h) => (Arc::new(h), true),
            // f undefined somewhere in the box: treat as an inconclusive certificate
            Err(_) => {
                return split(task, None, None, w0, false).map(|o| (o, true));
            }
        },
    };
    let cert = certify(ineq, &hd.enclosure, task.face, &task.vbox);
    if cert.passes() {
        return Ok((Outcome::Pass { margin: cert.margin() }, fresh));
    }
    let v = test_vector_f64(task.face, &task.vbox.midpoint());
    let value = form_f64(ineq, &hd.at_center, &v);
    if value < COUNTEREXAMPLE_TOL {
        return Ok((Outcome::Counterexample { value }, fresh));
    }
    // split whichever box contributes more to the gap between the float value and the lower bound
    let at_mid = certify(ineq, &hd.enclosure, task.face, &IntervalBox::point(&task.vbox.midpoint())?).margin();
    let vector_bound = at_mid - cert.margin() >= value - at_mid;
    split(task, Some(hd), Some(cert.margin()), w0, vector_bound).map(|o| (o, fresh))
}

fn split(task: &Task, hd: Option<Arc<HessianData>>, margin: Option<f64>, w0: &[f64], vector_bound: bool) -> Result<Outcome> {
    let dim = split_dim(task, w0, vector_bound).ok_or_else(|| domain("no splittable dimension left"))?;
    let nw = task.wbox.dim();
    let (a, b) = if dim < nw {
        let (l, r) = task.wbox.bisect(dim)?;
        (
            Task { wbox: l, face: task.face, vbox: task.vbox.clone(), depth: task.depth + 1, hessian: None },
            Task { wbox: r, face: task.face, vbox: task.vbox.clone(), depth: task.depth + 1, hessian: None },
        )
    } else {
        let (l, r) = task.vbox.bisect(dim - nw)?;
        (
            Task { wbox: task.wbox.clone(), face: task.face, vbox: l, depth: task.depth + 1, hessian: hd.clone() },
            Task { wbox: task.wbox.clone(), face: task.face, vbox: r, depth: task.depth + 1, hessian: hd },
        )
    };
    Ok(Outcome::Split(Box::new((a, b)), margin))
}

fn fmt_box(b: &IntervalBox) -> String {
    let parts: Vec<String> = b.dims().iter().map(|d| format!("[{:.17e},{:.17e}]", d.lo(), d.hi())).collect();
    parts.join(" ")
}

/// Run the certificate. `log`, if given, receives a header and one line per examined box.
pub fn verify(ineq: Inequality, cfg: &VerifyConfig, log: Option<&mut (dyn Write + Send)>) -> Result<VerifyReport> {
    match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| domain(format!("thread pool: {e}")))?;
            pool.install(|| run(ineq, cfg, log))
        }
        None => run(ineq, cfg, log),
    }
}

fn run(ineq: Inequality, cfg: &VerifyConfig, mut log: Option<&mut (dyn Write + Send)>) -> Result<VerifyReport> {
    if cfg.wbox.dim() != 5 {
        return Err(domain("the parameter box must be five-dimensional"));
    }
    if !(2..=MAX_DEGREE).contains(&cfg.degree) {
        return Err(domain(format!("jet degree must be in 2..={MAX_DEGREE}")));
    }
    let start = Instant::now();
    let basis = BasisChange::new();
    let vfull = IntervalBox::new(vec![Interval::new(-1.0, 1.0)?; 3])?;
    let w0: Vec<f64> = cfg.wbox.dims().iter().chain(vfull.dims()).map(|d| d.width()).collect();

    if let Some(l) = log.as_deref_mut() {
        let _ = writeln!(l, "# bwstab verify log v{LOG_FORMAT_VERSION} inequality={} degree={} mode={:?}", ineq.name(), cfg.degree, cfg.mode);
        let _ = writeln!(l, "# depth face status margin wbox vbox");
    }

    let mut frontier: Vec<Task> = (0..4).map(|face| Task { wbox: cfg.wbox.clone(), face, vbox: vfull.clone(), depth: 0, hessian: None }).collect();
    let (mut leaves, mut examined, mut evals, mut max_depth) = (0u64, 0u64, 0u64, 0u32);
    let mut status = VerifyStatus::Verified;

    while !frontier.is_empty() {
        let depth = frontier[0].depth;
        if depth > cfg.max_depth {
            status = VerifyStatus::BudgetExceeded {
                reason: format!("depth limit {} reached", cfg.max_depth),
                frontier_size: frontier.len(),
                frontier: frontier.iter().take(FRONTIER_SNAPSHOT).map(Task::snapshot).collect(),
            };
            break;
        }
        max_depth = max_depth.max(depth);
        let outcomes: Vec<Result<(Outcome, bool)>> = frontier.par_iter().map(|t| process(t, ineq, cfg, &basis, &w0)).collect();
        let mut next = Vec::new();
        let mut failed = None;
        for (task, out) in frontier.iter().zip(outcomes) {
            let (out, fresh) = out?;
            examined += 1;
            evals += fresh as u64;
            let (label, margin) = match &out {
                Outcome::Pass { margin } => ("pass", Some(*margin)),
                Outcome::Counterexample { value } => ("counterexample", Some(*value)),
                Outcome::Split(_, m) => ("split", *m),
            };
            if let Some(l) = log.as_deref_mut() {
                let m = margin.map_or("nan".to_string(), |m| format!("{m:.17e}"));
                let _ = writeln!(l, "{} {} {label} {m} {} {}", task.depth, task.face, fmt_box(&task.wbox), fmt_box(&task.vbox));
            }
            match out {
                Outcome::Pass { .. } => leaves += 1,
                Outcome::Counterexample { value } => {
                    if failed.is_none() {
                        failed = Some((task.snapshot(), value));
                    }
                }
                Outcome::Split(children, _) => {
                    let (a, b) = *children;
                    next.push(a);
                    next.push(b);
                }
            }
        }
        if let Some((subset, center_value)) = failed {
            status = VerifyStatus::Failed { subset, center_value };
            break;
        }
        if leaves + next.len() as u64 > cfg.max_subsets {
            status = VerifyStatus::BudgetExceeded {
                reason: format!("subset limit {} reached", cfg.max_subsets),
                frontier_size: next.len(),
                frontier: next.iter().take(FRONTIER_SNAPSHOT).map(Task::snapshot).collect(),
            };
            break;
        }
        frontier = next;
    }

    let (reference_subsets, reference_wall_time) = match ineq {
        Inequality::Quadratic => (25_880, "8m14s"),
        Inequality::Norm => (2_440, "46s"),
    };
    Ok(VerifyReport {
        inequality: ineq,
        status,
        subsets_processed: leaves,
        boxes_examined: examined,
        hessian_evaluations: evals,
        max_depth,
        wall_time_secs: start.elapsed().as_secs_f64(),
        reference_subsets,
        reference_wall_time,
        degree: cfg.degree,
        mode: cfg.mode,
    })
}
