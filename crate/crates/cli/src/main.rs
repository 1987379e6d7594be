//! `bwstab`: mixed areas, hexagon decompositions, the Hessian certificate and
//! deformation experiments from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input,
//! 3 verification budget exhausted.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bwstab::deform::{deform, isoperimetric_ratio};
use bwstab::geometry::dtr::d_tr;
use bwstab::geometry::mixed::{bw_deficit, mixed_area_betke, mixed_area_betke_auto, mixed_area_minkowski, mixed_area_oracle};
use bwstab::hexagon::{chain_values, decompose};
use bwstab::io::{read_polygon, write_json, InputError};
use bwstab::lemma::{verify, Inequality, VerifyConfig, VerifyStatus};
use bwstab::stability::stability_scan;
use bwstab::taylor::EnclosureMode;
use bwstab::{Error, Vec2};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "bwstab", version, about = "Mixed areas, hexagon decompositions and a Hessian certificate for planar convex polygons")]
struct Cli {
    /// -v prints a summary line on stderr, -vv also writes the per-subset verify log.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Minkowski,
    Betke,
    Oracle,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ineq {
    Quadratic,
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Enhanced,
    Fallback,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed area A(P, Q) of two polygons.
    MixedArea {
        p: PathBuf,
        q: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
        /// Reference direction angle (radians) for the determinant formula.
        #[arg(long)]
        w_angle: Option<f64>,
    },
    /// L(K)^2 - 6√3 A(K, -K).
    Deficit { poly: PathBuf },
    /// Maximal inscribed triangle, hexagons H0, H1, H2 and the deficit chain.
    Hexagons { poly: PathBuf },
    /// Upper estimate of the distance to the nearest regular triangle.
    Dtr {
        poly: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Certify one of the two Hessian inequalities by adaptive bisection.
    VerifyLemma {
        #[arg(long, value_enum)]
        ineq: Ineq,
        #[arg(long, default_value_t = 60)]
        max_depth: u32,
        #[arg(long, default_value_t = 10_000_000)]
        max_subsets: u64,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, value_enum, default_value = "enhanced")]
        mode: Mode,
    },
    /// Check d_tr <= 400 √ε on random near-regular triangles.
    StabilityScan {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Find a deformation that lowers L^2 / A(P, -P).
    Deform { poly: PathBuf },
}

/// Outcome of a command: the report plus an exit code.
struct Outcome {
    report: Value,
    code: u8,
    summary: String,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidPolygon(_) | Error::RetryWithPerturbedW { .. } => Failure::Input(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn report(kind: &str, body: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(format!("bwstab.{kind}")));
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn ok(kind: &str, body: Value, summary: String) -> Outcome {
    Outcome { report: report(kind, body), code: 0, summary }
}

fn cmd_mixed_area(p: &Path, q: &Path, method: Method, w_angle: Option<f64>) -> Result<Outcome, Failure> {
    let p = read_polygon(p)?;
    let q = read_polygon(q)?;
    let betke = || match w_angle {
        Some(a) => mixed_area_betke(&p, &q, Vec2::polar(a)),
        None => mixed_area_betke_auto(&p, &q),
    };
    let body = match method {
        Method::Minkowski => json!({ "minkowski": mixed_area_minkowski(&p, &q) }),
        Method::Oracle => json!({ "oracle": mixed_area_oracle(&p, &q) }),
        Method::Betke => json!({ "betke": betke()? }),
        Method::All => {
            let (m, b, o) = (mixed_area_minkowski(&p, &q), betke()?, mixed_area_oracle(&p, &q));
            let disc = (m - b).abs().max((m - o).abs()).max((b - o).abs());
            json!({ "minkowski": m, "betke": b, "oracle": o, "max_disc": disc })
        }
    };
    let summary = format!("mixed area {body}");
    Ok(ok("mixed_area", body, summary))
}

fn cmd_deficit(poly: &Path) -> Result<Outcome, Failure> {
    let k = read_polygon(poly)?;
    let l = k.perimeter();
    let a = mixed_area_minkowski(&k, &k.reflect());
    let d = bw_deficit(&k);
    let body = json!({ "perimeter": l, "self_mixed_area": a, "deficit": d, "relative": l * l / (6.0 * 3f64.sqrt() * a) - 1.0 });
    Ok(ok("deficit", body, format!("deficit {d:e}")))
}

fn cmd_hexagons(poly: &Path) -> Result<Outcome, Failure> {
    let k = read_polygon(poly)?;
    let d = decompose(&k)?;
    let chain = chain_values(&k, &d);
    let holds = chain.deficit_k >= chain.deficit_h1 - chain.slack && chain.deficit_h1 >= chain.deficit_h0 - chain.slack;
    let body = json!({ "decomposition": to_value(&d), "chain": to_value(&chain), "chain_holds": holds });
    let summary = format!("deficits K {:e} >= H1 {:e} >= H0 {:e}: {}", chain.deficit_k, chain.deficit_h1, chain.deficit_h0, if holds { "holds" } else { "BROKEN" });
    Ok(Outcome { report: report("hexagons", body), code: if holds { 0 } else { 1 }, summary })
}

fn cmd_dtr(poly: &Path, tol: f64) -> Result<Outcome, Failure> {
    let k = read_polygon(poly)?;
    if !(tol > 0.0) {
        return Err(Failure::Input("--tol must be positive".into()));
    }
    let r = d_tr(&k, tol)?;
    let summary = format!("d_tr <= {:.12} (approximate)", r.rho);
    Ok(ok("dtr", to_value(&r), summary))
}

fn log_sink(ineq: Inequality, verbose: u8) -> io::Result<Option<Box<dyn Write + Send>>> {
    if verbose < 2 {
        return Ok(None);
    }
    Ok(Some(match std::env::var_os("BW_LOG_DIR") {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            let path = Path::new(&dir).join(format!("verify-{}.log", ineq.name()));
            Box::new(BufWriter::new(File::create(path)?))
        }
        None => Box::new(BufWriter::new(io::stderr())),
    }))
}

fn cmd_verify(ineq: Ineq, cfg: VerifyConfig, verbose: u8) -> Result<Outcome, Failure> {
    if cfg.max_subsets == 0 || cfg.workers == Some(0) {
        return Err(Failure::Input("budgets and worker count must be positive".into()));
    }
    let ineq = match ineq {
        Ineq::Quadratic => Inequality::Quadratic,
        Ineq::Norm => Inequality::Norm,
    };
    let mut sink = log_sink(ineq, verbose).map_err(|e| Failure::Input(format!("cannot open the verify log: {e}")))?;
    let rep = verify(ineq, &cfg, sink.as_deref_mut().map(|w| w as &mut (dyn Write + Send)))?;
    if let Some(mut w) = sink {
        let _ = w.flush();
    }
    let code = match rep.status {
        VerifyStatus::Verified => 0,
        VerifyStatus::Failed { .. } => 1,
        VerifyStatus::BudgetExceeded { .. } => 3,
    };
    let summary = format!(
        "{} {}: {} subsets ({} boxes) in {:.1}s; reference {} subsets, {}",
        ineq.name(),
        rep.status.label(),
        rep.subsets_processed,
        rep.boxes_examined,
        rep.wall_time_secs,
        rep.reference_subsets,
        rep.reference_wall_time
    );
    Ok(Outcome { report: report("verify", to_value(&rep)), code, summary })
}

fn cmd_stability(n: usize, seed: u64) -> Result<Outcome, Failure> {
    let scan = stability_scan(n, seed)?;
    let code = if scan.violations == 0 { 0 } else { 1 };
    let summary = format!("{} samples, {} violations, max d_tr/√ε = {:.3}", scan.samples.len(), scan.violations, scan.max_ratio);
    Ok(Outcome { report: report("stability_scan", to_value(&scan)), code, summary })
}

fn cmd_deform(poly: &Path) -> Result<Outcome, Failure> {
    let p = read_polygon(poly)?;
    let m = deform(&p)?;
    let decreased = m.decreases_ratio();
    let summary = format!("ratio {:.15} -> {:.15}", isoperimetric_ratio(&p), m.after.ratio);
    Ok(Outcome { report: report("deform", to_value(&m)), code: if decreased { 0 } else { 1 }, summary })
}

fn emit(value: &Value, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_json(&mut w, value)?;
            writeln!(w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_json(&mut w, value)?;
            writeln!(w)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::MixedArea { p, q, method, w_angle } => cmd_mixed_area(&p, &q, method, w_angle),
        Command::Deficit { poly } => cmd_deficit(&poly),
        Command::Hexagons { poly } => cmd_hexagons(&poly),
        Command::Dtr { poly, tol } => cmd_dtr(&poly, tol),
        Command::VerifyLemma { ineq, max_depth, max_subsets, workers, degree, mode } => {
            let mode = match mode {
                Mode::Enhanced => EnclosureMode::Enhanced,
                Mode::Fallback => EnclosureMode::Fallback,
            };
            let cfg = VerifyConfig { max_depth, max_subsets, workers, degree, mode, ..VerifyConfig::default() };
            cmd_verify(ineq, cfg, cli.verbose)
        }
        Command::StabilityScan { n, seed } => cmd_stability(n, seed),
        Command::Deform { poly } => cmd_deform(&poly),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let verbose = cli.verbose;
    let out = cli.out.clone();
    match run(cli) {
        Ok(o) => {
            if verbose >= 1 {
                eprintln!("{}", o.summary);
            }
            if let Err(e) = emit(&o.report, out.as_deref()) {
                eprintln!("error: cannot write the report: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(o.code)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
