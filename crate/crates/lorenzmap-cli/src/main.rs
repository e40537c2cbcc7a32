//! Command-line front end: single analyses emit JSON, scans emit CSV.
//!
//! Exit codes: 0 success, 2 precondition failure, 3 numerical failure
//! (timeout, step underflow, unrealizable fit), 4 I/O failure. Every error
//! path prints machine-readable JSON on stderr. Fixed seeds give
//! byte-identical outputs.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use lorenzmap::flow::{separatrix_kneading, FlowConfig, FlowError, LorenzParams};
use lorenzmap::kneading::{classify_beta, BetaClass, ClassifyError, EpsilonLadder, AT_EPSILON_TOL};
use lorenzmap::maps::{beta_transform, symmetric_beta, MapError};
use lorenzmap::measure::{density, MeasureError};
use lorenzmap::nonsymmetric::{
    conjugate_beta_alpha, cycle_points, region_curves, NonSymError, TwoSlopeMap,
};
use lorenzmap::renorm::{period_set, renorm_tower, RenormError};
use lorenzmap::rotation::{rotation_interval_estimate, RotationError};
use lorenzmap::template::{enumerate_lorenz_words, lorenz_braid, trip_number, TemplateSpec};

const EXIT_PRECONDITION: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;
const EXIT_IO: i32 = 4;

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            kind,
            message: message.into(),
        }
    }
}

macro_rules! from_error {
    ($ty:ty, $kind:literal, $code:expr) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::new($code, $kind, e.to_string())
            }
        }
    };
}

from_error!(MapError, "map", EXIT_PRECONDITION);
from_error!(RenormError, "renorm", EXIT_PRECONDITION);
from_error!(MeasureError, "measure", EXIT_PRECONDITION);
from_error!(NonSymError, "nonsymmetric", EXIT_PRECONDITION);
from_error!(RotationError, "rotation", EXIT_PRECONDITION);
from_error!(
    lorenzmap::template::TemplateError,
    "template",
    EXIT_PRECONDITION
);

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        let code = match e {
            ClassifyError::NonRealizable { .. } => EXIT_NUMERICAL,
            _ => EXIT_PRECONDITION,
        };
        Failure::new(code, "kneading", e.to_string())
    }
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        let code = match e {
            FlowError::Escape { .. }
            | FlowError::Timeout { .. }
            | FlowError::NearOrigin
            | FlowError::Ode(_) => EXIT_NUMERICAL,
            FlowError::Fit(ClassifyError::NonRealizable { .. }) => EXIT_NUMERICAL,
            _ => EXIT_PRECONDITION,
        };
        Failure::new(code, "flow", e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, "io", e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "lorenzmap",
    about = "Expanding Lorenz maps, beta-transformations, and the Lorenz-flow reduction harness",
    version
)]
struct Cli {
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value config file for flow runs (tol, delta, delta0, t_max,
    /// min_return_time); flags override file entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampled computations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kneading invariant of a beta-transformation.
    Knead {
        #[arg(long)]
        beta: f64,
        /// Offset alpha; defaults to the symmetric family 1 - beta/2.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 64)]
        symbols: usize,
    },
    /// Position of beta against the epsilon ladder, with certificate.
    Classify {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = AT_EPSILON_TOL)]
        at_tol: f64,
    },
    /// (2,2)-renormalization tower of the symmetric map.
    Renorm {
        #[arg(long)]
        beta: f64,
    },
    /// Brute-force period set with the renormalization algebra.
    Periods {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 12)]
        max: usize,
    },
    /// Rotation-interval estimate with exact witnesses.
    Rotation {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 10)]
        max_period: usize,
    },
    /// Invariant density as CSV (x, density).
    Density {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 40)]
        terms: usize,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// Two-slope map H_{s,r}: cycle, conjugate parameters, certificate.
    Hsr {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 48)]
        certificate_len: usize,
    },
    /// CSV of the region curves (s, L(s), U(s)).
    HsrRegion {
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Separatrix kneading of the Lorenz flow with the fitted slope.
    FlowKnead {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 30)]
        symbols: usize,
        /// Integration tolerance; overrides the config file.
        #[arg(long)]
        tol: Option<f64>,
        /// Separatrix launch offset; overrides the config file.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// CSV sweep over rho: (sigma, rho, mu, k10, fitted_beta).
    FlowSweep {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        rho_min: f64,
        #[arg(long)]
        rho_max: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 30)]
        symbols: usize,
    },
    /// Lorenz-template orbit words with braids and trip numbers.
    Template {
        #[arg(long)]
        period: usize,
        #[arg(long, default_value_t = 0)]
        twists: i64,
    },
    /// Parameter scans: CSV, one row per cell, errors recorded inline.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
}

#[derive(Subcommand)]
enum ScanKind {
    /// Scan beta over (1,2]: ladder interval and period counts.
    Beta {
        #[arg(long, default_value_t = 512)]
        cells: usize,
        #[arg(long, default_value_t = 8)]
        max_period: usize,
    },
    /// Scan (s,r) over (1,sqrt2] x (1,2]: region membership and certificates.
    Sr {
        #[arg(long, default_value_t = 32)]
        cells: usize,
    },
    /// Scan (sigma, rho) with fixed mu: separatrix diagnostics.
    Flow {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        sigma_min: f64,
        #[arg(long)]
        sigma_max: f64,
        #[arg(long)]
        rho_min: f64,
        #[arg(long)]
        rho_max: f64,
        #[arg(long, default_value_t = 2)]
        cells: usize,
        #[arg(long, default_value_t = 20)]
        symbols: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(failure) => {
            let payload = json!({
                "error": failure.kind,
                "message": failure.message,
            });
            eprintln!("{payload}");
            std::process::exit(failure.code);
        }
    }
}

fn output(out: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                lock.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::new(EXIT_IO, "serialize", e.to_string()))?;
    output(out, &body)
}

fn check_period_bound(max_period: usize) -> Result<(), Failure> {
    if max_period == 0 || max_period > 24 {
        return Err(Failure::new(
            EXIT_PRECONDITION,
            "periods",
            format!("max period {max_period} outside 1..=24 (orbit enumeration bound)"),
        ));
    }
    Ok(())
}

fn flow_config(path: &Option<PathBuf>) -> Result<FlowConfig, Failure> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(FlowConfig::parse(&text)?)
        }
        None => Ok(FlowConfig::default()),
    }
}

fn kneading_json(seq: &lorenzmap::maps::KneadingSequence, symbols: usize) -> serde_json::Value {
    match seq {
        lorenzmap::maps::KneadingSequence::Stream(s) => json!({
            "certified": true,
            "stream": s.to_string(),
            "prefix": s.prefix(symbols).to_string(),
        }),
        lorenzmap::maps::KneadingSequence::Prefix(w) => json!({
            "certified": false,
            "stream": null,
            "prefix": w.to_string(),
        }),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Knead {
            beta,
            alpha,
            symbols,
        } => {
            let map = match alpha {
                Some(alpha) => beta_transform(beta, alpha)?,
                None => symmetric_beta(beta)?,
            };
            let k = map.kneading(symbols.max(1))?;
            emit_json(
                &cli.out,
                &json!({
                    "map": map,
                    "eta_plus": kneading_json(&k.plus, symbols),
                    "eta_minus": kneading_json(&k.minus, symbols),
                    "admissible": k.admissible(),
                }),
            )
        }
        Command::Classify { beta, at_tol } => {
            let ladder = EpsilonLadder::new(24);
            let class = classify_beta(beta, &ladder, at_tol)?;
            let value = match &class {
                BetaClass::BelowSqrt2 => json!({
                    "interval_index": null,
                    "below_sqrt2": true,
                    "epsilon_lo": null,
                    "epsilon_hi": ladder.get(1),
                    "certificate": null,
                }),
                BetaClass::AtEpsilon { i, epsilon } => json!({
                    "interval_index": null,
                    "at_epsilon": i,
                    "epsilon_lo": epsilon,
                    "epsilon_hi": epsilon,
                    "certificate": null,
                }),
                BetaClass::Between {
                    i,
                    epsilon_lo,
                    epsilon_hi,
                    certificate,
                } => json!({
                    "interval_index": i,
                    "epsilon_lo": epsilon_lo,
                    "epsilon_hi": epsilon_hi,
                    "certificate": certificate,
                }),
            };
            emit_json(&cli.out, &value)
        }
        Command::Renorm { beta } => {
            let tower = renorm_tower(beta)?;
            emit_json(&cli.out, &tower)
        }
        Command::Periods { beta, max } => {
            check_period_bound(max)?;
            let report = period_set(&symmetric_beta(beta)?, max)?;
            emit_json(&cli.out, &report)
        }
        Command::Rotation {
            beta,
            samples,
            iters,
            max_period,
        } => {
            check_period_bound(max_period)?;
            let est = rotation_interval_estimate(
                &symmetric_beta(beta)?,
                samples,
                iters,
                max_period,
                cli.seed,
            )?;
            emit_json(
                &cli.out,
                &json!({
                    "a": est.lo,
                    "b": est.hi,
                    "witnesses": est.witnesses,
                }),
            )
        }
        Command::Density { beta, terms, grid } => {
            let d = density(beta, terms, grid)?;
            let mut body = String::from("x,density\n");
            for (x, v) in &d.grid {
                body.push_str(&format!("{x},{v}\n"));
            }
            output(&cli.out, &body)
        }
        Command::Hsr {
            s,
            r,
            certificate_len,
        } => {
            let h = TwoSlopeMap::new(s, r)?;
            let report = conjugate_beta_alpha(s, r, certificate_len.clamp(8, 64))?;
            let cycle = match region_curves(s) {
                Ok((lo, hi)) if lo <= r && r <= hi => cycle_points(s, r).ok(),
                _ => None,
            };
            emit_json(
                &cli.out,
                &json!({
                    "c": h.critical,
                    "z0": cycle.map(|c| c.z0),
                    "z1": cycle.map(|c| c.z1),
                    "beta": report.beta,
                    "alpha": report.alpha,
                    "kneading_prefix": report.kneading_prefix,
                    "certificate": report.certificate,
                }),
            )
        }
        Command::HsrRegion { grid } => {
            let sqrt2 = 2.0_f64.sqrt();
            let mut body = String::from("s,lower,upper\n");
            for k in 1..=grid {
                let s = 1.0 + (sqrt2 - 1.0) * (k as f64) / (grid as f64 + 1.0);
                let (lo, hi) = region_curves(s)?;
                body.push_str(&format!("{s},{lo},{hi}\n"));
            }
            output(&cli.out, &body)
        }
        Command::FlowKnead {
            sigma,
            rho,
            mu,
            symbols,
            tol,
            delta,
        } => {
            let params = LorenzParams::new(sigma, rho, mu)?;
            let mut config = flow_config(&cli.config)?;
            if let Some(tol) = tol {
                config.tol = tol;
            }
            if let Some(delta) = delta {
                config.delta = delta;
            }
            let k = separatrix_kneading(&params, &config, symbols.max(2))?;
            emit_json(&cli.out, &k)
        }
        Command::FlowSweep {
            sigma,
            mu,
            rho_min,
            rho_max,
            steps,
            symbols,
        } => {
            let config = flow_config(&cli.config)?;
            let rhos: Vec<f64> = (0..steps.max(2))
                .map(|k| rho_min + (rho_max - rho_min) * k as f64 / (steps.max(2) - 1) as f64)
                .collect();
            let rows: Vec<String> = rhos
                .par_iter()
                .map(|&rho| {
                    let params = match LorenzParams::new(sigma, rho, mu) {
                        Ok(p) => p,
                        Err(e) => return format!("{sigma},{rho},{mu},,,error:{e}"),
                    };
                    match separatrix_kneading(&params, &config, symbols) {
                        Ok(k) => format!("{sigma},{rho},{mu},{},{},ok", k.k10, k.fitted_beta),
                        Err(e) => format!("{sigma},{rho},{mu},,,error:{e}"),
                    }
                })
                .collect();
            let mut body = String::from("sigma,rho,mu,k10,fitted_beta,status\n");
            for row in rows {
                body.push_str(&row);
                body.push('\n');
            }
            output(&cli.out, &body)
        }
        Command::Template { period, twists } => {
            let spec = TemplateSpec::new(twists, twists)?;
            let words = enumerate_lorenz_words(period)?;
            let mut items = Vec::with_capacity(words.len());
            for w in &words {
                let braid = lorenz_braid(w, spec)?;
                items.push(json!({
                    "word": w.to_string(),
                    "braid": braid,
                    "trip": trip_number(w),
                }));
            }
            emit_json(&cli.out, &items)
        }
        Command::Scan { kind } => run_scan(kind, &cli.out, &cli.config, cli.seed),
    }
}

fn run_scan(
    kind: ScanKind,
    out: &Option<PathBuf>,
    config: &Option<PathBuf>,
    seed: u64,
) -> Result<(), Failure> {
    match kind {
        ScanKind::Beta { cells, max_period } => {
            check_period_bound(max_period)?;
            if cells == 0 || cells > 1_000_000 {
                return Err(Failure::new(
                    EXIT_PRECONDITION,
                    "scan",
                    format!("cells = {cells} outside 1..=1_000_000"),
                ));
            }
            let ladder = EpsilonLadder::new(24);
            let betas: Vec<f64> = (0..cells)
                .map(|k| 1.0 + (k as f64 + 1.0) / (cells as f64 + 1.0))
                .collect();
            let rows: Vec<String> = betas
                .par_iter()
                .map(|&beta| {
                    let class = match classify_beta(beta, &ladder, AT_EPSILON_TOL) {
                        Ok(c) => c,
                        Err(e) => return format!("{beta},,,,error:{e}"),
                    };
                    let (index, at) = match class {
                        BetaClass::BelowSqrt2 => (0, String::new()),
                        BetaClass::AtEpsilon { i, .. } => (i, i.to_string()),
                        BetaClass::Between { i, .. } => (i, String::new()),
                    };
                    match symmetric_beta(beta).map(|m| m.periodic_orbits(max_period).len()) {
                        Ok(count) => format!("{beta},{index},{at},{count},ok"),
                        Err(e) => format!("{beta},{index},{at},,error:{e}"),
                    }
                })
                .collect();
            let mut body = String::from("beta,interval_index,at_epsilon,orbit_count,status\n");
            for row in rows {
                body.push_str(&row);
                body.push('\n');
            }
            output(out, &body)
        }
        ScanKind::Sr { cells } => {
            if cells == 0 || cells * cells > 1_000_000 {
                return Err(Failure::new(
                    EXIT_PRECONDITION,
                    "scan",
                    format!("grid {cells}x{cells} too large"),
                ));
            }
            let sqrt2 = 2.0_f64.sqrt();
            let mut grid = Vec::with_capacity(cells * cells);
            for i in 0..cells {
                let s = 1.0 + (sqrt2 - 1.0) * (i as f64 + 1.0) / (cells as f64 + 1.0);
                for j in 0..cells {
                    let r = 1.0 + (j as f64 + 1.0) / (cells as f64 + 1.0);
                    grid.push((s, r));
                }
            }
            let rows: Vec<String> = grid
                .par_iter()
                .map(|&(s, r)| {
                    let in_region = match region_curves(s) {
                        Ok((lo, hi)) => lo <= r && r <= hi,
                        Err(e) => return format!("{s},{r},,,,,error:{e}"),
                    };
                    match conjugate_beta_alpha(s, r, 48) {
                        Ok(rep) => format!(
                            "{s},{r},{in_region},{},{},{},ok",
                            rep.beta, rep.alpha, rep.certificate
                        ),
                        Err(e) => format!("{s},{r},{in_region},,,,error:{e}"),
                    }
                })
                .collect();
            let mut body = String::from("s,r,in_region,beta,alpha,certificate,status\n");
            for row in rows {
                body.push_str(&row);
                body.push('\n');
            }
            output(out, &body)
        }
        ScanKind::Flow {
            mu,
            sigma_min,
            sigma_max,
            rho_min,
            rho_max,
            cells,
            symbols,
        } => {
            if cells == 0 || cells * cells > 10_000 {
                return Err(Failure::new(
                    EXIT_PRECONDITION,
                    "scan",
                    format!("flow grid {cells}x{cells} too large"),
                ));
            }
            let cfg = flow_config(config)?;
            let _ = seed;
            let mut grid = Vec::with_capacity(cells * cells);
            for i in 0..cells {
                let frac = |k: usize| {
                    if cells == 1 {
                        0.5
                    } else {
                        k as f64 / (cells - 1) as f64
                    }
                };
                let sigma = sigma_min + (sigma_max - sigma_min) * frac(i);
                for j in 0..cells {
                    let rho = rho_min + (rho_max - rho_min) * frac(j);
                    grid.push((sigma, rho));
                }
            }
            let rows: Vec<String> = grid
                .par_iter()
                .map(|&(sigma, rho)| {
                    let params = match LorenzParams::new(sigma, rho, mu) {
                        Ok(p) => p,
                        Err(e) => return format!("{sigma},{rho},{mu},,,error:{e}"),
                    };
                    match separatrix_kneading(&params, &cfg, symbols) {
                        Ok(k) => {
                            format!("{sigma},{rho},{mu},{},{},ok", k.k10, k.fitted_beta)
                        }
                        Err(e) => format!("{sigma},{rho},{mu},,,flagged:{e}"),
                    }
                })
                .collect();
            let mut body = String::from("sigma,rho,mu,k10,fitted_beta,status\n");
            for row in rows {
                body.push_str(&row);
                body.push('\n');
            }
            output(out, &body)
        }
    }
}
