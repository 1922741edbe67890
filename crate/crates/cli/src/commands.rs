use std::fmt;
use std::path::Path;

use ncframe::decomposition::analyze;
use ncframe::frames::{check_tight, factorize, is_spherical, random_tight_frame, SphericalMode};
use ncframe::json::{read_frame, to_pretty, write_json, FactorizationJson, FrameFile, FrameMetadata, TraceJson};
use ncframe::optimize::minimize;
use ncframe::partition::enumerate_partitions;
use ncframe::selftest::{self, Scale};
use ncframe::{Frame, FrameError, OptimizerConfig, SphericalReport, TightnessReport};
use serde::Serialize;

use crate::{Cli, Command, Global, Output, ScaleArg};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn io(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    fn property(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Library errors raised while acting on an already-loaded frame.
fn from_frame_error(e: FrameError) -> CliError {
    match e {
        FrameError::NotTight { .. } | FrameError::NotCoisometric { .. } | FrameError::NotUnitary { .. } => {
            CliError::property(e.to_string())
        }
        FrameError::Parse(_) => CliError::io(e.to_string()),
        FrameError::Optimizer(_) => CliError::property(e.to_string()),
        _ => CliError::usage(e.to_string()),
    }
}

fn load(path: &Path) -> CliResult<Frame> {
    read_frame(path).map(|(f, _)| f).map_err(|e| CliError::io(e.to_string()))
}

fn save<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_json(path, value).map_err(|e| CliError::io(e.to_string()))
}

fn emit<T: Serialize>(global: &Global, value: &T, text: impl FnOnce() -> String) {
    match global.output {
        Output::Json => print!("{}", to_pretty(value)),
        Output::Text => println!("{}", text()),
    }
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    #[serde(flatten)]
    tightness: &'a TightnessReport,
    spherical: &'a SphericalReport,
    n: usize,
    k: usize,
}

#[derive(Serialize)]
struct PartitionsJson {
    k: usize,
    k_prime: usize,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    partitions: Option<Vec<Vec<Vec<usize>>>>,
}

#[derive(Serialize)]
struct MinimizeJson {
    converged: bool,
    iterations: usize,
    final_residual: f64,
    final_potential: f64,
    b: f64,
    radius: f64,
    reseeds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<FrameFile>,
}

fn tightness_text(t: &TightnessReport) -> String {
    format!(
        "tight: {}\nb: {}\nresidual: {:.3e}\nper-summand b: {:?}",
        t.is_tight, t.b, t.residual, t.per_summand_b
    )
}

fn positive(name: &str, value: f64) -> CliResult<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--{name} must be positive and finite, got {value}")))
    }
}

pub fn run(cli: &Cli) -> CliResult<u8> {
    let g = &cli.global;
    positive("tol", g.tol)?;
    match &cli.command {
        Command::Gen { algebra, k, n, b, out } => {
            positive("b", *b)?;
            if *n == 0 || k < n {
                return Err(CliError::usage(format!("need 1 ≤ n ≤ k, got k = {k}, n = {n}")));
            }
            let frame = random_tight_frame(algebra, *k, *n, *b, g.seed).map_err(|e| CliError::usage(e.to_string()))?;
            let meta = FrameMetadata { seed: Some(g.seed), generator: Some("gen".into()), b: Some(*b) };
            save(out, &FrameFile::from_frame(&frame, Some(meta)))?;
            let report = check_tight(&frame, g.tol);
            emit(g, &report, || tightness_text(&report));
            Ok(0)
        }
        Command::Verify { path } => {
            let frame = load(path)?;
            let t = check_tight(&frame, g.tol);
            let s = is_spherical(&frame, g.tol, SphericalMode::Strict);
            let report = VerifyJson { tightness: &t, spherical: &s, n: frame.n(), k: frame.k() };
            emit(g, &report, || {
                format!("{}\nstrict-spherical: {} (radius {})", tightness_text(&t), s.is_spherical, s.radius)
            });
            Ok(if t.is_tight { 0 } else { 1 })
        }
        Command::Analyze { path } => {
            let frame = load(path)?;
            let report = analyze(&frame, g.tol).map_err(from_frame_error)?;
            emit(g, &report, || {
                let blocks: Vec<String> = report
                    .blocks
                    .iter()
                    .map(|b| format!("  {:?}: b = {}, residual {:.3e}, divisible {}", b.indices, b.b, b.residual, b.divisible))
                    .collect();
                format!(
                    "{}\nstrict-spherical: {}\npartition: {:?}\nd = {}, k' = {}, admissible: {}\nblocks:\n{}",
                    tightness_text(&report.tightness),
                    report.spherical.is_spherical,
                    report.partition,
                    report.d,
                    report.k_prime,
                    report.admissible,
                    blocks.join("\n")
                )
            });
            Ok(0)
        }
        Command::Factorize { path, out } => {
            let frame = load(path)?;
            let fact = factorize(&frame, g.tol).map_err(from_frame_error)?;
            let json = FactorizationJson::new(&fact, frame.n());
            match out {
                Some(p) => {
                    save(p, &json)?;
                    #[derive(Serialize)]
                    struct Summary {
                        b: f64,
                        reconstruction_residual: f64,
                    }
                    let summary = Summary { b: fact.b, reconstruction_residual: fact.reconstruction_residual };
                    emit(g, &summary, || {
                        format!("b: {}\nreconstruction residual: {:.3e}", fact.b, fact.reconstruction_residual)
                    });
                }
                None => emit(g, &json, || {
                    format!(
                        "b: {}\nreconstruction residual: {:.3e}\nU: {}×{} unitary",
                        fact.b,
                        fact.reconstruction_residual,
                        json.k,
                        json.k
                    )
                }),
            }
            Ok(0)
        }
        Command::Partitions { k, kprime, count } => {
            let parts = enumerate_partitions(*k, *kprime).map_err(|e| CliError::usage(e.to_string()))?;
            let listing: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| p.one_based()).collect();
            let json = PartitionsJson {
                k: *k,
                k_prime: *kprime,
                count: parts.len(),
                partitions: (!count).then(|| listing.clone()),
            };
            emit(g, &json, || {
                if *count {
                    parts.len().to_string()
                } else {
                    listing
                        .iter()
                        .map(|p| p.iter().map(|b| b.iter().map(usize::to_string).collect::<String>()).collect::<Vec<_>>().join("|"))
                        .collect::<Vec<_>>()
                        .join("\n")
                }
            });
            Ok(0)
        }
        Command::Minimize { algebra, k, n, step_size, max_iters, tight_tol, radius, out, trace } => {
            if *n == 0 || k < n {
                return Err(CliError::usage(format!("need 1 ≤ n ≤ k, got k = {k}, n = {n}")));
            }
            let config = OptimizerConfig {
                step_size: *step_size,
                max_iters: *max_iters,
                tight_tol: *tight_tol,
                seed: g.seed,
                radius: *radius,
            };
            config.validate().map_err(|e| CliError::usage(e.to_string()))?;
            let result = minimize(algebra, *k, *n, &config).map_err(from_frame_error)?;
            let last = *result.final_record();
            let b = check_tight(&result.final_frame, g.tol).b;
            let meta = FrameMetadata { seed: Some(g.seed), generator: Some("minimize".into()), b: Some(b) };
            let file = FrameFile::from_frame(&result.final_frame, Some(meta));
            if let Some(p) = trace {
                save(p, &TraceJson::new(&result))?;
            }
            let embed = match out {
                Some(p) => {
                    save(p, &file)?;
                    None
                }
                None => Some(file),
            };
            let json = MinimizeJson {
                converged: result.converged,
                iterations: last.iteration,
                final_residual: last.residual,
                final_potential: last.potential,
                b,
                radius: result.radius,
                reseeds: result.reseeds,
                frame: embed,
            };
            emit(g, &json, || {
                format!(
                    "converged: {}\niterations: {}\nresidual: {:.3e}\npotential: {}\nb: {}",
                    json.converged, json.iterations, json.final_residual, json.final_potential, json.b
                )
            });
            Ok(if result.converged { 0 } else { 1 })
        }
        Command::Selftest { scale, inject_fault } => {
            let scale = match scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            };
            let summary = selftest::run(scale, g.seed, *inject_fault);
            emit(g, &summary, || {
                let mut lines = Vec::new();
                for s in &summary.suites {
                    lines.push(format!(
                        "{} {} ({} cases, {} ms)",
                        if s.passed { "PASS" } else { "FAIL" },
                        s.name,
                        s.cases,
                        s.elapsed_ms
                    ));
                    lines.extend(s.failures.iter().take(20).map(|f| format!("  {f}")));
                }
                lines.join("\n")
            });
            Ok(if summary.passed { 0 } else { 1 })
        }
    }
}
