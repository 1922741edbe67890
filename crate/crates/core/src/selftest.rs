//! Built-in consistency suites run by `ncframe selftest`.
//!
//! - `split`: for every frame of [`corpus::split_corpus`] and every index
//!   subset, the commutation and splitting sides must agree;
//! - `divisibility`: every block of every strict-spherical tight frame in the
//!   spherical corpus must have size divisible by `k / gcd(k, n)`;
//! - `cstar`: C*-identity, submultiplicativity, involution and trace
//!   cyclicity on random elements.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSpec};
use crate::corpus;
use crate::decomposition::{classify_sigma, verify_orthogonal_split, verify_orthogonal_split_with_gram};
use crate::error::Result;
use crate::frames::{check_tight, gram_matrix, is_spherical, Frame, SphericalMode};
use crate::optimize::{minimize, OptimizerConfig};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `k ≤ 6`, small spherical corpus.
    Quick,
    /// `k ≤ 8` for splits, `k ≤ 12` spherical corpus.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfTestSummary {
    pub scale: Scale,
    pub seed: u64,
    pub fault_injected: bool,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

const TOL: f64 = 1e-9;

fn suite(name: &str, body: impl FnOnce(&mut Vec<String>) -> Result<usize>) -> SuiteResult {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cases = match body(&mut failures) {
        Ok(c) => c,
        Err(e) => {
            failures.push(format!("suite aborted: {e}"));
            0
        }
    };
    SuiteResult {
        name: name.to_string(),
        passed: failures.is_empty(),
        cases,
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Checks every subset of `0..k`; returns the number checked.
pub fn check_all_subsets(
    label: &str,
    frame: &Frame,
    tol: f64,
    gram_fault: Option<f64>,
    failures: &mut Vec<String>,
) -> Result<usize> {
    let k = frame.k();
    let gram = match gram_fault {
        Some(eps) => {
            // perturb ⟨f₁, f_k⟩ and its adjoint entry
            let mut g = gram_matrix(frame);
            let spec = frame.spec().clone();
            let bump = AlgebraElement::scalar(&spec, crate::linalg::c(eps));
            g.set_entry(0, k - 1, &g.entry(0, k - 1).try_add(&bump)?);
            g.set_entry(k - 1, 0, &g.entry(k - 1, 0).try_add(&bump)?);
            Some(g)
        }
        None => None,
    };
    for mask in 0u32..(1u32 << k) {
        let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let report = match &gram {
            Some(g) => verify_orthogonal_split_with_gram(frame, g, &subset, tol)?,
            None => verify_orthogonal_split(frame, &subset, tol)?,
        };
        if !report.agrees() {
            failures.push(format!(
                "{label}: subset {:?} commutes={} (residual {:.3e}) splits={} (residuals {:.3e}, {:.3e}, {:.3e})",
                report.indices,
                report.commutes,
                report.commutation_residual,
                report.splits,
                report.subset_residual,
                report.complement_residual,
                report.orthogonality_residual
            ));
        }
    }
    Ok(1usize << k)
}

/// Strict-spherical tight frames: rotated direct sums of harmonic frames
/// and optimizer outputs, over `C` and `M₂(C)`.
pub fn spherical_corpus(max_k: usize, direct_sum_reps: usize, optimizer_runs: usize, seed: u64) -> Result<Vec<(String, Frame)>> {
    let mut out = Vec::new();
    let specs = [AlgebraSpec::scalar(), AlgebraSpec::matrix(2)?];
    let shapes = corpus::direct_sum_shapes(max_k);
    let mut r = rng::seeded(seed);
    for rep in 0..direct_sum_reps {
        for spec in &specs {
            for shape in &shapes {
                let f = corpus::spherical_direct_sum(spec, shape, rand::Rng::random(&mut r))?;
                out.push((format!("direct sum {shape:?} {spec} #{rep}"), f));
            }
        }
    }
    let mut shapes_kn = Vec::new();
    for k in 2..=max_k.min(8) {
        for n in 1..k {
            shapes_kn.push((k, n));
        }
    }
    for run in 0..optimizer_runs {
        let spec = &specs[run % 2];
        let (k, n) = shapes_kn[(run / 2) % shapes_kn.len()];
        let config = OptimizerConfig { seed: seed.wrapping_add(run as u64), tight_tol: 1e-12, ..OptimizerConfig::default() };
        let trace = minimize(spec, k, n, &config)?;
        if trace.converged {
            out.push((format!("optimizer k={k} n={n} {spec} seed={}", config.seed), trace.final_frame));
        }
    }
    Ok(out)
}

/// Divisibility check over a spherical corpus; corpus members that are not
/// strict-spherical tight frames are reported as failures too.
pub fn check_divisibility(corpus: &[(String, Frame)], tol: f64, failures: &mut Vec<String>) -> Result<usize> {
    for (label, f) in corpus {
        if !check_tight(f, tol).is_tight || !is_spherical(f, tol, SphericalMode::Strict).is_spherical {
            failures.push(format!("{label}: not a strict-spherical tight frame"));
            continue;
        }
        let stratum = classify_sigma(f, tol)?;
        if !stratum.admissible {
            failures.push(format!(
                "{label}: counterexample, blocks {:?} with k' = {}",
                stratum.partition.one_based(),
                stratum.divisibility.k_prime
            ));
        }
    }
    Ok(corpus.len())
}

/// C*-layer identities on `count` random elements per algebra.
pub fn check_cstar_identities(count: usize, seed: u64, failures: &mut Vec<String>) -> Result<usize> {
    let specs = [vec![1], vec![2], vec![3], vec![1, 1], vec![2, 1]];
    let mut cases = 0;
    for (s, dims) in specs.iter().enumerate() {
        let spec = AlgebraSpec::new(dims.clone())?;
        let mut r = rng::stream(seed, s as u64);
        for t in 0..count {
            let a = AlgebraElement::random(&spec, &mut r);
            let b = AlgebraElement::random(&spec, &mut r);
            let na = a.norm();
            let mut fail = |what: &str| failures.push(format!("{spec} sample {t}: {what}"));
            if (a.adjoint().try_mul(&a)?.norm() - na * na).abs() > 1e-10 * (na * na).max(1.0) {
                fail("C*-identity");
            }
            if a.try_mul(&b)?.norm() > na * b.norm() + 1e-10 {
                fail("submultiplicativity");
            }
            if a.adjoint().adjoint() != a || (a.adjoint().norm() - na).abs() > 1e-12 * na.max(1.0) {
                fail("involution");
            }
            let ab = a.try_mul(&b)?.normalized_trace();
            let ba = b.try_mul(&a)?.normalized_trace();
            if (ab - ba).norm() > 1e-10 * ab.norm().max(1.0) {
                fail("trace cyclicity");
            }
            cases += 1;
        }
    }
    Ok(cases)
}

pub fn run(scale: Scale, seed: u64, inject_fault: bool) -> SelfTestSummary {
    let (max_k, reps, runs, elements) = match scale {
        Scale::Quick => (6, 1, 12, 200),
        Scale::Full => (8, 3, 60, 1000),
    };
    let split = suite("split", |failures| {
        let corpus = corpus::split_corpus(max_k, seed)?;
        let mut cases = 0;
        for (label, f) in &corpus {
            let fault = (inject_fault && label.starts_with("double mercedes-benz")).then_some(1e-3);
            cases += check_all_subsets(label, f, TOL, fault, failures)?;
        }
        Ok(cases)
    });
    let divisibility = suite("divisibility", |failures| {
        let max_k = if scale == Scale::Full { 12 } else { 8 };
        let corpus = spherical_corpus(max_k, reps, runs, seed)?;
        check_divisibility(&corpus, TOL, failures)
    });
    let cstar = suite("cstar", |failures| check_cstar_identities(elements, seed, failures));
    let suites = vec![split, divisibility, cstar];
    SelfTestSummary {
        scale,
        seed,
        fault_injected: inject_fault,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}
