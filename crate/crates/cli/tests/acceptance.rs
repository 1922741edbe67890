//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ncframe::corpus::{coordinate_planes_frame, split_corpus};
use ncframe::decomposition::{classify_sigma, verify_orthogonal_split};
use ncframe::frames::{canonical_frame, check_tight, definition_gap, factorize, is_spherical, random_tight_frame, scalar_definition_check};
use ncframe::json::{element_from_json, to_pretty, write_json, ElementJson, FrameFile};
use ncframe::optimize::{frame_potential, minimize, potential_gradient};
use ncframe::partition::enumerate_partitions;
use ncframe::rng::stream;
use ncframe::selftest::{check_cstar_identities, spherical_corpus};
use ncframe::{AMatrix, AlgebraSpec, Frame, OptimizerConfig, SphericalMode};

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;

fn spec(dims: &[usize]) -> AlgebraSpec {
    AlgebraSpec::new(dims.to_vec()).unwrap()
}

/// The 200 normal-form cases: `(spec, k, n, b, U)` with `n < k ≤ 10`.
fn normal_form_cases() -> Vec<(AlgebraSpec, usize, usize, f64, AMatrix)> {
    let specs = [spec(&[1]), spec(&[2]), spec(&[3]), spec(&[1, 1]), spec(&[2, 1])];
    (0..200usize)
        .map(|i| {
            let s = specs[i % 5].clone();
            let k = 2 + (i * 7) % 9;
            let n = 1 + (i * 3 + i / 9) % (k - 1);
            let b = [0.5, 1.0, 2.0][(i / 5) % 3];
            let u = AMatrix::random_unitary(&s, k, &mut stream(SEED, i as u64));
            (s, k, n, b, u)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut worst_residual: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let cases = normal_form_cases();
    for (i, (s, k, n, b, u)) in cases.iter().enumerate() {
        let f = canonical_frame(*n, *b, u, 1e-9).map_err(|e| format!("case {i}: {e}"))?;
        let t = check_tight(&f, 1e-9);
        worst_residual = worst_residual.max(t.residual);
        worst_b = worst_b.max((t.b - b).abs() / b);
        if !t.is_tight || t.residual >= 1e-10 || (t.b - b).abs() >= 1e-10 * b {
            return Err(format!("case {i} ({s}, k={k}, n={n}, b={b}): {t:?}"));
        }
    }
    Ok(format!("{} cases, max residual {worst_residual:.2e}, max relative b error {worst_b:.2e}", cases.len()))
}

fn criterion_2() -> Outcome {
    let mut frames: Vec<(String, Frame)> = normal_form_cases()
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, n, b, u))| (format!("normal form {i}"), canonical_frame(n, b, &u, 1e-9).unwrap()))
        .collect();
    let shapes = [(&[1][..], 3, 2), (&[1], 5, 3), (&[2], 4, 2), (&[2], 3, 2), (&[1, 1], 4, 3), (&[2, 1], 5, 2)];
    let mut runs = 0;
    let mut optimizer = 0;
    while optimizer < 50 && runs < 200 {
        let (dims, k, n) = shapes[runs % shapes.len()];
        let config = OptimizerConfig { seed: SEED + runs as u64, tight_tol: 1e-12, ..Default::default() };
        let trace = minimize(&spec(dims), k, n, &config).map_err(|e| e.to_string())?;
        runs += 1;
        if trace.converged {
            frames.push((format!("optimizer {dims:?} k={k} n={n} seed={}", config.seed), trace.final_frame));
            optimizer += 1;
        }
    }
    if optimizer < 50 {
        return Err(format!("only {optimizer} optimizer outputs converged in {runs} runs"));
    }
    let mut worst_u: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    for (label, f) in &frames {
        let fact = factorize(f, 1e-9).map_err(|e| format!("{label}: {e}"))?;
        let defect = fact.unitary.unitarity_defect().unwrap();
        worst_u = worst_u.max(defect);
        worst_rec = worst_rec.max(fact.reconstruction_residual);
        if defect >= 1e-10 || fact.reconstruction_residual >= 1e-8 {
            return Err(format!("{label}: unitary residual {defect:.2e}, reconstruction {:.2e}", fact.reconstruction_residual));
        }
    }
    Ok(format!(
        "{} frames ({optimizer} optimizer outputs from {runs} runs), max unitary residual {worst_u:.2e}, max reconstruction {worst_rec:.2e}",
        frames.len()
    ))
}

fn criterion_3() -> Outcome {
    let corpus = split_corpus(8, SEED).map_err(|e| e.to_string())?;
    if corpus.len() < 60 {
        return Err(format!("corpus has only {} frames", corpus.len()));
    }
    let mut subsets = 0usize;
    let mut splitting = 0usize;
    let mut disagreements = Vec::new();
    for (label, f) in &corpus {
        if !check_tight(f, 1e-9).is_tight {
            return Err(format!("{label} is not tight"));
        }
        for mask in 0u32..(1 << f.k()) {
            let subset: Vec<usize> = (0..f.k()).filter(|i| mask >> i & 1 == 1).collect();
            let r = verify_orthogonal_split(f, &subset, 1e-9).map_err(|e| e.to_string())?;
            subsets += 1;
            splitting += r.commutes as usize;
            if !r.agrees() {
                disagreements.push(format!("{label} {:?}", r.indices));
            }
        }
    }
    if disagreements.is_empty() {
        Ok(format!("{} frames, {subsets} subsets ({splitting} splitting), 0 disagreements", corpus.len()))
    } else {
        Err(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))
    }
}

fn criterion_4(artifact_dir: &Path) -> Outcome {
    let corpus = spherical_corpus(12, 1, 120, SEED).map_err(|e| e.to_string())?;
    let optimizer = corpus.iter().filter(|(l, _)| l.starts_with("optimizer")).count();
    if corpus.len() < 500 {
        return Err(format!("corpus has only {} frames", corpus.len()));
    }
    let mut blocks = 0usize;
    let mut violations = Vec::new();
    for (label, f) in &corpus {
        if f.k() > 12 || f.spec().summand_dims().len() != 1 || f.spec().summand_dims()[0] > 2 {
            return Err(format!("{label} is outside the corpus bounds"));
        }
        if !check_tight(f, 1e-9).is_tight || !is_spherical(f, 1e-9, SphericalMode::Strict).is_spherical {
            return Err(format!("{label} is not a strict-spherical tight frame"));
        }
        let stratum = classify_sigma(f, 1e-9).map_err(|e| e.to_string())?;
        blocks += stratum.partition.blocks().len();
        if !stratum.admissible {
            violations.push((label.clone(), f.clone(), stratum));
        }
    }
    if violations.is_empty() {
        return Ok(format!("{} frames ({optimizer} optimizer outputs), {blocks} blocks, 0 violations", corpus.len()));
    }
    let path = artifact_dir.join("divisibility_counterexamples.json");
    let payload: Vec<_> = violations
        .iter()
        .map(|(label, f, s)| {
            serde_json::json!({
                "label": label,
                "partition": s.partition.one_based(),
                "k_prime": s.divisibility.k_prime,
                "frame": FrameFile::from_frame(f, None),
            })
        })
        .collect();
    write_json(&path, &payload).map_err(|e| e.to_string())?;
    Err(format!("{} violations written to {}", violations.len(), path.display()))
}

/// Set partitions of `0..k` via restricted growth strings.
fn all_set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == labels.len() {
            let blocks = (0..=max).map(|b| (0..labels.len()).filter(|&j| labels[j] == b).collect()).collect();
            out.push(blocks);
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            rec(i + 1, max.max(l), labels, out);
        }
    }
    if k > 0 {
        rec(1, 0, &mut labels, &mut out);
    }
    out
}

fn criterion_5() -> Outcome {
    let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
    let mut checked = 0;
    for k in 1..=8 {
        let all = all_set_partitions(k);
        if all.len() != bell[k] {
            return Err(format!("oracle produced {} partitions of {k}, Bell number is {}", all.len(), bell[k]));
        }
        for kp in (1..=k).filter(|d| k % d == 0) {
            let mut expected: Vec<Vec<Vec<usize>>> = all
                .iter()
                .filter(|p| p.iter().all(|b: &Vec<usize>| b.len().is_multiple_of(kp)))
                .cloned()
                .collect();
            let mut got: Vec<Vec<Vec<usize>>> = enumerate_partitions(k, kp)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|p| p.blocks().to_vec())
                .collect();
            let produced = got.len();
            expected.sort();
            got.sort();
            got.dedup();
            if got != expected || produced != expected.len() {
                return Err(format!("P({k}, {kp}): got {produced}, oracle {}", expected.len()));
            }
            checked += 1;
        }
    }
    let p42 = enumerate_partitions(4, 2).unwrap().len();
    let p63 = enumerate_partitions(6, 3).unwrap().len();
    if (p42, p63) != (4, 11) {
        return Err(format!("|P(4,2)| = {p42}, |P(6,3)| = {p63}"));
    }
    Ok(format!("{checked} (k, k') pairs match the Bell oracle; |P(4,2)| = 4, |P(6,3)| = 11"))
}

fn criterion_6() -> Outcome {
    let cases = [(&[1][..], 3, 2), (&[1], 4, 2), (&[1], 5, 3), (&[1], 6, 4), (&[2], 3, 2), (&[2], 4, 2)];
    let mut lines = Vec::new();
    let mut ok = true;
    for (dims, k, n) in cases {
        let mut success = 0;
        let mut slowest = Duration::ZERO;
        for seed in 0..20 {
            let start = Instant::now();
            let trace = minimize(&spec(dims), k, n, &OptimizerConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            if trace.final_residual() < 1e-6 && trace.final_record().iteration <= 20_000 && elapsed < Duration::from_secs(5) {
                success += 1;
            }
        }
        ok &= success >= 18;
        lines.push(format!("{dims:?} ({k},{n}) {success}/20 slowest {:.3}s", slowest.as_secs_f64()));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let specs = [spec(&[1]), spec(&[2]), spec(&[1, 1])];
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..50usize {
        let s = &specs[i % 3];
        let (n, k) = (1 + i % 3, 2 + i % 4);
        let f = Frame::new(AMatrix::random(s, n, k, &mut stream(SEED ^ 0x6a, i as u64))).unwrap();
        let grad = potential_gradient(&f);
        let mut err2 = 0.0;
        let mut norm2 = 0.0;
        for (j, block) in f.matrix().flat_blocks().iter().enumerate() {
            for idx in 0..block.len() {
                for imaginary in [false, true] {
                    let dir = if imaginary { ncframe::C64::new(0.0, 1.0) } else { ncframe::C64::new(1.0, 0.0) };
                    let at = |t: f64| {
                        let mut blocks = f.matrix().flat_blocks().to_vec();
                        blocks[j][idx] += dir * t;
                        frame_potential(&Frame::new(AMatrix::unflatten(ncframe::FlatView { blocks }, n, k, s).unwrap()).unwrap())
                    };
                    let numeric = (at(h) - at(-h)) / (2.0 * h);
                    let g = grad.flat_blocks()[j][idx];
                    let analytic = if imaginary { g.im } else { g.re };
                    err2 += (numeric - analytic).powi(2);
                    norm2 += analytic * analytic;
                }
            }
        }
        let rel = (err2 / norm2).sqrt();
        worst = worst.max(rel);
        if rel >= 1e-6 {
            return Err(format!("instance {i} ({s}, n={n}, k={k}): relative error {rel:.2e}"));
        }
    }
    Ok(format!("50 instances, max relative error {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let cases = check_cstar_identities(1000, SEED, &mut failures).map_err(|e| e.to_string())?;
    if failures.is_empty() {
        Ok(format!("{cases} elements across 5 algebras, 4 identities each"))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn criterion_9() -> Outcome {
    let scalar = spec(&[1]);
    let mut worst: f64 = 0.0;
    for (i, (k, n, b)) in [(3, 2, 1.5), (5, 3, 1.0), (7, 4, 0.5)].into_iter().enumerate() {
        let f = random_tight_frame(&scalar, k, n, b, SEED + i as u64).unwrap();
        let r = scalar_definition_check(&f, b, 10_000, SEED + i as u64, 1e-9);
        worst = worst.max(r.max_equality_deviation);
        if r.max_equality_deviation >= 1e-9 {
            return Err(format!("scalar frame {i}: equality deviation {:.2e}", r.max_equality_deviation));
        }
    }
    let m2 = spec(&[2]);
    let mut max_gap: f64 = 0.0;
    for (i, (k, n)) in [(3, 2), (4, 2), (5, 3)].into_iter().enumerate() {
        let f = random_tight_frame(&m2, k, n, 1.0, SEED + 10 + i as u64).unwrap();
        let r = scalar_definition_check(&f, 1.0, 10_000, SEED + i as u64, 1e-9);
        max_gap = max_gap.max(r.max_gap);
        if r.inequality_violations > 0 {
            return Err(format!("M2 frame {i}: {} inequality violations", r.inequality_violations));
        }
    }

    let text = fs::read_to_string(fixture("m2_strict_inequality_witness.json")).map_err(|e| e.to_string())?;
    let w: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let file: FrameFile = serde_json::from_value(w["frame"].clone()).map_err(|e| e.to_string())?;
    let f = file.to_frame().map_err(|e| e.to_string())?;
    let v_json: Vec<ElementJson> = serde_json::from_value(w["v"].clone()).map_err(|e| e.to_string())?;
    let v_entries = v_json.iter().map(|e| element_from_json(f.spec(), e)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let v = AMatrix::from_entries(f.spec(), v_entries.len(), 1, &v_entries).map_err(|e| e.to_string())?;
    let t = check_tight(&f, 1e-9);
    let gap = definition_gap(&f, t.b, &v).map_err(|e| e.to_string())?;
    let stored = w["gap"].as_f64().unwrap_or(f64::NAN);
    if !t.is_tight || !(gap > 1e-9) || (gap - stored).abs() > 1e-12 {
        return Err(format!("witness: tight {}, gap {gap}, stored {stored}", t.is_tight));
    }
    Ok(format!(
        "scalar max deviation {worst:.2e}; M2 0 violations (max gap {max_gap:.3}); stored witness gap {gap}"
    ))
}

fn ncframe(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ncframe")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let gen = p("gen.json");
    let perturbed = p("perturbed.json");
    let truncated = p("truncated.json");
    let mercedes = fixture("mercedes.json").to_str().unwrap().to_string();
    let w32 = fixture("sqrt2_w32.json").to_str().unwrap().to_string();
    let dmb = fixture("double_mercedes.json").to_str().unwrap().to_string();

    let mut matrix: Vec<(Vec<&str>, i32)> = vec![(vec!["gen", "--algebra", "1", "--k", "3", "--n", "2", "--b", "1.5", "--seed", "7", "--out", &gen], 0)];
    let mut failures = Vec::new();
    let run = |args: &[&str], want: i32, failures: &mut Vec<String>| match ncframe(args) {
        Ok((code, _)) if code == want => {}
        Ok((code, _)) => failures.push(format!("{args:?}: exit {code}, expected {want}")),
        Err(e) => failures.push(format!("{args:?}: {e}")),
    };
    for (args, want) in matrix.drain(..) {
        run(&args, want, &mut failures);
    }
    let text = fs::read_to_string(&w32).map_err(|e| e.to_string())?;
    let mut file: FrameFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    file.columns[1][0][0][0][0] += 0.1;
    fs::write(&perturbed, to_pretty(&file)).map_err(|e| e.to_string())?;
    fs::write(&truncated, &text[..text.len() / 3]).map_err(|e| e.to_string())?;

    let expectations: Vec<(Vec<&str>, i32)> = vec![
        (vec!["gen", "--k", "2", "--n", "3", "--out", &truncated], 3),
        (vec!["verify", &gen], 0),
        (vec!["verify", &mercedes], 0),
        (vec!["verify", &perturbed], 1),
        (vec!["verify", &truncated], 2),
        (vec!["analyze", &dmb], 0),
        (vec!["analyze", &perturbed], 1),
        (vec!["factorize", &w32], 0),
        (vec!["factorize", &perturbed], 1),
        (vec!["partitions", "--k", "4", "--kprime", "2", "--count"], 0),
        (vec!["partitions", "--k", "5", "--kprime", "2"], 3),
        (vec!["minimize", "--algebra", "1", "--k", "3", "--n", "2"], 0),
        (vec!["minimize", "--k", "5", "--n", "3", "--max-iters", "1"], 1),
        (vec!["minimize", "--k", "3", "--n", "2", "--step-size", "-1"], 3),
        (vec!["verify", &mercedes, "--tol", "-1"], 3),
        (vec!["no-such-command"], 3),
    ];
    let cases = expectations.len() + 1;
    for (args, want) in &expectations {
        run(args, *want, &mut failures);
    }

    let first = fs::read(&gen).map_err(|e| e.to_string())?;
    run(&["gen", "--algebra", "1", "--k", "3", "--n", "2", "--b", "1.5", "--seed", "7", "--out", &gen], 0, &mut failures);
    if fs::read(&gen).map_err(|e| e.to_string())? != first {
        failures.push("gen with the same seed wrote different bytes".into());
    }

    let mut golden = 0;
    for name in ["mercedes.json", "sqrt2_w32.json", "double_mercedes.json", "orthonormal_basis.json", "m2_coordinate_planes.json"] {
        let text = fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let file: FrameFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let frame = file.to_frame().map_err(|e| e.to_string())?;
        if to_pretty(&FrameFile::from_frame(&frame, file.metadata.clone())) != text {
            failures.push(format!("{name} does not round-trip bit-identically"));
        }
        golden += 1;
    }
    match ncframe(&["analyze", &dmb]) {
        Ok((0, out)) => {
            let r: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
            if r["partition"] != serde_json::json!([[1, 2, 3], [4, 5, 6]]) || r["divisibility"] != serde_json::json!([true, true]) {
                failures.push(format!("analyze double mercedes-benz: {}", r["partition"]));
            }
        }
        other => failures.push(format!("analyze double mercedes-benz: {other:?}")),
    }

    let start = Instant::now();
    run(&["selftest", "--scale", "quick"], 0, &mut failures);
    let selftest = start.elapsed();
    if selftest >= Duration::from_secs(60) {
        failures.push(format!("selftest quick took {:.1}s", selftest.as_secs_f64()));
    }
    if failures.is_empty() {
        Ok(format!("{cases} exit-code cases, {golden} golden round trips, selftest quick {:.1}s", selftest.as_secs_f64()))
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored
    let artifact_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("normal-form soundness", Duration::from_secs(10), Box::new(criterion_1)),
        ("factorization round trip", Duration::from_secs(30), Box::new(criterion_2)),
        ("split equivalence on every subset", Duration::from_secs(300), Box::new(criterion_3)),
        ("block-size divisibility", Duration::from_secs(600), Box::new(move || criterion_4(&artifact_dir))),
        ("partition enumeration", Duration::from_secs(10), Box::new(criterion_5)),
        ("optimizer success rate", Duration::from_secs(120), Box::new(criterion_6)),
        ("gradient check", Duration::from_secs(30), Box::new(criterion_7)),
        ("C*-layer identities", Duration::from_secs(10), Box::new(criterion_8)),
        ("norm-form diagnostic", Duration::from_secs(60), Box::new(criterion_9)),
        ("CLI contract", Duration::from_secs(300), Box::new(criterion_10)),
    ];
    let mut all = true;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs())),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        all &= outcome.is_ok();
        println!("{tag} criterion {:>2} {name} [{:.2}s]: {detail}", i + 1, elapsed.as_secs_f64());
    }

    let planes = coordinate_planes_frame();
    if let Ok(s) = classify_sigma(&planes, 1e-9) {
        println!(
            "NOTE outside the divisibility corpus: a strict-spherical tight frame over M2 with k = 6, n = 3 splits as {:?}, block sizes not multiples of k' = {}",
            s.partition.one_based(),
            s.divisibility.k_prime
        );
    }

    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
