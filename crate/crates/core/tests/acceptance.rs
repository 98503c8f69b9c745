//! Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use slab::corpus::generate;
use slab::dichotomy::{calibrate_floor, lemma41_check, sequence_builder, Branch, SequenceMode};
use slab::experiments::{
    decay_run, dichotomy_corpus_run, equivalence_run, log_radii, maximal_run, pinned_corpus, shipped_c_cal,
    thm61_run, unpinned_corpus, EquivalenceConfig, MaximalConfig, NamedReport,
};
use slab::corpus::{CorpusKind, CorpusSpec};
use slab::grid::{GridField, GridSpec};
use slab::mollifier::Mollifier;
use slab::simplex::{Frame, Simplex};
use slab::sphere::{config_sphere, sphere_ft};

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn equivalence() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (j, d) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        let r = equivalence_run(&EquivalenceConfig::standard(d, j, 7)).map_err(err)?;
        ok &= r.pass() && r.cases.len() == 50;
        parts.push(format!("(j={j},d={d}) max z {:.2} failures {}", r.max_z, r.failures));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= 600.0;
    verdict(ok, format!("{}; {secs:.0} s", parts.join(", ")))
}

fn corpus_indicators() -> Result<Vec<(String, GridField)>, String> {
    let mut out = Vec::new();
    for c in unpinned_corpus(0).map_err(err)?.into_iter().chain(pinned_corpus(0).map_err(err)?) {
        out.push((c.name.clone(), generate(&c.spec).map_err(err)?));
    }
    Ok(out)
}

fn plancherel() -> Outcome {
    let mut ft_ok = true;
    for (d, j) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        let s = Simplex::regular(j, d).map_err(err)?;
        let cs = config_sphere(&s, j, &Frame::canonical(&s, j - 1).map_err(err)?).map_err(err)?;
        let v = sphere_ft(&cs, &vec![0.0; d]);
        ft_ok &= v.re == 1.0 && v.im == 0.0;
    }
    let mut parseval: f64 = 0.0;
    let mut cap: f64 = 0.0;
    let sets = corpus_indicators()?;
    for (_, a) in &sets {
        let s = a.forward_transform();
        parseval = parseval.max((s.energy() - a.measure()).abs() / a.measure());
        let nyq = a.spec().nyquist_radius();
        let mut dyadic = Vec::new();
        let mut hi = nyq;
        while hi > 1e-3 {
            dyadic.push((hi / 2.0, hi));
            hi /= 2.0;
        }
        let lacunary = sequence_builder(0.5, 2, SequenceMode::Single, 1.0, 1.0, None).map_err(err)?.annuli;
        for bands in [dyadic, lacunary] {
            let bands: Vec<(f64, f64)> =
                bands.into_iter().filter(|b| b.0 < nyq).map(|(lo, hi)| (lo, hi.min(nyq))).collect();
            let total: f64 = s.annulus_masses(&bands).map_err(err)?.iter().sum();
            cap = cap.max(total / a.measure());
        }
    }
    verdict(
        ft_ok && parseval <= 1e-6 && cap <= 1.0 + 1e-6,
        format!("sphere_ft(0) = 1: {ft_ok}; Parseval rel {parseval:.1e}; max annulus sum {cap:.6} over {} sets", sets.len()),
    )
}

fn decay() -> Outcome {
    let radii = log_radii(-1.0, 3.0, 24);
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, j) in [(3, 1), (4, 2)] {
        let lo = decay_run(d, j, 4, &radii).map_err(err)?;
        let hi = decay_run(d, j, 5, &radii).map_err(err)?;
        let drift = (hi.envelope_constant - lo.envelope_constant).abs() / lo.envelope_constant;
        let bounded = !hi.growing && hi.i_tilde_sup.is_finite();
        ok &= drift <= 0.05 && bounded;
        parts.push(format!(
            "({d},{j}) envelope {:.4}→{:.4} Ĩ sup {:.3} bounded {bounded}",
            lo.envelope_constant, hi.envelope_constant, hi.i_tilde_sup
        ));
    }
    for (d, j) in [(2, 1), (3, 2)] {
        let r = decay_run(d, j, 5, &radii).map_err(err)?;
        let first = r.block_maxima.first().copied().unwrap_or(0.0);
        let last = r.block_maxima.last().copied().unwrap_or(0.0);
        ok &= r.growing && r.block_maxima.len() >= 4;
        parts.push(format!("({d},{j}) Ĩ block max {first:.1}→{last:.1} growing {}", r.growing));
    }
    verdict(ok, parts.join("; "))
}

fn mollifier_lemmas() -> Outcome {
    let lambda = 8.0;
    let mut ok = true;
    let mut worst_tail: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for d in 2..=4 {
        let m = Mollifier::shared(d).map_err(err)?;
        let s = Simplex::standard(1, d).map_err(err)?;
        let cs = config_sphere(&s, 1, &Frame::empty()).map_err(err)?;
        for eta in [0.2, 0.1, 0.05, 0.02] {
            let r = m.tail_and_shift_bounds(eta, lambda / eta, lambda, &cs).map_err(err)?;
            ok &= r.pass;
            worst_tail = worst_tail.max(r.tail_ratio / r.tail_bound);
            worst_shift = worst_shift.max(r.shift_ratio / r.shift_bound);
        }
    }
    let grid = GridSpec::new(2, 64.0, 64, 2).map_err(err)?;
    let mut holds = 0;
    for i in 0..100u64 {
        let delta = 0.2 + 0.7 * (i as f64) / 100.0;
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta, seed: 9000 + i }, grid)).map_err(err)?;
        let eta = slab::corpus::density(&a) / 10.0;
        let r = lemma41_check(&a, eta, eta.powi(4) * grid.side, 1).map_err(err)?;
        holds += r.parseval_inequality as usize;
    }
    ok &= holds == 100;
    verdict(
        ok,
        format!("max tail/C_tail {worst_tail:.3}, max shift/C_shift {worst_shift:.3}; ∫f·f1 ≥ ∫f1² on {holds}/100"),
    )
}

fn thm61() -> Outcome {
    let start = Instant::now();
    let r = thm61_run(&MaximalConfig::default(), 3).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = r.pass && r.rows.iter().all(|row| row.pass) && r.slope >= 1.0 / 3.0 - 0.1 && secs <= 1800.0;
    verdict(ok, format!("C_61 {:.4}, slope {:.3}, all rows within bound {}; {secs:.0} s", r.c61, r.slope, r.pass))
}

struct DichotomyRuns {
    c0: f64,
    reports: Vec<NamedReport>,
}

fn dichotomy_runs() -> Result<DichotomyRuns, String> {
    let c_cal = shipped_c_cal().map_err(err)?;
    let raw = dichotomy_corpus_run(
        &unpinned_corpus(1).map_err(err)?,
        &pinned_corpus(1).map_err(err)?,
        c_cal,
        0.0,
        5,
        7,
    )
    .map_err(err)?;
    let reports: Vec<_> = raw.into_iter().map(|r| r.report).collect();
    let c0 = calibrate_floor(&reports).unwrap_or(1.0);
    let reports = dichotomy_corpus_run(
        &unpinned_corpus(0).map_err(err)?,
        &pinned_corpus(0).map_err(err)?,
        c_cal,
        c0,
        5,
        7,
    )
    .map_err(err)?;
    Ok(DichotomyRuns { c0, reports })
}

fn unpinned(runs: &DichotomyRuns) -> Outcome {
    let set: Vec<_> = runs.reports.iter().filter(|r| r.name.starts_with("unpinned/")).collect();
    let resolved = set.iter().filter(|r| r.report.branch.is_resolved()).count();
    let mut ok = set.len() >= 20 && resolved == set.len();
    let mut worst: f64 = 0.0;
    for r in set.iter().filter(|r| r.name.starts_with("unpinned/random")) {
        let gap = (r.report.count_term - r.report.density.powi(2)).abs();
        worst = worst.max(gap);
        ok &= matches!(r.report.branch, Branch::Count | Branch::Both) && gap <= 0.05;
    }
    verdict(
        ok,
        format!("c0 {:.4e}; {resolved}/{} resolved; random sets max |count − δ²| {worst:.4}", runs.c0, set.len()),
    )
}

fn pinned(runs: &DichotomyRuns) -> Outcome {
    let set: Vec<_> = runs.reports.iter().filter(|r| r.name.starts_with("pinned/")).collect();
    let mut ok = !set.is_empty();
    let mut parts = Vec::new();
    for r in &set {
        let rep = &r.report;
        let good = if r.name.contains("shells") {
            rep.branch == Branch::Fourier
        } else {
            rep.witness.as_ref().is_some_and(|w| w.min_probability > rep.threshold)
        };
        ok &= good && rep.branch.is_resolved();
        parts.push(format!("{} {:?}", r.name.trim_start_matches("pinned/"), rep.branch));
    }
    let indeterminate = runs.reports.iter().filter(|r| !r.report.branch.is_resolved()).count();
    ok &= indeterminate == 0;
    verdict(ok, format!("{}; {indeterminate} indeterminate", parts.join(", ")))
}

fn maximal() -> Outcome {
    let base = MaximalConfig::default();
    let r0 = maximal_run(&base, 3, 1, 3).map_err(err)?.max_ratio;
    let rn = maximal_run(&MaximalConfig { n: 128, ..base }, 3, 1, 3).map_err(err)?.max_ratio;
    let rq = maximal_run(&MaximalConfig { q: 16, ..base }, 3, 1, 3).map_err(err)?.max_ratio;
    let dn = (rn - r0).abs() / r0;
    let dq = (rq - r0).abs() / r0;
    verdict(
        dn <= 0.1 && dq <= 0.1,
        format!("ratio {r0:.4}; n 128 {rn:.4} ({:+.1}%); q 16 {rq:.4} ({:+.1}%)", 100.0 * dn, 100.0 * dq),
    )
}

fn slab(dir: &Path, threads: usize, args: &[&str], out: &str) -> Result<String, String> {
    let path = dir.join(out);
    let status = Command::new(env!("CARGO_BIN_EXE_slab"))
        .args(args)
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(&path)
        .status()
        .map_err(err)?;
    if !status.success() {
        return Err(format!("slab {} exited with {status}", args.join(" ")));
    }
    let bytes = std::fs::read(&path).map_err(err)?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn numbers_close(a: &Value, b: &Value, tol: f64) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| numbers_close(p, q, tol)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| numbers_close(v, w, tol)))
        }
        _ => a == b,
    }
}

fn csv_close(a: &str, b: &str, tol: f64) -> bool {
    let cells = |s: &str| -> Vec<String> { s.split([',', '\n']).map(str::to_string).collect() };
    let (x, y) = (cells(a), cells(b));
    x.len() == y.len()
        && x.iter().zip(&y).all(|(p, q)| match (p.parse::<f64>(), q.parse::<f64>()) {
            (Ok(u), Ok(v)) => (u - v).abs() <= tol * u.abs().max(v.abs()).max(1.0),
            _ => p == q,
        })
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let set = dir.path().join("set.slab");
    let set_arg = set.to_str().unwrap();
    slab(dir.path(), 1, &["generate", "--kind", "random", "--d", "2", "--n", "256", "--delta", "0.5", "--seed", "4"], "set.slab")?;
    let c_cal = slab::dichotomy::DichotomyParams::unpinned(0.05, 0.45, 8.0).required_c_cal().to_string();
    let commands: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["dichotomy", "--set", set_arg, "--eps", "0.05", "--eta", "0.45", "--lambda", "8", "--c0", "0.01", "--c-cal", &c_cal],
            "json",
        ),
        (vec!["equivalence", "--d", "3", "--k", "2", "--cases", "4", "--draws", "2000", "--seed", "3"], "json"),
        (
            vec!["maximal", "--n", "32", "--side", "32", "--support", "7", "--lambda1", "8", "--bands", "2", "--indicators", "1"],
            "json",
        ),
        (vec!["lemma42", "--set", set_arg, "--eta", "0.05", "--lambda", "8"], "json"),
        (vec!["decay", "--d", "4", "--j", "2", "--hi", "2", "--per-decade", "8"], "csv"),
    ];
    let mut identical = 0;
    let mut close = 0;
    for (i, (args, ext)) in commands.iter().enumerate() {
        let a = slab(dir.path(), 1, args, &format!("{i}a.{ext}"))?;
        let b = slab(dir.path(), 1, args, &format!("{i}b.{ext}"))?;
        let c = slab(dir.path(), 3, args, &format!("{i}c.{ext}"))?;
        identical += (a == b) as usize;
        let near = if *ext == "json" {
            let (x, y): (Value, Value) = (serde_json::from_str(&a).map_err(err)?, serde_json::from_str(&c).map_err(err)?);
            numbers_close(&x, &y, 1e-12)
        } else {
            csv_close(&a, &c, 1e-12)
        };
        close += near as usize;
    }
    let n = commands.len();
    verdict(
        identical == n && close == n,
        format!("byte-identical at --threads 1: {identical}/{n}; within 1e-12 at --threads 3: {close}/{n}"),
    )
}

/// Criterion numbers given on the command line restrict the run.
fn main() {
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        if !only.is_empty() && !only.contains(&id) {
            return;
        }
        let start = Instant::now();
        let outcome = f();
        let tag = if outcome.is_ok() { "PASS" } else { "FAIL" };
        let detail = match &outcome {
            Ok(s) | Err(s) => s.clone(),
        };
        println!("criterion {id} {name}: {tag} ({detail}) [{:.1} s]", start.elapsed().as_secs_f64());
        results.push((id, name, outcome));
    };
    record(1, "operator equivalence", &equivalence);
    record(2, "normalization and Plancherel", &plancherel);
    record(3, "decay envelopes", &decay);
    record(4, "mollifier lemmas", &mollifier_lemmas);
    record(5, "high-frequency maximal scaling", &thm61);
    let runs = if only.is_empty() || only.iter().any(|c| *c == 6 || *c == 7) {
        dichotomy_runs()
    } else {
        Err("not run".into())
    };
    record(6, "unpinned dichotomy", &|| runs.as_ref().map_err(Clone::clone).and_then(unpinned));
    record(7, "pinned dichotomy", &|| runs.as_ref().map_err(Clone::clone).and_then(pinned));
    record(8, "maximal L² stability", &maximal);
    record(9, "determinism", &determinism);
    let failed: Vec<usize> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
