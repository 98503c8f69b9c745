//! The `slab` command line. Every flag can also be given as a key of the
//! `--config` file; flags win. Exit codes: 2 for configuration errors, 3
//! for numerical preconditions, 4 when a checked property fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::Config;
use crate::corpus::{generate, shell_radii_geometric, CorpusKind, CorpusSpec};
use crate::dichotomy::{check_pinned, check_unpinned, lemma41_check, lemma42_check, Branch, DichotomyParams, PinnedSearch};
use crate::error::{Result, SlabError};
use crate::experiments::{
    calibrate, decay_run, equivalence_run, log_radii, maximal_run, thm61_run, Calibration, CalibrationConfig,
    EquivalenceConfig, MaximalConfig,
};
use crate::grid::{GridField, GridSpec};
use crate::manifest::{RunManifest, Tagged};
use crate::simplex::Simplex;

pub const DATA_DIR_ENV: &str = "SLAB_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "slab", version, about = "Spherical averages, dichotomies and maximal operators on gridded sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Quadrature level.
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Output file; defaults to `$SLAB_DATA_DIR/<command>.<ext>` or stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest holding calibrated constants.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate all constants and write a manifest.
    Calibrate,
    /// Generate a set file.
    Generate(GenerateArgs),
    /// Unpinned or pinned dichotomy for one set.
    Dichotomy(DichotomyArgs),
    /// Pinned dichotomy (same as `dichotomy --mode pinned`).
    Pinned(DichotomyArgs),
    /// Square-function decay table as CSV.
    Decay(DecayArgs),
    /// L² ratio of the maximal operator on the operator corpus.
    Maximal(MaximalArgs),
    /// L-sweep of the high-frequency maximal operator as CSV.
    Thm61(MaximalArgs),
    /// Quadrature against Monte Carlo on random cases.
    Equivalence(EquivalenceArgs),
    /// Smoothing-lemma quantities for one set.
    Lemma41(Lemma41Args),
    /// Error-term quantities for one set.
    Lemma42(Lemma42Args),
}

#[derive(Debug, Args, Default)]
pub struct GenerateArgs {
    /// random | lattice | shells | cantor | slabs
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Physical side length N (default n).
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Comma-separated shell radii; default geometric from `r0` with ratio `q`.
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub thickness: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub depth: Option<u32>,
    /// Comma-separated slab normal.
    #[arg(long)]
    pub normal: Option<String>,
    #[arg(long)]
    pub period: Option<f64>,
    /// binary | json
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct DichotomyArgs {
    /// unpinned | pinned
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    pub simplex: Option<PathBuf>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Floor constant; overrides the manifest.
    #[arg(long)]
    pub c0: Option<f64>,
    /// Admissibility constant; overrides the manifest.
    #[arg(long)]
    pub c_cal: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub scales: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct DecayArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    /// log10 of the smallest nonzero radius.
    #[arg(long)]
    pub lo: Option<f64>,
    /// log10 of the largest radius.
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub per_decade: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct MaximalArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long)]
    pub support: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub bands: Option<usize>,
    #[arg(long)]
    pub indicators: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct EquivalenceArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Runs every depth j = 1..=k.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub draws: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct Lemma41Args {
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct Lemma42Args {
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    pub simplex: Option<PathBuf>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub j: Option<usize>,
}

/// Copies every `Some` flag into the configuration under its flag name.
macro_rules! overlay {
    ($cfg:expr, $args:expr, $($field:ident => $key:literal),* $(,)?) => {{
        $(if let Some(v) = &$args.$field { $cfg.set($key, format!("{}", DisplayPath(v))); })*
        &[$($key),*]
    }};
}

struct DisplayPath<'a, T>(&'a T);

impl<T: std::fmt::Debug> std::fmt::Display for DisplayPath<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = format!("{:?}", self.0);
        write!(f, "{}", s.trim_matches('"'))
    }
}

const GLOBAL_KEYS: &[&str] = &["seed", "threads", "level", "out", "manifest"];

enum Outcome {
    Pass,
    Fail(String),
}

impl Outcome {
    fn check(ok: bool, what: impl Into<String>) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(what.into())
        }
    }
}

pub fn exit_code(err: &SlabError) -> u8 {
    match err {
        SlabError::Config { .. } | SlabError::Io(_) | SlabError::Json(_) | SlabError::SetFormat { .. } => 2,
        _ => 3,
    }
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Run {
    cfg: Config,
    name: &'static str,
    manifest: RunManifest,
    calibration: Option<Calibration>,
    out: Option<PathBuf>,
    started: Instant,
}

impl Run {
    fn seed(&self) -> Result<u64> {
        self.cfg.get_or("seed", 7)
    }

    fn level(&self, default: u32) -> Result<u32> {
        self.cfg.get_or("level", default)
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.cfg
            .parse_key(key)?
            .ok_or_else(|| SlabError::Config { key: key.into(), message: "required but not given".into() })
    }

    fn target(&self, ext: &str) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            std::env::var_os(DATA_DIR_ENV).map(|dir| Path::new(&dir).join(format!("{}.{ext}", self.name)))
        })
    }

    /// Writes `text` to the output (or stdout) and the run manifest beside it.
    fn emit(&mut self, text: &str, ext: &str) -> Result<()> {
        self.manifest.timing_seconds = self.started.elapsed().as_secs_f64();
        match self.target(ext) {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(&path, text)?;
                let mut m = path.clone().into_os_string();
                m.push(".manifest.json");
                self.manifest.write(Path::new(&m))?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, body: T) -> Result<()> {
        self.manifest.calibration = self.calibration.clone();
        let tagged = Tagged { manifest_hash: self.manifest.hash(), body };
        let text = serde_json::to_string_pretty(&tagged)? + "\n";
        self.emit(&text, "json")
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(t) = cli.threads {
        cfg.set("threads", t.to_string());
    }
    if let Some(l) = cli.level {
        cfg.set("level", l.to_string());
    }
    if let Some(p) = &cli.manifest {
        cfg.set("manifest", p.display().to_string());
    }
    if let Some(p) = &cli.out {
        cfg.set("out", p.display().to_string());
    }
    let (name, keys): (&'static str, &[&str]) = match &cli.command {
        Command::Calibrate => ("calibrate", &[]),
        Command::Generate(a) => (
            "generate",
            overlay!(cfg, a, kind => "kind", d => "d", n => "n", side => "side", pad => "pad", delta => "delta",
                spacing => "spacing", radii => "radii", r0 => "r0", q => "q", thickness => "thickness",
                ratio => "ratio", depth => "depth", normal => "normal", period => "period", format => "format"),
        ),
        Command::Dichotomy(a) | Command::Pinned(a) => (
            if matches!(cli.command, Command::Pinned(_)) { "pinned" } else { "dichotomy" },
            overlay!(cfg, a, mode => "mode", set => "set", simplex => "simplex", pad => "pad", eps => "eps",
                eta => "eta", lambda => "lambda", lambda1 => "lambda1", c0 => "c0", c_cal => "c_cal",
                samples => "samples", candidates => "candidates", scales => "scales"),
        ),
        Command::Decay(a) => (
            "decay",
            overlay!(cfg, a, d => "d", j => "j", lo => "lo", hi => "hi", per_decade => "per_decade"),
        ),
        Command::Maximal(a) | Command::Thm61(a) => (
            if matches!(cli.command, Command::Thm61(_)) { "thm61" } else { "maximal" },
            overlay!(cfg, a, d => "d", j => "j", n => "n", q => "q", side => "side", support => "support",
                lambda0 => "lambda0", lambda1 => "lambda1", bands => "bands", indicators => "indicators"),
        ),
        Command::Equivalence(a) => (
            "equivalence",
            overlay!(cfg, a, d => "d", k => "k", cases => "cases", draws => "draws"),
        ),
        Command::Lemma41(a) => (
            "lemma41",
            overlay!(cfg, a, set => "set", pad => "pad", eta => "eta", lambda => "lambda", k => "k"),
        ),
        Command::Lemma42(a) => (
            "lemma42",
            overlay!(cfg, a, set => "set", simplex => "simplex", pad => "pad", eta => "eta", lambda => "lambda",
                j => "j"),
        ),
    };
    let allowed: Vec<&str> = GLOBAL_KEYS.iter().chain(keys.iter()).copied().collect();
    cfg.check_keys(&allowed)?;

    let threads: usize =
        cfg.get_or("threads", std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))?;
    if threads == 0 {
        return Err(SlabError::Config { key: "threads".into(), message: "must be ≥ 1".into() });
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let calibration = match cfg.get("manifest") {
        Some(p) => RunManifest::read(Path::new(p))?.calibration,
        None => None,
    };
    let mut hashed = cfg.clone();
    for k in ["threads", "out", "manifest"] {
        hashed.set(k, "");
    }
    let mut manifest = RunManifest::new(name, &hashed.canonical());
    manifest.seeds.insert("seed".into(), cfg.get_or("seed", 7)?);
    let out = cfg.get("out").map(PathBuf::from);
    let mut run = Run { cfg, name, manifest, calibration, out, started: Instant::now() };

    match &cli.command {
        Command::Calibrate => cmd_calibrate(&mut run),
        Command::Generate(_) => cmd_generate(&mut run),
        Command::Dichotomy(_) => cmd_dichotomy(&mut run, None),
        Command::Pinned(_) => cmd_dichotomy(&mut run, Some("pinned")),
        Command::Decay(_) => cmd_decay(&mut run),
        Command::Maximal(_) => cmd_maximal(&mut run),
        Command::Thm61(_) => cmd_thm61(&mut run),
        Command::Equivalence(_) => cmd_equivalence(&mut run),
        Command::Lemma41(_) => cmd_lemma41(&mut run),
        Command::Lemma42(_) => cmd_lemma42(&mut run),
    }
}

fn list(run: &Run, key: &str) -> Result<Option<Vec<f64>>> {
    match run.cfg.get(key) {
        None => Ok(None),
        Some(text) => text
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| SlabError::Config { key: key.into(), message: format!("`{t}`: {e}") })
            })
            .collect::<Result<Vec<f64>>>()
            .map(Some),
    }
}

fn cmd_calibrate(run: &mut Run) -> Result<Outcome> {
    let cfg = CalibrationConfig { level: run.level(5)?, seed: run.seed()?, ..CalibrationConfig::default() };
    run.calibration = Some(calibrate(&cfg)?);
    run.manifest.seeds.insert("corpus_variant".into(), cfg.variant);
    run.manifest.seeds.insert("operator_corpus".into(), cfg.maximal.seed);
    run.manifest.calibration = run.calibration.clone();
    run.manifest.timing_seconds = run.started.elapsed().as_secs_f64();
    let text = run.manifest.to_json()? + "\n";
    match run.target("json") {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Pass)
}

fn cmd_generate(run: &mut Run) -> Result<Outcome> {
    let d: usize = run.cfg.get_or("d", 2)?;
    let n: usize = run.cfg.get_or("n", 64)?;
    let side: f64 = run.cfg.get_or("side", n as f64)?;
    let grid = GridSpec::new(d, side, n, run.cfg.get_or("pad", 2)?)?;
    let kind_name: String = run.cfg.get_or("kind", "random".to_string())?;
    let kind = match kind_name.as_str() {
        "random" => CorpusKind::Random { delta: run.cfg.get_or("delta", 0.5)?, seed: run.seed()? },
        "lattice" => CorpusKind::Lattice { spacing: run.cfg.get_or("spacing", 4.0 * grid.spacing())? },
        "shells" => {
            let radii = match list(run, "radii")? {
                Some(r) => r,
                None => shell_radii_geometric(run.cfg.get_or("r0", 8.0)?, run.cfg.get_or("q", 2.0)?, 0.5 * side),
            };
            CorpusKind::Shells { radii, thickness: run.require("thickness")? }
        }
        "cantor" => CorpusKind::Cantor { ratio: run.cfg.get_or("ratio", 0.25)?, depth: run.cfg.get_or("depth", 2)? },
        "slabs" => {
            let mut normal = vec![0.0; d];
            normal[0] = 1.0;
            CorpusKind::Slabs {
                normal: list(run, "normal")?.unwrap_or(normal),
                period: run.require("period")?,
                thickness: run.require("thickness")?,
            }
        }
        other => {
            return Err(SlabError::Config { key: "kind".into(), message: format!("unknown set kind `{other}`") })
        }
    };
    let spec = CorpusSpec::new(kind, grid);
    let a = generate(&spec)?;
    let format: String = run.cfg.get_or("format", "binary".to_string())?;
    let path = run
        .target("slab")
        .ok_or_else(|| SlabError::Config { key: "out".into(), message: "generate needs --out or SLAB_DATA_DIR".into() })?;
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    match format.as_str() {
        "binary" => a.write_set_file(&path)?,
        "json" => std::fs::write(&path, a.to_set_json()?)?,
        other => return Err(SlabError::Config { key: "format".into(), message: format!("unknown format `{other}`") }),
    }
    let mut spec_path = path.clone().into_os_string();
    spec_path.push(".spec.json");
    std::fs::write(&spec_path, spec.to_json()?)?;
    eprintln!("wrote {} (density {:.6})", path.display(), crate::corpus::density(&a));
    Ok(Outcome::Pass)
}

fn load_set(run: &Run) -> Result<GridField> {
    let path: PathBuf = run.require("set")?;
    GridField::read_set_file(&path, run.cfg.get_or("pad", 2)?)
}

fn load_simplex(run: &Run, d: usize) -> Result<Simplex> {
    match run.cfg.get("simplex") {
        Some(p) => Simplex::from_json(&std::fs::read_to_string(p)?),
        None => Simplex::standard(1, d),
    }
}

fn calibrated(run: &Run, key: &str, pick: impl Fn(&Calibration) -> f64) -> Result<f64> {
    match run.cfg.parse_key::<f64>(key)? {
        Some(v) => Ok(v),
        None => run.calibration.as_ref().map(pick).ok_or_else(|| SlabError::Config {
            key: key.into(),
            message: "not given and no --manifest with calibration".into(),
        }),
    }
}

fn cmd_dichotomy(run: &mut Run, forced: Option<&str>) -> Result<Outcome> {
    let mode: String = match forced {
        Some(m) => m.to_string(),
        None => run.cfg.get_or("mode", "unpinned".to_string())?,
    };
    let a = load_set(run)?;
    let simplex = load_simplex(run, a.spec().d)?;
    let eps: f64 = run.require("eps")?;
    let eta: f64 = run.require("eta")?;
    let lambda: f64 = run.require("lambda")?;
    let c0 = calibrated(run, "c0", |c| c.c0)?;
    let seed = run.seed()?;
    let report = match mode.as_str() {
        "unpinned" => {
            let c_cal = calibrated(run, "c_cal", |c| c.c_cal_unpinned)?;
            let p = DichotomyParams::unpinned(eps, eta, lambda).with_calibration(c_cal, 1.0);
            check_unpinned(&a, &simplex, &p, c0, run.level(5)?, seed)?
        }
        "pinned" => {
            let c_cal = calibrated(run, "c_cal", |c| c.c_cal_pinned)?;
            let lambda1: f64 = run.cfg.get_or("lambda1", lambda)?;
            let p = DichotomyParams::pinned(eps, eta, lambda, lambda1).with_calibration(c_cal, 1.0);
            let defaults = PinnedSearch::default();
            let search = PinnedSearch {
                scales: run.cfg.get_or("scales", defaults.scales)?,
                samples: run.cfg.get_or("samples", defaults.samples)?,
                max_candidates: run.cfg.get_or("candidates", defaults.max_candidates)?,
            };
            check_pinned(&a, &simplex, &p, c0, &search, seed)?
        }
        other => return Err(SlabError::Config { key: "mode".into(), message: format!("unknown mode `{other}`") }),
    };
    let branch = report.branch;
    run.emit_json(report)?;
    Ok(Outcome::check(branch != Branch::Indeterminate, "indeterminate dichotomy outcome"))
}

fn cmd_decay(run: &mut Run) -> Result<Outcome> {
    let d: usize = run.cfg.get_or("d", 3)?;
    let j: usize = run.cfg.get_or("j", 1)?;
    let radii = log_radii(run.cfg.get_or("lo", -1.0)?, run.cfg.get_or("hi", 3.0)?, run.cfg.get_or("per_decade", 40)?);
    let r = decay_run(d, j, run.level(5)?, &radii)?;
    let ok = (r.i[0] - 1.0).abs() < 1e-12 && r.i.iter().all(|&v| (-1e-12..=1.0 + 1e-9).contains(&v));
    let text = r.to_csv();
    run.emit(&text, "csv")?;
    Ok(Outcome::check(ok, "square function outside [0, 1] or I(0) ≠ 1"))
}

fn maximal_config(run: &Run) -> Result<MaximalConfig> {
    let def = MaximalConfig::default();
    Ok(MaximalConfig {
        n: run.cfg.get_or("n", def.n)?,
        q: run.cfg.get_or("q", def.q)?,
        side: run.cfg.get_or("side", def.side)?,
        support: run.cfg.get_or("support", def.support)?,
        lambda0: run.cfg.get_or("lambda0", def.lambda0)?,
        lambda1: run.cfg.get_or("lambda1", def.lambda1)?,
        bands: run.cfg.get_or("bands", def.bands)?,
        indicators: run.cfg.get_or("indicators", def.indicators)?,
        seed: run.cfg.get_or("seed", def.seed)?,
        ..def
    })
}

fn cmd_maximal(run: &mut Run) -> Result<Outcome> {
    let cfg = maximal_config(run)?;
    let d: usize = run.cfg.get_or("d", 3)?;
    let j: usize = run.cfg.get_or("j", 1)?;
    let report = maximal_run(&cfg, d, j, run.level(3)?)?;
    let bound = run.calibration.as_ref().map(|c| c.c_max);
    let ok = match bound {
        Some(b) if report.in_bounded_range && d == 3 && j == 1 => report.max_ratio <= b,
        _ => true,
    };
    run.emit_json(report)?;
    Ok(Outcome::check(ok, "maximal ratio exceeds the calibrated C_max"))
}

fn cmd_thm61(run: &mut Run) -> Result<Outcome> {
    let cfg = maximal_config(run)?;
    let report = thm61_run(&cfg, run.level(3)?)?;
    let ok = report.pass;
    let text = report.to_csv();
    run.emit(&text, "csv")?;
    Ok(Outcome::check(ok, "a ratio exceeds C_61 (L/λ0)^{1/3}"))
}

fn cmd_equivalence(run: &mut Run) -> Result<Outcome> {
    let d: usize = run.cfg.get_or("d", 3)?;
    let k: usize = run.cfg.get_or("k", 1)?;
    if k == 0 || k >= d {
        return Err(SlabError::Config { key: "k".into(), message: format!("need 1 ≤ k < d = {d}") });
    }
    let seed = run.seed()?;
    let mut reports = Vec::new();
    for j in 1..=k {
        let mut cfg = EquivalenceConfig::standard(d, j, seed);
        cfg.cases = run.cfg.get_or("cases", cfg.cases)?;
        cfg.draws = run.cfg.get_or("draws", cfg.draws)?;
        cfg.level = run.level(cfg.level)?;
        reports.push(equivalence_run(&cfg)?);
    }
    let ok = reports.iter().all(|r| r.pass());
    run.emit_json(serde_json::json!({ "runs": reports }))?;
    Ok(Outcome::check(ok, "a case differs by more than three combined standard errors"))
}

fn cmd_lemma41(run: &mut Run) -> Result<Outcome> {
    let a = load_set(run)?;
    let r = lemma41_check(&a, run.require("eta")?, run.require("lambda")?, run.cfg.get_or("k", 1)?)?;
    let within = run.calibration.as_ref().is_none_or(|c| r.ratio <= c.c41);
    let ok = r.parseval_inequality && within;
    run.emit_json(r)?;
    Ok(Outcome::check(ok, "smoothing inequality or calibrated C_41 bound violated"))
}

fn cmd_lemma42(run: &mut Run) -> Result<Outcome> {
    let a = load_set(run)?;
    let simplex = load_simplex(run, a.spec().d)?;
    let j: usize = run.cfg.get_or("j", 1)?;
    let r = lemma42_check(&a, run.require("eta")?, run.require("lambda")?, &simplex, j, run.level(4)?)?;
    let within = run.calibration.as_ref().is_none_or(|c| r.ratio <= c.c42);
    let ok = r.cauchy_schwarz && r.min_bound_holds && within;
    run.emit_json(r)?;
    Ok(Outcome::check(ok, "error-term bound violated"))
}
