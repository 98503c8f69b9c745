//! Desk-scale experiment drivers shared by the command line, the examples
//! and the acceptance suite: operator equivalence, square-function decay,
//! maximal-operator sweeps, the dichotomy corpora, and calibration.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::averages::ConfigurationRule;
use crate::corpus::{
    band_limited_field, density, generate, operator_corpus, shell_radii_arithmetic, shell_radii_geometric, CorpusKind,
    CorpusSpec,
};
use crate::dichotomy::{
    calibrate_floor, check_pinned, check_unpinned, lemma41_check, lemma42_check, reclassify, DichotomyParams,
    DichotomyReport, PinnedSearch,
};
use crate::error::{Result, SlabError};
use crate::grid::{GridField, GridSpec};
use crate::maximal::{block_maxima, l2_ratio_maximal, square_functions, thm61_scaling, LambdaGrid, MaximalReport, Thm61Report};
use crate::mollifier::{Mollifier, MollifierConstants};
use crate::rotation::{mc_multilinear_at, HaarSampler};
use crate::simplex::Simplex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub d: usize,
    pub j: usize,
    pub cases: usize,
    pub draws: u64,
    pub level: u32,
    pub seed: u64,
}

impl EquivalenceConfig {
    /// 50 cases, 10⁴ draws, level 4 (3 in four dimensions).
    pub fn standard(d: usize, j: usize, seed: u64) -> Self {
        EquivalenceConfig { d, j, cases: 50, draws: 10_000, level: if d >= 4 { 3 } else { 4 }, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCase {
    pub case: usize,
    pub vertices: Vec<Vec<f64>>,
    pub lambda: f64,
    pub x: Vec<f64>,
    pub quadrature: f64,
    /// `|Q_L − Q_{L−1}|`.
    pub quadrature_error: f64,
    pub monte_carlo: f64,
    pub mc_stderr: f64,
    /// Discrepancy in units of the combined standard error.
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub config: EquivalenceConfig,
    pub cases: Vec<EquivalenceCase>,
    pub max_z: f64,
    pub failures: usize,
}

impl EquivalenceReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

fn equivalence_grid(d: usize) -> Result<GridSpec> {
    match d {
        2 => GridSpec::new(2, 32.0, 64, 1),
        3 => GridSpec::new(3, 32.0, 32, 1),
        4 => GridSpec::new(4, 16.0, 16, 1),
        _ => Err(SlabError::Dimension(format!("equivalence runs support d ∈ {{2, 3, 4}}, got {d}"))),
    }
}

fn random_simplex(k: usize, d: usize, rng: &mut ChaCha8Rng) -> Simplex {
    loop {
        let raw: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect();
        if let Ok(s) = Simplex::normalize(&raw, d) {
            if s.gram_det() > 0.05 && s.max_vertex_norm() <= 2.0 {
                return s;
            }
        }
    }
}

/// Nested quadrature against rotation Monte Carlo on random simplices,
/// smooth random inputs, points and scales.
pub fn equivalence_run(cfg: &EquivalenceConfig) -> Result<EquivalenceReport> {
    let (d, j) = (cfg.d, cfg.j);
    if j == 0 || j >= d {
        return Err(SlabError::param(format!("need 1 ≤ j < d, got j = {j}, d = {d}")));
    }
    if cfg.level < 2 || cfg.draws < 2 {
        return Err(SlabError::param("equivalence runs need level ≥ 2 and at least two draws"));
    }
    let grid = equivalence_grid(d)?;
    let hw = grid.padded_half_width();
    let mut cases = Vec::with_capacity(cfg.cases);
    for case in 0..cfg.cases {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(case as u64);
        let simplex = random_simplex(j, d, &mut rng);
        let lambda = 1.0 + 2.0 * rng.random::<f64>();
        let room = hw - lambda * simplex.max_vertex_norm() - 1.0;
        let x: Vec<f64> = (0..d).map(|_| room.min(2.0) * (2.0 * rng.random::<f64>() - 1.0)).collect();
        let inputs: Vec<GridField> = (0..j)
            .map(|i| {
                let g = band_limited_field(grid, (0.02, 0.15), 0.9 * hw, 8, rng.random::<u64>())?;
                Ok(g.map(|v| v + 0.5 * (i as f64 + 1.0)))
            })
            .collect::<Result<_>>()?;
        let refs: Vec<&GridField> = inputs.iter().collect();
        let fine = ConfigurationRule::new(&simplex, j, cfg.level)?.average(&refs, &x, lambda)?;
        let coarse = ConfigurationRule::new(&simplex, j, cfg.level - 1)?.average(&refs, &x, lambda)?;
        let sampler = HaarSampler::new(d, rng.random::<u64>())?;
        let mc = mc_multilinear_at(&refs, &x, lambda, &simplex, &sampler, 0, cfg.draws)?;
        let quadrature_error = (fine - coarse).abs();
        let combined = (mc.stderr.powi(2) + quadrature_error.powi(2)).sqrt();
        let z = if combined > 0.0 { (fine - mc.mean).abs() / combined } else if fine == mc.mean { 0.0 } else { f64::INFINITY };
        cases.push(EquivalenceCase {
            case,
            vertices: simplex.vertices().to_vec(),
            lambda,
            x,
            quadrature: fine,
            quadrature_error,
            monte_carlo: mc.mean,
            mc_stderr: mc.stderr,
            z,
            pass: z <= 3.0,
        });
    }
    let max_z = cases.iter().map(|c| c.z).fold(0.0, f64::max);
    let failures = cases.iter().filter(|c| !c.pass).count();
    Ok(EquivalenceReport { config: *cfg, cases, max_z, failures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRun {
    pub d: usize,
    pub j: usize,
    pub level: u32,
    pub radii: Vec<f64>,
    pub i: Vec<f64>,
    pub i_tilde: Vec<f64>,
    /// `sup I(R)(1 + R)^{(d−j)/2}`.
    pub envelope_constant: f64,
    pub i_tilde_sup: f64,
    /// Maxima of `Ĩ` over half-decade blocks of `R`.
    pub block_maxima: Vec<f64>,
    /// Block maxima strictly increasing over the sweep.
    pub growing: bool,
}

impl DecayRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,I,I_tilde,envelope\n");
        let e = (self.d - self.j) as f64 / 2.0;
        for ((r, i), it) in self.radii.iter().zip(&self.i).zip(&self.i_tilde) {
            out.push_str(&format!("{r},{i},{it},{}\n", i * (1.0 + r).powf(e)));
        }
        out
    }
}

/// Radii `10^{a}` for `a` on a uniform grid of `per_decade` points per
/// decade between `10^{lo}` and `10^{hi}`, preceded by 0.
pub fn log_radii(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let count = ((hi - lo) * per_decade as f64).round() as usize;
    let mut out = vec![0.0];
    out.extend((0..=count).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / count as f64)));
    out
}

/// Square functions of the regular simplex over `radii`.
pub fn decay_run(d: usize, j: usize, level: u32, radii: &[f64]) -> Result<DecayRun> {
    let simplex = Simplex::regular(j.max(1), d)?;
    let rows = square_functions(&simplex, j, radii, level)?;
    let e = (d - j) as f64 / 2.0;
    let envelope_constant = rows.iter().map(|r| r.i * (1.0 + r.r).powf(e)).fold(0.0, f64::max);
    let i_tilde_sup = rows.iter().map(|r| r.i_tilde).fold(0.0, f64::max);
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let mut edges = vec![1.0];
    while *edges.last().unwrap() * 10f64.sqrt() <= r_max * (1.0 + 1e-12) {
        edges.push(edges.last().unwrap() * 10f64.sqrt());
    }
    let maxima = block_maxima(&rows, &edges);
    let growing = maxima.len() >= 2 && maxima.windows(2).all(|w| w[1] > w[0]);
    Ok(DecayRun {
        d,
        j,
        level,
        radii: radii.to_vec(),
        i: rows.iter().map(|r| r.i).collect(),
        i_tilde: rows.iter().map(|r| r.i_tilde).collect(),
        envelope_constant,
        i_tilde_sup,
        block_maxima: maxima,
        growing,
    })
}

/// Operator-norm corpus settings in three dimensions, `j = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalConfig {
    pub n: usize,
    pub q: u32,
    pub side: f64,
    pub support: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub bands: usize,
    pub band_lo: f64,
    pub band_hi: f64,
    pub indicators: usize,
    pub seed: u64,
}

impl Default for MaximalConfig {
    fn default() -> Self {
        MaximalConfig {
            n: 64,
            q: 8,
            side: 64.0,
            support: 15.0,
            lambda0: 1.0,
            lambda1: 16.0,
            bands: 6,
            band_lo: 1.0 / 32.0,
            band_hi: 0.4,
            indicators: 2,
            seed: 21,
        }
    }
}

impl MaximalConfig {
    pub fn corpus(&self, d: usize) -> Result<Vec<GridField>> {
        let grid = GridSpec::new(d, self.side, self.n, 1)?;
        operator_corpus(grid, self.bands, (self.band_lo, self.band_hi), self.indicators, self.support, self.seed)
    }

    pub fn lambda_grid(&self) -> Result<LambdaGrid> {
        LambdaGrid::new(self.lambda0, self.lambda1, self.q)
    }
}

pub fn maximal_run(cfg: &MaximalConfig, d: usize, j: usize, outer_level: u32) -> Result<MaximalReport> {
    let simplex = Simplex::standard(j.max(1), d)?;
    l2_ratio_maximal(&cfg.corpus(d)?, &simplex, j, &cfg.lambda_grid()?, outer_level)
}

/// `L/λ0 ∈ {2⁻⁶, …, 1}`.
pub fn default_l_sweep(lambda0: f64) -> Vec<f64> {
    (0..=6).map(|i| lambda0 * 2f64.powi(i - 6)).collect()
}

pub fn thm61_run(cfg: &MaximalConfig, outer_level: u32) -> Result<Thm61Report> {
    let simplex = Simplex::standard(1, 3)?;
    thm61_scaling(&cfg.corpus(3)?, &simplex, 1, &cfg.lambda_grid()?, &default_l_sweep(cfg.lambda0), outer_level)
}

/// A named corpus member with its `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyCase {
    pub name: String,
    pub spec: CorpusSpec,
    pub eps: f64,
}

pub const UNPINNED_ETA: f64 = 0.45;
pub const UNPINNED_LAMBDA: f64 = 8.0;
pub const PINNED_ETA: f64 = 0.5;
pub const PINNED_LAMBDA: (f64, f64) = (5.0, 8.0);

/// `ε` for structured sets: half of `δ^{k+1}`, at least 0.01.
fn structured_eps(a_density: f64, k: usize) -> f64 {
    (0.5 * a_density.powi(k as i32 + 1)).max(0.01)
}

fn case(name: String, kind: CorpusKind, grid: GridSpec, eps: Option<f64>, k: usize) -> Result<DichotomyCase> {
    let spec = CorpusSpec::new(kind, grid);
    let eps = match eps {
        Some(e) => e,
        None => structured_eps(density(&generate(&spec)?), k),
    };
    Ok(DichotomyCase { name, spec, eps })
}

/// Twenty planar sets at `N = n = 256`: random, lattice, shell, Cantor and
/// slab families. `variant` shifts the seeds and geometry so calibration
/// and evaluation corpora differ.
pub fn unpinned_corpus(variant: u64) -> Result<Vec<DichotomyCase>> {
    let grid = GridSpec::new(2, 256.0, 256, 2)?;
    let shift = variant as f64;
    let mut out = Vec::new();
    for (i, delta) in [0.2, 0.3, 0.4, 0.5, 0.6, 0.7].into_iter().enumerate() {
        let seed = 1000 * variant + i as u64;
        out.push(case(format!("random-{delta}"), CorpusKind::Random { delta, seed }, grid, Some(0.05), 1)?);
    }
    for spacing in [2.0, 4.0, 8.0] {
        out.push(case(format!("lattice-{spacing}"), CorpusKind::Lattice { spacing }, grid, None, 1)?);
    }
    let l = UNPINNED_LAMBDA;
    for (i, (gap, th)) in [(1.2, 2.5), (1.5, 3.0), (2.0, 4.0)].into_iter().enumerate() {
        let radii = shell_radii_arithmetic(6.0 + shift + i as f64, gap * l, 180.0);
        out.push(case(format!("shells-{gap}"), CorpusKind::Shells { radii, thickness: th }, grid, None, 1)?);
    }
    let radii = shell_radii_geometric(l + shift, 2.0, 180.0);
    out.push(case(
        "shells-geometric".into(),
        CorpusKind::Shells { radii, thickness: l * UNPINNED_ETA * UNPINNED_ETA },
        grid,
        None,
        1,
    )?);
    for (ratio, depth) in [(0.25, 2), (0.3, 3), (0.4, 4), (0.45, 5)] {
        out.push(case(format!("cantor-{ratio}-{depth}"), CorpusKind::Cantor { ratio, depth }, grid, None, 1)?);
    }
    for (i, normal) in [vec![1.0, 0.0], vec![1.0, 0.3 + 0.1 * shift], vec![1.0, 1.0]].into_iter().enumerate() {
        let period = 12.0 + 2.0 * i as f64;
        out.push(case(
            format!("slabs-{i}"),
            CorpusKind::Slabs { normal, period, thickness: period / 4.0 },
            grid,
            None,
            1,
        )?);
    }
    Ok(out)
}

/// Three-dimensional sets at `N = n = 128` for the pinned dichotomy.
pub fn pinned_corpus(variant: u64) -> Result<Vec<DichotomyCase>> {
    let grid = GridSpec::new(3, 128.0, 128, 1)?;
    let shift = variant as f64;
    let mut out = vec![case("full".into(), CorpusKind::Random { delta: 1.0, seed: 0 }, grid, Some(0.1), 1)?];
    for (i, delta) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let seed = 2000 + 1000 * variant + i as u64;
        out.push(case(format!("random-{delta}"), CorpusKind::Random { delta, seed }, grid, Some(0.1), 1)?);
    }
    let (_, l1) = PINNED_LAMBDA;
    for (i, th) in [2.5, 3.0].into_iter().enumerate() {
        let radii = shell_radii_arithmetic(20.0 + shift + 3.0 * i as f64, l1 + th, 115.0);
        out.push(case(format!("shells-{th}"), CorpusKind::Shells { radii, thickness: th }, grid, Some(0.03), 1)?);
    }
    Ok(out)
}

pub fn unpinned_params(eps: f64) -> DichotomyParams {
    DichotomyParams::unpinned(eps, UNPINNED_ETA, UNPINNED_LAMBDA)
}

pub fn pinned_params(eps: f64) -> DichotomyParams {
    DichotomyParams::pinned(eps, PINNED_ETA, PINNED_LAMBDA.0, PINNED_LAMBDA.1)
}

/// Smallest `c_cal` admitting every case of both corpora.
pub fn required_c_cal(unpinned: &[DichotomyCase], pinned: &[DichotomyCase]) -> (f64, f64) {
    let u = unpinned.iter().map(|c| unpinned_params(c.eps).required_c_cal()).fold(0.0, f64::max);
    let p = pinned.iter().map(|c| pinned_params(c.eps).required_c_cal()).fold(0.0, f64::max);
    (u, p)
}

/// [`required_c_cal`] over the calibration and evaluation corpora together.
pub fn shipped_c_cal() -> Result<(f64, f64)> {
    let (u0, p0) = required_c_cal(&unpinned_corpus(0)?, &pinned_corpus(0)?);
    let (u1, p1) = required_c_cal(&unpinned_corpus(1)?, &pinned_corpus(1)?);
    Ok((u0.max(u1), p0.max(p1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub report: DichotomyReport,
}

/// Runs both corpora with floor `c0` (0 reports the raw alternatives).
pub fn dichotomy_corpus_run(
    unpinned: &[DichotomyCase],
    pinned: &[DichotomyCase],
    c_cal: (f64, f64),
    c0: f64,
    level: u32,
    seed: u64,
) -> Result<Vec<NamedReport>> {
    let mut out = Vec::new();
    let planar = Simplex::standard(1, 2)?;
    for c in unpinned {
        let a = generate(&c.spec)?;
        let p = unpinned_params(c.eps).with_calibration(c_cal.0, 1.0);
        out.push(NamedReport { name: format!("unpinned/{}", c.name), report: check_unpinned(&a, &planar, &p, c0, level, seed)? });
    }
    let spatial = Simplex::standard(1, 3)?;
    for c in pinned {
        let a = generate(&c.spec)?;
        let p = pinned_params(c.eps).with_calibration(c_cal.1, 1.0);
        out.push(NamedReport {
            name: format!("pinned/{}", c.name),
            report: check_pinned(&a, &spatial, &p, c0, &PinnedSearch::default(), seed)?,
        });
    }
    Ok(out)
}

/// Calibrated constants, versioned with the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub mollifier: BTreeMap<usize, MollifierConstants>,
    #[serde(rename = "C_41")]
    pub c41: f64,
    #[serde(rename = "C_42")]
    pub c42: f64,
    pub c0: f64,
    #[serde(rename = "C_61")]
    pub c61: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    /// Box-size constant in `N ≥ C_cal·η⁻⁴`.
    #[serde(rename = "C_cal")]
    pub big_c_cal: f64,
    /// `η ≤ c_cal·ε^{5/2}`.
    pub c_cal_unpinned: f64,
    /// `η ≤ c_cal·ε³`.
    pub c_cal_pinned: f64,
}

/// Head-room applied to observed maxima.
pub const CALIBRATION_MARGIN: f64 = 1.25;

fn with_margin(observed: f64) -> f64 {
    observed + (CALIBRATION_MARGIN - 1.0) * observed.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub level: u32,
    pub seed: u64,
    /// Corpus variant used for calibration; evaluation uses variant 0.
    pub variant: u64,
    pub maximal: MaximalConfig,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { level: 5, seed: 7, variant: 1, maximal: MaximalConfig::default() }
    }
}

/// Smoothing ratios on random planar sets: `η = δ/10`, `λ = η⁴N`.
pub fn lemma41_corpus_ratios(variant: u64, count: usize) -> Result<Vec<f64>> {
    let grid = GridSpec::new(2, 256.0, 256, 2)?;
    (0..count)
        .map(|i| {
            let delta = 0.2 + 0.6 * i as f64 / count.max(2) as f64;
            let a = generate(&CorpusSpec::new(CorpusKind::Random { delta, seed: 5000 + 100 * variant + i as u64 }, grid))?;
            let eta = density(&a) / 10.0;
            Ok(lemma41_check(&a, eta, eta.powi(4) * grid.side, 1)?.ratio)
        })
        .collect()
}

/// Error-term ratios on random planar sets with `η = 0.05`.
pub fn lemma42_corpus_ratios(variant: u64, count: usize, level: u32) -> Result<Vec<f64>> {
    let grid = GridSpec::new(2, 128.0, 128, 2)?;
    let simplex = Simplex::standard(1, 2)?;
    (0..count)
        .map(|i| {
            let a = generate(&CorpusSpec::new(
                CorpusKind::Random { delta: 0.3 + 0.1 * i as f64, seed: 6000 + 100 * variant + i as u64 },
                grid,
            ))?;
            Ok(lemma42_check(&a, 0.05, 8.0, &simplex, 1, level)?.ratio)
        })
        .collect()
}

pub fn calibrate(cfg: &CalibrationConfig) -> Result<Calibration> {
    let mut mollifier = BTreeMap::new();
    for d in 2..=4 {
        mollifier.insert(d, Mollifier::shared(d)?.constants());
    }
    let c41 = with_margin(lemma41_corpus_ratios(cfg.variant, 8)?.into_iter().fold(f64::NEG_INFINITY, f64::max));
    let c42 = with_margin(lemma42_corpus_ratios(cfg.variant, 4, cfg.level.min(5))?.into_iter().fold(0.0, f64::max));
    let unpinned = unpinned_corpus(cfg.variant)?;
    let pinned = pinned_corpus(cfg.variant)?;
    let (cu, cp) = shipped_c_cal()?;
    let raw = dichotomy_corpus_run(&unpinned, &pinned, (cu, cp), 0.0, cfg.level, cfg.seed)?;
    let reports: Vec<DichotomyReport> = raw.into_iter().map(|r| r.report).collect();
    let c0 = calibrate_floor(&reports).unwrap_or(1.0);
    let c61 = thm61_run(&cfg.maximal, 3)?.c61;
    let c_max = with_margin(maximal_run(&cfg.maximal, 3, 1, 3)?.max_ratio);
    Ok(Calibration {
        mollifier,
        c41,
        c42,
        c0,
        c61,
        c_max,
        big_c_cal: 1.0,
        c_cal_unpinned: cu,
        c_cal_pinned: cp,
    })
}

/// Re-evaluates raw reports against a calibrated floor.
pub fn apply_floor(reports: &[NamedReport], c0: f64) -> Vec<NamedReport> {
    reports.iter().map(|r| NamedReport { name: r.name.clone(), report: reclassify(&r.report, c0) }).collect()
}
