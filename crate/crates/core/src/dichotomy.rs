//! The count-or-Fourier dichotomies for unpinned and pinned simplices, the
//! two smoothing lemmas behind them, and the scale sequences whose annuli
//! partition frequency space.
//!
//! Density is always the box density `|A| / N^d`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::averages::{count_functional, ConfigurationRule, DEFAULT_COUNT_SAMPLES};
use crate::corpus::density;
use crate::error::{Result, SlabError};
use crate::grid::{GridField, Spectrum};
use crate::maximal::{square_functions, LambdaGrid, SpectralAverager};
use crate::mollifier::Mollifier;
use crate::numeric::blocked_sum;
use crate::rotation::{pin_probability_at, HaarSampler};
use crate::simplex::Simplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Unpinned,
    Pinned,
}

/// Scale and smallness parameters of one dichotomy run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyParams {
    pub regime: Regime,
    pub eps: f64,
    pub eta: f64,
    pub lambda0: f64,
    /// Equal to `lambda0` in the unpinned regime.
    pub lambda1: f64,
    /// Admissibility `η ≤ c_cal·ε^{5/2}` (unpinned) or `η ≤ c_cal·ε³` (pinned).
    pub c_cal: f64,
    /// Box size requirement `N ≥ C_cal·η⁻⁴`.
    pub big_c_cal: f64,
}

impl DichotomyParams {
    pub fn unpinned(eps: f64, eta: f64, lambda: f64) -> Self {
        DichotomyParams { regime: Regime::Unpinned, eps, eta, lambda0: lambda, lambda1: lambda, c_cal: 1.0, big_c_cal: 1.0 }
    }

    pub fn pinned(eps: f64, eta: f64, lambda0: f64, lambda1: f64) -> Self {
        DichotomyParams { regime: Regime::Pinned, eps, eta, lambda0, lambda1, c_cal: 1.0, big_c_cal: 1.0 }
    }

    pub fn with_calibration(mut self, c_cal: f64, big_c_cal: f64) -> Self {
        self.c_cal = c_cal;
        self.big_c_cal = big_c_cal;
        self
    }

    pub fn eps_exponent(&self) -> f64 {
        match self.regime {
            Regime::Unpinned => 2.5,
            Regime::Pinned => 3.0,
        }
    }

    /// Smallest `c_cal` for which these `(ε, η)` are admissible.
    pub fn required_c_cal(&self) -> f64 {
        self.eta / self.eps.powf(self.eps_exponent())
    }

    pub fn validate(&self, box_side: f64) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.eps) || !in_unit(self.eta) {
            return Err(SlabError::param(format!("ε and η must lie in (0, 1), got ε = {}, η = {}", self.eps, self.eta)));
        }
        if self.eta > self.c_cal * self.eps.powf(self.eps_exponent()) * (1.0 + 1e-12) {
            return Err(SlabError::param(format!(
                "η = {} exceeds c_cal·ε^{} = {}",
                self.eta,
                self.eps_exponent(),
                self.c_cal * self.eps.powf(self.eps_exponent())
            )));
        }
        if box_side < self.big_c_cal * self.eta.powi(-4) * (1.0 - 1e-12) {
            return Err(SlabError::param(format!(
                "box side {box_side} is below C_cal·η⁻⁴ = {}",
                self.big_c_cal * self.eta.powi(-4)
            )));
        }
        let top = self.eta.powi(4) * box_side;
        if !(self.lambda0 >= 1.0 && self.lambda0 <= self.lambda1 && self.lambda1 <= top * (1.0 + 1e-12)) {
            return Err(SlabError::param(format!(
                "need 1 ≤ λ0 ≤ λ1 ≤ η⁴N = {top}, got λ0 = {}, λ1 = {}",
                self.lambda0, self.lambda1
            )));
        }
        if self.regime == Regime::Unpinned && self.lambda0 != self.lambda1 {
            return Err(SlabError::param("the unpinned regime uses a single scale"));
        }
        Ok(())
    }

    /// `[η²/λ1, η⁻²/λ0]`.
    pub fn annulus(&self) -> (f64, f64) {
        (self.eta * self.eta / self.lambda1, 1.0 / (self.eta * self.eta * self.lambda0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Count,
    Fourier,
    Both,
    /// Neither alternative observed: a counterexample candidate.
    Indeterminate,
}

impl Branch {
    pub fn classify(count: bool, fourier: bool) -> Self {
        match (count, fourier) {
            (true, true) => Branch::Both,
            (true, false) => Branch::Count,
            (false, true) => Branch::Fourier,
            (false, false) => Branch::Indeterminate,
        }
    }

    pub fn is_resolved(self) -> bool {
        self != Branch::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedWitness {
    pub x: Vec<f64>,
    /// Smallest pin probability over the scale grid.
    pub min_probability: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub params: DichotomyParams,
    pub branch: Branch,
    pub density: f64,
    /// Unpinned: `⟨1_A, A_λ(1_A, …)⟩ / N^d`. Pinned: best witness minimum
    /// over the scale grid.
    pub count_term: f64,
    pub count_stderr: f64,
    pub threshold: f64,
    pub annulus: (f64, f64),
    pub annulus_mass_ratio: f64,
    pub calibrated_floor: f64,
    pub witness: Option<PinnedWitness>,
    pub candidates_tried: usize,
}

fn annulus_ratio(a: &GridField, annulus: (f64, f64)) -> Result<f64> {
    let spectrum = a.forward_transform();
    Ok(spectrum.annulus_mass(annulus.0, annulus.1)? / a.measure())
}

fn check_set(a: &GridField, simplex: &Simplex) -> Result<()> {
    if a.spec().d != simplex.d() {
        return Err(SlabError::Dimension("set and simplex dimensions differ".into()));
    }
    if !a.is_indicator() || a.measure() == 0.0 {
        return Err(SlabError::param("dichotomy needs a nonempty indicator"));
    }
    Ok(())
}

/// Unpinned dichotomy: either `count_term > δ^{k+1} − ε` or the annulus
/// mass ratio reaches `c0·ε²`.
pub fn check_unpinned(
    a: &GridField,
    simplex: &Simplex,
    params: &DichotomyParams,
    c0: f64,
    level: u32,
    seed: u64,
) -> Result<DichotomyReport> {
    check_set(a, simplex)?;
    if params.regime != Regime::Unpinned {
        return Err(SlabError::param("check_unpinned needs unpinned parameters"));
    }
    params.validate(a.spec().side)?;
    let delta = density(a);
    let k = simplex.k();
    let rule = ConfigurationRule::new(simplex, k, level)?;
    let count = count_functional(a, params.lambda0, simplex, &rule, DEFAULT_COUNT_SAMPLES, seed)?;
    let vol = a.spec().box_volume();
    let count_term = count.value / vol;
    let threshold = delta.powi(k as i32 + 1) - params.eps;
    let annulus = params.annulus();
    let ratio = annulus_ratio(a, annulus)?;
    let floor = c0 * params.eps * params.eps;
    Ok(DichotomyReport {
        params: *params,
        branch: Branch::classify(count_term > threshold, ratio >= floor),
        density: delta,
        count_term,
        count_stderr: count.stderr / vol,
        threshold,
        annulus,
        annulus_mass_ratio: ratio,
        calibrated_floor: floor,
        witness: None,
        candidates_tried: 0,
    })
}

/// Search settings for the pinned dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinnedSearch {
    /// Points of the geometric scale grid over `[λ0, λ1]`.
    pub scales: usize,
    /// Rotation draws per scale, shared by all scales and candidates.
    pub samples: u64,
    pub max_candidates: usize,
}

impl Default for PinnedSearch {
    fn default() -> Self {
        PinnedSearch { scales: 16, samples: 2048, max_candidates: 4096 }
    }
}

/// Pinned dichotomy: either some sampled `x ∈ A` has pin probability above
/// `δ^k − ε` at every scale of the grid, or the mass ratio of
/// `[η²/λ1, η⁻²/λ0]` reaches `c0·ε²`.
pub fn check_pinned(
    a: &GridField,
    simplex: &Simplex,
    params: &DichotomyParams,
    c0: f64,
    search: &PinnedSearch,
    seed: u64,
) -> Result<DichotomyReport> {
    check_set(a, simplex)?;
    if params.regime != Regime::Pinned {
        return Err(SlabError::param("check_pinned needs pinned parameters"));
    }
    params.validate(a.spec().side)?;
    if search.samples == 0 || search.max_candidates == 0 || search.scales == 0 {
        return Err(SlabError::param("pinned search needs positive scales, samples and candidates"));
    }
    let spec = *a.spec();
    let delta = density(a);
    let k = simplex.k();
    let threshold = delta.powi(k as i32) - params.eps;
    let grid = if search.scales == 1 || params.lambda0 == params.lambda1 {
        LambdaGrid::single(params.lambda0)
    } else {
        LambdaGrid::with_count(params.lambda0, params.lambda1, search.scales)?
    };
    let reach = params.lambda1 * simplex.max_vertex_norm();
    let hw = spec.padded_half_width();
    let cells: Vec<usize> = (0..spec.cell_count())
        .filter(|&i| a.values()[i] == 1.0 && spec.cell_center(i).iter().all(|c| c.abs() + reach <= hw))
        .collect();
    if cells.is_empty() {
        return Err(SlabError::precondition("no point of A keeps the scale reach inside the padded domain"));
    }
    let sampler = HaarSampler::new(spec.d, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let order: Vec<usize> = if cells.len() <= search.max_candidates {
        cells.clone()
    } else {
        (0..search.max_candidates).map(|_| cells[rng.random_range(0..cells.len())]).collect()
    };
    let mut best: Option<PinnedWitness> = None;
    let mut witness = None;
    let mut tried = 0;
    'candidates: for &cell in &order {
        tried += 1;
        let x = spec.cell_center(cell);
        let mut min_p = f64::INFINITY;
        let mut min_se = 0.0;
        for &lambda in grid.values.iter().rev() {
            let p = pin_probability_at(a, &x, lambda, simplex, &sampler, 0, search.samples)?;
            if p.estimate < min_p {
                min_p = p.estimate;
                min_se = p.stderr;
            }
            if p.estimate <= threshold {
                if best.as_ref().is_none_or(|b| min_p > b.min_probability) {
                    best = Some(PinnedWitness { x: x.clone(), min_probability: min_p, stderr: min_se });
                }
                continue 'candidates;
            }
        }
        let w = PinnedWitness { x, min_probability: min_p, stderr: min_se };
        best = Some(w.clone());
        witness = Some(w);
        break;
    }
    let annulus = params.annulus();
    let ratio = annulus_ratio(a, annulus)?;
    let floor = c0 * params.eps * params.eps;
    let best = best.expect("at least one candidate");
    Ok(DichotomyReport {
        params: *params,
        branch: Branch::classify(witness.is_some(), ratio >= floor),
        density: delta,
        count_term: best.min_probability,
        count_stderr: best.stderr,
        threshold,
        annulus,
        annulus_mass_ratio: ratio,
        calibrated_floor: floor,
        witness,
        candidates_tried: tried,
    })
}

/// `c0 = ½ · min ratio/ε²` over the reports whose count alternative failed;
/// `None` when every report passed the count test.
pub fn calibrate_floor(reports: &[DichotomyReport]) -> Option<f64> {
    reports
        .iter()
        .filter(|r| matches!(r.branch, Branch::Fourier | Branch::Indeterminate))
        .map(|r| r.annulus_mass_ratio / (r.params.eps * r.params.eps))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
        .map(|m| 0.5 * m)
}

/// Re-evaluates the branch of a report against a new floor.
pub fn reclassify(report: &DichotomyReport, c0: f64) -> DichotomyReport {
    let mut r = report.clone();
    r.calibrated_floor = c0 * r.params.eps * r.params.eps;
    let count = match r.params.regime {
        Regime::Unpinned => r.count_term > r.threshold,
        Regime::Pinned => r.witness.is_some(),
    };
    r.branch = Branch::classify(count, r.annulus_mass_ratio >= r.calibrated_floor);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma41Report {
    pub eta: f64,
    pub lambda: f64,
    pub k: usize,
    pub delta: f64,
    pub measure: f64,
    /// `⟨f, δ^k − f1^k⟩`.
    pub inner: f64,
    /// `inner / (η|A|)`.
    pub ratio: f64,
    /// `∫ f·f1`, spectrally.
    pub int_f_f1: f64,
    /// `∫ f1²`, spectrally.
    pub int_f1_sq: f64,
    /// `∫ f1²` over the box only.
    pub box_f1_sq: f64,
    /// `∫_{B_N} f1`.
    pub box_f1: f64,
    /// `(1 − ∫_{B_N} f1 / |A|) / η`, the constant in the mass-loss bound.
    pub mass_loss_constant: f64,
    /// `∫ f·f1 ≥ ∫ f1²` evaluated in floating point.
    pub parseval_inequality: bool,
    /// `∫_{B_N} f1² ≥ (∫_{B_N} f1)² / |B_N|`.
    pub cauchy_schwarz: bool,
}

/// Smoothing at scale `t = λ/η`: `f1 = 1_A ∗ ψ_t`.
pub fn lemma41_check(a: &GridField, eta: f64, lambda: f64, k: usize) -> Result<Lemma41Report> {
    if !a.is_indicator() || a.measure() == 0.0 {
        return Err(SlabError::param("smoothing check needs a nonempty indicator"));
    }
    let spec = *a.spec();
    let delta = density(a);
    if !(eta > 0.0 && eta <= delta / 10.0) {
        return Err(SlabError::param(format!("need 0 < η ≤ δ/10 = {}, got η = {eta}", delta / 10.0)));
    }
    if !(lambda > 0.0 && lambda <= eta.powi(4) * spec.side * (1.0 + 1e-12)) {
        return Err(SlabError::param(format!("need 0 < λ ≤ η⁴N = {}, got λ = {lambda}", eta.powi(4) * spec.side)));
    }
    if k == 0 {
        return Err(SlabError::param("k must be ≥ 1"));
    }
    let mollifier = Mollifier::shared(spec.d)?;
    let t = lambda / eta;
    let spectrum = a.forward_transform();
    let (int_f_f1, int_f1_sq) = parseval_pair(&spectrum, |r| mollifier.hat(t * r));
    let f1 = mollifier.smooth_spectrum(&spectrum, t).inverse();
    let vol = spec.cell_volume();
    let values = f1.values();
    let av = a.values();
    let box_f1 = vol * blocked_sum(values.len(), |i| values[i]);
    let box_f1_sq = vol * blocked_sum(values.len(), |i| values[i] * values[i]);
    let f_f1k = vol * blocked_sum(values.len(), |i| av[i] * values[i].powi(k as i32));
    let measure = a.measure();
    let inner = delta.powi(k as i32) * measure - f_f1k;
    Ok(Lemma41Report {
        eta,
        lambda,
        k,
        delta,
        measure,
        inner,
        ratio: inner / (eta * measure),
        int_f_f1,
        int_f1_sq,
        box_f1_sq,
        box_f1,
        mass_loss_constant: (1.0 - box_f1 / measure) / eta,
        parseval_inequality: int_f_f1 >= int_f1_sq,
        cauchy_schwarz: box_f1_sq >= box_f1 * box_f1 / spec.box_volume(),
    })
}

/// `(Σ |f̂|² m, Σ |f̂|² m²)` with `m ∈ [0, 1]`, each second term formed as
/// the rounded product of the first with `m`, so the second sum can never
/// exceed the first.
fn parseval_pair(spectrum: &Spectrum, m: impl Fn(f64) -> f64) -> (f64, f64) {
    let dv = spectrum.spec().frequency_cell_volume();
    let coeffs = spectrum.coeffs();
    let first: Vec<f64> = (0..coeffs.len()).map(|i| coeffs[i].norm_sqr() * m(spectrum.frequency_norm(i))).collect();
    let second: Vec<f64> = (0..coeffs.len()).map(|i| first[i] * m(spectrum.frequency_norm(i))).collect();
    (dv * blocked_sum(first.len(), |i| first[i]), dv * blocked_sum(second.len(), |i| second[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma42Report {
    pub eta: f64,
    pub lambda: f64,
    pub j: usize,
    pub measure: f64,
    /// `⟨f, |A_λ|(f − f2)⟩` with `f2 = f ∗ ψ_{η²λ}`.
    pub inner: f64,
    /// `inner / (η^{2/5}|A|)`.
    pub ratio: f64,
    /// `∫ |f̂|² |1 − ĥ(η²λ|ξ|)|² I(λξ)`.
    pub spectral_majorant: f64,
    /// `inner² ≤ |A| · majorant`.
    pub cauchy_schwarz: bool,
    /// `λ|ξ|` at which the two terms of the pointwise bound meet, `η^{-8/5}`.
    pub crossover: f64,
    /// `sup min{(λ|ξ|)^{-1/2}, η⁴λ²|ξ|²}` over the frequency sweep.
    pub min_bound_sup: f64,
    /// `min_bound_sup ≤ η^{4/5}`.
    pub min_bound_holds: bool,
    /// `sup |1 − ĥ|² I / min{…}` over the sweep.
    pub multiplier_constant: f64,
}

/// Radii `R = λ|ξ|` at which `I` is tabulated, and the table.
fn square_function_table(simplex: &Simplex, j: usize, r_max: f64, level: u32) -> Result<(f64, Vec<f64>)> {
    let points = 2048usize.max((r_max * 64.0).ceil() as usize);
    let step = r_max / (points - 1) as f64;
    let radii: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
    let rows = square_functions(simplex, j, &radii, level)?;
    Ok((step, rows.into_iter().map(|r| r.i).collect()))
}

fn table_lookup(step: f64, table: &[f64], r: f64) -> f64 {
    let s = r / step;
    let i = (s.floor() as usize).min(table.len() - 2);
    let w = s - i as f64;
    table[i] * (1.0 - w) + table[i + 1] * w
}

pub fn lemma42_check(a: &GridField, eta: f64, lambda: f64, simplex: &Simplex, j: usize, level: u32) -> Result<Lemma42Report> {
    check_set(a, simplex)?;
    if !(eta > 0.0 && eta < 1.0 && lambda > 0.0) {
        return Err(SlabError::param("need 0 < η < 1 and λ > 0"));
    }
    let spec = *a.spec();
    let mollifier = Mollifier::shared(spec.d)?;
    let t = eta * eta * lambda;
    let high = |r: f64| 1.0 - mollifier.hat(t * r);
    let averager = SpectralAverager::new(a, simplex, j, level)?;
    let abs_avg = averager.abs_average(lambda, Some(&high));
    let expanded = a.expand();
    let vol = spec.cell_volume();
    let ev = expanded.values();
    let inner = vol * blocked_sum(ev.len(), |i| ev[i] * abs_avg[i]);

    let spectrum = averager.spectrum();
    let r_max = lambda * spec.nyquist_radius() * 1.01;
    let (step, table) = square_function_table(simplex, j, r_max, level.max(4))?;
    let coeffs = spectrum.coeffs();
    let majorant = spec.frequency_cell_volume()
        * blocked_sum(coeffs.len(), |i| {
            let r = spectrum.frequency_norm(i);
            coeffs[i].norm_sqr() * high(r).powi(2) * table_lookup(step, &table, lambda * r)
        });
    let measure = a.measure();

    let crossover = eta.powf(-1.6);
    let mut min_sup: f64 = 0.0;
    let mut mult: f64 = 0.0;
    for i in 1..table.len() {
        let big_r = i as f64 * step;
        let bound = big_r.powf(-0.5).min(eta.powi(4) * big_r * big_r);
        min_sup = min_sup.max(bound);
        let m = (1.0 - mollifier.hat(eta * eta * big_r)).powi(2) * table[i];
        mult = mult.max(m / bound);
    }
    min_sup = min_sup.max(crossover.powf(-0.5));
    Ok(Lemma42Report {
        eta,
        lambda,
        j,
        measure,
        inner,
        ratio: inner / (eta.powf(0.4) * measure),
        spectral_majorant: majorant,
        cauchy_schwarz: inner * inner <= measure * majorant * (1.0 + 1e-9),
        crossover,
        min_bound_sup: min_sup,
        min_bound_holds: min_sup <= eta.powf(0.8) * (1.0 + 1e-12),
        multiplier_constant: mult,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceMode {
    Single,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSequence {
    pub eta: f64,
    pub mode: SequenceMode,
    /// `(λ0, λ1)` per step; equal entries in single mode.
    pub scales: Vec<(f64, f64)>,
    /// `[η²/λ1, η⁻²/λ0]` per step.
    pub annuli: Vec<(f64, f64)>,
    pub disjoint: bool,
}

/// `J ≈ C/ε²`.
pub fn default_sequence_length(eps: f64, c: f64) -> usize {
    ((c / (eps * eps)).ceil() as usize).max(1)
}

/// Scales starting at `start` with `λ^{(j+1)} = η⁻⁴ λ^{(j)}` (single) or
/// `λ0^{(j+1)} = η⁻⁴ λ1^{(j)}` with `λ1 = width · λ0` (pair). Fails with an
/// overflow error when the last scale passes `η⁴N`.
pub fn sequence_builder(
    eta: f64,
    count: usize,
    mode: SequenceMode,
    start: f64,
    width: f64,
    box_side: Option<f64>,
) -> Result<ScaleSequence> {
    if count == 0 || !(eta > 0.0 && eta < 1.0) || !(start >= 1.0) || !(width >= 1.0) {
        return Err(SlabError::param("need J ≥ 1, 0 < η < 1, start ≥ 1 and width ≥ 1"));
    }
    let step = eta.powi(-4);
    let mut scales = Vec::with_capacity(count);
    let mut lo = start;
    for _ in 0..count {
        let hi = match mode {
            SequenceMode::Single => lo,
            SequenceMode::Pair => lo * width,
        };
        scales.push((lo, hi));
        lo = hi * step;
    }
    if let Some(n) = box_side {
        let bound = eta.powi(4) * n;
        let last = scales.last().unwrap().1;
        if last > bound * (1.0 + 1e-12) {
            return Err(SlabError::Overflow { lambda: last, bound });
        }
    }
    let annuli: Vec<(f64, f64)> = scales.iter().map(|&(l0, l1)| (eta * eta / l1, 1.0 / (eta * eta * l0))).collect();
    let disjoint = annuli.windows(2).all(|w| w[1].1 <= w[0].0 * (1.0 + 1e-12));
    Ok(ScaleSequence { eta, mode, scales, annuli, disjoint })
}

/// `Σ (1/|A|) ∫_{Ω_j} |1̂_A|²` over half-open annuli, clipped to the
/// resolvable radius. At most 1 by Plancherel when the annuli are disjoint.
pub fn annulus_mass_sum(a: &GridField, annuli: &[(f64, f64)]) -> Result<f64> {
    let spectrum = a.forward_transform();
    let nyq = a.spec().nyquist_radius();
    let bands: Vec<(f64, f64)> =
        annuli.iter().filter(|(lo, _)| *lo < nyq).map(|&(lo, hi)| (lo, hi.min(nyq))).collect();
    let masses = spectrum.annulus_masses(&bands)?;
    Ok(masses.iter().sum::<f64>() / a.measure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate, CorpusKind, CorpusSpec};
    use crate::grid::GridSpec;

    #[test]
    fn sequence_example() {
        let s = sequence_builder(0.1, 3, SequenceMode::Single, 1.0, 1.0, None).unwrap();
        let l: Vec<f64> = s.scales.iter().map(|p| p.0).collect();
        for (a, b) in l.iter().zip([1.0, 1e4, 1e8]) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
        assert!(s.disjoint);
        let one = sequence_builder(0.1, 1, SequenceMode::Single, 1.0, 1.0, None).unwrap();
        assert_eq!(one.scales, vec![(1.0, 1.0)]);
        assert!(matches!(
            sequence_builder(0.5, 4, SequenceMode::Pair, 1.0, 2.0, Some(256.0)),
            Err(SlabError::Overflow { .. })
        ));
    }

    #[test]
    fn params_validation() {
        let p = DichotomyParams::unpinned(0.5, 0.45, 8.0);
        assert!(p.validate(256.0).is_err());
        let p = p.with_calibration(p.required_c_cal(), 1.0);
        p.validate(256.0).unwrap();
        assert!(DichotomyParams::unpinned(0.5, 0.45, 30.0).with_calibration(10.0, 1.0).validate(256.0).is_err());
    }

    #[test]
    fn trivial_threshold_gives_count() {
        let grid = GridSpec::new(2, 64.0, 64, 2).unwrap();
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.3, seed: 1 }, grid)).unwrap();
        let p = DichotomyParams::unpinned(0.5, 0.7, 4.0).with_calibration(10.0, 1.0);
        let r = check_unpinned(&a, &Simplex::standard(1, 2).unwrap(), &p, 0.1, 4, 0).unwrap();
        assert!(r.threshold < 0.0);
        assert!(matches!(r.branch, Branch::Count | Branch::Both));
    }

    #[test]
    fn parseval_inequality_and_full_box() {
        let grid = GridSpec::new(2, 256.0, 256, 2).unwrap();
        let a = GridField::constant(grid, 1.0);
        let r = lemma41_check(&a, 0.05, 0.0016, 1).unwrap();
        assert!(r.parseval_inequality);
        assert!(r.ratio.abs() < 1.0, "{}", r.ratio);
    }

    #[test]
    fn lemma42_constant_field_vanishes() {
        let grid = GridSpec::new(2, 64.0, 64, 2).unwrap();
        let a = GridField::constant(grid, 1.0);
        let r = lemma42_check(&a, 0.5, 4.0, &Simplex::standard(1, 2).unwrap(), 1, 4).unwrap();
        assert!(r.min_bound_holds);
        assert!(r.cauchy_schwarz);
        assert!((r.crossover - 0.5f64.powf(-1.6)).abs() < 1e-12);
    }

    #[test]
    fn plancherel_cap() {
        let grid = GridSpec::new(2, 128.0, 128, 2).unwrap();
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.4, seed: 2 }, grid)).unwrap();
        let s = sequence_builder(0.5, 3, SequenceMode::Single, 8.0, 1.0, None).unwrap();
        let total = annulus_mass_sum(&a, &s.annuli).unwrap();
        assert!(total <= 1.0 + 1e-6, "{total}");
    }
}
