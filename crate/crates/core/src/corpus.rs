//! Test sets and test functions: random density-δ indicators, lattices,
//! shell unions, product Cantor sets, set files, and the smooth fields used
//! to probe operator norms.

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlabError};
use crate::grid::{GridField, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorpusKind {
    /// Each cell kept independently with probability `delta`.
    Random { delta: f64, seed: u64 },
    /// Cells whose centre lies on the lattice `spacing · Z^d` offset to the
    /// first cell.
    Lattice { spacing: f64 },
    /// Cells whose centre is within `thickness / 2` of one of the spheres
    /// `|x| = r` around the origin.
    Shells { radii: Vec<f64>, thickness: f64 },
    /// Product over the axes of a middle-removal Cantor iterate: every
    /// interval keeps two end pieces of relative length `ratio`.
    Cantor { ratio: f64, depth: u32 },
    /// Cells with `(x · n̂) mod period < thickness`.
    Slabs { normal: Vec<f64>, period: f64, thickness: f64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(flatten)]
    pub kind: CorpusKind,
    pub grid: GridSpec,
}

impl CorpusSpec {
    pub fn new(kind: CorpusKind, grid: GridSpec) -> Self {
        CorpusSpec { kind, grid }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `|A| / N^d`.
pub fn density(a: &GridField) -> f64 {
    a.measure() / a.spec().box_volume()
}

/// Builds the indicator described by `spec`. Pure in `spec`: the random
/// kind draws cells sequentially from one ChaCha stream.
pub fn generate(spec: &CorpusSpec) -> Result<GridField> {
    let grid = spec.grid;
    grid.validate()?;
    let a = match &spec.kind {
        CorpusKind::Random { delta, seed } => {
            if !(*delta > 0.0 && *delta <= 1.0) {
                return Err(SlabError::param(format!("random density must lie in (0, 1], got {delta}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let values = (0..grid.cell_count()).map(|_| if rng.random::<f64>() < *delta { 1.0 } else { 0.0 }).collect();
            GridField::new(grid, values)?
        }
        CorpusKind::Lattice { spacing } => {
            let h = grid.spacing();
            let step = (spacing / h).round();
            if !(step >= 1.0 && (spacing / h - step).abs() < 1e-9) {
                return Err(SlabError::param(format!("lattice spacing {spacing} must be a positive multiple of h = {h}")));
            }
            let step = step as usize;
            let values = (0..grid.cell_count())
                .map(|i| if grid.multi_index(i).iter().all(|c| c % step == 0) { 1.0 } else { 0.0 })
                .collect();
            GridField::new(grid, values)?
        }
        CorpusKind::Shells { radii, thickness } => {
            if !(*thickness > 0.0) || radii.is_empty() || radii.iter().any(|r| !(*r >= 0.0)) {
                return Err(SlabError::param("shells need non-negative radii and positive thickness"));
            }
            let half = 0.5 * thickness;
            GridField::indicator_from_fn(grid, |x| {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                radii.iter().any(|s| (r - s).abs() <= half)
            })
        }
        CorpusKind::Cantor { ratio, depth } => {
            if !(*ratio > 0.0 && *ratio < 0.5) {
                return Err(SlabError::param(format!("Cantor ratio must lie in (0, 1/2), got {ratio}")));
            }
            let finest = grid.side * ratio.powi(*depth as i32);
            if finest < 2.0 * grid.spacing() {
                return Err(SlabError::param(format!(
                    "Cantor depth {depth} leaves intervals of length {finest}, below two cells"
                )));
            }
            let keep: Vec<bool> =
                (0..grid.n).map(|i| cantor_member(grid.axis_center(i) / grid.side + 0.5, *ratio, *depth)).collect();
            let values =
                (0..grid.cell_count()).map(|i| if grid.multi_index(i).iter().all(|&c| keep[c]) { 1.0 } else { 0.0 }).collect();
            GridField::new(grid, values)?
        }
        CorpusKind::Slabs { normal, period, thickness } => {
            let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            if normal.len() != grid.d || len == 0.0 || !(*period > 0.0 && *thickness > 0.0 && thickness < period) {
                return Err(SlabError::param("slabs need a nonzero normal of dimension d and 0 < thickness < period"));
            }
            GridField::indicator_from_fn(grid, |x| {
                let s: f64 = x.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>() / len;
                s.rem_euclid(*period) < *thickness
            })
        }
        CorpusKind::File { path } => GridField::read_set_file(path, grid.pad)?,
    };
    if a.measure() == 0.0 {
        return Err(SlabError::param("generated set is empty"));
    }
    Ok(a)
}

/// Membership of `t ∈ [0, 1]` in the depth-`depth` iterate.
fn cantor_member(mut t: f64, ratio: f64, depth: u32) -> bool {
    if !(0.0..=1.0).contains(&t) {
        return false;
    }
    for _ in 0..depth {
        if t <= ratio {
            t /= ratio;
        } else if t >= 1.0 - ratio {
            t = (t - (1.0 - ratio)) / ratio;
        } else {
            return false;
        }
    }
    true
}

/// `r0, r0·q, r0·q², …` below `r_max`.
pub fn shell_radii_geometric(r0: f64, q: f64, r_max: f64) -> Vec<f64> {
    crate::numeric::geometric_sweep(r0, r_max, q).into_iter().filter(|&r| r <= r_max).collect()
}

/// `r0, r0 + s, r0 + 2s, …` below `r_max`.
pub fn shell_radii_arithmetic(r0: f64, spacing: f64, r_max: f64) -> Vec<f64> {
    (0..).map(|m| r0 + m as f64 * spacing).take_while(|&r| r <= r_max).collect()
}

/// Continuum volume of `{x ∈ B_N : ||x| − r| ≤ θ/2 for some r}` for
/// disjoint shells inside the box.
pub fn shell_volume(d: usize, radii: &[f64], thickness: f64) -> f64 {
    let unit_ball = PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2);
    radii
        .iter()
        .map(|&r| {
            let outer = r + 0.5 * thickness;
            let inner = (r - 0.5 * thickness).max(0.0);
            unit_ball * (outer.powi(d as i32) - inner.powi(d as i32))
        })
        .sum()
}

/// Surface area of the shell boundaries, used as a discretisation scale.
pub fn shell_surface(d: usize, radii: &[f64], thickness: f64) -> f64 {
    let sphere = 2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d);
    radii
        .iter()
        .map(|&r| {
            let outer = r + 0.5 * thickness;
            let inner = (r - 0.5 * thickness).max(0.0);
            sphere * (outer.powi(d as i32 - 1) + inner.powi(d as i32 - 1))
        })
        .sum()
}

/// `Γ(m / 2)` for a positive integer `m`.
fn gamma_half_integer(m: usize) -> f64 {
    match m {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half_integer(m - 2),
    }
}

/// Smooth compactly supported field `w(x) Σ_m a_m cos(2π ξ_m·x + φ_m)`,
/// with `ξ_m` uniform in the annulus `band` and `w` a radial bump on
/// `|x| < support`. Defined pointwise, so refining the grid samples the
/// same function.
pub fn band_limited_field(grid: GridSpec, band: (f64, f64), support: f64, waves: usize, seed: u64) -> Result<GridField> {
    let (lo, hi) = band;
    if !(lo >= 0.0 && lo < hi) || !(support > 0.0) || waves == 0 {
        return Err(SlabError::param("band-limited field needs 0 ≤ lo < hi, support > 0 and waves ≥ 1"));
    }
    let d = grid.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::with_capacity(waves);
    for _ in 0..waves {
        let mut dir: Vec<f64> = (0..d).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: f64 = rng.random();
        let r = (lo.powi(d as i32) + u * (hi.powi(d as i32) - lo.powi(d as i32))).powf(1.0 / d as f64);
        dir.iter_mut().for_each(|v| *v *= r / len);
        let amp: f64 = rng.sample(rand_distr::StandardNormal);
        let phase = 2.0 * PI * rng.random::<f64>();
        modes.push((dir, amp, phase));
    }
    Ok(GridField::from_fn(grid, |x| {
        let s2 = x.iter().map(|c| c * c).sum::<f64>() / (support * support);
        if s2 >= 1.0 {
            return 0.0;
        }
        let w = (1.0 - 1.0 / (1.0 - s2)).exp();
        let sum: f64 = modes
            .iter()
            .map(|(xi, a, p)| a * (2.0 * PI * xi.iter().zip(x).map(|(k, c)| k * c).sum::<f64>() + p).cos())
            .sum();
        w * sum
    }))
}

/// Indicator of a union of cubes of side `block` on the lattice
/// `block · Z^d`, each kept with probability 1/2, restricted to the ball
/// `|x| < support`. Membership depends only on the physical position, so
/// the set is the same under grid refinement when `block` is a multiple of
/// the coarse spacing.
pub fn block_indicator(grid: GridSpec, block: f64, support: f64, seed: u64) -> Result<GridField> {
    if !(block > 0.0 && support > 0.0) {
        return Err(SlabError::param("block indicator needs positive block and support"));
    }
    Ok(GridField::indicator_from_fn(grid, |x| {
        if x.iter().map(|c| c * c).sum::<f64>() >= support * support {
            return false;
        }
        let mut key = seed ^ 0x9e37_79b9_7f4a_7c15;
        for c in x {
            key = key.wrapping_mul(0x1000_0000_01b3) ^ ((c / block).floor() as i64 as u64);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.random::<bool>()
    }))
}

/// Test functions for operator-norm lower bounds: band-limited fields in
/// `bands` geometric bands between `lo` and `hi`, plus `indicators` random
/// block indicators, all supported in `|x| < support`.
pub fn operator_corpus(
    grid: GridSpec,
    bands: usize,
    (lo, hi): (f64, f64),
    indicators: usize,
    support: f64,
    seed: u64,
) -> Result<Vec<GridField>> {
    if bands == 0 || !(lo > 0.0 && lo < hi) {
        return Err(SlabError::param("operator corpus needs at least one band and 0 < lo < hi"));
    }
    let ratio = (hi / lo).powf(1.0 / bands as f64);
    let mut out = Vec::with_capacity(bands + indicators);
    for b in 0..bands {
        let band = (lo * ratio.powi(b as i32), lo * ratio.powi(b as i32 + 1));
        out.push(band_limited_field(grid, band, support, 24, seed.wrapping_add(b as u64))?);
    }
    for i in 0..indicators {
        out.push(block_indicator(grid, 2.0, support, seed.wrapping_add(1000 + i as u64))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2(n: usize) -> GridSpec {
        GridSpec::new(2, n as f64, n, 1).unwrap()
    }

    #[test]
    fn full_random_and_lattice_density() {
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 1.0, seed: 3 }, grid2(32))).unwrap();
        assert_eq!(density(&a), 1.0);
        let l = generate(&CorpusSpec::new(CorpusKind::Lattice { spacing: 4.0 }, grid2(64))).unwrap();
        assert_eq!(density(&l), 1.0 / 16.0);
    }

    #[test]
    fn random_density_within_binomial_bound() {
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.3, seed: 17 }, grid2(128))).unwrap();
        assert!((density(&a) - 0.3).abs() < 0.013);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = CorpusSpec::new(CorpusKind::Random { delta: 0.4, seed: 5 }, grid2(64));
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let back = CorpusSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn shell_density_matches_volume() {
        let grid = grid2(256);
        let radii = shell_radii_geometric(8.0, 2.0, 100.0);
        let th = 8.0 * 0.3 * 0.3;
        let a = generate(&CorpusSpec::new(CorpusKind::Shells { radii: radii.clone(), thickness: th }, grid)).unwrap();
        let exact = shell_volume(2, &radii, th);
        let slack = 2.0 * grid.spacing() * shell_surface(2, &radii, th);
        assert!((a.measure() - exact).abs() <= slack, "{} vs {exact}", a.measure());
    }

    #[test]
    fn cantor_product_density() {
        let grid = grid2(64);
        let a = generate(&CorpusSpec::new(CorpusKind::Cantor { ratio: 0.25, depth: 2 }, grid)).unwrap();
        assert_eq!(density(&a), 0.5f64.powi(4));
        assert!(generate(&CorpusSpec::new(CorpusKind::Cantor { ratio: 0.25, depth: 5 }, grid)).is_err());
    }

    #[test]
    fn empty_output_is_rejected() {
        let r = generate(&CorpusSpec::new(CorpusKind::Shells { radii: vec![500.0], thickness: 1.0 }, grid2(32)));
        assert!(matches!(r, Err(SlabError::Param(_))));
    }

    #[test]
    fn block_indicator_refines_consistently() {
        let coarse = block_indicator(GridSpec::new(2, 32.0, 32, 1).unwrap(), 2.0, 12.0, 4).unwrap();
        let fine = block_indicator(GridSpec::new(2, 32.0, 64, 1).unwrap(), 2.0, 12.0, 4).unwrap();
        assert!((coarse.measure() - fine.measure()).abs() < 0.05 * coarse.measure());
    }
}
