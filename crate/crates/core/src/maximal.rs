//! Maximal spherical averages over a scale interval, their mollified
//! high-frequency variants, the square functions `I` and `Ĩ`, and the
//! operator-norm experiments built on them.
//!
//! Two backends evaluate the absolute-value averages. The quadrature
//! backend interpolates the input at configuration-rule nodes for a list of
//! points. The spectral backend multiplies `ĝ` by `dσ̂(λξ)` for each outer
//! frame and inverts on the whole (padded) grid.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averages::ConfigurationRule;
use crate::bessel::sphere_profile;
use crate::error::{Result, SlabError};
use crate::grid::{GridField, Spectrum};
use crate::mollifier::Mollifier;
use crate::numeric::{blocked_sum, gauss_legendre};
use crate::simplex::{Frame, Simplex};
use crate::sphere::{config_sphere, sphere_ft, sphere_ft_radial_derivative, ConfigSphere};

/// Geometric scales `λ0, λ0·ρ, λ0·ρ², …` whose last entry reaches `λ1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lambda0: f64,
    pub lambda1: f64,
    pub ratio: f64,
    pub values: Vec<f64>,
}

impl LambdaGrid {
    pub const DEFAULT_Q: u32 = 8;

    /// Step ratio `1 + 1/q`.
    pub fn new(lambda0: f64, lambda1: f64, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(SlabError::param("LambdaGrid needs q ≥ 1"));
        }
        Self::with_ratio(lambda0, lambda1, 1.0 + 1.0 / q as f64)
    }

    pub fn with_ratio(lambda0: f64, lambda1: f64, ratio: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0 <= lambda1 && lambda1.is_finite()) || !(ratio > 1.0) {
            return Err(SlabError::param(format!(
                "LambdaGrid needs 0 < λ0 ≤ λ1 and ratio > 1, got λ0 = {lambda0}, λ1 = {lambda1}, ratio = {ratio}"
            )));
        }
        let values = crate::numeric::geometric_sweep(lambda0, lambda1, ratio);
        Ok(LambdaGrid { lambda0, lambda1, ratio, values })
    }

    /// Exactly `count` points with `λ0` first and `λ1` last.
    pub fn with_count(lambda0: f64, lambda1: f64, count: usize) -> Result<Self> {
        if count < 2 || !(lambda0 > 0.0 && lambda0 < lambda1) {
            return Err(SlabError::param("LambdaGrid::with_count needs count ≥ 2 and 0 < λ0 < λ1"));
        }
        let ratio = (lambda1 / lambda0).powf(1.0 / (count - 1) as f64);
        let values = (0..count).map(|i| if i + 1 == count { lambda1 } else { lambda0 * ratio.powi(i as i32) }).collect();
        Ok(LambdaGrid { lambda0, lambda1, ratio, values })
    }

    pub fn single(lambda: f64) -> Self {
        LambdaGrid { lambda0: lambda, lambda1: lambda, ratio: f64::INFINITY, values: vec![lambda] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Radial Fourier multiplier applied to the input before averaging.
#[derive(Clone)]
pub enum MultiplierSpec {
    /// `1 − ĥ(L|ξ|)`: removes `f ∗ ψ_L`. Requires `L ≤ λ0`.
    Mollified { l: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MultiplierSpec::Mollified { l } => write!(f, "Mollified {{ l: {l} }}"),
            MultiplierSpec::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl MultiplierSpec {
    pub fn eval(&self, mollifier: &Mollifier, r: f64) -> f64 {
        match self {
            MultiplierSpec::Mollified { l } => 1.0 - mollifier.hat(l * r),
            MultiplierSpec::Custom(m) => m(r),
        }
    }

    fn validate(&self, grid: &LambdaGrid) -> Result<()> {
        if let MultiplierSpec::Mollified { l } = self {
            if !(*l >= 0.0 && *l <= grid.lambda0 * (1.0 + 1e-12)) {
                return Err(SlabError::param(format!("mollified multiplier needs 0 ≤ L ≤ λ0, got L = {l}")));
            }
        }
        Ok(())
    }
}

/// Outer frames `(weight, configuration sphere of vertex j)` discretizing
/// the outer integrals of the depth-`j` operator.
pub fn outer_frames(simplex: &Simplex, j: usize, level: u32) -> Result<Vec<(f64, ConfigSphere)>> {
    if j == 0 || j > simplex.k() {
        return Err(SlabError::param(format!("need 1 ≤ j ≤ k = {}, got {j}", simplex.k())));
    }
    if j == 1 {
        return Ok(vec![(1.0, config_sphere(simplex, 1, &Frame::empty())?)]);
    }
    let rule = ConfigurationRule::new(simplex, j - 1, level)?;
    rule.leaf_frames().into_iter().map(|(w, frame)| Ok((w, config_sphere(simplex, j, &Frame::new(frame))?))).collect()
}

/// Spectral evaluation of absolute-value averages on the whole padded grid.
pub struct SpectralAverager {
    spectrum: Spectrum,
    norms: Vec<f64>,
    frames: Vec<(f64, ConfigSphere)>,
}

impl SpectralAverager {
    pub fn new(g: &GridField, simplex: &Simplex, j: usize, outer_level: u32) -> Result<Self> {
        if g.spec().d != simplex.d() {
            return Err(SlabError::Dimension("field and simplex dimensions differ".into()));
        }
        let spectrum = g.forward_transform();
        let norms = (0..spectrum.len()).map(|i| spectrum.frequency_norm(i)).collect();
        Ok(SpectralAverager { spectrum, norms, frames: outer_frames(simplex, j, outer_level)? })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `∫ |g_m ∗ σ_λ|` over outer frames, where `ĝ_m = m(|ξ|)·ĝ`, as values
    /// on the padded domain.
    pub fn abs_average(&self, lambda: f64, multiplier: Option<&(dyn Fn(f64) -> f64 + Sync)>) -> Vec<f64> {
        let spec = *self.spectrum.spec();
        let radial = self.frames.len() == 1 && self.frames[0].1.span_basis().is_empty();
        let mut acc = vec![0.0; self.spectrum.len()];
        for (w, cs) in &self.frames {
            let coeffs: Vec<Complex64> = self
                .spectrum
                .coeffs()
                .par_iter()
                .enumerate()
                .map(|(i, c)| {
                    let m = multiplier.map_or(1.0, |f| f(self.norms[i]));
                    if m == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    if radial {
                        let (b, _) = sphere_profile(cs.intrinsic_dim(), 2.0 * PI * lambda * cs.radius() * self.norms[i]);
                        c * (m * b)
                    } else {
                        let xi: Vec<f64> = self.spectrum.frequency(i).iter().map(|v| v * lambda).collect();
                        c * sphere_ft(cs, &xi) * m
                    }
                })
                .collect();
            let field = Spectrum::from_parts(spec, coeffs).inverse_full();
            acc.par_iter_mut().zip(field.values().par_iter()).for_each(|(a, v)| *a += w * v.abs());
        }
        acc
    }

    /// Pointwise maximum of [`abs_average`](Self::abs_average) over the grid.
    pub fn maximal(&self, grid: &LambdaGrid, multiplier: Option<&(dyn Fn(f64) -> f64 + Sync)>) -> GridField {
        let mut best = vec![0.0f64; self.spectrum.len()];
        for &lambda in &grid.values {
            let v = self.abs_average(lambda, multiplier);
            best.par_iter_mut().zip(v.par_iter()).for_each(|(b, x)| *b = b.max(*x));
        }
        GridField::new(self.spectrum.spec().padded_spec(), best).expect("padded grid has matching size")
    }
}

/// Checks that every scale keeps the support of `g` away from the periodic
/// images of the padded transform.
pub fn check_spectral_reach(g: &GridField, simplex: &Simplex, grid: &LambdaGrid) -> Result<()> {
    let spec = g.spec();
    let mut support: f64 = 0.0;
    for (i, v) in g.values().iter().enumerate() {
        if *v != 0.0 {
            for c in spec.cell_center(i) {
                support = support.max(c.abs() + 0.5 * spec.spacing());
            }
        }
    }
    let hw = spec.padded_half_width();
    let reach = grid.max() * simplex.max_vertex_norm();
    if support + reach > hw * (1.0 + 1e-12) {
        return Err(SlabError::precondition(format!(
            "support radius {support} plus reach {reach} exceeds the padded half-width {hw}; periodic images would interfere"
        )));
    }
    Ok(())
}

/// `A_*^{(j)}(g)(x) = max_λ A_λ^{(j)}(g)(x)` by nested quadrature at the
/// given points.
pub fn maximal_average(
    g: &GridField,
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    level: u32,
    xs: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let rule = ConfigurationRule::new(simplex, j, level)?;
    let mut best = vec![0.0f64; xs.len()];
    for &lambda in &grid.values {
        let v = rule.abs_average_many(g, xs, lambda)?;
        for (b, x) in best.iter_mut().zip(v) {
            *b = b.max(x);
        }
    }
    Ok(best)
}

/// Spectral maximal average on the whole padded grid.
pub fn maximal_average_spectral(
    g: &GridField,
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    outer_level: u32,
) -> Result<GridField> {
    check_spectral_reach(g, simplex, grid)?;
    Ok(SpectralAverager::new(g, simplex, j, outer_level)?.maximal(grid, None))
}

/// `M_L^{(j)}(f)` on the whole padded grid, with the multiplier applied
/// inside the inner sphere transform.
pub fn mollified_maximal(
    f: &GridField,
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    spec: &MultiplierSpec,
    outer_level: u32,
) -> Result<GridField> {
    spec.validate(grid)?;
    check_spectral_reach(f, simplex, grid)?;
    let mollifier = Mollifier::shared(f.spec().d)?;
    let m = |r: f64| spec.eval(mollifier, r);
    Ok(SpectralAverager::new(f, simplex, j, outer_level)?.maximal(grid, Some(&m)))
}

/// The same operator computed the other way round: form `f − f ∗ ψ_L` on
/// the grid first, then take the plain maximal average.
pub fn mollified_maximal_physical(
    f: &GridField,
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    spec: &MultiplierSpec,
    outer_level: u32,
) -> Result<GridField> {
    spec.validate(grid)?;
    check_spectral_reach(f, simplex, grid)?;
    let mollifier = Mollifier::shared(f.spec().d)?;
    let high = f.forward_transform().scale_radial(|r| spec.eval(mollifier, r)).inverse_full();
    Ok(SpectralAverager::new(&high, simplex, j, outer_level)?.maximal(grid, None))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub d: usize,
    pub j: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// `d ≥ j + 2`, the range where boundedness is expected.
    pub in_bounded_range: bool,
}

/// `‖A_* g‖² / ‖g‖²` for each corpus member (spectral backend, whole grid).
/// The maximum is a lower bound for the operator norm squared.
pub fn l2_ratio_maximal(
    corpus: &[GridField],
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    outer_level: u32,
) -> Result<MaximalReport> {
    let d = simplex.d();
    let mut ratios = Vec::with_capacity(corpus.len());
    for g in corpus {
        let norm = g.l2_norm_sq();
        if norm == 0.0 {
            return Err(SlabError::param("corpus members must be nonzero"));
        }
        let out = maximal_average_spectral(g, simplex, j, grid, outer_level)?;
        ratios.push(out.l2_norm_sq() / norm);
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(MaximalReport {
        d,
        j,
        lambda0: grid.lambda0,
        lambda1: grid.lambda1,
        ratios,
        max_ratio,
        in_bounded_range: d >= j + 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareFunctionRow {
    pub r: f64,
    pub i: f64,
    pub i_tilde: f64,
}

/// `I(ξ)` and `Ĩ(ξ)` as functions of `R = |ξ|`.
///
/// The outer frames are the rotations of a fixed frame under Haar measure,
/// so `I(ξ) = ∫_{S^{d-1}} |dσ̂_can(R u)|² du` for the canonical frame, and
/// the integrand depends on `u` only through its first `j − 1`
/// coordinates. That leaves at most a two-dimensional integral, done by
/// composite Gauss rules sized to the oscillation `R · radius`.
pub fn square_functions(simplex: &Simplex, j: usize, radii: &[f64], level: u32) -> Result<Vec<SquareFunctionRow>> {
    let d = simplex.d();
    if j == 0 || j > simplex.k() {
        return Err(SlabError::param(format!("need 1 ≤ j ≤ k = {}, got {j}", simplex.k())));
    }
    if level == 0 {
        return Err(SlabError::param("level must be ≥ 1"));
    }
    let cs = config_sphere(simplex, j, &Frame::canonical(simplex, j - 1)?)?;
    let m = cs.intrinsic_dim();
    let r = cs.radius();
    let c = cs.center().to_vec();
    let p = j - 1;
    let (gx, gw) = gauss_legendre(8);
    let density = 2f64.powi(level as i32 - 3);
    let integrand = |radius: f64, perp: f64, along: f64| -> (f64, f64) {
        let t = 2.0 * PI * r * radius * perp;
        let (b, db) = sphere_profile(m, t);
        (b * b, (2.0 * PI * along).powi(2) * b * b + (t * db).powi(2))
    };
    radii
        .iter()
        .map(|&radius| {
            if radius < 0.0 {
                return Err(SlabError::param("radii must be non-negative"));
            }
            let panels = ((density * (1.0 + 2.0 * PI * r * radius)).ceil() as usize).max(4);
            let (i, it) = match p {
                0 => integrand(radius, 1.0, 0.0),
                1 => {
                    // u1 = cos θ with density sin^{d-2} θ on [0, π]
                    let mut acc = (0.0, 0.0, 0.0);
                    let h = PI / panels as f64;
                    for q in 0..panels {
                        for (x, w) in gx.iter().zip(&gw) {
                            let th = (q as f64 + 0.5 * (x + 1.0)) * h;
                            let wt = w * th.sin().powi(d as i32 - 2);
                            let (a, b) = integrand(radius, th.sin(), c[0] * radius * th.cos());
                            acc.0 += wt * a;
                            acc.1 += wt * b;
                            acc.2 += wt;
                        }
                    }
                    (acc.0 / acc.2, acc.1 / acc.2)
                }
                2 => {
                    // (u1, u2) = sin φ (cos α, sin α) with density
                    // cos^{d-3} φ sin φ on [0, π/2] × [0, 2π)
                    let na = 8;
                    let mut acc = (0.0, 0.0, 0.0);
                    let h = 0.5 * PI / panels as f64;
                    for q in 0..panels {
                        for (x, w) in gx.iter().zip(&gw) {
                            let ph = (q as f64 + 0.5 * (x + 1.0)) * h;
                            let wt = w * ph.cos().powi(d as i32 - 3) * ph.sin();
                            for k in 0..na {
                                let al = 2.0 * PI * k as f64 / na as f64;
                                let along = radius * ph.sin() * (c[0] * al.cos() + c[1] * al.sin());
                                let (a, b) = integrand(radius, ph.cos(), along);
                                acc.0 += wt * a;
                                acc.1 += wt * b;
                                acc.2 += wt;
                            }
                        }
                    }
                    (acc.0 / acc.2, acc.1 / acc.2)
                }
                _ => return Err(SlabError::param("square functions are implemented for j ≤ 3")),
            };
            Ok(SquareFunctionRow { r: radius, i, i_tilde: it })
        })
        .collect()
}

/// Direct outer-frame quadrature of `|dσ̂(ξ)|²` and `|ξ·∇dσ̂(ξ)|²` at a
/// given frequency vector. Slow; used to cross-check [`square_functions`].
pub fn square_functions_nested(simplex: &Simplex, j: usize, xi: &[f64], level: u32) -> Result<(f64, f64)> {
    let frames = outer_frames(simplex, j, level)?;
    let mut i = 0.0;
    let mut it = 0.0;
    for (w, cs) in &frames {
        i += w * sphere_ft(cs, xi).norm_sqr();
        it += w * sphere_ft_radial_derivative(cs, xi).norm_sqr();
    }
    Ok((i, it))
}

/// Running maxima of `Ĩ` over consecutive blocks of radii.
pub fn block_maxima(rows: &[SquareFunctionRow], edges: &[f64]) -> Vec<f64> {
    edges
        .windows(2)
        .map(|w| rows.iter().filter(|r| r.r >= w[0] && r.r < w[1]).map(|r| r.i_tilde).fold(0.0, f64::max))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm61Row {
    pub l: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm61Report {
    pub d: usize,
    pub j: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub c61: f64,
    pub slope: f64,
    pub rows: Vec<Thm61Row>,
    pub pass: bool,
}

impl Thm61Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,d,L,lambda0,lambda1,ratio,bound,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.j, self.d, r.l, self.lambda0, self.lambda1, r.ratio, r.bound, r.pass
            );
        }
        out
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// For each `L`, the corpus maximum of `‖M_L f‖² / ‖f‖²`, compared with
/// `C_61 (L/λ0)^{1/3}` where `C_61` is the ratio at the largest `L`.
pub fn thm61_scaling(
    corpus: &[GridField],
    simplex: &Simplex,
    j: usize,
    grid: &LambdaGrid,
    l_sweep: &[f64],
    outer_level: u32,
) -> Result<Thm61Report> {
    if l_sweep.is_empty() || l_sweep.iter().any(|&l| !(l > 0.0 && l <= grid.lambda0 * (1.0 + 1e-12))) {
        return Err(SlabError::param("L-sweep must be a nonempty subset of (0, λ0]"));
    }
    let mollifier = Mollifier::shared(simplex.d())?;
    let mut ratios = vec![0.0f64; l_sweep.len()];
    for f in corpus {
        check_spectral_reach(f, simplex, grid)?;
        let norm = f.l2_norm_sq();
        if norm == 0.0 {
            return Err(SlabError::param("corpus members must be nonzero"));
        }
        let avg = SpectralAverager::new(f, simplex, j, outer_level)?;
        for (slot, &l) in ratios.iter_mut().zip(l_sweep) {
            let m = |r: f64| 1.0 - mollifier.hat(l * r);
            let out = avg.maximal(grid, Some(&m));
            *slot = slot.max(out.l2_norm_sq() / norm);
        }
    }
    let top = l_sweep.iter().enumerate().fold(0, |best, (i, &l)| if l > l_sweep[best] { i } else { best });
    let c61 = ratios[top] / (l_sweep[top] / grid.lambda0).powf(1.0 / 3.0);
    let rows: Vec<Thm61Row> = l_sweep
        .iter()
        .zip(&ratios)
        .map(|(&l, &ratio)| {
            let bound = c61 * (l / grid.lambda0).powf(1.0 / 3.0);
            Thm61Row { l, ratio, bound, pass: ratio <= bound * (1.0 + 1e-12) }
        })
        .collect();
    let xs: Vec<f64> = l_sweep.iter().map(|l| l / grid.lambda0).collect();
    let slope = if ratios.iter().all(|&r| r > 0.0) && l_sweep.len() > 1 { loglog_slope(&xs, &ratios) } else { f64::NAN };
    let pass = rows.iter().all(|r| r.pass);
    Ok(Thm61Report { d: simplex.d(), j, lambda0: grid.lambda0, lambda1: grid.lambda1, c61, slope, rows, pass })
}

/// `Σ_x |f|² h^d`; shorthand used by the experiment drivers.
pub fn energy(values: &[f64], cell_volume: f64) -> f64 {
    cell_volume * blocked_sum(values.len(), |i| values[i] * values[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn lambda_grid_shape() {
        let g = LambdaGrid::new(1.0, 16.0, 8).unwrap();
        assert_eq!(g.values[0], 1.0);
        assert!(*g.values.last().unwrap() >= 16.0 * (1.0 - 1e-12));
        for w in g.values.windows(2) {
            assert!((w[1] / w[0] - 1.125).abs() < 1e-12);
        }
        let c = LambdaGrid::with_count(2.0, 32.0, 16).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(c.values[15], 32.0);
        assert!(LambdaGrid::new(2.0, 1.0, 8).is_err());
    }

    #[test]
    fn square_functions_at_origin() {
        for (k, d) in [(1, 3), (2, 4), (3, 4), (1, 2)] {
            let s = Simplex::regular(k, d).unwrap();
            for j in 1..=k {
                let rows = square_functions(&s, j, &[0.0], 6).unwrap();
                assert!((rows[0].i - 1.0).abs() < 1e-14);
                assert!(rows[0].i_tilde.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reduced_square_functions_match_nested_quadrature() {
        let s = Simplex::regular(3, 4).unwrap();
        for j in 1..=3 {
            let xi = [0.21, -0.34, 0.12, 0.4];
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let reduced = square_functions(&s, j, &[r], 6).unwrap()[0];
            let level = if j == 3 { 3 } else { 4 };
            let (i, it) = square_functions_nested(&s, j, &xi, level).unwrap();
            assert!((reduced.i - i).abs() < 1e-6, "j={j}: {} vs {i}", reduced.i);
            assert!((reduced.i_tilde - it).abs() < 1e-5 * it.max(1.0), "j={j}: {} vs {it}", reduced.i_tilde);
        }
    }

    #[test]
    fn gaussian_sphere_average_oracle() {
        // spherical mean of exp(-|x|²/2s²) over the sphere of radius ρ about x
        let s2: f64 = 9.0;
        let exact = |x: &[f64], rho: f64| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            s2 / (2.0 * r * rho) * ((-(r - rho).powi(2) / (2.0 * s2)).exp() - (-(r + rho).powi(2) / (2.0 * s2)).exp())
        };
        let spec = GridSpec::new(3, 32.0, 32, 2).unwrap();
        let g = GridField::from_fn(spec, |x| (-x.iter().map(|c| c * c).sum::<f64>() / (2.0 * s2)).exp());
        let s = Simplex::standard(1, 3).unwrap();
        let grid = LambdaGrid::single(3.0);
        let spectral = maximal_average_spectral(&g, &s, 1, &grid, 3).unwrap();
        let xs = vec![vec![0.5, -0.5, 1.5], vec![2.5, 0.5, -3.5]];
        let quad = maximal_average(&g, &s, 1, &grid, 7, &xs).unwrap();
        for (x, q) in xs.iter().zip(quad) {
            let e = exact(x, 3.0);
            let v = spectral.values()[spectral.spec().flat_index(&x.iter().map(|c| (c + 31.5) as usize).collect::<Vec<_>>())];
            assert!((v - e).abs() < 1e-9, "spectral {v} vs {e}");
            assert!((q - e).abs() < 3e-2 * e, "quadrature {q} vs {e}");
        }
    }
}
