//! Cell-centred sampling of functions on the box `B_N = [-N/2, N/2]^d`,
//! zero-padded physical Fourier transforms, and annulus spectral masses.
//!
//! Sample `i` along an axis sits at `-N/2 + (i + 1/2) h` with `h = N / n`.
//! The transform embeds the samples in the centre of a box of side
//! `pad · N` and approximates `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx` at the
//! frequencies `ξ ∈ Z^d / (pad · N)` inside the Nyquist cube.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlabError};
use crate::numeric::blocked_sum;

/// Upper bound on the number of padded cells a transform may allocate.
pub const MAX_PADDED_CELLS: usize = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    /// Physical side length `N` of the box.
    pub side: f64,
    /// Cells per axis.
    pub n: usize,
    /// Zero-padding factor used by the Fourier transform.
    pub pad: usize,
}

impl GridSpec {
    pub fn new(d: usize, side: f64, n: usize, pad: usize) -> Result<Self> {
        let spec = GridSpec { d, side, n, pad };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.d) {
            return Err(SlabError::Dimension(format!("grid dimension must be 2..=4, got {}", self.d)));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(SlabError::param(format!("box side must be positive, got {}", self.side)));
        }
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(SlabError::param(format!("cells per axis must be a power of two ≥ 2, got {}", self.n)));
        }
        if self.pad == 0 || !self.pad.is_power_of_two() {
            return Err(SlabError::param(format!("pad must be a power of two ≥ 1, got {}", self.pad)));
        }
        if self.d == 4 && self.n > 32 {
            return Err(SlabError::param("d = 4 grids are limited to n ≤ 32 per axis"));
        }
        let padded = (self.n * self.pad).checked_pow(self.d as u32);
        if padded.is_none_or(|c| c > MAX_PADDED_CELLS) {
            return Err(SlabError::param(format!(
                "padded grid ({}·{})^{} exceeds the memory budget",
                self.n, self.pad, self.d
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn box_volume(&self) -> f64 {
        self.side.powi(self.d as i32)
    }

    pub fn padded_n(&self) -> usize {
        self.n * self.pad
    }

    pub fn padded_count(&self) -> usize {
        self.padded_n().pow(self.d as u32)
    }

    /// Half-width of the padded domain, `pad · N / 2`.
    pub fn padded_half_width(&self) -> f64 {
        0.5 * self.pad as f64 * self.side
    }

    /// Spacing of the frequency lattice, `1 / (pad · N)`.
    pub fn frequency_spacing(&self) -> f64 {
        1.0 / (self.pad as f64 * self.side)
    }

    pub fn frequency_cell_volume(&self) -> f64 {
        self.frequency_spacing().powi(self.d as i32)
    }

    /// Per-axis Nyquist frequency `1 / (2h)`.
    pub fn axis_nyquist(&self) -> f64 {
        0.5 / self.spacing()
    }

    /// Radius of the smallest ball containing every frequency sample,
    /// `sqrt(d) / (2h)`.
    pub fn nyquist_radius(&self) -> f64 {
        (self.d as f64).sqrt() * self.axis_nyquist()
    }

    pub fn axis_center(&self, i: usize) -> f64 {
        -0.5 * self.side + (i as f64 + 0.5) * self.spacing()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for a in (0..self.d).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().map(|i| self.axis_center(i)).collect()
    }

    /// Grid covering the whole padded domain with the same spacing.
    pub fn padded_spec(&self) -> GridSpec {
        GridSpec { d: self.d, side: self.side * self.pad as f64, n: self.n * self.pad, pad: 1 }
    }
}

/// Real samples at the cell centres of a [`GridSpec`], row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.cell_count() {
            return Err(SlabError::param(format!(
                "expected {} samples, got {}",
                spec.cell_count(),
                values.len()
            )));
        }
        Ok(GridField { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridField { spec, values: vec![0.0; spec.cell_count()] }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        GridField { spec, values: vec![c; spec.cell_count()] }
    }

    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = (0..spec.cell_count())
            .into_par_iter()
            .map(|i| f(&spec.cell_center(i)))
            .collect();
        GridField { spec, values }
    }

    /// Indicator of the cells whose centre satisfies `member`.
    pub fn indicator_from_fn<F>(spec: GridSpec, member: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Sync,
    {
        Self::from_fn(spec, |x| if member(x) { 1.0 } else { 0.0 })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// `h^d Σ values`; the Lebesgue measure `|A|` for an indicator.
    pub fn measure(&self) -> f64 {
        self.spec.cell_volume() * blocked_sum(self.values.len(), |i| self.values[i])
    }

    /// `∫ |f|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.spec.cell_volume() * blocked_sum(self.values.len(), |i| self.values[i] * self.values[i])
    }

    /// `∫ f g` on a common grid.
    pub fn inner(&self, other: &GridField) -> f64 {
        assert_eq!(self.spec, other.spec, "inner product needs matching grids");
        self.spec.cell_volume() * blocked_sum(self.values.len(), |i| self.values[i] * other.values[i])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        assert_eq!(self.spec, other.spec, "pointwise operation needs matching grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridField { spec: self.spec, values }
    }

    /// Zero-embeds the field into the padded domain (a `pad = 1` grid of
    /// side `pad · N` with the same spacing).
    pub fn expand(&self) -> GridField {
        let big = self.spec.padded_spec();
        let offset = (big.n - self.spec.n) / 2;
        let mut values = vec![0.0; big.cell_count()];
        for (flat, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let idx: Vec<usize> = self.spec.multi_index(flat).into_iter().map(|i| i + offset).collect();
                values[big.flat_index(&idx)] = v;
            }
        }
        GridField { spec: big, values }
    }

    /// Restricts a field defined on a larger centred grid with equal spacing.
    pub fn crop(&self, target: GridSpec) -> Result<GridField> {
        if (target.spacing() - self.spec.spacing()).abs() > 1e-12 * self.spec.spacing()
            || target.n > self.spec.n
            || !(self.spec.n - target.n).is_multiple_of(2)
        {
            return Err(SlabError::param("crop target must be a centred sub-grid with equal spacing"));
        }
        let offset = (self.spec.n - target.n) / 2;
        let values = (0..target.cell_count())
            .map(|flat| {
                let idx: Vec<usize> = target.multi_index(flat).into_iter().map(|i| i + offset).collect();
                self.values[self.spec.flat_index(&idx)]
            })
            .collect();
        Ok(GridField { spec: target, values })
    }

    /// Multilinear interpolation of the cell-centred samples; the field is
    /// taken to vanish outside `B_N`. Errors with `OutOfBox` outside the
    /// padded domain.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        let hw = self.spec.padded_half_width();
        if x.len() != self.spec.d || x.iter().any(|c| !(c.abs() <= hw * (1.0 + 1e-12))) {
            return Err(SlabError::OutOfBox { point: x.to_vec(), half_width: hw });
        }
        Ok(self.interpolate_unchecked(x))
    }

    /// [`interpolate`](Self::interpolate) that returns 0 outside the padded
    /// domain instead of an error.
    pub fn interpolate_or_zero(&self, x: &[f64]) -> f64 {
        self.interpolate(x).unwrap_or(0.0)
    }

    pub(crate) fn interpolate_unchecked(&self, x: &[f64]) -> f64 {
        let d = self.spec.d;
        let n = self.spec.n as isize;
        let inv_h = 1.0 / self.spec.spacing();
        let half = 0.5 * self.spec.side;
        let mut base = [0isize; 4];
        let mut frac = [0.0f64; 4];
        for a in 0..d {
            let u = (x[a] + half) * inv_h - 0.5;
            let f = u.floor();
            base[a] = f as isize;
            frac[a] = u - f;
        }
        let mut acc = 0.0;
        'corner: for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for a in 0..d {
                let bit = (corner >> (d - 1 - a)) & 1;
                let i = base[a] + bit as isize;
                if i < 0 || i >= n {
                    continue 'corner;
                }
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * n as usize + i as usize;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    pub fn forward_transform(&self) -> Spectrum {
        let spec = self.spec;
        let m = spec.padded_n();
        let d = spec.d;
        let mut data = vec![Complex64::new(0.0, 0.0); spec.padded_count()];
        let offset = (m - spec.n) / 2;
        for (flat, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let idx = spec.multi_index(flat);
                let big = idx.iter().fold(0, |acc, &i| acc * m + i + offset);
                data[big] = Complex64::new(v, 0.0);
            }
        }
        fft_nd(&mut data, m, d, false);
        let phase = axis_phases(&spec, false);
        let scale = spec.cell_volume();
        data.par_chunks_mut(SPECTRUM_CHUNK).enumerate().for_each(|(chunk, slice)| {
            for (off, c) in slice.iter_mut().enumerate() {
                let mut rest = chunk * SPECTRUM_CHUNK + off;
                let mut ph = Complex64::new(scale, 0.0);
                for _ in 0..d {
                    ph *= phase[rest % m];
                    rest /= m;
                }
                *c *= ph;
            }
        });
        Spectrum { spec, coeffs: data }
    }

    pub fn to_set_bytes(&self) -> Result<Vec<u8>> {
        if !self.is_indicator() {
            return Err(SlabError::param("only indicator fields can be written as set files"));
        }
        let mut out = Vec::with_capacity(24 + self.values.len());
        out.extend_from_slice(SET_MAGIC);
        out.extend_from_slice(&SET_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.spec.d as u32).to_le_bytes());
        out.extend_from_slice(&(self.spec.n as u32).to_le_bytes());
        out.extend_from_slice(&self.spec.side.to_le_bytes());
        out.extend(self.values.iter().map(|&v| v as u8));
        Ok(out)
    }

    pub fn write_set_file(&self, path: &Path) -> Result<()> {
        let bytes = self.to_set_bytes()?;
        fs::File::create(path)?.write_all(&bytes)?;
        Ok(())
    }

    pub fn to_set_json(&self) -> Result<String> {
        if !self.is_indicator() {
            return Err(SlabError::param("only indicator fields can be written as set files"));
        }
        let file = SetJson {
            d: self.spec.d,
            n: self.spec.n,
            side: self.spec.side,
            cells: self.values.iter().map(|&v| v as u8).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Reads a set file in either the binary or the JSON layout. The grid is
    /// given `pad` as its transform padding.
    pub fn read_set_file(path: &Path, pad: usize) -> Result<GridField> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::parse_set(&bytes, pad).map_err(|e| match e {
            SlabError::SetFormat { message, .. } => SlabError::SetFormat { path: path.to_path_buf(), message },
            other => other,
        })
    }

    pub fn parse_set(bytes: &[u8], pad: usize) -> Result<GridField> {
        let bad = |message: String| SlabError::SetFormat { path: Default::default(), message };
        let (d, n, side, cells): (usize, usize, f64, Vec<u8>) = if bytes.starts_with(SET_MAGIC) {
            if bytes.len() < 24 {
                return Err(bad("truncated header".into()));
            }
            let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
            let version = u32_at(4);
            if version != SET_VERSION {
                return Err(bad(format!("unsupported version {version}")));
            }
            let d = u32_at(8) as usize;
            let n = u32_at(12) as usize;
            let side = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
            (d, n, side, bytes[24..].to_vec())
        } else {
            let file: SetJson = serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
            (file.d, file.n, file.side, file.cells)
        };
        let spec = GridSpec::new(d, side, n, pad)?;
        if cells.len() != spec.cell_count() {
            return Err(bad(format!("expected {} cells, found {}", spec.cell_count(), cells.len())));
        }
        if cells.iter().any(|&c| c > 1) {
            return Err(bad("cells must be 0 or 1".into()));
        }
        Ok(GridField { spec, values: cells.into_iter().map(f64::from).collect() })
    }
}

const SET_MAGIC: &[u8; 4] = b"SLAB";
const SET_VERSION: u32 = 1;
const SPECTRUM_CHUNK: usize = 1 << 14;

#[derive(Debug, Serialize, Deserialize)]
struct SetJson {
    d: usize,
    n: usize,
    #[serde(rename = "N")]
    side: f64,
    cells: Vec<u8>,
}

/// Physical Fourier coefficients on the padded frequency lattice, stored in
/// FFT order (index `q` maps to signed frequency `q` or `q − M`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn from_parts(spec: GridSpec, coeffs: Vec<Complex64>) -> Spectrum {
        debug_assert_eq!(coeffs.len(), spec.padded_count());
        Spectrum { spec, coeffs }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn signed(&self, q: usize) -> i64 {
        let m = self.spec.padded_n();
        if q < m / 2 {
            q as i64
        } else {
            q as i64 - m as i64
        }
    }

    /// Signed integer lattice coordinates of a flat index.
    pub fn lattice_index(&self, mut flat: usize) -> Vec<i64> {
        let m = self.spec.padded_n();
        let mut out = vec![0; self.spec.d];
        for a in (0..self.spec.d).rev() {
            out[a] = self.signed(flat % m);
            flat /= m;
        }
        out
    }

    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let dxi = self.spec.frequency_spacing();
        self.lattice_index(flat).into_iter().map(|q| q as f64 * dxi).collect()
    }

    /// Flat index of a signed lattice point, if it lies on the grid.
    pub fn flat_of(&self, lattice: &[i64]) -> Option<usize> {
        let m = self.spec.padded_n() as i64;
        let mut flat = 0usize;
        for &q in lattice {
            if q < -m / 2 || q >= m / 2 {
                return None;
            }
            flat = flat * m as usize + q.rem_euclid(m) as usize;
        }
        Some(flat)
    }

    pub fn frequency_norm(&self, flat: usize) -> f64 {
        let m = self.spec.padded_n();
        let mut rest = flat;
        let mut s = 0.0;
        for _ in 0..self.spec.d {
            let q = self.signed(rest % m) as f64;
            s += q * q;
            rest /= m;
        }
        s.sqrt() * self.spec.frequency_spacing()
    }

    /// `Σ |f̂|² Δξ^d`, equal to `∫|f|²` by the discrete Plancherel identity.
    pub fn energy(&self) -> f64 {
        self.spec.frequency_cell_volume() * blocked_sum(self.coeffs.len(), |i| self.coeffs[i].norm_sqr())
    }

    fn check_annulus(&self, lower: f64, upper: f64) -> Result<()> {
        if !(lower >= 0.0 && lower < upper) {
            return Err(SlabError::param(format!("annulus needs 0 ≤ lower < upper, got [{lower}, {upper}]")));
        }
        let nyq = self.spec.nyquist_radius();
        if upper > nyq * (1.0 + 1e-12) {
            return Err(SlabError::Range { upper, nyquist: nyq });
        }
        Ok(())
    }

    /// `∫_{lower ≤ |ξ| ≤ upper} |f̂(ξ)|² dξ` by the midpoint rule over
    /// frequency cells whose centres lie in the closed annulus.
    pub fn annulus_mass(&self, lower: f64, upper: f64) -> Result<f64> {
        self.check_annulus(lower, upper)?;
        let vol = self.spec.frequency_cell_volume();
        Ok(vol
            * blocked_sum(self.coeffs.len(), |i| {
                let r = self.frequency_norm(i);
                if r >= lower && r <= upper {
                    self.coeffs[i].norm_sqr()
                } else {
                    0.0
                }
            }))
    }

    /// Masses of several annuli treated as half-open `[lower, upper)`; each
    /// frequency sample is credited to the first annulus containing it, so
    /// the masses partition part of the total energy.
    pub fn annulus_masses(&self, bands: &[(f64, f64)]) -> Result<Vec<f64>> {
        for &(lo, hi) in bands {
            self.check_annulus(lo, hi)?;
        }
        let vol = self.spec.frequency_cell_volume();
        Ok((0..bands.len())
            .map(|b| {
                vol * blocked_sum(self.coeffs.len(), |i| {
                    let r = self.frequency_norm(i);
                    let owner = bands.iter().position(|&(lo, hi)| r >= lo && r < hi);
                    if owner == Some(b) {
                        self.coeffs[i].norm_sqr()
                    } else {
                        0.0
                    }
                })
            })
            .collect())
    }

    /// Multiplies every coefficient by `m(|ξ|)`.
    pub fn scale_radial(&self, m: impl Fn(f64) -> f64 + Sync) -> Spectrum {
        let coeffs = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(i, c)| c * m(self.frequency_norm(i)))
            .collect();
        Spectrum { spec: self.spec, coeffs }
    }

    /// Multiplies every coefficient by `m(ξ)`.
    pub fn scale_by(&self, m: impl Fn(&[f64]) -> Complex64 + Sync) -> Spectrum {
        let coeffs = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(i, c)| c * m(&self.frequency(i)))
            .collect();
        Spectrum { spec: self.spec, coeffs }
    }

    fn inverse_padded_values(&self) -> Vec<Complex64> {
        let spec = self.spec;
        let m = spec.padded_n();
        let d = spec.d;
        let phase = axis_phases(&spec, true);
        let scale = 1.0 / (spec.cell_volume() * spec.padded_count() as f64);
        let mut data = self.coeffs.clone();
        data.par_chunks_mut(SPECTRUM_CHUNK).enumerate().for_each(|(chunk, slice)| {
            for (off, c) in slice.iter_mut().enumerate() {
                let mut rest = chunk * SPECTRUM_CHUNK + off;
                let mut ph = Complex64::new(scale, 0.0);
                for _ in 0..d {
                    ph *= phase[rest % m];
                    rest /= m;
                }
                *c *= ph;
            }
        });
        fft_nd(&mut data, m, d, true);
        data
    }

    /// Real part of the inverse transform on the padded domain, as a
    /// `pad = 1` grid of side `pad · N`.
    pub fn inverse_full(&self) -> GridField {
        let data = self.inverse_padded_values();
        GridField { spec: self.spec.padded_spec(), values: data.into_iter().map(|c| c.re).collect() }
    }

    /// Real part of the inverse transform restricted to the original grid.
    pub fn inverse(&self) -> GridField {
        let cropped = self
            .inverse_full()
            .crop(GridSpec { pad: 1, ..self.spec })
            .expect("centred crop of a padded grid");
        GridField { spec: self.spec, values: cropped.values }
    }

    /// Largest imaginary part of the inverse transform on the padded domain.
    pub fn inverse_max_imag(&self) -> f64 {
        self.inverse_padded_values().iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

/// `e^{∓2πi x0 ξ_q}` for each axis index `q`, where `x0` is the first
/// padded cell centre.
fn axis_phases(spec: &GridSpec, inverse: bool) -> Vec<Complex64> {
    let m = spec.padded_n();
    let h = spec.spacing();
    let x0 = -0.5 * m as f64 * h + 0.5 * h;
    let dxi = spec.frequency_spacing();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..m)
        .map(|q| {
            let qs = if q < m / 2 { q as f64 } else { q as f64 - m as f64 };
            let arg = sign * 2.0 * std::f64::consts::PI * x0 * qs * dxi;
            Complex64::from_polar(1.0, arg)
        })
        .collect()
}

/// In-place d-dimensional FFT on a cube of side `m`, row-major.
fn fft_nd(data: &mut [Complex64], m: usize, d: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan: Arc<dyn Fft<f64>> =
        if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let block = m * stride;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); m];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            if stride == 1 {
                plan.process_with_scratch(chunk, &mut scratch);
                return;
            }
            for inner in 0..stride {
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[k * stride + inner];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    chunk[k * stride + inner] = *v;
                }
            }
        });
    }
}

/// Direct (non-FFT) evaluation of `f̂(ξ) = h^d Σ_x f(x) e^{-2πi x·ξ}`.
pub fn direct_transform(field: &GridField, xi: &[f64]) -> Complex64 {
    let spec = field.spec();
    let h = spec.spacing();
    let terms: Vec<(f64, f64)> = (0..spec.cell_count())
        .into_par_iter()
        .with_min_len(1024)
        .filter(|&i| field.values()[i] != 0.0)
        .map(|i| {
            let x = spec.cell_center(i);
            let arg = -2.0 * std::f64::consts::PI * x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
            let v = field.values()[i];
            (v * arg.cos(), v * arg.sin())
        })
        .collect();
    let re: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let im: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let vol = h.powi(spec.d as i32);
    Complex64::new(
        vol * crate::numeric::pairwise_sum(&re),
        vol * crate::numeric::pairwise_sum(&im),
    )
}

/// Annulus mass evaluated by direct Fourier sums over the frequency lattice
/// points of the shell only. Independent of the FFT path; intended for
/// small grids and for d = 4 where padded transforms are expensive.
pub fn annulus_mass_direct(field: &GridField, lower: f64, upper: f64) -> Result<f64> {
    let spec = *field.spec();
    if !(lower >= 0.0 && lower < upper) {
        return Err(SlabError::param(format!("annulus needs 0 ≤ lower < upper, got [{lower}, {upper}]")));
    }
    if upper > spec.nyquist_radius() * (1.0 + 1e-12) {
        return Err(SlabError::Range { upper, nyquist: spec.nyquist_radius() });
    }
    let dxi = spec.frequency_spacing();
    let m = spec.padded_n() as i64;
    let reach = ((upper / dxi).floor() as i64).min(m / 2);
    let mut points = Vec::new();
    let mut idx = vec![-reach; spec.d];
    loop {
        let r = idx.iter().map(|&q| (q as f64).powi(2)).sum::<f64>().sqrt() * dxi;
        if r >= lower && r <= upper && idx.iter().all(|&q| q >= -m / 2 && q < m / 2) {
            points.push(idx.iter().map(|&q| q as f64 * dxi).collect::<Vec<f64>>());
        }
        let mut a = spec.d;
        loop {
            if a == 0 {
                let masses: Vec<f64> = points.iter().map(|xi| direct_transform(field, xi).norm_sqr()).collect();
                return Ok(spec.frequency_cell_volume() * crate::numeric::pairwise_sum(&masses));
            }
            a -= 1;
            if idx[a] < reach {
                idx[a] += 1;
                break;
            }
            idx[a] = -reach;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_indicator(spec: GridSpec, density: f64, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..spec.cell_count()).map(|_| if rng.random::<f64>() < density { 1.0 } else { 0.0 }).collect();
        GridField::new(spec, values).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 8.0, 16, 2).is_err());
        assert!(GridSpec::new(2, 8.0, 12, 2).is_err());
        assert!(GridSpec::new(4, 8.0, 64, 1).is_err());
        assert!(GridSpec::new(3, -1.0, 16, 2).is_err());
        assert!(GridSpec::new(2, 8.0, 16, 3).is_err());
        let s = GridSpec::new(3, 8.0, 16, 2).unwrap();
        assert_eq!(s.spacing(), 0.5);
        assert_eq!(s.padded_n(), 32);
        assert_eq!(s.frequency_spacing(), 1.0 / 16.0);
    }

    #[test]
    fn measure_of_full_and_empty_box() {
        for d in 2..=4 {
            for n in [4usize, 16] {
                let spec = GridSpec::new(d, 8.0, n, 1).unwrap();
                let full = GridField::constant(spec, 1.0);
                assert!((full.measure() - 8f64.powi(d as i32)).abs() < 1e-9);
                assert_eq!(GridField::zeros(spec).measure(), 0.0);
            }
        }
    }

    #[test]
    fn random_half_density_measure_is_binomial() {
        let spec = GridSpec::new(2, 8.0, 128, 1).unwrap();
        let f = random_indicator(spec, 0.5, 3);
        // h² · Binomial(n², 1/2): mean 32, σ = h² · sqrt(n²/4)
        let sigma = spec.cell_volume() * (spec.cell_count() as f64 * 0.25).sqrt();
        assert!((f.measure() - 32.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn constant_field_transform_on_periodic_grid() {
        let spec = GridSpec::new(2, 8.0, 16, 1).unwrap();
        let s = GridField::constant(spec, 2.5).forward_transform();
        for (i, c) in s.coeffs().iter().enumerate() {
            if i == 0 {
                assert!((c.re - 2.5 * 64.0).abs() < 1e-10 && c.im.abs() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10, "nonzero at {:?}", s.frequency(i));
            }
        }
    }

    #[test]
    fn shifted_delta_has_constant_modulus() {
        let spec = GridSpec::new(3, 4.0, 8, 2).unwrap();
        let mut f = GridField::zeros(spec);
        let flat = spec.flat_index(&[2, 5, 1]);
        f.values_mut()[flat] = 1.0;
        let s = f.forward_transform();
        for c in s.coeffs() {
            assert!((c.norm() - spec.cell_volume()).abs() < 1e-14);
        }
    }

    #[test]
    fn transform_matches_direct_sum() {
        let spec = GridSpec::new(2, 6.0, 8, 2).unwrap();
        let f = random_indicator(spec, 0.4, 9);
        let s = f.forward_transform();
        for i in [0usize, 1, 7, 33, 100, 255] {
            let direct = direct_transform(&f, &s.frequency(i));
            assert!((direct - s.coeffs()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_roundtrip_and_hermitian_symmetry() {
        let spec = GridSpec::new(3, 5.0, 16, 2).unwrap();
        let f = GridField::from_fn(spec, |x| (x[0] * 1.3).sin() + x[1] * x[2] * 0.1);
        let s = f.forward_transform();
        let back = s.inverse();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        for i in (0..s.len()).step_by(37) {
            let q = s.lattice_index(i);
            let neg: Vec<i64> = q.iter().map(|v| -v).collect();
            if let Some(j) = s.flat_of(&neg) {
                assert!((s.coeffs()[j] - s.coeffs()[i].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_on_random_indicators() {
        for (d, n) in [(2usize, 64usize), (2, 128), (3, 32), (3, 64)] {
            let spec = GridSpec::new(d, 10.0, n, 2).unwrap();
            let f = random_indicator(spec, 0.3, n as u64);
            let s = f.forward_transform();
            let rel = (s.energy() - f.l2_norm_sq()).abs() / f.l2_norm_sq();
            assert!(rel < 1e-6, "d={d} n={n} rel={rel:e}");
        }
    }

    #[test]
    fn annulus_mass_edge_cases() {
        let spec = GridSpec::new(2, 8.0, 32, 2).unwrap();
        let c = GridField::constant(spec, 1.0).forward_transform();
        // zero-padded constant is no longer a point mass; use the periodic grid
        let periodic = GridField::constant(GridSpec::new(2, 8.0, 32, 1).unwrap(), 1.0).forward_transform();
        assert!(periodic.annulus_mass(0.05, periodic.spec().nyquist_radius()).unwrap() < 1e-20);
        let total = c.annulus_mass(0.0, spec.nyquist_radius()).unwrap();
        assert!((total - c.energy()).abs() < 1e-9 * c.energy());
        assert!(matches!(c.annulus_mass(0.0, spec.nyquist_radius() * 1.01), Err(SlabError::Range { .. })));
        assert!(c.annulus_mass(0.5, 0.5).is_err());
    }

    #[test]
    fn annulus_mass_is_additive_and_matches_direct_sums() {
        let spec = GridSpec::new(2, 8.0, 16, 2).unwrap();
        let f = random_indicator(spec, 0.5, 4);
        let s = f.forward_transform();
        let a = s.annulus_mass(0.1, 0.4).unwrap();
        let parts = s.annulus_masses(&[(0.1, 0.25), (0.25, 0.4)]).unwrap();
        let closed_top = s.annulus_mass(0.4, 0.4 + 1e-9).unwrap();
        assert!((a - parts[0] - parts[1] - closed_top).abs() < 1e-12 * a.max(1.0));
        assert!(s.annulus_mass(0.1, 0.5).unwrap() >= a);
        let direct = annulus_mass_direct(&f, 0.1, 0.4).unwrap();
        assert!((direct - a).abs() < 1e-10 * a);
    }

    #[test]
    fn interpolation_properties() {
        let spec = GridSpec::new(2, 4.0, 8, 2).unwrap();
        let ramp = GridField::from_fn(spec, |x| 0.3 * x[0] - 0.7 * x[1] + 1.0);
        let c = spec.cell_center(spec.flat_index(&[3, 4]));
        assert!((ramp.interpolate(&c).unwrap() - ramp.values()[spec.flat_index(&[3, 4])]).abs() < 1e-14);
        let a = spec.cell_center(spec.flat_index(&[3, 4]));
        let b = spec.cell_center(spec.flat_index(&[4, 4]));
        let mid = [(a[0] + b[0]) / 2.0, a[1]];
        let want = 0.5 * (ramp.values()[spec.flat_index(&[3, 4])] + ramp.values()[spec.flat_index(&[4, 4])]);
        assert!((ramp.interpolate(&mid).unwrap() - want).abs() < 1e-14);
        // affine inside any interior cell
        let p = [0.13, -0.41];
        assert!((ramp.interpolate(&p).unwrap() - (0.3 * p[0] - 0.7 * p[1] + 1.0)).abs() < 1e-13);
        let k = GridField::constant(spec, 0.25);
        assert!((k.interpolate(&[0.77, -1.2]).unwrap() - 0.25).abs() < 1e-15);
        // outside B_N the field vanishes, outside the padded box it errors
        assert_eq!(k.interpolate(&[3.5, 0.0]).unwrap(), 0.0);
        assert!(matches!(k.interpolate(&[4.1, 0.0]), Err(SlabError::OutOfBox { .. })));
        assert_eq!(k.interpolate_or_zero(&[4.1, 0.0]), 0.0);
    }

    #[test]
    fn set_file_roundtrip_binary_and_json() {
        let spec = GridSpec::new(2, 6.0, 8, 1).unwrap();
        let f = random_indicator(spec, 0.5, 11);
        let bytes = f.to_set_bytes().unwrap();
        assert_eq!(&bytes[..4], b"SLAB");
        assert_eq!(bytes.len(), 24 + 64);
        assert_eq!(GridField::parse_set(&bytes, 1).unwrap(), f);
        let json = f.to_set_json().unwrap();
        assert!(json.contains("\"N\":6.0"));
        assert_eq!(GridField::parse_set(json.as_bytes(), 1).unwrap(), f);
        let mut broken = bytes.clone();
        broken[4] = 9;
        assert!(GridField::parse_set(&broken, 1).is_err());
        assert!(GridField::constant(spec, 0.5).to_set_bytes().is_err());
    }

    #[test]
    fn expand_and_crop_are_inverse() {
        let spec = GridSpec::new(2, 4.0, 8, 2).unwrap();
        let f = random_indicator(spec, 0.5, 1);
        let big = f.expand();
        assert_eq!(big.spec().n, 16);
        assert!((big.measure() - f.measure()).abs() < 1e-12);
        let back = big.crop(GridSpec { pad: 1, ..spec }).unwrap();
        assert_eq!(back.values(), f.values());
        let x = [0.3, -1.1];
        assert!((big.interpolate(&x).unwrap() - f.interpolate(&x).unwrap()).abs() < 1e-15);
    }
}
