//! A positive radial Schwartz function `ψ` on R^d whose Fourier transform
//! `ĥ` is supported in the closed unit ball, with `0 ≤ ĥ ≤ ĥ(0) = 1`.
//!
//! `ψ = (φ_a² + φ_b²) / Z` where `φ̂_a(ρ) = β(ρ/a)` for the bump
//! `β(s) = exp(-1/(1-s²))` and radii `a = 1/2`, `b = 3/10`. Each `φ̂`
//! lives in the half-ball, so `ĥ = (φ̂_a ∗ φ̂_a + φ̂_b ∗ φ̂_b) / Z` lives in
//! the unit ball and is bounded by its value at the origin (Cauchy–Schwarz).
//! The two squares have no common zero, which makes `ψ > 0`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::sphere_profile;
use crate::error::{Result, SlabError};
use crate::grid::{GridField, Spectrum};
use crate::numeric::gauss_legendre;
use crate::sphere::ConfigSphere;

const BUMP_RADII: [f64; 2] = [0.5, 0.3];

/// Samples of `ĥ` on `[0, 1]`.
const HAT_SAMPLES: usize = 1024;

/// Spacing of the radial table of `ψ`.
const TABLE_STEP: f64 = 1.0 / 128.0;

/// `ψ` is tabulated until it drops below this level and the mass it can
/// carry beyond, estimated by `|S^{d-1}| r^d ψ(r)`, drops below
/// [`TAIL_MASS`].
pub const TAIL_LEVEL: f64 = 1e-14;

const TAIL_MASS: f64 = 1e-12;

const MAX_TABLE_RADIUS: f64 = 256.0;

/// Radius beyond which the shift modulus ignores `ψ` (its mass there is
/// far below 1e-10).
const SHIFT_CUTOFF: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierConstants {
    #[serde(rename = "C_psi")]
    pub c_psi: f64,
    #[serde(rename = "C_tail")]
    pub c_tail: f64,
    /// Bound on the shift ratio per unit of vertex length.
    #[serde(rename = "C_shift")]
    pub c_shift: f64,
    pub tabulation_radius: f64,
}

#[derive(Debug, Clone)]
pub struct Mollifier {
    d: usize,
    hat: Vec<f64>,
    hat_slope: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    /// `∫_{|x| ≥ r_i} ψ` at each table node.
    tail: Vec<f64>,
    radius: f64,
    grad_l1: f64,
    constants: MollifierConstants,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => panic!("sphere area requested for unsupported dimension {d}"),
    }
}

/// `∫_{S^{d-1}} |ω_1| dω`.
fn abs_first_moment(d: usize) -> f64 {
    match d {
        2 => 4.0,
        3 => 2.0 * PI,
        4 => 8.0 * PI / 3.0,
        _ => panic!("unsupported dimension {d}"),
    }
}

fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, h: f64, u: f64) -> (f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    let value = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * h * m0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * h * m1;
    let slope = ((6.0 * u2 - 6.0 * u) * y0 + (3.0 * u2 - 4.0 * u + 1.0) * h * m0 + (-6.0 * u2 + 6.0 * u) * y1
        + (3.0 * u2 - 2.0 * u) * h * m1)
        / h;
    (value, slope)
}

/// Unnormalized `Σ (φ̂ ∗ φ̂)(ρ)` by product Gauss quadrature in the polar
/// coordinates `(|ζ|, angle(ζ, ξ))`, restricted to the lens where both
/// factors are nonzero.
fn hat_raw(d: usize, rho: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (x, w) = nodes;
    let ring = sphere_area(d - 1);
    let mut total = 0.0;
    for &a in &BUMP_RADII {
        let r_lo = (rho - a).max(0.0);
        if r_lo >= a {
            continue;
        }
        let half_r = 0.5 * (a - r_lo);
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            let r = r_lo + half_r * (xi + 1.0);
            let fr = bump(r / a);
            if fr == 0.0 {
                continue;
            }
            // |ρe − ζ| < a  ⇔  cos θ > (r² + ρ² − a²) / (2rρ)
            let theta_max = if r * rho == 0.0 {
                PI
            } else {
                ((r * r + rho * rho - a * a) / (2.0 * r * rho)).clamp(-1.0, 1.0).acos()
            };
            if theta_max == 0.0 {
                continue;
            }
            let half_t = 0.5 * theta_max;
            let mut inner = 0.0;
            for (xj, wj) in x.iter().zip(w) {
                let th = half_t * (xj + 1.0);
                let q = (r * r + rho * rho - 2.0 * r * rho * th.cos()).max(0.0).sqrt();
                inner += wj * bump(q / a) * th.sin().powi(d as i32 - 2);
            }
            s += wi * fr * inner * half_t * r.powi(d as i32 - 1);
        }
        total += s * half_r * ring;
    }
    total
}

/// `(φ_a(r), φ_a'(r))` for each bump radius, by the inverse radial transform.
fn phi_pair(d: usize, r: f64, nodes: &(Vec<f64>, Vec<f64>)) -> [(f64, f64); 2] {
    let (x, w) = nodes;
    let area = sphere_area(d);
    let mut out = [(0.0, 0.0); 2];
    for (slot, &a) in out.iter_mut().zip(&BUMP_RADII) {
        let mut v = 0.0;
        let mut dv = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            let rho = 0.5 * a * (xi + 1.0);
            let f = bump(rho / a);
            if f == 0.0 {
                continue;
            }
            let (b, db) = sphere_profile(d - 1, 2.0 * PI * r * rho);
            let m = wi * f * rho.powi(d as i32 - 1);
            v += m * b;
            dv += m * db * 2.0 * PI * rho;
        }
        *slot = (0.5 * a * area * v, 0.5 * a * area * dv);
    }
    out
}

impl Mollifier {
    pub fn build(d: usize) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(SlabError::Dimension(format!("mollifier dimension must be 2..=4, got {d}")));
        }
        let conv_nodes = gauss_legendre(96);
        let raw: Vec<f64> =
            (0..=HAT_SAMPLES).into_par_iter().map(|i| hat_raw(d, i as f64 / HAT_SAMPLES as f64, &conv_nodes)).collect();
        let z = raw[0];
        let mut hat: Vec<f64> = raw.iter().map(|v| (v / z).clamp(0.0, 1.0)).collect();
        hat[0] = 1.0;
        hat[HAT_SAMPLES] = 0.0;
        let step = 1.0 / HAT_SAMPLES as f64;
        let hat_slope: Vec<f64> = (0..=HAT_SAMPLES)
            .map(|i| match i {
                0 => 0.0,
                i if i == HAT_SAMPLES => 0.0,
                i => (hat[i + 1] - hat[i - 1]) / (2.0 * step),
            })
            .collect();

        // Gauss rules for the inverse transform, sized to the oscillation
        // count `r · a` of the integrand.
        let tiers = [(16.0, gauss_legendre(192)), (48.0, gauss_legendre(384)), (f64::INFINITY, gauss_legendre(768))];
        let chunk = 1024;
        let mut psi = Vec::new();
        let mut dpsi = Vec::new();
        loop {
            let start = psi.len();
            let block: Vec<(f64, f64)> = (start..start + chunk)
                .into_par_iter()
                .map(|i| {
                    let r = i as f64 * TABLE_STEP;
                    let nodes = &tiers.iter().find(|(limit, _)| r < *limit).expect("last tier is unbounded").1;
                    let pair = phi_pair(d, r, nodes);
                    let v = pair.iter().map(|(p, _)| p * p).sum::<f64>() / z;
                    let dv = pair.iter().map(|(p, dp)| 2.0 * p * dp).sum::<f64>() / z;
                    (v, dv)
                })
                .collect();
            let area = sphere_area(d);
            let done = block.iter().enumerate().all(|(off, (v, _))| {
                let r = (start + off) as f64 * TABLE_STEP;
                *v < TAIL_LEVEL && area * r.powi(d as i32) * v < TAIL_MASS
            });
            for (v, dv) in block {
                psi.push(v);
                dpsi.push(dv);
            }
            if done || psi.len() as f64 * TABLE_STEP >= MAX_TABLE_RADIUS {
                break;
            }
        }
        let area = sphere_area(d);
        let cut = psi
            .iter()
            .enumerate()
            .rposition(|(i, v)| *v >= TAIL_LEVEL || area * (i as f64 * TABLE_STEP).powi(d as i32) * v >= TAIL_MASS)
            .map_or(1, |i| i + 1);
        psi.truncate(cut + 1);
        dpsi.truncate(cut + 1);
        let radius = cut as f64 * TABLE_STEP;

        let mut m = Mollifier {
            d,
            hat,
            hat_slope,
            psi,
            dpsi,
            tail: Vec::new(),
            radius,
            grad_l1: 0.0,
            constants: MollifierConstants { c_psi: 0.0, c_tail: 0.0, c_shift: 0.0, tabulation_radius: radius },
        };
        m.tail = m.tail_table();
        m.grad_l1 = m.radial_quadrature(|_, _, dv| dv.abs()) * abs_first_moment(d) / sphere_area(d);
        m.constants = m.calibrate();
        Ok(m)
    }

    /// Process-wide cached instance for dimension `d`.
    pub fn shared(d: usize) -> Result<&'static Mollifier> {
        static CACHE: [OnceLock<Mollifier>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        if !(2..=4).contains(&d) {
            return Err(SlabError::Dimension(format!("mollifier dimension must be 2..=4, got {d}")));
        }
        Ok(CACHE[d - 2].get_or_init(|| Mollifier::build(d).expect("dimension already validated")))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn constants(&self) -> MollifierConstants {
        self.constants
    }

    pub fn tabulation_radius(&self) -> f64 {
        self.radius
    }

    /// `ĥ(ρ)`: radial profile of `ψ̂`.
    pub fn hat(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho >= 1.0 {
            return 0.0;
        }
        let pos = rho * HAT_SAMPLES as f64;
        let i = (pos.floor() as usize).min(HAT_SAMPLES - 1);
        let u = pos - i as f64;
        let step = 1.0 / HAT_SAMPLES as f64;
        let (v, _) = hermite(self.hat[i], self.hat[i + 1], self.hat_slope[i], self.hat_slope[i + 1], step, u);
        v.clamp(0.0, 1.0)
    }

    /// `(ψ(r), ψ'(r))` for `r = |x|`; zero beyond the tabulation radius.
    pub fn psi_radial_with_slope(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        if r >= self.radius {
            return (0.0, 0.0);
        }
        let pos = r / TABLE_STEP;
        let i = (pos.floor() as usize).min(self.psi.len() - 2);
        let u = pos - i as f64;
        hermite(self.psi[i], self.psi[i + 1], self.dpsi[i], self.dpsi[i + 1], TABLE_STEP, u)
    }

    pub fn psi_radial(&self, r: f64) -> f64 {
        self.psi_radial_with_slope(r).0
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        self.psi_radial(x.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `ψ_t(x) = t^{-d} ψ(x / t)`.
    pub fn psi_t(&self, t: f64, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        t.powi(-(self.d as i32)) * self.psi_radial(r / t)
    }

    /// Tabulated values `ψ(i · step)` with the step.
    pub fn table(&self) -> (&[f64], f64) {
        (&self.psi, TABLE_STEP)
    }

    /// `∫ f(r, ψ(r), ψ'(r)) dx` over R^d for a radial integrand, by 4-point
    /// Gauss on each table interval of the cubic interpolant.
    fn radial_quadrature(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        self.radial_quadrature_from(0, &f)
    }

    fn radial_quadrature_from(&self, first: usize, f: &impl Fn(f64, f64, f64) -> f64) -> f64 {
        let (gx, gw) = gauss_legendre(4);
        let area = sphere_area(self.d);
        let mut total = 0.0;
        for i in (first..self.psi.len() - 1).rev() {
            let r0 = i as f64 * TABLE_STEP;
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                let u = 0.5 * (x + 1.0);
                let (v, dv) = hermite(self.psi[i], self.psi[i + 1], self.dpsi[i], self.dpsi[i + 1], TABLE_STEP, u);
                let r = r0 + u * TABLE_STEP;
                s += w * f(r, v, dv) * r.powi(self.d as i32 - 1);
            }
            total += 0.5 * TABLE_STEP * s;
        }
        area * total
    }

    fn tail_table(&self) -> Vec<f64> {
        let (gx, gw) = gauss_legendre(4);
        let area = sphere_area(self.d);
        let mut tail = vec![0.0; self.psi.len()];
        for i in (0..self.psi.len() - 1).rev() {
            let r0 = i as f64 * TABLE_STEP;
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                let u = 0.5 * (x + 1.0);
                let (v, _) = hermite(self.psi[i], self.psi[i + 1], self.dpsi[i], self.dpsi[i + 1], TABLE_STEP, u);
                let r = r0 + u * TABLE_STEP;
                s += w * v * r.powi(self.d as i32 - 1);
            }
            tail[i] = tail[i + 1] + area * 0.5 * TABLE_STEP * s;
        }
        tail
    }

    /// `∫ ψ` over R^d.
    pub fn integral(&self) -> f64 {
        self.tail[0]
    }

    /// `∫ ψ_t` over R^d, computed on the dilated table.
    pub fn integral_t(&self, t: f64) -> f64 {
        // ψ_t(x) dx = t^{-d} ψ(x/t) dx; integrate in the physical radius.
        let area = sphere_area(self.d);
        let (gx, gw) = gauss_legendre(4);
        let mut total = 0.0;
        for i in (0..self.psi.len() - 1).rev() {
            let r0 = i as f64 * TABLE_STEP * t;
            let h = TABLE_STEP * t;
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                let r = r0 + 0.5 * (x + 1.0) * h;
                s += w * self.psi_radial(r / t) * t.powi(-(self.d as i32)) * r.powi(self.d as i32 - 1);
            }
            total += 0.5 * h * s;
        }
        area * total
    }

    /// `∫_{|x| ≥ ρ} ψ(x) dx`.
    pub fn tail_integral(&self, rho: f64) -> f64 {
        let rho = rho.max(0.0);
        if rho >= self.radius {
            return 0.0;
        }
        let i = (rho / TABLE_STEP).floor() as usize;
        let r0 = i as f64 * TABLE_STEP;
        let (gx, gw) = gauss_legendre(6);
        let mut partial = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let r = rho + 0.5 * (x + 1.0) * (r0 + TABLE_STEP - rho);
            partial += w * self.psi_radial(r) * r.powi(self.d as i32 - 1);
        }
        partial *= 0.5 * (r0 + TABLE_STEP - rho) * sphere_area(self.d);
        self.tail[(i + 1).min(self.tail.len() - 1)] + partial
    }

    /// `‖∂_1 ψ‖_{L¹}`.
    pub fn gradient_l1(&self) -> f64 {
        self.grad_l1
    }

    /// `D(s) = ∫ |ψ(x − s e1) − ψ(x)| dx`, by composite Gauss quadrature in
    /// cylindrical coordinates about the shift axis.
    pub fn shift_modulus(&self, s: f64) -> f64 {
        let s = s.abs();
        if s == 0.0 {
            return 0.0;
        }
        let cutoff = SHIFT_CUTOFF.min(self.radius);
        let panel = 1.0 / 16.0;
        let (gx, gw) = gauss_legendre(4);
        let rho_panels = (cutoff / panel).ceil() as usize;
        let z_lo = -cutoff;
        let z_hi = cutoff + s;
        let z_panels = ((z_hi - z_lo) / panel).ceil() as usize;
        let hz = (z_hi - z_lo) / z_panels as f64;
        let ring = sphere_area(self.d - 1);
        let dm2 = self.d as i32 - 2;
        let rows: Vec<f64> = (0..rho_panels)
            .into_par_iter()
            .map(|p| {
                let mut acc = 0.0;
                for (xr, wr) in gx.iter().zip(&gw) {
                    let rho = (p as f64 + 0.5 * (xr + 1.0)) * panel;
                    let rho2 = rho * rho;
                    let mut line = 0.0;
                    for q in 0..z_panels {
                        for (xz, wz) in gx.iter().zip(&gw) {
                            let z = z_lo + (q as f64 + 0.5 * (xz + 1.0)) * hz;
                            let a = self.psi_radial((rho2 + z * z).sqrt());
                            let b = self.psi_radial((rho2 + (z - s) * (z - s)).sqrt());
                            line += wz * (a - b).abs();
                        }
                    }
                    acc += wr * line * 0.5 * hz * rho.powi(dm2);
                }
                acc * 0.5 * panel
            })
            .collect();
        ring * crate::numeric::pairwise_sum(&rows)
    }

    fn calibrate(&self) -> MollifierConstants {
        let scan = 4096;
        let mut c_psi: f64 = 1.0;
        for i in 1..scan {
            let r = i as f64 / scan as f64;
            c_psi = c_psi.max((1.0 - self.hat(r)).abs() / r);
        }
        let mut c_tail: f64 = 0.0;
        let points = 400;
        for i in 0..=points {
            let eta = (1e-3f64.ln() + (0.5f64.ln() - 1e-3f64.ln()) * i as f64 / points as f64).exp();
            c_tail = c_tail.max(self.tail_integral(1.0 / eta) / eta);
        }
        MollifierConstants {
            c_psi,
            c_tail: 1.02 * c_tail,
            c_shift: 1.02 * self.grad_l1,
            tabulation_radius: self.radius,
        }
    }

    /// `sup |1 − ĥ(t|ξ|)| / min{1, t|ξ|}` over the given frequency radii.
    pub fn hat_deviation_bound(&self, t: f64, radii: &[f64]) -> HatDeviationReport {
        let mut sup: f64 = 0.0;
        for &r in radii {
            let s = t * r.abs();
            if s > 0.0 {
                sup = sup.max((1.0 - self.hat(s)).abs() / s.min(1.0));
            }
        }
        HatDeviationReport { t, sup_ratio: sup, bound: self.constants.c_psi, pass: sup <= self.constants.c_psi }
    }

    /// Tail mass outside radius `t/η` and sphere-shift modulus of
    /// `ψ_t`, both divided by `η`.
    pub fn tail_and_shift_bounds(&self, eta: f64, t: f64, lambda: f64, cs: &ConfigSphere) -> Result<TailShiftReport> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(SlabError::param(format!("η must lie in (0, 1), got {eta}")));
        }
        if !(t > 0.0) || lambda < 0.0 {
            return Err(SlabError::param("need t > 0 and λ ≥ 0"));
        }
        if t < lambda / eta * (1.0 - 1e-12) {
            return Err(SlabError::precondition(format!("shift bound needs t ≥ λ/η = {}, got t = {t}", lambda / eta)));
        }
        let tail = self.tail_integral(1.0 / eta);
        let y_norm = (cs.radius().powi(2) + cs.center().iter().map(|c| c * c).sum::<f64>()).sqrt();
        let shift = self.shift_modulus(lambda * y_norm / t);
        let tail_ratio = tail / eta;
        let shift_ratio = shift / eta;
        let shift_bound = self.constants.c_shift * y_norm;
        Ok(TailShiftReport {
            eta,
            t,
            lambda,
            tail,
            tail_ratio,
            tail_bound: self.constants.c_tail,
            shift,
            shift_ratio,
            shift_bound,
            pass: tail_ratio <= self.constants.c_tail && shift_ratio <= shift_bound,
        })
    }

    /// Multiplies a spectrum by `ĥ(t|ξ|)`, i.e. convolves with `ψ_t`.
    pub fn smooth_spectrum(&self, s: &Spectrum, t: f64) -> Spectrum {
        s.scale_radial(|r| self.hat(t * r))
    }

    /// `f ∗ ψ_t` on the padded domain.
    pub fn convolve(&self, f: &GridField, t: f64) -> GridField {
        self.smooth_spectrum(&f.forward_transform(), t).inverse_full()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatDeviationReport {
    pub t: f64,
    pub sup_ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailShiftReport {
    pub eta: f64,
    pub t: f64,
    pub lambda: f64,
    pub tail: f64,
    pub tail_ratio: f64,
    pub tail_bound: f64,
    pub shift: f64,
    pub shift_ratio: f64,
    pub shift_bound: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{Frame, Simplex};
    use crate::sphere::config_sphere;

    #[test]
    fn hat_support_and_bounds() {
        for d in 2..=4 {
            let m = Mollifier::shared(d).unwrap();
            assert_eq!(m.hat(0.0), 1.0);
            assert_eq!(m.hat(1.0), 0.0);
            assert_eq!(m.hat(1.01), 0.0);
            for i in 0..=2000 {
                let h = m.hat(i as f64 / 1000.0);
                assert!((0.0..=1.0).contains(&h));
            }
        }
    }

    #[test]
    fn psi_positive_normalized_and_scaled() {
        for d in 2..=4 {
            let m = Mollifier::shared(d).unwrap();
            assert!(m.psi_radial(0.0) > 0.0);
            assert!(m.table().0.iter().all(|v| *v > 0.0), "d={d}");
            assert!((m.integral() - 1.0).abs() < 1e-8, "d={d}: {}", m.integral());
            for t in [0.5, 1.0, 7.0] {
                assert!((m.integral_t(t) - 1.0).abs() < 1e-8, "d={d} t={t}");
            }
            let x = vec![0.37; d];
            let half: Vec<f64> = x.iter().map(|c| c / 2.0).collect();
            assert!((m.psi_t(2.0, &x) - 2f64.powi(-(d as i32)) * m.psi(&half)).abs() < 1e-12);
            assert_eq!(m.psi_t(1.0, &x), m.psi(&x));
            assert!(m.tail_integral(m.tabulation_radius() + 1.0) == 0.0);
        }
    }

    /// Forward radial transform of the tabulated ψ reproduces ĥ.
    #[test]
    fn psi_and_hat_are_a_transform_pair() {
        let d = 3;
        let m = Mollifier::shared(d).unwrap();
        for rho in [0.0, 0.1, 0.35, 0.6, 0.9, 1.2] {
            let ft = m.radial_quadrature(|r, v, _| v * sphere_profile(d - 1, 2.0 * PI * rho * r).0);
            assert!((ft - m.hat(rho)).abs() < 1e-7, "rho={rho}: {ft} vs {}", m.hat(rho));
        }
    }

    #[test]
    fn deviation_ratio() {
        let m = Mollifier::shared(2).unwrap();
        let c = m.constants().c_psi;
        assert!(c >= 1.0 && c.is_finite());
        let rep = m.hat_deviation_bound(3.0, &[0.0, 0.01, 0.1, 0.2, 1.0, 5.0]);
        assert!(rep.pass);
        let far = m.hat_deviation_bound(1.0, &[1.0, 2.0, 10.0]);
        assert!(far.sup_ratio <= 1.0);
        assert_eq!(m.hat_deviation_bound(1.0, &[0.0]).sup_ratio, 0.0);
    }

    #[test]
    fn shift_modulus_limits() {
        let m = Mollifier::shared(2).unwrap();
        assert_eq!(m.shift_modulus(0.0), 0.0);
        let s = 1e-3;
        let ratio = m.shift_modulus(s) / s;
        assert!((ratio - m.gradient_l1()).abs() < 2e-2 * m.gradient_l1(), "{ratio} vs {}", m.gradient_l1());
        assert!(m.shift_modulus(0.1) <= 0.1 * m.gradient_l1() * (1.0 + 1e-3));
        // disjoint translates give twice the mass
        assert!((m.shift_modulus(60.0) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn lemma_bounds_hold_for_a_sample_case() {
        let s = Simplex::standard(1, 3).unwrap();
        let cs = config_sphere(&s, 1, &Frame::empty()).unwrap();
        let m = Mollifier::shared(3).unwrap();
        let rep = m.tail_and_shift_bounds(0.1, 10.0, 1.0, &cs).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(m.tail_and_shift_bounds(0.1, 5.0, 1.0, &cs).is_err());
        assert_eq!(m.tail_and_shift_bounds(0.1, 10.0, 0.0, &cs).unwrap().shift, 0.0);
    }
}
