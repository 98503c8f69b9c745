//! Configuration spheres: the admissible positions of the j-th rotated
//! vertex once `y1, …, y_{j-1}` are fixed, with quadrature rules for their
//! normalized surface measure and closed-form Fourier transforms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::sphere_profile;
use crate::error::{Result, SlabError};
use crate::numeric::{dot, gauss_chebyshev_u, gauss_legendre, norm, solve_spd};
use crate::simplex::{Frame, Simplex};

/// Frame Gram data may deviate from the simplex's by at most this much.
pub const FRAME_TOL: f64 = 1e-8;

/// Squared radii at or below this are rejected as degenerate.
pub const RADIUS_SQ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSphere {
    center: Vec<f64>,
    radius: f64,
    /// Orthonormal basis of span{y1, …, y_{j-1}}.
    span_basis: Vec<Vec<f64>>,
    /// Orthonormal basis of the orthogonal complement of the frame span.
    complement_basis: Vec<Vec<f64>>,
}

impl ConfigSphere {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn span_basis(&self) -> &[Vec<f64>] {
        &self.span_basis
    }

    pub fn complement_basis(&self) -> &[Vec<f64>] {
        &self.complement_basis
    }

    pub fn d(&self) -> usize {
        self.center.len()
    }

    /// Dimension `d − j` of the sphere itself.
    pub fn intrinsic_dim(&self) -> usize {
        self.complement_basis.len() - 1
    }

    /// `|ξ_⊥|`, the distance from `ξ` to the frame span.
    pub fn perp_norm(&self, xi: &[f64]) -> f64 {
        self.complement_basis.iter().map(|b| dot(b, xi).powi(2)).sum::<f64>().sqrt()
    }

    fn perp_projection(&self, xi: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; xi.len()];
        for b in &self.complement_basis {
            let c = dot(b, xi);
            for (pa, ba) in p.iter_mut().zip(b) {
                *pa += c * ba;
            }
        }
        p
    }
}

/// Gram–Schmidt (twice, for stability) of `vectors`, then completion by the
/// standard basis. Returns `(span basis, complement basis)`.
fn split_basis(vectors: &[Vec<f64>], d: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let push = |basis: &mut Vec<Vec<f64>>, v: &[f64]| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(b, &w);
                for (wa, ba) in w.iter_mut().zip(b) {
                    *wa -= c * ba;
                }
            }
        }
        let n = norm(&w);
        if n > 1e-8 * norm(v).max(1.0) {
            basis.push(w.into_iter().map(|x| x / n).collect());
            true
        } else {
            false
        }
    };
    for v in vectors {
        push(&mut basis, v);
    }
    let span_len = basis.len();
    let mut axis = 0;
    while basis.len() < d {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        push(&mut basis, &e);
        axis += 1;
    }
    let complement = basis.split_off(span_len);
    (basis, complement)
}

/// The sphere of admissible positions for the j-th vertex (`j` counted from
/// 1) given a frame `y1, …, y_{j-1}` sharing the simplex's Gram data.
pub fn config_sphere(simplex: &Simplex, j: usize, frame: &Frame) -> Result<ConfigSphere> {
    let d = simplex.d();
    if j == 0 || j > simplex.k() {
        return Err(SlabError::param(format!("vertex index j must satisfy 1 ≤ j ≤ k = {}, got {j}", simplex.k())));
    }
    if frame.len() != j - 1 {
        return Err(SlabError::param(format!("frame for j = {j} needs {} vectors, got {}", j - 1, frame.len())));
    }
    if frame.vectors().iter().any(|v| v.len() != d) {
        return Err(SlabError::Dimension("frame vectors must live in the simplex's ambient space".into()));
    }
    let mismatch = frame.gram_mismatch(simplex);
    if mismatch > FRAME_TOL {
        return Err(SlabError::precondition(format!(
            "frame Gram data differ from the simplex by {mismatch:e}"
        )));
    }
    let g = simplex.gram_matrix();
    let vj_sq = g[j - 1][j - 1];
    let rhs: Vec<f64> = (0..j - 1).map(|i| g[j - 1][i]).collect();
    let (center, radius_sq) = if j == 1 {
        (vec![0.0; d], vj_sq)
    } else {
        let a = solve_spd(frame.gram(), &rhs).ok_or(SlabError::DegenerateConfig { radius_sq: 0.0 })?;
        let mut c = vec![0.0; d];
        for (ai, y) in a.iter().zip(frame.vectors()) {
            for (ca, ya) in c.iter_mut().zip(y) {
                *ca += ai * ya;
            }
        }
        (c, vj_sq - dot(&a, &rhs))
    };
    if radius_sq <= RADIUS_SQ_TOL {
        return Err(SlabError::DegenerateConfig { radius_sq });
    }
    let (span_basis, complement_basis) = split_basis(frame.vectors(), d);
    if span_basis.len() != j - 1 {
        return Err(SlabError::DegenerateConfig { radius_sq });
    }
    Ok(ConfigSphere { center, radius: radius_sq.sqrt(), span_basis, complement_basis })
}

/// Nodes and weights for the normalized measure on a configuration sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(x) * *w).sum()
    }
}

/// Normalized rule on the unit sphere `S^m ⊂ R^{m+1}`.
///
/// `m = 1`: trapezoid with `8·2^level` nodes. `m = 2`: Gauss–Legendre in
/// `z = cos θ` (`2^level` nodes) times a trapezoid in azimuth
/// (`2^{level+1}`). `m = 3`: Gauss–Chebyshev-U in the first coordinate
/// (`2^level` nodes) times the `m = 2` rule.
pub fn unit_sphere_rule(m: usize, level: u32) -> (Vec<Vec<f64>>, Vec<f64>) {
    let base = 1usize << level;
    let (nodes, mut weights): (Vec<Vec<f64>>, Vec<f64>) = match m {
        1 => {
            let count = 8 * base;
            (0..count)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / count as f64;
                    (vec![a.cos(), a.sin()], 1.0)
                })
                .unzip()
        }
        2 => {
            let (z, wz) = gauss_legendre(base);
            let na = 2 * base;
            let mut out = (Vec::new(), Vec::new());
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for k in 0..na {
                    let a = 2.0 * PI * (k as f64 + 0.5) / na as f64;
                    out.0.push(vec![*zi, s * a.cos(), s * a.sin()]);
                    out.1.push(*wi);
                }
            }
            out
        }
        3 => {
            let (t, wt) = gauss_chebyshev_u(base);
            let (inner, wi) = unit_sphere_rule(2, level);
            let mut out = (Vec::new(), Vec::new());
            for (ti, wti) in t.iter().zip(&wt) {
                let s = (1.0 - ti * ti).sqrt();
                for (p, w) in inner.iter().zip(&wi) {
                    let mut node = Vec::with_capacity(4);
                    node.push(*ti);
                    node.extend(p.iter().map(|c| s * c));
                    out.0.push(node);
                    out.1.push(wti * w);
                }
            }
            out
        }
        _ => panic!("unit sphere rules exist for m = 1..=3, got {m}"),
    };
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    (nodes, weights)
}

pub fn sphere_rule(cs: &ConfigSphere, level: u32) -> SphereRule {
    let (unit, weights) = unit_sphere_rule(cs.intrinsic_dim(), level);
    let nodes = unit
        .iter()
        .map(|u| {
            let mut p = cs.center.clone();
            for (uc, b) in u.iter().zip(&cs.complement_basis) {
                for (pa, ba) in p.iter_mut().zip(b) {
                    *pa += cs.radius * uc * ba;
                }
            }
            p
        })
        .collect();
    SphereRule { nodes, weights }
}

/// `∫ e^{-2πi x·ξ} dσ(x)` over the configuration sphere.
pub fn sphere_ft(cs: &ConfigSphere, xi: &[f64]) -> Complex64 {
    let t = 2.0 * PI * cs.radius * cs.perp_norm(xi);
    let (b, _) = sphere_profile(cs.intrinsic_dim(), t);
    Complex64::from_polar(b, -2.0 * PI * dot(&cs.center, xi))
}

/// [`sphere_ft`] together with its gradient in `ξ`.
pub fn sphere_ft_gradient(cs: &ConfigSphere, xi: &[f64]) -> (Complex64, Vec<Complex64>) {
    let pn = cs.perp_norm(xi);
    let t = 2.0 * PI * cs.radius * pn;
    let (b, db) = sphere_profile(cs.intrinsic_dim(), t);
    let phase = Complex64::from_polar(1.0, -2.0 * PI * dot(&cs.center, xi));
    let value = phase * b;
    let perp = cs.perp_projection(xi);
    let grad = (0..xi.len())
        .map(|a| {
            let radial = if pn > 0.0 { db * 2.0 * PI * cs.radius * perp[a] / pn } else { 0.0 };
            Complex64::new(0.0, -2.0 * PI * cs.center[a]) * value + phase * radial
        })
        .collect();
    (value, grad)
}

/// `ξ · ∇ sphere_ft(ξ)`.
pub fn sphere_ft_radial_derivative(cs: &ConfigSphere, xi: &[f64]) -> Complex64 {
    let t = 2.0 * PI * cs.radius * cs.perp_norm(xi);
    let (b, db) = sphere_profile(cs.intrinsic_dim(), t);
    let cx = dot(&cs.center, xi);
    let phase = Complex64::from_polar(1.0, -2.0 * PI * cx);
    phase * Complex64::new(t * db, -2.0 * PI * cx * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub r: f64,
    pub sup_ft: f64,
    pub sup_grad_ft: f64,
    pub envelope_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    /// Largest envelope ratio over the whole grid.
    pub constant: f64,
    /// Largest ratio over the first half of the grid.
    pub head_max: f64,
    /// Largest ratio over the second half of the grid.
    pub tail_max: f64,
    /// Growth allowance applied to `head_max`.
    pub allowance: f64,
    pub bounded: bool,
}

impl EnvelopeFit {
    pub const DEFAULT_ALLOWANCE: f64 = 1.25;

    pub fn fit(ratios: &[f64], allowance: f64) -> Self {
        let half = ratios.len().div_ceil(2);
        let head_max = ratios[..half].iter().cloned().fold(0.0, f64::max);
        let tail_max = ratios[half..].iter().cloned().fold(0.0, f64::max);
        EnvelopeFit {
            constant: head_max.max(tail_max),
            head_max,
            tail_max,
            allowance,
            bounded: tail_max <= allowance * head_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub intrinsic_dim: usize,
    pub rows: Vec<DecayRow>,
    pub fit: EnvelopeFit,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,sup_ft,sup_grad_ft,envelope_ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.r, r.sup_ft, r.sup_grad_ft, r.envelope_ratio);
        }
        out
    }
}

/// Samples `|ξ_⊥| = R` along several complement directions (plus an
/// in-span offset) and records the sup of `|dσ̂|`, of `|∇dσ̂|`, and of
/// `|dσ̂|·(1+R)^{m/2}`.
pub fn decay_envelope_check(cs: &ConfigSphere, radii: &[f64]) -> Result<DecayReport> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return Err(SlabError::param("decay radii must be a nonempty increasing list of non-negative values"));
    }
    let m = cs.intrinsic_dim();
    let d = cs.d();
    let comp = &cs.complement_basis;
    let mut directions: Vec<Vec<f64>> = comp.clone();
    for w in comp.windows(2) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        directions.push(w[0].iter().zip(&w[1]).map(|(a, b)| s * (a + b)).collect());
    }
    let offsets: Vec<Vec<f64>> = std::iter::once(vec![0.0; d]).chain(cs.span_basis.iter().cloned()).collect();
    let rows = radii
        .iter()
        .map(|&r| {
            let mut sup_ft: f64 = 0.0;
            let mut sup_grad: f64 = 0.0;
            for dir in &directions {
                for off in &offsets {
                    let xi: Vec<f64> = dir.iter().zip(off).map(|(a, b)| r * a + b).collect();
                    let (v, g) = sphere_ft_gradient(cs, &xi);
                    sup_ft = sup_ft.max(v.norm());
                    sup_grad = sup_grad.max(g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
                }
            }
            DecayRow { r, sup_ft, sup_grad_ft: sup_grad, envelope_ratio: sup_ft * (1.0 + r).powf(0.5 * m as f64) }
        })
        .collect::<Vec<_>>();
    let ratios: Vec<f64> = rows.iter().map(|r| r.envelope_ratio).collect();
    Ok(DecayReport { intrinsic_dim: m, rows, fit: EnvelopeFit::fit(&ratios, EnvelopeFit::DEFAULT_ALLOWANCE) })
}
