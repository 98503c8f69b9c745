//! Haar-distributed rotations of R^d and Monte Carlo estimates of rotation
//! probabilities and multilinear rotation averages.
//!
//! Draw `i` of a sampler is generated from its own ChaCha stream
//! `(seed, i)`, so any subset of draws can be evaluated in any order or on
//! any number of threads and still reproduce the same numbers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlabError};
use crate::grid::GridField;
use crate::numeric::blocked_sum;
use crate::simplex::{Rotation, Simplex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarSampler {
    d: usize,
    seed: u64,
    counter: u64,
}

impl HaarSampler {
    pub fn new(d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(SlabError::Dimension(format!("Haar sampling needs d ≥ 2, got {d}")));
        }
        Ok(HaarSampler { d, seed, counter: 0 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The `index`-th rotation of this sampler's sequence. Does not advance
    /// the counter.
    pub fn draw_at(&self, index: u64) -> Rotation {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        loop {
            let g = DMatrix::from_fn(self.d, self.d, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Some(u) = orthogonalize(g) {
                return u;
            }
        }
    }

    pub fn draw(&mut self) -> Rotation {
        let u = self.draw_at(self.counter);
        self.counter += 1;
        u
    }

    /// Reserves the next `count` draws and returns the index of the first.
    pub fn reserve(&mut self, count: u64) -> u64 {
        let start = self.counter;
        self.counter += count;
        start
    }
}

pub fn draw_rotation(sampler: &mut HaarSampler) -> Rotation {
    sampler.draw()
}

/// QR of a Gaussian matrix with `diag(R) > 0`, then the last column negated
/// if needed so that `det = +1`. `None` for a numerically singular input.
fn orthogonalize(g: DMatrix<f64>) -> Option<Rotation> {
    let d = g.nrows();
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..d {
        let rii = r[(i, i)];
        if rii.abs() < 1e-12 {
            return None;
        }
        if rii < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(d - 1).neg_mut();
    }
    Some(Rotation::from_matrix_unchecked(q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinProbability {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Mean of per-draw values with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_sums(sum: f64, sum_sq: f64, samples: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        McEstimate { mean, stderr: (var / n).sqrt(), samples }
    }
}

fn check_reach(field: &GridField, x: &[f64], reach: f64) -> Result<()> {
    let hw = field.spec().padded_half_width();
    if x.len() != field.spec().d || x.iter().any(|c| !(c.abs() + reach <= hw * (1.0 + 1e-12))) {
        return Err(SlabError::OutOfBox { point: x.to_vec(), half_width: hw });
    }
    Ok(())
}

/// Fraction of the draws `start .. start + samples` for which every vertex
/// of `x + λ·U(Δ)` lies in `A`, membership meaning an interpolated value of
/// at least 1/2.
pub fn pin_probability_at(
    a: &GridField,
    x: &[f64],
    lambda: f64,
    simplex: &Simplex,
    sampler: &HaarSampler,
    start: u64,
    samples: u64,
) -> Result<PinProbability> {
    if samples == 0 {
        return Err(SlabError::param("pin probability needs at least one sample"));
    }
    if sampler.d() != simplex.d() || a.spec().d != simplex.d() {
        return Err(SlabError::Dimension("sampler, simplex and set dimensions differ".into()));
    }
    check_reach(a, x, lambda * simplex.max_vertex_norm())?;
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = sampler.draw_at(start + i);
            let inside = simplex.vertices().iter().all(|v| {
                let p: Vec<f64> = u.apply(v).iter().zip(x).map(|(uv, xc)| xc + lambda * uv).collect();
                a.interpolate_unchecked(&p) >= 0.5
            });
            inside as u64
        })
        .sum();
    let estimate = hits as f64 / samples as f64;
    Ok(PinProbability {
        x: x.to_vec(),
        lambda,
        estimate,
        stderr: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        samples,
    })
}

/// [`pin_probability_at`] on the sampler's next `samples` draws.
pub fn pin_probability(
    a: &GridField,
    x: &[f64],
    lambda: f64,
    simplex: &Simplex,
    samples: u64,
    sampler: &mut HaarSampler,
) -> Result<PinProbability> {
    let start = sampler.reserve(samples);
    pin_probability_at(a, x, lambda, simplex, sampler, start, samples)
}

/// Monte Carlo estimate of `∫ g1(x − λU v1) ⋯ gj(x − λU vj) dμ(U)` over the
/// draws `start .. start + samples`.
pub fn mc_multilinear_at(
    inputs: &[&GridField],
    x: &[f64],
    lambda: f64,
    simplex: &Simplex,
    sampler: &HaarSampler,
    start: u64,
    samples: u64,
) -> Result<McEstimate> {
    let j = inputs.len();
    if j == 0 || j > simplex.k() {
        return Err(SlabError::param(format!("need 1 ≤ j ≤ k = {} inputs, got {j}", simplex.k())));
    }
    if samples == 0 {
        return Err(SlabError::param("Monte Carlo average needs at least one sample"));
    }
    if sampler.d() != simplex.d() {
        return Err(SlabError::Dimension("sampler and simplex dimensions differ".into()));
    }
    let reach = lambda * simplex.max_vertex_norm();
    for g in inputs {
        if g.spec().d != simplex.d() {
            return Err(SlabError::Dimension("input field dimension differs from simplex".into()));
        }
        check_reach(g, x, reach)?;
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = sampler.draw_at(start + i);
            let mut prod = 1.0;
            for (g, v) in inputs.iter().zip(simplex.vertices()) {
                let p: Vec<f64> = u.apply(v).iter().zip(x).map(|(uv, xc)| xc - lambda * uv).collect();
                prod *= g.interpolate_unchecked(&p);
                if prod == 0.0 {
                    break;
                }
            }
            prod
        })
        .collect();
    let sum = blocked_sum(values.len(), |i| values[i]);
    let sum_sq = blocked_sum(values.len(), |i| values[i] * values[i]);
    Ok(McEstimate::from_sums(sum, sum_sq, samples))
}

pub fn mc_multilinear(
    inputs: &[&GridField],
    x: &[f64],
    lambda: f64,
    simplex: &Simplex,
    samples: u64,
    sampler: &mut HaarSampler,
) -> Result<McEstimate> {
    let start = sampler.reserve(samples);
    mc_multilinear_at(inputs, x, lambda, simplex, sampler, start, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn draws_are_rotations_and_reproducible() {
        for d in 2..=4 {
            let mut s = HaarSampler::new(d, 11).unwrap();
            for _ in 0..200 {
                let u = s.draw();
                assert!(Rotation::new(u.matrix().clone()).is_ok());
            }
            let again = HaarSampler::new(d, 11).unwrap();
            assert_eq!(again.draw_at(17), s.draw_at(17));
            assert_eq!(s.counter(), 200);
        }
        assert!(HaarSampler::new(1, 0).is_err());
    }

    #[test]
    fn full_and_empty_sets() {
        let spec = GridSpec::new(3, 16.0, 16, 2).unwrap();
        let full = GridField::constant(spec, 1.0);
        let empty = GridField::zeros(spec);
        let s = Simplex::regular(2, 3).unwrap();
        let mut sampler = HaarSampler::new(3, 5).unwrap();
        let p = pin_probability(&full, &[0.0; 3], 4.0, &s, 500, &mut sampler).unwrap();
        assert_eq!(p.estimate, 1.0);
        assert_eq!(p.stderr, 0.0);
        let p = pin_probability(&empty, &[0.0; 3], 4.0, &s, 500, &mut sampler).unwrap();
        assert_eq!(p.estimate, 0.0);
        assert!(matches!(
            pin_probability(&full, &[15.0, 0.0, 0.0], 4.0, &s, 10, &mut sampler),
            Err(SlabError::OutOfBox { .. })
        ));
    }

    #[test]
    fn multilinear_of_constants() {
        let spec = GridSpec::new(3, 16.0, 16, 2).unwrap();
        let one = GridField::constant(spec, 1.0);
        let zero = GridField::zeros(spec);
        let s = Simplex::regular(2, 3).unwrap();
        let mut sampler = HaarSampler::new(3, 9).unwrap();
        let e = mc_multilinear(&[&one, &one], &[0.5, 0.0, -1.0], 3.0, &s, 256, &mut sampler).unwrap();
        assert_eq!(e.mean, 1.0);
        let e = mc_multilinear(&[&one, &zero], &[0.5, 0.0, -1.0], 3.0, &s, 256, &mut sampler).unwrap();
        assert_eq!(e.mean, 0.0);
    }
}
