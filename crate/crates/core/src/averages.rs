//! Nested multilinear spherical averages
//!
//! `A_λ^{(j)}(g1, …, gj)(x) = ∫⋯∫ g1(x − λy1) ⋯ gj(x − λyj) dσ(yj) ⋯ dσ(y1)`,
//!
//! where `y1` runs over the unit sphere and each later `yi` over the
//! configuration sphere of the frame `y1, …, y_{i-1}`. The iterated measure
//! is discretized once as a tree of sphere rules, independent of `x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlabError};
use crate::grid::GridField;
use crate::mollifier::Mollifier;
use crate::numeric::blocked_sum;
use crate::simplex::{Frame, Simplex};
use crate::sphere::{config_sphere, sphere_rule};

/// Upper bound on the number of leaves of a configuration rule.
pub const MAX_RULE_LEAVES: usize = 1 << 24;

type Point = [f64; 4];

#[derive(Debug, Clone)]
struct Layer {
    points: Vec<Point>,
    weights: Vec<f64>,
    /// Children of node `i` in the next layer: `children[i]..children[i+1]`.
    children: Vec<usize>,
}

/// Discretization of the iterated configuration measure for vertices
/// `1..=j` of a simplex.
#[derive(Debug, Clone)]
pub struct ConfigurationRule {
    d: usize,
    levels: Vec<u32>,
    layers: Vec<Layer>,
    max_norm: f64,
}

fn to_point(v: &[f64]) -> Point {
    let mut p = [0.0; 4];
    p[..v.len()].copy_from_slice(v);
    p
}

impl ConfigurationRule {
    /// Rule with the same quadrature level at every depth.
    pub fn new(simplex: &Simplex, j: usize, level: u32) -> Result<Self> {
        Self::with_levels(simplex, &vec![level; j])
    }

    /// Rule whose depth-`i` spheres use `levels[i]`; `j = levels.len()`.
    pub fn with_levels(simplex: &Simplex, levels: &[u32]) -> Result<Self> {
        let j = levels.len();
        let d = simplex.d();
        if j == 0 || j > simplex.k() {
            return Err(SlabError::param(format!("need 1 ≤ j ≤ k = {}, got {j}", simplex.k())));
        }
        if levels.iter().any(|&l| l == 0 || l > 10) {
            return Err(SlabError::param("quadrature levels must lie in 1..=10"));
        }
        let first = sphere_rule(&config_sphere(simplex, 1, &Frame::empty())?, levels[0]);
        let mut layers = vec![Layer {
            points: first.nodes.iter().map(|p| to_point(p)).collect(),
            weights: first.weights,
            children: Vec::new(),
        }];
        let mut parents: Vec<Vec<usize>> = vec![Vec::new()];
        parents[0] = vec![usize::MAX; layers[0].points.len()];
        for depth in 1..j {
            let prev = &layers[depth - 1];
            let estimate = prev.points.len() * crate::sphere::unit_sphere_rule(d - depth - 1, levels[depth]).1.len();
            if estimate > MAX_RULE_LEAVES {
                return Err(SlabError::param(format!(
                    "configuration rule would have {estimate} leaves (limit {MAX_RULE_LEAVES}); lower the level"
                )));
            }
            let built: Vec<Result<(Vec<Point>, Vec<f64>)>> = (0..prev.points.len())
                .into_par_iter()
                .map(|node| {
                    let mut frame = Vec::with_capacity(depth);
                    let mut cur = node;
                    for up in (0..depth).rev() {
                        frame.push(layers[up].points[cur][..d].to_vec());
                        cur = parents[up][cur];
                    }
                    frame.reverse();
                    let cs = config_sphere(simplex, depth + 1, &Frame::new(frame))?;
                    let rule = sphere_rule(&cs, levels[depth]);
                    Ok((rule.nodes.iter().map(|p| to_point(p)).collect(), rule.weights))
                })
                .collect();
            let mut layer = Layer { points: Vec::new(), weights: Vec::new(), children: Vec::new() };
            let mut parent_of = Vec::new();
            let mut offsets = vec![0];
            for (node, b) in built.into_iter().enumerate() {
                let (pts, ws) = b?;
                parent_of.extend(std::iter::repeat_n(node, pts.len()));
                layer.points.extend(pts);
                layer.weights.extend(ws);
                offsets.push(layer.points.len());
            }
            layers[depth - 1].children = offsets;
            layers.push(layer);
            parents.push(parent_of);
        }
        Ok(ConfigurationRule { d, levels: levels.to_vec(), layers, max_norm: simplex.max_vertex_norm() })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn leaves(&self) -> usize {
        self.layers.last().map_or(0, |l| l.points.len())
    }

    /// Every root-to-leaf path as `(product of weights, [y1, …, yj])`.
    pub fn leaf_frames(&self) -> Vec<(f64, Vec<Vec<f64>>)> {
        let mut out = Vec::with_capacity(self.leaves());
        let mut stack: Vec<(usize, usize, f64, Vec<Vec<f64>>)> = (0..self.layers[0].points.len())
            .rev()
            .map(|i| (0, i, self.layers[0].weights[i], vec![self.layers[0].points[i][..self.d].to_vec()]))
            .collect();
        while let Some((depth, i, w, path)) = stack.pop() {
            if depth + 1 == self.layers.len() {
                out.push((w, path));
                continue;
            }
            let layer = &self.layers[depth];
            let next = &self.layers[depth + 1];
            for c in (layer.children[i]..layer.children[i + 1]).rev() {
                let mut p = path.clone();
                p.push(next.points[c][..self.d].to_vec());
                stack.push((depth + 1, c, w * next.weights[c], p));
            }
        }
        out
    }

    /// Top-level nodes `y1` with their weights.
    pub fn outer_nodes(&self) -> impl Iterator<Item = (&[f64], f64)> {
        let d = self.d;
        self.layers[0].points.iter().map(move |p| &p[..d]).zip(self.layers[0].weights.iter().copied())
    }

    /// Sum over the nodes of layer `depth` in `range` of
    /// `w · g_depth(x − λy) · (children)`, truncated after `stop` layers.
    fn product_sum(
        &self,
        depth: usize,
        range: std::ops::Range<usize>,
        stop: usize,
        inputs: &[&GridField],
        x: &[f64],
        lambda: f64,
    ) -> f64 {
        let layer = &self.layers[depth];
        let g = inputs[depth];
        let mut p = [0.0; 4];
        let mut acc = 0.0;
        for i in range {
            let y = &layer.points[i];
            for a in 0..self.d {
                p[a] = x[a] - lambda * y[a];
            }
            let v = g.interpolate_unchecked(&p[..self.d]);
            if v == 0.0 {
                continue;
            }
            let rest = if depth + 1 < stop {
                self.product_sum(depth + 1, layer.children[i]..layer.children[i + 1], stop, inputs, x, lambda)
            } else {
                1.0
            };
            acc += layer.weights[i] * v * rest;
        }
        acc
    }

    fn abs_sum(&self, depth: usize, range: std::ops::Range<usize>, g: &GridField, x: &[f64], lambda: f64) -> f64 {
        let layer = &self.layers[depth];
        if depth + 1 == self.layers.len() {
            let mut p = [0.0; 4];
            let mut acc = 0.0;
            for i in range {
                let y = &layer.points[i];
                for a in 0..self.d {
                    p[a] = x[a] - lambda * y[a];
                }
                acc += layer.weights[i] * g.interpolate_unchecked(&p[..self.d]);
            }
            return acc.abs();
        }
        let mut acc = 0.0;
        for i in range {
            acc += layer.weights[i] * self.abs_sum(depth + 1, layer.children[i]..layer.children[i + 1], g, x, lambda);
        }
        acc
    }

    fn check(&self, fields: &[&GridField], x: &[f64], lambda: f64) -> Result<()> {
        if x.len() != self.d {
            return Err(SlabError::Dimension(format!("point has {} coordinates, expected {}", x.len(), self.d)));
        }
        let reach = lambda.abs() * self.max_norm;
        for g in fields {
            if g.spec().d != self.d {
                return Err(SlabError::Dimension("input field dimension differs from the rule".into()));
            }
            let hw = g.spec().padded_half_width();
            if x.iter().any(|c| !(c.abs() + reach <= hw * (1.0 + 1e-12))) {
                return Err(SlabError::OutOfBox { point: x.to_vec(), half_width: hw });
            }
        }
        Ok(())
    }

    /// `A_λ^{(j)}(g1, …, gj)(x)` with `j = inputs.len() ≤ depth()`.
    pub fn average(&self, inputs: &[&GridField], x: &[f64], lambda: f64) -> Result<f64> {
        if inputs.is_empty() || inputs.len() > self.depth() {
            return Err(SlabError::param(format!("expected 1..={} inputs, got {}", self.depth(), inputs.len())));
        }
        self.check(inputs, x, lambda)?;
        Ok(self.product_sum(0, 0..self.layers[0].points.len(), inputs.len(), inputs, x, lambda))
    }

    /// The absolute-value operator: the innermost integral of `g` is taken
    /// in absolute value before the outer integrations.
    pub fn abs_average(&self, g: &GridField, x: &[f64], lambda: f64) -> Result<f64> {
        self.check(&[g], x, lambda)?;
        Ok(self.abs_sum(0, 0..self.layers[0].points.len(), g, x, lambda))
    }

    pub fn average_many(&self, inputs: &[&GridField], xs: &[Vec<f64>], lambda: f64) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.average(inputs, x, lambda)).collect()
    }

    pub fn abs_average_many(&self, g: &GridField, xs: &[Vec<f64>], lambda: f64) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.abs_average(g, x, lambda)).collect()
    }
}

/// Evaluation points for the averaging operators.
#[derive(Debug, Clone, PartialEq)]
pub enum XSet {
    /// Every cell centre of the given field's grid.
    Full,
    Points(Vec<Vec<f64>>),
}

impl XSet {
    pub fn points(&self, field: &GridField) -> Vec<Vec<f64>> {
        match self {
            XSet::Full => (0..field.spec().cell_count()).map(|i| field.spec().cell_center(i)).collect(),
            XSet::Points(p) => p.clone(),
        }
    }

    /// `count` cell centres drawn uniformly (with replacement) from the
    /// cells whose centres keep a clearance `margin` from the box boundary.
    pub fn random_cells(field: &GridField, count: usize, margin: f64, seed: u64) -> Result<XSet> {
        let spec = field.spec();
        let usable: Vec<usize> = (0..spec.n).filter(|&i| spec.axis_center(i).abs() + margin <= 0.5 * spec.side).collect();
        if usable.is_empty() {
            return Err(SlabError::param(format!("no cells keep clearance {margin} inside the box")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(XSet::Points(
            (0..count)
                .map(|_| (0..spec.d).map(|_| spec.axis_center(usable[rng.random_range(0..usable.len())])).collect())
                .collect(),
        ))
    }
}

#[derive(Debug, Clone)]
pub struct AverageRequest<'a> {
    pub inputs: Vec<&'a GridField>,
    pub lambda: f64,
    pub simplex: &'a Simplex,
    pub level: u32,
    pub xs: XSet,
}

pub fn nested_average(req: &AverageRequest<'_>) -> Result<Vec<f64>> {
    let first = req.inputs.first().ok_or_else(|| SlabError::param("at least one input is required"))?;
    let rule = ConfigurationRule::new(req.simplex, req.inputs.len(), req.level)?;
    rule.average_many(&req.inputs, &req.xs.points(first), req.lambda)
}

pub fn abs_nested_average(
    g: &GridField,
    lambda: f64,
    simplex: &Simplex,
    j: usize,
    level: u32,
    xs: &XSet,
) -> Result<Vec<f64>> {
    let rule = ConfigurationRule::new(simplex, j, level)?;
    rule.abs_average_many(g, &xs.points(g), lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    /// Estimate of `⟨1_A, A_λ^{(k)}(1_A, …, 1_A)⟩`.
    pub value: f64,
    pub stderr: f64,
    pub evaluated: usize,
    pub full_grid: bool,
}

/// Number of stratified samples used by [`count_functional`] off the full
/// grid.
pub const DEFAULT_COUNT_SAMPLES: usize = 4096;

/// `⟨1_A, A_λ^{(k)}(1_A, …, 1_A)⟩`. Full grid in d = 2; in higher
/// dimension, two uniform cells from each of `samples / 2` contiguous
/// strata, with the stratified standard error.
pub fn count_functional(
    a: &GridField,
    lambda: f64,
    simplex: &Simplex,
    rule: &ConfigurationRule,
    samples: usize,
    seed: u64,
) -> Result<CountEstimate> {
    if rule.depth() != simplex.k() {
        return Err(SlabError::param("count functional needs a rule of depth k"));
    }
    if !a.is_indicator() {
        return Err(SlabError::param("count functional expects an indicator field"));
    }
    let spec = *a.spec();
    let k = simplex.k();
    let inputs = vec![a; k];
    let vol = spec.cell_volume();
    let eval = |cell: usize| -> Result<f64> {
        if a.values()[cell] == 0.0 {
            return Ok(0.0);
        }
        rule.average(&inputs, &spec.cell_center(cell), lambda)
    };
    let cells = spec.cell_count();
    if spec.d == 2 || samples >= cells {
        let vals: Vec<f64> = (0..cells).into_par_iter().map(eval).collect::<Result<_>>()?;
        return Ok(CountEstimate {
            value: vol * blocked_sum(cells, |i| vals[i]),
            stderr: 0.0,
            evaluated: cells,
            full_grid: true,
        });
    }
    let strata = (samples / 2).max(1);
    let pairs: Vec<(f64, f64, usize)> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let lo = s * cells / strata;
            let hi = (s + 1) * cells / strata;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let c1 = rng.random_range(lo..hi);
            let c2 = rng.random_range(lo..hi);
            Ok((eval(c1)?, eval(c2)?, hi - lo))
        })
        .collect::<Result<_>>()?;
    let value = vol * blocked_sum(pairs.len(), |i| pairs[i].2 as f64 * 0.5 * (pairs[i].0 + pairs[i].1));
    let var = blocked_sum(pairs.len(), |i| {
        let (f1, f2, n) = pairs[i];
        (n as f64).powi(2) * (f1 - f2).powi(2) / 4.0
    });
    Ok(CountEstimate { value, stderr: vol * var.sqrt(), evaluated: 2 * strata, full_grid: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceReport {
    pub j: usize,
    pub eta: f64,
    pub lambda: f64,
    pub t: f64,
    pub sup_difference: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `sup_x |A^{(j)}(g, …, g, f1)(x) − f1(x)·A^{(j-1)}(g, …, g)(x)|` with
/// `f1 = g ∗ ψ_t`, `t = λ/η`, compared against `η`.
pub fn difference_bound_check(
    g: &GridField,
    eta: f64,
    lambda: f64,
    simplex: &Simplex,
    rule: &ConfigurationRule,
    xs: &[Vec<f64>],
    mollifier: &Mollifier,
) -> Result<DifferenceReport> {
    if !(eta > 0.0 && eta <= 1.0) || !(lambda > 0.0) {
        return Err(SlabError::param("need 0 < η ≤ 1 and λ > 0"));
    }
    let j = rule.depth();
    let t = lambda / eta;
    let f1 = mollifier.convolve(g, t);
    let mut inputs: Vec<&GridField> = vec![g; j - 1];
    inputs.push(&f1);
    let diffs: Vec<f64> = xs
        .par_iter()
        .map(|x| {
            rule.check(&[g], x, lambda)?;
            let full = rule.product_sum(0, 0..rule.layers[0].points.len(), j, &inputs, x, lambda);
            let lower = if j == 1 {
                1.0
            } else {
                rule.product_sum(0, 0..rule.layers[0].points.len(), j - 1, &inputs, x, lambda)
            };
            Ok((full - f1.interpolate_unchecked(x) * lower).abs())
        })
        .collect::<Result<_>>()?;
    let sup = diffs.iter().cloned().fold(0.0, f64::max);
    let vj = simplex.vertex(j - 1).iter().map(|c| c * c).sum::<f64>().sqrt();
    let gmax = g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = mollifier.constants().c_shift * vj * gmax.powi(j as i32);
    Ok(DifferenceReport { j, eta, lambda, t, sup_difference: sup, ratio: sup / eta, bound, pass: sup / eta <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn spec3() -> GridSpec {
        GridSpec::new(3, 16.0, 16, 2).unwrap()
    }

    #[test]
    fn rule_shape() {
        let s = Simplex::regular(2, 3).unwrap();
        let rule = ConfigurationRule::new(&s, 2, 2).unwrap();
        assert_eq!(rule.depth(), 2);
        assert_eq!(rule.layers[0].points.len(), 4 * 8);
        assert_eq!(rule.leaves(), 32 * 32);
        assert!(ConfigurationRule::new(&s, 3, 2).is_err());
    }

    #[test]
    fn constants_average_to_constants() {
        let s = Simplex::regular(2, 3).unwrap();
        let rule = ConfigurationRule::new(&s, 2, 3).unwrap();
        let one = GridField::constant(spec3(), 1.0);
        let zero = GridField::zeros(spec3());
        let x = [0.3, -0.2, 1.0];
        assert!((rule.average(&[&one, &one], &x, 3.0).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(rule.average(&[&one, &zero], &x, 3.0).unwrap(), 0.0);
        assert!((rule.abs_average(&one, &x, 3.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(rule.average(&[&one, &one], &[14.0, 0.0, 0.0], 3.0), Err(SlabError::OutOfBox { .. })));
    }

    #[test]
    fn count_of_empty_set_is_zero() {
        let spec = GridSpec::new(2, 16.0, 32, 2).unwrap();
        let s = Simplex::standard(1, 2).unwrap();
        let rule = ConfigurationRule::new(&s, 1, 3).unwrap();
        let c = count_functional(&GridField::zeros(spec), 2.0, &s, &rule, 0, 1).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.full_grid);
    }
}
