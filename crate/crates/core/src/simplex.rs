//! Non-degenerate simplices `{0, v1, …, vk}` living in R^d, rotations, and
//! the frames `y1, …, y_{j-1}` that share the simplex's Gram data.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlabError};
use crate::numeric::{cholesky, dot, norm};

/// Gram determinant below which a simplex is rejected as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    d: usize,
    vertices: Vec<Vec<f64>>,
    gram_det: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SimplexFile {
    d: usize,
    vertices: Vec<Vec<f64>>,
}

impl Simplex {
    /// Builds a simplex from raw vertices, zero-padding each to the ambient
    /// dimension `d` and rescaling so that `|v1| = 1`.
    pub fn normalize(raw_vertices: &[Vec<f64>], d: usize) -> Result<Self> {
        let k = raw_vertices.len();
        if k == 0 {
            return Err(SlabError::Dimension("a simplex needs at least one vertex".into()));
        }
        if k >= d {
            return Err(SlabError::Dimension(format!(
                "k = {k} vertices need ambient dimension d > k, got d = {d}"
            )));
        }
        let mut vertices = Vec::with_capacity(k);
        for (i, v) in raw_vertices.iter().enumerate() {
            if v.len() > d {
                return Err(SlabError::Dimension(format!(
                    "vertex {i} has {} coordinates, more than d = {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(SlabError::param(format!("vertex {i} has a non-finite coordinate")));
            }
            let mut padded = v.clone();
            padded.resize(d, 0.0);
            vertices.push(padded);
        }
        if vertices.iter().any(|v| norm(v) == 0.0) {
            return Err(SlabError::DegenerateSimplex { det: 0.0, tol: DEGENERACY_TOL });
        }
        let scale = 1.0 / norm(&vertices[0]);
        for v in &mut vertices {
            for x in v.iter_mut() {
                *x *= scale;
            }
        }
        let gram = gram_of(&vertices);
        let gram_det = DMatrix::from_fn(k, k, |i, j| gram[i][j]).determinant();
        if gram_det <= DEGENERACY_TOL {
            return Err(SlabError::DegenerateSimplex { det: gram_det, tol: DEGENERACY_TOL });
        }
        Ok(Simplex { d, vertices, gram_det })
    }

    /// Standard simplex `{e1, …, ek}` in R^d.
    pub fn standard(k: usize, d: usize) -> Result<Self> {
        let raw: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut v = vec![0.0; d];
                if i < d {
                    v[i] = 1.0;
                }
                v
            })
            .collect();
        Self::normalize(&raw, d)
    }

    /// Regular simplex with unit side length, built from its Gram matrix
    /// (all diagonal entries 1, off-diagonal 1/2).
    pub fn regular(k: usize, d: usize) -> Result<Self> {
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.5 }).collect())
            .collect();
        let l = cholesky(&gram).ok_or_else(|| SlabError::param("regular simplex Gram not SPD"))?;
        Self::normalize(&l, d)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn gram_det(&self) -> f64 {
        self.gram_det
    }

    /// `G[i][i'] = v_i · v_{i'}`.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        gram_of(&self.vertices)
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    /// `{λ U(v1), …, λ U(vk)}`.
    pub fn apply_rotation_scale(&self, rotation: &Rotation, lambda: f64) -> Vec<Vec<f64>> {
        assert_eq!(rotation.dim(), self.d, "rotation dimension must match the simplex");
        self.vertices
            .iter()
            .map(|v| rotation.apply(v).into_iter().map(|x| lambda * x).collect())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SimplexFile { d: self.d, vertices: self.vertices.clone() })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SimplexFile = serde_json::from_str(text)?;
        Self::normalize(&file.vertices, file.d)
    }
}

fn gram_of(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vectors.iter().map(|a| vectors.iter().map(|b| dot(a, b)).collect()).collect()
}

/// A proper rotation of R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub const TOL: f64 = 1e-12;

    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(SlabError::Dimension("rotation matrix must be square".into()));
        }
        let d = matrix.nrows();
        let gram = matrix.transpose() * &matrix;
        let ortho_err = (gram - DMatrix::identity(d, d)).abs().max();
        let det = matrix.determinant();
        if ortho_err > Self::TOL || (det - 1.0).abs() > Self::TOL {
            return Err(SlabError::param(format!(
                "not a rotation: |UᵀU − I| = {ortho_err:e}, det = {det}"
            )));
        }
        Ok(Rotation { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Rotation { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Rotation { matrix: DMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum()).collect()
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation { matrix: &self.matrix * &other.matrix }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation { matrix: self.matrix.transpose() }
    }
}

/// Vectors `y1, …, y_{j-1}` with `y_i · y_{i'} = v_i · v_{i'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new(vectors: Vec<Vec<f64>>) -> Self {
        let gram = gram_of(&vectors);
        Frame { vectors, gram }
    }

    pub fn empty() -> Self {
        Frame { vectors: Vec::new(), gram: Vec::new() }
    }

    /// Frame for the first `len` vertices with `y_i ∈ span{e1, …, e_i}`,
    /// read off from the Cholesky factor of the Gram matrix.
    pub fn canonical(simplex: &Simplex, len: usize) -> Result<Self> {
        if len > simplex.k() {
            return Err(SlabError::Dimension(format!(
                "frame of length {len} requested for a simplex with k = {}",
                simplex.k()
            )));
        }
        let gram = simplex.gram_matrix();
        let l = cholesky(&gram).ok_or(SlabError::DegenerateSimplex {
            det: simplex.gram_det(),
            tol: DEGENERACY_TOL,
        })?;
        let vectors = l
            .into_iter()
            .take(len)
            .map(|mut row| {
                row.resize(simplex.d(), 0.0);
                row
            })
            .collect();
        Ok(Frame::new(vectors))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn rotated(&self, rotation: &Rotation) -> Frame {
        Frame::new(self.vectors.iter().map(|v| rotation.apply(v)).collect())
    }

    /// Largest deviation `|y_i · y_{i'} − v_i · v_{i'}|`.
    pub fn gram_mismatch(&self, simplex: &Simplex) -> f64 {
        let g = simplex.gram_matrix();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                worst = worst.max((self.gram[i][j] - g[i][j]).abs());
            }
        }
        worst
    }
}
