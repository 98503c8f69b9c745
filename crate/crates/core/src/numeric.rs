//! Small numerical kernels shared across the crate: fixed-tree summation,
//! Gauss rules, and a dense symmetric solver for the tiny Gram systems.

/// Pairwise (cascade) summation with a fixed split point.
///
/// The reduction tree depends only on `values.len()`, so the result is
/// bit-identical however the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Chunk length for [`blocked_sum`]; fixed so the reduction tree never
/// depends on the number of worker threads.
pub const SUM_BLOCK: usize = 4096;

/// Sums `term(i)` for `i in 0..len`: sequential within fixed-size blocks,
/// blocks evaluated in parallel, partials combined by [`pairwise_sum`].
pub fn blocked_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    let blocks = len.div_ceil(SUM_BLOCK);
    let partials: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * SUM_BLOCK;
            let end = (start + SUM_BLOCK).min(len);
            let mut acc = 0.0;
            for i in start..end {
                acc += term(i);
            }
            acc
        })
        .collect();
    pairwise_sum(&partials)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let prev = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - prev) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Chebyshev rule of the second kind: exact for
/// `∫_{-1}^{1} p(t) sqrt(1 - t²) dt` with `deg p ≤ 2n - 1`.
pub fn gauss_chebyshev_u(n: usize) -> (Vec<f64>, Vec<f64>) {
    let step = std::f64::consts::PI / (n as f64 + 1.0);
    (1..=n)
        .map(|i| {
            let a = i as f64 * step;
            (a.cos(), step * a.sin().powi(2))
        })
        .unzip()
}

/// Solves `a x = b` for a small symmetric positive definite `a` via Cholesky.
/// Returns `None` when a pivot is not positive.
pub fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let l = cholesky(a)?;
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Geometric sequence from `start` whose last entry is at least `stop`.
pub fn geometric_sweep(start: f64, stop: f64, ratio: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut v = start;
    while v < stop * (1.0 - 1e-12) {
        v *= ratio;
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-12, "n={n} p={p} q={q}");
            }
        }
    }

    #[test]
    fn chebyshev_u_weight_integral() {
        let (t, w) = gauss_chebyshev_u(12);
        // ∫ sqrt(1 - t²) dt = π/2, ∫ t² sqrt(1 - t²) dt = π/8
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(t, w)| w * t * t).sum();
        assert!((m0 - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((m2 - std::f64::consts::PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn spd_solve_roundtrip() {
        let a = vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]];
        let x = [0.3, -1.2, 2.0];
        let b: Vec<f64> = a.iter().map(|r| dot(r, &x)).collect();
        let sol = solve_spd(&a, &b).unwrap();
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-14);
        }
        assert!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_none());
    }

    #[test]
    fn geometric_sweep_covers_interval() {
        let s = geometric_sweep(1.0, 16.0, 1.125);
        assert_eq!(s[0], 1.0);
        assert!(*s.last().unwrap() >= 16.0 * (1.0 - 1e-12));
        assert!(s[s.len() - 2] < 16.0);
    }
}
