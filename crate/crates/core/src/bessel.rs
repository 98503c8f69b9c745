//! Bessel functions of the first kind of order 0, 1, 2 and the normalized
//! Fourier profiles of the unit spheres S^1, S^2, S^3.
//!
//! Power series up to `SERIES_LIMIT`, Hankel asymptotics beyond.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SERIES_LIMIT: f64 = 12.0;

fn series(order: u32, t: f64) -> f64 {
    let half = 0.5 * t;
    let q = -half * half;
    let mut term = half.powi(order as i32) / factorial(order);
    let mut sum = term;
    for k in 1..200u32 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn hankel(order: u32, t: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60u32 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * t);
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = t - order as f64 * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn bessel_j(order: u32, t: f64) -> f64 {
    let a = t.abs();
    let v = if a <= SERIES_LIMIT { series(order, a) } else { hankel(order, a) };
    if t < 0.0 && order % 2 == 1 {
        -v
    } else {
        v
    }
}

pub fn j0(t: f64) -> f64 {
    bessel_j(0, t)
}

pub fn j1(t: f64) -> f64 {
    bessel_j(1, t)
}

pub fn j2(t: f64) -> f64 {
    bessel_j(2, t)
}

/// Normalized Fourier profile of the unit sphere `S^m ⊂ R^{m+1}`:
/// `B_m(t) = ∫ e^{-i t z_1} dσ(z)`, returned with its derivative in `t`.
///
/// `B_1 = J_0`, `B_2 = sin t / t`, `B_3 = 2 J_1(t) / t`.
pub fn sphere_profile(m: usize, t: f64) -> (f64, f64) {
    let t = t.abs();
    match m {
        1 => (j0(t), -j1(t)),
        2 => {
            if t < 0.5 {
                // sin t / t and its derivative by Taylor series
                let t2 = t * t;
                let mut b = 0.0;
                let mut db = 0.0;
                let mut term = 1.0;
                for k in 0..12 {
                    b += term;
                    if k > 0 {
                        db += term * (2 * k) as f64 / t;
                    }
                    term *= -t2 / (((2 * k + 2) * (2 * k + 3)) as f64);
                }
                (b, if t == 0.0 { 0.0 } else { db })
            } else {
                let (s, c) = t.sin_cos();
                (s / t, (t * c - s) / (t * t))
            }
        }
        3 => {
            if t <= SERIES_LIMIT {
                // 2 J_1(t)/t and -2 J_2(t)/t as even series in t
                let half = 0.5 * t;
                let q = -half * half;
                let mut term = 1.0;
                let mut b = term;
                for k in 1..200u32 {
                    term *= q / (k as f64 * (k + 1) as f64);
                    b += term;
                    if term.abs() < 1e-18 {
                        break;
                    }
                }
                let mut term2 = 0.25 * t;
                let mut j2_over_t = term2;
                for k in 1..200u32 {
                    term2 *= q / (k as f64 * (k + 2) as f64);
                    j2_over_t += term2;
                    if term2.abs() < 1e-18 {
                        break;
                    }
                }
                (b, -j2_over_t)
            } else {
                let a0 = j0(t);
                let a1 = j1(t);
                (2.0 * a1 / t, 2.0 * a0 / t - 4.0 * a1 / (t * t))
            }
        }
        _ => panic!("sphere profile only available for intrinsic dimension 1..=3, got {m}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bessel integral J_n(t) = (1/π) ∫_0^π cos(nτ − t sin τ) dτ, trapezoid
    /// on a periodic integrand (spectrally accurate).
    fn bessel_integral(n: u32, t: f64) -> f64 {
        let m = 4096;
        let h = PI / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let tau = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * (n as f64 * tau - t * tau.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn reference_values() {
        // scipy.special.jv
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_3),
            (1, 10.0, 0.043_472_746_168_861_6),
            (0, 50.0, 0.055_812_327_669_251_8),
            (1, 50.0, -0.097_511_828_125_175_14),
        ];
        for (n, t, v) in cases {
            let got = if n == 0 { j0(t) } else { j1(t) };
            assert!((got - v).abs() < 1e-11, "J{n}({t}) = {got}, want {v}");
        }
    }

    #[test]
    fn matches_integral_representation_across_branch_point() {
        for i in 0..400 {
            let t = 0.05 * i as f64 + 0.01;
            for n in 0..3 {
                let got = bessel_j(n, t);
                let want = bessel_integral(n, t);
                assert!((got - want).abs() < 2e-10, "J{n}({t}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn profiles_are_normalized_and_continuous() {
        for m in 1..=3 {
            let (b, db) = sphere_profile(m, 0.0);
            assert_eq!(b, 1.0);
            assert_eq!(db, 0.0);
            for &t in &[0.5, SERIES_LIMIT] {
                let lo = sphere_profile(m, t * (1.0 - 1e-12));
                let hi = sphere_profile(m, t * (1.0 + 1e-12));
                assert!((lo.0 - hi.0).abs() < 1e-10);
                assert!((lo.1 - hi.1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn profile_derivatives_match_finite_differences() {
        let h = 1e-4;
        for m in 1..=3 {
            for i in 1..200 {
                let t = 0.137 * i as f64;
                let fd = (sphere_profile(m, t + h).0 - sphere_profile(m, t - h).0) / (2.0 * h);
                let an = sphere_profile(m, t).1;
                assert!((fd - an).abs() < 5e-8, "m={m} t={t}: {fd} vs {an}");
            }
        }
    }
}
