//! Independent closed forms and reference values checked against the
//! library.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use slab::averages::{count_functional, ConfigurationRule};
use slab::corpus::{generate, CorpusKind, CorpusSpec};
use slab::dichotomy::{lemma42_check, sequence_builder, SequenceMode};
use slab::grid::{GridField, GridSpec};
use slab::maximal::square_functions;
use slab::mollifier::Mollifier;
use slab::rotation::{pin_probability, HaarSampler};
use slab::simplex::{Frame, Simplex};
use slab::sphere::{config_sphere, sphere_ft};

/// Composite Simpson on [a, b].
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn bessel_j(n: i32, t: f64) -> f64 {
    simpson(|th| (n as f64 * th - t * th.sin()).cos(), 0.0, PI, 2000) / PI
}

fn unit_sphere(d: usize) -> slab::sphere::ConfigSphere {
    config_sphere(&Simplex::standard(1, d).unwrap(), 1, &Frame::empty()).unwrap()
}

#[test]
fn sphere_transforms_match_classical_closed_forms() {
    for &r in &[0.05, 0.3, 0.77, 1.9, 6.4] {
        let t = 2.0 * PI * r;
        let circle = sphere_ft(&unit_sphere(2), &[r, 0.0]).re;
        assert_relative_eq!(circle, bessel_j(0, t), epsilon = 1e-9);
        let two = sphere_ft(&unit_sphere(3), &[0.0, r, 0.0]).re;
        assert_relative_eq!(two, t.sin() / t, epsilon = 1e-12);
        let three = sphere_ft(&unit_sphere(4), &[0.0, 0.0, 0.0, r]).re;
        assert_relative_eq!(three, 2.0 * bessel_j(1, t) / t, epsilon = 1e-9);
    }
}

#[test]
fn first_square_function_is_the_squared_transform() {
    // With j = 1 there is no frame to average over.
    let s = Simplex::standard(1, 3).unwrap();
    let radii = [0.0, 0.2, 0.5, 1.3];
    for row in square_functions(&s, 1, &radii, 4).unwrap() {
        let t = 2.0 * PI * row.r;
        let expected = if t == 0.0 { 1.0 } else { (t.sin() / t).powi(2) };
        assert_relative_eq!(row.i, expected, epsilon = 1e-10);
    }
}

#[test]
fn gaussian_transform_is_gaussian() {
    // exp(−π|x|²/s²) has transform s^d exp(−π s²|ξ|²).
    let sw = 3.0;
    let grid = GridSpec::new(2, 32.0, 64, 1).unwrap();
    let f = GridField::from_fn(grid, |x| (-PI * (x[0] * x[0] + x[1] * x[1]) / (sw * sw)).exp());
    let s = f.forward_transform();
    for flat in [0, 1, 3, 66, 130, 700] {
        let xi = s.frequency(flat);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let expected = sw * sw * (-PI * sw * sw * r2).exp();
        let got = s.coeffs()[flat];
        assert!((got.re - expected).abs() < 1e-10 && got.im.abs() < 1e-10, "ξ={xi:?} {got} vs {expected}");
    }
}

#[test]
fn full_box_count_matches_the_direction_average() {
    // Mean over directions of |B ∩ (B − λu)| for a square of side N.
    let (n, lambda) = (128.0, 12.0);
    let exact = n * n - 4.0 * n * lambda / PI + lambda * lambda / PI;
    let grid = GridSpec::new(2, n, 128, 2).unwrap();
    let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 1.0, seed: 0 }, grid)).unwrap();
    let s = Simplex::standard(1, 2).unwrap();
    let rule = ConfigurationRule::new(&s, 1, 6).unwrap();
    let c = count_functional(&a, lambda, &s, &rule, 4096, 1).unwrap();
    assert!(c.full_grid);
    assert_relative_eq!(c.value, exact, max_relative = 5e-3);
}

#[test]
fn haar_trace_moments() {
    // E tr U = 0 and E (tr U)² = 1 on SO(d), d ≥ 3.
    for d in [3, 4] {
        let s = HaarSampler::new(d, 99).unwrap();
        let n = 40_000u64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 0..n {
            let t = s.draw_at(i).matrix().trace();
            m1 += t;
            m2 += t * t;
        }
        let (m1, m2) = (m1 / n as f64, m2 / n as f64);
        assert!(m1.abs() < 0.03, "d={d} mean {m1}");
        assert!((m2 - 1.0).abs() < 0.05, "d={d} second moment {m2}");
    }
}

#[test]
fn full_box_pins_every_copy() {
    let grid = GridSpec::new(3, 32.0, 32, 1).unwrap();
    let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 1.0, seed: 0 }, grid)).unwrap();
    let s = Simplex::regular(2, 3).unwrap();
    let mut sampler = HaarSampler::new(3, 4).unwrap();
    let p = pin_probability(&a, &[1.0, -2.0, 0.5], 6.0, &s, 500, &mut sampler).unwrap();
    assert_eq!(p.estimate, 1.0);
}

#[test]
fn mollifier_is_a_probability_density_with_band_limited_transform() {
    for d in 2..=4 {
        let m = Mollifier::shared(d).unwrap();
        assert_relative_eq!(m.integral(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(m.hat(0.0), 1.0, epsilon = 1e-12);
        for rho in [1.0, 1.2, 3.0] {
            assert_eq!(m.hat(rho), 0.0);
        }
        assert!(m.psi_radial(0.0) > 0.0 && m.psi_radial(5.0) > 0.0);
    }
}

#[test]
fn scale_steps_and_annuli_follow_the_lacunary_rule() {
    // Consecutive scales satisfy λ⁽ʲ⁾ = η⁴λ⁽ʲ⁺¹⁾ and Ω_λ = [η²/λ, η⁻²/λ].
    let eta: f64 = 0.3;
    let seq = sequence_builder(eta, 4, SequenceMode::Single, 2.0, 1.0, None).unwrap();
    for w in seq.scales.windows(2) {
        assert_relative_eq!(w[0].0, eta.powi(4) * w[1].0, max_relative = 1e-12);
    }
    for (&(l, _), &(lo, hi)) in seq.scales.iter().zip(&seq.annuli) {
        assert_relative_eq!(lo, eta * eta / l, max_relative = 1e-12);
        assert_relative_eq!(hi, 1.0 / (eta * eta * l), max_relative = 1e-12);
    }
    assert!(seq.disjoint);
}

#[test]
fn error_term_crossover_and_pointwise_bound() {
    // (λ|ξ|)^{-1/2} = η⁴(λ|ξ|)² at λ|ξ| = η^{-8/5}, where both equal η^{4/5}.
    let grid = GridSpec::new(2, 64.0, 64, 2).unwrap();
    let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.5, seed: 3 }, grid)).unwrap();
    let s = Simplex::standard(1, 2).unwrap();
    let eta: f64 = 0.1;
    let r = lemma42_check(&a, eta, 4.0, &s, 1, 4).unwrap();
    assert_relative_eq!(r.crossover, eta.powf(-1.6), max_relative = 1e-12);
    assert!(r.min_bound_holds);
    assert!(r.min_bound_sup <= eta.powf(0.8) * (1.0 + 1e-9));
    assert!(r.cauchy_schwarz);
}
