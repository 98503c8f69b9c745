//! Spectral energy of a random indicator: Parseval, and the share of
//! mass in dyadic annuli, which never exceeds 1 in total.
use slab::corpus::{density, generate, CorpusKind, CorpusSpec};
use slab::grid::{annulus_mass_direct, GridSpec};

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(2, 64.0, 64, 2)?;
    let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.3, seed: 5 }, grid))?;
    let s = a.forward_transform();
    println!("density {:.4}  |A| {:.1}  Σ|Â|² {:.6}", density(&a), a.measure(), s.energy());

    let nyq = grid.nyquist_radius();
    let mut lo = 1.0 / 64.0;
    let mut bands = Vec::new();
    while lo < nyq {
        bands.push((lo, (2.0 * lo).min(nyq)));
        lo *= 2.0;
    }
    let masses = s.annulus_masses(&bands)?;
    for ((lo, hi), m) in bands.iter().zip(&masses) {
        println!("  [{lo:.4}, {hi:.4})  {:.5}", m / a.measure());
    }
    println!("sum over annuli / |A| = {:.5}", masses.iter().sum::<f64>() / a.measure());

    let small = GridSpec::new(2, 16.0, 16, 2)?;
    let b = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.5, seed: 9 }, small))?;
    let fast = b.forward_transform().annulus_mass(0.1, 0.3)?;
    let direct = annulus_mass_direct(&b, 0.1, 0.3)?;
    println!("FFT vs direct sum on [0.1, 0.3): {fast:.10} {direct:.10}");
    Ok(())
}
