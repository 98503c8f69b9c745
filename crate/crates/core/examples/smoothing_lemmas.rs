//! The smoothing inequality and the error-term bound on random sets of
//! several densities.
use slab::corpus::{density, generate, CorpusKind, CorpusSpec};
use slab::dichotomy::{lemma41_check, lemma42_check};
use slab::grid::GridSpec;
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(2, 256.0, 256, 2)?;
    let simplex = Simplex::standard(1, 2)?;
    for delta in [0.5, 0.7, 0.9] {
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta, seed: 11 }, grid))?;
        // The largest admissible η and λ for this box.
        let eta = density(&a) / 10.0;
        let r = lemma41_check(&a, eta, eta.powi(4) * grid.side, 1)?;
        println!(
            "δ={delta} smoothing: ratio {:.4}  ∫f·f1 {:.2}  ∫f1² {:.2}  inequality {}",
            r.ratio, r.int_f_f1, r.int_f1_sq, r.parseval_inequality
        );
        let r = lemma42_check(&a, 0.05, 8.0, &simplex, 1, 4)?;
        println!(
            "δ={delta} error term: ratio {:.4}  majorant {:.4}  Cauchy–Schwarz {}  min bound {}",
            r.ratio, r.spectral_majorant, r.cauchy_schwarz, r.min_bound_holds
        );
    }
    Ok(())
}
