//! Lacunary scale sequences and the total annulus mass they see. Disjoint
//! annuli carry at most the full L² mass of the set.
use slab::corpus::{generate, CorpusKind, CorpusSpec};
use slab::dichotomy::{annulus_mass_sum, default_sequence_length, sequence_builder, SequenceMode};
use slab::grid::GridSpec;

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(2, 256.0, 256, 2)?;
    let a = generate(&CorpusSpec::new(CorpusKind::Random { delta: 0.5, seed: 2 }, grid))?;
    println!("J for ε = 0.1, C = 1: {}", default_sequence_length(0.1, 1.0));
    for (eta, count, mode) in [(0.5, 2, SequenceMode::Single), (0.7, 3, SequenceMode::Single), (0.7, 3, SequenceMode::Pair)] {
        let seq = sequence_builder(eta, count, mode, 1.0, 1.5, Some(grid.side))?;
        let mass = annulus_mass_sum(&a, &seq.annuli)?;
        println!("η={eta} {mode:?}: scales {:.2?}", seq.scales);
        println!("    annuli {:.4?} disjoint {} total mass {mass:.4}", seq.annuli, seq.disjoint);
    }
    match sequence_builder(0.5, 10, SequenceMode::Single, 1.0, 1.0, Some(grid.side)) {
        Err(e) => println!("ten steps at η = 0.5: {e}"),
        Ok(_) => println!("ten steps at η = 0.5 fit"),
    }
    Ok(())
}
