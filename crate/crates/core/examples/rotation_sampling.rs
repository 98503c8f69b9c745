//! Haar-random rotations: orthogonality, reproducibility by draw index,
//! and the first two moments of the trace (0, and 1 for d ≥ 3 or 2 for d = 2).
use slab::corpus::{generate, CorpusKind, CorpusSpec};
use slab::grid::GridSpec;
use slab::rotation::{pin_probability, HaarSampler};
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    for d in 2..=4 {
        let mut sampler = HaarSampler::new(d, 7)?;
        let draws = 20_000;
        let (mut tr, mut tr2, mut orth) = (0.0, 0.0, 0.0f64);
        for _ in 0..draws {
            let u = sampler.draw();
            let m = u.matrix();
            let t = m.trace();
            tr += t;
            tr2 += t * t;
            let err = (m.transpose() * m - nalgebra::DMatrix::<f64>::identity(d, d)).abs().max();
            orth = orth.max(err);
        }
        let again = HaarSampler::new(d, 7)?.draw_at(123);
        let same = sampler.draw_at(123).matrix() == again.matrix();
        println!(
            "d={d} E[tr U]={:+.4} E[tr² U]={:.4} max|UᵀU−I|={orth:.1e} draw 123 reproducible: {same}",
            tr / draws as f64,
            tr2 / draws as f64
        );
    }

    // A full box contains every rotated copy of a small simplex.
    let grid = GridSpec::new(3, 32.0, 32, 1)?;
    let a = generate(&CorpusSpec::new(CorpusKind::Lattice { spacing: 1.0 }, grid))?;
    let simplex = Simplex::regular(2, 3)?;
    let mut sampler = HaarSampler::new(3, 1)?;
    let p = pin_probability(&a, &[0.0, 0.0, 0.0], 4.0, &simplex, 1000, &mut sampler)?;
    println!("pin probability in a full box: {} ± {}", p.estimate, p.stderr);
    Ok(())
}
