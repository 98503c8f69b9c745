//! Pinned dichotomy in three dimensions: a witness search over sampled
//! points of the set, with the annulus mass as the fallback.
use slab::corpus::{generate, shell_radii_arithmetic, CorpusKind, CorpusSpec};
use slab::dichotomy::{check_pinned, DichotomyParams, PinnedSearch};
use slab::grid::GridSpec;
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(3, 128.0, 128, 1)?;
    let simplex = Simplex::standard(1, 3)?;
    let (eta, l0, l1) = (0.5, 5.0, 8.0);
    let sets = vec![
        ("full", CorpusKind::Random { delta: 1.0, seed: 0 }, 0.1),
        ("random 0.5", CorpusKind::Random { delta: 0.5, seed: 3 }, 0.1),
        ("shells", CorpusKind::Shells { radii: shell_radii_arithmetic(20.0, 10.5, 115.0), thickness: 2.5 }, 0.04),
    ];
    for (name, kind, eps) in sets {
        let start = std::time::Instant::now();
        let a = generate(&CorpusSpec::new(kind, grid))?;
        let p = DichotomyParams::pinned(eps, eta, l0, l1);
        let p = p.with_calibration(p.required_c_cal(), 1.0);
        let r = check_pinned(&a, &simplex, &p, 0.0, &PinnedSearch::default(), 11)?;
        println!(
            "{name:10} δ={:.4} best_min_p={:.4} threshold={:.4} witness={} tried={} mass_ratio={:.4} branch={:?} ({:.1?})",
            r.density,
            r.count_term,
            r.threshold,
            r.witness.is_some(),
            r.candidates_tried,
            r.annulus_mass_ratio,
            r.branch,
            start.elapsed()
        );
    }
    Ok(())
}
