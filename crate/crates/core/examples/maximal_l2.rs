//! Lower bounds for the L² norm of the spherical maximal operator in R³,
//! and their stability under grid and scale-grid refinement.
use slab::corpus::operator_corpus;
use slab::grid::GridSpec;
use slab::maximal::{l2_ratio_maximal, LambdaGrid};
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    let simplex = Simplex::standard(1, 3)?;
    for (n, q) in [(64, 8), (64, 16), (128, 8)] {
        let start = std::time::Instant::now();
        let grid = GridSpec::new(3, 64.0, n, 1)?;
        let corpus = operator_corpus(grid, 6, (1.0 / 32.0, 0.4), 2, 15.0, 21)?;
        let report = l2_ratio_maximal(&corpus, &simplex, 1, &LambdaGrid::new(1.0, 16.0, q)?, 3)?;
        let ratios: Vec<String> = report.ratios.iter().map(|r| format!("{r:.4}")).collect();
        println!("n={n} q={q} max={:.4} ratios=[{}] ({:.1?})", report.max_ratio, ratios.join(", "), start.elapsed());
    }
    Ok(())
}
