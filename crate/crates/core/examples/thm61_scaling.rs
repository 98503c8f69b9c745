//! High-frequency maximal operators `M_L` in R³: the corpus-maximal L²
//! ratio against `L/λ0`, compared with a cube-root envelope.
use slab::corpus::operator_corpus;
use slab::grid::GridSpec;
use slab::maximal::{thm61_scaling, LambdaGrid};
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    let start = std::time::Instant::now();
    let grid = GridSpec::new(3, 64.0, 64, 1)?;
    let corpus = operator_corpus(grid, 6, (1.0 / 32.0, 0.4), 2, 15.0, 21)?;
    let sweep: Vec<f64> = (0..=6).map(|i| 2f64.powi(i - 6)).collect();
    let report = thm61_scaling(&corpus, &Simplex::standard(1, 3)?, 1, &LambdaGrid::new(1.0, 16.0, 8)?, &sweep, 3)?;
    print!("{}", report.to_csv());
    println!("C_61={:.4} slope={:.3} pass={} ({:.1?})", report.c61, report.slope, report.pass, start.elapsed());
    Ok(())
}
