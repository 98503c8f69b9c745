//! Nested quadrature for the multilinear spherical average, and the count
//! functional of a random set, which sits just below δ^{k+1} times the box volume, short by the
//! configurations that leave the box.
use slab::averages::{count_functional, nested_average, AverageRequest, ConfigurationRule, XSet};
use slab::corpus::{density, generate, CorpusKind, CorpusSpec};
use slab::grid::{GridField, GridSpec};
use slab::simplex::Simplex;

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(2, 64.0, 64, 2)?;
    let simplex = Simplex::standard(1, 2)?;
    let simplex2 = Simplex::standard(2, 3)?;
    let grid3 = GridSpec::new(3, 32.0, 32, 2)?;
    let g3 = GridField::from_fn(grid3, |x| (-(x.iter().map(|c| c * c).sum::<f64>()) / 50.0).exp());
    let one3 = GridField::constant(grid3, 1.0);
    let avg = nested_average(&AverageRequest {
        inputs: vec![&one3, &g3],
        lambda: 4.0,
        simplex: &simplex2,
        level: 4,
        xs: XSet::Points(vec![vec![0.0; 3], vec![2.0, -1.0, 0.5]]),
    })?;
    println!("A(1, g)(x) at two points: {avg:.6?}");

    for delta in [0.2, 0.5, 0.8] {
        let a = generate(&CorpusSpec::new(CorpusKind::Random { delta, seed: 3 }, grid))?;
        let rule = ConfigurationRule::new(&simplex, 1, 5)?;
        let c = count_functional(&a, 6.0, &simplex, &rule, 4096, 1)?;
        let dens = density(&a);
        println!(
            "δ={dens:.3}  count/|box| = {:.4}  δ^(k+1) = {:.4}",
            c.value / grid.box_volume(),
            dens * dens
        );
    }
    Ok(())
}
