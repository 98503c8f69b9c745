//! Nested quadrature against rotation Monte Carlo for random simplices.
use slab::experiments::{equivalence_run, EquivalenceConfig};

fn main() -> slab::Result<()> {
    for (j, d) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        let start = std::time::Instant::now();
        let report = equivalence_run(&EquivalenceConfig::standard(d, j, 7))?;
        let worst = report.cases.iter().max_by(|a, b| a.z.total_cmp(&b.z)).unwrap();
        println!(
            "j={j} d={d} cases={} failures={} max_z={:.2} (worst: Q={:.6} ±{:.1e}, MC={:.6} ±{:.1e}) {:.1?}",
            report.cases.len(),
            report.failures,
            report.max_z,
            worst.quadrature,
            worst.quadrature_error,
            worst.monte_carlo,
            worst.mc_stderr,
            start.elapsed()
        );
    }
    Ok(())
}
