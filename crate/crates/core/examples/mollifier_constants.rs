//! Builds the mollifier in each supported dimension and prints its
//! calibrated constants.
use slab::mollifier::Mollifier;

fn main() -> slab::Result<()> {
    for d in 2..=4 {
        let start = std::time::Instant::now();
        let m = Mollifier::build(d)?;
        let c = m.constants();
        println!(
            "d={d} C_psi={:.4} C_tail={:.4} C_shift={:.4} radius={:.2} integral-1={:.2e} built in {:.2?}",
            c.c_psi,
            c.c_tail,
            c.c_shift,
            c.tabulation_radius,
            m.integral() - 1.0,
            start.elapsed()
        );
    }
    Ok(())
}
