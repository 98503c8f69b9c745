//! Decay of the frame-averaged square functions `I` and `Ĩ` up to
//! `|ξ| = 10³`, and the growth of `Ĩ` in codimension one.
use slab::experiments::{decay_run, log_radii};

fn main() -> slab::Result<()> {
    let radii = log_radii(-1.0, 3.0, 40);
    for (d, j) in [(3, 1), (4, 2), (2, 1), (3, 2)] {
        for level in [4, 5] {
            let start = std::time::Instant::now();
            let run = decay_run(d, j, level, &radii)?;
            let blocks: Vec<String> = run.block_maxima.iter().map(|b| format!("{b:.3}")).collect();
            println!(
                "d={d} j={j} L={level} envelope={:.5} sup Ĩ={:.3} growing={} blocks=[{}] ({:.1?})",
                run.envelope_constant,
                run.i_tilde_sup,
                run.growing,
                blocks.join(", "),
                start.elapsed()
            );
        }
    }
    Ok(())
}
