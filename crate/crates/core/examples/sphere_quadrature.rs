//! Configuration spheres of a regular simplex and the convergence of the
//! sphere rules to the closed-form Fourier transform of surface measure.
use num_complex::Complex64;
use slab::simplex::{Frame, Simplex};
use slab::sphere::{config_sphere, sphere_ft, sphere_rule};

fn main() -> slab::Result<()> {
    let xi = [0.9, -0.4, 0.7, 0.2];
    for (d, j) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        let simplex = Simplex::regular(j, d)?;
        let frame = Frame::canonical(&simplex, j - 1)?;
        let cs = config_sphere(&simplex, j, &frame)?;
        let exact = sphere_ft(&cs, &xi[..d]);
        print!("d={d} j={j} dim S={} radius={:.4}:", cs.intrinsic_dim(), cs.radius());
        for level in 2..=6 {
            let rule = sphere_rule(&cs, level);
            let approx = rule.integrate_complex(|x| {
                let phase = -2.0 * std::f64::consts::PI * x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>();
                Complex64::from_polar(1.0, phase)
            });
            print!(" L{level} {:.1e}", (approx - exact).norm());
        }
        println!();
    }
    Ok(())
}
