//! Unpinned dichotomy on the shipped planar corpus: the floor c0 is fitted
//! on the calibration variant and then applied to the evaluation variant.
use slab::dichotomy::calibrate_floor;
use slab::experiments::{apply_floor, dichotomy_corpus_run, shipped_c_cal, unpinned_corpus};

fn main() -> slab::Result<()> {
    let c_cal = shipped_c_cal()?;
    let fit = dichotomy_corpus_run(&unpinned_corpus(1)?, &[], c_cal, 0.0, 5, 7)?;
    let reports: Vec<_> = fit.into_iter().map(|r| r.report).collect();
    let c0 = calibrate_floor(&reports).unwrap_or(1.0);
    println!("c_cal = {:.0}, c0 = {c0:.2}", c_cal.0);

    let raw = dichotomy_corpus_run(&unpinned_corpus(0)?, &[], c_cal, 0.0, 5, 7)?;
    for r in apply_floor(&raw, c0) {
        let p = &r.report;
        println!(
            "{:28} δ={:.4} count={:.4} threshold={:.4} mass ratio={:.4} floor={:.4} {:?}",
            r.name, p.density, p.count_term, p.threshold, p.annulus_mass_ratio, p.calibrated_floor, p.branch
        );
    }
    Ok(())
}
