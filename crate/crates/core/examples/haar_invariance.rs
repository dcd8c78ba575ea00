//! Monte Carlo Haar measure: `1 / eta` is right invariant, `1 / eta^d` left
//! invariant, and each fails on the other side.

use popa::apps::{haar_invariance_check, haar_invariance_check_with, haar_measure_mc, HaarJob, Side};
use popa::RealGroup;

fn main() -> popa::Result<()> {
    let line = HaarJob::new(RealGroup::real(&[1.0])?, vec![0.0], vec![1.0], Side::Right, 1_000_000, 1)?;
    let e = haar_measure_mc(&line);
    println!("mu((0, 1)) = {:.5} +- {:.5} (log 2 = {:.5})", e.estimate, e.std_error, std::f64::consts::LN_2);

    let g = RealGroup::real(&[1.0, 0.5])?;
    let a = [0.5, -0.3];
    for density in [Side::Right, Side::Left] {
        let job = HaarJob::new(g.clone(), vec![0.0, 0.0], vec![1.0, 1.0], density, 500_000, 2)?;
        for translate in [Side::Right, Side::Left] {
            let r = if translate == density {
                haar_invariance_check(&job, &a)?
            } else {
                haar_invariance_check_with(&job, &a, translate)?
            };
            println!(
                "{density:?} density, {translate:?} translate: {:.4} vs {:.4}, {:.1} SE ({})",
                r.metrics["measure"],
                r.metrics["translated"],
                r.max_deviation,
                if r.passed { "invariant" } else { "not invariant" }
            );
        }
    }
    Ok(())
}
