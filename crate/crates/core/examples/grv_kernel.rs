//! Kernel limits of general regular variation for the builtin problems.

use popa::grv::{estimate_limit, grv_g, grv_kernel, se_check, GrvProblem, Schedule, BUILTINS};

fn main() -> popa::Result<()> {
    for name in BUILTINS {
        let p = GrvProblem::builtin(name)?;
        let analytic = p.analytic.clone().expect("builtins carry closed forms");
        for x in [0.5, 1.0, 3.0] {
            let k = grv_kernel(&p, &[x])?;
            let g = grv_g(&p, &[x])?;
            println!(
                "{name:>15} x = {x}: K = {:.8} (exact {:.8}), g = {:.6}, {} steps",
                k.scalar(),
                (analytic.kernel)(&[x])[0],
                g.scalar(),
                k.steps
            );
        }
    }

    // a sequence converging like 1/t
    let est = estimate_limit(&Schedule::default(), |t| vec![2.0 + 1.0 / t])?;
    println!("limit of 2 + 1/t: {:.6} after {} steps (t = {:.1e})", est.scalar(), est.steps, est.t_final);

    let se = se_check(&|y: &[f64]| y[0], &[1.0], &[-0.5, 0.0, 1.0, 2.0], &Schedule::default())?;
    println!("phi(y) = y is self-equivarying with eta(v) = {:?}", se.eta_hat);
    Ok(())
}
