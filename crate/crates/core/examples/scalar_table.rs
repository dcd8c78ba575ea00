//! The nine cells of continuous homomorphisms between scalar circle groups.

use popa::scalar_homs::{bo_cell_continuity, bo_eval, bo_hom_residual, ext_circle, BoMap, ExtParam};

fn main() -> popa::Result<()> {
    let params = [ExtParam::Zero, ExtParam::finite(1.0)?, ExtParam::Inf];
    let sample = |p: ExtParam| match p {
        ExtParam::Inf => vec![0.5, 1.0, 2.0, 3.0],
        _ => vec![-0.3, 0.0, 0.5, 2.0],
    };
    for rho in params {
        for sigma in params {
            let m = BoMap::new(rho, sigma, 0.75);
            let pts = sample(rho);
            let pairs: Vec<(f64, f64)> = pts.iter().flat_map(|s| pts.iter().map(move |t| (*s, *t))).collect();
            let r = bo_hom_residual(&m, &pairs, 1e-10);
            let t = pts[2];
            println!(
                "rho = {rho:>3}, sigma = {sigma:>3}: psi({t}) = {:>9.5}, residual {:.1e}",
                bo_eval(&m, t)?,
                r.max_deviation
            );
        }
    }
    let one = ExtParam::finite(1.0)?;
    println!("2 o_1 3 = {}", ext_circle(one, 2.0, 3.0)?);
    println!("sigma -> 0 continuity at t = 1: {:.1e}", bo_cell_continuity(one, 1.0, 0.75, 1e-8)?);
    Ok(())
}
