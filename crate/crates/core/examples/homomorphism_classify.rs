//! Build homomorphisms from each family, verify them and recover them from
//! their evaluation maps alone.

use popa::homs::{
    classify_hom, construct_4a, construct_4b_exp, hom_residual, hom_residual_sweep, ClassifyOptions, FourAParams, Hom,
    MixedNullRadial,
};
use popa::{Point, RealGroup};

fn main() -> popa::Result<()> {
    let rho = [1.0, 0.0];
    let sigma = [1.0, 0.0];
    let specs = [
        construct_4a(&rho, &sigma, FourAParams::Linear { matrix: vec![vec![1.0, 0.0], vec![2.0, 1.0]] })?,
        construct_4a(&rho, &sigma, FourAParams::Radial { u: vec![1.0, 0.0], k_u: vec![3.0, 1.0] })?,
        construct_4a(&rho, &sigma, FourAParams::Radial { u: vec![1.0, 0.0], k_u: vec![0.0, 2.0] })?,
        construct_4b_exp(&sigma, &[1.0, -1.0], &[0.5, 0.25])?,
    ];
    for spec in specs {
        let hom = Hom::new(spec)?;
        let k = |x: &[f64]| hom.apply(x);
        let sweep = hom_residual_sweep(&k, hom.domain(), hom.codomain(), 10_000, 1, 1e-9);
        let got = classify_hom(&k, hom.domain(), hom.codomain(), &ClassifyOptions::default())?;
        println!(
            "{:>6} spec: residual {:.1e} over {} pairs; classified as {} (fit {:.1e})",
            hom.spec().tag(),
            sweep.max_deviation,
            sweep.samples,
            got.family,
            got.fit_residual
        );
        println!("        {}", serde_json::to_string(&got.spec).expect("spec serializes"));
    }

    // mixing an exponential null part with a radial part breaks the equation
    let probe = MixedNullRadial::probe();
    let (x, y) = probe.probe_pair();
    let dom = RealGroup::real(&probe.rho)?;
    let r = hom_residual(&|z: &[f64]| probe.eval(z), &dom, &dom, &[(Point::new(x)?, Point::new(y)?)], 1e-9)?;
    println!("mixed null/radial map: residual {:.3} (not a homomorphism)", r.max_deviation);
    Ok(())
}
