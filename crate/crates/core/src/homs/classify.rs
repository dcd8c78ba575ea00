//! Black-box classification of homomorphisms and the null-space split.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{hom_residual, Family, FamilyTag, Hom, HomSpec};
use crate::error::{Error, Result};
use crate::group::{Point, RealGroup};
use crate::linalg::{identity, least_squares, mat_sub, null_basis, orthonormal_complement, outer, Matrix};
use crate::numerics::{dot, norm2, norm_inf, rel_dev};
use crate::sampling::{real_member_log_eta, SeededRng};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Relative threshold below which `sigma(K(nu))` counts as zero.
    pub zero_tol: f64,
    /// Allowed spread of the estimated power index across probes.
    pub index_tol: f64,
    /// Allowed homomorphism residual on the probe pairs.
    pub residual_tol: f64,
    pub probes: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            zero_tol: 1e-8,
            index_tol: 1e-6,
            residual_tol: 1e-8,
            probes: 64,
            seed: 0,
        }
    }
}

/// One logged probe: the point and `sigma(K(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub x: Vec<f64>,
    pub sigma_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedHom {
    pub family: FamilyTag,
    pub spec: HomSpec,
    /// Max relative deviation between the map and the fitted spec.
    pub fit_residual: f64,
    pub probe_log: Vec<ProbeRecord>,
}

fn probe_points(dom: &RealGroup, n: usize, seed: u64) -> Vec<Point<f64>> {
    let mut rng = SeededRng::seed_from_u64(seed);
    (0..n).map(|_| real_member_log_eta(&mut rng, dom, 1.0)).collect()
}

fn is_zero_image(s: f64, image: &[f64], tol: f64) -> bool {
    s.abs() <= tol * (1.0 + norm_inf(image))
}

/// Identify which family a black-box homomorphism belongs to and fit its
/// parameters.
///
/// The decisive test is whether `K` maps `N(rho)` into `N(sigma)`: probes
/// along an orthonormal basis `nu_i` of `N(rho)` give `sigma(K(nu_i))`.
///
/// - all zero: the map is `M x` when `rho = 0` or the null part is nonzero;
///   otherwise it is radial and the index `gamma` is read off
///   `log(1 + sigma(K(x))) / log(1 + rho(x))` (power), or `sigma o K = 0`
///   (log);
/// - some nonzero with `rho = 0`: the map is exponential with
///   `kap(e_j) = log(1 + sigma(K(e_j)))`.
///
/// One-dimensional linear maps and rank-one linear maps with zero null part
/// are reported in the power form with `gamma = 1`; the two descriptions
/// coincide there.
pub fn classify_hom<F>(k: &F, dom: &RealGroup, cod: &RealGroup, opts: &ClassifyOptions) -> Result<ClassifiedHom>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let rho = dom.rho().coeffs().to_vec();
    let sigma = cod.rho().coeffs().to_vec();
    let (dx, dy) = (rho.len(), sigma.len());

    let pts = probe_points(dom, 2 * opts.probes, opts.seed);
    let pairs: Vec<_> = pts.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    let residual = hom_residual(k, dom, cod, &pairs, opts.residual_tol)?;
    if !residual.passed {
        return Err(Error::NotHomomorphic {
            residual: residual.max_deviation,
            tol: opts.residual_tol,
        });
    }

    let mut probe_log: Vec<ProbeRecord> = Vec::new();
    let mut record = |x: &[f64], kx: &[f64]| {
        probe_log.push(ProbeRecord { x: x.to_vec(), sigma_k: dot(&sigma, kx) });
    };

    let nulls = null_basis(&rho);
    let null_images: Vec<Vec<f64>> = nulls.iter().map(|nu| k(nu)).collect();
    for (nu, img) in nulls.iter().zip(&null_images) {
        if img.len() != dy {
            return Err(Error::DimensionMismatch { expected: dy, got: img.len() });
        }
        record(nu, img);
    }
    let null_sigma: Vec<f64> = null_images
        .iter()
        .map(|img| {
            let s = dot(&sigma, img);
            if is_zero_image(s, img, opts.zero_tol) { 0.0 } else { s }
        })
        .collect();

    let all_images_zero = pts.iter().all(|x| norm_inf(&k(x.coords())) <= opts.zero_tol)
        && null_images.iter().all(|img| norm_inf(img) <= opts.zero_tol);
    let rho_zero = rho.iter().all(|c| *c == 0.0);

    let family = if all_images_zero {
        Family::Zero
    } else if null_sigma.iter().all(|s| *s == 0.0) {
        let u: Vec<f64> = if rho_zero {
            vec![0.0; dx]
        } else {
            let n2 = dot(&rho, &rho);
            rho.iter().map(|c| c / n2).collect()
        };
        let null_part_zero = null_images.iter().all(|img| norm_inf(img) <= opts.zero_tol);
        if rho_zero || !null_part_zero {
            // M nu_i = K(nu_i), M u = K(u): M = sum K(nu_i) nu_i^T + K(u) rho^T
            let mut m = vec![vec![0.0; dx]; dy];
            let ku = if rho_zero { vec![0.0; dy] } else { k(&u) };
            for (nu, img) in nulls.iter().zip(&null_images) {
                add_outer(&mut m, img, nu);
            }
            add_outer(&mut m, &ku, &rho);
            canonical_linear(&rho, &sigma, m, &ku, null_part_zero)
        } else {
            let ku = k(&u);
            record(&u, &ku);
            let tau = dot(&sigma, &ku);
            if is_zero_image(tau, &ku, opts.zero_tol) {
                let s2 = dot(&sigma, &sigma);
                let shift = if s2 > 0.0 { tau / s2 } else { 0.0 };
                Family::Log {
                    b: ku.iter().zip(&sigma).map(|(a, s)| (a - shift * s) / LN2).collect(),
                }
            } else {
                let gamma = tau.ln_1p() / LN2;
                let mut spread: f64 = 0.0;
                for x in &pts {
                    let rx = dot(&rho, x.coords());
                    if rx.abs() < 0.05 {
                        continue;
                    }
                    let kx = k(x.coords());
                    record(x.coords(), &kx);
                    let g = dot(&sigma, &kx).ln_1p() / rx.ln_1p();
                    spread = spread.max((g - gamma).abs());
                }
                if !(spread <= opts.index_tol * gamma.abs().max(1.0)) {
                    return Err(Error::InconsistentIndex { spread });
                }
                Family::Power {
                    v: ku.iter().map(|a| a / tau).collect(),
                    gamma,
                }
            }
        }
    } else if rho_zero {
        let mut kap = vec![0.0; dx];
        for (j, kj) in kap.iter_mut().enumerate() {
            let e = Point::basis(dx, j, 1.0);
            let img = k(e.coords());
            record(e.coords(), &img);
            *kj = dot(&sigma, &img).ln_1p();
        }
        let n2 = dot(&kap, &kap);
        let w: Vec<f64> = kap.iter().map(|c| c * LN2 / n2).collect();
        let c = k(&w);
        Family::Exp { c, kap }
    } else {
        return Err(Error::ConstraintViolation(
            "K moves N(rho) off N(sigma) while rho != 0; no family matches".into(),
        ));
    };

    let spec = HomSpec::new(rho.clone(), sigma.clone(), family);
    let hom = Hom::new(spec.clone())?;
    let mut fit_residual: f64 = 0.0;
    for x in pts.iter().map(|p| p.coords()).chain(nulls.iter().map(Vec::as_slice)) {
        fit_residual = fit_residual.max(rel_dev(&k(x), &hom.apply(x)));
    }
    Ok(ClassifiedHom {
        family: spec.tag(),
        spec,
        fit_residual,
        probe_log,
    })
}

fn add_outer(m: &mut Matrix, a: &[f64], b: &[f64]) {
    for (row, ai) in m.iter_mut().zip(a) {
        for (mij, bj) in row.iter_mut().zip(b) {
            *mij += ai * bj;
        }
    }
}

/// `M = K(u) rho^T` with `sigma(K(u)) = 1` is the power map with `gamma = 1`.
fn canonical_linear(rho: &[f64], sigma: &[f64], matrix: Matrix, ku: &[f64], null_part_zero: bool) -> Family {
    let rho_zero = rho.iter().all(|c| *c == 0.0);
    if !rho_zero && null_part_zero && (dot(sigma, ku) - 1.0).abs() <= 1e-12 {
        Family::Power { v: ku.to_vec(), gamma: 1.0 }
    } else {
        Family::Linear { matrix }
    }
}

/// Put a spec in the form [`classify_hom`] reports, for round-trip
/// comparisons.
///
/// Parameters within `1e-12` of zero (e.g. `b` for a one-dimensional
/// codomain, where `sigma(b) = 0` forces `b = 0` up to rounding) make the
/// map the zero map.
pub fn canonical_spec(spec: &HomSpec) -> HomSpec {
    const ZERO: f64 = 1e-12;
    let tiny = |v: &[f64]| norm_inf(v) <= ZERO;
    let mut out = spec.clone();
    match &spec.family {
        Family::Linear { matrix } if matrix.iter().all(|row| tiny(row)) => out.family = Family::Zero,
        Family::Linear { matrix } => {
            let nulls = null_basis(&spec.rho);
            let null_zero = nulls
                .iter()
                .all(|nu| norm_inf(&crate::linalg::mat_vec(matrix, nu)) <= 1e-12);
            if null_zero && norm2(&spec.rho) > 0.0 {
                let n2 = dot(&spec.rho, &spec.rho);
                let u: Vec<f64> = spec.rho.iter().map(|c| c / n2).collect();
                let ku = crate::linalg::mat_vec(matrix, &u);
                out.family = canonical_linear(&spec.rho, &spec.sigma, matrix.clone(), &ku, true);
            }
        }
        Family::Power { v, gamma } if gamma.abs() <= ZERO || tiny(v) => out.family = Family::Zero,
        Family::Log { b } if tiny(b) => out.family = Family::Zero,
        Family::Exp { c, kap } if tiny(c) || tiny(kap) => out.family = Family::Zero,
        _ => {}
    }
    out
}

/// `N(rho) = V0 + <w>` with `V0 = N(rho) ∩ N(sigma o K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSplit {
    /// Orthonormal basis of `V0`.
    pub basis_v0: Vec<Vec<f64>>,
    /// Scaled so that `sigma(K(w)) = 1`; absent when `K(N(rho))` lies in `N(sigma)`.
    pub w: Option<Vec<f64>>,
    /// Projection onto `V0` along `<w>` and the radial direction.
    pub proj0: Matrix,
    /// Projection onto `<w>`.
    pub proj1: Matrix,
}

/// Decompose the null space of `rho` using `kap(x) = log(1 + sigma(K(x)))`,
/// which is linear on `N(rho)` for a homomorphism.
pub fn null_split<F>(k: &F, dom: &RealGroup, cod: &RealGroup, zero_tol: f64) -> Result<NullSplit>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let rho = dom.rho().coeffs();
    let sigma = cod.rho().coeffs();
    let d = rho.len();
    let nulls = null_basis(rho);
    let mut kap = Vec::with_capacity(nulls.len());
    for nu in &nulls {
        let img = k(nu);
        if img.len() != sigma.len() {
            return Err(Error::DimensionMismatch { expected: sigma.len(), got: img.len() });
        }
        let s = dot(sigma, &img);
        if s <= -1.0 {
            return Err(Error::NonMember { eta: 1.0 + s });
        }
        kap.push(if is_zero_image(s, &img, zero_tol) { 0.0 } else { s.ln_1p() });
    }

    let proj_n = if rho.iter().all(|c| *c == 0.0) {
        identity(d)
    } else {
        let n2 = dot(rho, rho);
        let u: Vec<f64> = rho.iter().map(|c| c / n2).collect();
        mat_sub(&identity(d), &outer(&u, rho))
    };
    let lift = |coeffs: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; d];
        for (c, nu) in coeffs.iter().zip(&nulls) {
            v.iter_mut().zip(nu).for_each(|(a, b)| *a += c * b);
        }
        v
    };

    let k2 = dot(&kap, &kap);
    if k2 == 0.0 {
        return Ok(NullSplit {
            basis_v0: nulls,
            w: None,
            proj0: proj_n,
            proj1: vec![vec![0.0; d]; d],
        });
    }
    let w = lift(&kap.iter().map(|c| c * LN2 / k2).collect::<Vec<_>>());
    let basis_v0 = orthonormal_complement(&[kap.clone()], kap.len())
        .iter()
        .map(|c| lift(c))
        .collect();
    let w_hat: Vec<f64> = {
        let n = norm2(&w);
        w.iter().map(|c| c / n).collect()
    };
    let proj1 = outer(&w_hat, &w_hat);
    let proj0 = mat_sub(&proj_n, &proj1);
    Ok(NullSplit { basis_v0, w: Some(w), proj0, proj1 })
}

/// Least-squares fit of `g(x) - 1 = sigma(K(x))` for an injective `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaFit {
    pub sigma: Vec<f64>,
    pub residual: f64,
    pub rank: usize,
    /// The images do not span `Y`; `sigma` is the minimum-norm solution.
    pub rank_deficient: bool,
}

pub fn corollary2_sigma_fit<K, G>(k: &K, g: &G, samples: &[Point<f64>]) -> Result<SigmaFit>
where
    K: Fn(&[f64]) -> Vec<f64> + ?Sized,
    G: Fn(&[f64]) -> f64 + ?Sized,
{
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    let images: Vec<Vec<f64>> = samples.iter().map(|x| k(x.coords())).collect();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if rel_dev(&images[i], &images[j]) <= 1e-12 && samples[i] != samples[j] {
                return Err(Error::NotInjective(i, j));
            }
        }
    }
    let rhs: Vec<f64> = samples.iter().map(|x| g(x.coords()) - 1.0).collect();
    let fit = least_squares(&images, &rhs);
    let dy = images[0].len();
    Ok(SigmaFit {
        sigma: fit.solution,
        residual: fit.residual,
        rank: fit.rank,
        rank_deficient: fit.rank < dy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homs::{construct_4b_exp, Hom};

    fn groups(rho: &[f64], sigma: &[f64]) -> (RealGroup, RealGroup) {
        (RealGroup::real(rho).unwrap(), RealGroup::real(sigma).unwrap())
    }

    fn classify(spec: HomSpec) -> ClassifiedHom {
        let hom = Hom::new(spec).unwrap();
        let k = |x: &[f64]| hom.apply(x);
        classify_hom(&k, hom.domain(), hom.codomain(), &ClassifyOptions::default()).unwrap()
    }

    #[test]
    fn classifies_power() {
        let c = classify(HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Power { v: vec![1.0, 0.0], gamma: 2.0 }));
        assert_eq!(c.family, FamilyTag::Power);
        match c.spec.family {
            Family::Power { gamma, .. } => assert!((gamma - 2.0).abs() < 1e-6),
            _ => unreachable!(),
        }
        assert!(c.fit_residual < 1e-9);
    }

    #[test]
    fn classifies_linear_with_null_part() {
        let m = vec![vec![1.0, 0.0], vec![2.0, 3.0]];
        let c = classify(HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Linear { matrix: m.clone() }));
        assert_eq!(c.family, FamilyTag::Linear);
        let Family::Linear { matrix } = c.spec.family else { unreachable!() };
        for (r, s) in matrix.iter().zip(&m) {
            assert!(rel_dev(r, s) < 1e-12);
        }
    }

    #[test]
    fn classifies_exp_log_zero() {
        let c = classify(construct_4b_exp(&[1.0, 0.0], &[1.0, 0.0], &[LN2, 0.0]).unwrap());
        assert_eq!(c.family, FamilyTag::Exp);
        let c = classify(HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Log { b: vec![0.0, 1.0] }));
        assert_eq!(c.family, FamilyTag::Log);
        let c = classify(HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Zero));
        assert_eq!(c.family, FamilyTag::Zero);
    }

    #[test]
    fn rejects_non_homomorphism() {
        let (dom, cod) = groups(&[1.0], &[1.0]);
        let k = |x: &[f64]| vec![x[0] * x[0]];
        assert!(matches!(
            classify_hom(&k, &dom, &cod, &ClassifyOptions::default()),
            Err(Error::NotHomomorphic { .. })
        ));
    }

    #[test]
    fn null_split_example() {
        let (dom, cod) = groups(&[0.0, 0.0], &[1.0, 0.0]);
        let hom = Hom::new(construct_4b_exp(&[1.0, 0.0], &[1.0, 0.0], &[LN2, 0.0]).unwrap()).unwrap();
        let s = null_split(&|x: &[f64]| hom.apply(x), &dom, &cod, 1e-8).unwrap();
        let w = s.w.unwrap();
        assert!(rel_dev(&w, &[1.0, 0.0]) < 1e-12);
        assert_eq!(s.basis_v0.len(), 1);
        assert!(s.basis_v0[0][0].abs() < 1e-12);
        assert!((s.basis_v0[0][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_fit_recovers_linear_functional() {
        let (dom, _) = groups(&[1.0, 0.0], &[1.0, 0.0]);
        let samples = probe_points(&dom, 40, 3);
        let k = |x: &[f64]| x.to_vec();
        let g = |x: &[f64]| 1.0 + x[0];
        let fit = corollary2_sigma_fit(&k, &g, &samples).unwrap();
        assert!(rel_dev(&fit.sigma, &[1.0, 0.0]) < 1e-10);
        assert!(!fit.rank_deficient);
        let z = |_: &[f64]| vec![0.0, 0.0];
        assert!(matches!(corollary2_sigma_fit(&z, &g, &samples), Err(Error::NotInjective(0, 1))));
    }
}
