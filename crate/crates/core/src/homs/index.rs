//! Radial index of a homomorphism and the split along a unit direction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Point, RealGroup};
use crate::numerics::{dot, norm_inf, rel_dev};
use crate::report::Report;
use crate::sampling::{chunk_rng, real_member_log_eta};

const LN2: f64 = std::f64::consts::LN_2;

/// `gamma(x) = log2(1 + sigma(K(x)))`, the power index seen along `x`.
/// For the power family with `rho(x) = 1` this returns its `gamma`.
pub fn extract_gamma<F>(k: &F, dom: &RealGroup, cod: &RealGroup, x: &Point<f64>) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    if !dom.is_member(x)? {
        return Err(Error::NonMember { eta: dom.eta(x)? });
    }
    if dom.rho_of(x)?.abs() <= 1e-12 {
        return Err(Error::NullDirection);
    }
    let kx = k(x.coords());
    let eta = cod.eta_slice(&kx);
    if eta <= 0.0 {
        return Err(Error::NonMember { eta });
    }
    Ok(eta.ln() / LN2)
}

/// For `rho(u) = 0`, the factor `lambda` with `K(xi u) = lambda K(u)`.
pub fn radial_lambda<F>(k: &F, dom: &RealGroup, u: &Point<f64>, xi: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    if dom.rho_of(u)?.abs() > 1e-12 {
        return Err(Error::InvalidInput("radial_lambda needs rho(u) = 0".into()));
    }
    let ku = k(u.coords());
    if norm_inf(&ku) <= 1e-14 {
        return Err(Error::ZeroImage);
    }
    let kxu = k(u.scale(&xi).coords());
    let lambda = dot(&kxu, &ku) / dot(&ku, &ku);
    let defect = kxu
        .iter()
        .zip(&ku)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max)
        / norm_inf(&kxu).max(1.0);
    if defect > 1e-9 {
        return Err(Error::NotCollinear(defect));
    }
    Ok(lambda)
}

/// `a_1 = 1`, `a_{n+1} = 1 + (1 + tau) a_n`; returns `a_0..=a_n`.
pub fn an_sequence(tau: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for i in 1..=n {
        let prev = out[i - 1];
        out.push(if i == 1 { 1.0 } else { 1.0 + (1.0 + tau) * prev });
    }
    out
}

/// `((1 + tau)^n - 1) / tau`, and `n` at `tau = 0`.
pub fn an_closed_form(tau: f64, n: usize) -> f64 {
    if tau == 0.0 {
        n as f64
    } else {
        (n as f64 * tau.ln_1p()).exp_m1() / tau
    }
}

/// Check `K(u^n) = a_n(tau) K(u)` for `n = 1..=n_max`, with `u^n` the
/// group power and `tau = sigma(K(u))`. For `rho(u) = 0` the group power
/// is just `n u`.
pub fn power_oracle_check<F>(k: &F, dom: &RealGroup, cod: &RealGroup, u: &Point<f64>, n_max: usize, tol: f64) -> Result<Report>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let ku = k(u.coords());
    let tau = dot(cod.rho().coeffs(), &ku);
    let a = an_sequence(tau, n_max);
    let mut report = Report::new("power_oracle", tol);
    report.metric("tau", tau);
    for (n, an) in a.iter().enumerate().skip(1) {
        let un = dom.power(u, n)?;
        let expect: Vec<f64> = ku.iter().map(|c| an * c).collect();
        report.observe(rel_dev(&k(un.coords()), &expect), n);
    }
    Ok(report.finish())
}

/// Split `K` along a direction `u` with `rho(u) = 1`:
///
/// ```text
/// A_u(x)  = K(x - rho(x) u)        additive on X
/// mu_u(t) = K((t - 1) u)           multiplicative from (R_+, x)
/// K(x)    = A_u(x) o mu_u(1 + rho(x))
/// ```
///
/// Reports the three residuals as metrics; `max_deviation` is their max.
pub fn chudziak_split<F>(k: &F, dom: &RealGroup, cod: &RealGroup, u: &Point<f64>, samples: usize, seed: u64, tol: f64) -> Result<Report>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let ru = dom.rho_of(u)?;
    if (ru - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitDirection(ru));
    }
    let rho = dom.rho().coeffs();
    let a_u = |x: &[f64]| -> Vec<f64> {
        let r = dot(rho, x);
        let y: Vec<f64> = x.iter().zip(u.coords()).map(|(a, b)| a - r * b).collect();
        k(&y)
    };
    let mu_u = |t: f64| -> Vec<f64> { k(&u.scale(&(t - 1.0)).into_coords()) };

    let mut rng = chunk_rng(seed, 0);
    let d = dom.dim();
    let (mut add, mut mul, mut rec) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let sum: Vec<f64> = a_u(&x).iter().zip(a_u(&y)).map(|(a, b)| a + b).collect();
        add = add.max(rel_dev(&a_u(&xy), &sum));

        let s = rng.random_range(-1.0f64..=1.0).exp();
        let t = rng.random_range(-1.0f64..=1.0).exp();
        mul = mul.max(rel_dev(&mu_u(s * t), &cod.circle_slice(&mu_u(s), &mu_u(t))));

        let m = real_member_log_eta(&mut rng, dom, 1.0);
        let eta = dom.eta(&m)?;
        let back = cod.circle_slice(&a_u(m.coords()), &mu_u(eta));
        rec = rec.max(rel_dev(&k(m.coords()), &back));
    }
    let mut report = Report::new("chudziak_split", tol).with_seed(seed);
    report.samples = samples;
    report.metric("additivity", add);
    report.metric("multiplicativity", mul);
    report.metric("reconstruction", rec);
    report.max_deviation = add.max(mul).max(rec);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homs::{Family, Hom, HomSpec};

    fn power(gamma: f64) -> Hom {
        Hom::new(HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Power { v: vec![1.0, 0.0], gamma })).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let h = power(2.0);
        let k = |x: &[f64]| h.apply(x);
        let u = Point::from_slice(&[1.0, 0.0]).unwrap();
        assert!((extract_gamma(&k, h.domain(), h.codomain(), &u).unwrap() - 2.0).abs() < 1e-12);
        let h = power(0.5);
        let k = |x: &[f64]| h.apply(x);
        assert!((extract_gamma(&k, h.domain(), h.codomain(), &u).unwrap() - 0.5).abs() < 1e-12);
        let n = Point::from_slice(&[0.0, 1.0]).unwrap();
        assert!(matches!(extract_gamma(&k, h.domain(), h.codomain(), &n), Err(Error::NullDirection)));
    }

    #[test]
    fn lambda_examples() {
        let h = Hom::new(HomSpec::new(
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            Family::Linear { matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]] },
        ))
        .unwrap();
        let u = Point::from_slice(&[0.0, 1.0]).unwrap();
        let l = radial_lambda(&|x: &[f64]| h.apply(x), h.domain(), &u, 3.0).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
        let dom = h.domain();
        let bent = |x: &[f64]| vec![x[1] * x[1], x[1]];
        assert!(matches!(radial_lambda(&bent, dom, &u, 3.0), Err(Error::NotCollinear(_))));
        let zero = |_: &[f64]| vec![0.0, 0.0];
        assert!(matches!(radial_lambda(&zero, dom, &u, 3.0), Err(Error::ZeroImage)));
    }

    #[test]
    fn an_examples() {
        let a = an_sequence(1.0, 3);
        assert_eq!(&a[1..], &[1.0, 3.0, 7.0]);
        let a = an_sequence(0.0, 4);
        assert_eq!(&a[1..], &[1.0, 2.0, 3.0, 4.0]);
        for n in 1..20 {
            assert!((an_closed_form(0.3, n) - an_sequence(0.3, n)[n]).abs() < 1e-9 * an_closed_form(0.3, n));
        }
        assert_eq!(an_closed_form(0.0, 5), 5.0);
    }

    #[test]
    fn split_reconstructs() {
        let h = power(1.5);
        let u = Point::from_slice(&[1.0, 0.0]).unwrap();
        let r = chudziak_split(&|x: &[f64]| h.apply(x), h.domain(), h.codomain(), &u, 200, 5, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        let u2 = Point::from_slice(&[2.0, 0.0]).unwrap();
        assert!(matches!(
            chudziak_split(&|x: &[f64]| h.apply(x), h.domain(), h.codomain(), &u2, 10, 5, 1e-9),
            Err(Error::NotUnitDirection(_))
        ));
    }
}
