//! Continuous homomorphisms `K: G_rho(X) -> G_sigma(Y)`, i.e. solutions of
//!
//! ```text
//! K(x o_rho y) = K(x) o_sigma K(y)
//! ```
//!
//! Five validated families are constructible ([`Family`]). Each carries the
//! constraint under which it actually satisfies the equation:
//!
//! | family | map                              | constraint                     |
//! |--------|----------------------------------|--------------------------------|
//! | zero   | `0`                              | none                           |
//! | linear | `M x`                            | `sigma(M x) = rho(x)` or `M = 0` |
//! | power  | `((1 + rho(x))^gamma - 1) v`     | `sigma(v) = 1`                 |
//! | log    | `log(1 + rho(x)) b`              | `sigma(b) = 0`                 |
//! | exp    | `(e^{kap(x)} - 1) c`             | `sigma(c) = 1`, `rho = 0`      |
//!
//! The classifier in [`classify`] works on any black-box map and recovers
//! the family; [`index`] holds the radial index tools.

pub mod classify;
pub mod index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{check_dim, Point, RealGroup};
use crate::linalg::{mat_vec, Matrix};
use crate::numerics::{dot, norm_inf, rel_dev, SERIES_CUTOFF};
use crate::report::Report;
use crate::sampling::{par_chunks, real_member_log_eta, MaxAt};

pub use classify::{canonical_spec, classify_hom, corollary2_sigma_fit, null_split, ClassifiedHom, ClassifyOptions, NullSplit, SigmaFit};
pub use index::{an_closed_form, an_sequence, chudziak_split, extract_gamma, power_oracle_check, radial_lambda};

/// Constraint tolerance used by [`hom_validate`].
pub const VALIDATION_TOL: f64 = 1e-10;

/// A homomorphism between `G_rho(R^dx)` and `G_sigma(R^dy)`.
///
/// JSON form: `{"family":"power","rho":[1,0],"sigma":[1,0],"v":[1,0],"gamma":2.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomSpec {
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Zero,
    /// `matrix` is `dy x dx`, row-major.
    Linear { matrix: Matrix },
    Power { v: Vec<f64>, gamma: f64 },
    Log { b: Vec<f64> },
    Exp { c: Vec<f64>, kap: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Zero,
    Linear,
    Power,
    Log,
    Exp,
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyTag::Zero => "zero",
            FamilyTag::Linear => "linear",
            FamilyTag::Power => "power",
            FamilyTag::Log => "log",
            FamilyTag::Exp => "exp",
        };
        f.write_str(s)
    }
}

impl HomSpec {
    pub fn new(rho: Vec<f64>, sigma: Vec<f64>, family: Family) -> Self {
        HomSpec { rho, sigma, family }
    }

    pub fn dim_x(&self) -> usize {
        self.rho.len()
    }

    pub fn dim_y(&self) -> usize {
        self.sigma.len()
    }

    pub fn tag(&self) -> FamilyTag {
        match self.family {
            Family::Zero => FamilyTag::Zero,
            Family::Linear { .. } => FamilyTag::Linear,
            Family::Power { .. } => FamilyTag::Power,
            Family::Log { .. } => FamilyTag::Log,
            Family::Exp { .. } => FamilyTag::Exp,
        }
    }

    pub fn domain(&self) -> Result<RealGroup> {
        RealGroup::real(&self.rho)
    }

    pub fn codomain(&self) -> Result<RealGroup> {
        RealGroup::real(&self.sigma)
    }

    /// Family formula on a raw slice; no validation or membership check.
    pub fn eval_raw(&self, x: &[f64]) -> Vec<f64> {
        let dy = self.dim_y();
        match &self.family {
            Family::Zero => vec![0.0; dy],
            Family::Linear { matrix } => mat_vec(matrix, x),
            Family::Power { v, gamma } => {
                let f = (gamma * dot(&self.rho, x).ln_1p()).exp_m1();
                v.iter().map(|c| f * c).collect()
            }
            Family::Log { b } => {
                let f = dot(&self.rho, x).ln_1p();
                b.iter().map(|c| f * c).collect()
            }
            Family::Exp { c, kap } => {
                let f = dot(kap, x).exp_m1();
                c.iter().map(|ci| f * ci).collect()
            }
        }
    }
}

/// Check shapes, finiteness and the family constraint.
pub fn hom_validate(spec: &HomSpec) -> Report {
    let mut report = Report::new(format!("hom_validate[{}]", spec.tag()), VALIDATION_TOL);
    let (dx, dy) = (spec.dim_x(), spec.dim_y());
    for (name, d) in [("rho", dx), ("sigma", dy)] {
        if check_dim(d).is_err() {
            report.fail(format!("{name} has unsupported dimension {d}"));
        }
    }
    if !all_finite(&spec.rho) || !all_finite(&spec.sigma) {
        report.fail("rho/sigma must be finite");
    }
    match &spec.family {
        Family::Zero => {}
        Family::Linear { matrix } => {
            let shape_ok = matrix.len() == dy && matrix.iter().all(|row| row.len() == dx && all_finite(row));
            if !shape_ok {
                report.fail(format!("matrix must be {dy} x {dx} with finite entries"));
            } else if matrix.iter().flatten().any(|m| *m != 0.0) {
                for j in 0..dx {
                    let col: Vec<f64> = matrix.iter().map(|row| row[j]).collect();
                    constraint(&mut report, format!("sigma(M e_{j})"), dot(&spec.sigma, &col), spec.rho[j]);
                }
            }
        }
        Family::Power { v, gamma } => {
            if !gamma.is_finite() {
                report.fail("gamma must be finite");
            }
            if need_len(&mut report, "v", v, dy) {
                constraint(&mut report, "sigma(v)".into(), dot(&spec.sigma, v), 1.0);
            }
        }
        Family::Log { b } => {
            if need_len(&mut report, "b", b, dy) {
                constraint(&mut report, "sigma(b)".into(), dot(&spec.sigma, b), 0.0);
            }
        }
        Family::Exp { c, kap } => {
            if need_len(&mut report, "c", c, dy) {
                constraint(&mut report, "sigma(c)".into(), dot(&spec.sigma, c), 1.0);
            }
            need_len(&mut report, "kap", kap, dx);
            if norm_inf(&spec.rho) > VALIDATION_TOL {
                report.fail("exp family requires rho = 0");
            }
        }
    }
    report.finish()
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|c| c.is_finite())
}

fn need_len(report: &mut Report, name: &str, v: &[f64], want: usize) -> bool {
    if v.len() != want {
        report.fail(format!("{name} has length {}, expected {want}", v.len()));
        false
    } else if !all_finite(v) {
        report.fail(format!("{name} has non-finite entries"));
        false
    } else {
        true
    }
}

fn constraint(report: &mut Report, what: String, value: f64, target: f64) {
    let dev = (value - target).abs() / target.abs().max(1.0);
    let index = report.samples;
    report.observe(dev, index);
    if dev > VALIDATION_TOL {
        report.fail(format!("constraint {what} = {target} violated (value {value})"));
    }
}

/// A spec that passed [`hom_validate`], with its domain and codomain groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Hom {
    spec: HomSpec,
    domain: RealGroup,
    codomain: RealGroup,
}

impl Hom {
    pub fn new(spec: HomSpec) -> Result<Self> {
        let report = hom_validate(&spec);
        if !report.passed {
            return Err(Error::ConstraintViolation(report.failures.join("; ")));
        }
        Ok(Hom {
            domain: spec.domain()?,
            codomain: spec.codomain()?,
            spec,
        })
    }

    pub fn spec(&self) -> &HomSpec {
        &self.spec
    }

    pub fn domain(&self) -> &RealGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &RealGroup {
        &self.codomain
    }

    pub fn eval(&self, x: &Point<f64>) -> Result<Point<f64>> {
        if !self.domain.is_member(x)? {
            return Err(Error::NonMember { eta: self.domain.eta(x)? });
        }
        Point::new(self.spec.eval_raw(x.coords()))
    }

    /// Black-box view: raw slices in and out.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.spec.eval_raw(x)
    }
}

/// Evaluate a spec, validating it first.
pub fn hom_eval(spec: &HomSpec, x: &Point<f64>) -> Result<Point<f64>> {
    let report = hom_validate(spec);
    if !report.passed {
        return Err(Error::Unvalidated(report.failures.join("; ")));
    }
    Hom::new(spec.clone())?.eval(x)
}

/// Max normwise relative deviation of `K(x o y)` from `K(x) o K(y)` over
/// `pairs`; images outside `G_sigma` are reported as failures.
pub fn hom_residual<F>(k: &F, dom: &RealGroup, cod: &RealGroup, pairs: &[(Point<f64>, Point<f64>)], tol: f64) -> Result<Report>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let mut report = Report::new("hom_residual", tol);
    for (i, (x, y)) in pairs.iter().enumerate() {
        let xy = dom.circle(x, y)?;
        let (kx, ky) = (k(x.coords()), k(y.coords()));
        if kx.len() != cod.dim() || ky.len() != cod.dim() {
            return Err(Error::DimensionMismatch { expected: cod.dim(), got: kx.len() });
        }
        if cod.eta_slice(&kx) <= 0.0 {
            report.fail(format!("image of pair {i} left operand is not a member"));
        }
        let lhs = k(xy.coords());
        let rhs = cod.circle_slice(&kx, &ky);
        report.observe(rel_dev(&lhs, &rhs), i);
    }
    Ok(report.finish())
}

/// Seeded residual sweep over `n` member pairs with `eta` in `[1/e, e]`.
/// Chunked and parallel; the report is identical for any thread count.
pub fn hom_residual_sweep<F>(k: &F, dom: &RealGroup, cod: &RealGroup, n: usize, seed: u64, tol: f64) -> Report
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + ?Sized,
{
    let parts = par_chunks(n, seed, |rng, range| {
        let mut worst = MaxAt::default();
        let mut off_group = 0usize;
        for i in range {
            let x = real_member_log_eta(rng, dom, 1.0);
            let y = real_member_log_eta(rng, dom, 1.0);
            let xy = dom.circle_slice(x.coords(), y.coords());
            let (kx, ky) = (k(x.coords()), k(y.coords()));
            if cod.eta_slice(&kx) <= 0.0 {
                off_group += 1;
            }
            worst.push(rel_dev(&k(&xy), &cod.circle_slice(&kx, &ky)), i);
        }
        (worst, off_group)
    });
    let off: usize = parts.iter().map(|p| p.1).sum();
    let worst = MaxAt::merge_all(parts.into_iter().map(|p| p.0));
    let mut report = Report::new("hom_residual_sweep", tol).with_seed(seed);
    report.samples = n;
    report.max_deviation = worst.value;
    report.argmax = worst.index;
    if off > 0 {
        report.fail(format!("{off} images fell outside G_sigma"));
    }
    report.finish()
}

/// Parameters for [`construct_4a`].
#[derive(Debug, Clone, PartialEq)]
pub enum FourAParams {
    /// A matrix with `sigma o M = rho` (or zero).
    Linear { matrix: Matrix },
    /// The image `k_u = K(u)` of a direction with `rho(u) = 1`; the null
    /// part is zero.
    Radial { u: Vec<f64>, k_u: Vec<f64> },
}

/// Build a homomorphism mapping `N(rho)` into `N(sigma)`.
///
/// For the radial form with `tau = sigma(K(u))`:
/// `K(x) = [(1 + rho(x))^{log2(1 + tau)} - 1] K(u) / tau`, which is the
/// power family with `gamma = log2(1 + tau)` and `v = K(u) / tau`. For
/// `|tau| < 1e-8` the limit `K(u) log(1 + rho(x)) / log 2` (log family) is
/// used, with the residual `sigma`-component of `K(u)` projected out.
pub fn construct_4a(rho: &[f64], sigma: &[f64], params: FourAParams) -> Result<HomSpec> {
    let family = match params {
        FourAParams::Linear { matrix } => Family::Linear { matrix },
        FourAParams::Radial { u, k_u } => {
            if u.len() != rho.len() || k_u.len() != sigma.len() {
                return Err(Error::ConstraintViolation("u/K(u) dimension mismatch".into()));
            }
            let ru = dot(rho, &u);
            if (ru - 1.0).abs() > VALIDATION_TOL {
                return Err(Error::ConstraintViolation(format!("rho(u) = {ru}, expected 1")));
            }
            let tau = dot(sigma, &k_u);
            if k_u.iter().all(|c| *c == 0.0) {
                Family::Zero
            } else if tau.abs() < SERIES_CUTOFF {
                let s2 = dot(sigma, sigma);
                let shift = if s2 > 0.0 { tau / s2 } else { 0.0 };
                let b = k_u
                    .iter()
                    .zip(sigma)
                    .map(|(k, s)| (k - shift * s) / std::f64::consts::LN_2)
                    .collect();
                Family::Log { b }
            } else if tau <= -1.0 {
                return Err(Error::ConstraintViolation(format!(
                    "sigma(K(u)) = {tau} puts K(u) outside G_sigma"
                )));
            } else {
                Family::Power {
                    v: k_u.iter().map(|k| k / tau).collect(),
                    gamma: tau.ln_1p() / std::f64::consts::LN_2,
                }
            }
        }
    };
    let spec = HomSpec::new(rho.to_vec(), sigma.to_vec(), family);
    Hom::new(spec.clone())?;
    Ok(spec)
}

/// Exponential homomorphism `(R^dx, +) -> G_sigma(Y)`, `K(x) = (e^{kap(x)} - 1) c`.
/// A `w` with `kap(w) = log 2` satisfies `K(w) = c`, so `sigma(K(w)) = 1`.
pub fn construct_4b_exp(sigma: &[f64], c: &[f64], kap: &[f64]) -> Result<HomSpec> {
    let spec = HomSpec::new(
        vec![0.0; kap.len()],
        sigma.to_vec(),
        Family::Exp { c: c.to_vec(), kap: kap.to_vec() },
    );
    Hom::new(spec.clone())?;
    Ok(spec)
}

/// The three-term map combining an exponential null-space part with a
/// radial power part:
///
/// ```text
/// K(x) = (e^{kap_w(pi_1 x)} - 1) K(w)
///      + [1 + sigma(K(pi_1 x))] [(1 + rho(x))^gamma - 1] K(u) / tau
/// ```
///
/// with `kap_w(w) = log 2`, `gamma = log2(1 + tau)`, `tau = sigma(K(u))`,
/// and `pi_1` the projection onto `<w>` along `<u>` and the rest of
/// `N(rho)`. When `rho != 0` and `kap_w != 0` this fails the homomorphism
/// equation; it exists to demonstrate that.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedNullRadial {
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub k_w: Vec<f64>,
    pub k_u: Vec<f64>,
}

impl MixedNullRadial {
    /// The fixed probe instance on `R^2`: `rho = sigma = (1, 0)`,
    /// `w = (0, 1)`, `u = (1, 0)`, `K(w) = K(u) = (1, 0)` (so `gamma = 1`).
    pub fn probe() -> Self {
        MixedNullRadial {
            rho: vec![1.0, 0.0],
            sigma: vec![1.0, 0.0],
            w: vec![0.0, 1.0],
            u: vec![1.0, 0.0],
            k_w: vec![1.0, 0.0],
            k_u: vec![1.0, 0.0],
        }
    }

    /// The probe pair `x = w + u`, `y = w`.
    pub fn probe_pair(&self) -> (Vec<f64>, Vec<f64>) {
        let x = self.w.iter().zip(&self.u).map(|(a, b)| a + b).collect();
        (x, self.w.clone())
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let rx = dot(&self.rho, x);
        let null: Vec<f64> = x.iter().zip(&self.u).map(|(xi, ui)| xi - rx * ui).collect();
        let along_w = dot(&null, &self.w) / dot(&self.w, &self.w);
        let e = (along_w * std::f64::consts::LN_2).exp_m1();
        let sigma_k1 = e * dot(&self.sigma, &self.k_w);
        let tau = dot(&self.sigma, &self.k_u);
        let gamma = tau.ln_1p() / std::f64::consts::LN_2;
        let radial = (1.0 + sigma_k1) * (gamma * rx.ln_1p()).exp_m1() / tau;
        self.k_w
            .iter()
            .zip(&self.k_u)
            .map(|(kw, ku)| e * kw + radial * ku)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::from_slice(c).unwrap()
    }

    fn power2() -> HomSpec {
        HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Power { v: vec![1.0, 0.0], gamma: 2.0 })
    }

    #[test]
    fn eval_examples() {
        let id = HomSpec::new(
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            Family::Linear { matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]] },
        );
        assert_eq!(hom_eval(&id, &pt(&[1.0, 2.0])).unwrap(), pt(&[1.0, 2.0]));
        let y = hom_eval(&power2(), &pt(&[1.0, 2.0])).unwrap();
        assert!((y.coords()[0] - 3.0).abs() < 1e-14 && y.coords()[1] == 0.0);
        let exp = construct_4b_exp(&[1.0, 0.0], &[1.0, 0.0], &[std::f64::consts::LN_2, 0.0]).unwrap();
        let y = hom_eval(&exp, &pt(&[2.0, 5.0])).unwrap();
        assert!((y.coords()[0] - 3.0).abs() < 1e-14 && y.coords()[1] == 0.0);
    }

    #[test]
    fn eval_rejects_non_members_and_unvalidated() {
        assert!(matches!(hom_eval(&power2(), &pt(&[-2.0, 0.0])), Err(Error::NonMember { .. })));
        let bad = HomSpec::new(vec![1.0], vec![1.0], Family::Power { v: vec![0.9], gamma: 2.0 });
        assert!(matches!(hom_eval(&bad, &pt(&[1.0])), Err(Error::Unvalidated(_))));
    }

    #[test]
    fn validate_examples() {
        let bad = HomSpec::new(vec![1.0, 0.0], vec![1.0, 0.0], Family::Power { v: vec![0.9, 0.0], gamma: 2.0 });
        let r = hom_validate(&bad);
        assert!(!r.passed);
        assert!(r.failures[0].contains("sigma(v)"));
        assert!(hom_validate(&HomSpec::new(vec![1.0], vec![2.0, 3.0], Family::Zero)).passed);
        let exp = HomSpec::new(
            vec![0.5, 0.0],
            vec![1.0, 0.0],
            Family::Exp { c: vec![1.0, 0.0], kap: vec![1.0, 0.0] },
        );
        let r = hom_validate(&exp);
        assert!(!r.passed);
        assert!(r.failures.iter().any(|f| f.contains("rho = 0")));
        let shape = HomSpec::new(vec![1.0, 0.0], vec![1.0], Family::Linear { matrix: vec![vec![1.0]] });
        assert!(!hom_validate(&shape).passed);
        let wrong = HomSpec::new(vec![1.0, 0.0], vec![1.0], Family::Linear { matrix: vec![vec![2.0, 0.0]] });
        assert!(!hom_validate(&wrong).passed);
        let zero_m = HomSpec::new(vec![1.0, 0.0], vec![1.0], Family::Linear { matrix: vec![vec![0.0, 0.0]] });
        assert!(hom_validate(&zero_m).passed);
    }

    #[test]
    fn zero_map_residual() {
        let dom = RealGroup::real(&[1.0, 2.0]).unwrap();
        let cod = RealGroup::real(&[3.0]).unwrap();
        let k = |_: &[f64]| vec![0.0];
        let r = hom_residual_sweep(&k, &dom, &cod, 1000, 1, 1e-9);
        assert!(r.passed);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn mixed_probe_fails_equation() {
        let m = MixedNullRadial::probe();
        let dom = RealGroup::real(&m.rho).unwrap();
        let cod = RealGroup::real(&m.sigma).unwrap();
        let (x, y) = m.probe_pair();
        let k = |z: &[f64]| m.eval(z);
        // hand expansion: K(x o y) = 15 c, K(x) o K(y) = 7 c
        let xy = dom.circle_slice(&x, &y);
        assert!((k(&xy)[0] - 15.0).abs() < 1e-12);
        assert!((cod.circle_slice(&k(&x), &k(&y))[0] - 7.0).abs() < 1e-12);
        let r = hom_residual(&k, &dom, &cod, &[(pt(&x), pt(&y))], 1e-9).unwrap();
        assert!(r.max_deviation >= 0.1);
        assert!(!r.passed);
    }

    #[test]
    fn construct_4a_examples() {
        let spec = construct_4a(
            &[1.0, 0.0],
            &[1.0, 0.0],
            FourAParams::Radial { u: vec![1.0, 0.0], k_u: vec![3.0, 0.0] },
        )
        .unwrap();
        match spec.family {
            Family::Power { ref v, gamma } => {
                assert_eq!(v, &vec![1.0, 0.0]);
                assert!((gamma - 2.0).abs() < 1e-15);
            }
            ref f => panic!("expected power, got {f:?}"),
        }
        let spec = construct_4a(
            &[1.0, 0.0],
            &[1.0, 0.0],
            FourAParams::Radial { u: vec![1.0, 0.0], k_u: vec![0.0, 2.0] },
        )
        .unwrap();
        assert_eq!(spec.tag(), FamilyTag::Log);
        let m = vec![vec![1.0, 0.0], vec![3.0, -1.0]];
        let spec = construct_4a(&[1.0, 0.0], &[1.0, 0.0], FourAParams::Linear { matrix: m }).unwrap();
        assert_eq!(spec.tag(), FamilyTag::Linear);
        assert!(matches!(
            construct_4a(&[1.0, 0.0], &[1.0, 0.0], FourAParams::Linear { matrix: vec![vec![2.0, 0.0], vec![0.0, 1.0]] }),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(construct_4a(
            &[2.0, 0.0],
            &[1.0, 0.0],
            FourAParams::Radial { u: vec![1.0, 0.0], k_u: vec![3.0, 0.0] }
        )
        .is_err());
    }

    #[test]
    fn construct_4b_examples() {
        let spec = construct_4b_exp(&[1.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(spec.eval_raw(&[3.0, -2.0]), vec![0.0, 0.0]);
        assert!(construct_4b_exp(&[1.0, 0.0], &[0.5, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let json = serde_json::to_value(power2()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"family": "power", "rho": [1.0, 0.0], "sigma": [1.0, 0.0], "v": [1.0, 0.0], "gamma": 2.0})
        );
        let back: HomSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, power2());
    }
}
