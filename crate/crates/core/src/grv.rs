//! Numerical limits of general regular variation.
//!
//! Given `f: R^d -> R^m`, a self-equivarying `phi` and a norming `h`, the
//! kernel is
//!
//! ```text
//! K(x) = lim_{t -> inf} [f(t x + x phi(t x)) - f(t x)] / h(t x)
//! g(x) = lim_{t -> inf} h(t x + x phi(t x)) / h(t x)
//! ```
//!
//! and they satisfy `K(x + eta(x) y) = K(x) + g(x) K(y)` and
//! `g(x + eta(x) y) = g(x) g(y)` for collinear `x, y`, where
//! `eta(v) = lim phi(t u + v phi(t u)) / phi(t u)`.
//!
//! Limits are taken along `t_k = t0 * ratio^k` and accepted once `streak`
//! consecutive relative changes fall below `tol_rel`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{norm_inf, rel_dev, rel_dev1};
use crate::report::Report;

pub type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub ratio: f64,
    pub k_max: usize,
    pub tol_rel: f64,
    pub streak: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { t0: 1.0, ratio: 4.0, k_max: 60, tol_rel: 1e-6, streak: 3 }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t0 > 0.0
            && self.t0.is_finite()
            && self.ratio > 1.0
            && self.ratio.is_finite()
            && self.k_max > 0
            && self.tol_rel > 0.0
            && self.streak >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad schedule {self:?}")))
        }
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 * self.ratio.powi(k as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: Vec<f64>,
    pub converged: bool,
    /// The last `streak` relative deltas.
    pub last_deltas: Vec<f64>,
    pub t_final: f64,
    pub steps: usize,
}

impl LimitEstimate {
    fn exact(value: Vec<f64>) -> Self {
        LimitEstimate { value, converged: true, last_deltas: Vec::new(), t_final: 0.0, steps: 0 }
    }

    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

/// Run `seq(t)` along the schedule until the streak rule fires.
pub fn estimate_limit<F>(schedule: &Schedule, seq: F) -> Result<LimitEstimate>
where
    F: Fn(f64) -> Vec<f64>,
{
    schedule.validate()?;
    let mut prev: Option<Vec<f64>> = None;
    let mut deltas: Vec<f64> = Vec::new();
    let mut streak = 0;
    let mut last_delta = f64::NAN;
    for k in 0..=schedule.k_max {
        let t = schedule.t(k);
        let v = seq(t);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonConvergent { steps: k, t_final: t, last_delta });
        }
        if let Some(p) = &prev {
            let diff = v.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let delta = if diff == 0.0 { 0.0 } else { diff / norm_inf(&v).max(norm_inf(p)) };
            last_delta = delta;
            deltas.push(delta);
            streak = if delta <= schedule.tol_rel { streak + 1 } else { 0 };
            if streak >= schedule.streak {
                let tail = deltas[deltas.len() - schedule.streak..].to_vec();
                return Ok(LimitEstimate { value: v, converged: true, last_deltas: tail, t_final: t, steps: k });
            }
        }
        prev = Some(v);
    }
    Err(Error::NonConvergent {
        steps: schedule.k_max,
        t_final: schedule.t(schedule.k_max),
        last_delta,
    })
}

/// An `(f, phi, h)` bundle. Builtins also carry their analytic answers.
#[derive(Clone)]
pub struct GrvProblem {
    pub name: String,
    pub dim: usize,
    pub f: VecFn,
    pub phi: ScalarFn,
    pub h: ScalarFn,
    pub schedule: Schedule,
    pub analytic: Option<Analytic>,
}

/// Closed forms of `K`, `g` and `eta` for a builtin.
#[derive(Clone)]
pub struct Analytic {
    pub kernel: VecFn,
    pub g: ScalarFn,
    pub eta: ScalarFn,
}

impl std::fmt::Debug for GrvProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrvProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

pub const BUILTINS: [&str; 3] = ["builtin:log", "builtin:exp", "builtin:dehaan"];

/// Exponent `gamma` of the `builtin:dehaan` bundle.
pub const DEHAAN_GAMMA: f64 = 0.5;

impl GrvProblem {
    /// Look up a builtin by name.
    ///
    /// - `builtin:log`: `f = log|y|`, `phi(y) = y`, `h = 1`; `K(x) = log(1 + x)`.
    /// - `builtin:exp`: `f = h = exp`, `phi = 1`; `K(x) = e^x - 1`, `g = e^x`.
    /// - `builtin:dehaan`: `f(y) = (|y|^c - 1) / c`, `phi(y) = y`, `h = |y|^c`
    ///   with `c = 0.5`; `K(x) = ((1 + x)^c - 1) / c`. In the multiplicative
    ///   coordinate `s = 1 + x` this is the extreme-value kernel `(s^c - 1) / c`.
    pub fn builtin(name: &str) -> Result<Self> {
        let scalar = |fun: fn(f64) -> f64| -> ScalarFn { Arc::new(move |x: &[f64]| fun(x[0])) };
        let vector = |fun: fn(f64) -> f64| -> VecFn { Arc::new(move |x: &[f64]| vec![fun(x[0])]) };
        let (f, phi, h, kernel, g, eta): (VecFn, ScalarFn, ScalarFn, VecFn, ScalarFn, ScalarFn) = match name {
            "builtin:log" => (
                vector(|y| y.abs().ln()),
                scalar(|y| y),
                scalar(|_| 1.0),
                vector(f64::ln_1p),
                scalar(|_| 1.0),
                scalar(|x| 1.0 + x),
            ),
            "builtin:exp" => (
                vector(f64::exp),
                scalar(|_| 1.0),
                scalar(f64::exp),
                vector(f64::exp_m1),
                scalar(f64::exp),
                scalar(|_| 1.0),
            ),
            "builtin:dehaan" => (
                vector(|y| (y.abs().powf(DEHAAN_GAMMA) - 1.0) / DEHAAN_GAMMA),
                scalar(|y| y),
                scalar(|y| y.abs().powf(DEHAAN_GAMMA)),
                vector(|x| (DEHAAN_GAMMA * x.ln_1p()).exp_m1() / DEHAAN_GAMMA),
                scalar(|x| (1.0 + x).powf(DEHAAN_GAMMA)),
                scalar(|x| 1.0 + x),
            ),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown problem {name:?}; expected one of {}",
                    BUILTINS.join(", ")
                )))
            }
        };
        Ok(GrvProblem {
            name: name.to_string(),
            dim: 1,
            f,
            phi,
            h,
            schedule: Schedule::default(),
            analytic: Some(Analytic { kernel, g, eta }),
        })
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(0));
        }
        Ok(())
    }
}

fn axpy(t: f64, x: &[f64], y: &[f64], s: f64) -> Vec<f64> {
    // t x + s y
    x.iter().zip(y).map(|(a, b)| t * a + s * b).collect()
}

/// Estimate `K(x)`; `x = 0` gives `0` without iterating.
pub fn grv_kernel(p: &GrvProblem, x: &[f64]) -> Result<LimitEstimate> {
    p.check(x)?;
    if x.iter().all(|c| *c == 0.0) {
        return Ok(LimitEstimate::exact(vec![0.0; (p.f)(x).len()]));
    }
    estimate_limit(&p.schedule, |t| {
        let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
        let moved = axpy(1.0, &tx, x, (p.phi)(&tx));
        let h = (p.h)(&tx);
        (p.f)(&moved).iter().zip((p.f)(&tx)).map(|(a, b)| (a - b) / h).collect()
    })
}

/// The ray-restricted estimator `K_u(xi u)`, iterating over `s = t |xi|`
/// along the direction `sign(xi) u` instead of over `t`.
pub fn grv_kernel_radial(p: &GrvProblem, u: &[f64], xi: f64) -> Result<LimitEstimate> {
    p.check(u)?;
    let x: Vec<f64> = u.iter().map(|c| xi * c).collect();
    if xi == 0.0 || x.iter().all(|c| *c == 0.0) {
        return Ok(LimitEstimate::exact(vec![0.0; (p.f)(&x).len()]));
    }
    let dir: Vec<f64> = u.iter().map(|c| xi.signum() * c).collect();
    estimate_limit(&p.schedule, |t| {
        let s = t * xi.abs();
        let su: Vec<f64> = dir.iter().map(|c| s * c).collect();
        let moved = axpy(1.0, &su, &x, (p.phi)(&su));
        let h = (p.h)(&su);
        (p.f)(&moved).iter().zip((p.f)(&su)).map(|(a, b)| (a - b) / h).collect()
    })
}

/// Estimate `g(x)`; `x = 0` gives `1`.
pub fn grv_g(p: &GrvProblem, x: &[f64]) -> Result<LimitEstimate> {
    p.check(x)?;
    if x.iter().all(|c| *c == 0.0) {
        return Ok(LimitEstimate::exact(vec![1.0]));
    }
    estimate_limit(&p.schedule, |t| {
        let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
        let moved = axpy(1.0, &tx, x, (p.phi)(&tx));
        vec![(p.h)(&moved) / (p.h)(&tx)]
    })
}

/// Estimate `eta_u(v) = lim phi(t u + v phi(t u)) / phi(t u)`.
pub fn grv_eta<P>(phi: &P, u: &[f64], v: f64, schedule: &Schedule) -> Result<LimitEstimate>
where
    P: Fn(&[f64]) -> f64 + ?Sized,
{
    estimate_limit(schedule, |t| {
        let tu: Vec<f64> = u.iter().map(|c| t * c).collect();
        let base = phi(&tu);
        let moved = axpy(1.0, &tu, u, v * base);
        vec![phi(&moved) / base]
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeCheck {
    pub v_grid: Vec<f64>,
    pub eta_hat: Vec<f64>,
    /// `phi(t u) / t` stayed bounded along the schedule.
    pub growth_bounded: bool,
    pub report: Report,
}

/// Self-equivarying check of `phi` along `u` on a finite `v` grid.
///
/// The `O(t)` condition is tested heuristically: the max of `|phi(t u)| / t`
/// over the second half of the schedule may not exceed twice its max over
/// the first half (floored at 1).
pub fn se_check<P>(phi: &P, u: &[f64], v_grid: &[f64], schedule: &Schedule) -> Result<SeCheck>
where
    P: Fn(&[f64]) -> f64 + ?Sized,
{
    if u.iter().all(|c| *c == 0.0) {
        return Err(Error::ZeroDirection);
    }
    let mut eta_hat = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        eta_hat.push(grv_eta(phi, u, v, schedule)?.scalar());
    }
    let growth: Vec<f64> = (0..=schedule.k_max)
        .map(|k| {
            let t = schedule.t(k);
            let tu: Vec<f64> = u.iter().map(|c| t * c).collect();
            phi(&tu).abs() / t
        })
        .collect();
    let half = growth.len() / 2;
    let first = growth[..half].iter().cloned().fold(1.0, f64::max);
    let second = growth[half..].iter().cloned().fold(0.0, f64::max);
    let growth_bounded = second.is_finite() && second <= 2.0 * first;

    let mut report = Report::new("se_check", schedule.tol_rel);
    for (i, e) in eta_hat.iter().enumerate() {
        report.metric(&format!("eta_hat[{i}]"), *e);
    }
    report.metric("growth_ratio", second / first);
    report.samples = v_grid.len();
    if !growth_bounded {
        report.fail("phi(t u) / t is not bounded along the schedule");
    }
    Ok(SeCheck { v_grid: v_grid.to_vec(), eta_hat, growth_bounded, report: report.finish() })
}

/// Residuals of `K(x + eta(x) y) = K(x) + g(x) K(y)` and
/// `g(x + eta(x) y) = g(x) g(y)` over collinear pairs.
pub fn gfe_residual<K, G, E>(k: &K, g: &G, eta: &E, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<Report>
where
    K: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
    G: Fn(&[f64]) -> Result<f64> + ?Sized,
    E: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let mut report = Report::new("gfe_residual", tol);
    let (mut additive, mut multiplicative) = (0.0f64, 0.0f64);
    for (i, (x, y)) in pairs.iter().enumerate() {
        let defect = collinearity_defect(x, y);
        if defect > 1e-12 {
            return Err(Error::NotCollinear(defect));
        }
        let z = axpy(1.0, x, y, eta(x)?);
        let (kx, ky, gx) = (k(x)?, k(y)?, g(x)?);
        let rhs: Vec<f64> = kx.iter().zip(&ky).map(|(a, b)| a + gx * b).collect();
        let d1 = rel_dev(&k(&z)?, &rhs);
        let d2 = rel_dev1(g(&z)?, gx * g(y)?);
        additive = additive.max(d1);
        multiplicative = multiplicative.max(d2);
        report.observe(d1.max(d2), i);
    }
    report.metric("gfe", additive);
    report.metric("gfe_mult", multiplicative);
    Ok(report.finish())
}

/// Max `|x_i y_j - x_j y_i|`, scaled by `max(1, |x| |y|)`.
fn collinearity_defect(x: &[f64], y: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            worst = worst.max((x[i] * y[j] - x[j] * y[i]).abs());
        }
    }
    worst / (norm_inf(x) * norm_inf(y)).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn builtin_kernels() {
        let log = GrvProblem::builtin("builtin:log").unwrap();
        assert!((grv_kernel(&log, &[1.0]).unwrap().scalar() - LN_2).abs() < 1e-4);
        assert_eq!(grv_kernel(&log, &[0.0]).unwrap().scalar(), 0.0);
        let exp = GrvProblem::builtin("builtin:exp").unwrap();
        assert!((grv_kernel(&exp, &[1.0]).unwrap().scalar() - (E - 1.0)).abs() < 1e-4);
        assert!((grv_g(&exp, &[1.0]).unwrap().scalar() - E).abs() < 1e-4);
        assert_eq!(grv_g(&log, &[1.0]).unwrap().scalar(), 1.0);
        assert_eq!(grv_g(&log, &[0.0]).unwrap().scalar(), 1.0);
        assert!(GrvProblem::builtin("builtin:nope").is_err());
    }

    #[test]
    fn se_examples() {
        let s = Schedule::default();
        let id = |x: &[f64]| x[0];
        assert!((se_check(&id, &[1.0], &[1.0], &s).unwrap().eta_hat[0] - 2.0).abs() < 1e-9);
        let one = |_: &[f64]| 1.0;
        assert_eq!(se_check(&one, &[1.0], &[1.0, -0.5], &s).unwrap().eta_hat, vec![1.0, 1.0]);
        let root = |x: &[f64]| x[0].abs().sqrt();
        let c = se_check(&root, &[1.0], &[1.0], &s).unwrap();
        assert!((c.eta_hat[0] - 1.0).abs() < 1e-5);
        assert!(c.growth_bounded);
        let quad = |x: &[f64]| x[0] * x[0];
        assert!(matches!(se_check(&quad, &[1.0], &[1.0], &s), Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn non_convergent_sequence() {
        let s = Schedule { k_max: 10, ..Schedule::default() };
        let r = estimate_limit(&s, |t| vec![t.ln()]);
        assert!(matches!(r, Err(Error::NonConvergent { steps: 10, .. })));
    }

    #[test]
    fn gfe_identities() {
        let k = |x: &[f64]| Ok(vec![x[0].ln_1p()]);
        let g = |_: &[f64]| Ok(1.0);
        let eta = |x: &[f64]| Ok(1.0 + x[0]);
        let pairs = vec![(vec![0.5], vec![2.0]), (vec![-0.3], vec![0.0])];
        assert!(gfe_residual(&k, &g, &eta, &pairs, 1e-14).unwrap().passed);
        let k = |x: &[f64]| Ok(vec![x[0].exp_m1()]);
        let g = |x: &[f64]| Ok(x[0].exp());
        let eta = |_: &[f64]| Ok(1.0);
        assert!(gfe_residual(&k, &g, &eta, &pairs, 1e-14).unwrap().passed);
        let bad = vec![(vec![1.0, 0.0], vec![0.0, 1.0])];
        let k2 = |x: &[f64]| Ok(x.to_vec());
        assert!(matches!(gfe_residual(&k2, &g, &eta, &bad, 1e-9), Err(Error::NotCollinear(_))));
    }
}
