//! Continuous homomorphisms between one-dimensional circle groups.
//!
//! The parameter `p` ranges over `[0, inf]`: `G_0(R) = (R, +)`,
//! `G_r(R) = ((-1/r, inf), o_r)` and `G_inf(R) = ((0, inf), x)`.
//! Each group has a logarithmic coordinate onto `(R, +)`:
//!
//! ```text
//! L_0(t) = t,   L_r(t) = log(1 + r t) / r,   L_inf(t) = log t
//! ```
//!
//! and every continuous homomorphism `G_rho -> G_sigma` is
//! `psi(t) = L_sigma^{-1}(kappa L_rho(t))` for a real `kappa`. Written out,
//! these are the nine cells of the table (e.g. `((1 + rho t)^{sigma kappa / rho} - 1) / sigma`
//! for two finite parameters). Evaluation goes through `expm1`/`log1p`
//! forms so that cells join continuously as a finite parameter tends to 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{expm1_over, log1p_over, rel_dev1};
use crate::radial::Interval;
use crate::report::Report;

/// A point of `[0, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtParam {
    Zero,
    Fin(f64),
    Inf,
}

impl ExtParam {
    pub fn finite(r: f64) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(ExtParam::Fin(r))
        } else {
            Err(Error::InvalidInput(format!("finite parameter must be positive, got {r}")))
        }
    }

    /// `"0"`, `"inf"` or a positive number.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(ExtParam::Inf),
            t => {
                let r: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad parameter {s:?}")))?;
                if r == 0.0 {
                    Ok(ExtParam::Zero)
                } else {
                    ExtParam::finite(r)
                }
            }
        }
    }

    /// Logarithmic coordinate onto `(R, +)`.
    fn log_coord(self, t: f64) -> f64 {
        match self {
            ExtParam::Zero => t,
            ExtParam::Fin(r) => log1p_over(r, t),
            ExtParam::Inf => t.ln(),
        }
    }

    /// Inverse of [`Self::log_coord`] applied to `kappa * s`.
    fn exp_coord(self, kappa: f64, s: f64) -> f64 {
        match self {
            ExtParam::Zero => kappa * s,
            ExtParam::Fin(r) => expm1_over(r, kappa * s),
            ExtParam::Inf => (kappa * s).exp(),
        }
    }
}

impl std::fmt::Display for ExtParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtParam::Zero => write!(f, "0"),
            ExtParam::Fin(r) => write!(f, "{r}"),
            ExtParam::Inf => write!(f, "inf"),
        }
    }
}

pub fn ext_domain(p: ExtParam) -> Interval<f64> {
    match p {
        ExtParam::Zero => Interval::whole(),
        ExtParam::Fin(r) => Interval { lo: Some(-1.0 / r), hi: None },
        ExtParam::Inf => Interval { lo: Some(0.0), hi: None },
    }
}

fn check_domain(p: ExtParam, t: f64) -> Result<()> {
    let dom = ext_domain(p);
    if t.is_finite() && dom.contains(&t) {
        Ok(())
    } else {
        Err(Error::DomainViolation { t, domain: dom.to_string() })
    }
}

/// The group law of `G_p(R)`.
pub fn ext_circle(p: ExtParam, s: f64, t: f64) -> Result<f64> {
    check_domain(p, s)?;
    check_domain(p, t)?;
    Ok(match p {
        ExtParam::Zero => s + t,
        ExtParam::Fin(r) => s + t + r * s * t,
        ExtParam::Inf => s * t,
    })
}

/// One cell of the table, with its `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoMap {
    pub rho: ExtParam,
    pub sigma: ExtParam,
    pub kappa: f64,
}

impl BoMap {
    pub fn new(rho: ExtParam, sigma: ExtParam, kappa: f64) -> Self {
        BoMap { rho, sigma, kappa }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        bo_eval(self, t)
    }
}

pub fn bo_eval(m: &BoMap, t: f64) -> Result<f64> {
    check_domain(m.rho, t)?;
    Ok(m.sigma.exp_coord(m.kappa, m.rho.log_coord(t)))
}

/// `max |psi(s o_rho t) - psi(s) o_sigma psi(t)|`, scaled by the magnitude
/// of `psi(s o_rho t)` when that exceeds 1.
pub fn bo_hom_residual(m: &BoMap, pairs: &[(f64, f64)], tol: f64) -> Report {
    let mut report = Report::new("bo_hom_residual", tol);
    for (k, &(s, t)) in pairs.iter().enumerate() {
        let step = || -> Result<f64> {
            let lhs = bo_eval(m, ext_circle(m.rho, s, t)?)?;
            let rhs = ext_circle(m.sigma, bo_eval(m, s)?, bo_eval(m, t)?)?;
            Ok(rel_dev1(lhs, rhs))
        };
        match step() {
            Ok(dev) => report.observe(dev, k),
            Err(e) => report.fail(format!("pair {k}: {e}")),
        }
    }
    report.finish()
}

/// Distance between the `sigma = sigma_eps` cell and the `sigma = 0` cell
/// of the same row at `t`.
pub fn bo_cell_continuity(rho: ExtParam, t: f64, kappa: f64, sigma_eps: f64) -> Result<f64> {
    let near = bo_eval(&BoMap::new(rho, ExtParam::finite(sigma_eps)?, kappa), t)?;
    let zero = bo_eval(&BoMap::new(rho, ExtParam::Zero, kappa), t)?;
    Ok((near - zero).abs())
}
