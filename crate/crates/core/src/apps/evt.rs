//! The Goldie equation `E(xy) = E(x) A(y) + E(y)` of extreme-value theory,
//! its solutions `E(t) = kappa (t^gamma - 1) / gamma`, `A(t) = t^gamma`,
//! and the GEV distribution.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{box_cox, rel_dev1, SERIES_CUTOFF};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvtParams {
    pub kappa: f64,
    /// The extreme-value index.
    pub gamma: f64,
}

fn positive(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainViolation { t, domain: "(0, inf)".into() })
    }
}

/// `kappa (t^gamma - 1) / gamma`, and `kappa log t` at `gamma = 0`.
pub fn evt_e(p: &EvtParams, t: f64) -> Result<f64> {
    positive(t)?;
    Ok(p.kappa * box_cox(p.gamma, t))
}

/// `t^gamma`.
pub fn evt_a(gamma: f64, t: f64) -> Result<f64> {
    positive(t)?;
    Ok((gamma * t.ln()).exp())
}

/// Max of `|E(xy) - E(x) A(y) - E(y)|` over `pairs`, divided by
/// `max(1, |E(xy)|)`.
pub fn evt_goldie_residual(p: &EvtParams, pairs: &[(f64, f64)], tol: f64) -> Result<Report> {
    let mut report = Report::new("evt_goldie_residual", tol);
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let lhs = evt_e(p, x * y)?;
        let rhs = evt_e(p, x)? * evt_a(p.gamma, y)? + evt_e(p, y)?;
        report.observe(rel_dev1(lhs, rhs), i);
    }
    Ok(report.finish())
}

/// `exp(-(1 + gamma x)^{-1/gamma})`, with `exp(-e^{-x})` for
/// `|gamma| < 1e-8`. Outside `{1 + gamma x > 0}` the CDF takes its
/// monotone limits: 0 below the lower endpoint (`gamma > 0`), 1 above the
/// upper endpoint (`gamma < 0`).
pub fn gev_cdf(gamma: f64, x: f64) -> f64 {
    if gamma.abs() < SERIES_CUTOFF {
        return (-(-x).exp()).exp();
    }
    let z = gamma * x;
    if z <= -1.0 {
        return if gamma > 0.0 { 0.0 } else { 1.0 };
    }
    (-(-z.ln_1p() / gamma).exp()).exp()
}

/// The three GEV types.
///
/// Standard naming: `gamma > 0` is Fréchet (heavy tail), `gamma = 0` Gumbel,
/// `gamma < 0` Weibull (bounded above). Some texts attach the names
/// differently (Gumbel to `gamma > 0`, Fréchet to `gamma = 0`); the
/// formulas here do not depend on the labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GevType {
    Frechet,
    Gumbel,
    Weibull,
}

pub fn gev_type(gamma: f64) -> GevType {
    if gamma.abs() < SERIES_CUTOFF {
        GevType::Gumbel
    } else if gamma > 0.0 {
        GevType::Frechet
    } else {
        GevType::Weibull
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    /// Width at which the golden-section search stops.
    pub tol: f64,
    /// Number of coarse grid cells used to bracket the minimum.
    pub grid: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { gamma_lo: -10.0, gamma_hi: 10.0, tol: 1e-6, grid: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvtFit {
    pub params: EvtParams,
    /// Root mean squared residual.
    pub residual: f64,
}

/// Best `kappa` for a fixed `gamma` and the resulting sum of squares.
fn profile(samples: &[(f64, f64)], gamma: f64) -> (f64, f64) {
    let basis: Vec<f64> = samples.iter().map(|(t, _)| box_cox(gamma, *t)).collect();
    let bb: f64 = basis.iter().map(|b| b * b).sum();
    let be: f64 = basis.iter().zip(samples).map(|(b, (_, e))| b * e).sum();
    let kappa = if bb > 0.0 { be / bb } else { 0.0 };
    let sse: f64 = basis.iter().zip(samples).map(|(b, (_, e))| (e - kappa * b).powi(2)).sum();
    if sse.is_finite() && kappa.is_finite() {
        (kappa, sse)
    } else {
        (kappa, f64::INFINITY)
    }
}

/// Least-squares fit of `E(t) = kappa (t^gamma - 1) / gamma`.
///
/// `kappa` is profiled out in closed form. `gamma` is located on a coarse
/// grid over the bracket first (the profile can have several local minima
/// when the data are noisy), then refined by golden-section search in the
/// neighbouring cells.
pub fn fit_e(samples: &[(f64, f64)], opts: &FitOptions) -> Result<EvtFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 samples, got {}", samples.len())));
    }
    for (t, e) in samples {
        positive(*t)?;
        if !e.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite observation {e}")));
        }
    }
    let scale = samples.iter().map(|(_, e)| e.abs()).fold(0.0, f64::max);
    if scale <= 1e-12 {
        return Err(Error::Degenerate("all observations are zero; gamma is unidentifiable".into()));
    }
    if samples.iter().all(|(t, _)| (t - samples[0].0).abs() <= 1e-12 * t.abs()) {
        return Err(Error::Degenerate("all t are equal".into()));
    }
    if !(opts.gamma_lo < opts.gamma_hi) || opts.grid < 2 || !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("bad fit options {opts:?}")));
    }

    let step = (opts.gamma_hi - opts.gamma_lo) / opts.grid as f64;
    let at = |i: usize| opts.gamma_lo + step * i as f64;
    let best = (0..=opts.grid)
        .map(|i| (i, profile(samples, at(i)).1))
        .fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 { (i, s) } else { acc });
    let mut a = at(best.0.saturating_sub(1));
    let mut b = at((best.0 + 1).min(opts.grid));

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let sse = |g: f64| profile(samples, g).1;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse(c), sse(d));
    while b - a > opts.tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d);
        }
    }
    let gamma = 0.5 * (a + b);
    let (kappa, s) = profile(samples, gamma);
    Ok(EvtFit {
        params: EvtParams { kappa, gamma },
        residual: (s / samples.len() as f64).sqrt(),
    })
}

/// Two-column CSV `t,E_obs` with a one-line header.
pub fn read_evt_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("csv row {}: {e}", i + 2)))?;
        if rec.len() != 2 {
            return Err(Error::InvalidInput(format!("csv row {} has {} columns, expected 2", i + 2, rec.len())));
        }
        let num = |j: usize| -> Result<f64> {
            rec[j]
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("csv row {}: bad number {:?}", i + 2, &rec[j])))
        };
        out.push((num(0)?, num(1)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn e_and_a_examples() {
        assert_eq!(evt_e(&EvtParams { kappa: 1.0, gamma: 1.0 }, 2.0).unwrap(), 1.0);
        assert!((evt_e(&EvtParams { kappa: 1.0, gamma: 0.0 }, E).unwrap() - 1.0).abs() < 1e-15);
        assert!((evt_e(&EvtParams { kappa: 2.0, gamma: -1.0 }, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(evt_e(&EvtParams { kappa: 1.0, gamma: 1.0 }, 0.0), Err(Error::DomainViolation { .. })));
        assert!((evt_a(1.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(evt_a(0.0, 7.0).unwrap(), 1.0);
        assert!((evt_a(0.5, 4.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn goldie_identities() {
        let pairs = [(2.0, 3.0), (1.0, 5.0), (0.3, 7.5)];
        for gamma in [1.0, 0.0, -0.7] {
            let r = evt_goldie_residual(&EvtParams { kappa: 1.0, gamma }, &pairs, 1e-13).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn gev_examples() {
        assert!((gev_cdf(0.0, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(gev_cdf(1.0, -1.0), 0.0);
        assert_eq!(gev_cdf(-1.0, 1.0), 1.0);
        assert_eq!(gev_type(0.3), GevType::Frechet);
        assert_eq!(gev_type(0.0), GevType::Gumbel);
        assert_eq!(gev_type(-0.3), GevType::Weibull);
    }

    #[test]
    fn fit_examples() {
        let samples: Vec<(f64, f64)> = (1..=10)
            .map(|t| {
                let t = t as f64;
                (t, evt_e(&EvtParams { kappa: 2.0, gamma: 0.5 }, t).unwrap())
            })
            .collect();
        let fit = fit_e(&samples, &FitOptions::default()).unwrap();
        assert!((fit.params.kappa - 2.0).abs() < 1e-3 && (fit.params.gamma - 0.5).abs() < 1e-3, "{fit:?}");
        let logs: Vec<(f64, f64)> = (1..=10).map(|t| (t as f64, (t as f64).ln())).collect();
        let fit = fit_e(&logs, &FitOptions::default()).unwrap();
        assert!(fit.params.gamma.abs() < 1e-3 && (fit.params.kappa - 1.0).abs() < 1e-3, "{fit:?}");
        let zeros: Vec<(f64, f64)> = (1..=5).map(|t| (t as f64, 0.0)).collect();
        assert!(matches!(fit_e(&zeros, &FitOptions::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn csv_ingest() {
        let data = "t,E_obs\n1,0\n4, 2\n";
        assert_eq!(read_evt_csv(data.as_bytes()).unwrap(), vec![(1.0, 0.0), (4.0, 2.0)]);
        assert!(read_evt_csv("t,E\n1,2,3\n".as_bytes()).is_err());
        assert!(read_evt_csv("t,E\n1,x\n".as_bytes()).is_err());
    }
}
