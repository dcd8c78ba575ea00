//! Haar measure on `G_rho(R^d)` by Monte Carlo.
//!
//! Right translation `x -> x o a` is the affine map `(I + a rho^T) x + a`
//! with Jacobian `1 + rho(a)`; left translation `x -> a o x` scales by
//! `1 + rho(a)` in every coordinate, Jacobian `(1 + rho(a))^d`. Since
//! `eta(x o a) = eta(x) eta(a)`, the density `1 / eta` is right invariant
//! and `1 / eta^d` is left invariant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Point, RealGroup};
use crate::numerics::dot;
use crate::report::Report;
use crate::sampling::{derive_seed, par_chunks};

/// Smallest sample count a job accepts.
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Density `1 / eta`.
    Right,
    /// Density `1 / eta^d`.
    Left,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            _ => Err(Error::InvalidInput(format!("side must be right or left, got {s:?}"))),
        }
    }
}

impl Side {
    fn exponent(self, d: usize) -> i32 {
        match self {
            Side::Right => 1,
            Side::Left => d as i32,
        }
    }
}

fn density_at(eta: f64, side: Side, d: usize) -> f64 {
    eta.powi(-side.exponent(d))
}

pub fn haar_density(g: &RealGroup, x: &Point<f64>, side: Side) -> Result<f64> {
    let eta = g.eta(x)?;
    if !g.is_member(x)? {
        return Err(Error::NonMember { eta });
    }
    Ok(density_at(eta, side, g.dim()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarJob {
    pub group: RealGroup,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub side: Side,
    pub n: usize,
    pub seed: u64,
}

impl HaarJob {
    pub fn new(group: RealGroup, lo: Vec<f64>, hi: Vec<f64>, side: Side, n: usize, seed: u64) -> Result<Self> {
        let d = group.dim();
        for v in [&lo, &hi] {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidInput("box needs finite lo < hi in every coordinate".into()));
        }
        if n < MIN_SAMPLES {
            return Err(Error::InvalidInput(format!("n must be at least {MIN_SAMPLES}, got {n}")));
        }
        let job = HaarJob { group, lo, hi, side, n, seed };
        let eta = job.min_eta();
        if eta <= *job.group.guard() {
            return Err(Error::BoxOutsideDomain(eta));
        }
        Ok(job)
    }

    /// Smallest `eta` over the box; `rho` is linear so a corner attains it.
    pub fn min_eta(&self) -> f64 {
        let rho = self.group.rho().coeffs();
        1.0 + rho
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(r, (a, b))| (r * a).min(r * b))
            .sum::<f64>()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean and standard error of `volume * weight(x)` for `x` uniform on the
/// box `[lo, hi]`, reduced in chunk order.
fn box_mc<W>(lo: &[f64], hi: &[f64], n: usize, seed: u64, weight: W) -> HaarEstimate
where
    W: Fn(&[f64]) -> f64 + Sync,
{
    let d = lo.len();
    let parts = par_chunks(n, seed, |rng, range| {
        let mut x = vec![0.0; d];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            for (xi, (a, b)) in x.iter_mut().zip(lo.iter().zip(hi)) {
                *xi = a + (b - a) * rng.random::<f64>();
            }
            let w = weight(&x);
            s += w;
            s2 += w * w;
        }
        (s, s2)
    });
    let (s, s2) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    HaarEstimate { estimate: vol * mean, std_error: vol * (var / nf).sqrt() }
}

/// Estimate the measure of the box under the job's density.
pub fn haar_measure_mc(job: &HaarJob) -> HaarEstimate {
    let rho = job.group.rho().coeffs();
    let d = job.group.dim();
    box_mc(&job.lo, &job.hi, job.n, job.seed, |x| density_at(1.0 + dot(rho, x), job.side, d))
}

/// Compare `mu(B)` with `mu(B o a)` (right) or `mu(a o B)` (left), using the
/// job's density on both and translating on `job.side`.
pub fn haar_invariance_check(job: &HaarJob, a: &[f64]) -> Result<Report> {
    haar_invariance_check_with(job, a, job.side)
}

/// As [`haar_invariance_check`] but translating on `translate`, which may
/// differ from the density side.
///
/// The translated set is sampled with its own independent draws: `a o B` is
/// the box `a + eta(a) B`; `B o a` is a parallelepiped, sampled on its
/// bounding box and accepted when `y o a^{-1}` lies in `B`. `max_deviation`
/// is `|mu(B) - mu(T B)|` in units of the combined standard error
/// `sqrt(se_B^2 + se_TB^2)`; the tolerance is 3.
pub fn haar_invariance_check_with(job: &HaarJob, a: &[f64], translate: Side) -> Result<Report> {
    let g = &job.group;
    let d = g.dim();
    if a.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.len() });
    }
    if a.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("translation must be finite".into()));
    }
    let eta_a = g.eta_slice(a);
    let image_eta = job.min_eta() * eta_a;
    if eta_a <= *g.guard() || image_eta <= *g.guard() {
        return Err(Error::BoxOutsideDomain(image_eta.min(eta_a)));
    }
    let rho = g.rho().coeffs();
    let density = |y: &[f64]| density_at(1.0 + dot(rho, y), job.side, d);
    let base = haar_measure_mc(job);
    let seed = derive_seed(job.seed, 1);
    let moved = match translate {
        Side::Left => {
            let lo: Vec<f64> = a.iter().zip(&job.lo).map(|(ai, l)| ai + eta_a * l).collect();
            let hi: Vec<f64> = a.iter().zip(&job.hi).map(|(ai, h)| ai + eta_a * h).collect();
            box_mc(&lo, &hi, job.n, seed, density)
        }
        Side::Right => {
            // y_i = x_i + a_i rho(x) + a_i is linear in x with coefficients
            // delta_ij + a_i rho_j; each bound is a sum of per-coordinate extremes
            let bound = |i: usize, pick: fn(f64, f64) -> f64| -> f64 {
                let lin: f64 = (0..d)
                    .map(|j| {
                        let c = if i == j { 1.0 } else { 0.0 } + a[i] * rho[j];
                        pick(c * job.lo[j], c * job.hi[j])
                    })
                    .sum();
                lin + a[i]
            };
            let lo: Vec<f64> = (0..d).map(|i| bound(i, f64::min)).collect();
            let hi: Vec<f64> = (0..d).map(|i| bound(i, f64::max)).collect();
            let a_inv: Vec<f64> = a.iter().map(|c| -c / eta_a).collect();
            box_mc(&lo, &hi, job.n, seed, |y| {
                let x = g.circle_slice(y, &a_inv);
                let inside = x.iter().zip(job.lo.iter().zip(&job.hi)).all(|(v, (l, h))| l <= v && v <= h);
                if inside {
                    density(y)
                } else {
                    0.0
                }
            })
        }
    };

    let diff = (base.estimate - moved.estimate).abs();
    let combined = base.std_error.hypot(moved.std_error);
    let in_se = if diff == 0.0 { 0.0 } else { diff / combined };
    let mut report = Report::new(format!("haar_invariance[{:?} density, {:?} translate]", job.side, translate), 3.0)
        .with_seed(job.seed);
    report.samples = 2 * job.n;
    report.max_deviation = in_se;
    report.metric("measure", base.estimate);
    report.metric("measure_se", base.std_error);
    report.metric("translated", moved.estimate);
    report.metric("translated_se", moved.std_error);
    report.metric("combined_se", combined);
    report.metric("deviation_se", in_se);
    report.metric("relative_deviation", diff / base.estimate.abs().max(f64::MIN_POSITIVE));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn density_examples() {
        let g = RealGroup::real(&[1.0, 0.0]).unwrap();
        let x = Point::from_slice(&[1.0, 2.0]).unwrap();
        assert_eq!(haar_density(&g, &x, Side::Right).unwrap(), 0.5);
        assert_eq!(haar_density(&g, &x, Side::Left).unwrap(), 0.25);
        assert_eq!(haar_density(&g, &Point::zeros(2), Side::Right).unwrap(), 1.0);
        let out = Point::from_slice(&[-2.0, 0.0]).unwrap();
        assert!(matches!(haar_density(&g, &out, Side::Right), Err(Error::NonMember { .. })));
    }

    #[test]
    fn log2_and_translate() {
        let g = RealGroup::real(&[1.0]).unwrap();
        let job = HaarJob::new(g.clone(), vec![0.0], vec![1.0], Side::Right, 100_000, 3).unwrap();
        let e = haar_measure_mc(&job);
        assert!((e.estimate - LN_2).abs() <= 3.0 * e.std_error);
        let moved = HaarJob::new(g, vec![0.5], vec![2.0], Side::Right, 100_000, 4).unwrap();
        let e = haar_measure_mc(&moved);
        assert!((e.estimate - LN_2).abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn flat_group_gives_volume() {
        let g = RealGroup::real(&[0.0, 0.0]).unwrap();
        let job = HaarJob::new(g, vec![0.0, -1.0], vec![2.0, 1.0], Side::Left, 5000, 1).unwrap();
        let e = haar_measure_mc(&job);
        assert_eq!(e.estimate, 4.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn flat_translate_matches() {
        // rho = 0: both estimates are exact volumes
        let g = RealGroup::real(&[0.0, 0.0]).unwrap();
        let job = HaarJob::new(g, vec![0.0, 0.0], vec![1.0, 1.0], Side::Right, 10_000, 9).unwrap();
        let r = haar_invariance_check(&job, &[0.3, -2.0]).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert_eq!(r.metrics["translated"], 1.0);
    }

    #[test]
    fn invariance_and_wrong_side() {
        let g = RealGroup::real(&[1.0, 0.5]).unwrap();
        for side in [Side::Right, Side::Left] {
            let job = HaarJob::new(g.clone(), vec![0.0, 0.0], vec![1.0, 1.0], side, 200_000, 5).unwrap();
            let r = haar_invariance_check(&job, &[0.5, -0.3]).unwrap();
            assert!(r.passed, "{r:?}");
            let other = if side == Side::Right { Side::Left } else { Side::Right };
            let wrong = haar_invariance_check_with(&job, &[1.0, 0.0], other).unwrap();
            assert!(wrong.max_deviation > 5.0, "{wrong:?}");
        }
    }

    #[test]
    fn box_must_be_inside() {
        let g = RealGroup::real(&[1.0]).unwrap();
        assert!(matches!(
            HaarJob::new(g.clone(), vec![-2.0], vec![1.0], Side::Right, 1000, 0),
            Err(Error::BoxOutsideDomain(_))
        ));
        assert!(HaarJob::new(g, vec![0.0], vec![1.0], Side::Right, 10, 0).is_err());
    }
}
