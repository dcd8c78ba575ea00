//! The circle group `G_rho(X)` on `X = R^d`.
//!
//! For a linear functional `rho`, the set `{x : 1 + rho(x) > 0}` is a group
//! under the circle operation
//!
//! ```text
//! x o y = x + y + rho(x) y
//! ```
//!
//! with neutral element `0` and inverse `-x / (1 + rho(x))`. The character
//! `eta(x) = 1 + rho(x)` is multiplicative: `eta(x o y) = eta(x) eta(y)`.
//!
//! Everything here is generic over [`Scalar`], so the same code runs in
//! `f64` and in exact rational arithmetic.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::MAX_DIM;

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S>(Vec<S>);

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        check_dim(coords.len())?;
        if let Some(i) = coords.iter().position(|c| !c.is_finite_value()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![S::zero(); dim])
    }

    /// The `i`-th standard basis vector scaled by `scale`.
    pub fn basis(dim: usize, i: usize, scale: S) -> Self {
        let mut v = vec![S::zero(); dim];
        v[i] = scale;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<S> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Point(self.0.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Point(self.0.iter().map(|a| -a.clone()).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(Scalar::to_json).collect())
    }
}

impl Point<f64> {
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Point::new(coords.to_vec())
    }
}

/// A linear functional `x -> sum_i c_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinFunc<S>(Vec<S>);

impl<S: Scalar> LinFunc<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        check_dim(coeffs.len())?;
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite_value()) {
            return Err(Error::NonFinite(i));
        }
        Ok(LinFunc(coeffs))
    }

    pub fn zero(dim: usize) -> Self {
        LinFunc(vec![S::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Evaluate at `x`. Panics on a length mismatch; callers go through
    /// [`PopaGroup`] which checks dimensions first.
    pub fn apply(&self, x: &Point<S>) -> S {
        assert_eq!(self.0.len(), x.dim(), "functional/point dimension mismatch");
        self.0
            .iter()
            .zip(x.coords())
            .fold(S::zero(), |acc, (c, xi)| acc + c.clone() * xi.clone())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }
}

/// The group `(G_rho(R^d), o_rho)` with its membership guard.
#[derive(Debug, Clone, PartialEq)]
pub struct PopaGroup<S> {
    rho: LinFunc<S>,
    guard: S,
}

pub type RealGroup = PopaGroup<f64>;
pub type RationalGroup = PopaGroup<Rational>;

impl<S: Scalar> PopaGroup<S> {
    /// Group with the scalar kind's default guard (`1e-12` for `f64`, `0`
    /// for rationals).
    pub fn new(rho: LinFunc<S>) -> Self {
        PopaGroup {
            rho,
            guard: S::default_guard(),
        }
    }

    pub fn with_guard(rho: LinFunc<S>, guard: S) -> Result<Self> {
        let g = guard.to_f64();
        if !(0.0..1.0).contains(&g) {
            return Err(Error::InvalidGuard(g));
        }
        Ok(PopaGroup { rho, guard })
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Result<Self> {
        Ok(Self::new(LinFunc::new(coeffs)?))
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &LinFunc<S> {
        &self.rho
    }

    pub fn guard(&self) -> &S {
        &self.guard
    }

    pub fn check_dim(&self, x: &Point<S>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// `rho(x)`, dimension-checked.
    pub fn rho_of(&self, x: &Point<S>) -> Result<S> {
        self.check_dim(x)?;
        Ok(self.rho.apply(x))
    }

    /// `eta(x) = 1 + rho(x)`; defined on all of `X`, members or not.
    pub fn eta(&self, x: &Point<S>) -> Result<S> {
        Ok(S::one() + self.rho_of(x)?)
    }

    pub fn is_member(&self, x: &Point<S>) -> Result<bool> {
        Ok(self.eta(x)? > self.guard)
    }

    fn require_member(&self, x: &Point<S>) -> Result<S> {
        let eta = self.eta(x)?;
        if eta > self.guard {
            Ok(eta)
        } else {
            Err(Error::NonMember { eta: eta.to_f64() })
        }
    }

    /// `x o y = x + y + rho(x) y`.
    pub fn circle(&self, x: &Point<S>, y: &Point<S>) -> Result<Point<S>> {
        let eta_x = self.require_member(x)?;
        self.require_member(y)?;
        Ok(x.add(&y.scale(&eta_x)))
    }

    /// `x^{-1} = -x / (1 + rho(x))`.
    pub fn inverse(&self, x: &Point<S>) -> Result<Point<S>> {
        let eta_x = self.require_member(x)?;
        Ok(x.scale(&(-(S::one() / eta_x))))
    }

    /// Left-to-right product of a non-empty word.
    pub fn fold(&self, word: &[Point<S>]) -> Result<Point<S>> {
        let mut acc = Point::zeros(self.dim());
        for letter in word {
            acc = self.circle(&acc, letter)?;
        }
        Ok(acc)
    }

    /// `x o x o ... o x` (`n` factors); `n = 0` gives the identity.
    pub fn power(&self, x: &Point<S>, n: usize) -> Result<Point<S>> {
        self.require_member(x)?;
        let mut acc = Point::zeros(self.dim());
        for _ in 0..n {
            acc = self.circle(&acc, x)?;
        }
        Ok(acc)
    }

    /// The commutator defect `rho(x) y - rho(y) x`; equals `x o y - y o x`.
    pub fn commutator_defect(&self, x: &Point<S>, y: &Point<S>) -> Result<Point<S>> {
        let rx = self.rho_of(x)?;
        let ry = self.rho_of(y)?;
        Ok(y.scale(&rx).sub(&x.scale(&ry)))
    }
}

impl RealGroup {
    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(coeffs.to_vec())
    }

    /// Evaluate on a raw slice; used by black-box maps.
    pub fn eta_slice(&self, x: &[f64]) -> f64 {
        1.0 + crate::numerics::dot(self.rho.coeffs(), x)
    }

    pub fn circle_slice(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let e = self.eta_slice(x);
        x.iter().zip(y).map(|(a, b)| a + e * b).collect()
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        Err(Error::UnsupportedDimension(d))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn g2() -> RealGroup {
        RealGroup::real(&[1.0, 0.0]).unwrap()
    }

    fn p(c: &[f64]) -> Point<f64> {
        Point::from_slice(c).unwrap()
    }

    #[test]
    fn eta_values() {
        let g = g2();
        assert_eq!(g.eta(&p(&[1.0, 2.0])).unwrap(), 2.0);
        assert_eq!(g.eta(&p(&[0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(g.eta(&p(&[-2.0, 5.0])).unwrap(), -1.0);
        assert!(matches!(
            g.eta(&p(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn membership() {
        let g = g2();
        assert!(g.is_member(&p(&[1.0, 2.0])).unwrap());
        assert!(g.is_member(&p(&[0.0, 0.0])).unwrap());
        assert!(!g.is_member(&p(&[-2.0, 5.0])).unwrap());
        // boundary hyperplane is excluded, and the guard keeps a margin
        assert!(!g.is_member(&p(&[-1.0, 3.0])).unwrap());
        assert!(!g.is_member(&p(&[-1.0 + 1e-13, 3.0])).unwrap());
    }

    #[test]
    fn circle_examples() {
        let g = g2();
        assert_eq!(g.circle(&p(&[1.0, 2.0]), &p(&[3.0, 4.0])).unwrap(), p(&[7.0, 10.0]));
        let x = p(&[1.0, 2.0]);
        let zero = Point::zeros(2);
        assert_eq!(g.circle(&x, &zero).unwrap(), x);
        assert_eq!(g.circle(&zero, &x).unwrap(), x);
        let add = RealGroup::real(&[0.0, 0.0]).unwrap();
        assert_eq!(add.circle(&x, &p(&[3.0, 4.0])).unwrap(), p(&[4.0, 6.0]));
        assert!(matches!(
            g.circle(&p(&[-2.0, 5.0]), &x),
            Err(Error::NonMember { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        let g = g2();
        let x = p(&[1.0, 2.0]);
        let inv = g.inverse(&x).unwrap();
        assert_eq!(inv, p(&[-0.5, -1.0]));
        assert_eq!(g.circle(&x, &inv).unwrap(), Point::zeros(2));
        assert_eq!(g.inverse(&Point::zeros(2)).unwrap(), Point::zeros(2));
        let add = RealGroup::real(&[0.0, 0.0]).unwrap();
        assert_eq!(add.inverse(&x).unwrap(), p(&[-1.0, -2.0]));
        assert!(g.inverse(&p(&[-2.0, 5.0])).is_err());
    }

    #[test]
    fn inverse_eta_is_reciprocal_exactly() {
        let g = RationalGroup::from_coeffs(vec![ratio(2, 3), ratio(-1, 5)]).unwrap();
        let x = Point::new(vec![ratio(7, 4), ratio(1, 9)]).unwrap();
        let inv = g.inverse(&x).unwrap();
        let one = g.eta(&x).unwrap() * g.eta(&inv).unwrap();
        assert_eq!(one, ratio(1, 1));
        assert!(g.circle(&inv, &x).unwrap().is_zero());
    }

    #[test]
    fn non_commutative_probe() {
        for d in 2..=5 {
            let mut rho = vec![0.0; d];
            rho[0] = 1.0;
            let g = RealGroup::real(&rho).unwrap();
            let x = Point::basis(d, 0, 1.0);
            let y = Point::basis(d, 1, 1.0);
            assert_ne!(g.circle(&x, &y).unwrap(), g.circle(&y, &x).unwrap());
        }
    }

    #[test]
    fn power_and_fold() {
        let g = g2();
        let x = p(&[1.0, 1.0]);
        // eta(x^n) = 2^n and x^n = (2^n - 1) x when rho(x) = 1
        let x3 = g.power(&x, 3).unwrap();
        assert_eq!(x3, p(&[7.0, 7.0]));
        assert_eq!(g.fold(&[x.clone(), x.clone(), x]).unwrap(), x3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Point::new(vec![f64::NAN]), Err(Error::NonFinite(0))));
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::new(vec![0.0; 17]).is_err());
        assert!(RealGroup::with_guard(LinFunc::new(vec![1.0]).unwrap(), 1.0).is_err());
        assert!(RealGroup::with_guard(LinFunc::new(vec![1.0]).unwrap(), -0.1).is_err());
    }
}
