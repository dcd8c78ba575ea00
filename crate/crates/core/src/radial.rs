//! Radial structure: half-line subgroups `<u>_rho`, explicit circle-words
//! for linear combinations, and classification of abelian subgroups.
//!
//! The sum of two half-line elements `u + v` (with `u + v` a member) is
//! always a two-letter circle word:
//!
//! - Case 1 (`v` a member): `u + v = u o [v / (1 + rho(u))]`;
//! - Case 2 (`-v` a member): `u + v = u o delta (-v)^{-1}` with
//!   `delta = (1 - rho(v)) / (1 + rho(u))`.
//!
//! Iterating this over a suitable ordering of the summands expresses any
//! member combination `a_1 u_1 + ... + a_n u_n` as a word whose letters lie
//! on the half-lines of the generators. With rational inputs every
//! intermediate quantity stays rational, so the words replay exactly.

use itertools::Itertools;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{Point, PopaGroup};
use crate::numerics::rel_dev;
use crate::report::Report;
use crate::scalar::{Rational, Scalar};

/// Absolute tolerance for the commutator defect in `f64`.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Below this `|rho(z)|` a float direction counts as null.
pub const NULL_TOL: f64 = 1e-12;

/// Open interval; `None` marks an infinite endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<S> {
    pub lo: Option<S>,
    pub hi: Option<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn whole() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn contains(&self, t: &S) -> bool {
        self.lo.as_ref().is_none_or(|lo| t > lo) && self.hi.as_ref().is_none_or(|hi| t < hi)
    }

    pub fn to_json(&self) -> Value {
        let end = |e: &Option<S>, inf: &str| e.as_ref().map_or(Value::String(inf.into()), S::to_json);
        json!([end(&self.lo, "-inf"), end(&self.hi, "inf")])
    }
}

impl<S: Scalar> std::fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), |v| format!("{}", v.to_f64()));
        let hi = self.hi.as_ref().map_or("inf".to_string(), |v| format!("{}", v.to_f64()));
        write!(f, "({lo}, {hi})")
    }
}

/// The half-line `<u>_rho = {t u : 1 + t rho(u) > 0}` as its parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLine<S> {
    pub u: Point<S>,
    pub interval: Interval<S>,
}

impl<S: Scalar> HalfLine<S> {
    pub fn contains_multiple(&self, t: &S) -> bool {
        self.interval.contains(t)
    }
}

pub fn halfline<S: Scalar>(g: &PopaGroup<S>, u: &Point<S>) -> Result<HalfLine<S>> {
    let r = g.rho_of(u)?;
    if u.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let interval = if r > S::zero() {
        Interval { lo: Some(-(S::one() / r)), hi: None }
    } else if r < S::zero() {
        Interval { lo: None, hi: Some(-(S::one() / r)) }
    } else {
        Interval::whole()
    };
    Ok(HalfLine { u: u.clone(), interval })
}

/// `u = z / rho(z)`, the point of `<z>` with `rho(u) = 1`.
pub fn normalize_direction<S: Scalar>(g: &PopaGroup<S>, z: &Point<S>) -> Result<Point<S>> {
    let r = g.rho_of(z)?;
    if r.near_zero(NULL_TOL) {
        return Err(Error::NullDirection);
    }
    Ok(z.scale(&(S::one() / r)))
}

/// A word letter: `element = coefficient * generator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Letter<S> {
    pub element: Point<S>,
    pub generator: Point<S>,
    pub coefficient: S,
}

impl<S: Scalar> Letter<S> {
    fn whole(x: &Point<S>) -> Self {
        Letter {
            element: x.clone(),
            generator: x.clone(),
            coefficient: S::one(),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "element": self.element.to_json(),
            "generator": self.generator.to_json(),
            "coefficient": self.coefficient.to_json(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessCase<S> {
    Case1,
    Case2 { delta: S },
}

impl<S: Scalar> WitnessCase<S> {
    fn to_json(&self) -> Value {
        match self {
            WitnessCase::Case1 => json!({"case": "case1"}),
            WitnessCase::Case2 { delta } => json!({"case": "case2", "delta": delta.to_json()}),
        }
    }
}

/// Circle word reproducing `u + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<S> {
    pub word: Vec<Letter<S>>,
    pub case: WitnessCase<S>,
    /// The summands were exchanged because only the second was a member.
    pub swapped: bool,
    pub target: Point<S>,
}

impl<S: Scalar> Witness<S> {
    /// Fold the word left to right under the group law.
    pub fn evaluate(&self, g: &PopaGroup<S>) -> Result<Point<S>> {
        let letters: Vec<Point<S>> = self.word.iter().map(|l| l.element.clone()).collect();
        g.fold(&letters)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.case.to_json();
        v["swapped"] = json!(self.swapped);
        v["target"] = self.target.to_json();
        v["word"] = Value::Array(self.word.iter().map(Letter::to_json).collect());
        v
    }
}

/// Two-letter word for `u + v`. Case 1 is preferred when both cases apply.
/// If `u` is not a member but `v` is, the summands are exchanged.
pub fn sum_witness<S: Scalar>(g: &PopaGroup<S>, u: &Point<S>, v: &Point<S>) -> Result<Witness<S>> {
    g.check_dim(u)?;
    g.check_dim(v)?;
    let target = u.add(v);
    if !g.is_member(&target)? {
        return Err(Error::NoCase("u + v is not a member".into()));
    }
    let (u, v, swapped) = if g.is_member(u)? {
        (u, v, false)
    } else if g.is_member(v)? {
        (v, u, true)
    } else {
        return Err(Error::NoCase("neither summand is a member".into()));
    };
    let (step, case) = sum_letter(g, u, v)?;
    Ok(Witness {
        word: vec![Letter::whole(u), step],
        case,
        swapped,
        target,
    })
}

/// The second letter for a member `u` and increment `v`.
fn sum_letter<S: Scalar>(g: &PopaGroup<S>, u: &Point<S>, v: &Point<S>) -> Result<(Letter<S>, WitnessCase<S>)> {
    let eta_u = g.eta(u)?;
    if g.is_member(v)? {
        let coefficient = S::one() / eta_u;
        let letter = Letter {
            element: v.scale(&coefficient),
            generator: v.clone(),
            coefficient,
        };
        return Ok((letter, WitnessCase::Case1));
    }
    let neg = v.neg();
    if g.is_member(&neg)? {
        let delta = (S::one() - g.rho_of(v)?) / eta_u;
        let generator = g.inverse(&neg)?;
        let letter = Letter {
            element: generator.scale(&delta),
            generator,
            coefficient: delta.clone(),
        };
        return Ok((letter, WitnessCase::Case2 { delta }));
    }
    Err(Error::NoCase("neither v nor -v is a member".into()))
}

/// Exact-rational entry point; every scalar in the witness is rational.
pub fn q_sum_witness(
    g: &PopaGroup<Rational>,
    u: &Point<Rational>,
    v: &Point<Rational>,
) -> Result<Witness<Rational>> {
    sum_witness(g, u, v)
}

/// Upper bound on summands for [`combination_witness`] (permutation search).
pub const MAX_TERMS: usize = 8;

/// Circle word for `sum_i coeffs_i * generators_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationWitness<S> {
    /// Summation order: the lexicographically first permutation whose
    /// partial sums are all members.
    pub order: Vec<usize>,
    /// Letters relative to the original generators.
    pub word: Vec<Letter<S>>,
    pub cases: Vec<WitnessCase<S>>,
    pub target: Point<S>,
}

impl<S: Scalar> CombinationWitness<S> {
    pub fn evaluate(&self, g: &PopaGroup<S>) -> Result<Point<S>> {
        let letters: Vec<Point<S>> = self.word.iter().map(|l| l.element.clone()).collect();
        g.fold(&letters)
    }
}

/// Express a member combination of member generators as a circle word.
pub fn combination_witness<S: Scalar>(
    g: &PopaGroup<S>,
    terms: &[(S, Point<S>)],
) -> Result<CombinationWitness<S>> {
    if terms.is_empty() || terms.len() > MAX_TERMS {
        return Err(Error::InvalidInput(format!(
            "combination needs 1..={MAX_TERMS} terms, got {}",
            terms.len()
        )));
    }
    for (_, u) in terms {
        if !g.is_member(u)? {
            return Err(Error::NonMember { eta: g.eta(u)?.to_f64() });
        }
    }
    let scaled: Vec<Point<S>> = terms.iter().map(|(a, u)| u.scale(a)).collect();
    let target = scaled
        .iter()
        .skip(1)
        .fold(scaled[0].clone(), |acc, x| acc.add(x));
    if !g.is_member(&target)? {
        return Err(Error::NoCase("combination is not a member".into()));
    }

    let n = terms.len();
    let valid = |perm: &[usize]| -> bool {
        let mut acc = Point::zeros(g.dim());
        perm.iter().all(|&i| {
            acc = acc.add(&scaled[i]);
            g.is_member(&acc).unwrap_or(false)
        })
    };
    let order = (0..n)
        .permutations(n)
        .find(|p| valid(p))
        .ok_or_else(|| Error::NoCase("no ordering has member partial sums".into()))?;

    let first = order[0];
    let mut word = vec![Letter {
        element: scaled[first].clone(),
        generator: terms[first].1.clone(),
        coefficient: terms[first].0.clone(),
    }];
    let mut cases = Vec::with_capacity(n - 1);
    let mut acc = scaled[first].clone();
    for &i in &order[1..] {
        let (_, case) = sum_letter(g, &acc, &scaled[i])?;
        // both cases produce v / eta(acc); record it against the generator
        let coefficient = terms[i].0.clone() / g.eta(&acc)?;
        word.push(Letter {
            element: terms[i].1.scale(&coefficient),
            generator: terms[i].1.clone(),
            coefficient,
        });
        cases.push(case);
        acc = acc.add(&scaled[i]);
    }
    Ok(CombinationWitness { order, word, cases, target })
}

/// Outcome of [`classify_abelian`].
#[derive(Debug, Clone, PartialEq)]
pub enum AbelianClass<S> {
    /// Every element lies in the null space of `rho`; the group law is `+`.
    NullCase,
    /// Every element is a multiple of `u`, where `rho(u) = 1`.
    RayCase { u: Point<S> },
}

/// Classify a pairwise-commuting set of members.
pub fn classify_abelian<S: Scalar>(g: &PopaGroup<S>, set: &[Point<S>]) -> Result<AbelianClass<S>> {
    for x in set {
        if !g.is_member(x)? {
            return Err(Error::NonMember { eta: g.eta(x)?.to_f64() });
        }
    }
    for (i, x) in set.iter().enumerate() {
        for (j, y) in set.iter().enumerate().skip(i + 1) {
            let defect = g.commutator_defect(x, y)?;
            if !defect.coords().iter().all(|c| c.near_zero(COMMUTE_TOL)) {
                return Err(Error::NotCommutative(i, j));
            }
        }
    }
    for z in set {
        if !g.rho_of(z)?.near_zero(COMMUTE_TOL) {
            return Ok(AbelianClass::RayCase {
                u: normalize_direction(g, z)?,
            });
        }
    }
    Ok(AbelianClass::NullCase)
}

/// Check `(s u) o (t u) = (s + t + s t rho(u)) u` on each pair.
pub fn scalar_iso_check<S: Scalar>(
    g: &PopaGroup<S>,
    u: &Point<S>,
    pairs: &[(S, S)],
    tol: f64,
) -> Result<Report> {
    let r = g.rho_of(u)?;
    if u.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let mut report = Report::new("scalar_iso_check", tol);
    for (k, (s, t)) in pairs.iter().enumerate() {
        let su = u.scale(s);
        let tu = u.scale(t);
        match g.circle(&su, &tu) {
            Ok(lhs) => {
                let coeff = s.clone() + t.clone() + s.clone() * t.clone() * r.clone();
                let rhs = u.scale(&coeff);
                let dev = if lhs == rhs {
                    0.0
                } else {
                    rel_dev(&lhs.to_f64(), &rhs.to_f64()).max(f64::MIN_POSITIVE)
                };
                report.observe(dev, k);
            }
            Err(e) => report.fail(format!("pair {k}: {e}")),
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{RationalGroup, RealGroup};
    use crate::scalar::ratio;

    fn g2() -> RealGroup {
        RealGroup::real(&[1.0, 0.0]).unwrap()
    }

    fn p(c: &[f64]) -> Point<f64> {
        Point::from_slice(c).unwrap()
    }

    fn q(c: &[(i64, i64)]) -> Point<Rational> {
        Point::new(c.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    fn q2() -> RationalGroup {
        RationalGroup::from_coeffs(vec![ratio(1, 1), ratio(0, 1)]).unwrap()
    }

    #[test]
    fn halfline_intervals() {
        let g = g2();
        let h = halfline(&g, &p(&[2.0, 0.0])).unwrap();
        assert_eq!(h.interval, Interval { lo: Some(-0.5), hi: None });
        assert_eq!(halfline(&g, &p(&[0.0, 1.0])).unwrap().interval, Interval::whole());
        let h = halfline(&g, &p(&[-1.0, 0.0])).unwrap();
        assert_eq!(h.interval, Interval { lo: None, hi: Some(1.0) });
        assert!(h.contains_multiple(&0.0));
        assert!(!h.contains_multiple(&1.0));
        assert_eq!(halfline(&g, &p(&[0.0, 0.0])), Err(Error::ZeroDirection));
    }

    #[test]
    fn halfline_matches_membership() {
        let g = RealGroup::real(&[0.5, -1.5, 2.0]).unwrap();
        let u = p(&[1.0, 1.0, 1.0]);
        let h = halfline(&g, &u).unwrap();
        for k in -40..40 {
            let t = k as f64 * 0.25;
            let inside = h.contains_multiple(&t);
            // guard only matters within 1e-12 of the boundary
            assert_eq!(inside, g.is_member(&u.scale(&t)).unwrap(), "t = {t}");
        }
    }

    #[test]
    fn normalize_examples() {
        let g = g2();
        assert_eq!(normalize_direction(&g, &p(&[2.0, 6.0])).unwrap(), p(&[1.0, 3.0]));
        assert_eq!(normalize_direction(&g, &p(&[1.0, 0.0])).unwrap(), p(&[1.0, 0.0]));
        assert_eq!(normalize_direction(&g, &p(&[0.0, 1.0])), Err(Error::NullDirection));
    }

    #[test]
    fn case_one_example() {
        let g = g2();
        let w = sum_witness(&g, &p(&[1.0, 0.0]), &p(&[2.0, 0.0])).unwrap();
        assert_eq!(w.case, WitnessCase::Case1);
        assert_eq!(w.word[1].element, p(&[1.0, 0.0]));
        assert_eq!(w.evaluate(&g).unwrap(), p(&[3.0, 0.0]));
    }

    #[test]
    fn case_two_example_exact() {
        let g = q2();
        let w = q_sum_witness(&g, &q(&[(4, 1), (0, 1)]), &q(&[(-3, 1), (0, 1)])).unwrap();
        assert_eq!(w.case, WitnessCase::Case2 { delta: ratio(4, 5) });
        assert_eq!(w.word[1].element, q(&[(-3, 5), (0, 1)]));
        // the letter lies on the half-line of (-v)^{-1} = (-3/4, 0)
        assert_eq!(w.word[1].generator, q(&[(-3, 4), (0, 1)]));
        assert_eq!(w.evaluate(&g).unwrap(), q(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn zero_increment() {
        let g = g2();
        let w = sum_witness(&g, &p(&[1.0, 5.0]), &p(&[0.0, 0.0])).unwrap();
        assert_eq!(w.case, WitnessCase::Case1);
        assert!(w.word[1].element.is_zero());
        assert_eq!(w.evaluate(&g).unwrap(), p(&[1.0, 5.0]));
        let wq = q_sum_witness(&q2(), &q(&[(1, 2), (3, 1)]), &q(&[(0, 1), (0, 1)])).unwrap();
        assert_eq!(wq.evaluate(&q2()).unwrap(), q(&[(1, 2), (3, 1)]));
    }

    #[test]
    fn swaps_when_first_summand_is_outside() {
        let g = g2();
        let w = sum_witness(&g, &p(&[-3.0, 0.0]), &p(&[4.0, 0.0])).unwrap();
        assert!(w.swapped);
        let sum = w.evaluate(&g).unwrap();
        assert!(crate::numerics::rel_dev(sum.coords(), &[1.0, 0.0]) < 1e-14);
    }

    #[test]
    fn no_case_when_sum_outside() {
        let g = g2();
        assert!(matches!(
            sum_witness(&g, &p(&[1.0, 0.0]), &p(&[-3.0, 0.0])),
            Err(Error::NoCase(_))
        ));
    }

    #[test]
    fn combination_needs_reordering() {
        // -3 e1 alone is not a member, so the first valid order starts with 4 e1
        let g = q2();
        let terms = vec![
            (ratio(-3, 1), q(&[(1, 1), (0, 1)])),
            (ratio(2, 1), q(&[(2, 1), (1, 1)])),
            (ratio(1, 2), q(&[(0, 1), (5, 1)])),
        ];
        let w = combination_witness(&g, &terms).unwrap();
        assert_eq!(w.order, vec![1, 0, 2]);
        assert_eq!(w.evaluate(&g).unwrap(), w.target);
        assert_eq!(w.target, q(&[(1, 1), (9, 2)]));
        for l in &w.word {
            assert!(g.is_member(&l.element).unwrap());
            assert_eq!(l.generator.scale(&l.coefficient), l.element);
        }
    }

    #[test]
    fn abelian_examples() {
        let g = g2();
        assert_eq!(
            classify_abelian(&g, &[p(&[0.0, 1.0]), p(&[0.0, 2.0])]).unwrap(),
            AbelianClass::NullCase
        );
        assert_eq!(
            classify_abelian(&g, &[p(&[1.0, 0.0]), p(&[2.0, 0.0])]).unwrap(),
            AbelianClass::RayCase { u: p(&[1.0, 0.0]) }
        );
        assert_eq!(
            classify_abelian(&g, &[p(&[0.0, 1.0]), p(&[1.0, 0.0])]),
            Err(Error::NotCommutative(0, 1))
        );
    }

    #[test]
    fn scalar_iso_examples() {
        let g = g2();
        let u = p(&[1.0, 0.0]);
        let r = scalar_iso_check(&g, &u, &[(1.0, 1.0), (0.0, 2.5), (-0.25, 3.0)], 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_deviation, 0.0);
        let gq = q2();
        let uq = q(&[(0, 1), (1, 1)]);
        let r = scalar_iso_check(&gq, &uq, &[(ratio(1, 3), ratio(-7, 2))], 0.0).unwrap();
        assert!(r.passed);
    }
}
