use num::{BigInt, BigRational, One, Signed};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use popa::apps::{evt_a, evt_e, gev_cdf, EvtParams};
use popa::homs::{canonical_spec, hom_validate, Hom};
use popa::radial::sum_witness;
use popa::scalar_homs::{bo_eval, ext_circle, BoMap, ExtParam};
use popa::suite::{random_spec, round_trip, FAMILIES};
use popa::{Point, RationalGroup, RealGroup};

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn rational_vec(d: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(rational(), d)
}

fn eta(rho: &[BigRational], x: &[BigRational]) -> BigRational {
    BigRational::one() + rho.iter().zip(x).map(|(a, b)| a * b).sum::<BigRational>()
}

/// Shrink `x` so that `|rho(x)| < 1/2`, keeping it a member.
fn shrink(rho: &[BigRational], x: Vec<BigRational>) -> Vec<BigRational> {
    let r = eta(rho, &x) - BigRational::one();
    let k = BigRational::one() / (BigRational::from_integer(2.into()) * (BigRational::one() + r.abs()));
    x.into_iter().map(|c| c * &k).collect()
}

fn ext_param() -> impl Strategy<Value = ExtParam> {
    prop_oneof![Just(ExtParam::Zero), (0.1f64..4.0).prop_map(ExtParam::Fin), Just(ExtParam::Inf)]
}

/// Map a coordinate in `[-1, 1]` into the domain of `G_p`.
fn into_domain(p: ExtParam, s: f64) -> f64 {
    match p {
        ExtParam::Zero => s,
        ExtParam::Fin(r) => s.exp_m1() / r,
        ExtParam::Inf => s.exp(),
    }
}

proptest! {
    #[test]
    fn rational_group_laws(
        (rho, x, y, z) in (1usize..=5).prop_flat_map(|d| (rational_vec(d), rational_vec(d), rational_vec(d), rational_vec(d)))
    ) {
        let [x, y, z] = [x, y, z].map(|v| shrink(&rho, v));
        let d = rho.len();
        let g = RationalGroup::from_coeffs(rho).unwrap();
        let (x, y, z) = (Point::new(x).unwrap(), Point::new(y).unwrap(), Point::new(z).unwrap());
        let xy = g.circle(&x, &y).unwrap();
        prop_assert!(g.is_member(&xy).unwrap());
        prop_assert_eq!(g.circle(&xy, &z).unwrap(), g.circle(&x, &g.circle(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(g.eta(&xy).unwrap(), g.eta(&x).unwrap() * g.eta(&y).unwrap());
        prop_assert_eq!(g.circle(&x, &Point::zeros(d)).unwrap(), x.clone());
        let inv = g.inverse(&x).unwrap();
        prop_assert!(g.is_member(&inv).unwrap());
        prop_assert_eq!(g.circle(&inv, &x).unwrap(), Point::zeros(d));
    }

    #[test]
    fn rational_witness_is_exact(rho in rational_vec(2), z in rational_vec(2), a in rational(), b in rational()) {
        let g = RationalGroup::from_coeffs(rho).unwrap();
        let z = Point::new(z).unwrap();
        let (u, v) = (z.scale(&a), z.scale(&b));
        if let Ok(w) = sum_witness(&g, &u, &v) {
            prop_assert_eq!(w.evaluate(&g).unwrap(), u.add(&v));
            for l in &w.word {
                prop_assert!(g.is_member(&l.element).unwrap());
            }
        }
    }

    #[test]
    fn float_circle_is_associative(rho in prop::collection::vec(-2.0f64..2.0, 3), raw in prop::collection::vec(-1.0f64..1.0, 9)) {
        let g = RealGroup::real(&rho).unwrap();
        let pts: Vec<Point<f64>> = raw.chunks(3).map(|c| Point::from_slice(c).unwrap()).collect();
        prop_assume!(pts.iter().all(|p| g.eta(p).unwrap() > 0.05));
        let l = g.circle(&g.circle(&pts[0], &pts[1]).unwrap(), &pts[2]).unwrap();
        let r = g.circle(&pts[0], &g.circle(&pts[1], &pts[2]).unwrap()).unwrap();
        prop_assert!(popa::numerics::rel_dev(l.coords(), r.coords()) <= 1e-12);
    }

    #[test]
    fn every_bo_cell_is_a_homomorphism(rho in ext_param(), sigma in ext_param(), kappa in -2.0f64..2.0, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let m = BoMap::new(rho, sigma, kappa);
        let (s, t) = (into_domain(rho, s), into_domain(rho, t));
        let lhs = bo_eval(&m, ext_circle(rho, s, t).unwrap()).unwrap();
        let rhs = ext_circle(sigma, bo_eval(&m, s).unwrap(), bo_eval(&m, t).unwrap()).unwrap();
        prop_assert!(popa::numerics::rel_dev1(lhs, rhs) <= 1e-10);
    }

    #[test]
    fn generated_specs_validate_and_round_trip(family in 0usize..5, dx in 1usize..=4, dy in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, FAMILIES[family], dx, dy);
        prop_assert!(hom_validate(&spec).passed);
        let rt = round_trip(&spec, &Default::default()).unwrap();
        prop_assert!(rt.same_family, "{:?} vs {:?}", rt.classified.spec, canonical_spec(&spec));
        prop_assert!(rt.deviation <= 1e-6);
        let hom = Hom::new(spec).unwrap();
        prop_assert_eq!(hom.spec().dim_x(), dx);
    }

    #[test]
    fn goldie_holds(kappa in -3.0f64..3.0, gamma in -2.0f64..2.0, x in 0.05f64..20.0, y in 0.05f64..20.0) {
        let p = EvtParams { kappa, gamma };
        let lhs = evt_e(&p, x * y).unwrap();
        let rhs = evt_e(&p, x).unwrap() * evt_a(gamma, y).unwrap() + evt_e(&p, y).unwrap();
        prop_assert!(popa::numerics::rel_dev1(lhs, rhs) <= 1e-12);
    }

    #[test]
    fn gev_is_a_monotone_cdf(gamma in -2.0f64..2.0, x in -30.0f64..30.0, dx in 0.0f64..5.0) {
        let (a, b) = (gev_cdf(gamma, x), gev_cdf(gamma, x + dx));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b);
    }
}
