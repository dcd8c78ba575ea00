//! Writing `u + v` as a two-letter circle word, in both witness cases.

use popa::radial::{combination_witness, sum_witness, WitnessCase};
use popa::scalar::ratio;
use popa::{Point, RationalGroup};

fn main() -> popa::Result<()> {
    let g = RationalGroup::from_coeffs(vec![ratio(1, 1), ratio(0, 1)])?;
    let pt = |a: i64, b: i64| Point::new(vec![ratio(a, 1), ratio(b, 1)]);

    for (u, v) in [(pt(1, 0)?, pt(2, 0)?), (pt(4, 0)?, pt(-3, 0)?)] {
        let w = sum_witness(&g, &u, &v)?;
        let case = match &w.case {
            WitnessCase::Case1 => "case 1".to_string(),
            WitnessCase::Case2 { delta } => format!("case 2, delta = {delta}"),
        };
        println!("u = {}, v = {}: {case}", u.to_json(), v.to_json());
        println!("  word    = {}", w.to_json()["word"]);
        println!("  value   = {}", w.evaluate(&g)?.to_json());
        assert_eq!(w.evaluate(&g)?, u.add(&v));
    }

    let terms = vec![(ratio(2, 1), pt(1, 1)?), (ratio(-1, 2), pt(1, 0)?), (ratio(3, 1), pt(0, -1)?)];
    let c = combination_witness(&g, &terms)?;
    println!("combination in order {:?} -> {}", c.order, c.evaluate(&g)?.to_json());
    assert_eq!(c.evaluate(&g)?, c.target);
    Ok(())
}
