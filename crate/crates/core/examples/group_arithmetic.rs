//! The circle operation in floating point and in exact rationals.

use popa::scalar::ratio;
use popa::{Point, RationalGroup, RealGroup};

fn main() -> popa::Result<()> {
    let g = RealGroup::real(&[1.0, 0.0])?;
    let x = Point::from_slice(&[1.0, 2.0])?;
    let y = Point::from_slice(&[3.0, 4.0])?;
    let xy = g.circle(&x, &y)?;
    println!("x o y        = {:?}", xy.coords());
    println!("eta(x o y)   = {} = eta(x) eta(y) = {}", g.eta(&xy)?, g.eta(&x)? * g.eta(&y)?);
    println!("x^-1         = {:?}", g.inverse(&x)?.coords());
    println!("x^3          = {:?}", g.power(&x, 3)?.coords());
    println!("[x, y] defect = {:?}", g.commutator_defect(&x, &y)?.coords());

    let q = RationalGroup::from_coeffs(vec![ratio(1, 2), ratio(-1, 3)])?;
    let a = Point::new(vec![ratio(1, 3), ratio(3, 4)])?;
    let b = Point::new(vec![ratio(-2, 5), ratio(1, 7)])?;
    let ab = q.circle(&a, &b)?;
    println!("exact a o b  = {}", ab.to_json());
    let back = q.circle(&ab, &q.inverse(&b)?)?;
    assert_eq!(back, a);
    println!("(a o b) o b^-1 = a exactly");
    Ok(())
}
