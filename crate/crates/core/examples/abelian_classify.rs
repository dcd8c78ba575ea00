//! Abelian subgroups: half-lines and the null space of `rho`.

use popa::radial::{classify_abelian, halfline, scalar_iso_check, AbelianClass};
use popa::{Point, RealGroup};

fn main() -> popa::Result<()> {
    let g = RealGroup::real(&[2.0, 1.0])?;
    let u = Point::from_slice(&[1.0, -1.0])?;
    let h = halfline(&g, &u)?;
    println!("<u> meets G_rho for t in {}", h.interval);

    let ray: Vec<Point<f64>> = [0.5, 1.5, -0.2].iter().map(|t| u.scale(t)).collect();
    match classify_abelian(&g, &ray)? {
        AbelianClass::RayCase { u } => println!("multiples of u: ray case with rho(u) = 1 at {:?}", u.coords()),
        AbelianClass::NullCase => println!("null case"),
    }
    let null: Vec<Point<f64>> = [1.0, -3.0].iter().map(|t| Point::from_slice(&[*t, -2.0 * t]).unwrap()).collect();
    println!("null-space set: {:?}", classify_abelian(&g, &null)?);

    let mixed = [Point::from_slice(&[1.0, 0.0])?, Point::from_slice(&[0.0, 1.0])?];
    println!("non-commuting pair: {}", classify_abelian(&g, &mixed).unwrap_err());

    let pairs: Vec<(f64, f64)> = (1..=5).map(|i| (0.1 * i as f64, -0.05 * i as f64)).collect();
    let r = scalar_iso_check(&g, &u, &pairs, 1e-12)?;
    println!("(s u) o (t u) = (s + t + s t rho(u)) u: max deviation {:.1e}", r.max_deviation);
    Ok(())
}
