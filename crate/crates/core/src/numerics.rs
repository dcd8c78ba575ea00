//! Stable elementary forms shared by the scalar table, the homomorphism
//! families and the extreme-value kernels.
//!
//! Several formulas have removable singularities when a parameter tends to
//! zero, e.g. `(e^{a s} - 1) / a -> s`. Below `SERIES_CUTOFF` the limit is
//! taken through a short Taylor series instead of dividing by `a`.

/// Magnitude below which the series branches are used.
pub const SERIES_CUTOFF: f64 = 1e-8;

/// `(e^{a s} - 1) / a`, equal to `s` at `a = 0`.
pub fn expm1_over(a: f64, s: f64) -> f64 {
    let z = a * s;
    if z.abs() < SERIES_CUTOFF {
        s * (1.0 + z / 2.0 + z * z / 6.0)
    } else {
        z.exp_m1() / a
    }
}

/// `ln(1 + r t) / r`, equal to `t` at `r = 0`.
pub fn log1p_over(r: f64, t: f64) -> f64 {
    let z = r * t;
    if z.abs() < SERIES_CUTOFF {
        t * (1.0 - z / 2.0 + z * z / 3.0)
    } else {
        z.ln_1p() / r
    }
}

/// `(t^g - 1) / g` for `t > 0`, equal to `ln t` at `g = 0`.
pub fn box_cox(g: f64, t: f64) -> f64 {
    expm1_over(g, t.ln())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Normwise relative deviation `max_i |a_i - b_i| / max(1, |a|_inf, |b|_inf)`.
pub fn rel_dev(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = 1.0_f64.max(norm_inf(a)).max(norm_inf(b));
    diff / scale
}

/// Scalar version of [`rel_dev`].
pub fn rel_dev1(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_branches_match_direct_forms() {
        for &(a, s) in &[(1e-9_f64, 2.0_f64), (1e-3, 2.0), (0.7, -1.3), (-2.0, 0.4)] {
            let direct = (a * s).exp_m1() / a;
            assert!((expm1_over(a, s) - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        }
        assert_eq!(expm1_over(0.0, 3.0), 3.0);
        assert_eq!(log1p_over(0.0, 3.0), 3.0);
        assert!((log1p_over(1.0, 1.0) - 2f64.ln()).abs() < 1e-15);
        assert!((box_cox(0.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert!((box_cox(0.5, 4.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn continuity_across_cutoff() {
        let s = 1.7_f64;
        for a in [0.999e-8 / s, 1.001e-8 / s] {
            let exact = (a * s).exp_m1() / a;
            assert!((expm1_over(a, s) - exact).abs() <= 1e-15 * exact);
        }
    }

    #[test]
    fn rel_dev_is_scaled() {
        assert_eq!(rel_dev(&[0.0], &[0.5]), 0.5);
        assert_eq!(rel_dev(&[100.0], &[101.0]), 1.0 / 101.0);
    }
}
