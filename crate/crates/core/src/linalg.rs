//! Small dense helpers: orthonormal bases, projections and minimum-norm
//! least squares. The SVD comes from `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::numerics::{dot, norm2};

/// Tolerance used when deciding linear dependence of unit-scale vectors.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in
/// `R^dim`, by Gram–Schmidt on `vectors ++ e_1..e_dim` with one
/// re-orthogonalization pass.
pub fn orthonormal_complement(vectors: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut span: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        if let Some(q) = orthonormalize_against(v, &span) {
            span.push(q);
        }
    }
    let fixed = span.len();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        if let Some(q) = orthonormalize_against(&e, &span) {
            span.push(q);
        }
    }
    span.split_off(fixed)
}

fn orthonormalize_against(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let scale = norm2(v);
    if scale == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
    }
    let n = norm2(&w);
    if n <= RANK_TOL * scale.max(1.0) {
        return None;
    }
    Some(w.into_iter().map(|a| a / n).collect())
}

/// Orthonormal basis of the null space of the functional with coefficient
/// vector `coeffs`. All of `R^d` when `coeffs` vanishes.
pub fn null_basis(coeffs: &[f64]) -> Vec<Vec<f64>> {
    if coeffs.iter().all(|c| *c == 0.0) {
        return orthonormal_complement(&[], coeffs.len());
    }
    orthonormal_complement(&[coeffs.to_vec()], coeffs.len())
}

/// Row-major dense matrix stored as `Vec<Vec<f64>>`.
pub type Matrix = Vec<Vec<f64>>;

pub fn mat_vec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `a b^T`.
pub fn outer(a: &[f64], b: &[f64]) -> Matrix {
    a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect()
}

pub fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// Minimum-norm least-squares solution of `A z = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rank: usize,
    /// Root of the summed squared residuals.
    pub residual: f64,
}

/// Solve `min |A z - b|` with `A` given as rows. Singular values below
/// `RANK_TOL * s_max` are treated as zero.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> LeastSquares {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = RANK_TOL * s_max.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let z = svd
        .solve(&b, eps)
        .unwrap_or_else(|_| DVector::zeros(n));
    let r = &a * &z - &b;
    LeastSquares {
        solution: z.iter().cloned().collect(),
        rank,
        residual: r.norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_basis_is_orthonormal_and_annihilated() {
        let rho = vec![1.0, -2.0, 0.5, 3.0];
        let basis = null_basis(&rho);
        assert_eq!(basis.len(), 3);
        for (i, q) in basis.iter().enumerate() {
            assert!(dot(q, &rho).abs() < 1e-12);
            for (j, r) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(q, r) - expect).abs() < 1e-12);
            }
        }
        assert_eq!(null_basis(&[0.0, 0.0]).len(), 2);
        assert!(null_basis(&[2.0]).is_empty());
    }

    #[test]
    fn least_squares_exact_and_min_norm() {
        let fit = least_squares(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]], &[1.0, 4.0, 3.0]);
        assert_eq!(fit.rank, 2);
        assert!((fit.solution[0] - 1.0).abs() < 1e-12);
        assert!((fit.solution[1] - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);

        // rank one: minimum-norm solution of z1 + z2 = 2 is (1, 1)
        let fit = least_squares(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[2.0, 4.0]);
        assert_eq!(fit.rank, 1);
        assert!((fit.solution[0] - 1.0).abs() < 1e-12);
        assert!((fit.solution[1] - 1.0).abs() < 1e-12);
    }
}
