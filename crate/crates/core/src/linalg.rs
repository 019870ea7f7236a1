//! Small dense-linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Cholesky factor `L` (lower) of a symmetric matrix, or `None` when a pivot
/// falls below `1e-12` of the largest initial diagonal entry.
pub fn cholesky_with_tolerance(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = g.nrows();
    let scale = (0..n).map(|i| g[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-12 * scale;
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= tol {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Some(l)
}

/// Columns of `basis` form a `g`-orthonormal frame: `basisᵀ g basis = I`.
///
/// Built from the Cholesky factor as `L^{-T}`.
pub fn orthonormal_basis_from_metric(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let l = cholesky_with_tolerance(g)?;
    let n = g.nrows();
    let lt = l.transpose();
    lt.solve_upper_triangular(&DMatrix::identity(n, n))
}

pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}

pub fn norm(g: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    inner(g, u, u).max(0.0).sqrt()
}

/// Max absolute entry of `m`.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Max absolute deviation of `m` from the identity.
pub fn identity_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

/// Least-squares solution of the 2-column system `[r², r⁴] · c = b`.
pub fn quadratic_quartic_fit(radii: &[f64], values: &[f64]) -> (f64, f64) {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&r, &v) in radii.iter().zip(values) {
        let (r2, r4) = (r * r, r * r * r * r);
        a11 += r2 * r2;
        a12 += r2 * r4;
        a22 += r4 * r4;
        b1 += r2 * v;
        b2 += r4 * v;
    }
    let det = a11 * a22 - a12 * a12;
    let c2 = (b1 * a22 - b2 * a12) / det;
    let c4 = (a11 * b2 - a12 * b1) / det;
    (c2, c4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_roundtrip() {
        let g = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let l = cholesky_with_tolerance(&g).unwrap();
        assert_relative_eq!(max_abs(&(&l * l.transpose() - &g)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky_with_tolerance(&g).is_none());
    }

    #[test]
    fn metric_orthonormal_basis() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 5.0]);
        let b = orthonormal_basis_from_metric(&g).unwrap();
        let gram = b.transpose() * &g * &b;
        assert!(identity_defect(&gram) < 1e-12);
    }

    #[test]
    fn parabola_fit_recovers_coefficients() {
        let radii = [0.2, 0.15, 0.1, 0.075, 0.05];
        let vals: Vec<f64> = radii.iter().map(|r| -0.25 * r * r + 0.7 * r * r * r * r).collect();
        let (c2, c4) = quadratic_quartic_fit(&radii, &vals);
        assert_relative_eq!(c2, -0.25, epsilon = 1e-10);
        assert_relative_eq!(c4, 0.7, epsilon = 1e-8);
    }
}
