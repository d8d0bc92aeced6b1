//! Thin wrappers over faer's dense decompositions.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn failed(what: &str) -> Error {
    Error::Convergence { message: format!("{what} did not converge"), residuals: Vec::new() }
}

/// Nonincreasing singular values.
pub fn singular_values(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|_| failed("singular value decomposition"))
}

/// Ascending eigenvalues of a real symmetric matrix (lower triangle is read).
pub fn sym_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| failed("symmetric eigensolver"))
}

/// Ascending eigenvalues and orthonormal eigenvectors (columns).
pub fn sym_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| failed("symmetric eigensolver"))?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn herm_eigenvalues(a: &Mat<Complex64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| failed("Hermitian eigensolver"))
}

pub fn herm_eigen(a: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| failed("Hermitian eigensolver"))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Largest |a_ij - conj(a_ji)|.
pub fn hermitian_defect(a: &Mat<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `exp(-beta a)` for Hermitian `a` through its eigendecomposition, with the
/// eigenvalues shifted by `shift` (the result is `exp(-beta (a - shift))`).
pub fn herm_exp_shifted(a: &Mat<Complex64>, beta: f64, shift: f64) -> Result<Mat<Complex64>> {
    let (values, u) = herm_eigen(a)?;
    let n = a.nrows();
    let mut scaled = u.clone();
    for (k, &lam) in values.iter().enumerate() {
        let w = (-beta * (lam - shift)).exp();
        for i in 0..n {
            scaled[(i, k)] *= w;
        }
    }
    Ok(&scaled * u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_decompositions() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { 1.0 });
        let vals = sym_eigenvalues(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let s = singular_values(&Mat::from_fn(2, 2, |i, j| if i == j { 0.0 } else if i < j { 3.0 } else { -3.0 }))
            .unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
        let h = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        });
        assert_eq!(hermitian_defect(&h), 0.0);
        let e = herm_exp_shifted(&h, 0.0, 0.0).unwrap();
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-14 && e[(0, 1)].norm() < 1e-14);
    }
}
