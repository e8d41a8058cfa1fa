//! Thin façade over the dense Hermitian eigensolver.
//!
//! Everything in here is plumbing between `ndarray` storage (used by the rest
//! of the crate) and `faer`, which does the heavy lifting. Eigenvalues come
//! back sorted ascending; eigenvectors are the columns of the returned matrix.

use faer::{c64, Mat, MatRef, Side};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

fn to_faer(a: &Array2<Complex64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn from_faer(m: MatRef<'_, c64>) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Full eigendecomposition of a Hermitian matrix: `(eigenvalues, basis)` with
/// `a = basis * diag(eigenvalues) * basis^dagger`.
pub fn eigh(a: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>), LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?;
    let vals = Array1::from_iter((0..a.nrows()).map(|i| evd.S()[i].re));
    Ok((vals, from_faer(evd.U())))
}

/// Eigenvalues only, sorted ascending. Dimensions one and two are closed-form;
/// they sit on the per-sample hot path of the region samplers.
pub fn eigvalsh(a: &Array2<Complex64>) -> Result<Vec<f64>, LinalgError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![a[[0, 0]].re]),
        2 => {
            let tr = a[[0, 0]].re + a[[1, 1]].re;
            let det = a[[0, 0]].re * a[[1, 1]].re - a[[0, 1]].norm_sqr();
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            Ok(vec![0.5 * (tr - disc), 0.5 * (tr + disc)])
        }
        _ => {
            let vals = to_faer(a)
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|_| LinalgError::NoConvergence)?;
            Ok(vals)
        }
    }
}

/// Dense product `a * b`.
pub fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let prod = to_faer(a) * to_faer(b);
    from_faer(prod.as_ref())
}

/// `a * v` for a dense matrix and a vector.
pub fn matvec(a: &Array2<Complex64>, v: &Array1<Complex64>) -> Array1<Complex64> {
    assert_eq!(a.ncols(), v.len(), "matvec: inner dimensions differ");
    let mut out = Array1::from_elem(a.nrows(), Complex64::ZERO);
    for (i, row) in a.rows().into_iter().enumerate() {
        let mut acc = Complex64::ZERO;
        for (x, y) in row.iter().zip(v.iter()) {
            acc += x * y;
        }
        out[i] = acc;
    }
    out
}

/// `a^dagger * v`.
pub fn adjoint_matvec(a: &Array2<Complex64>, v: &Array1<Complex64>) -> Array1<Complex64> {
    assert_eq!(
        a.nrows(),
        v.len(),
        "adjoint_matvec: inner dimensions differ"
    );
    let mut out = Array1::from_elem(a.ncols(), Complex64::ZERO);
    for (i, row) in a.rows().into_iter().enumerate() {
        let vi = v[i];
        for (j, x) in row.iter().enumerate() {
            out[j] += x.conj() * vi;
        }
    }
    out
}
