//! Hermitian eigenvalue helpers with fast paths for the structured matrices
//! the form catalog produces (diagonal, real tridiagonal).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("Hermitian eigen-solver did not converge on a {0}x{0} matrix")]
    EigenFailure(usize),
}

fn is_real(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn is_banded(m: &DMatrix<C64>, width: usize) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i.abs_diff(j) <= width || m[(i, j)] == C64::new(0.0, 0.0)))
}

fn real_part(m: &DMatrix<C64>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = if is_banded(m, 0) {
        m.diagonal().iter().map(|z| z.re).collect()
    } else if is_real(m) {
        real_part(m).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors as matching columns.
pub fn eigen(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>), LinalgError> {
    let n = m.nrows();
    let (vals, vecs): (DVector<f64>, DMatrix<C64>) = if is_real(m) {
        let e = SymmetricEigen::try_new(real_part(m), f64::EPSILON, 10_000).ok_or(LinalgError::EigenFailure(n))?;
        (e.eigenvalues, e.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let e = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(LinalgError::EigenFailure(n))?;
        (e.eigenvalues, e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok((sorted_vals, sorted_vecs))
}

/// Number of eigenvalues strictly below `x` for a real symmetric
/// tridiagonal matrix (Sturm count). `None` when `m` is not of that shape.
pub fn count_below(m: &DMatrix<C64>, x: f64) -> Option<usize> {
    if !is_real(m) || !is_banded(m, 1) {
        return None;
    }
    let n = m.nrows();
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..n {
        let b2 = if i == 0 { 0.0 } else { m[(i, i - 1)].re.powi(2) };
        d = (m[(i, i)].re - x) - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    Some(count)
}

/// Maximum absolute row sum, an upper bound for the spectral radius.
pub fn inf_norm(m: &DMatrix<C64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    /// Eigenvalues below `-threshold` count as negative.
    pub threshold: f64,
    /// Smallest eigenvalue when a dense solve was needed.
    pub min_eigenvalue: Option<f64>,
}

/// Positive semidefiniteness up to `tol · max(1, scale)`.
pub fn psd_check(m: &DMatrix<C64>, tol: f64, scale: f64) -> PsdCheck {
    let threshold = tol * scale.max(1.0);
    if let Some(neg) = count_below(m, -threshold) {
        return PsdCheck {
            psd: neg == 0,
            threshold,
            min_eigenvalue: None,
        };
    }
    let min = eigenvalues(m).first().copied().unwrap_or(0.0);
    PsdCheck {
        psd: min >= -threshold,
        threshold,
        min_eigenvalue: Some(min),
    }
}

/// Extreme generalized eigenvalues of `M v = λ W v` for a positive diagonal
/// weight `W`.
pub fn weighted_extremes(m: &DMatrix<C64>, weights: &DVector<f64>) -> (f64, f64) {
    let s = weights.map(|w| 1.0 / w.sqrt());
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (s[i] * s[j]));
    let vals = eigenvalues(&scaled);
    (vals[0], vals[vals.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, data: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, rows, data).map(|x| C64::new(x, 0.0))
    }

    #[test]
    fn sturm_count_matches_dense_eigenvalues() {
        let m = real(4, &[2., -1., 0., 0., -1., 2., -1., 0., 0., -1., 2., -1., 0., 0., -1., 2.]);
        let vals = eigenvalues(&m);
        for x in [-1.0, 0.3, 1.0, 2.0, 3.5, 5.0] {
            let dense = vals.iter().filter(|&&v| v < x).count();
            assert_eq!(count_below(&m, x), Some(dense), "x = {x}");
        }
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2., 0.), C64::new(0., 1.), C64::new(0., -1.), C64::new(2., 0.)],
        );
        let vals = eigenvalues(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let (v, vecs) = eigen(&m).unwrap();
        let residual = &m * vecs.column(0) - vecs.column(0) * C64::new(v[0], 0.0);
        assert!(residual.norm() < 1e-12);
        assert_eq!(count_below(&m, 0.0), None);
    }

    #[test]
    fn psd_detects_negative_direction() {
        let m = real(3, &[1., 0., 0., 0., 0., 0., 0., 0., -1e-3]);
        assert!(!psd_check(&m, 1e-9, 1.0).psd);
        let m = real(3, &[1., 0., 0., 0., 0., 0., 0., 0., -1e-12]);
        assert!(psd_check(&m, 1e-9, 1.0).psd);
    }

    #[test]
    fn weighted_extremes_rescale_by_weights() {
        let m = real(2, &[2., 0., 0., 6.]);
        let w = DVector::from_vec(vec![2.0, 2.0]);
        let (lo, hi) = weighted_extremes(&m, &w);
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }
}
