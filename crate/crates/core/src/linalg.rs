//! Dense least-squares helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

/// Columns of `a` that are numerically dependent on earlier columns.
///
/// Columns are visited left to right and orthogonalised against the
/// accepted ones (modified Gram-Schmidt, two passes). A column whose
/// remaining norm is below `tol` times its original norm is reported.
/// An all-zero column is always dependent.
pub(crate) fn dependent_columns(a: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..a.ncols() {
        let col = a.column(j).into_owned();
        let norm0 = col.norm();
        if norm0 == 0.0 || !norm0.is_finite() {
            dependent.push(j);
            continue;
        }
        let mut v = col / norm0;
        for _ in 0..2 {
            for b in &basis {
                let d = b.dot(&v);
                v.axpy(-d, b, 1.0);
            }
        }
        let rest = v.norm();
        if rest <= tol {
            dependent.push(j);
        } else {
            basis.push(v / rest);
        }
    }
    dependent
}

/// Least-squares solution of a full-column-rank system by thin QR.
pub(crate) fn lstsq_qr(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * b;
    qr.r().solve_upper_triangular(&qtb)
}

/// Minimum-norm least-squares solution with the 2-norm condition number of `a`.
/// Singular values below `rcond * sigma_max` are treated as zero.
pub(crate) fn lstsq_svd(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    rcond: f64,
) -> (DVector<f64>, f64, bool) {
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let cutoff = rcond * smax;
    let deficient = a.ncols() > a.nrows() || sv.iter().any(|&s| s <= cutoff);
    let x = svd
        .solve(b, cutoff)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    (x, cond, deficient)
}
