//! Thin wrappers over faer for the dense kernels the solver needs.

use faer::{Mat, Side};

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    a.self_adjoint_eigenvalues(Side::Lower).unwrap_or_else(|_| vec![f64::NAN; a.nrows()])
}

/// Lower Cholesky factor, or `None` when the matrix is not numerically PD.
pub fn cholesky(a: &Mat<f64>) -> Option<Mat<f64>> {
    if a.nrows() == 0 {
        return Some(Mat::zeros(0, 0));
    }
    let llt = a.llt(Side::Lower).ok()?;
    let l = llt.L().to_owned();
    if (0..l.nrows()).any(|i| !(l[(i, i)] > 0.0) || !l[(i, i)].is_finite()) {
        return None;
    }
    Some(l)
}

/// Thin SVD `a = U diag(s) V'`.
pub fn svd(a: &Mat<f64>) -> Option<(Mat<f64>, Vec<f64>, Mat<f64>)> {
    let n = a.nrows().min(a.ncols());
    let d = a.thin_svd().ok()?;
    let s = d.S();
    Some((d.U().to_owned(), (0..n).map(|i| s[i]).collect(), d.V().to_owned()))
}

pub fn symmetrize(a: &mut Mat<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

pub fn frob_dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

pub fn frob_norm_sq(a: &Mat<f64>) -> f64 {
    frob_dot(a, a)
}

/// `a * b * a'`, symmetrized.
pub fn congruence(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut r = a * b * a.transpose();
    symmetrize(&mut r);
    r
}
