//! Numeric clique decompositions of PSD matrices.

mod agler;
mod polya;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

pub use agler::{agler_decompose, agler_decompose_exact, exact_is_psd, CliqueSplit, Scalar};
pub use polya::{polya_exponent_search, CoefficientSplits, PolyaReport, EXACT_MAX_ORDER};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eig: f64,
}

pub(crate) fn to_faer(m: &[Vec<f64>]) -> Mat<f64> {
    let n = m.len();
    Mat::from_fn(n, n, |i, j| m[i][j])
}

/// Eigenvalues in ascending order.
pub fn eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m).self_adjoint_eigenvalues(Side::Lower).unwrap_or_else(|_| vec![f64::NAN; m.len()])
}

/// PSD test through the symmetric eigensolver: PSD iff `min_eig >= -tol`.
pub fn psd_check(m: &[Vec<f64>], tol: f64) -> Result<PsdReport, Error> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Precondition(format!("matrix not symmetric at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    let min_eig = eigenvalues(m).first().copied().unwrap_or(f64::INFINITY);
    Ok(PsdReport { psd: min_eig >= -tol, min_eig })
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues set to zero.
pub fn psd_projection(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let a = to_faer(m);
    let Ok(e) = a.self_adjoint_eigen(Side::Lower) else { return m.to_vec() };
    let (u, s) = (e.U(), e.S());
    let d: Vec<f64> = (0..n).map(|i| s[i].max(0.0)).collect();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| u[(i, k)] * d[k] * u[(j, k)]).sum();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}
