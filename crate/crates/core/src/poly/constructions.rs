//! Structural transformations of polynomial matrices.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Monomial, PolyMatrix, Polynomial, Rational};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub homogeneous: bool,
    /// Common degree when homogeneous, otherwise the total degree.
    pub degree: u32,
    pub even: bool,
}

pub fn structure_flags(p: &PolyMatrix) -> StructureFlags {
    let mut degs = p.entries().flat_map(|(_, q)| q.terms().map(|(m, _)| m.degree()));
    let homogeneous = match degs.next() {
        None => true,
        Some(d) => degs.all(|e| e == d),
    };
    StructureFlags { homogeneous, degree: p.degree(), even: p.entries().all(|(_, q)| q.is_even()) }
}

/// `(x1^2 + ... + xn^2)^nu`.
pub fn sum_of_squares_power(nvars: usize, nu: u32) -> Polynomial {
    let mut s = Polynomial::zero(nvars);
    for i in 0..nvars {
        s.add_term(Monomial::var(nvars, i).double(), Rational::one());
    }
    s.pow(nu)
}

/// Coefficient matrices of `(x1^2 + ... + xn^2)^nu P(x)`, keyed by monomial.
pub fn polya_expand(p: &PolyMatrix, nu: u32) -> BTreeMap<Monomial, Vec<Vec<Rational>>> {
    let prod = p.scale_poly(&sum_of_squares_power(p.nvars(), nu));
    let m = prod.order();
    let mut out: BTreeMap<Monomial, Vec<Vec<Rational>>> = BTreeMap::new();
    for (&(i, j), q) in prod.entries() {
        for (mono, c) in q.terms() {
            let mat = out.entry(mono.clone()).or_insert_with(|| vec![vec![Rational::zero(); m]; m]);
            mat[i][j] = c.clone();
            mat[j][i] = c.clone();
        }
    }
    out
}

/// `Q` with `Q(x1^2, ..., xn^2) = P(x)`.
pub fn even_substitute(p: &PolyMatrix) -> Result<PolyMatrix, Error> {
    if !structure_flags(p).even {
        return Err(Error::Precondition("even_substitute needs every exponent even".into()));
    }
    let mut q = PolyMatrix::zeros(p.order(), p.nvars());
    for (&(i, j), e) in p.entries() {
        q.set(i, j, e.map_monomials(p.nvars(), Monomial::halve));
    }
    Ok(q)
}

/// Inverse of [`even_substitute`].
pub fn square_substitute(q: &PolyMatrix) -> PolyMatrix {
    let mut p = PolyMatrix::zeros(q.order(), q.nvars());
    for (&(i, j), e) in q.entries() {
        p.set(i, j, e.map_monomials(q.nvars(), Monomial::double));
    }
    p
}

/// `y' P(x) y` in the variables `(x1..xn, y1..ym)`.
pub fn scalarize(p: &PolyMatrix) -> Polynomial {
    let n = p.nvars();
    let m = p.order();
    let total = n + m;
    let mut out = Polynomial::zero(total);
    let two = Rational::from_integer(2.into());
    for (&(i, j), e) in p.entries() {
        let lifted = e.extend_vars(total);
        let mut yy = Monomial::var(total, n + i);
        yy = yy.mul(&Monomial::var(total, n + j));
        let c = if i == j { Rational::one() } else { two.clone() };
        out = out + lifted * Polynomial::monomial(yy, c);
    }
    out
}

/// Coupling matrix: `1` on the diagonal and where a term contains both
/// `y_i` and `y_j`. `y_vars` are 0-based variable indices.
pub fn csp_matrix(p: &Polynomial, y_vars: &[usize]) -> Result<Vec<Vec<u8>>, Error> {
    if let Some(&bad) = y_vars.iter().find(|&&v| v >= p.nvars()) {
        return Err(Error::Dimension(format!("y variable {} outside 1..={}", bad + 1, p.nvars())));
    }
    let m = y_vars.len();
    let mut c = vec![vec![0u8; m]; m];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 1;
    }
    for (mono, _) in p.terms() {
        let present: Vec<usize> = (0..m).filter(|&k| mono.0[y_vars[k]] > 0).collect();
        for &a in &present {
            for &b in &present {
                c[a][b] = 1;
            }
        }
    }
    Ok(c)
}

/// `z^2 p(x, y/z)` with `z` appended as the last variable.
pub fn homogenize_quadratic(p: &Polynomial, y_vars: &[usize]) -> Result<Polynomial, Error> {
    let n = p.nvars();
    if let Some(&bad) = y_vars.iter().find(|&&v| v >= n) {
        return Err(Error::Dimension(format!("y variable {} outside 1..={n}", bad + 1)));
    }
    let mut q = Polynomial::zero(n + 1);
    for (mono, c) in p.terms() {
        let k: u32 = y_vars.iter().map(|&v| mono.0[v]).sum();
        if k > 2 {
            return Err(Error::Precondition(format!("term {mono} has degree {k} > 2 in y")));
        }
        let mut e = mono.0.clone();
        e.push(2 - k);
        q.add_term(Monomial(e), c.clone());
    }
    Ok(q)
}
