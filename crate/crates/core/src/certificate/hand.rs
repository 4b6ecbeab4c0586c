//! Certificates written out by hand, and the one assembled from a Polya split.

use num_traits::Zero;

use super::{Certificate, CertificateTerm, GramMatrix};
use crate::graph::Clique;
use crate::numeric::{CoefficientSplits, PolyaReport};
use crate::poly::{parse_polynomial, ratio, sum_of_squares_power, Monomial, Polynomial, Rational};
use crate::sos::MonomialBasis;
use crate::Error;

/// Gram matrix of `F F'` for an `r x k` factor given by rows of expressions.
/// The basis is every monomial appearing in `F`, graded-lex.
pub fn gram_from_factor(rows: &[&[&str]], nvars: usize) -> Result<(MonomialBasis, Vec<Vec<Rational>>), Error> {
    let f: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_polynomial(s, nvars)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let k = f.first().map_or(0, Vec::len);
    if f.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension("factor rows have different lengths".into()));
    }
    let mut monos: Vec<Monomial> = f.iter().flatten().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    let nb = monos.len();
    let size = f.len() * nb;
    let mut g = vec![vec![Rational::zero(); size]; size];
    for j in 0..k {
        let mut h = vec![Rational::zero(); size];
        for (a, row) in f.iter().enumerate() {
            for (mono, c) in row[j].terms() {
                let s = monos.binary_search(mono).expect("monomial collected above");
                h[a * nb + s] = c.clone();
            }
        }
        for u in 0..size {
            if h[u].is_zero() {
                continue;
            }
            for v in 0..size {
                g[u][v] += &h[u] * &h[v];
            }
        }
    }
    Ok((MonomialBasis { monomials: monos }, g))
}

fn factor_term(clique: &[usize], weight: &str, rows: &[&[&str]], nvars: usize) -> Result<CertificateTerm, Error> {
    let (basis, g) = gram_from_factor(rows, nvars)?;
    Ok(CertificateTerm {
        clique: Clique::new(clique.to_vec()),
        weight: parse_polynomial(weight, nvars)?,
        basis,
        gram: GramMatrix::Exact(g),
    })
}

/// `(x1^2 + x2^2) P = E1' S1 E1 + E2' S2 E2` for the 3-variable example.
pub fn example_32_certificate() -> Result<Certificate, Error> {
    let n = 3;
    Ok(Certificate {
        m: 3,
        nvars: n,
        sigma: parse_polynomial("x1^2 + x2^2", n)?,
        terms: vec![
            factor_term(&[0, 1], "1", &[&["x1^2 + x2^2"], &["-x1*x2"]], n)?,
            factor_term(
                &[1, 2],
                "1",
                &[&["x1*x3", "x2*x3", "x2^2", "0", "0"], &["0", "-x1^2", "-x2*x3", "x1*x2", "x1*x3"]],
                n,
            )?,
        ],
        lambda: None,
    })
}

/// The direct decomposition without a multiplier.
pub fn example_33_nu0_certificate() -> Result<Certificate, Error> {
    let n = 2;
    Ok(Certificate {
        m: 3,
        nvars: n,
        sigma: Polynomial::one(n),
        terms: vec![
            factor_term(&[0, 1], "1", &[&["x1^2", "x1*x2", "x2^2"], &["x2^2", "0", "0"]], n)?,
            factor_term(&[1, 2], "1", &[&["x1^2", "0", "0"], &["x2^2", "x1*x2", "x1^2"]], n)?,
        ],
        lambda: None,
    })
}

/// `(x1^2 + x2^2) P` from the clique splits of its two distinct coefficient matrices.
pub fn example_33_nu1_certificate() -> Result<Certificate, Error> {
    let n = 2;
    let h = ratio(1, 2);
    let i = |v: i64| Rational::from_integer(v.into());
    // Coefficient of x1^6 and x2^6.
    let id = [vec![vec![i(1), i(0)], vec![i(0), h.clone()]], vec![vec![h.clone(), i(0)], vec![i(0), i(1)]]];
    // Coefficient of x1^4 x2^2 and x1^2 x2^4.
    let b = [vec![vec![i(2), i(1)], vec![i(1), h.clone()]], vec![vec![h.clone(), i(1)], vec![i(1), i(2)]]];
    let mut terms = Vec::new();
    for (alpha, split) in [([3, 0], &id), ([0, 3], &id), ([2, 1], &b), ([1, 2], &b)] {
        for (k, x) in split.iter().enumerate() {
            terms.push(CertificateTerm {
                clique: Clique::new(vec![k, k + 1]),
                weight: Polynomial::one(n),
                basis: MonomialBasis { monomials: vec![Monomial(alpha.to_vec())] },
                gram: GramMatrix::Exact(x.clone()),
            });
        }
    }
    Ok(Certificate { m: 3, nvars: n, sigma: sum_of_squares_power(n, 1), terms, lambda: None })
}

/// Sparse Putinar certificate on the bow-tie set; `S_{2,1} = S_{1,2} = 0`.
pub fn example_34_certificate() -> Result<Certificate, Error> {
    let n = 2;
    Ok(Certificate {
        m: 3,
        nvars: n,
        sigma: Polynomial::one(n),
        terms: vec![
            factor_term(&[0, 1], "1", &[&["1", "0", "x1"], &["0", "1", "x2"]], n)?,
            factor_term(&[0, 1], "1 - x1^2", &[&["x1"], &["1"]], n)?,
            factor_term(&[1, 2], "1", &[&["1", "0", "x1"], &["0", "1", "-x2"]], n)?,
            factor_term(&[1, 2], "x1^2 - x2^2", &[&["2"], &["x2"]], n)?,
        ],
        lambda: None,
    })
}

/// `(sum x_i^2)^nu P = sum_k E_k' (sum_alpha S_{alpha,k} x^{2 alpha}) E_k`,
/// one single-monomial Gram term per nonzero block.
pub fn polya_certificate(report: &PolyaReport, m: usize, nvars: usize) -> Certificate {
    let mut terms = Vec::new();
    let mut push = |mono: &Monomial, clique: &Clique, gram: GramMatrix, zero: bool| {
        if !zero {
            terms.push(CertificateTerm {
                clique: clique.clone(),
                weight: Polynomial::one(nvars),
                basis: MonomialBasis { monomials: vec![mono.halve()] },
                gram,
            });
        }
    };
    match &report.splits {
        CoefficientSplits::Exact(s) => {
            for (mono, split) in s {
                for (c, x) in split.cliques.iter().zip(&split.blocks) {
                    let zero = x.iter().flatten().all(Zero::is_zero);
                    push(mono, c, GramMatrix::Exact(x.clone()), zero);
                }
            }
        }
        CoefficientSplits::Float(s) => {
            for (mono, split) in s {
                for (c, x) in split.cliques.iter().zip(&split.blocks) {
                    let zero = x.iter().flatten().all(|v| *v == 0.0);
                    push(mono, c, GramMatrix::Float(x.clone()), zero);
                }
            }
        }
    }
    Certificate { m, nvars, sigma: sum_of_squares_power(nvars, report.nu), terms, lambda: None }
}
