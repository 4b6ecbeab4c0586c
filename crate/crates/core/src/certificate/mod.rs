//! Decomposition certificates and their independent verification.

mod hand;
mod sampling;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::Clique;
use crate::numeric::{eigenvalues, exact_is_psd};
use crate::poly::{fmt_rational, parse_rational, rat_from_f64, rat_to_f64, Monomial, PolyJson, Polynomial, Rational};
use crate::sos::{gram_to_polymatrix, GramBlockSpec, MonomialBasis, ParamPolyMatrix};
use crate::Error;

pub use hand::{
    example_32_certificate, example_33_nu0_certificate, example_33_nu1_certificate, example_34_certificate,
    gram_from_factor, polya_certificate,
};
pub use sampling::{sample_min_eig, Region, SampleReport};

#[derive(Clone, Debug, PartialEq)]
pub enum GramMatrix {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

impl GramMatrix {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            GramMatrix::Exact(g) => g.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect(),
            GramMatrix::Float(g) => g.clone(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GramMatrix::Exact(g) => g.len(),
            GramMatrix::Float(g) => g.len(),
        }
    }
}

/// `weight * E_C' (I (x) v)' G (I (x) v) E_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTerm {
    pub clique: Clique,
    pub weight: Polynomial,
    pub basis: MonomialBasis,
    pub gram: GramMatrix,
}

impl CertificateTerm {
    pub fn spec(&self) -> GramBlockSpec {
        GramBlockSpec { clique: self.clique.clone(), weight: self.weight.clone(), basis: self.basis.clone() }
    }
}

/// Claims `sigma * P(x, lambda) = sum of terms`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub m: usize,
    pub nvars: usize,
    pub sigma: Polynomial,
    pub terms: Vec<CertificateTerm>,
    pub lambda: Option<Vec<f64>>,
}

impl Certificate {
    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| matches!(t.gram, GramMatrix::Exact(_)))
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            m: self.m,
            nvars: self.nvars,
            sigma: PolyJson::from_polynomial(&self.sigma),
            lambda: self.lambda.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    clique: t.clique.one_based(),
                    weight: PolyJson::from_polynomial(&t.weight),
                    basis: t.basis.monomials.iter().map(|m| m.0.clone()).collect(),
                    gram: match &t.gram {
                        GramMatrix::Exact(g) => {
                            GramJson::Exact(g.iter().map(|r| r.iter().map(fmt_rational).collect()).collect())
                        }
                        GramMatrix::Float(g) => GramJson::Float(g.clone()),
                    },
                })
                .collect(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, Error> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.clique.iter().any(|&v| v == 0 || v > j.m) {
                return Err(Error::Dimension(format!("clique {:?} outside 1..={}", t.clique, j.m)));
            }
            if t.basis.iter().any(|e| e.len() != j.nvars) {
                return Err(Error::Dimension("basis exponent of wrong length".into()));
            }
            let gram = match &t.gram {
                GramJson::Exact(g) => GramMatrix::Exact(
                    g.iter()
                        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                GramJson::Float(g) => GramMatrix::Float(g.clone()),
            };
            terms.push(CertificateTerm {
                clique: Clique::new(t.clique.iter().map(|v| v - 1).collect()),
                weight: t.weight.to_polynomial(j.nvars)?,
                basis: MonomialBasis { monomials: t.basis.iter().map(|e| Monomial(e.clone())).collect() },
                gram,
            });
        }
        Ok(Certificate {
            m: j.m,
            nvars: j.nvars,
            sigma: j.sigma.to_polynomial(j.nvars)?,
            terms,
            lambda: j.lambda.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub m: usize,
    pub nvars: usize,
    pub sigma: PolyJson,
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub clique: Vec<usize>,
    pub weight: PolyJson,
    pub basis: Vec<Vec<u32>>,
    pub gram: GramJson,
}

/// Row-major Gram entries: strings for exact rationals, numbers for floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GramJson {
    Exact(Vec<Vec<String>>),
    Float(Vec<Vec<f64>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstEntry {
    /// 1-based matrix position.
    pub row: usize,
    pub col: usize,
    pub monomial: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub exact: bool,
    pub max_coeff_residual: f64,
    pub min_gram_eig: f64,
    /// Exact PSD test of rational Gram matrices.
    pub grams_exactly_psd: Option<bool>,
    pub tol: f64,
    pub verdict: Verdict,
    pub worst: Option<WorstEntry>,
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arithmetic          {}", if self.exact { "exact" } else { "float" })?;
        writeln!(f, "max coeff residual  {:.3e}", self.max_coeff_residual)?;
        writeln!(f, "min Gram eigenvalue {:.3e}", self.min_gram_eig)?;
        if let Some(p) = self.grams_exactly_psd {
            writeln!(f, "Gram exactly PSD    {p}")?;
        }
        if let Some(w) = &self.worst {
            writeln!(f, "worst entry         ({}, {}) {}: {:.3e}", w.row, w.col, w.monomial, w.residual)?;
        }
        write!(f, "verdict             {}", if self.verdict == Verdict::Pass { "pass" } else { "fail" })
    }
}

/// Rebuilds the right-hand side of the certificate and compares it with
/// `sigma * P(x, lambda)` coefficient by coefficient.
pub fn verify_certificate(p: &ParamPolyMatrix, cert: &Certificate, tol: f64) -> Result<ResidualReport, Error> {
    let m = p.order();
    let n = p.nvars();
    if cert.m != m || cert.nvars != n || cert.sigma.nvars() != n {
        return Err(Error::Dimension(format!(
            "certificate is for {}x{} in {} variables, matrix is {m}x{m} in {n}",
            cert.m, cert.m, cert.nvars
        )));
    }
    let lambda: Vec<f64> = match &cert.lambda {
        Some(l) => l.clone(),
        None => vec![0.0; p.num_params()],
    };
    if lambda.len() != p.num_params() {
        return Err(Error::Dimension(format!(
            "{} parameters expected, certificate has {}",
            p.num_params(),
            lambda.len()
        )));
    }
    for (k, t) in cert.terms.iter().enumerate() {
        let need = t.clique.len() * t.basis.len();
        if t.gram.order() != need || t.clique.vertices().iter().any(|&v| v >= m) || t.weight.nvars() != n {
            return Err(Error::Dimension(format!("term {} is inconsistent with its clique and basis", k + 1)));
        }
        if t.basis.monomials.iter().any(|b| b.nvars() != n) {
            return Err(Error::Dimension(format!("term {} has a basis in the wrong variables", k + 1)));
        }
    }
    let lam_exact: Vec<Rational> = lambda.iter().map(|&v| rat_from_f64(v)).collect();
    let target = p.at(&lam_exact)?.scale_poly(&cert.sigma);

    // residual[(i, j, mono)] = certificate - target
    let mut residual: BTreeMap<(usize, usize, Monomial), f64> = BTreeMap::new();
    let exact = cert.is_exact();
    if exact {
        let mut acc = target.scale(&Rational::from_integer((-1).into()));
        for t in &cert.terms {
            let GramMatrix::Exact(g) = &t.gram else { unreachable!() };
            acc = acc.add(&gram_to_polymatrix(g, &t.spec(), m)?)?;
        }
        for (&(i, j), e) in acc.entries() {
            for (mono, c) in e.terms() {
                residual.insert((i, j, mono.clone()), rat_to_f64(c));
            }
        }
    } else {
        for (&(i, j), e) in target.entries() {
            for (mono, c) in e.terms() {
                *residual.entry((i, j, mono.clone())).or_insert(0.0) -= rat_to_f64(c);
            }
        }
        for t in &cert.terms {
            accumulate_float(&mut residual, t);
        }
    }
    let worst = residual
        .iter()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .filter(|(_, v)| **v != 0.0)
        .map(|((i, j, mono), v)| WorstEntry { row: i + 1, col: j + 1, monomial: mono.to_string(), residual: *v });
    let max_coeff_residual = worst.as_ref().map_or(0.0, |w| w.residual.abs());

    let mut min_gram_eig = f64::INFINITY;
    let mut all_exact_psd = true;
    for t in &cert.terms {
        if let Some(&e) = eigenvalues(&t.gram.to_f64()).first() {
            min_gram_eig = min_gram_eig.min(e);
        }
        if let GramMatrix::Exact(g) = &t.gram {
            all_exact_psd &=
                g.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| *v == g[j][i])) && exact_is_psd(g);
        }
    }
    if cert.terms.is_empty() {
        min_gram_eig = 0.0;
    }
    let grams_exactly_psd = exact.then_some(all_exact_psd);
    let psd_ok = match grams_exactly_psd {
        Some(ok) => ok,
        None => min_gram_eig >= -tol,
    };
    let verdict = if max_coeff_residual <= tol && psd_ok { Verdict::Pass } else { Verdict::Fail };
    Ok(ResidualReport { exact, max_coeff_residual, min_gram_eig, grams_exactly_psd, tol, verdict, worst })
}

fn accumulate_float(acc: &mut BTreeMap<(usize, usize, Monomial), f64>, t: &CertificateTerm) {
    let g = t.gram.to_f64();
    let nb = t.basis.len();
    let r = t.clique.len();
    let wterms: Vec<(Monomial, f64)> = t.weight.terms().map(|(m, c)| (m.clone(), rat_to_f64(c))).collect();
    for a in 0..r {
        for b in a..r {
            let (p, q) = (t.clique.vertices()[a], t.clique.vertices()[b]);
            for s in 0..nb {
                for u in 0..nb {
                    let c = g[a * nb + s][b * nb + u];
                    if c == 0.0 {
                        continue;
                    }
                    let vv = t.basis.monomials[s].mul(&t.basis.monomials[u]);
                    for (wm, wc) in &wterms {
                        *acc.entry((p, q, vv.mul(wm))).or_insert(0.0) += c * wc;
                    }
                }
            }
        }
    }
}

/// Largest absolute coefficient of `sigma * P(x, lambda)`, for relative tolerances.
pub fn target_scale(p: &ParamPolyMatrix, cert: &Certificate) -> Result<f64, Error> {
    let lam: Vec<Rational> = match &cert.lambda {
        Some(l) => l.iter().map(|&v| rat_from_f64(v)).collect(),
        None => vec![Rational::zero(); p.num_params()],
    };
    let t = p.at(&lam)?.scale_poly(&cert.sigma);
    Ok(t.entries().map(|(_, e)| rat_to_f64(&e.max_abs_coeff().abs())).fold(0.0, f64::max))
}
