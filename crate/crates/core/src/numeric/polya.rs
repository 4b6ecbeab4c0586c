//! Smallest Polya exponent with PSD coefficient matrices.

use super::agler::{agler_decompose, agler_decompose_exact, exact_is_psd, CliqueSplit};
use super::psd_check;
use crate::graph::{clique_cover, Clique};
use crate::poly::{polya_expand, rat_to_f64, structure_flags, Monomial, PolyMatrix, Rational};

/// Above this order coefficient matrices are tested in floating point.
pub const EXACT_MAX_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientSplits {
    Exact(Vec<(Monomial, CliqueSplit<Rational>)>),
    Float(Vec<(Monomial, CliqueSplit<f64>)>),
}

/// Result of a successful search. Keys are the monomials `x^{2 alpha}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyaReport {
    pub nu: u32,
    pub cliques: Vec<Clique>,
    pub splits: CoefficientSplits,
}

/// Tries `nu = 0, 1, ..., nu_max`. `None` if `P` is not even and homogeneous
/// or no exponent in range works.
pub fn polya_exponent_search(p: &PolyMatrix, nu_max: u32, tol: f64) -> Option<PolyaReport> {
    let f = structure_flags(p);
    if !f.homogeneous || !f.even {
        return None;
    }
    let cliques = clique_cover(&p.sparsity_graph());
    let exact = p.order() <= EXACT_MAX_ORDER;
    for nu in 0..=nu_max {
        let coeffs = polya_expand(p, nu);
        if exact {
            if !coeffs.values().all(|c| exact_is_psd(c)) {
                continue;
            }
            let splits = coeffs
                .into_iter()
                .map(|(a, c)| agler_decompose_exact(&c, &cliques).map(|s| (a, s)))
                .collect::<Result<Vec<_>, _>>()
                .ok()?;
            return Some(PolyaReport { nu, cliques, splits: CoefficientSplits::Exact(splits) });
        }
        let fl: Vec<(Monomial, Vec<Vec<f64>>)> = coeffs
            .into_iter()
            .map(|(a, c)| (a, c.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect()))
            .collect();
        if !fl.iter().all(|(_, c)| psd_check(c, tol).is_ok_and(|r| r.psd)) {
            continue;
        }
        let splits = fl
            .into_iter()
            .map(|(a, c)| agler_decompose(&c, &cliques, tol).map(|s| (a, s)))
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        return Some(PolyaReport { nu, cliques, splits: CoefficientSplits::Float(splits) });
    }
    None
}
