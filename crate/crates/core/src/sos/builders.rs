//! The dense, basic, weighted, even and Putinar-type SOS programs.

use serde::{Deserialize, Serialize};

use super::{assemble, homogeneous_basis, monomial_basis, GramBlockSpec, MonomialBasis, ParamPolyMatrix, SosProgram};
use crate::graph::Clique;
use crate::poly::{sum_of_squares_power, Polynomial};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hierarchy {
    Dense,
    Basic,
    Weighted,
    Even,
    Putinar,
}

impl std::str::FromStr for Hierarchy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "dense" => Ok(Hierarchy::Dense),
            "basic" => Ok(Hierarchy::Basic),
            "weighted" => Ok(Hierarchy::Weighted),
            "even" => Ok(Hierarchy::Even),
            "putinar" => Ok(Hierarchy::Putinar),
            _ => Err(Error::Unknown(format!("hierarchy '{s}'"))),
        }
    }
}

fn even_ceil(d: u32) -> u32 {
    d + d % 2
}

fn check_cover(pp: &ParamPolyMatrix, cliques: &[Clique]) -> Result<(), Error> {
    let m = pp.order();
    if let Some(c) = cliques.iter().find(|c| c.vertices().iter().any(|&v| v >= m)) {
        return Err(Error::Dimension(format!("clique {c} outside 1..={m}")));
    }
    if let Some(v) = (0..m).find(|&v| !cliques.iter().any(|c| c.contains(v))) {
        return Err(Error::Precondition(format!("vertex {} is in no clique", v + 1)));
    }
    if !pp.sparsity_graph().covered_by(cliques) {
        return Err(Error::Precondition("cliques do not cover the sparsity pattern".into()));
    }
    Ok(())
}

/// Degree-`<= d` basis, or the forms of degree `h` when `target` is a
/// matrix of forms of degree `2h <= 2d`.
fn basis_for(target: &ParamPolyMatrix, d: u32) -> MonomialBasis {
    match target.homogeneous_half_degree() {
        Some(h) if h <= d => homogeneous_basis(target.nvars(), h),
        _ => monomial_basis(target.nvars(), d),
    }
}

fn unit_blocks(cliques: &[Clique], basis: &MonomialBasis, n: usize) -> Vec<GramBlockSpec> {
    cliques
        .iter()
        .map(|c| GramBlockSpec { clique: c.clone(), weight: Polynomial::one(n), basis: basis.clone() })
        .collect()
}

/// Basis degree for each weight: `floor((D - deg g_j) / 2)` with
/// `D = max(d, even ceiling of deg P)`; `g_0 = 1` comes first.
pub fn putinar_basis_degrees(deg_p: u32, weights: &[Polynomial], d: u32) -> Result<Vec<u32>, Error> {
    let budget = d.max(even_ceil(deg_p));
    std::iter::once(0)
        .chain(weights.iter().map(Polynomial::degree))
        .map(|g| {
            if g > budget {
                Err(Error::Precondition(format!("weight of degree {g} exceeds the degree budget {budget}")))
            } else {
                Ok((budget - g) / 2)
            }
        })
        .collect()
}

fn weighted_blocks(
    pp: &ParamPolyMatrix,
    weights: &[Polynomial],
    cliques: &[Clique],
    d: u32,
) -> Result<Vec<GramBlockSpec>, Error> {
    let n = pp.nvars();
    if weights.iter().any(|g| g.nvars() != n) {
        return Err(Error::Dimension("weight has a different variable count".into()));
    }
    let degs = putinar_basis_degrees(pp.degree(), weights, d)?;
    let mut blocks = Vec::new();
    for c in cliques {
        for (j, &deg) in degs.iter().enumerate() {
            let weight = if j == 0 { Polynomial::one(n) } else { weights[j - 1].clone() };
            blocks.push(GramBlockSpec { clique: c.clone(), weight, basis: monomial_basis(n, deg) });
        }
    }
    Ok(blocks)
}

/// One full-size SOS matrix per weight. `d` is the degree budget.
pub fn build_dense(pp: &ParamPolyMatrix, weights: &[Polynomial], d: u32) -> Result<SosProgram, Error> {
    let n = pp.nvars();
    let all = vec![Clique::new((0..pp.order()).collect())];
    let blocks = if weights.is_empty() {
        let half = d.max(even_ceil(pp.degree())) / 2;
        unit_blocks(&all, &basis_for(pp, half), n)
    } else {
        weighted_blocks(pp, weights, &all, d)?
    };
    assemble(pp, &Polynomial::one(n), blocks)
}

/// One SOS block per clique; `d` is the basis degree.
pub fn build_basic_sparse(pp: &ParamPolyMatrix, cliques: &[Clique], d: u32) -> Result<SosProgram, Error> {
    check_cover(pp, cliques)?;
    let n = pp.nvars();
    assemble(pp, &Polynomial::one(n), unit_blocks(cliques, &basis_for(pp, d), n))
}

/// As [`build_basic_sparse`] but matching `sigma * P`.
pub fn build_weighted_sparse(
    pp: &ParamPolyMatrix,
    sigma: &Polynomial,
    cliques: &[Clique],
    d: u32,
) -> Result<SosProgram, Error> {
    check_cover(pp, cliques)?;
    let n = pp.nvars();
    let target = pp.scale_poly(sigma);
    assemble(pp, sigma, unit_blocks(cliques, &basis_for(&target, d), n))
}

/// `(x1^2 + ... + xn^2)^nu P` against SOS blocks of degree `2 nu + deg P`.
/// `cliques = None` gives the dense variant.
pub fn build_even_hierarchy(pp: &ParamPolyMatrix, nu: u32, cliques: Option<&[Clique]>) -> Result<SosProgram, Error> {
    let n = pp.nvars();
    if pp.homogeneous_half_degree().is_none() || !pp.matrices().all(|p| p.entries().all(|(_, e)| e.is_even())) {
        return Err(Error::Precondition("the even hierarchy needs an even matrix of forms".into()));
    }
    let all = vec![Clique::new((0..pp.order()).collect())];
    let cliques = match cliques {
        Some(c) => {
            check_cover(pp, c)?;
            c
        }
        None => &all[..],
    };
    let sigma = sum_of_squares_power(n, nu);
    let half = even_ceil(2 * nu + pp.degree()) / 2;
    let target = pp.scale_poly(&sigma);
    assemble(pp, &sigma, unit_blocks(cliques, &basis_for(&target, half), n))
}

/// Blocks `S_{j,k}` for every clique `k` and weight `g_j` (with `g_0 = 1`).
pub fn build_sparse_putinar(
    pp: &ParamPolyMatrix,
    weights: &[Polynomial],
    cliques: &[Clique],
    d: u32,
) -> Result<SosProgram, Error> {
    check_cover(pp, cliques)?;
    let blocks = weighted_blocks(pp, weights, cliques, d)?;
    assemble(pp, &Polynomial::one(pp.nvars()), blocks)
}
