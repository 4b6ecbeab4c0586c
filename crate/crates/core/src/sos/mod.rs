//! Gram-matrix reformulation of matrix SOS programs as block SDPs.

mod assemble;
mod builders;
mod forced;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::graph::{Clique, SparsityGraph};
use crate::poly::{homogeneous_monomials, Monomial, PolyMatrix, Polynomial, Rational};
use crate::Error;

pub use assemble::{assemble, recover_certificate, RecoveryMap, SosOutcome, SosProgram};
pub use builders::{
    build_basic_sparse, build_dense, build_even_hierarchy, build_sparse_putinar, build_weighted_sparse,
    putinar_basis_degrees, Hierarchy,
};
pub use forced::forced_gram;

/// Ordered monomial vector `v(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    pub monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.monomials.first().map_or(0, Monomial::nvars)
    }
}

/// All monomials of degree at most `d`, graded-lex.
pub fn monomial_basis(n: usize, d: u32) -> MonomialBasis {
    MonomialBasis { monomials: (0..=d).flat_map(|k| homogeneous_monomials(n, k)).collect() }
}

/// Monomials of degree exactly `d`.
pub fn homogeneous_basis(n: usize, d: u32) -> MonomialBasis {
    MonomialBasis { monomials: homogeneous_monomials(n, d) }
}

/// One Gram block: `weight * E_C' (I (x) v)' G (I (x) v) E_C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBlockSpec {
    pub clique: Clique,
    pub weight: Polynomial,
    pub basis: MonomialBasis,
}

impl GramBlockSpec {
    pub fn block_size(&self) -> usize {
        self.clique.len() * self.basis.len()
    }

    /// Position of basis element `s` of clique row `a` in the Gram block.
    pub fn index(&self, a: usize, s: usize) -> usize {
        a * self.basis.len() + s
    }
}

/// `m x m` polynomial matrix realized by a Gram block.
pub fn gram_to_polymatrix(g: &[Vec<Rational>], spec: &GramBlockSpec, m: usize) -> Result<PolyMatrix, Error> {
    let n = spec.block_size();
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("Gram matrix must be {n} x {n}")));
    }
    if spec.clique.vertices().iter().any(|&v| v >= m) {
        return Err(Error::Dimension(format!("clique {} outside 1..={m}", spec.clique)));
    }
    let nv = spec.weight.nvars();
    let nb = spec.basis.len();
    let r = spec.clique.len();
    let mut out = PolyMatrix::zeros(m, nv);
    for a in 0..r {
        for b in a..r {
            let mut e = Polynomial::zero(nv);
            for s in 0..nb {
                for t in 0..nb {
                    let c = &g[spec.index(a, s)][spec.index(b, t)];
                    if !c.is_zero() {
                        e.add_term(spec.basis.monomials[s].mul(&spec.basis.monomials[t]), c.clone());
                    }
                }
            }
            let (p, q) = (spec.clique.vertices()[a], spec.clique.vertices()[b]);
            out.add_to(p, q, &(&e * &spec.weight));
        }
    }
    Ok(out)
}

/// `P(x, lambda) = P0(x) + sum_l lambda_l P_l(x)` with a linear cost `c' lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPolyMatrix {
    pub base: PolyMatrix,
    pub directions: Vec<PolyMatrix>,
    pub objective: Vec<f64>,
}

impl ParamPolyMatrix {
    pub fn new(base: PolyMatrix, directions: Vec<PolyMatrix>, objective: Vec<f64>) -> Result<Self, Error> {
        if directions.len() != objective.len() {
            return Err(Error::Dimension(format!(
                "{} directions but {} objective coefficients",
                directions.len(),
                objective.len()
            )));
        }
        if directions.iter().any(|d| d.order() != base.order() || d.nvars() != base.nvars()) {
            return Err(Error::Dimension("direction shape differs from the base matrix".into()));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("non-finite objective coefficient".into()));
        }
        Ok(Self { base, directions, objective })
    }

    /// No parameters, zero objective.
    pub fn fixed(p: PolyMatrix) -> Self {
        Self { base: p, directions: Vec::new(), objective: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn nvars(&self) -> usize {
        self.base.nvars()
    }

    pub fn num_params(&self) -> usize {
        self.directions.len()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &PolyMatrix> {
        std::iter::once(&self.base).chain(&self.directions)
    }

    pub fn degree(&self) -> u32 {
        self.matrices().map(PolyMatrix::degree).max().unwrap_or(0)
    }

    /// Union of the sparsity graphs of the base and every direction.
    pub fn sparsity_graph(&self) -> SparsityGraph {
        let mut g = SparsityGraph::empty(self.order());
        for p in self.matrices() {
            for (a, b) in p.sparsity_graph().edges() {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn scale_poly(&self, s: &Polynomial) -> ParamPolyMatrix {
        ParamPolyMatrix {
            base: self.base.scale_poly(s),
            directions: self.directions.iter().map(|d| d.scale_poly(s)).collect(),
            objective: self.objective.clone(),
        }
    }

    /// `P(x, lambda)` with exact parameters.
    pub fn at(&self, lambda: &[Rational]) -> Result<PolyMatrix, Error> {
        if lambda.len() != self.num_params() {
            return Err(Error::Dimension(format!("expected {} parameters, got {}", self.num_params(), lambda.len())));
        }
        let mut p = self.base.clone();
        for (d, l) in self.directions.iter().zip(lambda) {
            if !l.is_zero() {
                p = p.add(&d.scale(l))?;
            }
        }
        Ok(p)
    }

    /// Common even degree `2h` when every nonzero entry of every matrix is
    /// a form of that degree.
    pub fn homogeneous_half_degree(&self) -> Option<u32> {
        let mut deg = None;
        for p in self.matrices() {
            for (_, e) in p.entries() {
                let d = e.homogeneous_degree()?;
                if *deg.get_or_insert(d) != d {
                    return None;
                }
            }
        }
        let d = deg?;
        (d % 2 == 0).then_some(d / 2)
    }
}
