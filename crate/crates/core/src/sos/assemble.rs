//! Coefficient matching between Gram blocks and `sigma * P(x, lambda)`.

use std::collections::{BTreeMap, BTreeSet};

use chordsos_sdp::{solve, Block, BlockMatrix, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{GramBlockSpec, ParamPolyMatrix};
use crate::certificate::{Certificate, CertificateTerm, GramMatrix};
use crate::numeric::psd_projection;
use crate::poly::{rat_to_f64, Monomial, Polynomial, Rational};
use crate::Error;

/// Where each SDP block and constraint came from.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryMap {
    pub target: ParamPolyMatrix,
    pub sigma: Polynomial,
    pub blocks: Vec<GramBlockSpec>,
    /// `(row, col, monomial)` matched by each constraint, 0-based, `row <= col`.
    pub keys: Vec<(usize, usize, Monomial)>,
    /// Power-of-two factor applied to each constraint.
    pub row_scale: Vec<f64>,
    /// Gram indices kept in each block after pruning.
    pub kept: Vec<Vec<usize>>,
    /// SDP block of each Gram block; `None` when every index was pruned.
    pub sdp_block: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosProgram {
    pub problem: SdpProblem,
    pub recovery: RecoveryMap,
}

/// SOS-side reading of a solver status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SosOutcome {
    Feasible,
    Infeasible,
    Unbounded,
    Inconclusive,
}

impl SosProgram {
    pub fn solve(&self, opts: &SdpOptions) -> SdpSolution {
        solve(&self.problem, opts)
    }

    pub fn num_constraints(&self) -> usize {
        self.problem.num_constraints()
    }

    /// Gram blocks are the equality-form variables, so an infeasible equality
    /// side means no certificate exists.
    pub fn outcome(&self, sol: &SdpSolution) -> SosOutcome {
        match sol.status {
            SdpStatus::Optimal => SosOutcome::Feasible,
            SdpStatus::DualInfeasible => SosOutcome::Infeasible,
            SdpStatus::PrimalInfeasible => SosOutcome::Unbounded,
            SdpStatus::MaxIterations | SdpStatus::NumericalFailure => SosOutcome::Inconclusive,
        }
    }

    /// `c' lambda` at the returned point.
    pub fn value(&self, sol: &SdpSolution) -> f64 {
        -sol.dual_objective
    }
}

#[derive(Default)]
struct Row {
    gram: BTreeMap<(usize, usize, usize), Rational>,
    lambda: BTreeMap<usize, Rational>,
    rhs: Rational,
}

/// Gram indices `(block, i)` whose diagonal entry is forced to zero: a row
/// with zero right-hand side, no `lambda`, and only same-signed diagonal
/// Gram coefficients. A PSD block then has the whole row and column zero.
/// Repeats until nothing changes and strips the pruned entries from `rows`.
fn forced_zero_indices(rows: &mut BTreeMap<(usize, usize, Monomial), Row>) -> BTreeSet<(usize, usize)> {
    let mut removed = BTreeSet::new();
    loop {
        let mut found = Vec::new();
        for row in rows.values() {
            if !row.rhs.is_zero() || !row.lambda.is_empty() || row.gram.is_empty() {
                continue;
            }
            let diag = row.gram.keys().all(|&(_, i, j)| i == j);
            let pos = row.gram.values().all(|v| v.is_positive());
            let neg = row.gram.values().all(|v| v.is_negative());
            if diag && (pos || neg) {
                found.extend(row.gram.keys().map(|&(k, i, _)| (k, i)));
            }
        }
        if found.is_empty() {
            return removed;
        }
        removed.extend(found);
        for row in rows.values_mut() {
            row.gram.retain(|&(k, i, j), _| !removed.contains(&(k, i)) && !removed.contains(&(k, j)));
        }
    }
}

/// Builds the SDP for `sigma * P(x, lambda) = sum_k weight_k * Gram form_k`
/// with objective `min c' lambda`.
pub fn assemble(pp: &ParamPolyMatrix, sigma: &Polynomial, blocks: Vec<GramBlockSpec>) -> Result<SosProgram, Error> {
    let m = pp.order();
    let n = pp.nvars();
    if sigma.nvars() != n {
        return Err(Error::Dimension("sigma has a different variable count".into()));
    }
    let target =
        if sigma.degree() == 0 && sigma.coeff(&Monomial::one(n)).is_one() { pp.clone() } else { pp.scale_poly(sigma) };
    let blocks: Vec<GramBlockSpec> = blocks.into_iter().filter(|b| b.block_size() > 0).collect();
    let mut rows: BTreeMap<(usize, usize, Monomial), Row> = BTreeMap::new();

    let half = Rational::new(1.into(), 2.into());
    for (k, spec) in blocks.iter().enumerate() {
        if spec.weight.nvars() != n || spec.basis.nvars() != n {
            return Err(Error::Dimension(format!("block {} has a different variable count", k + 1)));
        }
        if spec.clique.vertices().iter().any(|&v| v >= m) {
            return Err(Error::Dimension(format!("clique {} outside 1..={m}", spec.clique)));
        }
        let nb = spec.basis.len();
        let r = spec.clique.len();
        let wterms: Vec<(&Monomial, &Rational)> = spec.weight.terms().collect();
        for a in 0..r {
            for b in a..r {
                let (p, q) = (spec.clique.vertices()[a], spec.clique.vertices()[b]);
                for s in 0..nb {
                    let t0 = if a == b { s } else { 0 };
                    for t in t0..nb {
                        // Diagonal block pairs (s, t) and (t, s) share one entry.
                        let factor = if a == b { Rational::one() } else { half.clone() };
                        let vv = spec.basis.monomials[s].mul(&spec.basis.monomials[t]);
                        let (i, j) = (spec.index(a, s), spec.index(b, t));
                        for &(wm, wc) in &wterms {
                            let row = rows.entry((p, q, vv.mul(wm))).or_default();
                            *row.gram.entry((k, i, j)).or_insert_with(Rational::zero) += wc * &factor;
                        }
                    }
                }
            }
        }
    }
    for (&(p, q), e) in target.base.entries() {
        for (mono, c) in e.terms() {
            rows.entry((p, q, mono.clone())).or_default().rhs += c;
        }
    }
    for (l, d) in target.directions.iter().enumerate() {
        for (&(p, q), e) in d.entries() {
            for (mono, c) in e.terms() {
                *rows.entry((p, q, mono.clone())).or_default().lambda.entry(l).or_insert_with(Rational::zero) += c;
            }
        }
    }

    for row in rows.values_mut() {
        row.gram.retain(|_, v| !v.is_zero());
        row.lambda.retain(|_, v| !v.is_zero());
    }
    let removed = forced_zero_indices(&mut rows);
    let kept: Vec<Vec<usize>> = blocks
        .iter()
        .enumerate()
        .map(|(k, spec)| (0..spec.block_size()).filter(|&i| !removed.contains(&(k, i))).collect())
        .collect();
    let mut sdp_block = Vec::with_capacity(blocks.len());
    let mut sizes = Vec::new();
    for kk in &kept {
        if kk.is_empty() {
            sdp_block.push(None);
        } else {
            sdp_block.push(Some(sizes.len()));
            sizes.push(kk.len());
        }
    }

    let mut keys = Vec::with_capacity(rows.len());
    let mut row_scale = Vec::with_capacity(rows.len());
    let mut constraints = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    for (key, row) in rows {
        let maxabs = row.gram.values().chain(row.lambda.values()).map(|v| rat_to_f64(v).abs()).fold(0.0f64, f64::max);
        if maxabs == 0.0 {
            if row.rhs.is_zero() {
                continue;
            }
            return Err(Error::StructurallyInfeasible(format!(
                "coefficient of {} in entry ({}, {}) must equal {} but no block reaches it",
                key.2,
                key.0 + 1,
                key.1 + 1,
                crate::poly::fmt_rational(&row.rhs)
            )));
        }
        let scale = 2f64.powi(-(maxabs.log2().floor() as i32));
        let mut f = BlockMatrix::new();
        for (&(k, i, j), v) in &row.gram {
            let pos = |x: usize| kept[k].binary_search(&x).expect("pruned entries were removed");
            f.push(sdp_block[k].expect("block has entries"), pos(i), pos(j), rat_to_f64(v) * scale);
        }
        for (&l, v) in &row.lambda {
            f.push_free(l, -rat_to_f64(v) * scale);
        }
        constraints.push(f);
        b.push(rat_to_f64(&row.rhs) * scale);
        keys.push(key);
        row_scale.push(scale);
    }
    let mut f0 = BlockMatrix::new();
    for (l, &c) in pp.objective.iter().enumerate() {
        f0.push_free(l, c);
    }
    let sdp_blocks = sizes.into_iter().map(Block::Psd).collect();
    let problem = SdpProblem::new(sdp_blocks, pp.num_params(), f0, constraints, b)?;
    Ok(SosProgram {
        problem,
        recovery: RecoveryMap { target: pp.clone(), sigma: sigma.clone(), blocks, keys, row_scale, kept, sdp_block },
    })
}

/// Packages an optimal solution as a certificate; Gram blocks are projected
/// onto the PSD cone.
pub fn recover_certificate(prog: &SosProgram, sol: &SdpSolution) -> Result<Certificate, Error> {
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Precondition(format!("no certificate for solver status {:?}", sol.status)));
    }
    let rec = &prog.recovery;
    let terms = rec
        .blocks
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let n = spec.block_size();
            let mut full = vec![vec![0.0; n]; n];
            if let Some(b) = rec.sdp_block[k] {
                let z = &sol.dual_blocks[b];
                let kk = &rec.kept[k];
                let dense: Vec<Vec<f64>> = (0..z.n).map(|i| (0..z.n).map(|j| z.get(i, j)).collect()).collect();
                let proj = psd_projection(&dense);
                for (a, &i) in kk.iter().enumerate() {
                    for (c, &j) in kk.iter().enumerate() {
                        full[i][j] = proj[a][c];
                    }
                }
            }
            CertificateTerm {
                clique: spec.clique.clone(),
                weight: spec.weight.clone(),
                basis: spec.basis.clone(),
                gram: GramMatrix::Float(full),
            }
        })
        .collect();
    Ok(Certificate {
        m: rec.target.order(),
        nvars: rec.target.nvars(),
        sigma: rec.sigma.clone(),
        terms,
        lambda: (rec.target.num_params() > 0).then(|| sol.dual_free.clone()),
    })
}
