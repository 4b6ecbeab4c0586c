//! Clique splitting of chordally sparse PSD matrices by no-fill LDL'.

use num_traits::{Signed, Zero};

use crate::graph::{Clique, SparsityGraph};
use crate::poly::Rational;
use crate::Error;

/// Field used by the factorization. `is_negligible` is the pivot clamp.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_negative(&self) -> bool;
    fn is_negligible(&self, tol: f64) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
}

/// `M = sum_k E_k' X_k E_k` with one block per clique.
#[derive(Clone, Debug, PartialEq)]
pub struct CliqueSplit<T> {
    pub cliques: Vec<Clique>,
    pub blocks: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> CliqueSplit<T> {
    /// `sum_k E_k' X_k E_k` as a dense `m x m` matrix.
    pub fn assemble(&self, m: usize) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); m]; m];
        for (c, x) in self.cliques.iter().zip(&self.blocks) {
            for (a, &i) in c.vertices().iter().enumerate() {
                for (b, &j) in c.vertices().iter().enumerate() {
                    out[i][j] = out[i][j].add(&x[a][b]);
                }
            }
        }
        out
    }
}

impl CliqueSplit<Rational> {
    pub fn to_f64(&self) -> CliqueSplit<f64> {
        CliqueSplit {
            cliques: self.cliques.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|x| x.iter().map(|r| r.iter().map(crate::poly::rat_to_f64).collect()).collect())
                .collect(),
        }
    }
}

/// Float split; pivots within `tol` of zero are clamped.
pub fn agler_decompose(m: &[Vec<f64>], cliques: &[Clique], tol: f64) -> Result<CliqueSplit<f64>, Error> {
    decompose(m, cliques, tol)
}

/// Exact split over the rationals.
pub fn agler_decompose_exact(m: &[Vec<Rational>], cliques: &[Clique]) -> Result<CliqueSplit<Rational>, Error> {
    decompose(m, cliques, 0.0)
}

/// Exact PSD test by symmetric elimination in natural order.
pub fn exact_is_psd(m: &[Vec<Rational>]) -> bool {
    let order: Vec<usize> = (0..m.len()).collect();
    eliminate(m, &order, 0.0, |_, _, _| Ok(())).is_ok()
}

fn decompose<T: Scalar>(m: &[Vec<T>], cliques: &[Clique], tol: f64) -> Result<CliqueSplit<T>, Error> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    let mut cliques = cliques.to_vec();
    cliques.sort();
    let g = SparsityGraph::from_cliques(n, &cliques)?;
    if let Some(v) = (0..n).find(|&v| !cliques.iter().any(|c| c.contains(v))) {
        return Err(Error::Precondition(format!("vertex {} is in no clique", v + 1)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !m[i][j].is_negligible(tol) && !g.has_edge(i, j) {
                return Err(Error::Precondition(format!("entry ({}, {}) is not covered by any clique", i + 1, j + 1)));
            }
        }
    }
    let peo = g.is_chordal().ok_or_else(|| Error::Precondition("clique graph is not chordal".into()))?;
    let mut blocks: Vec<Vec<Vec<T>>> = cliques.iter().map(|c| vec![vec![T::zero(); c.len()]; c.len()]).collect();
    eliminate(m, &peo.order, tol, |v, d, col| {
        let support: Vec<usize> = std::iter::once(v).chain(col.iter().map(|&(u, _)| u)).collect();
        let k = cliques
            .iter()
            .position(|c| support.iter().all(|&u| c.contains(u)))
            .ok_or_else(|| Error::Precondition(format!("column {} has support outside every clique", v + 1)))?;
        let c = &cliques[k];
        let x = &mut blocks[k];
        let entries: Vec<(usize, T)> = std::iter::once((c.position(v).unwrap(), one_like(d)))
            .chain(col.iter().map(|(u, l)| (c.position(*u).unwrap(), l.clone())))
            .collect();
        for (a, la) in &entries {
            for (b, lb) in &entries {
                x[*a][*b] = x[*a][*b].add(&d.mul(la).mul(lb));
            }
        }
        Ok(())
    })?;
    Ok(CliqueSplit { cliques, blocks })
}

fn one_like<T: Scalar>(d: &T) -> T {
    d.div(d)
}

/// Runs LDL' in `order`; `emit(v, d, l)` receives each nonzero pivot with the
/// column below it as `(vertex, multiplier)` pairs.
fn eliminate<T: Scalar>(
    m: &[Vec<T>],
    order: &[usize],
    tol: f64,
    mut emit: impl FnMut(usize, &T, &[(usize, T)]) -> Result<(), Error>,
) -> Result<(), Error> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut done = vec![false; n];
    for &v in order {
        done[v] = true;
        let d = a[v][v].clone();
        let rest: Vec<usize> = (0..n).filter(|&u| !done[u] && !a[v][u].is_negligible(tol)).collect();
        if d.is_negligible(tol) {
            if let Some(&u) = rest.first() {
                return Err(Error::NotPsd(format!(
                    "zero pivot at {} with nonzero entry ({}, {})",
                    v + 1,
                    v + 1,
                    u + 1
                )));
            }
            continue;
        }
        if d.is_negative() {
            return Err(Error::NotPsd(format!("negative pivot at {}", v + 1)));
        }
        let col: Vec<(usize, T)> = rest.iter().map(|&u| (u, a[v][u].div(&d))).collect();
        for (i, (u, lu)) in col.iter().enumerate() {
            for (w, lw) in &col[i..] {
                let upd = a[*u][*w].sub(&d.mul(lu).mul(lw));
                a[*u][*w] = upd.clone();
                a[*w][*u] = upd;
            }
        }
        emit(v, &d, &col)?;
    }
    Ok(())
}
