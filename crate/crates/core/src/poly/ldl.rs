//! Fill-free polynomial LDL' diagonalization of chordally sparse matrices.

use super::{GeneralPolyMatrix, PolyMatrix, Polynomial};
use crate::graph::SparsityGraph;
use crate::Error;

/// Row selection: row `i` of `T` is the unit vector `e_{t[i]}`.
pub type Permutation = Vec<usize>;

/// `b^4 T P T' = L diag(d) L'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub perm: Permutation,
    pub b: Polynomial,
    pub l: GeneralPolyMatrix,
    pub diag: Vec<Polynomial>,
}

impl Diagonalization {
    /// Checks the identity coefficient by coefficient.
    pub fn verify(&self, p: &PolyMatrix) -> bool {
        let lhs = p.permute(&self.perm).scale_poly(&self.b.pow(4));
        let rhs = self.l.congruence_diag(&self.diag);
        lhs == rhs
    }

    /// Whether `L + L'` has no nonzero outside the pattern of `T P T'`.
    pub fn no_fill(&self, p: &PolyMatrix) -> bool {
        let tp = p.permute(&self.perm);
        let m = tp.order();
        (0..m).all(|i| (0..i).all(|j| self.l.get(i, j).is_zero() || tp.get(i, j).is_some()))
    }
}

/// One Schmudgen elimination of the leading entry `u = P_11`:
/// `u^4 P = Z Q Z'` with `Z = [[u, 0], [v, u I]]` and
/// `Q = diag(u^3, u^2 W - u v v')`.
pub fn schmudgen_step(p: &PolyMatrix) -> Result<(GeneralPolyMatrix, PolyMatrix), Error> {
    let m = p.order();
    if m < 2 {
        return Err(Error::Precondition("schmudgen_step needs m >= 2".into()));
    }
    let n = p.nvars();
    let u = p.entry(0, 0);
    let v: Vec<Polynomial> = (1..m).map(|i| p.entry(0, i)).collect();
    let mut z = GeneralPolyMatrix::zeros(m, m, n);
    z.set(0, 0, u.clone());
    for i in 1..m {
        z.set(i, 0, v[i - 1].clone());
        z.set(i, i, u.clone());
    }
    let u2 = &u * &u;
    let mut q = PolyMatrix::zeros(m, n);
    q.set(0, 0, &u2 * &u);
    for i in 1..m {
        for j in i..m {
            let w = p.entry(i, j);
            let e = &u2 * &w - &(&u * &v[i - 1]) * &v[j - 1];
            q.set(i, j, e);
        }
    }
    Ok((z, q))
}

/// Recursive diagonalization along simplicial vertices.
///
/// The pivot is the lowest simplicial vertex whose diagonal entry is nonzero
/// or whose row is already zero. Rejects non-chordal sparsity.
pub fn sparse_ldl_diagonalize(p: &PolyMatrix) -> Result<Diagonalization, Error> {
    let g = p.sparsity_graph();
    if g.is_chordal().is_none() {
        return Err(Error::Precondition("sparsity graph is not chordal; extend it first".into()));
    }
    rec(p, &g)
}

fn rec(p: &PolyMatrix, g: &SparsityGraph) -> Result<Diagonalization, Error> {
    let m = p.order();
    let n = p.nvars();
    if m == 0 {
        return Ok(Diagonalization {
            perm: Vec::new(),
            b: Polynomial::one(n),
            l: GeneralPolyMatrix::zeros(0, 0, n),
            diag: Vec::new(),
        });
    }
    if m == 1 {
        return Ok(Diagonalization {
            perm: vec![0],
            b: Polynomial::one(n),
            l: GeneralPolyMatrix::identity(1, n),
            diag: vec![p.entry(0, 0)],
        });
    }
    let row_zero = |v: usize| (0..m).all(|j| j == v || p.get(v, j).is_none());
    let v = (0..m)
        .find(|&v| g.is_simplicial(v) && (row_zero(v) || p.get(v, v).is_some()))
        .ok_or_else(|| Error::PivotFailure("every simplicial pivot is the zero polynomial".into()))?;
    let others: Vec<usize> = (0..m).filter(|&u| u != v).collect();
    let a = p.entry(v, v);
    let q: Vec<Polynomial> = others.iter().map(|&u| p.entry(v, u)).collect();
    let w = p.principal(&others);
    let sub_g = g.remove_vertex(v)?;

    let isolated = q.iter().all(Polynomial::is_zero);
    let reduced = if isolated {
        w
    } else {
        let a2 = &a * &a;
        let mut r = PolyMatrix::zeros(m - 1, n);
        for i in 0..m - 1 {
            for j in i..m - 1 {
                let e = &a2 * &w.entry(i, j) - &(&a * &q[i]) * &q[j];
                r.set(i, j, e);
            }
        }
        r
    };
    let inner = rec(&reduced, &sub_g)?;
    let s4 = inner.b.pow(4);

    let mut perm = Vec::with_capacity(m);
    perm.push(v);
    perm.extend(inner.perm.iter().map(|&i| others[i]));

    let mut l = GeneralPolyMatrix::zeros(m, m, n);
    let mut diag = Vec::with_capacity(m);
    let b;
    if isolated {
        b = inner.b.clone();
        diag.push(&s4 * &a);
        l.set(0, 0, Polynomial::one(n));
        for i in 0..m - 1 {
            for j in 0..=i {
                l.set(i + 1, j + 1, inner.l.get(i, j).clone());
            }
        }
    } else {
        b = &inner.b * &a;
        diag.push(&s4 * &a.pow(3));
        l.set(0, 0, a.clone());
        for i in 0..m - 1 {
            l.set(i + 1, 0, q[inner.perm[i]].clone());
            for j in 0..=i {
                l.set(i + 1, j + 1, inner.l.get(i, j) * &a);
            }
        }
    }
    diag.extend(inner.diag);
    Ok(Diagonalization { perm, b, l, diag })
}
