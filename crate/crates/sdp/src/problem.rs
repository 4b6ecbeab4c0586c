//! Problem data for block-diagonal linear matrix inequalities.
//!
//! The primal problem is
//!
//! ```text
//! minimize    b'y
//! subject to  F0 + y1 F1 + ... + ym Fm  >= 0   (PSD and diagonal blocks)
//!             F0 + y1 F1 + ... + ym Fm  == 0   (free segment)
//! ```
//!
//! The free segment is a zero cone on the primal side, which makes the
//! corresponding entries of the dual variable unrestricted.

use serde::{Deserialize, Serialize};

use crate::SdpError;

/// One diagonal block of the constraint matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    /// Dense symmetric block of the given order.
    Psd(usize),
    /// Diagonal (linear programming) block with the given number of entries.
    Diag(usize),
}

impl Block {
    pub fn size(&self) -> usize {
        match *self {
            Block::Psd(n) | Block::Diag(n) => n,
        }
    }

    /// Decodes an SDPA block-structure entry (negative means diagonal).
    pub fn from_sdpa(v: i64) -> Result<Self, SdpError> {
        match v {
            0 => Err(SdpError::Invalid("block of size zero".into())),
            v if v > 0 => Ok(Block::Psd(v as usize)),
            v => Ok(Block::Diag(v.unsigned_abs() as usize)),
        }
    }

    pub fn to_sdpa(&self) -> i64 {
        match *self {
            Block::Psd(n) => n as i64,
            Block::Diag(n) => -(n as i64),
        }
    }
}

/// Sparse symmetric block-diagonal matrix plus a free-segment vector.
///
/// Entries are `(block, row, col, value)`, 0-based, upper triangle only.
/// An off-diagonal entry `(r, c, v)` stands for both `(r, c)` and `(c, r)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix {
    pub entries: Vec<(usize, usize, usize, f64)>,
    pub free: Vec<(usize, f64)>,
}

impl BlockMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` at `(row, col)` of `block`; the lower triangle is mirrored.
    pub fn push(&mut self, block: usize, row: usize, col: usize, v: f64) {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push((block, r, c, v));
    }

    pub fn push_free(&mut self, index: usize, v: f64) {
        self.free.push((index, v));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.free.is_empty()
    }

    /// Sorts entries, merges duplicates and drops exact zeros.
    fn canonicalize(&mut self) {
        self.entries.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &e in &self.entries {
            match out.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (e.0, e.1, e.2) => last.3 += e.3,
                _ => out.push(e),
            }
        }
        out.retain(|e| e.3 != 0.0);
        self.entries = out;

        self.free.sort_by_key(|e| e.0);
        let mut fout: Vec<(usize, f64)> = Vec::with_capacity(self.free.len());
        for &e in &self.free {
            match fout.last_mut() {
                Some(last) if last.0 == e.0 => last.1 += e.1,
                _ => fout.push(e),
            }
        }
        fout.retain(|e| e.1 != 0.0);
        self.free = fout;
    }

    /// Inner product with a dense symmetric block-diagonal matrix.
    pub fn dot(&self, blocks: &[DenseSym], free: &[f64]) -> f64 {
        let mut s = 0.0;
        for &(b, r, c, v) in &self.entries {
            let x = blocks[b].get(r, c);
            s += if r == c { v * x } else { 2.0 * v * x };
        }
        for &(i, v) in &self.free {
            s += v * free[i];
        }
        s
    }
}

/// Dense symmetric matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSym {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] = v;
        self.data[c * self.n + r] = v;
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] += v;
        if r != c {
            self.data[c * self.n + r] += v;
        }
    }

    /// Smallest eigenvalue (`+inf` for an empty matrix).
    pub fn min_eigenvalue(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        let m = faer::Mat::<f64>::from_fn(self.n, self.n, |i, j| self.get(i, j));
        crate::linalg::sym_eigenvalues(&m)[0]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A semidefinite program in LMI form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<Block>,
    pub free_vars: usize,
    pub f0: BlockMatrix,
    pub constraints: Vec<BlockMatrix>,
    pub objective: Vec<f64>,
}

impl SdpProblem {
    /// Validates and canonicalizes the data.
    pub fn new(
        blocks: Vec<Block>,
        free_vars: usize,
        f0: BlockMatrix,
        constraints: Vec<BlockMatrix>,
        objective: Vec<f64>,
    ) -> Result<Self, SdpError> {
        if constraints.len() != objective.len() {
            return Err(SdpError::Invalid(format!(
                "{} constraint matrices but objective of length {}",
                constraints.len(),
                objective.len()
            )));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(SdpError::Invalid("non-finite objective coefficient".into()));
        }
        let mut p = Self { blocks, free_vars, f0, constraints, objective };
        p.f0.canonicalize();
        for f in &mut p.constraints {
            f.canonicalize();
        }
        p.check_matrix(&p.f0, 0)?;
        for (i, f) in p.constraints.iter().enumerate() {
            p.check_matrix(f, i + 1)?;
        }
        Ok(p)
    }

    fn check_matrix(&self, f: &BlockMatrix, idx: usize) -> Result<(), SdpError> {
        for &(b, r, c, v) in &f.entries {
            let blk =
                self.blocks.get(b).ok_or_else(|| SdpError::Invalid(format!("F{idx}: block {} out of range", b + 1)))?;
            if c >= blk.size() {
                return Err(SdpError::Invalid(format!(
                    "F{idx}: entry ({}, {}) outside block {} of size {}",
                    r + 1,
                    c + 1,
                    b + 1,
                    blk.size()
                )));
            }
            if matches!(blk, Block::Diag(_)) && r != c {
                return Err(SdpError::Invalid(format!("F{idx}: off-diagonal entry in diagonal block {}", b + 1)));
            }
            if !v.is_finite() {
                return Err(SdpError::Invalid(format!("F{idx}: non-finite entry")));
            }
        }
        for &(i, v) in &f.free {
            if i >= self.free_vars {
                return Err(SdpError::Invalid(format!("F{idx}: free index {} out of range", i + 1)));
            }
            if !v.is_finite() {
                return Err(SdpError::Invalid(format!("F{idx}: non-finite free entry")));
            }
        }
        Ok(())
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Total order of the cone (sum of block sizes, free segment excluded).
    pub fn cone_order(&self) -> usize {
        self.blocks.iter().map(Block::size).sum()
    }

    /// Equivalent problem with the free segment replaced by a diagonal
    /// block of twice its size holding `+F(y)` and `-F(y)`.
    pub fn split_free_vars(&self) -> SdpProblem {
        if self.free_vars == 0 {
            return self.clone();
        }
        let nb = self.blocks.len();
        let mut blocks = self.blocks.clone();
        blocks.push(Block::Diag(2 * self.free_vars));
        let split = |f: &BlockMatrix| {
            let mut g = BlockMatrix { entries: f.entries.clone(), free: Vec::new() };
            for &(i, v) in &f.free {
                g.entries.push((nb, 2 * i, 2 * i, v));
                g.entries.push((nb, 2 * i + 1, 2 * i + 1, -v));
            }
            g
        };
        let f0 = split(&self.f0);
        let constraints = self.constraints.iter().map(split).collect();
        SdpProblem::new(blocks, 0, f0, constraints, self.objective.clone()).expect("splitting preserves validity")
    }

    /// Evaluates `F(y)` block by block; the free segment goes to the second value.
    pub fn eval_lmi(&self, y: &[f64]) -> (Vec<DenseSym>, Vec<f64>) {
        let mut blocks: Vec<DenseSym> = self.blocks.iter().map(|b| DenseSym::zeros(b.size())).collect();
        let mut free = vec![0.0; self.free_vars];
        let mut acc = |f: &BlockMatrix, s: f64| {
            for &(b, r, c, v) in &f.entries {
                blocks[b].add(r, c, s * v);
            }
            for &(i, v) in &f.free {
                free[i] += s * v;
            }
        };
        acc(&self.f0, 1.0);
        for (f, &yi) in self.constraints.iter().zip(y) {
            if yi != 0.0 {
                acc(f, yi);
            }
        }
        (blocks, free)
    }
}
