//! Polynomial matrices.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{parse_polynomial, parse_rational, Monomial, Polynomial, Rational};
use crate::graph::SparsityGraph;
use crate::Error;

/// Symmetric `m x m` polynomial matrix; only the upper triangle is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    m: usize,
    nvars: usize,
    entries: BTreeMap<(usize, usize), Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(m: usize, nvars: usize) -> Self {
        Self { m, nvars, entries: BTreeMap::new() }
    }

    pub fn identity(m: usize, nvars: usize) -> Self {
        let mut p = Self::zeros(m, nvars);
        for i in 0..m {
            p.set(i, i, Polynomial::one(nvars));
        }
        p
    }

    pub fn from_constant(rows: &[Vec<Rational>], nvars: usize) -> Result<Self, Error> {
        let m = rows.len();
        let mut p = Self::zeros(m, nvars);
        for i in 0..m {
            if rows[i].len() != m {
                return Err(Error::Dimension("constant matrix is not square".into()));
            }
            for j in i..m {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Dimension(format!("constant matrix not symmetric at ({}, {})", i + 1, j + 1)));
                }
                p.set(i, j, Polynomial::constant(nvars, rows[i][j].clone()));
            }
        }
        Ok(p)
    }

    /// Builds from text entries of the upper triangle, row by row.
    pub fn from_strings(m: usize, nvars: usize, upper: &[((usize, usize), &str)]) -> Result<Self, Error> {
        let mut p = Self::zeros(m, nvars);
        for &((i, j), s) in upper {
            if i >= m || j >= m {
                return Err(Error::Dimension(format!("entry ({}, {}) outside {m} x {m}", i + 1, j + 1)));
            }
            p.set(i, j, parse_polynomial(s, nvars)?);
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Polynomial> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries.get(&key)
    }

    pub fn entry(&self, i: usize, j: usize) -> Polynomial {
        self.get(i, j).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars, "variable count mismatch");
        assert!(i < self.m && j < self.m, "index out of range");
        let key = if i <= j { (i, j) } else { (j, i) };
        if p.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, p);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, p: &Polynomial) {
        let cur = self.entry(i, j);
        self.set(i, j, &cur + p);
    }

    /// Nonzero upper-triangle entries.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Polynomial)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.entries.values().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Edge `{i, j}` (i != j) iff entry `(i, j)` is not the zero polynomial.
    pub fn sparsity_graph(&self) -> SparsityGraph {
        let mut g = SparsityGraph::empty(self.m);
        for &(i, j) in self.entries.keys() {
            if i != j {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn eval(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.m]; self.m];
        for (&(i, j), p) in &self.entries {
            let v = p.eval(x);
            out[i][j] = v;
            out[j][i] = v;
        }
        out
    }

    pub fn scale_poly(&self, s: &Polynomial) -> PolyMatrix {
        let mut out = Self::zeros(self.m, self.nvars);
        for (&(i, j), p) in &self.entries {
            out.set(i, j, p * s);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        let mut out = Self::zeros(self.m, self.nvars);
        for (&(i, j), p) in &self.entries {
            out.set(i, j, p.scale(c));
        }
        out
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        if self.m != other.m || self.nvars != other.nvars {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        let mut out = self.clone();
        for (&(i, j), p) in &other.entries {
            out.add_to(i, j, p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    /// Entries restricted to `rows` (in that order).
    pub fn principal(&self, rows: &[usize]) -> PolyMatrix {
        let mut out = Self::zeros(rows.len(), self.nvars);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate().skip(a) {
                if let Some(p) = self.get(i, j) {
                    out.set(a, b, p.clone());
                }
            }
        }
        out
    }

    /// `T P T'` for a permutation with `(TPT')_{ij} = P_{t(i), t(j)}`.
    pub fn permute(&self, t: &[usize]) -> PolyMatrix {
        self.principal(t)
    }

    /// Coefficient of `x^mono` as a dense rational matrix.
    pub fn coefficient_matrix(&self, mono: &Monomial) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.m]; self.m];
        for (&(i, j), p) in &self.entries {
            let c = p.coeff(mono);
            out[i][j] = c.clone();
            out[j][i] = c;
        }
        out
    }

    /// All monomials appearing in some entry.
    pub fn support(&self) -> Vec<Monomial> {
        let mut s: Vec<Monomial> = self.entries.values().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn to_general(&self) -> GeneralPolyMatrix {
        let mut g = GeneralPolyMatrix::zeros(self.m, self.m, self.nvars);
        for (&(i, j), p) in &self.entries {
            g.set(i, j, p.clone());
            g.set(j, i, p.clone());
        }
        g
    }

    pub fn to_json(&self) -> PolyMatrixJson {
        PolyMatrixJson {
            m: self.m,
            nvars: self.nvars,
            variables: (1..=self.nvars).map(|i| format!("x{i}")).collect(),
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), p)| ([i + 1, j + 1], PolyJson::Terms(p.to_terms_json())))
                .collect(),
        }
    }

    pub fn from_json(j: &PolyMatrixJson) -> Result<Self, Error> {
        let mut p = Self::zeros(j.m, j.nvars);
        for ([i, k], poly) in &j.entries {
            if *i == 0 || *k == 0 || *i > j.m || *k > j.m {
                return Err(Error::Dimension(format!("entry [{i}, {k}] outside 1..={}", j.m)));
            }
            let q = poly.to_polynomial(j.nvars)?;
            p.add_to(i - 1, k - 1, &q);
        }
        Ok(p)
    }
}

/// Polynomial in JSON: a term list or a text expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyJson {
    Terms(Vec<(Vec<u32>, String)>),
    Expr(String),
}

impl PolyJson {
    pub fn to_polynomial(&self, nvars: usize) -> Result<Polynomial, Error> {
        match self {
            PolyJson::Expr(s) => parse_polynomial(s, nvars),
            PolyJson::Terms(t) => {
                let mut terms = Vec::with_capacity(t.len());
                for (e, c) in t {
                    terms.push((e.clone(), parse_rational(c)?));
                }
                Polynomial::from_terms(nvars, terms)
            }
        }
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        PolyJson::Terms(p.to_terms_json())
    }
}

/// JSON layout of a symmetric polynomial matrix (1-based entries, upper triangle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyMatrixJson {
    pub m: usize,
    pub nvars: usize,
    #[serde(default)]
    pub variables: Vec<String>,
    pub entries: Vec<([usize; 2], PolyJson)>,
}

/// Dense rectangular polynomial matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<Polynomial>,
}

impl GeneralPolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Self { rows, cols, nvars, data: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut g = Self::zeros(n, n, nvars);
        for i in 0..n {
            g.set(i, i, Polynomial::one(nvars));
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.data[i * self.cols + j] = p;
    }

    pub fn transpose(&self) -> GeneralPolyMatrix {
        let mut t = Self::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &GeneralPolyMatrix) -> GeneralPolyMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(self.nvars);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `self * diag(d) * self'` as a symmetric matrix.
    pub fn congruence_diag(&self, d: &[Polynomial]) -> PolyMatrix {
        assert_eq!(self.cols, d.len());
        let mut out = PolyMatrix::zeros(self.rows, self.nvars);
        for i in 0..self.rows {
            for j in i..self.rows {
                let mut acc = Polynomial::zero(self.nvars);
                for (k, dk) in d.iter().enumerate() {
                    let a = self.get(i, k);
                    let b = self.get(j, k);
                    if !a.is_zero() && !b.is_zero() && !dk.is_zero() {
                        acc = acc + &(a * b) * dk;
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| ((i + 1)..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn scale_poly(&self, s: &Polynomial) -> GeneralPolyMatrix {
        let mut out = self.clone();
        for p in &mut out.data {
            *p = &*p * s;
        }
        out
    }
}
