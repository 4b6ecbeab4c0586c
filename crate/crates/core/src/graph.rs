//! Chordal sparsity graphs.
//!
//! Vertices are 0-based in the API; JSON and display use 1-based labels.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Simple undirected graph on `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityGraph {
    adj: Vec<BTreeSet<usize>>,
}

/// Sorted vertex set of a maximal clique.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clique(pub Vec<usize>);

impl Clique {
    pub fn new(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        Clique(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// 1-based labels.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Perfect elimination ordering; `order[k]` is the k-th vertex eliminated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrdering {
    pub order: Vec<usize>,
}

impl EliminationOrdering {
    /// `pos[v]` is the index of `v` in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

/// JSON form: `{"m": 3, "edges": [[1,2],[2,3]]}` with 1-based vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
}

impl SparsityGraph {
    pub fn empty(m: usize) -> Self {
        Self { adj: vec![BTreeSet::new(); m] }
    }

    /// Builds a graph from 0-based edges. Rejects loops and out-of-range ends.
    pub fn new(m: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        let mut g = Self::empty(m);
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::Graph(format!("edge ({}, {}) out of range for m = {m}", a + 1, b + 1)));
            }
            if a == b {
                return Err(Error::Graph(format!("self-loop at vertex {}", a + 1)));
            }
            g.adj[a].insert(b);
            g.adj[b].insert(a);
        }
        Ok(g)
    }

    /// Same as [`SparsityGraph::new`] with 1-based vertex labels.
    pub fn from_one_based(m: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        let mut e = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 {
                return Err(Error::Graph("vertex labels are 1-based".into()));
            }
            e.push((a - 1, b - 1));
        }
        Self::new(m, &e)
    }

    pub fn complete(m: usize) -> Self {
        let mut g = Self::empty(m);
        for a in 0..m {
            for b in (a + 1)..m {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, Error> {
        let e: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_one_based(j.m, &e)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { m: self.order(), edges: self.edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect() }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb.range((a + 1)..) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Maximum cardinality search followed by a PEO check.
    ///
    /// Ties go to the largest label, so a path `1-2-3` yields the order `1,2,3`.
    pub fn is_chordal(&self) -> Option<EliminationOrdering> {
        let order = self.mcs_order();
        let peo = EliminationOrdering { order };
        if self.verify_peo(&peo) {
            Some(peo)
        } else {
            None
        }
    }

    fn mcs_order(&self) -> Vec<usize> {
        let m = self.order();
        let mut weight = vec![0usize; m];
        let mut visited = vec![false; m];
        let mut visit = Vec::with_capacity(m);
        for _ in 0..m {
            let mut best: Option<usize> = None;
            for v in 0..m {
                if !visited[v] && best.is_none_or(|b| weight[v] >= weight[b]) {
                    best = Some(v);
                }
            }
            let v = best.unwrap();
            visited[v] = true;
            visit.push(v);
            for &u in &self.adj[v] {
                if !visited[u] {
                    weight[u] += 1;
                }
            }
        }
        visit.reverse();
        visit
    }

    /// Checks that every vertex's later neighbours form a clique.
    pub fn verify_peo(&self, peo: &EliminationOrdering) -> bool {
        let m = self.order();
        if peo.order.len() != m {
            return false;
        }
        let mut seen = vec![false; m];
        for &v in &peo.order {
            if v >= m || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        let pos = peo.positions();
        for &v in &peo.order {
            let later: Vec<usize> = self.adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
            let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) else { continue };
            if later.iter().any(|&u| u != parent && !self.adj[parent].contains(&u)) {
                return false;
            }
        }
        true
    }

    /// Maximal cliques read off a PEO, sorted lexicographically.
    pub fn maximal_cliques(&self, peo: &EliminationOrdering) -> Result<Vec<Clique>, Error> {
        if !self.verify_peo(peo) {
            return Err(Error::Graph("ordering is not a perfect elimination ordering".into()));
        }
        let m = self.order();
        let pos = peo.positions();
        let later: Vec<Vec<usize>> =
            (0..m).map(|v| self.adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect()).collect();
        // C_v = {v} + later(v) is not maximal iff some u with parent v has
        // |later(u)| > |later(v)|.
        let mut dominated = vec![false; m];
        for u in 0..m {
            if let Some(&p) = later[u].iter().min_by_key(|&&w| pos[w]) {
                if later[u].len() > later[p].len() {
                    dominated[p] = true;
                }
            }
        }
        let mut cliques: Vec<Clique> = (0..m)
            .filter(|&v| !dominated[v])
            .map(|v| {
                let mut c = later[v].clone();
                c.push(v);
                Clique::new(c)
            })
            .collect();
        cliques.sort();
        Ok(cliques)
    }

    /// Vertices whose neighbourhood is complete, ascending.
    pub fn simplicial_vertices(&self) -> Vec<usize> {
        (0..self.order()).filter(|&v| self.is_simplicial(v)).collect()
    }

    pub fn is_simplicial(&self, v: usize) -> bool {
        let nb: Vec<usize> = self.adj[v].iter().copied().collect();
        nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| self.adj[a].contains(&b)))
    }

    /// Deletes `v`; vertices above it shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Result<SparsityGraph, Error> {
        if v >= self.order() {
            return Err(Error::Graph(format!("vertex {} out of range", v + 1)));
        }
        let relabel = |u: usize| if u > v { u - 1 } else { u };
        let adj = self
            .adj
            .iter()
            .enumerate()
            .filter(|&(u, _)| u != v)
            .map(|(_, nb)| nb.iter().filter(|&&u| u != v).map(|&u| relabel(u)).collect())
            .collect();
        Ok(SparsityGraph { adj })
    }

    /// Chordal supergraph by greedy elimination.
    ///
    /// Chordal inputs are returned unchanged. Otherwise a simplicial vertex
    /// of the current elimination graph is preferred (no fill); failing that,
    /// the vertex of minimum degree, lowest label first.
    pub fn chordal_extension(&self) -> (SparsityGraph, EliminationOrdering) {
        if let Some(peo) = self.is_chordal() {
            return (self.clone(), peo);
        }
        let m = self.order();
        let mut work = self.adj.clone();
        let mut filled = self.clone();
        let mut alive = vec![true; m];
        let mut order = Vec::with_capacity(m);
        for _ in 0..m {
            let simplicial = |v: usize, work: &Vec<BTreeSet<usize>>| {
                let nb: Vec<usize> = work[v].iter().copied().collect();
                nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| work[a].contains(&b)))
            };
            let pick = (0..m)
                .filter(|&v| alive[v] && simplicial(v, &work))
                .min_by_key(|&v| (work[v].len(), v))
                .or_else(|| (0..m).filter(|&v| alive[v]).min_by_key(|&v| (work[v].len(), v)))
                .unwrap();
            let nb: Vec<usize> = work[pick].iter().copied().collect();
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    work[a].insert(b);
                    work[b].insert(a);
                    filled.add_edge(a, b);
                }
            }
            for &a in &nb {
                work[a].remove(&pick);
            }
            work[pick].clear();
            alive[pick] = false;
            order.push(pick);
        }
        (filled, EliminationOrdering { order })
    }

    /// Whether every edge lies inside some clique of the list.
    pub fn covered_by(&self, cliques: &[Clique]) -> bool {
        self.edges().iter().all(|&(a, b)| cliques.iter().any(|c| c.contains(a) && c.contains(b)))
    }

    /// Union of the complete graphs on the given cliques.
    pub fn from_cliques(m: usize, cliques: &[Clique]) -> Result<Self, Error> {
        let mut g = Self::empty(m);
        for c in cliques {
            if c.0.iter().any(|&v| v >= m) {
                return Err(Error::Graph(format!("clique {c} out of range for m = {m}")));
            }
            for (i, &a) in c.0.iter().enumerate() {
                for &b in &c.0[i + 1..] {
                    g.add_edge(a, b);
                }
            }
        }
        Ok(g)
    }
}

/// Chordal cliques of a graph: its own if chordal, else of a chordal extension.
pub fn clique_cover(g: &SparsityGraph) -> Vec<Clique> {
    let (h, peo) = g.chordal_extension();
    h.maximal_cliques(&peo).expect("extension ordering is perfect")
}
