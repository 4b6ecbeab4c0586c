#![allow(dead_code)]

use chordsos::graph::{Clique, SparsityGraph};
use chordsos::poly::{rat, PolyMatrix, Polynomial};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random chordal graph: each new vertex is joined to a subset of an
/// earlier clique.
pub fn random_chordal(m: usize, r: &mut impl Rng) -> SparsityGraph {
    let mut g = SparsityGraph::empty(m);
    let mut cliques: Vec<Vec<usize>> = vec![vec![0]];
    for v in 1..m {
        let base = cliques.choose(r).unwrap().clone();
        let sub: Vec<usize> = base.into_iter().filter(|_| r.gen_bool(0.6)).collect();
        for &u in &sub {
            g.add_edge(u, v);
        }
        let mut c = sub;
        c.push(v);
        cliques.push(c);
    }
    g
}

pub fn random_graph(m: usize, p: f64, r: &mut impl Rng) -> SparsityGraph {
    let mut g = SparsityGraph::empty(m);
    for a in 0..m {
        for b in a + 1..m {
            if r.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

pub fn is_complete_in(g: &SparsityGraph, c: &Clique) -> bool {
    let v = c.vertices();
    v.iter().enumerate().all(|(i, &a)| v[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

pub fn random_poly(nvars: usize, deg: u32, terms: usize, r: &mut impl Rng) -> Polynomial {
    Polynomial::from_terms(
        nvars,
        (0..terms).map(|_| {
            let mut e = vec![0u32; nvars];
            for _ in 0..r.gen_range(0..=deg) {
                e[r.gen_range(0..nvars)] += 1;
            }
            (e, rat(r.gen_range(-5..=5)))
        }),
    )
    .unwrap()
}

/// Symmetric polynomial matrix supported on `g`, with a diagonal that
/// never vanishes identically.
pub fn random_polymatrix(g: &SparsityGraph, nvars: usize, deg: u32, r: &mut impl Rng) -> PolyMatrix {
    let m = g.order();
    let mut p = PolyMatrix::zeros(m, nvars);
    for i in 0..m {
        let mut d = random_poly(nvars, deg, 2, r);
        d = &d + &Polynomial::constant(nvars, rat(r.gen_range(1..=4)));
        p.set(i, i, d);
    }
    for (a, b) in g.edges() {
        let mut e = random_poly(nvars, deg, 2, r);
        if e.is_zero() {
            e = Polynomial::var(nvars, 0);
        }
        p.set(a, b, e);
    }
    p
}
