mod common;

use chordsos::graph::Clique;
use chordsos::numeric::{agler_decompose, agler_decompose_exact, eigenvalues, exact_is_psd};
use chordsos::poly::{rat, sparse_ldl_diagonalize};
use chordsos::Error;
use common::{random_chordal, random_polymatrix, rng};
use rand::Rng;

/// `sum_k E_k' X_k E_k` with random positive definite `X_k`.
fn chordal_psd(cliques: &[Clique], m: usize, r: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; m]; m];
    for c in cliques {
        let v = c.vertices();
        for _ in 0..=v.len() {
            let u: Vec<f64> = v.iter().map(|_| r.gen_range(-1.0..1.0)).collect();
            for (x, &i) in v.iter().enumerate() {
                for (y, &j) in v.iter().enumerate() {
                    a[i][j] += u[x] * u[y];
                }
            }
        }
    }
    a
}

#[test]
fn agler_reconstructs_random_chordal_psd_matrices() {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let m = r.gen_range(1..=20);
        let g = random_chordal(m, &mut r);
        let peo = g.is_chordal().unwrap();
        let cl = g.maximal_cliques(&peo).unwrap();
        let a = chordal_psd(&cl, m, &mut r);
        let split = agler_decompose(&a, &cl, 1e-12).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let back = split.assemble(m);
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((back[i][j] - a[i][j]).abs());
            }
        }
        for x in &split.blocks {
            assert!(eigenvalues(x)[0] >= -1e-9, "case {case}: block not PSD");
        }
    }
    assert!(worst <= 1e-9, "worst reconstruction error {worst:e}");
}

#[test]
fn exact_agler_on_integer_matrices() {
    let mut r = rng(12);
    for _ in 0..100 {
        let m = r.gen_range(2..=8);
        let g = random_chordal(m, &mut r);
        let cl = g.maximal_cliques(&g.is_chordal().unwrap()).unwrap();
        let mut a = vec![vec![rat(0); m]; m];
        for c in &cl {
            let u: Vec<i64> = c.vertices().iter().map(|_| r.gen_range(-3..=3)).collect();
            for (x, &i) in c.vertices().iter().enumerate() {
                for (y, &j) in c.vertices().iter().enumerate() {
                    a[i][j] += rat(u[x] * u[y]);
                }
            }
        }
        let split = agler_decompose_exact(&a, &cl).unwrap();
        assert_eq!(split.assemble(m), a);
        assert!(split.blocks.iter().all(|x| exact_is_psd(x)));
    }
}

#[test]
fn indefinite_input_is_rejected() {
    let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
    assert!(agler_decompose(&a, &[Clique::new(vec![0, 1])], 1e-12).is_err());
}

#[test]
fn sparse_ldl_identity_on_random_chordal_matrices() {
    let mut r = rng(13);
    let mut checked = 0;
    for case in 0..200 {
        let m = r.gen_range(1..=4);
        let g = random_chordal(m, &mut r);
        let p = random_polymatrix(&g, 2, 1, &mut r);
        match sparse_ldl_diagonalize(&p) {
            Ok(d) => {
                assert!(d.verify(&p), "case {case}: identity fails");
                assert!(d.no_fill(&p), "case {case}: fill-in");
                assert!(d.l.is_lower_triangular());
                checked += 1;
            }
            Err(Error::PivotFailure(_)) => {}
            Err(e) => panic!("case {case}: {e}"),
        }
    }
    assert_eq!(checked, 200, "only {checked} of 200 cases diagonalized");
}
