//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use chordsos::certificate::{verify_certificate, Verdict};
use chordsos::graph::{Clique, SparsityGraph};
use chordsos::instances::{arrow_cliques, bowtie_weights, chain_cliques, example_35, example_36};
use chordsos::numeric::{agler_decompose, eigenvalues};
use chordsos::poly::{rat, sparse_ldl_diagonalize, PolyMatrix, Polynomial};
use chordsos::sos::{
    build_basic_sparse, build_even_hierarchy, build_sparse_putinar, recover_certificate, ParamPolyMatrix, SosOutcome,
};
use chordsos::Error;
use chordsos_cli::examples::{run_example, ExampleParams, Variant};
use chordsos_cli::report::{RunReport, RunStatus};
use chordsos_sdp::{solve, Block, BlockMatrix, DenseSym, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUND_TOL: f64 = 0.01;
const TRIDIAGONAL_BUDGET: f64 = 60.0;
const ARROW_BUDGET: f64 = 30.0;
const ORACLE_TOL: f64 = 0.03;
const CERT_TOL: f64 = 1e-6;
const EIG_TOL: f64 = 1e-9;
const AGLER_TOL: f64 = 1e-9;
const KKT_TOL: f64 = 1e-7;

type Outcome = (bool, String);

fn example(name: &str, f: impl FnOnce(&mut ExampleParams)) -> Vec<RunReport> {
    let mut p = ExampleParams::default();
    f(&mut p);
    run_example(name, &p).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn solved(r: &RunReport) -> bool {
    matches!(r.status, RunStatus::Feasible | RunStatus::Approximate)
}

fn tridiagonal_bounds() -> Outcome {
    let cases = [
        (5, 2, Variant::Sparse, -8.97),
        (5, 3, Variant::Sparse, -9.36),
        (10, 2, Variant::Sparse, -8.72),
        (10, 3, Variant::Sparse, -9.09),
        (5, 1, Variant::Dense, -8.68),
    ];
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (omega, nu, variant, want) in cases {
        let r = &example("ex3.5", |p| {
            p.omega = Some(omega);
            p.nu = Some(nu);
            p.variant = variant;
        })[0];
        let v = r.value.unwrap_or(f64::NAN);
        ok &= solved(r) && (v - want).abs() <= BOUND_TOL;
        let tag = if variant == Variant::Dense { "dense " } else { "" };
        parts.push(format!("{tag}B{omega},{nu}={v:.4} ({})", r.status.as_str()));
    }
    let t = start.elapsed().as_secs_f64();
    ok &= t < TRIDIAGONAL_BUDGET;
    (ok, format!("{}; {t:.1}s", parts.join(" ")))
}

fn arrow_bounds() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, want) in [(10, 5.00), (20, 3.64), (30, 2.61)] {
        let r = example("ex3.6", |p| p.m = Some(m));
        let (bound, oracle) = (r[0].value.unwrap_or(f64::NAN), r[1].value.unwrap_or(f64::NAN));
        ok &= solved(&r[0]) && (bound - want).abs() <= BOUND_TOL && (bound - oracle).abs() <= ORACLE_TOL;
        parts.push(format!("m={m} bound {bound:.4} oracle {oracle:.4}"));
    }
    let t = start.elapsed().as_secs_f64();
    ok &= t < ARROW_BUDGET;
    (ok, format!("{}; {t:.1}s", parts.join(", ")))
}

fn counterexample() -> Outcome {
    let mut ok = true;
    let mut bad = Vec::new();
    let mut basic = |k: &str, d: u32, want: RunStatus| {
        let r = &example("ex3.1", |p| {
            p.k = Some(k.into());
            p.d = Some(d);
            p.build = Some("basic".into());
        })[0];
        if r.status != want {
            ok = false;
            bad.push(format!("k={k} d={d} {}", r.status.as_str()));
        }
    };
    for k in ["0", "1", "19/10"] {
        for d in [1, 2] {
            basic(k, d, RunStatus::Infeasible);
        }
    }
    for k in ["2", "3"] {
        basic(k, 1, RunStatus::Feasible);
    }
    let mut worst = 0.0f64;
    for k in ["0", "1"] {
        let r = &example("ex3.1", |p| {
            p.k = Some(k.into());
            p.build = Some("weighted".into());
        })[0];
        match &r.verification {
            Some(v) if r.status == RunStatus::Feasible && v.passed && v.max_coeff_residual <= CERT_TOL => {
                worst = worst.max(v.max_coeff_residual)
            }
            _ => {
                ok = false;
                bad.push(format!("weighted k={k} {}", r.status.as_str()));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("8 basic builds as expected, weighted residual {worst:.1e}")
    } else {
        format!("unexpected: {}", bad.join(", "))
    };
    (ok, detail)
}

fn dense_infeasibility() -> Outcome {
    let r = example("appendixA", |_| {});
    let eig = r[1].value.unwrap_or(f64::NAN);
    let err = (eig - (1.0 - 2f64.sqrt())).abs();
    (
        r[0].status == RunStatus::Infeasible && err <= EIG_TOL,
        format!("dense {}, forced gram min eigenvalue {eig:.12} (error {err:.1e})", r[0].status.as_str()),
    )
}

fn hand_certificates() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["ex3.2", "ex3.3", "ex3.4"] {
        for r in example(name, |p| p.samples = 10).iter().filter(|r| r.task.starts_with("hand certificate")) {
            let v = r.verification.as_ref();
            let exact = v.is_some_and(|v| v.exact && v.passed && v.max_coeff_residual == 0.0);
            ok &= exact && r.status == RunStatus::Verified;
            parts.push(format!(
                "{name} {}: {}",
                r.task.trim_start_matches("hand certificate").trim(),
                r.status.as_str()
            ));
        }
    }
    ok &= parts.len() == 4;
    (ok, parts.join(", ").replace(" :", ":"))
}

fn polya() -> Outcome {
    let r33 = example("ex3.3", |_| {});
    let s = r33.iter().find(|r| r.task == "polya search").expect("polya run");
    let exact = s.verification.as_ref().is_some_and(|v| v.exact && v.passed && v.max_coeff_residual == 0.0);
    let ok33 = s.status == RunStatus::Found && s.value == Some(1.0) && exact;
    let rem = &example("remark-polya", |p| p.nu_max = 10)[0];
    let ok_rem = rem.status == RunStatus::NotFound;
    (
        ok33 && ok_rem,
        format!(
            "ex3.3 nu={} (certificate {}), remark-polya up to nu=10: {}",
            s.value.map_or("-".into(), |v| v.to_string()),
            if exact { "exact" } else { "not verified" },
            rem.status.as_str()
        ),
    )
}

// Generators for the property checks.

fn random_chordal(m: usize, r: &mut impl Rng) -> SparsityGraph {
    let mut g = SparsityGraph::empty(m);
    let mut cliques: Vec<Vec<usize>> = vec![vec![0]];
    for v in 1..m {
        let sub: Vec<usize> = cliques.choose(r).unwrap().iter().copied().filter(|_| r.gen_bool(0.6)).collect();
        for &u in &sub {
            g.add_edge(u, v);
        }
        let mut c = sub;
        c.push(v);
        cliques.push(c);
    }
    g
}

fn cliques_of(g: &SparsityGraph) -> Vec<Clique> {
    g.maximal_cliques(&g.is_chordal().unwrap()).unwrap()
}

fn random_poly(nvars: usize, deg: u32, terms: usize, r: &mut impl Rng) -> Polynomial {
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

fn agler_property() -> (bool, String) {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..500 {
        let m = r.gen_range(1..=20);
        let cl = cliques_of(&random_chordal(m, &mut r));
        let mut a = vec![vec![0.0; m]; m];
        for c in &cl {
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
        match agler_decompose(&a, &cl, 1e-12) {
            Ok(split) => {
                let back = split.assemble(m);
                for i in 0..m {
                    for j in 0..m {
                        worst = worst.max((back[i][j] - a[i][j]).abs());
                    }
                }
                ok &= split.blocks.iter().all(|x| eigenvalues(x)[0] >= -AGLER_TOL);
            }
            Err(_) => ok = false,
        }
    }
    (ok && worst <= AGLER_TOL, format!("Agler 500 worst {worst:.1e}"))
}

fn ldl_property() -> (bool, String) {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let (mut exact, mut pivot) = (0, 0);
    let mut ok = true;
    for _ in 0..200 {
        let m = r.gen_range(1..=4);
        let g = random_chordal(m, &mut r);
        let mut p = PolyMatrix::zeros(m, 2);
        for i in 0..m {
            p.set(i, i, &random_poly(2, 1, 2, &mut r) + &Polynomial::constant(2, rat(r.gen_range(1..=4))));
        }
        for (a, b) in g.edges() {
            let e = random_poly(2, 1, 2, &mut r);
            p.set(a, b, if e.is_zero() { Polynomial::var(2, 0) } else { e });
        }
        match sparse_ldl_diagonalize(&p) {
            Ok(d) if d.verify(&p) && d.no_fill(&p) => exact += 1,
            Ok(_) => ok = false,
            Err(Error::PivotFailure(_)) => pivot += 1,
            Err(_) => ok = false,
        }
    }
    (ok && exact == 200, format!("LDL exact {exact}/200 ({pivot} pivot failures)"))
}

/// `sum_k E_k' F_k F_k' E_k + (x1^2 + x2^2 + 10) I` plus constant
/// off-diagonal perturbations on the clique pattern.
fn random_chordal_sos(seed: u64) -> (ParamPolyMatrix, Vec<Clique>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let m = r.gen_range(2..=5);
    let g = random_chordal(m, &mut r);
    let cl = cliques_of(&g);
    let mut p = PolyMatrix::zeros(m, 2);
    for c in &cl {
        let v = c.vertices();
        let f: Vec<Polynomial> = v.iter().map(|_| random_poly(2, 1, 3, &mut r)).collect();
        for (a, &i) in v.iter().enumerate() {
            for (b, &j) in v.iter().enumerate() {
                if i <= j {
                    p.add_to(i, j, &(&f[a] * &f[b]));
                }
            }
        }
    }
    let sq = chordsos::poly::parse_polynomial("10 + x1^2 + x2^2", 2).unwrap();
    for i in 0..m {
        p.add_to(i, i, &sq);
    }
    for (i, j) in g.edges() {
        p.add_to(i, j, &Polynomial::constant(2, rat(r.gen_range(-2..=2))));
    }
    (ParamPolyMatrix::fixed(p), cl)
}

fn kkt_max(s: &SdpSolution) -> f64 {
    s.residuals.primal.max(s.residuals.dual).max(s.residuals.gap)
}

fn gram_and_kkt_on_sos(kkt_worst: &mut f64, kkt_ok: &mut bool) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut ok = true;
    let mut check = |pp: &ParamPolyMatrix, built: Result<chordsos::sos::SosProgram, Error>| {
        let prog = built.unwrap();
        let sol = prog.solve(&SdpOptions::default());
        if sol.status == SdpStatus::Optimal {
            *kkt_worst = kkt_worst.max(kkt_max(&sol));
            *kkt_ok &= kkt_max(&sol) <= KKT_TOL;
        }
        if prog.outcome(&sol) != SosOutcome::Feasible {
            ok = false;
            return;
        }
        let cert = recover_certificate(&prog, &sol).unwrap();
        let rep = verify_certificate(pp, &cert, CERT_TOL).unwrap();
        ok &= rep.verdict == Verdict::Pass;
        worst = worst.max(rep.max_coeff_residual);
        count += 1;
    };
    for seed in 0..12 {
        let (pp, cl) = random_chordal_sos(seed);
        let built = build_basic_sparse(&pp, &cl, 1);
        check(&pp, built);
    }
    for m in [10, 20, 30] {
        let pp = example_36(m).unwrap();
        let built = build_sparse_putinar(&pp, &bowtie_weights(), &arrow_cliques(m), 2);
        check(&pp, built);
    }
    (ok && worst <= CERT_TOL, format!("Gram round trip {count} solves worst {worst:.1e}"))
}

fn sym(n: usize, r: &mut impl Rng) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if r.gen_bool(0.6) {
                out.push((i, j, (r.gen_range(-20..=20) as f64) / 4.0));
            }
        }
    }
    out
}

fn pd(n: usize, r: &mut impl Rng) -> Vec<Vec<f64>> {
    let u: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
    (0..n)
        .map(|i| {
            (0..n).map(|j| (0..n).map(|k| u[i][k] * u[j][k]).sum::<f64>() + if i == j { 1.0 } else { 0.0 }).collect()
        })
        .collect()
}

/// Random LMI with strictly feasible primal and dual points.
fn random_sdp(seed: u64) -> SdpProblem {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let nb = r.gen_range(1..=3);
    let blocks: Vec<Block> = (0..nb)
        .map(|_| if r.gen_bool(0.75) { Block::Psd(r.gen_range(1..=5)) } else { Block::Diag(r.gen_range(1..=4)) })
        .collect();
    let m = r.gen_range(1..=8);
    let mut fs = Vec::new();
    for _ in 0..m {
        let mut f = BlockMatrix::new();
        for (k, b) in blocks.iter().enumerate() {
            match *b {
                Block::Psd(n) => sym(n, &mut r).into_iter().for_each(|(i, j, v)| f.push(k, i, j, v)),
                Block::Diag(n) => {
                    for i in 0..n {
                        if r.gen_bool(0.6) {
                            f.push(k, i, i, r.gen_range(-3..=3) as f64);
                        }
                    }
                }
            }
        }
        fs.push(f);
    }
    let y0: Vec<f64> = (0..m).map(|_| r.gen_range(-1.0..1.0)).collect();
    let shape = SdpProblem::new(blocks.clone(), 0, BlockMatrix::new(), fs.clone(), vec![0.0; m]).unwrap();
    let (fy, _) = shape.eval_lmi(&y0);
    let mut f0 = BlockMatrix::new();
    let mut z0 = Vec::new();
    for (k, blk) in blocks.iter().enumerate() {
        let n = blk.size();
        let diag = matches!(blk, Block::Diag(_));
        let (x, z) = (pd(n, &mut r), pd(n, &mut r));
        let mut zk = DenseSym::zeros(n);
        for i in 0..n {
            for j in i..n {
                if !diag || i == j {
                    f0.push(k, i, j, x[i][j] - fy[k].get(i, j));
                    zk.set(i, j, z[i][j]);
                }
            }
        }
        z0.push(zk);
    }
    let b: Vec<f64> = fs.iter().map(|f| f.dot(&z0, &[])).collect();
    SdpProblem::new(blocks, 0, f0, fs, b).unwrap()
}

fn kkt_property(mut worst: f64, mut ok: bool) -> (bool, String) {
    let mut optimal = 0;
    for seed in 0..60 {
        let sol = solve(&random_sdp(seed), &SdpOptions::default());
        if sol.status == SdpStatus::Optimal {
            optimal += 1;
            worst = worst.max(kkt_max(&sol));
            ok &= kkt_max(&sol) <= KKT_TOL;
        } else {
            ok = false;
        }
    }
    (ok, format!("KKT {optimal}/60 random optimal, worst {worst:.1e}"))
}

fn slack(v: f64) -> f64 {
    1e-6 * (1.0 + v.abs())
}

fn even_value(omega: usize, nu: u32, sparse: bool) -> f64 {
    let pp = example_35(omega).unwrap();
    let cl = chain_cliques(3 * omega);
    let prog = build_even_hierarchy(&pp, nu, if sparse { Some(&cl) } else { None }).unwrap();
    let sol = prog.solve(&SdpOptions::default());
    let r = &sol.residuals;
    if prog.outcome(&sol) == SosOutcome::Feasible || r.primal.max(r.dual).max(r.gap) <= 1e-6 {
        prog.value(&sol)
    } else {
        f64::NAN
    }
}

fn monotonicity_property() -> (bool, String) {
    let non_increasing =
        |v: &[f64]| v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] <= w[0] + slack(w[0]));
    let sparse: Vec<f64> = (2..=4).map(|nu| even_value(1, nu, true)).collect();
    let dense: Vec<f64> = (0..=2).map(|nu| even_value(1, nu, false)).collect();
    let table: Vec<f64> = [(5, 2), (5, 3)].iter().map(|&(w, nu)| even_value(w, nu, true)).collect();
    let pp = example_36(10).unwrap();
    let arrow: Vec<f64> = (2..=4)
        .map(|d| {
            let prog = build_sparse_putinar(&pp, &bowtie_weights(), &arrow_cliques(10), d).unwrap();
            let sol = prog.solve(&SdpOptions::default());
            if prog.outcome(&sol) == SosOutcome::Feasible {
                prog.value(&sol)
            } else {
                f64::NAN
            }
        })
        .collect();
    let ok = non_increasing(&sparse) && non_increasing(&dense) && non_increasing(&table) && non_increasing(&arrow);
    (ok, format!("monotone in nu and d over {} sweeps", 4))
}

fn weak_ordering_property() -> (bool, String) {
    let time = |m: usize, variant: Variant| {
        let start = Instant::now();
        let r = example("ex3.6", |p| {
            p.m = Some(m);
            p.variant = variant;
            p.samples = 10;
        });
        assert!(solved(&r[0]));
        start.elapsed().as_secs_f64()
    };
    let (s4, s12) = (time(4, Variant::Sparse), time(12, Variant::Sparse));
    let (d4, d12) = (time(4, Variant::Dense), time(12, Variant::Dense));
    (d12 > s12 && d12 / d4 > s12 / s4, format!("time growth m=4..12 sparse x{:.1} dense x{:.1}", s12 / s4, d12 / d4))
}

fn properties() -> Outcome {
    let mut kkt_worst = 0.0f64;
    let mut kkt_ok = true;
    let checks = [
        agler_property(),
        ldl_property(),
        gram_and_kkt_on_sos(&mut kkt_worst, &mut kkt_ok),
        monotonicity_property(),
        kkt_property(kkt_worst, kkt_ok),
        weak_ordering_property(),
    ];
    let ok = checks.iter().all(|c| c.0);
    let detail = checks
        .iter()
        .map(|(pass, d)| if *pass { d.clone() } else { format!("{d} FAILED") })
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 tridiagonal upper bounds", tridiagonal_bounds),
        ("2 arrow lower bounds", arrow_bounds),
        ("3 counterexample threshold", counterexample),
        ("4 dense infeasibility and forced gram", dense_infeasibility),
        ("5 hand certificates", hand_certificates),
        ("6 polya search", polya),
        ("7 property suites", properties),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!("{} [{name}] {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
