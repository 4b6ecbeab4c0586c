use std::path::Path;
use std::process::Command;
use std::time::Instant;

use chordsos::instances::{chain_cliques, example_35};
use chordsos::poly::rat_from_f64;
use chordsos::sos::{build_even_hierarchy, ParamPolyMatrix, SosOutcome};
use chordsos_cli::examples::{run_example, ExampleParams, Variant};
use chordsos_cli::region::{scan_region, to_csv, RegionParams, RegionPoint};
use chordsos_cli::report::RunReport;
use chordsos_sdp::{read_sdpa, write_sdpa, SdpOptions};

fn region(omega: usize, nu: u32, variant: Variant, directions: usize) -> Vec<RegionPoint> {
    let p = RegionParams { omega, nu, variant, directions, jobs: 4, solver: SdpOptions::default() };
    scan_region(&p).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chordsos"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn four_directions_give_eight_mirrored_points() {
    let pts = region(1, 2, Variant::Sparse, 4);
    assert_eq!(pts.len(), 8);
    assert!(pts.windows(2).all(|w| w[0].theta <= w[1].theta));
    for i in 0..4 {
        let (a, b) = (&pts[i], &pts[7 - i]);
        assert!((a.theta + b.theta - std::f64::consts::PI).abs() < 1e-12);
        if a.lambda[0].is_finite() {
            assert_eq!(a.lambda[0], -b.lambda[0]);
            assert_eq!(a.lambda[1], b.lambda[1]);
        }
    }
    assert_eq!(to_csv(&pts).lines().count(), 9);
}

#[test]
fn region_scan_rejects_too_few_directions() {
    let p = RegionParams {
        omega: 1,
        nu: 2,
        variant: Variant::Sparse,
        directions: 3,
        jobs: 1,
        solver: SdpOptions::default(),
    };
    assert!(scan_region(&p).is_err());
}

#[test]
fn boundary_points_are_feasible_one_level_up() {
    let pts = region(2, 2, Variant::Sparse, 16);
    assert_eq!(pts.len(), 32);
    let bounded: Vec<&RegionPoint> = pts.iter().filter(|q| q.is_bounded()).collect();
    assert!(bounded.len() >= 16, "only {} bounded points", bounded.len());
    let pp = example_35(2).unwrap();
    let cl = chain_cliques(6);
    for q in bounded {
        // Step into the interior along the recession direction +lambda_2.
        let lam = [rat_from_f64(q.lambda[0]), rat_from_f64(q.lambda[1] + 1e-3)];
        let fixed = ParamPolyMatrix::fixed(pp.at(&lam).unwrap());
        let prog = build_even_hierarchy(&fixed, 3, Some(&cl)).unwrap();
        let sol = prog.solve(&SdpOptions::default());
        assert_eq!(prog.outcome(&sol), SosOutcome::Feasible, "theta {} lambda {:?}", q.theta, q.lambda);
    }
}

#[test]
fn sparse_region_lies_inside_dense_region() {
    let sparse = region(2, 2, Variant::Sparse, 8);
    let dense = region(2, 2, Variant::Dense, 8);
    let mut compared = 0;
    for (s, d) in sparse.iter().zip(&dense) {
        assert_eq!(s.theta, d.theta);
        if !(s.is_bounded() && d.is_bounded()) {
            continue;
        }
        let f = |l: &[f64; 2]| s.theta.cos() * l[0] - s.theta.sin() * l[1];
        assert!(f(&s.lambda) <= f(&d.lambda) + 1e-6, "theta {}: {:?} vs {:?}", s.theta, s.lambda, d.lambda);
        compared += 1;
    }
    assert!(compared >= 8);
}

fn untimed(mut r: Vec<RunReport>) -> String {
    r.iter_mut().for_each(|x| x.wall_time = 0.0);
    serde_json::to_string(&r).unwrap()
}

#[test]
fn example_reports_are_reproducible() {
    let p = ExampleParams { samples: 2000, seed: 7, ..ExampleParams::default() };
    for name in ["ex3.1", "ex3.4", "appendixA"] {
        let a = untimed(run_example(name, &p).unwrap());
        let b = untimed(run_example(name, &p).unwrap());
        assert_eq!(a, b, "{name}");
    }
    let args = ["--json", "--no-timing", "--seed", "3", "example", "ex3.6", "--m", "4", "--samples", "500"];
    let (c1, o1, _) = run(&args);
    let (c2, o2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c1, c2);
    assert_eq!(o1, o2);
}

#[test]
fn exported_sdpa_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = ExampleParams { export_sdpa: Some(dir.path().to_path_buf()), ..ExampleParams::default() };
    let reports = run_example("ex3.2", &p).unwrap();
    let files: Vec<&String> = reports.iter().flat_map(|r| &r.artifacts).collect();
    assert_eq!(files.len(), 2);
    for f in files {
        let text = std::fs::read_to_string(f).unwrap();
        let back = read_sdpa(&text).unwrap();
        assert_eq!(write_sdpa(&back), text);
    }
}

fn write_bundle(dir: &Path, name: &str, diag: &str) -> String {
    let text = format!(
        r#"{{
            "p0": {{"m": 2, "nvars": 1, "entries": [[[1, 1], "{diag}"], [[1, 2], "x1"], [[2, 2], "{diag}"]]}},
            "hierarchy": "basic",
            "degree": 1
        }}"#
    );
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn bundle_pipeline_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_bundle(dir.path(), "good.json", "1 + x1^2");
    let other = write_bundle(dir.path(), "other.json", "2 + x1^2");
    let cert = dir.path().join("cert.json").display().to_string();

    let (code, out, _) = run(&["--json", "analyze", &good]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["order"], 2);
    assert_eq!(v["chordal"], true);
    assert_eq!(v["max_clique"], 2);

    let (code, out, _) = run(&["--json", "build", &good]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["constraints"].as_u64().unwrap() > 0);

    let (code, out, _) = run(&["--json", "solve", &good, "--certificate", &cert]);
    assert_eq!(code, 0, "{out}");
    let r: Vec<RunReport> = serde_json::from_str(&out).unwrap();
    assert!(r[0].verification.as_ref().unwrap().passed);

    assert_eq!(run(&["verify", &good, &cert]).0, 0);
    assert_eq!(run(&["verify", &other, &cert]).0, 2);

    let sdpa = dir.path().join("p.dat-s");
    assert_eq!(run(&["export", &good, "-o", &sdpa.display().to_string()]).0, 0);
    read_sdpa(&std::fs::read_to_string(&sdpa).unwrap()).unwrap();
}

#[test]
fn exit_codes() {
    // A documented infeasibility is the expected outcome.
    assert_eq!(run(&["example", "ex3.1", "--k", "1", "--build", "basic"]).0, 0);
    let (code, out, _) = run(&["example", "remark-polya", "--nu-max", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("not-found"));
    let (code, _, err) = run(&["example", "ex9.9"]);
    assert_eq!(code, 1);
    assert!(err.contains("ex9.9"));
    assert_eq!(run(&["analyze", "/nonexistent/bundle.json"]).0, 1);
    assert_eq!(run(&["example", "ex3.5", "--omega", "0"]).0, 1);
}

#[test]
fn dense_cost_grows_faster_than_sparse() {
    let time = |m: usize, variant: Variant| {
        let p = ExampleParams { m: Some(m), variant, samples: 10, ..ExampleParams::default() };
        let start = Instant::now();
        let r = run_example("ex3.6", &p).unwrap();
        assert!(r[0].value.is_some());
        start.elapsed().as_secs_f64()
    };
    let (s4, s12) = (time(4, Variant::Sparse), time(12, Variant::Sparse));
    let (d4, d12) = (time(4, Variant::Dense), time(12, Variant::Dense));
    assert!(d12 > s12, "dense {d12:.3}s vs sparse {s12:.3}s at m=12");
    assert!(d12 / d4 > s12 / s4, "growth dense {:.1} vs sparse {:.1}", d12 / d4, s12 / s4);
}
