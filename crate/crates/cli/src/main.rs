use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chordsos::certificate::{verify_certificate, Certificate, CertificateJson, Verdict};
use chordsos::Error;
use chordsos_cli::bundle::{solve_bundle, Bundle};
use chordsos_cli::examples::{run_example, ExampleParams, Variant, CERT_TOL, EXAMPLES};
use chordsos_cli::region::{scan_region, to_csv, RegionParams};
use chordsos_cli::report::{exit_code, render_table, RunReport, RunStatus, VerifySummary};
use chordsos_sdp::{write_sdpa, SdpOptions};

#[derive(Parser)]
#[command(name = "chordsos", version, about = "Chordal SOS decompositions of polynomial matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    /// Seed for the sampling oracle.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sweeps and region scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Report zero wall time so repeated runs print identical reports.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sparsity graph statistics of a problem bundle.
    Analyze { bundle: PathBuf },
    /// Build the relaxation and print its size.
    Build { bundle: PathBuf },
    /// Build, solve and verify a bundle.
    Solve {
        bundle: PathBuf,
        /// Write the recovered certificate as JSON.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Write the relaxation in SDPA sparse format.
    Export {
        bundle: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a certificate against a bundle's matrix.
    Verify {
        bundle: PathBuf,
        certificate: PathBuf,
        /// Residual tolerance for float certificates; exact ones must vanish.
        #[arg(long, default_value_t = CERT_TOL)]
        residual_tol: f64,
    },
    /// Reproduce a worked example; `all` runs every one.
    Example {
        name: String,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        omega: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "sparse")]
        variant: Variant,
        /// basic or weighted (ex3.1).
        #[arg(long)]
        build: Option<String>,
        #[arg(long, default_value_t = 10)]
        nu_max: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Directory for SDPA files of every solved program.
        #[arg(long)]
        export_sdpa: Option<PathBuf>,
    },
    /// Boundary of the feasible lambda region of the tridiagonal family, as CSV.
    Region {
        #[arg(long, default_value_t = 2)]
        omega: usize,
        #[arg(long, default_value_t = 2)]
        nu: u32,
        #[arg(long, default_value = "sparse")]
        variant: Variant,
        #[arg(long, default_value_t = 16)]
        directions: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

impl Global {
    fn solver(&self) -> SdpOptions {
        SdpOptions { tol: self.tol, max_iter: self.max_iter, ..SdpOptions::default() }
    }
}

fn emit(g: &Global, mut reports: Vec<RunReport>) -> Result<i32, Error> {
    if g.no_timing {
        reports.iter_mut().for_each(|r| r.wall_time = 0.0);
    }
    if g.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        print!("{}", render_table(&reports));
    }
    Ok(exit_code(&reports))
}

fn print_json_or(g: &Global, v: &serde_json::Value, text: String) {
    if g.json {
        println!("{}", serde_json::to_string_pretty(v).expect("json value"));
    } else {
        print!("{text}");
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let g = &cli.global;
    match cli.cmd {
        Command::Analyze { bundle } => {
            let b = Bundle::read(&bundle)?;
            let graph = b.problem.sparsity_graph();
            let (ext, _) = graph.chordal_extension();
            let sizes: Vec<usize> = b.cliques.iter().map(|c| c.len()).collect();
            let v = serde_json::json!({
                "order": graph.order(),
                "edges": graph.num_edges(),
                "chordal": graph.is_chordal().is_some(),
                "fill_edges": ext.num_edges() - graph.num_edges(),
                "cliques": b.cliques.iter().map(|c| c.one_based()).collect::<Vec<_>>(),
                "max_clique": sizes.iter().copied().max().unwrap_or(0),
            });
            let text = format!(
                "order {}\nedges {}\nchordal {}\nfill edges {}\ncliques {}\nmax clique {}\n",
                v["order"],
                v["edges"],
                v["chordal"],
                v["fill_edges"],
                b.cliques.len(),
                v["max_clique"]
            );
            print_json_or(g, &v, text);
            Ok(0)
        }
        Command::Build { bundle } => {
            let prog = Bundle::read(&bundle)?.build()?;
            let p = &prog.problem;
            let v = serde_json::json!({
                "constraints": p.num_constraints(),
                "blocks": p.blocks,
                "free_vars": p.free_vars,
                "cone_order": p.cone_order(),
            });
            let text = format!(
                "constraints {}\nblocks {}\nfree variables {}\n",
                p.num_constraints(),
                p.blocks.len(),
                p.free_vars
            );
            print_json_or(g, &v, text);
            Ok(0)
        }
        Command::Solve { bundle, certificate } => {
            let b = Bundle::read(&bundle)?;
            let (mut r, cert) = solve_bundle(&bundle.display().to_string(), &b, &g.solver())?;
            if let (Some(path), Some(c)) = (certificate, cert) {
                std::fs::write(&path, serde_json::to_string_pretty(&c.to_json())?)?;
                r.artifacts.push(path.display().to_string());
            }
            emit(g, vec![r])
        }
        Command::Export { bundle, output } => {
            let prog = Bundle::read(&bundle)?.build()?;
            std::fs::write(&output, write_sdpa(&prog.problem))?;
            if !g.json {
                println!("wrote {}", output.display());
            }
            Ok(0)
        }
        Command::Verify { bundle, certificate, residual_tol } => {
            let b = Bundle::read(&bundle)?;
            let cj: CertificateJson = serde_json::from_str(&std::fs::read_to_string(&certificate)?)?;
            let cert = Certificate::from_json(&cj)?;
            let rep = verify_certificate(&b.problem, &cert, residual_tol)?;
            if !g.json {
                println!("{rep}");
            }
            let mut r =
                RunReport::new(&certificate.display().to_string(), "verify", RunStatus::from_verdict(rep.verdict));
            r.value = Some(rep.max_coeff_residual);
            r.verification = Some(VerifySummary::from(&rep));
            if g.json {
                emit(g, vec![r])
            } else {
                Ok(if rep.verdict == Verdict::Pass { 0 } else { 2 })
            }
        }
        Command::Example { name, k, d, nu, omega, m, variant, build, nu_max, samples, export_sdpa } => {
            let params = ExampleParams {
                k,
                d,
                nu,
                omega,
                m,
                variant,
                build,
                nu_max,
                samples,
                seed: g.seed,
                export_sdpa,
                solver: g.solver(),
            };
            let names: Vec<&str> = if name == "all" { EXAMPLES.to_vec() } else { vec![name.as_str()] };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(g.jobs.max(1))
                .build()
                .map_err(|e| Error::Unknown(e.to_string()))?;
            use rayon::prelude::*;
            let runs: Vec<Vec<RunReport>> =
                pool.install(|| names.par_iter().map(|n| run_example(n, &params)).collect::<Result<_, _>>())?;
            emit(g, runs.into_iter().flatten().collect())
        }
        Command::Region { omega, nu, variant, directions, output } => {
            let p = RegionParams { omega, nu, variant, directions, jobs: g.jobs, solver: g.solver() };
            let pts = scan_region(&p)?;
            let csv = to_csv(&pts);
            match output {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            let failed = pts.iter().filter(|q| !q.is_bounded() && q.status != RunStatus::Unbounded).count();
            if failed > 0 {
                eprintln!("{failed} of {} directions did not solve", pts.len());
                return Ok(3);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
