//! The worked examples as reproducible runs.

use std::path::PathBuf;
use std::time::Instant;

use chordsos::certificate::{
    example_32_certificate, example_33_nu0_certificate, example_33_nu1_certificate, example_34_certificate,
    polya_certificate, sample_min_eig, verify_certificate, Certificate, Region, Verdict,
};
use chordsos::instances::{
    arrow_cliques, bowtie_region, bowtie_weights, chain_cliques, example_31, example_32, example_33, example_34,
    example_35, example_36, example_36_matrix, remark_polya,
};
use chordsos::numeric::{eigenvalues, polya_exponent_search};
use chordsos::poly::{parse_polynomial, parse_rational, rat, rat_to_f64, PolyMatrix};
use chordsos::sos::{
    build_basic_sparse, build_dense, build_even_hierarchy, build_sparse_putinar, build_weighted_sparse, forced_gram,
    homogeneous_basis, recover_certificate, ParamPolyMatrix, SosProgram,
};
use chordsos::Error;
use chordsos_sdp::{write_sdpa, SdpOptions, SdpSolution};

use crate::report::{RunReport, RunStatus, VerifySummary};

pub const EXAMPLES: [&str; 8] = ["ex3.1", "ex3.2", "ex3.3", "ex3.4", "ex3.5", "ex3.6", "appendixA", "remark-polya"];

/// Tolerance for verifying solver certificates.
pub const CERT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Sparse,
    Dense,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sparse" => Ok(Variant::Sparse),
            "dense" => Ok(Variant::Dense),
            _ => Err(Error::Unknown(format!("variant '{s}' (expected sparse or dense)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExampleParams {
    pub k: Option<String>,
    pub d: Option<u32>,
    pub nu: Option<u32>,
    pub omega: Option<usize>,
    pub m: Option<usize>,
    pub variant: Variant,
    /// `basic` or `weighted` for ex3.1; both when `None`.
    pub build: Option<String>,
    pub nu_max: u32,
    pub samples: usize,
    pub seed: u64,
    pub export_sdpa: Option<PathBuf>,
    pub solver: SdpOptions,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            k: None,
            d: None,
            nu: None,
            omega: None,
            m: None,
            variant: Variant::Sparse,
            build: None,
            nu_max: 10,
            samples: 100_000,
            seed: 0,
            export_sdpa: None,
            solver: SdpOptions::default(),
        }
    }
}

struct Ctx<'a> {
    id: &'a str,
    p: &'a ExampleParams,
    reports: Vec<RunReport>,
}

impl Ctx<'_> {
    fn export(&self, prog: &SosProgram, task: &str, report: &mut RunReport) -> Result<(), Error> {
        if let Some(dir) = &self.p.export_sdpa {
            std::fs::create_dir_all(dir)?;
            let slug: String = task.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }).collect();
            let path = dir.join(format!("{}-{slug}.dat-s", self.id));
            std::fs::write(&path, write_sdpa(&prog.problem))?;
            report.artifacts.push(path.display().to_string());
        }
        Ok(())
    }

    /// Builds, solves and reports; structural infeasibility found while
    /// building counts as an infeasible run.
    fn solve(
        &mut self,
        task: &str,
        built: Result<SosProgram, Error>,
        params: &[(&str, String)],
        expected: Option<RunStatus>,
    ) -> Result<Option<(SosProgram, SdpSolution)>, Error> {
        let start = Instant::now();
        let mut r = RunReport::new(self.id, task, RunStatus::Inconclusive);
        for (k, v) in params {
            r = r.param(k, v);
        }
        r.expected = expected;
        let prog = match built {
            Ok(p) => p,
            Err(Error::StructurallyInfeasible(msg)) => {
                r.status = RunStatus::Infeasible;
                r.note = Some(format!("structurally infeasible: {msg}"));
                self.reports.push(r.timed(start));
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        self.export(&prog, task, &mut r)?;
        let sol = prog.solve(&self.p.solver);
        r = r.with_solution(&prog, &sol);
        if matches!(r.status, RunStatus::Feasible | RunStatus::Approximate)
            && !prog.recovery.target.directions.is_empty()
        {
            r.value = Some(prog.value(&sol));
        }
        self.reports.push(r.timed(start));
        Ok(Some((prog, sol)))
    }

    /// Recovers and verifies the certificate of the last solved run.
    fn verify_last(&mut self, target: &ParamPolyMatrix, prog: &SosProgram, sol: &SdpSolution) -> Result<(), Error> {
        let r = self.reports.last_mut().expect("a run was recorded");
        if r.status != RunStatus::Feasible {
            return Ok(());
        }
        let cert = recover_certificate(prog, sol)?;
        let rep = verify_certificate(target, &cert, CERT_TOL)?;
        r.verification = Some(VerifySummary::from(&rep));
        if rep.verdict != Verdict::Pass {
            r.status = RunStatus::Rejected;
        }
        Ok(())
    }

    fn hand(&mut self, task: &str, target: &PolyMatrix, cert: Result<Certificate, Error>) -> Result<(), Error> {
        let start = Instant::now();
        let rep = verify_certificate(&ParamPolyMatrix::fixed(target.clone()), &cert?, 0.0)?;
        let mut r = RunReport::new(self.id, task, RunStatus::from_verdict(rep.verdict)).expect(RunStatus::Verified);
        r.value = Some(rep.max_coeff_residual);
        r.verification = Some(VerifySummary::from(&rep));
        self.reports.push(r.timed(start));
        Ok(())
    }

    fn oracle(&mut self, task: &str, p: &PolyMatrix, region: &Region, params: &[(&str, String)]) -> Result<f64, Error> {
        let start = Instant::now();
        let s = sample_min_eig(p, region, self.p.samples, self.p.seed)?;
        let mut r = RunReport::new(self.id, task, RunStatus::Found);
        for (k, v) in params {
            r = r.param(k, v);
        }
        r.value = Some(s.min_eig);
        r.note = Some(format!(
            "argmin ({}), {} accepted samples, seed {}",
            s.argmin.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "),
            s.accepted,
            self.p.seed
        ));
        self.reports.push(r.timed(start));
        Ok(s.min_eig)
    }
}

fn fixed(p: PolyMatrix) -> ParamPolyMatrix {
    ParamPolyMatrix::fixed(p)
}

fn range_check(name: &str, v: usize, lo: usize, hi: usize) -> Result<usize, Error> {
    if v < lo || v > hi {
        return Err(Error::Precondition(format!("{name} = {v} outside {lo}..={hi}")));
    }
    Ok(v)
}

/// Runs the designated builds of one example and returns a report per run.
pub fn run_example(name: &str, p: &ExampleParams) -> Result<Vec<RunReport>, Error> {
    let mut c = Ctx { id: name, p, reports: Vec::new() };
    match name {
        "ex3.1" => {
            let k = parse_rational(p.k.as_deref().unwrap_or("1"))?;
            if k < rat(0) {
                return Err(Error::Precondition("k must be nonnegative".into()));
            }
            let kf = rat_to_f64(&k);
            let pm = fixed(example_31(&k));
            let ks = chordsos::poly::fmt_rational(&k);
            let build = p.build.as_deref();
            if build.is_none() || build == Some("basic") {
                let d = p.d.unwrap_or(1);
                let expected = if kf >= 2.0 { RunStatus::Feasible } else { RunStatus::Infeasible };
                let params = [("k", ks.clone()), ("d", d.to_string())];
                if let Some((prog, sol)) =
                    c.solve("basic sparse", build_basic_sparse(&pm, &chain_cliques(3), d), &params, Some(expected))?
                {
                    c.verify_last(&pm, &prog, &sol)?;
                }
            }
            if build.is_none() || build == Some("weighted") {
                let d = p.d.unwrap_or(2).max(2);
                let sigma = parse_polynomial(&format!("1 + ({ks}) + x1^2"), 1)?;
                let params = [("k", ks.clone()), ("d", d.to_string()), ("sigma", "1+k+x^2".to_string())];
                let built = build_weighted_sparse(&pm, &sigma, &chain_cliques(3), d);
                if let Some((prog, sol)) = c.solve("weighted sparse", built, &params, Some(RunStatus::Feasible))? {
                    c.verify_last(&pm, &prog, &sol)?;
                }
            }
            if let Some(b) = build.filter(|b| !matches!(*b, "basic" | "weighted")) {
                return Err(Error::Unknown(format!("build '{b}' for ex3.1 (expected basic or weighted)")));
            }
        }
        "ex3.2" => {
            let pm = fixed(example_32());
            c.hand("hand certificate", &example_32(), example_32_certificate())?;
            let sigma = parse_polynomial("x1^2 + x2^2", 3)?;
            let built = build_weighted_sparse(&pm, &sigma, &chain_cliques(3), 2);
            let params = [("d", "2".to_string()), ("sigma", "x1^2+x2^2".to_string())];
            if let Some((prog, sol)) = c.solve("weighted sparse", built, &params, Some(RunStatus::Feasible))? {
                c.verify_last(&pm, &prog, &sol)?;
            }
            let params = [("d", "1".to_string())];
            c.solve(
                "basic sparse",
                build_basic_sparse(&pm, &chain_cliques(3), 1),
                &params,
                Some(RunStatus::Infeasible),
            )?;
        }
        "ex3.3" => {
            let pm = example_33();
            c.hand("hand certificate nu=0", &pm, example_33_nu0_certificate())?;
            c.hand("hand certificate nu=1", &pm, example_33_nu1_certificate())?;
            polya_run(&mut c, &pm, p.nu_max, RunStatus::Found)?;
            let params = [("d", "2".to_string())];
            let fp = fixed(pm);
            if let Some((prog, sol)) = c.solve(
                "basic sparse",
                build_basic_sparse(&fp, &chain_cliques(3), 2),
                &params,
                Some(RunStatus::Feasible),
            )? {
                c.verify_last(&fp, &prog, &sol)?;
            }
        }
        "ex3.4" => {
            let pm = example_34();
            c.hand("hand certificate", &pm, example_34_certificate())?;
            let d = p.d.unwrap_or(2);
            let fp = fixed(pm.clone());
            let params = [("d", d.to_string())];
            let built = build_sparse_putinar(&fp, &bowtie_weights(), &chain_cliques(3), d);
            if let Some((prog, sol)) = c.solve("sparse putinar", built, &params, Some(RunStatus::Feasible))? {
                c.verify_last(&fp, &prog, &sol)?;
            }
            c.oracle("sampled min eigenvalue", &pm, &bowtie_region(), &[("samples", p.samples.to_string())])?;
        }
        "ex3.5" => {
            let omega = range_check("omega", p.omega.unwrap_or(5), 1, 1000)?;
            let nu = p.nu.unwrap_or(if p.variant == Variant::Dense { 1 } else { 2 });
            let pp = example_35(omega)?;
            let cl = chain_cliques(3 * omega);
            let (task, built) = match p.variant {
                Variant::Sparse => ("sparse even hierarchy", build_even_hierarchy(&pp, nu, Some(&cl))),
                Variant::Dense => ("dense even hierarchy", build_even_hierarchy(&pp, nu, None)),
            };
            c.solve(task, built, &[("omega", omega.to_string()), ("nu", nu.to_string())], None)?;
        }
        "ex3.6" => {
            let m = range_check("m", p.m.unwrap_or(10), 2, 10_000)?;
            let d = p.d.unwrap_or(2);
            let pp = example_36(m)?;
            let (task, built) = match p.variant {
                Variant::Sparse => {
                    ("sparse putinar", build_sparse_putinar(&pp, &bowtie_weights(), &arrow_cliques(m), d))
                }
                Variant::Dense => ("dense putinar", build_dense(&pp, &bowtie_weights(), d)),
            };
            let params = [("m", m.to_string()), ("d", d.to_string())];
            c.solve(task, built, &params, None)?;
            // The tabulated bound is lambda = -(c' lambda).
            if let Some(v) = c.reports.last_mut().and_then(|r| r.value.as_mut()) {
                *v = -*v;
            }
            let params = [("m", m.to_string()), ("samples", p.samples.to_string())];
            c.oracle("sampled min eigenvalue", &example_36_matrix(m)?, &bowtie_region(), &params)?;
        }
        "appendixA" => {
            let pm = example_32();
            let params = [("basis", "x1,x2,x3".to_string())];
            c.solve("dense sos", build_dense(&fixed(pm.clone()), &[], 2), &params, Some(RunStatus::Infeasible))?;
            let start = Instant::now();
            let g = forced_gram(&pm, &homogeneous_basis(3, 1))?;
            let f: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
            let mut r = RunReport::new(name, "forced gram min eigenvalue", RunStatus::Found);
            r.value = Some(eigenvalues(&f)[0]);
            r.note = Some("expected 1 - sqrt(2)".into());
            c.reports.push(r.timed(start));
        }
        "remark-polya" => {
            polya_run(&mut c, &remark_polya(), p.nu_max, RunStatus::NotFound)?;
        }
        _ => return Err(Error::Unknown(format!("example '{name}' (known: {})", EXAMPLES.join(", ")))),
    }
    Ok(c.reports)
}

fn polya_run(c: &mut Ctx, pm: &PolyMatrix, nu_max: u32, expected: RunStatus) -> Result<(), Error> {
    let start = Instant::now();
    let found = polya_exponent_search(pm, nu_max, 1e-9);
    let mut r = RunReport::new(c.id, "polya search", RunStatus::NotFound).param("nu_max", nu_max).expect(expected);
    if let Some(rep) = &found {
        r.status = RunStatus::Found;
        r.value = Some(rep.nu as f64);
        let cert = polya_certificate(rep, pm.order(), pm.nvars());
        let v = verify_certificate(&fixed(pm.clone()), &cert, 0.0)?;
        r.verification = Some(VerifySummary::from(&v));
        if v.verdict != Verdict::Pass {
            r.status = RunStatus::Rejected;
        }
        r.note = Some(format!(
            "nu = {}, cliques {}",
            rep.nu,
            rep.cliques.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
        ));
    }
    c.reports.push(r.timed(start));
    Ok(())
}
