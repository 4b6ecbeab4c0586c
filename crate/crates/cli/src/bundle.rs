//! Problem bundles: a polynomial matrix problem plus the relaxation to build.

use chordsos::certificate::{verify_certificate, Certificate, Verdict};
use chordsos::graph::Clique;
use chordsos::poly::{PolyJson, PolyMatrix, PolyMatrixJson, Polynomial};
use chordsos::sos::recover_certificate;
use chordsos::sos::{
    build_basic_sparse, build_dense, build_even_hierarchy, build_sparse_putinar, build_weighted_sparse, Hierarchy,
    ParamPolyMatrix, SosProgram,
};
use chordsos::Error;
use chordsos_sdp::SdpOptions;
use std::time::Instant;

use crate::examples::CERT_TOL;
use crate::report::{RunReport, RunStatus, VerifySummary};
use serde::{Deserialize, Serialize};

/// `"auto"` (maximal cliques of a chordal extension), `"full"` (one clique),
/// or explicit 1-based cliques.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CliqueSpec {
    Named(String),
    List(Vec<Vec<usize>>),
}

impl Default for CliqueSpec {
    fn default() -> Self {
        CliqueSpec::Named("auto".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleJson {
    pub p0: PolyMatrixJson,
    #[serde(default)]
    pub directions: Vec<PolyMatrixJson>,
    #[serde(default)]
    pub objective: Vec<f64>,
    #[serde(default)]
    pub weights: Vec<PolyJson>,
    #[serde(default)]
    pub cliques: CliqueSpec,
    pub hierarchy: Hierarchy,
    #[serde(default)]
    pub degree: Option<u32>,
    #[serde(default)]
    pub nu: Option<u32>,
    #[serde(default)]
    pub sigma: Option<PolyJson>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    pub problem: ParamPolyMatrix,
    pub weights: Vec<Polynomial>,
    pub cliques: Vec<Clique>,
    pub hierarchy: Hierarchy,
    pub degree: u32,
    pub nu: u32,
    pub sigma: Polynomial,
}

/// Maximal cliques of the chordal extension of the sparsity graph.
pub fn auto_cliques(p: &ParamPolyMatrix) -> Result<Vec<Clique>, Error> {
    let g = p.sparsity_graph();
    let (ext, peo) = g.chordal_extension();
    ext.maximal_cliques(&peo)
}

impl Bundle {
    pub fn from_json(j: &BundleJson) -> Result<Self, Error> {
        let base = PolyMatrix::from_json(&j.p0)?;
        let n = base.nvars();
        let directions = j.directions.iter().map(PolyMatrix::from_json).collect::<Result<Vec<_>, _>>()?;
        let objective = if j.objective.is_empty() { vec![0.0; directions.len()] } else { j.objective.clone() };
        let problem = ParamPolyMatrix::new(base, directions, objective)?;
        let weights = j.weights.iter().map(|w| w.to_polynomial(n)).collect::<Result<Vec<_>, _>>()?;
        let m = problem.order();
        let cliques = match &j.cliques {
            CliqueSpec::Named(s) if s == "auto" => auto_cliques(&problem)?,
            CliqueSpec::Named(s) if s == "full" => vec![Clique::new((0..m).collect())],
            CliqueSpec::Named(s) => return Err(Error::Unknown(format!("clique spec '{s}'"))),
            CliqueSpec::List(l) => l
                .iter()
                .map(|c| {
                    if c.iter().any(|&v| v == 0 || v > m) {
                        Err(Error::Dimension(format!("clique {c:?} outside 1..={m}")))
                    } else {
                        Ok(Clique::new(c.iter().map(|v| v - 1).collect()))
                    }
                })
                .collect::<Result<_, _>>()?,
        };
        let sigma = match &j.sigma {
            Some(s) => s.to_polynomial(n)?,
            None => Polynomial::one(n),
        };
        Ok(Self {
            problem,
            weights,
            cliques,
            hierarchy: j.hierarchy,
            degree: j.degree.unwrap_or(0),
            nu: j.nu.unwrap_or(0),
            sigma,
        })
    }

    pub fn to_json(&self) -> BundleJson {
        BundleJson {
            p0: self.problem.base.to_json(),
            directions: self.problem.directions.iter().map(PolyMatrix::to_json).collect(),
            objective: self.problem.objective.clone(),
            weights: self.weights.iter().map(PolyJson::from_polynomial).collect(),
            cliques: CliqueSpec::List(self.cliques.iter().map(Clique::one_based).collect()),
            hierarchy: self.hierarchy,
            degree: Some(self.degree),
            nu: Some(self.nu),
            sigma: Some(PolyJson::from_polynomial(&self.sigma)),
        }
    }

    pub fn read(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&serde_json::from_str(&text)?)
    }

    fn is_full(&self) -> bool {
        self.cliques.len() == 1 && self.cliques[0].len() == self.problem.order()
    }

    pub fn build(&self) -> Result<SosProgram, Error> {
        let p = &self.problem;
        match self.hierarchy {
            Hierarchy::Dense => build_dense(p, &self.weights, self.degree),
            Hierarchy::Basic => build_basic_sparse(p, &self.cliques, self.degree),
            Hierarchy::Weighted => build_weighted_sparse(p, &self.sigma, &self.cliques, self.degree),
            Hierarchy::Even => {
                build_even_hierarchy(p, self.nu, if self.is_full() { None } else { Some(&self.cliques) })
            }
            Hierarchy::Putinar => build_sparse_putinar(p, &self.weights, &self.cliques, self.degree),
        }
    }
}

/// Builds and solves `bundle`, verifying the recovered certificate when the
/// program is feasible. Returns the certificate alongside the report.
pub fn solve_bundle(id: &str, bundle: &Bundle, opts: &SdpOptions) -> Result<(RunReport, Option<Certificate>), Error> {
    let start = Instant::now();
    let prog = bundle.build()?;
    let sol = prog.solve(opts);
    let mut r = RunReport::new(
        id,
        &format!("{} build", format!("{:?}", bundle.hierarchy).to_lowercase()),
        RunStatus::Inconclusive,
    )
    .param("d", bundle.degree)
    .param("nu", bundle.nu)
    .with_solution(&prog, &sol);
    let mut cert = None;
    if matches!(r.status, RunStatus::Feasible | RunStatus::Approximate) && !prog.recovery.target.directions.is_empty() {
        r.value = Some(prog.value(&sol));
    }
    if r.status == RunStatus::Feasible {
        let c = recover_certificate(&prog, &sol)?;
        let rep = verify_certificate(&bundle.problem, &c, CERT_TOL)?;
        r.verification = Some(VerifySummary::from(&rep));
        if rep.verdict != Verdict::Pass {
            r.status = RunStatus::Rejected;
        }
        cert = Some(c);
    }
    Ok((r.timed(start), cert))
}
