//! Run reports and their text/JSON rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use chordsos::certificate::{ResidualReport, Verdict};
use chordsos::sos::{SosOutcome, SosProgram};
use chordsos_sdp::{KktResiduals, SdpSolution, SdpStatus};
use serde::{Deserialize, Serialize};

/// Residual bound under which a stalled solve still counts as an approximate optimum.
pub const APPROX_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Feasible,
    /// Stopped early with residuals below [`APPROX_TOL`].
    Approximate,
    Infeasible,
    Unbounded,
    Inconclusive,
    Verified,
    Rejected,
    Found,
    NotFound,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Feasible => "feasible",
            RunStatus::Approximate => "approximate",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Unbounded => "unbounded",
            RunStatus::Inconclusive => "inconclusive",
            RunStatus::Verified => "verified",
            RunStatus::Rejected => "rejected",
            RunStatus::Found => "found",
            RunStatus::NotFound => "not-found",
        }
    }

    pub fn from_solution(prog: &SosProgram, sol: &SdpSolution) -> Self {
        match prog.outcome(sol) {
            SosOutcome::Feasible => RunStatus::Feasible,
            SosOutcome::Infeasible => RunStatus::Infeasible,
            SosOutcome::Unbounded => RunStatus::Unbounded,
            SosOutcome::Inconclusive => {
                let r = &sol.residuals;
                if sol.status == SdpStatus::MaxIterations && r.primal.max(r.dual).max(r.gap) <= APPROX_TOL {
                    RunStatus::Approximate
                } else {
                    RunStatus::Inconclusive
                }
            }
        }
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Pass => RunStatus::Verified,
            Verdict::Fail => RunStatus::Rejected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub exact: bool,
    pub max_coeff_residual: f64,
    pub min_gram_eig: f64,
    pub passed: bool,
}

impl From<&ResidualReport> for VerifySummary {
    fn from(r: &ResidualReport) -> Self {
        Self {
            exact: r.exact,
            max_coeff_residual: r.max_coeff_residual,
            min_gram_eig: r.min_gram_eig,
            passed: r.verdict == Verdict::Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Example name or input path.
    pub id: String,
    pub task: String,
    pub params: BTreeMap<String, String>,
    pub status: RunStatus,
    /// Documented outcome, when the run is a reproduction.
    pub expected: Option<RunStatus>,
    /// The tabulated quantity (bound, objective or eigenvalue).
    pub value: Option<f64>,
    pub wall_time: f64,
    pub solver_status: Option<SdpStatus>,
    pub iterations: Option<usize>,
    pub constraints: Option<usize>,
    pub residuals: Option<KktResiduals>,
    pub verification: Option<VerifySummary>,
    pub artifacts: Vec<String>,
    pub note: Option<String>,
}

impl RunReport {
    pub fn new(id: &str, task: &str, status: RunStatus) -> Self {
        Self {
            id: id.into(),
            task: task.into(),
            params: BTreeMap::new(),
            status,
            expected: None,
            value: None,
            wall_time: 0.0,
            solver_status: None,
            iterations: None,
            constraints: None,
            residuals: None,
            verification: None,
            artifacts: Vec::new(),
            note: None,
        }
    }

    pub fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.into(), v.to_string());
        self
    }

    pub fn expect(mut self, s: RunStatus) -> Self {
        self.expected = Some(s);
        self
    }

    pub fn with_solution(mut self, prog: &SosProgram, sol: &SdpSolution) -> Self {
        self.status = RunStatus::from_solution(prog, sol);
        self.solver_status = Some(sol.status);
        self.iterations = Some(sol.iterations);
        self.constraints = Some(prog.num_constraints());
        self.residuals = Some(sol.residuals.clone());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.wall_time = start.elapsed().as_secs_f64();
        self
    }

    pub fn matches_expectation(&self) -> bool {
        match self.expected {
            Some(e) => e == self.status,
            None => matches!(
                self.status,
                RunStatus::Feasible | RunStatus::Approximate | RunStatus::Verified | RunStatus::Found
            ),
        }
    }
}

/// Process exit code for a set of reports: 0 when every run has its
/// documented (or a successful) outcome, 2 for an unexpected infeasibility,
/// 3 otherwise.
pub fn exit_code(reports: &[RunReport]) -> i32 {
    let bad: Vec<&RunReport> = reports.iter().filter(|r| !r.matches_expectation()).collect();
    if bad.is_empty() {
        0
    } else if bad.iter().all(|r| matches!(r.status, RunStatus::Infeasible | RunStatus::NotFound | RunStatus::Rejected))
    {
        2
    } else {
        3
    }
}

fn fmt_params(p: &BTreeMap<String, String>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// Fixed-width table with time and bound columns.
pub fn render_table(reports: &[RunReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<13} {:<28} {:<22} {:<13} {:>9} {:>12}",
        "example", "task", "params", "status", "t (s)", "value"
    );
    for r in reports {
        let value = r.value.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mut status = r.status.as_str().to_string();
        if !r.matches_expectation() {
            status.push('!');
        }
        let _ = writeln!(
            out,
            "{:<13} {:<28} {:<22} {:<13} {:>9.2} {:>12}",
            r.id,
            r.task,
            fmt_params(&r.params),
            status,
            r.wall_time,
            value
        );
        if let Some(n) = &r.note {
            let _ = writeln!(out, "{:<13} {n}", "");
        }
    }
    out
}
