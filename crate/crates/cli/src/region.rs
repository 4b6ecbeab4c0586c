//! Outer approximation of the feasible `lambda` region of the tridiagonal family.

use std::fmt::Write as _;

use chordsos::instances::{chain_cliques, example_35_with_cost};
use chordsos::sos::build_even_hierarchy;
use chordsos::Error;
use chordsos_sdp::SdpOptions;
use rayon::prelude::*;

use crate::examples::Variant;
use crate::report::RunStatus;

#[derive(Clone, Debug)]
pub struct RegionParams {
    pub omega: usize,
    pub nu: u32,
    pub variant: Variant,
    /// Directions in `[0, pi/2]`; mirrored to `[pi/2, pi]`.
    pub directions: usize,
    pub jobs: usize,
    pub solver: SdpOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionPoint {
    pub theta: f64,
    pub lambda: [f64; 2],
    pub status: RunStatus,
}

fn solve_direction(p: &RegionParams, theta: f64) -> Result<RegionPoint, Error> {
    let pp = example_35_with_cost(p.omega, [-theta.cos(), theta.sin()])?;
    let cl = chain_cliques(3 * p.omega);
    let prog = match p.variant {
        Variant::Sparse => build_even_hierarchy(&pp, p.nu, Some(&cl))?,
        Variant::Dense => build_even_hierarchy(&pp, p.nu, None)?,
    };
    let sol = prog.solve(&p.solver);
    let status = RunStatus::from_solution(&prog, &sol);
    let lambda = match status {
        RunStatus::Feasible | RunStatus::Approximate | RunStatus::Inconclusive if sol.dual_free.len() == 2 => {
            [sol.dual_free[0], sol.dual_free[1]]
        }
        _ => [f64::NAN; 2],
    };
    Ok(RegionPoint { theta, lambda, status })
}

/// Maximizes `cos(t) lambda_1 - sin(t) lambda_2` for `t` equally spaced in
/// `[0, pi/2]` and reflects each point to `(-lambda_1, lambda_2)` at `pi - t`,
/// which the sign symmetry of the family allows. The feasible set is
/// unbounded towards large `lambda_2`, so only its lower boundary is traced;
/// directions close to `t = 0` have no finite optimum. Failed
/// directions are kept with their status; inconclusive ones carry the
/// solver's best estimate. Output is sorted by angle.
pub fn scan_region(p: &RegionParams) -> Result<Vec<RegionPoint>, Error> {
    if p.directions < 4 {
        return Err(Error::Precondition("need at least 4 directions".into()));
    }
    if p.omega == 0 {
        return Err(Error::Precondition("omega must be at least 1".into()));
    }
    let thetas: Vec<f64> =
        (0..p.directions).map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (p.directions - 1) as f64).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(p.jobs.max(1))
        .build()
        .map_err(|e| Error::Unknown(e.to_string()))?;
    let half: Vec<RegionPoint> =
        pool.install(|| thetas.par_iter().map(|&t| solve_direction(p, t)).collect::<Result<Vec<_>, _>>())?;
    let mut all = half.clone();
    for q in half.iter().rev() {
        all.push(RegionPoint {
            theta: std::f64::consts::PI - q.theta,
            lambda: [-q.lambda[0], q.lambda[1]],
            status: q.status,
        });
    }
    Ok(all)
}

impl RegionPoint {
    pub fn is_bounded(&self) -> bool {
        matches!(self.status, RunStatus::Feasible | RunStatus::Approximate)
    }
}

pub fn to_csv(points: &[RegionPoint]) -> String {
    let mut out = String::from("theta,lambda1,lambda2,status\n");
    for q in points {
        let _ = writeln!(out, "{:.12},{:.10},{:.10},{}", q.theta, q.lambda[0], q.lambda[1], q.status.as_str());
    }
    out
}
