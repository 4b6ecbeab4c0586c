//! Block-diagonal semidefinite programming.
//!
//! Problems are stated as linear matrix inequalities (see [`SdpProblem`]) and
//! solved by a homogeneous self-dual interior-point method with
//! Nesterov-Todd scaling and Mehrotra predictor-corrector steps. SDPA sparse
//! files can be written and read for cross-checking against external solvers.

mod linalg;
pub mod problem;
pub mod sdpa;
pub mod solver;

pub use problem::{Block, BlockMatrix, DenseSym, SdpProblem};
pub use sdpa::{read_sdpa, write_sdpa};
pub use solver::{kkt_residuals, solve, KktResiduals, SdpOptions, SdpSolution, SdpStatus};

#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("SDPA parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
