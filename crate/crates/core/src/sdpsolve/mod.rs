//! Dense primal-dual interior-point solver for single-block SDPs.

mod check;
mod ipm;
mod problem;

pub use check::{check_solution, verify_primal_ray, CheckReport};
pub use ipm::{solve, SolverConfig, SolverResult, SolverStatus};
pub use problem::{ProblemDims, SdpProblem, SparseSym};
