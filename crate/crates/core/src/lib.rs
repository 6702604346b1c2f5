//! Exact solvers for the P-median problem with user preferences (PUP).
//!
//! A leader opens exactly `P` of the candidate facilities; every customer then
//! patronizes the open facility it prefers most (lowest disutility), and the leader
//! pays the resulting service cost. This crate provides
//!
//! * a branch-and-cut Benders decomposition whose cuts are built in closed form at
//!   integer master points, with an LP-dual route for cross-checking,
//! * the closest-assignment ([`formulations::build_srm`]) and primal-dual
//!   ([`formulations::build_pdrm`]) single-level MILPs,
//! * a brute-force enumeration oracle,
//! * instance readers/generators and the metrics used for benchmarking.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod benders;
pub mod branch_cut;
pub mod error;
pub mod follower;
pub mod formulations;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{LeaderDecision, Violation};
pub use scalar::Scalar;

pub type Instance = model::Instance<f64>;
pub type Instance32 = model::Instance<f32>;
pub type FollowerResponse = follower::FollowerResponse<f64>;
pub type DualTriple = benders::DualTriple<f64>;
pub type BendersCut = benders::BendersCut<f64>;
pub type LpProblem = lp::LpProblem<f64>;
pub type LpSolution = lp::LpSolution<f64>;
pub type MilpProblem = branch_cut::MilpProblem<f64>;
pub type MilpResult = branch_cut::MilpResult<f64>;
pub type SolverParams = branch_cut::SolverParams<f64>;
pub type PupSolution = branch_cut::PupSolution<f64>;
