use crate::benders::{BendersSeparator, SeparationRoute, SeparationStats, Subproblem};
use crate::error::{Error, Result};
use crate::follower::{evaluate_leader, FollowerResponse};
use crate::lp::{LpProblem, Relation};
use crate::model::{Instance, LeaderDecision};
use crate::scalar::Scalar;

use super::{solve_milp, MilpProblem, MilpResult, SolverParams};

/// Outcome of a decomposition run.
#[derive(Debug, Clone, PartialEq)]
pub struct PupSolution<T = f64> {
    pub milp: MilpResult<T>,
    pub decision: Option<LeaderDecision>,
    /// Follower response to `decision` (customers follow their preferences).
    pub response: Option<FollowerResponse<T>>,
    pub separation: SeparationStats,
    /// Integer master points, in separation order, when recording was requested.
    pub points: Option<Vec<LeaderDecision>>,
}

/// `P` facilities with the smallest total service cost over all customers; lowest index
/// on ties.
pub fn greedy_start<T: Scalar>(inst: &Instance<T>) -> LeaderDecision {
    let n_j = inst.n_facilities();
    let col: Vec<T> = (0..n_j).map(|j| (0..inst.n_customers()).map(|i| inst.c(i, j)).sum()).collect();
    let mut order: Vec<usize> = (0..n_j).collect();
    order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    order.truncate(inst.p());
    LeaderDecision::new(order, n_j).expect("indices are in range")
}

/// Master problem: `min Σ_i w_i` s.t. `Σ_j x_j = P`, `w_i ≥ min_j c_ij`.
fn master<T: Scalar>(inst: &Instance<T>, name: &str) -> Result<MilpProblem<T>> {
    let (n_i, n_j) = (inst.n_customers(), inst.n_facilities());
    let mut lp = LpProblem::new();
    for _ in 0..n_j {
        lp.add_var(T::zero(), T::zero(), T::one());
    }
    for i in 0..n_i {
        let floor = inst.c_row(i).iter().copied().fold(T::infinity(), T::min);
        lp.add_var(T::one(), floor, T::infinity());
    }
    lp.add_row((0..n_j).map(|j| (j, T::one())).collect(), Relation::Eq, T::lit(inst.p() as f64));
    let binary = (0..n_j + n_i).map(|k| k < n_j).collect();
    MilpProblem::new(lp, binary, name)
}

fn point<T: Scalar>(x: &LeaderDecision, w: &[T]) -> Vec<T> {
    let mut v = x.to_binary::<T>();
    v.extend_from_slice(w);
    v
}

fn run<T: Scalar>(
    inst: &Instance<T>,
    params: &SolverParams<T>,
    kind: Subproblem,
    record: bool,
) -> Result<PupSolution<T>> {
    let errs = inst.validate();
    if !errs.is_empty() {
        return Err(Error::InvalidInstance(errs));
    }
    let name = match kind {
        Subproblem::Preferences(SeparationRoute::Analytic) => "benders_analytic",
        Subproblem::Preferences(SeparationRoute::Lp) => "benders_lp",
        Subproblem::PMedian => "benders_pmedian",
    };
    let mut problem = master(inst, name)?;
    let mut sep = BendersSeparator::new(inst, kind);
    if record {
        sep = sep.record_points();
    }
    if params.greedy_start {
        let g = greedy_start(inst);
        let mut start = point(&g, &vec![T::zero(); inst.n_customers()]);
        crate::branch_cut::LazyConstraints::polish(&mut sep, &mut start);
        problem.warm_start = Some(start);
    }
    let milp = solve_milp(&problem, params, Some(&mut sep))?;
    if let Some(e) = sep.take_error() {
        return Err(e);
    }
    let decision = match &milp.x {
        Some(x) => Some(LeaderDecision::from_binary(&x[..inst.n_facilities()])?),
        None => None,
    };
    let response = decision.as_ref().map(|d| evaluate_leader(inst, d)).transpose()?;
    Ok(PupSolution { milp, decision, response, separation: sep.stats.clone(), points: sep.points.take() })
}

/// Branch-and-cut Benders decomposition for the PUP.
pub fn solve_pup_benders<T: Scalar>(
    inst: &Instance<T>,
    params: &SolverParams<T>,
    route: SeparationRoute,
    record_points: bool,
) -> Result<PupSolution<T>> {
    run(inst, params, Subproblem::Preferences(route), record_points)
}

/// Same decomposition for the classical p-median (preferences ignored). The returned
/// `response` still evaluates the chosen facilities under the customers' preferences.
pub fn solve_pmedian_benders<T: Scalar>(inst: &Instance<T>, params: &SolverParams<T>) -> Result<PupSolution<T>> {
    run(inst, params, Subproblem::PMedian, false)
}
