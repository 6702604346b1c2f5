//! Mixed-binary branch-and-cut with lazy constraints.
//!
//! Node relaxations share one [`LpSolver`]: lazy rows are global, so they are appended
//! once and every later node sees them. Nodes are explored best-bound first, branching
//! on the most fractional binary.

mod pup;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpSolver, LpStatus, Row};
use crate::scalar::Scalar;

pub use pup::{greedy_start, solve_pmedian_benders, solve_pup_benders, PupSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem<T = f64> {
    pub lp: LpProblem<T>,
    /// `true` for variables restricted to {0, 1}.
    pub binary: Vec<bool>,
    pub name: String,
    /// Known feasible point installed as the first incumbent.
    pub warm_start: Option<Vec<T>>,
}

impl<T: Scalar> MilpProblem<T> {
    pub fn new(lp: LpProblem<T>, binary: Vec<bool>, name: impl Into<String>) -> Result<Self> {
        if binary.len() != lp.n_vars() {
            return Err(Error::Shape(format!("{} integrality flags for {} variables", binary.len(), lp.n_vars())));
        }
        for (j, _) in binary.iter().enumerate().filter(|(_, &b)| b) {
            if lp.lower[j] < T::zero() || lp.upper[j] > T::one() {
                return Err(Error::InvalidArgument(format!("binary variable {j} has bounds outside [0, 1]")));
            }
        }
        Ok(MilpProblem { lp, binary, name: name.into(), warm_start: None })
    }

    pub fn to_lp_format(&self) -> String {
        self.lp.to_lp_format(&self.name, Some(&self.binary))
    }
}

/// Lazy constraint generator called at every binary-feasible node.
pub trait LazyConstraints<T: Scalar> {
    /// Rows violated by the binary point `x`. Implementations decide what "violated"
    /// means relative to `tol`; returned rows must be valid for every feasible point.
    fn separate(&mut self, x: &[T], tol: T) -> Vec<Row<T>>;

    /// Called on a point about to become the incumbent; may raise continuous variables to
    /// the values they would take at the true optimum for the fixed binaries.
    fn polish(&mut self, _x: &mut [T]) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeSelection {
    BestBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branching {
    MostFractional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams<T = f64> {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    pub rel_gap_tol: T,
    pub int_feas_tol: T,
    /// Minimum relative violation for a lazy row to be added.
    pub cut_violation_tol: T,
    pub node_selection: NodeSelection,
    pub branching: Branching,
    /// Re-solve node LPs from the previous basis instead of a slack basis.
    pub warm_start_lp: bool,
    /// Install a greedy incumbent before branching (decomposition solvers only).
    pub greedy_start: bool,
    /// Keep one [`NodeRecord`] per processed node.
    pub record_log: bool,
}

impl<T: Scalar> Default for SolverParams<T> {
    fn default() -> Self {
        SolverParams {
            time_limit: 7200.0,
            rel_gap_tol: T::lit(1e-6),
            int_feas_tol: T::base_tol(),
            cut_violation_tol: T::lit(1e-5),
            node_selection: NodeSelection::BestBound,
            branching: Branching::MostFractional,
            warm_start_lp: true,
            greedy_start: true,
            record_log: false,
        }
    }
}

impl<T: Scalar> SolverParams<T> {
    pub fn check(&self) -> Result<()> {
        let z = T::zero();
        if !(self.time_limit >= 0.0) {
            return Err(Error::InvalidArgument("time limit must be nonnegative".into()));
        }
        if !(self.rel_gap_tol > z && self.int_feas_tol > z && self.cut_violation_tol > z) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MilpStatus {
    Optimal,
    TimeLimit,
    Infeasible,
}

impl MilpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MilpStatus::Optimal => "optimal",
            MilpStatus::TimeLimit => "time_limit",
            MilpStatus::Infeasible => "infeasible",
        }
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node: usize,
    pub depth: usize,
    pub bound: f64,
    pub incumbent: Option<f64>,
    pub pool_size: usize,
    pub open_nodes: usize,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpResult<T = f64> {
    pub status: MilpStatus,
    pub x: Option<Vec<T>>,
    /// Incumbent objective (`zopt`); infinite without an incumbent.
    pub objective: T,
    /// Best proven lower bound (`zbb`).
    pub best_bound: T,
    pub rgap_percent: f64,
    pub nodes: usize,
    pub cuts_added: usize,
    /// Binary-feasible points handed to the lazy constraint callback.
    pub integer_points: usize,
    pub lp_iterations: usize,
    pub wall_time: f64,
    pub log: Vec<NodeRecord>,
}

impl<T: Scalar> MilpResult<T> {
    pub fn has_incumbent(&self) -> bool {
        self.x.is_some()
    }
}

/// `|zbb − zopt| / |zbb| × 100`; values under 0.01 % count as solved (0).
/// `None` when `zbb` is zero (or non-finite) and the gap is nonzero.
pub fn compute_rgap(zopt: f64, zbb: f64) -> Option<f64> {
    if zopt == zbb {
        return Some(0.0);
    }
    if zbb == 0.0 || !zbb.is_finite() || !zopt.is_finite() {
        return None;
    }
    let g = (zbb - zopt).abs() / zbb.abs() * 100.0;
    Some(if g < 0.01 { 0.0 } else { g })
}

struct Node<T> {
    bound: T,
    seq: usize,
    depth: usize,
    fixings: Vec<(usize, T)>,
}

impl<T: Scalar> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Node<T> {}
impl<T: Scalar> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Node<T> {
    // BinaryHeap is a max-heap: smallest bound first, then first-in first-out.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.partial_cmp(&self.bound).unwrap_or(Ordering::Equal).then(other.seq.cmp(&self.seq))
    }
}

fn absolute_gap<T: Scalar>(incumbent: T, rel: T) -> T {
    (rel * incumbent.abs()).max(T::lit(1e-9))
}

/// Branch-and-cut over the binary variables of `p`.
pub fn solve_milp<T: Scalar>(
    p: &MilpProblem<T>,
    params: &SolverParams<T>,
    mut callback: Option<&mut dyn LazyConstraints<T>>,
) -> Result<MilpResult<T>> {
    params.check()?;
    let start = Instant::now();
    let limit = Duration::from_secs_f64(params.time_limit.min(1e9));
    let n = p.lp.n_vars();
    if p.binary.len() != n {
        return Err(Error::Shape("integrality mask length differs from variable count".into()));
    }
    let mut solver = LpSolver::new(&p.lp)?;
    let binaries: Vec<usize> = (0..n).filter(|&j| p.binary[j]).collect();

    let mut incumbent: Option<(Vec<T>, T)> = None;
    if let Some(ws) = &p.warm_start {
        let feasible = ws.len() == n
            && p.lp.max_violation(ws) <= T::lit(1e-6)
            && binaries.iter().all(|&j| ws[j] == T::zero() || ws[j] == T::one());
        if feasible {
            incumbent = Some((ws.clone(), p.lp.objective_value(ws)));
        } else {
            debug!("{}: ignoring infeasible warm start", p.name);
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node { bound: T::neg_infinity(), seq, depth: 0, fixings: Vec::new() });
    let mut nodes = 0usize;
    let mut cuts_added = 0usize;
    let mut integer_points = 0usize;
    let mut log = Vec::new();
    let mut running_bound = T::neg_infinity();
    let mut timed_out = false;

    while let Some(node) = heap.pop() {
        if nodes > 0 && start.elapsed() >= limit {
            heap.push(node);
            timed_out = true;
            break;
        }
        if let Some((_, inc)) = &incumbent {
            if node.bound >= *inc - absolute_gap(*inc, params.rel_gap_tol) {
                heap.clear();
                break;
            }
        }
        nodes += 1;
        for &j in &binaries {
            solver.set_bounds(j, p.lp.lower[j], p.lp.upper[j]);
        }
        for &(j, v) in &node.fixings {
            solver.set_bounds(j, v, v);
        }
        if !params.warm_start_lp {
            solver.reset_basis();
        }

        loop {
            match solver.solve() {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => break,
                LpStatus::Unbounded => {
                    return Err(Error::Lp(format!("{}: node {nodes} relaxation is unbounded", p.name)))
                }
                LpStatus::IterationLimit => {
                    return Err(Error::Lp(format!("{}: node {nodes} hit the simplex iteration cap", p.name)))
                }
            }
            let obj = solver.objective();
            if let Some((_, inc)) = &incumbent {
                if obj >= *inc - absolute_gap(*inc, params.rel_gap_tol) {
                    break;
                }
            }
            let x = solver.x();
            let mut branch_var: Option<(usize, T)> = None;
            for &j in &binaries {
                let f = x[j] - x[j].floor();
                let dist = f.min(T::one() - f);
                if dist > params.int_feas_tol && branch_var.is_none_or(|(_, d)| dist > d) {
                    branch_var = Some((j, dist));
                }
            }
            if let Some((j, _)) = branch_var {
                for v in [T::zero(), T::one()] {
                    seq += 1;
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    heap.push(Node { bound: obj, seq, depth: node.depth + 1, fixings });
                }
                break;
            }
            let mut xr = x.to_vec();
            for &j in &binaries {
                xr[j] = xr[j].round();
            }
            if let Some(cb) = callback.as_deref_mut() {
                integer_points += 1;
                let rows: Vec<Row<T>> = cb
                    .separate(&xr, params.cut_violation_tol)
                    .into_iter()
                    .filter(|r| r.violation(&xr) > T::base_tol())
                    .collect();
                if !rows.is_empty() {
                    cuts_added += rows.len();
                    for r in rows {
                        solver.add_row(r)?;
                    }
                    if start.elapsed() >= limit {
                        // keep the node so its bound still counts
                        seq += 1;
                        heap.push(Node { bound: obj, seq, depth: node.depth, fixings: node.fixings.clone() });
                        timed_out = true;
                        break;
                    }
                    continue;
                }
                cb.polish(&mut xr);
            }
            let val = p.lp.objective_value(&xr);
            if incumbent.as_ref().is_none_or(|(_, inc)| val < *inc) {
                debug!("{}: new incumbent {val} at node {nodes}", p.name);
                incumbent = Some((xr, val));
            }
            break;
        }

        let open_min = heap.peek().map_or(T::infinity(), |nd| nd.bound);
        let inc_val = incumbent.as_ref().map_or(T::infinity(), |(_, v)| *v);
        let current = if heap.is_empty() { inc_val } else { open_min.min(inc_val) };
        running_bound = running_bound.max(current.min(inc_val));
        if params.record_log {
            log.push(NodeRecord {
                node: nodes,
                depth: node.depth,
                bound: running_bound.as_f64(),
                incumbent: incumbent.as_ref().map(|(_, v)| v.as_f64()),
                pool_size: cuts_added,
                open_nodes: heap.len(),
                elapsed: start.elapsed().as_secs_f64(),
            });
        }
        if timed_out {
            break;
        }
    }

    let inc_val = incumbent.as_ref().map_or(T::infinity(), |(_, v)| *v);
    let (status, best_bound) = if timed_out {
        let open_min = heap.iter().map(|nd| nd.bound).fold(T::infinity(), T::min);
        (MilpStatus::TimeLimit, running_bound.max(open_min.min(inc_val)).min(inc_val))
    } else if incumbent.is_some() {
        (MilpStatus::Optimal, inc_val)
    } else {
        (MilpStatus::Infeasible, T::infinity())
    };
    let (zopt, zbb) = (inc_val.as_f64(), best_bound.as_f64());
    let rgap = if status == MilpStatus::Optimal { 0.0 } else { compute_rgap(zopt, zbb).unwrap_or(f64::INFINITY) };
    let wall = start.elapsed().as_secs_f64();
    info!(
        "{}: {} obj={} bound={} nodes={} cuts={} in {:.3}s",
        p.name,
        status.as_str(),
        zopt,
        zbb,
        nodes,
        cuts_added,
        wall
    );
    Ok(MilpResult {
        status,
        objective: inc_val,
        x: incumbent.map(|(x, _)| x),
        best_bound,
        rgap_percent: rgap,
        nodes,
        cuts_added,
        integer_points,
        lp_iterations: solver.iterations(),
        wall_time: wall,
        log,
    })
}
