//! Single-level MILP reformulations solved directly by [`crate::branch_cut::solve_milp`].
//!
//! Column layout is shared by every builder: `x_j` first, then `y_ij` row-major, then
//! (primal-dual model only) `α_i` and `β_ij`.

use std::ops::Range;

use crate::branch_cut::MilpProblem;
use crate::error::{Error, Result};
use crate::follower::evaluate_open_set;
use crate::lp::{LpProblem, Relation};
use crate::model::{Instance, LeaderDecision};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMap {
    pub n_customers: usize,
    pub n_facilities: usize,
    pub x: Range<usize>,
    pub y: Range<usize>,
    pub alpha: Range<usize>,
    pub beta: Range<usize>,
}

impl VariableMap {
    fn new(n_i: usize, n_j: usize, with_duals: bool) -> Self {
        let x = 0..n_j;
        let y = n_j..n_j + n_i * n_j;
        let (alpha, beta) = if with_duals {
            let a = y.end..y.end + n_i;
            let b = a.end..a.end + n_i * n_j;
            (a, b)
        } else {
            (y.end..y.end, y.end..y.end)
        };
        VariableMap { n_customers: n_i, n_facilities: n_j, x, y, alpha, beta }
    }

    pub fn n_vars(&self) -> usize {
        self.beta.end
    }

    pub fn x(&self, j: usize) -> usize {
        self.x.start + j
    }

    pub fn y(&self, i: usize, j: usize) -> usize {
        self.y.start + i * self.n_facilities + j
    }

    pub fn alpha(&self, i: usize) -> usize {
        self.alpha.start + i
    }

    pub fn beta(&self, i: usize, j: usize) -> usize {
        self.beta.start + i * self.n_facilities + j
    }

    pub fn decision<T: Scalar>(&self, sol: &[T]) -> Result<LeaderDecision> {
        LeaderDecision::from_binary(&sol[self.x.clone()])
    }

    /// Facility with the largest `y_ij` for every customer.
    pub fn assignment<T: Scalar>(&self, sol: &[T]) -> Vec<usize> {
        (0..self.n_customers)
            .map(|i| {
                (0..self.n_facilities)
                    .max_by(|&a, &b| sol[self.y(i, a)].partial_cmp(&sol[self.y(i, b)]).unwrap().then(b.cmp(&a)))
                    .unwrap_or(0)
            })
            .collect()
    }
}

fn checked<T: Scalar>(inst: &Instance<T>) -> Result<()> {
    let errs = inst.validate();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(errs))
    }
}

/// Variables, objective, assignment and linking rows; everything but the preference model.
fn base<T: Scalar>(inst: &Instance<T>, map: &VariableMap, y_binary: bool) -> (LpProblem<T>, Vec<bool>) {
    let (n_i, n_j) = (inst.n_customers(), inst.n_facilities());
    let (zero, one) = (T::zero(), T::one());
    let mut lp = LpProblem::new();
    let mut binary = Vec::with_capacity(map.n_vars());
    for _ in 0..n_j {
        lp.add_var(zero, zero, one);
    }
    binary.resize(n_j, true);
    for i in 0..n_i {
        for j in 0..n_j {
            lp.add_var(inst.c(i, j), zero, one);
            binary.push(y_binary);
        }
    }
    for i in 0..n_i {
        lp.add_row((0..n_j).map(|j| (map.y(i, j), one)).collect(), Relation::Eq, one);
    }
    for i in 0..n_i {
        for j in 0..n_j {
            lp.add_row(vec![(map.y(i, j), one), (map.x(j), -one)], Relation::Le, zero);
        }
    }
    (lp, binary)
}

fn cardinality<T: Scalar>(inst: &Instance<T>, map: &VariableMap, lp: &mut LpProblem<T>) {
    let coeffs = (0..inst.n_facilities()).map(|j| (map.x(j), T::one())).collect();
    lp.add_row(coeffs, Relation::Eq, T::lit(inst.p() as f64));
}

/// Closest-assignment formulation. With `relax_y` the assignment variables are
/// continuous in `[0, 1]`; the optimum is unchanged.
pub fn build_srm<T: Scalar>(inst: &Instance<T>, relax_y: bool) -> Result<(MilpProblem<T>, VariableMap)> {
    checked(inst)?;
    let (n_i, n_j) = (inst.n_customers(), inst.n_facilities());
    let map = VariableMap::new(n_i, n_j, false);
    let (mut lp, binary) = base(inst, &map, !relax_y);
    for i in 0..n_i {
        let pi = inst.pi_row(i);
        for j in 0..n_j {
            let mut coeffs: Vec<(usize, T)> = (0..n_j).map(|k| (map.y(i, k), pi[k])).collect();
            coeffs.push((map.x(j), T::one() - pi[j]));
            lp.add_row(coeffs, Relation::Le, T::one());
        }
    }
    cardinality(inst, &map, &mut lp);
    let name = if relax_y { "srm_relaxed_y" } else { "srm" };
    Ok((MilpProblem::new(lp, binary, name)?, map))
}

/// Primal-dual formulation: the follower's assignment LP is replaced by its KKT system
/// with complementarity linearized through unit big-M terms. Preferences enter through
/// the normalized `π`, which keeps every dual bounded by one.
pub fn build_pdrm<T: Scalar>(inst: &Instance<T>) -> Result<(MilpProblem<T>, VariableMap)> {
    checked(inst)?;
    let (n_i, n_j) = (inst.n_customers(), inst.n_facilities());
    let map = VariableMap::new(n_i, n_j, true);
    let (mut lp, mut binary) = base(inst, &map, true);
    let one = T::one();
    for _ in 0..n_i {
        lp.add_var(T::zero(), T::neg_infinity(), T::infinity());
    }
    for _ in 0..n_i * n_j {
        lp.add_var(T::zero(), T::neg_infinity(), T::zero());
    }
    binary.resize(binary.len() + n_i + n_i * n_j, false);
    for i in 0..n_i {
        for j in 0..n_j {
            let (a, b, y, x, pi) = (map.alpha(i), map.beta(i, j), map.y(i, j), map.x(j), inst.pi(i, j));
            lp.add_row(vec![(a, one), (b, one)], Relation::Le, pi);
            lp.add_row(vec![(a, one), (b, one), (y, -one)], Relation::Ge, pi - one);
            lp.add_row(vec![(b, one), (y, one), (x, -one)], Relation::Ge, -one);
        }
    }
    cardinality(inst, &map, &mut lp);
    Ok((MilpProblem::new(lp, binary, "pdrm")?, map))
}

/// Classical P-median: customers go to the cheapest open facility.
pub fn build_pmedian_ignore_pref<T: Scalar>(inst: &Instance<T>) -> Result<(MilpProblem<T>, VariableMap)> {
    checked(inst)?;
    let map = VariableMap::new(inst.n_customers(), inst.n_facilities(), false);
    let (mut lp, binary) = base(inst, &map, false);
    cardinality(inst, &map, &mut lp);
    Ok((MilpProblem::new(lp, binary, "pmedian")?, map))
}

/// Complete feasible point of [`build_pdrm`] for decision `x`: the follower's assignment
/// with `α_i = π_im` and `β_ij = min(0, π_ij − π_im)`, `m` the chosen facility.
pub fn pdrm_point<T: Scalar>(inst: &Instance<T>, map: &VariableMap, x: &LeaderDecision) -> Result<Vec<T>> {
    let resp = evaluate_open_set(inst, x)?;
    let mut sol = vec![T::zero(); map.n_vars()];
    for &j in x.open() {
        sol[map.x(j)] = T::one();
    }
    for (i, &m) in resp.chosen.iter().enumerate() {
        sol[map.y(i, m)] = T::one();
        if !map.alpha.is_empty() {
            let pm = inst.pi(i, m);
            sol[map.alpha(i)] = pm;
            for j in 0..inst.n_facilities() {
                sol[map.beta(i, j)] = (inst.pi(i, j) - pm).min(T::zero());
            }
        }
    }
    Ok(sol)
}
