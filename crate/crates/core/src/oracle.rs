//! Exhaustive enumeration of leader decisions for small instances.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::follower::evaluate_open_set;
use crate::model::{binomial, Instance, LeaderDecision};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult<T = f64> {
    pub decision: LeaderDecision,
    pub objective: T,
    pub evaluated: u128,
}

/// Evaluates every `P`-subset in lexicographic order and keeps the first strict
/// minimum. Fails with [`Error::BudgetExceeded`] when `C(|J|, P)` exceeds `max_subsets`.
pub fn brute_force<T: Scalar>(inst: &Instance<T>, max_subsets: u128) -> Result<BruteForceResult<T>> {
    let errs = inst.validate();
    if !errs.is_empty() {
        return Err(Error::InvalidInstance(errs));
    }
    let (n, k) = (inst.n_facilities(), inst.p());
    let count = binomial(n, k);
    if count > max_subsets {
        return Err(Error::BudgetExceeded { n, k, count, budget: max_subsets });
    }
    let mut best: Option<(LeaderDecision, T)> = None;
    for open in (0..n).combinations(k) {
        let x = LeaderDecision::new(open, n)?;
        let phi = evaluate_open_set(inst, &x)?.phi_total;
        if best.as_ref().is_none_or(|(_, b)| phi < *b) {
            best = Some((x, phi));
        }
    }
    let (decision, objective) = best.expect("1 <= P <= |J| gives at least one subset");
    Ok(BruteForceResult { decision, objective, evaluated: count })
}

/// Every decision together with its leader cost, in lexicographic order.
pub fn enumerate<T: Scalar>(inst: &Instance<T>, max_subsets: u128) -> Result<Vec<(LeaderDecision, T)>> {
    let (n, k) = (inst.n_facilities(), inst.p());
    let count = binomial(n, k);
    if count > max_subsets {
        return Err(Error::BudgetExceeded { n, k, count, budget: max_subsets });
    }
    (0..n)
        .combinations(k)
        .map(|open| {
            let x = LeaderDecision::new(open, n)?;
            let phi = evaluate_open_set(inst, &x)?.phi_total;
            Ok((x, phi))
        })
        .collect()
}
