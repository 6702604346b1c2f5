//! Lower-level response: every customer patronizes its most preferred open facility.

use log::warn;

use crate::error::{Error, Result};
use crate::model::{Instance, LeaderDecision};
use crate::scalar::Scalar;

/// Customers' reaction to a leader decision and the cost it causes the leader.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowerResponse<T = f64> {
    /// Facility chosen by each customer.
    pub chosen: Vec<usize>,
    /// `Φ_i`: cost of serving customer `i` at its chosen facility.
    pub phi_per_customer: Vec<T>,
    pub phi_total: T,
}

/// Index of the open facility with the smallest normalized disutility for customer `i`.
///
/// Exact ties cannot occur on a validated instance; should one appear anyway the lowest
/// index wins and a warning is logged.
pub fn most_preferred<T: Scalar>(inst: &Instance<T>, open: &LeaderDecision, i: usize) -> Result<usize> {
    argmin_open(inst.pi_row(i), open.open()).ok_or_else(|| Error::InvalidArgument("open set is empty".into()))
}

pub(crate) fn argmin_open<T: Scalar>(row: &[T], open: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &j in open {
        match best {
            None => best = Some(j),
            Some(b) if row[j] < row[b] => best = Some(j),
            Some(b) if row[j] == row[b] => {
                warn!("preference tie between facilities {b} and {j}; keeping the lower index");
                if j < b {
                    best = Some(j);
                }
            }
            _ => {}
        }
    }
    best
}

/// Evaluates a leader decision with exactly `P` open facilities.
pub fn evaluate_leader<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision) -> Result<FollowerResponse<T>> {
    if x.len() != inst.p() {
        return Err(Error::InvalidArgument(format!("{} facilities open, expected P = {}", x.len(), inst.p())));
    }
    evaluate_open_set(inst, x)
}

/// Same as [`evaluate_leader`] without the cardinality check.
pub fn evaluate_open_set<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision) -> Result<FollowerResponse<T>> {
    if x.n_facilities() != inst.n_facilities() {
        return Err(Error::Shape(format!(
            "decision over {} facilities, instance has {}",
            x.n_facilities(),
            inst.n_facilities()
        )));
    }
    let mut chosen = Vec::with_capacity(inst.n_customers());
    let mut phi = Vec::with_capacity(inst.n_customers());
    for i in 0..inst.n_customers() {
        let m = most_preferred(inst, x, i)?;
        chosen.push(m);
        phi.push(inst.c(i, m));
    }
    let phi_total = phi.iter().copied().sum();
    Ok(FollowerResponse { chosen, phi_per_customer: phi, phi_total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Instance {
        Instance::build(vec![vec![5.0, 3.0]], vec![vec![2.0, 7.0]], 2).unwrap()
    }

    #[test]
    fn argmin_examples() {
        let inst = Instance::build(vec![vec![0.0; 3]], vec![vec![0.2, 0.5, 1.0]], 2).unwrap();
        let d = |v: Vec<usize>| LeaderDecision::new(v, 3).unwrap();
        assert_eq!(most_preferred(&inst, &d(vec![1, 2]), 0).unwrap(), 1);
        assert_eq!(most_preferred(&inst, &d(vec![2]), 0).unwrap(), 2);
        assert_eq!(most_preferred(&inst, &d(vec![0, 1, 2]), 0).unwrap(), 0);
    }

    #[test]
    fn customer_prefers_costlier_facility() {
        let inst = toy();
        let r = evaluate_leader(&inst, &LeaderDecision::new(vec![0, 1], 2).unwrap()).unwrap();
        assert_eq!(r.chosen, vec![0]);
        assert_eq!(r.phi_total, 5.0);

        let inst = inst.with_p(1).unwrap();
        let r = evaluate_leader(&inst, &LeaderDecision::new(vec![1], 2).unwrap()).unwrap();
        assert_eq!(r.chosen, vec![1]);
        assert_eq!(r.phi_total, 3.0);
    }

    #[test]
    fn wrong_cardinality_is_rejected() {
        let inst = toy();
        assert!(evaluate_leader(&inst, &LeaderDecision::new(vec![1], 2).unwrap()).is_err());
    }

    #[test]
    fn ties_fall_back_to_lowest_index() {
        assert_eq!(argmin_open(&[0.5, 0.3, 0.3], &[2, 1]), Some(1));
        assert_eq!(argmin_open::<f64>(&[0.5], &[]), None);
    }

    #[test]
    fn rescaling_a_row_leaves_phi_unchanged() {
        let c = vec![vec![4.0, 1.0, 9.0], vec![2.0, 8.0, 3.0]];
        let g = vec![vec![3.0, 5.0, 1.0], vec![2.0, 7.0, 4.0]];
        let a = Instance::build(c.clone(), g.clone(), 2).unwrap();
        let g2 = vec![g[0].iter().map(|v| v * 17.5).collect(), g[1].clone()];
        let b = Instance::build(c, g2, 2).unwrap();
        for open in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            let x = LeaderDecision::new(open, 3).unwrap();
            assert_eq!(evaluate_leader(&a, &x).unwrap(), evaluate_leader(&b, &x).unwrap());
        }
    }

    #[test]
    fn adding_a_less_preferred_facility_keeps_the_choice() {
        let inst = Instance::build(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![vec![4.0, 1.0, 3.0, 2.0]], 2).unwrap();
        let base = LeaderDecision::new(vec![0, 3], 4).unwrap();
        let m = most_preferred(&inst, &base, 0).unwrap();
        assert_eq!(m, 3);
        let wider = LeaderDecision::new(vec![0, 2, 3], 4).unwrap();
        assert_eq!(most_preferred(&inst, &wider, 0).unwrap(), m);
    }
}
