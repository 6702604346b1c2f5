//! Benders optimality cuts for the customer subproblems.
//!
//! For a fixed integer leader decision `x̄` the subproblem of customer `i` is
//!
//! ```text
//! min  Σ_j c_ij y_j
//! s.t. Σ_j y_j = 1,  y_j ≤ x̄_j,  Σ_k π_ik y_k ≤ (π_ij − 1) x̄_j + 1  ∀j,  y ≥ 0
//! ```
//!
//! whose dual multipliers `(μ, λ, v)` give the cut
//! `w_i ≥ μ − Σ_j v_j + Σ_j (v_j − π_ij v_j − λ_j) x_j`.
//! At integer `x̄` an optimal dual solution is available in closed form, so no LP is
//! needed; [`lp_duals_oracle`] solves the dual LP explicitly for cross-checks.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::branch_cut::LazyConstraints;
use crate::error::{Error, Result};
use crate::follower::{argmin_open, evaluate_open_set};
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Row};
use crate::model::{Instance, LeaderDecision};
use crate::scalar::{pos, Scalar};

/// Denominators below this magnitude make the closed-form multiplier unreliable.
const DENOMINATOR_GUARD: f64 = 1e-15;

/// Dual multipliers of one customer subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct DualTriple<T = f64> {
    pub customer: usize,
    /// Multiplier of the assignment row (free).
    pub mu: T,
    /// Multipliers of the linking rows `y_j ≤ x̄_j` (nonnegative).
    pub lambda: Vec<T>,
    /// Multipliers of the closest-assignment rows (nonnegative).
    pub v: Vec<T>,
}

impl<T: Scalar> DualTriple<T> {
    /// Dual objective at `x̄`.
    pub fn objective(&self, inst: &Instance<T>, x: &[T]) -> T {
        let pi = inst.pi_row(self.customer);
        let mut val = self.mu - self.v.iter().copied().sum::<T>();
        for j in 0..x.len() {
            val += (self.v[j] - pi[j] * self.v[j] - self.lambda[j]) * x[j];
        }
        val
    }

    /// Largest violation of the dual constraints, sign restrictions included.
    pub fn max_infeasibility(&self, inst: &Instance<T>) -> T {
        let i = self.customer;
        let sum_v: T = self.v.iter().copied().sum();
        let mut worst = T::zero();
        for j in 0..inst.n_facilities() {
            let slack = inst.c(i, j) - self.mu + self.lambda[j] + inst.pi(i, j) * sum_v;
            worst = worst.max(-slack).max(-self.lambda[j]).max(-self.v[j]);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutOrigin {
    Analytic,
    Lp,
}

/// `w_i ≥ constant + Σ_j coeff_j x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BendersCut<T = f64> {
    pub customer: usize,
    pub constant: T,
    pub coeff: Vec<T>,
    pub origin: CutOrigin,
}

impl<T: Scalar> BendersCut<T> {
    /// Right-hand side of the cut at `x`.
    pub fn value(&self, x: &[T]) -> T {
        self.constant + self.coeff.iter().zip(x).map(|(&a, &b)| a * b).sum::<T>()
    }

    /// Master row `w_i − Σ_j coeff_j x_j ≥ constant` with `x_j` at column `j` and `w_i`
    /// at column `w_offset + i`.
    pub fn to_row(&self, w_offset: usize) -> Row<T> {
        let mut coeffs: Vec<(usize, T)> =
            self.coeff.iter().enumerate().filter(|(_, &a)| a != T::zero()).map(|(j, &a)| (j, -a)).collect();
        coeffs.push((w_offset + self.customer, T::one()));
        Row::new(coeffs, Relation::Ge, self.constant)
    }
}

/// Closed-form optimal duals at an integer decision, or `None` when a denominator
/// falls below the guard.
pub fn analytic_duals_checked<T: Scalar>(
    inst: &Instance<T>,
    x: &LeaderDecision,
    i: usize,
) -> Result<Option<DualTriple<T>>> {
    check_point(inst, x, i)?;
    let n_j = inst.n_facilities();
    let pi = inst.pi_row(i);
    let c = inst.c_row(i);
    let m = argmin_open(pi, x.open()).ok_or_else(|| Error::InvalidArgument("open set is empty".into()))?;
    let mut v_m = T::zero();
    for &j in x.open() {
        if j == m {
            continue;
        }
        let den = pi[m] - pi[j];
        if den.abs() < T::lit(DENOMINATOR_GUARD) {
            return Ok(None);
        }
        v_m = v_m.max(pos((c[j] - c[m]) / den));
    }
    let mu = c[m] + pi[m] * v_m;
    let mut v = vec![T::zero(); n_j];
    v[m] = v_m;
    let lambda = (0..n_j).map(|j| if x.is_open(j) { T::zero() } else { pos(mu - c[j] - pi[j] * v_m) }).collect();
    Ok(Some(DualTriple { customer: i, mu, lambda, v }))
}

/// Closed-form optimal duals, falling back to [`lp_duals_oracle`] on tiny denominators.
pub fn analytic_duals<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision, i: usize) -> Result<DualTriple<T>> {
    match analytic_duals_checked(inst, x, i)? {
        Some(d) => Ok(d),
        None => lp_duals_oracle(inst, x, i),
    }
}

/// Dual subproblem of customer `i` as an LP (minimization form).
/// Columns: `μ`, then `λ_0..λ_{J-1}`, then `v_0..v_{J-1}`.
pub fn dual_subproblem_lp<T: Scalar>(inst: &Instance<T>, x: &[T], i: usize) -> LpProblem<T> {
    let n_j = inst.n_facilities();
    let pi = inst.pi_row(i);
    let mut lp = LpProblem::new();
    let mu = lp.add_var(-T::one(), T::neg_infinity(), T::infinity());
    for &xj in x {
        lp.add_var(xj, T::zero(), T::infinity());
    }
    for j in 0..n_j {
        lp.add_var(T::one() - (T::one() - pi[j]) * x[j], T::zero(), T::infinity());
    }
    for j in 0..n_j {
        let mut coeffs = vec![(mu, -T::one()), (1 + j, T::one())];
        coeffs.extend((0..n_j).map(|k| (1 + n_j + k, pi[j])));
        lp.add_row(coeffs, Relation::Ge, -inst.c(i, j));
    }
    lp
}

/// Primal subproblem of customer `i` at (possibly fractional) `x̄`. Columns are `y_j`.
pub fn primal_subproblem_lp<T: Scalar>(inst: &Instance<T>, x: &[T], i: usize) -> LpProblem<T> {
    let n_j = inst.n_facilities();
    let pi = inst.pi_row(i);
    let mut lp = LpProblem::new();
    for j in 0..n_j {
        lp.add_var(inst.c(i, j), T::zero(), T::infinity());
    }
    lp.add_row((0..n_j).map(|j| (j, T::one())).collect(), Relation::Eq, T::one());
    for j in 0..n_j {
        lp.add_row(vec![(j, T::one())], Relation::Le, x[j]);
    }
    for j in 0..n_j {
        let coeffs = (0..n_j).map(|k| (k, pi[k])).collect();
        lp.add_row(coeffs, Relation::Le, (pi[j] - T::one()) * x[j] + T::one());
    }
    lp
}

/// Optimal duals obtained by solving the dual subproblem LP.
pub fn lp_duals_oracle<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision, i: usize) -> Result<DualTriple<T>> {
    check_point(inst, x, i)?;
    let n_j = inst.n_facilities();
    let xb = x.to_binary::<T>();
    let sol = solve_lp(&dual_subproblem_lp(inst, &xb, i))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("dual subproblem of customer {i} ended {:?}", sol.status)));
    }
    Ok(DualTriple { customer: i, mu: sol.x[0], lambda: sol.x[1..=n_j].to_vec(), v: sol.x[1 + n_j..].to_vec() })
}

fn check_point<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision, i: usize) -> Result<()> {
    if i >= inst.n_customers() {
        return Err(Error::InvalidArgument(format!("customer {i} out of range")));
    }
    if x.n_facilities() != inst.n_facilities() {
        return Err(Error::Shape("decision and instance disagree on |J|".into()));
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument("open set is empty".into()));
    }
    Ok(())
}

pub fn cut_from_duals<T: Scalar>(d: &DualTriple<T>, inst: &Instance<T>, origin: CutOrigin) -> BendersCut<T> {
    let pi = inst.pi_row(d.customer);
    let constant = d.mu - d.v.iter().copied().sum::<T>();
    let coeff = (0..d.lambda.len()).map(|j| d.v[j] - pi[j] * d.v[j] - d.lambda[j]).collect();
    BendersCut { customer: d.customer, constant, coeff, origin }
}

/// `(cut(x̄) − w̄) / max(|w̄|, 1)`; positive when the cut is violated.
pub fn relative_violation<T: Scalar>(cut: &BendersCut<T>, x: &[T], w: T) -> T {
    (cut.value(x) - w) / w.abs().max(T::one())
}

/// Cut for the classical p-median subproblem (preferences ignored): each customer may
/// use any open facility, so `w_i ≥ μ − Σ_j λ_j x_j` with `μ` the cheapest open cost
/// and `λ_j = [μ − c_ij]_+`.
pub fn pmedian_cut<T: Scalar>(inst: &Instance<T>, x: &LeaderDecision, i: usize) -> Result<BendersCut<T>> {
    check_point(inst, x, i)?;
    let c = inst.c_row(i);
    let mu = x.open().iter().map(|&j| c[j]).fold(T::infinity(), T::min);
    let coeff = c.iter().map(|&cj| -pos(mu - cj)).collect();
    Ok(BendersCut { customer: i, constant: mu, coeff, origin: CutOrigin::Analytic })
}

/// Which dual source a separator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationRoute {
    Analytic,
    Lp,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparationStats {
    pub integer_points: usize,
    pub cuts_generated: usize,
    pub cuts_added: usize,
    pub lp_solves: usize,
    /// Analytic calls that fell back to the LP route.
    pub fallbacks: usize,
    pub time: Duration,
}

/// What the subproblems look like.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subproblem {
    /// Customers follow their preferences.
    Preferences(SeparationRoute),
    /// Customers are assigned to the cheapest open facility.
    PMedian,
}

/// Lazy constraint callback for the master `min Σ w_i, Σ x = P, w ≥ cuts`, with `x_j` in
/// columns `0..J` and `w_i` in columns `J..J+I`.
pub struct BendersSeparator<'a, T: Scalar> {
    inst: &'a Instance<T>,
    kind: Subproblem,
    pub stats: SeparationStats,
    /// Integer points seen, in order, when recording is enabled.
    pub points: Option<Vec<LeaderDecision>>,
    error: Option<Error>,
}

impl<'a, T: Scalar> BendersSeparator<'a, T> {
    pub fn new(inst: &'a Instance<T>, kind: Subproblem) -> Self {
        BendersSeparator { inst, kind, stats: SeparationStats::default(), points: None, error: None }
    }

    pub fn record_points(mut self) -> Self {
        self.points = Some(Vec::new());
        self
    }

    /// First error raised inside the callback, if any.
    pub fn take_error(&mut self) -> Option<Error> {
        self.error.take()
    }

    /// Cut for customer `i` at `x̄`.
    pub fn cut(&mut self, x: &LeaderDecision, i: usize) -> Result<BendersCut<T>> {
        match self.kind {
            Subproblem::PMedian => pmedian_cut(self.inst, x, i),
            Subproblem::Preferences(SeparationRoute::Analytic) => match analytic_duals_checked(self.inst, x, i)? {
                Some(d) => Ok(cut_from_duals(&d, self.inst, CutOrigin::Analytic)),
                None => {
                    self.stats.fallbacks += 1;
                    self.stats.lp_solves += 1;
                    Ok(cut_from_duals(&lp_duals_oracle(self.inst, x, i)?, self.inst, CutOrigin::Lp))
                }
            },
            Subproblem::Preferences(SeparationRoute::Lp) => {
                self.stats.lp_solves += 1;
                Ok(cut_from_duals(&lp_duals_oracle(self.inst, x, i)?, self.inst, CutOrigin::Lp))
            }
        }
    }

    fn decision(&self, x: &[T]) -> Result<LeaderDecision> {
        LeaderDecision::from_binary(&x[..self.inst.n_facilities()])
    }

    fn separate_inner(&mut self, x: &[T], tol: T) -> Result<Vec<Row<T>>> {
        let n_j = self.inst.n_facilities();
        let dec = self.decision(x)?;
        if let Some(points) = &mut self.points {
            points.push(dec.clone());
        }
        self.stats.integer_points += 1;
        let mut rows = Vec::new();
        for i in 0..self.inst.n_customers() {
            let cut = self.cut(&dec, i)?;
            self.stats.cuts_generated += 1;
            if relative_violation(&cut, &x[..n_j], x[n_j + i]) > tol {
                rows.push(cut.to_row(n_j));
            }
        }
        self.stats.cuts_added += rows.len();
        Ok(rows)
    }
}

impl<T: Scalar> LazyConstraints<T> for BendersSeparator<'_, T> {
    fn separate(&mut self, x: &[T], tol: T) -> Vec<Row<T>> {
        let t0 = Instant::now();
        let rows = match self.separate_inner(x, tol) {
            Ok(rows) => rows,
            Err(e) => {
                self.error.get_or_insert(e);
                Vec::new()
            }
        };
        self.stats.time += t0.elapsed();
        rows
    }

    fn polish(&mut self, x: &mut [T]) {
        let n_j = self.inst.n_facilities();
        let Ok(dec) = self.decision(x) else { return };
        let phi: Vec<T> = match self.kind {
            Subproblem::Preferences(_) => match evaluate_open_set(self.inst, &dec) {
                Ok(r) => r.phi_per_customer,
                Err(_) => return,
            },
            Subproblem::PMedian => (0..self.inst.n_customers())
                .map(|i| dec.open().iter().map(|&j| self.inst.c(i, j)).fold(T::infinity(), T::min))
                .collect(),
        };
        for (i, p) in phi.into_iter().enumerate() {
            x[n_j + i] = p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn worked() -> Instance<f64> {
        // π row = [0.2, 0.5, 1.0] after normalization.
        Instance::build(vec![vec![10.0, 4.0, 7.0]], vec![vec![2.0, 5.0, 10.0]], 2).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn worked_example_duals_and_cut() {
        let inst = worked();
        let x = LeaderDecision::new(vec![0, 1], 3).unwrap();
        let d = analytic_duals(&inst, &x, 0).unwrap();
        assert!(close(d.v[0], 20.0) && d.v[1] == 0.0 && d.v[2] == 0.0);
        assert!(close(d.mu, 14.0));
        assert_eq!(d.lambda, vec![0.0, 0.0, 0.0]);
        let cut = cut_from_duals(&d, &inst, CutOrigin::Analytic);
        assert!(close(cut.constant, -6.0));
        assert!(close(cut.coeff[0], 16.0) && cut.coeff[1] == 0.0 && cut.coeff[2] == 0.0);
        assert!(close(cut.value(&[1.0, 1.0, 0.0]), 10.0));
    }

    #[test]
    fn cut_rejects_bad_input() {
        let inst = worked();
        let x = LeaderDecision::new(vec![0], 3).unwrap();
        assert!(analytic_duals(&inst, &x, 5).is_err());
        let wrong = LeaderDecision::new(vec![0], 4).unwrap();
        assert!(analytic_duals(&inst, &wrong, 0).is_err());
        assert!(LeaderDecision::new(vec![], 3).map_or(true, |e| analytic_duals(&inst, &e, 0).is_err()));
    }

    #[test]
    fn relative_violation_scales_by_w() {
        let cut = BendersCut { customer: 0, constant: 10.0, coeff: vec![0.0], origin: CutOrigin::Analytic };
        assert!(close(relative_violation(&cut, &[1.0], 0.0), 10.0));
        assert!(close(relative_violation(&cut, &[1.0], 5.0), 1.0));
        assert!(relative_violation(&cut, &[1.0], 10.0) <= 0.0);
    }

    #[test]
    fn pmedian_cut_is_tight_and_valid() {
        let inst = worked();
        let all = (0..3).combinations(2).map(|o| LeaderDecision::new(o, 3).unwrap()).collect::<Vec<_>>();
        for x in &all {
            let cut = pmedian_cut(&inst, x, 0).unwrap();
            let min_c = x.open().iter().map(|&j| inst.c(0, j)).fold(f64::INFINITY, f64::min);
            assert!(close(cut.value(&x.to_binary()), min_c));
            for y in &all {
                let min_y = y.open().iter().map(|&j| inst.c(0, j)).fold(f64::INFINITY, f64::min);
                assert!(cut.value(&y.to_binary()) <= min_y + 1e-9);
            }
        }
    }

    fn inst_strategy() -> impl Strategy<Value = (Instance<f64>, usize)> {
        (1usize..4, 2usize..6).prop_flat_map(|(ni, nj)| {
            (proptest::collection::vec(0.0f64..50.0, ni * nj), proptest::collection::vec(0.1f64..20.0, ni * nj), 1..=nj)
                .prop_filter_map("distinct preferences", move |(c, g, p)| {
                    Instance::from_flat(ni, nj, c, g, p).ok().map(|inst| (inst, p))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Analytic duals are dual feasible, tight at x̄, agree with both LP routes, and
        // the resulting cut underestimates Φ_i at every leader decision.
        #[test]
        fn analytic_cut_is_optimal_and_valid((inst, p) in inst_strategy()) {
            let nj = inst.n_facilities();
            let omega: Vec<LeaderDecision> =
                (0..nj).combinations(p).map(|o| LeaderDecision::new(o, nj).unwrap()).collect();
            let phis: Vec<Vec<f64>> =
                omega.iter().map(|x| evaluate_open_set(&inst, x).unwrap().phi_per_customer).collect();
            for (xi, x) in omega.iter().enumerate() {
                let xb = x.to_binary::<f64>();
                for i in 0..inst.n_customers() {
                    let d = analytic_duals(&inst, x, i).unwrap();
                    prop_assert!(d.max_infeasibility(&inst) <= 1e-9 * (1.0 + d.mu.abs()));
                    let phi = phis[xi][i];
                    prop_assert!(close(d.objective(&inst, &xb), phi));

                    let primal = solve_lp(&primal_subproblem_lp(&inst, &xb, i)).unwrap();
                    prop_assert_eq!(primal.status, LpStatus::Optimal);
                    prop_assert!((primal.objective - phi).abs() <= 1e-7 * (1.0 + phi));
                    let lp = lp_duals_oracle(&inst, x, i).unwrap();
                    prop_assert!((lp.objective(&inst, &xb) - phi).abs() <= 1e-7 * (1.0 + phi));

                    let cut = cut_from_duals(&d, &inst, CutOrigin::Analytic);
                    for (yi, y) in omega.iter().enumerate() {
                        let bound = cut.value(&y.to_binary());
                        prop_assert!(bound <= phis[yi][i] + 1e-7 * (1.0 + phis[yi][i]));
                    }
                }
            }
        }
    }
}
