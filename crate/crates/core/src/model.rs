//! Problem data: service costs, disutilities and their normalized form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Divides a disutility row by its maximum so that the largest entry is exactly 1.
pub fn normalize_row<T: Scalar>(g_row: &[T]) -> Result<Vec<T>> {
    if g_row.is_empty() {
        return Err(Error::InvalidArgument("cannot normalize an empty row".into()));
    }
    if let Some((j, _)) = g_row.iter().enumerate().find(|(_, &v)| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("entry {j} is not a positive finite number")));
    }
    let max = g_row.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(g_row.iter().map(|&v| v / max).collect())
}

/// One problem found by [`validate_parts`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    DuplicateDisutility { row: usize, first: usize, second: usize },
    NegativeCost { row: usize, col: usize, value: f64 },
    NonPositiveDisutility { row: usize, col: usize, value: f64 },
    NonFinite { matrix: char, row: usize, col: usize },
    POutOfRange { p: usize, n_facilities: usize },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateDisutility { row, first, second } => {
                write!(f, "row {row}: g duplicates at ({first},{second})")
            }
            Violation::NegativeCost { row, col, value } => {
                write!(f, "negative cost c[{row}][{col}] = {value}")
            }
            Violation::NonPositiveDisutility { row, col, value } => {
                write!(f, "nonpositive disutility g[{row}][{col}] = {value}")
            }
            Violation::NonFinite { matrix, row, col } => {
                write!(f, "non-finite entry {matrix}[{row}][{col}]")
            }
            Violation::POutOfRange { p, n_facilities } => {
                write!(f, "P = {p} outside [1, {n_facilities}]")
            }
            Violation::Empty => write!(f, "instance has no customers or no facilities"),
        }
    }
}

/// Checks row-major `c` and `g` of shape `n_customers × n_facilities`.
/// Reports every violation rather than stopping at the first one.
pub fn validate_parts<T: Scalar>(
    n_customers: usize,
    n_facilities: usize,
    c: &[T],
    g: &[T],
    p: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if n_customers == 0 || n_facilities == 0 {
        out.push(Violation::Empty);
    }
    if p == 0 || p > n_facilities {
        out.push(Violation::POutOfRange { p, n_facilities });
    }
    for i in 0..n_customers {
        let crow = &c[i * n_facilities..(i + 1) * n_facilities];
        let grow = &g[i * n_facilities..(i + 1) * n_facilities];
        for (j, (&cv, &gv)) in crow.iter().zip(grow).enumerate() {
            if !cv.is_finite() {
                out.push(Violation::NonFinite { matrix: 'c', row: i, col: j });
            } else if cv < T::zero() {
                out.push(Violation::NegativeCost { row: i, col: j, value: cv.as_f64() });
            }
            if !gv.is_finite() {
                out.push(Violation::NonFinite { matrix: 'g', row: i, col: j });
            } else if gv <= T::zero() {
                out.push(Violation::NonPositiveDisutility { row: i, col: j, value: gv.as_f64() });
            }
        }
        // Sorting keeps this O(J log J) per row; duplicates are reported once per equal pair
        // of neighbours in sorted order, lowest column first.
        let mut order: Vec<usize> = (0..n_facilities).collect();
        order.sort_by(|&a, &b| grow[a].partial_cmp(&grow[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        for w in order.windows(2) {
            if grow[w[0]] == grow[w[1]] {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                out.push(Violation::DuplicateDisutility { row: i, first, second });
            }
        }
    }
    out
}

/// Adds `j · ε` with `ε = 1e-9 · max_k g[i][k]` to every entry of a row-major
/// disutility matrix. Only meant to be applied on explicit user request.
pub fn break_ties<T: Scalar>(g: &mut [T], n_facilities: usize) {
    for row in g.chunks_mut(n_facilities) {
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let eps = T::lit(1e-9) * max;
        for (j, v) in row.iter_mut().enumerate() {
            *v += T::from_usize(j).unwrap() * eps;
        }
    }
}

/// A validated PUP instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T = f64> {
    n_customers: usize,
    n_facilities: usize,
    c: Vec<T>,
    g: Vec<T>,
    pi: Vec<T>,
    p: usize,
    pub customer_labels: Option<Vec<String>>,
    pub facility_labels: Option<Vec<String>>,
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance from nested rows (`c[i][j]`, `g[i][j]`).
    pub fn build(c: Vec<Vec<T>>, g: Vec<Vec<T>>, p: usize) -> Result<Self> {
        let n_customers = c.len();
        if g.len() != n_customers {
            return Err(Error::Shape(format!("c has {} rows but g has {}", n_customers, g.len())));
        }
        let n_facilities = c.first().map_or(0, Vec::len);
        for (i, (cr, gr)) in c.iter().zip(&g).enumerate() {
            if cr.len() != n_facilities || gr.len() != n_facilities {
                return Err(Error::Shape(format!(
                    "row {i} has lengths c={} g={}, expected {n_facilities}",
                    cr.len(),
                    gr.len()
                )));
            }
        }
        Self::from_flat(
            n_customers,
            n_facilities,
            c.into_iter().flatten().collect(),
            g.into_iter().flatten().collect(),
            p,
        )
    }

    /// Builds an instance from row-major flat matrices.
    pub fn from_flat(n_customers: usize, n_facilities: usize, c: Vec<T>, g: Vec<T>, p: usize) -> Result<Self> {
        let len = n_customers * n_facilities;
        if c.len() != len || g.len() != len {
            return Err(Error::Shape(format!(
                "expected {len} entries for {n_customers}x{n_facilities}, got c={} g={}",
                c.len(),
                g.len()
            )));
        }
        let violations = validate_parts(n_customers, n_facilities, &c, &g, p);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let mut pi = Vec::with_capacity(len);
        for row in g.chunks(n_facilities) {
            pi.extend(normalize_row(row)?);
        }
        Ok(Instance { n_customers, n_facilities, c, g, pi, p, customer_labels: None, facility_labels: None })
    }

    /// Same data with a different number of facilities to open.
    pub fn with_p(&self, p: usize) -> Result<Self> {
        if p == 0 || p > self.n_facilities {
            return Err(Error::InvalidInstance(vec![Violation::POutOfRange { p, n_facilities: self.n_facilities }]));
        }
        Ok(Instance { p, ..self.clone() })
    }

    /// Re-runs validation on the stored data. Empty for any instance built through
    /// the public constructors.
    pub fn validate(&self) -> Vec<Violation> {
        validate_parts(self.n_customers, self.n_facilities, &self.c, &self.g, self.p)
    }

    pub fn n_customers(&self) -> usize {
        self.n_customers
    }
    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }
    pub fn p(&self) -> usize {
        self.p
    }
    #[inline]
    pub fn c(&self, i: usize, j: usize) -> T {
        self.c[i * self.n_facilities + j]
    }
    #[inline]
    pub fn g(&self, i: usize, j: usize) -> T {
        self.g[i * self.n_facilities + j]
    }
    #[inline]
    pub fn pi(&self, i: usize, j: usize) -> T {
        self.pi[i * self.n_facilities + j]
    }
    pub fn c_row(&self, i: usize) -> &[T] {
        &self.c[i * self.n_facilities..(i + 1) * self.n_facilities]
    }
    pub fn g_row(&self, i: usize) -> &[T] {
        &self.g[i * self.n_facilities..(i + 1) * self.n_facilities]
    }
    pub fn pi_row(&self, i: usize) -> &[T] {
        &self.pi[i * self.n_facilities..(i + 1) * self.n_facilities]
    }
    /// Row-major service costs.
    pub fn c_flat(&self) -> &[T] {
        &self.c
    }
    /// Row-major disutilities.
    pub fn g_flat(&self) -> &[T] {
        &self.g
    }

    /// Number of leader decisions, `C(|J|, P)`, saturating at `u128::MAX`.
    pub fn n_leader_decisions(&self) -> u128 {
        binomial(self.n_facilities, self.p)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = match acc.checked_mul((n - t) as u128) {
            Some(v) => v / (t as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The set of open facilities chosen by the leader.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeaderDecision {
    open: Vec<usize>,
    n_facilities: usize,
}

impl LeaderDecision {
    /// Accepts any nonempty set of distinct indices below `n_facilities`.
    pub fn new(mut open: Vec<usize>, n_facilities: usize) -> Result<Self> {
        open.sort_unstable();
        open.dedup();
        if open.is_empty() {
            return Err(Error::InvalidArgument("open set is empty".into()));
        }
        if let Some(&j) = open.iter().find(|&&j| j >= n_facilities) {
            return Err(Error::InvalidArgument(format!("facility {j} out of range 0..{n_facilities}")));
        }
        Ok(LeaderDecision { open, n_facilities })
    }

    /// Like [`LeaderDecision::new`] but also requires exactly `p` open facilities.
    pub fn with_cardinality(open: Vec<usize>, n_facilities: usize, p: usize) -> Result<Self> {
        let d = Self::new(open, n_facilities)?;
        if d.open.len() != p {
            return Err(Error::InvalidArgument(format!("{} facilities open, expected P = {p}", d.open.len())));
        }
        Ok(d)
    }

    /// Rounds a (near-)binary vector: entries above one half are open.
    pub fn from_binary<T: Scalar>(x: &[T]) -> Result<Self> {
        let half = T::lit(0.5);
        Self::new(x.iter().enumerate().filter(|(_, &v)| v > half).map(|(j, _)| j).collect(), x.len())
    }

    pub fn open(&self) -> &[usize] {
        &self.open
    }
    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }
    pub fn len(&self) -> usize {
        self.open.len()
    }
    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }
    pub fn is_open(&self, j: usize) -> bool {
        self.open.binary_search(&j).is_ok()
    }
    pub fn to_binary<T: Scalar>(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n_facilities];
        for &j in &self.open {
            x[j] = T::one();
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_row(&[2.0, 7.0, 10.0]).unwrap(), vec![0.2, 0.7, 1.0]);
        assert_eq!(normalize_row(&[5.0]).unwrap(), vec![1.0]);
        assert_eq!(normalize_row(&[3.0, 4.0, 12.0]).unwrap(), vec![0.25, 4.0 / 12.0, 1.0]);
    }

    #[test]
    fn normalize_rejects_bad_rows() {
        assert!(normalize_row::<f64>(&[]).is_err());
        assert!(normalize_row(&[1.0, 0.0]).is_err());
        assert!(normalize_row(&[1.0, -3.0]).is_err());
    }

    #[test]
    fn normalize_is_idempotent_on_normalized_rows() {
        let r = normalize_row(&[0.3, 1.0, 0.9]).unwrap();
        assert_eq!(r, vec![0.3, 1.0, 0.9]);
    }

    #[test]
    fn build_examples() {
        let inst = Instance::build(vec![vec![5.0, 3.0]], vec![vec![2.0, 7.0]], 1).unwrap();
        assert_eq!(inst.pi_row(0), &[2.0 / 7.0, 1.0]);

        let inst = Instance::build(vec![vec![1.0, 1.0]; 2], vec![vec![1.0, 2.0], vec![2.0, 1.0]], 2).unwrap();
        assert!(inst.validate().is_empty());

        let err = Instance::build(vec![vec![1.0, 1.0]], vec![vec![3.0, 3.0]], 1).unwrap_err();
        match err {
            Error::InvalidInstance(v) => {
                assert_eq!(v, vec![Violation::DuplicateDisutility { row: 0, first: 0, second: 1 }])
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn build_shape_and_p_errors() {
        assert!(matches!(Instance::build(vec![vec![1.0]], vec![], 1), Err(Error::Shape(_))));
        assert!(matches!(Instance::build(vec![vec![1.0, 2.0]], vec![vec![1.0]], 1), Err(Error::Shape(_))));
        assert!(matches!(
            Instance::build(vec![vec![1.0, 2.0]], vec![vec![1.0, 2.0]], 3),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn validate_reports_everything() {
        let v = validate_parts(2, 3, &[1.0, -1.0, 0.0, 1.0, 1.0, 1.0], &[1.0, 1.0, 2.0, 1.0, 0.0, 3.0], 4);
        let text: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        assert!(text.contains(&"row 0: g duplicates at (0,1)".to_string()), "{text:?}");
        assert!(text.iter().any(|t| t.starts_with("negative cost")));
        assert!(text.iter().any(|t| t.starts_with("nonpositive disutility")));
        assert!(v.contains(&Violation::POutOfRange { p: 4, n_facilities: 3 }));
    }

    #[test]
    fn zero_costs_are_allowed() {
        assert!(Instance::build(vec![vec![0.0, 0.0]], vec![vec![1.0, 2.0]], 1).is_ok());
    }

    #[test]
    fn tie_breaking_makes_rows_distinct() {
        let mut g = vec![3.0, 3.0, 1.0, 3.0];
        break_ties(&mut g, 2);
        assert!(validate_parts(2, 2, &[0.0; 4], &g, 1).is_empty());
        assert_eq!(g[0], 3.0);
        assert_eq!(g[1], 3.0 + 3e-9);
    }

    #[test]
    fn leader_decision_checks() {
        assert!(LeaderDecision::new(vec![], 3).is_err());
        assert!(LeaderDecision::new(vec![3], 3).is_err());
        assert!(LeaderDecision::with_cardinality(vec![0, 1], 3, 1).is_err());
        let d = LeaderDecision::from_binary(&[0.0, 1.0, 0.9999999999]).unwrap();
        assert_eq!(d.open(), &[1, 2]);
        assert_eq!(d.to_binary::<f64>(), vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(100, 14), 44186942677323600);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalization_preserves_argmin(row in prop::collection::vec(0.01f64..1000.0, 1..12)) {
                let pi = normalize_row(&row).unwrap();
                let argmin = |v: &[f64]| v.iter().enumerate().min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0;
                prop_assert_eq!(argmin(&row), argmin(&pi));
                prop_assert_eq!(pi.iter().copied().fold(f64::MIN, f64::max), 1.0);
            }
        }
    }
}
