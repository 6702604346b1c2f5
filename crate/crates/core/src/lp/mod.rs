//! Dense bounded-variable simplex used for node relaxations and dual subproblems.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c·x
//! subject to  a_i·x  {≤, =, ≥}  b_i      for every row i
//!             l ≤ x ≤ u                   (infinite bounds allowed)
//! ```
//!
//! Internally every row receives a slack `s_i` with `a_i·x + s_i = b_i`, whose bounds
//! encode the relation. [`LpSolver`] keeps its basis between calls so that bound
//! changes and appended rows can be re-solved with the dual simplex.

mod simplex;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use simplex::{LpSolver, SolverStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Sparse linear row `Σ coeff·x  rel  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<T = f64> {
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Scalar> Row<T> {
    pub fn new(coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) -> Self {
        Row { coeffs, relation, rhs }
    }

    pub fn activity(&self, x: &[T]) -> T {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[T]) -> T {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(T::zero()),
            Relation::Ge => (self.rhs - lhs).max(T::zero()),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T = f64> {
    pub objective: Vec<T>,
    pub rows: Vec<Row<T>>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Default for LpProblem<T> {
    fn default() -> Self {
        LpProblem { objective: Vec::new(), rows: Vec::new(), lower: Vec::new(), upper: Vec::new() }
    }
}

impl<T: Scalar> LpProblem<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, cost: T, lower: T, upper: T) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) -> usize {
        self.rows.push(Row::new(coeffs, relation, rhs));
        self.rows.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Shape(format!(
                "{n} objective entries but {} lower / {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::InvalidArgument(format!(
                    "variable {j} has bounds [{}, {}]",
                    self.lower[j], self.upper[j]
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::InvalidArgument(format!("objective coefficient {j} is not finite")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidArgument(format!("row {i} has non-finite rhs")));
            }
            if let Some(&(j, a)) = row.coeffs.iter().find(|&&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} has bad entry ({j}, {a})")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let rows = self.rows.iter().map(|r| r.violation(x));
        let bounds = x.iter().enumerate().map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(T::zero()));
        rows.chain(bounds).fold(T::zero(), T::max)
    }

    /// Writes the problem in CPLEX LP text format. Variables flagged in `binaries`
    /// are listed in a `Binaries` section.
    pub fn to_lp_format(&self, name: &str, binaries: Option<&[bool]>) -> String {
        let mut out = String::new();
        let term = |out: &mut String, first: bool, a: T, j: usize| {
            let a = a.as_f64();
            if first {
                let _ = write!(out, " {a} x{j}");
            } else if a < 0.0 {
                let _ = write!(out, " - {} x{j}", -a);
            } else {
                let _ = write!(out, " + {a} x{j}");
            }
        };
        let _ = writeln!(out, "\\ {name}");
        let _ = writeln!(out, "Minimize");
        out.push_str(" obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != T::zero() {
                term(&mut out, first, c, j);
                first = false;
            }
        }
        if first {
            out.push_str(" 0 x0");
        }
        out.push('\n');
        let _ = writeln!(out, "Subject To");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{i}:");
            let mut first = true;
            for &(j, a) in &row.coeffs {
                term(&mut out, first, a, j);
                first = false;
            }
            if first {
                out.push_str(" 0 x0");
            }
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", row.rhs.as_f64());
        }
        let _ = writeln!(out, "Bounds");
        for j in 0..self.n_vars() {
            let (l, u) = (self.lower[j].as_f64(), self.upper[j].as_f64());
            match (l.is_finite(), u.is_finite()) {
                (false, false) => {
                    let _ = writeln!(out, " x{j} free");
                }
                (true, false) => {
                    let _ = writeln!(out, " x{j} >= {l}");
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= x{j} <= {u}");
                }
                (true, true) => {
                    let _ = writeln!(out, " {l} <= x{j} <= {u}");
                }
            }
        }
        if let Some(flags) = binaries {
            if flags.iter().any(|&b| b) {
                let _ = writeln!(out, "Binaries");
                for (j, _) in flags.iter().enumerate().filter(|(_, &b)| b) {
                    let _ = writeln!(out, " x{j}");
                }
            }
        }
        let _ = writeln!(out, "End");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap hit before a conclusion; not a statement about feasibility.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T = f64> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    /// `∂objective/∂rhs` per row. Nonpositive on `≤` rows, nonnegative on `≥` rows.
    pub duals: Vec<T>,
    /// Reduced cost of every structural variable (zero when basic).
    pub reduced_costs: Vec<T>,
    pub iterations: usize,
}

/// Solves `p` from a slack basis.
pub fn solve_lp<T: Scalar>(p: &LpProblem<T>) -> Result<LpSolution<T>> {
    let mut solver = LpSolver::new(p)?;
    solver.solve();
    Ok(solver.solution())
}
