use log::{debug, warn};

use super::{LpProblem, LpSolution, LpStatus, Relation, Row};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Consecutive degenerate pivots before pricing switches to Bland's rule.
const STALL_THRESHOLD: usize = 50;
/// Pivots between two refactorizations of the tableau.
const REFACTOR_EVERY: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub primal_pivots: usize,
    pub dual_pivots: usize,
    pub bound_flips: usize,
    pub refactorizations: usize,
}

/// Reusable simplex solver over a compact tableau.
///
/// Variables `0..n` are structural, `n + i` is the slack of row `i`. Each row of the
/// tableau expresses one basic variable through the nonbasic ones:
/// `x_B[r] = beta[r] - Σ_k tab[r][k] · x_N[k]`. Only nonbasic columns are stored, so the
/// tableau is `m × n` no matter how many rows are appended.
#[derive(Debug, Clone)]
pub struct LpSolver<T> {
    n: usize,
    rows: Vec<Row<T>>,
    cost: Vec<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    slot: Vec<Slot>,
    tab: Vec<T>,
    beta: Vec<T>,
    d: Vec<T>,
    x: Vec<T>,
    scratch: Vec<T>,
    ftol: T,
    dtol: T,
    ptol: T,
    since_refactor: usize,
    iterations: usize,
    max_iter: usize,
    status: LpStatus,
    pub stats: SolverStats,
}

fn slack_bounds<T: Scalar>(rel: Relation) -> (T, T) {
    match rel {
        Relation::Le => (T::zero(), T::infinity()),
        Relation::Ge => (T::neg_infinity(), T::zero()),
        Relation::Eq => (T::zero(), T::zero()),
    }
}

impl<T: Scalar> LpSolver<T> {
    pub fn new(p: &LpProblem<T>) -> Result<Self> {
        p.check()?;
        let n = p.n_vars();
        let mut s = LpSolver {
            n,
            rows: Vec::new(),
            cost: p.objective.clone(),
            lo: p.lower.clone(),
            hi: p.upper.clone(),
            basic: Vec::new(),
            nonbasic: (0..n).collect(),
            slot: (0..n).map(Slot::Nonbasic).collect(),
            tab: Vec::new(),
            beta: Vec::new(),
            d: p.objective.clone(),
            x: vec![T::zero(); n],
            scratch: vec![T::zero(); n],
            ftol: T::base_tol(),
            dtol: T::base_tol(),
            ptol: T::base_tol(),
            since_refactor: 0,
            iterations: 0,
            max_iter: 0,
            status: LpStatus::IterationLimit,
            stats: SolverStats::default(),
        };
        for j in 0..n {
            s.x[j] = s.resting_value(j);
        }
        for row in &p.rows {
            s.add_row(row.clone())?;
        }
        Ok(s)
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn bounds(&self, j: usize) -> (T, T) {
        (self.lo[j], self.hi[j])
    }

    pub fn set_bounds(&mut self, j: usize, lo: T, hi: T) {
        assert!(j < self.n, "bounds can only be set on structural variables");
        self.lo[j] = lo;
        self.hi[j] = hi;
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[inline]
    fn cost_of(&self, v: usize) -> T {
        if v < self.n {
            self.cost[v]
        } else {
            T::zero()
        }
    }

    fn resting_value(&self, v: usize) -> T {
        let (l, u) = (self.lo[v], self.hi[v]);
        if l.is_finite() {
            l
        } else if u.is_finite() {
            u
        } else {
            T::zero()
        }
    }

    /// Appends a row; its slack enters the basis.
    pub fn add_row(&mut self, row: Row<T>) -> Result<usize> {
        let n = self.n;
        if !row.rhs.is_finite() {
            return Err(Error::InvalidArgument("row rhs must be finite".into()));
        }
        if let Some(&(j, a)) = row.coeffs.iter().find(|&&(j, a)| j >= n || !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad row entry ({j}, {a})")));
        }
        let mut trow = vec![T::zero(); n];
        let mut b = row.rhs;
        for &(j, a) in &row.coeffs {
            match self.slot[j] {
                Slot::Nonbasic(k) => trow[k] += a,
                Slot::Basic(r) => {
                    b -= a * self.beta[r];
                    let src = &self.tab[r * n..(r + 1) * n];
                    for (t, &v) in trow.iter_mut().zip(src) {
                        *t -= a * v;
                    }
                }
            }
        }
        let (l, u) = slack_bounds::<T>(row.relation);
        let i = self.rows.len();
        let v = n + i;
        self.rows.push(row);
        self.lo.push(l);
        self.hi.push(u);
        self.tab.extend(trow);
        self.beta.push(b);
        self.basic.push(v);
        self.slot.push(Slot::Basic(i));
        self.x.push(T::zero());
        self.x[v] = self.basic_value(i);
        Ok(i)
    }

    fn basic_value(&self, r: usize) -> T {
        let n = self.n;
        let row = &self.tab[r * n..(r + 1) * n];
        let mut v = self.beta[r];
        for (k, &t) in row.iter().enumerate() {
            if t != T::zero() {
                let xv = self.x[self.nonbasic[k]];
                if xv != T::zero() {
                    v -= t * xv;
                }
            }
        }
        v
    }

    fn recompute_basics(&mut self) {
        for r in 0..self.basic.len() {
            let v = self.basic_value(r);
            self.x[self.basic[r]] = v;
        }
    }

    fn recompute_duals(&mut self) {
        let n = self.n;
        let mut d: Vec<T> = self.nonbasic.iter().map(|&v| self.cost_of(v)).collect();
        for r in 0..self.basic.len() {
            let cb = self.cost_of(self.basic[r]);
            if cb != T::zero() {
                for (dk, &t) in d.iter_mut().zip(&self.tab[r * n..(r + 1) * n]) {
                    *dk -= cb * t;
                }
            }
        }
        self.d = d;
    }

    /// Drops every structural variable out of the basis.
    pub fn reset_basis(&mut self) {
        let n = self.n;
        let m = self.rows.len();
        self.nonbasic = (0..n).collect();
        self.basic = (n..n + m).collect();
        self.slot = (0..n).map(Slot::Nonbasic).chain((0..m).map(Slot::Basic)).collect();
        self.tab = vec![T::zero(); m * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                self.tab[i * n + j] += a;
            }
        }
        self.beta = self.rows.iter().map(|r| r.rhs).collect();
        self.d = self.cost.clone();
        for j in 0..n {
            self.x[j] = self.resting_value(j);
        }
        self.recompute_basics();
        self.since_refactor = 0;
    }

    /// Rebuilds tableau, `beta` and reduced costs from the original rows for the current
    /// basis. Only the structural part of the basis needs a dense factorization.
    fn refactor(&mut self) -> bool {
        self.stats.refactorizations += 1;
        let n = self.n;
        let m = self.rows.len();
        // structural basics and their positions
        let sb: Vec<(usize, usize)> =
            self.basic.iter().enumerate().filter(|(_, &v)| v < n).map(|(r, &v)| (v, r)).collect();
        // rows whose slack is nonbasic
        let rr: Vec<usize> = self.nonbasic.iter().filter(|&&v| v >= n).map(|&v| v - n).collect();
        let k = sb.len();
        if rr.len() != k {
            return false;
        }
        let mut col_of = vec![usize::MAX; n];
        for (b, &(v, _)) in sb.iter().enumerate() {
            col_of[v] = b;
        }
        let mut kmat = vec![T::zero(); k * k];
        for (a, &i) in rr.iter().enumerate() {
            for &(j, coef) in &self.rows[i].coeffs {
                if col_of[j] != usize::MAX {
                    kmat[a * k + col_of[j]] += coef;
                }
            }
        }
        let Some(kinv) = invert(kmat, k) else {
            return false;
        };

        // B z = v  ->  z_S = K^-1 v_R ; z_slack(q) = v_q - A[q,S] z_S
        let solve = |v: &dyn Fn(usize) -> T, out: &mut Vec<T>| {
            let vr: Vec<T> = rr.iter().map(|&i| v(i)).collect();
            let mut zs = vec![T::zero(); k];
            for (a, z) in zs.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (b, &vb) in vr.iter().enumerate() {
                    if vb != T::zero() {
                        acc += kinv[a * k + b] * vb;
                    }
                }
                *z = acc;
            }
            out.iter_mut().for_each(|o| *o = T::zero());
            for (b, &(_, pos)) in sb.iter().enumerate() {
                out[pos] = zs[b];
            }
            for (pos, &bv) in self.basic.iter().enumerate() {
                if bv >= n {
                    let q = bv - n;
                    let mut acc = v(q);
                    for &(j, coef) in &self.rows[q].coeffs {
                        let b = col_of[j];
                        if b != usize::MAX {
                            acc -= coef * zs[b];
                        }
                    }
                    out[pos] = acc;
                }
            }
        };

        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, coef) in &row.coeffs {
                cols[j].push((i, coef));
            }
        }
        let mut tab = vec![T::zero(); m * n];
        let mut z = vec![T::zero(); m];
        let mut colbuf = vec![T::zero(); m];
        for (kk, &v) in self.nonbasic.iter().enumerate() {
            if v < n {
                colbuf.iter_mut().for_each(|c| *c = T::zero());
                for &(i, coef) in &cols[v] {
                    colbuf[i] += coef;
                }
                solve(&|i| colbuf[i], &mut z);
            } else {
                let q = v - n;
                solve(&|i| if i == q { T::one() } else { T::zero() }, &mut z);
            }
            for r in 0..m {
                tab[r * n + kk] = z[r];
            }
        }
        let mut beta = vec![T::zero(); m];
        solve(&|i| self.rows[i].rhs, &mut beta);
        self.tab = tab;
        self.beta = beta;
        self.recompute_duals();
        self.recompute_basics();
        self.since_refactor = 0;
        true
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let n = self.n;
        let m = self.basic.len();
        let p = self.tab[r * n + k];
        let inv = T::one() / p;
        let tiny = T::epsilon() * T::lit(64.0);
        {
            let row = &mut self.tab[r * n..(r + 1) * n];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[k] = inv;
            self.scratch.copy_from_slice(row);
        }
        self.beta[r] *= inv;
        let br = self.beta[r];
        let prow = &self.scratch;
        let nz: Vec<usize> = (0..n).filter(|&j| prow[j] != T::zero() && j != k).collect();
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = self.tab[i * n + k];
            if f == T::zero() {
                continue;
            }
            let row = &mut self.tab[i * n..(i + 1) * n];
            for &j in &nz {
                let v = row[j] - f * prow[j];
                row[j] = if v.abs() < tiny { T::zero() } else { v };
            }
            row[k] = -f * inv;
            self.beta[i] -= f * br;
        }
        let f = self.d[k];
        if f != T::zero() {
            for &j in &nz {
                self.d[j] -= f * prow[j];
            }
            self.d[k] = -f * inv;
        }
        let entering = self.nonbasic[k];
        let leaving = self.basic[r];
        self.basic[r] = entering;
        self.nonbasic[k] = leaving;
        self.slot[entering] = Slot::Basic(r);
        self.slot[leaving] = Slot::Nonbasic(k);
        self.since_refactor += 1;
        self.iterations += 1;
    }

    /// Moves nonbasic variable at column `k` by `delta` and updates the basics.
    fn shift_nonbasic(&mut self, k: usize, delta: T) {
        let n = self.n;
        let v = self.nonbasic[k];
        self.x[v] += delta;
        for r in 0..self.basic.len() {
            let t = self.tab[r * n + k];
            if t != T::zero() {
                self.x[self.basic[r]] -= t * delta;
            }
        }
    }

    fn infeasibility(&self, v: usize) -> T {
        let xv = self.x[v];
        (self.lo[v] - xv).max(xv - self.hi[v]).max(T::zero())
    }

    fn primal_infeasible(&self) -> bool {
        self.basic.iter().any(|&v| self.infeasibility(v) > self.ftol)
    }

    fn place_nonbasics(&mut self) {
        for k in 0..self.n {
            let v = self.nonbasic[k];
            let (l, u) = (self.lo[v], self.hi[v]);
            self.x[v] = if l.is_finite() && u.is_finite() {
                if self.d[k] >= T::zero() {
                    l
                } else {
                    u
                }
            } else {
                self.resting_value(v)
            };
        }
    }

    fn dual_feasible(&self) -> bool {
        (0..self.n).all(|k| {
            let v = self.nonbasic[k];
            let (l, u, xv, dk) = (self.lo[v], self.hi[v], self.x[v], self.d[k]);
            if l == u {
                true
            } else if l.is_finite() && xv == l {
                dk >= -self.dtol
            } else if u.is_finite() && xv == u {
                dk <= self.dtol
            } else {
                dk.abs() <= self.dtol
            }
        })
    }

    fn can_increase(&self, v: usize) -> bool {
        self.x[v] < self.hi[v]
    }

    fn can_decrease(&self, v: usize) -> bool {
        self.x[v] > self.lo[v]
    }

    /// Primal simplex from the current basis; runs a composite phase 1 while any basic
    /// variable is out of bounds.
    fn primal(&mut self) -> LpStatus {
        let n = self.n;
        let mut degenerate = 0usize;
        let mut price = vec![T::zero(); n];
        loop {
            if self.iterations >= self.max_iter {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                warn!("refactorization failed; restarting from slack basis");
                self.reset_basis();
            }
            let bland = degenerate > STALL_THRESHOLD;
            let m = self.basic.len();
            // classify basics: -1 below, +1 above, 0 feasible
            let state: Vec<i8> = (0..m)
                .map(|r| {
                    let v = self.basic[r];
                    if self.x[v] < self.lo[v] - self.ftol {
                        -1
                    } else if self.x[v] > self.hi[v] + self.ftol {
                        1
                    } else {
                        0
                    }
                })
                .collect();
            let phase1 = state.iter().any(|&s| s != 0);
            if phase1 {
                price.iter_mut().for_each(|p| *p = T::zero());
                for r in 0..m {
                    if state[r] == 0 {
                        continue;
                    }
                    let row = &self.tab[r * n..(r + 1) * n];
                    if state[r] < 0 {
                        for (p, &t) in price.iter_mut().zip(row) {
                            *p += t;
                        }
                    } else {
                        for (p, &t) in price.iter_mut().zip(row) {
                            *p -= t;
                        }
                    }
                }
            } else {
                price.copy_from_slice(&self.d);
            }

            // pricing
            let mut enter: Option<(usize, T)> = None;
            let mut best = T::zero();
            for k in 0..n {
                let v = self.nonbasic[k];
                if self.lo[v] == self.hi[v] {
                    continue;
                }
                let dk = price[k];
                let ok = (dk < -self.dtol && self.can_increase(v)) || (dk > self.dtol && self.can_decrease(v));
                if !ok {
                    continue;
                }
                if bland {
                    if enter.is_none_or(|(kk, _)| v < self.nonbasic[kk]) {
                        enter = Some((k, dk));
                    }
                } else if dk.abs() > best {
                    best = dk.abs();
                    enter = Some((k, dk));
                }
            }
            let Some((k, dk)) = enter else {
                return if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal };
            };
            let dir = if dk < T::zero() { T::one() } else { -T::one() };
            let q = self.nonbasic[k];

            // Harris two-pass ratio test
            let flip = self.hi[q] - self.lo[q];
            let mut theta_max = T::infinity();
            let mut cands: Vec<(usize, T, T, bool)> = Vec::new(); // (row, ratio, |alpha|, to_upper)
            for r in 0..m {
                let alpha = -self.tab[r * n + k] * dir;
                if alpha.abs() <= self.ptol {
                    continue;
                }
                let v = self.basic[r];
                let xv = self.x[v];
                let (l, u) = (self.lo[v], self.hi[v]);
                let (gap, to_upper) = match (state[r], alpha > T::zero()) {
                    (0, true) if u.is_finite() => (u - xv, true),
                    (0, false) if l.is_finite() => (xv - l, false),
                    (-1, true) => (l - xv, false),
                    (1, false) => (xv - u, true),
                    _ => continue,
                };
                let a = alpha.abs();
                let ratio = gap.max(T::zero()) / a;
                let relaxed = (gap + self.ftol).max(T::zero()) / a;
                theta_max = theta_max.min(relaxed);
                cands.push((r, ratio, a, to_upper));
            }
            if flip.is_finite() && flip <= theta_max {
                self.shift_nonbasic(k, dir * flip);
                self.stats.bound_flips += 1;
                self.iterations += 1;
                degenerate = 0;
                continue;
            }
            let mut choice: Option<(usize, T, T, bool)> = None;
            for &c in cands.iter().filter(|c| c.1 <= theta_max) {
                choice = match choice {
                    None => Some(c),
                    Some(b) => {
                        let better = if bland { self.basic[c.0] < self.basic[b.0] } else { c.2 > b.2 };
                        if better {
                            Some(c)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some((r, ratio, _, to_upper)) = choice else {
                if phase1 {
                    warn!("phase 1 found no blocking row; numerical trouble");
                    return LpStatus::IterationLimit;
                }
                return LpStatus::Unbounded;
            };
            if ratio <= self.ftol {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.shift_nonbasic(k, dir * ratio);
            let leaving = self.basic[r];
            self.x[leaving] = if to_upper { self.hi[leaving] } else { self.lo[leaving] };
            self.pivot(r, k);
            self.stats.primal_pivots += 1;
        }
    }

    /// Dual simplex from a dual feasible basis.
    fn dual(&mut self) -> LpStatus {
        let n = self.n;
        let cap = self.iterations + 20 * (self.n + self.basic.len()) + 1000;
        loop {
            if self.iterations >= self.max_iter.min(cap) {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return LpStatus::IterationLimit;
            }
            // leaving row: largest bound violation
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.basic.len() {
                let inf = self.infeasibility(self.basic[r]);
                if inf > self.ftol && leave.is_none_or(|(_, b)| inf > b) {
                    leave = Some((r, inf));
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Optimal;
            };
            let lv = self.basic[r];
            let below = self.x[lv] < self.lo[lv];
            let target = if below { self.lo[lv] } else { self.hi[lv] };

            let row = &self.tab[r * n..(r + 1) * n];
            let mut theta_max = T::infinity();
            let mut cands: Vec<(usize, T, T)> = Vec::new();
            for k in 0..n {
                let v = self.nonbasic[k];
                if self.lo[v] == self.hi[v] {
                    continue;
                }
                let alpha = row[k];
                if alpha.abs() <= self.ptol {
                    continue;
                }
                // x_r moves by -alpha * dx_k; pick the direction of dx_k that helps
                let up = if below { alpha < T::zero() } else { alpha > T::zero() };
                let dk = self.d[k];
                let slack = if up {
                    if !self.can_increase(v) {
                        continue;
                    }
                    dk
                } else {
                    if !self.can_decrease(v) {
                        continue;
                    }
                    -dk
                };
                let a = alpha.abs();
                let ratio = slack.max(T::zero()) / a;
                theta_max = theta_max.min((slack + self.dtol).max(T::zero()) / a);
                cands.push((k, ratio, a));
            }
            let mut choice: Option<(usize, T, T)> = None;
            for &c in cands.iter().filter(|c| c.1 <= theta_max) {
                if choice.is_none_or(|b| c.2 > b.2) {
                    choice = Some(c);
                }
            }
            let Some((k, _, _)) = choice else {
                return LpStatus::Infeasible;
            };
            let delta = (self.x[lv] - target) / self.tab[r * n + k];
            self.shift_nonbasic(k, delta);
            self.x[lv] = target;
            self.pivot(r, k);
            self.stats.dual_pivots += 1;
        }
    }

    fn residual_ok(&self) -> bool {
        let n = self.n;
        self.rows.iter().enumerate().all(|(i, row)| {
            let lhs = row.activity(&self.x[..n]) + self.x[n + i];
            (lhs - row.rhs).abs() <= T::lit(1e-6) * (T::one() + row.rhs.abs())
        })
    }

    /// Solves from the current basis (warm start) and returns the status.
    pub fn solve(&mut self) -> LpStatus {
        self.max_iter = self.iterations + 50_000 + 50 * (self.n + self.rows.len());
        let mut status = LpStatus::IterationLimit;
        for attempt in 0..3 {
            if attempt > 0 {
                debug!("re-solving after refactorization (attempt {attempt})");
                if !self.refactor() {
                    self.reset_basis();
                }
            }
            self.place_nonbasics();
            self.recompute_basics();
            status = if self.dual_feasible() && self.primal_infeasible() {
                match self.dual() {
                    LpStatus::Optimal | LpStatus::IterationLimit => self.primal(),
                    // confirm with phase 1 before trusting it
                    LpStatus::Infeasible => self.primal(),
                    s => s,
                }
            } else {
                self.primal()
            };
            if status == LpStatus::Optimal {
                self.recompute_basics();
                if !self.primal_infeasible_loose() && self.residual_ok() {
                    break;
                }
                continue;
            }
            if status != LpStatus::IterationLimit {
                break;
            }
            if self.iterations >= self.max_iter {
                break;
            }
        }
        self.status = status;
        status
    }

    fn primal_infeasible_loose(&self) -> bool {
        self.basic.iter().any(|&v| self.infeasibility(v) > self.ftol * T::lit(100.0))
    }

    pub fn status(&self) -> LpStatus {
        self.status
    }

    /// Structural part of the current point.
    pub fn x(&self) -> &[T] {
        &self.x[..self.n]
    }

    pub fn objective(&self) -> T {
        self.cost.iter().zip(&self.x).map(|(&c, &v)| c * v).sum()
    }

    pub fn solution(&self) -> LpSolution<T> {
        let n = self.n;
        let m = self.rows.len();
        let mut duals = vec![T::zero(); m];
        let mut reduced = vec![T::zero(); n];
        for (k, &v) in self.nonbasic.iter().enumerate() {
            if v >= n {
                duals[v - n] = -self.d[k];
            } else {
                reduced[v] = self.d[k];
            }
        }
        let x: Vec<T> = self.x[..n]
            .iter()
            .enumerate()
            .map(|(j, &v)| if self.status == LpStatus::Optimal { v.max(self.lo[j]).min(self.hi[j]) } else { v })
            .collect();
        LpSolution {
            status: self.status,
            objective: self.cost.iter().zip(&x).map(|(&c, &v)| c * v).sum(),
            x,
            duals,
            reduced_costs: reduced,
            iterations: self.iterations,
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert<T: Scalar>(mut a: Vec<T>, k: usize) -> Option<Vec<T>> {
    let mut inv = vec![T::zero(); k * k];
    for i in 0..k {
        inv[i * k + i] = T::one();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x * k + col].abs().partial_cmp(&a[y * k + col].abs()).unwrap())?;
        if a[piv * k + col].abs() <= T::epsilon() * T::lit(1e3) {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let p = T::one() / a[col * k + col];
        for j in 0..k {
            a[col * k + j] *= p;
            inv[col * k + j] *= p;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f == T::zero() {
                continue;
            }
            for j in 0..k {
                let av = a[col * k + j];
                let iv = inv[col * k + j];
                a[r * k + j] -= f * av;
                inv[r * k + j] -= f * iv;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refactorization_reproduces_updated_tableau() {
        let mut p = LpProblem::new();
        for j in 0..6 {
            p.add_var(-((j % 3) as f64) - 1.0, 0.0, 4.0);
        }
        let free = p.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..8 {
            let coeffs = (0..6).map(|j| (j, ((i * 7 + j * 3) % 5) as f64 - 1.0)).chain([(free, 1.0)]).collect();
            p.add_row(coeffs, if i % 2 == 0 { Relation::Le } else { Relation::Ge }, (i as f64) - 2.0);
        }
        let mut s = LpSolver::new(&p).unwrap();
        s.solve();
        let (tab, beta, d) = (s.tab.clone(), s.beta.clone(), s.d.clone());
        assert!(s.refactor());
        for (a, b) in tab.iter().zip(&s.tab).chain(beta.iter().zip(&s.beta)).chain(d.iter().zip(&s.d)) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn inverse_of_small_matrix() {
        let inv = invert(vec![2.0f64, 1.0, 1.0, 3.0], 2).unwrap();
        let expect = [0.6, -0.2, -0.2, 0.4];
        for (a, b) in inv.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(invert(vec![1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
