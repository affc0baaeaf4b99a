//! Dense revised simplex over any [`Scalar`].
//!
//! Two phases with artificial variables, Dantzig pricing and a switch to
//! Bland's rule after a run of degenerate pivots. The basis inverse is kept
//! explicitly and refactorized periodically for floating point scalars.
//! With `Rational` the result is an exact vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// `Σ coeffs[k].1 · x[coeffs[k].0]` compared against `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub rhs: T,
}

/// `min cᵀx  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x_j >= l_j` where a
/// missing lower bound means the variable is free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub equalities: Vec<LinearConstraint<T>>,
    pub inequalities: Vec<LinearConstraint<T>>,
    pub lower_bounds: Vec<Option<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// `num_vars` nonnegative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![T::zero(); num_vars],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower_bounds: vec![Some(T::zero()); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_equality(&mut self, coeffs: Vec<(usize, T)>, rhs: T) -> usize {
        self.equalities.push(LinearConstraint { coeffs, rhs });
        self.equalities.len() - 1
    }

    pub fn add_less_equal(&mut self, coeffs: Vec<(usize, T)>, rhs: T) -> usize {
        self.inequalities.push(LinearConstraint { coeffs, rhs });
        self.inequalities.len() - 1
    }

    /// Stored as the negated `<=` row.
    pub fn add_greater_equal(&mut self, coeffs: Vec<(usize, T)>, rhs: T) -> usize {
        let coeffs = coeffs.into_iter().map(|(j, a)| (j, -a)).collect();
        self.add_less_equal(coeffs, -rhs)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.lower_bounds.len(),
            });
        }
        for (kind, rows) in [("equality", &self.equalities), ("inequality", &self.inequalities)] {
            for (i, row) in rows.iter().enumerate() {
                if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                    return Err(Error::InvalidInput(format!(
                        "{kind} row {i} references column {j} of {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn row_dot(row: &LinearConstraint<T>, x: &[T]) -> T {
        row.coeffs
            .iter()
            .fold(T::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// Largest violation of any equality, inequality or bound at `x`.
    pub fn primal_residual(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.equalities {
            worst = T::max_of(worst, (Self::row_dot(row, x) - row.rhs.clone()).abs());
        }
        for row in &self.inequalities {
            worst = T::max_of(worst, Self::row_dot(row, x) - row.rhs.clone());
        }
        for (l, v) in self.lower_bounds.iter().zip(x) {
            if let Some(l) = l {
                worst = T::max_of(worst, l.clone() - v.clone());
            }
        }
        worst
    }

    /// `c - A_eqᵀ y_eq - A_ubᵀ y_ub`.
    pub fn reduced_costs(&self, eq_duals: &[T], ub_duals: &[T]) -> Vec<T> {
        let mut r = self.objective.clone();
        for (row, y) in self.equalities.iter().zip(eq_duals) {
            for (j, a) in &row.coeffs {
                r[*j] = r[*j].clone() - a.clone() * y.clone();
            }
        }
        for (row, y) in self.inequalities.iter().zip(ub_duals) {
            for (j, a) in &row.coeffs {
                r[*j] = r[*j].clone() - a.clone() * y.clone();
            }
        }
        r
    }

    /// `b_eqᵀ y_eq + b_ubᵀ y_ub + Σ l_j r_j`.
    pub fn dual_objective(&self, eq_duals: &[T], ub_duals: &[T]) -> T {
        let r = self.reduced_costs(eq_duals, ub_duals);
        let mut v = T::zero();
        for (row, y) in self.equalities.iter().zip(eq_duals) {
            v = v + row.rhs.clone() * y.clone();
        }
        for (row, y) in self.inequalities.iter().zip(ub_duals) {
            v = v + row.rhs.clone() * y.clone();
        }
        for (l, rj) in self.lower_bounds.iter().zip(&r) {
            if let Some(l) = l {
                v = v + l.clone() * rj.clone();
            }
        }
        v
    }

    /// Largest violation of dual feasibility: `y_ub <= 0`, `r_j >= 0` for
    /// bounded variables, `r_j = 0` for free ones.
    pub fn dual_residual(&self, eq_duals: &[T], ub_duals: &[T]) -> T {
        let r = self.reduced_costs(eq_duals, ub_duals);
        let mut worst = T::zero();
        for y in ub_duals {
            worst = T::max_of(worst, y.clone());
        }
        for (l, rj) in self.lower_bounds.iter().zip(&r) {
            let v = if l.is_some() { -rj.clone() } else { rj.abs() };
            worst = T::max_of(worst, v);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

/// Proof of a non-optimal status.
#[derive(Debug, Clone, PartialEq)]
pub enum LpCertificate<T> {
    /// Multipliers with `A_ubᵀ`-part `<= 0`, `Aᵀy <= 0` on bounded columns,
    /// `= 0` on free ones, and `yᵀ(b - A l) > 0`.
    Farkas { eq: Vec<T>, ub: Vec<T> },
    /// Direction `d` with `A_eq d = 0`, `A_ub d <= 0`, `d_j >= 0` on bounded
    /// columns and `cᵀd < 0`.
    Ray { direction: Vec<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResiduals<T> {
    pub primal: T,
    pub dual: T,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub eq_duals: Vec<T>,
    pub ub_duals: Vec<T>,
    pub objective: T,
    pub dual_objective: T,
    pub residuals: LpResiduals<T>,
    pub certificate: Option<LpCertificate<T>>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct LpOptions<T> {
    /// Feasibility and optimality tolerance.
    pub tol: T,
    pub max_iterations: Option<usize>,
}

impl<T: Scalar> Default for LpOptions<T> {
    fn default() -> Self {
        LpOptions {
            tol: T::default_tolerance(),
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    /// Original variable `j`, shifted by its lower bound.
    Shifted(usize),
    FreePlus(usize),
    FreeMinus(usize),
    Slack,
    Artificial,
}

const REFACTOR_EVERY: usize = 50;
const DEGENERATE_RUN: usize = 30;
/// Relative size of the bound perturbation used against stalling.
const PERTURBATION: f64 = 1e-6;

struct StandardForm<T> {
    m: usize,
    columns: Vec<Vec<(usize, T)>>,
    kinds: Vec<ColumnKind>,
    cost: Vec<T>,
    rhs: Vec<T>,
    /// `-1` when the row was negated to make its right hand side nonnegative.
    row_sign: Vec<bool>,
}

impl<T: Scalar> StandardForm<T> {
    fn build(lp: &LinearProgram<T>) -> (Self, Vec<usize>) {
        let m_eq = lp.equalities.len();
        let m = m_eq + lp.inequalities.len();
        let rows: Vec<&LinearConstraint<T>> = lp.equalities.iter().chain(&lp.inequalities).collect();

        let mut rhs: Vec<T> = rows
            .iter()
            .map(|row| {
                row.coeffs.iter().fold(row.rhs.clone(), |acc, (j, a)| match &lp.lower_bounds[*j] {
                    Some(l) => acc - a.clone() * l.clone(),
                    None => acc,
                })
            })
            .collect();
        let row_sign: Vec<bool> = rhs.iter().map(|b| b.is_negative()).collect();
        for (b, &neg) in rhs.iter_mut().zip(&row_sign) {
            if neg {
                *b = -b.clone();
            }
        }

        let n = lp.num_vars();
        let mut var_cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for (j, a) in &row.coeffs {
                if a.is_zero() {
                    continue;
                }
                let a = if row_sign[i] { -a.clone() } else { a.clone() };
                var_cols[*j].push((i, a));
            }
        }

        let mut columns = Vec::new();
        let mut kinds = Vec::new();
        let mut cost = Vec::new();
        for (j, col) in var_cols.into_iter().enumerate() {
            match lp.lower_bounds[j] {
                Some(_) => {
                    columns.push(col);
                    kinds.push(ColumnKind::Shifted(j));
                    cost.push(lp.objective[j].clone());
                }
                None => {
                    let neg: Vec<(usize, T)> = col.iter().map(|(i, a)| (*i, -a.clone())).collect();
                    columns.push(col);
                    kinds.push(ColumnKind::FreePlus(j));
                    cost.push(lp.objective[j].clone());
                    columns.push(neg);
                    kinds.push(ColumnKind::FreeMinus(j));
                    cost.push(-lp.objective[j].clone());
                }
            }
        }

        let mut basis = vec![usize::MAX; m];
        for i in m_eq..m {
            let s = if row_sign[i] { -T::one() } else { T::one() };
            columns.push(vec![(i, s)]);
            kinds.push(ColumnKind::Slack);
            cost.push(T::zero());
            if !row_sign[i] {
                basis[i] = columns.len() - 1;
            }
        }
        for (i, b) in basis.iter_mut().enumerate() {
            if *b == usize::MAX {
                columns.push(vec![(i, T::one())]);
                kinds.push(ColumnKind::Artificial);
                cost.push(T::zero());
                *b = columns.len() - 1;
            }
        }

        (
            StandardForm {
                m,
                columns,
                kinds,
                cost,
                rhs,
                row_sign,
            },
            basis,
        )
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded(usize),
    IterationLimit,
}

struct Simplex<'a, T> {
    sf: &'a StandardForm<T>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<T>,
    xb: Vec<T>,
    /// Right-hand side the basis is solved against; differs from the
    /// problem's while a perturbation is active.
    rhs: Vec<T>,
    tol: T,
    pivot_tol: T,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
}

impl<'a, T: Scalar> Simplex<'a, T> {
    fn new(sf: &'a StandardForm<T>, basis: Vec<usize>, tol: T, max_iterations: usize) -> Self {
        let m = sf.m;
        let mut is_basic = vec![false; sf.columns.len()];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut binv = vec![T::zero(); m * m];
        // Initial basis columns are ±unit vectors.
        for (i, &b) in basis.iter().enumerate() {
            let (row, a) = &sf.columns[b][0];
            debug_assert_eq!(*row, i);
            binv[i * m + i] = T::one() / a.clone();
        }
        let xb = (0..m)
            .map(|i| binv[i * m + i].clone() * sf.rhs[i].clone())
            .collect();
        Simplex {
            sf,
            basis,
            is_basic,
            binv,
            xb,
            rhs: sf.rhs.clone(),
            tol,
            pivot_tol: T::pivot_tolerance(),
            iterations: 0,
            max_iterations,
            since_refactor: 0,
        }
    }

    fn duals(&self, cost: &[T]) -> Vec<T> {
        let m = self.sf.m;
        let mut y = vec![T::zero(); m];
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                let v = &self.binv[i * m + k];
                if !v.is_zero() {
                    *yk = yk.clone() + cb.clone() * v.clone();
                }
            }
        }
        y
    }

    fn column_image(&self, j: usize) -> Vec<T> {
        let m = self.sf.m;
        let mut u = vec![T::zero(); m];
        for (k, a) in &self.sf.columns[j] {
            for (i, ui) in u.iter_mut().enumerate() {
                let v = &self.binv[i * m + k];
                if !v.is_zero() {
                    *ui = ui.clone() + v.clone() * a.clone();
                }
            }
        }
        u
    }

    fn reduced_cost(&self, cost: &[T], y: &[T], j: usize) -> T {
        self.sf.columns[j]
            .iter()
            .fold(cost[j].clone(), |acc, (k, a)| acc - y[*k].clone() * a.clone())
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[T]) {
        let m = self.sf.m;
        let ur = u[r].clone();
        for k in 0..m {
            let v = self.binv[r * m + k].clone();
            self.binv[r * m + k] = v / ur.clone();
        }
        let theta = self.xb[r].clone() / ur;
        for i in 0..m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = u[i].clone();
            for k in 0..m {
                let pr = self.binv[r * m + k].clone();
                if !pr.is_zero() {
                    self.binv[i * m + k] = self.binv[i * m + k].clone() - f.clone() * pr;
                }
            }
            self.xb[i] = self.xb[i].clone() - f * theta.clone();
        }
        self.xb[r] = theta;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
        self.iterations += 1;
        self.since_refactor += 1;
        if !T::EXACT && self.since_refactor >= REFACTOR_EVERY {
            // A failed refactorization keeps the updated inverse.
            let _ = self.refactor();
        }
    }

    /// Recomputes `B⁻¹` and `x_B` from scratch with one refinement step.
    fn refactor(&mut self) -> bool {
        let m = self.sf.m;
        let mut bmat = vec![T::zero(); m * m];
        for (c, &b) in self.basis.iter().enumerate() {
            for (i, a) in &self.sf.columns[b] {
                bmat[i * m + c] = a.clone();
            }
        }
        let Some(inv) = invert(&bmat, m, &self.pivot_tol) else {
            return false;
        };
        self.binv = inv;
        let mut xb = mat_vec(&self.binv, &self.rhs, m);
        if !T::EXACT {
            let bx = mat_vec(&bmat, &xb, m);
            let resid: Vec<T> = self.rhs.iter().zip(&bx).map(|(b, v)| b.clone() - v.clone()).collect();
            let corr = mat_vec(&self.binv, &resid, m);
            for (x, c) in xb.iter_mut().zip(corr) {
                *x = x.clone() + c;
            }
        }
        self.xb = xb;
        self.since_refactor = 0;
        true
    }

    fn run(&mut self, cost: &[T], allow_artificial: bool) -> PhaseOutcome {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.max_iterations {
                return PhaseOutcome::IterationLimit;
            }
            let y = self.duals(cost);
            let mut entering: Option<(usize, T)> = None;
            for j in 0..self.sf.columns.len() {
                if self.is_basic[j] {
                    continue;
                }
                if !allow_artificial && self.sf.kinds[j] == ColumnKind::Artificial {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d < -self.tol.clone() {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    match &entering {
                        Some((_, best)) if *best <= d => {}
                        _ => entering = Some((j, d)),
                    }
                }
            }
            let Some((j, _)) = entering else {
                return PhaseOutcome::Optimal;
            };
            let u = self.column_image(j);

            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.sf.m {
                let stuck_artificial =
                    !allow_artificial && self.sf.kinds[self.basis[i]] == ColumnKind::Artificial;
                let ui = &u[i];
                let ratio = if stuck_artificial && ui.abs() > self.pivot_tol {
                    T::zero()
                } else if *ui > self.pivot_tol {
                    T::max_of(self.xb[i].clone(), T::zero()) / ui.clone()
                } else {
                    continue;
                };
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        if ratio < *best {
                            true
                        } else if ratio == *best {
                            if bland {
                                self.basis[i] < self.basis[*r]
                            } else {
                                ui.abs() > u[*r].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return PhaseOutcome::Unbounded(j);
            };
            let degenerate = if T::EXACT { ratio.is_zero() } else { ratio <= self.tol };
            if degenerate {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            if self.sf.kinds[self.basis[r]] == ColumnKind::Artificial && !allow_artificial {
                // Pivoting a zero artificial out keeps its row value exact.
                self.xb[r] = T::zero();
            }
            self.pivot(r, j, &u);
            if !T::EXACT {
                for x in self.xb.iter_mut() {
                    if x.is_negative() && *x > -self.tol.clone() {
                        *x = T::zero();
                    }
                }
            }
        }
    }

    /// After phase one, replaces zero-valued artificials in the basis by
    /// structural columns where the row allows it.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.sf.m {
            if self.sf.kinds[self.basis[r]] != ColumnKind::Artificial {
                continue;
            }
            let m = self.sf.m;
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.sf.columns.len() {
                if self.is_basic[j] || self.sf.kinds[j] == ColumnKind::Artificial {
                    continue;
                }
                let v = self.sf.columns[j]
                    .iter()
                    .fold(T::zero(), |acc, (k, a)| acc + self.binv[r * m + k].clone() * a.clone());
                if v.abs() > self.pivot_tol {
                    let better = match &best {
                        None => true,
                        Some((_, b)) => v.abs() > b.abs() && !T::EXACT,
                    };
                    if better {
                        best = Some((j, v));
                        if T::EXACT {
                            break;
                        }
                    }
                }
            }
            if let Some((j, _)) = best {
                let u = self.column_image(j);
                self.xb[r] = T::zero();
                self.pivot(r, j, &u);
            }
        }
    }

    /// Shifts every structural basic variable up by a small, distinct amount
    /// and moves the right-hand side along so the basis stays feasible.
    fn perturb(&mut self) {
        let m = self.sf.m;
        for i in 0..m {
            let b = self.basis[i];
            if self.sf.kinds[b] == ColumnKind::Artificial {
                continue;
            }
            // Deterministic spread in [1, 2).
            let spread = 1.0 + ((i as u64 * 2_654_435_761) % 1000) as f64 / 1000.0;
            let size = PERTURBATION * spread * (1.0 + self.xb[i].to_f64().abs());
            let delta = T::from_rational(&Rational::from_float(size).expect("finite"));
            self.xb[i] = self.xb[i].clone() + delta.clone();
            for (k, a) in &self.sf.columns[b] {
                self.rhs[*k] = self.rhs[*k].clone() + a.clone() * delta.clone();
            }
        }
    }

    /// Restores the problem's right-hand side. Returns `false` if the basis
    /// cannot be refactored.
    fn unperturb(&mut self) -> bool {
        self.rhs = self.sf.rhs.clone();
        self.refactor()
    }

    /// Dual simplex pivots until the basis is primal feasible again.
    fn dual_cleanup(&mut self, cost: &[T]) -> bool {
        let m = self.sf.m;
        loop {
            if self.iterations >= self.max_iterations {
                return false;
            }
            let mut leave: Option<usize> = None;
            for i in 0..m {
                if self.xb[i] < -self.tol.clone() && leave.is_none_or(|r| self.xb[i] < self.xb[r]) {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                for x in self.xb.iter_mut() {
                    if x.is_negative() {
                        *x = T::zero();
                    }
                }
                return true;
            };
            let y = self.duals(cost);
            let mut entering: Option<(usize, T)> = None;
            for j in 0..self.sf.columns.len() {
                if self.is_basic[j] || self.sf.kinds[j] == ColumnKind::Artificial {
                    continue;
                }
                let alpha = self.sf.columns[j]
                    .iter()
                    .fold(T::zero(), |acc, (k, a)| acc + self.binv[r * m + k].clone() * a.clone());
                if alpha >= -self.pivot_tol.clone() {
                    continue;
                }
                let d = T::max_of(self.reduced_cost(cost, &y, j), T::zero());
                let ratio = d / (-alpha);
                if entering.as_ref().is_none_or(|(_, best)| ratio < *best) {
                    entering = Some((j, ratio));
                }
            }
            let Some((j, _)) = entering else {
                return false;
            };
            let u = self.column_image(j);
            self.pivot(r, j, &u);
        }
    }

    fn standard_solution(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.sf.columns.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.xb[i].clone();
        }
        x
    }
}

fn mat_vec<T: Scalar>(a: &[T], x: &[T], m: usize) -> Vec<T> {
    (0..m)
        .map(|i| {
            (0..m).fold(T::zero(), |acc, k| {
                let v = &a[i * m + k];
                if v.is_zero() {
                    acc
                } else {
                    acc + v.clone() * x[k].clone()
                }
            })
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert<T: Scalar>(a: &[T], m: usize, pivot_tol: &T) -> Option<Vec<T>> {
    let mut work = a.to_vec();
    let mut inv = vec![T::zero(); m * m];
    for i in 0..m {
        inv[i * m + i] = T::one();
    }
    for col in 0..m {
        let mut piv = col;
        for row in col + 1..m {
            if work[row * m + col].abs() > work[piv * m + col].abs() {
                piv = row;
            }
            if T::EXACT && !work[piv * m + col].is_zero() {
                break;
            }
        }
        if work[piv * m + col].abs() <= *pivot_tol {
            return None;
        }
        if piv != col {
            for k in 0..m {
                work.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let p = work[col * m + col].clone();
        for k in 0..m {
            work[col * m + k] = work[col * m + k].clone() / p.clone();
            inv[col * m + k] = inv[col * m + k].clone() / p.clone();
        }
        for row in 0..m {
            if row == col {
                continue;
            }
            let f = work[row * m + col].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..m {
                let wc = work[col * m + k].clone();
                if !wc.is_zero() {
                    work[row * m + k] = work[row * m + k].clone() - f.clone() * wc;
                }
                let ic = inv[col * m + k].clone();
                if !ic.is_zero() {
                    inv[row * m + k] = inv[row * m + k].clone() - f.clone() * ic;
                }
            }
        }
    }
    Some(inv)
}

/// Solves `lp`. Never panics on well-formed input; malformed input returns
/// an error.
pub fn lp_solve<T: Scalar>(lp: &LinearProgram<T>, opts: &LpOptions<T>) -> Result<LpSolution<T>> {
    lp.validate()?;
    let (sf, basis) = StandardForm::build(lp);
    let n_cols = sf.columns.len();
    let max_iterations = opts.max_iterations.unwrap_or(50 * (sf.m + n_cols) + 1000);
    let tol = opts.tol.clone();
    let mut simplex = Simplex::new(&sf, basis, tol.clone(), max_iterations);

    // Phase one: minimize the sum of artificials.
    let phase1_cost: Vec<T> = sf
        .kinds
        .iter()
        .map(|k| if *k == ColumnKind::Artificial { T::one() } else { T::zero() })
        .collect();
    let has_artificial = simplex.basis.iter().any(|&b| sf.kinds[b] == ColumnKind::Artificial);
    if has_artificial {
        match simplex.run(&phase1_cost, true) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded(_) | PhaseOutcome::IterationLimit => {
                return Ok(failure(lp, LpStatus::NumericalFailure, None, simplex.iterations));
            }
        }
        if !T::EXACT {
            simplex.refactor();
        }
        let infeasibility = simplex
            .basis
            .iter()
            .zip(&simplex.xb)
            .filter(|(b, _)| sf.kinds[**b] == ColumnKind::Artificial)
            .fold(T::zero(), |acc, (_, v)| acc + v.clone());
        let scale = sf.rhs.iter().fold(T::one(), |acc, b| T::max_of(acc, b.abs()));
        if infeasibility > tol.clone() * scale {
            let y = simplex.duals(&phase1_cost);
            let (eq, ub) = split_rows(lp, &sf, &y);
            let cert = LpCertificate::Farkas { eq, ub };
            return Ok(failure(lp, LpStatus::Infeasible, Some(cert), simplex.iterations));
        }
        simplex.drive_out_artificials();
    }

    let mut outcome = if T::EXACT {
        simplex.run(&sf.cost, false)
    } else {
        simplex.perturb();
        let first = simplex.run(&sf.cost, false);
        if !simplex.unperturb() || !simplex.dual_cleanup(&sf.cost) {
            return Ok(failure(lp, LpStatus::NumericalFailure, None, simplex.iterations));
        }
        first
    };
    if !T::EXACT && matches!(outcome, PhaseOutcome::Optimal) {
        // Polish remaining dual infeasibilities on the true bounds.
        outcome = simplex.run(&sf.cost, false);
    }
    match outcome {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded(j) => {
            let u = simplex.column_image(j);
            let mut d = vec![T::zero(); n_cols];
            d[j] = T::one();
            for (i, &b) in simplex.basis.iter().enumerate() {
                d[b] = -u[i].clone();
            }
            let direction = to_original(lp, &sf, &d, false);
            let cert = LpCertificate::Ray { direction };
            return Ok(failure(lp, LpStatus::Unbounded, Some(cert), simplex.iterations));
        }
        PhaseOutcome::IterationLimit => {
            return Ok(failure(lp, LpStatus::NumericalFailure, None, simplex.iterations));
        }
    }
    if !T::EXACT && !simplex.refactor() {
        return Ok(failure(lp, LpStatus::NumericalFailure, None, simplex.iterations));
    }

    let xs = simplex.standard_solution();
    let x = to_original(lp, &sf, &xs, true);
    let y = simplex.duals(&sf.cost);
    let (eq_duals, ub_duals) = split_rows(lp, &sf, &y);
    let objective = lp.objective_value(&x);
    let dual_objective = lp.dual_objective(&eq_duals, &ub_duals);
    let residuals = LpResiduals {
        primal: lp.primal_residual(&x),
        dual: lp.dual_residual(&eq_duals, &ub_duals),
        gap: (objective.clone() - dual_objective.clone()).abs(),
    };
    let scale = T::one() + objective.abs();
    let status = if residuals.primal <= tol.clone() * scale.clone()
        && residuals.dual <= tol.clone() * scale.clone()
        && residuals.gap <= tol.clone() * scale
    {
        LpStatus::Optimal
    } else {
        LpStatus::NumericalFailure
    };
    Ok(LpSolution {
        status,
        x,
        eq_duals,
        ub_duals,
        objective,
        dual_objective,
        residuals,
        certificate: None,
        iterations: simplex.iterations,
    })
}

fn failure<T: Scalar>(
    lp: &LinearProgram<T>,
    status: LpStatus,
    certificate: Option<LpCertificate<T>>,
    iterations: usize,
) -> LpSolution<T> {
    LpSolution {
        status,
        x: vec![T::zero(); lp.num_vars()],
        eq_duals: vec![T::zero(); lp.equalities.len()],
        ub_duals: vec![T::zero(); lp.inequalities.len()],
        objective: T::zero(),
        dual_objective: T::zero(),
        residuals: LpResiduals {
            primal: T::zero(),
            dual: T::zero(),
            gap: T::zero(),
        },
        certificate,
        iterations,
    }
}

fn split_rows<T: Scalar>(lp: &LinearProgram<T>, sf: &StandardForm<T>, y: &[T]) -> (Vec<T>, Vec<T>) {
    let signed: Vec<T> = y
        .iter()
        .zip(&sf.row_sign)
        .map(|(v, &neg)| if neg { -v.clone() } else { v.clone() })
        .collect();
    let m_eq = lp.equalities.len();
    (signed[..m_eq].to_vec(), signed[m_eq..].to_vec())
}

/// Maps a standard-form vector back to the original variables; `shift`
/// adds the lower bounds (points) or not (directions).
fn to_original<T: Scalar>(lp: &LinearProgram<T>, sf: &StandardForm<T>, xs: &[T], shift: bool) -> Vec<T> {
    let mut x = vec![T::zero(); lp.num_vars()];
    for (k, kind) in sf.kinds.iter().enumerate() {
        match *kind {
            ColumnKind::Shifted(j) => {
                let l = if shift {
                    lp.lower_bounds[j].clone().unwrap_or_else(T::zero)
                } else {
                    T::zero()
                };
                x[j] = l + xs[k].clone();
            }
            ColumnKind::FreePlus(j) => x[j] = x[j].clone() + xs[k].clone(),
            ColumnKind::FreeMinus(j) => x[j] = x[j].clone() - xs[k].clone(),
            ColumnKind::Slack | ColumnKind::Artificial => {}
        }
    }
    x
}

/// Independent check of a Farkas certificate; returns the normalized
/// violation (`<= tol` means the certificate is valid).
pub fn farkas_violation<T: Scalar>(lp: &LinearProgram<T>, eq: &[T], ub: &[T]) -> T {
    let scale = eq
        .iter()
        .chain(ub)
        .fold(T::zero(), |acc, v| T::max_of(acc, v.abs()));
    if scale.is_zero() {
        return T::one();
    }
    let eq: Vec<T> = eq.iter().map(|v| v.clone() / scale.clone()).collect();
    let ub: Vec<T> = ub.iter().map(|v| v.clone() / scale.clone()).collect();
    let mut worst = T::zero();
    for v in &ub {
        worst = T::max_of(worst, v.clone());
    }
    let mut col = vec![T::zero(); lp.num_vars()];
    let mut rhs = T::zero();
    for (rows, ys) in [(&lp.equalities, &eq), (&lp.inequalities, &ub)] {
        for (row, y) in rows.iter().zip(ys.iter()) {
            let mut b = row.rhs.clone();
            for (j, a) in &row.coeffs {
                col[*j] = col[*j].clone() + a.clone() * y.clone();
                if let Some(l) = &lp.lower_bounds[*j] {
                    b = b - a.clone() * l.clone();
                }
            }
            rhs = rhs + b * y.clone();
        }
    }
    for (c, l) in col.iter().zip(&lp.lower_bounds) {
        let v = if l.is_some() { c.clone() } else { c.abs() };
        worst = T::max_of(worst, v);
    }
    // The certificate must separate: yᵀ(b - A l) > 0.
    if !rhs.is_positive() {
        worst = T::max_of(worst, T::one());
    }
    worst
}

/// Independent check of an unbounded ray; `<= tol` means valid.
pub fn ray_violation<T: Scalar>(lp: &LinearProgram<T>, d: &[T]) -> T {
    let scale = d.iter().fold(T::zero(), |acc, v| T::max_of(acc, v.abs()));
    if scale.is_zero() {
        return T::one();
    }
    let d: Vec<T> = d.iter().map(|v| v.clone() / scale.clone()).collect();
    let mut worst = T::zero();
    for row in &lp.equalities {
        worst = T::max_of(worst, LinearProgram::row_dot(row, &d).abs());
    }
    for row in &lp.inequalities {
        worst = T::max_of(worst, LinearProgram::row_dot(row, &d));
    }
    for (l, v) in lp.lower_bounds.iter().zip(&d) {
        if l.is_some() {
            worst = T::max_of(worst, -v.clone());
        }
    }
    if !lp.objective_value(&d).is_negative() {
        worst = T::max_of(worst, T::one());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn single_bound() {
        // min x s.t. x >= 1
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective[0] = 1.0;
        lp.lower_bounds[0] = Some(1.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_facet() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add_less_equal(vec![(0, 1.0), (1, 1.0)], 1.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-12);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.ub_duals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_rational_vertex() {
        // max x + y s.t. 3x + y <= 2, x + 3y <= 2 → x = y = 1/2.
        let mut lp = LinearProgram::<Rational>::new(2);
        lp.objective = vec![rat(-1, 1), rat(-1, 1)];
        lp.add_less_equal(vec![(0, rat(3, 1)), (1, rat(1, 1))], rat(2, 1));
        lp.add_less_equal(vec![(0, rat(1, 1)), (1, rat(3, 1))], rat(2, 1));
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(sol.objective, rat(-1, 1));
        assert_eq!(sol.residuals.gap, rat(0, 1));
    }

    #[test]
    fn free_variable() {
        // max λ s.t. 2λ <= -3 → λ = -3/2
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective[0] = -1.0;
        lp.lower_bounds[0] = None;
        lp.add_less_equal(vec![(0, 2.0)], -3.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.add_equality(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_greater_equal(vec![(0, 1.0)], 2.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let Some(LpCertificate::Farkas { eq, ub }) = &sol.certificate else {
            panic!("missing certificate");
        };
        assert!(farkas_violation(&lp, eq, ub) <= 1e-9);
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![-1.0, 0.0];
        lp.add_less_equal(vec![(0, 1.0), (1, -1.0)], 1.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let Some(LpCertificate::Ray { direction }) = &sol.certificate else {
            panic!("missing ray");
        };
        assert!(ray_violation(&lp, direction) <= 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::<f64>::new(3);
        lp.objective = vec![1.0, 2.0, 3.0];
        lp.add_equality(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0);
        lp.add_equality(vec![(0, 2.0), (1, 2.0), (2, 2.0)], 2.0);
        lp.add_equality(vec![(1, 1.0), (2, 1.0)], 0.5);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn f32_scalar() {
        let mut lp = LinearProgram::<f32>::new(2);
        lp.objective = vec![-1.0, -2.0];
        lp.add_less_equal(vec![(0, 1.0), (1, 1.0)], 4.0);
        lp.add_less_equal(vec![(1, 1.0)], 3.0);
        let sol = lp_solve(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 7.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_out_of_range_column() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.add_equality(vec![(3, 1.0)], 1.0);
        assert!(lp_solve(&lp, &LpOptions::default()).is_err());
    }
}
