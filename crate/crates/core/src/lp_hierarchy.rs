//! Linear relaxations on the simplex.
//!
//! Level `r` has one variable `y_α` per `|α| <= r` and the rows
//!
//! ```text
//! Σ_α fi_α y_α = bi            (moment rows)
//! y_α = Σ_i y_{α+e_i}          (ideal rows, |α| <= r-1)
//! y_0 <= 1,  y >= 0
//! ```
//!
//! The Pólya-type hierarchy `p^(r)` and the equivalence between the two are
//! also here.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{monomial_index_set, Domain, DomainKind, GmpInstance, MomentVector};
use crate::poly::{b_of_f, monomials_of_degree, multinomial, Monomial, Polynomial};
use crate::report::{moments_to_f64, Duals, HierarchyKind, LevelReport, Residuals};
use crate::scalar::{Rational, Scalar};
use crate::solvers::{lp_solve, LinearProgram, LpOptions, LpSolution, LpStatus};

/// What a row of the assembled LP stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpRowKind {
    Moment(usize),
    Ideal(Monomial),
}

/// Assembled level-`r` LP with its column ↔ monomial map.
#[derive(Debug, Clone)]
pub struct RelaxationProblemLp<T> {
    pub level: u32,
    pub columns: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    pub lp: LinearProgram<T>,
    /// Kinds of `lp.equalities` in order.
    pub equality_kinds: Vec<LpRowKind>,
    pub num_moment_rows: usize,
}

impl<T: Scalar> RelaxationProblemLp<T> {
    pub fn column(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn num_ideal_rows(&self) -> usize {
        self.equality_kinds.len() - self.num_moment_rows
    }

    pub fn moments_from(&self, x: &[T]) -> MomentVector<T> {
        MomentVector {
            level: self.level,
            n: self.columns.first().map_or(0, |m| m.dim()),
            values: self.columns.iter().cloned().zip(x.iter().cloned()).collect(),
        }
    }

    /// Largest row or bound violation of a moment vector (missing moments
    /// count as zero).
    pub fn violation(&self, moments: &MomentVector<T>) -> T {
        let x: Vec<T> = self
            .columns
            .iter()
            .map(|m| moments.get(m).cloned().unwrap_or_else(T::zero))
            .collect();
        self.lp.primal_residual(&x)
    }

    /// Sparse triplet dump.
    pub fn to_json(&self) -> String {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, m)| ColumnJson {
                exp: m.exponents().to_vec(),
                lower: "0".into(),
                objective: self.lp.objective[j].to_decimal_string(),
            })
            .collect();
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for (i, (row, kind)) in self.lp.equalities.iter().zip(&self.equality_kinds).enumerate() {
            let name = match kind {
                LpRowKind::Moment(k) => format!("moment[{k}]"),
                LpRowKind::Ideal(m) => format!("ideal[{}]", exps(m)),
            };
            rows.push(RowJson {
                name,
                sense: "eq",
                rhs: row.rhs.to_decimal_string(),
            });
            for (j, a) in &row.coeffs {
                entries.push((i, *j, a.to_decimal_string()));
            }
        }
        let offset = rows.len();
        for (i, row) in self.lp.inequalities.iter().enumerate() {
            rows.push(RowJson {
                name: "mass".into(),
                sense: "le",
                rhs: row.rhs.to_decimal_string(),
            });
            for (j, a) in &row.coeffs {
                entries.push((offset + i, *j, a.to_decimal_string()));
            }
        }
        serde_json::to_string(&LpJson {
            level: self.level,
            sense: "min",
            columns,
            rows,
            entries,
        })
        .expect("LP serializes")
    }
}

fn exps(m: &Monomial) -> String {
    m.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct ColumnJson {
    exp: Vec<u32>,
    lower: String,
    objective: String,
}

#[derive(Serialize)]
struct RowJson {
    name: String,
    sense: &'static str,
    rhs: String,
}

#[derive(Serialize)]
struct LpJson {
    level: u32,
    sense: &'static str,
    columns: Vec<ColumnJson>,
    rows: Vec<RowJson>,
    entries: Vec<(usize, usize, String)>,
}

fn require_simplex(inst: &GmpInstance) -> Result<()> {
    if inst.domain().kind != DomainKind::Simplex {
        return Err(Error::WrongDomain {
            expected: DomainKind::Simplex,
            found: inst.domain().kind,
        });
    }
    Ok(())
}

pub fn build_lp<T: Scalar>(inst: &GmpInstance, r: u32) -> Result<RelaxationProblemLp<T>> {
    require_simplex(inst)?;
    let d = inst.degree();
    if r < d {
        return Err(Error::LevelTooSmall { level: r, minimum: d });
    }
    let n = inst.n();
    let columns = monomial_index_set(n, r);
    let index: BTreeMap<Monomial, usize> = columns.iter().cloned().enumerate().map(|(j, m)| (m, j)).collect();
    let sparse = |p: &Polynomial<Rational>| -> Vec<(usize, T)> {
        p.terms().map(|(m, c)| (index[m], T::from_rational(c))).collect()
    };

    let mut lp = LinearProgram::new(columns.len());
    for (m, c) in inst.objective().terms() {
        lp.objective[index[m]] = T::from_rational(c);
    }
    let mut kinds = Vec::new();
    for (k, c) in inst.constraints().iter().enumerate() {
        lp.add_equality(sparse(&c.poly), T::from_rational(&c.rhs));
        kinds.push(LpRowKind::Moment(k));
    }
    if r > 0 {
        for alpha in monomial_index_set(n, r - 1) {
            let mut row = vec![(index[&alpha], T::one())];
            for i in 0..n {
                row.push((index[&alpha.bump(i, 1)], -T::one()));
            }
            lp.add_equality(row, T::zero());
            kinds.push(LpRowKind::Ideal(alpha));
        }
    }
    lp.add_less_equal(vec![(index[&Monomial::one(n)], T::one())], T::one());
    Ok(RelaxationProblemLp {
        level: r,
        columns,
        index,
        lp,
        equality_kinds: kinds,
        num_moment_rows: inst.constraints().len(),
    })
}

/// Solves level `r` in the arithmetic of `T`.
pub fn solve_level<T: Scalar>(inst: &GmpInstance, r: u32, opts: &LpOptions<T>) -> Result<LevelReport> {
    let problem = build_lp::<T>(inst, r)?;
    let sol = lp_solve(&problem.lp, opts)?;
    Ok(report_from_solution(inst, &problem, &sol))
}

/// Solves level `r` in `f64`.
pub fn solve_level_f64(inst: &GmpInstance, r: u32) -> Result<LevelReport> {
    solve_level::<f64>(inst, r, &LpOptions::default())
}

fn report_from_solution<T: Scalar>(
    inst: &GmpInstance,
    problem: &RelaxationProblemLp<T>,
    sol: &LpSolution<T>,
) -> LevelReport {
    let mut report = LevelReport::new(HierarchyKind::Lp, problem.level, sol.status.into());
    report.residuals = Residuals {
        primal: sol.residuals.primal.to_f64(),
        dual: sol.residuals.dual.to_f64(),
        gap: sol.residuals.gap.to_f64(),
    };
    if sol.status != LpStatus::Optimal {
        if sol.status == LpStatus::Infeasible {
            report.notes.push("moment constraints admit no pseudo-moment vector at this level".into());
        }
        return report;
    }
    report.bound = Some(sol.objective.to_f64());
    if T::EXACT {
        report.exact_bound = sol.objective.to_rational();
    }
    report.moments = Some(moments_to_f64(&problem.moments_from(&sol.x)));
    let m = problem.num_moment_rows;
    let duals = Duals {
        ybar: sol.eq_duals[..m].iter().map(|v| v.to_f64()).collect(),
        t: -sol.ub_duals[0].to_f64(),
    };
    match apriori_error_bound(inst, &duals, problem.level) {
        Ok(b) => report.apriori_bound = Some(b),
        Err(e) => report.notes.push(format!("a-priori bound skipped: {e}")),
    }
    report.duals = Some(duals);
    report
}

/// `max_γ |y_γ - Σ_β c_β y_{γ+β}|` over `|γ| <= level - k` where
/// `(Σ xi)^k = Σ c_β x^β`.
pub fn degree_raise_check<T: Scalar>(moments: &MomentVector<T>, k: u32) -> Result<T> {
    if k > moments.level {
        return Err(Error::Precondition(format!(
            "k = {k} exceeds the moment level {}",
            moments.level
        )));
    }
    let expansion = Polynomial::<Rational>::multinomial_expansion(moments.n, k);
    let mut worst = T::zero();
    for gamma in monomial_index_set(moments.n, moments.level - k) {
        let mut v = moments.get(&gamma).cloned().ok_or(Error::LevelTooSmall {
            level: moments.level,
            minimum: gamma.degree(),
        })?;
        for (beta, c) in expansion.terms() {
            let y = moments.get(&gamma.mul(beta)).cloned().unwrap_or_else(T::zero);
            v = v - T::from_rational(c) * y;
        }
        worst = T::max_of(worst, v.abs());
    }
    Ok(worst)
}

/// Rate bound `(Σ_{i=0}^{m+1} B(y_i f_i) + t) d(d-1) / (2(r-1) - d(d-1))`
/// with `y_0 = 1`, `y_i = -ybar_i`, `f_{m+1} = (Σ x)^d` and `y_{m+1} = t`.
pub fn apriori_error_bound(inst: &GmpInstance, duals: &Duals, r: u32) -> Result<f64> {
    let d = inst.degree() as i64;
    let denom = 2 * (r as i64 - 1) - d * (d - 1);
    if denom <= 0 {
        return Err(Error::LevelTooSmall {
            level: r,
            minimum: (d * (d - 1) / 2 + 2) as u32,
        });
    }
    if duals.ybar.len() != inst.constraints().len() {
        return Err(Error::DimensionMismatch {
            expected: inst.constraints().len(),
            found: duals.ybar.len(),
        });
    }
    if !duals.t.is_finite() || duals.ybar.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite duals".into()));
    }
    if d <= 1 {
        return Ok(0.0);
    }
    let n = inst.n();
    let mut sum = b_of_f(&inst.objective().convert::<f64>())?;
    for (c, yb) in inst.constraints().iter().zip(&duals.ybar) {
        sum += b_of_f(&c.poly.convert::<f64>().scale(&-yb))?;
    }
    let unit = Polynomial::<f64>::sum_of_variables(n).pow(d as u32);
    sum += b_of_f(&unit.scale(&duals.t))?;
    sum += duals.t;
    let v = sum * (d * (d - 1)) as f64 / denom as f64;
    Ok(v.max(0.0))
}

/// Polynomial-optimization form of the rate bound:
/// `d(d-1)/(2(level-1) - d(d-1)) · (B(p) - p_min)`.
pub fn polynomial_gap_bound(p: &Polynomial<Rational>, p_min: f64, level: u32) -> Result<f64> {
    let d = p.homogeneous_degree().ok_or(Error::NotHomogeneous)? as i64;
    let denom = 2 * (level as i64 - 1) - d * (d - 1);
    if denom <= 0 {
        return Err(Error::LevelTooSmall {
            level,
            minimum: (d * (d - 1) / 2 + 2) as u32,
        });
    }
    let b = b_of_f(p)?.to_f64();
    Ok((d * (d - 1)) as f64 / denom as f64 * (b - p_min))
}

/// Range form: `d(d-1)/(2(level-1) - d(d-1)) · C(2d-1, d) d^d (p_max - p_min)`.
pub fn polynomial_range_gap_bound(d: u32, range: f64, level: u32) -> Result<f64> {
    if d == 0 {
        return Ok(0.0);
    }
    let di = d as i64;
    let denom = 2 * (level as i64 - 1) - di * (di - 1);
    if denom <= 0 {
        return Err(Error::LevelTooSmall {
            level,
            minimum: (di * (di - 1) / 2 + 2) as u32,
        });
    }
    let binom = multinomial(2 * d - 1, &[d, d - 1]);
    let factor = Rational::from_integer(binom).to_f64() * (d as f64).powi(d as i32);
    Ok((di * (di - 1)) as f64 / denom as f64 * factor * range)
}

/// Right hand side `Σ_α C(r, β-α) p_α` of the row for `β`.
fn dklp_row_rhs(p: &Polynomial<Rational>, r: u32, beta: &Monomial) -> Rational {
    let mut acc = Rational::zero();
    for (alpha, c) in p.terms() {
        if let Some(diff) = beta.checked_div(alpha) {
            acc += Rational::from_integer(multinomial(r, diff.exponents())) * c;
        }
    }
    acc
}

fn require_form(p: &Polynomial<Rational>) -> Result<u32> {
    if p.is_zero() {
        return Ok(0);
    }
    p.homogeneous_degree().ok_or(Error::NotHomogeneous)
}

/// LP `max λ` s.t. `C(r+d, β) λ <= Σ_α C(r, β-α) p_α` for `|β| = r+d`,
/// one `<=` row per `β` in graded-lex order, written as `min -λ`.
pub fn build_dklp<T: Scalar>(p: &Polynomial<Rational>, r: u32) -> Result<(LinearProgram<T>, Vec<Monomial>)> {
    let d = require_form(p)?;
    let betas = monomials_of_degree(p.n(), r + d);
    let mut lp = LinearProgram::new(1);
    lp.objective[0] = -T::one();
    lp.lower_bounds[0] = None;
    for beta in &betas {
        let coef = Rational::from_integer(multinomial(r + d, beta.exponents()));
        lp.add_less_equal(
            vec![(0, T::from_rational(&coef))],
            T::from_rational(&dklp_row_rhs(p, r, beta)),
        );
    }
    Ok((lp, betas))
}

/// Solution of the `p^(r)` LP with the row multipliers `y_β >= 0`.
#[derive(Debug, Clone)]
pub struct DklpSolution<T> {
    pub status: LpStatus,
    pub value: T,
    pub betas: Vec<Monomial>,
    pub y: Vec<T>,
}

pub fn dklp_value<T: Scalar>(p: &Polynomial<Rational>, r: u32, opts: &LpOptions<T>) -> Result<DklpSolution<T>> {
    let (lp, betas) = build_dklp::<T>(p, r)?;
    let sol = lp_solve(&lp, opts)?;
    Ok(DklpSolution {
        status: sol.status,
        value: sol.x[0].clone(),
        betas,
        y: sol.ub_duals.iter().map(|v| -v.clone()).collect(),
    })
}

/// `p^(r)` as the exact minimum ratio over the rows.
pub fn dklp_min_ratio(p: &Polynomial<Rational>, r: u32) -> Result<Rational> {
    let d = require_form(p)?;
    monomials_of_degree(p.n(), r + d)
        .iter()
        .map(|beta| {
            dklp_row_rhs(p, r, beta) / Rational::from_integer(multinomial(r + d, beta.exponents()))
        })
        .min()
        .ok_or_else(|| Error::InvalidInput("no rows".into()))
}

/// Builds `L^(r+d)` from the `p^(r)` multipliers: top-degree moments are
/// `y_β`, lower ones are filled by `y_α = Σ_i y_{α+e_i}`.
pub fn dklp_moment_lift<T: Scalar>(n: usize, total_level: u32, betas: &[Monomial], y: &[T]) -> MomentVector<T> {
    let mut values: BTreeMap<Monomial, T> = betas.iter().cloned().zip(y.iter().cloned()).collect();
    for deg in (0..total_level).rev() {
        for alpha in monomials_of_degree(n, deg) {
            let v = (0..n).fold(T::zero(), |acc, i| {
                acc + values.get(&alpha.bump(i, 1)).cloned().unwrap_or_else(T::zero)
            });
            values.insert(alpha, v);
        }
    }
    MomentVector {
        level: total_level,
        n,
        values,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport<T> {
    /// `p^(r)`.
    pub lhs: T,
    /// LP relaxation value at level `r + d`.
    pub rhs: T,
    pub difference: T,
    /// Row violation of the lifted `p^(r)` multipliers in the level `r + d`
    /// relaxation.
    pub lift_violation: T,
    /// `L(p)` for the lifted moments; equals `lhs` at optimality.
    pub lift_value: T,
}

/// Compares `p^(r)` with the level `r + d` relaxation of
/// `min ∫ p dμ` s.t. `∫ (Σ x)^d dμ = 1`.
pub fn equivalence_check<T: Scalar>(
    p: &Polynomial<Rational>,
    r: u32,
    opts: &LpOptions<T>,
) -> Result<EquivalenceReport<T>> {
    let d = require_form(p)?;
    let dk = dklp_value::<T>(p, r, opts)?;
    if dk.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!("p^(r) LP ended with status {:?}", dk.status)));
    }
    let inst = GmpInstance::normalized_minimization(Domain::simplex(p.n()), p.clone())?;
    let problem = build_lp::<T>(&inst, r + d)?;
    let sol = lp_solve(&problem.lp, opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!("relaxation LP ended with status {:?}", sol.status)));
    }
    let lift = dklp_moment_lift(p.n(), r + d, &dk.betas, &dk.y);
    let lift_violation = problem.violation(&lift);
    let lift_value = lift.apply(p)?;
    Ok(EquivalenceReport {
        difference: (dk.value.clone() - sol.objective.clone()).abs(),
        lhs: dk.value,
        rhs: sol.objective,
        lift_violation,
        lift_value,
    })
}

/// `Σ_β C(total, β) y_β`, which the `p^(r)` multipliers make equal to 1.
pub fn dklp_normalization<T: Scalar>(betas: &[Monomial], y: &[T], total: u32) -> T {
    betas.iter().zip(y).fold(T::zero(), |acc, (b, v)| {
        acc + T::from_rational(&Rational::from_integer(multinomial(total, b.exponents()))) * v.clone()
    })
}

/// `true` if `r` satisfies the rate bound's level condition for degree `d`.
pub fn rate_bound_applies(d: u32, r: u32) -> bool {
    2 * (r as i64 - 1) > (d as i64) * (d as i64 - 1)
}
