//! Semidefinite relaxations on the unit sphere.
//!
//! Level `r` has one variable `y_α` per `|α| <= 2r`, the moment matrix
//! `M(y)_{ij} = y_{α_i + α_j}` over the basis `|α| <= r`, and the rows
//!
//! ```text
//! Σ_α fi_α y_α = bi                 (moment rows)
//! y_α = Σ_i y_{α+2e_i}              (ideal rows, |α| <= 2r-2)
//! y_0 <= 1,  M(y) ⪰ 0
//! ```
//!
//! Before calling the interior point kernel the equalities are eliminated
//! exactly (`y = y_p + N z`), and the moment matrix is restricted to the
//! orthogonal complement of the vectors `x^γ (1 - ‖x‖²)`, `|γ| <= r-2`,
//! which every feasible `M(y)` annihilates. Without that restriction no
//! feasible `M(y)` is positive definite.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{monomial_index_set, DomainKind, GmpInstance, MomentVector};
use crate::poly::Monomial;
use crate::report::{HierarchyKind, LevelReport, Residuals, Status};
use crate::scalar::{Rational, Scalar};
use crate::solvers::{conic_solve, lambda_min, ConicProblem, SdpOptions, SdpStatus};

/// Basis `[x]_r` of the moment matrix; entry `(i, j)` holds `α_i + α_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrixIndex {
    pub level: u32,
    pub basis: Vec<Monomial>,
}

impl MomentMatrixIndex {
    pub fn new(n: usize, r: u32) -> Self {
        MomentMatrixIndex {
            level: r,
            basis: monomial_index_set(n, r),
        }
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Monomial {
        self.basis[i].mul(&self.basis[j])
    }

    /// `M(y)` from a moment vector of level at least `2r`.
    pub fn moment_matrix(&self, mv: &MomentVector<f64>) -> Result<DMatrix<f64>> {
        let b = self.size();
        let mut m = DMatrix::zeros(b, b);
        for i in 0..b {
            for j in i..b {
                let key = self.entry(i, j);
                let v = *mv.get(&key).ok_or(Error::LevelTooSmall {
                    level: mv.level,
                    minimum: key.degree(),
                })?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SdpRowKind {
    Moment(usize),
    Ideal(Monomial),
}

/// Assembled level-`r` relaxation over deduplicated moment variables.
#[derive(Debug, Clone)]
pub struct RelaxationProblemSdp {
    pub level: u32,
    pub index: MomentMatrixIndex,
    /// Moment variables `|α| <= 2r` in graded-lex order.
    pub variables: Vec<Monomial>,
    var_index: BTreeMap<Monomial, usize>,
    pub objective: Vec<Rational>,
    /// Sparse equality rows over the variables.
    pub rows: Vec<(Vec<(usize, Rational)>, Rational)>,
    pub row_kinds: Vec<SdpRowKind>,
    pub num_moment_rows: usize,
}

impl RelaxationProblemSdp {
    pub fn variable(&self, m: &Monomial) -> Option<usize> {
        self.var_index.get(m).copied()
    }

    pub fn num_ideal_rows(&self) -> usize {
        self.rows.len() - self.num_moment_rows
    }

    pub fn block_dim(&self) -> usize {
        self.index.size()
    }

    /// Largest violation of the linear rows, the mass bound and the PSD
    /// condition (as `-λ_min`) at a moment vector.
    pub fn violation(&self, mv: &MomentVector<f64>) -> Result<f64> {
        let y: Vec<f64> = self
            .variables
            .iter()
            .map(|m| mv.get(m).copied().unwrap_or(0.0))
            .collect();
        let mut worst = 0f64;
        for (row, rhs) in &self.rows {
            let v: f64 = row.iter().map(|(j, a)| a.to_f64() * y[*j]).sum();
            worst = worst.max((v - rhs.to_f64()).abs());
        }
        worst = worst.max(y[0] - 1.0);
        let m = self.index.moment_matrix(mv)?;
        worst = worst.max(-lambda_min(&m));
        Ok(worst)
    }

    /// JSON dump: block size, moment variables, objective, linear rows and
    /// for each variable the upper-triangle positions it occupies in `M(y)`.
    pub fn to_json(&self) -> String {
        let b = self.block_dim();
        let mut positions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.variables.len()];
        for i in 0..b {
            for j in i..b {
                positions[self.var_index[&self.index.entry(i, j)]].push((i, j));
            }
        }
        let rows = self
            .rows
            .iter()
            .zip(&self.row_kinds)
            .map(|((coeffs, rhs), kind)| SdpRowJson {
                name: match kind {
                    SdpRowKind::Moment(k) => format!("moment[{k}]"),
                    SdpRowKind::Ideal(m) => format!(
                        "ideal[{}]",
                        m.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
                    ),
                },
                sense: "eq",
                rhs: rhs.to_decimal_string(),
                coeffs: coeffs.iter().map(|(j, a)| (*j, a.to_decimal_string())).collect(),
            })
            .chain(std::iter::once(SdpRowJson {
                name: "mass".into(),
                sense: "le",
                rhs: "1".into(),
                coeffs: vec![(0, "1".into())],
            }))
            .collect();
        let dump = SdpJson {
            level: self.level,
            block_dim: b,
            sense: "min",
            variables: self.variables.iter().map(|m| m.exponents().to_vec()).collect(),
            objective: self.objective.iter().map(|c| c.to_decimal_string()).collect(),
            rows,
            block: positions
                .into_iter()
                .enumerate()
                .map(|(k, entries)| BlockJson { var: k, entries })
                .collect(),
        };
        serde_json::to_string(&dump).expect("SDP serializes")
    }
}

#[derive(Serialize)]
struct SdpRowJson {
    name: String,
    sense: &'static str,
    rhs: String,
    coeffs: Vec<(usize, String)>,
}

#[derive(Serialize)]
struct BlockJson {
    var: usize,
    entries: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct SdpJson {
    level: u32,
    block_dim: usize,
    sense: &'static str,
    variables: Vec<Vec<u32>>,
    objective: Vec<String>,
    rows: Vec<SdpRowJson>,
    block: Vec<BlockJson>,
}

/// Smallest admissible level: `2r` must reach the instance degree.
pub fn minimum_sdp_level(inst: &GmpInstance) -> u32 {
    inst.degree().div_ceil(2)
}

pub fn build_sdp(inst: &GmpInstance, r: u32) -> Result<RelaxationProblemSdp> {
    if inst.domain().kind != DomainKind::Sphere {
        return Err(Error::WrongDomain {
            expected: DomainKind::Sphere,
            found: inst.domain().kind,
        });
    }
    let min = minimum_sdp_level(inst);
    if r < min {
        return Err(Error::LevelTooSmall { level: r, minimum: min });
    }
    let n = inst.n();
    let variables = monomial_index_set(n, 2 * r);
    let var_index: BTreeMap<Monomial, usize> =
        variables.iter().cloned().enumerate().map(|(j, m)| (m, j)).collect();
    let mut objective = vec![Rational::zero(); variables.len()];
    for (m, c) in inst.objective().terms() {
        objective[var_index[m]] = c.clone();
    }
    let mut rows = Vec::new();
    let mut kinds = Vec::new();
    for (k, c) in inst.constraints().iter().enumerate() {
        rows.push((
            c.poly.terms().map(|(m, a)| (var_index[m], a.clone())).collect(),
            c.rhs.clone(),
        ));
        kinds.push(SdpRowKind::Moment(k));
    }
    if r >= 1 {
        for alpha in monomial_index_set(n, 2 * r - 2) {
            let mut row = vec![(var_index[&alpha], Rational::one())];
            for i in 0..n {
                row.push((var_index[&alpha.bump(i, 2)], -Rational::one()));
            }
            rows.push((row, Rational::zero()));
            kinds.push(SdpRowKind::Ideal(alpha));
        }
    }
    Ok(RelaxationProblemSdp {
        level: r,
        index: MomentMatrixIndex::new(n, r),
        variables,
        var_index,
        objective,
        rows,
        row_kinds: kinds,
        num_moment_rows: inst.constraints().len(),
    })
}

/// Exact solution set `{y : E y = f}` as `y_p + span(N)`; `None` if empty.
struct AffineSolution {
    particular: Vec<Rational>,
    null_basis: Vec<Vec<Rational>>,
}

fn solve_affine(rows: &[(Vec<(usize, Rational)>, Rational)], nvars: usize) -> Option<AffineSolution> {
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(coeffs, rhs)| {
            let mut v = vec![Rational::zero(); nvars + 1];
            for (j, a) in coeffs {
                v[*j] += a;
            }
            v[nvars] = rhs.clone();
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(p) = (row..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = Rational::one() / mat[row][col].clone();
        for v in mat[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = mat[row].clone();
        for (i, other) in mat.iter_mut().enumerate() {
            if i == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (k, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    other[k] -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    if mat[row..].iter().any(|r| !r[nvars].is_zero()) {
        return None;
    }
    let mut particular = vec![Rational::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = mat[i][nvars].clone();
    }
    let is_pivot: Vec<bool> = (0..nvars).map(|c| pivots.contains(&c)).collect();
    let mut null_basis = Vec::new();
    for free in (0..nvars).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); nvars];
        v[free] = Rational::one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = -mat[i][free].clone();
        }
        null_basis.push(v);
    }
    Some(AffineSolution {
        particular,
        null_basis,
    })
}

/// Orthonormal basis of the complement of `span{x^γ(1 - ‖x‖²) : |γ| <= r-2}`
/// in coefficient space of `[x]_r`.
fn face_basis(index: &MomentMatrixIndex, n: usize) -> DMatrix<f64> {
    let b = index.size();
    if index.level < 2 {
        return DMatrix::identity(b, b);
    }
    let pos: BTreeMap<&Monomial, usize> = index.basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let gammas = monomial_index_set(n, index.level - 2);
    let mut k = DMatrix::<f64>::zeros(b, gammas.len());
    for (c, g) in gammas.iter().enumerate() {
        k[(pos[g], c)] = 1.0;
        for i in 0..n {
            k[(pos[&g.bump(i, 2)], c)] = -1.0;
        }
    }
    let eig = SymmetricEigen::new(&k * k.transpose());
    let eigenvalues: &DVector<f64> = &eig.eigenvalues;
    let scale = eigenvalues.amax().max(1.0);
    let keep: Vec<usize> = (0..b).filter(|&i| eigenvalues[i] <= 1e-9 * scale).collect();
    DMatrix::from_fn(b, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

fn moment_matrix_of(problem: &RelaxationProblemSdp, y: &[f64]) -> DMatrix<f64> {
    let b = problem.block_dim();
    let mut m = DMatrix::zeros(b, b);
    for i in 0..b {
        for j in i..b {
            let v = y[problem.var_index[&problem.index.entry(i, j)]];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Solves level `r`. The bound is `Σ c_α y_α` at the computed moments.
pub fn solve_level_sdp(inst: &GmpInstance, r: u32, opts: &SdpOptions) -> Result<LevelReport> {
    let problem = build_sdp(inst, r)?;
    let nvars = problem.variables.len();
    let mut report = LevelReport::new(HierarchyKind::Sdp, r, Status::Optimal);

    let Some(affine) = solve_affine(&problem.rows, nvars) else {
        report.status = Status::Infeasible;
        report.notes.push("moment and ideal rows are inconsistent".into());
        return Ok(report);
    };
    let mass_fixed = affine.null_basis.iter().all(|v| v[0].is_zero());
    if mass_fixed && affine.particular[0] > Rational::one() {
        report.status = Status::Infeasible;
        report
            .notes
            .push(format!("rows force mass {} > 1", affine.particular[0].to_decimal_string()));
        return Ok(report);
    }

    // Orthonormal parametrization y = y_p + N z.
    let k = affine.null_basis.len();
    let (y_p, n_mat) = if k > 0 {
        let raw = DMatrix::from_fn(nvars, k, |i, j| affine.null_basis[j][i].to_f64());
        let q = raw.qr().q();
        let yp0 = DVector::from_iterator(nvars, affine.particular.iter().map(|v| v.to_f64()));
        let yp = &yp0 - &q * (q.transpose() * &yp0);
        (yp, q)
    } else {
        (
            DVector::from_iterator(nvars, affine.particular.iter().map(|v| v.to_f64())),
            DMatrix::zeros(nvars, 0),
        )
    };
    let c = DVector::from_iterator(nvars, problem.objective.iter().map(|v| v.to_f64()));
    let face = face_basis(&problem.index, inst.n());
    let project = |y: &[f64]| -> DMatrix<f64> {
        let mut m = face.transpose() * moment_matrix_of(&problem, y) * &face;
        let t = m.transpose();
        m += t;
        m * 0.5
    };

    let (y, kernel) = if k == 0 {
        (y_p.clone(), None)
    } else {
        let prob = ConicProblem {
            c_mat: project(y_p.as_slice()),
            a_mats: (0..k).map(|j| -project(n_mat.column(j).clone_owned().as_slice())).collect(),
            c_lin: if mass_fixed {
                DVector::zeros(0)
            } else {
                DVector::from_element(1, 1.0 - y_p[0])
            },
            a_lin: if mass_fixed {
                DMatrix::zeros(0, k)
            } else {
                DMatrix::from_fn(1, k, |_, j| n_mat[(0, j)])
            },
            b: -(n_mat.transpose() * &c),
        };
        let sol = conic_solve(&prob, opts)?;
        report.status = match sol.status {
            SdpStatus::Optimal => Status::Optimal,
            // Roles of the kernel's primal and dual are swapped here.
            SdpStatus::Unbounded => Status::Infeasible,
            SdpStatus::Infeasible => Status::Unbounded,
            SdpStatus::NumericalFailure | SdpStatus::MaxIterations => Status::NumericalFailure,
        };
        if sol.status == SdpStatus::MaxIterations {
            report.notes.push("interior point iteration limit reached".into());
        }
        (&y_p + &n_mat * &sol.y, Some(sol))
    };

    let values: BTreeMap<Monomial, f64> = problem.variables.iter().cloned().zip(y.iter().copied()).collect();
    let mv = MomentVector {
        level: 2 * r,
        n: inst.n(),
        values,
    };
    let lmin = lambda_min(&project(y.as_slice()));
    let linear_violation = problem
        .rows
        .iter()
        .map(|(row, rhs)| {
            let v: f64 = row.iter().map(|(j, a)| a.to_f64() * y[*j]).sum();
            (v - rhs.to_f64()).abs()
        })
        .fold(0.0, f64::max);
    let primal = linear_violation.max(-lmin).max(y[0] - 1.0).max(0.0);

    match &kernel {
        None => {
            // Fully determined moments: feasible iff PSD and mass <= 1.
            if primal > opts.tol.max(1e-9) {
                report.status = Status::Infeasible;
                report.notes.push("rows determine a moment vector outside the cone".into());
                return Ok(report);
            }
            report.residuals = Residuals {
                primal,
                dual: 0.0,
                gap: 0.0,
            };
        }
        Some(sol) => {
            report.residuals = Residuals {
                primal,
                dual: sol.residuals.primal,
                gap: sol.residuals.gap,
            };
        }
    }
    if report.status != Status::Optimal {
        return Ok(report);
    }
    report.bound = Some(c.dot(&y));
    report.set_extra("moment_matrix_lambda_min", crate::report::num(lmin));

    // Dual multipliers: least squares for Eᵀλ = c - M*(X) + t e0.
    if let Some(sol) = &kernel {
        let x_full = &face * &sol.x_mat * face.transpose();
        let t = if mass_fixed { 0.0 } else { sol.x_lin[0] };
        let mut target = c.clone();
        let b = problem.block_dim();
        for i in 0..b {
            for j in 0..b {
                let v = problem.var_index[&problem.index.entry(i, j)];
                target[v] -= x_full[(i, j)];
            }
        }
        target[0] += t;
        let e_t = DMatrix::from_fn(nvars, problem.rows.len(), |i, j| {
            problem.rows[j].0.iter().filter(|(v, _)| *v == i).map(|(_, a)| a.to_f64()).sum()
        });
        if let Ok(lambda) = e_t.svd(true, true).solve(&target, 1e-12) {
            report.duals = Some(crate::report::Duals {
                ybar: lambda.iter().take(problem.num_moment_rows).copied().collect(),
                t,
            });
        }
    }
    report.moments = Some(mv);
    Ok(report)
}

/// `⟨A, M⟩` for a PSD Gram matrix `A`; nonnegative whenever `M ⪰ 0`.
pub fn sos_pairing_check(moment_matrix: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<f64> {
    if moment_matrix.shape() != gram.shape() || gram.nrows() != gram.ncols() {
        return Err(Error::DimensionMismatch {
            expected: moment_matrix.nrows(),
            found: gram.nrows(),
        });
    }
    let scale = gram.amax().max(1.0);
    if lambda_min(gram) < -1e-9 * scale {
        return Err(Error::Precondition("Gram matrix is not positive semidefinite".into()));
    }
    Ok(gram.dot(moment_matrix))
}

/// `max |y_α - Σ_i y_{α+2e_i}|` over `|α| <= level - 2`.
pub fn sphere_ideal_check(mv: &MomentVector<f64>) -> Result<f64> {
    if mv.level < 2 {
        return Ok(0.0);
    }
    let mut worst = 0f64;
    for alpha in monomial_index_set(mv.n, mv.level - 2) {
        let mut v = *mv.get(&alpha).ok_or(Error::LevelTooSmall {
            level: mv.level,
            minimum: alpha.degree(),
        })?;
        for i in 0..mv.n {
            v -= mv.get(&alpha.bump(i, 2)).copied().unwrap_or(0.0);
        }
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

/// `max |M_ij - M_kl|` over entries indexing the same monomial.
pub fn entry_consistency(index: &MomentMatrixIndex, m: &DMatrix<f64>) -> f64 {
    let mut first: BTreeMap<Monomial, f64> = BTreeMap::new();
    let mut worst = 0f64;
    for i in 0..index.size() {
        for j in 0..index.size() {
            let key = index.entry(i, j);
            let v = m[(i, j)];
            match first.get(&key) {
                Some(u) => worst = worst.max((u - v).abs()),
                None => {
                    first.insert(key, v);
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub level: u32,
    pub bound: f64,
    pub gap: f64,
    pub scaled_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateProbe {
    pub rows: Vec<RateRow>,
    pub max_scaled_gap: f64,
    /// `gap·r²` does not increase after the level where it peaks.
    pub non_increasing_after_max: bool,
}

/// Solves each level and tabulates `gap·r²` with `gap = val - bound`.
/// Gaps within `zero_tol` are treated as zero.
pub fn sphere_rate_probe(
    inst: &GmpInstance,
    levels: &[u32],
    val: f64,
    zero_tol: f64,
    opts: &SdpOptions,
) -> Result<RateProbe> {
    let d = inst.degree() / 2;
    if d as usize > inst.n() {
        return Err(Error::Precondition(format!(
            "rate estimate needs d <= n, got d = {d}, n = {}",
            inst.n()
        )));
    }
    let mut rows = Vec::new();
    for &r in levels {
        let rep = solve_level_sdp(inst, r, opts)?;
        let bound = rep
            .bound
            .ok_or_else(|| Error::Precondition(format!("level {r} ended with status {}", rep.status.as_str())))?;
        let mut gap = val - bound;
        if gap.abs() <= zero_tol {
            gap = 0.0;
        }
        rows.push(RateRow {
            level: r,
            bound,
            gap,
            scaled_gap: gap * (r as f64).powi(2),
        });
    }
    let (argmax, max_scaled_gap) = rows
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, row)| {
            if row.scaled_gap > acc.1 {
                (i, row.scaled_gap)
            } else {
                acc
            }
        });
    let non_increasing_after_max = rows
        .windows(2)
        .skip(argmax)
        .all(|w| w[1].scaled_gap <= w[0].scaled_gap + zero_tol);
    Ok(RateProbe {
        rows,
        max_scaled_gap,
        non_increasing_after_max,
    })
}
