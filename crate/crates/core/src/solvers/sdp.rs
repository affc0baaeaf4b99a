//! Primal-dual interior point method for a single PSD block plus a
//! nonnegative orthant.
//!
//! Kernel form:
//!
//! ```text
//! (P)  min ⟨C, X⟩ + cᵀx   s.t. ⟨A_k, X⟩ + a_kᵀx = b_k,  X ⪰ 0, x >= 0
//! (D)  max bᵀy            s.t. Z = C - Σ y_k A_k ⪰ 0,  z = c - Σ y_k a_k >= 0
//! ```
//!
//! Search directions use Nesterov-Todd scaling and a Mehrotra-type
//! centering parameter. Everything is dense `f64`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, LU, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    pub c_mat: DMatrix<f64>,
    pub a_mats: Vec<DMatrix<f64>>,
    pub c_lin: DVector<f64>,
    /// `p × m`; column `k` is `a_k`.
    pub a_lin: DMatrix<f64>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    /// (P) has no feasible point; a dual improving ray is attached.
    Infeasible,
    /// (P) is unbounded below; a primal ray is attached.
    Unbounded,
    NumericalFailure,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SdpCertificate {
    /// `bᵀy > 0`, `-Σ y_k A_k ⪰ 0`, `-Σ y_k a_k >= 0` (up to tolerance).
    DualRay { y: DVector<f64> },
    /// `⟨C,X⟩ + cᵀx < 0`, `⟨A_k,X⟩ + a_kᵀx = 0`, `X ⪰ 0`, `x >= 0`.
    PrimalRay { x_mat: DMatrix<f64>, x_lin: DVector<f64> },
}

/// Relative residuals: `‖rp‖/(1+‖b‖)`, `‖(Rd, rd)‖/(1+‖(C, c)‖)` and
/// `|pobj - dobj|/(1+|pobj|+|dobj|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SdpStatus,
    pub x_mat: DMatrix<f64>,
    pub x_lin: DVector<f64>,
    pub y: DVector<f64>,
    pub z_mat: DMatrix<f64>,
    pub z_lin: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: SdpResiduals,
    pub certificate: Option<SdpCertificate>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_iterations: 100,
        }
    }
}

const STEP_FRACTION: f64 = 0.95;
const INFEASIBILITY_TOL: f64 = 1e-8;

impl ConicProblem {
    pub fn block_dim(&self) -> usize {
        self.c_mat.nrows()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.c_mat.nrows();
        let m = self.b.len();
        let p = self.c_lin.len();
        if self.c_mat.ncols() != n {
            return Err(Error::InvalidInput("objective block is not square".into()));
        }
        if self.a_mats.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.a_mats.len(),
            });
        }
        if self.a_lin.nrows() != p || self.a_lin.ncols() != m {
            return Err(Error::InvalidInput(format!(
                "linear coefficient matrix is {}x{}, expected {p}x{m}",
                self.a_lin.nrows(),
                self.a_lin.ncols()
            )));
        }
        for (k, a) in std::iter::once(&self.c_mat).chain(&self.a_mats).enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::InvalidInput(format!("coefficient matrix {k} has wrong shape")));
            }
            if !is_symmetric(a) {
                return Err(Error::InvalidInput(format!("coefficient matrix {k} is not symmetric")));
            }
        }
        let finite = |v: &f64| v.is_finite();
        if !(self.c_mat.iter().all(finite)
            && self.a_mats.iter().all(|a| a.iter().all(finite))
            && self.c_lin.iter().all(finite)
            && self.a_lin.iter().all(finite)
            && self.b.iter().all(finite))
        {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// `(⟨A_k, X⟩ + a_kᵀx)_k`.
    pub fn apply(&self, x_mat: &DMatrix<f64>, x_lin: &DVector<f64>) -> DVector<f64> {
        let mut v = DVector::from_iterator(self.b.len(), self.a_mats.iter().map(|a| a.dot(x_mat)));
        if !x_lin.is_empty() {
            v += self.a_lin.transpose() * x_lin;
        }
        v
    }

    /// `(Σ y_k A_k, Σ y_k a_k)`.
    pub fn adjoint(&self, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.block_dim();
        let mut s = DMatrix::zeros(n, n);
        for (a, yk) in self.a_mats.iter().zip(y.iter()) {
            if *yk != 0.0 {
                s += a * *yk;
            }
        }
        (s, &self.a_lin * y)
    }

    pub fn primal_objective(&self, x_mat: &DMatrix<f64>, x_lin: &DVector<f64>) -> f64 {
        self.c_mat.dot(x_mat) + self.c_lin.dot(x_lin)
    }
}

fn is_symmetric(a: &DMatrix<f64>) -> bool {
    let scale = a.amax().max(1.0);
    (a - a.transpose()).amax() <= 1e-12 * scale
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let t = a.transpose();
    *a += t;
    *a *= 0.5;
}

/// Smallest eigenvalue of a symmetric matrix (`+∞` for an empty one).
pub fn lambda_min(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}

/// Largest `α` with `L Lᵀ + α D ⪰ 0` (`+∞` if unrestricted).
fn max_step_psd(l: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    if d.nrows() == 0 {
        return f64::INFINITY;
    }
    let Some(t1) = l.solve_lower_triangular(d) else {
        return 0.0;
    };
    let Some(mut t) = l.solve_lower_triangular(&t1.transpose()) else {
        return 0.0;
    };
    symmetrize(&mut t);
    let lmin = lambda_min(&t);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn max_step_lin(x: &DVector<f64>, d: &DVector<f64>) -> f64 {
    x.iter()
        .zip(d.iter())
        .filter(|(_, di)| **di < 0.0)
        .map(|(xi, di)| -xi / di)
        .fold(f64::INFINITY, f64::min)
}

struct Direction {
    dx_mat: DMatrix<f64>,
    dx_lin: DVector<f64>,
    dy: DVector<f64>,
    dz_mat: DMatrix<f64>,
    dz_lin: DVector<f64>,
}

enum SchurFactor {
    Cholesky(Cholesky<f64, nalgebra::Dyn>),
    Lu(LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurFactor {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(SchurFactor::Cholesky(ch));
        }
        let lu = LU::new(m);
        if lu.is_invertible() {
            Some(SchurFactor::Lu(lu))
        } else {
            None
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            SchurFactor::Cholesky(ch) => Some(ch.solve(rhs)),
            SchurFactor::Lu(lu) => lu.solve(rhs),
        }
    }
}

fn initial_scale(prob: &ConicProblem) -> (f64, f64) {
    let n = prob.block_dim().max(1) as f64;
    let mut xi = 10f64.max(n.sqrt());
    let mut eta = 10f64.max(n.sqrt()).max(prob.c_mat.norm()).max(prob.c_lin.amax());
    for (k, a) in prob.a_mats.iter().enumerate() {
        let na = a.norm() + prob.a_lin.column(k).norm();
        xi = xi.max(n * (1.0 + prob.b[k].abs()) / (1.0 + na));
        eta = eta.max(na);
    }
    (xi, eta)
}

/// Solves the kernel problem. Malformed data is an error; everything else
/// is reported through [`SdpStatus`].
pub fn conic_solve(prob: &ConicProblem, opts: &SdpOptions) -> Result<ConicSolution> {
    prob.validate()?;
    let n = prob.block_dim();
    let m = prob.num_rows();
    let p = prob.c_lin.len();
    if m == 0 {
        return Ok(solve_without_rows(prob, opts));
    }
    if n + p == 0 {
        return Err(Error::InvalidInput("problem has no variables".into()));
    }

    let (xi, eta) = initial_scale(prob);
    let mut x_mat = DMatrix::<f64>::identity(n, n) * xi;
    let mut x_lin = DVector::<f64>::from_element(p, xi);
    let mut y = DVector::<f64>::zeros(m);
    let mut z_mat = DMatrix::<f64>::identity(n, n) * eta;
    let mut z_lin = DVector::<f64>::from_element(p, eta);

    let norm_b = prob.b.norm();
    let norm_c = prob.c_mat.norm() + prob.c_lin.norm();
    let cone_dim = (n + p) as f64;
    let mut stalled = 0usize;

    let finish = |status: SdpStatus,
                  certificate: Option<SdpCertificate>,
                  iterations: usize,
                  x_mat: DMatrix<f64>,
                  x_lin: DVector<f64>,
                  y: DVector<f64>,
                  z_mat: DMatrix<f64>,
                  z_lin: DVector<f64>| {
        let residuals = residuals(prob, &x_mat, &x_lin, &y, &z_mat, &z_lin);
        ConicSolution {
            status,
            primal_objective: prob.primal_objective(&x_mat, &x_lin),
            dual_objective: prob.b.dot(&y),
            x_mat,
            x_lin,
            y,
            z_mat,
            z_lin,
            residuals,
            certificate,
            iterations,
        }
    };

    for iter in 0..opts.max_iterations {
        let rp = &prob.b - prob.apply(&x_mat, &x_lin);
        let (ay_mat, ay_lin) = prob.adjoint(&y);
        let rd_mat = &prob.c_mat - &ay_mat - &z_mat;
        let rd_lin = &prob.c_lin - &ay_lin - &z_lin;
        let pobj = prob.primal_objective(&x_mat, &x_lin);
        let dobj = prob.b.dot(&y);
        let mu = (x_mat.dot(&z_mat) + x_lin.dot(&z_lin)) / cone_dim;

        let res = SdpResiduals {
            primal: rp.norm() / (1.0 + norm_b),
            dual: (rd_mat.norm() + rd_lin.norm()) / (1.0 + norm_c),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        if res.primal <= opts.tol && res.dual <= opts.tol && res.gap <= opts.tol {
            return Ok(finish(SdpStatus::Optimal, None, iter, x_mat, x_lin, y, z_mat, z_lin));
        }
        if dobj > 0.0 {
            let spread = (norm_c + rd_mat.norm() + rd_lin.norm()) / dobj;
            if spread < INFEASIBILITY_TOL {
                let cert = SdpCertificate::DualRay { y: &y / dobj };
                return Ok(finish(SdpStatus::Infeasible, Some(cert), iter, x_mat, x_lin, y, z_mat, z_lin));
            }
        }
        if pobj < 0.0 {
            let spread = (norm_b + rp.norm()) / -pobj;
            if spread < INFEASIBILITY_TOL {
                let cert = SdpCertificate::PrimalRay {
                    x_mat: &x_mat / -pobj,
                    x_lin: &x_lin / -pobj,
                };
                return Ok(finish(SdpStatus::Unbounded, Some(cert), iter, x_mat, x_lin, y, z_mat, z_lin));
            }
        }

        let (Some(chx), Some(chz)) = (Cholesky::new(x_mat.clone()), Cholesky::new(z_mat.clone())) else {
            return Ok(finish(SdpStatus::NumericalFailure, None, iter, x_mat, x_lin, y, z_mat, z_lin));
        };
        let lx = chx.l();
        let lz = chz.l();

        // Nesterov-Todd point W with W Z W = X.
        let w = if n > 0 {
            let svd = SVD::new(lz.transpose() * &lx, false, true);
            let Some(v_t) = svd.v_t else {
                return Ok(finish(SdpStatus::NumericalFailure, None, iter, x_mat, x_lin, y, z_mat, z_lin));
            };
            let d_inv_sqrt = svd.singular_values.map(|s| 1.0 / s.sqrt());
            let g = &lx * v_t.transpose() * DMatrix::from_diagonal(&d_inv_sqrt);
            let mut w = &g * g.transpose();
            symmetrize(&mut w);
            w
        } else {
            DMatrix::zeros(0, 0)
        };
        let z_inv = {
            let mut zi = chz.inverse();
            symmetrize(&mut zi);
            zi
        };
        let ratio = x_lin.component_div(&z_lin);

        let waw: Vec<DMatrix<f64>> = prob.a_mats.iter().map(|a| &w * a * &w).collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        let scaled_a_lin = DMatrix::from_fn(p, m, |l, k| ratio[l] * prob.a_lin[(l, k)]);
        let lin_part = prob.a_lin.transpose() * &scaled_a_lin;
        for i in 0..m {
            for j in i..m {
                let v = prob.a_mats[i].dot(&waw[j]) + lin_part[(i, j)];
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let Some(factor) = SchurFactor::new(schur) else {
            return Ok(finish(SdpStatus::NumericalFailure, None, iter, x_mat, x_lin, y, z_mat, z_lin));
        };
        let w_rd_w = &w * &rd_mat * &w;

        let direction = |sigma_mu: f64| -> Option<Direction> {
            let mut rc_mat = &z_inv * sigma_mu - &x_mat - &w_rd_w;
            symmetrize(&mut rc_mat);
            let rc_lin = DVector::from_fn(p, |l, _| {
                sigma_mu / z_lin[l] - x_lin[l] - ratio[l] * rd_lin[l]
            });
            let rhs = &rp - prob.apply(&rc_mat, &rc_lin);
            let dy = factor.solve(&rhs)?;
            if dy.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let (ady_mat, ady_lin) = prob.adjoint(&dy);
            let mut dz_mat = &rd_mat - &ady_mat;
            symmetrize(&mut dz_mat);
            let dz_lin = &rd_lin - &ady_lin;
            let mut dx_mat = rc_mat;
            for (k, wk) in waw.iter().enumerate() {
                if dy[k] != 0.0 {
                    dx_mat += wk * dy[k];
                }
            }
            symmetrize(&mut dx_mat);
            let dx_lin = rc_lin + ratio.component_mul(&ady_lin);
            Some(Direction {
                dx_mat,
                dx_lin,
                dy,
                dz_mat,
                dz_lin,
            })
        };
        let steps = |d: &Direction| -> (f64, f64) {
            let ap = max_step_psd(&lx, &d.dx_mat).min(max_step_lin(&x_lin, &d.dx_lin));
            let ad = max_step_psd(&lz, &d.dz_mat).min(max_step_lin(&z_lin, &d.dz_lin));
            (ap, ad)
        };

        let Some(pred) = direction(0.0) else {
            return Ok(finish(SdpStatus::NumericalFailure, None, iter, x_mat, x_lin, y, z_mat, z_lin));
        };
        let (ap, ad) = steps(&pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = ((&x_mat + &pred.dx_mat * ap).dot(&(&z_mat + &pred.dz_mat * ad))
            + (&x_lin + &pred.dx_lin * ap).dot(&(&z_lin + &pred.dz_lin * ad)))
            / cone_dim;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let Some(corr) = direction(sigma * mu) else {
            return Ok(finish(SdpStatus::NumericalFailure, None, iter, x_mat, x_lin, y, z_mat, z_lin));
        };
        let (ap, ad) = steps(&corr);
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);

        x_mat += &corr.dx_mat * ap;
        x_lin += &corr.dx_lin * ap;
        y += &corr.dy * ad;
        z_mat += &corr.dz_mat * ad;
        z_lin += &corr.dz_lin * ad;
        symmetrize(&mut x_mat);
        symmetrize(&mut z_mat);

        if ap < 1e-10 && ad < 1e-10 {
            stalled += 1;
            if stalled >= 3 {
                return Ok(finish(SdpStatus::NumericalFailure, None, iter + 1, x_mat, x_lin, y, z_mat, z_lin));
            }
        } else {
            stalled = 0;
        }
    }
    let iters = opts.max_iterations;
    Ok(finish(SdpStatus::MaxIterations, None, iters, x_mat, x_lin, y, z_mat, z_lin))
}

/// With no rows (P) is `min ⟨C,X⟩ + cᵀx` over the cone: zero if `C ⪰ 0`
/// and `c >= 0`, unbounded otherwise.
fn solve_without_rows(prob: &ConicProblem, opts: &SdpOptions) -> ConicSolution {
    let n = prob.block_dim();
    let p = prob.c_lin.len();
    let eig = (n > 0).then(|| SymmetricEigen::new(prob.c_mat.clone()));
    let lmin = eig.as_ref().map_or(f64::INFINITY, |e| e.eigenvalues.min());
    let cmin = prob.c_lin.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = 1.0 + prob.c_mat.amax().max(prob.c_lin.amax());
    let mut sol = ConicSolution {
        status: SdpStatus::Optimal,
        x_mat: DMatrix::zeros(n, n),
        x_lin: DVector::zeros(p),
        y: DVector::zeros(0),
        z_mat: prob.c_mat.clone(),
        z_lin: prob.c_lin.clone(),
        primal_objective: 0.0,
        dual_objective: 0.0,
        residuals: SdpResiduals {
            primal: 0.0,
            dual: 0.0,
            gap: 0.0,
        },
        certificate: None,
        iterations: 0,
    };
    if lmin >= -opts.tol * scale && cmin >= -opts.tol * scale {
        return sol;
    }
    sol.status = SdpStatus::Unbounded;
    let mut x_mat = DMatrix::zeros(n, n);
    let mut x_lin = DVector::zeros(p);
    if lmin < cmin {
        let e = eig.expect("block present");
        let k = e.eigenvalues.imin();
        let v = e.eigenvectors.column(k);
        x_mat = &v * v.transpose();
    } else {
        x_lin[prob.c_lin.imin()] = 1.0;
    }
    sol.certificate = Some(SdpCertificate::PrimalRay { x_mat, x_lin });
    sol
}

fn residuals(
    prob: &ConicProblem,
    x_mat: &DMatrix<f64>,
    x_lin: &DVector<f64>,
    y: &DVector<f64>,
    z_mat: &DMatrix<f64>,
    z_lin: &DVector<f64>,
) -> SdpResiduals {
    let rp = &prob.b - prob.apply(x_mat, x_lin);
    let (ay_mat, ay_lin) = prob.adjoint(y);
    let rd_mat = &prob.c_mat - &ay_mat - z_mat;
    let rd_lin = &prob.c_lin - &ay_lin - z_lin;
    let pobj = prob.primal_objective(x_mat, x_lin);
    let dobj = prob.b.dot(y);
    SdpResiduals {
        primal: rp.norm() / (1.0 + prob.b.norm()),
        dual: (rd_mat.norm() + rd_lin.norm()) / (1.0 + prob.c_mat.norm() + prob.c_lin.norm()),
        gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSense {
    Eq,
    Le,
    Ge,
}

/// `⟨coeffs, X⟩ (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpRow {
    pub coeffs: DMatrix<f64>,
    pub rhs: f64,
    pub sense: RowSense,
}

/// `min ⟨objective, X⟩` over `X ⪰ 0` subject to the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SemidefiniteProgram {
    pub block_dim: usize,
    pub objective: DMatrix<f64>,
    pub rows: Vec<SdpRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: DMatrix<f64>,
    /// One multiplier per row; `>= 0` for `Ge`, `<= 0` for `Le`.
    pub duals: DVector<f64>,
    pub dual_slack: DMatrix<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub residuals: SdpResiduals,
    pub lambda_min_x: f64,
    pub iterations: usize,
}

impl SemidefiniteProgram {
    pub fn new(block_dim: usize) -> Self {
        SemidefiniteProgram {
            block_dim,
            objective: DMatrix::zeros(block_dim, block_dim),
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: DMatrix<f64>, sense: RowSense, rhs: f64) {
        self.rows.push(SdpRow { coeffs, rhs, sense });
    }

    /// Kernel form with one nonnegative slack per inequality row.
    pub fn to_conic(&self) -> Result<ConicProblem> {
        let n = self.block_dim;
        if self.objective.shape() != (n, n) {
            return Err(Error::InvalidInput("objective has wrong shape".into()));
        }
        let m = self.rows.len();
        let slack_rows: Vec<usize> = (0..m).filter(|&k| self.rows[k].sense != RowSense::Eq).collect();
        let p = slack_rows.len();
        let mut a_lin = DMatrix::zeros(p, m);
        for (l, &k) in slack_rows.iter().enumerate() {
            a_lin[(l, k)] = if self.rows[k].sense == RowSense::Le { 1.0 } else { -1.0 };
        }
        let prob = ConicProblem {
            c_mat: self.objective.clone(),
            a_mats: self.rows.iter().map(|r| r.coeffs.clone()).collect(),
            c_lin: DVector::zeros(p),
            a_lin,
            b: DVector::from_iterator(m, self.rows.iter().map(|r| r.rhs)),
        };
        prob.validate()?;
        Ok(prob)
    }
}

pub fn sdp_solve(sdp: &SemidefiniteProgram, opts: &SdpOptions) -> Result<SdpSolution> {
    let prob = sdp.to_conic()?;
    let sol = conic_solve(&prob, opts)?;
    Ok(SdpSolution {
        status: sol.status,
        lambda_min_x: lambda_min(&sol.x_mat),
        x: sol.x_mat,
        duals: sol.y,
        dual_slack: sol.z_mat,
        objective: sol.primal_objective,
        dual_objective: sol.dual_objective,
        residuals: sol.residuals,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(n, n);
        e[(i, j)] = if i == j { 1.0 } else { 0.5 };
        e[(j, i)] = e[(i, j)];
        e
    }

    #[test]
    fn trace_with_fixed_corner() {
        let mut sdp = SemidefiniteProgram::new(2);
        sdp.objective = DMatrix::identity(2, 2);
        sdp.add_row(unit(2, 0, 0), RowSense::Eq, 1.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        assert!(sol.lambda_min_x >= -1e-8);
    }

    #[test]
    fn correlation_extreme_point() {
        let mut sdp = SemidefiniteProgram::new(2);
        sdp.objective = unit(2, 0, 1);
        sdp.add_row(unit(2, 0, 0), RowSense::Eq, 1.0);
        sdp.add_row(unit(2, 1, 1), RowSense::Eq, 1.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-7, "{}", sol.objective);
    }

    #[test]
    fn smallest_eigenvalue_as_dual() {
        // min ⟨A, X⟩ s.t. tr X = 1 has value λ_min(A); its dual is
        // max t s.t. A - tI ⪰ 0.
        let mut sdp = SemidefiniteProgram::new(2);
        sdp.objective = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        sdp.add_row(DMatrix::identity(2, 2), RowSense::Eq, 1.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.dual_objective - 1.0).abs() < 1e-7);
        assert!((sol.duals[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inequality_rows() {
        // min X11 s.t. X11 >= 2 → 2
        let mut sdp = SemidefiniteProgram::new(1);
        sdp.objective = DMatrix::identity(1, 1);
        sdp.add_row(DMatrix::identity(1, 1), RowSense::Ge, 2.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-7);
    }

    #[test]
    fn detects_infeasibility() {
        // X11 = -1 with X ⪰ 0
        let mut sdp = SemidefiniteProgram::new(2);
        sdp.add_row(unit(2, 0, 0), RowSense::Eq, -1.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        // min -X12 s.t. X11 - X22 = 0
        let mut sdp = SemidefiniteProgram::new(2);
        sdp.objective = -unit(2, 0, 1);
        sdp.add_row(unit(2, 0, 0) - unit(2, 1, 1), RowSense::Eq, 0.0);
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    #[test]
    fn rejects_asymmetric_data() {
        let mut sdp = SemidefiniteProgram::new(2);
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = 1.0;
        sdp.add_row(a, RowSense::Eq, 1.0);
        assert!(sdp_solve(&sdp, &SdpOptions::default()).is_err());
    }

    #[test]
    fn rowless_problem() {
        let sdp = SemidefiniteProgram {
            block_dim: 2,
            objective: DMatrix::identity(2, 2),
            rows: vec![],
        };
        let sol = sdp_solve(&sdp, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_eq!(sol.objective, 0.0);
    }
}
