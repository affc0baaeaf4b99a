//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use gmp_core::scalar::rat;
use gmp_core::solvers::{lambda_min, LinearProgram, RowSense, SdpSolution, SemidefiniteProgram};
use gmp_core::{Monomial, QPolynomial, Rational};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Dense copy of a random LP `min cᵀx, Ex = e, Ux <= u, x >= 0`.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub ub: Vec<(Vec<f64>, f64)>,
}

impl DenseLp {
    pub fn to_lp(&self) -> LinearProgram<f64> {
        let n = self.c.len();
        let mut lp = LinearProgram::new(n);
        lp.objective = self.c.clone();
        let sparse = |row: &[f64]| row.iter().copied().enumerate().filter(|(_, a)| *a != 0.0).collect();
        for (row, b) in &self.eq {
            lp.add_equality(sparse(row), *b);
        }
        for (row, b) in &self.ub {
            lp.add_less_equal(sparse(row), *b);
        }
        lp
    }
}

/// Entries are quarter integers so every sum is exact in `f64`. The box row
/// `Σx <= 10` keeps the LP bounded; feasibility holds unless
/// `allow_infeasible` replaced an equality right-hand side.
pub fn random_lp(rng: &mut impl Rng, max_vars: usize, allow_infeasible: bool) -> DenseLp {
    let n = rng.gen_range(2..=max_vars);
    let m_eq = rng.gen_range(0..=2.min(n - 1));
    let m_ub = rng.gen_range(1..=3);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=4) as f64 / 4.0).collect();
    let row = |rng: &mut dyn rand::RngCore| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect() };
    let dot = |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    let mut eq = Vec::new();
    for _ in 0..m_eq {
        let a = row(rng);
        let b = dot(&a, &x0);
        eq.push((a, b));
    }
    if allow_infeasible && !eq.is_empty() && rng.gen_bool(0.5) {
        eq[0].1 = rng.gen_range(-8i32..=8) as f64;
    }
    let mut ub = Vec::new();
    for _ in 0..m_ub {
        let a = row(rng);
        let b = dot(&a, &x0) + rng.gen_range(0..=4) as f64 / 4.0;
        ub.push((a, b));
    }
    ub.push((vec![1.0; n], 10.0));
    let c = row(rng);
    DenseLp { c, eq, ub }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Minimum over all basic feasible points; `None` if there is none.
pub fn vertex_enumeration(lp: &DenseLp) -> Option<f64> {
    let n = lp.c.len();
    // Inequalities g·x <= h, including x >= 0.
    let mut ineq: Vec<(Vec<f64>, f64)> = lp.ub.clone();
    for j in 0..n {
        let mut g = vec![0.0; n];
        g[j] = -1.0;
        ineq.push((g, 0.0));
    }
    let k = n.checked_sub(lp.eq.len())?;
    let mut best: Option<f64> = None;
    for active in combinations(ineq.len(), k) {
        let rows: Vec<&(Vec<f64>, f64)> = lp.eq.iter().chain(active.iter().map(|&i| &ineq[i])).collect();
        let a = DMatrix::from_fn(n, n, |i, j| rows[i].0[j]);
        let b = DVector::from_fn(n, |i, _| rows[i].1);
        let Some(x) = a.clone().lu().solve(&b) else { continue };
        if (&a * &x - &b).amax() > 1e-9 {
            continue;
        }
        let feasible = lp.eq.iter().all(|(g, h)| (dot(g, x.as_slice()) - h).abs() <= 1e-9)
            && ineq.iter().all(|(g, h)| dot(g, x.as_slice()) <= h + 1e-9);
        if feasible {
            let v = dot(&lp.c, x.as_slice());
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn random_symmetric(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = rng.gen_range(-3i32..=3) as f64;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

fn random_pd(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-2i32..=2) as f64);
    &g * g.transpose() + DMatrix::identity(k, k)
}

/// Strictly feasible on both sides, so an optimum exists.
pub fn random_sdp(rng: &mut impl Rng) -> SemidefiniteProgram {
    let k = rng.gen_range(2..=4);
    let m = rng.gen_range(1..=4);
    let x0 = random_pd(rng, k);
    let mut sdp = SemidefiniteProgram::new(k);
    let mut objective = random_pd(rng, k);
    for _ in 0..m {
        let a = random_symmetric(rng, k);
        let y0 = rng.gen_range(-2i32..=2) as f64;
        objective += &a * y0;
        let sense = match rng.gen_range(0..3) {
            0 => RowSense::Eq,
            1 => RowSense::Le,
            _ => RowSense::Ge,
        };
        let b = a.dot(&x0);
        // Keep x0 strictly inside and the dual sign constraint satisfied by
        // dropping y0 on inequality rows.
        let (rhs, y0_ok) = match sense {
            RowSense::Eq => (b, true),
            RowSense::Le => (b + 1.0, false),
            RowSense::Ge => (b - 1.0, false),
        };
        if !y0_ok {
            objective -= &a * y0;
        }
        sdp.add_row(a, sense, rhs);
    }
    sdp.objective = objective;
    sdp
}

/// Recomputes feasibility, weak duality and the reported residuals from the
/// raw solution.
pub fn check_sdp_contracts(sdp: &SemidefiniteProgram, sol: &SdpSolution, tol: f64) -> Result<(), String> {
    let x = &sol.x;
    if lambda_min(x) < -tol * (1.0 + x.amax()) {
        return Err(format!("X not PSD: λ_min = {}", lambda_min(x)));
    }
    let mut z = sdp.objective.clone();
    let b_norm = sdp.rows.iter().map(|r| r.rhs * r.rhs).sum::<f64>().sqrt();
    let mut dual_obj = 0.0;
    for (row, y) in sdp.rows.iter().zip(sol.duals.iter()) {
        z -= &row.coeffs * *y;
        dual_obj += row.rhs * y;
        let v = row.coeffs.dot(x);
        let (violation, sign_ok) = match row.sense {
            RowSense::Eq => ((v - row.rhs).abs(), true),
            RowSense::Le => ((v - row.rhs).max(0.0), *y <= tol),
            RowSense::Ge => ((row.rhs - v).max(0.0), *y >= -tol),
        };
        if violation > 10.0 * tol * (1.0 + b_norm) {
            return Err(format!("row violated by {violation}"));
        }
        if !sign_ok {
            return Err(format!("dual sign wrong on {:?} row: {y}", row.sense));
        }
    }
    let scale = 1.0 + sdp.objective.amax();
    if lambda_min(&z) < -10.0 * tol * scale {
        return Err(format!("Z not PSD: λ_min = {}", lambda_min(&z)));
    }
    let primal_obj = sdp.objective.dot(x);
    let slack = 10.0 * tol * (1.0 + primal_obj.abs() + dual_obj.abs());
    if dual_obj > primal_obj + slack {
        return Err(format!("weak duality violated: {dual_obj} > {primal_obj}"));
    }
    if (primal_obj - dual_obj).abs() > slack {
        return Err(format!("gap {} too large", primal_obj - dual_obj));
    }
    if (primal_obj - sol.objective).abs() > 1e-9 * (1.0 + primal_obj.abs()) {
        return Err("reported objective differs from ⟨C, X⟩".into());
    }
    if sol.residuals.primal > tol || sol.residuals.dual > tol || sol.residuals.gap > tol {
        return Err(format!("reported residuals {:?} exceed {tol}", sol.residuals));
    }
    Ok(())
}

/// Random rational in `[lo, hi]` with denominator at most 4.
pub fn random_rational(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    let q = rng.gen_range(1..=4);
    rat(rng.gen_range(lo * q..=hi * q), q)
}

/// Homogeneous form of degree `d` with every monomial present.
pub fn random_form(rng: &mut impl Rng, n: usize, d: u32, lo: i64, hi: i64) -> QPolynomial {
    let mut p = QPolynomial::zero(n);
    for m in gmp_core::poly::monomials_of_degree(n, d) {
        p.add_term(m, random_rational(rng, lo, hi));
    }
    p
}

/// `xᵀQx` with `Q` entrywise positive, hence positive on the simplex.
pub fn random_positive_quadratic(rng: &mut impl Rng, n: usize) -> QPolynomial {
    let mut p = QPolynomial::zero(n);
    for i in 0..n {
        for j in i..n {
            let m = Monomial::unit(n, i).bump(j, 1);
            // Off-diagonal entries may be negative as long as the form stays
            // positive; diagonal dominance on the simplex guarantees it.
            let c = if i == j { random_rational(rng, 2, 4) } else { random_rational(rng, -1, 3) };
            p.add_term(m, c);
        }
    }
    p
}
