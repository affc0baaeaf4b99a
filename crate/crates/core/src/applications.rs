//! Entry points that phrase concrete questions as moment problems and
//! interpret the resulting bounds.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp_hierarchy::solve_level;
use crate::model::{monomial_index_set, reference_moment, Domain, DomainKind, GmpInstance, MomentConstraint};
use crate::oracle::{default_resolution, grid_extrema, grid_extrema_fn};
use crate::poly::{parse_json, Monomial, Polynomial};
use crate::report::{num, LevelReport};
use crate::scalar::{rat, Rational, Scalar};
use crate::sdp_hierarchy::solve_level_sdp;
use crate::solvers::{LpOptions, SdpOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchySelector {
    Lp,
    Sdp,
    /// LP on the simplex, SDP on the sphere.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub hierarchy: HierarchySelector,
    pub tol: f64,
    /// Solve LP levels in exact rational arithmetic.
    pub exact: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            hierarchy: HierarchySelector::Auto,
            tol: 1e-8,
            exact: false,
        }
    }
}

/// Solves one level with the hierarchy matching the domain.
pub fn solve(inst: &GmpInstance, r: u32, opts: &SolveOptions) -> Result<LevelReport> {
    let kind = inst.domain().kind;
    let use_lp = match opts.hierarchy {
        HierarchySelector::Lp => true,
        HierarchySelector::Sdp => false,
        HierarchySelector::Auto => kind == DomainKind::Simplex,
    };
    if use_lp {
        if opts.exact {
            solve_level::<Rational>(inst, r, &LpOptions::default())
        } else {
            let lp_opts = LpOptions {
                tol: opts.tol,
                max_iterations: None,
            };
            solve_level::<f64>(inst, r, &lp_opts)
        }
    } else {
        let sdp_opts = SdpOptions {
            tol: opts.tol,
            ..SdpOptions::default()
        };
        solve_level_sdp(inst, r, &sdp_opts)
    }
}

/// Smallest level accepted by the hierarchy for this instance.
pub fn minimum_level(inst: &GmpInstance) -> u32 {
    match inst.domain().kind {
        DomainKind::Simplex => inst.degree(),
        DomainKind::Sphere => inst.degree().div_ceil(2),
    }
}

/// Lower bound on `min_K p` from `min ∫ p dμ` s.t. `∫ dμ = 1`.
pub fn polynomial_min(p: &Polynomial<Rational>, domain: Domain, r: u32, opts: &SolveOptions) -> Result<LevelReport> {
    let inst = GmpInstance::normalized_minimization(domain, p.clone())?;
    solve(&inst, r, opts)
}

/// Result of the rational-function precondition check.
#[derive(Debug, Clone, PartialEq)]
pub struct DenominatorCheck {
    pub grid_min: f64,
    pub warning: Option<String>,
}

const DENOMINATOR_SLACK: f64 = 1e-6;

/// Samples `q` on the domain grid; refuses when it drops below 1.
pub fn check_denominator(q: &Polynomial<Rational>, domain: Domain) -> Result<DenominatorCheck> {
    let e = grid_extrema(q, domain, default_resolution(domain))?;
    if e.min < 1.0 - DENOMINATOR_SLACK {
        return Err(Error::Precondition(format!(
            "denominator must be >= 1 on the domain; grid minimum is {} at {:?}. \
             Rescale it so that q >= 1 holds, otherwise the infimum of the moment problem \
             can differ from the infimum of p/q",
            num(e.min),
            e.argmin
        )));
    }
    let warning = (e.min < 1.0).then(|| {
        format!(
            "denominator grid minimum {} is below 1 by at most {DENOMINATOR_SLACK}",
            num(e.min)
        )
    });
    Ok(DenominatorCheck {
        grid_min: e.min,
        warning,
    })
}

/// Lower bound on `inf p/q` via `min ∫ p dμ` s.t. `∫ q dμ = 1`, `∫ dμ <= 1`.
///
/// When `n <= 3` the report carries a grid estimate of `inf p/q` under
/// `oracle_value`.
pub fn rational_min(
    p: &Polynomial<Rational>,
    q: &Polynomial<Rational>,
    domain: Domain,
    r: u32,
    opts: &SolveOptions,
) -> Result<LevelReport> {
    let check = check_denominator(q, domain)?;
    let inst = GmpInstance::new(
        domain,
        p.clone(),
        vec![MomentConstraint {
            poly: q.clone(),
            rhs: Rational::one(),
        }],
    )?;
    let mut report = solve(&inst, r, opts)?;
    report.set_extra("denominator_grid_min", num(check.grid_min));
    if let Some(w) = check.warning {
        report.notes.push(w);
    }
    if domain.n <= 3 {
        let pf = p.convert::<f64>();
        let qf = q.convert::<f64>();
        let e = grid_extrema_fn(domain, default_resolution(domain), |x| {
            pf.eval(x).expect("dimension checked") / qf.eval(x).expect("dimension checked")
        })?;
        report.set_extra("oracle_value", num(e.min));
    }
    Ok(report)
}

/// Simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        let mut adjacency = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self loop at vertex {u}")));
            }
            adjacency[u][v] = true;
            adjacency[v][u] = true;
        }
        Ok(Graph { n, adjacency })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawGraph = parse_json(text)?;
        if raw.n == 0 {
            return Err(Error::schema("$.n", "graph needs at least one vertex"));
        }
        for (i, [u, v]) in raw.edges.iter().enumerate() {
            if *u >= raw.n || *v >= raw.n {
                return Err(Error::schema(format!("$.edges[{i}]"), format!("vertex out of range for n = {}", raw.n)));
            }
            if u == v {
                return Err(Error::schema(format!("$.edges[{i}]"), "self loop"));
            }
        }
        let edges: Vec<(usize, usize)> = raw.edges.iter().map(|[u, v]| (*u, *v)).collect();
        Graph::new(raw.n, &edges)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Graph::new(n, &[])
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Graph::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).filter(move |&v| self.adjacency[u][v]).map(move |v| (u, v)))
            .collect()
    }

    /// `xᵀ(A + I)x`, whose minimum over the simplex is `1/α(G)`.
    pub fn motzkin_straus_form(&self) -> Polynomial<Rational> {
        let mut p = Polynomial::zero(self.n);
        for i in 0..self.n {
            p.add_term(Monomial::unit(self.n, i).bump(i, 1), Rational::one());
        }
        for (u, v) in self.edges() {
            p.add_term(Monomial::unit(self.n, u).bump(v, 1), rat(2, 1));
        }
        p
    }

    /// Exhaustive stability number; intended for small graphs.
    pub fn stability_number(&self) -> usize {
        let n = self.n;
        assert!(n <= 24, "exhaustive search is limited to 24 vertices");
        let masks: Vec<u32> = (0..n)
            .map(|u| (0..n).filter(|&v| self.adjacency[u][v]).fold(0u32, |m, v| m | (1 << v)))
            .collect();
        let mut best = 0;
        for set in 0u32..(1u32 << n) {
            let size = set.count_ones() as usize;
            if size <= best {
                continue;
            }
            if (0..n).all(|u| set & (1 << u) == 0 || set & masks[u] == 0) {
                best = size;
            }
        }
        best
    }
}

/// LP bound `L <= 1/α(G)` at level `r`, with `α <= 1/L` under
/// `alpha_upper_bound` when `L > 0`. The floor of `1/L` is a separate,
/// display-only field.
pub fn stable_set_bound(g: &Graph, r: u32, opts: &SolveOptions) -> Result<LevelReport> {
    if r < 2 {
        return Err(Error::LevelTooSmall { level: r, minimum: 2 });
    }
    let lp_opts = SolveOptions {
        hierarchy: HierarchySelector::Lp,
        ..*opts
    };
    let mut report = polynomial_min(&g.motzkin_straus_form(), Domain::simplex(g.n()), r, &lp_opts)?;
    if let Some(l) = report.bound {
        report.set_extra("inverse_alpha_lower_bound", num(l));
        if l > opts.tol.max(1e-12) {
            let alpha = 1.0 / l;
            report.set_extra("alpha_upper_bound", num(alpha));
            report.set_extra("alpha_upper_bound_floor", ((alpha + 1e-9).floor() as u64).to_string());
        } else {
            report.set_extra("alpha_upper_bound", "uninformative at this level");
        }
    }
    Ok(report)
}

/// Moments of the reference measure for all `|α| <= d`.
pub fn uniform_reference(domain: Domain, d: u32) -> BTreeMap<Monomial, Rational> {
    monomial_index_set(domain.n, d)
        .into_iter()
        .map(|m| {
            let v = reference_moment(domain, &m);
            (m, v)
        })
        .collect()
}

/// Instance `min ∫ x^β dμ` s.t. `∫ x^α dμ = m(α)` for `|α| <= d`.
///
/// On the sphere only even `|α|` are imposed. The reference must be
/// centrally symmetric (odd moments zero) and `|β|` even; averaging a
/// measure with its reflection then keeps every imposed moment and the
/// objective, so dropping the odd rows does not change the value.
pub fn cubature_instance(
    domain: Domain,
    d: u32,
    beta: &Monomial,
    reference: Option<&BTreeMap<Monomial, Rational>>,
) -> Result<GmpInstance> {
    if beta.dim() != domain.n {
        return Err(Error::DimensionMismatch {
            expected: domain.n,
            found: beta.dim(),
        });
    }
    if beta.degree() <= d {
        return Err(Error::Precondition(format!(
            "|beta| = {} must exceed the matched degree {d}",
            beta.degree()
        )));
    }
    let uniform;
    let reference = match reference {
        Some(r) => r,
        None => {
            uniform = uniform_reference(domain, d);
            &uniform
        }
    };
    let sphere = domain.kind == DomainKind::Sphere;
    if sphere && beta.degree() % 2 == 1 {
        return Err(Error::Precondition("on the sphere |beta| must be even".into()));
    }
    let mut constraints = Vec::new();
    for alpha in monomial_index_set(domain.n, d) {
        let value = reference
            .get(&alpha)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("reference moment for {alpha:?} missing")))?;
        if sphere && alpha.degree() % 2 == 1 {
            if !value.is_zero() {
                return Err(Error::Precondition(format!(
                    "reference moment {alpha:?} is nonzero; sphere cubature needs a centrally symmetric reference"
                )));
            }
            continue;
        }
        constraints.push(MomentConstraint {
            poly: Polynomial::from_monomial(alpha, Rational::one()),
            rhs: value,
        });
    }
    GmpInstance::new(domain, Polynomial::from_monomial(beta.clone(), Rational::one()), constraints)
}

/// Smallest `β`-moment among measures matching the reference up to degree
/// `d`. Reports `moment_match_residual` over `|α| <= d`.
pub fn cubature_bound(
    domain: Domain,
    d: u32,
    beta: &Monomial,
    r: u32,
    reference: Option<&BTreeMap<Monomial, Rational>>,
    opts: &SolveOptions,
) -> Result<LevelReport> {
    let uniform;
    let reference = match reference {
        Some(r) => r,
        None => {
            uniform = uniform_reference(domain, d);
            &uniform
        }
    };
    let inst = cubature_instance(domain, d, beta, Some(reference))?;
    let mut report = solve(&inst, r, opts)?;
    if let Some(mv) = report.moments.as_mut() {
        if domain.kind == DomainKind::Sphere {
            // Report the reflection-averaged measure.
            for (m, v) in mv.values.iter_mut() {
                if m.degree() % 2 == 1 {
                    *v = 0.0;
                }
            }
        }
        let mut worst = 0f64;
        for alpha in monomial_index_set(domain.n, d) {
            let y = mv.get(&alpha).copied().unwrap_or(f64::NAN);
            worst = worst.max((y - reference[&alpha].to_f64()).abs());
        }
        report.set_extra("moment_match_residual", num(worst));
    }
    Ok(report)
}
