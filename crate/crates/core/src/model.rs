//! Generalized moment problem instances over the simplex and the sphere.
//!
//! An instance asks for a positive measure `μ` on `K` minimizing `∫ f0 dμ`
//! subject to `∫ fi dμ = bi` and `∫ dμ <= 1`. After canonicalization every
//! polynomial is a form of one common degree that agrees with the input on
//! `K`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{homogenize, monomials_up_to, parse_json, CoefValue, Monomial, Polynomial, RawPolynomial};
use crate::scalar::{factorial, parse_rational, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Simplex,
    Sphere,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Simplex => write!(f, "simplex"),
            DomainKind::Sphere => write!(f, "sphere"),
        }
    }
}

/// The probability simplex `Δ_{n-1}` or the unit sphere `S^{n-1}` in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub n: usize,
}

impl Domain {
    pub fn simplex(n: usize) -> Self {
        Domain {
            kind: DomainKind::Simplex,
            n,
        }
    }

    pub fn sphere(n: usize) -> Self {
        Domain {
            kind: DomainKind::Sphere,
            n,
        }
    }

    /// The form equal to one on the domain: `(Σ xi)^d` or `‖x‖^d`.
    pub fn unit_form(&self, degree: u32) -> Result<Polynomial<Rational>> {
        homogenize(&Polynomial::one(self.n), degree, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentConstraint {
    pub poly: Polynomial<Rational>,
    pub rhs: Rational,
}

/// Canonicalized instance: all data homogeneous of degree [`Self::degree`].
#[derive(Debug, Clone, PartialEq)]
pub struct GmpInstance {
    domain: Domain,
    objective: Polynomial<Rational>,
    constraints: Vec<MomentConstraint>,
    degree: u32,
    reference_moments: Option<BTreeMap<Monomial, Rational>>,
}

impl GmpInstance {
    /// Validates dimensions and lifts every polynomial to the common
    /// maximal degree (rounded up to even on the sphere).
    pub fn new(
        domain: Domain,
        objective: Polynomial<Rational>,
        constraints: Vec<MomentConstraint>,
    ) -> Result<Self> {
        canonicalize(domain, objective, constraints, None).map_err(|(_, e)| e)
    }

    /// `min ∫ p dμ` subject to `∫ dμ = 1`, the normalization lifted to the
    /// degree of `p` by canonicalization.
    pub fn normalized_minimization(domain: Domain, p: Polynomial<Rational>) -> Result<Self> {
        let n = domain.n;
        Self::new(
            domain,
            p,
            vec![MomentConstraint {
                poly: Polynomial::one(n),
                rhs: Rational::one(),
            }],
        )
    }

    pub fn with_reference_moments(mut self, moments: BTreeMap<Monomial, Rational>) -> Result<Self> {
        for m in moments.keys() {
            if m.dim() != self.domain.n {
                return Err(Error::DimensionMismatch {
                    expected: self.domain.n,
                    found: m.dim(),
                });
            }
        }
        self.reference_moments = Some(moments);
        Ok(self)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.n
    }

    pub fn objective(&self) -> &Polynomial<Rational> {
        &self.objective
    }

    pub fn constraints(&self) -> &[MomentConstraint] {
        &self.constraints
    }

    /// Common homogeneous degree (`d` on the simplex, `2d` on the sphere).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn reference_moments(&self) -> Option<&BTreeMap<Monomial, Rational>> {
        self.reference_moments.as_ref()
    }

    /// Re-runs canonicalization on the stored data.
    pub fn recanonicalize(&self) -> Result<Self> {
        let mut out = Self::new(self.domain, self.objective.clone(), self.constraints.clone())?;
        out.reference_moments = self.reference_moments.clone();
        Ok(out)
    }
}

fn canonicalize(
    domain: Domain,
    objective: Polynomial<Rational>,
    constraints: Vec<MomentConstraint>,
    reference_moments: Option<BTreeMap<Monomial, Rational>>,
) -> std::result::Result<GmpInstance, (Option<usize>, Error)> {
    if domain.n == 0 {
        return Err((None, Error::InvalidInput("dimension n must be at least 1".into())));
    }
    let check = |p: &Polynomial<Rational>, idx: Option<usize>| {
        if p.n() != domain.n {
            Err((
                idx,
                Error::DimensionMismatch {
                    expected: domain.n,
                    found: p.n(),
                },
            ))
        } else {
            Ok(())
        }
    };
    check(&objective, None)?;
    for (i, c) in constraints.iter().enumerate() {
        check(&c.poly, Some(i))?;
    }
    let mut degree = constraints
        .iter()
        .map(|c| c.poly.degree())
        .chain(std::iter::once(objective.degree()))
        .max()
        .unwrap_or(0);
    if domain.kind == DomainKind::Sphere && degree % 2 == 1 {
        degree += 1;
    }
    let objective = homogenize(&objective, degree, domain.kind).map_err(|e| (None, e))?;
    let constraints = constraints
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(MomentConstraint {
                poly: homogenize(&c.poly, degree, domain.kind).map_err(|e| (Some(i), e))?,
                rhs: c.rhs,
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(GmpInstance {
        domain,
        objective,
        constraints,
        degree,
        reference_moments,
    })
}

/// Pseudo-moments `y_α = L(x^α)` for all `|α| <= level`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T> {
    pub level: u32,
    pub n: usize,
    pub values: BTreeMap<Monomial, T>,
}

impl<T: Scalar> MomentVector<T> {
    pub fn get(&self, m: &Monomial) -> Option<&T> {
        self.values.get(m)
    }

    /// `L(p) = Σ p_α y_α`; fails if `p` has a term above the level.
    pub fn apply(&self, p: &Polynomial<Rational>) -> Result<T> {
        let mut acc = T::zero();
        for (m, c) in p.terms() {
            let y = self.values.get(m).ok_or(Error::LevelTooSmall {
                level: self.level,
                minimum: m.degree(),
            })?;
            acc = acc + T::from_rational(c) * y.clone();
        }
        Ok(acc)
    }

    /// Moments of the uniform probability measure on the domain.
    pub fn reference(domain: Domain, level: u32) -> Self {
        let values = monomial_index_set(domain.n, level)
            .into_iter()
            .map(|m| {
                let v = T::from_rational(&reference_moment(domain, &m));
                (m, v)
            })
            .collect();
        MomentVector {
            level,
            n: domain.n,
            values,
        }
    }

    /// Checks mass in `[0, 1 + tol]`, completeness, and (simplex)
    /// nonnegativity up to `tol`.
    pub fn check_invariants(&self, kind: DomainKind, tol: f64) -> std::result::Result<(), String> {
        for m in monomial_index_set(self.n, self.level) {
            if !self.values.contains_key(&m) {
                return Err(format!("missing moment {m:?}"));
            }
        }
        let y0 = self.values[&Monomial::one(self.n)].to_f64();
        if y0 < -tol || y0 > 1.0 + tol {
            return Err(format!("mass {y0} outside [0, 1]"));
        }
        if kind == DomainKind::Simplex {
            if let Some((m, v)) = self.values.iter().find(|(_, v)| v.to_f64() < -tol) {
                return Err(format!("negative moment {m:?} = {}", v.to_f64()));
            }
        }
        Ok(())
    }
}

/// `{α : |α| <= t}` in graded-lex order; `C(n+t, t)` entries.
pub fn monomial_index_set(n: usize, t: u32) -> Vec<Monomial> {
    monomials_up_to(n, t)
}

/// `∫ x^α dμ0` for the uniform probability measure `μ0` on the domain.
///
/// Simplex: `(n-1)! ∏ αi! / (|α| + n - 1)!`.
/// Sphere: zero unless all `αi` are even, else
/// `∏ (αi - 1)!! / ∏_{j < |α|/2} (n + 2j)`.
pub fn reference_moment(domain: Domain, alpha: &Monomial) -> Rational {
    let n = domain.n as u32;
    match domain.kind {
        DomainKind::Simplex => {
            let num: BigInt = alpha
                .exponents()
                .iter()
                .map(|&a| factorial(a))
                .product::<BigInt>()
                * factorial(n - 1);
            Rational::new(num, factorial(alpha.degree() + n - 1))
        }
        DomainKind::Sphere => {
            if !alpha.is_even() {
                return Rational::zero();
            }
            let num: BigInt = alpha.exponents().iter().map(|&a| double_factorial_odd(a)).product();
            let half = alpha.degree() / 2;
            let den: BigInt = (0..half).map(|j| BigInt::from(n + 2 * j)).product();
            Rational::new(num, den)
        }
    }
}

/// `(a - 1)!!` for even `a`, with `(-1)!! = 1`.
fn double_factorial_odd(a: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = a as i64 - 1;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstraint {
    pub poly: RawPolynomial,
    pub rhs: CoefValue,
}

/// Instance file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub domain: Domain,
    pub objective: RawPolynomial,
    #[serde(default)]
    pub constraints: Vec<RawConstraint>,
    /// Keys are comma separated exponents, e.g. `"2,0"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_moments: Option<BTreeMap<String, CoefValue>>,
}

/// Parses raw data and canonicalizes it; errors carry the JSON path of the
/// offending field.
pub fn validate_and_canonicalize(raw: &RawInstance) -> Result<GmpInstance> {
    let n = raw.domain.n;
    if n == 0 {
        return Err(Error::schema("$.domain.n", "dimension must be at least 1"));
    }
    let objective = raw.objective.to_polynomial("$.objective")?;
    if objective.n() != n {
        return Err(Error::schema(
            "$.objective.n",
            format!("polynomial has {} variables, domain has {n}", objective.n()),
        ));
    }
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.iter().enumerate() {
        let path = format!("$.constraints[{i}]");
        let poly = c.poly.to_polynomial(&format!("{path}.poly"))?;
        if poly.n() != n {
            return Err(Error::schema(
                format!("{path}.poly.n"),
                format!("polynomial has {} variables, domain has {n}", poly.n()),
            ));
        }
        let rhs = c
            .rhs
            .to_rational()
            .ok_or_else(|| Error::schema(format!("{path}.rhs"), "not a decimal or rational number"))?;
        constraints.push(MomentConstraint { poly, rhs });
    }
    let reference_moments = match &raw.reference_moments {
        None => None,
        Some(map) => Some(parse_moment_map(map, n, "$.reference_moments")?),
    };
    canonicalize(raw.domain, objective, constraints, reference_moments).map_err(|(idx, e)| {
        let path = match idx {
            Some(i) => format!("$.constraints[{i}].poly"),
            None => "$.objective".to_string(),
        };
        Error::schema(path, e.to_string())
    })
}

pub fn parse_moment_map(
    map: &BTreeMap<String, CoefValue>,
    n: usize,
    path: &str,
) -> Result<BTreeMap<Monomial, Rational>> {
    let mut out = BTreeMap::new();
    for (key, value) in map {
        let exps = key
            .trim_matches(|c| c == '[' || c == ']')
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::schema(format!("{path}.{key}"), "key must be comma separated exponents"))?;
        if exps.len() != n {
            return Err(Error::schema(
                format!("{path}.{key}"),
                format!("expected {n} exponents, found {}", exps.len()),
            ));
        }
        let v = value
            .to_rational()
            .ok_or_else(|| Error::schema(format!("{path}.{key}"), "not a decimal or rational number"))?;
        out.insert(Monomial::new(exps), v);
    }
    Ok(out)
}

pub fn instance_from_json(text: &str) -> Result<GmpInstance> {
    let raw: RawInstance = parse_json(text)?;
    validate_and_canonicalize(&raw)
}

/// Exact rationals parse helper for callers building instances by hand.
pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::InvalidInput(format!("not a rational number: {text}")))
}
