//! Input schemas of the application subcommands.

use std::collections::BTreeMap;

use gmp_core::model::parse_moment_map;
use gmp_core::poly::{parse_json, CoefValue, RawPolynomial};
use gmp_core::{Domain, Error, Monomial, QPolynomial, Rational, Result};
use serde::Deserialize;

fn check_dim(p: &QPolynomial, domain: Domain, path: &str) -> Result<()> {
    if p.n() != domain.n {
        return Err(Error::Schema {
            path: path.to_string(),
            message: format!("expected {} variables to match the domain, found {}", domain.n, p.n()),
        });
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMinimize {
    domain: Domain,
    p: RawPolynomial,
}

pub struct MinimizeInput {
    pub domain: Domain,
    pub p: QPolynomial,
}

pub fn minimize(text: &str) -> Result<MinimizeInput> {
    let raw: RawMinimize = parse_json(text)?;
    let p = raw.p.to_polynomial("$.p")?;
    check_dim(&p, raw.domain, "$.p.n")?;
    Ok(MinimizeInput { domain: raw.domain, p })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRational {
    domain: Domain,
    p: RawPolynomial,
    q: RawPolynomial,
}

pub struct RationalInput {
    pub domain: Domain,
    pub p: QPolynomial,
    pub q: QPolynomial,
}

pub fn rational(text: &str) -> Result<RationalInput> {
    let raw: RawRational = parse_json(text)?;
    let p = raw.p.to_polynomial("$.p")?;
    let q = raw.q.to_polynomial("$.q")?;
    check_dim(&p, raw.domain, "$.p.n")?;
    check_dim(&q, raw.domain, "$.q.n")?;
    Ok(RationalInput { domain: raw.domain, p, q })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCubature {
    domain: Domain,
    d: u32,
    beta: Vec<u32>,
    #[serde(default)]
    reference_moments: Option<BTreeMap<String, CoefValue>>,
}

pub struct CubatureInput {
    pub domain: Domain,
    pub d: u32,
    pub beta: Monomial,
    pub reference: Option<BTreeMap<Monomial, Rational>>,
}

pub fn cubature(text: &str) -> Result<CubatureInput> {
    let raw: RawCubature = parse_json(text)?;
    if raw.beta.len() != raw.domain.n {
        return Err(Error::Schema {
            path: "$.beta".into(),
            message: format!("expected {} exponents, found {}", raw.domain.n, raw.beta.len()),
        });
    }
    let reference = raw
        .reference_moments
        .as_ref()
        .map(|m| parse_moment_map(m, raw.domain.n, "$.reference_moments"))
        .transpose()?;
    Ok(CubatureInput {
        domain: raw.domain,
        d: raw.d,
        beta: Monomial::new(raw.beta),
        reference,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolya {
    f: RawPolynomial,
    #[serde(default)]
    eps: Option<CoefValue>,
}

pub struct PolyaInput {
    pub f: QPolynomial,
    pub eps: Option<Rational>,
}

pub fn polya(text: &str) -> Result<PolyaInput> {
    let raw: RawPolya = parse_json(text)?;
    let f = raw.f.to_polynomial("$.f")?;
    let eps = raw
        .eps
        .map(|e| {
            e.to_rational().ok_or(Error::Schema {
                path: "$.eps".into(),
                message: "not a decimal or rational number".into(),
            })
        })
        .transpose()?;
    Ok(PolyaInput { f, eps })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquiv {
    p: RawPolynomial,
}

pub fn equiv(text: &str) -> Result<QPolynomial> {
    let raw: RawEquiv = parse_json(text)?;
    raw.p.to_polynomial("$.p")
}
