//! JSON form `{"n": 2, "terms": [{"exp": [2, 0], "coef": "2/3"}]}`.

use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefValue {
    Text(String),
    Number(serde_json::Number),
}

impl CoefValue {
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            CoefValue::Text(s) => parse_rational(s),
            CoefValue::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub exp: Vec<u32>,
    pub coef: CoefValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolynomial {
    pub n: usize,
    pub terms: Vec<RawTerm>,
}

impl RawPolynomial {
    /// Validates exponent lengths and coefficient syntax; `path` prefixes
    /// error locations (e.g. `objective`).
    pub fn to_polynomial(&self, path: &str) -> Result<Polynomial<Rational>> {
        if self.n == 0 {
            return Err(Error::schema(format!("{path}.n"), "dimension must be at least 1"));
        }
        let mut p = Polynomial::zero(self.n);
        for (i, t) in self.terms.iter().enumerate() {
            if t.exp.len() != self.n {
                return Err(Error::schema(
                    format!("{path}.terms[{i}].exp"),
                    format!("expected {} exponents, found {}", self.n, t.exp.len()),
                ));
            }
            let c = t.coef.to_rational().ok_or_else(|| {
                Error::schema(format!("{path}.terms[{i}].coef"), "not a decimal or rational number")
            })?;
            p.add_term(super::Monomial::new(t.exp.clone()), c);
        }
        Ok(p)
    }

    pub fn from_polynomial<T: Scalar>(p: &Polynomial<T>) -> Self {
        RawPolynomial {
            n: p.n(),
            terms: p
                .terms()
                .map(|(m, c)| RawTerm {
                    exp: m.exponents().to_vec(),
                    coef: CoefValue::Text(c.to_decimal_string()),
                })
                .collect(),
        }
    }
}

pub fn polynomial_from_json(text: &str) -> Result<Polynomial<Rational>> {
    let raw: RawPolynomial = parse_json(text)?;
    raw.to_polynomial("$")
}

pub fn polynomial_to_json<T: Scalar>(p: &Polynomial<T>) -> String {
    serde_json::to_string(&RawPolynomial::from_polynomial(p)).expect("serializable")
}

/// Deserializes and reports the failing field path on error.
pub fn parse_json<'de, D: Deserialize<'de>>(text: &'de str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(format!("$.{path}").trim_end_matches('.').to_string(), e.into_inner().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn parses_rational_and_decimal_coefficients() {
        let p = polynomial_from_json(
            r#"{"n": 2, "terms": [{"exp": [2,0], "coef": "2/3"}, {"exp": [0,1], "coef": 0.5}]}"#,
        )
        .unwrap();
        assert_eq!(p.coeff(&super::super::Monomial::new(vec![2, 0])), rat(2, 3));
        assert_eq!(p.coeff(&super::super::Monomial::new(vec![0, 1])), rat(1, 2));
    }

    #[test]
    fn exponent_length_error_names_field() {
        let err = polynomial_from_json(r#"{"n": 2, "terms": [{"exp": [1,0], "coef": "1"}, {"exp": [1], "coef": "1"}]}"#)
            .unwrap_err();
        match err {
            Error::Schema { path, .. } => assert_eq!(path, "$.terms[1].exp"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_names_field() {
        let err = polynomial_from_json(r#"{"n": 2, "terms": [{"exp": "x", "coef": "1"}]}"#).unwrap_err();
        match err {
            Error::Schema { path, .. } => assert!(path.contains("terms[0].exp"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serializes_exact_strings() {
        let p = Polynomial::from_terms(2, vec![(vec![1, 1], rat(-2, 3))]).unwrap();
        let text = polynomial_to_json(&p);
        assert_eq!(text, r#"{"n":2,"terms":[{"exp":[1,1],"coef":"-2/3"}]}"#);
        assert_eq!(polynomial_from_json(&text).unwrap(), p);
    }
}
