use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::monomial::{monomials_of_degree, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse multivariate polynomial `Σ p_α x^α` in `n` variables.
///
/// Zero coefficients are never stored and every key has length `n`.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    n: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self::from_monomial(Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    /// The variable `x_i` (zero-based index).
    pub fn variable(n: usize, i: usize) -> Self {
        Self::from_monomial(Monomial::unit(n, i), T::one())
    }

    pub fn from_monomial(m: Monomial, c: T) -> Self {
        let n = m.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { n, terms }
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeated
    /// monomials and dropping zeros.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, T)>,
    {
        let mut p = Self::zero(n);
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: exps.len(),
                });
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    /// `x1 + ... + xn`.
    pub fn sum_of_variables(n: usize) -> Self {
        let mut p = Self::zero(n);
        for i in 0..n {
            p.add_term(Monomial::unit(n, i), T::one());
        }
        p
    }

    /// `x1² + ... + xn²`.
    pub fn squared_norm(n: usize) -> Self {
        let mut p = Self::zero(n);
        for i in 0..n {
            p.add_term(Monomial::one(n).bump(i, 2), T::one());
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree shared by all terms, if any. The zero polynomial has none.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Sum of the terms of exact degree `j`.
    pub fn homogeneous_part(&self, j: u32) -> Self {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == j)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        debug_assert_eq!(m.dim(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .fold(T::zero(), |acc, (m, c)| acc + c.clone() * m.eval(x)))
    }

    /// Converts every coefficient through exact rationals.
    pub fn convert<U: Scalar>(&self) -> Polynomial<U> {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let q = c.to_rational().expect("finite coefficient");
            out.add_term(m.clone(), U::from_rational(&q));
        }
        out
    }

    /// Coefficients of `(x1 + ... + xn)^k` keyed by exponent, i.e. the
    /// multinomial coefficients over `|β| = k`.
    pub fn multinomial_expansion(n: usize, k: u32) -> Self {
        let mut p = Self::zero(n);
        for m in monomials_of_degree(n, k) {
            let c = multinomial(k, m.exponents());
            p.add_term(m, T::from_rational(&crate::scalar::Rational::from_integer(c)));
        }
        p
    }
}

/// `k! / (α1! ... αn!)`, zero when `|α| != k`.
pub fn multinomial(k: u32, alpha: &[u32]) -> num_bigint::BigInt {
    if alpha.iter().sum::<u32>() != k {
        return num_bigint::BigInt::zero();
    }
    let mut denom = num_bigint::BigInt::one();
    for &a in alpha {
        denom *= crate::scalar::factorial(a);
    }
    crate::scalar::factorial(k) / denom
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    /// Panics when the dimensions differ; see [`Polynomial::checked_add`].
    fn add(self, rhs: Self) -> Polynomial<T> {
        self.checked_add(rhs).expect("polynomial dimensions agree")
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        self.checked_sub(rhs).expect("polynomial dimensions agree")
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        self.checked_mul(rhs).expect("polynomial dimensions agree")
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", c.to_decimal_string(), m)?;
        }
        Ok(())
    }
}
