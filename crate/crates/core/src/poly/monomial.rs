use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `α` of the monomial `x^α`.
///
/// Ordered graded-lexicographically: lower total degree first, then within a
/// degree `x1` dominates (`x1² < x1x2 < x2²`), which reproduces the order of
/// the monomial basis vector `(1, x1, ..., xn, x1², x1x2, ...)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The variable `x_i` (zero-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.dim(), other.dim());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `x^α · x_i^k`.
    pub fn bump(&self, i: usize, k: u32) -> Monomial {
        let mut e = self.0.clone();
        e[i] += k;
        Monomial(e)
    }

    /// `α - β` when componentwise nonnegative.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    /// Evaluates `x^α` at a point of matching length.
    pub fn eval<T>(&self, x: &[T]) -> T
    where
        T: Clone + num_traits::One + std::ops::Mul<Output = T>,
    {
        self.0
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&e, xi)| acc * num_traits::pow(xi.clone(), e as usize))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All exponent vectors of length `n` with `|α| = degree`, in graded-lex order.
pub fn monomials_of_degree(n: usize, degree: u32) -> Vec<Monomial> {
    fn fill(prefix: &mut Vec<u32>, n: usize, remaining: u32, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(remaining);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            fill(prefix, n, remaining - e, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return if degree == 0 { vec![Monomial(vec![])] } else { vec![] };
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n), n, degree, &mut out);
    out
}

/// All exponent vectors with `|α| <= t`, in graded-lex order.
pub fn monomials_up_to(n: usize, t: u32) -> Vec<Monomial> {
    (0..=t).flat_map(|k| monomials_of_degree(n, k)).collect()
}
