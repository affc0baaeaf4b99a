//! Degree lifting, Pólya multipliers, `B(f)` and the Bernstein operator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::monomial::monomials_of_degree;
use super::polynomial::{multinomial, Polynomial};
use crate::error::{Error, Result};
use crate::model::DomainKind;
use crate::scalar::{factorial, Rational, Scalar};

/// Lifts `p` to a form of degree `d` that agrees with `p` on the domain.
///
/// On the simplex the degree-`j` part is multiplied by `(Σ xi)^(d-j)`, on
/// the sphere by `‖x‖^(d-j)`, which needs every gap `d - j` to be even.
pub fn homogenize<T: Scalar>(p: &Polynomial<T>, d: u32, mode: DomainKind) -> Result<Polynomial<T>> {
    let degree = p.degree();
    if d < degree {
        return Err(Error::DegreeTooLow { degree, target: d });
    }
    let n = p.n();
    let lift = match mode {
        DomainKind::Simplex => Polynomial::sum_of_variables(n),
        DomainKind::Sphere => Polynomial::squared_norm(n),
    };
    let mut out = Polynomial::zero(n);
    for j in 0..=degree {
        let part = p.homogeneous_part(j);
        if part.is_zero() {
            continue;
        }
        let gap = d - j;
        let power = match mode {
            DomainKind::Simplex => gap,
            DomainKind::Sphere => {
                if gap % 2 == 1 {
                    return Err(Error::OddDegreeGap {
                        part_degree: j,
                        target: d,
                    });
                }
                gap / 2
            }
        };
        out = &out + &(&part * &lift.pow(power));
    }
    Ok(out)
}

/// `(x1 + ... + xn)^k · p`, fully expanded.
pub fn polya_shift<T: Scalar>(p: &Polynomial<T>, k: u32) -> Polynomial<T> {
    if k == 0 {
        return p.clone();
    }
    p * &Polynomial::multinomial_expansion(p.n(), k)
}

/// `true` when every stored coefficient is `>= 0`.
pub fn has_nonnegative_coefficients<T: Scalar>(p: &Polynomial<T>) -> bool {
    p.terms().all(|(_, c)| !c.is_negative())
}

/// `B(f) = max_{|α|=d} (α1!...αn!/d!) f_α` for a form of degree `d`.
///
/// Monomials absent from `f` count as coefficient zero; the value is
/// negative only when every degree-`d` coefficient is.
pub fn b_of_f<T: Scalar>(f: &Polynomial<T>) -> Result<T> {
    if f.is_zero() {
        return Ok(T::zero());
    }
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let d_fact = factorial(d);
    let mut best: Option<T> = None;
    for (m, c) in f.terms() {
        let weight: BigInt = m.exponents().iter().map(|&a| factorial(a)).product();
        let w = T::from_rational(&Rational::new(weight, d_fact.clone()));
        let v = w * c.clone();
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    let full_support = BigInt::from(f.len()) == binomial(f.n() as u32 + d - 1, d);
    let best = best.expect("nonzero polynomial has a term");
    Ok(if full_support { best } else { T::max_of(best, T::zero()) })
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Smallest `k >= 0` with `k > d(d-1)/2 · B(f)/eps - d`.
///
/// When `eps` is the minimum of `f` over the simplex (or a positive lower
/// bound of it), `(Σ xi)^k f` has nonnegative coefficients.
pub fn polya_exponent_bound<T: Scalar>(f: &Polynomial<T>, eps: &T) -> Result<u64> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let b = b_of_f(f)?
        .to_rational()
        .ok_or_else(|| Error::InvalidInput("non-finite coefficient".into()))?;
    let eps = eps
        .to_rational()
        .ok_or_else(|| Error::InvalidInput("non-finite eps".into()))?;
    let d_big = BigInt::from(d);
    let bound = Rational::from_integer(&d_big * (&d_big - 1u32)) / Rational::from_integer(BigInt::from(2)) * b / eps
        - Rational::from_integer(d_big);
    if bound.is_negative() {
        return Ok(0);
    }
    let floor = bound.numer().div_floor(bound.denom());
    let k = floor + 1u32;
    u64::try_from(k).map_err(|_| Error::InvalidInput("Pólya exponent does not fit in u64".into()))
}

/// Bernstein approximation `Σ_{|α|=r} f(α/r) · r!/(α1!...αn!) · x^α` of a
/// function on the simplex.
pub fn bernstein_approx<T, F>(f: F, r: u32, n: usize) -> Result<Polynomial<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    if r == 0 {
        return Err(Error::Precondition("Bernstein order must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let r_big = BigInt::from(r);
    let mut out = Polynomial::zero(n);
    for alpha in monomials_of_degree(n, r) {
        let node: Vec<T> = alpha
            .exponents()
            .iter()
            .map(|&a| T::from_rational(&Rational::new(BigInt::from(a), r_big.clone())))
            .collect();
        let weight = T::from_rational(&Rational::from_integer(multinomial(r, alpha.exponents())));
        let value = f(&node);
        if !value.is_zero() {
            out.add_term(alpha, value * weight);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type Q = Polynomial<Rational>;

    fn poly(n: usize, terms: &[(&[u32], i64, i64)]) -> Q {
        Q::from_terms(n, terms.iter().map(|(e, a, b)| (e.to_vec(), rat(*a, *b)))).unwrap()
    }

    #[test]
    fn homogenize_constant_on_simplex() {
        let h = homogenize(&Q::one(2), 1, DomainKind::Simplex).unwrap();
        assert_eq!(h, Q::sum_of_variables(2));
    }

    #[test]
    fn homogenize_affine_on_simplex() {
        let p = poly(2, &[(&[1, 0], 1, 1), (&[0, 0], 1, 1)]);
        let h = homogenize(&p, 2, DomainKind::Simplex).unwrap();
        assert_eq!(h, poly(2, &[(&[2, 0], 2, 1), (&[1, 1], 3, 1), (&[0, 2], 1, 1)]));
    }

    #[test]
    fn homogenize_constant_on_sphere() {
        let h = homogenize(&Q::one(2), 2, DomainKind::Sphere).unwrap();
        assert_eq!(h, Q::squared_norm(2));
    }

    #[test]
    fn homogenize_errors() {
        let p = Q::squared_norm(2);
        assert_eq!(
            homogenize(&p, 1, DomainKind::Simplex),
            Err(Error::DegreeTooLow { degree: 2, target: 1 })
        );
        let q = poly(2, &[(&[1, 0], 1, 1), (&[0, 2], 1, 1)]);
        assert_eq!(
            homogenize(&q, 2, DomainKind::Sphere),
            Err(Error::OddDegreeGap { part_degree: 1, target: 2 })
        );
    }

    #[test]
    fn polya_shift_examples() {
        // x1² + x2² - (1/3)(x1 + x2)²
        let p = poly(2, &[(&[2, 0], 2, 3), (&[1, 1], -2, 3), (&[0, 2], 2, 3)]);
        assert_eq!(polya_shift(&p, 1), poly(2, &[(&[3, 0], 2, 3), (&[0, 3], 2, 3)]));
        assert!(has_nonnegative_coefficients(&polya_shift(&p, 1)));
        assert_eq!(polya_shift(&p, 0), p);
        let q = poly(2, &[(&[1, 0], 1, 1), (&[0, 1], -1, 1)]);
        assert_eq!(polya_shift(&q, 1), poly(2, &[(&[2, 0], 1, 1), (&[0, 2], -1, 1)]));
    }

    #[test]
    fn b_of_f_examples() {
        assert_eq!(b_of_f(&Q::squared_norm(2)).unwrap(), rat(1, 1));
        assert_eq!(b_of_f(&poly(2, &[(&[1, 1], 1, 1)])).unwrap(), rat(1, 2));
        assert_eq!(b_of_f(&poly(3, &[(&[1, 1, 1], 6, 1)])).unwrap(), rat(1, 1));
        assert_eq!(b_of_f(&poly(2, &[(&[2, 0], -1, 1), (&[1, 1], -3, 1)])).unwrap(), rat(0, 1));
        let full = poly(2, &[(&[2, 0], -1, 1), (&[1, 1], -2, 1), (&[0, 2], -1, 1)]);
        assert_eq!(b_of_f(&full).unwrap(), rat(-1, 1));
        assert_eq!(
            b_of_f(&poly(2, &[(&[2, 0], 1, 1), (&[0, 1], 1, 1)])),
            Err(Error::NotHomogeneous)
        );
    }

    #[test]
    fn exponent_bound_examples() {
        assert_eq!(polya_exponent_bound(&Q::squared_norm(2), &rat(1, 2)).unwrap(), 1);
        assert_eq!(polya_exponent_bound(&Q::sum_of_variables(3), &rat(1, 7)).unwrap(), 0);
        assert_eq!(polya_exponent_bound(&poly(2, &[(&[1, 1], 1, 1)]), &rat(1, 4)).unwrap(), 1);
        assert!(polya_exponent_bound(&Q::squared_norm(2), &rat(0, 1)).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let one = bernstein_approx(|_: &[Rational]| rat(1, 1), 2, 2).unwrap();
        assert_eq!(one, Q::sum_of_variables(2).pow(2));
        let x1 = bernstein_approx(|x: &[Rational]| x[0].clone(), 2, 2).unwrap();
        assert_eq!(x1, poly(2, &[(&[2, 0], 1, 1), (&[1, 1], 1, 1)]));
        let lin = bernstein_approx(|x: &[Rational]| x[0].clone(), 1, 2).unwrap();
        assert_eq!(lin, Q::variable(2, 0));
        assert!(bernstein_approx(|_: &[Rational]| rat(1, 1), 0, 2).is_err());
    }
}
