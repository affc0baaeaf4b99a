//! Exact sparse multivariate polynomials and the transforms the hierarchies
//! are built from.

mod json;
mod monomial;
mod polynomial;
mod transform;

pub use json::{parse_json, polynomial_from_json, polynomial_to_json, CoefValue, RawPolynomial, RawTerm};
pub use monomial::{monomials_of_degree, monomials_up_to, Monomial};
pub use polynomial::{multinomial, Polynomial};
pub use transform::{
    b_of_f, bernstein_approx, has_nonnegative_coefficients, homogenize, polya_exponent_bound,
    polya_shift,
};
