//! Exact symbolic scalars.
//!
//! Two representations live here. [`Expr`] is a plain expression tree, the
//! shape produced by the literal parser and by hand-built expressions.
//! [`Scalar`] is the canonical form every tensor component is stored in: a
//! finite sum of rational multiples of monomials, where a monomial is a
//! product of integer powers of atoms (parameters, coordinates, abstract
//! function applications) times a single `exp` of an affine combination of
//! coordinates. Two scalars are equal as functions under the supported grammar
//! exactly when their canonical forms are equal, so zero-testing an identity
//! reduces to structural comparison.

mod affine;
mod canonical;
mod eval;
mod expr;
mod parse;

pub use affine::Affine;
pub use canonical::{Atom, Monomial, Scalar};
pub use eval::{Bindings, EvalError, UnivariatePoly};
pub use expr::{simplify, Expr};
pub use parse::{parse_expr, ParseError, SymbolTable};

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Exact rational numbers used for every coefficient.
pub type Rational = BigRational;

/// Interned symbol name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cannot invert non-monomial expression `{0}`")]
    NotInvertible(String),
    #[error("argument of {context} must be affine in coordinates, got `{arg}`")]
    NonAffineArgument { context: &'static str, arg: String },
    #[error("square root of `{0}` is not a monomial")]
    NoMonomialSqrt(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
