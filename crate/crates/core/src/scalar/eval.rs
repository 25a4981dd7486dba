use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use super::canonical::rational_pow;
use super::{Affine, Atom, Rational, Scalar, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` is not bound")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("exp({0}) has no rational value; bind exp values to evaluate generically")]
    IrrationalExp(String),
}

/// Dense univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UnivariatePoly {
    coeffs: Vec<Rational>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UnivariatePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self, order: u32) -> UnivariatePoly {
        let mut c = self.coeffs.clone();
        for _ in 0..order {
            if c.is_empty() {
                break;
            }
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Rational::from_integer((i as i64).into()))
                .collect();
        }
        UnivariatePoly::new(c)
    }

    /// `p(arg)` expanded as a scalar in the coordinates of `arg`.
    pub fn compose_affine(&self, arg: &Affine) -> Scalar {
        let mut lin = Scalar::constant(arg.constant_term().clone());
        for (v, c) in arg.terms() {
            lin += &Scalar::coord(v.as_str()).scale(c);
        }
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Scalar::constant(c.clone());
        }
        acc
    }

    pub fn rem(&self, d: &UnivariatePoly) -> UnivariatePoly {
        let mut r = self.coeffs.clone();
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / &lead;
            for (i, c) in d.coeffs.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UnivariatePoly::new(r)
    }

    pub fn neg(&self) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Values for parameters, coordinates and abstract functions.
///
/// With `exp_values` unset, `exp(arg)` evaluates only where `arg = 0`. With it
/// set, each coordinate `v` carries an opaque positive value for `exp(v)` and
/// `exp(Σ kᵥ v)` evaluates to `Π exp(v)^kᵥ` for integer `kᵥ`; this treats the
/// exponential as an independent positive quantity, which is sound for
/// identity testing because `exp` is transcendental over the polynomial atoms.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    values: BTreeMap<Symbol, Rational>,
    functions: BTreeMap<Symbol, UnivariatePoly>,
    exp_values: Option<BTreeMap<Symbol, Rational>>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn set(&mut self, name: &str, v: Rational) -> &mut Self {
        self.values.insert(Symbol::new(name), v);
        self
    }

    pub fn set_function(&mut self, name: &str, p: UnivariatePoly) -> &mut Self {
        self.functions.insert(Symbol::new(name), p);
        self
    }

    pub fn set_exp(&mut self, coord: &str, v: Rational) -> &mut Self {
        self.exp_values
            .get_or_insert_with(BTreeMap::new)
            .insert(Symbol::new(coord), v);
        self
    }

    pub fn value(&self, s: &Symbol) -> Result<&Rational, EvalError> {
        self.values.get(s).ok_or_else(|| EvalError::Unbound(s.to_string()))
    }

    pub fn function(&self, s: &Symbol) -> Result<&UnivariatePoly, EvalError> {
        self.functions.get(s).ok_or_else(|| EvalError::Unbound(s.to_string()))
    }

    pub fn values(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.values.iter()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Symbol, &UnivariatePoly)> {
        self.functions.iter()
    }

    pub fn eval_affine(&self, a: &Affine) -> Result<Rational, EvalError> {
        let mut acc = a.constant_term().clone();
        for (v, c) in a.terms() {
            acc += c * self.value(v)?;
        }
        Ok(acc)
    }

    /// Value of `exp(a)` under the current mode.
    pub fn eval_exp(&self, a: &Affine) -> Result<Rational, EvalError> {
        match &self.exp_values {
            None => {
                if self.eval_affine(a)?.is_zero() {
                    Ok(Rational::one())
                } else {
                    Err(EvalError::IrrationalExp(a.to_string()))
                }
            }
            Some(ev) => {
                if !a.constant_term().is_zero() {
                    return Err(EvalError::IrrationalExp(a.to_string()));
                }
                let mut acc = Rational::one();
                for (v, c) in a.terms() {
                    if !c.is_integer() {
                        return Err(EvalError::IrrationalExp(a.to_string()));
                    }
                    let base = ev.get(v).ok_or_else(|| EvalError::Unbound(format!("exp({v})")))?;
                    let k: i32 = c.to_integer().try_into().map_err(|_| EvalError::IrrationalExp(a.to_string()))?;
                    acc *= rational_pow(base, k);
                }
                Ok(acc)
            }
        }
    }
}

impl Scalar {
    /// Exact rational value under `b`.
    pub fn eval(&self, b: &Bindings) -> Result<Rational, EvalError> {
        let mut total = Rational::zero();
        for (m, c) in self.terms() {
            let mut v = c.clone();
            if !m.exp_arg().is_zero() {
                v *= b.eval_exp(m.exp_arg())?;
            }
            for (a, k) in m.powers() {
                let base = match a {
                    Atom::Param(s) | Atom::Coord(s) => b.value(s)?.clone(),
                    Atom::Func { name, order, arg } => b.function(name)?.derivative(*order).eval(&b.eval_affine(arg)?),
                };
                if base.is_zero() && k < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                v *= rational_pow(&base, k);
            }
            total += v;
        }
        Ok(total)
    }
}
