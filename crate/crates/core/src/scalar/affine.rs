use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{fmt_rational, Rational, Symbol};

/// Affine combination `Σ cᵥ·v + c₀` of coordinate variables.
///
/// Used as the argument of abstract functions and of `exp`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Affine {
    coeffs: BTreeMap<Symbol, Rational>,
    constant: Rational,
}

impl Affine {
    pub fn zero() -> Self {
        Affine::default()
    }

    pub fn constant(c: Rational) -> Self {
        Affine {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Symbol) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Rational::one());
        Affine {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Symbol, Rational)>, constant: Rational) -> Self {
        let mut a = Affine::constant(constant);
        for (v, c) in coeffs {
            a.add_term(v, c);
        }
        a
    }

    fn add_term(&mut self, v: Symbol, c: Rational) {
        let entry = self.coeffs.entry(v.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn coefficient(&self, v: &Symbol) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(v.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn scale(&self, k: &Rational) -> Affine {
        if k.is_zero() {
            return Affine::zero();
        }
        Affine {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces coordinate `v` by the affine expression `by`.
    pub fn substitute(&self, v: &Symbol, by: &Affine) -> Affine {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(v);
                rest.add(&by.scale(c))
            }
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut put = |f: &mut fmt::Formatter<'_>, c: &Rational, body: Option<&Symbol>| -> fmt::Result {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match body {
                Some(v) if mag.is_one() => write!(f, "{v}"),
                Some(v) => write!(f, "{}*{v}", fmt_rational(&mag)),
                None => f.write_str(&fmt_rational(&mag)),
            }
        };
        for (v, c) in &self.coeffs {
            put(f, c, Some(v))?;
        }
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            put(f, &self.constant, None)?;
        }
        Ok(())
    }
}
