use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{fmt_rational, Affine, Rational, ScalarError, Symbol, UnivariatePoly};

/// Indivisible factor of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Real constant of the family (λ, a, α₀, l, ...).
    Param(Symbol),
    /// Coordinate variable of a coordinate frame.
    Coord(Symbol),
    /// `name⁽ᵒʳᵈᵉʳ⁾(arg)` for an abstract smooth function of one variable.
    Func { name: Symbol, order: u32, arg: Affine },
}

impl Atom {
    pub fn is_param(&self) -> bool {
        matches!(self, Atom::Param(_))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(s) | Atom::Coord(s) => write!(f, "{s}"),
            Atom::Func { name, order, arg } => {
                write!(f, "{name}")?;
                for _ in 0..*order {
                    f.write_str("'")?;
                }
                write!(f, "({arg})")
            }
        }
    }
}

/// Product of integer powers of atoms times `exp(affine)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    powers: BTreeMap<Atom, i32>,
    exp: Affine,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(a: Atom) -> Self {
        let mut powers = BTreeMap::new();
        powers.insert(a, 1);
        Monomial {
            powers,
            exp: Affine::zero(),
        }
    }

    pub fn exp(arg: Affine) -> Self {
        Monomial {
            powers: BTreeMap::new(),
            exp: arg,
        }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && self.exp.is_zero()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&Atom, i32)> {
        self.powers.iter().map(|(a, k)| (a, *k))
    }

    pub fn exp_arg(&self) -> &Affine {
        &self.exp
    }

    pub fn degree_in(&self, a: &Atom) -> i32 {
        self.powers.get(a).copied().unwrap_or(0)
    }

    fn set_power(&mut self, a: Atom, k: i32) {
        if k == 0 {
            self.powers.remove(&a);
        } else {
            self.powers.insert(a, k);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (a, k) in &other.powers {
            let cur = out.degree_in(a);
            out.set_power(a.clone(), cur + k);
        }
        out.exp = out.exp.add(&other.exp);
        out
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            powers: self.powers.iter().map(|(a, e)| (a.clone(), e * k)).collect(),
            exp: self.exp.scale(&Rational::from_integer(k.into())),
        }
    }

    /// Splits into (parameter part, point-dependent part).
    pub fn split_params(&self) -> (Monomial, Monomial) {
        let mut params = Monomial::one();
        let mut point = Monomial::one();
        for (a, k) in &self.powers {
            if a.is_param() {
                params.powers.insert(a.clone(), *k);
            } else {
                point.powers.insert(a.clone(), *k);
            }
        }
        point.exp = self.exp.clone();
        (params, point)
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        let mut out = self.clone();
        out.powers.remove(a);
        out
    }
}

/// Canonical exact scalar: a sum of rational multiples of distinct monomials.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Scalar::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::constant(Rational::from_integer(n.into()))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Scalar { terms }
    }

    pub fn param(name: &str) -> Self {
        Scalar::term(Rational::one(), Monomial::atom(Atom::Param(Symbol::new(name))))
    }

    pub fn coord(name: &str) -> Self {
        Scalar::term(Rational::one(), Monomial::atom(Atom::Coord(Symbol::new(name))))
    }

    pub fn func(name: &str, order: u32, arg: Affine) -> Self {
        Scalar::term(
            Rational::one(),
            Monomial::atom(Atom::Func {
                name: Symbol::new(name),
                order,
                arg,
            }),
        )
    }

    pub fn exp(arg: Affine) -> Self {
        Scalar::term(Rational::one(), Monomial::exp(arg))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                *cur += c;
                if cur.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, k: &Rational) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// The value if this scalar is a rational constant.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Rational, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    /// True when only parameters appear (no coordinates, functions or `exp`).
    pub fn is_parameter_only(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.exp.is_zero() && m.powers.keys().all(Atom::is_param))
    }

    pub fn pow(&self, k: i32) -> Result<Scalar, ScalarError> {
        if k < 0 {
            return self.try_inverse()?.pow(-k);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse, available for nonzero monomials only.
    pub fn try_inverse(&self) -> Result<Scalar, ScalarError> {
        match self.as_monomial() {
            Some((c, m)) => Ok(Scalar::term(c.recip(), m.pow(-1))),
            None => Err(ScalarError::NotInvertible(self.to_string())),
        }
    }

    /// Exact division by a nonzero monomial.
    pub fn div(&self, d: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &d.try_inverse()?)
    }

    /// Square root of a monomial with a positive square coefficient and even exponents.
    pub fn sqrt_monomial(&self) -> Result<Scalar, ScalarError> {
        let fail = || ScalarError::NoMonomialSqrt(self.to_string());
        let (c, m) = self.as_monomial().ok_or_else(fail)?;
        if !c.is_positive() {
            return Err(fail());
        }
        let root = |n: &num_bigint::BigInt| {
            let r = n.sqrt();
            (&r * &r == *n).then_some(r)
        };
        let num = root(c.numer()).ok_or_else(fail)?;
        let den = root(c.denom()).ok_or_else(fail)?;
        let mut out = Monomial::one();
        for (a, k) in &m.powers {
            if k.is_odd() {
                return Err(fail());
            }
            out.powers.insert(a.clone(), k / 2);
        }
        out.exp = m.exp.scale(&Rational::new(1.into(), 2.into()));
        Ok(Scalar::term(Rational::new(num, den), out))
    }

    /// Formal partial derivative with respect to a coordinate.
    pub fn differentiate(&self, v: &Symbol) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let ec = m.exp.coefficient(v);
            if !ec.is_zero() {
                out.add_term(m.clone(), c * &ec);
            }
            for (a, k) in &m.powers {
                match a {
                    Atom::Param(_) => {}
                    Atom::Coord(s) => {
                        if s == v {
                            let mut dm = m.clone();
                            dm.set_power(a.clone(), k - 1);
                            out.add_term(dm, c * Rational::from_integer((*k).into()));
                        }
                    }
                    Atom::Func { name, order, arg } => {
                        let inner = arg.coefficient(v);
                        if inner.is_zero() {
                            continue;
                        }
                        let mut dm = m.clone();
                        dm.set_power(a.clone(), k - 1);
                        let next = Atom::Func {
                            name: name.clone(),
                            order: order + 1,
                            arg: arg.clone(),
                        };
                        let cur = dm.degree_in(&next);
                        dm.set_power(next, cur + 1);
                        out.add_term(dm, c * Rational::from_integer((*k).into()) * inner);
                    }
                }
            }
        }
        out
    }

    /// Replaces parameter `p` by `by`. Negative powers of `p` need `by` invertible.
    pub fn substitute_param(&self, p: &Symbol, by: &Scalar) -> Result<Scalar, ScalarError> {
        let atom = Atom::Param(p.clone());
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let k = m.degree_in(&atom);
            if k == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let rest = Scalar::term(c.clone(), m.without(&atom));
            out += &rest * &by.pow(k)?;
        }
        Ok(out)
    }

    /// Replaces coordinate `v` by a rational value everywhere, including
    /// function arguments. `exp` factors keep their (shifted) argument.
    pub fn substitute_coord(&self, v: &Symbol, value: &Rational) -> Result<Scalar, ScalarError> {
        let by = Affine::constant(value.clone());
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut nm = Monomial::one();
            for (a, k) in &m.powers {
                match a {
                    Atom::Coord(s) if s == v => {
                        if value.is_zero() && *k < 0 {
                            return Err(ScalarError::NotInvertible(v.to_string()));
                        }
                        coeff *= rational_pow(value, *k);
                    }
                    Atom::Func { name, order, arg } => {
                        let na = Atom::Func {
                            name: name.clone(),
                            order: *order,
                            arg: arg.substitute(v, &by),
                        };
                        let cur = nm.degree_in(&na);
                        nm.set_power(na, cur + k);
                    }
                    other => {
                        let cur = nm.degree_in(other);
                        nm.set_power(other.clone(), cur + k);
                    }
                }
            }
            nm.exp = m.exp.substitute(v, &by);
            out.add_term(nm, coeff);
        }
        Ok(out)
    }

    /// Replaces every application of `name` (and its derivatives) by the
    /// corresponding derivative of the explicit polynomial `poly`.
    pub fn substitute_func(&self, name: &Symbol, poly: &UnivariatePoly) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let mut acc = Scalar::term(c.clone(), Monomial::exp(m.exp.clone()));
            for (a, k) in &m.powers {
                let factor = match a {
                    Atom::Func { name: n, order, arg } if n == name => {
                        poly.derivative(*order).compose_affine(arg)
                    }
                    other => Scalar::term(Rational::one(), Monomial::atom(other.clone())),
                };
                // Explicit polynomials need not be invertible, so negative powers
                // of a substituted function keep the atom form.
                let p = match factor.pow(*k) {
                    Ok(p) => p,
                    Err(_) => Scalar::term(Rational::one(), Monomial::atom(a.clone()).pow(*k)),
                };
                acc = &acc * &p;
            }
            out += &acc;
        }
        out
    }

    /// Rewrites `p^(2k+r)` as `square^k · p^r` (r ∈ {0,1}), imposing `p² = square`.
    pub fn reduce_square(&self, p: &Symbol, square: &Scalar) -> Result<Scalar, ScalarError> {
        let atom = Atom::Param(p.clone());
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let k = m.degree_in(&atom);
            if k == 0 || k == 1 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let r = k.rem_euclid(2);
            let half = (k - r) / 2;
            let mut base = m.without(&atom);
            base.set_power(atom.clone(), r);
            out += &Scalar::term(c.clone(), base) * &square.pow(half)?;
        }
        Ok(out)
    }

    /// Parameters, coordinates and functions appearing in this scalar.
    pub fn symbols(&self) -> SymbolSet {
        let mut s = SymbolSet::default();
        for m in self.terms.keys() {
            for (v, _) in m.exp.terms() {
                s.coords.insert(v.clone());
            }
            for a in m.powers.keys() {
                match a {
                    Atom::Param(p) => {
                        s.params.insert(p.clone());
                    }
                    Atom::Coord(v) => {
                        s.coords.insert(v.clone());
                    }
                    Atom::Func { name, arg, .. } => {
                        s.funcs.insert(name.clone());
                        for (v, _) in arg.terms() {
                            s.coords.insert(v.clone());
                        }
                    }
                }
            }
        }
        s
    }

    /// Groups terms by their point-dependent monomial; each value is the
    /// parameter-only coefficient of that monomial.
    pub fn point_coefficients(&self) -> BTreeMap<Monomial, Scalar> {
        let mut out: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (params, point) = m.split_params();
            out.entry(point).or_default().add_term(params, c.clone());
        }
        out
    }

    /// Largest monomial dividing every term: per-atom minimum exponent and
    /// the gcd of the coefficients. Returns `(content, self / content)`.
    pub fn content(&self) -> (Scalar, Scalar) {
        if self.is_zero() {
            return (Scalar::one(), Scalar::zero());
        }
        let atoms: BTreeSet<&Atom> = self.terms.keys().flat_map(|m| m.powers.keys()).collect();
        let mut cm = Monomial::one();
        for a in atoms {
            let min = self.terms.keys().map(|m| m.degree_in(a)).min().unwrap_or(0);
            if min != 0 {
                cm.set_power(a.clone(), min);
            }
        }
        let mut num_gcd = num_bigint::BigInt::zero();
        let mut den_lcm = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut cc = Rational::new(num_gcd, den_lcm);
        // Normalise so the leading term of the cofactor is positive.
        if self.terms.values().next().unwrap().is_negative() {
            cc = -cc;
        }
        let content = Scalar::term(cc, cm);
        let rest = self.div(&content).expect("content is a monomial");
        (content, rest)
    }

    /// Interprets a parameter-only scalar as a univariate polynomial in `p`
    /// (or in `p²` when `in_square` is set), if no other atoms occur.
    pub fn as_univariate(&self, p: &Symbol, in_square: bool) -> Option<UnivariatePoly> {
        let atom = Atom::Param(p.clone());
        let mut coeffs: Vec<Rational> = Vec::new();
        for (m, c) in &self.terms {
            if !m.exp.is_zero() || m.powers.keys().any(|a| a != &atom) {
                return None;
            }
            let k = m.degree_in(&atom);
            if k < 0 || (in_square && k % 2 != 0) {
                return None;
            }
            let idx = if in_square { k / 2 } else { k } as usize;
            if coeffs.len() <= idx {
                coeffs.resize(idx + 1, Rational::zero());
            }
            coeffs[idx] += c;
        }
        Some(UnivariatePoly::new(coeffs))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }
}

/// `q^k` for a nonzero `q` when `k < 0`.
pub(crate) fn rational_pow(q: &Rational, k: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= q;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SymbolSet {
    pub params: BTreeSet<Symbol>,
    pub coords: BTreeSet<Symbol>,
    pub funcs: BTreeSet<Symbol>,
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::constant(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul<&Rational> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Rational) -> Scalar {
        self.scale(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for s in iter {
            acc += &s;
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (a, k) in &self.powers {
            let base = a.to_string();
            if *k == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{k}"));
            }
        }
        if !self.exp.is_zero() {
            parts.push(format!("exp({})", self.exp));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}
