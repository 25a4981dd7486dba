//! Parameter assumptions, sign analysis and tri-state zero testing.
//!
//! A verdict of [`Verdict::NonZero`] means the expression vanishes nowhere on
//! the admissible domain: for every parameter value allowed by the
//! assumptions and at every point. It is only issued with a proof (a single
//! nowhere-vanishing point monomial whose parameter coefficient is sign-definite).
//! Expressions that are not identically zero but may vanish somewhere, or that
//! the analysis cannot decide, are [`Verdict::Unknown`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{int, Atom, Bindings, Monomial, Rational, Scalar, Symbol, UnivariatePoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Zero,
    NonZero,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "Zero",
            Verdict::NonZero => "NonZero",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssumptionError {
    #[error("assumptions on `{0}` are unsatisfiable over the rationals")]
    Inconsistent(String),
    #[error("parameter `{0}` has no assumption entry")]
    Undeclared(String),
    #[error("cannot parse constraint `{text}`: {reason}")]
    BadConstraint { text: String, reason: String },
}

/// Interval of the real line with optional, possibly open, endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound<Rational>,
    pub hi: Bound<Rational>,
}

impl Interval {
    pub fn all() -> Self {
        Interval {
            lo: Bound::Unbounded,
            hi: Bound::Unbounded,
        }
    }

    pub fn point(v: Rational) -> Self {
        Interval {
            lo: Bound::Included(v.clone()),
            hi: Bound::Included(v),
        }
    }

    pub fn nonnegative() -> Self {
        Interval {
            lo: Bound::Included(Rational::zero()),
            hi: Bound::Unbounded,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lo {
            Bound::Unbounded => true,
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
        };
        let hi_ok = match &self.hi {
            Bound::Unbounded => true,
            Bound::Included(b) => x <= b,
            Bound::Excluded(b) => x < b,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: tighter(&self.lo, &other.lo, true),
            hi: tighter(&self.hi, &other.hi, false),
        }
    }

    fn finite_lo(&self) -> Option<&Rational> {
        match &self.lo {
            Bound::Included(a) | Bound::Excluded(a) => Some(a),
            Bound::Unbounded => None,
        }
    }

    fn finite_hi(&self) -> Option<&Rational> {
        match &self.hi {
            Bound::Included(a) | Bound::Excluded(a) => Some(a),
            Bound::Unbounded => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match (self.finite_lo(), self.finite_hi()) {
            (Some(a), Some(b)) => {
                a > b || (a == b && !(matches!(self.lo, Bound::Included(_)) && matches!(self.hi, Bound::Included(_))))
            }
            _ => false,
        }
    }

    /// A rational strictly inside the interval, when it has nonempty interior.
    pub fn interior_point(&self) -> Option<Rational> {
        match (self.finite_lo(), self.finite_hi()) {
            (Some(a), Some(b)) if a < b => Some((a + b) / int(2)),
            (Some(_), Some(_)) => None,
            (Some(a), None) => Some(a + int(1)),
            (None, Some(b)) => Some(b - int(1)),
            (None, None) => Some(Rational::zero()),
        }
    }

    pub fn degenerate_value(&self) -> Option<&Rational> {
        match (&self.lo, &self.hi) {
            (Bound::Included(a), Bound::Included(b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// Image of the interval under `x ↦ x²`.
    pub fn square_image(&self) -> Interval {
        let sq = |b: &Bound<Rational>| match b {
            Bound::Included(a) => Bound::Included(a * a),
            Bound::Excluded(a) => Bound::Excluded(a * a),
            Bound::Unbounded => Bound::Unbounded,
        };
        let contains_zero = self.contains(&Rational::zero());
        let lo_neg = self.finite_lo().is_none_or(|a| a.is_negative());
        let hi_pos = self.finite_hi().is_none_or(|b| b.is_positive());
        if contains_zero {
            let hi = match (self.finite_lo(), self.finite_hi()) {
                (Some(a), Some(b)) => {
                    if a.abs() >= b.abs() {
                        sq(&self.lo)
                    } else {
                        sq(&self.hi)
                    }
                }
                _ => Bound::Unbounded,
            };
            Interval {
                lo: Bound::Included(Rational::zero()),
                hi,
            }
        } else if !lo_neg {
            Interval {
                lo: sq(&self.lo),
                hi: sq(&self.hi),
            }
        } else if !hi_pos {
            Interval {
                lo: sq(&self.hi),
                hi: sq(&self.lo),
            }
        } else {
            // open at zero: (a, b) with a < 0 < b excluded 0 cannot happen for
            // intervals, so this branch covers (-a, 0) ∪ ... style bounds
            Interval::nonnegative()
        }
    }
}

fn tighter(a: &Bound<Rational>, b: &Bound<Rational>, lower: bool) -> Bound<Rational> {
    use Bound::*;
    match (a, b) {
        (Unbounded, x) | (x, Unbounded) => x.clone(),
        (Included(x) | Excluded(x), Included(y) | Excluded(y)) if x != y => {
            let pick_a = if lower { x > y } else { x < y };
            if pick_a {
                a.clone()
            } else {
                b.clone()
            }
        }
        (Excluded(_), _) => a.clone(),
        _ => b.clone(),
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            Bound::Unbounded => f.write_str("(-inf")?,
            Bound::Included(a) => write!(f, "[{a}")?,
            Bound::Excluded(a) => write!(f, "({a}")?,
        }
        f.write_str(", ")?;
        match &self.hi {
            Bound::Unbounded => f.write_str("inf)"),
            Bound::Included(b) => write!(f, "{b}]"),
            Bound::Excluded(b) => write!(f, "{b})"),
        }
    }
}

/// Possible signs of a quantity over the admissible domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignSet {
    pub neg: bool,
    pub zero: bool,
    pub pos: bool,
}

impl SignSet {
    pub const ANY: SignSet = SignSet {
        neg: true,
        zero: true,
        pos: true,
    };
    pub const POS: SignSet = SignSet {
        neg: false,
        zero: false,
        pos: true,
    };
    pub const NEG: SignSet = SignSet {
        neg: true,
        zero: false,
        pos: false,
    };
    pub const ZERO: SignSet = SignSet {
        neg: false,
        zero: true,
        pos: false,
    };

    fn of_rational(q: &Rational) -> SignSet {
        if q.is_positive() {
            SignSet::POS
        } else if q.is_negative() {
            SignSet::NEG
        } else {
            SignSet::ZERO
        }
    }

    pub fn mul(self, o: SignSet) -> SignSet {
        SignSet {
            neg: (self.neg && o.pos) || (self.pos && o.neg),
            zero: self.zero || o.zero,
            pos: (self.pos && o.pos) || (self.neg && o.neg),
        }
    }

    pub fn add(self, o: SignSet) -> SignSet {
        SignSet {
            neg: self.neg || o.neg,
            zero: (self.zero && o.zero) || (self.neg && o.pos) || (self.pos && o.neg),
            pos: self.pos || o.pos,
        }
    }

    fn powi(self, k: i32) -> SignSet {
        let odd = k % 2 != 0;
        SignSet {
            neg: odd && self.neg,
            zero: self.zero,
            pos: self.pos || (!odd && self.neg),
        }
    }

    pub fn excludes_zero(self) -> bool {
        !self.zero
    }

    pub fn nonnegative(self) -> bool {
        !self.neg
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamConstraint {
    pub range: Interval,
    pub square_range: Interval,
    pub nonzero: bool,
    /// Original constraint texts, kept for reports and manifests.
    pub texts: Vec<String>,
}

impl Default for ParamConstraint {
    fn default() -> Self {
        ParamConstraint {
            range: Interval::all(),
            square_range: Interval::nonnegative(),
            nonzero: false,
            texts: Vec::new(),
        }
    }
}

impl ParamConstraint {
    /// Effective range of `p²`.
    fn squares(&self) -> Interval {
        let mut s = self.square_range.intersect(&self.range.square_image());
        if self.nonzero {
            s = s.intersect(&Interval {
                lo: Bound::Excluded(Rational::zero()),
                hi: Bound::Unbounded,
            });
        }
        s
    }

    pub fn admits(&self, v: &Rational) -> bool {
        self.range.contains(v) && self.square_range.contains(&(v * v)) && !(self.nonzero && v.is_zero())
    }

    fn sign(&self) -> SignSet {
        let r = &self.range;
        let mut s = SignSet {
            neg: r.contains(&-Rational::one()) || r.finite_lo().is_none_or(|a| a.is_negative()),
            zero: r.contains(&Rational::zero()) && !self.nonzero,
            pos: r.finite_hi().is_none_or(|b| b.is_positive()),
        };
        if let Some(v) = r.degenerate_value() {
            s = SignSet::of_rational(v);
        }
        if self.squares().degenerate_value().is_some_and(|v| v.is_zero()) {
            s = SignSet::ZERO;
        }
        if !self.squares().contains(&Rational::zero()) {
            s.zero = false;
        }
        s
    }
}

/// Assumptions for every parameter and function of a structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    params: BTreeMap<Symbol, ParamConstraint>,
    nonzero_funcs: BTreeMap<Symbol, bool>,
}

impl Assumptions {
    pub fn new() -> Self {
        Assumptions::default()
    }

    /// Declares an unconstrained parameter.
    pub fn declare(&mut self, p: &str) -> &mut Self {
        self.params.entry(Symbol::new(p)).or_default();
        self
    }

    pub fn declare_function(&mut self, f: &str, nonzero: bool) -> &mut Self {
        let e = self.nonzero_funcs.entry(Symbol::new(f)).or_insert(false);
        *e |= nonzero;
        self
    }

    pub fn params(&self) -> impl Iterator<Item = (&Symbol, &ParamConstraint)> {
        self.params.iter()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Symbol, bool)> {
        self.nonzero_funcs.iter().map(|(s, b)| (s, *b))
    }

    pub fn constraint(&self, p: &Symbol) -> Option<&ParamConstraint> {
        self.params.get(p)
    }

    pub fn function_nonzero(&self, f: &Symbol) -> bool {
        self.nonzero_funcs.get(f).copied().unwrap_or(false)
    }

    pub fn remove_param(&mut self, p: &Symbol) -> Option<ParamConstraint> {
        self.params.remove(p)
    }

    /// Union of declarations; shared parameters get intersected ranges.
    pub fn merge(&self, other: &Assumptions) -> Assumptions {
        let mut out = self.clone();
        for (p, c) in &other.params {
            match out.params.get_mut(p) {
                Some(mine) => {
                    mine.range = mine.range.intersect(&c.range);
                    mine.square_range = mine.square_range.intersect(&c.square_range);
                    mine.nonzero |= c.nonzero;
                    for t in &c.texts {
                        if !mine.texts.contains(t) {
                            mine.texts.push(t.clone());
                        }
                    }
                }
                None => {
                    out.params.insert(p.clone(), c.clone());
                }
            }
        }
        for (f, nz) in &other.nonzero_funcs {
            *out.nonzero_funcs.entry(f.clone()).or_insert(false) |= *nz;
        }
        out
    }

    /// Adds a constraint such as `a != 0`, `lambda^2 >= 1` or `0 < lambda^2 <= 1`.
    pub fn assume(&mut self, text: &str) -> Result<&mut Self, AssumptionError> {
        let bad = |reason: &str| AssumptionError::BadConstraint {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut operands = Vec::new();
        let mut ops = Vec::new();
        let mut rest = text.trim();
        loop {
            let next = ["<=", ">=", "!=", "==", "<", ">"]
                .iter()
                .filter_map(|op| rest.find(op).map(|i| (i, *op)))
                .min_by_key(|(i, op)| (*i, std::cmp::Reverse(op.len())));
            match next {
                Some((i, op)) => {
                    operands.push(rest[..i].trim().to_string());
                    ops.push(op);
                    rest = &rest[i + op.len()..];
                }
                None => {
                    operands.push(rest.trim().to_string());
                    break;
                }
            }
        }
        if ops.is_empty() {
            return Err(bad("no comparison operator"));
        }
        let mut touched = None;
        for (k, op) in ops.iter().enumerate() {
            let (l, r) = (&operands[k], &operands[k + 1]);
            let (sym, squared, value, op) = match (parse_subject(l), parse_subject(r)) {
                (Some((s, sq)), None) => (s, sq, parse_rational(r).ok_or_else(|| bad("expected a rational bound"))?, *op),
                (None, Some((s, sq))) => (s, sq, parse_rational(l).ok_or_else(|| bad("expected a rational bound"))?, flip(op)),
                _ => return Err(bad("each comparison needs one parameter side and one rational side")),
            };
            let entry = self.params.entry(Symbol::new(&sym)).or_default();
            let target = if squared { &mut entry.square_range } else { &mut entry.range };
            let new = match op {
                "<" => Interval { lo: Bound::Unbounded, hi: Bound::Excluded(value) },
                "<=" => Interval { lo: Bound::Unbounded, hi: Bound::Included(value) },
                ">" => Interval { lo: Bound::Excluded(value), hi: Bound::Unbounded },
                ">=" => Interval { lo: Bound::Included(value), hi: Bound::Unbounded },
                "==" => Interval::point(value),
                "!=" => {
                    if !value.is_zero() {
                        return Err(bad("only `!= 0` is supported"));
                    }
                    entry.nonzero = true;
                    Interval::all()
                }
                _ => unreachable!(),
            };
            *target = target.intersect(&new);
            touched = Some(sym);
        }
        if let Some(sym) = touched {
            self.params.get_mut(&Symbol::new(&sym)).unwrap().texts.push(text.trim().to_string());
        }
        Ok(self)
    }

    /// Verifies every parameter admits a rational value.
    pub fn check_consistent(&self) -> Result<(), AssumptionError> {
        for (p, c) in &self.params {
            if admissible_value(c, &mut ChaCha8Rng::seed_from_u64(0)).is_none() {
                return Err(AssumptionError::Inconsistent(p.to_string()));
            }
        }
        Ok(())
    }

    fn check_declared(&self, e: &Scalar) -> Result<(), AssumptionError> {
        for p in e.symbols().params {
            if !self.params.contains_key(&p) {
                return Err(AssumptionError::Undeclared(p.to_string()));
            }
        }
        Ok(())
    }

    /// Possible signs of a parameter-only expression over the admissible range.
    pub fn sign(&self, e: &Scalar) -> SignSet {
        if e.is_zero() {
            return SignSet::ZERO;
        }
        if !e.is_parameter_only() {
            return SignSet::ANY;
        }
        let (content, rest) = e.content();
        let mut s = self.monomial_sign(&content);
        if let Some(q) = rest.as_rational() {
            return s.mul(SignSet::of_rational(&q));
        }
        s = s.mul(self.cofactor_sign(&rest));
        s
    }

    fn monomial_sign(&self, m: &Scalar) -> SignSet {
        let (c, mono) = m.as_monomial().expect("monomial");
        let mut s = SignSet::of_rational(c);
        for (a, k) in mono.powers() {
            let ps = match a {
                Atom::Param(p) => self.params.get(p).map_or(
                    SignSet::ANY,
                    |pc| pc.sign(),
                ),
                _ => SignSet::ANY,
            };
            s = s.mul(ps.powi(k));
        }
        s
    }

    fn cofactor_sign(&self, rest: &Scalar) -> SignSet {
        let syms = rest.symbols().params;
        if syms.len() == 1 {
            let p = syms.into_iter().next().unwrap();
            let pc = self.params.get(&p).cloned().unwrap_or_default();
            if let Some(poly) = rest.as_univariate(&p, true) {
                return poly_sign_on(&poly, &pc.squares());
            }
            if let Some(poly) = rest.as_univariate(&p, false) {
                return poly_sign_on(&poly, &pc.range);
            }
        }
        // Fallback: termwise sign, sound for sums of sign-definite terms.
        let mut acc: Option<SignSet> = None;
        for (m, c) in rest.terms() {
            let t = self.monomial_sign(&Scalar::term(c.clone(), m.clone()));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(t),
            });
        }
        acc.unwrap_or(SignSet::ZERO)
    }

    fn atom_nowhere_zero(&self, a: &Atom) -> bool {
        match a {
            Atom::Func { name, order: 0, .. } => self.function_nonzero(name),
            _ => false,
        }
    }

    /// Tri-state zero test. `seed` controls witness sampling only.
    pub fn is_zero(&self, e: &Scalar, seed: u64) -> Result<Verdict, AssumptionError> {
        Ok(self.zero_test(e, seed)?.verdict)
    }

    pub fn zero_test(&self, e: &Scalar, seed: u64) -> Result<ZeroTest, AssumptionError> {
        self.check_consistent()?;
        self.check_declared(e)?;
        if e.is_zero() {
            return Ok(ZeroTest {
                verdict: Verdict::Zero,
                witness: None,
            });
        }
        let witness = self.nonzero_witness(e, seed);
        let coeffs = e.point_coefficients();
        let proven = coeffs.len() == 1 && {
            let (point, coeff) = coeffs.iter().next().unwrap();
            point.powers().all(|(a, _)| self.atom_nowhere_zero(a)) && self.sign(coeff).excludes_zero()
        };
        Ok(ZeroTest {
            verdict: if proven { Verdict::NonZero } else { Verdict::Unknown },
            witness,
        })
    }

    /// Searches up to 32 seeded admissible bindings for one where `e ≠ 0`.
    pub fn nonzero_witness(&self, e: &Scalar, seed: u64) -> Option<Bindings> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let b = self.sample_bindings(e, &mut rng)?;
            if let Ok(v) = e.eval(&b) {
                if !v.is_zero() {
                    return Some(b);
                }
            }
        }
        None
    }

    /// Random admissible binding for every symbol of `e`. Abstract functions
    /// become polynomials of degree ≤ 4 (strictly positive ones when declared
    /// nonzero) and `exp` is evaluated generically.
    pub fn sample_bindings(&self, e: &Scalar, rng: &mut ChaCha8Rng) -> Option<Bindings> {
        let syms = e.symbols();
        let mut b = Bindings::new();
        for p in &syms.params {
            let c = self.params.get(p).cloned().unwrap_or_default();
            b.set(p.as_str(), admissible_value(&c, rng)?);
        }
        for v in &syms.coords {
            b.set(v.as_str(), random_rational(rng));
            b.set_exp(v.as_str(), random_positive(rng));
        }
        for f in &syms.funcs {
            b.set_function(f.as_str(), random_poly(rng, self.function_nonzero(f)));
        }
        Some(b)
    }
}

#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub verdict: Verdict,
    /// Admissible binding where the expression evaluates nonzero, if found.
    pub witness: Option<Bindings>,
}

fn flip(op: &str) -> &'static str {
    match op {
        "<" => ">",
        "<=" => ">=",
        ">" => "<",
        ">=" => "<=",
        "==" => "==",
        _ => "!=",
    }
}

fn parse_subject(s: &str) -> Option<(String, bool)> {
    let (name, squared) = match s.split_once('^') {
        Some((n, "2")) => (n.trim(), true),
        Some(_) => return None,
        None => (s, false),
    };
    let ok = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    ok.then(|| (name.to_string(), squared))
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b.trim()),
        None => (false, s),
    };
    let v = match body.split_once('/') {
        Some((n, d)) => {
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Rational::new(n.trim().parse().ok()?, d)
        }
        None => Rational::from_integer(body.parse().ok()?),
    };
    Some(if neg { -v } else { v })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-8i64..=8).into(), rng.gen_range(1i64..=8).into())
}

fn random_positive(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(1i64..=9).into(), rng.gen_range(1i64..=5).into())
}

fn random_poly(rng: &mut ChaCha8Rng, nonzero: bool) -> UnivariatePoly {
    if nonzero {
        // c0 + c2 s² + c4 s⁴ with c0 > 0, c2, c4 ≥ 0 has no real zeros
        let c0 = random_positive(rng);
        let c2 = Rational::new(rng.gen_range(0i64..=5).into(), rng.gen_range(1i64..=4).into());
        let c4 = Rational::new(rng.gen_range(0i64..=3).into(), rng.gen_range(1i64..=4).into());
        let c1 = Rational::zero();
        UnivariatePoly::new(vec![c0, c1.clone(), c2, c1, c4])
    } else {
        let deg = rng.gen_range(1usize..=4);
        UnivariatePoly::new((0..=deg).map(|_| random_rational(rng)).collect())
    }
}

/// Rational approximation of √x (x > 0) by a few Newton steps.
fn approx_sqrt(x: &Rational) -> Rational {
    let mut r = if x > &Rational::one() { x.clone() } else { Rational::one() };
    for _ in 0..6 {
        r = (&r + x / &r) / int(2);
        // keep heights small
        let scale = num_bigint::BigInt::from(1u64 << 20);
        r = Rational::new((&r * Rational::from_integer(scale.clone())).round().to_integer(), scale);
    }
    r
}

fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

fn admissible_value(c: &ParamConstraint, rng: &mut ChaCha8Rng) -> Option<Rational> {
    let mut candidates: Vec<Rational> = Vec::new();
    let squares = c.squares();
    if squares.is_empty() || c.range.is_empty() {
        return None;
    }
    if let Some(v) = squares.degenerate_value() {
        if let Some(r) = exact_sqrt(v) {
            candidates.push(r.clone());
            candidates.push(-r);
        }
    } else if let Some(m) = squares.interior_point() {
        if m.is_positive() {
            let r = approx_sqrt(&m);
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    if let Some(v) = c.range.degenerate_value() {
        candidates.push(v.clone());
    }
    if let Some(m) = c.range.interior_point() {
        candidates.push(m);
    }
    for k in [1, -1, 2, -2] {
        candidates.push(int(k));
    }
    candidates.extend(c.range.finite_lo().cloned());
    candidates.extend(c.range.finite_hi().cloned());
    // shuffle the deterministic candidates so different seeds probe different points
    let start = if candidates.is_empty() { 0 } else { rng.gen_range(0..candidates.len()) };
    candidates.rotate_left(start);
    for _ in 0..200 {
        candidates.push(random_rational(rng));
    }
    candidates.into_iter().find(|v| c.admits(v))
}

/// Possible signs of `p(t)` for `t` in `dom`, via exact root isolation.
pub fn poly_sign_on(p: &UnivariatePoly, dom: &Interval) -> SignSet {
    if p.is_zero() {
        return SignSet::ZERO;
    }
    if dom.is_empty() {
        return SignSet {
            neg: false,
            zero: false,
            pos: false,
        };
    }
    if p.degree() == Some(0) {
        return SignSet::of_rational(&p.leading());
    }
    if let Some(v) = dom.degenerate_value() {
        return SignSet::of_rational(&p.eval(v));
    }
    // strip rational roots sitting on finite endpoints
    let mut r = p.clone();
    let mut endpoint_sign = SignSet::POS;
    let mut zero_at_closed_end = false;
    for (end, lower) in [(&dom.lo, true), (&dom.hi, false)] {
        let (v, closed) = match end {
            Bound::Included(v) => (v, true),
            Bound::Excluded(v) => (v, false),
            Bound::Unbounded => continue,
        };
        while r.degree().unwrap_or(0) > 0 && r.eval(v).is_zero() {
            r = divide_linear(&r, v);
            zero_at_closed_end |= closed;
            // (t - v) is positive above the lower end, negative below the upper end
            if !lower {
                endpoint_sign = endpoint_sign.mul(SignSet::NEG);
            }
        }
    }
    let interior_roots = sturm_count_open(&r, dom);
    if interior_roots > 0 {
        return SignSet::ANY;
    }
    let probe = dom.interior_point().expect("nonempty interval with interior");
    let mut s = SignSet::of_rational(&r.eval(&probe)).mul(endpoint_sign);
    if zero_at_closed_end {
        s.zero = true;
    }
    s
}

fn divide_linear(p: &UnivariatePoly, root: &Rational) -> UnivariatePoly {
    // synthetic division by (t - root)
    let c = p.coeffs();
    let n = c.len();
    let mut q = vec![Rational::zero(); n - 1];
    let mut acc = Rational::zero();
    for i in (1..n).rev() {
        acc = &acc * root + &c[i];
        q[i - 1] = acc.clone();
    }
    UnivariatePoly::new(q)
}

fn sturm_chain(p: &UnivariatePoly) -> Vec<UnivariatePoly> {
    let mut chain = vec![p.clone(), p.derivative(1)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|s| *s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_i8(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct roots of `p` strictly inside `dom`; endpoints must not be roots.
fn sturm_count_open(p: &UnivariatePoly, dom: &Interval) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    let at = |b: &Bound<Rational>, upper: bool| -> usize {
        match b {
            Bound::Included(v) | Bound::Excluded(v) => variations(chain.iter().map(|q| sign_i8(&q.eval(v)))),
            Bound::Unbounded => variations(chain.iter().map(|q| {
                let s = sign_i8(&q.leading());
                let odd = q.degree().unwrap_or(0) % 2 == 1;
                if upper || !odd {
                    s
                } else {
                    -s
                }
            })),
        }
    };
    at(&dom.lo, false).saturating_sub(at(&dom.hi, true))
}

/// Monomial with the given parameter powers; helper for callers building witnesses.
pub fn param_monomial(p: &str, k: i32) -> Monomial {
    Monomial::atom(Atom::Param(Symbol::new(p))).pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_expr, SymbolTable};

    fn table() -> SymbolTable {
        SymbolTable::new()
            .with_params(["lambda", "a", "alpha0", "l"])
            .with_coords(["t", "x", "y"])
            .with_funcs(["q"])
    }

    fn p(s: &str) -> Scalar {
        parse_expr(s, &table()).unwrap().to_scalar().unwrap()
    }

    fn base() -> Assumptions {
        let mut a = Assumptions::new();
        for s in ["lambda", "a", "alpha0", "l"] {
            a.declare(s);
        }
        a
    }

    #[test]
    fn cancelled_is_zero() {
        assert_eq!(base().is_zero(&p("lambda^2 - lambda^2"), 1).unwrap(), Verdict::Zero);
    }

    #[test]
    fn nonzero_under_assumption() {
        let mut a = base();
        a.assume("a != 0").unwrap();
        assert_eq!(a.is_zero(&p("-2*a"), 1).unwrap(), Verdict::NonZero);
        assert_eq!(base().is_zero(&p("-2*a"), 1).unwrap(), Verdict::Unknown);
    }

    #[test]
    fn boundary_is_unknown() {
        let mut a = base();
        a.assume("0 < lambda^2 <= 1").unwrap();
        let t = a.zero_test(&p("1 - lambda^2"), 3).unwrap();
        assert_eq!(t.verdict, Verdict::Unknown);
        assert!(t.witness.is_some());
        assert!(a.sign(&p("1 - lambda^2")).nonnegative());
        let mut b = base();
        b.assume("lambda^2 >= 1").unwrap();
        assert!(b.sign(&p("lambda^2 - 1")).nonnegative());
        assert_eq!(b.is_zero(&p("2*lambda^2 - 1"), 0).unwrap(), Verdict::NonZero);
    }

    #[test]
    fn inconsistent_assumptions_fail() {
        let mut a = base();
        a.assume("lambda^2 < 0").unwrap();
        assert!(matches!(a.is_zero(&p("lambda"), 0), Err(AssumptionError::Inconsistent(_))));
        let mut b = base();
        b.assume("lambda^2 == 2").unwrap();
        assert!(b.check_consistent().is_err());
        let mut c = base();
        c.assume("a > 1").unwrap().assume("a < 1/2").unwrap();
        assert!(c.check_consistent().is_err());
    }

    #[test]
    fn function_atoms() {
        let mut a = base();
        a.declare_function("q", true);
        assert_eq!(a.is_zero(&p("exp(2*y)*q(t - x)^2"), 0).unwrap(), Verdict::NonZero);
        assert_eq!(a.is_zero(&p("exp(y)*q'(t - x)"), 0).unwrap(), Verdict::Unknown);
        let mut b = base();
        b.declare_function("q", false);
        assert_eq!(b.is_zero(&p("q(x - t)"), 0).unwrap(), Verdict::Unknown);
    }

    #[test]
    fn even_powers_are_nonnegative() {
        let a = base();
        assert!(a.sign(&p("lambda^2 + 1")).excludes_zero());
        assert!(a.sign(&p("alpha0^-2")).nonnegative());
        let mut b = base();
        b.assume("alpha0 != 0").unwrap();
        assert!(b.sign(&p("alpha0^-2")).excludes_zero());
    }

    #[test]
    fn constraint_parse_errors() {
        let mut a = base();
        assert!(a.assume("lambda").is_err());
        assert!(a.assume("lambda < mu").is_err());
        assert!(a.assume("a != 3").is_err());
    }

    #[test]
    fn sturm_root_counting() {
        // (t-1)(t-3) on (0, 2): one root
        let q = UnivariatePoly::new(vec![int(3), int(-4), int(1)]);
        let open = Interval {
            lo: Bound::Excluded(int(0)),
            hi: Bound::Excluded(int(2)),
        };
        assert_eq!(poly_sign_on(&q, &open), SignSet::ANY);
        let right = Interval {
            lo: Bound::Included(int(3)),
            hi: Bound::Unbounded,
        };
        let s = poly_sign_on(&q, &right);
        assert!(s.pos && s.zero && !s.neg);
    }
}
