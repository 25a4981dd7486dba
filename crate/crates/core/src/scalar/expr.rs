use std::fmt;

use num_traits::{One, Zero};

use super::canonical::rational_pow;
use super::{fmt_rational, Affine, Atom, Bindings, EvalError, Rational, Scalar, ScalarError, Symbol};

/// Uncanonicalised expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Param(Symbol),
    Coord(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Apply { func: Symbol, order: u32, arg: Box<Expr> },
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Mul(vec![Expr::num(-1), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Mul(vec![a, Expr::Pow(Box::new(b), -1)])
    }

    /// Canonical form of this tree.
    pub fn to_scalar(&self) -> Result<Scalar, ScalarError> {
        Ok(match self {
            Expr::Num(q) => Scalar::constant(q.clone()),
            Expr::Param(s) => Scalar::param(s.as_str()),
            Expr::Coord(s) => Scalar::coord(s.as_str()),
            Expr::Add(xs) => {
                let mut acc = Scalar::zero();
                for x in xs {
                    acc += &x.to_scalar()?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = Scalar::one();
                for x in xs {
                    acc = &acc * &x.to_scalar()?;
                }
                acc
            }
            Expr::Pow(b, k) => b.to_scalar()?.pow(*k)?,
            Expr::Exp(arg) => Scalar::exp(affine_of(&arg.to_scalar()?, "exp")?),
            Expr::Apply { func, order, arg } => {
                Scalar::func(func.as_str(), *order, affine_of(&arg.to_scalar()?, "a function application")?)
            }
        })
    }

    /// Direct evaluation on the tree, independent of canonicalisation.
    pub fn eval(&self, b: &Bindings) -> Result<Rational, EvalError> {
        Ok(match self {
            Expr::Num(q) => q.clone(),
            Expr::Param(s) | Expr::Coord(s) => b.value(s)?.clone(),
            Expr::Add(xs) => {
                let mut acc = Rational::zero();
                for x in xs {
                    acc += x.eval(b)?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = Rational::one();
                for x in xs {
                    acc *= x.eval(b)?;
                }
                acc
            }
            Expr::Pow(base, k) => {
                let v = base.eval(b)?;
                if v.is_zero() && *k < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                rational_pow(&v, *k)
            }
            Expr::Exp(arg) => b.eval_exp(&probe_affine(arg, b)?)?,
            Expr::Apply { func, order, arg } => b.function(func)?.derivative(*order).eval(&arg.eval(b)?),
        })
    }
}

/// Recovers the affine form of an `exp` argument by probing the tree at unit
/// coordinate vectors, so tree evaluation never goes through the canonical form.
fn probe_affine(arg: &Expr, b: &Bindings) -> Result<Affine, EvalError> {
    let mut coords = Vec::new();
    collect_coords(arg, &mut coords);
    let mut probe = b.clone();
    for v in &coords {
        probe.set(v.as_str(), Rational::zero());
    }
    let base = arg.eval(&probe)?;
    let mut terms = Vec::new();
    for v in &coords {
        probe.set(v.as_str(), Rational::one());
        terms.push((v.clone(), arg.eval(&probe)? - &base));
        probe.set(v.as_str(), Rational::zero());
    }
    Ok(Affine::from_parts(terms, base))
}

fn collect_coords(e: &Expr, out: &mut Vec<Symbol>) {
    match e {
        Expr::Coord(s) => {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| collect_coords(x, out)),
        Expr::Pow(x, _) | Expr::Exp(x) => collect_coords(x, out),
        Expr::Apply { arg, .. } => collect_coords(arg, out),
        Expr::Num(_) | Expr::Param(_) => {}
    }
}

fn affine_of(s: &Scalar, context: &'static str) -> Result<Affine, ScalarError> {
    let bad = || ScalarError::NonAffineArgument {
        context,
        arg: s.to_string(),
    };
    let mut constant = Rational::zero();
    let mut terms = Vec::new();
    for (m, c) in s.terms() {
        if m.is_one() {
            constant += c;
            continue;
        }
        if !m.exp_arg().is_zero() {
            return Err(bad());
        }
        let mut it = m.powers();
        match (it.next(), it.next()) {
            (Some((Atom::Coord(v), 1)), None) => terms.push((v.clone(), c.clone())),
            _ => return Err(bad()),
        }
    }
    Ok(Affine::from_parts(terms, constant))
}

impl Scalar {
    /// Canonical tree: a sum of products, one node per term, in canonical order.
    pub fn to_expr(&self) -> Expr {
        let mut sum = Vec::new();
        for (m, c) in self.terms() {
            let mut prod = Vec::new();
            if !c.is_one() || m.is_one() {
                prod.push(Expr::Num(c.clone()));
            }
            for (a, k) in m.powers() {
                let base = match a {
                    Atom::Param(s) => Expr::Param(s.clone()),
                    Atom::Coord(s) => Expr::Coord(s.clone()),
                    Atom::Func { name, order, arg } => Expr::Apply {
                        func: name.clone(),
                        order: *order,
                        arg: Box::new(affine_expr(arg)),
                    },
                };
                prod.push(if k == 1 { base } else { Expr::Pow(Box::new(base), k) });
            }
            if !m.exp_arg().is_zero() {
                prod.push(Expr::Exp(Box::new(affine_expr(m.exp_arg()))));
            }
            sum.push(Expr::Mul(prod));
        }
        Expr::Add(sum)
    }
}

fn affine_expr(a: &Affine) -> Expr {
    let mut parts = Vec::new();
    for (v, c) in a.terms() {
        parts.push(Expr::Mul(vec![Expr::Num(c.clone()), Expr::Coord(v.clone())]));
    }
    if !a.constant_term().is_zero() {
        parts.push(Expr::Num(a.constant_term().clone()));
    }
    Expr::Add(parts)
}

/// Canonical form of `e` as a tree. Idempotent node-for-node.
pub fn simplify(e: &Expr) -> Result<Expr, ScalarError> {
    Ok(e.to_scalar()?.to_expr())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write!(f, "({})", fmt_rational(q)),
            Expr::Param(s) | Expr::Coord(s) => write!(f, "{s}"),
            Expr::Add(xs) if xs.is_empty() => f.write_str("0"),
            Expr::Mul(xs) if xs.is_empty() => f.write_str("1"),
            Expr::Add(xs) | Expr::Mul(xs) => {
                let op = if matches!(self, Expr::Add(_)) { " + " } else { "*" };
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::Pow(b, k) => write!(f, "{b}^{k}"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Apply { func, order, arg } => {
                write!(f, "{func}")?;
                for _ in 0..*order {
                    f.write_str("'")?;
                }
                write!(f, "({arg})")
            }
        }
    }
}
