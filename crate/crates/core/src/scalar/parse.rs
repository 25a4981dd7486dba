//! Literal syntax for scalar expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := integer | ident | 'exp' '(' expr ')'
//!          | func '\''* '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers must be declared in the [`SymbolTable`] as a parameter, a
//! coordinate or a function. Multiplication is always explicit.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Expr, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub params: BTreeSet<String>,
    pub coords: BTreeSet<String>,
    pub funcs: BTreeSet<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    pub fn with_params<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.params.extend(names.into_iter().map(String::from));
        self
    }

    pub fn with_coords<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.coords.extend(names.into_iter().map(String::from));
        self
    }

    pub fn with_funcs<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.funcs.extend(names.into_iter().map(String::from));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Prime,
    Op(char),
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((col, Tok::Int(chars[start..i].iter().collect())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else {
            let t = match c {
                '\'' => Tok::Prime,
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError {
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((col, t));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(c, _)| *c).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            terms.push(if op == '-' { Expr::neg(t) } else { t });
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let f = self.unary()?;
            factors.push(if op == '/' { Expr::Pow(Box::new(f), -1) } else { f });
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Mul(factors) })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let k: i32 = match n.parse() {
                    Ok(k) => k,
                    Err(_) => return self.err("exponent out of range"),
                };
                Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let v: num_bigint::BigInt = n.parse().expect("digits");
                Ok(Expr::Num(Rational::from_integer(v)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let col = self.col();
                self.pos += 1;
                if name == "exp" {
                    self.expect(Tok::LParen, "`(` after exp")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Exp(Box::new(arg)));
                }
                if self.table.funcs.contains(&name) {
                    let mut order = 0;
                    while self.peek() == Some(&Tok::Prime) {
                        self.pos += 1;
                        order += 1;
                    }
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Apply {
                        func: Symbol::new(&name),
                        order,
                        arg: Box::new(arg),
                    });
                }
                if self.table.params.contains(&name) {
                    Ok(Expr::Param(Symbol::new(&name)))
                } else if self.table.coords.contains(&name) {
                    Ok(Expr::Coord(Symbol::new(&name)))
                } else {
                    Err(ParseError {
                        column: col,
                        message: format!("undeclared symbol `{name}`"),
                    })
                }
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression literal against declared symbols.
pub fn parse_expr(s: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: s.chars().count() + 1,
        table,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_undeclared() {
        let t = SymbolTable::new().with_params(["a"]);
        let err = parse_expr("a + b", &t).unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.message.contains("`b`"));
    }

    #[test]
    fn derivative_notation() {
        let t = SymbolTable::new().with_coords(["x", "t"]).with_funcs(["q"]);
        let e = parse_expr("q''(x - t)", &t).unwrap();
        assert!(matches!(e, Expr::Apply { order: 2, .. }));
    }

    #[test]
    fn syntax_errors() {
        let t = SymbolTable::new().with_params(["a"]);
        assert!(parse_expr("a +", &t).is_err());
        assert!(parse_expr("(a", &t).is_err());
        assert!(parse_expr("a^b", &t).is_err());
        assert!(parse_expr("a $ 1", &t).is_err());
    }
}
