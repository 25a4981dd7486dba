use std::collections::BTreeMap;
use std::fmt;

use super::{FrameError, Tensor, Vector};
use crate::scalar::{Bindings, EvalError, Rational, Scalar};

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Differential `p`-form in a frame, stored on increasing multi-indices.
///
/// `ω = Σ_{I increasing} ω_I e^I`, so `ω_I = ω(e_{i₁},…,e_{i_p})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Form {
        Form {
            dim,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(dim: usize, f: Scalar) -> Form {
        let mut w = Form::zero(dim, 0);
        w.set(&[], f);
        w
    }

    /// `e^{i₁}∧…∧e^{i_p}`, with any index order.
    pub fn basis(dim: usize, idx: &[usize]) -> Form {
        let mut w = Form::zero(dim, idx.len());
        w.add_at(idx, &Scalar::one());
        w
    }

    /// 1-form with the given frame components.
    pub fn one_form(comps: Vec<Scalar>) -> Form {
        let mut w = Form::zero(comps.len(), 1);
        for (i, c) in comps.into_iter().enumerate() {
            w.set(&[i], c);
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components on increasing multi-indices.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.comps.iter()
    }

    /// `ω(e_{i₁},…,e_{i_p})` for any index list.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        assert_eq!(idx.len(), self.degree, "index count must equal the degree");
        match sort_with_sign(idx) {
            None => Scalar::zero(),
            Some((k, s)) => match self.comps.get(&k) {
                Some(c) if s > 0 => c.clone(),
                Some(c) => -c,
                None => Scalar::zero(),
            },
        }
    }

    /// Sets the component so that `ω(e_{idx}) = value`, respecting antisymmetry.
    pub fn set(&mut self, idx: &[usize], value: Scalar) {
        let (k, s) = sort_with_sign(idx).expect("repeated index in form component");
        let v = if s > 0 { value } else { -&value };
        if v.is_zero() {
            self.comps.remove(&k);
        } else {
            self.comps.insert(k, v);
        }
    }

    fn add_at(&mut self, idx: &[usize], value: &Scalar) {
        let Some((k, s)) = sort_with_sign(idx) else { return };
        let entry = self.comps.entry(k.clone()).or_insert_with(Scalar::zero);
        if s > 0 {
            *entry += value;
        } else {
            *entry -= value;
        }
        if entry.is_zero() {
            self.comps.remove(&k);
        }
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.comps {
            let nv = f(v);
            if !nv.is_zero() {
                out.comps.insert(k.clone(), nv);
            }
        }
        out
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&Scalar) -> Result<Scalar, E>) -> Result<Form, E> {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.comps {
            let nv = f(v)?;
            if !nv.is_zero() {
                out.comps.insert(k.clone(), nv);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        self.map(|v| v * c)
    }

    pub fn scale_rational(&self, c: &Rational) -> Form {
        self.map(|v| v.scale(c))
    }

    pub fn add(&self, o: &Form) -> Form {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree), "form shape mismatch");
        let mut out = self.clone();
        for (k, v) in &o.comps {
            out.add_at(k, v);
        }
        out
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale_rational(&-Rational::from_integer(1.into())))
    }

    /// Wedge product with the shuffle convention, `(e¹∧e²)(e₁,e₂) = 1`.
    pub fn wedge(&self, o: &Form) -> Result<Form, FrameError> {
        if self.dim != o.dim {
            return Err(FrameError::DimensionMismatch(self.dim, o.dim));
        }
        let deg = self.degree + o.degree;
        if deg > self.dim {
            return Err(FrameError::DegreeOverflow { degree: deg, dim: self.dim });
        }
        let mut out = Form::zero(self.dim, deg);
        for (i, a) in &self.comps {
            for (j, b) in &o.comps {
                let idx: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
                if sort_with_sign(&idx).is_some() {
                    out.add_at(&idx, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_X ω`, inserting `X` in the first slot.
    pub fn interior(&self, x: &Vector) -> Result<Form, FrameError> {
        if self.degree == 0 {
            return Err(FrameError::InteriorOfFunction);
        }
        if x.dim() != self.dim {
            return Err(FrameError::DimensionMismatch(self.dim, x.dim()));
        }
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (k, v) in &self.comps {
            for (pos, &i) in k.iter().enumerate() {
                let xi = x.get(i);
                if xi.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = k.iter().enumerate().filter(|(p, _)| *p != pos).map(|(_, &j)| j).collect();
                let term = &xi * v;
                if pos % 2 == 0 {
                    out.add_at(&rest, &term);
                } else {
                    out.add_at(&rest, &-&term);
                }
            }
        }
        Ok(out)
    }

    /// `ω(X₁,…,X_p)`.
    pub fn eval_on(&self, xs: &[Vector]) -> Result<Scalar, FrameError> {
        assert_eq!(xs.len(), self.degree);
        let mut w = self.clone();
        for x in xs {
            w = w.interior(x)?;
        }
        Ok(w.get(&[]))
    }

    /// Dense covariant tensor with the antisymmetric component table.
    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zeros(self.dim, 0, self.degree);
        for idx in t.indices() {
            let v = self.get(&idx);
            if !v.is_zero() {
                t.set(&idx, v);
            }
        }
        t
    }

    /// Reads a covariant tensor as a form, rejecting non-antisymmetric tables.
    pub fn from_tensor(t: &Tensor) -> Result<Form, FrameError> {
        if t.contra() != 0 {
            return Err(FrameError::NotAForm);
        }
        let mut w = Form::zero(t.dim(), t.cov());
        for idx in combinations(t.dim(), t.cov()) {
            w.set(&idx, t.get(&idx));
        }
        if w.to_tensor() != *t {
            return Err(FrameError::NotAForm);
        }
        Ok(w)
    }

    /// Exact evaluation of every component.
    pub fn eval(&self, b: &Bindings) -> Result<BTreeMap<Vec<usize>, Rational>, EvalError> {
        self.comps.iter().map(|(k, v)| Ok((k.clone(), v.eval(b)?))).collect()
    }

    pub(crate) fn shift(&self, dim: usize, offset: usize) -> Form {
        let mut out = Form::zero(dim, self.degree);
        for (k, v) in &self.comps {
            out.comps.insert(k.iter().map(|i| i + offset).collect(), v.clone());
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, v)) in self.comps.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({v})")?;
            if !k.is_empty() {
                let names: Vec<String> = k.iter().map(|i| format!("e^{}", i)).collect();
                write!(f, " {}", names.join("^"))?;
            }
        }
        Ok(())
    }
}
