use std::fmt;

use crate::scalar::{Bindings, EvalError, Rational, Scalar};

/// Vector field `X = Σ Xⁱ eᵢ` in frame components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    comps: Vec<Scalar>,
}

impl Vector {
    pub fn new(comps: Vec<Scalar>) -> Vector {
        Vector { comps }
    }

    pub fn zero(dim: usize) -> Vector {
        Vector {
            comps: vec![Scalar::zero(); dim],
        }
    }

    /// The frame vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Vector {
        let mut v = Vector::zero(dim);
        v.comps[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.comps[i].clone()
    }

    pub fn comps(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, o: &Vector) -> Vector {
        Vector::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Vector) -> Vector {
        Vector::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        Vector::new(self.comps.iter().map(|a| a * c).collect())
    }

    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zeros(self.dim(), 1, 0);
        for (i, c) in self.comps.iter().enumerate() {
            t.set(&[i], c.clone());
        }
        t
    }

    pub fn eval(&self, b: &Bindings) -> Result<Vec<Rational>, EvalError> {
        self.comps.iter().map(|c| c.eval(b)).collect()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Dense tensor field with `contra` upper indices followed by `cov` lower ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    contra: usize,
    cov: usize,
    comps: Vec<Scalar>,
}

impl Tensor {
    pub fn zeros(dim: usize, contra: usize, cov: usize) -> Tensor {
        Tensor {
            dim,
            contra,
            cov,
            comps: vec![Scalar::zero(); dim.pow((contra + cov) as u32)],
        }
    }

    /// (0,2)-tensor from a matrix `m[i][j]`.
    pub fn from_matrix(m: &[Vec<Scalar>]) -> Tensor {
        let n = m.len();
        let mut t = Tensor::zeros(n, 0, 2);
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.set(&[i, j], v.clone());
            }
        }
        t
    }

    /// (1,1)-tensor `T^a_b = m[a][b]`.
    pub fn endo_from_matrix(m: &[Vec<Scalar>]) -> Tensor {
        let mut t = Tensor::from_matrix(m);
        t.contra = 1;
        t.cov = 1;
        t
    }

    pub fn identity(dim: usize) -> Tensor {
        let mut t = Tensor::zeros(dim, 1, 1);
        for i in 0..dim {
            t.set(&[i, i], Scalar::one());
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contra(&self) -> usize {
        self.contra
    }

    pub fn cov(&self) -> usize {
        self.cov
    }

    pub fn rank(&self) -> usize {
        self.contra + self.cov
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "tensor index count");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "tensor index out of range");
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> Scalar {
        self.comps[self.offset(idx)].clone()
    }

    pub fn get_ref(&self, idx: &[usize]) -> &Scalar {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let o = self.offset(idx);
        self.comps[o] = v;
    }

    /// All index tuples in row-major order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let r = self.rank();
        let total = self.dim.pow(r as u32);
        (0..total)
            .map(|mut n| {
                let mut idx = vec![0; r];
                for k in (0..r).rev() {
                    idx[k] = n % self.dim;
                    n /= self.dim;
                }
                idx
            })
            .collect()
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> {
        self.indices().into_iter().zip(self.comps.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    fn same_shape(&self, o: &Tensor) {
        assert_eq!((self.dim, self.contra, self.cov), (o.dim, o.contra, o.cov), "tensor shape mismatch");
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        self.same_shape(o);
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.same_shape(o);
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Tensor, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Tensor {
        Tensor {
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        }
    }

    pub fn map(&self, f: impl FnMut(&Scalar) -> Scalar) -> Tensor {
        Tensor {
            comps: self.comps.iter().map(f).collect(),
            ..*self
        }
    }

    pub fn try_map<E>(&self, f: impl FnMut(&Scalar) -> Result<Scalar, E>) -> Result<Tensor, E> {
        Ok(Tensor {
            comps: self.comps.iter().map(f).collect::<Result<_, E>>()?,
            ..*self
        })
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        self.map(|a| a * c)
    }

    pub fn scale_rational(&self, c: &Rational) -> Tensor {
        self.map(|a| a.scale(c))
    }

    /// Tensor product; upper indices of both factors come first.
    pub fn outer(&self, o: &Tensor) -> Tensor {
        assert_eq!(self.dim, o.dim);
        let mut t = Tensor::zeros(self.dim, self.contra + o.contra, self.cov + o.cov);
        for idx in t.indices() {
            let (au, rest) = idx.split_at(self.contra);
            let (bu, rest) = rest.split_at(o.contra);
            let (al, bl) = rest.split_at(self.cov);
            let a: Vec<usize> = au.iter().chain(al).copied().collect();
            let b: Vec<usize> = bu.iter().chain(bl).copied().collect();
            let x = self.get_ref(&a);
            if x.is_zero() {
                continue;
            }
            let y = o.get_ref(&b);
            if !y.is_zero() {
                t.set(&idx, x * y);
            }
        }
        t
    }

    /// Symmetric product `a⊙b = a⊗b + b⊗a` of two 1-forms.
    pub fn sym_product(a: &Tensor, b: &Tensor) -> Tensor {
        a.outer(b).add(&b.outer(a))
    }

    /// Matrix of a rank-2 tensor.
    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        assert_eq!(self.rank(), 2);
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(&[i, j])).collect()).collect()
    }

    /// Swaps the two indices of a rank-2 tensor.
    pub fn transpose(&self) -> Tensor {
        assert_eq!(self.rank(), 2);
        let mut t = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(&[i, j], self.get(&[j, i]));
            }
        }
        t
    }

    /// `(T v)^a = T^a_b v^b` for a (1,1)-tensor.
    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!((self.contra, self.cov), (1, 1));
        Vector::new(
            (0..self.dim)
                .map(|a| (0..self.dim).map(|b| self.get_ref(&[a, b]) * &v.get(b)).sum())
                .collect(),
        )
    }

    /// Composition `(S∘T)^a_c = S^a_b T^b_c` of (1,1)-tensors.
    pub fn compose(&self, o: &Tensor) -> Tensor {
        assert_eq!((self.contra, self.cov, o.contra, o.cov), (1, 1, 1, 1));
        let mut t = Tensor::zeros(self.dim, 1, 1);
        for a in 0..self.dim {
            for c in 0..self.dim {
                let v: Scalar = (0..self.dim).map(|b| self.get_ref(&[a, b]) * o.get_ref(&[b, c])).sum();
                t.set(&[a, c], v);
            }
        }
        t
    }

    /// Trace of a (1,1)-tensor.
    pub fn trace(&self) -> Scalar {
        assert_eq!((self.contra, self.cov), (1, 1));
        (0..self.dim).map(|i| self.get(&[i, i])).sum()
    }

    pub fn eval(&self, b: &Bindings) -> Result<Vec<Rational>, EvalError> {
        self.comps.iter().map(|c| c.eval(b)).collect()
    }

    /// Nonzero components with their index tuples.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, Scalar)> {
        self.components().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect()
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz = self.nonzero();
        if nz.is_empty() {
            return f.write_str("0");
        }
        for (n, (idx, v)) in nz.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{idx:?}: {v}")?;
        }
        Ok(())
    }
}
