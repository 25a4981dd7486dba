//! Exterior calculus and tensor algebra on manifolds presented by a global frame.
//!
//! A manifold is a frame `e₁,…,e_n` with structure functions
//! `[e_i,e_j] = Σ_k c^k_{ij} e_k`, a metric `g_{ij} = g(e_i,e_j)` and an
//! orientation sign `σ` fixing the volume form `ν = σ√|det g| e¹∧…∧eⁿ`.
//! Frames may act on coordinates, `e_i = Σ_μ E_i^μ ∂_μ`; left-invariant
//! frames have no coordinates and annihilate every function.
//!
//! Conventions: `d` carries no `1/(p+1)` factor, so for a left-invariant
//! 1-form `dα(e_i,e_j) = −α([e_i,e_j])`; the wedge uses the shuffle
//! convention; `⋆` is defined by `η∧⋆ω = ⟨η,ω⟩ ν` with
//! `⟨η,ω⟩ = (1/p!) η_{I} ω^{I}`.

mod form;
mod tensor;

use std::sync::Arc;

use thiserror::Error;

pub use form::{combinations, sort_with_sign, Form};
pub use tensor::{Tensor, Vector};

use crate::assume::{AssumptionError, Assumptions, Verdict};
use crate::scalar::{Rational, Scalar, ScalarError, Symbol, UnivariatePoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("wedge of total degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("interior product of a 0-form")]
    InteriorOfFunction,
    #[error("tensor is not totally antisymmetric")]
    NotAForm,
    #[error("frame label `{0}` is not defined")]
    UnknownLabel(String),
    #[error("bracket [{0},{1}] given twice with inconsistent values")]
    InconsistentBracket(String, String),
    #[error("bracket of a frame vector with itself must vanish: [{0},{0}]")]
    SelfBracket(String),
    #[error("Jacobi identity fails for ({0}, {1}, {2}): residual {3}")]
    Jacobi(String, String, String, String),
    #[error("structure functions disagree with the frame action on coordinate `{coord}` for [{a},{b}]")]
    BracketAction { a: String, b: String, coord: String },
    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(String, String),
    #[error("metric determinant {0} is not provably nonzero")]
    DegenerateMetric(String),
    #[error("metric determinant {0} has no monomial square root; Hodge star unavailable")]
    NoVolumeForm(String),
    #[error("orientation must be +1 or -1, got {0}")]
    BadOrientation(i64),
    #[error("product factors must be Lorentzian × Riemannian")]
    SignatureMismatch,
    #[error("coordinate `{0}` appears in both product factors")]
    SharedCoordinate(String),
    #[error("manifold is not a factor of this product")]
    FactorNotFound,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Assumption(#[from] AssumptionError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub manifold: Arc<FrameManifold>,
    pub offset: usize,
}

/// Manifold presented by a global frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameManifold {
    labels: Vec<String>,
    coords: Vec<Symbol>,
    /// `action[i][μ] = E_i^μ`.
    action: Vec<Vec<Scalar>>,
    /// `structure[i][j][k] = c^k_{ij}`.
    structure: Vec<Vec<Vec<Scalar>>>,
    metric: Vec<Vec<Scalar>>,
    metric_inv: Vec<Vec<Scalar>>,
    det: Scalar,
    sqrt_abs_det: Option<Scalar>,
    orientation: i8,
    signature: i8,
    assumptions: Assumptions,
    factors: Vec<Factor>,
}

/// Incremental description of a [`FrameManifold`].
#[derive(Clone, Debug)]
pub struct FrameBuilder {
    labels: Vec<String>,
    coords: Vec<Symbol>,
    action: Option<Vec<Vec<Scalar>>>,
    brackets: Vec<(usize, usize, Vec<Scalar>)>,
    metric: Option<Vec<Vec<Scalar>>>,
    orientation: i64,
    assumptions: Assumptions,
}

impl FrameBuilder {
    pub fn label_index(&self, l: &str) -> Result<usize, FrameError> {
        self.labels.iter().position(|x| x == l).ok_or_else(|| FrameError::UnknownLabel(l.to_string()))
    }

    /// `[e_i,e_j] = Σ_k comps[k] e_k`.
    pub fn bracket(mut self, i: usize, j: usize, comps: Vec<Scalar>) -> Self {
        self.brackets.push((i, j, comps));
        self
    }

    /// Bracket by labels with sparse right-hand side.
    pub fn bracket_by_label(self, a: &str, b: &str, rhs: &[(&str, Scalar)]) -> Result<Self, FrameError> {
        let n = self.labels.len();
        let (i, j) = (self.label_index(a)?, self.label_index(b)?);
        let mut comps = vec![Scalar::zero(); n];
        for (l, c) in rhs {
            comps[self.label_index(l)?] += c;
        }
        Ok(self.bracket(i, j, comps))
    }

    pub fn metric(mut self, g: Vec<Vec<Scalar>>) -> Self {
        self.metric = Some(g);
        self
    }

    pub fn diagonal_metric(self, diag: &[i64]) -> Self {
        let n = diag.len();
        let g = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Scalar::from_int(diag[i]) } else { Scalar::zero() }).collect())
            .collect();
        self.metric(g)
    }

    pub fn orientation(mut self, s: i64) -> Self {
        self.orientation = s;
        self
    }

    /// Coordinate functions with frame action `e_i = Σ_μ action[i][μ] ∂_μ`.
    pub fn coordinates(mut self, coords: &[&str], action: Vec<Vec<Scalar>>) -> Self {
        self.coords = coords.iter().map(|c| Symbol::new(c)).collect();
        self.action = Some(action);
        self
    }

    /// Coordinate frame `e_μ = ∂_μ`.
    pub fn coordinate_frame(self, coords: &[&str]) -> Self {
        let n = coords.len();
        let id = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        self.coordinates(coords, id)
    }

    pub fn assumptions(mut self, a: Assumptions) -> Self {
        self.assumptions = a;
        self
    }

    pub fn build(self) -> Result<FrameManifold, FrameError> {
        let n = self.labels.len();
        let mut structure = vec![vec![vec![Scalar::zero(); n]; n]; n];
        let mut given = vec![vec![false; n]; n];
        for (i, j, comps) in &self.brackets {
            let (i, j) = (*i, *j);
            if comps.len() != n {
                return Err(FrameError::DimensionMismatch(comps.len(), n));
            }
            if i == j {
                if comps.iter().any(|c| !c.is_zero()) {
                    return Err(FrameError::SelfBracket(self.labels[i].clone()));
                }
                continue;
            }
            let neg: Vec<Scalar> = comps.iter().map(|c| -c).collect();
            if given[i][j] && structure[i][j] != *comps {
                return Err(FrameError::InconsistentBracket(self.labels[i].clone(), self.labels[j].clone()));
            }
            given[i][j] = true;
            given[j][i] = true;
            structure[i][j] = comps.clone();
            structure[j][i] = neg;
        }
        let action = self.action.unwrap_or_else(|| vec![Vec::new(); n]);
        if action.len() != n || action.iter().any(|r| r.len() != self.coords.len()) {
            return Err(FrameError::DimensionMismatch(action.len(), n));
        }
        let metric = self.metric.unwrap_or_else(|| {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
                .collect()
        });
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(FrameError::DimensionMismatch(metric.len(), n));
        }
        for i in 0..n {
            for j in 0..i {
                if metric[i][j] != metric[j][i] {
                    return Err(FrameError::AsymmetricMetric(self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(FrameError::BadOrientation(self.orientation));
        }
        let mut m = FrameManifold::assemble(
            self.labels,
            self.coords,
            action,
            structure,
            metric,
            self.orientation as i8,
            self.assumptions,
        )?;
        m.check_bracket_action()?;
        m.check_jacobi()?;
        m.factors = Vec::new();
        Ok(m)
    }
}

impl FrameManifold {
    pub fn builder<S: AsRef<str>>(labels: &[S]) -> FrameBuilder {
        FrameBuilder {
            labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
            coords: Vec::new(),
            action: None,
            brackets: Vec::new(),
            metric: None,
            orientation: 1,
            assumptions: Assumptions::new(),
        }
    }

    fn assemble(
        labels: Vec<String>,
        coords: Vec<Symbol>,
        action: Vec<Vec<Scalar>>,
        structure: Vec<Vec<Vec<Scalar>>>,
        metric: Vec<Vec<Scalar>>,
        orientation: i8,
        assumptions: Assumptions,
    ) -> Result<FrameManifold, FrameError> {
        let det = determinant(&metric);
        let mut declared = assumptions.clone();
        for p in det.symbols().params {
            if declared.constraint(&p).is_none() {
                declared.declare(p.as_str());
            }
        }
        if declared.is_zero(&det, 0)? != Verdict::NonZero {
            return Err(FrameError::DegenerateMetric(det.to_string()));
        }
        let sign = declared.sign(&det);
        let signature = if !sign.neg { 1 } else if !sign.pos { -1 } else {
            return Err(FrameError::DegenerateMetric(det.to_string()));
        };
        let inv_det = det.try_inverse()?;
        let n = labels.len();
        let metric_inv = (0..n)
            .map(|i| (0..n).map(|j| &cofactor(&metric, j, i) * &inv_det).collect())
            .collect();
        let abs_det = if signature < 0 { -&det } else { det.clone() };
        let sqrt_abs_det = abs_det.sqrt_monomial().ok().and_then(|r| {
            let s = declared.sign(&r);
            if !s.neg && !s.zero {
                Some(r)
            } else if !s.pos && !s.zero {
                Some(-&r)
            } else {
                None
            }
        });
        Ok(FrameManifold {
            labels,
            coords,
            action,
            structure,
            metric,
            metric_inv,
            det,
            sqrt_abs_det,
            orientation,
            signature,
            assumptions,
            factors: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, l: &str) -> Result<usize, FrameError> {
        self.labels.iter().position(|x| x == l).ok_or_else(|| FrameError::UnknownLabel(l.to_string()))
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn is_left_invariant(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn action(&self) -> &[Vec<Scalar>] {
        &self.action
    }

    /// `c^k_{ij}`.
    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.structure[i][j][k]
    }

    pub fn metric(&self) -> &[Vec<Scalar>] {
        &self.metric
    }

    pub fn metric_tensor(&self) -> Tensor {
        Tensor::from_matrix(&self.metric)
    }

    pub fn metric_inverse(&self) -> &[Vec<Scalar>] {
        &self.metric_inv
    }

    pub fn det(&self) -> &Scalar {
        &self.det
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// `s_g`: +1 for Riemannian, −1 for Lorentzian.
    pub fn signature(&self) -> i8 {
        self.signature
    }

    pub fn assumptions(&self) -> &Assumptions {
        &self.assumptions
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Same manifold with the other orientation if `s = −σ`.
    pub fn with_orientation(&self, s: i8) -> FrameManifold {
        assert!(s == 1 || s == -1, "orientation must be ±1");
        FrameManifold {
            orientation: s,
            ..self.clone()
        }
    }

    pub fn with_assumptions(&self, a: Assumptions) -> FrameManifold {
        FrameManifold {
            assumptions: a,
            ..self.clone()
        }
    }

    pub fn zero_test(&self, e: &Scalar, seed: u64) -> Result<Verdict, AssumptionError> {
        self.assumptions.is_zero(e, seed)
    }

    /// `e_i(f)`.
    pub fn derive(&self, i: usize, f: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (mu, e) in self.action[i].iter().enumerate() {
            if !e.is_zero() {
                out += &(e * &f.differentiate(&self.coords[mu]));
            }
        }
        out
    }

    /// `X(f)`.
    pub fn directional(&self, x: &Vector, f: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for i in 0..self.dim() {
            let xi = x.get(i);
            if !xi.is_zero() {
                out += &(&xi * &self.derive(i, f));
            }
        }
        out
    }

    fn check_bracket_action(&self) -> Result<(), FrameError> {
        let n = self.dim();
        for (mu, c) in self.coords.iter().enumerate() {
            for i in 0..n {
                for j in (i + 1)..n {
                    // [e_i,e_j](x^μ) = e_i(E_j^μ) − e_j(E_i^μ) must equal c^k_ij E_k^μ
                    let lhs = &self.derive(i, &self.action[j][mu]) - &self.derive(j, &self.action[i][mu]);
                    let rhs: Scalar = (0..n).map(|k| &self.structure[i][j][k] * &self.action[k][mu]).sum();
                    if lhs != rhs {
                        return Err(FrameError::BracketAction {
                            a: self.labels[i].clone(),
                            b: self.labels[j].clone(),
                            coord: c.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Jacobi residual `Σ_cyc [e_i,[e_j,e_k]]` in frame components.
    pub fn jacobi_residual(&self, i: usize, j: usize, k: usize) -> Vector {
        let n = self.dim();
        let mut out = Vector::zero(n);
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            let inner = Vector::new(self.structure[b][c].clone());
            out = out.add(&self.lie_bracket(&Vector::basis(n, a), &inner));
        }
        out
    }

    pub fn check_jacobi(&self) -> Result<(), FrameError> {
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let r = self.jacobi_residual(i, j, k);
                    if !r.is_zero() {
                        return Err(FrameError::Jacobi(
                            self.labels[i].clone(),
                            self.labels[j].clone(),
                            self.labels[k].clone(),
                            r.to_string(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Coframe element `eⁱ`.
    pub fn coframe(&self, i: usize) -> Form {
        Form::basis(self.dim(), &[i])
    }

    pub fn frame(&self, i: usize) -> Vector {
        Vector::basis(self.dim(), i)
    }

    pub fn lie_bracket(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim();
        let mut out: Vec<Scalar> = (0..n)
            .map(|k| &self.directional(x, &y.get(k)) - &self.directional(y, &x.get(k)))
            .collect();
        for i in 0..n {
            let xi = x.get(i);
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                let yj = y.get(j);
                if yj.is_zero() || i == j {
                    continue;
                }
                let xy = &xi * &yj;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &(&xy * c);
                    }
                }
            }
        }
        Vector::new(out)
    }

    pub fn inner_vectors(&self, x: &Vector, y: &Vector) -> Scalar {
        let n = self.dim();
        let mut out = Scalar::zero();
        for i in 0..n {
            for j in 0..n {
                let g = &self.metric[i][j];
                if !g.is_zero() {
                    out += &(&(g * &x.get(i)) * &y.get(j));
                }
            }
        }
        out
    }

    /// `α♯`, with `g(α♯, Y) = α(Y)`.
    pub fn sharp(&self, a: &Form) -> Vector {
        assert_eq!(a.degree(), 1, "sharp takes a 1-form");
        let n = self.dim();
        Vector::new(
            (0..n)
                .map(|i| (0..n).map(|j| &self.metric_inv[i][j] * &a.get(&[j])).sum())
                .collect(),
        )
    }

    /// `X♭ = g(X, ·)`.
    pub fn flat(&self, x: &Vector) -> Form {
        let n = self.dim();
        Form::one_form((0..n).map(|j| (0..n).map(|i| &self.metric[i][j] * &x.get(i)).sum()).collect())
    }

    /// Minor of `g⁻¹` with rows `rows` and columns `cols`.
    fn inverse_minor(&self, rows: &[usize], cols: &[usize]) -> Scalar {
        let m: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.metric_inv[r][c].clone()).collect())
            .collect();
        determinant(&m)
    }

    /// Raised components `ω^I` on increasing multi-indices.
    fn raise(&self, w: &Form) -> Vec<(Vec<usize>, Scalar)> {
        let mut out = Vec::new();
        for i in combinations(self.dim(), w.degree()) {
            let mut v = Scalar::zero();
            for (k, c) in w.components() {
                let minor = self.inverse_minor(&i, k);
                if !minor.is_zero() {
                    v += &(&minor * c);
                }
            }
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        out
    }

    /// `⟨η,ω⟩ = (1/p!) η_I ω^I`.
    pub fn inner(&self, a: &Form, b: &Form) -> Scalar {
        assert_eq!(a.degree(), b.degree(), "inner product needs equal degrees");
        self.raise(b).into_iter().map(|(i, v)| &a.get(&i) * &v).sum()
    }

    pub fn sqrt_abs_det(&self) -> Result<&Scalar, FrameError> {
        self.sqrt_abs_det
            .as_ref()
            .ok_or_else(|| FrameError::NoVolumeForm(self.det.to_string()))
    }

    /// `ν = σ√|det g| e¹∧…∧eⁿ`.
    pub fn volume(&self) -> Result<Form, FrameError> {
        let all: Vec<usize> = (0..self.dim()).collect();
        let c = self.sqrt_abs_det()?.scale(&Rational::from_integer(self.orientation.into()));
        Ok(Form::basis(self.dim(), &all).scale(&c))
    }

    pub fn hodge(&self, w: &Form) -> Result<Form, FrameError> {
        let n = self.dim();
        if w.dim() != n {
            return Err(FrameError::DimensionMismatch(w.dim(), n));
        }
        let vol = self.sqrt_abs_det()?.scale(&Rational::from_integer(self.orientation.into()));
        let p = w.degree();
        let mut out = Form::zero(n, n - p);
        for (i, v) in self.raise(w) {
            let j: Vec<usize> = (0..n).filter(|k| !i.contains(k)).collect();
            let full: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
            let (_, s) = sort_with_sign(&full).expect("complement");
            let mut term = &v * &vol;
            if s < 0 {
                term = -&term;
            }
            out = out.add(&{
                let mut f = Form::zero(n, n - p);
                f.set(&j, term);
                f
            });
        }
        Ok(out)
    }

    pub fn ext_d(&self, w: &Form) -> Form {
        let n = self.dim();
        let p = w.degree();
        let mut out = Form::zero(n, p + 1);
        if p + 1 > n {
            return out;
        }
        for k in combinations(n, p + 1) {
            let mut v = Scalar::zero();
            for a in 0..=p {
                let rest: Vec<usize> = k.iter().enumerate().filter(|(x, _)| *x != a).map(|(_, &i)| i).collect();
                let f = w.get(&rest);
                if !f.is_zero() {
                    let t = self.derive(k[a], &f);
                    if a % 2 == 0 {
                        v += &t;
                    } else {
                        v -= &t;
                    }
                }
            }
            for a in 0..=p {
                for b in (a + 1)..=p {
                    let rest: Vec<usize> = k
                        .iter()
                        .enumerate()
                        .filter(|(x, _)| *x != a && *x != b)
                        .map(|(_, &i)| i)
                        .collect();
                    for m in 0..n {
                        let c = &self.structure[k[a]][k[b]][m];
                        if c.is_zero() {
                            continue;
                        }
                        let mut idx = vec![m];
                        idx.extend(&rest);
                        let f = w.get(&idx);
                        if f.is_zero() {
                            continue;
                        }
                        let t = c * &f;
                        if (a + b) % 2 == 0 {
                            v += &t;
                        } else {
                            v -= &t;
                        }
                    }
                }
            }
            out.set(&k, v);
        }
        out
    }

    /// Lie derivative of a form by Cartan's formula `L_X = dι_X + ι_X d`.
    pub fn lie_derivative_form(&self, x: &Vector, w: &Form) -> Form {
        let a = if w.degree() == 0 {
            Form::zero(self.dim(), 0)
        } else {
            self.ext_d(&w.interior(x).expect("degree ≥ 1"))
        };
        let b = if w.degree() == self.dim() {
            Form::zero(self.dim(), w.degree())
        } else {
            self.ext_d(w).interior(x).expect("degree ≥ 1")
        };
        a.add(&b)
    }

    /// `B^k_j` with `[X, e_j] = Σ_k B^k_j e_k`.
    fn bracket_matrix(&self, x: &Vector) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let mut v = -&self.derive(j, &x.get(k));
                        for i in 0..n {
                            let xi = x.get(i);
                            let c = &self.structure[i][j][k];
                            if !xi.is_zero() && !c.is_zero() {
                                v += &(&xi * c);
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    /// Lie derivative of a dense tensor field.
    pub fn lie_derivative(&self, x: &Vector, t: &Tensor) -> Tensor {
        let n = self.dim();
        let b = self.bracket_matrix(x);
        let mut out = Tensor::zeros(n, t.contra(), t.cov());
        for idx in out.indices() {
            let mut v = self.directional(x, t.get_ref(&idx));
            for slot in 0..t.rank() {
                let mut j = idx.clone();
                for m in 0..n {
                    j[slot] = m;
                    let tv = t.get_ref(&j);
                    if tv.is_zero() {
                        continue;
                    }
                    if slot < t.contra() {
                        let c = &b[idx[slot]][m];
                        if !c.is_zero() {
                            v += &(c * tv);
                        }
                    } else {
                        let c = &b[m][idx[slot]];
                        if !c.is_zero() {
                            v -= &(tv * c);
                        }
                    }
                }
            }
            out.set(&idx, v);
        }
        out
    }

    /// Riemannian-by-Lorentzian style product with block-diagonal metric.
    /// The first factor must be Lorentzian and the second Riemannian.
    pub fn product(n: &FrameManifold, x: &FrameManifold) -> Result<FrameManifold, FrameError> {
        if n.signature() != -1 || x.signature() != 1 {
            return Err(FrameError::SignatureMismatch);
        }
        FrameManifold::product_unchecked(n, x)
    }

    /// Product of arbitrary factors.
    pub fn product_unchecked(n: &FrameManifold, x: &FrameManifold) -> Result<FrameManifold, FrameError> {
        for c in &x.coords {
            if n.coords.contains(c) {
                return Err(FrameError::SharedCoordinate(c.to_string()));
            }
        }
        let (a, b) = (n.dim(), x.dim());
        let d = a + b;
        let labels: Vec<String> = n.labels.iter().chain(&x.labels).cloned().collect();
        let coords: Vec<Symbol> = n.coords.iter().chain(&x.coords).cloned().collect();
        let nc = n.coords.len();
        let mut action = vec![vec![Scalar::zero(); coords.len()]; d];
        for i in 0..a {
            for (mu, e) in n.action[i].iter().enumerate() {
                action[i][mu] = e.clone();
            }
        }
        for i in 0..b {
            for (mu, e) in x.action[i].iter().enumerate() {
                action[a + i][nc + mu] = e.clone();
            }
        }
        let mut structure = vec![vec![vec![Scalar::zero(); d]; d]; d];
        let mut metric = vec![vec![Scalar::zero(); d]; d];
        for (m, off, dim) in [(n, 0, a), (x, a, b)] {
            for i in 0..dim {
                for j in 0..dim {
                    metric[off + i][off + j] = m.metric[i][j].clone();
                    for k in 0..dim {
                        structure[off + i][off + j][off + k] = m.structure[i][j][k].clone();
                    }
                }
            }
        }
        let mut p = FrameManifold::assemble(
            labels,
            coords,
            action,
            structure,
            metric,
            n.orientation * x.orientation,
            n.assumptions.merge(&x.assumptions),
        )?;
        p.factors = vec![
            Factor {
                manifold: Arc::new(n.clone()),
                offset: 0,
            },
            Factor {
                manifold: Arc::new(x.clone()),
                offset: a,
            },
        ];
        Ok(p)
    }

    fn find_factor(&self, m: &FrameManifold) -> Result<usize, FrameError> {
        self.factors
            .iter()
            .find(|f| f.manifold.as_ref() == m)
            .map(|f| f.offset)
            .ok_or(FrameError::FactorNotFound)
    }

    /// Pulls a form back from factor `m`.
    pub fn promote(&self, m: &FrameManifold, w: &Form) -> Result<Form, FrameError> {
        let off = self.find_factor(m)?;
        Ok(w.shift(self.dim(), off))
    }

    pub fn promote_vector(&self, m: &FrameManifold, v: &Vector) -> Result<Vector, FrameError> {
        let off = self.find_factor(m)?;
        let mut comps = vec![Scalar::zero(); self.dim()];
        for i in 0..v.dim() {
            comps[off + i] = v.get(i);
        }
        Ok(Vector::new(comps))
    }

    /// Extends a covariant tensor from factor `m` by zero.
    pub fn promote_tensor(&self, m: &FrameManifold, t: &Tensor) -> Result<Tensor, FrameError> {
        let off = self.find_factor(m)?;
        let mut out = Tensor::zeros(self.dim(), t.contra(), t.cov());
        for (idx, v) in t.nonzero() {
            let j: Vec<usize> = idx.iter().map(|i| i + off).collect();
            out.set(&j, v);
        }
        Ok(out)
    }

    /// Substitutes parameter values and polynomial functions everywhere,
    /// keeping coordinates symbolic. Used for randomized cross-checks.
    pub fn specialize(&self, values: &[(Symbol, Rational)], funcs: &[(Symbol, UnivariatePoly)]) -> Result<FrameManifold, FrameError> {
        let sub = |s: &Scalar| -> Result<Scalar, FrameError> { Ok(specialize_scalar(s, values, funcs)?) };
        let mut a = self.assumptions.clone();
        for (p, v) in values {
            a.remove_param(p);
            let _ = v;
        }
        let action = self.action.iter().map(|r| r.iter().map(sub).collect()).collect::<Result<_, _>>()?;
        let structure = self
            .structure
            .iter()
            .map(|r| r.iter().map(|c| c.iter().map(sub).collect()).collect())
            .collect::<Result<_, _>>()?;
        let metric = self.metric.iter().map(|r| r.iter().map(sub).collect()).collect::<Result<_, _>>()?;
        let mut m = FrameManifold::assemble(
            self.labels.clone(),
            self.coords.clone(),
            action,
            structure,
            metric,
            self.orientation,
            a,
        )?;
        m.factors = self
            .factors
            .iter()
            .map(|f| {
                Ok(Factor {
                    manifold: Arc::new(f.manifold.specialize(values, funcs)?),
                    offset: f.offset,
                })
            })
            .collect::<Result<_, FrameError>>()?;
        Ok(m)
    }

    /// Text rendering of a form using the frame labels.
    pub fn show_form(&self, w: &Form) -> String {
        if w.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = w
            .components()
            .map(|(k, v)| {
                let names: Vec<String> = k.iter().map(|&i| coframe_label(&self.labels[i])).collect();
                if k.is_empty() {
                    format!("{v}")
                } else {
                    format!("({v}) {}", names.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn show_vector(&self, v: &Vector) -> String {
        let parts: Vec<String> = (0..self.dim())
            .filter(|&i| !v.get(i).is_zero())
            .map(|i| format!("({}) {}", v.get(i), self.labels[i]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Upper-index name for a frame label, `e1 → e^1`.
pub fn coframe_label(l: &str) -> String {
    match l.strip_prefix('e') {
        Some(rest) if !rest.is_empty() => format!("e^{rest}"),
        _ => format!("d{l}"),
    }
}

pub fn specialize_scalar(
    s: &Scalar,
    values: &[(Symbol, Rational)],
    funcs: &[(Symbol, UnivariatePoly)],
) -> Result<Scalar, ScalarError> {
    let mut out = s.clone();
    for (p, v) in values {
        out = out.substitute_param(p, &Scalar::constant(v.clone()))?;
    }
    for (f, poly) in funcs {
        out = out.substitute_func(f, poly);
    }
    Ok(out)
}

/// Determinant by cofactor expansion along the sparsest row.
pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    match n {
        0 => return Scalar::one(),
        1 => return m[0][0].clone(),
        _ => {}
    }
    let row = (0..n)
        .min_by_key(|&r| m[r].iter().filter(|c| !c.is_zero()).count())
        .unwrap();
    let mut out = Scalar::zero();
    for col in 0..n {
        if m[row][col].is_zero() {
            continue;
        }
        let c = cofactor(m, row, col);
        out += &(&m[row][col] * &c);
    }
    out
}

/// Signed cofactor `(−1)^{r+c} det(m without row r, column c)`.
pub fn cofactor(m: &[Vec<Scalar>], r: usize, c: usize) -> Scalar {
    let sub: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
        .collect();
    let d = determinant(&sub);
    if (r + c).is_multiple_of(2) {
        d
    } else {
        -&d
    }
}

#[cfg(test)]
mod tests;
