//! ε-contact structures in dimension three: verification, the derived
//! tensors `ξ`, `φ`, `𝔥`, their identities, and the null-structure theory
//! built on the endomorphism `J` of `T(M×ℝ)`.
//!
//! Conventions: `ξ = α♯`, `φ(v) = −s_g (ι_v ⋆α)♯`, `𝔥 = L_ξ φ`, where
//! `s_g = +1` for Riemannian and `−1` for Lorentzian metrics.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::assume::{AssumptionError, Verdict};
use crate::curvature::levi_civita;
use crate::frame::{coframe_label, combinations, determinant, Form, FrameError, FrameManifold, Tensor, Vector};
use crate::linsolve;
use crate::scalar::{Bindings, Monomial, Rational, Scalar, ScalarError};

const SEED: u64 = 0x5eed_c0de;

/// Coefficient height bound for the frame search.
pub const FRAME_HEIGHT: i64 = 8;
const FRAME_TRIALS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContactError {
    #[error("ε-contact structures are three-dimensional, got dimension {0}")]
    Dimension(usize),
    #[error("α must be a 1-form, got degree {0}")]
    NotOneForm(usize),
    #[error("|α|² = {0} is not constant")]
    NormNotConstant(String),
    #[error("|α|² = {0} is constant but not one of -1, 0, 1")]
    NormOutOfRange(String),
    #[error("⋆dα = α fails: component {component} of ⋆dα - α is {residual}")]
    HodgeMismatch { component: String, residual: String },
    #[error("α is not provably nowhere vanishing")]
    Degenerate,
    #[error("requires a null structure (ε = 0), got ε = {0}")]
    NotNull(i8),
    #[error("structure is not provably Sasakian ({0} for 𝔥)")]
    NotSasaki(Verdict),
    #[error("no ε-contact frame among rational combinations of {basis} candidate vectors with coefficient height ≤ {height} (supports up to size 3)")]
    NoFrame { basis: usize, height: i64 },
    #[error("𝔥 is not a multiple of ξ⊗α: residual {0}")]
    Factorization(String),
    #[error("kernel vectors of J do not have constant rank")]
    KernelRank,
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Assumption(#[from] AssumptionError),
}

impl From<ScalarError> for ContactError {
    fn from(e: ScalarError) -> Self {
        ContactError::Frame(FrameError::Scalar(e))
    }
}

/// Three-valued answer for predicates that depend on zero tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    /// `Zero` of a residual means the predicate holds.
    pub fn from_residual(v: Verdict) -> Truth {
        match v {
            Verdict::Zero => Truth::True,
            Verdict::NonZero => Truth::False,
            Verdict::Unknown => Truth::Unknown,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

/// A component that is not provably zero.
#[derive(Clone, Debug)]
pub struct Witness {
    pub index: Vec<usize>,
    pub value: Scalar,
    /// Admissible point where the component is nonzero, when one was found.
    pub point: Option<Bindings>,
}

/// Tri-state zero test of a whole tensor.
#[derive(Clone, Debug)]
pub struct TensorVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl TensorVerdict {
    pub fn is_zero(&self) -> bool {
        self.verdict == Verdict::Zero
    }
}

/// `NonZero` if some component is, `Zero` if all are, `Unknown` otherwise.
pub fn tensor_verdict(m: &FrameManifold, t: &Tensor) -> Result<TensorVerdict, ContactError> {
    let mut unknown = None;
    for (n, (index, value)) in t.nonzero().into_iter().enumerate() {
        let z = m.assumptions().zero_test(&value, SEED.wrapping_add(n as u64))?;
        let w = Witness {
            index,
            value,
            point: z.witness,
        };
        match z.verdict {
            Verdict::NonZero => {
                return Ok(TensorVerdict {
                    verdict: Verdict::NonZero,
                    witness: Some(w),
                })
            }
            Verdict::Unknown if unknown.is_none() => unknown = Some(w),
            _ => {}
        }
    }
    Ok(TensorVerdict {
        verdict: if unknown.is_some() { Verdict::Unknown } else { Verdict::Zero },
        witness: unknown,
    })
}

fn scalar_tensor(dim: usize, v: Scalar) -> Tensor {
    let mut t = Tensor::zeros(dim, 0, 0);
    t.set(&[], v);
    t
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub key: &'static str,
    pub name: &'static str,
    /// Zero test of `lhs − rhs`.
    pub residual: TensorVerdict,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    fn push(&mut self, m: &FrameManifold, key: &'static str, name: &'static str, t: &Tensor) -> Result<(), ContactError> {
        self.checks.push(IdentityCheck {
            key,
            name,
            residual: tensor_verdict(m, t)?,
        });
        Ok(())
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    pub fn get(&self, key: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.key == key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContactKind {
    Riemannian,
    Lorentzian,
    Para,
    Null,
}

impl fmt::Display for ContactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContactKind::Riemannian => "riemannian-contact",
            ContactKind::Lorentzian => "lorentzian-contact",
            ContactKind::Para => "para-contact",
            ContactKind::Null => "null-contact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientationMode {
    /// Use the manifold's orientation.
    AsGiven,
    /// Flip the orientation when only the opposite one satisfies `α = ⋆dα`.
    Auto,
}

/// Verified ε-contact structure with cached `ξ`, `φ` and `𝔥`.
#[derive(Clone, Debug)]
pub struct EpsilonContact {
    manifold: FrameManifold,
    alpha: Form,
    epsilon: i8,
    xi: Vector,
    phi: Tensor,
    h: Tensor,
}

/// Orthonormal-type frame `(ξ, u, φ(u))` with `g(u,ξ) = 1 − ε²`, `g(u,u) = s_g ε`.
#[derive(Clone, Debug)]
pub struct ContactFrame {
    pub xi: Vector,
    pub u: Vector,
    pub phi_u: Vector,
}

/// `J` on a product `M×ℝ`, last frame vector `∂_t`, with a kernel basis.
#[derive(Clone, Debug)]
pub struct ExtendedJ {
    manifold: FrameManifold,
    j: Tensor,
    kernel: Vec<Vector>,
}

/// Ranks of `J` and `J²`; `None` when assumption-dependent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankData {
    pub rank_j: Option<usize>,
    pub rank_j2: Option<usize>,
}

impl RankData {
    pub fn zero_deformable(&self) -> Truth {
        if self.rank_j.is_some() && self.rank_j2.is_some() {
            Truth::True
        } else {
            Truth::Unknown
        }
    }
}

#[derive(Clone, Debug)]
pub struct Involutivity {
    pub verdict: Truth,
    /// Brackets of kernel pairs, in pair order.
    pub brackets: Vec<Vector>,
    /// First bracket not provably in the span.
    pub witness: Option<Vector>,
}

#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub sasaki: Verdict,
    pub nijenhuis: TensorVerdict,
    pub ranks: RankData,
    pub kernel: Involutivity,
    pub integrable: Truth,
    /// Whether Sasakian and integrable agree; `None` when either is undecided.
    pub agrees: Option<bool>,
}

pub fn verify_epsilon_contact(m: &FrameManifold, alpha: &Form, mode: OrientationMode) -> Result<EpsilonContact, ContactError> {
    if m.dim() != 3 {
        return Err(ContactError::Dimension(m.dim()));
    }
    if alpha.degree() != 1 {
        return Err(ContactError::NotOneForm(alpha.degree()));
    }
    if alpha.dim() != 3 {
        return Err(FrameError::DimensionMismatch(alpha.dim(), 3).into());
    }
    let norm = m.inner(alpha, alpha);
    let epsilon = match norm.as_rational() {
        Some(r) if r.is_zero() => 0,
        Some(r) if r == Rational::one() => 1,
        Some(r) if r == -Rational::one() => -1,
        Some(_) => return Err(ContactError::NormOutOfRange(norm.to_string())),
        None if norm.is_parameter_only() => return Err(ContactError::NormOutOfRange(norm.to_string())),
        None => return Err(ContactError::NormNotConstant(norm.to_string())),
    };
    let manifold = match (hodge_residual(m, alpha)?, mode) {
        (None, _) => m.clone(),
        (Some(r), OrientationMode::AsGiven) => return Err(r),
        (Some(r), OrientationMode::Auto) => {
            let flipped = m.with_orientation(-m.orientation());
            if hodge_residual(&flipped, alpha)?.is_some() {
                return Err(r);
            }
            flipped
        }
    };
    let mut nonvanishing = false;
    for i in 0..3 {
        if manifold.zero_test(&alpha.get(&[i]), SEED)? == Verdict::NonZero {
            nonvanishing = true;
        }
    }
    if !nonvanishing {
        return Err(ContactError::Degenerate);
    }
    EpsilonContact::unchecked(&manifold, alpha, epsilon)
}

fn hodge_residual(m: &FrameManifold, alpha: &Form) -> Result<Option<ContactError>, ContactError> {
    let r = m.hodge(&m.ext_d(alpha))?.sub(alpha);
    let first = r.components().next().map(|(idx, v)| ContactError::HodgeMismatch {
        component: coframe_label(&m.labels()[idx[0]]),
        residual: v.to_string(),
    });
    Ok(first)
}

/// `L_{ij} = g_{ia} T^a_j`.
fn lower(m: &FrameManifold, t: &Tensor) -> Tensor {
    let n = m.dim();
    let g = m.metric();
    let mut out = Tensor::zeros(n, 0, 2);
    for i in 0..n {
        for j in 0..n {
            out.set(&[i, j], (0..n).map(|a| &g[i][a] * t.get_ref(&[a, j])).sum());
        }
    }
    out
}

fn sign_scalar(s: i8) -> Scalar {
    Scalar::from_int(s.into())
}

impl EpsilonContact {
    /// Computes the derived tensors without checking the defining equations.
    pub fn unchecked(m: &FrameManifold, alpha: &Form, epsilon: i8) -> Result<EpsilonContact, ContactError> {
        let n = m.dim();
        let xi = m.sharp(alpha);
        let star = m.hodge(alpha)?;
        let s = sign_scalar(m.signature());
        let ginv = m.metric_inverse();
        let mut phi = Tensor::zeros(n, 1, 1);
        for a in 0..n {
            for b in 0..n {
                let v: Scalar = (0..n)
                    .filter(|&c| !ginv[a][c].is_zero())
                    .map(|c| &ginv[a][c] * &star.get(&[b, c]))
                    .sum();
                phi.set(&[a, b], -&(&s * &v));
            }
        }
        let h = m.lie_derivative(&xi, &phi);
        Ok(EpsilonContact {
            manifold: m.clone(),
            alpha: alpha.clone(),
            epsilon,
            xi,
            phi,
            h,
        })
    }

    pub fn manifold(&self) -> &FrameManifold {
        &self.manifold
    }

    pub fn alpha(&self) -> &Form {
        &self.alpha
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    /// `s_g`.
    pub fn metric_sign(&self) -> i8 {
        self.manifold.signature()
    }

    pub fn reeb(&self) -> &Vector {
        &self.xi
    }

    pub fn phi_endo(&self) -> &Tensor {
        &self.phi
    }

    pub fn h_tensor(&self) -> &Tensor {
        &self.h
    }

    pub fn kind(&self) -> ContactKind {
        match (self.metric_sign(), self.epsilon) {
            (_, 0) => ContactKind::Null,
            (1, _) => ContactKind::Riemannian,
            (_, -1) => ContactKind::Lorentzian,
            _ => ContactKind::Para,
        }
    }

    fn xi_alpha(&self) -> Tensor {
        self.xi.to_tensor().outer(&self.alpha.to_tensor())
    }

    pub fn phi_identities_report(&self) -> Result<IdentityReport, ContactError> {
        let m = &self.manifold;
        let n = m.dim();
        let s = sign_scalar(self.metric_sign());
        let eps = sign_scalar(self.epsilon);
        let da = m.ext_d(&self.alpha).to_tensor();
        let g = m.metric_tensor();
        let alpha_t = self.alpha.to_tensor();
        let lphi = lower(m, &self.phi);
        let mut r = IdentityReport::default();
        r.push(m, "g_id_phi", "g(v, φw) = dα(v, w)", &lphi.sub(&da))?;
        r.push(m, "g_phi_id", "-g(φv, w) = dα(v, w)", &lphi.transpose().scale(&Scalar::from_int(-1)).sub(&da))?;
        r.push(m, "phi_xi", "φ(ξ) = 0", &self.phi.apply(&self.xi).to_tensor())?;
        let mut a_phi = Tensor::zeros(n, 0, 1);
        for j in 0..n {
            a_phi.set(&[j], (0..n).map(|a| &self.alpha.get(&[a]) * self.phi.get_ref(&[a, j])).sum());
        }
        r.push(m, "alpha_phi", "α∘φ = 0", &a_phi)?;
        let rhs = self.xi_alpha().sub(&Tensor::identity(n).scale(&eps)).scale(&s);
        r.push(m, "phi_squared", "φ² = s_g(-ε Id + ξ⊗α)", &self.phi.compose(&self.phi).sub(&rhs))?;
        let mut gpp = Tensor::zeros(n, 0, 2);
        for i in 0..n {
            for j in 0..n {
                gpp.set(&[i, j], (0..n).map(|a| self.phi.get_ref(&[a, i]) * lphi.get_ref(&[a, j])).sum());
            }
        }
        let rhs = g.scale(&eps).sub(&alpha_t.outer(&alpha_t)).scale(&s);
        r.push(m, "g_phi_phi", "g(φ·, φ·) = s_g(ε g - α⊗α)", &gpp.sub(&rhs))?;
        Ok(r)
    }

    pub fn reeb_identities_report(&self) -> Result<IdentityReport, ContactError> {
        let m = &self.manifold;
        let n = m.dim();
        let lc = levi_civita(m);
        let mut r = IdentityReport::default();
        r.push(m, "nabla_xi_xi", "∇_ξ ξ = 0", &lc.covariant(m, &self.xi, &self.xi).to_tensor())?;
        let dphi = lc.covariant_tensor(m, &self.phi);
        let mut nxp = Tensor::zeros(n, 1, 1);
        for a in 0..n {
            for b in 0..n {
                nxp.set(&[a, b], (0..n).map(|c| dphi.get_ref(&[a, b, c]) * &self.xi.get(c)).sum());
            }
        }
        r.push(m, "nabla_xi_phi", "∇_ξ φ = 0", &nxp)?;
        r.push(m, "h_xi", "𝔥(ξ) = 0", &self.h.apply(&self.xi).to_tensor())?;
        r.push(m, "trace_h", "Tr 𝔥 = 0", &scalar_tensor(n, self.h.trace()))?;
        r.push(m, "lie_xi_alpha", "L_ξ α = 0", &m.lie_derivative_form(&self.xi, &self.alpha).to_tensor())?;
        r.push(
            m,
            "h_phi_anticommute",
            "𝔥∘φ = -φ∘𝔥",
            &self.h.compose(&self.phi).add(&self.phi.compose(&self.h)),
        )?;
        let lh = lower(m, &self.h);
        r.push(m, "h_symmetric", "g(𝔥v, w) = g(v, 𝔥w)", &lh.sub(&lh.transpose()))?;
        if self.epsilon == 0 {
            let phi2 = self.phi.compose(&self.phi);
            r.push(m, "null_phi_squared", "φ² = -ξ⊗α", &phi2.add(&self.xi_alpha()))?;
            r.push(m, "null_phi_cubed", "φ³ = 0", &phi2.compose(&self.phi))?;
            r.push(m, "null_h_phi", "𝔥∘φ = 0", &self.h.compose(&self.phi))?;
            r.push(m, "null_phi_h", "φ∘𝔥 = 0", &self.phi.compose(&self.h))?;
            let residual = match self.null_mu() {
                Ok(mu) => self.h.sub(&self.xi_alpha().scale(&mu)),
                Err(_) => self.h.clone(),
            };
            r.push(m, "null_h_rank_one", "𝔥 = μ ξ⊗α", &residual)?;
        }
        Ok(r)
    }

    /// `α∧dα = s_g α∧⋆α`, and for null structures `α∧dα = 0`, `ι_ξ dα = 0`.
    pub fn structure_report(&self) -> Result<IdentityReport, ContactError> {
        let m = &self.manifold;
        let da = m.ext_d(&self.alpha);
        let a_da = self.alpha.wedge(&da)?;
        let a_sa = self.alpha.wedge(&m.hodge(&self.alpha)?)?;
        let mut r = IdentityReport::default();
        let s = sign_scalar(self.metric_sign());
        r.push(m, "alpha_dalpha", "α∧dα = s_g α∧⋆α", &a_da.sub(&a_sa.scale(&s)).to_tensor())?;
        if self.epsilon == 0 {
            r.push(m, "null_alpha_dalpha", "α∧dα = 0", &a_da.to_tensor())?;
            r.push(m, "null_xi_dalpha", "ι_ξ dα = 0", &da.interior(&self.xi)?.to_tensor())?;
        }
        Ok(r)
    }

    pub fn is_sasaki(&self) -> Result<TensorVerdict, ContactError> {
        tensor_verdict(&self.manifold, &self.h)
    }

    /// Zero test of `L_ξ g`.
    pub fn is_k_contact(&self) -> Result<TensorVerdict, ContactError> {
        let m = &self.manifold;
        tensor_verdict(m, &m.lie_derivative(&self.xi, &m.metric_tensor()))
    }

    /// `μ` with `𝔥 = μ ξ⊗α`.
    pub fn null_mu(&self) -> Result<Scalar, ContactError> {
        if self.epsilon != 0 {
            return Err(ContactError::NotNull(self.epsilon));
        }
        if self.h.is_zero() {
            return Ok(Scalar::zero());
        }
        let xa = self.xi_alpha();
        for (idx, v) in xa.nonzero() {
            if v.as_monomial().is_none() {
                continue;
            }
            let mu = self.h.get(&idx).div(&v)?;
            let residual = self.h.sub(&xa.scale(&mu));
            if residual.is_zero() {
                return Ok(mu);
            }
            return Err(ContactError::Factorization(residual.to_string()));
        }
        Err(ContactError::Factorization(self.h.to_string()))
    }

    /// Frame vectors, plus frame vectors divided by the monomial content of
    /// each Reeb component.
    pub fn default_frame_basis(&self) -> Vec<Vector> {
        let n = self.manifold.dim();
        let mut out: Vec<Vector> = (0..n).map(|i| Vector::basis(n, i)).collect();
        for c in self.xi.comps() {
            if c.is_zero() {
                continue;
            }
            let content = match c.as_monomial() {
                Some(_) => c.clone(),
                None => c.content().0,
            };
            let Some((_, mono)) = content.as_monomial() else { continue };
            if mono.is_one() {
                continue;
            }
            let inv = Scalar::term(Rational::one(), mono.pow(-1));
            for i in 0..n {
                let v = Vector::basis(n, i).scale(&inv);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Searches rational combinations of `basis` (default: see
    /// [`default_frame_basis`](Self::default_frame_basis)) for `u`.
    pub fn find_contact_frame(&self, basis: Option<&[Vector]>) -> Result<ContactFrame, ContactError> {
        let default;
        let basis = match basis {
            Some(b) => b,
            None => {
                default = self.default_frame_basis();
                &default
            }
        };
        let m = &self.manifold;
        let eps = Rational::from_integer(self.epsilon.into());
        let target = Rational::one() - &eps * &eps;
        let norm = Scalar::constant(&eps * Rational::from_integer(self.metric_sign().into()));
        let pair: Vec<Scalar> = basis.iter().map(|b| m.inner_vectors(b, &self.xi)).collect();
        let heights = rationals_by_height(FRAME_HEIGHT);
        for size in 1..=basis.len().min(3) {
            for support in combinations(basis.len(), size) {
                let mut monos: Vec<Monomial> = support.iter().flat_map(|&k| pair[k].monomials().cloned()).collect();
                if !target.is_zero() {
                    monos.push(Monomial::one());
                }
                monos.sort();
                monos.dedup();
                let rows: Vec<Vec<Rational>> = monos
                    .iter()
                    .map(|mo| support.iter().map(|&k| pair[k].coefficient_of(mo)).collect())
                    .collect();
                let rhs: Vec<Rational> = monos
                    .iter()
                    .map(|mo| if mo.is_one() { target.clone() } else { Rational::zero() })
                    .collect();
                let Some(sol) = linsolve::solve(&rows, &rhs, size) else { continue };
                let mut trials = 0;
                for t in HeightTuples::new(&heights, sol.kernel.len()) {
                    trials += 1;
                    if trials > FRAME_TRIALS {
                        break;
                    }
                    let mut c = sol.particular.clone();
                    for (ti, kv) in t.iter().zip(&sol.kernel) {
                        for (ck, kk) in c.iter_mut().zip(kv) {
                            *ck += ti * kk;
                        }
                    }
                    if c.iter().any(|x| x.is_zero() || height(x) > FRAME_HEIGHT) {
                        continue;
                    }
                    let u = support
                        .iter()
                        .zip(&c)
                        .fold(Vector::zero(m.dim()), |acc, (&k, ck)| acc.add(&basis[k].scale(&Scalar::constant(ck.clone()))));
                    if !(&m.inner_vectors(&u, &u) - &norm).is_zero() {
                        continue;
                    }
                    if let Some(f) = self.accept_frame(u)? {
                        return Ok(f);
                    }
                }
            }
        }
        Err(ContactError::NoFrame {
            basis: basis.len(),
            height: FRAME_HEIGHT,
        })
    }

    fn accept_frame(&self, u: Vector) -> Result<Option<ContactFrame>, ContactError> {
        let m = &self.manifold;
        let phi_u = self.phi.apply(&u);
        let cols = [&self.xi, &u, &phi_u];
        let mat: Vec<Vec<Scalar>> = (0..3).map(|i| cols.iter().map(|v| v.get(i)).collect()).collect();
        if m.zero_test(&determinant(&mat), SEED)? != Verdict::NonZero {
            return Ok(None);
        }
        let f = ContactFrame {
            xi: self.xi.clone(),
            u,
            phi_u,
        };
        Ok(self.frame_residuals(&f).iter().all(Scalar::is_zero).then_some(f))
    }

    /// Residuals of the six frame pairings; all vanish for a valid frame.
    pub fn frame_residuals(&self, f: &ContactFrame) -> Vec<Scalar> {
        let m = &self.manifold;
        let e = Rational::from_integer(self.epsilon.into());
        let s = Rational::from_integer(self.metric_sign().into());
        let c = |q: Rational| Scalar::constant(q);
        vec![
            &m.inner_vectors(&f.u, &f.xi) - &c(Rational::one() - &e * &e),
            &m.inner_vectors(&f.u, &f.u) - &c(&s * &e),
            &m.inner_vectors(&f.xi, &f.xi) - &c(e.clone()),
            m.inner_vectors(&f.xi, &f.phi_u),
            m.inner_vectors(&f.u, &f.phi_u),
            &m.inner_vectors(&f.phi_u, &f.phi_u) - &Scalar::one(),
        ]
    }

    /// `J(v, c∂_t) = (φv + cξ, α(v)∂_t)` on `M×ℝ`; requires `ε = 0`.
    pub fn extend_j(&self) -> Result<ExtendedJ, ContactError> {
        if self.epsilon != 0 {
            return Err(ContactError::NotNull(self.epsilon));
        }
        let m = &self.manifold;
        let taken: Vec<&str> = m.coords().iter().map(|c| c.as_str()).collect();
        let coord = ["t", "s", "r", "w", "tau"]
            .into_iter()
            .find(|c| !taken.contains(c))
            .expect("fresh coordinate");
        let mut label = format!("d{coord}");
        while m.labels().contains(&label) {
            label.push('\'');
        }
        let line = FrameManifold::builder(&[label.as_str()])
            .coordinate_frame(&[coord])
            .diagonal_metric(&[1])
            .build()?;
        let p = FrameManifold::product_unchecked(m, &line)?;
        let mut j = Tensor::zeros(4, 1, 1);
        for a in 0..3 {
            for b in 0..3 {
                j.set(&[a, b], self.phi.get(&[a, b]));
            }
            j.set(&[a, 3], self.xi.get(a));
            j.set(&[3, a], self.alpha.get(&[a]));
        }
        let f = self.find_contact_frame(None)?;
        let lift = |v: &Vector| p.promote_vector(m, v);
        let kernel = vec![lift(&self.xi)?, lift(&f.phi_u)?.add(&Vector::basis(4, 3))];
        Ok(ExtendedJ { manifold: p, j, kernel })
    }

    pub fn sasaki_iff_integrable_report(&self) -> Result<IntegrabilityReport, ContactError> {
        let sasaki = self.is_sasaki()?.verdict;
        let ej = self.extend_j()?;
        let nijenhuis = ej.nijenhuis_verdict()?;
        let ranks = ej.rank_data()?;
        let kernel = ej.kernel_involutive()?;
        let integrable = ej.integrable_from(&nijenhuis, &ranks, &kernel);
        let agrees = match (sasaki, integrable) {
            (Verdict::Unknown, _) | (_, Truth::Unknown) => None,
            (v, t) => Some((v == Verdict::Zero) == (t == Truth::True)),
        };
        Ok(IntegrabilityReport {
            sasaki,
            nijenhuis,
            ranks,
            kernel,
            integrable,
            agrees,
        })
    }

    /// `g(L_ξ u, u)` for a light-cone frame of a Sasakian null structure.
    pub fn saskc_criterion(&self, f: &ContactFrame) -> Result<Scalar, ContactError> {
        if self.epsilon != 0 {
            return Err(ContactError::NotNull(self.epsilon));
        }
        let v = self.is_sasaki()?.verdict;
        if v != Verdict::Zero {
            return Err(ContactError::NotSasaki(v));
        }
        let m = &self.manifold;
        Ok(m.inner_vectors(&m.lie_bracket(&self.xi, &f.u), &f.u))
    }
}

impl ExtendedJ {
    pub fn new(manifold: FrameManifold, j: Tensor, kernel: Vec<Vector>) -> ExtendedJ {
        assert_eq!((j.contra(), j.cov(), j.dim()), (1, 1, manifold.dim()), "J must be a (1,1)-tensor on the manifold");
        ExtendedJ { manifold, j, kernel }
    }

    pub fn manifold(&self) -> &FrameManifold {
        &self.manifold
    }

    pub fn j(&self) -> &Tensor {
        &self.j
    }

    pub fn kernel(&self) -> &[Vector] {
        &self.kernel
    }

    pub fn square(&self) -> Tensor {
        self.j.compose(&self.j)
    }

    /// `N_J^k_{ij}` on frame vectors.
    pub fn nijenhuis(&self) -> Tensor {
        let m = &self.manifold;
        let n = m.dim();
        let j = &self.j;
        let j2 = self.square();
        let mut out = Tensor::zeros(n, 1, 2);
        for a in 0..n {
            for b in 0..n {
                let (va, vb) = (m.frame(a), m.frame(b));
                let (ja, jb) = (j.apply(&va), j.apply(&vb));
                let v = m
                    .lie_bracket(&ja, &jb)
                    .sub(&j.apply(&m.lie_bracket(&va, &jb)))
                    .sub(&j.apply(&m.lie_bracket(&ja, &vb)))
                    .add(&j2.apply(&m.lie_bracket(&va, &vb)));
                for k in 0..n {
                    out.set(&[k, a, b], v.get(k));
                }
            }
        }
        out
    }

    pub fn nijenhuis_verdict(&self) -> Result<TensorVerdict, ContactError> {
        tensor_verdict(&self.manifold, &self.nijenhuis())
    }

    pub fn rank_data(&self) -> Result<RankData, ContactError> {
        Ok(RankData {
            rank_j: rank(&self.manifold, &self.j.matrix())?,
            rank_j2: rank(&self.manifold, &self.square().matrix())?,
        })
    }

    pub fn zero_deformable(&self) -> Result<Truth, ContactError> {
        Ok(self.rank_data()?.zero_deformable())
    }

    /// Closure of the stored kernel basis under brackets, modulo the basis.
    pub fn kernel_involutive(&self) -> Result<Involutivity, ContactError> {
        let m = &self.manifold;
        let n = m.dim();
        let cols = |vs: &[&Vector]| -> Vec<Vec<Scalar>> { (0..n).map(|i| vs.iter().map(|v| v.get(i)).collect()).collect() };
        let base: Vec<&Vector> = self.kernel.iter().collect();
        let r = self.kernel.len();
        if rank(m, &cols(&base))? != Some(r) {
            return Err(ContactError::KernelRank);
        }
        let mut verdict = Truth::True;
        let mut brackets = Vec::new();
        let mut witness = None;
        for a in 0..r {
            for b in a + 1..r {
                let w = m.lie_bracket(&self.kernel[a], &self.kernel[b]);
                let mut ext = base.clone();
                ext.push(&w);
                let this = match rank(m, &cols(&ext))? {
                    Some(k) if k == r => Truth::True,
                    Some(_) => Truth::False,
                    None => Truth::Unknown,
                };
                if this != Truth::True && witness.is_none() {
                    witness = Some(w.clone());
                }
                verdict = verdict.and(this);
                brackets.push(w);
            }
        }
        Ok(Involutivity {
            verdict,
            brackets,
            witness,
        })
    }

    fn integrable_from(&self, n: &TensorVerdict, ranks: &RankData, k: &Involutivity) -> Truth {
        Truth::from_residual(n.verdict).and(ranks.zero_deformable()).and(k.verdict)
    }

    pub fn is_integrable(&self) -> Result<Truth, ContactError> {
        Ok(self.integrable_from(&self.nijenhuis_verdict()?, &self.rank_data()?, &self.kernel_involutive()?))
    }
}

/// Rank that holds at every admissible point, or `None` if it may jump.
pub fn rank(m: &FrameManifold, mat: &[Vec<Scalar>]) -> Result<Option<usize>, ContactError> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut lower = 0;
    let mut upper = 0;
    for k in 1..=rows.min(cols) {
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<Scalar>> = rs.iter().map(|&r| cs.iter().map(|&c| mat[r][c].clone()).collect()).collect();
                let d = determinant(&sub);
                if d.is_zero() {
                    continue;
                }
                upper = k;
                if lower < k && m.zero_test(&d, SEED)? == Verdict::NonZero {
                    lower = k;
                }
            }
        }
    }
    Ok((lower == upper).then_some(upper))
}

fn height(q: &Rational) -> i64 {
    let n = q.numer().abs().max(q.denom().clone());
    i64::try_from(n).unwrap_or(i64::MAX)
}

/// All `p/q` with `max(|p|, q) ≤ max`, in order of height.
fn rationals_by_height(max: i64) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for h in 1..=max {
        for q in 1..=h {
            for p in -h..=h {
                if (p.abs() == h || q == h) && p != 0 && p.gcd(&q) == 1 {
                    out.push(Rational::new(p.into(), q.into()));
                }
            }
        }
    }
    out
}

/// Tuples over a height-ordered list, by increasing maximum position.
struct HeightTuples<'a> {
    values: &'a [Rational],
    len: usize,
    bound: usize,
    idx: Vec<usize>,
    done: bool,
}

impl<'a> HeightTuples<'a> {
    fn new(values: &'a [Rational], len: usize) -> Self {
        HeightTuples {
            values,
            len,
            bound: 0,
            idx: vec![0; len],
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        for k in (0..self.len).rev() {
            if self.idx[k] < self.bound {
                self.idx[k] += 1;
                for x in &mut self.idx[k + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for HeightTuples<'_> {
    type Item = Vec<Rational>;

    fn next(&mut self) -> Option<Vec<Rational>> {
        if self.done {
            return None;
        }
        if self.len == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        loop {
            let fresh = self.idx.contains(&self.bound);
            if fresh {
                let out = self.idx.iter().map(|&i| self.values[i].clone()).collect();
                if !self.advance() {
                    self.bump();
                }
                return Some(out);
            }
            if !self.advance() && !self.bump() {
                return None;
            }
        }
    }
}

impl HeightTuples<'_> {
    fn bump(&mut self) -> bool {
        if self.bound + 1 >= self.values.len() {
            self.done = true;
            return false;
        }
        self.bound += 1;
        self.idx = vec![0; self.len];
        true
    }
}

#[cfg(test)]
mod tests;
