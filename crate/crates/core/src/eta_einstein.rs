//! εη-Einstein certificates `Ric = (s_g/2)(λ² + κε) g − s_g κ α⊗α` with
//! constant `λ² ≥ 0`, `κ`, and the verified catalog built on them.

use std::fmt;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::assume::{Assumptions, Verdict};
use crate::catalog::{self, CatalogStructure};
use crate::contact::{verify_epsilon_contact, ContactError, EpsilonContact, OrientationMode};
use crate::curvature::{levi_civita, riemann};
use crate::frame::{specialize_scalar, FrameError, Tensor};
use crate::scalar::{rat, Rational, Scalar, Symbol};

const SEED: u64 = 0xe7a_e175;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{entry}` has no parameter `{param}`")]
    UnknownParameter { entry: String, param: String },
    #[error("parameter {param} = {value} violates the declared range ({constraint})")]
    OutOfRange { param: String, value: String, constraint: String },
    #[error("catalog entry `{entry}` failed verification: {reason}")]
    EntryMismatch { entry: String, reason: String },
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub epsilon: i8,
    pub lambda2: Scalar,
    pub kappa: Scalar,
    /// `s_g`.
    pub sign: i8,
    /// `Ric − (s_g/2)(λ²+κε) g + s_g κ α⊗α`.
    pub residual: Tensor,
    pub assumptions: Assumptions,
}

impl Certificate {
    /// `Ric` predicted by the certificate, `A g + B α⊗α`.
    pub fn coefficients(&self) -> (Scalar, Scalar) {
        let s = Scalar::from_int(self.sign.into());
        let eps = Scalar::from_int(self.epsilon.into());
        let a = (&(&self.lambda2 + &(&self.kappa * &eps)) * &s).scale(&rat(1, 2));
        let b = -&(&s * &self.kappa);
        (a, b)
    }

    /// `s_g (3λ²/2 + κε/2)`, the trace of the certified Ricci form.
    pub fn scalar_curvature(&self) -> Scalar {
        let s = Scalar::from_int(self.sign.into());
        let eps = Scalar::from_int(self.epsilon.into());
        &(&self.lambda2.scale(&rat(3, 2)) + &(&self.kappa * &eps).scale(&rat(1, 2))) * &s
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (ε={}, λ²={}, κ={})",
            if self.sign < 0 { "L" } else { "R" },
            self.epsilon,
            self.lambda2,
            self.kappa
        )
    }
}

#[derive(Clone, Debug)]
pub struct Rejection {
    pub reason: String,
    /// Offending Ricci-residual component, when one was isolated.
    pub component: Option<(Vec<usize>, Scalar)>,
    /// Least-squares `(λ², κ)` at a sample point, for diagnostics only.
    pub best_fit: Option<(Rational, Rational)>,
}

#[derive(Clone, Debug)]
pub enum Classification {
    Certified(Certificate),
    NotEtaEinstein(Rejection),
}

impl Classification {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Classification::Certified(c) => Some(c),
            Classification::NotEtaEinstein(_) => None,
        }
    }
}

pub fn classify(st: &EpsilonContact) -> Result<Classification, EtaError> {
    let m = st.manifold();
    let n = m.dim();
    let curv = riemann(m, &levi_civita(m));
    let ric = curv.ricci_symmetric();
    let g = m.metric_tensor();
    let a = st.alpha().to_tensor();
    let aa = a.outer(&a);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let reject = |reason: String, component| {
        Ok(Classification::NotEtaEinstein(Rejection {
            reason,
            component,
            best_fit: least_squares(st, &ric, &g, &aa),
        }))
    };
    let mut solved = None;
    'outer: for (p, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[p + 1..] {
            let det = &(g.get_ref(&[i, j]) * aa.get_ref(&[k, l])) - &(g.get_ref(&[k, l]) * aa.get_ref(&[i, j]));
            if det.as_monomial().is_none() || m.zero_test(&det, SEED).map_err(FrameError::from)? != Verdict::NonZero {
                continue;
            }
            let ca = &(ric.get_ref(&[i, j]) * aa.get_ref(&[k, l])) - &(ric.get_ref(&[k, l]) * aa.get_ref(&[i, j]));
            let cb = &(g.get_ref(&[i, j]) * ric.get_ref(&[k, l])) - &(g.get_ref(&[k, l]) * ric.get_ref(&[i, j]));
            solved = Some((ca.div(&det).map_err(FrameError::from)?, cb.div(&det).map_err(FrameError::from)?));
            break 'outer;
        }
    }
    let Some((ca, cb)) = solved else {
        return reject("no component pair determines the coefficients of g and α⊗α".into(), None);
    };
    let residual = ric.sub(&g.scale(&ca)).sub(&aa.scale(&cb));
    if let Some((idx, v)) = residual.nonzero().into_iter().next() {
        return reject("Ricci tensor is not of the form A g + B α⊗α".into(), Some((idx, v)));
    }
    if !ca.is_parameter_only() || !cb.is_parameter_only() {
        return reject(format!("coefficients are not constant: A = {ca}, B = {cb}"), None);
    }
    let s = Scalar::from_int(st.metric_sign().into());
    let eps = Scalar::from_int(st.epsilon().into());
    let kappa = -&(&s * &cb);
    let lambda2 = &(&s * &ca).scale(&Rational::from_integer(2.into())) - &(&kappa * &eps);
    let asm = m.assumptions();
    if !asm.sign(&lambda2).nonnegative() {
        return reject(format!("λ² = {lambda2} is not provably nonnegative"), None);
    }
    if st.metric_sign() < 0 && !asm.sign(&kappa).nonnegative() {
        return reject(format!("κ = {kappa} is not provably nonnegative in Lorentzian signature"), None);
    }
    Ok(Classification::Certified(Certificate {
        epsilon: st.epsilon(),
        lambda2,
        kappa,
        sign: st.metric_sign(),
        residual,
        assumptions: asm.clone(),
    }))
}

/// Normal-equation fit of `Ric ≈ A g + B α⊗α` at one admissible point.
fn least_squares(st: &EpsilonContact, ric: &Tensor, g: &Tensor, aa: &Tensor) -> Option<(Rational, Rational)> {
    let all: Scalar = [ric, g, aa].iter().flat_map(|t| t.nonzero()).map(|(_, v)| v).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let b = st.manifold().assumptions().sample_bindings(&all, &mut rng)?;
    let (mut gg, mut ga, mut garr, mut gr, mut ar) = (Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero());
    for idx in g.indices() {
        let x = g.get_ref(&idx).eval(&b).ok()?;
        let y = aa.get_ref(&idx).eval(&b).ok()?;
        let r = ric.get_ref(&idx).eval(&b).ok()?;
        gg += &x * &x;
        ga += &x * &y;
        garr += &y * &y;
        gr += &x * &r;
        ar += &y * &r;
    }
    let det = &gg * &garr - &ga * &ga;
    if det.is_zero() {
        return None;
    }
    let a = (&gr * &garr - &ga * &ar) / &det;
    let bb = (&gg * &ar - &ga * &gr) / &det;
    let s = Rational::from_integer(st.metric_sign().into());
    let e = Rational::from_integer(st.epsilon().into());
    let kappa = -(&s * &bb);
    let lambda2 = Rational::from_integer(2.into()) * &s * a - &kappa * e;
    Some((lambda2, kappa))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Lorentzian,
    Riemannian,
}

/// `Cont^{εη}_{L|R}(M, ε, λ², κ)`.
#[derive(Clone, Debug)]
pub struct ContSpace {
    pub signature: Signature,
    pub epsilon: i8,
    pub lambda2: Scalar,
    pub kappa: Scalar,
}

pub fn cont_space_membership(cert: &Certificate, space: &ContSpace) -> bool {
    let sign = match space.signature {
        Signature::Lorentzian => -1,
        Signature::Riemannian => 1,
    };
    cert.sign == sign
        && cert.epsilon == space.epsilon
        && (&cert.lambda2 - &space.lambda2).is_zero()
        && (&cert.kappa - &space.kappa).is_zero()
}

#[derive(Clone, Debug)]
pub struct Compatibility {
    pub compatible: bool,
    pub lambda2: Scalar,
    /// `l² = κ_N`.
    pub l2: Scalar,
    pub reasons: Vec<String>,
}

/// Hypothesis for the product construction: `N` Lorentzian, `X` Riemannian
/// with `λ²_N = λ²_X`, `κ_N = l² ≥ 0`, `κ_X = ε_N l²`, `ε_X = 1`.
pub fn compatible_pair(n: &Certificate, x: &Certificate) -> Compatibility {
    let asm = n.assumptions.merge(&x.assumptions);
    let mut reasons = Vec::new();
    if n.sign != -1 {
        reasons.push("first factor is not Lorentzian".to_string());
    }
    if x.sign != 1 {
        reasons.push("second factor is not Riemannian".to_string());
    }
    if x.epsilon != 1 {
        reasons.push(format!("ε_X = {} instead of 1", x.epsilon));
    }
    if !(&n.lambda2 - &x.lambda2).is_zero() {
        reasons.push(format!("λ²_N = {} differs from λ²_X = {}", n.lambda2, x.lambda2));
    }
    if !asm.sign(&n.kappa).nonnegative() {
        reasons.push(format!("l² = κ_N = {} is not provably nonnegative", n.kappa));
    }
    let target = n.kappa.scale(&Rational::from_integer(n.epsilon.into()));
    if !(&x.kappa - &target).is_zero() {
        reasons.push(format!("κ_X = {} differs from ε_N l² = {}", x.kappa, target));
    }
    Compatibility {
        compatible: reasons.is_empty(),
        lambda2: n.lambda2.clone(),
        l2: n.kappa.clone(),
        reasons,
    }
}

/// Expected constants of a catalog entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub epsilon: i8,
    pub lambda2: Scalar,
    pub kappa: Scalar,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub structure: CatalogStructure,
    pub contact: EpsilonContact,
    pub classification: Classification,
    /// `None` when the entry is not expected to be εη-Einstein.
    pub expected: Option<Expected>,
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.structure.name
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.classification.certificate()
    }
}

/// Parameter names accepted by each entry.
pub fn parameters(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "su2" | "sl2-lor" | "sl2-para" => &["lambda"],
        "sl2-null" => &["alpha0"],
        "sl2-sasnokc" => &["a"],
        "r3-null" => &[],
        _ => return None,
    })
}

fn expected(name: &str) -> Option<Expected> {
    let l2 = Scalar::param("lambda").pow(2).expect("positive power");
    let one = Scalar::one();
    let e = |epsilon, lambda2, kappa| Some(Expected { epsilon, lambda2, kappa });
    match name {
        "su2" => e(1, l2.clone(), &l2 - &one),
        "sl2-lor" => e(-1, l2.clone(), &one - &l2),
        "sl2-para" => e(1, l2.clone(), &l2 - &one),
        "sl2-null" => e(0, one, Scalar::param("alpha0").pow(-2).expect("nonzero parameter")),
        "r3-null" => e(0, Scalar::zero(), Scalar::zero()),
        _ => None,
    }
}

/// Builds, verifies and classifies a catalog entry, optionally at fixed
/// parameter values.
pub fn catalog(name: &str, params: &[(&str, Rational)]) -> Result<CatalogEntry, EtaError> {
    let mut st = catalog::by_name(name).ok_or_else(|| EtaError::UnknownEntry(name.into()))??;
    let accepted = parameters(name).expect("listed entry");
    let mut values = Vec::new();
    for (p, v) in params {
        if !accepted.contains(p) {
            return Err(EtaError::UnknownParameter {
                entry: name.into(),
                param: (*p).into(),
            });
        }
        let sym = Symbol::new(p);
        if let Some(c) = st.manifold.assumptions().constraint(&sym) {
            if !c.admits(v) {
                return Err(EtaError::OutOfRange {
                    param: (*p).into(),
                    value: v.to_string(),
                    constraint: c.texts.join(", "),
                });
            }
        }
        values.push((sym, v.clone()));
    }
    let mut exp = expected(name);
    if !values.is_empty() {
        st.manifold = st.manifold.specialize(&values, &[])?;
        st.alpha = st.alpha.try_map(|c| specialize_scalar(c, &values, &[])).map_err(FrameError::from)?;
        if let Some(e) = exp.as_mut() {
            e.lambda2 = specialize_scalar(&e.lambda2, &values, &[]).map_err(FrameError::from)?;
            e.kappa = specialize_scalar(&e.kappa, &values, &[]).map_err(FrameError::from)?;
        }
    }
    let contact = verify_epsilon_contact(&st.manifold, &st.alpha, OrientationMode::AsGiven)?;
    let classification = classify(&contact)?;
    let mismatch = |reason: String| EtaError::EntryMismatch {
        entry: name.into(),
        reason,
    };
    match (&exp, &classification) {
        (Some(e), Classification::Certified(c)) => {
            if c.epsilon != e.epsilon || !(&c.lambda2 - &e.lambda2).is_zero() || !(&c.kappa - &e.kappa).is_zero() {
                return Err(mismatch(format!(
                    "certified {c}, expected ε={}, λ²={}, κ={}",
                    e.epsilon, e.lambda2, e.kappa
                )));
            }
        }
        (Some(_), Classification::NotEtaEinstein(r)) => return Err(mismatch(r.reason.clone())),
        (None, Classification::Certified(c)) => return Err(mismatch(format!("unexpectedly certified {c}"))),
        (None, Classification::NotEtaEinstein(_)) => {}
    }
    Ok(CatalogEntry {
        structure: st,
        contact,
        classification,
        expected: exp,
    })
}

/// Product entries: Lorentzian factor, Riemannian factor, and fixed values.
pub const PRODUCTS: [&str; 3] = ["lor-x-riem", "para-x-riem", "null-x-riem"];

#[derive(Clone, Debug)]
pub struct ProductPair {
    pub name: &'static str,
    pub n: CatalogEntry,
    pub x: CatalogEntry,
    pub compatibility: Compatibility,
}

/// Factor pair of a product entry. `params` apply to both factors.
pub fn product_pair(name: &str, params: &[(&str, Rational)]) -> Result<ProductPair, EtaError> {
    let (label, n, x) = match name {
        "lor-x-riem" => ("lor-x-riem", catalog("sl2-lor", params)?, catalog("su2", params)?),
        "para-x-riem" => ("para-x-riem", catalog("sl2-para", params)?, catalog("su2", params)?),
        "null-x-riem" => {
            let np: Vec<_> = params.iter().filter(|(p, _)| *p == "alpha0").cloned().collect();
            if let Some((p, _)) = params.iter().find(|(p, _)| *p != "alpha0") {
                return Err(EtaError::UnknownParameter {
                    entry: name.into(),
                    param: (*p).into(),
                });
            }
            ("null-x-riem", catalog("sl2-null", &np)?, catalog("su2", &[("lambda", Rational::one())])?)
        }
        _ => return Err(EtaError::UnknownEntry(name.into())),
    };
    let compatibility = match (n.certificate(), x.certificate()) {
        (Some(a), Some(b)) => compatible_pair(a, b),
        _ => unreachable!("product factors are certified catalog entries"),
    };
    Ok(ProductPair {
        name: label,
        n,
        x,
        compatibility,
    })
}
