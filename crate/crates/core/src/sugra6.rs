//! Six-dimensional product configurations `N × X` with flux `H` and the
//! bosonic field equations `Ric = ¼ H∘H`, `dH = 0`, `d⋆H = 0`, `|H|² = 0`.

use num_traits::{One, Signed};
use thiserror::Error;

use crate::assume::Verdict;
use crate::contact::{tensor_verdict, ContactError, EpsilonContact, TensorVerdict};
use crate::curvature::{levi_civita, riemann, with_skew_torsion};
use crate::eta_einstein::{compatible_pair, Certificate, ProductPair};
use crate::frame::{Form, FrameError, FrameManifold, Tensor};
use crate::scalar::{rat, Atom, Rational, Scalar, ScalarError, Symbol};

pub const LAMBDA: &str = "lambda";
pub const L: &str = "l";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SugraError {
    #[error("factors are not compatible: {}", .0.join("; "))]
    Incompatible(Vec<String>),
    #[error("no positive rational flux coefficient: {0}")]
    NoCalibration(String),
    #[error("factor is not a three-dimensional ε-contact structure")]
    FactorDimension,
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `(ρ∘σ)(e_i,e_j) = Σ_{a,b} ρ_{iab} σ_j^{ab}`, full contraction.
pub fn circ(m: &FrameManifold, rho: &Form, sigma: &Form) -> Result<Tensor, FrameError> {
    let n = m.dim();
    for f in [rho, sigma] {
        if f.degree() != 3 {
            return Err(FrameError::NotAForm);
        }
        if f.dim() != n {
            return Err(FrameError::DimensionMismatch(f.dim(), n));
        }
    }
    let inv = m.metric_inverse();
    let mut raised = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for (j, rj) in raised.iter_mut().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let mut v = Scalar::zero();
                for c in (0..n).filter(|&c| !inv[a][c].is_zero()) {
                    for d in (0..n).filter(|&d| !inv[b][d].is_zero()) {
                        let s = sigma.get(&[j, c, d]);
                        if !s.is_zero() {
                            v += &(&(&inv[a][c] * &inv[b][d]) * &s);
                        }
                    }
                }
                rj[a][b] = v;
            }
        }
    }
    let mut out = Tensor::zeros(n, 0, 2);
    for i in 0..n {
        for (j, rj) in raised.iter().enumerate() {
            let mut v = Scalar::zero();
            for (a, row) in rj.iter().enumerate() {
                for (b, s) in row.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    let r = rho.get(&[i, a, b]);
                    if !r.is_zero() {
                        v += &(&r * s);
                    }
                }
            }
            out.set(&[i, j], v);
        }
    }
    Ok(out)
}

/// Building blocks of the flux on `N × X`, all promoted to the product.
#[derive(Clone, Debug)]
pub struct FluxPieces {
    pub manifold: FrameManifold,
    pub nu_chi: Form,
    pub nu_h: Form,
    /// `(⋆_χ α_N) ∧ α_X`.
    pub star_n_wedge_x: Form,
    /// `α_N ∧ (⋆_h α_X)`.
    pub n_wedge_star_x: Form,
    pub alpha_n: Form,
    pub alpha_x: Form,
    /// `p² ↦ value` rewrites imposed on every residual.
    pub reductions: Vec<(Symbol, Scalar)>,
}

impl FluxPieces {
    pub fn new(n: &EpsilonContact, nc: &Certificate, x: &EpsilonContact, xc: &Certificate) -> Result<FluxPieces, SugraError> {
        if n.manifold().dim() != 3 || x.manifold().dim() != 3 {
            return Err(SugraError::FactorDimension);
        }
        let compat = compatible_pair(nc, xc);
        if !compat.compatible {
            return Err(SugraError::Incompatible(compat.reasons));
        }
        let (nm, xm) = (n.manifold(), x.manifold());
        let p = FrameManifold::product(nm, xm)?;
        let mut asm = p.assumptions().clone();
        for s in [LAMBDA, L] {
            if asm.constraint(&Symbol::new(s)).is_none() {
                asm.declare(s);
            }
        }
        let manifold = p.with_assumptions(asm);
        let lift = |f: &FrameManifold, w: &Form| p.promote(f, w);
        let alpha_n = lift(nm, n.alpha())?;
        let alpha_x = lift(xm, x.alpha())?;
        let star_n = lift(nm, &nm.hodge(n.alpha())?)?;
        let star_x = lift(xm, &xm.hodge(x.alpha())?)?;
        let pieces = FluxPieces {
            nu_chi: lift(nm, &nm.volume()?)?,
            nu_h: lift(xm, &xm.volume()?)?,
            star_n_wedge_x: star_n.wedge(&alpha_x)?,
            n_wedge_star_x: alpha_n.wedge(&star_x)?,
            alpha_n,
            alpha_x,
            reductions: reductions(nc),
            manifold,
        };
        Ok(pieces)
    }

    /// `λν_χ + c·l(⋆_χα_N)∧α_X + c·l·α_N∧(⋆_hα_X) + λν_h`.
    pub fn flux(&self, c: &Scalar) -> Form {
        let lam = Scalar::param(LAMBDA);
        let cl = c * &Scalar::param(L);
        self.nu_chi
            .add(&self.nu_h)
            .scale(&lam)
            .add(&self.star_n_wedge_x.add(&self.n_wedge_star_x).scale(&cl))
    }

    pub fn reduce(&self, s: &Scalar) -> Result<Scalar, ScalarError> {
        let mut out = s.clone();
        for (p, sq) in &self.reductions {
            out = out.reduce_square(p, sq)?;
        }
        Ok(out)
    }

    pub fn reduce_tensor(&self, t: &Tensor) -> Result<Tensor, ScalarError> {
        t.try_map(|s| self.reduce(s))
    }

    /// `Ric − ¼ H∘H` with the square reductions applied.
    pub fn einstein_residual(&self, h: &Form) -> Result<Tensor, SugraError> {
        let m = &self.manifold;
        let ric = riemann(m, &levi_civita(m)).ricci_symmetric();
        let hh = circ(m, h, h)?.scale_rational(&rat(1, 4));
        Ok(self.reduce_tensor(&ric.sub(&hh))?)
    }
}

/// `l² = κ_N`, and `λ² = λ²_N` whenever the certificate fixes it.
fn reductions(nc: &Certificate) -> Vec<(Symbol, Scalar)> {
    let mut out = vec![(Symbol::new(L), nc.kappa.clone())];
    let lam2 = Scalar::param(LAMBDA).pow(2).expect("positive power");
    if nc.lambda2 != lam2 {
        out.push((Symbol::new(LAMBDA), nc.lambda2.clone()));
    }
    out
}

/// Splits `s` into coefficients of `c⁰, c¹, c²`.
fn split_in(s: &Scalar, c: &Symbol) -> Result<[Scalar; 3], String> {
    let atom = Atom::Param(c.clone());
    let mut out = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for (m, k) in s.terms() {
        let d = m.degree_in(&atom);
        let slot = usize::try_from(d).ok().filter(|&d| d < 3).ok_or_else(|| format!("degree {d} in the flux coefficient"))?;
        out[slot] += &Scalar::term(k.clone(), m.without(&atom));
    }
    Ok(out)
}

/// Solves for the unique `c > 0` making `Ric = ¼ H_c∘H_c` hold identically.
pub fn calibrate_flux(p: &FluxPieces) -> Result<Rational, SugraError> {
    let c = Symbol::new("flux_c");
    let h = p.flux(&Scalar::param(c.as_str()));
    let res = p.einstein_residual(&h)?;
    let mut k: Option<Rational> = None;
    for (idx, v) in res.nonzero() {
        let [r0, r1, r2] = split_in(&v, &c).map_err(SugraError::NoCalibration)?;
        if !r1.is_zero() {
            return Err(SugraError::NoCalibration(format!("odd term at {idx:?}")));
        }
        if r2.is_zero() {
            if !r0.is_zero() {
                return Err(SugraError::NoCalibration(format!("component {idx:?} is independent of c")));
            }
            continue;
        }
        let (mono, lead) = r2.terms().next().expect("nonzero");
        let q = -r0.coefficient_of(mono) / lead;
        if !(&r0 + &r2.scale(&q)).is_zero() {
            return Err(SugraError::NoCalibration(format!("c⁰ and c² terms at {idx:?} are not proportional")));
        }
        match &k {
            Some(prev) if *prev != q => {
                return Err(SugraError::NoCalibration(format!("c² = {prev} and c² = {q} at {idx:?}")));
            }
            _ => k = Some(q),
        }
    }
    let k = k.ok_or_else(|| SugraError::NoCalibration("residual is independent of c".into()))?;
    rational_sqrt(&k)
        .filter(|r| r.is_positive())
        .ok_or_else(|| SugraError::NoCalibration(format!("c² = {k} has no positive rational root")))
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

#[derive(Clone, Debug)]
pub struct SupergravityConfig {
    pub manifold: FrameManifold,
    pub h: Form,
    /// Calibrated flux coefficient, when built from a pair.
    pub c: Option<Rational>,
    pub reductions: Vec<(Symbol, Scalar)>,
    pub pieces: Option<FluxPieces>,
}

impl SupergravityConfig {
    /// A configuration given directly by metric and flux.
    pub fn new(manifold: FrameManifold, h: Form) -> Result<SupergravityConfig, SugraError> {
        if h.degree() != 3 {
            return Err(FrameError::NotAForm.into());
        }
        if h.dim() != manifold.dim() {
            return Err(FrameError::DimensionMismatch(h.dim(), manifold.dim()).into());
        }
        Ok(SupergravityConfig {
            manifold,
            h,
            c: None,
            reductions: vec![],
            pieces: None,
        })
    }

    fn reduce(&self, s: &Scalar) -> Result<Scalar, ScalarError> {
        let mut out = s.clone();
        for (p, sq) in &self.reductions {
            out = out.reduce_square(p, sq)?;
        }
        Ok(out)
    }

    fn reduce_tensor(&self, t: &Tensor) -> Result<Tensor, ScalarError> {
        t.try_map(|s| self.reduce(s))
    }

    /// Same configuration with flux coefficient `c` in place of the calibrated one.
    pub fn with_coefficient(&self, c: &Rational) -> Option<SupergravityConfig> {
        let p = self.pieces.as_ref()?;
        Some(SupergravityConfig {
            h: p.flux(&Scalar::constant(c.clone())),
            c: Some(c.clone()),
            ..self.clone()
        })
    }
}

/// Assembles `ĝ = χ ⊕ h` and the calibrated flux.
pub fn build_solution(n: &EpsilonContact, nc: &Certificate, x: &EpsilonContact, xc: &Certificate) -> Result<SupergravityConfig, SugraError> {
    let pieces = FluxPieces::new(n, nc, x, xc)?;
    let c = calibrate_flux(&pieces)?;
    Ok(SupergravityConfig {
        manifold: pieces.manifold.clone(),
        h: pieces.flux(&Scalar::constant(c.clone())),
        c: Some(c),
        reductions: pieces.reductions.clone(),
        pieces: Some(pieces),
    })
}

pub fn build_from_pair(pair: &ProductPair) -> Result<SupergravityConfig, SugraError> {
    let (Some(nc), Some(xc)) = (pair.n.certificate(), pair.x.certificate()) else {
        return Err(SugraError::Incompatible(vec!["a factor is not εη-Einstein".into()]));
    };
    build_solution(&pair.n.contact, nc, &pair.x.contact, xc)
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub residual: Tensor,
    pub verdict: TensorVerdict,
}

impl Residual {
    fn new(m: &FrameManifold, residual: Tensor) -> Result<Residual, SugraError> {
        let verdict = tensor_verdict(m, &residual)?;
        Ok(Residual { residual, verdict })
    }

    fn scalar(m: &FrameManifold, v: Scalar) -> Result<Residual, SugraError> {
        let mut t = Tensor::zeros(m.dim(), 0, 0);
        t.set(&[], v);
        Residual::new(m, t)
    }

    pub fn is_zero(&self) -> bool {
        self.verdict.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct EomReport {
    /// `Ric − ¼ H∘H`.
    pub einstein: Residual,
    pub dh: Residual,
    pub dstar_h: Residual,
    /// `|H|²` from `H ∧ ⋆H = |H|² vol`.
    pub norm: Residual,
    /// `Σ H_{abc} H^{abc}`, the full contraction.
    pub norm_full: Residual,
}

impl EomReport {
    pub fn checks(&self) -> [(&'static str, &Residual); 5] {
        [
            ("einstein", &self.einstein),
            ("dH", &self.dh),
            ("d*H", &self.dstar_h),
            ("|H|^2", &self.norm),
            ("|H|^2 (full contraction)", &self.norm_full),
        ]
    }

    pub fn all_zero(&self) -> bool {
        self.checks().iter().all(|(_, r)| r.is_zero())
    }
}

pub fn verify_eom(cfg: &SupergravityConfig) -> Result<EomReport, SugraError> {
    let m = &cfg.manifold;
    let h = &cfg.h;
    let ric = riemann(m, &levi_civita(m)).ricci_symmetric();
    let hh = circ(m, h, h)?;
    let einstein = cfg.reduce_tensor(&ric.sub(&hh.scale_rational(&rat(1, 4))))?;
    let star = m.hodge(h)?;
    let dh = m.ext_d(h).try_map(|s| cfg.reduce(s))?;
    let dstar = m.ext_d(&star).try_map(|s| cfg.reduce(s))?;
    let top: Vec<usize> = (0..m.dim()).collect();
    let vol = m.volume()?.get(&top);
    let norm = cfg.reduce(&h.wedge(&star)?.get(&top).div(&vol)?)?;
    let ginv = Tensor::from_matrix(m.metric_inverse());
    let mut full = Scalar::zero();
    for (idx, v) in hh.nonzero() {
        full += &(&v * ginv.get_ref(&idx));
    }
    let full = cfg.reduce(&full)?;
    Ok(EomReport {
        einstein: Residual::new(m, einstein)?,
        dh: Residual::new(m, dh.to_tensor())?,
        dstar_h: Residual::new(m, dstar.to_tensor())?,
        norm: Residual::scalar(m, norm)?,
        norm_full: Residual::scalar(m, full)?,
    })
}

#[derive(Clone, Debug)]
pub struct TorsionReport {
    /// Full Ricci tensor of `∇^H`.
    pub ricci: Residual,
    pub antisymmetric: Residual,
    pub isotropic: Residual,
    pub closed: Residual,
    pub coclosed: Residual,
}

impl TorsionReport {
    pub fn verdict(&self) -> Verdict {
        let all = [&self.ricci, &self.antisymmetric, &self.isotropic, &self.closed, &self.coclosed];
        if all.iter().any(|r| r.verdict.verdict == Verdict::NonZero) {
            Verdict::NonZero
        } else if all.iter().all(|r| r.is_zero()) {
            Verdict::Zero
        } else {
            Verdict::Unknown
        }
    }
}

/// Ricci flatness of the metric connection with skew torsion `H`.
pub fn torsion_ricci_flat(cfg: &SupergravityConfig) -> Result<TorsionReport, SugraError> {
    let m = &cfg.manifold;
    let conn = with_skew_torsion(m, &cfg.h)?;
    let curv = riemann(m, &conn);
    let eom = verify_eom(cfg)?;
    Ok(TorsionReport {
        ricci: Residual::new(m, cfg.reduce_tensor(&curv.ricci)?)?,
        antisymmetric: Residual::new(m, cfg.reduce_tensor(&curv.ricci_antisymmetric())?)?,
        isotropic: eom.norm,
        closed: eom.dh,
        coclosed: eom.dstar_h,
    })
}

/// Binomial factor `(p+q)!/(p!q!)` relating the alternating-sum wedge to the
/// shuffle wedge.
pub fn binomial_wedge(a: &Form, b: &Form) -> Result<Form, FrameError> {
    let (p, q) = (a.degree() as i64, b.degree() as i64);
    let mut k = Rational::one();
    for i in 0..q {
        k = k * Rational::from_integer((p + q - i).into()) / Rational::from_integer((i + 1).into());
    }
    Ok(a.wedge(b)?.scale_rational(&k))
}

#[cfg(test)]
mod tests;
