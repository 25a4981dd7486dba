//! Command implementations producing [`Report`]s.

use std::collections::BTreeMap;

use econtact::catalog::NAMES;
use econtact::contact::{tensor_verdict, verify_epsilon_contact, EpsilonContact, IdentityReport, OrientationMode};
use econtact::curvature::{levi_civita, riemann};
use econtact::eta_einstein::{self, classify, Certificate, Classification, EtaError, PRODUCTS};
use econtact::frame::FrameManifold;
use econtact::scalar::{parse_expr, Rational, Scalar, Symbol, SymbolTable};
use econtact::sugra6::{build_solution, torsion_ricci_flat, verify_eom, Residual, SugraError, SupergravityConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::manifest::{Built, ManifestError};
use crate::report::{Outcome, Report, WitnessOut};

pub const SPOT_CHECKS: usize = 10;

/// Errors that are not verification outcomes; they map to exit code 2.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Input(String),
}

impl RunError {
    pub const EXIT_CODE: i32 = 2;
}

/// `k=v,k=v` with rational expression values.
pub fn parse_params(s: &str) -> Result<Vec<(String, Rational)>, RunError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| RunError::Input(format!("parameter `{part}` is not of the form name=value")))?;
        let q = parse_expr(v.trim(), &SymbolTable::new())
            .ok()
            .and_then(|e| e.to_scalar().ok())
            .and_then(|s| s.as_rational())
            .ok_or_else(|| RunError::Input(format!("value of `{k}` is not a rational number: {v}")))?;
        out.push((k.trim().to_string(), q));
    }
    Ok(out)
}

fn verify(built: &Built, rep: &mut Report) -> Option<EpsilonContact> {
    rep.notes.extend(built.notes.iter().cloned());
    match verify_epsilon_contact(&built.manifold, &built.alpha, built.mode) {
        Ok(st) => {
            let o = st.manifold().orientation();
            if built.mode == OrientationMode::Auto {
                rep.notes.push(format!("orientation chosen automatically: {o:+}"));
            }
            rep.require("epsilon-contact (alpha = *d alpha, |alpha|^2 constant)", Outcome::Pass, Outcome::Pass);
            describe(&st, rep);
            Some(st)
        }
        Err(e) => {
            rep.require("epsilon-contact (alpha = *d alpha, |alpha|^2 constant)", Outcome::Fail, Outcome::Pass).detail = Some(e.to_string());
            None
        }
    }
}

fn describe(st: &EpsilonContact, rep: &mut Report) {
    let m = st.manifold();
    rep.value("epsilon", st.epsilon());
    rep.value("kind", st.kind());
    rep.value("orientation", format!("{:+}", m.orientation()));
    rep.value("metric sign", format!("{:+}", st.metric_sign()));
    rep.value("reeb", m.show_vector(st.reeb()));
}

fn identities(st: &EpsilonContact, r: &IdentityReport, rep: &mut Report) {
    for c in &r.checks {
        let ch = rep.require(format!("{}: {}", c.key, c.name), Outcome::verdict(c.residual.verdict), Outcome::Zero);
        ch.witness = c.residual.witness.as_ref().map(|w| WitnessOut::new(st.manifold(), w));
    }
}

fn error_check(rep: &mut Report, name: &str, e: impl ToString) {
    rep.require(name, Outcome::Fail, Outcome::Pass).detail = Some(e.to_string());
}

pub fn check_contact(st: &EpsilonContact, rep: &mut Report) {
    for r in [st.phi_identities_report(), st.reeb_identities_report(), st.structure_report()] {
        match r {
            Ok(r) => identities(st, &r, rep),
            Err(e) => error_check(rep, "identity suite", e),
        }
    }
}

pub fn check(built: &Built, subject: &str, seed: u64) -> Report {
    let mut rep = Report::new("check", subject, seed);
    if let Some(st) = verify(built, &mut rep) {
        check_contact(&st, &mut rep);
    }
    rep
}

fn certificate_map(c: &Certificate) -> BTreeMap<String, String> {
    let (a, b) = c.coefficients();
    BTreeMap::from([
        ("epsilon".into(), c.epsilon.to_string()),
        ("lambda^2".into(), c.lambda2.to_string()),
        ("kappa".into(), c.kappa.to_string()),
        ("metric sign".into(), format!("{:+}", c.sign)),
        ("Ric = A g + B alpha*alpha, A".into(), a.to_string()),
        ("Ric = A g + B alpha*alpha, B".into(), b.to_string()),
        ("scalar curvature".into(), c.scalar_curvature().to_string()),
    ])
}

/// Re-derives Ricci at seeded admissible parameter values and compares it
/// with the certificate evaluated there.
fn spot_check(st: &EpsilonContact, c: &Certificate, seed: u64) -> Result<Option<usize>, String> {
    let m = st.manifold();
    let asm = m.assumptions();
    let params: Vec<Symbol> = asm.params().map(|(p, _)| p.clone()).collect();
    if params.is_empty() || asm.functions().next().is_some() {
        return Ok(None);
    }
    let probe = params.iter().fold(Scalar::zero(), |acc, p| &acc + &Scalar::param(p.as_str()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = c.coefficients();
    for _ in 0..SPOT_CHECKS {
        let bind = asm.sample_bindings(&probe, &mut rng).ok_or("no admissible sample")?;
        let values: Vec<(Symbol, Rational)> = params
            .iter()
            .map(|p| bind.value(p).map(|v| (p.clone(), v.clone())))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let sm = m.specialize(&values, &[]).map_err(|e| e.to_string())?;
        let ric = riemann(&sm, &levi_civita(&sm)).ricci_symmetric();
        let alpha = st.alpha().to_tensor();
        let aa = alpha.outer(&alpha);
        let g = m.metric_tensor();
        let at = |s: &Scalar| s.eval(&bind).map_err(|e| e.to_string());
        for idx in g.indices() {
            let lhs = at(ric.get_ref(&idx))?;
            let rhs = at(&a)? * at(g.get_ref(&idx))? + at(&b)? * at(aa.get_ref(&idx))?;
            if lhs != rhs {
                let pts: Vec<String> = values.iter().map(|(p, v)| format!("{p}={v}")).collect();
                return Err(format!("Ricci component {idx:?} differs at {}", pts.join(", ")));
            }
        }
    }
    Ok(Some(SPOT_CHECKS))
}

pub fn classify_contact(st: &EpsilonContact, rep: &mut Report, seed: u64) {
    match classify(st) {
        Ok(Classification::Certified(c)) => {
            rep.require("eta-einstein certificate", Outcome::Pass, Outcome::Pass);
            match tensor_verdict(st.manifold(), &c.residual) {
                Ok(v) => {
                    let ch = rep.require("Ricci residual against certificate", Outcome::verdict(v.verdict), Outcome::Zero);
                    ch.witness = v.witness.as_ref().map(|w| WitnessOut::new(st.manifold(), w));
                }
                Err(e) => error_check(rep, "Ricci residual against certificate", e),
            }
            match spot_check(st, &c, seed) {
                Ok(Some(n)) => rep.require(format!("seeded spot check ({n} parameter samples)"), Outcome::Pass, Outcome::Pass),
                Ok(None) => rep.inform("seeded spot check (skipped: no free parameters or free functions)", Outcome::Unknown),
                Err(e) => {
                    let ch = rep.require("seeded spot check", Outcome::Fail, Outcome::Pass);
                    ch.detail = Some(e);
                    ch
                }
            };
            rep.certificate = Some(certificate_map(&c));
        }
        Ok(Classification::NotEtaEinstein(r)) => {
            let ch = rep.require("eta-einstein certificate", Outcome::Fail, Outcome::Pass);
            let mut d = r.reason.clone();
            if let Some((idx, v)) = &r.component {
                d.push_str(&format!("; component {idx:?} = {v}"));
            }
            if let Some((l2, k)) = &r.best_fit {
                d.push_str(&format!("; least-squares fit at a sample point: lambda^2 = {l2}, kappa = {k}"));
            }
            ch.detail = Some(d);
        }
        Err(e) => error_check(rep, "eta-einstein certificate", e),
    }
}

pub fn classify_built(built: &Built, subject: &str, seed: u64) -> Report {
    let mut rep = Report::new("classify", subject, seed);
    if let Some(st) = verify(built, &mut rep) {
        classify_contact(&st, &mut rep, seed);
    }
    rep
}

pub fn null_contact(st: &EpsilonContact, rep: &mut Report) -> Result<(), RunError> {
    if st.epsilon() != 0 {
        return Err(RunError::Mismatch(format!(
            "null-analysis needs a null structure (epsilon = 0), got epsilon = {}",
            st.epsilon()
        )));
    }
    let m = st.manifold();
    match st.reeb_identities_report() {
        Ok(r) => identities(st, &r, rep),
        Err(e) => error_check(rep, "null identities", e),
    }
    match st.null_mu() {
        Ok(mu) => rep.value("mu", mu),
        Err(e) => rep.value("mu", format!("undetermined: {e}")),
    }
    let sasaki = st.is_sasaki();
    for (name, v) in [("sasaki (h = 0)", &sasaki), ("k-contact (L_xi g = 0)", &st.is_k_contact())] {
        match v {
            Ok(v) => {
                rep.inform(name, Outcome::verdict(v.verdict)).witness = v.witness.as_ref().map(|w| WitnessOut::new(m, w));
            }
            Err(e) => error_check(rep, name, e),
        }
    }
    match st.find_contact_frame(None) {
        Ok(f) => {
            rep.value("frame u", m.show_vector(&f.u));
            rep.value("frame phi(u)", m.show_vector(&f.phi_u));
            rep.inform("light-cone frame found", Outcome::Pass);
            if matches!(&sasaki, Ok(v) if v.is_zero()) {
                match st.saskc_criterion(&f) {
                    Ok(s) => rep.value("g([xi,u],u)", s),
                    Err(e) => rep.value("g([xi,u],u)", format!("unavailable: {e}")),
                }
            }
        }
        Err(e) => {
            rep.inform("light-cone frame found", Outcome::Unknown).detail = Some(e.to_string());
        }
    }
    match st.sasaki_iff_integrable_report() {
        Ok(r) => {
            let ch = rep.inform("Nijenhuis tensor of J vanishes", Outcome::verdict(r.nijenhuis.verdict));
            ch.witness = r.nijenhuis.witness.as_ref().map(|w| WitnessOut::new(m, w));
            rep.value(
                "rank J, rank J^2",
                format!("{}, {}", show_rank(r.ranks.rank_j), show_rank(r.ranks.rank_j2)),
            );
            rep.inform("J zero-deformable", Outcome::truth(r.ranks.zero_deformable()));
            rep.inform("ker J involutive", Outcome::truth(r.kernel.verdict));
            rep.inform("J integrable", Outcome::truth(r.integrable));
            let agree = match r.agrees {
                Some(b) => Outcome::pass_if(b),
                None => Outcome::Unknown,
            };
            rep.require("sasaki <=> J integrable", agree, Outcome::Pass);
        }
        Err(e) => error_check(rep, "sasaki <=> J integrable", e),
    }
    Ok(())
}

fn show_rank(r: Option<usize>) -> String {
    r.map_or_else(|| "parameter-dependent".into(), |r| r.to_string())
}

pub fn null_analysis(built: &Built, subject: &str, seed: u64) -> Result<Report, RunError> {
    let mut rep = Report::new("null-analysis", subject, seed);
    if let Some(st) = verify(built, &mut rep) {
        null_contact(&st, &mut rep)?;
    }
    Ok(rep)
}

fn residual_check(rep: &mut Report, m: &FrameManifold, name: &str, r: &Residual) {
    let ch = rep.require(name, Outcome::verdict(r.verdict.verdict), Outcome::Zero);
    ch.witness = r.verdict.witness.as_ref().map(|w| WitnessOut::new(m, w));
}

pub fn report_solution(cfg: &SupergravityConfig, rep: &mut Report) {
    let m = &cfg.manifold;
    if let Some(c) = &cfg.c {
        rep.value("flux coefficient c", c);
    }
    for (p, sq) in &cfg.reductions {
        rep.value(&format!("{p}^2"), sq);
    }
    match verify_eom(cfg) {
        Ok(r) => {
            for (k, res) in r.checks() {
                residual_check(rep, m, &format!("field equation {k}"), res);
            }
        }
        Err(e) => error_check(rep, "field equations", e),
    }
    match torsion_ricci_flat(cfg) {
        Ok(t) => {
            residual_check(rep, m, "Ric of skew-torsion connection", &t.ricci);
            residual_check(rep, m, "antisymmetric part of Ric(nabla^H)", &t.antisymmetric);
        }
        Err(e) => error_check(rep, "skew-torsion connection", e),
    }
}

fn certified(st: &EpsilonContact, rep: &mut Report, seed: u64, prefix: &str) -> Option<Certificate> {
    let mut sub = Report::new("classify", prefix, seed);
    classify_contact(st, &mut sub, seed);
    rep.absorb(prefix, sub);
    classify(st).ok().and_then(|c| c.certificate().cloned())
}

fn solution(rep: &mut Report, r: Result<SupergravityConfig, SugraError>) {
    match r {
        Ok(cfg) => {
            rep.require("factors compatible", Outcome::Pass, Outcome::Pass);
            report_solution(&cfg, rep);
        }
        Err(SugraError::Incompatible(reasons)) => {
            rep.require("factors compatible", Outcome::Fail, Outcome::Pass).detail = Some(reasons.join("; "));
        }
        Err(e) => error_check(rep, "flux calibration", e),
    }
}

pub fn product(n: &Built, x: &Built, subject: &str, seed: u64) -> Report {
    let mut rep = Report::new("product", subject, seed);
    let mut sn = Report::new("check", "N", seed);
    let mut sx = Report::new("check", "X", seed);
    let stn = verify(n, &mut sn);
    let stx = verify(x, &mut sx);
    rep.absorb("N", sn);
    rep.absorb("X", sx);
    let (Some(stn), Some(stx)) = (stn, stx) else { return rep };
    let cn = certified(&stn, &mut rep, seed, "N");
    let cx = certified(&stx, &mut rep, seed, "X");
    let (Some(cn), Some(cx)) = (cn, cx) else { return rep };
    solution(&mut rep, build_solution(&stn, &cn, &stx, &cx));
    rep
}

pub fn catalog_names() -> Vec<&'static str> {
    NAMES.iter().chain(PRODUCTS.iter()).copied().collect()
}

fn eta_input(e: EtaError) -> RunError {
    RunError::Input(e.to_string())
}

pub fn catalog(name: &str, params: &[(String, Rational)], seed: u64) -> Result<Report, RunError> {
    let p: Vec<(&str, Rational)> = params.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let mut rep = Report::new("catalog", name, seed);
    for (k, v) in &p {
        rep.notes.push(format!("{k} fixed to {v}"));
    }
    if PRODUCTS.contains(&name) {
        let pair = match eta_einstein::product_pair(name, &p) {
            Ok(pair) => pair,
            Err(e @ (EtaError::EntryMismatch { .. } | EtaError::Contact(_) | EtaError::Frame(_))) => {
                error_check(&mut rep, "catalog factors", e);
                return Ok(rep);
            }
            Err(e) => return Err(eta_input(e)),
        };
        for (label, entry) in [("N", &pair.n), ("X", &pair.x)] {
            let mut sub = Report::new("catalog", entry.name(), seed);
            sub.notes.extend(entry.structure.notes.iter().map(|s| s.to_string()));
            sub.require("epsilon-contact (alpha = *d alpha, |alpha|^2 constant)", Outcome::Pass, Outcome::Pass);
            describe(&entry.contact, &mut sub);
            classify_contact(&entry.contact, &mut sub, seed);
            rep.absorb(&format!("{label} = {}", entry.name()), sub);
        }
        solution(&mut rep, econtact::sugra6::build_from_pair(&pair));
        return Ok(rep);
    }
    if !NAMES.contains(&name) {
        return Err(RunError::Input(format!(
            "unknown catalog entry `{name}`; available: {}",
            catalog_names().join(", ")
        )));
    }
    let entry = match eta_einstein::catalog(name, &p) {
        Ok(e) => e,
        Err(e @ (EtaError::EntryMismatch { .. } | EtaError::Contact(_) | EtaError::Frame(_))) => {
            error_check(&mut rep, "catalog entry", e);
            return Ok(rep);
        }
        Err(e) => return Err(eta_input(e)),
    };
    rep.notes.extend(entry.structure.notes.iter().map(|s| s.to_string()));
    rep.require("epsilon-contact (alpha = *d alpha, |alpha|^2 constant)", Outcome::Pass, Outcome::Pass);
    let st = &entry.contact;
    describe(st, &mut rep);
    check_contact(st, &mut rep);
    if entry.expected.is_some() {
        classify_contact(st, &mut rep, seed);
    } else {
        let mut sub = Report::new("classify", name, seed);
        classify_contact(st, &mut sub, seed);
        // entries without an expected certificate are reported, not required
        for c in &mut sub.checks {
            c.expect = None;
        }
        rep.absorb("", sub);
    }
    if st.epsilon() == 0 {
        null_contact(st, &mut rep)?;
    }
    Ok(rep)
}

