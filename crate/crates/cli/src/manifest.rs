//! JSON manifests describing a frame manifold and a 1-form.
//!
//! Every scalar is a string in the expression grammar, so the file keeps the
//! exact text it was written with and re-serializes to the same manifest.

use std::collections::{BTreeMap, BTreeSet};

use econtact::assume::Assumptions;
use econtact::contact::OrientationMode;
use econtact::frame::{Form, FrameError, FrameManifold};
use econtact::scalar::{parse_expr, Rational, Scalar, Symbol, SymbolTable};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<FunctionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assume: Vec<String>,
    pub manifold: ManifoldSpec,
    /// Components of α in the coframe.
    pub alpha: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDecl {
    pub name: String,
    #[serde(default)]
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coordinates: Vec<String>,
    /// `frame[i][μ]`: component of `e_i` along `∂_μ`. Defaults to the
    /// coordinate frame when coordinates are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketSpec>,
    pub metric: Vec<Vec<String>>,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub a: String,
    pub b: String,
    /// `[a, b] = Σ rhs[label] · label`.
    pub rhs: BTreeMap<String, String>,
}

/// `1`, `-1` or `"auto"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Orientation {
    Sign(i64),
    Named(String),
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message} (column {column})")]
    Expression { path: String, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("manifold: {0}")]
    Structure(#[from] FrameError),
}

impl ManifestError {
    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ManifestError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let m: Manifest = serde_json::from_str(text).map_err(|e| ManifestError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if m.version != MANIFEST_VERSION {
        return Err(ManifestError::invalid("version", format!("unsupported version {}", m.version)));
    }
    // resolve every expression once so undeclared symbols surface at parse time
    m.build(&BuildOptions::default())?;
    Ok(m)
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn build(&self, opts: &BuildOptions) -> Result<Built, ManifestError> {
        Builder::new(self, opts)?.finish()
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub params: Vec<(String, Rational)>,
    /// Overrides the manifest orientation.
    pub orientation: Option<Orientation>,
    /// Skip `params` the manifest does not declare.
    pub lenient: bool,
}

#[derive(Clone, Debug)]
pub struct Built {
    pub manifold: FrameManifold,
    pub alpha: Form,
    pub mode: OrientationMode,
    pub notes: Vec<String>,
}

struct Builder<'a> {
    m: &'a Manifest,
    table: SymbolTable,
    values: Vec<(Symbol, Rational)>,
    assumptions: Assumptions,
    orientation: Option<Orientation>,
    notes: Vec<String>,
}

impl<'a> Builder<'a> {
    fn new(m: &'a Manifest, opts: &BuildOptions) -> Result<Self, ManifestError> {
        let mut seen = BTreeSet::new();
        let names = m
            .parameters
            .iter()
            .map(|s| ("parameters", s.as_str()))
            .chain(m.functions.iter().map(|f| ("functions", f.name.as_str())))
            .chain(m.manifold.coordinates.iter().map(|s| ("manifold.coordinates", s.as_str())));
        for (path, n) in names {
            if !seen.insert(n) {
                return Err(ManifestError::invalid(path, format!("`{n}` is declared twice")));
            }
        }
        // labels live in their own namespace and may repeat coordinate names
        let mut labels = BTreeSet::new();
        if let Some(l) = m.manifold.labels.iter().find(|l| !labels.insert(l.as_str())) {
            return Err(ManifestError::invalid("manifold.labels", format!("`{l}` is declared twice")));
        }
        let table = SymbolTable::new()
            .with_params(m.parameters.iter().map(String::as_str))
            .with_coords(m.manifold.coordinates.iter().map(String::as_str))
            .with_funcs(m.functions.iter().map(|f| f.name.as_str()));
        let mut a = Assumptions::new();
        for p in &m.parameters {
            a.declare(p);
        }
        for f in &m.functions {
            a.declare_function(&f.name, f.nonzero);
        }
        for (i, text) in m.assume.iter().enumerate() {
            a.assume(text).map_err(|e| ManifestError::invalid(format!("assume[{i}]"), e.to_string()))?;
        }
        for (p, _) in a.params() {
            if !m.parameters.iter().any(|q| q == p.as_str()) {
                return Err(ManifestError::invalid("assume", format!("undeclared symbol `{p}`")));
            }
        }
        a.check_consistent().map_err(|e| ManifestError::invalid("assume", e.to_string()))?;
        let mut values = Vec::new();
        let mut notes = Vec::new();
        for (p, v) in &opts.params {
            let sym = Symbol::new(p);
            if !m.parameters.contains(p) {
                if opts.lenient {
                    continue;
                }
                return Err(ManifestError::invalid("--params", format!("`{p}` is not a parameter of {}", m.name)));
            }
            if let Some(c) = a.constraint(&sym) {
                if !c.admits(v) {
                    return Err(ManifestError::invalid(
                        "--params",
                        format!("{p} = {v} violates the declared range ({})", c.texts.join(", ")),
                    ));
                }
            }
            a.remove_param(&sym);
            notes.push(format!("{p} fixed to {v}"));
            values.push((sym, v.clone()));
        }
        if let Some(o) = &opts.orientation {
            notes.push(format!("orientation overridden to {}", show_orientation(o)));
        }
        Ok(Builder {
            m,
            table,
            values,
            assumptions: a,
            orientation: opts.orientation.clone(),
            notes,
        })
    }

    fn expr(&self, path: String, text: &str) -> Result<Scalar, ManifestError> {
        let e = parse_expr(text, &self.table).map_err(|e| ManifestError::Expression {
            path: path.clone(),
            column: e.column,
            message: e.message,
        })?;
        let mut s = e.to_scalar().map_err(|e| ManifestError::invalid(path.clone(), e.to_string()))?;
        for (p, v) in &self.values {
            s = s
                .substitute_param(p, &Scalar::constant(v.clone()))
                .map_err(|e| ManifestError::invalid(path.clone(), e.to_string()))?;
        }
        Ok(s)
    }

    fn matrix(&self, path: &str, rows: &[Vec<String>], n: usize, cols: usize) -> Result<Vec<Vec<Scalar>>, ManifestError> {
        if rows.len() != n {
            return Err(ManifestError::invalid(path, format!("expected {n} rows, found {}", rows.len())));
        }
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != cols {
                    return Err(ManifestError::invalid(format!("{path}[{i}]"), format!("expected {cols} entries, found {}", r.len())));
                }
                r.iter().enumerate().map(|(j, t)| self.expr(format!("{path}[{i}][{j}]"), t)).collect()
            })
            .collect()
    }

    fn finish(mut self) -> Result<Built, ManifestError> {
        let spec = &self.m.manifold;
        let n = spec.labels.len();
        if n == 0 {
            return Err(ManifestError::invalid("manifold.labels", "no frame vectors"));
        }
        let mut b = FrameManifold::builder(&spec.labels);
        for (k, br) in spec.brackets.iter().enumerate() {
            let mut rhs = Vec::new();
            for (label, text) in &br.rhs {
                rhs.push((label.as_str(), self.expr(format!("manifold.brackets[{k}].rhs.{label}"), text)?));
            }
            b = b.bracket_by_label(&br.a, &br.b, &rhs)?;
        }
        let coords: Vec<&str> = spec.coordinates.iter().map(String::as_str).collect();
        match &spec.frame {
            Some(rows) => b = b.coordinates(&coords, self.matrix("manifold.frame", rows, n, coords.len())?),
            None if !coords.is_empty() => {
                if coords.len() != n {
                    return Err(ManifestError::invalid(
                        "manifold.coordinates",
                        "a coordinate frame needs one coordinate per frame vector",
                    ));
                }
                b = b.coordinate_frame(&coords);
            }
            None => {}
        }
        b = b.metric(self.matrix("manifold.metric", &spec.metric, n, n)?);
        let (sign, mode) = match &self.orientation {
            Some(o) => orientation_mode(o, "--orientation")?,
            None => orientation_mode(&spec.orientation, "manifold.orientation")?,
        };
        b = b.orientation(sign.into());
        let manifold = b.assumptions(self.assumptions.clone()).build()?;
        if self.m.alpha.len() != n {
            return Err(ManifestError::invalid("alpha", format!("expected {n} components, found {}", self.m.alpha.len())));
        }
        let comps = self
            .m
            .alpha
            .iter()
            .enumerate()
            .map(|(i, t)| self.expr(format!("alpha[{i}]"), t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Built {
            manifold,
            alpha: Form::one_form(comps),
            mode,
            notes: std::mem::take(&mut self.notes),
        })
    }
}

pub fn show_orientation(o: &Orientation) -> String {
    match o {
        Orientation::Sign(s) => format!("{s:+}"),
        Orientation::Named(s) => s.clone(),
    }
}

/// Initial sign and verification mode for an orientation entry.
pub fn orientation_mode(o: &Orientation, path: &str) -> Result<(i8, OrientationMode), ManifestError> {
    match o {
        Orientation::Sign(1) => Ok((1, OrientationMode::AsGiven)),
        Orientation::Sign(-1) => Ok((-1, OrientationMode::AsGiven)),
        Orientation::Named(s) if s == "auto" => Ok((1, OrientationMode::Auto)),
        Orientation::Named(s) if s == "+1" => Ok((1, OrientationMode::AsGiven)),
        Orientation::Named(s) if s == "-1" => Ok((-1, OrientationMode::AsGiven)),
        other => Err(ManifestError::invalid(path, format!("orientation must be 1, -1 or \"auto\", got {}", show_orientation(other)))),
    }
}

impl Orientation {
    pub fn parse(s: &str) -> Result<Orientation, String> {
        match s {
            "auto" => Ok(Orientation::Named("auto".into())),
            "1" | "+1" => Ok(Orientation::Sign(1)),
            "-1" => Ok(Orientation::Sign(-1)),
            _ => Err(format!("expected auto, +1 or -1, got `{s}`")),
        }
    }
}
