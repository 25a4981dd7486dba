//! Explicit three-dimensional structures used as fixtures throughout.
//!
//! Each builder returns the frame manifold with its parameter assumptions,
//! the 1-form α and the orientation under which `α = ⋆dα` holds.

use crate::assume::Assumptions;
use crate::frame::{Form, FrameError, FrameManifold};
use crate::scalar::{parse_expr, Scalar, SymbolTable};

#[derive(Clone, Debug)]
pub struct CatalogStructure {
    pub name: &'static str,
    pub manifold: FrameManifold,
    pub alpha: Form,
    /// Reading choices made where the source presentation is ambiguous.
    pub notes: Vec<&'static str>,
}

pub const NAMES: [&str; 6] = ["su2", "sl2-lor", "sl2-para", "sl2-null", "sl2-sasnokc", "r3-null"];

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn lam2() -> Scalar {
    Scalar::param("lambda").pow(2).expect("positive power")
}

fn assumptions(constraints: &[&str]) -> Assumptions {
    let mut a = Assumptions::new();
    for c in constraints {
        a.assume(c).expect("catalog constraint parses");
    }
    a
}

/// SU(2) with `[e2,e3] = e1`, `[e3,e1] = λ²e2`, `[e1,e2] = λ²e3`, `h = I`, `α = e¹`.
pub fn su2() -> Result<CatalogStructure, FrameError> {
    let m = FrameManifold::builder(&["e1", "e2", "e3"])
        .bracket_by_label("e2", "e3", &[("e1", s(1))])?
        .bracket_by_label("e3", "e1", &[("e2", lam2())])?
        .bracket_by_label("e1", "e2", &[("e3", lam2())])?
        .diagonal_metric(&[1, 1, 1])
        .orientation(-1)
        .assumptions(assumptions(&["lambda != 0"]))
        .build()?;
    Ok(CatalogStructure {
        name: "su2",
        alpha: m.coframe(0),
        manifold: m,
        notes: vec![],
    })
}

type Bracket<'a> = (&'a str, &'a str, &'a [(&'a str, Scalar)]);

fn sl2_lorentzian(brackets: &[Bracket<'_>], constraints: &[&str]) -> Result<FrameManifold, FrameError> {
    let mut b = FrameManifold::builder(&["e0", "e1", "e2"]);
    for (x, y, rhs) in brackets {
        b = b.bracket_by_label(x, y, rhs)?;
    }
    b.diagonal_metric(&[-1, 1, 1]).orientation(1).assumptions(assumptions(constraints)).build()
}

/// Lorentzian contact structure on the universal cover of SL(2,ℝ), `α = e⁰`.
pub fn sl2_lor() -> Result<CatalogStructure, FrameError> {
    let m = sl2_lorentzian(
        &[
            ("e0", "e1", &[("e2", lam2())]),
            ("e0", "e2", &[("e1", -&lam2())]),
            ("e1", "e2", &[("e0", s(-1))]),
        ],
        &["0 < lambda^2 <= 1"],
    )?;
    Ok(CatalogStructure {
        name: "sl2-lor",
        alpha: m.coframe(0),
        manifold: m,
        notes: vec!["α is given with a vector label; encoded as the dual 1-form e^0"],
    })
}

/// Para-contact structure, `α = e¹`.
pub fn sl2_para() -> Result<CatalogStructure, FrameError> {
    let m = sl2_lorentzian(
        &[
            ("e1", "e2", &[("e0", -&lam2())]),
            ("e1", "e0", &[("e2", -&lam2())]),
            ("e2", "e0", &[("e1", s(1))]),
        ],
        &["lambda^2 >= 1"],
    )?;
    Ok(CatalogStructure {
        name: "sl2-para",
        alpha: m.coframe(1),
        manifold: m,
        notes: vec![],
    })
}

/// Null contact structure, `α = α₀(e⁰ − e²)`.
pub fn sl2_null() -> Result<CatalogStructure, FrameError> {
    let m = sl2_lorentzian(
        &[
            ("e1", "e2", &[("e0", s(-2)), ("e2", s(-1))]),
            ("e1", "e0", &[("e0", s(1))]),
            ("e2", "e0", &[("e1", s(1))]),
        ],
        &["alpha0 != 0"],
    )?;
    let a0 = Scalar::param("alpha0");
    Ok(CatalogStructure {
        name: "sl2-null",
        alpha: Form::one_form(vec![a0.clone(), s(0), -&a0]),
        manifold: m,
        notes: vec!["α is given with vector labels; encoded as the dual 1-form alpha0 (e^0 - e^2)"],
    })
}

/// Sasakian, generally not K-contact, null structure on frame `(e+, e-, e2)`.
pub fn sl2_sasnokc() -> Result<CatalogStructure, FrameError> {
    let a = Scalar::param("a");
    let m = FrameManifold::builder(&["ep", "em", "e2"])
        .bracket_by_label("ep", "em", &[("ep", a.clone()), ("e2", s(-1))])?
        .bracket_by_label("ep", "e2", &[("ep", s(1))])?
        .bracket_by_label("em", "e2", &[("em", s(-1)), ("e2", a)])?
        .metric(vec![vec![s(0), s(1), s(0)], vec![s(1), s(0), s(0)], vec![s(0), s(0), s(1)]])
        .orientation(-1)
        .assumptions({
            let mut x = Assumptions::new();
            x.declare("a");
            x
        })
        .build()?;
    Ok(CatalogStructure {
        name: "sl2-sasnokc",
        alpha: m.coframe(1),
        manifold: m,
        notes: vec!["the structure equations list d(e^+) twice; the second is read as d(e^-) = e^- ^ e^2"],
    })
}

/// Minkowski ℝ³ in coordinates `(t, x, y)` with `α = e^y q(x − t)(dt − dx)`.
pub fn r3_null() -> Result<CatalogStructure, FrameError> {
    r3_with_argument("x - t")
}

/// Variant with `q(t − x)`, matching the displayed Reeb field and tensors.
pub fn r3_null_reflected() -> Result<CatalogStructure, FrameError> {
    r3_with_argument("t - x")
}

fn r3_with_argument(arg: &str) -> Result<CatalogStructure, FrameError> {
    let mut a = Assumptions::new();
    a.declare_function("q", true);
    let m = FrameManifold::builder(&["t", "x", "y"])
        .coordinate_frame(&["t", "x", "y"])
        .diagonal_metric(&[-1, 1, 1])
        .orientation(1)
        .assumptions(a)
        .build()?;
    let table = SymbolTable::new().with_coords(["t", "x", "y"]).with_funcs(["q"]);
    let f = parse_expr(&format!("exp(y)*q({arg})"), &table)
        .expect("literal parses")
        .to_scalar()?;
    Ok(CatalogStructure {
        name: "r3-null",
        alpha: Form::one_form(vec![f.clone(), -&f, s(0)]),
        manifold: m,
        notes: vec!["the Reeb field and tensors are displayed with q(t - x) while α uses q(x - t); α is taken as primary"],
    })
}

/// Builder by name.
pub fn by_name(name: &str) -> Option<Result<CatalogStructure, FrameError>> {
    Some(match name {
        "su2" => su2(),
        "sl2-lor" => sl2_lor(),
        "sl2-para" => sl2_para(),
        "sl2-null" => sl2_null(),
        "sl2-sasnokc" => sl2_sasnokc(),
        "r3-null" => r3_null(),
        _ => return None,
    })
}
