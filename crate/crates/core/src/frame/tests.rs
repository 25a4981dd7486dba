use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::scalar::{int, parse_expr, SymbolTable};

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn lam2() -> Scalar {
    Scalar::param("lambda").pow(2).unwrap()
}

fn su2() -> FrameManifold {
    let mut a = Assumptions::new();
    a.declare("lambda");
    FrameManifold::builder(&["e1", "e2", "e3"])
        .bracket(1, 2, vec![s(1), s(0), s(0)])
        .bracket(2, 0, vec![s(0), lam2(), s(0)])
        .bracket(0, 1, vec![s(0), s(0), lam2()])
        .assumptions(a)
        .build()
        .unwrap()
}

fn sl2_lor() -> FrameManifold {
    let mut a = Assumptions::new();
    a.declare("lambda");
    FrameManifold::builder(&["e0", "e1", "e2"])
        .bracket(0, 1, vec![s(0), s(0), lam2()])
        .bracket(0, 2, vec![s(0), -&lam2(), s(0)])
        .bracket(1, 2, vec![s(-1), s(0), s(0)])
        .diagonal_metric(&[-1, 1, 1])
        .assumptions(a)
        .build()
        .unwrap()
}

fn r3() -> FrameManifold {
    FrameManifold::builder(&["t", "x", "y"])
        .coordinate_frame(&["t", "x", "y"])
        .diagonal_metric(&[-1, 1, 1])
        .build()
        .unwrap()
}

fn euclid(n: usize) -> FrameManifold {
    let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    FrameManifold::builder(&labels).build().unwrap()
}

fn lorentz(n: usize) -> FrameManifold {
    let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut d = vec![1; n];
    d[0] = -1;
    FrameManifold::builder(&labels).diagonal_metric(&d).build().unwrap()
}

fn random_form(rng: &mut ChaCha8Rng, dim: usize, p: usize) -> Form {
    let mut w = Form::zero(dim, p);
    for k in combinations(dim, p) {
        w.set(&k, Scalar::from_int(rng.gen_range(-3..=3)));
    }
    w
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::new((0..dim).map(|_| Scalar::from_int(rng.gen_range(-3..=3))).collect())
}

/// Permutations of `0..n` with signs.
fn perms(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, sgn) in perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let flips = (p.len() - pos) as i64;
            out.push((q, if flips % 2 == 0 { sgn } else { -sgn }));
        }
    }
    out
}

#[test]
fn wedge_anchor_and_graded_commutativity() {
    let e12 = Form::basis(3, &[0]).wedge(&Form::basis(3, &[1])).unwrap();
    assert_eq!(e12.eval_on(&[Vector::basis(3, 0), Vector::basis(3, 1)]).unwrap(), s(1));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, q) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3)] {
        let a = random_form(&mut rng, 5, p);
        let b = random_form(&mut rng, 5, q);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
        assert_eq!(ab, ba.scale_rational(&int(sign)));
    }
    assert!(matches!(
        Form::basis(3, &[0, 1]).wedge(&Form::basis(3, &[1, 2])),
        Err(FrameError::DegreeOverflow { .. })
    ));
}

#[test]
fn wedge_matches_alternation_oracle() {
    // (ω∧η)(X₁..X_{p+q}) = 1/(p!q!) Σ_σ sgn σ ω(X_σ..) η(X_σ..)
    let table = SymbolTable::new().with_coords(["t", "x", "y"]).with_funcs(["q"]);
    let f = parse_expr("exp(y)*q(x - t)", &table).unwrap().to_scalar().unwrap();
    let a = Form::one_form(vec![f.clone(), -&f, s(0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = Form::basis(3, &[2]);
    let c = random_form(&mut rng, 3, 1);
    let w = a.wedge(&b).unwrap().wedge(&c).unwrap();
    let tensors = [a.to_tensor(), b.to_tensor(), c.to_tensor()];
    for idx in w.to_tensor().indices() {
        let mut acc = Scalar::zero();
        for (p, sgn) in perms(3) {
            let mut t = Scalar::from_int(sgn);
            for (k, tensor) in tensors.iter().enumerate() {
                t = &t * &tensor.get(&[idx[p[k]]]);
            }
            acc += &t;
        }
        assert_eq!(w.get(&idx), acc, "component {idx:?}");
    }
}

#[test]
fn interior_examples() {
    let vol = Form::basis(3, &[0, 1, 2]);
    assert_eq!(vol.interior(&Vector::basis(3, 0)).unwrap(), Form::basis(3, &[1, 2]));
    assert!(Form::function(3, s(1)).interior(&Vector::basis(3, 0)).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [euclid(3), lorentz(3), sl2_lor()] {
        for _ in 0..5 {
            let eta = random_form(&mut rng, 3, 1);
            let star = m.hodge(&eta).unwrap();
            assert!(star.interior(&m.sharp(&eta)).unwrap().is_zero());
        }
    }
}

#[test]
fn interior_is_an_antiderivation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 1)] {
        let a = random_form(&mut rng, 6, p);
        let b = random_form(&mut rng, 6, q);
        let x = random_vector(&mut rng, 6);
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let rhs = a
            .interior(&x)
            .unwrap()
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&b.interior(&x).unwrap()).unwrap().scale_rational(&int(sign)));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn interior_on_orthogonal_factor() {
    // ι_X(α∧β) = α(X) β when β vanishes on X
    let a = Form::one_form(vec![s(2), s(1), s(0), s(0)]);
    let b = Form::one_form(vec![s(0), s(0), s(3), s(-1)]);
    let x = Vector::new(vec![s(1), s(5), s(0), s(0)]);
    let expected = b.scale(&a.eval_on(std::slice::from_ref(&x)).unwrap());
    assert_eq!(a.wedge(&b).unwrap().interior(&x).unwrap(), expected);
}

#[test]
fn sharp_and_flat() {
    let m = lorentz(3);
    assert_eq!(m.sharp(&Form::basis(3, &[0])), Vector::basis(3, 0).scale(&s(-1)));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let a = random_form(&mut rng, 3, 1);
        assert_eq!(m.flat(&m.sharp(&a)), a);
    }
    let sas = FrameManifold::builder(&["ep", "em", "e2"])
        .metric(vec![vec![s(0), s(1), s(0)], vec![s(1), s(0), s(0)], vec![s(0), s(0), s(1)]])
        .build()
        .unwrap();
    assert_eq!(sas.sharp(&Form::basis(3, &[1])), Vector::basis(3, 0));
    assert_eq!(sas.signature(), -1);
}

#[test]
fn hodge_basics() {
    let m = lorentz(3);
    assert_eq!(m.hodge(&Form::function(3, s(1))).unwrap(), m.volume().unwrap());
    assert_eq!(m.hodge(&Form::basis(3, &[0])).unwrap(), Form::basis(3, &[1, 2]).scale(&s(-1)));
}

#[test]
fn hodge_defining_relation_oracle() {
    // Solve η∧⋆ω = ⟨η,ω⟩ν for the unknown ⋆ω basis coefficient by coefficient.
    for m in [lorentz(3), euclid(4), lorentz(4), sl2_lor()] {
        let n = m.dim();
        let vol = m.volume().unwrap();
        let top: Vec<usize> = (0..n).collect();
        for p in 0..=n {
            for i in combinations(n, p) {
                let w = Form::basis(n, &i);
                let star = m.hodge(&w).unwrap();
                for j in combinations(n, p) {
                    let eta = Form::basis(n, &j);
                    let lhs = eta.wedge(&star).unwrap().get(&top);
                    let rhs = &m.inner(&eta, &w) * &vol.get(&top);
                    assert_eq!(lhs, rhs, "p={p} I={i:?} J={j:?}");
                }
            }
        }
    }
}

#[test]
fn double_hodge_sign_law() {
    let product = FrameManifold::product(&lorentz(3), &euclid(3)).unwrap();
    for m in [euclid(3), lorentz(3), sl2_lor(), euclid(4), lorentz(4), product] {
        let n = m.dim();
        for p in 0..=n {
            let sign = m.signature() as i64 * if (p * (n - p)) % 2 == 0 { 1 } else { -1 };
            for i in combinations(n, p) {
                let w = Form::basis(n, &i);
                assert_eq!(m.hodge(&m.hodge(&w).unwrap()).unwrap(), w.scale_rational(&int(sign)));
                let hw = m.hodge(&w).unwrap();
                for j in combinations(n, p) {
                    let v = Form::basis(n, &j);
                    let hv = m.hodge(&v).unwrap();
                    assert_eq!(m.inner(&hw, &hv), m.inner(&w, &v).scale(&int(m.signature() as i64)));
                }
            }
        }
        if n == 6 {
            for i in combinations(6, 3) {
                let w = Form::basis(6, &i);
                assert_eq!(m.hodge(&m.hodge(&w).unwrap()).unwrap(), w);
            }
        }
    }
}

#[test]
fn maurer_cartan_examples() {
    let m = su2();
    assert_eq!(m.ext_d(&m.coframe(0)), Form::basis(3, &[1, 2]).scale(&s(-1)));
    let l = sl2_lor();
    assert_eq!(l.ext_d(&l.coframe(0)), Form::basis(3, &[1, 2]));
}

#[test]
fn coordinate_frame_derivative() {
    let m = r3();
    let table = SymbolTable::new().with_coords(["t", "x", "y"]).with_funcs(["q"]);
    let f = parse_expr("exp(y)*q(x - t)", &table).unwrap().to_scalar().unwrap();
    let alpha = Form::one_form(vec![f.clone(), -&f, s(0)]);
    let da = m.ext_d(&alpha);
    let expected = Form::basis(3, &[2])
        .wedge(&Form::one_form(vec![s(1), s(-1), s(0)]))
        .unwrap()
        .scale(&f);
    assert_eq!(da, expected);
    assert!(m.ext_d(&da).is_zero());
}

#[test]
fn d_squared_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let table = SymbolTable::new().with_coords(["t", "x", "y"]).with_funcs(["q"]);
    let g = parse_expr("t*x^2 + exp(2*y - x)*q'(t)", &table).unwrap().to_scalar().unwrap();
    for m in [su2(), sl2_lor(), r3()] {
        for p in 0..2 {
            let w = random_form(&mut rng, 3, p).scale(&g);
            assert!(m.ext_d(&m.ext_d(&w)).is_zero());
        }
    }
}

#[test]
fn brackets() {
    let m = su2();
    assert_eq!(m.lie_bracket(&m.frame(1), &m.frame(2)), m.frame(0));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_vector(&mut rng, 3);
    assert!(m.lie_bracket(&x, &x).is_zero());
    let r = r3();
    let t = Scalar::coord("t");
    let x = Vector::new(vec![s(0), t.clone(), s(0)]);
    // [∂t, t ∂x] = ∂x
    assert_eq!(r.lie_bracket(&r.frame(0), &x), r.frame(1));
}

#[test]
fn jacobi_violation_rejected() {
    let err = FrameManifold::builder(&["e1", "e2", "e3"])
        .bracket(0, 1, vec![s(0), s(0), s(1)])
        .bracket(1, 2, vec![s(0), s(0), s(1)])
        .bracket(0, 2, vec![s(1), s(0), s(0)])
        .build()
        .unwrap_err();
    assert!(matches!(err, FrameError::Jacobi(..)), "{err}");
}

#[test]
fn degenerate_metric_rejected() {
    let err = FrameManifold::builder(&["a", "b"]).diagonal_metric(&[1, 0]).build().unwrap_err();
    assert!(matches!(err, FrameError::DegenerateMetric(_)));
}

#[test]
fn killing_field_on_su2() {
    let m = su2();
    assert!(m.lie_derivative(&m.frame(0), &m.metric_tensor()).is_zero());
    assert!(!m.lie_derivative(&m.frame(1), &m.metric_tensor()).is_zero());
}

#[test]
fn lie_derivative_agrees_with_cartan_and_bracket() {
    let m = r3();
    let table = SymbolTable::new().with_coords(["t", "x", "y"]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = parse_expr("t*y + x^2", &table).unwrap().to_scalar().unwrap();
    let x = Vector::new(vec![f.clone(), Scalar::coord("y"), s(2)]);
    for p in 1..=2 {
        let w = random_form(&mut rng, 3, p).scale(&Scalar::coord("x"));
        let cartan = m.lie_derivative_form(&x, &w);
        let dense = m.lie_derivative(&x, &w.to_tensor());
        assert_eq!(cartan.to_tensor(), dense);
    }
    let y = Vector::new(vec![Scalar::coord("x"), s(1), f.clone()]);
    assert_eq!(m.lie_derivative(&x, &y.to_tensor()), m.lie_bracket(&x, &y).to_tensor());
    let func = Tensor::zeros(3, 0, 0);
    assert!(m.lie_derivative(&x, &func).is_zero());
}

#[test]
fn product_structure() {
    let n = sl2_lor();
    let x = su2();
    let p = FrameManifold::product(&n, &x).unwrap();
    assert_eq!(p.dim(), 6);
    for i in 0..3 {
        for j in 3..6 {
            assert!(p.metric()[i][j].is_zero());
            for k in 0..6 {
                assert!(p.structure(i, j, k).is_zero());
            }
        }
    }
    assert!(FrameManifold::product(&x, &n).is_err());
    let nu = p.promote(&n, &n.volume().unwrap()).unwrap().wedge(&p.promote(&x, &x.volume().unwrap()).unwrap()).unwrap();
    assert_eq!(nu, p.volume().unwrap());
    let all: Vec<usize> = (0..6).collect();
    assert_eq!(nu.get(&all), s((n.orientation() * x.orientation()) as i64));
    let a_n = p.promote(&n, &n.coframe(0)).unwrap();
    for j in 3..6 {
        assert!(a_n.eval_on(&[p.frame(j)]).unwrap().is_zero());
    }
    let star_ax = p.promote(&x, &x.hodge(&x.coframe(0)).unwrap()).unwrap();
    for i in 0..3 {
        assert!(star_ax.interior(&p.frame(i)).unwrap().is_zero());
    }
    assert!(p.promote(&euclid(3), &euclid(3).coframe(0)).is_err());
}

#[test]
fn product_hodge_rule() {
    let n = sl2_lor();
    let x = su2();
    let p = FrameManifold::product(&n, &x).unwrap();
    for q in 0..=3 {
        for r in 0..=3 {
            let sign = if (r * (3 - q)) % 2 == 0 { 1 } else { -1 };
            for i in combinations(3, q) {
                for j in combinations(3, r) {
                    let rho = Form::basis(3, &i);
                    let sigma = Form::basis(3, &j);
                    let lhs = p
                        .hodge(&p.promote(&n, &rho).unwrap().wedge(&p.promote(&x, &sigma).unwrap()).unwrap())
                        .unwrap();
                    let rhs = p
                        .promote(&n, &n.hodge(&rho).unwrap())
                        .unwrap()
                        .wedge(&p.promote(&x, &x.hodge(&sigma).unwrap()).unwrap())
                        .unwrap()
                        .scale_rational(&int(sign));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn form_tensor_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = random_form(&mut rng, 4, 2);
    assert_eq!(Form::from_tensor(&w.to_tensor()).unwrap(), w);
    let mut t = Tensor::zeros(3, 0, 2);
    t.set(&[0, 1], s(1));
    assert!(Form::from_tensor(&t).is_err());
}

#[test]
fn non_identity_action_bracket_check() {
    // e1 = ∂x, e2 = x ∂y: [e1,e2] = ∂y = (1/x) e2 is not a polynomial structure
    // function; declaring it zero must be rejected.
    let x = Scalar::coord("x");
    let err = FrameManifold::builder(&["e1", "e2"])
        .coordinates(&["x", "y"], vec![vec![s(1), s(0)], vec![s(0), x.clone()]])
        .build()
        .unwrap_err();
    assert!(matches!(err, FrameError::BracketAction { .. }));
}
