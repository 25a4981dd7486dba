use econtact::assume::{Assumptions, Verdict};
use econtact::scalar::{simplify, Bindings, Expr, Rational, Symbol, UnivariatePoly};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::num),
        prop_oneof![Just("a"), Just("b")].prop_map(|s| Expr::Param(Symbol::new(s))),
        prop_oneof![Just("t"), Just("x")].prop_map(|s| Expr::Coord(Symbol::new(s))),
    ]
}

fn affine_arg() -> impl Strategy<Value = Expr> {
    (-2i64..=2, -2i64..=2, -2i64..=2).prop_map(|(p, q, c)| {
        Expr::Add(vec![
            Expr::Mul(vec![Expr::num(p), Expr::Coord(Symbol::new("t"))]),
            Expr::Mul(vec![Expr::num(q), Expr::Coord(Symbol::new("x"))]),
            Expr::num(c),
        ])
    })
}

fn tree() -> impl Strategy<Value = Expr> {
    let base = prop_oneof![
        4 => leaf(),
        1 => affine_arg().prop_map(|a| Expr::Exp(Box::new(a))),
        1 => (0u32..=2, affine_arg()).prop_map(|(order, a)| Expr::Apply { func: Symbol::new("q"), order, arg: Box::new(a) }),
    ];
    base.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::Mul),
            (inner.clone(), 0i32..=3).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
            (inner, prop_oneof![Just("a"), Just("b")]).prop_map(|(e, p)| Expr::Mul(vec![
                e,
                Expr::Pow(Box::new(Expr::Param(Symbol::new(p))), -1)
            ])),
        ]
    })
}

fn bindings() -> impl Strategy<Value = Bindings> {
    let r = || (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()));
    let pos = || (1i64..=6, 1i64..=3).prop_map(|(n, d)| Rational::new(n.into(), d.into()));
    (r(), r(), r(), r(), pos(), pos(), prop::collection::vec(r(), 1..5)).prop_map(|(a, b, t, x, et, ex, q)| {
        let mut bs = Bindings::new();
        bs.set("a", a).set("b", b).set("t", t).set("x", x);
        bs.set_exp("t", et).set_exp("x", ex);
        bs.set_function("q", UnivariatePoly::new(q));
        bs
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn simplify_is_idempotent(e in tree()) {
        let s = simplify(&e).unwrap();
        prop_assert_eq!(simplify(&s).unwrap(), s);
    }

    #[test]
    fn simplify_preserves_values(e in tree(), bs in prop::collection::vec(bindings(), 10)) {
        let s = simplify(&e).unwrap();
        for b in &bs {
            match e.eval(b) {
                Ok(v) => prop_assert_eq!(s.eval(b).unwrap(), v),
                Err(_) => continue,
            }
        }
    }

    #[test]
    fn partials_commute(e in tree()) {
        let s = e.to_scalar().unwrap();
        let (t, x) = (Symbol::new("t"), Symbol::new("x"));
        prop_assert_eq!(s.differentiate(&t).differentiate(&x), s.differentiate(&x).differentiate(&t));
    }

    #[test]
    fn zero_verdict_evaluates_to_zero(e in tree(), seed in 0u64..1000, b in bindings()) {
        let s = e.to_scalar().unwrap();
        let mut asm = Assumptions::new();
        asm.declare("a").declare("b");
        if asm.is_zero(&s, seed).unwrap() == Verdict::Zero {
            if let Ok(v) = e.eval(&b) {
                prop_assert_eq!(v, Rational::from_integer(0.into()));
            }
        }
        if asm.is_zero(&s, seed).unwrap() == Verdict::NonZero {
            if let Ok(v) = s.eval(&b) {
                prop_assert!(v != Rational::from_integer(0.into()));
            }
        }
    }
}
