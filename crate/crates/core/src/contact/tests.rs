use super::*;
use crate::assume::Assumptions;
use crate::catalog::{self, CatalogStructure};
use crate::frame::specialize_scalar;
use crate::scalar::{int, parse_expr, Affine, Symbol, SymbolTable};

fn verified(c: &CatalogStructure) -> EpsilonContact {
    verify_epsilon_contact(&c.manifold, &c.alpha, OrientationMode::AsGiven).unwrap()
}

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn r3_scalar(text: &str) -> Scalar {
    let t = SymbolTable::new().with_coords(["t", "x", "y"]).with_funcs(["q"]);
    parse_expr(text, &t).unwrap().to_scalar().unwrap()
}

fn sasnokc_with(constraint: &str) -> EpsilonContact {
    let c = catalog::sl2_sasnokc().unwrap();
    let mut a = Assumptions::new();
    a.assume(constraint).unwrap();
    verified(&CatalogStructure {
        manifold: c.manifold.with_assumptions(a),
        ..c
    })
}

#[test]
fn catalog_epsilons_and_kinds() {
    let expect = [
        ("su2", 1, ContactKind::Riemannian),
        ("sl2-lor", -1, ContactKind::Lorentzian),
        ("sl2-para", 1, ContactKind::Para),
        ("sl2-null", 0, ContactKind::Null),
        ("sl2-sasnokc", 0, ContactKind::Null),
        ("r3-null", 0, ContactKind::Null),
    ];
    for (name, eps, kind) in expect {
        let c = catalog::by_name(name).unwrap().unwrap();
        let st = verified(&c);
        assert_eq!(st.epsilon(), eps, "{name}");
        assert_eq!(st.kind(), kind, "{name}");
    }
}

#[test]
fn identities_hold_on_catalog() {
    for name in catalog::NAMES {
        let st = verified(&catalog::by_name(name).unwrap().unwrap());
        for rep in [st.phi_identities_report().unwrap(), st.reeb_identities_report().unwrap(), st.structure_report().unwrap()] {
            let bad: Vec<_> = rep.failures().map(|c| (c.name, c.residual.witness.as_ref().map(|w| w.value.to_string()))).collect();
            assert!(bad.is_empty(), "{name}: {bad:?}");
        }
        assert_eq!(st.phi_identities_report().unwrap().checks.len(), 6);
    }
}

#[test]
fn orientation_is_load_bearing() {
    let c = catalog::su2().unwrap();
    let flipped = c.manifold.with_orientation(1);
    let err = verify_epsilon_contact(&flipped, &c.alpha, OrientationMode::AsGiven).unwrap_err();
    assert!(matches!(err, ContactError::HodgeMismatch { ref component, .. } if component == "e^1"), "{err}");
    let st = verify_epsilon_contact(&flipped, &c.alpha, OrientationMode::Auto).unwrap();
    assert_eq!(st.manifold().orientation(), -1);
}

#[test]
fn rejections() {
    let c = catalog::su2().unwrap();
    let m = &c.manifold;
    assert!(matches!(
        verify_epsilon_contact(m, &Form::zero(3, 1), OrientationMode::Auto),
        Err(ContactError::Degenerate)
    ));
    assert!(matches!(
        verify_epsilon_contact(m, &c.alpha.scale(&s(2)), OrientationMode::Auto),
        Err(ContactError::NormOutOfRange(_))
    ));
    assert!(matches!(
        verify_epsilon_contact(m, &c.alpha.scale(&Scalar::param("lambda")), OrientationMode::Auto),
        Err(ContactError::NormOutOfRange(_))
    ));
    assert!(matches!(
        verify_epsilon_contact(m, &m.ext_d(&c.alpha), OrientationMode::Auto),
        Err(ContactError::NotOneForm(2))
    ));
    let r = catalog::r3_null().unwrap();
    let x_dt = Form::one_form(vec![r3_scalar("x"), s(0), s(0)]);
    assert!(matches!(
        verify_epsilon_contact(&r.manifold, &x_dt, OrientationMode::Auto),
        Err(ContactError::NormNotConstant(_))
    ));
    let dy = Form::one_form(vec![s(0), s(0), s(1)]);
    assert!(matches!(
        verify_epsilon_contact(&r.manifold, &dy, OrientationMode::Auto),
        Err(ContactError::HodgeMismatch { .. })
    ));
}

#[test]
fn corrupted_alpha_fails_phi_identities() {
    let c = catalog::su2().unwrap();
    let st = EpsilonContact::unchecked(&c.manifold, &c.alpha.scale(&s(2)), 1).unwrap();
    let rep = st.phi_identities_report().unwrap();
    let g = rep.get("g_phi_phi").unwrap();
    assert!(!g.holds());
    assert_eq!(g.residual.verdict, Verdict::NonZero);
    assert!(g.residual.witness.as_ref().unwrap().index.len() == 2);
}

#[test]
fn r3_reeb_and_h() {
    for (c, arg) in [(catalog::r3_null().unwrap(), "x - t"), (catalog::r3_null_reflected().unwrap(), "t - x")] {
        let st = verified(&c);
        let f = r3_scalar(&format!("exp(y)*q({arg})"));
        assert_eq!(st.reeb(), &Vector::new(vec![-&f, -&f, s(0)]));
        let xa = st.reeb().to_tensor().outer(&st.alpha().to_tensor());
        assert_eq!(st.h_tensor(), &xa.scale(&s(-1)));
        assert_eq!(st.null_mu().unwrap(), s(-1));
        assert_eq!(st.is_sasaki().unwrap().verdict, Verdict::NonZero);
        assert_eq!(st.reeb_identities_report().unwrap().get("trace_h").unwrap().residual.verdict, Verdict::Zero);
        let fr = st.find_contact_frame(None).unwrap();
        let half = Scalar::constant(crate::scalar::rat(1, 2)) * f.try_inverse().unwrap();
        assert_eq!(fr.u, Vector::new(vec![half.clone(), -&half, s(0)]));
    }
}

#[test]
fn sasnokc_frame_and_predicates() {
    let st = sasnokc_with("a != 0");
    assert_eq!(st.reeb(), &Vector::basis(3, 0));
    let f = st.find_contact_frame(None).unwrap();
    assert_eq!(f.u, Vector::basis(3, 1));
    assert_eq!(f.phi_u, Vector::basis(3, 2).scale(&s(-1)));
    assert_eq!(st.h_tensor().apply(&Vector::basis(3, 1)), Vector::zero(3));
    assert!(st.is_sasaki().unwrap().is_zero());
    assert_eq!(st.null_mu().unwrap(), s(0));
    let kc = st.is_k_contact().unwrap();
    assert_eq!(kc.verdict, Verdict::NonZero);
    let w = kc.witness.unwrap();
    assert_eq!(w.index, vec![1, 1]);
    assert_eq!(w.value, Scalar::param("a").scale(&int(-2)));
    assert_eq!(st.saskc_criterion(&f).unwrap(), Scalar::param("a"));

    let free = verified(&catalog::sl2_sasnokc().unwrap());
    assert_eq!(free.is_k_contact().unwrap().verdict, Verdict::Unknown);
    let zero = free.manifold().specialize(&[(Symbol::new("a"), int(0))], &[]).unwrap();
    let st0 = verify_epsilon_contact(&zero, free.alpha(), OrientationMode::AsGiven).unwrap();
    assert!(st0.is_k_contact().unwrap().is_zero());
    let f0 = st0.find_contact_frame(None).unwrap();
    assert!(st0.saskc_criterion(&f0).unwrap().is_zero());
}

#[test]
fn saskc_requires_sasaki() {
    let st = verified(&catalog::r3_null().unwrap());
    let f = st.find_contact_frame(None).unwrap();
    assert!(matches!(st.saskc_criterion(&f), Err(ContactError::NotSasaki(Verdict::NonZero))));
    let su = verified(&catalog::su2().unwrap());
    let f = su.find_contact_frame(None).unwrap();
    assert!(matches!(su.saskc_criterion(&f), Err(ContactError::NotNull(1))));
}

#[test]
fn frames_for_nonnull_catalog() {
    for name in ["su2", "sl2-lor", "sl2-para", "sl2-null"] {
        let st = verified(&catalog::by_name(name).unwrap().unwrap());
        let f = st.find_contact_frame(None).unwrap();
        assert!(st.frame_residuals(&f).iter().all(Scalar::is_zero), "{name}");
    }
}

#[test]
fn frame_search_reports_failure() {
    let st = verified(&catalog::sl2_null().unwrap());
    let only_e1 = [Vector::basis(3, 1)];
    assert!(matches!(
        st.find_contact_frame(Some(&only_e1)),
        Err(ContactError::NoFrame { basis: 1, height: 8 })
    ));
}

#[test]
fn phi_squared_signature_classifies() {
    for (name, id, xa_sign) in [("su2", -1, 1), ("sl2-lor", -1, -1), ("sl2-para", 1, -1)] {
        let st = verified(&catalog::by_name(name).unwrap().unwrap());
        let phi2 = st.phi_endo().compose(st.phi_endo());
        let xa = st.reeb().to_tensor().outer(&st.alpha().to_tensor());
        let expect = Tensor::identity(3).scale(&s(id)).add(&xa.scale(&s(xa_sign)));
        assert_eq!(phi2, expect, "{name}");
    }
}

#[test]
fn null_mu_on_sl2_null() {
    let st = verified(&catalog::sl2_null().unwrap());
    let mu = st.null_mu().unwrap();
    let xa = st.reeb().to_tensor().outer(&st.alpha().to_tensor());
    assert_eq!(st.h_tensor(), &xa.scale(&mu));
    assert!(matches!(verified(&catalog::su2().unwrap()).null_mu(), Err(ContactError::NotNull(1))));
}

/// `J P = P J₀` with `P = (ξ, u, φu, ∂_t)` and the constant light-cone matrix `J₀`.
fn assert_light_cone_matrix(st: &EpsilonContact, ej: &ExtendedJ) {
    let f = st.find_contact_frame(None).unwrap();
    let p = ej.manifold();
    let m = st.manifold();
    let cols = [
        p.promote_vector(m, &f.xi).unwrap(),
        p.promote_vector(m, &f.u).unwrap(),
        p.promote_vector(m, &f.phi_u).unwrap(),
        Vector::basis(4, 3),
    ];
    let j0 = [[0, 0, -1, 1], [0, 0, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0]];
    for c in 0..4 {
        let lhs = ej.j().apply(&cols[c]);
        let rhs = (0..4).fold(Vector::zero(4), |acc, r| acc.add(&cols[r].scale(&s(j0[r][c]))));
        assert_eq!(lhs, rhs, "column {c}");
    }
}

#[test]
fn extended_j_on_sasnokc() {
    let st = sasnokc_with("a != 0");
    let ej = st.extend_j().unwrap();
    assert!(ej.square().is_zero());
    assert_light_cone_matrix(&st, &ej);
    assert!(ej.nijenhuis().is_zero());
    assert_eq!(
        ej.rank_data().unwrap(),
        RankData {
            rank_j: Some(2),
            rank_j2: Some(0)
        }
    );
    let k = ej.kernel_involutive().unwrap();
    assert_eq!(k.verdict, Truth::True);
    for v in ej.kernel() {
        assert!(ej.j().apply(v).is_zero());
    }
    let rep = st.sasaki_iff_integrable_report().unwrap();
    assert_eq!(rep.integrable, Truth::True);
    assert_eq!(rep.sasaki, Verdict::Zero);
    assert_eq!(rep.agrees, Some(true));
}

#[test]
fn extended_j_on_r3() {
    let st = verified(&catalog::r3_null().unwrap());
    let ej = st.extend_j().unwrap();
    assert_eq!(ej.manifold().coords()[3].as_str(), "s");
    assert!(ej.square().is_zero());
    assert_light_cone_matrix(&st, &ej);
    let f = st.find_contact_frame(None).unwrap();
    let p = ej.manifold();
    let u = p.promote_vector(st.manifold(), &f.u).unwrap();
    let n = ej.nijenhuis();
    let mut n_u_t = Vector::zero(4);
    for a in 0..4 {
        for k in 0..4 {
            n_u_t = n_u_t.add(&Vector::basis(4, k).scale(&(n.get_ref(&[k, a, 3]) * &u.get(a))));
        }
    }
    let hu = p.promote_vector(st.manifold(), &st.h_tensor().apply(&f.u)).unwrap();
    assert_eq!(n_u_t, hu.scale(&s(-1)));
    assert!(!hu.is_zero());
    // α([ξ,u]) = 0 keeps [ξ, φu + ∂_t] inside span(ξ), so ker J stays
    // involutive even though the structure is not Sasakian.
    let k = ej.kernel_involutive().unwrap();
    assert_eq!(k.verdict, Truth::True);
    let b = &k.brackets[0];
    let xi = &ej.kernel()[0];
    let ratio = b.get(0).div(&xi.get(0)).unwrap();
    assert_eq!(b, &xi.scale(&ratio));
    let rep = st.sasaki_iff_integrable_report().unwrap();
    assert_eq!(rep.kernel.verdict, Truth::True);
    assert_eq!(rep.nijenhuis.verdict, Verdict::NonZero);
    assert_eq!(rep.integrable, Truth::False);
    assert_eq!(rep.agrees, Some(true));
}

#[test]
fn random_v_matches_definition() {
    let st = verified(&catalog::sl2_null().unwrap());
    let ej = st.extend_j().unwrap();
    let v = Vector::new(vec![s(3), s(-2), s(5), s(7)]);
    let jv = ej.j().apply(&v);
    let v3 = Vector::new(v.comps()[..3].to_vec());
    let phi_v = st.phi_endo().apply(&v3).add(&st.reeb().scale(&s(7)));
    for i in 0..3 {
        assert_eq!(jv.get(i), phi_v.get(i));
    }
    let av: Scalar = (0..3).map(|i| &st.alpha().get(&[i]) * &v.get(i)).sum();
    assert_eq!(jv.get(3), av);
}

fn abelian4() -> FrameManifold {
    FrameManifold::builder(&["t", "x", "y", "z"])
        .coordinate_frame(&["t", "x", "y", "z"])
        .diagonal_metric(&[-1, 1, 1, 1])
        .build()
        .unwrap()
}

#[test]
fn zero_j_and_abelian_fixture() {
    let m = abelian4();
    let ej = ExtendedJ::new(m.clone(), Tensor::zeros(4, 1, 1), vec![Vector::basis(4, 0), Vector::basis(4, 1)]);
    assert!(ej.nijenhuis().is_zero());
    assert_eq!(
        ej.rank_data().unwrap(),
        RankData {
            rank_j: Some(0),
            rank_j2: Some(0)
        }
    );
    assert_eq!(ej.zero_deformable().unwrap(), Truth::True);
    assert_eq!(ej.kernel_involutive().unwrap().verdict, Truth::True);
    assert_eq!(ej.is_integrable().unwrap(), Truth::True);
}

#[test]
fn rank_dropping_coefficient_is_unknown() {
    let mut a = Assumptions::new();
    a.declare_function("q", false);
    let m = abelian4().with_assumptions(a);
    let q = Scalar::func("q", 0, Affine::var(Symbol::new("x")).add(&Affine::var(Symbol::new("t")).scale(&int(-1))));
    let mut j = Tensor::zeros(4, 1, 1);
    j.set(&[0, 1], q.clone());
    let ej = ExtendedJ::new(m.clone(), j.clone(), vec![]);
    assert_eq!(ej.rank_data().unwrap().rank_j, None);
    assert_eq!(ej.zero_deformable().unwrap(), Truth::Unknown);
    let mut nz = Assumptions::new();
    nz.declare_function("q", true);
    let ej = ExtendedJ::new(m.with_assumptions(nz), j, vec![]);
    assert_eq!(ej.rank_data().unwrap().rank_j, Some(1));
}

#[test]
fn k_contact_implies_sasaki_on_null_catalog() {
    for name in ["sl2-null", "sl2-sasnokc", "r3-null"] {
        let st = verified(&catalog::by_name(name).unwrap().unwrap());
        let kc = st.is_k_contact().unwrap().verdict;
        if kc == Verdict::Zero {
            assert_eq!(st.is_sasaki().unwrap().verdict, Verdict::Zero, "{name}");
        }
    }
    let base = catalog::sl2_sasnokc().unwrap();
    for v in [-3, -1, 0, 1, 2, 5] {
        let m = base.manifold.specialize(&[(Symbol::new("a"), int(v))], &[]).unwrap();
        let st = verify_epsilon_contact(&m, &base.alpha, OrientationMode::AsGiven).unwrap();
        let kc = st.is_k_contact().unwrap().verdict;
        assert!(st.is_sasaki().unwrap().is_zero());
        assert_eq!(kc == Verdict::Zero, v == 0);
    }
    let base = catalog::sl2_null().unwrap();
    for v in [-2, 1, 3] {
        let vals = [(Symbol::new("alpha0"), int(v))];
        let m = base.manifold.specialize(&vals, &[]).unwrap();
        let alpha = base.alpha.try_map(|c| specialize_scalar(c, &vals, &[])).unwrap();
        let st = verify_epsilon_contact(&m, &alpha, OrientationMode::AsGiven).unwrap();
        if st.is_k_contact().unwrap().is_zero() {
            assert!(st.is_sasaki().unwrap().is_zero());
        }
    }
}

#[test]
fn height_enumeration() {
    let hs = rationals_by_height(2);
    assert_eq!(hs.len(), 7);
    assert_eq!(hs[0], int(0));
    let tuples: Vec<_> = HeightTuples::new(&hs, 2).collect();
    assert_eq!(tuples.len(), 49);
    assert_eq!(tuples[0], vec![int(0), int(0)]);
    let mut seen = tuples.clone();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 49);
    assert_eq!(HeightTuples::new(&hs, 0).count(), 1);
}

