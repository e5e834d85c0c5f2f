use proptest::prelude::*;

use famalg::algebra_core::{
    adjoint_bimodule, coadjoint_bimodule, cocycle_extension, semidirect_product, Algebra, Bimodule, Cocycle2,
};
use famalg::catalog;
use famalg::coalgebra_dual::{check_twisted_o_cofamily, induce_ns_cofamily, CoContext};
use famalg::cohomology::{delta_nsfam, delta_twooperf, Cochain};
use famalg::deformation::{
    apply_equivalence, check_family_deformation, check_ns_deformation, compose_equivalences, EquivalenceData,
    TruncatedFamilyDeformation, TruncatedNSDeformation,
};
use famalg::family_algebras::{induce_ns_family, validate_dendriform_family, validate_ns_family, NsFamily, NsSource};
use famalg::family_ops::{
    check_nijenhuis_family, check_reynolds_family, check_rota_baxter_family, check_twisted_o_family, collapse_family,
    graph_subalgebra_check, lifted_context, OperatorFamily, TwistedContext,
};
use famalg::semigroup::FiniteSemigroup;
use famalg::yang_baxter::{check_aybe, check_aybf_type1, check_aybf_type2, rb_family_from_aybf1, TensorFamily};
use famalg::{Matrix, Scalar, Tensor3};

fn small_algebras() -> Vec<Algebra> {
    vec![
        catalog::field(),
        Algebra::zero(1),
        Algebra::zero(2),
        catalog::two_dim_left_unit(),
        catalog::nilpotent_x(),
        catalog::dual_numbers(),
        catalog::diagonal2(),
    ]
}

fn small_semigroups() -> Vec<FiniteSemigroup> {
    vec![
        FiniteSemigroup::trivial(),
        FiniteSemigroup::cyclic(2),
        FiniteSemigroup::left_zero(2),
        FiniteSemigroup::right_zero(2),
        FiniteSemigroup::mult_mod(2),
    ]
}

/// `(algebra, bimodule, cocycle)` choices: adjoint, coadjoint, adjoint with `−μ`.
fn base(ai: usize, mi: usize) -> (Algebra, Bimodule, Option<Cocycle2>) {
    let a = small_algebras()[ai].clone();
    match mi {
        0 => (a.clone(), adjoint_bimodule(&a), None),
        1 => (a.clone(), coadjoint_bimodule(&a), None),
        _ => (a.clone(), adjoint_bimodule(&a), Some(Cocycle2::multiplication(&a).scale(&Scalar::int(-1)))),
    }
}

fn family(s: &FiniteSemigroup, rows: usize, cols: usize, entries: &[i64]) -> OperatorFamily {
    let mut it = entries.iter().cycle();
    let maps = (0..s.size())
        .map(|_| {
            let mut m = Matrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, Scalar::int(*it.next().unwrap()));
                }
            }
            m
        })
        .collect();
    OperatorFamily::new(s.clone(), maps).unwrap()
}

/// Entries biased towards zero so that valid families show up.
fn entries() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![4 => Just(0i64), 2 => Just(1), 1 => Just(-1), 1 => Just(2)], 8)
}

fn instance() -> impl Strategy<Value = (Algebra, Bimodule, Option<Cocycle2>, OperatorFamily)> {
    (0..small_algebras().len(), 0..3usize, 0..small_semigroups().len(), entries()).prop_map(|(ai, mi, si, e)| {
        let (a, m, h) = base(ai, mi);
        let s = small_semigroups()[si].clone();
        let t = family(&s, a.dim(), m.module_dim(), &e);
        (a, m, h, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lift_and_graph_equivalences((a, m, h, t) in instance()) {
        let direct = check_twisted_o_family(&t, &a, &m, None).unwrap().passed();
        let (big, lifted) = lifted_context(&t, &a, &m).unwrap();
        prop_assert_eq!(direct, check_rota_baxter_family(&lifted, &big).unwrap().passed());
        prop_assert_eq!(direct, check_nijenhuis_family(&lifted, &big).unwrap().passed());
        let twisted = check_twisted_o_family(&t, &a, &m, h.as_ref()).unwrap().passed();
        prop_assert_eq!(twisted, graph_subalgebra_check(&t, &a, &m, h.as_ref()).unwrap().passed());
    }

    #[test]
    fn valid_families_collapse_and_induce((a, m, h, t) in instance()) {
        prop_assume!(check_twisted_o_family(&t, &a, &m, h.as_ref()).unwrap().passed());
        prop_assert!(collapse_family(&t, &a, &m, h.as_ref(), t.semigroup()).is_ok());
        let ns = induce_ns_family(NsSource::TwistedO { t: &t, a: &a, m: &m, h: h.as_ref() }).unwrap();
        prop_assert!(validate_ns_family(&ns).passed());
        if h.is_none() {
            prop_assert!(ns.is_dendriform());
            prop_assert!(validate_dendriform_family(&ns.to_dendriform().unwrap()).passed());
        }
    }

    #[test]
    fn reynolds_is_the_negative_multiplication_twist(ai in 0..7usize, si in 0..5usize, e in entries()) {
        let a = small_algebras()[ai].clone();
        let s = small_semigroups()[si].clone();
        let r = family(&s, a.dim(), a.dim(), &e);
        let h = Cocycle2::multiplication(&a).scale(&Scalar::int(-1));
        prop_assert_eq!(
            check_reynolds_family(&r, &a).unwrap().passed(),
            check_twisted_o_family(&r, &a, &adjoint_bimodule(&a), Some(&h)).unwrap().passed()
        );
    }

    #[test]
    fn semidirect_product_restricts_to_the_algebra(ai in 0..7usize, mi in 0..2usize) {
        let (a, m, _) = base(ai, mi);
        let p = semidirect_product(&a, &m, None).unwrap();
        prop_assert!(p.validate().passed());
        let d = a.dim();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(&p.mul_basis(i, j)[..d], a.mul_basis(i, j));
                prop_assert!(p.mul_basis(i, j)[d..].iter().all(Scalar::is_zero));
            }
        }
    }

    #[test]
    fn cocycle_extensions_validate(ai in 0..7usize, si in 0..5usize, c in -2i64..=2) {
        let a = small_algebras()[ai].clone();
        let s = small_semigroups()[si].clone();
        let m = adjoint_bimodule(&a);
        let h = Cocycle2::multiplication(&a).scale(&Scalar::int(c));
        prop_assert!(h.validate(&a, &m).unwrap().passed());
        let (ea, em) = famalg::algebra_core::extend_by_semigroup(&a, Some(&m), &s).unwrap();
        prop_assert!(cocycle_extension(&h, &s).validate(&ea, &em.unwrap()).unwrap().passed());
    }

    #[test]
    fn constant_yang_baxter_types_agree(ai in 0..7usize, e in entries()) {
        let a = small_algebras()[ai].clone();
        let d = a.dim();
        let r = family(&FiniteSemigroup::trivial(), d, d, &e).map(0).clone();
        let rf = TensorFamily::constant(FiniteSemigroup::trivial(), r.clone()).unwrap();
        let one = check_aybf_type1(&rf, &a).unwrap().passed();
        prop_assert_eq!(one, check_aybf_type2(&rf, &a).unwrap().passed());
        prop_assert_eq!(one, check_aybe(&r, &a).unwrap().passed());
    }

    #[test]
    fn type_one_solutions_give_rota_baxter_families(ai in 0..7usize, si in 0..5usize, e in entries()) {
        let a = small_algebras()[ai].clone();
        let s = small_semigroups()[si].clone();
        let rf = TensorFamily::new(s.clone(), family(&s, a.dim(), a.dim(), &e).maps().to_vec()).unwrap();
        if check_aybf_type1(&rf, &a).unwrap().passed() {
            let r = rb_family_from_aybf1(&rf, &a).unwrap();
            prop_assert!(check_rota_baxter_family(&r, &a).unwrap().passed());
        }
    }

    #[test]
    fn order_one_equation_is_the_cocycle_condition(ai in 0..7usize, mi in 0..3usize, si in 0..5usize, e in entries()) {
        let (a, m, h) = base(ai, mi);
        let s = small_semigroups()[si].clone();
        // Id_α is valid for the −μ twist; otherwise start from T = 0.
        let t0 = if h.is_some() { OperatorFamily::identity(s.clone(), a.dim()) } else { OperatorFamily::zero(s.clone(), m.module_dim(), a.dim()) };
        let ctx = TwistedContext::new(a.clone(), m.clone(), h, t0).unwrap();
        prop_assert!(ctx.check().passed());
        let t1 = family(&s, a.dim(), m.module_dim(), &e);
        let d = TruncatedFamilyDeformation::first_order(ctx.clone(), t1.clone()).unwrap();
        let order1 = check_family_deformation(&d).unwrap().orders[1].passed();
        prop_assert_eq!(order1, delta_twooperf(&ctx, &Cochain::from_family(&t1)).unwrap().is_zero());
    }

    #[test]
    fn ns_order_one_equation_is_the_cocycle_condition(ai in 0..7usize, rescale in any::<bool>(), e in prop::collection::vec(-1i64..=1, 24)) {
        let a = small_algebras()[ai].clone();
        let s = FiniteSemigroup::trivial();
        let base = induce_ns_family(NsSource::Nijenhuis { n: &OperatorFamily::identity(s.clone(), a.dim()), a: &a }).unwrap();
        let pi1 = if rescale {
            Cochain::from_ns_family(&base)
        } else {
            let d = a.dim();
            let mut it = e.iter().cycle();
            let mut next = || {
                let mut t = Tensor3::zeros(d, d, d);
                for i in 0..d { for j in 0..d { for k in 0..d { t.set(i, j, k, Scalar::int(*it.next().unwrap())); } } }
                t
            };
            let (p, q, v) = (next(), next(), next());
            Cochain::from_ns_family(&NsFamily::new(s.clone(), vec![p], vec![q], vec![v]).unwrap())
        };
        let d = TruncatedNSDeformation::first_order(base.clone(), &pi1).unwrap();
        let order1 = check_ns_deformation(&d).unwrap().orders[1].passed();
        prop_assert_eq!(order1, delta_nsfam(&base, &pi1).unwrap().is_zero());
        if rescale {
            prop_assert!(order1);
        }
    }

    #[test]
    fn equivalences_compose(ai in 0..7usize, si in 0..5usize, t1 in -2i64..=2, t2 in -2i64..=2, e in entries()) {
        let a = small_algebras()[ai].clone();
        let s = small_semigroups()[si].clone();
        let m = adjoint_bimodule(&a);
        let t = family(&s, a.dim(), a.dim(), &e);
        prop_assume!(check_twisted_o_family(&t, &a, &m, None).unwrap().passed());
        let ctx = TwistedContext::new(a.clone(), m, None, t).unwrap();
        let theta = |c: i64| (0..a.dim()).map(|i| Scalar::int(c * (i as i64 + 1))).collect::<Vec<_>>();
        let d = TruncatedFamilyDeformation::constant(ctx.clone(), 2);
        let e1 = EquivalenceData::exponential(&ctx, theta(t1), 2).unwrap();
        let e2 = EquivalenceData::exponential(&ctx, theta(t2), 2).unwrap();
        let stepwise = apply_equivalence(&apply_equivalence(&d, &e1).unwrap(), &e2).unwrap();
        let composite = apply_equivalence(&d, &compose_equivalences(&ctx, &e1, &e2, 2).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composite);
    }

    #[test]
    fn duality_preserves_validity((a, m, h, t) in instance()) {
        let ctx = TwistedContext::new(a.clone(), m.clone(), h.clone(), t.clone()).unwrap();
        let co = CoContext::dual_of(&ctx);
        let valid = check_twisted_o_family(&t, &a, &m, h.as_ref()).unwrap().passed();
        prop_assert_eq!(valid, check_twisted_o_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, co.cocycle.as_ref()).unwrap().passed());
        prop_assert_eq!(co.dualize().unwrap(), ctx.clone());
        if valid {
            let nsc = induce_ns_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, co.cocycle.as_ref()).unwrap();
            prop_assert_eq!(nsc.dualize(), induce_ns_family(NsSource::from_context(&ctx)).unwrap());
        }
    }
}
