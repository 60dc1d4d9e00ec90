use chevalley_core::algebra::{builtin, MetricLieAlgebra};
use chevalley_core::calculus::{contract_form, d0_matrix, duflo_character, raise_index};
use chevalley_core::ce::{CeAlgebra, ExtElement, FormElement};
use chevalley_core::enveloping::{duflo_map, invariants_basis, Enveloping};
use chevalley_core::hochschild::Lin;
use chevalley_core::linalg::SparseVec;
use chevalley_core::poly::{Mono, Poly};
use chevalley_core::rational::{from_json, q, qi, to_json};
use chevalley_core::wilson::{function_from_spec, unknot_invariant, InvariantFunction};
use chevalley_core::Q;
use proptest::prelude::*;

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

fn algebra() -> impl Strategy<Value = MetricLieAlgebra> {
    prop::sample::select(vec!["abelian:2", "sl2", "so3", "oscillator", "sl2:1/3"]).prop_map(|s| builtin(s).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), n)
}

fn ext_element(n: usize) -> impl Strategy<Value = ExtElement> {
    prop::collection::vec((0u32..(1 << n), small_q()), 0..6).prop_map(|ts| {
        let mut e = ExtElement::zero();
        for (m, c) in ts {
            e.add_term(m, c);
        }
        e
    })
}

fn mono(n: usize, max: u8) -> impl Strategy<Value = Mono> {
    prop::collection::vec(0..=max, n).prop_map(|e| Mono::from_exps(&e))
}

fn form(n: usize, max: u8) -> impl Strategy<Value = FormElement> {
    prop::collection::vec((0u32..(1 << n), mono(n, max), small_q()), 0..5).prop_map(|ts| {
        let mut f = FormElement::zero();
        for (m, e, c) in ts {
            f.add_term(m, e, c);
        }
        f
    })
}

fn poly(n: usize, max: u8) -> impl Strategy<Value = Poly> {
    prop::collection::vec((mono(n, max), small_q()), 0..4).prop_map(|ts| {
        let mut p = Poly::zero();
        for (m, c) in ts {
            p.add_term(m, c);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_json_round_trip(a in any::<i64>(), b in 1i64..i64::MAX) {
        let x = q(a, b);
        prop_assert_eq!(from_json(&to_json(&x)), Some(x.clone()));
        let big = &x * &x * &x;
        prop_assert_eq!(from_json(&to_json(&big)), Some(big));
    }

    #[test]
    fn sparse_vector_arithmetic(a in vector(8), b in vector(8), f in small_q()) {
        let (va, vb) = (SparseVec::from_dense(&a), SparseVec::from_dense(&b));
        prop_assert_eq!(va.add(&vb).sub(&vb), va.clone());
        prop_assert_eq!(va.add_scaled(&f, &vb).dot(&vb), va.dot(&vb) + &f * vb.dot(&vb));
        prop_assert!(va.sub(&va).is_zero());
        prop_assert_eq!(va.to_dense(8), a);
    }

    #[test]
    fn lin_combinations(ts in prop::collection::vec((0u8..5, small_q()), 0..8)) {
        let mut l: Lin<u8> = Lin::zero();
        for (k, c) in &ts {
            l.add_term(*k, c.clone());
        }
        prop_assert!(l.sub(&l).is_zero());
        prop_assert!(l.terms().all(|(_, c)| *c != qi(0)));
        let doubled = l.map_linear(|k| { let mut x = Lin::basis(*k); x.add_term(*k, qi(1)); x });
        let mut twice = l.clone();
        twice.add_scaled(&qi(1), &l);
        prop_assert_eq!(doubled, twice);
    }

    #[test]
    fn bracket_axioms((alg, x, y, z) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), vector(n), vector(n), vector(n))
    })) {
        let xy = alg.bracket(&x, &y);
        let yx = alg.bracket(&y, &x);
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| (a + b) == qi(0)));
        let j1 = alg.bracket(&x, &alg.bracket(&y, &z));
        let j2 = alg.bracket(&y, &alg.bracket(&z, &x));
        let j3 = alg.bracket(&z, &alg.bracket(&x, &y));
        prop_assert!((0..alg.dim()).all(|k| (&j1[k] + &j2[k] + &j3[k]) == qi(0)));
        prop_assert_eq!(alg.pair(&xy, &z), alg.pair(&x, &alg.bracket(&y, &z)));
    }

    #[test]
    fn ce_differential_squares_to_zero((alg, e) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), ext_element(n))
    })) {
        let ce = CeAlgebra::new(&alg);
        prop_assert!(ce.d_elem(&ce.d_elem(&e)).is_zero());
    }

    #[test]
    fn forms_differential_squares_to_zero((alg, f) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), form(n, 2))
    })) {
        let ce = CeAlgebra::new(&alg);
        prop_assert!(ce.d_form_elem(&ce.d_form_elem(&f)).is_zero());
    }

    #[test]
    fn contraction_is_linear((alg, f, g, c) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), form(n, 2), form(n, 2), small_q())
    })) {
        let t = raise_index(&d0_matrix(&alg, 4, 4), &alg);
        let mut lhs_in = f.clone();
        lhs_in.add_scaled(&c, &g);
        let lhs = contract_form(&t, &lhs_in, 4);
        let mut rhs = contract_form(&t, &f, 4);
        rhs.add_scaled(&c, &contract_form(&t, &g, 4));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pbw_product_is_associative((alg, a, b, c) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), poly(n, 1), poly(n, 1), poly(n, 1))
    })) {
        let u = Enveloping::new(&alg);
        prop_assert_eq!(u.mul(&u.mul(&a, &b), &c), u.mul(&a, &u.mul(&b, &c)));
    }

    #[test]
    fn symmetrization_is_equivariant((alg, s, i) in algebra().prop_flat_map(|a| {
        let n = a.dim();
        (Just(a), poly(n, 2), 0..n)
    })) {
        let u = Enveloping::new(&alg);
        prop_assert_eq!(u.ad_generator(i, &u.symmetrize(&s)), u.symmetrize(&alg.adjoint_on_sym(i, &s)));
    }

    #[test]
    fn series_exp_and_inverse(p in poly(3, 2)) {
        let p = p.sub(&Poly::constant(p.constant_term()));
        let e = p.exp_trunc(5);
        prop_assert_eq!(e.mul_trunc(&p.scale(&qi(-1)).exp_trunc(5), 5), Poly::one());
        prop_assert_eq!(e.mul_trunc(&e.inverse_trunc(5), 5), Poly::one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn duflo_map_is_multiplicative_on_combinations(a in vector(2), b in vector(2)) {
        let alg = builtin("sl2").unwrap();
        let u = Enveloping::new(&alg);
        let ch = duflo_character(&alg, 4);
        // 1 and the quadratic invariant
        let basis: Vec<Poly> = invariants_basis(&alg, 2);
        prop_assert_eq!(basis.len(), 2);
        let comb = |c: &[Q]| basis[0].scale(&c[0]).add(&basis[1].scale(&c[1]));
        let (x, y) = (comb(&a), comb(&b));
        let lhs = u.mul(&duflo_map(&u, &ch, 4, &x).unwrap(), &duflo_map(&u, &ch, 4, &y).unwrap());
        prop_assert_eq!(lhs, duflo_map(&u, &ch, 4, &x.mul(&y)).unwrap());
    }

    #[test]
    fn unknot_is_linear_in_f((alg, a, b) in algebra().prop_flat_map(|a| (Just(a), small_q(), small_q()))) {
        let one = function_from_spec(&alg, "one").unwrap();
        let cas = function_from_spec(&alg, "casimir").unwrap();
        let mix = InvariantFunction::new(&alg, one.poly().scale(&a).add(&cas.poly().scale(&b))).unwrap();
        let r1 = unknot_invariant(&alg, &one, 2, 6).unwrap();
        let r2 = unknot_invariant(&alg, &cas, 2, 6).unwrap();
        let rm = unknot_invariant(&alg, &mix, 2, 6).unwrap();
        prop_assert_eq!(&r1.series.coeffs[0], &qi(1));
        prop_assert!(r1.oracle_match && r2.oracle_match && rm.oracle_match);
        for k in 0..=2 {
            prop_assert_eq!(&rm.series.coeffs[k], &(&a * &r1.series.coeffs[k] + &b * &r2.series.coeffs[k]));
        }
    }
}
