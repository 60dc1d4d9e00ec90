use chevalley_core::algebra::{builtin, MetricLieAlgebra};
use chevalley_core::calculus::{verify_char, Side};
use chevalley_core::ce::{ce_cohomology, ModuleTag};
use chevalley_core::enveloping::verify_duflo_isomorphism;
use chevalley_core::hochschild::{build_hochschild, verify_at, verify_cor, verify_d0, verify_d0_transport, verify_hkr, AtMap};
use chevalley_core::rational::{q, qi};
use chevalley_core::wilson::{function_from_spec, poly_from_json, unknot_invariant, InvariantFunction};

fn alg(s: &str) -> MetricLieAlgebra {
    builtin(s).unwrap()
}

#[test]
fn cohomology_of_builtins() {
    for name in ["sl2", "so3"] {
        let (_, h) = ce_cohomology(&alg(name), &ModuleTag::Trivial).unwrap();
        assert_eq!(h.dims, vec![1, 0, 0, 1], "{name}");
    }
    let (_, h) = ce_cohomology(&alg("abelian:3"), &ModuleTag::Trivial).unwrap();
    assert_eq!(h.dims, vec![1, 3, 3, 1]);
    // invariants of the coefficients sit in degree 0
    let (_, h) = ce_cohomology(&alg("sl2"), &ModuleTag::Jets(2)).unwrap();
    assert_eq!(h.dims[0], 2);
}

#[test]
fn hochschild_window_so3() {
    let h = build_hochschild(&alg("so3"), 3).unwrap();
    let r = verify_hkr(&h, 3).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(r.negative_control_detected);
    assert_eq!(r.hochschild_homology, r.forms_homology);
    let c = verify_cor(&h);
    assert!(c.passed() && c.negative_control_detected);
    assert!(verify_d0(&h).passed());
    assert!(verify_hkr(&h, 2).is_err());
}

#[test]
fn at_transport_sides() {
    let h = build_hochschild(&alg("sl2"), 3).unwrap();
    let r = verify_at(&h).unwrap();
    assert!(r.passed());
    assert!(r.transport_pairing);
    assert!(r.transport_negative_control_detected);
    for t in &r.transport {
        assert!(t.holds && t.holds_on_all_cycles, "{:?} {:?}", t.map, t.matrix);
    }
    assert!(r.transport.iter().any(|t| t.map == AtMap::Last && t.matrix == Side::Right));
}

#[test]
fn truncated_d0_is_detected_on_oscillator() {
    let h = build_hochschild(&alg("oscillator"), 5).unwrap();
    assert!(verify_d0_transport(&h, 6).mismatches.is_empty());
    assert!(!verify_d0_transport(&h, 0).mismatches.is_empty());
}

#[test]
fn char_identity_on_oscillator() {
    let r = verify_char(&alg("oscillator"), 4);
    assert!(r.passed(), "{r:?}");
    assert!(r.homotopy_blocks > 0);
}

#[test]
fn duflo_isomorphism_so3_and_scaled_metric() {
    let r = verify_duflo_isomorphism(&alg("so3"), 4, 4).unwrap();
    assert!(r.passed());
    assert!(r.negative_control.is_some());
    // rescaling the metric does not change the algebra structure, only the Casimir
    let r = verify_duflo_isomorphism(&alg("sl2:2"), 2, 2).unwrap();
    assert!(r.failures.is_empty() && r.non_central.is_empty());
    assert_eq!(r.casimir_shift, q(1, 16));
}

#[test]
fn unknot_hand_values() {
    for n in 1..=3 {
        let a = alg(&format!("abelian:{n}"));
        let c = function_from_spec(&a, "casimir").unwrap();
        let r = unknot_invariant(&a, &c, 1, 4).unwrap();
        assert_eq!(r.series.coeffs, vec![qi(0), qi(2 * n as i64)]);
    }
    let a = alg("so3");
    let c2 = function_from_spec(&a, "casimir^2").unwrap();
    let r = unknot_invariant(&a, &c2, 3, 10).unwrap();
    assert!(r.oracle_match);
}

#[test]
fn polynomial_files() {
    let a = alg("abelian:2");
    let p = poly_from_json(r#"{"terms":[{"exps":[2,0],"coeff":[1,1]},{"exps":[0,2],"coeff":[1,1]}]}"#, 2).unwrap();
    assert_eq!(p, a.metric_quadratic());
    let f = InvariantFunction::new(&a, p).unwrap();
    assert_eq!(unknot_invariant(&a, &f, 1, 4).unwrap().series.coeffs[1], qi(4));
    assert!(poly_from_json(r#"{"terms":[{"exps":[2],"coeff":[1,1]}]}"#, 2).is_err());
    assert!(poly_from_json(r#"{"terms":[{"exps":[2,0],"coeff":[1,0]}]}"#, 2).is_err());
}
