//! Runs the requested checks in dependency order and assembles the report.

use chevalley_core::algebra::MetricLieAlgebra;
use chevalley_core::calculus::{
    bernoulli, duflo_character, exponential_differential, invariant_field_matrix, jacobian_series, verify_char, Side,
};
use chevalley_core::ce::{ce_cohomology, ce_module_complex, CoefficientModule, ModuleTag};
use chevalley_core::enveloping::verify_duflo_isomorphism;
use chevalley_core::hochschild::{build_hochschild, verify_at, verify_cor, verify_d0, verify_hkr, HochschildComplex};
use chevalley_core::poly::{Poly, PolyMatrix};
use chevalley_core::rational::{binomial, to_json};
use chevalley_core::wilson::{unknot_invariant, InvariantFunction};
use serde_json::{json, Value};

use crate::config::{Check, SuiteConfig};
use crate::report::{human, CheckResult, Kind, Report, Status, TOOL};
use crate::UsageError;

fn result(check: Check, kind: Kind, ok: bool, summary: String, window: Value, witnesses: Vec<Value>, values: Value) -> CheckResult {
    CheckResult {
        name: check.name().into(),
        kind,
        status: if ok { Status::Pass } else { Status::Fail },
        summary,
        window,
        witnesses,
        values,
    }
}

fn poly_terms(p: &Poly, alg: &MetricLieAlgebra) -> Value {
    Value::Array(p.render(alg.dim(), alg.basis_names()).iter().map(|(m, c)| json!([m, to_json(c)])).collect())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("core reports serialize")
}

/// Validates the config, then runs every requested check. A failed invariant
/// check marks all later checks as skipped.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, UsageError> {
    let prep = config.validate()?;
    let alg = &prep.alg;
    let mut checks = Vec::new();
    let mut aborted: Option<String> = None;
    let mut hoch: Option<HochschildComplex> = None;

    let mut order = vec![Check::Validate];
    order.extend(config.checks.iter().copied().filter(|c| *c != Check::Validate));

    for check in order {
        if let Some(a) = &aborted {
            let kind = if check == Check::Validate { Kind::Invariant } else { Kind::Identity };
            checks.push(CheckResult::skipped(check.name(), kind, &format!("aborted after {a}")));
            continue;
        }
        let r = match check {
            Check::Validate => validate_check(alg, &config.validate_modules),
            Check::Ce => ce_check(alg, &config.ce_module),
            c if c.is_hochschild() => {
                if hoch.is_none() {
                    match build_hochschild(alg, config.max_len) {
                        Ok(h) => hoch = Some(h),
                        Err(e) => {
                            let r = result(
                                c,
                                Kind::Invariant,
                                false,
                                format!("window complex failed: {e}"),
                                json!({ "max_len": config.max_len }),
                                vec![json!(e.to_string())],
                                Value::Null,
                            );
                            aborted = Some(r.name.clone());
                            checks.push(r);
                            continue;
                        }
                    }
                }
                hochschild_check(c, hoch.as_ref().expect("built above"), config)
            }
            Check::Oracle => oracle_check(alg, config.jets),
            Check::Char => char_check(alg, config.jets),
            Check::Iso => iso_check(alg, config.degree, config.jets),
            Check::Wilson => wilson_check(alg, prep.function.as_ref().expect("validated"), config),
            _ => unreachable!(),
        };
        if r.kind == Kind::Invariant && r.status == Status::Fail {
            aborted = Some(r.name.clone());
        }
        checks.push(r);
    }

    let status = if checks.iter().all(|c| c.status == Status::Pass) { Status::Pass } else { Status::Fail };
    Ok(Report {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: config.command.clone(),
        config: config.echo(),
        status,
        aborted_after: aborted,
        checks,
    })
}

fn validate_check(alg: &MetricLieAlgebra, modules: &[ModuleTag]) -> CheckResult {
    let v = alg.validate();
    let mut witnesses: Vec<Value> = v.failed().iter().map(|c| to_value(c)).collect();
    let mut d2 = serde_json::Map::new();
    let mut dims = serde_json::Map::new();
    let mut modules = modules.to_vec();
    if !modules.contains(&ModuleTag::Trivial) {
        modules.insert(0, ModuleTag::Trivial);
    }
    let mut complexes_ok = true;
    for tag in &modules {
        let m = CoefficientModule::for_tag(alg, tag);
        match ce_module_complex(alg, &m) {
            Ok(cx) => {
                d2.insert(tag.label(), json!(true));
                dims.insert(tag.label(), json!(cx.complex.dims()));
            }
            Err(e) => {
                complexes_ok = false;
                d2.insert(tag.label(), json!(false));
                witnesses.push(json!({ "module": tag.label(), "error": e.to_string() }));
            }
        }
    }
    let ok = v.passed() && complexes_ok;
    let labels: Vec<String> = modules.iter().map(|m| m.label()).collect();
    let summary = if ok {
        format!("axioms hold; d^2 = 0 on {}", labels.join(", "))
    } else {
        format!("{} axiom failure(s); d^2 = 0 {}", v.failed().len(), if complexes_ok { "holds" } else { "fails" })
    };
    result(
        Check::Validate,
        Kind::Invariant,
        ok,
        summary,
        json!({ "modules": labels }),
        witnesses,
        json!({
            "dim": alg.dim(),
            "abelian": alg.is_abelian(),
            "axioms": v.checks.iter().map(|c| json!([c.axiom, c.passed])).collect::<Vec<_>>(),
            "d_squared_zero": d2,
            "cochain_dims": dims,
        }),
    )
}

fn alternating(xs: &[usize]) -> i64 {
    xs.iter().enumerate().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
}

fn ce_check(alg: &MetricLieAlgebra, tag: &ModuleTag) -> CheckResult {
    let window = json!({ "module": tag.label() });
    let (cx, coh) = match ce_cohomology(alg, tag) {
        Ok(x) => x,
        Err(e) => {
            return result(
                Check::Ce,
                Kind::Invariant,
                false,
                format!("complex failed: {e}"),
                window,
                vec![json!(e.to_string())],
                Value::Null,
            )
        }
    };
    let euler_cochains = alternating(cx.complex.dims());
    let euler_cohomology = alternating(&coh.dims);
    let mut witnesses = Vec::new();
    if euler_cochains != euler_cohomology {
        witnesses.push(json!({ "euler_cochains": euler_cochains, "euler_cohomology": euler_cohomology }));
    }
    // with trivial coefficients an abelian algebra has zero differential
    let expected: Option<Vec<usize>> = (alg.is_abelian() && *tag == ModuleTag::Trivial)
        .then(|| (0..=alg.dim()).map(|k| binomial(alg.dim(), k).to_integer().try_into().expect("small binomial")).collect());
    if let Some(e) = &expected {
        if *e != coh.dims {
            witnesses.push(json!({ "expected": e, "found": coh.dims }));
        }
    }
    result(
        Check::Ce,
        Kind::Identity,
        witnesses.is_empty(),
        format!("H^* dims {:?} with {} coefficients", coh.dims, tag.label()),
        window,
        witnesses,
        json!({
            "cochain_dims": cx.complex.dims(),
            "cohomology_dims": coh.dims,
            "euler_characteristic": euler_cohomology,
            "expected": expected,
        }),
    )
}

fn hochschild_check(check: Check, h: &HochschildComplex, config: &SuiteConfig) -> CheckResult {
    let l = config.max_len;
    let window = json!({ "max_len": l, "jets": config.jets, "chain_dims": h.dims() });
    match check {
        Check::Hkr => match verify_hkr(h, config.jets) {
            Ok(r) => {
                let w = r.witness.iter().map(to_value).collect();
                let summary = format!(
                    "HH dims {:?}, forms dims {:?}, chain map {}, sign control detected {}",
                    r.hochschild_homology, r.forms_homology, r.chain_map, r.negative_control_detected
                );
                result(check, Kind::Identity, r.passed(), summary, window, w, to_value(&r))
            }
            Err(e) => result(check, Kind::Identity, false, e.to_string(), window, vec![json!(e.to_string())], Value::Null),
        },
        Check::Cor => {
            let r = verify_cor(h);
            let w = r.infeasible.iter().map(|(d, i)| json!({ "degree": d, "class": i })).collect();
            let summary = format!(
                "{}/{} classes have degree-1 representatives, control detected {}",
                r.represented, r.classes, r.negative_control_detected
            );
            result(check, Kind::Identity, r.passed(), summary, window, w, to_value(&r))
        }
        Check::D0 => {
            let r = verify_d0(h);
            let mut w: Vec<Value> = Vec::new();
            if let Some(x) = &r.associativity_witness {
                w.push(json!({ "associativity": x }));
            }
            if let Some(x) = &r.epsilon_witness {
                w.push(json!({ "epsilon_extraction": x }));
            }
            if let Some(x) = &r.anticommutator_witness {
                w.push(json!({ "anticommutator": x }));
            }
            for (t, i) in &r.transport.mismatches {
                w.push(json!({ "transport": { "degree": t, "class": i } }));
            }
            let summary = format!(
                "epsilon product associative {}, extraction = d0 {}, transport {}/{} classes",
                r.epsilon_associative,
                r.epsilon_matches_d0,
                r.transport.classes - r.transport.mismatches.len(),
                r.transport.classes
            );
            let mut window = window;
            window["transport_max_weight"] = json!(l.saturating_sub(3));
            result(check, Kind::Identity, r.passed(), summary, window, w, to_value(&r))
        }
        Check::At => match verify_at(h) {
            Ok(r) => {
                let w = r.first_witness.iter().chain(r.last_witness.iter()).map(to_value).collect();
                let summary = format!(
                    "first map chain map {}, last map chain map {}, transport pairing {}",
                    r.first_chain_map, r.last_chain_map, r.transport_pairing
                );
                result(check, Kind::Identity, r.passed(), summary, window, w, to_value(&r))
            }
            Err(e) => result(check, Kind::Invariant, false, e.to_string(), window, vec![json!(e.to_string())], Value::Null),
        },
        _ => unreachable!(),
    }
}

fn oracle_check(alg: &MetricLieAlgebra, order: usize) -> CheckResult {
    let id = PolyMatrix::identity(alg.dim());
    let mut witnesses = Vec::new();
    let mut sides = serde_json::Map::new();
    for side in [Side::Left, Side::Right] {
        let p = invariant_field_matrix(side, alg, order).mul_trunc(&exponential_differential(side, alg, order), order);
        let ok = p == id;
        if !ok {
            witnesses.push(json!({ "side": side, "identity": "invariant_field" }));
        }
        sides.insert(to_value(&side).as_str().expect("side name").to_string(), json!(ok));
    }
    let ch = duflo_character(alg, order);
    let square = ch.mul_trunc(&ch, order);
    let jac = jacobian_series(alg, order);
    let square_ok = square == jac;
    if !square_ok {
        witnesses.push(json!({ "identity": "character_square" }));
    }
    let trivial_ok = !alg.is_abelian() || ch == Poly::one();
    if !trivial_ok {
        witnesses.push(json!({ "identity": "abelian_character" }));
    }
    let ok = witnesses.is_empty();
    result(
        Check::Oracle,
        Kind::Identity,
        ok,
        format!("invariant-field inverse and character square through jet degree {order}: {}", if ok { "exact" } else { "mismatch" }),
        json!({ "order": order }),
        witnesses,
        json!({
            "bernoulli": bernoulli(order).iter().map(to_json).collect::<Vec<_>>(),
            "invariant_field_inverse": sides,
            "character_square_is_jacobian": square_ok,
            "character": poly_terms(&ch, alg),
            "jacobian": poly_terms(&jac, alg),
        }),
    )
}

fn char_check(alg: &MetricLieAlgebra, order: usize) -> CheckResult {
    let r = verify_char(alg, order);
    let mut w: Vec<Value> = Vec::new();
    for c in r.commutator_identities.iter().filter(|c| !c.holds) {
        w.push(json!({ "commutator_n": c.n, "at": c.witness }));
    }
    if let Some(x) = r.exact_identity_witness {
        w.push(json!({ "homotopy_identity": x }));
    }
    if let Some(x) = r.infeasible_block {
        w.push(json!({ "infeasible_block": x }));
    }
    let summary = format!(
        "commutator identities n=1,2 {}, Phi = [D, K] {}, {} homotopy blocks feasible {}",
        r.commutator_identities.iter().all(|c| c.holds),
        r.exact_identity_holds,
        r.homotopy_blocks,
        r.homotopy_feasible
    );
    result(
        Check::Char,
        Kind::Identity,
        r.passed(),
        summary,
        json!({ "exact_max_jet": order, "operator_max_jet": order + 1 }),
        w,
        to_value(&r),
    )
}

fn iso_check(alg: &MetricLieAlgebra, degree: usize, order: usize) -> CheckResult {
    let window = json!({ "degree": degree, "order": order });
    match verify_duflo_isomorphism(alg, degree, order) {
        Ok(r) => {
            let mut w: Vec<Value> = r.failures.iter().map(to_value).collect();
            w.extend(r.non_central.iter().map(|i| json!({ "non_central": i })));
            let summary = format!(
                "{} invariants, {} products multiplicative, casimir shift {}, plain PBW defect {}",
                r.invariants.len(),
                r.pairs_checked - r.failures.len(),
                human(&r.casimir_shift),
                if r.negative_control.is_some() { "nonzero" } else { "zero" }
            );
            result(Check::Iso, Kind::Identity, r.passed(), summary, window, w, to_value(&r))
        }
        Err(e) => result(Check::Iso, Kind::Identity, false, e.to_string(), window, vec![json!(e.to_string())], Value::Null),
    }
}

fn wilson_check(alg: &MetricLieAlgebra, f: &InvariantFunction, config: &SuiteConfig) -> CheckResult {
    let window = json!({ "h_order": config.h_order, "jets": config.jets, "function": config.function });
    match unknot_invariant(alg, f, config.h_order, config.jets) {
        Ok(r) => {
            let coeffs: Vec<String> = r.series.coeffs.iter().map(human).collect();
            let w = if r.oracle_match {
                Vec::new()
            } else {
                vec![json!({ "oracle": r.oracle.coeffs.iter().map(to_json).collect::<Vec<_>>() })]
            };
            result(
                Check::Wilson,
                Kind::Identity,
                r.oracle_match,
                format!("coefficients [{}], oracle match {}", coeffs.join(", "), r.oracle_match),
                window,
                w,
                json!({
                    "coefficients": r.series.coeffs.iter().map(to_json).collect::<Vec<_>>(),
                    "oracle": r.oracle.coeffs.iter().map(to_json).collect::<Vec<_>>(),
                    "oracle_match": r.oracle_match,
                }),
            )
        }
        Err(e) => result(Check::Wilson, Kind::Identity, false, e.to_string(), window, vec![json!(e.to_string())], Value::Null),
    }
}
