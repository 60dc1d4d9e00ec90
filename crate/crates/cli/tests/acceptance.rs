//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use chevalley::{run_suite, Check, SuiteConfig};
use chevalley_core::algebra::{builtin, MetricLieAlgebra};
use chevalley_core::calculus::{
    check_commutator_identity, duflo_character, exponential_differential, invariant_field_matrix, jacobian_series, verify_char, Side,
};
use chevalley_core::ce::{ce_cohomology, ce_module_complex, CoefficientModule, ModuleTag};
use chevalley_core::enveloping::verify_duflo_isomorphism;
use chevalley_core::hochschild::{build_hochschild, verify_at, verify_cor, verify_d0, verify_d0_transport, verify_hkr, HochschildComplex};
use chevalley_core::poly::{Poly, PolyMatrix};
use chevalley_core::rational::{binomial, qi};
use chevalley_core::wilson::{function_from_spec, required_order, unknot_invariant};

type Outcome = Result<String, String>;

const BUILTINS: [&str; 6] = ["abelian:1", "abelian:2", "abelian:3", "sl2", "so3", "oscillator"];
const NONABELIAN: [&str; 3] = ["sl2", "so3", "oscillator"];

fn alg(s: &str) -> MetricLieAlgebra {
    builtin(s).expect("builtin")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sl2_window() -> HochschildComplex {
    build_hochschild(&alg("sl2"), 3).expect("sl2 window")
}

fn axioms_and_complexes() -> Outcome {
    for name in BUILTINS {
        let a = alg(name);
        ensure(a.validate().passed(), format!("{name}: axioms"))?;
        for tag in [ModuleTag::Trivial, ModuleTag::Jets(6), ModuleTag::Uea(4)] {
            ce_module_complex(&a, &CoefficientModule::for_tag(&a, &tag)).map_err(|e| format!("{name} {}: {e}", tag.label()))?;
        }
    }
    Ok("6 algebras x {trivial, jets:6, uea:4}".into())
}

fn ce_dims() -> Outcome {
    for name in ["sl2", "so3"] {
        let (_, h) = ce_cohomology(&alg(name), &ModuleTag::Trivial).map_err(|e| e.to_string())?;
        ensure(h.dims == [1, 0, 0, 1], format!("{name}: {:?}", h.dims))?;
    }
    for n in 1..=3 {
        let (_, h) = ce_cohomology(&alg(&format!("abelian:{n}")), &ModuleTag::Trivial).map_err(|e| e.to_string())?;
        let want: Vec<usize> = (0..=n).map(|k| binomial(n, k).to_integer().try_into().unwrap()).collect();
        ensure(h.dims == want, format!("abelian:{n}: {:?}", h.dims))?;
    }
    Ok("sl2, so3 (1,0,0,1); abelian binomial".into())
}

fn hkr() -> Outcome {
    let r = verify_hkr(&sl2_window(), 4).map_err(|e| e.to_string())?;
    ensure(r.chain_map, format!("not a chain map: {:?}", r.witness))?;
    ensure(r.dims_match && r.induced_isomorphism, format!("{:?} vs {:?}", r.hochschild_homology, r.forms_homology))?;
    ensure(r.negative_control_detected, "sign control not detected")?;
    Ok(format!("homology {:?} on both sides", r.hochschild_homology))
}

fn cor() -> Outcome {
    let r = verify_cor(&sl2_window());
    ensure(r.passed(), format!("{r:?}"))?;
    ensure(r.negative_control_detected, "corrupted-boundary control not detected")?;
    Ok(format!("{}/{} classes", r.represented, r.classes))
}

fn at_maps() -> Outcome {
    let r = verify_at(&sl2_window()).map_err(|e| e.to_string())?;
    ensure(r.first_chain_map, format!("first: {:?}", r.first_witness))?;
    ensure(r.last_chain_map, format!("last: {:?}", r.last_witness))?;
    Ok(format!("bimodule dims {:?}", r.bimodule_dims))
}

fn at_transport() -> Outcome {
    let r = verify_d0(&sl2_window());
    ensure(r.transport.classes > 0, "no classes in the transport window")?;
    ensure(r.transport.mismatches.is_empty(), format!("mismatches {:?}", r.transport.mismatches))?;
    ensure(r.epsilon_matches_d0, format!("extraction differs on {:?}", r.epsilon_witness))?;
    ensure(r.epsilon_associative && r.moyal_matches_bracket, "epsilon product")?;
    // the check can tell a truncated operator apart on a larger window
    let osc = build_hochschild(&alg("oscillator"), 5).map_err(|e| e.to_string())?;
    ensure(!verify_d0_transport(&osc, 0).mismatches.is_empty(), "truncated operator not rejected")?;
    Ok(format!("{} classes, extraction = d0 on every basis chain", r.transport.classes))
}

fn invariant_field_oracle() -> Outcome {
    for name in NONABELIAN {
        let a = alg(name);
        for side in [Side::Left, Side::Right] {
            let p = invariant_field_matrix(side, &a, 6).mul_trunc(&exponential_differential(side, &a, 6), 6);
            ensure(p == PolyMatrix::identity(a.dim()), format!("{name} {side:?}"))?;
        }
    }
    Ok("sl2, so3, oscillator through degree 6".into())
}

fn character_oracle() -> Outcome {
    for name in NONABELIAN {
        let a = alg(name);
        let j = duflo_character(&a, 6);
        ensure(j.mul_trunc(&j, 6) == jacobian_series(&a, 6), name)?;
    }
    for n in 1..=3 {
        ensure(duflo_character(&alg(&format!("abelian:{n}")), 6) == Poly::one(), format!("abelian:{n}"))?;
    }
    Ok("square = det series; abelian 1".into())
}

fn char_identity() -> Outcome {
    let mut blocks = Vec::new();
    for name in NONABELIAN {
        let a = alg(name);
        for n in 1..=2 {
            let c = check_commutator_identity(&a, 6, n);
            ensure(c.holds, format!("{name} n={n}: {:?}", c.witness))?;
        }
        let r = verify_char(&a, 6);
        ensure(r.exact_identity_holds, format!("{name}: {:?}", r.exact_identity_witness))?;
        ensure(r.passed(), format!("{name}: {r:?}"))?;
        blocks.push(r.homotopy_blocks);
    }
    Ok(format!("n = 1, 2 and Phi = [D, K] at N = 6; homotopy blocks {blocks:?}"))
}

fn duflo_iso() -> Outcome {
    let mut shifts = Vec::new();
    for name in ["sl2", "so3"] {
        let r = verify_duflo_isomorphism(&alg(name), 4, 4).map_err(|e| e.to_string())?;
        ensure(r.failures.is_empty(), format!("{name}: {} defects", r.failures.len()))?;
        ensure(r.non_central.is_empty(), format!("{name}: non-central {:?}", r.non_central))?;
        if name == "sl2" {
            ensure(r.negative_control.as_ref().is_some_and(|d| !d.defect.is_empty()), "plain PBW shows no defect")?;
        }
        shifts.push(format!("{name} {}", r.casimir_shift));
    }
    Ok(format!("multiplicative and central; casimir shifts {}", shifts.join(", ")))
}

fn wilson() -> Outcome {
    let mut compared = 0;
    for name in BUILTINS {
        let a = alg(name);
        for spec in ["one", "casimir", "casimir^2"] {
            let f = function_from_spec(&a, spec).map_err(|e| e.to_string())?;
            let r = unknot_invariant(&a, &f, 3, required_order(&f, 3)).map_err(|e| e.to_string())?;
            ensure(r.oracle_match, format!("{name} f={spec}: {:?} vs {:?}", r.series, r.oracle))?;
            compared += 1;
            if a.is_abelian() && spec == "one" {
                ensure(r.series.coeffs == [qi(1), qi(0), qi(0), qi(0)], format!("{name}: {:?}", r.series))?;
            }
            if a.is_abelian() && spec == "casimir" {
                ensure(r.series.coeffs[1] == qi(2 * a.dim() as i64), format!("{name}: {:?}", r.series))?;
            }
        }
    }
    Ok(format!("{compared} (algebra, f) pairs through h^3"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_chevalley");
    let args = ["suite", "run", "--algebra", "sl2", "--checks", "all", "--jets", "6", "--max-len", "3", "--degree", "4", "--h-order", "2"];
    let run = || Command::new(bin).args(args).env_remove(chevalley::OUT_DIR_ENV).output().map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, "reports differ")?;
    let cfg = SuiteConfig::suite("abelian:3", Check::ALL.to_vec());
    let (x, y) = (run_suite(&cfg).map_err(|e| e.to_string())?, run_suite(&cfg).map_err(|e| e.to_string())?);
    ensure(x.to_json() == y.to_json(), "library reports differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("axioms and d^2 = 0", Duration::from_secs(10), axioms_and_complexes),
        ("CE cohomology dims", Duration::from_secs(5), ce_dims),
        ("HKR chain map and homology", Duration::from_secs(120), hkr),
        ("degree-1 representatives", Duration::from_secs(120), cor),
        ("at maps are chain maps", Duration::from_secs(60), at_maps),
        ("d0 transport and extraction", Duration::from_secs(300), at_transport),
        ("invariant-field oracle", Duration::from_secs(30), invariant_field_oracle),
        ("Duflo character oracle", Duration::from_secs(30), character_oracle),
        ("commutator and homotopy identity", Duration::from_secs(300), char_identity),
        ("Duflo isomorphism", Duration::from_secs(120), duflo_iso),
        ("Wilson unknot", Duration::from_secs(120), wilson),
        ("suite determinism", Duration::from_secs(300), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let (ok, detail) = match out {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail} ({:.2}s)", if ok { "PASS" } else { "FAIL" }, i + 1, took.as_secs_f64());
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
