use std::path::Path;
use std::process::{Command, Output};

use chevalley::{pin_regression, run_suite, Check, Report, SuiteConfig, EXIT_IDENTITY, EXIT_INVARIANT, EXIT_USAGE, OUT_DIR_ENV};
use serde_json::{json, Value};

fn chevalley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevalley")).args(args).env_remove(OUT_DIR_ENV).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_builtin_and_file() {
    let o = chevalley(&["algebra", "validate", "sl2", "--jets", "3", "--uea", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_of(&o);
    assert_eq!(r["checks"][0]["values"]["d_squared_zero"], json!({ "trivial": true, "jets:3": true, "uea:2": true }));

    let dir = tempfile::tempdir().unwrap();
    let heis =
        write(dir.path(), "heis.json", r#"{"name":"heis","dim":3,"bracket":[[0,1,2,1,1]],"metric":[[0,0,1,1],[1,1,1,1],[2,2,1,1]]}"#);
    // the Heisenberg algebra has no invariant nondegenerate pairing of this shape
    let o = chevalley(&["algebra", "validate", &heis]);
    assert_eq!(o.status.code(), Some(EXIT_INVARIANT));
    assert_eq!(json_of(&o)["aborted_after"], json!("validate"));
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"name":"x","dim":2,"bracket":[[0,1,7,1,1]]}"#);
    let garbage = write(dir.path(), "garbage.json", "not json");
    let singular = write(dir.path(), "singular.json", r#"{"name":"x","dim":2,"metric":[[0,0,1,1]]}"#);
    for args in [
        vec!["algebra", "validate", bad.as_str()],
        vec!["algebra", "validate", garbage.as_str()],
        vec!["algebra", "validate", singular.as_str()],
        vec!["algebra", "validate", "missing.json"],
        vec!["ce", "cohomology", "--algebra", "sl3"],
        vec!["ce", "cohomology", "--algebra", "sl2", "--module", "jets"],
        vec!["hochschild", "verify", "--algebra", "sl2", "--max-len", "4", "--jets", "3"],
        vec!["hochschild", "verify", "--algebra", "sl2", "--checks", "hkr,wilson"],
        vec!["duflo", "iso-check", "--algebra", "sl2", "--degree", "4", "--order", "2"],
        vec!["wilson", "unknot", "--algebra", "sl2", "--f", "casimir^2", "--h-order", "2", "--jets", "5"],
        vec!["wilson", "unknot", "--algebra", "sl2", "--f", "cubic"],
        vec!["suite", "run", "--algebra", "sl2", "--checks", "everything"],
        vec!["suite", "run"],
    ] {
        let o = chevalley(&args);
        assert_eq!(o.status.code(), Some(EXIT_USAGE), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn non_invariant_function_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"terms":[{"exps":[0,1,0],"coeff":[1,1]}]}"#);
    let spec = format!("file:{f}");
    let o = chevalley(&["wilson", "unknot", "--algebra", "sl2", "--f", &spec]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not invariant"));
}

#[test]
fn wilson_unknot_coefficients() {
    let o = chevalley(&["wilson", "unknot", "--algebra", "abelian:3", "--f", "casimir^1", "--h-order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_of(&o);
    let w = r.get("checks").unwrap().as_array().unwrap().last().unwrap().clone();
    assert_eq!(w["name"], json!("wilson.unknot"));
    assert_eq!(w["values"]["coefficients"], json!([[0, 1], [6, 1], [0, 1]]));
    assert_eq!(w["values"]["oracle_match"], json!(true));
    assert_eq!(r["config"]["jets"], json!(6));

    let o = chevalley(&["wilson", "unknot", "--algebra", "sl2", "--f", "one", "--h-order", "1"]);
    assert_eq!(json_of(&o)["checks"][1]["values"]["coefficients"], json!([[1, 1], [1, 8]]));
}

#[test]
fn hochschild_subset_and_text() {
    let o =
        chevalley(&["hochschild", "verify", "--algebra", "so3", "--max-len", "3", "--jets", "4", "--checks", "at,hkr", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("[pass]")).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("hochschild.hkr") && lines[2].contains("hochschild.at"));
    assert!(text.ends_with("status pass\n"));
}

#[test]
fn duflo_commands() {
    let o = chevalley(&["duflo", "character", "--algebra", "sl2", "--order", "2"]);
    let r = json_of(&o);
    let c = &r["checks"][1];
    assert_eq!(c["values"]["bernoulli"], json!([[1, 1], [-1, 2], [1, 6]]));
    // j^{1/2} = 1 + Tr(ad^2)/48 with Tr(ad_h^2) = 8
    assert!(c["values"]["character"].as_array().unwrap().contains(&json!(["h^2", [1, 6]])));
    let o = chevalley(&["duflo", "iso-check", "--algebra", "sl2", "--degree", "4"]);
    assert_eq!(json_of(&o)["checks"][1]["values"]["casimir_shift"], json!([1, 8]));
    let o = chevalley(&["duflo", "char-check", "--algebra", "so3", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_chevalley"))
        .args(["ce", "cohomology", "--algebra", "abelian:2"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(dir.path().join("ce-cohomology-abelian_2.json")).unwrap();
    let r: Report = serde_json::from_str(&body).unwrap();
    assert_eq!(r.check("ce").unwrap().values["cohomology_dims"], json!([1, 2, 1]));

    let explicit = dir.path().join("nested/out.txt");
    let o = chevalley(&["ce", "cohomology", "--algebra", "so3", "--format", "text", "--out", explicit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(explicit).unwrap().contains("H^* dims [1, 0, 0, 1]"));
}

#[test]
fn baseline_is_created_then_matched() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("pins/abelian2.json");
    let args = ["suite", "run", "--algebra", "abelian:2", "--checks", "ce,oracle", "--baseline", base.to_str().unwrap()];
    let o = chevalley(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("baseline created"));
    assert_eq!(std::fs::read(&base).unwrap(), o.stdout);
    let o = chevalley(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());

    // an injected fault in the stored Bernoulli table
    let mut v: Value = serde_json::from_slice(&std::fs::read(&base).unwrap()).unwrap();
    v["checks"][2]["values"]["bernoulli"][4] = json!([1, 30]);
    std::fs::write(&base, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = chevalley(&args);
    assert_eq!(o.status.code(), Some(EXIT_IDENTITY));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first divergent key checks[duflo.oracle].values.bernoulli[4]"));
}

#[test]
fn pin_regression_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("base.json");
    let cfg = SuiteConfig::suite("sl2", vec![Check::Ce, Check::Wilson]);
    let report = run_suite(&cfg).unwrap();
    assert!(pin_regression(&report, &path).unwrap().created);
    let d = pin_regression(&report, &path).unwrap();
    assert!(!d.created && d.is_empty());

    let mut other = SuiteConfig::suite("sl2", vec![Check::Ce, Check::Wilson]);
    other.function = "casimir".into();
    let d = pin_regression(&run_suite(&other).unwrap(), &path).unwrap();
    assert_eq!(d.first_divergent_key(), Some("checks[wilson.unknot].summary"));
    assert!(d.entries.iter().any(|e| e.key == "config.function"));
    assert!(d.entries.iter().any(|e| e.key == "checks[wilson.unknot].values.coefficients[0][0]"));

    std::fs::write(&path, "{").unwrap();
    assert!(pin_regression(&report, &path).is_err());
}

#[test]
fn invariant_failure_skips_downstream() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "nj.json", r#"{"name":"nj","dim":2,"bracket":[[0,1,0,1,1]],"metric":[[0,0,1,1],[1,1,1,1]]}"#);
    let cfg = SuiteConfig::suite(&f, Check::ALL.to_vec());
    let r = run_suite(&cfg).unwrap();
    assert_eq!(r.exit_code(), EXIT_INVARIANT);
    assert_eq!(r.aborted_after.as_deref(), Some("validate"));
    assert!(r.checks[1..].iter().all(|c| c.status == chevalley::Status::Skipped));
    assert_eq!(r.checks.len(), Check::ALL.len());
}
