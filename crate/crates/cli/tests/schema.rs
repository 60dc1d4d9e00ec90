use chevalley::{run_suite, Check, SuiteConfig};
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn suite_reports_match_schema() {
    let v = validator();
    for a in ["abelian:2", "sl2", "oscillator"] {
        let r = run_suite(&SuiteConfig::suite(a, Check::ALL.to_vec())).unwrap();
        assert_valid(&v, &serde_json::from_str(&r.to_json()).unwrap());
    }
}

#[test]
fn command_reports_match_schema() {
    let v = validator();
    let bin = env!("CARGO_BIN_EXE_chevalley");
    for args in [
        vec!["algebra", "validate", "so3", "--jets", "2"],
        vec!["ce", "cohomology", "--algebra", "sl2", "--module", "uea:2"],
        vec!["hochschild", "verify", "--algebra", "abelian:2", "--max-len", "2", "--jets", "2"],
        vec!["duflo", "character", "--algebra", "oscillator", "--order", "4"],
        vec!["duflo", "char-check", "--algebra", "sl2", "--order", "3"],
        vec!["duflo", "iso-check", "--algebra", "so3", "--degree", "2"],
        vec!["wilson", "unknot", "--algebra", "sl2", "--f", "casimir", "--h-order", "1"],
    ] {
        let o = std::process::Command::new(bin).args(&args).env_remove(chevalley::OUT_DIR_ENV).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_valid(&v, &serde_json::from_slice(&o.stdout).unwrap());
    }
}

#[test]
fn aborted_reports_match_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("nj.json");
    std::fs::write(&p, r#"{"name":"nj","dim":2,"bracket":[[0,1,0,1,1]],"metric":[[0,0,1,1],[1,1,1,1]]}"#).unwrap();
    let r = run_suite(&SuiteConfig::suite(p.to_str().unwrap(), Check::ALL.to_vec())).unwrap();
    assert_valid(&validator(), &serde_json::from_str(&r.to_json()).unwrap());
}

#[test]
fn schema_rejects_decimals() {
    let v = validator();
    let r = run_suite(&SuiteConfig::suite("sl2", vec![Check::Wilson])).unwrap();
    let mut doc: Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_valid(&v, &doc);
    doc["checks"][1]["values"]["coefficients"][1] = serde_json::json!(0.125);
    assert!(!v.is_valid(&doc));
    doc["checks"][1]["values"]["coefficients"][1] = serde_json::json!([1, 8]);
    doc["checks"][1]["status"] = serde_json::json!("maybe");
    assert!(!v.is_valid(&doc));
}
