//! Suite configuration and the compatibility rules checked before any work.

use std::path::{Path, PathBuf};

use chevalley_core::algebra::{builtin, MetricLieAlgebra};
use chevalley_core::ce::ModuleTag;
use chevalley_core::wilson::{function_from_spec, required_order, InvariantFunction};
use serde::Serialize;

use crate::UsageError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CHEVALLEY_OUT_DIR";

/// Every check, in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Validate,
    Ce,
    Hkr,
    Cor,
    D0,
    At,
    Oracle,
    Char,
    Iso,
    Wilson,
}

impl Check {
    pub const ALL: [Check; 10] =
        [Check::Validate, Check::Ce, Check::Hkr, Check::Cor, Check::D0, Check::At, Check::Oracle, Check::Char, Check::Iso, Check::Wilson];

    /// Report name, grouped by stage.
    pub fn name(self) -> &'static str {
        match self {
            Check::Validate => "validate",
            Check::Ce => "ce",
            Check::Hkr => "hochschild.hkr",
            Check::Cor => "hochschild.cor",
            Check::D0 => "hochschild.d0",
            Check::At => "hochschild.at",
            Check::Oracle => "duflo.oracle",
            Check::Char => "duflo.char",
            Check::Iso => "enveloping.iso",
            Check::Wilson => "wilson.unknot",
        }
    }

    pub fn is_hochschild(self) -> bool {
        matches!(self, Check::Hkr | Check::Cor | Check::D0 | Check::At)
    }
}

/// Parses `all` or a comma list of check names and stage names.
pub fn parse_checks(s: &str) -> Result<Vec<Check>, UsageError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let add: &[Check] = match item {
            "all" => &Check::ALL,
            "validate" => &[Check::Validate],
            "ce" => &[Check::Ce],
            "hochschild" => &[Check::Hkr, Check::Cor, Check::D0, Check::At],
            "hkr" => &[Check::Hkr],
            "cor" => &[Check::Cor],
            "d0" => &[Check::D0],
            "at" => &[Check::At],
            "duflo" => &[Check::Oracle, Check::Char],
            "oracle" => &[Check::Oracle],
            "char" => &[Check::Char],
            "enveloping" | "iso" => &[Check::Iso],
            "wilson" => &[Check::Wilson],
            other => return Err(UsageError(format!("unknown check `{other}`"))),
        };
        out.extend_from_slice(add);
    }
    if out.is_empty() {
        return Err(UsageError("empty check list".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(UsageError(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AlgebraSource {
    Builtin(String),
    File(PathBuf),
}

impl AlgebraSource {
    /// Existing paths and `*.json` are files, anything else a builtin name.
    pub fn parse(s: &str) -> AlgebraSource {
        if s.ends_with(".json") || Path::new(s).is_file() {
            AlgebraSource::File(PathBuf::from(s))
        } else {
            AlgebraSource::Builtin(s.to_string())
        }
    }

    pub fn load(&self) -> Result<MetricLieAlgebra, UsageError> {
        match self {
            AlgebraSource::Builtin(s) => builtin(s).map_err(|e| UsageError(e.to_string())),
            AlgebraSource::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
                MetricLieAlgebra::from_json(&text).map_err(|e| UsageError(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlgebraSource::Builtin(s) => s.clone(),
            AlgebraSource::File(p) => p.display().to_string(),
        }
    }

    /// File-name friendly label.
    pub fn slug(&self) -> String {
        let raw = match self {
            AlgebraSource::Builtin(s) => s.clone(),
            AlgebraSource::File(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        };
        raw.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub command: String,
    pub algebra: AlgebraSource,
    /// Hochschild window: weight bound L.
    pub max_len: usize,
    /// Jet order N.
    pub jets: usize,
    /// Invariant degree D.
    pub degree: usize,
    /// Wilson h-order K.
    pub h_order: usize,
    pub function: String,
    pub checks: Vec<Check>,
    /// Coefficients on which `validate` checks d² = 0.
    pub validate_modules: Vec<ModuleTag>,
    /// Coefficients for the `ce` check.
    pub ce_module: ModuleTag,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(algebra: &str, checks: Vec<Check>) -> Self {
        SuiteConfig {
            command: "suite run".into(),
            algebra: AlgebraSource::parse(algebra),
            max_len: 3,
            jets: 6,
            degree: 4,
            h_order: 2,
            function: "one".into(),
            checks,
            validate_modules: Vec::new(),
            ce_module: ModuleTag::Trivial,
            format: Format::Json,
            output: None,
        }
    }

    /// Suite defaults: d² on trivial, jets(N) and uea(D).
    pub fn suite(algebra: &str, checks: Vec<Check>) -> Self {
        let mut c = Self::new(algebra, checks);
        c.validate_modules = vec![ModuleTag::Trivial, ModuleTag::Jets(c.jets), ModuleTag::Uea(c.degree)];
        c
    }

    pub fn wants(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    pub fn wants_hochschild(&self) -> bool {
        self.checks.iter().any(|c| c.is_hochschild())
    }

    /// Loads the inputs and enforces every compatibility rule.
    pub fn validate(&self) -> Result<Prepared, UsageError> {
        let alg = self.algebra.load()?;
        if self.wants_hochschild() {
            if self.max_len == 0 {
                return Err(UsageError("max-len must be at least 1".into()));
            }
            if self.jets < self.max_len {
                return Err(UsageError(format!("jets N = {} must be at least max-len L = {} (N >= L)", self.jets, self.max_len)));
            }
        }
        if self.wants(Check::Iso) && self.degree > self.jets {
            return Err(UsageError(format!("degree D = {} must not exceed jets N = {} (D <= N)", self.degree, self.jets)));
        }
        let function = if self.wants(Check::Wilson) {
            let f = function_from_spec(&alg, &self.function).map_err(|e| UsageError(e.to_string()))?;
            let need = required_order(&f, self.h_order);
            if self.jets < need {
                return Err(UsageError(format!(
                    "jets N = {} is below 2K + deg f = {need} for h-order {} and f = {}",
                    self.jets, self.h_order, self.function
                )));
            }
            Some(f)
        } else {
            None
        };
        Ok(Prepared { alg, function })
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            algebra: self.algebra.label(),
            max_len: self.max_len,
            jets: self.jets,
            degree: self.degree,
            h_order: self.h_order,
            function: self.function.clone(),
            checks: self.checks.iter().map(|c| c.name().to_string()).collect(),
            validate_modules: self.validate_modules.iter().map(|m| m.label()).collect(),
            ce_module: self.ce_module.label(),
        }
    }

    /// Explicit path, else `$CHEVALLEY_OUT_DIR/<command>-<algebra>.<ext>`, else stdout.
    pub fn output_path(&self) -> Option<PathBuf> {
        if let Some(p) = &self.output {
            return Some(p.clone());
        }
        let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
        let ext = match self.format {
            Format::Json => "json",
            Format::Text => "txt",
        };
        let cmd = self.command.replace(' ', "-");
        Some(PathBuf::from(dir).join(format!("{cmd}-{}.{ext}", self.algebra.slug())))
    }
}

/// Loaded inputs for a validated config.
#[derive(Debug)]
pub struct Prepared {
    pub alg: MetricLieAlgebra,
    pub function: Option<InvariantFunction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ConfigEcho {
    pub algebra: String,
    pub max_len: usize,
    pub jets: usize,
    pub degree: usize,
    pub h_order: usize,
    pub function: String,
    pub checks: Vec<String>,
    pub validate_modules: Vec<String>,
    pub ce_module: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lists() {
        assert_eq!(parse_checks("all").unwrap(), Check::ALL.to_vec());
        assert_eq!(parse_checks("at,hkr").unwrap(), vec![Check::Hkr, Check::At]);
        assert!(parse_checks("bogus").is_err());
        assert!(parse_checks("").is_err());
    }

    #[test]
    fn rules() {
        let mut c = SuiteConfig::new("sl2", vec![Check::Hkr]);
        c.jets = 2;
        assert!(c.validate().unwrap_err().0.contains("N >= L"));
        let mut c = SuiteConfig::new("sl2", vec![Check::Iso]);
        c.degree = 8;
        assert!(c.validate().unwrap_err().0.contains("D <= N"));
        let mut c = SuiteConfig::new("sl2", vec![Check::Wilson]);
        c.function = "casimir^2".into();
        assert!(c.validate().unwrap_err().0.contains("2K + deg f"));
        assert!(SuiteConfig::new("sl7", vec![Check::Ce]).validate().is_err());
    }

    #[test]
    fn source_kinds() {
        assert_eq!(AlgebraSource::parse("sl2"), AlgebraSource::Builtin("sl2".into()));
        assert!(matches!(AlgebraSource::parse("x/y.json"), AlgebraSource::File(_)));
        assert_eq!(AlgebraSource::parse("abelian:3").slug(), "abelian_3");
    }
}
