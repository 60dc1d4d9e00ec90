//! Command-line front end: configs, suite orchestration, reports and
//! regression pinning.

pub mod config;
pub mod pin;
pub mod report;
pub mod suite;

pub use config::{parse_checks, AlgebraSource, Check, Format, SuiteConfig, OUT_DIR_ENV};
pub use pin::{pin_regression, Diff, DiffEntry, PinError};
pub use report::{CheckResult, Kind, Report, Status};
pub use suite::run_suite;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_IDENTITY: i32 = 4;

/// Bad input or incompatible parameters; nothing was computed.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("usage error: {0}")]
pub struct UsageError(pub String);

/// Renders the report in the configured format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

/// Writes the rendered report to the configured path, or returns it for stdout.
pub fn emit(report: &Report, config: &SuiteConfig) -> std::io::Result<Option<String>> {
    let body = render(report, config.format);
    match config.output_path() {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&p, body)?;
            Ok(None)
        }
        None => Ok(Some(body)),
    }
}
