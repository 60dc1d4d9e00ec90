use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chevalley::{emit, parse_checks, pin_regression, run_suite, Check, Format, SuiteConfig, UsageError, EXIT_IDENTITY, EXIT_USAGE};
use chevalley_core::ce::ModuleTag;
use chevalley_core::wilson::{function_from_spec, required_order};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chevalley", version, about = "Exact verification of Hochschild, Duflo and Wilson-loop identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// json or text
    #[arg(long, default_value = "json")]
    format: Format,
    /// Report path; defaults to $CHEVALLEY_OUT_DIR or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Algebra input checks.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Chevalley-Eilenberg cohomology.
    Ce {
        #[command(subcommand)]
        cmd: CeCmd,
    },
    /// Hochschild window checks.
    Hochschild {
        #[command(subcommand)]
        cmd: HochschildCmd,
    },
    /// Duflo character checks.
    Duflo {
        #[command(subcommand)]
        cmd: DufloCmd,
    },
    /// Wilson loop invariants.
    Wilson {
        #[command(subcommand)]
        cmd: WilsonCmd,
    },
    /// Full suite.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Axioms and d^2 = 0.
    Validate {
        /// Algebra file or builtin name.
        algebra: String,
        /// Also check d^2 = 0 on jets of this order.
        #[arg(long)]
        jets: Option<usize>,
        /// Also check d^2 = 0 on U(g) up to this degree.
        #[arg(long)]
        uea: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum CeCmd {
    Cohomology {
        #[arg(long)]
        algebra: String,
        /// trivial, jets:N or uea:D
        #[arg(long, default_value = "trivial")]
        module: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum HochschildCmd {
    Verify {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        jets: usize,
        /// Comma list of hkr, cor, d0, at.
        #[arg(long, default_value = "hkr,cor,d0,at")]
        checks: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum DufloCmd {
    /// The homotopy identity and commutator identities.
    CharCheck {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Character series with its oracles.
    Character {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Multiplicativity of the Duflo map on invariants.
    IsoCheck {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum WilsonCmd {
    Unknot {
        #[arg(long)]
        algebra: String,
        /// one, casimir^m or file:<json>
        #[arg(long = "f", default_value = "one")]
        function: String,
        #[arg(long, default_value_t = 2)]
        h_order: usize,
        /// Jet order; defaults to 2K + deg f.
        #[arg(long)]
        jets: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    Run {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, default_value_t = 6)]
        jets: usize,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 2)]
        h_order: usize,
        #[arg(long = "f", default_value = "one")]
        function: String,
        /// Compare with this baseline report, creating it if missing.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

fn with_output(mut c: SuiteConfig, o: Output) -> SuiteConfig {
    c.format = o.format;
    c.output = o.out;
    c
}

fn build(command: Command) -> Result<(SuiteConfig, Option<PathBuf>), UsageError> {
    let config = match command {
        Command::Algebra { cmd: AlgebraCmd::Validate { algebra, jets, uea, output } } => {
            let mut c = SuiteConfig::new(&algebra, vec![Check::Validate]);
            c.command = "algebra validate".into();
            c.validate_modules =
                std::iter::once(ModuleTag::Trivial).chain(jets.map(ModuleTag::Jets)).chain(uea.map(ModuleTag::Uea)).collect();
            with_output(c, output)
        }
        Command::Ce { cmd: CeCmd::Cohomology { algebra, module, output } } => {
            let mut c = SuiteConfig::new(&algebra, vec![Check::Ce]);
            c.command = "ce cohomology".into();
            c.ce_module = ModuleTag::parse(&module).ok_or_else(|| UsageError(format!("unknown module `{module}`")))?;
            c.validate_modules = vec![ModuleTag::Trivial];
            with_output(c, output)
        }
        Command::Hochschild { cmd: HochschildCmd::Verify { algebra, max_len, jets, checks, output } } => {
            let list = parse_checks(&checks)?;
            if let Some(bad) = list.iter().find(|c| !c.is_hochschild()) {
                return Err(UsageError(format!("`{}` is not a hochschild check", bad.name())));
            }
            let mut c = SuiteConfig::new(&algebra, list);
            c.command = "hochschild verify".into();
            c.max_len = max_len;
            c.jets = jets;
            with_output(c, output)
        }
        Command::Duflo { cmd } => {
            let (name, check, algebra, order, degree, output) = match cmd {
                DufloCmd::CharCheck { algebra, order, output } => ("duflo char-check", Check::Char, algebra, order, None, output),
                DufloCmd::Character { algebra, order, output } => ("duflo character", Check::Oracle, algebra, order, None, output),
                DufloCmd::IsoCheck { algebra, degree, order, output } => {
                    ("duflo iso-check", Check::Iso, algebra, order.unwrap_or(degree), Some(degree), output)
                }
            };
            let mut c = SuiteConfig::new(&algebra, vec![check]);
            c.command = name.into();
            c.jets = order;
            if let Some(d) = degree {
                c.degree = d;
            }
            with_output(c, output)
        }
        Command::Wilson { cmd: WilsonCmd::Unknot { algebra, function, h_order, jets, output } } => {
            let mut c = SuiteConfig::new(&algebra, vec![Check::Wilson]);
            c.command = "wilson unknot".into();
            c.h_order = h_order;
            c.jets = match jets {
                Some(n) => n,
                None => {
                    let alg = c.algebra.load()?;
                    let f = function_from_spec(&alg, &function).map_err(|e| UsageError(e.to_string()))?;
                    required_order(&f, h_order)
                }
            };
            c.function = function;
            with_output(c, output)
        }
        Command::Suite { cmd: SuiteCmd::Run { algebra, checks, jets, max_len, degree, h_order, function, baseline, output } } => {
            let mut c = SuiteConfig::suite(&algebra, parse_checks(&checks)?);
            c.jets = jets;
            c.max_len = max_len;
            c.degree = degree;
            c.h_order = h_order;
            c.function = function;
            c.validate_modules = vec![ModuleTag::Trivial, ModuleTag::Jets(jets), ModuleTag::Uea(degree)];
            return Ok((with_output(c, output), baseline));
        }
    };
    Ok((config, None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, baseline) = match build(cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let report = match run_suite(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match emit(&report, &config) {
        Ok(Some(body)) => {
            let _ = std::io::stdout().write_all(body.as_bytes());
        }
        Ok(None) => eprintln!("report written to {}", config.output_path().expect("path").display()),
        Err(e) => {
            eprintln!("cannot write report: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let mut code = report.exit_code();
    if let Some(path) = baseline {
        match pin_regression(&report, &path) {
            Ok(d) if d.created => eprintln!("baseline created at {}", path.display()),
            Ok(d) if d.is_empty() => {}
            Ok(d) => {
                eprintln!("regression drift against {}: first divergent key {}", path.display(), d.first_divergent_key().unwrap_or(""));
                for e in &d.entries {
                    eprintln!("  {}: {:?} -> {:?}", e.key, e.baseline, e.current);
                }
                if code == 0 {
                    code = EXIT_IDENTITY;
                }
            }
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    ExitCode::from(code as u8)
}
