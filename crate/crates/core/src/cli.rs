//! `plm` command line: `validate`, `classify` and `analyze`.
//!
//! Exit codes: 0 success, 1 input error (parse, validation or
//! classification), 2 usage error, 3 analysis precondition failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classify::{classification_mismatches, classify_components};
use crate::model::{ProductGraph, Ratio};
use crate::parser::{parse_products, validate, Code, Diagnostic};
use crate::report::{build_report, render, Format, ReportConfig, ReportError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "plm", version, about = "Measure how well a set of similar products can form a product line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate product description files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Treat undeclared signatures and classification mismatches as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Print the required, optional and isolated components of each product.
    Classify {
        file: PathBuf,
        /// Only classify this product.
        #[arg(long)]
        product: Option<String>,
        /// Comma-separated start components, replacing the file's start set.
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<String>>,
    },
    /// Compute every metric and recommendation for the products in the files.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long)]
        strict: bool,
        /// Products with IR above this are refactoring candidates.
        #[arg(long, default_value = "0.5", value_parser = parse_threshold)]
        tau_ir: Ratio,
        /// PrR below this (together with low IPrR) marks an exclusion candidate.
        #[arg(long, default_value = "0.25", value_parser = parse_threshold)]
        tau_prr: Ratio,
        /// IPrR below this (together with low PrR) marks an exclusion candidate.
        #[arg(long, default_value = "0.25", value_parser = parse_threshold)]
        tau_iprr: Ratio,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Dot,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Machine,
            OutputFormat::Dot => Format::Dot,
        }
    }
}

fn parse_threshold(s: &str) -> Result<Ratio, String> {
    Ratio::parse_decimal(s).ok_or_else(|| format!("`{s}` is not a non-negative decimal"))
}

/// Runs the command line with `args` (including the program name).
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match cli.command {
        Command::Validate { files, strict } => cmd_validate(&files, strict, stdout, stderr),
        Command::Classify { file, product, start } => {
            cmd_classify(&file, product.as_deref(), start.as_deref(), stdout, stderr)
        }
        Command::Analyze {
            files,
            format,
            strict,
            tau_ir,
            tau_prr,
            tau_iprr,
            out,
        } => {
            let config = ReportConfig {
                tau_ir,
                tau_prr,
                tau_iprr,
                strict,
            };
            cmd_analyze(&files, format.into(), config, out.as_deref(), stdout, stderr)
        }
    }
}

struct Loaded {
    products: Vec<ProductGraph>,
    errors: usize,
    warnings: usize,
}

fn report_diag(stderr: &mut dyn Write, file: &Path, d: &Diagnostic) {
    let _ = writeln!(stderr, "{}: {}", file.display(), d);
}

/// Parses every file, reporting diagnostics and cross-file duplicate ids.
fn load(files: &[PathBuf], strict: bool, stderr: &mut dyn Write) -> Loaded {
    let mut loaded = Loaded {
        products: Vec::new(),
        errors: 0,
        warnings: 0,
    };
    let mut origin: BTreeMap<String, PathBuf> = BTreeMap::new();
    for file in files {
        let text = match std::fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(stderr, "{}: cannot read: {e}", file.display());
                loaded.errors += 1;
                continue;
            }
        };
        let out = parse_products(&text, strict);
        for d in &out.diagnostics {
            report_diag(stderr, file, d);
            if d.is_error() {
                loaded.errors += 1;
            } else {
                loaded.warnings += 1;
            }
        }
        for p in out.products {
            if let Some(first) = origin.get(p.id()) {
                let _ = writeln!(
                    stderr,
                    "{}: error[E_DUP_PRODUCT]: product `{}` is already declared in {}",
                    file.display(),
                    p.id(),
                    first.display()
                );
                loaded.errors += 1;
                continue;
            }
            origin.insert(p.id().to_string(), file.clone());
            loaded.products.push(p);
        }
    }
    loaded
}

/// Product-level validation; undeclared-signature findings were already
/// reported with line numbers by the parser.
fn validate_all(loaded: &mut Loaded, strict: bool, stderr: &mut dyn Write) {
    for p in &loaded.products {
        for d in validate(p, strict) {
            if d.code == Code::UndeclaredAccept {
                continue;
            }
            let _ = writeln!(stderr, "{d}");
            if d.is_error() {
                loaded.errors += 1;
            } else {
                loaded.warnings += 1;
            }
        }
    }
}

fn cmd_validate(files: &[PathBuf], strict: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut loaded = load(files, strict, stderr);
    validate_all(&mut loaded, strict, stderr);
    let _ = writeln!(
        stdout,
        "{} products, {} errors, {} warnings",
        loaded.products.len(),
        loaded.errors,
        loaded.warnings
    );
    if loaded.errors == 0 {
        EXIT_OK
    } else {
        EXIT_INPUT
    }
}

fn cmd_classify(
    file: &Path,
    product: Option<&str>,
    start: Option<&[String]>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let loaded = load(&[file.to_path_buf()], false, stderr);
    if loaded.errors > 0 {
        return EXIT_INPUT;
    }
    let mut selected: Vec<ProductGraph> = match product {
        Some(id) => loaded.products.into_iter().filter(|p| p.id() == id).collect(),
        None => loaded.products,
    };
    if selected.is_empty() {
        match product {
            Some(id) => {
                let _ = writeln!(stderr, "error: no product `{id}` in {}", file.display());
            }
            None => {
                let _ = writeln!(stderr, "error: {} declares no products", file.display());
            }
        }
        return EXIT_INPUT;
    }

    let mut text = String::new();
    for (i, p) in selected.iter_mut().enumerate() {
        if let Some(names) = start {
            if let Err(e) = p.set_start(names.iter().cloned()) {
                let _ = writeln!(stderr, "error[E_START_NOT_FOUND] product `{}`: {e}", p.id());
                return EXIT_INPUT;
            }
        }
        let c = match classify_components(p) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
        };
        for m in classification_mismatches(p) {
            let _ = writeln!(
                stderr,
                "warning[W_CLASSIFICATION_MISMATCH] product `{}`: `{}` is declared {} but derives as {}",
                p.id(),
                m.name,
                m.declared,
                m.derived
            );
        }
        if i > 0 {
            text.push('\n');
        }
        text.push_str(&format!("product {}\n", p.id()));
        for (label, set) in [("required", &c.required), ("optional", &c.optional), ("isolated", &c.isolated)] {
            let names: Vec<&str> = set.iter().map(String::as_str).collect();
            text.push_str(format!("{label}: {}", names.join(" ")).trim_end());
            text.push('\n');
        }
    }
    let _ = stdout.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_analyze(
    files: &[PathBuf],
    format: Format,
    config: ReportConfig,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut loaded = load(files, config.strict, stderr);
    if loaded.errors > 0 {
        return EXIT_INPUT;
    }
    validate_all(&mut loaded, config.strict, stderr);
    if loaded.errors > 0 {
        return EXIT_INPUT;
    }
    let report = match build_report(loaded.products, config) {
        Ok(r) => r,
        Err(e @ ReportError::TooFewProducts(_)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_PRECONDITION;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let rendered = render(&report, format);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    EXIT_OK
}
