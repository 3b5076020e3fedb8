//! Command-line front end for `simpson-core`: kernel identity checks,
//! convexity certificates, single bounds and corpus-wide sharpness scans.
//!
//! Exit codes are 0 on success, 1 when a checked property fails and 2 for
//! usage or configuration errors.

pub mod config;
pub mod lemma;
pub mod scan;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigError, CorpusEntry, OutputFormat, RunConfig, VariantPolicy};
use serde::Serialize;
use simpson_core::bounds::{
    BoundParams, BoundReport, EvalOptions, Evaluator, GammaMode, TheoremTag,
};
use simpson_core::convexity::{
    build_g, certify_p_function, certify_s_convex, k_m_membership, max_m, ConvexityCertificate,
    DEFAULT_CERT_TOL, DEFAULT_GRID_N,
};
use simpson_core::kernel::LemmaCase;
use simpson_core::quad::DEFAULT_TOL;
use simpson_core::{Error as CoreError, Expr};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Property(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Property(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Domain(_)
                | CoreError::NonSmoothPoint { .. }
                | CoreError::ToleranceNotReached { .. } => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "simpson-bounds",
    version,
    about = "Simpson-type error bounds under m-, s- and P-convexity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the kernel identity for both midpoint variants over a corpus.
    VerifyLemma(CorpusArgs),
    /// Certify a convexity class for |f'''|^q on a grid.
    Certify(CertifyArgs),
    /// Evaluate one bound and print a single-line JSON report.
    Bound(BoundArgs),
    /// Evaluate every applicable bound over a corpus and parameter grids.
    Scan(CorpusArgs),
}

/// Corpus selection shared by `verify-lemma` and `scan`. Flags override
/// values read from `--config`; without either, the shipped corpus is used.
#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus function; repeat to add more. Replaces the configured corpus.
    #[arg(long = "f")]
    pub functions: Vec<String>,
    /// Interval lower end; with --b replaces the configured intervals.
    #[arg(long, allow_negative_numbers = true, requires = "b")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "a")]
    pub b: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub theorem: Vec<String>,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub cert_tol: Option<f64>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    MConvex,
    SConvex,
    PFunction,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long = "f")]
    pub function: String,
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// Ignored for m-convexity, which is checked on [0, b].
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Violation tolerance of the grid check.
    #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
    pub tol: f64,
    /// Also report the largest certified m on the grid {step, 2·step, …, 1}.
    #[arg(long)]
    pub m_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long = "f")]
    pub function: String,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long)]
    pub theorem: String,
    #[arg(long, default_value = "adjudicate")]
    pub variant: String,
    #[arg(long, default_value = "validated")]
    pub gamma: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
    pub cert_tol: f64,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_expr(text: &str) -> Result<Expr, CliError> {
    Expr::parse(text).map_err(|e| CliError::Usage(format!("function `{text}`: {e}")))
}

impl CorpusArgs {
    /// Resolve the run configuration: file (or defaults), then flag overrides.
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    context: format!("reading {}", path.display()),
                    source,
                })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if !self.functions.is_empty() {
            cfg.functions = self
                .functions
                .iter()
                .map(|f| {
                    Ok(CorpusEntry {
                        text: f.clone(),
                        expr: parse_expr(f)?,
                    })
                })
                .collect::<Result<_, CliError>>()?;
        }
        if let (Some(a), Some(b)) = (self.a, self.b) {
            cfg.intervals = vec![(a, b)];
        }
        for (flag, grid) in [
            (&self.m, &mut cfg.m_grid),
            (&self.q, &mut cfg.q_grid),
            (&self.s, &mut cfg.s_grid),
        ] {
            if !flag.is_empty() {
                *grid = flag.clone();
            }
        }
        if !self.theorem.is_empty() {
            cfg.theorems = self
                .theorem
                .iter()
                .map(|t| t.trim().parse::<TheoremTag>().map_err(usage))
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = &self.variant {
            cfg.variant = v.parse().map_err(usage)?;
        }
        if let Some(g) = &self.gamma {
            cfg.gamma_mode = g.parse().map_err(usage)?;
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse().map_err(usage)?;
        }
        cfg.tol = self.tol.unwrap_or(cfg.tol);
        cfg.grid_n = self.grid_n.unwrap_or(cfg.grid_n);
        cfg.cert_tol = self.cert_tol.unwrap_or(cfg.cert_tol);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| {
            CliError::Io {
                context: format!("creating {}", path.display()),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(source: io::Error) -> CliError {
    CliError::Io {
        context: "writing output".into(),
        source,
    }
}

fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut w, value).map_err(|e| io_err(e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err)
}

pub fn cmd_verify_lemma(args: &CorpusArgs) -> Result<(), CliError> {
    let cfg = args.to_config()?;
    let outcome = lemma::run_verify_lemma(&cfg)?;
    let mut w = open_output(cfg.out.as_deref())?;
    match cfg.format {
        OutputFormat::Csv => outcome
            .write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(io_err)?,
        OutputFormat::Json => write_json(&mut w, &outcome)?,
    }
    let winner = outcome
        .adjudication
        .winner
        .map_or("none (variants agree on every case)".to_string(), |v| {
            v.to_string()
        });
    eprintln!("winner: {winner}");
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::Property(format!(
            "kernel identity fails for the {} midpoint",
            outcome.selected
        )))
    }
}

pub fn cmd_scan(args: &CorpusArgs) -> Result<(), CliError> {
    let cfg = args.to_config()?;
    let outcome = scan::run_scan(&cfg)?;
    let mut w = open_output(cfg.out.as_deref())?;
    match cfg.format {
        OutputFormat::Csv => {
            outcome
                .write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(io_err)?;
            outcome.write_summary(io::stderr().lock()).map_err(io_err)?;
        }
        OutputFormat::Json => write_json(&mut w, &outcome)?,
    }
    let errors = outcome.error_count();
    let violations = outcome.dominance_violations();
    for row in &violations {
        eprintln!(
            "dominance violated: {} on [{}, {}] m={} {}: defect {} > bound {}",
            row.function,
            row.a,
            row.b,
            row.m,
            row.theorem,
            row.defect_abs.unwrap_or(f64::NAN),
            row.bound.unwrap_or(f64::NAN)
        );
    }
    match (errors, violations.len()) {
        (0, 0) => Ok(()),
        (e, v) => Err(CliError::Property(format!(
            "{e} row(s) errored, {v} certified row(s) exceed their bound"
        ))),
    }
}

/// What `bound` prints: the scan row for the same tuple plus the full report.
#[derive(Debug, Serialize)]
pub struct BoundOutput {
    #[serde(flatten)]
    pub row: scan::ScanRow,
    pub report: BoundReport,
}

pub fn run_bound(args: &BoundArgs) -> Result<BoundOutput, CliError> {
    let expr = parse_expr(&args.function)?;
    let tag: TheoremTag = args.theorem.parse().map_err(usage)?;
    let gamma_mode: GammaMode = args.gamma.parse().map_err(usage)?;
    let policy: VariantPolicy = args.variant.parse().map_err(usage)?;
    let midpoint_variant = match policy {
        VariantPolicy::Fixed(v) => v,
        VariantPolicy::Adjudicate => {
            let case = LemmaCase {
                label: args.function.clone(),
                expr: expr.clone(),
                a: args.a,
                b: args.b,
                m: args.m,
            };
            lemma::resolve_variant(&[case], args.tol)?
        }
    };
    let params = BoundParams {
        m: args.m,
        q: args.q,
        s: args.s,
        gamma_mode,
        midpoint_variant,
        ..BoundParams::new(args.a, args.b)
    };
    let opts = EvalOptions {
        tol: args.tol,
        grid_n: args.grid_n,
        cert_tol: args.cert_tol,
    };
    let report = Evaluator::new(&expr, opts).evaluate(&params, tag)?;
    Ok(BoundOutput {
        row: scan::ScanRow::from_report(&args.function, &report),
        report,
    })
}

pub fn cmd_bound(args: &BoundArgs) -> Result<(), CliError> {
    let out = run_bound(args)?;
    write_json(io::stdout().lock(), &out)
}

#[derive(Debug, Serialize)]
pub struct CertifyOutput {
    pub function: String,
    pub q: f64,
    pub certificate: ConvexityCertificate,
    /// `g(0) <= 0` together with m-convexity on `[0, b]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_m_member: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_m: Option<f64>,
}

pub fn run_certify(args: &CertifyArgs) -> Result<CertifyOutput, CliError> {
    let expr = parse_expr(&args.function)?;
    let g = build_g(&expr, args.q)?;
    let (n, tol) = (args.grid_n, args.tol);
    let (certificate, k_m_member) = match args.class {
        ClassArg::MConvex => {
            let km = k_m_membership(g.clone(), args.b, args.m, n, tol)?;
            (km.certificate, Some(km.member))
        }
        ClassArg::SConvex => (
            certify_s_convex(g.clone(), args.a, args.b, args.s, n, tol)?,
            None,
        ),
        ClassArg::PFunction => (certify_p_function(g.clone(), args.a, args.b, n, tol)?, None),
    };
    let max_m = match args.m_step {
        Some(step) => Some(max_m(g, args.b, n, step, tol)?),
        None => None,
    };
    Ok(CertifyOutput {
        function: args.function.clone(),
        q: args.q,
        certificate,
        k_m_member,
        max_m,
    })
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<(), CliError> {
    let out = run_certify(args)?;
    write_json(io::stdout().lock(), &out)?;
    if out.certificate.is_certified() {
        Ok(())
    } else {
        Err(CliError::Property("certificate refuted".into()))
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::VerifyLemma(a) => cmd_verify_lemma(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
