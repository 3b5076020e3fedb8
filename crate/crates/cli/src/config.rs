//! Run configuration: a flat `key = value` file.
//!
//! ```text
//! # comments start with '#'
//! function = x^4          # repeat for every corpus entry
//! function = exp(x)
//! interval = 0, 1         # repeat for every interval
//! m = 0.25, 0.5, 0.75, 1
//! q = 1, 1.5, 2, 3
//! s = 0.5, 1
//! theorem = thm21, thm22  # optional, defaults to all
//! tol = 1e-11
//! grid_n = 64
//! cert_tol = 1e-9
//! gamma = validated       # or as-printed
//! variant = adjudicate    # or printed | corrected
//! format = csv            # or json
//! out = results.csv
//! ```
//!
//! The corpus is every function on every interval. Grid keys may also be
//! repeated; their values accumulate.

use simpson_core::bounds::{GammaMode, TheoremTag};
use simpson_core::convexity::{DEFAULT_CERT_TOL, DEFAULT_GRID_N};
use simpson_core::quad::DEFAULT_TOL;
use simpson_core::{Expr, MidpointVariant};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

pub const DEFAULT_FUNCTIONS: [&str; 8] = [
    "x^3", "x^4", "x^5", "x^6", "exp(x)", "sin(x)", "x*exp(x)", "log(1+x)",
];
pub const DEFAULT_INTERVALS: [(f64, f64); 2] = [(0.0, 1.0), (0.5, 2.0)];
pub const DEFAULT_M_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_Q_GRID: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
pub const DEFAULT_S_GRID: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantPolicy {
    Fixed(MidpointVariant),
    Adjudicate,
}

impl FromStr for VariantPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adjudicate" => Ok(VariantPolicy::Adjudicate),
            other => other
                .parse::<MidpointVariant>()
                .map(VariantPolicy::Fixed)
                .map_err(|_| {
                    format!("unknown variant `{other}` (expected printed|corrected|adjudicate)")
                }),
        }
    }
}

impl fmt::Display for VariantPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantPolicy::Fixed(v) => write!(f, "{v}"),
            VariantPolicy::Adjudicate => f.write_str("adjudicate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub text: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub functions: Vec<CorpusEntry>,
    pub intervals: Vec<(f64, f64)>,
    pub m_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub theorems: Vec<TheoremTag>,
    pub tol: f64,
    pub grid_n: usize,
    pub cert_tol: f64,
    pub gamma_mode: GammaMode,
    pub variant: VariantPolicy,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    /// The shipped corpus and grids.
    fn default() -> Self {
        let functions = DEFAULT_FUNCTIONS
            .iter()
            .map(|s| CorpusEntry {
                text: s.to_string(),
                expr: Expr::parse(s).expect("default corpus parses"),
            })
            .collect();
        RunConfig {
            functions,
            intervals: DEFAULT_INTERVALS.to_vec(),
            m_grid: DEFAULT_M_GRID.to_vec(),
            q_grid: DEFAULT_Q_GRID.to_vec(),
            s_grid: DEFAULT_S_GRID.to_vec(),
            theorems: TheoremTag::ALL.to_vec(),
            tol: DEFAULT_TOL,
            grid_n: DEFAULT_GRID_N,
            cert_tol: DEFAULT_CERT_TOL,
            gamma_mode: GammaMode::Validated,
            variant: VariantPolicy::Adjudicate,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{v}` is not a finite number"))
        })
        .collect()
}

impl RunConfig {
    /// Parse a config file. Keys left out keep their defaults, except the
    /// corpus, which must be listed explicitly.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig {
            functions: Vec::new(),
            ..RunConfig::default()
        };
        let (mut intervals, mut ms, mut qs, mut ss, mut tags) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| ConfigError::Line { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("`{key}` has an empty value")));
            }
            match key {
                "function" => {
                    let expr =
                        Expr::parse(value).map_err(|e| err(format!("function `{value}`: {e}")))?;
                    cfg.functions.push(CorpusEntry {
                        text: value.to_string(),
                        expr,
                    });
                }
                "interval" => match parse_list(value).map_err(err)?[..] {
                    [lo, hi] => intervals.push((lo, hi)),
                    _ => return Err(err(format!("interval needs two numbers, got `{value}`"))),
                },
                "m" => ms.extend(parse_list(value).map_err(err)?),
                "q" => qs.extend(parse_list(value).map_err(err)?),
                "s" => ss.extend(parse_list(value).map_err(err)?),
                "theorem" | "theorems" => {
                    for t in value.split(',') {
                        tags.push(
                            t.trim()
                                .parse::<TheoremTag>()
                                .map_err(|e| err(e.to_string()))?,
                        );
                    }
                }
                "tol" => cfg.tol = parse_scalar(value).map_err(err)?,
                "cert_tol" => cfg.cert_tol = parse_scalar(value).map_err(err)?,
                "grid_n" => {
                    cfg.grid_n = value
                        .parse()
                        .map_err(|_| err(format!("grid_n `{value}` is not an integer")))?
                }
                "gamma" => {
                    cfg.gamma_mode = value
                        .parse()
                        .map_err(|e: simpson_core::Error| err(e.to_string()))?
                }
                "variant" => cfg.variant = value.parse().map_err(err)?,
                "format" => cfg.format = value.parse().map_err(err)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        if !intervals.is_empty() {
            cfg.intervals = intervals;
        }
        if !ms.is_empty() {
            cfg.m_grid = ms;
        }
        if !qs.is_empty() {
            cfg.q_grid = qs;
        }
        if !ss.is_empty() {
            cfg.s_grid = ss;
        }
        if !tags.is_empty() {
            cfg.theorems = tags;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.functions.is_empty() {
            return bad("corpus is empty: add at least one `function = ...` line".into());
        }
        if self.intervals.is_empty()
            || self.m_grid.is_empty()
            || self.q_grid.is_empty()
            || self.s_grid.is_empty()
        {
            return bad("interval, m, q and s grids must be nonempty".into());
        }
        if self.theorems.is_empty() {
            return bad("no theorems selected".into());
        }
        if let Some((lo, hi)) = self.intervals.iter().find(|(lo, hi)| !(lo < hi)) {
            return bad(format!("interval [{lo}, {hi}] is empty"));
        }
        if let Some(m) = self.m_grid.iter().find(|m| !(**m > 0.0 && **m <= 1.0)) {
            return bad(format!("m = {m} outside (0, 1]"));
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q >= 1.0)) {
            return bad(format!("q = {q} below 1"));
        }
        if let Some(s) = self.s_grid.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return bad(format!("s = {s} outside (0, 1]"));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.cert_tol >= 0.0) {
            return bad(format!(
                "cert_tol must be non-negative, got {}",
                self.cert_tol
            ));
        }
        if self.grid_n < 8 {
            return bad(format!("grid_n must be at least 8, got {}", self.grid_n));
        }
        Ok(())
    }
}

fn parse_scalar(value: &str) -> Result<f64, String> {
    match parse_list(value)?[..] {
        [v] => Ok(v),
        _ => Err(format!("expected one number, got `{value}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let cfg = RunConfig::parse(
            "# corpus\nfunction = x^4\nfunction = exp(x)  # trailing\ninterval = 0, 1\n\
             m = 0.5\nm = 1\nq = 1, 2\ntheorem = thm21, thm22\ntol = 1e-10\ngrid_n = 16\n\
             gamma = as-printed\nvariant = corrected\nformat = json\nout = r.json\n",
        )
        .unwrap();
        assert_eq!(cfg.functions.len(), 2);
        assert_eq!(cfg.functions[1].text, "exp(x)");
        assert_eq!(cfg.intervals, vec![(0.0, 1.0)]);
        assert_eq!(cfg.m_grid, vec![0.5, 1.0]);
        assert_eq!(cfg.q_grid, vec![1.0, 2.0]);
        assert_eq!(cfg.s_grid, DEFAULT_S_GRID.to_vec());
        assert_eq!(cfg.theorems, vec![TheoremTag::Thm21, TheoremTag::Thm22]);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.grid_n, 16);
        assert_eq!(cfg.gamma_mode, GammaMode::AsPrinted);
        assert_eq!(
            cfg.variant,
            VariantPolicy::Fixed(MidpointVariant::Corrected)
        );
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.out, Some(PathBuf::from("r.json")));
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            RunConfig::parse("interval = 0, 1\n"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn line_errors_carry_line_numbers() {
        let cases = [
            ("function = x^4\nbogus\n", 2),
            ("function = x^\n", 1),
            ("function = x\ninterval = 0\n", 2),
            ("function = x\nm = a\n", 2),
            ("function = x\ncolour = red\n", 2),
            ("function = x\nq =\n", 2),
            ("function = x\ntheorem = thm99\n", 2),
        ];
        for (text, want) in cases {
            match RunConfig::parse(text) {
                Err(ConfigError::Line { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: expected line error, got {other:?}"),
            }
        }
    }

    #[test]
    fn validation_limits() {
        for text in [
            "function = x\nm = 1.5\n",
            "function = x\nq = 0.5\n",
            "function = x\ns = 0\n",
            "function = x\ntol = 0\n",
            "function = x\ngrid_n = 4\n",
            "function = x\ninterval = 1, 1\n",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(ConfigError::Invalid(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }
}
