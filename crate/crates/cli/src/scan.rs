//! Corpus-wide sharpness scans.

use crate::config::{RunConfig, VariantPolicy};
use crate::lemma::{lemma_cases, resolve_variant};
use crate::CliError;
use serde::Serialize;
use simpson_core::bounds::{BoundParams, BoundReport, EvalOptions, Evaluator, TheoremTag};
use simpson_core::{Expr, MidpointVariant};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{self, Write};

pub const CSV_HEADER: &str =
    "function,a,b,m,q,s,theorem,variant,defect_abs,bound,slack_ratio,certified,error";

/// Certified rows may exceed a slack of 1 by at most this much.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    /// `None` for theorems that do not depend on `q`.
    pub q: Option<f64>,
    /// `None` for theorems without an `s` parameter.
    pub s: Option<f64>,
    pub theorem: TheoremTag,
    pub variant: MidpointVariant,
    pub defect_abs: Option<f64>,
    pub bound: Option<f64>,
    pub slack_ratio: Option<f64>,
    pub certified: bool,
    pub error: Option<String>,
}

impl ScanRow {
    fn skeleton(function: &str, p: &BoundParams, tag: TheoremTag) -> ScanRow {
        ScanRow {
            function: function.to_string(),
            a: p.a,
            b: p.b,
            m: p.m,
            q: tag.uses_q().then_some(p.q),
            s: s_column(tag, p.s),
            theorem: tag,
            variant: p.midpoint_variant,
            defect_abs: None,
            bound: None,
            slack_ratio: None,
            certified: false,
            error: None,
        }
    }

    pub fn from_report(function: &str, report: &BoundReport) -> ScanRow {
        ScanRow {
            defect_abs: Some(report.defect_abs),
            bound: Some(report.bound),
            slack_ratio: Some(report.slack_ratio),
            certified: report.certified(),
            ..ScanRow::skeleton(function, &report.params, report.theorem)
        }
    }

    pub fn from_error(
        function: &str,
        params: &BoundParams,
        tag: TheoremTag,
        err: &simpson_core::Error,
    ) -> ScanRow {
        ScanRow {
            error: Some(err.to_string()),
            ..ScanRow::skeleton(function, params, tag)
        }
    }

    /// A certified row whose defect exceeds its bound.
    pub fn violates_dominance(&self) -> bool {
        match (self.certified, self.defect_abs, self.bound) {
            (true, Some(d), Some(b)) => d > b + DOMINANCE_TOL,
            _ => false,
        }
    }

    fn sort_key_cmp(&self, other: &ScanRow) -> Ordering {
        let opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(x), Some(y)) => x.total_cmp(&y),
        };
        self.function
            .cmp(&other.function)
            .then(self.a.total_cmp(&other.a))
            .then(self.b.total_cmp(&other.b))
            .then(self.m.total_cmp(&other.m))
            .then(opt(self.q, other.q))
            .then(opt(self.s, other.s))
            .then(self.theorem.as_str().cmp(other.theorem.as_str()))
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.function),
            fmt_float(self.a),
            fmt_float(self.b),
            fmt_float(self.m),
            opt(self.q),
            opt(self.s),
            self.theorem,
            self.variant,
            opt(self.defect_abs),
            opt(self.bound),
            opt(self.slack_ratio),
            self.certified,
            csv_field(self.error.as_deref().unwrap_or("")),
        )
    }
}

fn s_column(tag: TheoremTag, s: f64) -> Option<f64> {
    match tag {
        TheoremTag::Thm11 | TheoremTag::Thm12 => Some(s),
        TheoremTag::Cor11 | TheoremTag::Cor12 => Some(1.0),
        _ => None,
    }
}

/// 17 significant digits, so every value round-trips.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackSummary {
    pub theorem: TheoremTag,
    /// Certified, error-free rows that entered the statistics.
    pub rows: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOutcome {
    pub variant: MidpointVariant,
    pub rows: Vec<ScanRow>,
    pub summary: Vec<SlackSummary>,
}

impl ScanOutcome {
    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn dominance_violations(&self) -> Vec<&ScanRow> {
        self.rows
            .iter()
            .filter(|r| r.violates_dominance())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(w, "{}", row.to_csv())?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theorem,rows,min_slack,median_slack,max_slack")?;
        for s in &self.summary {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.theorem,
                s.rows,
                fmt_float(s.min),
                fmt_float(s.median),
                fmt_float(s.max)
            )?;
        }
        Ok(())
    }
}

fn summarize(rows: &[ScanRow]) -> Vec<SlackSummary> {
    let mut by_tag: BTreeMap<&str, (TheoremTag, Vec<f64>)> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.certified && r.error.is_none()) {
        if let Some(slack) = row.slack_ratio {
            by_tag
                .entry(row.theorem.as_str())
                .or_insert_with(|| (row.theorem, Vec::new()))
                .1
                .push(slack);
        }
    }
    by_tag
        .into_values()
        .map(|(theorem, mut v)| {
            v.sort_by(f64::total_cmp);
            let n = v.len();
            let median = if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            };
            SlackSummary {
                theorem,
                rows: n,
                min: v[0],
                median,
                max: v[n - 1],
            }
        })
        .collect()
}

/// Whether `tag` applies to this tuple. Tuples outside a theorem's stated
/// scope are skipped rather than reported as errors.
fn applicable(e: &Expr, p: &BoundParams, tag: TheoremTag, s_is_first: bool) -> bool {
    if p.m != 1.0 && !tag.allows_m_below_one() {
        return false;
    }
    if tag.allows_m_below_one() && !(p.a >= 0.0 && p.a < p.m * p.b) {
        return false;
    }
    if tag.is_holder() && p.q <= 1.0 {
        return false;
    }
    // Theorems without `s` get one row per tuple, not one per s value.
    if !tag.uses_s() && !s_is_first {
        return false;
    }
    if tag == TheoremTag::Cor13 {
        let d3 = |x: f64| e.derivative(x, 3).map(f64::abs);
        return match (d3(p.a), d3(p.b), d3(0.5 * (p.a + p.b))) {
            (Ok(fa), Ok(fb), Ok(mid)) => mid <= 1e-12 * 1f64.max(fa).max(fb),
            // let the evaluator report the failure on the row
            _ => true,
        };
    }
    true
}

/// Evaluate every applicable (function, interval, m, q, s, theorem) tuple.
pub fn run_scan(cfg: &RunConfig) -> Result<ScanOutcome, CliError> {
    cfg.validate()?;
    let variant = match cfg.variant {
        VariantPolicy::Fixed(v) => v,
        VariantPolicy::Adjudicate => resolve_variant(&lemma_cases(cfg), cfg.tol)?,
    };
    let opts = EvalOptions {
        tol: cfg.tol,
        grid_n: cfg.grid_n,
        cert_tol: cfg.cert_tol,
    };

    let mut rows = Vec::new();
    for entry in &cfg.functions {
        let mut evaluator = Evaluator::new(&entry.expr, opts);
        for &(a, b) in &cfg.intervals {
            for &m in &cfg.m_grid {
                for (qi, &q) in cfg.q_grid.iter().enumerate() {
                    for (si, &s) in cfg.s_grid.iter().enumerate() {
                        for &tag in &cfg.theorems {
                            if !tag.uses_q() && qi > 0 {
                                continue;
                            }
                            let params = BoundParams {
                                m,
                                q: if tag.uses_q() { q } else { 1.0 },
                                s: if tag.uses_s() { s } else { 1.0 },
                                gamma_mode: cfg.gamma_mode,
                                midpoint_variant: variant,
                                ..BoundParams::new(a, b)
                            };
                            if !applicable(&entry.expr, &params, tag, si == 0) {
                                continue;
                            }
                            rows.push(match evaluator.evaluate(&params, tag) {
                                Ok(report) => ScanRow::from_report(&entry.text, &report),
                                Err(e) => ScanRow::from_error(&entry.text, &params, tag, &e),
                            });
                        }
                    }
                }
            }
        }
    }
    rows.sort_by(ScanRow::sort_key_cmp);
    // identical tuples can only arise from duplicated grid values
    rows.dedup_by(|x, y| x.sort_key_cmp(y) == Ordering::Equal);
    let summary = summarize(&rows);
    Ok(ScanOutcome {
        variant,
        rows,
        summary,
    })
}
