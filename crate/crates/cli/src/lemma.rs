//! Kernel identity checks over a corpus, and midpoint adjudication.

use crate::config::{RunConfig, VariantPolicy};
use crate::scan::fmt_float;
use crate::CliError;
use serde::Serialize;
use simpson_core::kernel::{adjudicate, Adjudication, LemmaCase};
use simpson_core::MidpointVariant;
use std::io::{self, Write};

pub const LEMMA_CSV_HEADER: &str = "function,a,b,m,variant,lhs,rhs,residual,holds";

/// Every function × interval × m, skipping tuples with `a >= m·b`.
pub fn lemma_cases(cfg: &RunConfig) -> Vec<LemmaCase> {
    let mut cases = Vec::new();
    for entry in &cfg.functions {
        for &(a, b) in &cfg.intervals {
            for &m in &cfg.m_grid {
                if a < m * b {
                    cases.push(LemmaCase {
                        label: entry.text.clone(),
                        expr: entry.expr.clone(),
                        a,
                        b,
                        m,
                    });
                }
            }
        }
    }
    cases
}

/// The adjudicated midpoint for a set of cases. Cases with `m = 1` cannot
/// tell the variants apart, so only `m < 1` cases are consulted; with none
/// left the choice is immaterial and the corrected node is returned.
pub fn resolve_variant(cases: &[LemmaCase], tol: f64) -> Result<MidpointVariant, CliError> {
    let informative: Vec<LemmaCase> = cases.iter().filter(|c| c.m != 1.0).cloned().collect();
    if informative.is_empty() {
        return Ok(MidpointVariant::Corrected);
    }
    adjudicate(&informative, tol)?.winner.ok_or_else(|| {
        CliError::Property("no single midpoint variant satisfies the kernel identity".into())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaOutcome {
    #[serde(flatten)]
    pub adjudication: Adjudication,
    /// The variant whose residuals decide the exit status.
    pub selected: MidpointVariant,
    pub passed: bool,
}

impl LemmaOutcome {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{LEMMA_CSV_HEADER}")?;
        for row in &self.adjudication.rows {
            let r = &row.residual;
            let label = if row.label.contains([',', '"']) {
                format!("\"{}\"", row.label.replace('"', "\"\""))
            } else {
                row.label.clone()
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                label,
                fmt_float(r.a),
                fmt_float(r.b),
                fmt_float(r.m),
                r.variant,
                fmt_float(r.lhs),
                fmt_float(r.rhs),
                fmt_float(r.residual),
                r.holds()
            )?;
        }
        Ok(())
    }
}

/// Both variants on every case. Under `adjudicate` the run passes when a
/// unique winner exists, or when no case has `m < 1` and both variants hold.
pub fn run_verify_lemma(cfg: &RunConfig) -> Result<LemmaOutcome, CliError> {
    cfg.validate()?;
    let cases = lemma_cases(cfg);
    if cases.is_empty() {
        return Err(CliError::Usage("no tuple satisfies a < m·b".into()));
    }
    let adjudication = adjudicate(&cases, cfg.tol)?;
    let (selected, passed) = match (cfg.variant, adjudication.winner) {
        (VariantPolicy::Fixed(v), _) => (v, adjudication.variant_holds(v)),
        (VariantPolicy::Adjudicate, Some(w)) => (w, true),
        (VariantPolicy::Adjudicate, None) => {
            let m_one_only = cases.iter().all(|c| c.m == 1.0);
            let v = MidpointVariant::Corrected;
            (v, m_one_only && adjudication.variant_holds(v))
        }
    };
    Ok(LemmaOutcome {
        adjudication,
        selected,
        passed,
    })
}
