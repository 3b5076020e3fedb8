//! The Simpson Peano kernel and the kernel identity.
//!
//! For `f'''` absolutely continuous on the range,
//!
//! ```text
//! ∫_a^{mb} f − ((mb−a)/6)[f(a) + 4 f(mid) + f(mb)] = (mb−a)^4 ∫_0^1 p(t) f'''(t·a + m(1−t)·b) dt
//! ```
//!
//! with the piecewise cubic
//!
//! ```text
//! p(t) = t²(t − 1/2)/6        on [0, 1/2]
//! p(t) = (t − 1)²(t − 1/2)/6  on (1/2, 1]
//! ```
//!
//! The substitution `x = t·a + m(1−t)·b` sends `t = 1/2` to `(a + m·b)/2`, so
//! only the [`MidpointVariant::Corrected`] node can satisfy the identity once
//! `m < 1`. [`adjudicate`] decides this numerically rather than by assumption.

use crate::gamma::{gamma, ln_gamma};
use crate::quad::integrate;
use crate::{Error, Expr, MidpointVariant, Result};
use serde::{Deserialize, Serialize};

/// Residual below which the identity counts as holding.
pub const LEMMA_THRESHOLD: f64 = 1e-9;

/// Largest exponent accepted by [`kernel_moment`].
pub const MAX_MOMENT_EXPONENT: f64 = 50.0;

/// `p(t)`. The branches meet at `t = 1/2`, where both vanish.
pub fn kernel(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(t));
    }
    Ok(if t <= 0.5 {
        t * t * (t - 0.5) / 6.0
    } else {
        (t - 1.0) * (t - 1.0) * (t - 0.5) / 6.0
    })
}

/// `∫_0^{1/2} (t²(1/2 − t))^p dt = Γ(2p+1)Γ(p+1) / (2^{3p+1} Γ(3p+2))`.
///
/// Substituting `t = u/2` turns the integral into `2^{-(3p+1)} B(2p+1, p+1)`.
/// By the reflection `t ↦ 1 − t` the same value is the moment of the right
/// branch `((1−t)²(t − 1/2))^p` over `[1/2, 1]`.
pub fn kernel_moment(p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "moment exponent must be at least 1, got {p}"
        )));
    }
    if p > MAX_MOMENT_EXPONENT {
        return Err(Error::InvalidParameter(format!(
            "moment exponent {p} exceeds {MAX_MOMENT_EXPONENT}"
        )));
    }
    if p.fract() == 0.0 && 3.0 * p + 2.0 <= 21.0 {
        // factorials are exact here, so small integer moments come out correctly rounded
        return Ok(gamma(2.0 * p + 1.0) * gamma(p + 1.0)
            / (gamma(3.0 * p + 2.0) * 2f64.powf(3.0 * p + 1.0)));
    }
    let ln = ln_gamma(2.0 * p + 1.0) + ln_gamma(p + 1.0)
        - ln_gamma(3.0 * p + 2.0)
        - (3.0 * p + 1.0) * std::f64::consts::LN_2;
    Ok(ln.exp())
}

/// `(∫_0^{1/2} t²(1/2−t)·t dt, ∫_0^{1/2} t²(1/2−t)·(1−t) dt) = (3/1920, 7/1920)`.
///
/// These are the weights an m-convex (or convex) majorant of `|f'''|^q`
/// picks up against `|p|` on one half of the kernel.
pub fn weighted_moments() -> (f64, f64) {
    (3.0 / 1920.0, 7.0 / 1920.0)
}

/// Both sides of the kernel identity for one function and parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub variant: MidpointVariant,
    pub a: f64,
    pub b: f64,
    pub m: f64,
}

impl LemmaResidual {
    pub fn holds(&self) -> bool {
        self.residual < LEMMA_THRESHOLD
    }
}

/// `(mb − a)^4 ∫_0^1 p(t) f'''(t·a + m(1−t)·b) dt`, split at the kernel's kink.
pub fn kernel_side(e: &Expr, a: f64, b: f64, m: f64, tol: f64) -> Result<f64> {
    let third = |t: f64| -> Result<f64> {
        let x = t * a + m * (1.0 - t) * b;
        Ok(kernel(t)? * e.derivative(x, 3)?)
    };
    let left = integrate(third, 0.0, 0.5, 0.5 * tol)?;
    let right = integrate(third, 0.5, 1.0, 0.5 * tol)?;
    Ok((m * b - a).powi(4) * (left.value + right.value))
}

pub fn verify_lemma(
    e: &Expr,
    a: f64,
    b: f64,
    m: f64,
    variant: MidpointVariant,
    tol: f64,
) -> Result<LemmaResidual> {
    let defect = crate::quad::simpson_defect(|x| e.eval(x), a, b, m, variant, tol)?;
    let rhs = kernel_side(e, a, b, m, tol)?;
    Ok(LemmaResidual {
        lhs: defect.value,
        rhs,
        residual: (defect.value - rhs).abs(),
        variant,
        a,
        b,
        m,
    })
}

/// One function and parameter set to test the identity on.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCase {
    pub label: String,
    pub expr: Expr,
    pub a: f64,
    pub b: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjudicationRow {
    pub label: String,
    #[serde(flatten)]
    pub residual: LemmaResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    /// The single variant that satisfies the identity on every case, if any.
    pub winner: Option<MidpointVariant>,
    pub threshold: f64,
    pub rows: Vec<AdjudicationRow>,
}

impl Adjudication {
    pub fn variant_holds(&self, variant: MidpointVariant) -> bool {
        self.rows
            .iter()
            .filter(|r| r.residual.variant == variant)
            .all(|r| r.residual.holds())
    }
}

/// Run the identity for both midpoint variants on every case.
///
/// The winner is the variant whose residuals all stay below
/// [`LEMMA_THRESHOLD`] while the other variant fails somewhere. When both or
/// neither pass (for instance when every case has `m = 1`), there is no winner.
pub fn adjudicate(cases: &[LemmaCase], tol: f64) -> Result<Adjudication> {
    let mut rows = Vec::with_capacity(2 * cases.len());
    for case in cases {
        for variant in MidpointVariant::ALL {
            let residual = verify_lemma(&case.expr, case.a, case.b, case.m, variant, tol)?;
            rows.push(AdjudicationRow {
                label: case.label.clone(),
                residual,
            });
        }
    }
    let mut adj = Adjudication {
        winner: None,
        threshold: LEMMA_THRESHOLD,
        rows,
    };
    let passing: Vec<_> = MidpointVariant::ALL
        .into_iter()
        .filter(|&v| adj.variant_holds(v))
        .collect();
    if let [only] = passing[..] {
        adj.winner = Some(only);
    }
    Ok(adj)
}
