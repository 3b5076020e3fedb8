//! Right-hand sides of the Simpson-type inequalities and their evaluation
//! against the measured defect.
//!
//! Notation shared by every formula: `A = |f'''(a)|`, `B = |f'''(b)|`,
//! `Mid = |f'''((a+b)/2)|`, `sup_d4 = sup |f''''|`, and `p = q/(q−1)` on the
//! Hölder paths.
//!
//! | tag         | hypothesis on `g = |f'''|^q`     | range     | exponent |
//! |-------------|----------------------------------|-----------|----------|
//! | `classical` | `f''''` bounded                  | `[a, b]`  | –        |
//! | `thm11`     | s-convex, Hölder                 | `[a, b]`  | `q > 1`  |
//! | `thm12`     | s-convex, power mean             | `[a, b]`  | `q ≥ 1`  |
//! | `thm13`     | `|f'''|` a P-function            | `[a, b]`  | –        |
//! | `thm21`     | m-convex on `[0, b]`, Hölder     | `[a, mb]` | `q > 1`  |
//! | `thm22`     | m-convex on `[0, b]`, power mean | `[a, mb]` | `q ≥ 1`  |
//! | `cor11`     | convex, Hölder                   | `[a, b]`  | `q > 1`  |
//! | `cor12`     | convex, power mean               | `[a, b]`  | `q ≥ 1`  |
//! | `cor13`     | P-function with `f'''(mid) = 0`  | `[a, b]`  | –        |
//!
//! `thm22` is stated with `(mb − a)^4`; intermediate steps of its derivation
//! carry `(b − a)^4`, and the statement's factor is the one used here.

use crate::convexity::{
    build_g, certify_m_convex, certify_p_function, certify_s_convex, ConvexityCertificate,
    DEFAULT_CERT_TOL, DEFAULT_GRID_N,
};
use crate::gamma::ln_gamma;
use crate::quad::{simpson_defect, sup_abs_derivative, DEFAULT_TOL};
use crate::{Error, Expr, MidpointVariant, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Which Gamma argument the denominator of the m-convex Hölder constant uses.
///
/// `Validated` is `Γ(3p+2)`, which the Beta-function evaluation of the kernel
/// moment produces. `AsPrinted` is `Γ(3p+1)`, kept only to reproduce the
/// literal constant; it inflates the bound by `(3p+1)^{1/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    #[default]
    Validated,
    AsPrinted,
}

impl GammaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GammaMode::Validated => "validated",
            GammaMode::AsPrinted => "as-printed",
        }
    }
}

impl FromStr for GammaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validated" => Ok(GammaMode::Validated),
            "as-printed" | "as_printed" => Ok(GammaMode::AsPrinted),
            other => Err(Error::InvalidParameter(format!(
                "unknown gamma mode `{other}` (expected validated|as-printed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremTag {
    Classical,
    Thm11,
    Thm12,
    Thm13,
    Thm21,
    Thm22,
    Cor11,
    Cor12,
    Cor13,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 9] = [
        TheoremTag::Classical,
        TheoremTag::Thm11,
        TheoremTag::Thm12,
        TheoremTag::Thm13,
        TheoremTag::Thm21,
        TheoremTag::Thm22,
        TheoremTag::Cor11,
        TheoremTag::Cor12,
        TheoremTag::Cor13,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::Classical => "classical",
            TheoremTag::Thm11 => "thm11",
            TheoremTag::Thm12 => "thm12",
            TheoremTag::Thm13 => "thm13",
            TheoremTag::Thm21 => "thm21",
            TheoremTag::Thm22 => "thm22",
            TheoremTag::Cor11 => "cor11",
            TheoremTag::Cor12 => "cor12",
            TheoremTag::Cor13 => "cor13",
        }
    }

    /// Hölder paths need `q > 1`.
    pub fn is_holder(self) -> bool {
        matches!(
            self,
            TheoremTag::Thm11 | TheoremTag::Thm21 | TheoremTag::Cor11
        )
    }

    /// Whether the bound depends on `q` at all.
    pub fn uses_q(self) -> bool {
        !matches!(
            self,
            TheoremTag::Classical | TheoremTag::Thm13 | TheoremTag::Cor13
        )
    }

    /// Only the m-convex theorems accept `m < 1`.
    pub fn allows_m_below_one(self) -> bool {
        matches!(self, TheoremTag::Thm21 | TheoremTag::Thm22)
    }

    /// Theorems parameterised by a free `s`.
    pub fn uses_s(self) -> bool {
        matches!(self, TheoremTag::Thm11 | TheoremTag::Thm12)
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown theorem `{s}` (expected one of classical, thm11, thm12, thm13, \
                     thm21, thm22, cor11, cor12, cor13)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub q: f64,
    pub s: f64,
    /// `|f'''(a)|`
    pub d3_a: f64,
    /// `|f'''(b)|`
    pub d3_b: f64,
    /// `|f'''((a+b)/2)|`
    pub d3_mid: f64,
    /// `sup |f''''|` on `[a, b]`
    pub sup_d4: f64,
    pub gamma_mode: GammaMode,
    pub midpoint_variant: MidpointVariant,
}

impl BoundParams {
    /// `m = q = s = 1`, zero derivative data, validated Gamma mode and the
    /// corrected midpoint.
    pub fn new(a: f64, b: f64) -> Self {
        BoundParams {
            a,
            b,
            m: 1.0,
            q: 1.0,
            s: 1.0,
            d3_a: 0.0,
            d3_b: 0.0,
            d3_mid: 0.0,
            sup_d4: 0.0,
            gamma_mode: GammaMode::Validated,
            midpoint_variant: MidpointVariant::Corrected,
        }
    }

    /// Hölder conjugate `q/(q−1)`, defined for `q > 1`.
    pub fn conjugate_p(&self) -> Option<f64> {
        (self.q > 1.0).then(|| self.q / (self.q - 1.0))
    }

    fn check_data(&self) -> Result<()> {
        for (name, v) in [
            ("|f'''(a)|", self.d3_a),
            ("|f'''(b)|", self.d3_b),
            ("|f'''(mid)|", self.d3_mid),
            ("sup |f''''|", self.sup_d4),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn check_interval(&self) -> Result<f64> {
        if !(self.a < self.b) {
            return Err(Error::InvalidInterval {
                lo: self.a,
                hi: self.b,
            });
        }
        Ok(self.b - self.a)
    }

    fn check_m_interval(&self) -> Result<f64> {
        if !(self.m > 0.0 && self.m <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "m must lie in (0, 1], got {}",
                self.m
            )));
        }
        let hi = self.m * self.b;
        if !(self.a < hi) {
            return Err(Error::InvalidInterval { lo: self.a, hi });
        }
        Ok(hi - self.a)
    }

    fn check_s(&self) -> Result<()> {
        if self.s > 0.0 && self.s <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "s must lie in (0, 1], got {}",
                self.s
            )))
        }
    }

    fn holder_p(&self) -> Result<f64> {
        if !self.q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "q must be finite, got {}",
                self.q
            )));
        }
        self.conjugate_p().ok_or_else(|| {
            Error::Precondition(format!(
                "Hölder bounds need q > 1 (conjugate exponent p = q/(q-1)), got q = {}",
                self.q
            ))
        })
    }

    fn powermean_q(&self) -> Result<f64> {
        if self.q >= 1.0 && self.q.is_finite() {
            Ok(self.q)
        } else {
            Err(Error::InvalidParameter(format!(
                "power-mean bounds need q >= 1, got {}",
                self.q
            )))
        }
    }
}

/// `sup_d4 · (b − a)^5 / 2880`.
pub fn classical_bound(sup_d4: f64, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidInterval { lo: a, hi: b });
    }
    if !(sup_d4 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sup |f''''| must be non-negative, got {sup_d4}"
        )));
    }
    Ok(sup_d4 * (b - a).powi(5) / 2880.0)
}

/// `Γ(2p+1)Γ(p+1)/Γ(3p+2)` (validated) or `Γ(2p+1)Γ(p+1)/Γ(3p+1)` (as printed).
pub fn holder_constant(p: f64, mode: GammaMode) -> f64 {
    let denom = match mode {
        GammaMode::Validated => ln_gamma(3.0 * p + 2.0),
        GammaMode::AsPrinted => ln_gamma(3.0 * p + 1.0),
    };
    (ln_gamma(2.0 * p + 1.0) + ln_gamma(p + 1.0) - denom).exp()
}

fn mean_root(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else {
        x.powf(1.0 / q)
    }
}

/// Hölder bound for m-convex `|f'''|^q`:
///
/// `((mb−a)^4/96) · C(p)^{1/p} · [((A^q + 3m B^q)/4)^{1/q} + ((3A^q + m B^q)/4)^{1/q}]`.
pub fn holder_m_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let p = params.holder_p()?;
    let len = params.check_m_interval()?;
    let (q, m) = (params.q, params.m);
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    let c = holder_constant(p, params.gamma_mode).powf(1.0 / p);
    Ok(len.powi(4) / 96.0
        * c
        * (mean_root((aq + 3.0 * m * bq) / 4.0, q) + mean_root((3.0 * aq + m * bq) / 4.0, q)))
}

/// Power-mean bound for m-convex `|f'''|^q`:
///
/// `((mb−a)^4/1152) · [((3A^q + 7m B^q)/10)^{1/q} + ((7A^q + 3m B^q)/10)^{1/q}]`.
pub fn powermean_m_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let q = params.powermean_q()?;
    let len = params.check_m_interval()?;
    let m = params.m;
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    Ok(len.powi(4) / 1152.0
        * (mean_root((3.0 * aq + 7.0 * m * bq) / 10.0, q)
            + mean_root((7.0 * aq + 3.0 * m * bq) / 10.0, q)))
}

/// `(∫_0^{1/2} t^s dt, ∫_0^{1/2} (1−t)^s dt) = (1/(2^{s+1}(s+1)), (2^{s+1}−1)/(2^{s+1}(s+1)))`.
pub fn holder_s_weights(s: f64) -> (f64, f64) {
    let pow = 2f64.powf(s + 1.0);
    (1.0 / (pow * (s + 1.0)), (pow - 1.0) / (pow * (s + 1.0)))
}

/// Hölder bound for s-convex `|f'''|^q`:
///
/// `((b−a)^4/48)(1/2)^{1/p} C(p)^{1/p} · {[w₁A^q + w₂B^q]^{1/q} + [w₂A^q + w₁B^q]^{1/q}}`
/// with `(w₁, w₂)` from [`holder_s_weights`] and `C(p)` using `Γ(3p+2)`.
pub fn holder_s_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    params.check_s()?;
    let p = params.holder_p()?;
    let len = params.check_interval()?;
    let q = params.q;
    let (w1, w2) = holder_s_weights(params.s);
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    let c = holder_constant(p, GammaMode::Validated).powf(1.0 / p);
    Ok(len.powi(4) / 48.0
        * 0.5f64.powf(1.0 / p)
        * c
        * (mean_root(w1 * aq + w2 * bq, q) + mean_root(w2 * aq + w1 * bq, q)))
}

/// `(α, β)` with `α = 2^{-4-s}/((3+s)(4+s))` and
/// `β = 2^{-4-s}(34 + 2^{4+s}(s−2) + 11s + s²)/((1+s)(2+s)(3+s)(4+s))`,
/// the moments of `t²(1/2−t)` against `t^s` and `(1−t)^s` on `[0, 1/2]`.
pub fn powermean_s_weights(s: f64) -> (f64, f64) {
    let scale = 2f64.powf(-4.0 - s);
    let alpha = scale / ((3.0 + s) * (4.0 + s));
    let beta = scale * (34.0 + 2f64.powf(4.0 + s) * (s - 2.0) + 11.0 * s + s * s)
        / ((1.0 + s) * (2.0 + s) * (3.0 + s) * (4.0 + s));
    (alpha, beta)
}

/// Power-mean bound for s-convex `|f'''|^q`:
///
/// `((b−a)^4/6)(1/192)^{1−1/q} · {(αA^q + βB^q)^{1/q} + (βA^q + αB^q)^{1/q}}`.
pub fn powermean_s_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    params.check_s()?;
    let q = params.powermean_q()?;
    let len = params.check_interval()?;
    let (alpha, beta) = powermean_s_weights(params.s);
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    Ok(len.powi(4) / 6.0
        * (1.0 / 192.0f64).powf(1.0 - 1.0 / q)
        * (mean_root(alpha * aq + beta * bq, q) + mean_root(beta * aq + alpha * bq, q)))
}

/// `(b−a)^4 (A + Mid + B) / 1152`.
pub fn p_convex_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let len = params.check_interval()?;
    Ok(len.powi(4) * (params.d3_a + params.d3_mid + params.d3_b) / 1152.0)
}

/// Hölder bound for convex `|f'''|^q`:
///
/// `((b−a)^4/96)(1/4)^{1/q} C(p)^{1/p} {(A^q + 3B^q)^{1/q} + (3A^q + B^q)^{1/q}}`.
pub fn holder_convex_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let p = params.holder_p()?;
    let len = params.check_interval()?;
    let q = params.q;
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    let c = holder_constant(p, GammaMode::Validated).powf(1.0 / p);
    Ok(len.powi(4) / 96.0
        * 0.25f64.powf(1.0 / q)
        * c
        * (mean_root(aq + 3.0 * bq, q) + mean_root(3.0 * aq + bq, q)))
}

/// Power-mean bound for convex `|f'''|^q`:
///
/// `((b−a)^4/1152) {((3A^q + 7B^q)/10)^{1/q} + ((7A^q + 3B^q)/10)^{1/q}}`.
pub fn powermean_convex_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let q = params.powermean_q()?;
    let len = params.check_interval()?;
    let aq = params.d3_a.powf(q);
    let bq = params.d3_b.powf(q);
    Ok(len.powi(4) / 1152.0
        * (mean_root((3.0 * aq + 7.0 * bq) / 10.0, q) + mean_root((7.0 * aq + 3.0 * bq) / 10.0, q)))
}

/// `(b−a)^4 (A + B) / 1152`; the P-function bound once `f'''(mid) = 0`, and the
/// convex power-mean bound at `q = 1`.
pub fn endpoint_bound(params: &BoundParams) -> Result<f64> {
    params.check_data()?;
    let len = params.check_interval()?;
    Ok(len.powi(4) * (params.d3_a + params.d3_b) / 1152.0)
}

/// Right-hand side for `tag`, from the data already stored in `params`.
pub fn bound_value(tag: TheoremTag, params: &BoundParams) -> Result<f64> {
    match tag {
        TheoremTag::Classical => classical_bound(params.sup_d4, params.a, params.b),
        TheoremTag::Thm11 => holder_s_bound(params),
        TheoremTag::Thm12 => powermean_s_bound(params),
        TheoremTag::Thm13 => p_convex_bound(params),
        TheoremTag::Thm21 => holder_m_bound(params),
        TheoremTag::Thm22 => powermean_m_bound(params),
        TheoremTag::Cor11 => holder_convex_bound(params),
        TheoremTag::Cor12 => powermean_convex_bound(params),
        TheoremTag::Cor13 => endpoint_bound(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Oracle tolerance for the defect integral.
    pub tol: f64,
    pub grid_n: usize,
    pub cert_tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: DEFAULT_TOL,
            grid_n: DEFAULT_GRID_N,
            cert_tol: DEFAULT_CERT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremTag,
    /// Signed defect on the theorem's range.
    pub defect: f64,
    pub defect_abs: f64,
    pub bound: f64,
    pub slack_ratio: f64,
    pub oracle_error_estimate: f64,
    pub params: BoundParams,
    pub certificate: Option<ConvexityCertificate>,
}

impl BoundReport {
    /// The hypothesis held on the grid, or the theorem has no convexity
    /// hypothesis to check.
    pub fn certified(&self) -> bool {
        self.certificate
            .as_ref()
            .map_or(true, ConvexityCertificate::is_certified)
    }
}

/// `|defect| / bound`. A zero bound gives 0 when the defect is within the
/// oracle tolerance of zero and `+inf` otherwise.
pub fn slack_ratio(defect_abs: f64, bound: f64, tol: f64) -> f64 {
    if bound > 0.0 {
        defect_abs / bound
    } else if defect_abs <= tol {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CertKey {
    M { m: u64, q: u64, b_star: u64 },
    S { s: u64, q: u64, a: u64, b: u64 },
    P { a: u64, b: u64 },
}

/// Evaluates bounds for one expression, reusing convexity certificates across
/// calls that share the hypothesis.
pub struct Evaluator<'e> {
    expr: &'e Expr,
    opts: EvalOptions,
    certs: HashMap<CertKey, ConvexityCertificate>,
}

impl<'e> Evaluator<'e> {
    pub fn new(expr: &'e Expr, opts: EvalOptions) -> Self {
        Evaluator {
            expr,
            opts,
            certs: HashMap::new(),
        }
    }

    fn certificate(&mut self, key: CertKey) -> Result<ConvexityCertificate> {
        if let Some(c) = self.certs.get(&key) {
            return Ok(c.clone());
        }
        let (grid_n, tol) = (self.opts.grid_n, self.opts.cert_tol);
        let cert = match key {
            CertKey::M { m, q, b_star } => {
                let g = build_g(self.expr, f64::from_bits(q))?;
                certify_m_convex(g, f64::from_bits(b_star), f64::from_bits(m), grid_n, tol)?
            }
            CertKey::S { s, q, a, b } => {
                let g = build_g(self.expr, f64::from_bits(q))?;
                certify_s_convex(
                    g,
                    f64::from_bits(a),
                    f64::from_bits(b),
                    f64::from_bits(s),
                    grid_n,
                    tol,
                )?
            }
            CertKey::P { a, b } => {
                let g = build_g(self.expr, 1.0)?;
                certify_p_function(g, f64::from_bits(a), f64::from_bits(b), grid_n, tol)?
            }
        };
        self.certs.insert(key, cert.clone());
        Ok(cert)
    }

    /// Derivative data, hypothesis certificate, defect and bound for `tag`.
    pub fn evaluate(&mut self, params: &BoundParams, tag: TheoremTag) -> Result<BoundReport> {
        let mut p = *params;
        check_tag_preconditions(&mut p, tag)?;

        let e = self.expr;
        let d3 = |x: f64| -> Result<f64> { Ok(e.derivative(x, 3)?.abs()) };
        p.d3_a = d3(p.a)?;
        p.d3_b = d3(p.b)?;
        p.d3_mid = d3(0.5 * (p.a + p.b))?;
        p.sup_d4 = if tag == TheoremTag::Classical {
            sup_abs_derivative(e, 4, p.a, p.b)?
        } else {
            0.0
        };

        if tag == TheoremTag::Cor13 {
            let scale = 1f64.max(p.d3_a).max(p.d3_b);
            if p.d3_mid > 1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "cor13 needs f'''((a+b)/2) = 0, got |f'''| = {}",
                    p.d3_mid
                )));
            }
        }

        let bits = f64::to_bits;
        let certificate = match tag {
            TheoremTag::Classical => None,
            TheoremTag::Thm21 | TheoremTag::Thm22 => Some(self.certificate(CertKey::M {
                m: bits(p.m),
                q: bits(p.q),
                b_star: bits(p.b),
            })?),
            TheoremTag::Thm11 | TheoremTag::Thm12 | TheoremTag::Cor11 | TheoremTag::Cor12 => {
                Some(self.certificate(CertKey::S {
                    s: bits(p.s),
                    q: bits(p.q),
                    a: bits(p.a),
                    b: bits(p.b),
                })?)
            }
            TheoremTag::Thm13 | TheoremTag::Cor13 => Some(self.certificate(CertKey::P {
                a: bits(p.a),
                b: bits(p.b),
            })?),
        };

        let bound = bound_value(tag, &p)?;
        let defect = simpson_defect(
            |x| e.eval(x),
            p.a,
            p.b,
            p.m,
            p.midpoint_variant,
            self.opts.tol,
        )?;

        Ok(BoundReport {
            theorem: tag,
            defect: defect.value,
            defect_abs: defect.abs_value,
            bound,
            slack_ratio: slack_ratio(defect.abs_value, bound, self.opts.tol),
            oracle_error_estimate: defect.oracle_error_estimate,
            params: p,
            certificate,
        })
    }
}

fn check_tag_preconditions(p: &mut BoundParams, tag: TheoremTag) -> Result<()> {
    if !tag.allows_m_below_one() && p.m != 1.0 {
        return Err(Error::Precondition(format!(
            "{tag} is stated for m = 1, got m = {}",
            p.m
        )));
    }
    if matches!(tag, TheoremTag::Cor11 | TheoremTag::Cor12) {
        p.s = 1.0;
    }
    if tag.allows_m_below_one() && p.a < 0.0 {
        return Err(Error::Precondition(format!(
            "{tag} works on [0, b*] and needs a >= 0, got a = {}",
            p.a
        )));
    }
    if tag.is_holder() {
        p.holder_p()?;
    } else if tag.uses_q() {
        p.powermean_q()?;
    }
    if tag.uses_s() {
        p.check_s()?;
    }
    if tag.allows_m_below_one() {
        p.check_m_interval()?;
    } else {
        p.check_interval()?;
    }
    Ok(())
}

/// One-shot evaluation; see [`Evaluator::evaluate`].
pub fn evaluate(
    e: &Expr,
    params: &BoundParams,
    tag: TheoremTag,
    opts: &EvalOptions,
) -> Result<BoundReport> {
    Evaluator::new(e, *opts).evaluate(params, tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;
    use crate::kernel::kernel_moment;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn quartic(q: f64) -> BoundParams {
        BoundParams {
            q,
            d3_a: 0.0,
            d3_b: 24.0,
            d3_mid: 12.0,
            sup_d4: 24.0,
            ..BoundParams::new(0.0, 1.0)
        }
    }

    #[test]
    fn classical_examples() {
        assert!(close(
            classical_bound(24.0, 0.0, 1.0).unwrap(),
            1.0 / 120.0,
            1e-15
        ));
        assert_eq!(classical_bound(0.0, 0.0, 3.0).unwrap(), 0.0);
        let pi = std::f64::consts::PI;
        assert!(close(classical_bound(1.0, 0.0, pi).unwrap(), 0.10625, 1e-4));
        assert!(classical_bound(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn holder_m_quartic_value() {
        let b = holder_m_bound(&quartic(2.0)).unwrap();
        let want = (1.0 / 96.0)
            * (1.0f64 / 105.0).sqrt()
            * ((3.0 * 576.0 / 4.0f64).sqrt() + (576.0 / 4.0f64).sqrt());
        assert!(close(b, want, 1e-14));
        assert!((b - 0.0333).abs() < 1e-4);
        assert!(b >= 1.0 / 120.0);
    }

    #[test]
    fn holder_rejects_q_one() {
        let err = holder_m_bound(&quartic(1.0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("q > 1")));
        assert!(holder_s_bound(&quartic(1.0)).is_err());
        assert!(holder_convex_bound(&quartic(1.0)).is_err());
    }

    #[test]
    fn zero_data_gives_zero_bounds() {
        let p = BoundParams {
            m: 0.5,
            q: 2.0,
            s: 0.5,
            ..BoundParams::new(0.2, 1.5)
        };
        assert_eq!(holder_m_bound(&p).unwrap(), 0.0);
        assert_eq!(powermean_m_bound(&p).unwrap(), 0.0);
        let p1 = BoundParams { m: 1.0, ..p };
        assert_eq!(holder_s_bound(&p1).unwrap(), 0.0);
        assert_eq!(powermean_s_bound(&p1).unwrap(), 0.0);
    }

    #[test]
    fn powermean_quartic_value() {
        assert!(close(
            powermean_m_bound(&quartic(1.0)).unwrap(),
            1.0 / 48.0,
            1e-15
        ));
        assert!(close(
            p_convex_bound(&quartic(1.0)).unwrap(),
            1.0 / 32.0,
            1e-15
        ));
    }

    #[test]
    fn s_weights_at_one() {
        let (w1, w2) = holder_s_weights(1.0);
        assert_eq!((w1, w2), (1.0 / 8.0, 3.0 / 8.0));
        let (alpha, beta) = powermean_s_weights(1.0);
        assert!(close(alpha, 3.0 / 1920.0, 1e-15));
        assert!(close(beta, 7.0 / 1920.0, 1e-15));
    }

    #[test]
    fn holder_s_symmetric_data() {
        let p = BoundParams {
            q: 1.5,
            s: 0.4,
            d3_a: 3.0,
            d3_b: 3.0,
            ..BoundParams::new(0.0, 2.0)
        };
        let (w1, w2) = holder_s_weights(p.s);
        let bracket = (w1 * 3f64.powf(1.5) + w2 * 3f64.powf(1.5)).powf(1.0 / 1.5);
        let pp = p.conjugate_p().unwrap();
        let want = 16.0 / 48.0
            * 0.5f64.powf(1.0 / pp)
            * holder_constant(pp, GammaMode::Validated).powf(1.0 / pp)
            * 2.0
            * bracket;
        assert!(close(holder_s_bound(&p).unwrap(), want, 1e-14));
    }

    #[test]
    fn gamma_modes_differ_by_recurrence_factor() {
        for p in [1.5, 2.0, 3.0] {
            let ratio =
                holder_constant(p, GammaMode::AsPrinted) / holder_constant(p, GammaMode::Validated);
            assert!(close(ratio, 3.0 * p + 1.0, 1e-13));
        }
        let v = holder_m_bound(&quartic(2.0)).unwrap();
        let a = holder_m_bound(&BoundParams {
            gamma_mode: GammaMode::AsPrinted,
            ..quartic(2.0)
        })
        .unwrap();
        assert!(close(a / v, 7f64.sqrt(), 1e-13));
    }

    #[test]
    fn holder_constant_matches_kernel_moment() {
        // (1/96) C(p)^{1/p} = (1/6) kernel_moment(p)^{1/p} 2^{-1/q}
        for p in [1.5, 2.0, 3.0] {
            let q = p / (p - 1.0);
            let lhs = holder_constant(p, GammaMode::Validated).powf(1.0 / p) / 96.0;
            let rhs = kernel_moment(p).unwrap().powf(1.0 / p) / 6.0 * 2f64.powf(-1.0 / q);
            assert!(close(lhs, rhs, 1e-12), "p = {p}");
        }
        // Γ(5)Γ(3)/Γ(8) = 1/105
        assert!(close(
            holder_constant(2.0, GammaMode::Validated),
            1.0 / 105.0,
            1e-14
        ));
        assert!(close(
            holder_constant(2.0, GammaMode::Validated),
            gamma(5.0) * gamma(3.0) / gamma(8.0),
            1e-14
        ));
    }

    #[test]
    fn negative_data_rejected() {
        let p = BoundParams {
            d3_a: -1.0,
            ..BoundParams::new(0.0, 1.0)
        };
        assert!(powermean_m_bound(&p).is_err());
        assert!(p_convex_bound(&p).is_err());
    }

    #[test]
    fn tag_round_trip() {
        for t in TheoremTag::ALL {
            assert_eq!(t.as_str().parse::<TheoremTag>().unwrap(), t);
        }
        assert!("thm31".parse::<TheoremTag>().is_err());
    }

    #[test]
    fn slack_conventions() {
        assert_eq!(slack_ratio(0.0, 0.0, 1e-11), 0.0);
        assert_eq!(slack_ratio(1e-16, 0.0, 1e-11), 0.0);
        assert_eq!(slack_ratio(1e-3, 0.0, 1e-11), f64::INFINITY);
        assert_eq!(slack_ratio(1.0, 4.0, 1e-11), 0.25);
    }

    #[test]
    fn evaluate_quartic_powermean() {
        let e = Expr::parse("x^4").unwrap();
        let opts = EvalOptions {
            grid_n: 16,
            ..EvalOptions::default()
        };
        let r = evaluate(&e, &BoundParams::new(0.0, 1.0), TheoremTag::Thm22, &opts).unwrap();
        assert!(close(r.defect, -1.0 / 120.0, 1e-12));
        assert!(close(r.bound, 1.0 / 48.0, 1e-14));
        assert!((r.slack_ratio - 0.4).abs() < 1e-10);
        assert!(r.certified());
        assert_eq!(r.params.d3_b, 24.0);
    }

    #[test]
    fn evaluate_classical_is_tight_on_quartic() {
        let e = Expr::parse("x^4").unwrap();
        let r = evaluate(
            &e,
            &BoundParams::new(0.0, 1.0),
            TheoremTag::Classical,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!((r.slack_ratio - 1.0).abs() < 1e-9);
        assert!(r.certificate.is_none());
    }

    #[test]
    fn evaluate_preconditions() {
        let e = Expr::parse("x^4").unwrap();
        let opts = EvalOptions {
            grid_n: 8,
            ..EvalOptions::default()
        };
        let half = BoundParams {
            m: 0.5,
            ..BoundParams::new(0.0, 1.0)
        };
        assert!(matches!(
            evaluate(&e, &half, TheoremTag::Thm12, &opts),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            evaluate(&e, &BoundParams::new(0.0, 1.0), TheoremTag::Thm21, &opts),
            Err(Error::Precondition(_))
        ));
        // f''' = 24x does not vanish at the midpoint
        assert!(matches!(
            evaluate(&e, &BoundParams::new(0.0, 1.0), TheoremTag::Cor13, &opts),
            Err(Error::Precondition(_))
        ));
        let odd = Expr::parse("(x-0.5)^4").unwrap();
        let r = evaluate(&odd, &BoundParams::new(0.0, 1.0), TheoremTag::Cor13, &opts).unwrap();
        assert!(r.bound + 1e-9 >= r.defect_abs);
    }

    #[test]
    fn evaluate_cubic_has_zero_defect() {
        let e = Expr::parse("2*x^3 - x + 1").unwrap();
        let r = evaluate(
            &e,
            &BoundParams::new(0.0, 1.0),
            TheoremTag::Thm22,
            &EvalOptions {
                grid_n: 8,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        assert!(r.defect_abs < 1e-12);
        assert!(close(r.bound, 24.0 / 1152.0, 1e-14));
        assert!(r.slack_ratio < 1e-10);
    }
}
