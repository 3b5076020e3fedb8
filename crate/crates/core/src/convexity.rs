//! Grid certification of the hypothesis classes.
//!
//! All three classes share the shape `g(z) ≤ rhs(x, y, t)` over `x, y` in a
//! domain and `t ∈ [0, 1]`:
//!
//! | class            | point `z`              | right-hand side                |
//! |------------------|------------------------|--------------------------------|
//! | m-convex         | `t·x + m(1−t)·y`       | `t·g(x) + m(1−t)·g(y)`         |
//! | s-convex (2nd)   | `t·x + (1−t)·y`        | `t^s·g(x) + (1−t)^s·g(y)`      |
//! | P-function       | `t·x + (1−t)·y`        | `g(x) + g(y)`                  |
//!
//! m-convexity is checked on `[0, b*]`, the others on `[a, b]`. A certificate
//! only says that no triple of the uniform grid violates the inequality by more
//! than the tolerance.
//!
//! A triple violates when `lhs − rhs > tol · max(1, |lhs|, |rhs|)`, so large
//! values of `|f'''|^q` are compared relatively.

use crate::{Error, Expr, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID_N: usize = 64;
pub const DEFAULT_CERT_TOL: f64 = 1e-9;
const MIN_GRID_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ConvexityClass {
    MConvex { m: f64 },
    SConvex { s: f64 },
    PFunction,
}

impl ConvexityClass {
    fn point(self, x: f64, y: f64, t: f64) -> f64 {
        match self {
            ConvexityClass::MConvex { m } => t * x + m * (1.0 - t) * y,
            ConvexityClass::SConvex { .. } | ConvexityClass::PFunction => t * x + (1.0 - t) * y,
        }
    }

    fn rhs(self, gx: f64, gy: f64, t: f64) -> f64 {
        match self {
            ConvexityClass::MConvex { m } => t * gx + m * (1.0 - t) * gy,
            ConvexityClass::SConvex { s } => t.powf(s) * gx + (1.0 - t).powf(s) * gy,
            ConvexityClass::PFunction => gx + gy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
}

/// A grid triple at which the defining inequality fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub class: ConvexityClass,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub domain: (f64, f64),
    pub grid_n: usize,
    pub tol: f64,
}

impl ConvexityCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// Re-evaluate `g` at the witness. `Ok(true)` when it still violates the
    /// inequality beyond the tolerance.
    pub fn witness_reproduces<G>(&self, mut g: G) -> Result<bool>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        let Some(w) = self.witness else {
            return Ok(false);
        };
        let lhs = g(self.class.point(w.x, w.y, w.t))?;
        let rhs = self.class.rhs(g(w.x)?, g(w.y)?, w.t);
        Ok(violates(lhs, rhs, self.tol))
    }
}

fn violates(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs - rhs > tol * 1f64.max(lhs.abs()).max(rhs.abs())
}

/// `x ↦ |f'''(x)|^q`, computed from the jet of `f` so `abs` is never
/// differentiated.
pub fn build_g(e: &Expr, q: f64) -> Result<impl Fn(f64) -> Result<f64> + Clone + '_> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "q must be at least 1, got {q}"
        )));
    }
    Ok(move |x: f64| {
        let d3 = e.derivative(x, 3)?.abs();
        Ok(if q == 1.0 { d3 } else { d3.powf(q) })
    })
}

fn check_grid(grid_n: usize, tol: f64) -> Result<()> {
    if grid_n < MIN_GRID_N {
        return Err(Error::InvalidParameter(format!(
            "grid_n must be at least {MIN_GRID_N}, got {grid_n}"
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    Ok(())
}

fn certify<G>(
    mut g: G,
    class: ConvexityClass,
    lo: f64,
    hi: f64,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityCertificate>
where
    G: FnMut(f64) -> Result<f64>,
{
    check_grid(grid_n, tol)?;
    if !(lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let step = (hi - lo) / grid_n as f64;
    let xs: Vec<f64> = (0..=grid_n)
        .map(|i| {
            if i == grid_n {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect();
    let gs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;
    if class == ConvexityClass::PFunction {
        if let Some((i, v)) = gs.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::Precondition(format!(
                "P-function check needs g >= 0, but g({}) = {v}",
                xs[i]
            )));
        }
    }

    // scan order is fixed (x, then y, then t), so the first witness is reproducible
    let mut witness = None;
    'scan: for (i, &x) in xs.iter().enumerate() {
        for (k, &y) in xs.iter().enumerate() {
            for j in 0..=grid_n {
                let t = j as f64 / grid_n as f64;
                let lhs = g(class.point(x, y, t))?;
                let rhs = class.rhs(gs[i], gs[k], t);
                if violates(lhs, rhs, tol) {
                    witness = Some(Witness { x, y, t, lhs, rhs });
                    break 'scan;
                }
            }
        }
    }

    Ok(ConvexityCertificate {
        class,
        verdict: if witness.is_some() {
            Verdict::Refuted
        } else {
            Verdict::Certified
        },
        witness,
        domain: (lo, hi),
        grid_n,
        tol,
    })
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1], got {v}"
        )))
    }
}

/// m-convexity of `g` on `[0, b_star]`.
pub fn certify_m_convex<G>(
    g: G,
    b_star: f64,
    m: f64,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityCertificate>
where
    G: FnMut(f64) -> Result<f64>,
{
    check_unit("m", m)?;
    if !(b_star > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "b* must be positive, got {b_star}"
        )));
    }
    certify(g, ConvexityClass::MConvex { m }, 0.0, b_star, grid_n, tol)
}

/// s-convexity in the second sense on `[a, b]`.
pub fn certify_s_convex<G>(
    g: G,
    a: f64,
    b: f64,
    s: f64,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityCertificate>
where
    G: FnMut(f64) -> Result<f64>,
{
    check_unit("s", s)?;
    certify(g, ConvexityClass::SConvex { s }, a, b, grid_n, tol)
}

/// P-function property on `[a, b]`. Fails with a precondition error when
/// `g` is negative somewhere on the grid.
pub fn certify_p_function<G>(
    g: G,
    a: f64,
    b: f64,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityCertificate>
where
    G: FnMut(f64) -> Result<f64>,
{
    certify(g, ConvexityClass::PFunction, a, b, grid_n, tol)
}

/// Membership in `K_m(b*)`: m-convex on `[0, b*]` with `g(0) <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmMembership {
    pub certificate: ConvexityCertificate,
    pub value_at_zero: f64,
    pub member: bool,
}

pub fn k_m_membership<G>(
    mut g: G,
    b_star: f64,
    m: f64,
    grid_n: usize,
    tol: f64,
) -> Result<KmMembership>
where
    G: FnMut(f64) -> Result<f64>,
{
    let value_at_zero = g(0.0)?;
    let certificate = certify_m_convex(&mut g, b_star, m, grid_n, tol)?;
    let member = certificate.is_certified() && value_at_zero <= tol;
    Ok(KmMembership {
        certificate,
        value_at_zero,
        member,
    })
}

/// Largest `m` in `{m_step, 2·m_step, …, 1}` for which `g` certifies m-convex
/// on `[0, b_star]`, or 0 when none does.
pub fn max_m<G>(mut g: G, b_star: f64, grid_n: usize, m_step: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(m_step > 0.0 && m_step <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "m_step must lie in (0, 0.5], got {m_step}"
        )));
    }
    for m in m_candidates(m_step).into_iter().rev() {
        if certify_m_convex(&mut g, b_star, m, grid_n, tol)?.is_certified() {
            return Ok(m);
        }
    }
    Ok(0.0)
}

/// `{m_step, 2·m_step, …}` up to and including 1.
pub fn m_candidates(m_step: f64) -> Vec<f64> {
    let count = (1.0 / m_step + 1e-9).floor() as usize;
    let mut ms: Vec<f64> = (1..=count).map(|k| (k as f64 * m_step).min(1.0)).collect();
    if ms.last().map_or(true, |&last| 1.0 - last > 1e-12) {
        ms.push(1.0);
    } else if let Some(last) = ms.last_mut() {
        *last = 1.0;
    }
    ms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    #[test]
    fn build_g_examples() {
        let x4 = Expr::parse("x^4").unwrap();
        let g1 = build_g(&x4, 1.0).unwrap();
        assert_eq!(g1(0.5).unwrap(), 12.0);
        assert_eq!(g1(-0.5).unwrap(), 12.0);
        let g2 = build_g(&x4, 2.0).unwrap();
        assert_eq!(g2(1.0).unwrap(), 576.0);
        let sin = Expr::parse("sin(x)").unwrap();
        let gs = build_g(&sin, 1.0).unwrap();
        for &x in &[0.0, 0.7, 2.0, 3.5] {
            assert!((gs(x).unwrap() - f64::cos(x).abs()).abs() < 1e-15);
        }
        assert!(build_g(&x4, 0.5).is_err());
    }

    #[test]
    fn linear_is_m_convex_for_every_m() {
        for m in [0.1, 0.5, 1.0] {
            let c = certify_m_convex(ok(|x| x), 2.0, m, 16, 1e-9).unwrap();
            assert!(c.is_certified(), "m = {m}");
            assert_eq!(c.witness, None);
        }
    }

    #[test]
    fn shifted_parabola_is_refuted() {
        let g = ok(|x| x * x + 1.0);
        let c = certify_m_convex(&g, 2.0, 0.1, 16, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        let w = c.witness.unwrap();
        assert!(w.excess() > 0.0);
        assert!(c.witness_reproduces(&g).unwrap());
    }

    #[test]
    fn grid_too_small() {
        assert!(certify_m_convex(ok(|x| x), 1.0, 1.0, 4, 1e-9).is_err());
        assert!(certify_m_convex(ok(|x| x), 1.0, 0.0, 16, 1e-9).is_err());
        assert!(certify_s_convex(ok(|x| x), 0.0, 1.0, 1.5, 16, 1e-9).is_err());
    }

    #[test]
    fn s_convex_examples() {
        assert!(certify_s_convex(ok(|x| x), 0.0, 1.0, 1.0, 16, 1e-9)
            .unwrap()
            .is_certified());
        assert!(certify_s_convex(ok(|x| x * x), -1.0, 1.0, 1.0, 16, 1e-9)
            .unwrap()
            .is_certified());
        assert!(
            certify_s_convex(ok(|x: f64| x.sqrt()), 0.0, 1.0, 0.5, 32, 1e-9)
                .unwrap()
                .is_certified()
        );
        // concave and positive: not convex
        let c = certify_s_convex(ok(|x: f64| x.sqrt()), 0.0, 1.0, 1.0, 16, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
    }

    #[test]
    fn p_function_examples() {
        assert!(certify_p_function(ok(|_| 1.0), 0.0, 1.0, 16, 1e-9)
            .unwrap()
            .is_certified());
        assert!(
            certify_p_function(ok(|x| (x - 0.5).powi(2)), 0.0, 1.0, 16, 1e-9)
                .unwrap()
                .is_certified()
        );
        let dip = ok(|x: f64| if (x - 0.5).abs() < 0.05 { -1.0 } else { 1.0 });
        assert!(matches!(
            certify_p_function(dip, 0.0, 1.0, 16, 1e-9),
            Err(Error::Precondition(_))
        ));
        // a spike at the centre is not bounded by the endpoint values
        let spike = ok(|x: f64| if (x - 0.5).abs() < 1e-12 { 10.0 } else { 1.0 });
        let c = certify_p_function(&spike, 0.0, 1.0, 16, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        assert!(c.witness_reproduces(&spike).unwrap());
    }

    #[test]
    fn k_m_requires_nonpositive_origin() {
        let below = k_m_membership(ok(|x| x * x - 1.0), 2.0, 0.5, 16, 1e-9).unwrap();
        assert!(below.member);
        let above = k_m_membership(ok(|x| x * x + 1.0), 2.0, 0.5, 16, 1e-9).unwrap();
        assert!(!above.member);
    }

    #[test]
    fn m_candidate_grid() {
        assert_eq!(m_candidates(0.25), vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m_candidates(0.3).last(), Some(&1.0));
        assert_eq!(m_candidates(0.3).len(), 4);
        let ms = m_candidates(0.1);
        assert_eq!(ms.len(), 10);
        assert_eq!(ms[9], 1.0);
    }

    #[test]
    fn max_m_examples() {
        let convex = ok(|x| x * x - 1.0);
        assert_eq!(max_m(&convex, 2.0, 16, 0.1, 1e-9).unwrap(), 1.0);
        // g(0) > 0 fails every m < 1 at x = y = 0, yet g is convex, so m = 1 survives
        let shifted = ok(|x| x * x + 1.0);
        assert_eq!(max_m(&shifted, 2.0, 16, 0.1, 1e-9).unwrap(), 1.0);
        for m in m_candidates(0.1).into_iter().filter(|&m| m < 1.0) {
            assert!(!certify_m_convex(&shifted, 2.0, m, 16, 1e-9)
                .unwrap()
                .is_certified());
        }
        assert!(max_m(&shifted, 2.0, 16, 0.7, 1e-9).is_err());
    }
}
