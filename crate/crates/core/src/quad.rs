//! Reference integration and the Simpson defect.
//!
//! [`integrate`] is a globally adaptive Gauss–Kronrod 7/15 scheme: the
//! subinterval with the largest `|K15 − G7|` is bisected until the summed
//! estimate falls below the requested absolute tolerance. `|K15 − G7|` is
//! essentially the error of the 7-point Gauss rule, so it over-states the
//! error of the returned Kronrod value by a wide margin on smooth integrands.

use crate::{Error, Expr, MidpointVariant, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Default absolute tolerance for every oracle integral.
pub const DEFAULT_TOL: f64 = 1e-11;
/// Default cap on bisection depth.
pub const DEFAULT_MAX_DEPTH: u32 = 60;
/// Hard cap on the number of subintervals alive at once.
pub const MAX_SUBINTERVALS: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub err_est: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: DEFAULT_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn gauss_kronrod<F>(f: &mut F, lo: f64, hi: f64, depth: u32) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    Ok(Panel {
        lo,
        hi,
        value,
        err,
        depth,
    })
}

/// `∫_lo^hi f` to absolute tolerance `tol` with the default depth cap.
pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_with(
        f,
        lo,
        hi,
        QuadConfig {
            tol,
            ..QuadConfig::default()
        },
    )
}

pub fn integrate_with<F>(mut f: F, lo: f64, hi: f64, cfg: QuadConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }

    let mut live = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    live.push(gauss_kronrod(&mut f, lo, hi, 0)?);

    loop {
        let total_err: f64 = live.iter().chain(frozen.iter()).map(|p| p.err).sum();
        if total_err <= cfg.tol {
            return Ok(collect(live, frozen));
        }
        if live.len() + frozen.len() >= MAX_SUBINTERVALS {
            return Err(not_reached(live, frozen));
        }
        let Some(worst) = live.pop() else {
            return Err(not_reached(live, frozen));
        };
        if worst.depth >= cfg.max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        live.push(gauss_kronrod(&mut f, worst.lo, mid, worst.depth + 1)?);
        live.push(gauss_kronrod(&mut f, mid, worst.hi, worst.depth + 1)?);
    }
}

fn collect(live: BinaryHeap<Panel>, frozen: Vec<Panel>) -> Quadrature {
    let mut panels: Vec<Panel> = live.into_vec();
    panels.extend(frozen);
    // sum left to right so the result does not depend on heap layout
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Quadrature {
        value: panels.iter().map(|p| p.value).sum(),
        err_est: panels.iter().map(|p| p.err).sum(),
    }
}

fn not_reached(live: BinaryHeap<Panel>, frozen: Vec<Panel>) -> Error {
    let q = collect(live, frozen);
    Error::ToleranceNotReached {
        value: q.value,
        estimate: q.err_est,
    }
}

/// Signed Simpson defect on `[lo, hi]` together with its oracle data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub value: f64,
    pub abs_value: f64,
    pub interval: (f64, f64),
    pub midpoint_used: f64,
    pub oracle_error_estimate: f64,
}

/// `∫_a^{mb} f − ((mb − a)/6)[f(a) + 4 f(mid) + f(mb)]`, with `mid` chosen by
/// `variant`.
pub fn simpson_defect<F>(
    mut f: F,
    a: f64,
    b: f64,
    m: f64,
    variant: MidpointVariant,
    tol: f64,
) -> Result<Defect>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "m must lie in (0, 1], got {m}"
        )));
    }
    let hi = m * b;
    if !(a < hi) {
        return Err(Error::InvalidInterval { lo: a, hi });
    }
    let mid = variant.node(a, b, m);
    let rule = (hi - a) / 6.0 * (f(a)? + 4.0 * f(mid)? + f(hi)?);
    let q = integrate(&mut f, a, hi, tol)?;
    let value = q.value - rule;
    Ok(Defect {
        value,
        abs_value: value.abs(),
        interval: (a, hi),
        midpoint_used: mid,
        oracle_error_estimate: q.err_est,
    })
}

/// Number of points in the coarse grid of [`sup_abs_derivative`].
pub const SUP_GRID_POINTS: usize = 4097;

/// `sup |f^(order)|` on `[lo, hi]`: uniform grid scan, then golden-section
/// refinement around the three best grid points.
pub fn sup_abs_derivative(e: &Expr, order: usize, lo: f64, hi: f64) -> Result<f64> {
    if order != 3 && order != 4 {
        return Err(Error::InvalidParameter(format!(
            "supremum is defined for derivative orders 3 and 4, got {order}"
        )));
    }
    sup_abs(|x| e.derivative(x, order), lo, hi)
}

/// Grid-plus-refinement estimate of `sup |g|` on `[lo, hi]`.
pub fn sup_abs<F>(mut g: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let n = SUP_GRID_POINTS - 1;
    let step = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * step })
        .collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(g(x)?.abs());
    }

    let mut order: Vec<usize> = (0..vals.len()).collect();
    // stable on ties, so the chosen seeds are reproducible
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = vals[order[0]];
    for &i in order.iter().take(3) {
        let left = xs[i.saturating_sub(1)];
        let right = xs[(i + 1).min(n)];
        let refined = golden_max(&mut g, left, right)?;
        best = best.max(refined);
    }
    Ok(best)
}

fn golden_max<F>(g: &mut F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1)?.abs();
    let mut f2 = g(x2)?.abs();
    let mut best = f1.max(f2);
    for _ in 0..80 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1)?.abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2)?.abs();
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}
