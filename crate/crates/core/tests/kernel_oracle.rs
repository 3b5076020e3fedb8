//! Closed-form kernel constants against direct quadrature, and the kernel
//! identity over random parameters.

use rand::{rngs::StdRng, Rng, SeedableRng};
use simpson_core::bounds::{holder_s_weights, powermean_s_weights};
use simpson_core::kernel::{
    kernel, kernel_moment, verify_lemma, weighted_moments, LEMMA_THRESHOLD,
};
use simpson_core::quad::integrate;
use simpson_core::{Expr, MidpointVariant};

fn numeric(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    integrate(|t| Ok(f(t)), lo, hi, tol).unwrap().value
}

#[test]
fn moment_closed_form_matches_quadrature() {
    for p in [1.0, 1.25, 1.5, 2.0, 3.0, 5.0] {
        let closed = kernel_moment(p).unwrap();
        let direct = numeric(|t| (t * t * (0.5 - t)).powf(p), 0.0, 0.5, 1e-14 * closed);
        assert!(
            (closed - direct).abs() <= 1e-12 * closed,
            "p = {p}: {closed} vs {direct}"
        );
    }
}

#[test]
fn right_branch_has_the_same_moment() {
    for p in [1.0, 1.5, 2.0, 3.0] {
        let closed = kernel_moment(p).unwrap();
        let right = numeric(
            |t| ((t - 1.0) * (t - 1.0) * (t - 0.5)).powf(p),
            0.5,
            1.0,
            1e-14 * closed,
        );
        assert!((closed - right).abs() <= 1e-12 * closed, "p = {p}");
    }
}

#[test]
fn second_moment_value() {
    // Γ(5)Γ(3) / (2^7 Γ(8)) = 48 / (128 · 5040)
    let direct = numeric(|t| (t * t * (0.5 - t)).powi(2), 0.0, 0.5, 1e-18);
    assert!((direct - 1.0 / 13440.0).abs() < 1e-17);
    assert!((kernel_moment(2.0).unwrap() - direct).abs() < 1e-17);
}

#[test]
fn weighted_moments_match_quadrature() {
    let (ct, c1mt) = weighted_moments();
    let w = |t: f64| t * t * (0.5 - t);
    let nt = numeric(|t| w(t) * t, 0.0, 0.5, 1e-16);
    let n1mt = numeric(|t| w(t) * (1.0 - t), 0.0, 0.5, 1e-16);
    assert!((ct - nt).abs() <= 1e-14);
    assert!((c1mt - n1mt).abs() <= 1e-14);
    assert_eq!((ct * 1920.0, c1mt * 1920.0), (3.0, 7.0));
}

#[test]
fn kernel_has_zero_mean() {
    let k = |t: f64| kernel(t).unwrap();
    let total = numeric(k, 0.0, 0.5, 1e-16) + numeric(k, 0.5, 1.0, 1e-16);
    assert!(total.abs() <= 1e-14);
    assert!((numeric(k, 0.0, 0.5, 1e-16) + 1.0 / 1152.0).abs() <= 1e-15);
}

#[test]
fn s_weights_match_quadrature() {
    let w = |t: f64| t * t * (0.5 - t);
    for s in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let (alpha, beta) = powermean_s_weights(s);
        let na = numeric(|t| w(t) * t.powf(s), 0.0, 0.5, 1e-17);
        let nb = numeric(|t| w(t) * (1.0 - t).powf(s), 0.0, 0.5, 1e-17);
        assert!((alpha - na).abs() <= 1e-14, "alpha at s = {s}");
        assert!((beta - nb).abs() <= 1e-14, "beta at s = {s}");

        let (w1, w2) = holder_s_weights(s);
        let n1 = numeric(|t| t.powf(s), 0.0, 0.5, 1e-15);
        let n2 = numeric(|t| (1.0 - t).powf(s), 0.0, 0.5, 1e-15);
        assert!((w1 - n1).abs() <= 1e-13, "w1 at s = {s}");
        assert!((w2 - n2).abs() <= 1e-13, "w2 at s = {s}");
    }
}

const LEMMA_CORPUS: [&str; 9] = [
    "x^2",
    "x^3 - 2*x",
    "x^4",
    "x^5 - x^2",
    "x^6",
    "exp(x)",
    "sin(x)",
    "log(1+x)",
    "3*x^6 - x^5 + 2*x^3",
];

fn random_triple(rng: &mut StdRng) -> (f64, f64, f64) {
    loop {
        let m = rng.gen_range(0.05..=1.0);
        let b = rng.gen_range(0.1..=4.0);
        let a = rng.gen_range(0.0..4.0);
        if a < m * b && m * b <= 4.0 {
            return (a, b, m);
        }
    }
}

#[test]
fn corrected_identity_holds_on_random_triples() {
    let mut rng = StdRng::seed_from_u64(2024);
    for src in LEMMA_CORPUS {
        let e = Expr::parse(src).unwrap();
        for _ in 0..50 {
            let (a, b, m) = random_triple(&mut rng);
            let r = verify_lemma(&e, a, b, m, MidpointVariant::Corrected, 1e-11).unwrap();
            assert!(
                r.residual < LEMMA_THRESHOLD,
                "{src} a={a} b={b} m={m}: residual {}",
                r.residual
            );
        }
    }
}

#[test]
fn printed_node_breaks_the_identity_below_m_one() {
    let mut rng = StdRng::seed_from_u64(99);
    let e = Expr::parse("x^3 - 2*x").unwrap();
    for _ in 0..20 {
        let (a, b, m) = random_triple(&mut rng);
        if m > 0.95 || b * (1.0 - m) < 0.05 {
            continue;
        }
        let printed = verify_lemma(&e, a, b, m, MidpointVariant::Printed, 1e-11).unwrap();
        let corrected = verify_lemma(&e, a, b, m, MidpointVariant::Corrected, 1e-11).unwrap();
        assert!(corrected.holds());
        // for a cubic the gap is exactly (2/3)(mb−a)·[f((a+b)/2) − f((a+mb)/2)]
        let f = |x: f64| x * x * x - 2.0 * x;
        let gap = 2.0 / 3.0 * (m * b - a) * (f(0.5 * (a + b)) - f(0.5 * (a + m * b)));
        assert!((printed.lhs - corrected.lhs + gap).abs() < 1e-10);
        assert!(!printed.holds() || gap.abs() < LEMMA_THRESHOLD);
    }
}
