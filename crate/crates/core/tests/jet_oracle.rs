//! Jet derivatives against finite-difference oracles built only on `Expr::eval`.

use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use simpson_core::expr::{BinaryOp, UnaryOp};
use simpson_core::{Expr, Jet4};

const SMOOTH: [&str; 8] = [
    "x^4 - 3*x^2 + x",
    "exp(2*x)",
    "sin(x)",
    "x*exp(x)",
    "log(1+x)",
    "sqrt(1+x^2)",
    "cos(x)/(2+x)",
    "(1+x)^2.5",
];

/// Central stencils of fourth order: 5 points for orders 1–2, 7 for order 3.
fn fd_derivative(e: &Expr, x: f64, order: usize) -> f64 {
    let f = |t: f64| e.eval(t).unwrap();
    match order {
        1 => {
            let h = 1e-3;
            (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
        }
        2 => {
            let h = 1e-2;
            (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
                / (12.0 * h * h)
        }
        3 => {
            let h = 1e-2;
            (f(x - 3.0 * h) - 8.0 * f(x - 2.0 * h) + 13.0 * f(x - h) - 13.0 * f(x + h)
                + 8.0 * f(x + 2.0 * h)
                - f(x + 3.0 * h))
                / (8.0 * h * h * h)
        }
        _ => unreachable!(),
    }
}

#[test]
fn exp2x_against_step_1e4_differences() {
    let e = Expr::parse("exp(2*x)").unwrap();
    let x: f64 = 0.5;
    let jet = e.eval_jet(x, 3).unwrap();
    let f = |t: f64| e.eval(t).unwrap();
    let h = 1e-4;
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    assert!((jet.derivative(1) - d1).abs() / d1.abs() < 1e-6);
    assert!((jet.derivative(2) - d2).abs() / d2.abs() < 1e-6);
    // a third difference at h = 1e-4 is dominated by rounding; use the wider stencil
    let d3 = fd_derivative(&e, x, 3);
    assert!((jet.derivative(3) - d3).abs() / d3.abs() < 1e-6);
    // closed form 8 e^{2x}
    assert!((jet.derivative(3) - 8.0 * (2.0 * x).exp()).abs() < 1e-12);
}

#[test]
fn orders_one_to_three_on_random_points() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let src = SMOOTH[rng.gen_range(0..SMOOTH.len())];
        let e = Expr::parse(src).unwrap();
        let x = rng.gen_range(0.1..2.0);
        let jet = e.eval_jet(x, 3).unwrap();
        for k in 1..=3 {
            let want = fd_derivative(&e, x, k);
            let got = jet.derivative(k);
            assert!(
                (got - want).abs() <= 1e-6f64.max(1e-6 * got.abs()),
                "{src} at {x}: order {k} jet {got} vs fd {want}"
            );
        }
    }
}

fn jet(src: &str, x: f64) -> Jet4 {
    Expr::parse(src).unwrap().eval_jet(x, 4).unwrap()
}

#[test]
fn linearity_and_product_rule() {
    let (f, g) = ("exp(x)*sin(x)", "log(2+x)^2");
    for &x in &[0.2, 0.9, 1.7] {
        let (jf, jg) = (jet(f, x), jet(g, x));
        let lin = jet(&format!("2.5*({f}) - 0.75*({g})"), x);
        let prod = jet(&format!("({f})*({g})"), x);
        let cauchy = jf * jg;
        for k in 0..5 {
            let want = 2.5 * jf.coeffs()[k] - 0.75 * jg.coeffs()[k];
            assert!((lin.coeffs()[k] - want).abs() <= 1e-14 * want.abs().max(1.0));
            let mut conv = 0.0;
            for j in 0..=k {
                conv += jf.coeffs()[j] * jg.coeffs()[k - j];
            }
            assert!((prod.coeffs()[k] - conv).abs() <= 1e-14 * conv.abs().max(1.0));
            assert!((cauchy.coeffs()[k] - conv).abs() <= 1e-14 * conv.abs().max(1.0));
        }
    }
}

#[test]
fn polynomial_jets_are_exact() {
    // p(x) = 3x^4 - 2x^3 + x - 5 at x0 = 2: direct Taylor coefficients
    let x0: f64 = 2.0;
    let j = jet("3*x^4 - 2*x^3 + x - 5", x0);
    let c = [
        3.0 * x0.powi(4) - 2.0 * x0.powi(3) + x0 - 5.0,
        12.0 * x0.powi(3) - 6.0 * x0 * x0 + 1.0,
        18.0 * x0 * x0 - 6.0 * x0,
        12.0 * x0 - 2.0,
        3.0,
    ];
    assert_eq!(j.coeffs(), c);
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (0u32..1000).prop_map(|n| Expr::Const(n as f64 / 8.0)),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(vec![
                    UnaryOp::Neg,
                    UnaryOp::Abs,
                    UnaryOp::Sin,
                    UnaryOp::Cos,
                    UnaryOp::Exp,
                    UnaryOp::Log,
                    UnaryOp::Sqrt,
                ])
            )
                .prop_map(|(e, op)| Expr::Unary(op, Box::new(e))),
            (
                inner.clone(),
                inner.clone(),
                prop::sample::select(vec![
                    BinaryOp::Add,
                    BinaryOp::Sub,
                    BinaryOp::Mul,
                    BinaryOp::Div,
                ])
            )
                .prop_map(|(l, r, op)| Expr::Binary(op, Box::new(l), Box::new(r))),
            (inner, -8i32..8).prop_map(|(e, n)| Expr::Pow(Box::new(e), n as f64 / 2.0)),
        ]
    })
}

proptest! {
    #[test]
    fn display_then_parse_is_identity(e in arb_expr()) {
        let printed = e.to_string();
        let back = Expr::parse(&printed).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn evaluation_is_deterministic(e in arb_expr(), x in -3.0f64..3.0) {
        let a = e.eval(x);
        let b = e.eval(x);
        prop_assert_eq!(a, b);
    }
}
