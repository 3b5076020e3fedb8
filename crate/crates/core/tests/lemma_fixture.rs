//! The committed adjudication table must match a fresh run.

use simpson_core::kernel::{adjudicate, Adjudication, LemmaCase};
use simpson_core::quad::DEFAULT_TOL;
use simpson_core::{Expr, MidpointVariant};

const FIXTURE: &str = include_str!("../fixtures/lemma_adjudication.json");

fn fixture() -> Adjudication {
    serde_json::from_str(FIXTURE).expect("fixture parses")
}

#[test]
fn fixture_records_the_corrected_midpoint() {
    let adj = fixture();
    assert_eq!(adj.winner, Some(MidpointVariant::Corrected));
    assert!(adj.variant_holds(MidpointVariant::Corrected));
    assert!(!adj.variant_holds(MidpointVariant::Printed));
    for row in adj.rows.iter().filter(|r| r.residual.m == 1.0) {
        assert!(row.residual.holds(), "{} fails at m = 1", row.label);
    }
}

#[test]
fn fixture_reproduces() {
    let stored = fixture();
    let cases: Vec<LemmaCase> = stored
        .rows
        .chunks(2)
        .map(|pair| {
            let r = &pair[0];
            LemmaCase {
                label: r.label.clone(),
                expr: Expr::parse(&r.label).unwrap(),
                a: r.residual.a,
                b: r.residual.b,
                m: r.residual.m,
            }
        })
        .collect();
    let fresh = adjudicate(&cases, DEFAULT_TOL).unwrap();
    assert_eq!(fresh.winner, stored.winner);
    assert_eq!(fresh.rows.len(), stored.rows.len());
    for (f, s) in fresh.rows.iter().zip(&stored.rows) {
        assert_eq!(f.label, s.label);
        assert_eq!(f.residual.variant, s.residual.variant);
        assert!(
            (f.residual.lhs - s.residual.lhs).abs() <= 1e-12,
            "{}",
            f.label
        );
        assert!(
            (f.residual.rhs - s.residual.rhs).abs() <= 1e-12,
            "{}",
            f.label
        );
        assert_eq!(f.residual.holds(), s.residual.holds());
    }
}
