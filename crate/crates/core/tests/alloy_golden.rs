//! Golden-file checks for emitted Alloy models. Set `UPDATE_GOLDEN=1` to rewrite.

mod common;

use std::path::PathBuf;

use teledist::alloy::{emit_model, AlloyBounds, AlloyOptions};
use teledist::{Allocation, CircuitGraph, Gate, NetworkSpec};

use common::*;

fn check(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, golden, "{name} differs from golden file");
}

#[test]
fn circuit1_model() {
    let (c, net, init) = circuit1();
    let bounds = AlloyBounds {
        teleports: 6,
        ..Default::default()
    };
    let m = emit_model(&c, &net, &init, bounds, AlloyOptions::default()).unwrap();
    check("circuit1.als", &m.text);
}

#[test]
fn toy_model() {
    let c = CircuitGraph::from_layers(2, vec![vec![Gate::new([0, 1])]]);
    let net = NetworkSpec::homogeneous(2, 2).unwrap();
    let init = Allocation::new(vec![0, 1], &net).unwrap();
    let bounds = AlloyBounds {
        teleports: 1,
        ..Default::default()
    };
    let m = emit_model(&c, &net, &init, bounds, AlloyOptions::default()).unwrap();
    assert_eq!((m.atom_count, m.int_bits), (1, 3));
    check("toy.als", &m.text);
}

#[test]
fn circuit2_balanced_hetero_model() {
    let (c, net, init) = circuit2();
    let net = net.with_cost_matrix(hetero3()).unwrap();
    let bounds = AlloyBounds {
        teleports: 13,
        vacancies: Some(19),
        cost: Some(11),
    };
    let m = emit_model(
        &c,
        &net,
        &init,
        bounds,
        AlloyOptions {
            balance: true,
            hetero: true,
        },
    )
    .unwrap();
    assert_eq!(m.atom_count, 21);
    check("circuit2_balance_hetero.als", &m.text);
}

#[test]
fn singletons_declared_once() {
    let (c, net, init) = circuit2();
    let m = emit_model(&c, &net, &init, AlloyBounds::default(), AlloyOptions::default()).unwrap();
    let decls: Vec<&str> = m.text.lines().filter(|l| l.starts_with("one sig")).collect();
    assert_eq!(
        decls,
        [
            "one sig q1,q2,q3,q4,q5 extends Qubit{}",
            "one sig M1,M2,M3 extends Machine{}"
        ]
    );
}
