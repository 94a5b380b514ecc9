//! The small structures used throughout the tests, examples and CLI.
//! The same structures ship as JSON under `fixtures/` at the repository root.

use crate::model::{FiniteStructure, Signature};

/// `{add/2, neg/1, zero/0}`.
pub fn group_signature() -> Signature {
    Signature::of(&[("add", 2), ("neg", 1), ("zero", 0)], &[]).unwrap()
}

/// The cyclic group of order `n` in the group signature.
pub fn cyclic(n: usize) -> FiniteStructure {
    FiniteStructure::from_fns(
        group_signature(),
        n,
        |f, args| match f {
            0 => (args[0] + args[1]) % n,
            1 => (n - args[0]) % n,
            _ => 0,
        },
        |_, _| false,
    )
    .unwrap()
    .with_name(format!("Z{n}"))
}

pub fn z6() -> FiniteStructure {
    cyclic(6)
}

pub fn z3() -> FiniteStructure {
    cyclic(3)
}

pub fn z2() -> FiniteStructure {
    cyclic(2)
}

/// The one-element group.
pub fn z1() -> FiniteStructure {
    cyclic(1)
}

/// A pointed set: `{c/0}` on three elements with `c = 0`.
pub fn p3() -> FiniteStructure {
    let sig = Signature::of(&[("c", 0)], &[]).unwrap();
    FiniteStructure::new(sig, 3, vec![vec![0]], vec![])
        .unwrap()
        .with_name("P3")
}

/// `{c/0}` on four elements with `c = 0`. Over two generators it has one
/// element too many to be free.
pub fn pointed4() -> FiniteStructure {
    let sig = Signature::of(&[("c", 0)], &[]).unwrap();
    FiniteStructure::new(sig, 4, vec![vec![0]], vec![])
        .unwrap()
        .with_name("POINTED4")
}

/// `{R/1}` on two elements with `R = {0}`.
pub fn flag() -> FiniteStructure {
    let sig = Signature::of(&[], &[("R", 1)]).unwrap();
    FiniteStructure::from_tuples(sig, 2, vec![], vec![vec![vec![0]]])
        .unwrap()
        .with_name("FLAG")
}

/// `{op/2, E/1}` on two elements: addition mod 2 with `E = {0}`.
pub fn mi2() -> FiniteStructure {
    let sig = Signature::of(&[("op", 2)], &[("E", 1)]).unwrap();
    FiniteStructure::from_fns(
        sig,
        2,
        |_, args| (args[0] + args[1]) % 2,
        |_, args| args[0] == 0,
    )
    .unwrap()
    .with_name("MI2")
}

/// `{R/2}` on four elements: `R = {(0,1),(2,3),(0,3),(2,1)}`.
pub fn graph4() -> FiniteStructure {
    let sig = Signature::of(&[], &[("R", 2)]).unwrap();
    FiniteStructure::from_tuples(
        sig,
        4,
        vec![],
        vec![vec![vec![0, 1], vec![2, 3], vec![0, 3], vec![2, 1]]],
    )
    .unwrap()
    .with_name("GRAPH4")
}

/// Every shipped fixture, keyed by its file stem.
pub fn all() -> Vec<(&'static str, FiniteStructure)> {
    vec![
        ("z6", z6()),
        ("z2", z2()),
        ("z3", z3()),
        ("p3", p3()),
        ("flag", flag()),
        ("mi2", mi2()),
        ("graph4", graph4()),
        ("pointed4", pointed4()),
    ]
}
