//! Brute-force oracles that share no code with the library beyond the
//! structure tables themselves.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use fquot_core::folog::{Formula, Term};
use fquot_core::model::{FiniteStructure, Signature};

/// Every tuple in `0..n` of length `k`, lexicographic.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for x in 0..n {
                let mut t = t.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// A binary relation on `0..n` as a boolean matrix.
pub type Relation = Vec<Vec<bool>>;

/// All set partitions of `0..n` via restricted growth strings, returned as
/// labels `a[i] <= max(a[..i]) + 1`.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

pub fn to_matrix(labels: &[usize]) -> Relation {
    let n = labels.len();
    (0..n)
        .map(|i| (0..n).map(|j| labels[i] == labels[j]).collect())
        .collect()
}

/// Sorted blocks of a relation; equal for equal equivalences.
pub fn blocks(rel: &Relation) -> Vec<Vec<usize>> {
    let n = rel.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let b: Vec<usize> = (0..n).filter(|&j| rel[i][j]).collect();
        for &j in &b {
            seen[j] = true;
        }
        out.push(b);
    }
    out.sort();
    out
}

pub fn blocks_of_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    blocks(&to_matrix(labels))
}

/// Checks compatibility on whole tuples: related arguments in every
/// position at once must give related values and equal truth.
pub fn naive_is_congruence(m: &FiniteStructure, labels: &[usize]) -> bool {
    let n = m.size();
    let sig = m.signature();
    let related = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| labels[*x] == labels[*y]);
    for (fi, f) in sig.functions().iter().enumerate() {
        let ts = tuples(n, f.arity);
        for a in &ts {
            for b in &ts {
                if related(a, b) && labels[m.apply(fi, a)] != labels[m.apply(fi, b)] {
                    return false;
                }
            }
        }
    }
    for (ri, r) in sig.relations().iter().enumerate() {
        let ts = tuples(n, r.arity);
        for a in &ts {
            for b in &ts {
                if related(a, b) && m.holds(ri, a) != m.holds(ri, b) {
                    return false;
                }
            }
        }
    }
    true
}

/// Con(M) as sorted block lists, by filtering every partition.
pub fn eq_filter(m: &FiniteStructure) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<_> = all_partitions(m.size())
        .into_iter()
        .filter(|p| naive_is_congruence(m, p))
        .map(|p| blocks_of_labels(&p))
        .collect();
    out.sort();
    out
}

fn compose(a: &Relation, b: &Relation) -> Relation {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|k| (0..n).any(|j| a[i][j] && b[j][k])).collect())
        .collect()
}

/// `p ∨ q` as the union of the chain `(p∘q)^k`. Both relations are
/// reflexive, so the chain is increasing and stops at the join.
pub fn composition_join(p: &[usize], q: &[usize]) -> Vec<Vec<usize>> {
    let step = compose(&to_matrix(p), &to_matrix(q));
    let mut acc = step.clone();
    loop {
        let next = compose(&acc, &step);
        if next == acc {
            return blocks(&acc);
        }
        acc = next;
    }
}

pub fn intersection_blocks(p: &[usize], q: &[usize]) -> Vec<Vec<usize>> {
    let n = p.len();
    let m: Relation = (0..n)
        .map(|i| (0..n).map(|j| p[i] == p[j] && q[i] == q[j]).collect())
        .collect();
    blocks(&m)
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Random signature with at most two functions and two relations, arities
/// in `0..=2` for functions and `1..=2` for relations.
pub fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let nf = rng.gen_range(0..=2);
    let nr = rng.gen_range(0..=2);
    let fns: Vec<(String, usize)> = (0..nf).map(|i| (format!("f{i}"), rng.gen_range(0..=2))).collect();
    let rels: Vec<(String, usize)> = (0..nr).map(|i| (format!("R{i}"), rng.gen_range(1..=2))).collect();
    let f: Vec<(&str, usize)> = fns.iter().map(|(s, a)| (s.as_str(), *a)).collect();
    let r: Vec<(&str, usize)> = rels.iter().map(|(s, a)| (s.as_str(), *a)).collect();
    Signature::of(&f, &r).unwrap()
}

/// Random structure; relation density is drawn per structure so that both
/// sparse and dense relations occur.
pub fn random_structure(rng: &mut ChaCha8Rng, sig: &Signature, n: usize) -> FiniteStructure {
    let density: f64 = rng.gen_range(0.1..0.9);
    let rng = RefCell::new(rng);
    FiniteStructure::from_fns(
        sig.clone(),
        n,
        |_, _| rng.borrow_mut().gen_range(0..n),
        |_, _| rng.borrow_mut().gen_bool(density),
    )
    .unwrap()
}

/// Evaluates directly over the syntax tree with a name-keyed environment,
/// always evaluating both sides of every connective.
pub fn naive_eval(m: &FiniteStructure, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
    fn term(m: &FiniteStructure, t: &Term, env: &HashMap<String, usize>) -> usize {
        match t {
            Term::Var(v) => env[v],
            Term::Apply(s, args) => {
                let i = m.signature().function_index(s).unwrap();
                let vals: Vec<usize> = args.iter().map(|a| term(m, a, env)).collect();
                m.apply(i, &vals)
            }
        }
    }
    // Records the body's value at every element, then folds; no early exit.
    let quant = |v: &String, b: &Formula, env: &mut HashMap<String, usize>, all: bool| {
        let saved = env.get(v).copied();
        let table: Vec<bool> = (0..m.size())
            .map(|x| {
                env.insert(v.clone(), x);
                naive_eval(m, b, env)
            })
            .collect();
        match saved {
            Some(s) => env.insert(v.clone(), s),
            None => env.remove(v),
        };
        if all {
            table.iter().all(|&t| t)
        } else {
            table.iter().any(|&t| t)
        }
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel(r, args) => {
            let i = m.signature().relation_index(r).unwrap();
            let vals: Vec<usize> = args.iter().map(|a| term(m, a, env)).collect();
            m.holds(i, &vals)
        }
        Formula::Eq(a, b) => term(m, a, env) == term(m, b, env),
        Formula::Not(a) => !naive_eval(m, a, env),
        Formula::And(a, b) => naive_eval(m, a, env) & naive_eval(m, b, env),
        Formula::Or(a, b) => naive_eval(m, a, env) | naive_eval(m, b, env),
        Formula::Implies(a, b) => !naive_eval(m, a, env) | naive_eval(m, b, env),
        Formula::Iff(a, b) => naive_eval(m, a, env) == naive_eval(m, b, env),
        Formula::Forall(v, b) => quant(v, b, env, true),
        Formula::Exists(v, b) => quant(v, b, env, false),
    }
}

/// Signature for random formulas: one binary function, one unary and one
/// binary relation.
pub fn formula_signature() -> Signature {
    Signature::of(&[("f", 2)], &[("P", 1), ("R", 2)]).unwrap()
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.6) {
        Term::var(VARS[rng.gen_range(0..VARS.len())])
    } else {
        Term::app(
            "f",
            vec![random_term(rng, depth - 1), random_term(rng, depth - 1)],
        )
    }
}

/// Random formula over [`formula_signature`] of depth at most `depth`
/// using variables `x`, `y`, `z`.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2..=4 => Formula::rel("P", vec![random_term(rng, 1)]),
            5..=7 => Formula::rel("R", vec![random_term(rng, 1), random_term(rng, 1)]),
            _ => Formula::eq(random_term(rng, 1), random_term(rng, 1)),
        };
    }
    let d = depth - 1;
    let v = VARS[rng.gen_range(0..VARS.len())];
    match rng.gen_range(0..9) {
        0 => random_formula(rng, 0),
        1 => Formula::negation(random_formula(rng, d)),
        2 => Formula::and(random_formula(rng, d), random_formula(rng, d)),
        3 => Formula::or(random_formula(rng, d), random_formula(rng, d)),
        4 => Formula::implies(random_formula(rng, d), random_formula(rng, d)),
        5 => Formula::iff(random_formula(rng, d), random_formula(rng, d)),
        6 | 7 => Formula::forall(v, random_formula(rng, d)),
        _ => Formula::exists(v, random_formula(rng, d)),
    }
}

/// Every map `0..m -> 0..n` that is a strong homomorphism, checked on
/// every argument tuple.
pub fn naive_homs(a: &FiniteStructure, b: &FiniteStructure) -> Vec<Vec<usize>> {
    let sig = a.signature();
    tuples(b.size(), a.size())
        .into_iter()
        .filter(|h| {
            sig.functions().iter().enumerate().all(|(fi, f)| {
                tuples(a.size(), f.arity).iter().all(|t| {
                    let img: Vec<usize> = t.iter().map(|&x| h[x]).collect();
                    h[a.apply(fi, t)] == b.apply(fi, &img)
                })
            }) && sig.relations().iter().enumerate().all(|(ri, r)| {
                tuples(a.size(), r.arity).iter().all(|t| {
                    let img: Vec<usize> = t.iter().map(|&x| h[x]).collect();
                    a.holds(ri, t) == b.holds(ri, &img)
                })
            })
        })
        .collect()
}

pub fn fixtures() -> Vec<(&'static str, Arc<FiniteStructure>)> {
    fquot_core::fixtures::all()
        .into_iter()
        .map(|(k, m)| (k, Arc::new(m)))
        .collect()
}
