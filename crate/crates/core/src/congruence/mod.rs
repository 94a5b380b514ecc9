//! Congruences of finite structures and the lattice operations on
//! equivalence relations.
//!
//! A congruence must respect every function symbol and must not separate
//! relation truth values. Both conditions are checked one argument
//! position at a time: if replacing a single argument by a related element
//! never breaks them, replacing several at once cannot either.

mod lattice;
mod partition;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use lattice::ConLattice;
pub use partition::Partition;

use crate::limits::{map_ordered, Limits};
use crate::model::{for_each_tuple, FiniteStructure, ModelError};

/// A witness that an equivalence relation is not a congruence: replacing
/// `args[position]` by the related element `replacement` changes a
/// function value's class or a relation's truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongruenceViolation {
    Function {
        symbol: String,
        args: Vec<usize>,
        position: usize,
        replacement: usize,
        values: (usize, usize),
    },
    Relation {
        symbol: String,
        args: Vec<usize>,
        position: usize,
        replacement: usize,
    },
}

impl CongruenceViolation {
    pub fn symbol(&self) -> &str {
        match self {
            CongruenceViolation::Function { symbol, .. }
            | CongruenceViolation::Relation { symbol, .. } => symbol,
        }
    }

    /// The related pair that exposes the violation.
    pub fn pair(&self) -> (usize, usize) {
        match self {
            CongruenceViolation::Function {
                args,
                position,
                replacement,
                ..
            }
            | CongruenceViolation::Relation {
                args,
                position,
                replacement,
                ..
            } => (args[*position], *replacement),
        }
    }

    pub fn is_relation(&self) -> bool {
        matches!(self, CongruenceViolation::Relation { .. })
    }
}

impl fmt::Display for CongruenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.pair();
        match self {
            CongruenceViolation::Function {
                symbol,
                args,
                position,
                values,
                ..
            } => write!(
                f,
                "FunctionViolation({symbol}): pair ({x}, {y}) at position {position} of {symbol}{args:?} gives unrelated values {} and {}",
                values.0, values.1
            ),
            CongruenceViolation::Relation {
                symbol,
                args,
                position,
                ..
            } => write!(
                f,
                "RelationViolation({symbol}): pair ({x}, {y}) at position {position} of {symbol}{args:?} changes the truth value"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("partition has {found} elements but {expected} were expected")]
    SizeMismatch { expected: usize, found: usize },
    #[error("not a congruence: {0}")]
    NotACongruence(CongruenceViolation),
    #[error("pair ({0}, {1}) is related by the finer partition but not the coarser one")]
    NotRefinement(usize, usize),
    #[error("partition is not an element of the lattice")]
    NotInLattice,
    #[error("universe of size {n} exceeds the lattice bound {bound}")]
    UniverseTooLarge { n: usize, bound: usize },
    #[error("set of partitions is not closed under {0}")]
    NotClosedUnder(&'static str),
    #[error("at least one partition is required")]
    EmptyInput,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check_size(m: &FiniteStructure, theta: &Partition) -> Result<(), CongruenceError> {
    if theta.size() != m.size() {
        return Err(CongruenceError::SizeMismatch {
            expected: m.size(),
            found: theta.size(),
        });
    }
    Ok(())
}

fn first_violation(
    m: &FiniteStructure,
    theta: &Partition,
    functions: bool,
) -> Option<CongruenceViolation> {
    let universe: Vec<usize> = (0..m.size()).collect();
    let blocks = theta.blocks();
    let mut swapped = Vec::new();
    if functions {
        for (f, sym) in m.signature().functions().iter().enumerate() {
            let mut found = None;
            for_each_tuple(&universe, sym.arity, |args| {
                if found.is_some() {
                    return;
                }
                let v = m.apply(f, args);
                for p in 0..args.len() {
                    for &y in &blocks[theta.class_of(args[p])] {
                        if y == args[p] {
                            continue;
                        }
                        swapped.clear();
                        swapped.extend_from_slice(args);
                        swapped[p] = y;
                        let w = m.apply(f, &swapped);
                        if !theta.related(v, w) {
                            found = Some(CongruenceViolation::Function {
                                symbol: sym.name.clone(),
                                args: args.to_vec(),
                                position: p,
                                replacement: y,
                                values: (v, w),
                            });
                            return;
                        }
                    }
                }
            });
            if found.is_some() {
                return found;
            }
        }
    }
    for (r, sym) in m.signature().relations().iter().enumerate() {
        let mut found = None;
        for_each_tuple(&universe, sym.arity, |args| {
            if found.is_some() {
                return;
            }
            let v = m.holds(r, args);
            for p in 0..args.len() {
                for &y in &blocks[theta.class_of(args[p])] {
                    if y == args[p] {
                        continue;
                    }
                    swapped.clear();
                    swapped.extend_from_slice(args);
                    swapped[p] = y;
                    if m.holds(r, &swapped) != v {
                        found = Some(CongruenceViolation::Relation {
                            symbol: sym.name.clone(),
                            args: args.to_vec(),
                            position: p,
                            replacement: y,
                        });
                        return;
                    }
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Checks both congruence conditions; on failure names the symbol and the
/// first witness in symbol, tuple, position, replacement order.
pub fn is_congruence(m: &FiniteStructure, theta: &Partition) -> Result<(), CongruenceError> {
    check_size(m, theta)?;
    match first_violation(m, theta, true) {
        Some(v) => Err(CongruenceError::NotACongruence(v)),
        None => Ok(()),
    }
}

/// Outcome of generating a congruence from pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Principal {
    Congruence(Partition),
    /// The least function-compatible equivalence already separates a
    /// relation, so every larger equivalence does too.
    NoCongruence(CongruenceViolation),
}

impl Principal {
    pub fn congruence(self) -> Option<Partition> {
        match self {
            Principal::Congruence(p) => Some(p),
            Principal::NoCongruence(_) => None,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        Partition::from_labels(&roots)
    }
}

/// The least congruence containing `pairs`, if any congruence does.
pub fn principal_congruence(
    m: &FiniteStructure,
    pairs: &[(usize, usize)],
) -> Result<Principal, CongruenceError> {
    for &(a, b) in pairs {
        m.check_element(a)?;
        m.check_element(b)?;
    }
    let n = m.size();
    let universe: Vec<usize> = (0..n).collect();
    let mut uf = UnionFind::new(n);
    let mut pending: Vec<(usize, usize)> = pairs.to_vec();
    let mut a_args = Vec::new();
    let mut b_args = Vec::new();
    while let Some((a, b)) = pending.pop() {
        if !uf.union(a, b) {
            continue;
        }
        for (f, sym) in m.signature().functions().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for p in 0..sym.arity {
                for_each_tuple(&universe, sym.arity - 1, |rest| {
                    a_args.clear();
                    a_args.extend_from_slice(&rest[..p]);
                    a_args.push(a);
                    a_args.extend_from_slice(&rest[p..]);
                    b_args.clear();
                    b_args.extend_from_slice(&a_args);
                    b_args[p] = b;
                    pending.push((m.apply(f, &a_args), m.apply(f, &b_args)));
                });
            }
        }
    }
    let theta = uf.into_partition();
    debug_assert!(first_violation(m, &theta, true)
        .is_none_or(|v| v.is_relation()));
    Ok(match first_violation(m, &theta, false) {
        Some(v) => Principal::NoCongruence(v),
        None => Principal::Congruence(theta),
    })
}

pub fn con_lattice(m: &FiniteStructure) -> Result<ConLattice, CongruenceError> {
    con_lattice_with(m, &Limits::default())
}

/// Con(M): the join-closure of Δ and the principal congruences Cg(a, b).
pub fn con_lattice_with(m: &FiniteStructure, limits: &Limits) -> Result<ConLattice, CongruenceError> {
    let n = m.size();
    if n > limits.max_universe {
        return Err(CongruenceError::UniverseTooLarge {
            n,
            bound: limits.max_universe,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let generated = map_ordered(limits.exec, &pairs, |&(a, b)| {
        principal_congruence(m, &[(a, b)]).map(Principal::congruence)
    });
    let mut principals: Vec<Partition> = Vec::new();
    for g in generated {
        if let Some(p) = g? {
            principals.push(p);
        }
    }
    principals.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    principals.dedup();

    let mut seen: HashSet<Partition> = HashSet::new();
    seen.insert(Partition::discrete(n));
    seen.extend(principals.iter().cloned());
    let mut frontier: Vec<Partition> = seen.iter().cloned().collect();
    while !frontier.is_empty() {
        let joins = map_ordered(limits.exec, &frontier, |e| {
            principals
                .iter()
                .map(|p| eq_join(&[e.clone(), p.clone()]).expect("sizes agree"))
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for j in joins.into_iter().flatten() {
            if seen.insert(j.clone()) {
                next.push(j);
            }
        }
        frontier = next;
    }
    ConLattice::from_elements(seen.into_iter().collect())
}

fn check_same_size(parts: &[Partition]) -> Result<usize, CongruenceError> {
    let first = parts.first().ok_or(CongruenceError::EmptyInput)?;
    let n = first.size();
    if let Some(bad) = parts.iter().find(|p| p.size() != n) {
        return Err(CongruenceError::SizeMismatch {
            expected: n,
            found: bad.size(),
        });
    }
    Ok(n)
}

/// Intersection of equivalence relations.
pub fn eq_meet(parts: &[Partition]) -> Result<Partition, CongruenceError> {
    let n = check_same_size(parts)?;
    Ok(Partition::from_keys((0..n).map(|x| {
        parts.iter().map(|p| p.class_of(x)).collect::<Vec<_>>()
    })))
}

/// Least equivalence relation containing every input.
pub fn eq_join(parts: &[Partition]) -> Result<Partition, CongruenceError> {
    let n = check_same_size(parts)?;
    let mut uf = UnionFind::new(n);
    for p in parts {
        let reps = p.representatives();
        for x in 0..n {
            uf.union(x, reps[p.class_of(x)]);
        }
    }
    Ok(uf.into_partition())
}

/// θ restricted to `subset`; element `i` of the result is `subset[i]`.
pub fn restrict_congruence(theta: &Partition, subset: &[usize]) -> Partition {
    Partition::from_keys(subset.iter().map(|&x| theta.class_of(x)))
}

/// Every element whose θ-class meets `set`, ascending.
pub fn saturation(theta: &Partition, set: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; theta.num_blocks()];
    for &x in set {
        hit[theta.class_of(x)] = true;
    }
    (0..theta.size())
        .filter(|&x| hit[theta.class_of(x)])
        .collect()
}

/// ψ/θ as a partition of the θ-blocks, indexed by θ's canonical labels.
pub fn quotient_of_congruence(psi: &Partition, theta: &Partition) -> Result<Partition, CongruenceError> {
    if psi.size() != theta.size() {
        return Err(CongruenceError::SizeMismatch {
            expected: theta.size(),
            found: psi.size(),
        });
    }
    if let Some((x, y)) = theta.first_pair_outside(psi) {
        return Err(CongruenceError::NotRefinement(x, y));
    }
    Ok(Partition::from_keys(
        theta.representatives().into_iter().map(|r| psi.class_of(r)),
    ))
}

/// [θ, ∇]: the elements of `lat` above θ, with inherited tables.
pub fn principal_filter(lat: &ConLattice, theta: &Partition) -> Result<ConLattice, CongruenceError> {
    let i = lat.index_of(theta).ok_or(CongruenceError::NotInLattice)?;
    let keep: Vec<usize> = (0..lat.len()).filter(|&j| lat.leq(i, j)).collect();
    Ok(lat.sublattice(&keep))
}
