use std::collections::HashMap;
use std::fmt::Write as _;

use super::{eq_join, eq_meet, CongruenceError, Partition};

/// A finite lattice of partitions ordered by refinement, with its order,
/// meet and join tables. Elements are kept in canonical order (finest
/// first), so index 0 is the bottom and the last index is the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConLattice {
    elements: Vec<Partition>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

impl ConLattice {
    /// Builds the lattice on a set of partitions closed under binary meet
    /// and join of equivalence relations.
    pub fn from_elements(mut elements: Vec<Partition>) -> Result<ConLattice, CongruenceError> {
        if elements.is_empty() {
            return Err(CongruenceError::EmptyInput);
        }
        let n = elements[0].size();
        if let Some(bad) = elements.iter().find(|p| p.size() != n) {
            return Err(CongruenceError::SizeMismatch {
                expected: n,
                found: bad.size(),
            });
        }
        elements.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        elements.dedup();
        let index: HashMap<&Partition, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let k = elements.len();
        let mut leq = vec![vec![false; k]; k];
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                leq[i][j] = elements[i].refines(&elements[j]);
                let pair = [elements[i].clone(), elements[j].clone()];
                let m = eq_meet(&pair)?;
                let jn = eq_join(&pair)?;
                meet[i][j] = *index
                    .get(&m)
                    .ok_or(CongruenceError::NotClosedUnder("meet"))?;
                join[i][j] = *index
                    .get(&jn)
                    .ok_or(CongruenceError::NotClosedUnder("join"))?;
            }
        }
        Ok(ConLattice {
            elements,
            leq,
            meet,
            join,
        })
    }

    /// Eq(n): every equivalence relation on `0..n`.
    pub fn eq_lattice(n: usize) -> ConLattice {
        ConLattice::from_elements(Partition::all(n)).expect("Eq(n) is a lattice")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.elements.iter().position(|e| e == p)
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.index_of(p).is_some()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn leq_table(&self) -> &[Vec<bool>] {
        &self.leq
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    /// Covering pairs `(lower, upper)`: the edges of the Hasse diagram.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let between = (0..k).any(|m| m != i && m != j && self.leq[i][m] && self.leq[m][j]);
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Restricts to the elements at indices `keep`, reusing this lattice's
    /// tables. `keep` must be closed under meet and join.
    pub(crate) fn sublattice(&self, keep: &[usize]) -> ConLattice {
        let mut pos = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let remap = |old: usize| {
            let p = pos[old];
            assert!(p != usize::MAX, "sublattice is not closed");
            p
        };
        ConLattice {
            elements: keep.iter().map(|&i| self.elements[i].clone()).collect(),
            leq: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.leq[i][j]).collect())
                .collect(),
            meet: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| remap(self.meet[i][j])).collect())
                .collect(),
            join: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| remap(self.join[i][j])).collect())
                .collect(),
        }
    }

    /// Graphviz rendering of the Hasse diagram, bottom at the bottom.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for (i, p) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  c{i} [label=\"{p}\"];");
        }
        for (lo, hi) in self.covers() {
            let _ = writeln!(out, "  c{lo} -> c{hi};");
        }
        out.push_str("}\n");
        out
    }
}
