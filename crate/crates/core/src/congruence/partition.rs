use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::model::ModelError;

/// An equivalence relation on `0..n` in canonical form: block labels are
/// assigned in order of first occurrence, so equal relations have equal
/// label vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
    blocks: usize,
}

impl Partition {
    /// Canonical partition grouping positions with equal keys.
    pub fn from_keys<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Partition {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let class_of: Vec<usize> = keys
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition {
            blocks: ids.len(),
            class_of,
        }
    }

    pub fn from_labels(labels: &[usize]) -> Partition {
        Partition::from_keys(labels.iter().copied())
    }

    /// Δ: every element alone.
    pub fn discrete(n: usize) -> Partition {
        Partition {
            class_of: (0..n).collect(),
            blocks: n,
        }
    }

    /// ∇: one block.
    pub fn total(n: usize) -> Partition {
        Partition {
            class_of: vec![0; n],
            blocks: usize::from(n > 0),
        }
    }

    /// Builds a partition from explicit blocks; elements not mentioned
    /// become singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition, ModelError> {
        let mut label: Vec<Option<usize>> = vec![None; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(ModelError::ElementOutOfRange { element: x, n });
                }
                if label[x].replace(b).is_some() {
                    return Err(ModelError::Malformed(format!(
                        "element {x} appears in more than one block"
                    )));
                }
            }
        }
        let keys = label.iter().enumerate().map(|(x, l)| match l {
            Some(b) => (0, *b),
            None => (1, x),
        });
        Ok(Partition::from_keys(keys))
    }

    /// Parses `0 2 4 | 1 3 5`; singleton blocks may be omitted.
    pub fn parse(n: usize, text: &str) -> Result<Partition, ModelError> {
        let mut blocks = Vec::new();
        for chunk in text.split('|') {
            let block = chunk
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        ModelError::Malformed(format!("`{tok}` is not an element index"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !block.is_empty() {
                blocks.push(block);
            }
        }
        Partition::from_blocks(n, &blocks)
    }

    /// Every partition of `0..n`, by restricted growth strings.
    pub fn all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        if n == 0 {
            return vec![Partition::discrete(0)];
        }
        let mut rgs = vec![0usize; n];
        let mut maxes = vec![0usize; n];
        loop {
            out.push(Partition {
                blocks: maxes[n - 1] + 1,
                class_of: rgs.clone(),
            });
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return out;
                }
                if rgs[i] <= maxes[i - 1] {
                    rgs[i] += 1;
                    maxes[i] = maxes[i - 1].max(rgs[i]);
                    for j in i + 1..n {
                        rgs[j] = 0;
                        maxes[j] = maxes[i];
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.class_of
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks == self.size()
    }

    pub fn is_total(&self) -> bool {
        self.blocks <= 1
    }

    /// Blocks in label order, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (x, &b) in self.class_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// Least element of each block, in label order.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps = vec![usize::MAX; self.blocks];
        for (x, &b) in self.class_of.iter().enumerate() {
            if reps[b] == usize::MAX {
                reps[b] = x;
            }
        }
        reps
    }

    /// The lexicographically first pair related here but not in `other`.
    pub fn first_pair_outside(&self, other: &Partition) -> Option<(usize, usize)> {
        let n = self.size();
        for x in 0..n {
            for y in x + 1..n {
                if self.related(x, y) && !other.related(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        // Each block of self must map into a single block of other.
        let mut target = vec![usize::MAX; self.blocks];
        for (x, &b) in self.class_of.iter().enumerate() {
            let o = other.class_of[x];
            if target[b] == usize::MAX {
                target[b] = o;
            } else if target[b] != o {
                return false;
            }
        }
        true
    }

    /// Block notation with singleton blocks elided; `Δ` when nothing is left.
    pub fn compact(&self) -> String {
        let parts: Vec<String> = self
            .blocks()
            .into_iter()
            .filter(|b| b.len() > 1)
            .map(|b| crate::model::join_elems(&b))
            .collect();
        if parts.is_empty() {
            "Δ".to_string()
        } else {
            parts.join(" | ")
        }
    }

    /// Key for the canonical order of lattice elements: finest first, then
    /// lexicographic by labels.
    pub(crate) fn sort_key(&self) -> (std::cmp::Reverse<usize>, &[usize]) {
        (std::cmp::Reverse(self.blocks), &self.class_of)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| crate::model::join_elems(b))
            .collect();
        f.write_str(&parts.join(" | "))
    }
}
