//! Signatures, finite structures and substructures.
//!
//! A structure's universe is always `0..n`. Function symbols are stored as
//! dense row-major tables and relation symbols as dense characteristic
//! tables; iterating a dense table in index order visits tuples in
//! lexicographic order, so two structures are equal exactly when their
//! tables are equal.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Words the formula parser reserves; they cannot name symbols.
pub const KEYWORDS: [&str; 4] = ["forall", "exists", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("missing table for symbol `{0}`")]
    MissingTable(String),
    #[error("table for symbol `{0}` does not match its arity")]
    ArityMismatch(String),
    #[error("table for symbol `{0}` contains an element outside the universe")]
    OutOfRangeElement(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("`{0}` is not a symbol of the signature")]
    UnknownSymbol(String),
    #[error("universe must contain at least one element")]
    EmptyUniverse,
    #[error("element {element} is outside the universe 0..{n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("structures do not share a signature")]
    SignatureMismatch,
    #[error("closure of the empty set is undefined without constants")]
    EmptyUnsupported,
    #[error("set is not closed under `{symbol}`: arguments {witness:?} leave it")]
    NotClosed { symbol: String, witness: Vec<usize> },
    #[error("map has {found} images but the source has {expected} elements")]
    MapShape { expected: usize, found: usize },
    #[error("malformed structure file: {0}")]
    Malformed(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Returns true when `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// A symbol's position in the signature's function or relation list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Function(usize),
    Relation(usize),
}

/// A first-order language: function and relation symbols with arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    functions: Vec<Symbol>,
    relations: Vec<Symbol>,
}

impl Signature {
    pub fn new(functions: Vec<Symbol>, relations: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for sym in functions.iter().chain(relations.iter()) {
            if !is_identifier(&sym.name) || KEYWORDS.contains(&sym.name.as_str()) {
                return Err(ModelError::InvalidIdentifier(sym.name.clone()));
            }
            if !seen.insert(sym.name.as_str()) {
                return Err(ModelError::DuplicateName(sym.name.clone()));
            }
        }
        Ok(Signature {
            functions,
            relations,
        })
    }

    /// Shorthand for fixtures: `Signature::of(&[("add", 2)], &[("R", 1)])`.
    pub fn of(functions: &[(&str, usize)], relations: &[(&str, usize)]) -> Result<Self> {
        Signature::new(
            functions.iter().map(|&(n, a)| Symbol::new(n, a)).collect(),
            relations.iter().map(|&(n, a)| Symbol::new(n, a)).collect(),
        )
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        self.function_index(name)
            .map(SymbolKind::Function)
            .or_else(|| self.relation_index(name).map(SymbolKind::Relation))
    }

    pub fn has_constants(&self) -> bool {
        self.functions.iter().any(|s| s.arity == 0)
    }

    /// Same symbols with the same arities, ignoring declaration order.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        let key = |s: &Signature| {
            let mut f: Vec<_> = s.functions.clone();
            let mut r: Vec<_> = s.relations.clone();
            f.sort_by(|a, b| a.name.cmp(&b.name));
            r.sort_by(|a, b| a.name.cmp(&b.name));
            (f, r)
        };
        key(self) == key(other)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs: Vec<String> = self
            .functions
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        let rs: Vec<String> = self
            .relations
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        write!(f, "functions [{}] relations [{}]", fs.join(", "), rs.join(", "))
    }
}

/// Row-major index of `args` in a table over a universe of size `n`.
pub(crate) fn flat_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`flat_index`].
pub(crate) fn unflatten(n: usize, arity: usize, mut idx: usize, out: &mut [usize]) {
    debug_assert_eq!(out.len(), arity);
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
}

pub(crate) fn table_len(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

/// Calls `visit` on every tuple in `elems^arity`, lexicographically.
pub(crate) fn for_each_tuple(elems: &[usize], arity: usize, mut visit: impl FnMut(&[usize])) {
    if arity == 0 {
        visit(&[]);
        return;
    }
    if elems.is_empty() {
        return;
    }
    let mut pos = vec![0usize; arity];
    let mut tuple: Vec<usize> = vec![elems[0]; arity];
    loop {
        visit(&tuple);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            pos[i] += 1;
            if pos[i] < elems.len() {
                tuple[i] = elems[pos[i]];
                break;
            }
            pos[i] = 0;
            tuple[i] = elems[0];
        }
    }
}

/// A finite L-structure on the universe `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    name: Option<String>,
    sig: Signature,
    n: usize,
    elem_names: Option<Vec<String>>,
    func_tables: Vec<Vec<usize>>,
    rel_tables: Vec<Vec<bool>>,
}

impl FiniteStructure {
    /// Builds a structure from dense tables, validating totality and range.
    pub fn new(
        sig: Signature,
        n: usize,
        func_tables: Vec<Vec<usize>>,
        rel_tables: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(ModelError::EmptyUniverse);
        }
        if func_tables.len() != sig.functions.len() {
            let missing = &sig.functions[func_tables.len().min(sig.functions.len())..];
            return Err(match missing.first() {
                Some(s) => ModelError::MissingTable(s.name.clone()),
                None => ModelError::Malformed("too many function tables".into()),
            });
        }
        if rel_tables.len() != sig.relations.len() {
            let missing = &sig.relations[rel_tables.len().min(sig.relations.len())..];
            return Err(match missing.first() {
                Some(s) => ModelError::MissingTable(s.name.clone()),
                None => ModelError::Malformed("too many relation tables".into()),
            });
        }
        for (sym, table) in sig.functions.iter().zip(&func_tables) {
            if table.len() != table_len(n, sym.arity) {
                return Err(ModelError::ArityMismatch(sym.name.clone()));
            }
            if table.iter().any(|&v| v >= n) {
                return Err(ModelError::OutOfRangeElement(sym.name.clone()));
            }
        }
        for (sym, table) in sig.relations.iter().zip(&rel_tables) {
            if table.len() != table_len(n, sym.arity) {
                return Err(ModelError::ArityMismatch(sym.name.clone()));
            }
        }
        Ok(FiniteStructure {
            name: None,
            sig,
            n,
            elem_names: None,
            func_tables,
            rel_tables,
        })
    }

    /// Builds a structure by evaluating closures on every argument tuple.
    pub fn from_fns(
        sig: Signature,
        n: usize,
        mut func: impl FnMut(usize, &[usize]) -> usize,
        mut rel: impl FnMut(usize, &[usize]) -> bool,
    ) -> Result<Self> {
        let universe: Vec<usize> = (0..n).collect();
        let mut funcs = Vec::with_capacity(sig.functions.len());
        for (i, sym) in sig.functions.iter().enumerate() {
            let mut table = Vec::with_capacity(table_len(n, sym.arity));
            for_each_tuple(&universe, sym.arity, |t| table.push(func(i, t)));
            funcs.push(table);
        }
        let mut rels = Vec::with_capacity(sig.relations.len());
        for (i, sym) in sig.relations.iter().enumerate() {
            let mut table = Vec::with_capacity(table_len(n, sym.arity));
            for_each_tuple(&universe, sym.arity, |t| table.push(rel(i, t)));
            rels.push(table);
        }
        FiniteStructure::new(sig, n, funcs, rels)
    }

    /// Builds a structure from function tables and explicit relation tuples.
    pub fn from_tuples(
        sig: Signature,
        n: usize,
        func_tables: Vec<Vec<usize>>,
        rel_tuples: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(ModelError::EmptyUniverse);
        }
        if rel_tuples.len() != sig.relations.len() {
            let idx = rel_tuples.len().min(sig.relations.len());
            return Err(match sig.relations.get(idx) {
                Some(s) => ModelError::MissingTable(s.name.clone()),
                None => ModelError::Malformed("too many relation tables".into()),
            });
        }
        let mut rels = Vec::with_capacity(rel_tuples.len());
        for (sym, tuples) in sig.relations.iter().zip(rel_tuples) {
            let mut table = vec![false; table_len(n, sym.arity)];
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(ModelError::ArityMismatch(sym.name.clone()));
                }
                if t.iter().any(|&x| x >= n) {
                    return Err(ModelError::OutOfRangeElement(sym.name.clone()));
                }
                table[flat_index(n, &t)] = true;
            }
            rels.push(table);
        }
        FiniteStructure::new(sig, n, func_tables, rels)
    }

    /// The one-element structure of `sig` with every relation empty.
    pub fn one_point(sig: Signature) -> Self {
        FiniteStructure::from_fns(sig, 1, |_, _| 0, |_, _| false)
            .expect("one-point structure is always valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attaches display names; they must be distinct and there must be `n`.
    pub fn with_elem_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n {
            return Err(ModelError::Malformed(format!(
                "{} element names for a universe of size {}",
                names.len(),
                self.n
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        self.elem_names = Some(names);
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elem_names(&self) -> Option<&[String]> {
        self.elem_names.as_deref()
    }

    /// Display name of an element: its attached name, or its index.
    pub fn element_label(&self, x: usize) -> String {
        match &self.elem_names {
            Some(names) => names[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn function_table(&self, f: usize) -> &[usize] {
        &self.func_tables[f]
    }

    pub fn relation_table(&self, r: usize) -> &[bool] {
        &self.rel_tables[r]
    }

    #[inline]
    pub fn apply(&self, f: usize, args: &[usize]) -> usize {
        self.func_tables[f][flat_index(self.n, args)]
    }

    #[inline]
    pub fn holds(&self, r: usize, args: &[usize]) -> bool {
        self.rel_tables[r][flat_index(self.n, args)]
    }

    /// Tuples of relation `r`, sorted lexicographically.
    pub fn relation_tuples(&self, r: usize) -> Vec<Vec<usize>> {
        let arity = self.sig.relations[r].arity;
        let mut out = Vec::new();
        let mut buf = vec![0; arity];
        for (idx, &b) in self.rel_tables[r].iter().enumerate() {
            if b {
                unflatten(self.n, arity, idx, &mut buf);
                out.push(buf.clone());
            }
        }
        out
    }

    /// Values of the 0-ary function symbols.
    pub fn constants(&self) -> Vec<usize> {
        self.sig
            .functions
            .iter()
            .zip(&self.func_tables)
            .filter(|(s, _)| s.arity == 0)
            .map(|(_, t)| t[0])
            .collect()
    }

    /// Equality of signature and interpretation, ignoring names.
    pub fn same_structure(&self, other: &FiniteStructure) -> bool {
        self.sig == other.sig
            && self.n == other.n
            && self.func_tables == other.func_tables
            && self.rel_tables == other.rel_tables
    }

    pub(crate) fn check_element(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(ModelError::ElementOutOfRange {
                element: x,
                n: self.n,
            })
        }
    }

    /// Smallest function-closed superset of `seed`.
    pub fn substructure_closure(&self, seed: &[usize]) -> Result<Vec<usize>> {
        for &x in seed {
            self.check_element(x)?;
        }
        if seed.is_empty() && !self.sig.has_constants() {
            return Err(ModelError::EmptyUnsupported);
        }
        let mut member = vec![false; self.n];
        for &x in seed {
            member[x] = true;
        }
        loop {
            let current: Vec<usize> = (0..self.n).filter(|&x| member[x]).collect();
            let mut grew = false;
            for (f, sym) in self.sig.functions.iter().enumerate() {
                for_each_tuple(&current, sym.arity, |args| {
                    let v = self.apply(f, args);
                    if !member[v] {
                        member[v] = true;
                        grew = true;
                    }
                });
            }
            if !grew {
                return Ok(current);
            }
        }
    }

    /// Whether `set` is closed under every function symbol; on failure the
    /// first offending symbol and argument tuple in lexicographic order.
    pub fn check_closed(&self, set: &[usize]) -> Result<()> {
        let mut member = vec![false; self.n];
        for &x in set {
            self.check_element(x)?;
            member[x] = true;
        }
        let mut sorted: Vec<usize> = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (f, sym) in self.sig.functions.iter().enumerate() {
            let mut witness = None;
            for_each_tuple(&sorted, sym.arity, |args| {
                if witness.is_none() && !member[self.apply(f, args)] {
                    witness = Some(args.to_vec());
                }
            });
            if let Some(witness) = witness {
                return Err(ModelError::NotClosed {
                    symbol: sym.name.clone(),
                    witness,
                });
            }
        }
        Ok(())
    }

    /// The substructure on a function-closed set, re-indexed in ascending
    /// order of the original elements. Element names record the embedding.
    pub fn induced_substructure(&self, closed: &[usize]) -> Result<FiniteStructure> {
        self.check_closed(closed)?;
        let mut elems: Vec<usize> = closed.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        let mut reindex = vec![usize::MAX; self.n];
        for (i, &x) in elems.iter().enumerate() {
            reindex[x] = i;
        }
        let k = elems.len();
        let sub = FiniteStructure::from_fns(
            self.sig.clone(),
            k,
            |f, args| {
                let orig: Vec<usize> = args.iter().map(|&a| elems[a]).collect();
                reindex[self.apply(f, &orig)]
            },
            |r, args| {
                let orig: Vec<usize> = args.iter().map(|&a| elems[a]).collect();
                self.holds(r, &orig)
            },
        )?;
        let names = elems.iter().map(|&x| self.element_label(x)).collect();
        let sub = sub.with_elem_names(names)?;
        Ok(match &self.name {
            Some(name) => sub.with_name(format!("{name}|{{{}}}", join_elems(&elems))),
            None => sub,
        })
    }

    /// All nonempty function-closed subsets, in increasing bitmask order.
    pub fn closed_subsets(&self) -> Vec<Vec<usize>> {
        assert!(self.n < usize::BITS as usize, "universe too large to enumerate subsets");
        let mut out = Vec::new();
        for mask in 1usize..(1 << self.n) {
            let set: Vec<usize> = (0..self.n).filter(|&x| mask >> x & 1 == 1).collect();
            if self.check_closed(&set).is_ok() {
                out.push(set);
            }
        }
        out
    }

    /// Every structure of `sig` on `n` elements, in a fixed order.
    /// Intended for small exhaustive checks.
    pub fn enumerate_all(sig: &Signature, n: usize) -> Vec<FiniteStructure> {
        if n == 0 {
            return Vec::new();
        }
        // One mixed-radix digit per table cell.
        let mut radices = Vec::new();
        for sym in &sig.functions {
            radices.extend(std::iter::repeat_n(n, table_len(n, sym.arity)));
        }
        for sym in &sig.relations {
            radices.extend(std::iter::repeat_n(2, table_len(n, sym.arity)));
        }
        let mut digits = vec![0usize; radices.len()];
        let mut out = Vec::new();
        loop {
            let mut cursor = 0;
            let mut funcs = Vec::new();
            for sym in &sig.functions {
                let len = table_len(n, sym.arity);
                funcs.push(digits[cursor..cursor + len].to_vec());
                cursor += len;
            }
            let mut rels = Vec::new();
            for sym in &sig.relations {
                let len = table_len(n, sym.arity);
                rels.push(digits[cursor..cursor + len].iter().map(|&d| d == 1).collect());
                cursor += len;
            }
            out.push(
                FiniteStructure::new(sig.clone(), n, funcs, rels)
                    .expect("enumerated tables are in range"),
            );
            let mut i = radices.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
    }
}

pub(crate) fn join_elems(elems: &[usize]) -> String {
    elems
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A raw set map `0..source_n -> 0..target_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementMap {
    source_n: usize,
    target_n: usize,
    images: Vec<usize>,
}

impl ElementMap {
    pub fn new(source_n: usize, target_n: usize, images: Vec<usize>) -> Result<Self> {
        if images.len() != source_n {
            return Err(ModelError::MapShape {
                expected: source_n,
                found: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&y| y >= target_n) {
            return Err(ModelError::ElementOutOfRange {
                element: bad,
                n: target_n,
            });
        }
        Ok(ElementMap {
            source_n,
            target_n,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        ElementMap {
            source_n: n,
            target_n: n,
            images: (0..n).collect(),
        }
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn target_n(&self) -> usize {
        self.target_n
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn get(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target_n];
        self.images.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target_n];
        for &y in &self.images {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// Parses the comma-separated form `0,1,0,1`.
    pub fn parse(source_n: usize, target_n: usize, text: &str) -> Result<Self> {
        let images = text
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| ModelError::Malformed(format!("`{s}` is not an element index")))
            })
            .collect::<Result<Vec<_>>>()?;
        ElementMap::new(source_n, target_n, images)
    }
}

impl fmt::Display for ElementMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses a space-separated element set such as `0 2 4`.
pub fn parse_element_set(n: usize, text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let x: usize = tok
            .parse()
            .map_err(|_| ModelError::Malformed(format!("`{tok}` is not an element index")))?;
        if x >= n {
            return Err(ModelError::ElementOutOfRange { element: x, n });
        }
        out.push(x);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
