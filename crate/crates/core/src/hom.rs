//! Strong homomorphisms.
//!
//! A [`Hom`] can only be obtained through validation, so holding one is
//! proof that its map preserves every function symbol and preserves and
//! reflects every relation symbol.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::congruence::Partition;
use crate::limits::{map_ordered, saturating_pow, Exec, Limits};
use crate::model::{for_each_tuple, ElementMap, FiniteStructure, ModelError};

/// The first place a candidate map fails to be a strong homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationReport {
    /// `h(F(args)) != F(h(args))`.
    Function {
        symbol: String,
        args: Vec<usize>,
        image_of_value: usize,
        value_of_images: usize,
    },
    /// `R(args)` and `R(h(args))` disagree.
    Relation {
        symbol: String,
        args: Vec<usize>,
        holds_in_source: bool,
        holds_in_target: bool,
    },
}

impl ViolationReport {
    pub fn symbol(&self) -> &str {
        match self {
            ViolationReport::Function { symbol, .. } | ViolationReport::Relation { symbol, .. } => {
                symbol
            }
        }
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationReport::Function {
                symbol,
                args,
                image_of_value,
                value_of_images,
            } => write!(
                f,
                "FunctionViolation({symbol}): at {args:?} the image of the value is {image_of_value} but the value at the images is {value_of_images}"
            ),
            ViolationReport::Relation {
                symbol,
                args,
                holds_in_source,
                holds_in_target,
            } => {
                let word = |b: bool| if b { "holds" } else { "fails" };
                write!(
                    f,
                    "RelationViolation({symbol}): {symbol}{args:?} {} in the source but {} at the images in the target",
                    word(*holds_in_source),
                    word(*holds_in_target)
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("structures do not share a signature")]
    SignatureMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("not a strong homomorphism: {0}")]
    Violation(ViolationReport),
    #[error("search space of {candidates} candidate maps exceeds the bound {bound}")]
    SearchSpaceTooLarge { bound: u128, candidates: u128 },
    #[error("target of the inner map is not the source of the outer map")]
    TargetSourceMismatch,
}

/// A validated strong homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    source: Arc<FiniteStructure>,
    target: Arc<FiniteStructure>,
    map: ElementMap,
    surjective: bool,
    injective: bool,
}

impl Hom {
    pub fn new(
        source: Arc<FiniteStructure>,
        target: Arc<FiniteStructure>,
        images: Vec<usize>,
    ) -> Result<Hom, HomError> {
        let map = ElementMap::new(source.size(), target.size(), images)?;
        check_strong_hom(&source, &target, map)
    }

    pub fn identity(m: Arc<FiniteStructure>) -> Hom {
        let map = ElementMap::identity(m.size());
        Hom {
            source: m.clone(),
            target: m,
            map,
            surjective: true,
            injective: true,
        }
    }

    pub fn source(&self) -> &Arc<FiniteStructure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteStructure> {
        &self.target
    }

    pub fn map(&self) -> &ElementMap {
        &self.map
    }

    pub fn images(&self) -> &[usize] {
        self.map.images()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map.get(x)
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_bijective(&self) -> bool {
        self.surjective && self.injective
    }

    /// The inverse of a bijective homomorphism, revalidated.
    pub fn inverse(&self) -> Option<Hom> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.source_n()];
        for (x, &y) in self.images().iter().enumerate() {
            inv[y] = x;
        }
        Hom::new(self.target.clone(), self.source.clone(), inv).ok()
    }

    /// Same underlying map between structurally equal endpoints.
    pub fn same_as(&self, other: &Hom) -> bool {
        self.map == other.map
            && self.source.same_structure(&other.source)
            && self.target.same_structure(&other.target)
    }
}

fn first_violation(
    m: &FiniteStructure,
    n: &FiniteStructure,
    map: &ElementMap,
) -> Option<ViolationReport> {
    let universe: Vec<usize> = (0..m.size()).collect();
    let mut buf = Vec::new();
    for (f, sym) in m.signature().functions().iter().enumerate() {
        let mut found = None;
        for_each_tuple(&universe, sym.arity, |args| {
            if found.is_some() {
                return;
            }
            buf.clear();
            buf.extend(args.iter().map(|&a| map.get(a)));
            let lhs = map.get(m.apply(f, args));
            let rhs = n.apply(f, &buf);
            if lhs != rhs {
                found = Some(ViolationReport::Function {
                    symbol: sym.name.clone(),
                    args: args.to_vec(),
                    image_of_value: lhs,
                    value_of_images: rhs,
                });
            }
        });
        if found.is_some() {
            return found;
        }
    }
    for (r, sym) in m.signature().relations().iter().enumerate() {
        let mut found = None;
        for_each_tuple(&universe, sym.arity, |args| {
            if found.is_some() {
                return;
            }
            buf.clear();
            buf.extend(args.iter().map(|&a| map.get(a)));
            let src = m.holds(r, args);
            let tgt = n.holds(r, &buf);
            if src != tgt {
                found = Some(ViolationReport::Relation {
                    symbol: sym.name.clone(),
                    args: args.to_vec(),
                    holds_in_source: src,
                    holds_in_target: tgt,
                });
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Validates `map` as a strong homomorphism from `m` to `n`.
pub fn check_strong_hom(
    m: &Arc<FiniteStructure>,
    n: &Arc<FiniteStructure>,
    map: ElementMap,
) -> Result<Hom, HomError> {
    if m.signature() != n.signature() {
        return Err(HomError::SignatureMismatch);
    }
    if map.source_n() != m.size() || map.target_n() != n.size() {
        return Err(HomError::Model(ModelError::MapShape {
            expected: m.size(),
            found: map.source_n(),
        }));
    }
    if let Some(v) = first_violation(m, n, &map) {
        return Err(HomError::Violation(v));
    }
    Ok(Hom {
        source: m.clone(),
        target: n.clone(),
        surjective: map.is_surjective(),
        injective: map.is_injective(),
        map,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomFilter {
    All,
    Surjective,
    Bijective,
}

impl std::str::FromStr for HomFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(HomFilter::All),
            "surjective" => Ok(HomFilter::Surjective),
            "bijective" => Ok(HomFilter::Bijective),
            other => Err(format!("unknown filter `{other}`")),
        }
    }
}

// One constraint of the strong-homomorphism conditions, checked as soon as
// every element it mentions has an image.
enum Check {
    Func {
        f: usize,
        args: Vec<usize>,
        value: usize,
    },
    Rel {
        r: usize,
        args: Vec<usize>,
        holds: bool,
    },
}

/// Backtracking search over maps `src -> tgt` in lexicographic order of the
/// image sequence, pruning as soon as a fully assigned constraint fails.
pub(crate) struct HomSearch<'a> {
    src: &'a FiniteStructure,
    tgt: &'a FiniteStructure,
    injective: bool,
    // Allowed images per source element, ascending.
    candidates: Vec<Vec<usize>>,
    // Constraints whose largest mentioned element is the index.
    checks: Vec<Vec<Check>>,
    feasible: bool,
}

fn element_invariants(m: &FiniteStructure) -> Vec<Vec<usize>> {
    let n = m.size();
    let universe: Vec<usize> = (0..n).collect();
    let mut inv = vec![Vec::new(); n];
    for (f, sym) in m.signature().functions().iter().enumerate() {
        let mut pre = vec![0usize; n];
        for_each_tuple(&universe, sym.arity, |args| pre[m.apply(f, args)] += 1);
        for x in 0..n {
            inv[x].push(pre[x]);
        }
    }
    for (r, sym) in m.signature().relations().iter().enumerate() {
        let mut counts = vec![vec![0usize; sym.arity]; n];
        for_each_tuple(&universe, sym.arity, |args| {
            if m.holds(r, args) {
                for (p, &a) in args.iter().enumerate() {
                    counts[a][p] += 1;
                }
            }
        });
        for x in 0..n {
            inv[x].extend_from_slice(&counts[x]);
        }
    }
    inv
}

impl<'a> HomSearch<'a> {
    /// `pins[x] = Some(y)` forces the image of `x`. With `injective`, only
    /// bijections are produced (the structures must have equal size).
    pub(crate) fn new(
        src: &'a FiniteStructure,
        tgt: &'a FiniteStructure,
        pins: &[Option<usize>],
        injective: bool,
    ) -> HomSearch<'a> {
        let n = src.size();
        let m = tgt.size();
        let mut feasible = !(injective && n != m);
        let mut candidates: Vec<Vec<usize>> = (0..n)
            .map(|x| match pins.get(x).copied().flatten() {
                Some(y) if y < m => vec![y],
                Some(_) => Vec::new(),
                None => (0..m).collect(),
            })
            .collect();
        if injective && feasible {
            let si = element_invariants(src);
            let ti = element_invariants(tgt);
            for (x, cands) in candidates.iter_mut().enumerate() {
                cands.retain(|&y| si[x] == ti[y]);
            }
        }

        let universe: Vec<usize> = (0..n).collect();
        let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
        for (f, sym) in src.signature().functions().iter().enumerate() {
            for_each_tuple(&universe, sym.arity, |args| {
                let value = src.apply(f, args);
                let step = args.iter().copied().fold(value, usize::max);
                checks[step].push(Check::Func {
                    f,
                    args: args.to_vec(),
                    value,
                });
            });
        }
        for (r, sym) in src.signature().relations().iter().enumerate() {
            if sym.arity == 0 {
                if src.holds(r, &[]) != tgt.holds(r, &[]) {
                    feasible = false;
                }
                continue;
            }
            for_each_tuple(&universe, sym.arity, |args| {
                let step = args.iter().copied().max().unwrap_or(0);
                checks[step].push(Check::Rel {
                    r,
                    args: args.to_vec(),
                    holds: src.holds(r, args),
                });
            });
        }
        HomSearch {
            src,
            tgt,
            injective,
            candidates,
            checks,
            feasible,
        }
    }

    fn step_ok(&self, step: usize, images: &[usize], buf: &mut Vec<usize>) -> bool {
        self.checks[step].iter().all(|check| match check {
            Check::Func { f, args, value } => {
                buf.clear();
                buf.extend(args.iter().map(|&a| images[a]));
                self.tgt.apply(*f, buf) == images[*value]
            }
            Check::Rel { r, args, holds } => {
                buf.clear();
                buf.extend(args.iter().map(|&a| images[a]));
                self.tgt.holds(*r, buf) == *holds
            }
        })
    }

    fn dfs(
        &self,
        step: usize,
        images: &mut Vec<usize>,
        used: &mut [bool],
        buf: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if step == self.src.size() {
            return visit(images);
        }
        for &y in &self.candidates[step] {
            if self.injective && used[y] {
                continue;
            }
            images.push(y);
            if self.step_ok(step, images, buf) {
                if self.injective {
                    used[y] = true;
                }
                let flow = self.dfs(step + 1, images, used, buf, visit);
                if self.injective {
                    used[y] = false;
                }
                if flow.is_break() {
                    images.pop();
                    return flow;
                }
            }
            images.pop();
        }
        ControlFlow::Continue(())
    }

    /// Visits solutions whose first image is `first` (or all, if `None`).
    fn run_from(
        &self,
        first: Option<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if !self.feasible {
            return ControlFlow::Continue(());
        }
        let mut images = Vec::with_capacity(self.src.size());
        let mut used = vec![false; self.tgt.size()];
        let mut buf = Vec::new();
        match first {
            None => self.dfs(0, &mut images, &mut used, &mut buf, visit),
            Some(y) => {
                images.push(y);
                if !self.step_ok(0, &images, &mut buf) {
                    return ControlFlow::Continue(());
                }
                used[y] = true;
                self.dfs(1, &mut images, &mut used, &mut buf, visit)
            }
        }
    }

    pub(crate) fn first(&self) -> Option<Vec<usize>> {
        let mut out = None;
        let _ = self.run_from(None, &mut |imgs| {
            out = Some(imgs.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub(crate) fn collect(&self, exec: Exec) -> Vec<Vec<usize>> {
        if self.src.size() == 0 || !self.feasible {
            return Vec::new();
        }
        let branches = map_ordered(exec, &self.candidates[0], |&y| {
            let mut found = Vec::new();
            let _ = self.run_from(Some(y), &mut |imgs| {
                found.push(imgs.to_vec());
                ControlFlow::Continue(())
            });
            found
        });
        branches.into_iter().flatten().collect()
    }

    pub(crate) fn count(&self) -> usize {
        let mut count = 0;
        let _ = self.run_from(None, &mut |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        count
    }
}

pub(crate) fn guard_search(
    source_n: usize,
    target_n: usize,
    limits: &Limits,
) -> Result<(), HomError> {
    let candidates = saturating_pow(target_n, source_n);
    if candidates > limits.max_search {
        return Err(HomError::SearchSpaceTooLarge {
            bound: limits.max_search,
            candidates,
        });
    }
    Ok(())
}

pub fn enumerate_strong_homs(
    m: &Arc<FiniteStructure>,
    n: &Arc<FiniteStructure>,
    filter: HomFilter,
) -> Result<Vec<Hom>, HomError> {
    enumerate_strong_homs_with(m, n, filter, &Limits::default())
}

/// Every strong homomorphism passing `filter`, in lexicographic order of
/// the image sequence.
pub fn enumerate_strong_homs_with(
    m: &Arc<FiniteStructure>,
    n: &Arc<FiniteStructure>,
    filter: HomFilter,
    limits: &Limits,
) -> Result<Vec<Hom>, HomError> {
    if m.signature() != n.signature() {
        return Err(HomError::SignatureMismatch);
    }
    guard_search(m.size(), n.size(), limits)?;
    let injective = filter == HomFilter::Bijective;
    let search = HomSearch::new(m, n, &[], injective);
    let homs = search
        .collect(limits.exec)
        .into_iter()
        .map(|images| {
            let map = ElementMap::new(m.size(), n.size(), images).expect("search stays in range");
            Hom {
                source: m.clone(),
                target: n.clone(),
                surjective: map.is_surjective(),
                injective: map.is_injective(),
                map,
            }
        })
        .filter(|h| match filter {
            HomFilter::All => true,
            HomFilter::Surjective => h.surjective,
            HomFilter::Bijective => h.surjective && h.injective,
        })
        .collect();
    Ok(homs)
}

/// The first isomorphism `m -> n` in lexicographic order, if any.
pub fn is_isomorphic(
    m: &Arc<FiniteStructure>,
    n: &Arc<FiniteStructure>,
) -> Result<Option<Hom>, HomError> {
    if m.signature() != n.signature() {
        return Err(HomError::SignatureMismatch);
    }
    if m.size() != n.size() {
        return Ok(None);
    }
    let found = HomSearch::new(m, n, &[], true).first();
    Ok(found.map(|images| {
        Hom::new(m.clone(), n.clone(), images).expect("search results are strong homomorphisms")
    }))
}

/// Elements identified by `h`.
pub fn kernel(h: &Hom) -> Partition {
    Partition::from_labels(h.images())
}

/// The image of `h` as a substructure of its target, with the inclusion.
pub fn image(h: &Hom) -> (Arc<FiniteStructure>, Hom) {
    let mut set: Vec<usize> = h.images().to_vec();
    set.sort_unstable();
    set.dedup();
    let sub = Arc::new(
        h.target
            .induced_substructure(&set)
            .expect("the image of a strong homomorphism is function-closed"),
    );
    let inclusion = Hom::new(sub.clone(), h.target.clone(), set)
        .expect("inclusion of a substructure is a strong homomorphism");
    (sub, inclusion)
}

/// `h` with its target cut down to its image; always surjective.
pub fn corestriction(h: &Hom) -> Hom {
    let (sub, inclusion) = image(h);
    let mut index = vec![usize::MAX; h.target.size()];
    for (i, &y) in inclusion.images().iter().enumerate() {
        index[y] = i;
    }
    let images = h.images().iter().map(|&y| index[y]).collect();
    Hom::new(h.source.clone(), sub, images)
        .expect("corestriction of a strong homomorphism is a strong homomorphism")
}

/// `outer ∘ inner`.
pub fn compose(outer: &Hom, inner: &Hom) -> Result<Hom, HomError> {
    if !inner.target.same_structure(&outer.source) {
        return Err(HomError::TargetSourceMismatch);
    }
    let images = inner.images().iter().map(|&y| outer.apply(y)).collect();
    Hom::new(inner.source.clone(), outer.target.clone(), images)
}
