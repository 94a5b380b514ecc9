//! Quotients as classes of surjective strong homomorphisms.
//!
//! Surjections `f, g` out of a structure are preordered by factorization
//! (`f ≤ g` iff `g = h ∘ f` for some strong homomorphism `h`) and
//! identified when each factors through the other. Each class is
//! represented by the projection onto `M/θ` for the kernel `θ`.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::congruence::{con_lattice_with, ConLattice, CongruenceError, Partition};
use crate::hom::{compose, guard_search, kernel, Hom, HomError, HomSearch};
use crate::isothms::IsoWitness;
use crate::limits::{map_ordered, saturating_pow, Limits};
use crate::model::{ElementMap, FiniteStructure};
use crate::quotient::{factor_hom, quotient_structure, QuotientError, QuotientResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FquotError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error("homomorphisms have different sources")]
    SourceMismatch,
    #[error("the {0} homomorphism is not surjective")]
    NotSurjective(&'static str),
    #[error("the homomorphisms do not factor through each other")]
    NotEquivalent,
    #[error("the inclusion map is not injective into the structure's universe")]
    BadInclusion,
    #[error("{theorem}: {detail}")]
    Violation { theorem: &'static str, detail: String },
}

fn violation(theorem: &'static str, detail: impl Into<String>) -> FquotError {
    FquotError::Violation {
        theorem,
        detail: detail.into(),
    }
}

/// One projection per congruence, ordered by factorization.
#[derive(Clone, Debug)]
pub struct FQuotientPoset {
    base: Arc<FiniteStructure>,
    lattice: ConLattice,
    reps: Vec<QuotientResult>,
    leq: Vec<Vec<bool>>,
}

impl FQuotientPoset {
    pub fn base(&self) -> &Arc<FiniteStructure> {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[QuotientResult] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Hom {
        &self.reps[i].proj
    }

    /// The congruence lattice the representatives were built from.
    pub fn lattice(&self) -> &ConLattice {
        &self.lattice
    }

    pub fn congruences(&self) -> &[Partition] {
        self.lattice.elements()
    }

    /// `rep(i) ≤ rep(j)` by factorization.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn leq_table(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// The class of a surjection out of the base, located by its kernel.
    pub fn class_of(&self, h: &Hom) -> Option<usize> {
        if !h.is_surjective() || !h.source().same_structure(&self.base) {
            return None;
        }
        self.lattice.index_of(&kernel(h))
    }

    /// Indices of the classes above `i`.
    pub fn up_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.leq[i][j]).collect()
    }

    /// Covering pairs of the factorization order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i != j
                    && self.leq[i][j]
                    && !(0..k).any(|m| m != i && m != j && self.leq[i][m] && self.leq[m][j])
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Hasse diagram with nodes labelled by kernels.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for (i, p) in self.congruences().iter().enumerate() {
            let _ = writeln!(out, "  q{i} [label=\"ker = {p}\"];");
        }
        for (lo, hi) in self.covers() {
            let _ = writeln!(out, "  q{lo} -> q{hi};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn quo_poset(m: &Arc<FiniteStructure>) -> Result<FQuotientPoset, FquotError> {
    quo_poset_with(m, &Limits::default())
}

pub fn quo_poset_with(
    m: &Arc<FiniteStructure>,
    limits: &Limits,
) -> Result<FQuotientPoset, FquotError> {
    let lattice = con_lattice_with(m, limits)?;
    let reps = lattice
        .elements()
        .iter()
        .map(|theta| quotient_structure(m, theta))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<usize> = (0..reps.len()).collect();
    let leq = map_ordered(limits.exec, &rows, |&i| {
        reps.iter()
            .map(|g| {
                leq_by_factorization(&reps[i].proj, &g.proj)
                    .expect("projections share their source")
                    .is_some()
            })
            .collect()
    });
    Ok(FQuotientPoset {
        base: m.clone(),
        lattice,
        reps,
        leq,
    })
}

/// The `h` with `h ∘ f = g`, found by searching maps between the targets.
/// It never looks at kernels: the values of `h` are pinned by `f` and `g`
/// and the search validates the pinned map.
pub fn leq_by_factorization(f: &Hom, g: &Hom) -> Result<Option<Hom>, FquotError> {
    if !f.source().same_structure(g.source()) {
        return Err(FquotError::SourceMismatch);
    }
    if !f.is_surjective() {
        return Err(FquotError::NotSurjective("first"));
    }
    if !g.is_surjective() {
        return Err(FquotError::NotSurjective("second"));
    }
    let mut pins: Vec<Option<usize>> = vec![None; f.target().size()];
    for x in 0..f.source().size() {
        match pins[f.apply(x)] {
            Some(y) if y != g.apply(x) => return Ok(None),
            _ => pins[f.apply(x)] = Some(g.apply(x)),
        }
    }
    let search = HomSearch::new(f.target(), g.target(), &pins, false);
    Ok(search.first().map(|images| {
        Hom::new(f.target().clone(), g.target().clone(), images)
            .expect("search results are strong homomorphisms")
    }))
}

/// Agreement between the factorization poset and the congruence lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuoConReport {
    pub classes: usize,
    pub congruences: usize,
    /// Classes whose kernel is missing from, or repeated in, the lattice.
    pub kernel_defects: Vec<usize>,
    pub order_entries: usize,
    /// `(i, j)` where factorization and kernel inclusion disagree.
    pub order_mismatches: Vec<(usize, usize)>,
}

impl QuoConReport {
    pub fn ok(&self) -> bool {
        self.classes == self.congruences
            && self.kernel_defects.is_empty()
            && self.order_mismatches.is_empty()
    }
}

/// Checks that taking kernels is an order isomorphism from the
/// factorization poset onto the congruence lattice.
pub fn verify_quo_con_iso(m: &Arc<FiniteStructure>) -> Result<QuoConReport, FquotError> {
    verify_quo_con_iso_with(m, &Limits::default())
}

pub fn verify_quo_con_iso_with(
    m: &Arc<FiniteStructure>,
    limits: &Limits,
) -> Result<QuoConReport, FquotError> {
    let poset = quo_poset_with(m, limits)?;
    let lattice = poset.lattice();
    let k = poset.len();
    let mut seen = vec![false; lattice.len()];
    let mut kernel_defects = Vec::new();
    let mut image = vec![usize::MAX; k];
    for (i, slot) in image.iter_mut().enumerate() {
        match lattice.index_of(&kernel(poset.rep(i))) {
            Some(j) if !seen[j] => {
                seen[j] = true;
                *slot = j;
            }
            _ => kernel_defects.push(i),
        }
    }
    let mut order_mismatches = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let by_kernel = image[i] != usize::MAX
                && image[j] != usize::MAX
                && lattice.leq(image[i], image[j]);
            if poset.leq(i, j) != by_kernel {
                order_mismatches.push((i, j));
            }
        }
    }
    Ok(QuoConReport {
        classes: k,
        congruences: lattice.len(),
        kernel_defects,
        order_entries: k * k,
        order_mismatches,
    })
}

/// `g` factored through `f`, and the identification of the target of `g`
/// with the quotient of the target of `f` by the factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatThirdReport {
    pub factor: Hom,
    pub iso: Hom,
}

pub fn verify_cat_third_iso(f: &Hom, g: &Hom) -> Result<CatThirdReport, FquotError> {
    const THEOREM: &str = "categorical third isomorphism";
    let h = factor_hom(f, g)?;
    if !h.is_surjective() {
        return Err(violation(THEOREM, format!("factor {} is not surjective", h.map())));
    }
    let q = quotient_structure(h.source(), &kernel(&h))
        .map_err(|e| violation(THEOREM, format!("kernel of the factor: {e}")))?;
    let reps = q.congruence().representatives();
    let images = reps.iter().map(|&y| h.apply(y)).collect();
    let iso = Hom::new(q.structure.clone(), g.target().clone(), images)
        .map_err(|e| violation(THEOREM, format!("block map: {e}")))?;
    if !iso.is_bijective() {
        return Err(violation(THEOREM, format!("block map {} is not bijective", iso.map())));
    }
    Ok(CatThirdReport { factor: h, iso })
}

/// `[g] ↦ [g/f]` from the classes above `[f]` to the classes of the target
/// of `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatCorrespondenceReport {
    pub up_set: Vec<usize>,
    pub target_classes: usize,
    pub pairing: Vec<(usize, usize)>,
}

pub fn verify_cat_correspondence(f: &Hom) -> Result<CatCorrespondenceReport, FquotError> {
    verify_cat_correspondence_with(f, &Limits::default())
}

pub fn verify_cat_correspondence_with(
    f: &Hom,
    limits: &Limits,
) -> Result<CatCorrespondenceReport, FquotError> {
    const THEOREM: &str = "categorical correspondence";
    if !f.is_surjective() {
        return Err(FquotError::NotSurjective("first"));
    }
    let lower = quo_poset_with(f.source(), limits)?;
    let upper = quo_poset_with(f.target(), limits)?;
    let i = lower
        .class_of(f)
        .ok_or_else(|| violation(THEOREM, "kernel of f is not a congruence"))?;
    let up = lower.up_set(i);
    let mut pairing = Vec::with_capacity(up.len());
    let mut hit = vec![false; upper.len()];
    for &j in &up {
        let h = factor_hom(f, lower.rep(j))?;
        let k = upper
            .class_of(&h)
            .ok_or_else(|| violation(THEOREM, format!("no class for the factor {}", h.map())))?;
        if hit[k] {
            return Err(violation(THEOREM, format!("class {k} hit twice")));
        }
        hit[k] = true;
        pairing.push((j, k));
    }
    if let Some(k) = hit.iter().position(|h| !h) {
        return Err(violation(THEOREM, format!("class {k} of the target is not hit")));
    }
    for &(a, ka) in &pairing {
        for &(b, kb) in &pairing {
            if lower.leq(a, b) != upper.leq(ka, kb) {
                return Err(violation(
                    THEOREM,
                    format!("order differs between classes {a}, {b} and {ka}, {kb}"),
                ));
            }
        }
    }
    Ok(CatCorrespondenceReport {
        up_set: up,
        target_classes: upper.len(),
        pairing,
    })
}

/// Mutually factoring surjections have isomorphic targets; the witness is
/// the factor of `g` through `f`.
pub fn equiv_implies_iso(f: &Hom, g: &Hom) -> Result<IsoWitness, FquotError> {
    const THEOREM: &str = "equivalent quotients are isomorphic";
    let there = leq_by_factorization(f, g)?.ok_or(FquotError::NotEquivalent)?;
    let back = leq_by_factorization(g, f)?.ok_or(FquotError::NotEquivalent)?;
    if compose(&back, &there)? != Hom::identity(f.target().clone()) {
        return Err(violation(THEOREM, "back after there is not the identity"));
    }
    if compose(&there, &back)? != Hom::identity(g.target().clone()) {
        return Err(violation(THEOREM, "there after back is not the identity"));
    }
    Ok(IsoWitness {
        lhs: crate::isothms::describe(f.target()),
        rhs: crate::isothms::describe(g.target()),
        iso: there,
    })
}

/// A target and an assignment of the generators with the wrong number of
/// extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeWitness {
    pub target: usize,
    pub target_name: String,
    pub assignment: Vec<usize>,
    pub extensions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCheckReport {
    pub targets: usize,
    /// Number of (target, assignment) pairs checked.
    pub checked: usize,
    pub failures: usize,
    /// The first failure in target order, then assignment order.
    pub witness: Option<FreeWitness>,
}

impl FreeCheckReport {
    /// Unique extension for every assignment into every listed target.
    /// Says nothing about targets outside the list.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks, against a finite list of targets, that every map from the
/// generators extends along `inclusion` to exactly one strong homomorphism.
pub fn bounded_free_check(
    a: &Arc<FiniteStructure>,
    inclusion: &ElementMap,
    targets: &[Arc<FiniteStructure>],
    limits: &Limits,
) -> Result<FreeCheckReport, FquotError> {
    if inclusion.target_n() != a.size() || !inclusion.is_injective() {
        return Err(FquotError::BadInclusion);
    }
    for b in targets {
        if b.signature() != a.signature() {
            return Err(HomError::SignatureMismatch.into());
        }
        guard_search(a.size() - inclusion.source_n(), b.size(), limits)?;
        let maps = saturating_pow(b.size(), inclusion.source_n());
        if maps > limits.max_search {
            return Err(HomError::SearchSpaceTooLarge {
                bound: limits.max_search,
                candidates: maps,
            }
            .into());
        }
    }
    let x = inclusion.source_n();
    let per_target = map_ordered(limits.exec, targets, |b| {
        let elems: Vec<usize> = (0..b.size()).collect();
        let mut rows = Vec::new();
        crate::model::for_each_tuple(&elems, x, |assignment| {
            let mut pins = vec![None; a.size()];
            for (g, &y) in assignment.iter().enumerate() {
                pins[inclusion.get(g)] = Some(y);
            }
            let count = HomSearch::new(a, b, &pins, false).count();
            rows.push((assignment.to_vec(), count));
        });
        rows
    });
    let mut report = FreeCheckReport {
        targets: targets.len(),
        checked: 0,
        failures: 0,
        witness: None,
    };
    for (t, rows) in per_target.into_iter().enumerate() {
        for (assignment, count) in rows {
            report.checked += 1;
            if count != 1 {
                report.failures += 1;
                if report.witness.is_none() {
                    report.witness = Some(FreeWitness {
                        target: t,
                        target_name: crate::isothms::describe(&targets[t]),
                        assignment,
                        extensions: count,
                    });
                }
            }
        }
    }
    Ok(report)
}
