//! Witness-producing checks of the isomorphism theorems.
//!
//! Every verifier builds the isomorphism the theorem promises and validates
//! it as a bijective strong homomorphism. A failed validation means a bug
//! in this crate and comes back as [`IsoError::InternalTheoremViolation`]
//! with enough detail to reproduce it.

use std::sync::Arc;

use thiserror::Error;

use crate::congruence::{
    con_lattice_with, is_congruence, principal_filter, quotient_of_congruence,
    restrict_congruence, saturation, ConLattice, CongruenceError, Partition,
};
use crate::fquot::{verify_cat_correspondence_with, verify_cat_third_iso, FquotError};
use crate::hom::{enumerate_strong_homs_with, image, kernel, Hom, HomError, HomFilter};
use crate::limits::{map_ordered, Limits};
use crate::model::{join_elems, FiniteStructure, ModelError};
use crate::quotient::{factor_hom, quotient_structure, QuotientError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("saturation {{{set}}} is not closed: {witness}")]
    SaturationNotClosed { set: String, witness: ModelError },
    #[error("{theorem} failed: {detail}")]
    InternalTheoremViolation { theorem: &'static str, detail: String },
}

fn violation(theorem: &'static str, detail: impl Into<String>) -> IsoError {
    IsoError::InternalTheoremViolation {
        theorem,
        detail: detail.into(),
    }
}

/// A validated isomorphism between the two sides of a theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub iso: Hom,
    pub lhs: String,
    pub rhs: String,
}

/// An order isomorphism between two congruence lattices, as index pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeIsoWitness {
    pub pairing: Vec<(usize, usize)>,
    pub lhs: ConLattice,
    pub rhs: ConLattice,
}

pub(crate) fn describe(m: &FiniteStructure) -> String {
    match m.name() {
        Some(name) => name.to_string(),
        None => format!("structure of size {}", m.size()),
    }
}

fn validated(
    theorem: &'static str,
    source: &Arc<FiniteStructure>,
    target: &Arc<FiniteStructure>,
    images: Vec<usize>,
    context: impl Fn() -> String,
) -> Result<IsoWitness, IsoError> {
    let shown = images
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let iso = Hom::new(source.clone(), target.clone(), images)
        .map_err(|e| violation(theorem, format!("{}; map {shown}: {e}", context())))?;
    if !iso.is_bijective() {
        return Err(violation(
            theorem,
            format!("{}; map {shown} is not bijective", context()),
        ));
    }
    Ok(IsoWitness {
        iso,
        lhs: describe(source),
        rhs: describe(target),
    })
}

/// `M/ker h ≅ h(M)` via `[x] ↦ h(x)`.
pub fn first_iso(h: &Hom) -> Result<IsoWitness, IsoError> {
    const THEOREM: &str = "first isomorphism theorem";
    let context = || format!("h = {} on {}", h.map(), describe(h.source()));
    let theta = kernel(h);
    let q = quotient_structure(h.source(), &theta)
        .map_err(|e| violation(THEOREM, format!("{}; kernel: {e}", context())))?;
    let (img, inclusion) = image(h);
    let mut position = vec![usize::MAX; h.target().size()];
    for (i, &y) in inclusion.images().iter().enumerate() {
        position[y] = i;
    }
    let images = theta
        .representatives()
        .iter()
        .map(|&x| position[h.apply(x)])
        .collect();
    validated(THEOREM, &q.structure, &img, images, context)
}

/// `N/θ|N ≅ N^θ/θ|N^θ` via `[y] ↦ [y]` for `y ∈ N`.
pub fn second_iso(
    m: &Arc<FiniteStructure>,
    n: &[usize],
    theta: &Partition,
) -> Result<IsoWitness, IsoError> {
    const THEOREM: &str = "second isomorphism theorem";
    let mut n = n.to_vec();
    n.sort_unstable();
    n.dedup();
    m.check_closed(&n)?;
    is_congruence(m, theta)?;
    let context = || {
        format!(
            "{}, N = {{{}}}, θ = {theta}",
            describe(m),
            join_elems(&n)
        )
    };
    let sat = saturation(theta, &n);
    if let Err(witness) = m.check_closed(&sat) {
        return Err(IsoError::SaturationNotClosed {
            set: join_elems(&sat),
            witness,
        });
    }
    let small = Arc::new(m.induced_substructure(&n)?);
    let big = Arc::new(m.induced_substructure(&sat)?);
    let theta_small = restrict_congruence(theta, &n);
    let theta_big = restrict_congruence(theta, &sat);
    let lhs = quotient_structure(&small, &theta_small)
        .map_err(|e| violation(THEOREM, format!("{}; restriction to N: {e}", context())))?;
    let rhs = quotient_structure(&big, &theta_big)
        .map_err(|e| violation(THEOREM, format!("{}; restriction to N^θ: {e}", context())))?;
    let images = theta_small
        .representatives()
        .iter()
        .map(|&i| {
            let y = n[i];
            let j = sat.binary_search(&y).expect("N is inside its saturation");
            theta_big.class_of(j)
        })
        .collect();
    validated(THEOREM, &lhs.structure, &rhs.structure, images, context)
}

/// `(M/θ)/(ψ/θ) ≅ M/ψ` via the ψ-class of any element of the double block.
pub fn third_iso(
    m: &Arc<FiniteStructure>,
    theta: &Partition,
    psi: &Partition,
) -> Result<IsoWitness, IsoError> {
    const THEOREM: &str = "third isomorphism theorem";
    is_congruence(m, theta)?;
    is_congruence(m, psi)?;
    let psi_over_theta = quotient_of_congruence(psi, theta)?;
    let context = || format!("{}, θ = {theta}, ψ = {psi}", describe(m));
    let first = quotient_structure(m, theta)?;
    let lhs = quotient_structure(&first.structure, &psi_over_theta)
        .map_err(|e| violation(THEOREM, format!("{}; ψ/θ: {e}", context())))?;
    let rhs = quotient_structure(m, psi)?;
    let theta_reps = theta.representatives();
    let images = psi_over_theta
        .representatives()
        .iter()
        .map(|&block| psi.class_of(theta_reps[block]))
        .collect();
    validated(THEOREM, &lhs.structure, &rhs.structure, images, context)
}

/// `[θ, ∇] ≅ Con(M/θ)` via `ψ ↦ ψ/θ`.
pub fn correspondence(
    m: &Arc<FiniteStructure>,
    theta: &Partition,
) -> Result<LatticeIsoWitness, IsoError> {
    correspondence_with(m, theta, &Limits::default())
}

pub fn correspondence_with(
    m: &Arc<FiniteStructure>,
    theta: &Partition,
    limits: &Limits,
) -> Result<LatticeIsoWitness, IsoError> {
    const THEOREM: &str = "correspondence theorem";
    is_congruence(m, theta)?;
    let context = || format!("{}, θ = {theta}", describe(m));
    let lattice = con_lattice_with(m, limits)?;
    let filter = principal_filter(&lattice, theta)?;
    let q = quotient_structure(m, theta)?;
    let upper = con_lattice_with(&q.structure, limits)?;
    if filter.len() != upper.len() {
        return Err(violation(
            THEOREM,
            format!(
                "{}; filter has {} elements, Con(M/θ) has {}",
                context(),
                filter.len(),
                upper.len()
            ),
        ));
    }
    let mut pairing = Vec::with_capacity(filter.len());
    let mut hit = vec![false; upper.len()];
    for (i, psi) in filter.elements().iter().enumerate() {
        let image = quotient_of_congruence(psi, theta)?;
        let j = upper.index_of(&image).ok_or_else(|| {
            violation(
                THEOREM,
                format!("{}; ψ/θ = {image} is not a congruence of M/θ (ψ = {psi})", context()),
            )
        })?;
        if hit[j] {
            return Err(violation(THEOREM, format!("{}; {image} hit twice", context())));
        }
        hit[j] = true;
        pairing.push((i, j));
    }
    for &(a, ja) in &pairing {
        for &(b, jb) in &pairing {
            if filter.leq(a, b) != upper.leq(ja, jb) {
                return Err(violation(
                    THEOREM,
                    format!(
                        "{}; order differs at {} vs {}",
                        context(),
                        filter.get(a),
                        filter.get(b)
                    ),
                ));
            }
        }
    }
    Ok(LatticeIsoWitness {
        pairing,
        lhs: filter,
        rhs: upper,
    })
}

/// For surjections `f ≤ g` out of `M`: transporting `ker g / ker f` along
/// `[x] ↦ f(x)` gives the kernel of the factor `g/f`. Returns that common
/// partition of the target of `f`.
pub fn check_ker_frac(f: &Hom, g: &Hom) -> Result<Partition, IsoError> {
    const THEOREM: &str = "kernel of the factor map";
    let h = factor_hom(f, g)?;
    let theta = kernel(f);
    let frac = quotient_of_congruence(&kernel(g), &theta)?;
    // φ sends θ-block b to f(rep b); invert it on the target of f.
    let mut block_of = vec![usize::MAX; f.target().size()];
    for (b, &x) in theta.representatives().iter().enumerate() {
        block_of[f.apply(x)] = b;
    }
    let transported = Partition::from_keys(block_of.iter().map(|&b| frac.class_of(b)));
    let factor_kernel = kernel(&h);
    if transported != factor_kernel {
        return Err(violation(
            THEOREM,
            format!(
                "{}: f = {}, g = {}; transported {transported} but kernel {factor_kernel}",
                describe(f.source()),
                f.map(),
                g.map()
            ),
        ));
    }
    Ok(transported)
}

/// `θ = ker π_θ` for a congruence θ.
pub fn check_kernel_of_projection(
    m: &Arc<FiniteStructure>,
    theta: &Partition,
) -> Result<(), IsoError> {
    let q = quotient_structure(m, theta)?;
    let k = kernel(&q.proj);
    if &k != theta {
        return Err(violation(
            "kernel of a projection",
            format!("{}: θ = {theta} but ker π = {k}", describe(m)),
        ));
    }
    Ok(())
}

/// Instance and defect counts for one theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub theorem: &'static str,
    pub instances: usize,
    pub defects: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub structure: String,
    pub rows: Vec<SweepRow>,
    /// Hom targets skipped because their search space exceeded the bound.
    pub skipped_targets: Vec<String>,
}

impl SweepReport {
    pub fn total_defects(&self) -> usize {
        self.rows.iter().map(|r| r.defects.len()).sum()
    }

    pub fn total_instances(&self) -> usize {
        self.rows.iter().map(|r| r.instances).sum()
    }

    pub fn row(&self, theorem: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.theorem == theorem)
    }
}

fn row<T: Sync, E: std::fmt::Display>(
    theorem: &'static str,
    limits: &Limits,
    items: &[T],
    check: impl Fn(&T) -> Result<(), E> + Sync + Send,
) -> SweepRow {
    let defects = map_ordered(limits.exec, items, |item| check(item).err().map(|e| e.to_string()))
        .into_iter()
        .flatten()
        .collect();
    SweepRow {
        theorem,
        instances: items.len(),
        defects,
    }
}

/// Runs every theorem on every admissible instance drawn from `m`:
/// all homomorphisms from `m` into itself, its quotients and `extra_targets`;
/// all closed subsets against all congruences; all pairs `θ ⊆ ψ`.
pub fn sweep(
    m: &Arc<FiniteStructure>,
    extra_targets: &[Arc<FiniteStructure>],
    limits: &Limits,
) -> Result<SweepReport, IsoError> {
    let lattice = con_lattice_with(m, limits)?;
    let thetas = lattice.elements().to_vec();
    let quotients = thetas
        .iter()
        .map(|t| quotient_structure(m, t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut targets: Vec<Arc<FiniteStructure>> = vec![m.clone()];
    targets.extend(quotients.iter().map(|q| q.structure.clone()));
    targets.extend(
        extra_targets
            .iter()
            .filter(|t| t.signature() == m.signature())
            .cloned(),
    );
    let mut homs = Vec::new();
    let mut skipped_targets = Vec::new();
    for t in &targets {
        match enumerate_strong_homs_with(m, t, HomFilter::All, limits) {
            Ok(found) => homs.extend(found),
            Err(HomError::SearchSpaceTooLarge { .. }) => skipped_targets.push(describe(t)),
            Err(e) => return Err(e.into()),
        }
    }
    let surjective: Vec<&Hom> = homs.iter().filter(|h| h.is_surjective()).collect();

    let closed = m.closed_subsets();
    let mut pairs_n_theta = Vec::new();
    for n in &closed {
        for t in &thetas {
            pairs_n_theta.push((n.clone(), t.clone()));
        }
    }
    let mut chains = Vec::new();
    for (i, t) in thetas.iter().enumerate() {
        for (j, p) in thetas.iter().enumerate() {
            if lattice.leq(i, j) {
                chains.push((t.clone(), p.clone(), i, j));
            }
        }
    }
    let mut surj_pairs = Vec::new();
    for f in &surjective {
        for g in &surjective {
            if kernel(f).refines(&kernel(g)) {
                surj_pairs.push((*f, *g));
            }
        }
    }

    let rows = vec![
        row("first isomorphism", limits, &homs, |h| first_iso(h).map(|_| ())),
        row("second isomorphism", limits, &pairs_n_theta, |(n, t)| {
            second_iso(m, n, t).map(|_| ())
        }),
        row("third isomorphism", limits, &chains, |(t, p, _, _)| {
            third_iso(m, t, p).map(|_| ())
        }),
        row("correspondence", limits, &thetas, |t| {
            correspondence_with(m, t, limits).map(|_| ())
        }),
        row("kernel of projection", limits, &thetas, |t| {
            check_kernel_of_projection(m, t)
        }),
        row("kernel of factor map", limits, &surj_pairs, |(f, g)| {
            check_ker_frac(f, g).map(|_| ())
        }),
        row("categorical third isomorphism", limits, &chains, |&(_, _, i, j)| {
            verify_cat_third_iso(&quotients[i].proj, &quotients[j].proj).map(|_| ())
        }),
        row(
            "categorical correspondence",
            limits,
            &surjective,
            |f| -> Result<(), FquotError> {
                verify_cat_correspondence_with(f, limits).map(|_| ())
            },
        ),
    ];
    Ok(SweepReport {
        structure: describe(m),
        rows,
        skipped_targets,
    })
}
