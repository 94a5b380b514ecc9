//! Quotient structures, quotient maps and factor homomorphisms.

use std::sync::Arc;

use thiserror::Error;

use crate::congruence::{is_congruence, CongruenceError, Partition};
use crate::hom::{kernel, Hom, HomError};
#[cfg(debug_assertions)]
use crate::model::for_each_tuple;
use crate::model::FiniteStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error("homomorphisms have different sources")]
    SourceMismatch,
    #[error("the {0} homomorphism is not surjective")]
    NotSurjective(&'static str),
    #[error("pair ({0}, {1}) is in the first kernel but not the second")]
    KernelNotIncluded(usize, usize),
}

/// M/θ together with the projection π_θ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientResult {
    pub structure: Arc<FiniteStructure>,
    pub proj: Hom,
}

impl QuotientResult {
    pub fn congruence(&self) -> Partition {
        kernel(&self.proj)
    }
}

fn block_name(m: &FiniteStructure, block: &[usize]) -> String {
    let labels: Vec<String> = block.iter().map(|&x| m.element_label(x)).collect();
    format!("[{}]", labels.join(" "))
}

/// Builds M/θ on θ's canonical block indices. Functions and relations are
/// read off the least element of each block.
pub fn quotient_structure(
    m: &Arc<FiniteStructure>,
    theta: &Partition,
) -> Result<QuotientResult, QuotientError> {
    is_congruence(m, theta)?;
    let reps = theta.representatives();
    let k = theta.num_blocks();
    let mut buf = Vec::new();
    let mut buf2 = Vec::new();
    let q = FiniteStructure::from_fns(
        m.signature().clone(),
        k,
        |f, args| {
            buf.clear();
            buf.extend(args.iter().map(|&b| reps[b]));
            theta.class_of(m.apply(f, &buf))
        },
        |r, args| {
            buf2.clear();
            buf2.extend(args.iter().map(|&b| reps[b]));
            m.holds(r, &buf2)
        },
    )
    .expect("block tables are in range");

    #[cfg(debug_assertions)]
    audit_representatives(m, theta, &q);

    let names = theta.blocks().iter().map(|b| block_name(m, b)).collect();
    let mut q = q.with_elem_names(names).expect("block names are distinct");
    if let Some(name) = m.name() {
        q = q.with_name(format!("{name}/({theta})"));
    }
    let structure = Arc::new(q);
    let proj = Hom::new(m.clone(), structure.clone(), theta.labels().to_vec())
        .expect("a quotient map is a strong homomorphism");
    debug_assert_eq!(&kernel(&proj), theta);
    Ok(QuotientResult { structure, proj })
}

// Every tuple of M must agree with the block tables, i.e. the result does not
// depend on which representatives were read.
#[cfg(debug_assertions)]
fn audit_representatives(m: &FiniteStructure, theta: &Partition, q: &FiniteStructure) {
    let universe: Vec<usize> = (0..m.size()).collect();
    let mut blocks = Vec::new();
    for (f, sym) in m.signature().functions().iter().enumerate() {
        for_each_tuple(&universe, sym.arity, |args| {
            blocks.clear();
            blocks.extend(args.iter().map(|&x| theta.class_of(x)));
            assert_eq!(
                q.apply(f, &blocks),
                theta.class_of(m.apply(f, args)),
                "quotient table for `{}` depends on representatives",
                sym.name
            );
        });
    }
    for (r, sym) in m.signature().relations().iter().enumerate() {
        for_each_tuple(&universe, sym.arity, |args| {
            blocks.clear();
            blocks.extend(args.iter().map(|&x| theta.class_of(x)));
            assert_eq!(
                q.holds(r, &blocks),
                m.holds(r, args),
                "quotient relation `{}` depends on representatives",
                sym.name
            );
        });
    }
}

/// The unique `h` with `h ∘ f = g`, for surjective `f`, `g` with
/// `ker f ⊆ ker g`.
pub fn factor_hom(f: &Hom, g: &Hom) -> Result<Hom, QuotientError> {
    if !f.source().same_structure(g.source()) {
        return Err(QuotientError::SourceMismatch);
    }
    if !f.is_surjective() {
        return Err(QuotientError::NotSurjective("first"));
    }
    if !g.is_surjective() {
        return Err(QuotientError::NotSurjective("second"));
    }
    if let Some((x, y)) = kernel(f).first_pair_outside(&kernel(g)) {
        return Err(QuotientError::KernelNotIncluded(x, y));
    }
    let mut images = vec![0; f.target().size()];
    for x in 0..f.source().size() {
        images[f.apply(x)] = g.apply(x);
    }
    Ok(Hom::new(f.target().clone(), g.target().clone(), images)?)
}
