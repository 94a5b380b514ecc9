//! Acceptance suite: one check per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; the test fails if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fquot_core::congruence::{con_lattice, eq_join, eq_meet, is_congruence, Partition};
use fquot_core::fixtures;
use fquot_core::folog::{
    abelian_group_theory, all_assignments, holds, is_pcnf, mi_monoid_theory, parse_formula,
    preservation_check, to_pcnf, Compiled,
};
use fquot_core::fquot::{bounded_free_check, leq_by_factorization, quo_poset, verify_quo_con_iso};
use fquot_core::hom::{compose, enumerate_strong_homs, kernel, HomFilter};
use fquot_core::isothms::{check_ker_frac, sweep};
use fquot_core::limits::Limits;
use fquot_core::model::{ElementMap, FiniteStructure, Signature};
use fquot_core::quotient::{factor_hom, quotient_structure};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sorted_blocks(p: &Partition) -> Vec<Vec<usize>> {
    let mut b = p.blocks();
    b.sort();
    b
}

fn ac1_congruence_lattices() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let check = |m: &FiniteStructure, label: String, mismatches: &mut Vec<String>| {
        let mut got: Vec<_> = con_lattice(m).unwrap().elements().iter().map(sorted_blocks).collect();
        got.sort();
        if got != eq_filter(m) {
            mismatches.push(label);
        }
    };
    for (name, m) in fixtures() {
        check(&m, name.to_string(), &mut mismatches);
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..100 {
        let sig = random_signature(&mut rng);
        let n = rng.gen_range(1..=5);
        let m = random_structure(&mut rng, &sig, n);
        check(&m, format!("random #{i}"), &mut mismatches);
        checked += 1;
    }
    let pins = [
        (fixtures::z6(), 4),
        (fixtures::flag(), 1),
        (fixtures::graph4(), 4),
        (fixtures::p3(), 5),
    ];
    for (m, want) in &pins {
        let oracle = eq_filter(m).len();
        let got = con_lattice(m).unwrap().len();
        if oracle != *want || got != *want {
            mismatches.push(format!("{:?}: oracle {oracle}, lattice {got}, want {want}", m.name()));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{checked} structures agree with the Eq-filter oracle, pins Z6=4 FLAG=1 GRAPH4=4 P3=5; mismatches {mismatches:?}"
        ),
    )
}

fn ac2_quo_con() -> Outcome {
    let mut problems = Vec::new();
    let mut entries = 0;
    for (name, m) in fixtures() {
        let lat = con_lattice(&m).unwrap();
        let poset = quo_poset(&m).unwrap();
        let kernels: Vec<Partition> = (0..poset.len()).map(|i| kernel(poset.rep(i))).collect();
        let idx: Vec<Option<usize>> = kernels.iter().map(|k| lat.index_of(k)).collect();
        let distinct: BTreeSet<_> = idx.iter().flatten().collect();
        if idx.iter().any(Option::is_none) || distinct.len() != lat.len() || poset.len() != lat.len() {
            problems.push(format!("{name}: kernel is not a bijection"));
            continue;
        }
        for i in 0..poset.len() {
            for j in 0..poset.len() {
                entries += 1;
                let by_factor = leq_by_factorization(poset.rep(i), poset.rep(j)).unwrap().is_some();
                // f ≤ g by factorization exactly when ker f ⊆ ker g.
                if by_factor != lat.leq(idx[i].unwrap(), idx[j].unwrap()) {
                    problems.push(format!("{name}: order entry ({i}, {j}) disagrees"));
                }
            }
        }
        let report = verify_quo_con_iso(&m).unwrap();
        if !report.ok() {
            problems.push(format!("{name}: library report {report:?}"));
        }
    }
    outcome(
        problems.is_empty(),
        format!("{entries} order entries compared across all fixtures; mismatches {}", problems.len()),
    )
}

fn ac3_sweep() -> Outcome {
    let start = Instant::now();
    let mut rows: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut skipped = Vec::new();
    let mut errors = Vec::new();
    for (name, m) in fixtures() {
        match sweep(&m, &[], &Limits::default()) {
            Ok(r) => {
                for row in &r.rows {
                    let e = rows.entry(row.theorem).or_default();
                    e.0 += row.instances;
                    e.1 += row.defects.len();
                }
                skipped.extend(r.skipped_targets.iter().map(|s| format!("{name}: {s}")));
            }
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let defects: usize = rows.values().map(|r| r.1).sum();
    let mut names: Vec<_> = rows.iter().collect();
    names.sort();
    let summary: Vec<String> = names
        .iter()
        .map(|(k, (i, d))| format!("{k} {i}/{d}"))
        .collect();
    let required = [
        "first isomorphism",
        "second isomorphism",
        "third isomorphism",
        "correspondence",
        "categorical correspondence",
    ];
    let covered = required.iter().all(|t| rows.get(t).is_some_and(|r| r.0 > 0));
    let pass = defects == 0
        && errors.is_empty()
        && skipped.is_empty()
        && covered
        && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "instances/defects: {}; skipped {skipped:?}; errors {errors:?}",
            summary.join(", ")
        ),
    )
}

/// `ker(g/f)` on the target of `f`, from preimages.
fn factor_kernel_by_preimages(f: &[usize], g: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut pre = vec![usize::MAX; k];
    for (x, &y) in f.iter().enumerate() {
        if pre[y] == usize::MAX {
            pre[y] = x;
        }
    }
    let labels: Vec<usize> = (0..k).map(|a| g[pre[a]]).collect();
    blocks_of_labels(&labels)
}

fn ac4_kernel_identities() -> Outcome {
    let mut projections = 0;
    let mut fractions = 0;
    let mut problems = Vec::new();
    for (name, m) in fixtures() {
        let lat = con_lattice(&m).unwrap();
        let mut targets = vec![m.clone()];
        for theta in lat.elements() {
            let q = quotient_structure(&m, theta).unwrap();
            projections += 1;
            if &kernel(&q.proj) != theta {
                problems.push(format!("{name}: ker π ≠ {theta}"));
            }
            targets.push(q.structure);
        }
        let surj: Vec<_> = targets
            .iter()
            .flat_map(|t| enumerate_strong_homs(&m, t, HomFilter::Surjective).unwrap())
            .collect();
        for f in &surj {
            for g in &surj {
                if !kernel(f).refines(&kernel(g)) {
                    continue;
                }
                fractions += 1;
                let want = factor_kernel_by_preimages(f.images(), g.images(), f.target().size());
                match check_ker_frac(f, g) {
                    Ok(p) if sorted_blocks(&p) == want => {}
                    Ok(p) => problems.push(format!("{name}: got {p}, want {want:?}")),
                    Err(e) => problems.push(format!("{name}: {e}")),
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{projections} projections with θ = ker π, {fractions} factor kernels equal to the transported quotient; failures {problems:?}"
        ),
    )
}

fn ac5_factorization() -> Outcome {
    let mut pairs = 0;
    let mut problems = Vec::new();
    for (name, m) in fixtures() {
        let poset = quo_poset(&m).unwrap();
        for i in 0..poset.len() {
            for j in 0..poset.len() {
                pairs += 1;
                let (f, g) = (poset.rep(i), poset.rep(j));
                let included = kernel(f).refines(&kernel(g));
                let found = leq_by_factorization(f, g).unwrap();
                let factors = enumerate_strong_homs(f.target(), g.target(), HomFilter::All)
                    .unwrap()
                    .into_iter()
                    .filter(|h| compose(h, f).unwrap().same_as(g))
                    .count();
                if found.is_some() != included || factors != usize::from(included) {
                    problems.push(format!("{name}: ({i}, {j}) included={included} factors={factors}"));
                }
                if included && factor_hom(f, g).is_err() {
                    problems.push(format!("{name}: ({i}, {j}) factor_hom failed"));
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("{pairs} representative pairs; factorization iff kernel inclusion, unique factor; failures {problems:?}"),
    )
}

fn ac6_pcnf() -> Outcome {
    let start = Instant::now();
    let sig = formula_signature();
    let mut structures: Vec<FiniteStructure> = Vec::new();
    for n in 1..=2 {
        structures.extend(FiniteStructure::enumerate_all(&sig, n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        structures.push(random_structure(&mut rng, &sig, 3));
    }
    let mut not_pcnf = 0;
    let mut mismatches = Vec::new();
    let mut evaluations: u64 = 0;
    for k in 0..200 {
        let phi = random_formula(&mut rng, 4);
        let p = to_pcnf(&phi);
        if !is_pcnf(&p) {
            not_pcnf += 1;
        }
        let vars: Vec<String> = phi.free_vars().into_iter().collect();
        let (a, b) = (Compiled::new(&sig, &phi).unwrap(), Compiled::new(&sig, &p).unwrap());
        let pos: Vec<usize> = b.free_vars().iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        for m in &structures {
            for asg in all_assignments(&vars, m.size()) {
                let vals: Vec<usize> = vars.iter().map(|v| asg[v]).collect();
                let sub: Vec<usize> = pos.iter().map(|&i| vals[i]).collect();
                evaluations += 1;
                if a.eval_values(m, &vals) != b.eval_values(m, &sub) {
                    mismatches.push(format!("#{k}: {phi}"));
                    break;
                }
            }
        }
        // Independent evaluator for the input against the compiled normal form.
        for m in structures.iter().filter(|m| m.size() == 3) {
            for asg in all_assignments(&vars, m.size()) {
                let vals: Vec<usize> = vars.iter().map(|v| asg[v]).collect();
                let sub: Vec<usize> = pos.iter().map(|&i| vals[i]).collect();
                let mut env: HashMap<String, usize> = asg.clone().into_iter().collect();
                if naive_eval(m, &phi, &mut env) != b.eval_values(m, &sub) {
                    mismatches.push(format!("#{k} (naive): {phi}"));
                    break;
                }
            }
        }
    }
    mismatches.dedup();
    let elapsed = start.elapsed();
    outcome(
        not_pcnf == 0 && mismatches.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "200 formulas on {} structures ({evaluations} assignments); non-PCNF outputs {not_pcnf}; mismatches {mismatches:?}",
            structures.len()
        ),
    )
}

fn ac7_preservation() -> Outcome {
    let mut problems = Vec::new();
    let mut quotients = 0;
    let corpora = [
        (fixtures::z6(), abelian_group_theory()),
        (fixtures::z2(), abelian_group_theory()),
        (fixtures::z3(), abelian_group_theory()),
        (fixtures::mi2(), mi_monoid_theory()),
    ];
    for (m, t) in &corpora {
        for axiom in t.axioms() {
            match preservation_check(m, axiom) {
                Ok(r) => {
                    quotients += r.rows.len();
                    if !r.safe || !r.defects().is_empty() || r.rows.iter().any(|row| !row.holds) {
                        problems.push(format!("{:?}: {axiom}", m.name()));
                    }
                }
                Err(e) => problems.push(format!("{:?}: {axiom}: {e}", m.name())),
            }
        }
    }
    let z6 = Arc::new(fixtures::z6());
    let phi = parse_formula(z6.signature(), "exists x. ~(x = zero)").unwrap();
    let top = quotient_structure(&z6, &Partition::total(6)).unwrap();
    let control_truth = holds(&z6, &phi).unwrap() && !holds(&top.structure, &phi).unwrap();
    let r = preservation_check(&z6, &phi).unwrap();
    let flagged = !r.safe
        && r.defects().is_empty()
        && r.counterexamples().iter().any(|row| row.congruence.is_total());
    outcome(
        problems.is_empty() && control_truth && flagged,
        format!(
            "{quotients} quotient checks of safe axioms, defects {problems:?}; control true in Z6 and false in Z6/∇: {control_truth}; flagged as non-defect counterexample: {flagged}"
        ),
    )
}

fn ac8_lattice_closure() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    for (name, m) in fixtures() {
        let elems = con_lattice(&m).unwrap().elements().to_vec();
        let k = elems.len();
        let mut subsets: Vec<Vec<Partition>> = Vec::new();
        for i in 0..k {
            for j in i..k {
                subsets.push(vec![elems[i].clone(), elems[j].clone()]);
            }
            for j in i + 1..k {
                for l in j + 1..k {
                    subsets.push(vec![elems[i].clone(), elems[j].clone(), elems[l].clone()]);
                }
            }
        }
        for s in &subsets {
            for p in [eq_meet(s).unwrap(), eq_join(s).unwrap()] {
                checked += 1;
                if is_congruence(&m, &p).is_err() {
                    problems.push(format!("{name}: {p}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut join_mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let (a, b) = (random_labels(&mut rng, n), random_labels(&mut rng, n));
        let j = eq_join(&[Partition::from_labels(&a), Partition::from_labels(&b)]).unwrap();
        if sorted_blocks(&j) != composition_join(&a, &b) {
            join_mismatches += 1;
        }
    }
    outcome(
        problems.is_empty() && join_mismatches == 0,
        format!(
            "{checked} meets/joins of pairs and triples stay in Con; 200 random joins vs composition chain, mismatches {join_mismatches}; failures {problems:?}"
        ),
    )
}

fn ac9_free_check() -> Outcome {
    let sig = Signature::of(&[("c", 0)], &[]).unwrap();
    let targets: Vec<Arc<FiniteStructure>> = (1..=3)
        .flat_map(|n| FiniteStructure::enumerate_all(&sig, n))
        .map(Arc::new)
        .collect();
    let limits = Limits::default();
    let free = Arc::new(fixtures::p3());
    let gens = ElementMap::new(2, 3, vec![1, 2]).unwrap();
    let r = bounded_free_check(&free, &gens, &targets, &limits).unwrap();
    let padded = Arc::new(fixtures::pointed4());
    let gens = ElementMap::new(2, 4, vec![1, 2]).unwrap();
    let p = bounded_free_check(&padded, &gens, &targets, &limits).unwrap();
    let witness = p.witness.as_ref().map(|w| w.extensions);
    outcome(
        r.passed() && !p.passed() && witness.is_some_and(|e| e >= 2),
        format!(
            "P3 over {{1, 2}}: {} targets, {} assignments, {} failures; POINTED4: {} failures, witness extensions {witness:?}",
            r.targets, r.checked, r.failures, p.failures
        ),
    )
}

#[test]
fn acceptance() {
    let mut results: Vec<(&str, bool)> = Vec::new();
    let mut timed = |id, title, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let t = start.elapsed();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {title} ({:.2} s): {}", t.as_secs_f64(), o.detail);
        results.push((id, o.pass));
    };
    timed("AC1", "congruence lattices match the Eq-filter oracle", &ac1_congruence_lattices);
    timed("AC2", "quotient classes and congruences are isomorphic posets", &ac2_quo_con);
    timed("AC3", "isomorphism-theorem sweep has no defects", &ac3_sweep);
    timed("AC4", "kernel of projection and kernel of factor map", &ac4_kernel_identities);
    timed("AC5", "factorization iff kernel inclusion, unique factor", &ac5_factorization);
    timed("AC6", "prenex CNF is equivalent and well formed", &ac6_pcnf);
    timed("AC7", "safe sentences survive quotients", &ac7_preservation);
    timed("AC8", "meets and joins of congruences are congruences", &ac8_lattice_closure);
    timed("AC9", "bounded free-object check", &ac9_free_check);

    let failed: Vec<&str> = results.iter().filter(|(_, pass)| !pass).map(|(id, _)| *id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
