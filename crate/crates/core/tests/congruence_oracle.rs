mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fquot_core::congruence::{
    con_lattice, eq_join, eq_meet, is_congruence, principal_congruence, quotient_of_congruence,
    Partition, Principal,
};
use fquot_core::model::{FiniteStructure, ModelError};
use fquot_core::quotient::quotient_structure;

fn sorted_blocks(p: &Partition) -> Vec<Vec<usize>> {
    let mut b = p.blocks();
    b.sort();
    b
}

fn lattice_blocks(m: &FiniteStructure) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<_> = con_lattice(m).unwrap().elements().iter().map(sorted_blocks).collect();
    out.sort();
    out
}

#[test]
fn con_lattice_matches_eq_filter_on_fixtures() {
    for (name, m) in fixtures() {
        assert_eq!(lattice_blocks(&m), eq_filter(&m), "{name}");
    }
    let count = |m: FiniteStructure| eq_filter(&m).len();
    assert_eq!(count(fquot_core::fixtures::z6()), 4);
    assert_eq!(count(fquot_core::fixtures::flag()), 1);
    assert_eq!(count(fquot_core::fixtures::graph4()), 4);
    assert_eq!(count(fquot_core::fixtures::p3()), 5);
}

#[test]
fn con_lattice_matches_eq_filter_on_random_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edc0);
    for i in 0..100 {
        let sig = random_signature(&mut rng);
        let n = rng.gen_range(1..=5);
        let m = random_structure(&mut rng, &sig, n);
        assert_eq!(lattice_blocks(&m), eq_filter(&m), "structure {i}: {m:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_position_check_matches_whole_tuple_check(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = random_signature(&mut rng);
        let m = random_structure(&mut rng, &sig, n);
        for labels in all_partitions(n) {
            let p = Partition::from_labels(&labels);
            prop_assert_eq!(is_congruence(&m, &p).is_ok(), naive_is_congruence(&m, &labels));
        }
    }

    #[test]
    fn principal_congruence_is_least(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = random_signature(&mut rng);
        let m = random_structure(&mut rng, &sig, n);
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(1..=2))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let containing: Vec<Vec<Vec<usize>>> = all_partitions(n)
            .into_iter()
            .filter(|l| naive_is_congruence(&m, l) && pairs.iter().all(|&(a, b)| l[a] == l[b]))
            .map(|l| blocks_of_labels(&l))
            .collect();
        match principal_congruence(&m, &pairs).unwrap() {
            Principal::Congruence(p) => {
                prop_assert!(is_congruence(&m, &p).is_ok());
                // The least one is contained in every other: it has the most blocks
                // and refines them all.
                let mine = sorted_blocks(&p);
                prop_assert!(containing.contains(&mine));
                for other in &containing {
                    let q = Partition::from_blocks(n, other).unwrap();
                    prop_assert!(p.refines(&q));
                }
            }
            Principal::NoCongruence(_) => prop_assert!(containing.is_empty()),
        }
    }

    #[test]
    fn meet_and_join_match_relation_oracles(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_labels(&mut rng, n);
        let b = random_labels(&mut rng, n);
        let (p, q) = (Partition::from_labels(&a), Partition::from_labels(&b));
        let join = eq_join(&[p.clone(), q.clone()]).unwrap();
        let meet = eq_meet(&[p, q]).unwrap();
        prop_assert_eq!(sorted_blocks(&join), composition_join(&a, &b));
        prop_assert_eq!(sorted_blocks(&meet), intersection_blocks(&a, &b));
    }
}

#[test]
fn meet_and_join_stay_in_con() {
    for (name, m) in fixtures() {
        let elems = con_lattice(&m).unwrap().elements().to_vec();
        let k = elems.len();
        let check = |parts: &[Partition]| {
            for p in [eq_meet(parts).unwrap(), eq_join(parts).unwrap()] {
                assert!(is_congruence(&m, &p).is_ok(), "{name}: {p}");
            }
        };
        for i in 0..k {
            for j in 0..k {
                check(&[elems[i].clone(), elems[j].clone()]);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    check(&[elems[i].clone(), elems[j].clone(), elems[l].clone()]);
                }
            }
        }
    }
}

#[test]
fn quotient_of_congruence_is_a_congruence_of_the_quotient() {
    for (name, m) in fixtures() {
        let lat = con_lattice(&m).unwrap();
        for (i, theta) in lat.elements().iter().enumerate() {
            let q = quotient_structure(&m, theta).unwrap();
            for (j, psi) in lat.elements().iter().enumerate() {
                if lat.leq(i, j) {
                    let r = quotient_of_congruence(psi, theta).unwrap();
                    assert!(is_congruence(&q.structure, &r).is_ok(), "{name}: {psi} / {theta}");
                }
            }
        }
    }
}

fn closed_by_brute_force(m: &FiniteStructure, set: &[bool]) -> bool {
    m.signature().functions().iter().enumerate().all(|(fi, f)| {
        tuples(m.size(), f.arity)
            .iter()
            .filter(|t| t.iter().all(|&x| set[x]))
            .all(|t| set[m.apply(fi, t)])
    })
}

#[test]
fn closure_is_the_least_closed_superset() {
    for (name, m) in fixtures() {
        let n = m.size();
        let closed: Vec<u32> = (0u32..1 << n)
            .filter(|&mask| {
                let set: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                closed_by_brute_force(&m, &set)
            })
            .collect();
        for seed_mask in 0u32..1 << n {
            let seed: Vec<usize> = (0..n).filter(|&i| seed_mask >> i & 1 == 1).collect();
            let least = closed
                .iter()
                .filter(|&&c| c & seed_mask == seed_mask && c != 0)
                .min_by_key(|c| c.count_ones())
                .copied();
            match m.substructure_closure(&seed) {
                Ok(got) => {
                    let mask: u32 = got.iter().map(|&i| 1 << i).sum();
                    assert_eq!(Some(mask), least, "{name} seed {seed:?}");
                    // The least superset is unique: every closed superset contains it.
                    for &c in closed.iter().filter(|&&c| c & seed_mask == seed_mask && c != 0) {
                        assert_eq!(c & mask, mask);
                    }
                    assert!(m.check_closed(&got).is_ok());
                    assert_eq!(m.substructure_closure(&got).unwrap(), got);
                }
                Err(ModelError::EmptyUnsupported) => {
                    assert!(seed.is_empty() && m.constants().is_empty(), "{name}");
                }
                Err(e) => panic!("{name}: {e}"),
            }
        }
    }
}

proptest! {
    #[test]
    fn closure_is_monotone(seed in any::<u64>(), a in 1u32..64, b in 1u32..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = random_signature(&mut rng);
        let m = random_structure(&mut rng, &sig, 6);
        let small: Vec<usize> = (0..6).filter(|i| a >> i & 1 == 1).collect();
        let big: Vec<usize> = (0..6).filter(|i| (a | b) >> i & 1 == 1).collect();
        let cs = m.substructure_closure(&small).unwrap();
        let cb = m.substructure_closure(&big).unwrap();
        prop_assert!(cs.iter().all(|x| cb.contains(x)));
    }
}
