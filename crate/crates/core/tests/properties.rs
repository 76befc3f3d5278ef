//! Property tests of the structural invariants: mutation, folding, theta
//! transport and the Garside normal form.

use std::sync::Arc;

use cluster_braid::braid::{alternating, presentation_from_wqp, theta_flat, theta_sharp, BraidWord};
use cluster_braid::coxeter::{CoxeterContext, CoxeterType};
use cluster_braid::folding::{fold_quiver, lookup, Folding};
use cluster_braid::garside::Garside;
use cluster_braid::quiver::Seed;
use cluster_braid::verify::twist_quiver;
use proptest::prelude::*;

const SELECTORS: [&str; 9] = ["A3", "B3", "B3:D4", "F4", "G2", "G2:A5", "H3", "H4", "I2:8:D5"];

fn folding(k: usize) -> Arc<Folding> {
    lookup(SELECTORS[k % SELECTORS.len()]).unwrap()
}

fn walk(f: &Arc<Folding>, seq: &[usize]) -> Seed {
    let n = f.target().rank();
    seq.iter().fold(Seed::initial(f.clone(), None).unwrap(), |s, &i| s.weighted_mutate(i % n).unwrap())
}

fn word(rank: usize) -> impl Strategy<Value = BraidWord> {
    prop::collection::vec((0..rank, prop::bool::ANY), 0..16)
        .prop_map(|v| BraidWord::new(v.into_iter().map(|(g, pos)| (g, if pos { 1 } else { -1 }))))
}

fn garside(label: &str) -> Garside {
    Garside::new(CoxeterContext::from_type(label.parse::<CoxeterType>().unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weighted_mutation_refolds_and_stays_sign_coherent(k in 0usize..9, seq in prop::collection::vec(0usize..4, 0..12)) {
        let f = folding(k);
        let s = walk(&f, &seq);
        s.check_sign_coherence().unwrap();
        for i in 0..f.target().rank() {
            s.fiber_sign(i).unwrap();
        }
        let q = fold_quiver(&f, s.b()).unwrap();
        prop_assert_eq!(q.num_vertices(), f.target().rank());
    }

    #[test]
    fn weighted_mutation_is_an_involution(k in 0usize..9, seq in prop::collection::vec(0usize..4, 0..10), i in 0usize..4) {
        let f = folding(k);
        let s = walk(&f, &seq);
        let i = i % f.target().rank();
        let back = s.weighted_mutate(i).unwrap().weighted_mutate(i).unwrap();
        prop_assert_eq!(back.b(), s.b());
        prop_assert_eq!(back.c(), s.c());
    }

    #[test]
    fn theta_maps_are_mutually_inverse(k in 0usize..9, seq in prop::collection::vec(0usize..4, 0..10), i in 0usize..4,
                                       words in prop::collection::vec(word(4), 4)) {
        let f = folding(k);
        let n = f.target().rank();
        let s = walk(&f, &seq);
        let i = i % n;
        let q = twist_quiver(&s.quiver().unwrap());
        let q2 = twist_quiver(&s.weighted_mutate(i).unwrap().quiver().unwrap());
        let expr: Vec<BraidWord> = words.into_iter().take(n)
            .map(|w| BraidWord::new(w.letters().iter().map(|&(g, e)| (g % n, e))))
            .collect();
        let there = theta_sharp(&expr, i, &q, &q2).unwrap();
        prop_assert_eq!(theta_flat(&there, i, &q, &q2).unwrap(), expr.clone());
        let back = theta_flat(&expr, i, &q, &q2).unwrap();
        prop_assert_eq!(theta_sharp(&back, i, &q, &q2).unwrap(), expr);
    }

    #[test]
    fn transported_generators_satisfy_the_endpoint_presentation(k in 0usize..9, seq in prop::collection::vec(0usize..4, 0..8)) {
        let f = folding(k);
        let n = f.target().rank();
        let g = Garside::new(CoxeterContext::from_type(f.target_type()).unwrap());
        let mut seed = Seed::initial(f.clone(), None).unwrap();
        let mut expr: Vec<BraidWord> = (0..n).map(BraidWord::gen).collect();
        for &i in &seq {
            let i = i % n;
            let next = seed.weighted_mutate(i).unwrap();
            let (q, q2) = (twist_quiver(&seed.quiver().unwrap()), twist_quiver(&next.quiver().unwrap()));
            expr = theta_sharp(&expr, i, &q, &q2).unwrap();
            seed = next;
        }
        let p = presentation_from_wqp(&twist_quiver(&seed.quiver().unwrap())).unwrap();
        for r in &p.relators {
            prop_assert!(g.is_trivial(&r.word.substitute(&expr).unwrap()).unwrap(), "{}", r.text);
        }
    }

    #[test]
    fn garside_relator_insertion_is_invisible(u in word(3), v in word(3), a in 0usize..3, b in 0usize..3) {
        let g = garside("H3");
        let m = g.context().graph().weight(a, b);
        let (x, y) = (BraidWord::gen(a), BraidWord::gen(b));
        let rel = if a == b { x.mul(&x.inverse()) } else { alternating(&x, &y, m).mul(&alternating(&y, &x, m).inverse()) };
        prop_assert!(g.equal(&u.mul(&v), &u.mul(&rel).mul(&v)).unwrap());
    }

    #[test]
    fn garside_inverse_and_delta_squared(u in word(4)) {
        for label in ["F4", "D4", "H4"] {
            let g = garside(label);
            prop_assert!(g.is_trivial(&u.mul(&u.inverse())).unwrap());
            let d2 = g.delta_word().pow(2);
            prop_assert!(g.equal(&d2.mul(&u), &u.mul(&d2)).unwrap());
            let nf = g.normal_form(&u).unwrap();
            prop_assert_eq!(g.normal_form(&g.to_word(&nf)).unwrap(), nf);
        }
    }

    #[test]
    fn garside_separates_one_generator(u in word(4), s in 0usize..4, pos in prop::bool::ANY) {
        let g = garside("B4");
        let us = u.mul(&BraidWord::new([(s, if pos { 1 } else { -1 })]));
        prop_assert!(!g.equal(&u, &us).unwrap());
    }
}
