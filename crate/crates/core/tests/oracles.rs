use std::collections::BTreeSet;

use mdl_core::catalog;
use mdl_core::diagram::paths::{has_inner_cycle, inner_cycle_edges};
use mdl_core::diagram::{Diagram, Edge, Label};
use mdl_core::formula::{gamma_m, AxiomSpec, DEFAULT_EXPANSION_CAP};
use mdl_core::minimizer::{classify, entails_globally, entails_locally, minimize, minimize_all_orders, Class};
use mdl_core::semantics::{eval, random_valuation, satisfies_e, satisfies_e_globally};
use mdl_core::verify::random_frame;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn label(s: &str) -> Label {
    Label::new(s).unwrap()
}

prop_compose! {
    fn rooted_diagram(max_points: usize, max_extra: usize)
        (n in 1..=max_points)
        (parents in proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>()), n - 1),
         extra in proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..=max_extra),
         n in Just(n)) -> Diagram {
        let l = |b: bool| label(if b { "a" } else { "b" });
        let mut edges: Vec<Edge> = parents.iter().enumerate()
            .map(|(i, (p, b))| Edge::new(p.index(i + 1), i + 1, l(*b)))
            .collect();
        edges.extend(extra.iter().map(|&(s, t, b)| Edge::new(s, t, l(b))));
        Diagram::new(n, edges).unwrap()
    }
}

/// Some nonempty set of non-root edges forms a connected 2-regular multigraph.
fn brute_force_cycle(d: &Diagram) -> bool {
    let inner: Vec<&Edge> = d.edges().iter().filter(|e| e.src != 0 && e.dst != 0).collect();
    assert!(inner.len() <= 16);
    (1u32..1 << inner.len()).any(|mask| {
        let chosen: Vec<&Edge> = (0..inner.len()).filter(|i| mask >> i & 1 == 1).map(|i| inner[i]).collect();
        let mut degree = vec![0; d.point_count()];
        for e in &chosen {
            degree[e.src] += 1;
            degree[e.dst] += 1;
        }
        if degree.iter().any(|&k| k != 0 && k != 2) {
            return false;
        }
        let mut seen = BTreeSet::from([chosen[0].src]);
        loop {
            let before = seen.len();
            for e in &chosen {
                if seen.contains(&e.src) || seen.contains(&e.dst) {
                    seen.insert(e.src);
                    seen.insert(e.dst);
                }
            }
            if seen.len() == before {
                break;
            }
        }
        seen.len() == degree.iter().filter(|&&k| k > 0).count()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inner_cycles_match_brute_force(d in rooted_diagram(5, 6)) {
        prop_assert_eq!(has_inner_cycle(&d), brute_force_cycle(&d));
        prop_assert_eq!(inner_cycle_edges(&d).is_empty(), !has_inner_cycle(&d));
    }

    #[test]
    fn local_entailment_is_pointwise_sound(d1 in rooted_diagram(4, 3), d2 in rooted_diagram(4, 3), seed in any::<u64>()) {
        let labels = [label("a"), label("b")];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let local = entails_locally(&d1, &d2);
        let global = entails_globally(&d1, &d2).unwrap();
        prop_assert!(!local || global);
        for _ in 0..20 {
            let f = random_frame(&mut rng, 4, &labels);
            for w in f.points() {
                if local && satisfies_e(&f, w, &d1).is_some() {
                    prop_assert!(satisfies_e(&f, w, &d2).is_some());
                }
            }
            if global && satisfies_e_globally(&f, &d1) {
                prop_assert!(satisfies_e_globally(&f, &d2));
            }
        }
    }

    #[test]
    fn minimize_is_idempotent_and_equivalent(d in rooted_diagram(4, 4)) {
        let m = minimize(&d).unwrap();
        let again = minimize(&m.diagram).unwrap();
        prop_assert!(again.log.is_empty());
        prop_assert_eq!(&again.diagram, &m.diagram);
        prop_assert!(entails_globally(&d, &m.diagram).unwrap());
        prop_assert!(entails_globally(&m.diagram, &d).unwrap());
    }

    #[test]
    fn every_deletion_order_gives_the_same_class(d in rooted_diagram(4, 3)) {
        let class = classify(&d).unwrap().class;
        for end in minimize_all_orders(&d, 8).unwrap() {
            prop_assert_eq!(class == Class::Negative, has_inner_cycle(&end));
        }
    }
}

#[test]
fn pruned_and_unpruned_axioms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, d) in catalog::all() {
        let labels: Vec<Label> = d.labels().cloned().collect();
        for m in 1..=2 {
            let pruned = AxiomSpec::new(d.clone()).unwrap();
            let full = AxiomSpec::new(d.clone()).unwrap().unpruned();
            let (Ok(p), Ok(u)) = (gamma_m(&pruned, m, DEFAULT_EXPANSION_CAP), gamma_m(&full, m, DEFAULT_EXPANSION_CAP)) else {
                continue;
            };
            for _ in 0..60 {
                let f = random_frame(&mut rng, 4, &labels);
                let v = random_valuation(&mut rng, f.size(), 1..=m);
                for w in f.points() {
                    assert_eq!(eval(&f, &v, w, &p).unwrap(), eval(&f, &v, w, &u).unwrap(), "{name}, m = {m}");
                }
            }
        }
    }
}

#[test]
fn catalog_verdicts_are_stable() {
    for (name, d) in catalog::all() {
        let m = minimize(&d).unwrap();
        assert!(entails_globally(&d, &m.diagram).unwrap(), "{name}");
        assert!(entails_globally(&m.diagram, &d).unwrap(), "{name}");
    }
}

#[test]
fn catalog_classes_do_not_depend_on_deletion_order() {
    for (name, d) in catalog::all() {
        if d.edges().len() > 8 {
            continue;
        }
        let ends = minimize_all_orders(&d, 8).unwrap();
        let negative = classify(&d).unwrap().class == Class::Negative;
        assert!(ends.iter().all(|e| has_inner_cycle(e) == negative), "{name}");
    }
}
