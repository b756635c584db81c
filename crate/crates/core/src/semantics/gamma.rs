//! `gamma^D_m` evaluated without expanding the `m^(n+1)` disjuncts.
//!
//! The guard fails when some point reachable from `w` in at most
//! `guard_depth` diagram-labelled steps carries none of `p1..pm`. Otherwise
//! the consequent holds iff the reduced tree of `eta^D` maps into the frame
//! from `w` while every node labelled `{x_i}` lands on a point of colour
//! `kappa(i)`, for one colour map `kappa`.

use std::collections::VecDeque;

use super::Valuation;
use crate::diagram::{Frame, Label};
use crate::formula::{build_eta, reduced_tree, AxiomSpec};

/// Reusable evaluator for one `(spec, m)` pair.
pub struct GammaChecker {
    m: usize,
    guard_depth: usize,
    guard_labels: Vec<Label>,
    parent: Vec<Option<(usize, Label)>>,
    labels: Vec<Vec<usize>>,
    points: usize,
}

struct Search<'a> {
    checker: &'a GammaChecker,
    f: &'a Frame,
    colours: Vec<Vec<usize>>,
    image: Vec<usize>,
    kappa: Vec<Option<usize>>,
}

impl GammaChecker {
    pub fn new(spec: &AxiomSpec, m: usize) -> Self {
        let tree = reduced_tree(&build_eta(spec)).expect("eta lies in the tree fragment");
        GammaChecker {
            m,
            guard_depth: spec.guard_depth,
            guard_labels: spec.diagram().labels().cloned().collect(),
            parent: (0..tree.len()).map(|t| tree.parent(t).cloned()).collect(),
            labels: (0..tree.len()).map(|t| tree.label(t).iter().copied().collect()).collect(),
            points: spec.diagram().point_count(),
        }
    }

    fn colours_of(&self, v: &Valuation, y: usize) -> Vec<usize> {
        (1..=self.m).filter(|&c| v.holds(c, y)).collect()
    }

    /// True iff every point within guard distance of `w` has a colour.
    pub fn guard_holds(&self, f: &Frame, w: usize, v: &Valuation) -> bool {
        let mut dist = vec![usize::MAX; f.size()];
        dist[w] = 0;
        let mut queue = VecDeque::from([w]);
        while let Some(x) = queue.pop_front() {
            if self.colours_of(v, x).is_empty() {
                return false;
            }
            if dist[x] == self.guard_depth {
                continue;
            }
            for l in &self.guard_labels {
                for &y in f.successors(x, l) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        true
    }

    /// Some colour map and coloured tree homomorphism exist at `w`.
    pub fn consequent_holds(&self, f: &Frame, w: usize, v: &Valuation) -> bool {
        let mut s = Search {
            checker: self,
            f,
            colours: f.points().map(|y| self.colours_of(v, y)).collect(),
            image: vec![usize::MAX; self.parent.len()],
            kappa: vec![None; self.points],
        };
        s.place(0, w)
    }

    pub fn holds(&self, f: &Frame, w: usize, v: &Valuation) -> bool {
        !self.guard_holds(f, w, v) || self.consequent_holds(f, w, v)
    }
}

impl Search<'_> {
    fn place(&mut self, t: usize, w: usize) -> bool {
        if t == self.checker.parent.len() {
            return true;
        }
        let cands: Vec<usize> = match &self.checker.parent[t] {
            None => vec![w],
            Some((p, l)) => self.f.successors(self.image[*p], l).to_vec(),
        };
        for y in cands {
            self.image[t] = y;
            if self.bind(t, 0, y, w) {
                return true;
            }
        }
        false
    }

    fn bind(&mut self, t: usize, j: usize, y: usize, w: usize) -> bool {
        let Some(&i) = self.checker.labels[t].get(j) else {
            return self.place(t + 1, w);
        };
        match self.kappa[i] {
            Some(c) => self.colours[y].contains(&c) && self.bind(t, j + 1, y, w),
            None => {
                for c in self.colours[y].clone() {
                    self.kappa[i] = Some(c);
                    if self.bind(t, j + 1, y, w) {
                        return true;
                    }
                }
                self.kappa[i] = None;
                false
            }
        }
    }
}

/// `F, v, w |= gamma^D_m`, decided semantically.
pub fn gamma_semantic(f: &Frame, w: usize, spec: &AxiomSpec, m: usize, v: &Valuation) -> bool {
    GammaChecker::new(spec, m).holds(f, w, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{edge, Diagram};
    use crate::formula::{gamma_m, DEFAULT_EXPANSION_CAP};
    use crate::semantics::{eval, random_valuation};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog() -> Vec<Diagram> {
        vec![
            Diagram::new(2, [edge(0, 1, "a"), edge(1, 0, "a")]).unwrap(),
            Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap(),
            Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap(),
            Diagram::new(3, [edge(0, 1, "a"), edge(1, 2, "a")]).unwrap(),
        ]
    }

    #[test]
    fn empty_valuation_fails_the_guard() {
        let spec = AxiomSpec::new(catalog()[2].clone()).unwrap();
        let f = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(gamma_semantic(&f, 0, &spec, 2, &Valuation::new()));
    }

    #[test]
    fn own_frame_satisfies_the_consequent() {
        let d = catalog()[2].clone();
        let spec = AxiomSpec::new(d.clone()).unwrap();
        let v = Valuation::new().with(1, [0, 1]).with(2, [2]);
        assert!(gamma_semantic(d.frame(), 0, &spec, 2, &v));
    }

    fn frame_strategy() -> impl Strategy<Value = Frame> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..9)
                .prop_map(move |es| Frame::new(n, es.into_iter().map(|(s, d)| edge(s, d, "a"))).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_expanded_formula(f in frame_strategy(), which in 0usize..4, m in 1usize..=2, seed in 0u64..10_000) {
            let spec = AxiomSpec::new(catalog()[which].clone()).unwrap();
            let phi = gamma_m(&spec, m, DEFAULT_EXPANSION_CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_valuation(&mut rng, f.size(), 1..=m);
            for w in f.points() {
                prop_assert_eq!(gamma_semantic(&f, w, &spec, m, &v), eval(&f, &v, w, &phi).unwrap());
            }
        }
    }
}
