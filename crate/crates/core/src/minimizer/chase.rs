//! Iterated gluing of a diagram, read as a tuple-generating rule.
//!
//! Round 0 is a single point `c0`. Each round glues, at every active point
//! `a`, a fresh copy of the rule's non-root points, with the copy's root
//! identified with `a`. The fresh points form the next active set. Every
//! point remembers the sequence of rule points it was copied from, so the
//! point with provenance `[i]` is the first-round copy of `x_i`.

use std::collections::HashMap;

use serde::Serialize;

use crate::diagram::{Diagram, Edge, Frame};

#[derive(Clone, Debug, Serialize)]
pub struct ChaseState {
    #[serde(skip)]
    pub frame: Frame,
    pub origin: usize,
    pub active: Vec<usize>,
    pub round: usize,
    /// Round in which each point was created.
    pub created: Vec<usize>,
    pub provenance: Vec<Vec<usize>>,
    #[serde(skip)]
    edges: Vec<Edge>,
    #[serde(skip)]
    rule: Diagram,
}

impl ChaseState {
    pub fn start(rule: &Diagram) -> Self {
        ChaseState {
            frame: Frame::new(1, []).expect("one point"),
            origin: 0,
            active: vec![0],
            round: 0,
            created: vec![0],
            provenance: vec![vec![]],
            edges: vec![],
            rule: rule.clone(),
        }
    }

    /// One gluing round.
    pub fn step(&mut self) {
        let rule = &self.rule;
        let n = rule.point_count();
        let round = self.round + 1;
        let mut fresh = Vec::with_capacity(self.active.len() * (n - 1));
        for &a in &self.active {
            let base = self.provenance.len();
            // Rule point i > 0 becomes base + i - 1; the rule root becomes a.
            let image = |i: usize| if i == Diagram::ROOT { a } else { base + i - 1 };
            for i in 1..n {
                let mut prov = self.provenance[a].clone();
                prov.push(i);
                self.provenance.push(prov);
                self.created.push(round);
                fresh.push(base + i - 1);
            }
            for e in rule.edges() {
                self.edges.push(Edge::new(image(e.src), image(e.dst), e.label.clone()));
            }
        }
        self.active = fresh;
        self.round = round;
        self.frame = Frame::new(self.provenance.len(), self.edges.iter().cloned()).expect("chase indices are in range");
    }

    pub fn size(&self) -> usize {
        self.provenance.len()
    }

    /// The point copied along `path`, e.g. `[i]` for the first copy of `x_i`.
    pub fn point_with(&self, path: &[usize]) -> Option<usize> {
        self.provenance.iter().position(|p| p == path)
    }

    pub fn index(&self) -> HashMap<Vec<usize>, usize> {
        self.provenance.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()
    }
}

/// `rounds` gluing rounds from a single point.
pub fn chase(rule: &Diagram, rounds: usize) -> ChaseState {
    let mut s = ChaseState::start(rule);
    for _ in 0..rounds {
        s.step();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;
    use crate::diagram::paths::{distances_from, ranks};
    use proptest::prelude::*;

    #[test]
    fn zero_rounds_is_one_point() {
        let d = Diagram::new(2, [edge(0, 1, "a")]).unwrap();
        let s = chase(&d, 0);
        assert_eq!(s.size(), 1);
        assert_eq!(s.active, vec![0]);
        assert_eq!(s.frame.edge_count(), 0);
    }

    #[test]
    fn refsucc_one_round() {
        let d = Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap();
        let s = chase(&d, 1);
        assert_eq!(s.frame, Frame::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap());
        assert_eq!(s.active, vec![1]);
        assert_eq!(s.point_with(&[1]), Some(1));
    }

    #[test]
    fn successor_rule_builds_a_path() {
        let d = Diagram::new(2, [edge(0, 1, "a")]).unwrap();
        let s = chase(&d, 2);
        assert_eq!(s.frame, Frame::new(3, [edge(0, 1, "a"), edge(1, 2, "a")]).unwrap());
        assert_eq!(s.created, vec![0, 1, 2]);
        assert_eq!(s.provenance[2], vec![1, 1]);
    }

    #[test]
    fn sizes_grow_geometrically() {
        let d = Diagram::new(4, [edge(0, 1, "a"), edge(1, 2, "a"), edge(2, 3, "a"), edge(3, 2, "a")]).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|r| chase(&d, r).size()).collect();
        assert_eq!(sizes, vec![1, 4, 13, 40]);
    }

    fn rooted_diagram() -> impl Strategy<Value = Diagram> {
        (1usize..=4).prop_flat_map(|n| {
            (proptest::collection::vec(0..n.max(1), n - 1), proptest::collection::vec((0..n, 0..n), 0..4)).prop_map(
                move |(parents, extra)| {
                    let mut es: Vec<Edge> = (1..n).map(|i| edge(parents[i - 1] % i, i, "a")).collect();
                    es.extend(extra.into_iter().map(|(s, d)| edge(s, d, "a")));
                    Diagram::new(n, es).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn distance_is_sum_of_ranks(d in rooted_diagram(), rounds in 0usize..3) {
            let s = chase(&d, rounds);
            let rank = ranks(&d).unwrap();
            let dist = distances_from(&s.frame, 0);
            for (p, prov) in s.provenance.iter().enumerate() {
                let want: usize = prov.iter().map(|&i| rank[i]).sum();
                prop_assert_eq!(dist[p], Some(want));
                prop_assert_eq!(s.created[p], prov.len());
            }
        }
    }
}
