//! Root-anchored homomorphism search.
//!
//! Source points are visited by distance from the source root, then by
//! index; candidate targets are tried in index order, so the first
//! homomorphism found is the least one under that order.

use std::ops::ControlFlow;

use crate::diagram::paths::distances_from;
use crate::diagram::{Diagram, Frame, Label};

/// `h[x]` is the image of source point `x`.
pub type HomAssignment = Vec<usize>;

const UNSET: usize = usize::MAX;

enum Constraint {
    /// `other -l-> x`
    From(usize, Label),
    /// `x -l-> other`
    To(usize, Label),
    /// `x -l-> x`
    Loop(Label),
}

struct Plan<'a> {
    tgt: &'a Frame,
    order: Vec<usize>,
    constraints: Vec<Vec<Constraint>>,
    out_labels: Vec<Vec<Label>>,
}

impl<'a> Plan<'a> {
    fn new(src: &Frame, root: usize, tgt: &'a Frame) -> Self {
        let dist = distances_from(src, root);
        let mut order: Vec<usize> = src.points().collect();
        order.sort_by_key(|&x| (x != root, dist[x].unwrap_or(usize::MAX), x));
        let mut pos = vec![0; src.size()];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let mut constraints: Vec<Vec<Constraint>> = (0..src.size()).map(|_| Vec::new()).collect();
        let mut out_labels: Vec<Vec<Label>> = vec![Vec::new(); src.size()];
        for e in src.edges() {
            if !out_labels[e.src].contains(&e.label) {
                out_labels[e.src].push(e.label.clone());
            }
            if e.src == e.dst {
                constraints[e.src].push(Constraint::Loop(e.label.clone()));
            } else if pos[e.src] < pos[e.dst] {
                constraints[e.dst].push(Constraint::From(e.src, e.label.clone()));
            } else {
                constraints[e.src].push(Constraint::To(e.dst, e.label.clone()));
            }
        }
        Plan { tgt, order, constraints, out_labels }
    }

    fn candidates(&self, x: usize, h: &[usize]) -> Vec<usize> {
        let tgt = self.tgt;
        let seed: Vec<usize> = match self.constraints[x].iter().find(|c| !matches!(c, Constraint::Loop(_))) {
            Some(Constraint::From(y, l)) => tgt.successors(h[*y], l).to_vec(),
            Some(Constraint::To(y, l)) => tgt.predecessors(h[*y], l).to_vec(),
            _ => tgt.points().collect(),
        };
        seed.into_iter()
            .filter(|&t| {
                self.constraints[x].iter().all(|c| match c {
                    Constraint::From(y, l) => tgt.has_edge(h[*y], t, l),
                    Constraint::To(y, l) => tgt.has_edge(t, h[*y], l),
                    Constraint::Loop(l) => tgt.has_edge(t, t, l),
                }) && self.out_labels[x].iter().all(|l| !tgt.successors(t, l).is_empty())
            })
            .collect()
    }

    fn run(&self, i: usize, h: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        if i == self.order.len() {
            return visit(h);
        }
        let x = self.order[i];
        for t in self.candidates(x, h) {
            h[x] = t;
            self.run(i + 1, h, visit)?;
        }
        h[x] = UNSET;
        ControlFlow::Continue(())
    }
}

/// Calls `visit` on every homomorphism `src -> tgt` sending `root` to `w`,
/// in search order, until it breaks.
pub fn for_each_hom(
    src: &Frame,
    root: usize,
    tgt: &Frame,
    w: usize,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    if root >= src.size() || w >= tgt.size() {
        return;
    }
    let plan = Plan::new(src, root, tgt);
    let mut h = vec![UNSET; src.size()];
    // The root is first in the order; pin it.
    let ok = plan.constraints[root].iter().all(|c| match c {
        Constraint::Loop(l) => tgt.has_edge(w, w, l),
        _ => true,
    }) && plan.out_labels[root].iter().all(|l| !tgt.successors(w, l).is_empty());
    if !ok {
        return;
    }
    h[root] = w;
    let _ = plan.run(1, &mut h, &mut visit);
}

/// The least homomorphism `src -> tgt` with `root |-> w`, if any.
pub fn find_hom(src: &Frame, root: usize, tgt: &Frame, w: usize) -> Option<HomAssignment> {
    let mut found = None;
    for_each_hom(src, root, tgt, w, |h| {
        found = Some(h.to_vec());
        ControlFlow::Break(())
    });
    found
}

/// `F |= e^D(w)`: a homomorphism `D -> F` with `x0 |-> w`.
pub fn satisfies_e(f: &Frame, w: usize, d: &Diagram) -> Option<HomAssignment> {
    find_hom(d.frame(), Diagram::ROOT, f, w)
}

pub fn count_homs(f: &Frame, w: usize, d: &Diagram) -> u64 {
    let mut n = 0;
    for_each_hom(d.frame(), Diagram::ROOT, f, w, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

pub fn all_homs(f: &Frame, w: usize, d: &Diagram) -> Vec<HomAssignment> {
    let mut out = Vec::new();
    for_each_hom(d.frame(), Diagram::ROOT, f, w, |h| {
        out.push(h.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Points of `f` where `e^D` fails.
pub fn failing_points(f: &Frame, d: &Diagram) -> Vec<usize> {
    f.points().filter(|&w| satisfies_e(f, w, d).is_none()).collect()
}

/// `F |= forall x0 e^D(x0)`.
pub fn satisfies_e_globally(f: &Frame, d: &Diagram) -> bool {
    f.points().all(|w| satisfies_e(f, w, d).is_some())
}

/// True iff `h` maps every source edge onto a target edge with the same label.
pub fn is_homomorphism(src: &Frame, tgt: &Frame, h: &[usize]) -> bool {
    h.len() == src.size()
        && h.iter().all(|&t| t < tgt.size())
        && src.edges().iter().all(|e| tgt.has_edge(h[e.src], h[e.dst], &e.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;
    use proptest::prelude::*;

    fn d_tri() -> Diagram {
        Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap()
    }

    #[test]
    fn single_root_maps_anywhere() {
        let d = Diagram::new(1, []).unwrap();
        let f = Frame::new(3, [edge(0, 1, "a")]).unwrap();
        for w in f.points() {
            assert_eq!(satisfies_e(&f, w, &d), Some(vec![w]));
            assert_eq!(count_homs(&f, w, &d), 1);
        }
    }

    #[test]
    fn triangle_into_itself() {
        let d = d_tri();
        assert_eq!(satisfies_e(d.frame(), 0, &d), Some(vec![0, 1, 2]));
        assert_eq!(count_homs(d.frame(), 0, &d), 2);
        assert_eq!(all_homs(d.frame(), 0, &d), vec![vec![0, 1, 2], vec![0, 2, 1]]);
        assert_eq!(failing_points(d.frame(), &d), vec![1, 2]);
    }

    #[test]
    fn reflexive_point_satisfies_refsucc() {
        let d = Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap();
        let f = Frame::new(1, [edge(0, 0, "a")]).unwrap();
        assert!(satisfies_e_globally(&f, &d));
        let g = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(!satisfies_e_globally(&g, &d));
    }

    #[test]
    fn labels_must_match() {
        let d = Diagram::new(2, [edge(0, 1, "b")]).unwrap();
        let f = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert_eq!(satisfies_e(&f, 0, &d), None);
    }

    #[test]
    fn unreachable_source_points_range_over_everything() {
        let d = Diagram::new(2, [edge(1, 1, "a")]).unwrap();
        let f = Frame::new(3, [edge(2, 2, "a")]).unwrap();
        assert_eq!(satisfies_e(&f, 0, &d), Some(vec![0, 2]));
    }

    fn frame_strategy(max: usize) -> impl Strategy<Value = Frame> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 0..2usize), 0..10).prop_map(move |es| {
                Frame::new(n, es.into_iter().map(|(s, d, l)| edge(s, d, ["a", "b"][l]))).unwrap()
            })
        })
    }

    /// Counts homomorphisms by trying every total map.
    fn brute_count(src: &Frame, tgt: &Frame, w: usize) -> u64 {
        let n = src.size();
        let m = tgt.size() as u64;
        let mut count = 0;
        for code in 0..m.pow(n as u32 - 1) {
            let mut h = vec![w];
            let mut c = code;
            for _ in 1..n {
                h.push((c % m) as usize);
                c /= m;
            }
            if is_homomorphism(src, tgt, &h) {
                count += 1;
            }
        }
        count
    }

    proptest! {
        #[test]
        fn counts_match_brute_force(src in frame_strategy(4), tgt in frame_strategy(4)) {
            let d = Diagram::from_frame(src).unwrap();
            for w in tgt.points() {
                prop_assert_eq!(count_homs(&tgt, w, &d), brute_count(d.frame(), &tgt, w));
                if let Some(h) = satisfies_e(&tgt, w, &d) {
                    prop_assert!(is_homomorphism(d.frame(), &tgt, &h));
                    prop_assert_eq!(h[0], w);
                }
            }
        }

        #[test]
        fn adding_target_edges_keeps_witnesses(src in frame_strategy(3), tgt in frame_strategy(4), extra in (0usize..4, 0usize..4, 0usize..2)) {
            let d = Diagram::from_frame(src).unwrap();
            let (s, t, l) = extra;
            prop_assume!(s < tgt.size() && t < tgt.size());
            let bigger = tgt.with_edge(edge(s, t, ["a", "b"][l])).unwrap();
            for w in tgt.points() {
                if satisfies_e(&tgt, w, &d).is_some() {
                    prop_assert!(satisfies_e(&bigger, w, &d).is_some());
                }
            }
        }
    }
}
