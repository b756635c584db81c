//! Pseudoproducts `F± x G`.
//!
//! The carrier is `w0` followed by `(y, v)` for every non-root `y` of `W±` and
//! every vertex `v`, numbered `1 + (y - 1) * |V| + v`. Inside a layer the
//! edges of `F-` are copied; the removed edge is reinstated only between
//! layers joined by an edge of `G`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{ConstructionBundle, ConstructionError, Graph};
use crate::diagram::{Edge, Frame, Label};
use crate::semantics::Valuation;

#[derive(Clone, Debug, Serialize)]
pub struct Pseudoproduct {
    pub frame: Frame,
    /// Projection onto `W±`.
    pub pr: Vec<usize>,
    /// Projection onto `V`, with `None` for `w0`.
    pub h: Vec<Option<usize>>,
    pub vertices: usize,
}

impl Pseudoproduct {
    pub fn size(&self) -> usize {
        self.frame.size()
    }

    /// Index of `(y, v)`; `y` must not be the root.
    pub fn point(&self, y: usize, v: usize) -> usize {
        1 + (y - 1) * self.vertices + v
    }
}

fn labels_of(b: &ConstructionBundle) -> Vec<Label> {
    b.f_plus.labels().cloned().collect()
}

fn five_clauses(b: &ConstructionBundle, g: &Graph, removed: &Edge) -> BTreeSet<Edge> {
    let nv = g.vertex_count();
    let at = |y: usize, v: usize| 1 + (y - 1) * nv + v;
    let w0 = b.root;
    let mut out = BTreeSet::new();
    for e in b.f_minus.edges() {
        match (e.src == w0, e.dst == w0) {
            (true, true) => {
                out.insert(Edge::new(0, 0, e.label.clone()));
            }
            (true, false) => out.extend((0..nv).map(|v| Edge::new(0, at(e.dst, v), e.label.clone()))),
            (false, true) => out.extend((0..nv).map(|v| Edge::new(at(e.src, v), 0, e.label.clone()))),
            (false, false) => out.extend((0..nv).map(|v| Edge::new(at(e.src, v), at(e.dst, v), e.label.clone()))),
        }
    }
    for (v1, v2) in g.edges() {
        for (a, c) in [(v1, v2), (v2, v1)] {
            out.insert(Edge::new(at(removed.src, a), at(removed.dst, c), removed.label.clone()));
        }
    }
    out
}

fn by_projection(
    b: &ConstructionBundle,
    g: &Graph,
    pr: &[usize],
    h: &[Option<usize>],
    labels: &[Label],
) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for eta in 0..pr.len() {
        for chi in 0..pr.len() {
            for l in labels {
                let minus = b.f_minus.has_edge(pr[eta], pr[chi], l);
                let holds = if minus {
                    h[eta] == h[chi] || h[eta].is_none() || h[chi].is_none()
                } else {
                    b.f_plus.has_edge(pr[eta], pr[chi], l)
                        && matches!((h[eta], h[chi]), (Some(x), Some(y)) if g.adjacent(x, y))
                };
                if holds {
                    out.insert(Edge::new(eta, chi, l.clone()));
                }
            }
        }
    }
    out
}

/// Builds `F± x G` from the five clauses and checks it against the
/// projection description pair by pair.
pub fn pseudoproduct(b: &ConstructionBundle, g: &Graph) -> Result<Pseudoproduct, ConstructionError> {
    let removed = b.removed_edge().ok_or(ConstructionError::NoSelectedEdge)?;
    let nv = g.vertex_count();
    let size = 1 + (b.b() - 1) * nv;
    let mut pr = vec![b.root];
    let mut h = vec![None];
    for y in 1..b.b() {
        for v in 0..nv {
            pr.push(y);
            h.push(Some(v));
        }
    }
    let clauses = five_clauses(b, g, &removed);
    let projected = by_projection(b, g, &pr, &h, &labels_of(b));
    if let Some(e) = clauses.symmetric_difference(&projected).next() {
        return Err(ConstructionError::Disagreement {
            edge: e.clone(),
            in_clauses: clauses.contains(e),
        });
    }
    let frame = Frame::new(size, clauses)?;
    Ok(Pseudoproduct { frame, pr, h, vertices: nv })
}

/// `map` is a bijection carrying the edges of `f1` exactly onto those of `f2`.
pub fn is_isomorphism(f1: &Frame, f2: &Frame, map: &[usize]) -> bool {
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    if f1.size() != f2.size() || map.len() != f1.size() || distinct.len() != map.len() || map.iter().any(|&y| y >= f2.size()) {
        return false;
    }
    let image: BTreeSet<Edge> = f1.edges().iter().map(|e| Edge::new(map[e.src], map[e.dst], e.label.clone())).collect();
    &image == f2.edges()
}

/// For `G = K_1`, the map `w0 |-> w0, (y, 0) |-> y` when it is an isomorphism
/// onto `F-`.
pub fn isomorphism_to_f_minus(b: &ConstructionBundle, pp: &Pseudoproduct) -> Option<Vec<usize>> {
    if pp.vertices != 1 {
        return None;
    }
    let map = pp.pr.clone();
    is_isomorphism(&pp.frame, &b.f_minus, &map).then_some(map)
}

/// The map `w0 |-> w0, (y, v) |-> (y, rho(v))` between products over `hi`
/// and `lo`.
pub fn lift_vertex_map(hi: &Pseudoproduct, lo: &Pseudoproduct, rho: &[usize]) -> Vec<usize> {
    (0..hi.size())
        .map(|p| match hi.h[p] {
            None => 0,
            Some(v) => lo.point(hi.pr[p], rho[v]),
        })
        .collect()
}

/// The product with a fresh copy of `W± \ {w0}` glued on at `w0` and wired
/// by `F+`; copy `y` is numbered `|product| + y - 1`.
pub fn dagger(b: &ConstructionBundle, pp: &Pseudoproduct) -> Frame {
    let base = pp.size();
    let copy = |y: usize| if y == b.root { 0 } else { base + y - 1 };
    let edges = pp
        .frame
        .edges()
        .iter()
        .cloned()
        .chain(b.f_plus.edges().iter().map(|e| Edge::new(copy(e.src), copy(e.dst), e.label.clone())));
    Frame::new(base + b.b() - 1, edges).expect("copies are in range")
}

/// Identity on the product, plus each copied `y` related to `(y, v1)` and `(y, v2)`.
pub fn dagger_relation(b: &ConstructionBundle, pp: &Pseudoproduct, v1: usize, v2: usize) -> BTreeSet<(usize, usize)> {
    let base = pp.size();
    let mut z: BTreeSet<(usize, usize)> = (0..base).map(|p| (p, p)).collect();
    for y in 1..b.b() {
        z.insert((base + y - 1, pp.point(y, v1)));
        z.insert((base + y - 1, pp.point(y, v2)));
    }
    z
}

/// `theta` extended to the copies: copy `y` gets the variables of `(y, v1)`.
pub fn dagger_valuation(b: &ConstructionBundle, pp: &Pseudoproduct, theta: &Valuation, v1: usize) -> Valuation {
    let base = pp.size();
    let mut out = theta.clone();
    let vars: Vec<usize> = theta.support().collect();
    for var in vars {
        for y in 1..b.b() {
            if theta.holds(var, pp.point(y, v1)) {
                out.insert(var, base + y - 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_bundle;
    use crate::diagram::{edge, Diagram};
    use crate::semantics::{is_bisimulation, is_pmorphism};

    fn tri_bundle() -> ConstructionBundle {
        let d = Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap();
        build_bundle(&d).unwrap()
    }

    #[test]
    fn k1_is_f_minus() {
        let b = tri_bundle();
        let pp = pseudoproduct(&b, &Graph::complete(1)).unwrap();
        assert_eq!(isomorphism_to_f_minus(&b, &pp), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn k2_has_seven_points() {
        let b = tri_bundle();
        let pp = pseudoproduct(&b, &Graph::complete(2)).unwrap();
        assert_eq!(pp.size(), 7);
        // Layers: w1 = {1, 2}, w2 = {3, 4}, closing point {5, 6}.
        assert!(pp.frame.has_edge(3, 2, &Label::new("a").unwrap()));
        assert!(pp.frame.has_edge(4, 1, &Label::new("a").unwrap()));
        assert!(!pp.frame.has_edge(3, 1, &Label::new("a").unwrap()));
        assert!(pp.frame.has_edge(1, 3, &Label::new("a").unwrap()));
        assert_eq!(pp.frame.edge_count(), 4 + 8 + 2);
    }

    #[test]
    fn sizes() {
        let b = tri_bundle();
        for n in 1..=5 {
            assert_eq!(pseudoproduct(&b, &Graph::complete(n)).unwrap().size(), 1 + (b.b() - 1) * n);
        }
        assert!(pseudoproduct(&b, &Graph::cycle(5)).is_ok());
    }

    #[test]
    fn isomorphism_rejects_wrong_maps() {
        let f = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(is_isomorphism(&f, &f, &[0, 1]));
        assert!(!is_isomorphism(&f, &f, &[1, 0]));
        assert!(!is_isomorphism(&f, &f, &[0, 0]));
    }

    #[test]
    fn dagger_bisimulation_over_an_edge() {
        let b = tri_bundle();
        let pp = pseudoproduct(&b, &Graph::complete(2)).unwrap();
        let theta = Valuation::new().with(1, [0, 1, 2, 5, 6]).with(2, [3, 4]);
        let f = dagger(&b, &pp);
        let z = dagger_relation(&b, &pp, 0, 1);
        let th = dagger_valuation(&b, &pp, &theta, 0);
        assert!(is_bisimulation(&f, 0, &pp.frame, 0, &z, Some((&th, &theta))));
        // Layers that disagree on the valuation break it.
        let uneven = Valuation::new().with(1, [1]);
        let th = dagger_valuation(&b, &pp, &uneven, 0);
        assert!(!is_bisimulation(&f, 0, &pp.frame, 0, &z, Some((&th, &uneven))));
    }

    #[test]
    fn edge_lifting_gives_pmorphisms() {
        let b = tri_bundle();
        let c6 = Graph::cycle(6);
        let c3 = Graph::cycle(3);
        let rho = [0, 1, 2, 0, 1, 2];
        let hi = pseudoproduct(&b, &c6).unwrap();
        let lo = pseudoproduct(&b, &c3).unwrap();
        assert!(is_pmorphism(&hi.frame, &lo.frame, &lift_vertex_map(&hi, &lo, &rho)));
        let stub = Graph::new(3, [(0, 1)]).unwrap();
        let k2 = Graph::complete(2);
        let hi = pseudoproduct(&b, &stub).unwrap();
        let lo = pseudoproduct(&b, &k2).unwrap();
        assert!(!is_pmorphism(&hi.frame, &lo.frame, &lift_vertex_map(&hi, &lo, &[0, 1, 0])));
    }

    #[test]
    fn dagger_relation_fails_when_v1_has_other_neighbours() {
        let b = tri_bundle();
        let pp = pseudoproduct(&b, &Graph::complete(3)).unwrap();
        let z = dagger_relation(&b, &pp, 0, 1);
        assert!(!is_bisimulation(&dagger(&b, &pp), 0, &pp.frame, 0, &z, None));
    }
}
