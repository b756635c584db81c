//! Bisimulation and p-morphism predicates.

use std::collections::BTreeSet;

use super::Valuation;
use crate::diagram::{Frame, Label};

fn all_labels<'a>(f1: &'a Frame, f2: &'a Frame) -> BTreeSet<&'a Label> {
    f1.labels().chain(f2.labels()).collect()
}

/// Checks that `z` relates `w1` to `w2` and satisfies zig and zag for every
/// label. With `vals`, related points must also agree on every variable.
pub fn is_bisimulation(
    f1: &Frame,
    w1: usize,
    f2: &Frame,
    w2: usize,
    z: &BTreeSet<(usize, usize)>,
    vals: Option<(&Valuation, &Valuation)>,
) -> bool {
    if !z.contains(&(w1, w2)) {
        return false;
    }
    if z.iter().any(|&(a, b)| a >= f1.size() || b >= f2.size()) {
        return false;
    }
    let labels = all_labels(f1, f2);
    z.iter().all(|&(a, b)| {
        let atoms = vals.is_none_or(|(v1, v2)| {
            let vars: BTreeSet<usize> = v1.support().chain(v2.support()).collect();
            vars.into_iter().all(|p| v1.holds(p, a) == v2.holds(p, b))
        });
        atoms
            && labels.iter().all(|l| {
                let zig = f1
                    .successors(a, l)
                    .iter()
                    .all(|&a2| f2.successors(b, l).iter().any(|&b2| z.contains(&(a2, b2))));
                let zag = f2
                    .successors(b, l)
                    .iter()
                    .all(|&b2| f1.successors(a, l).iter().any(|&a2| z.contains(&(a2, b2))));
                zig && zag
            })
    })
}

/// Forth: edges map to edges. Back: every edge out of an image point lifts
/// to an edge out of each of its preimages.
pub fn is_pmorphism(f1: &Frame, f2: &Frame, map: &[usize]) -> bool {
    if map.len() != f1.size() || map.iter().any(|&y| y >= f2.size()) {
        return false;
    }
    let forth = f1.edges().iter().all(|e| f2.has_edge(map[e.src], map[e.dst], &e.label));
    let back = f1.points().all(|x| {
        f2.labels().all(|l| {
            f2.successors(map[x], l)
                .iter()
                .all(|&z| f1.successors(x, l).iter().any(|&y| map[y] == z))
        })
    });
    forth && back
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;

    fn identity(f: &Frame) -> BTreeSet<(usize, usize)> {
        f.points().map(|x| (x, x)).collect()
    }

    #[test]
    fn identity_is_a_bisimulation() {
        let f = Frame::new(3, [edge(0, 1, "a"), edge(1, 2, "b"), edge(2, 0, "a")]).unwrap();
        assert!(is_bisimulation(&f, 0, &f, 0, &identity(&f), None));
        let v = Valuation::new().with(1, [1]);
        assert!(is_bisimulation(&f, 0, &f, 0, &identity(&f), Some((&v, &v))));
        assert!(!is_bisimulation(&f, 0, &f, 0, &BTreeSet::new(), None));
    }

    #[test]
    fn loop_is_bisimilar_to_a_cycle() {
        let lp = Frame::new(1, [edge(0, 0, "a")]).unwrap();
        let cyc = Frame::new(2, [edge(0, 1, "a"), edge(1, 0, "a")]).unwrap();
        let z = BTreeSet::from([(0, 0), (0, 1)]);
        assert!(is_bisimulation(&lp, 0, &cyc, 0, &z, None));
        let chain = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(!is_bisimulation(&lp, 0, &chain, 0, &z, None));
        let v1 = Valuation::new().with(1, [0]);
        let v2 = Valuation::new().with(1, [0]);
        assert!(!is_bisimulation(&lp, 0, &cyc, 0, &z, Some((&v1, &v2))));
    }

    #[test]
    fn pmorphisms() {
        let f = Frame::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(is_pmorphism(&f, &f, &[0, 1]));
        assert!(!is_pmorphism(&f, &f, &[0, 0]));
        let cyc = Frame::new(2, [edge(0, 1, "a"), edge(1, 0, "a")]).unwrap();
        let lp = Frame::new(1, [edge(0, 0, "a")]).unwrap();
        assert!(is_pmorphism(&cyc, &lp, &[0, 0]));
        assert!(!is_pmorphism(&lp, &cyc, &[0]));
    }
}
