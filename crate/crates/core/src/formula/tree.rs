//! Reduced syntactical trees of formulas in the `&`, `<l>`, nominal fragment.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{render, Format, Formula};
use crate::diagram::{Diagram, Edge, Frame, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("`{0}` is outside the conjunction/diamond/nominal fragment")]
    Unsupported(String),
}

/// A finite tree with labelled edges and a set of diagram points on every
/// node. Node 0 is the root; nodes are numbered in pre-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledTree {
    parent: Vec<Option<(usize, Label)>>,
    labels: Vec<BTreeSet<usize>>,
}

struct Node {
    labels: BTreeSet<usize>,
    children: Vec<(Label, Node)>,
}

fn build(phi: &Formula) -> Result<Node, TreeError> {
    match phi {
        Formula::Nominal(k) => Ok(Node { labels: BTreeSet::from([*k]), children: vec![] }),
        Formula::And(xs) => {
            let mut merged = Node { labels: BTreeSet::new(), children: vec![] };
            for x in xs {
                let n = build(x)?;
                merged.labels.extend(n.labels);
                merged.children.extend(n.children);
            }
            Ok(merged)
        }
        Formula::Diamond(l, a) => {
            Ok(Node { labels: BTreeSet::new(), children: vec![(l.clone(), build(a)?)] })
        }
        other => Err(TreeError::Unsupported(render(other, Format::Text))),
    }
}

/// Cases 1-3: a nominal is a point labelled `{x_k}`, a conjunction merges the
/// roots of its conjuncts, and a diamond puts a fresh root labelled `{}` on top.
pub fn reduced_tree(phi: &Formula) -> Result<LabelledTree, TreeError> {
    fn flatten(node: Node, parent: Option<(usize, Label)>, out: &mut LabelledTree) {
        let me = out.parent.len();
        out.parent.push(parent);
        out.labels.push(node.labels);
        for (l, child) in node.children {
            flatten(child, Some((me, l)), out);
        }
    }
    let root = build(phi)?;
    let mut out = LabelledTree { parent: vec![], labels: vec![] };
    flatten(root, None, &mut out);
    Ok(out)
}

impl LabelledTree {
    pub const ROOT: usize = 0;

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, t: usize) -> Option<&(usize, Label)> {
        self.parent[t].as_ref()
    }

    pub fn label(&self, t: usize) -> &BTreeSet<usize> {
        &self.labels[t]
    }

    /// Edges `(parent, child, label)` in pre-order of the child.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.as_ref().map(|(p, l)| Edge::new(*p, c, l.clone())))
    }

    pub fn children(&self, t: usize) -> Vec<(Label, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| match p {
                Some((q, l)) if *q == t => Some((l.clone(), c)),
                _ => None,
            })
            .collect()
    }

    pub fn depth_of(&self, mut t: usize) -> usize {
        let mut d = 0;
        while let Some((p, _)) = &self.parent[t] {
            t = *p;
            d += 1;
        }
        d
    }

    /// Only the root lacks a parent and every parent precedes its child.
    pub fn is_tree(&self) -> bool {
        !self.is_empty()
            && self.parent[0].is_none()
            && self.parent.iter().enumerate().skip(1).all(|(c, p)| matches!(p, Some((q, _)) if *q < c))
    }

    /// The tree as a frame rooted at node 0.
    pub fn to_frame(&self) -> Frame {
        Frame::new(self.len(), self.edges()).expect("tree edges are in range")
    }

    /// The induced point map when every label is a singleton.
    pub fn point_map(&self) -> Option<Vec<usize>> {
        self.labels
            .iter()
            .map(|s| if s.len() == 1 { s.iter().next().copied() } else { None })
            .collect()
    }

    /// Singleton labels whose point map sends the root to `x_0` and every
    /// tree edge onto a diagram edge with the same label.
    pub fn is_monotone_into(&self, d: &Diagram) -> bool {
        let Some(map) = self.point_map() else { return false };
        map[Self::ROOT] == Diagram::ROOT
            && map.iter().all(|&x| x < d.point_count())
            && self.edges().all(|e| d.has_edge(map[e.src], map[e.dst], &e.label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;
    use crate::formula::{build_eta, AxiomSpec};

    fn a() -> Label {
        Label::new("a").unwrap()
    }

    #[test]
    fn nominal_is_one_point() {
        let t = reduced_tree(&Formula::nominal(0)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.label(0), &BTreeSet::from([0]));
    }

    #[test]
    fn twin_diamonds_share_an_empty_root() {
        let d = Formula::diamond(a(), Formula::nominal(1));
        let t = reduced_tree(&Formula::And(vec![d.clone(), d])).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.label(0).is_empty());
        assert_eq!(t.children(0).len(), 2);
        assert_eq!(t.label(1), &BTreeSet::from([1]));
        assert_eq!(t.label(2), &BTreeSet::from([1]));
        assert!(t.point_map().is_none());
    }

    #[test]
    fn triangle_eta_tree() {
        let d = Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap();
        let t = reduced_tree(&build_eta(&AxiomSpec::new(d.clone()).unwrap())).unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.is_tree());
        assert_eq!(t.point_map().unwrap(), vec![0, 1, 2, 2, 1]);
        assert_eq!(t.depth_of(4), 2);
        assert!(t.is_monotone_into(&d));
        let other = Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a")]).unwrap();
        assert!(!t.is_monotone_into(&other));
    }

    #[test]
    fn rejects_other_connectives() {
        assert!(reduced_tree(&Formula::var(1)).is_err());
        assert!(reduced_tree(&Formula::boxed(a(), Formula::nominal(0))).is_err());
    }
}
