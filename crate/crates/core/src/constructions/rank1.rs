//! The frame pair `F+ / F-` for a globally minimal diagram with an inner
//! cycle, and an exhaustive check of conditions C-i .. C-vi.
//!
//! `F+` is the chase of the diagram after `r` rounds (`r` the largest rank)
//! closed off by a point `∘` that is reflexive for every label and receives
//! every label from the last round's active points. `F-` drops one edge
//! `g(x_d) -λ_d-> g(x_d')`, where `x_d -λ_d-> x_d'` lies on an inner cycle
//! and outside a spanning tree.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use super::ConstructionError;
use crate::diagram::paths::{inner_cycle_edges, max_rank, spanning_tree, undirected_path, UndirectedStep};
use crate::diagram::{Diagram, Edge, Frame, Label, SpanningTree};
use crate::minimizer::{chase, is_globally_minimal};
use crate::semantics::hom::{for_each_hom, is_homomorphism, satisfies_e, HomAssignment};

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionBundle {
    #[serde(skip)]
    pub diagram: Diagram,
    pub f_plus: Frame,
    pub f_minus: Frame,
    /// `g[i]` is the point standing for `x_i`.
    pub g: Vec<usize>,
    /// Diagram edge `x_d -λ_d-> x_d'`, once selected.
    pub selected: Option<Edge>,
    pub reflexive_point: usize,
    pub root: usize,
    pub rounds: usize,
    /// Points created by the chase in its last round.
    pub final_active: Vec<usize>,
}

impl ConstructionBundle {
    /// `b = |W±|`.
    pub fn b(&self) -> usize {
        self.f_plus.size()
    }

    /// The frame edge removed from `F+`.
    pub fn removed_edge(&self) -> Option<Edge> {
        self.selected.as_ref().map(|e| Edge::new(self.g[e.src], self.g[e.dst], e.label.clone()))
    }

    /// Points in the image of `g`.
    pub fn image(&self) -> BTreeSet<usize> {
        self.g.iter().copied().collect()
    }

    /// The point playing `x_i`, if it is in the image of `g`.
    pub fn preimage(&self, w: usize) -> Option<usize> {
        self.g.iter().position(|&y| y == w)
    }
}

fn check_preconditions(d: &Diagram) -> Result<(), ConstructionError> {
    if let Some(x) = crate::diagram::paths::reachable_from(d.frame(), Diagram::ROOT, None).iter().position(|r| !r) {
        return Err(ConstructionError::NotRooted(x));
    }
    if !is_globally_minimal(d)? {
        return Err(ConstructionError::NotMinimal);
    }
    if inner_cycle_edges(d).is_empty() {
        return Err(ConstructionError::NoInnerCycle);
    }
    Ok(())
}

fn close_off(d: &Diagram, rounds: usize) -> ConstructionBundle {
    let c = chase(d, rounds);
    let circ = c.size();
    let labels: Vec<Label> = d.labels().cloned().collect();
    let mut edges: Vec<Edge> = c.frame.edges().iter().cloned().collect();
    for l in &labels {
        edges.push(Edge::new(circ, circ, l.clone()));
        edges.extend(c.active.iter().map(|&a| Edge::new(a, circ, l.clone())));
    }
    let f_plus = Frame::new(circ + 1, edges).expect("chase points and the closing point are in range");
    let g = (0..d.point_count())
        .map(|i| if i == Diagram::ROOT { c.origin } else { c.point_with(&[i]).expect("first round copies x_i") })
        .collect();
    ConstructionBundle {
        diagram: d.clone(),
        f_minus: f_plus.clone(),
        f_plus,
        g,
        selected: None,
        reflexive_point: circ,
        root: c.origin,
        rounds,
        final_active: c.active,
    }
}

/// `F+` for `d`, with `F-` still equal to `F+`.
pub fn build_f_plus(d: &Diagram) -> Result<ConstructionBundle, ConstructionError> {
    check_preconditions(d)?;
    Ok(close_off(d, max_rank(d)?))
}

/// The closing point fed by every non-root point of `d` itself, with no
/// chase rounds beyond the first. Kept as a contrast to [`build_f_plus`].
pub fn build_naive(d: &Diagram) -> Result<ConstructionBundle, ConstructionError> {
    check_preconditions(d)?;
    Ok(close_off(d, 1))
}

/// First inner-cycle edge outside `tree`, ordered by `(dst, src, label)`.
pub fn select_edge(d: &Diagram, tree: &SpanningTree) -> Option<Edge> {
    inner_cycle_edges(d)
        .into_iter()
        .filter(|e| !tree.contains(e))
        .min_by(|a, b| (a.dst, a.src, &a.label).cmp(&(b.dst, b.src, &b.label)))
}

/// Selects `x_d -λ_d-> x_d'` and removes its image from `F+`.
pub fn select_edge_and_build_f_minus(
    mut bundle: ConstructionBundle,
    tree: &SpanningTree,
) -> Result<ConstructionBundle, ConstructionError> {
    let e = select_edge(&bundle.diagram, tree).ok_or(ConstructionError::NoInnerCycle)?;
    bundle.selected = Some(e);
    let removed = bundle.removed_edge().expect("just selected");
    bundle.f_minus = bundle.f_plus.without_edge(&removed)?;
    Ok(bundle)
}

/// [`build_f_plus`] followed by edge selection against the default spanning tree.
pub fn build_bundle(d: &Diagram) -> Result<ConstructionBundle, ConstructionError> {
    let tree = spanning_tree(d)?;
    select_edge_and_build_f_minus(build_f_plus(d)?, &tree)
}

/// [`build_naive`] with the same edge selection.
pub fn build_naive_bundle(d: &Diagram) -> Result<ConstructionBundle, ConstructionError> {
    let tree = spanning_tree(d)?;
    select_edge_and_build_f_minus(build_naive(d)?, &tree)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank1Report {
    pub conditions: Vec<ConditionCheck>,
    /// Root-anchored homomorphisms `D -> F+` examined for C-v.
    pub homomorphisms: Vec<HomAssignment>,
    /// Undirected path for C-iv, when one exists.
    pub path: Option<Vec<UndirectedStep>>,
}

impl Rank1Report {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, holds: bool, detail: impl Into<String>) -> ConditionCheck {
    ConditionCheck { name, holds, detail: detail.into() }
}

fn show_hom(h: &[usize]) -> String {
    let parts: Vec<String> = h.iter().enumerate().map(|(i, y)| format!("x{i}->{y}")).collect();
    format!("[{}]", parts.join(", "))
}

fn c_i(d: &Diagram, b: &ConstructionBundle) -> ConditionCheck {
    let Some(removed) = b.removed_edge() else {
        return check("C-i", false, "no edge selected");
    };
    let mut problems = Vec::new();
    if !b.f_plus.contains_edge(&removed) {
        problems.push(format!("F+ lacks {removed}"));
    }
    let expected: BTreeSet<&Edge> = b.f_plus.edges().iter().filter(|e| **e != removed).collect();
    if b.f_minus.size() != b.f_plus.size() || b.f_minus.edges().iter().collect::<BTreeSet<_>>() != expected {
        problems.push("F- is not F+ minus the selected edge".into());
    }
    if b.image().len() != d.point_count() {
        problems.push("g is not injective".into());
    }
    if !is_homomorphism(d.frame(), &b.f_plus, &b.g) {
        problems.push("g is not a homomorphism into F+".into());
    }
    if b.g[Diagram::ROOT] != b.root {
        problems.push("g(x0) is not w0".into());
    }
    let circ = b.reflexive_point;
    for l in d.labels() {
        if !b.f_plus.has_edge(circ, circ, l) {
            problems.push(format!("closing point lacks a {l}-loop"));
        }
        if let Some(a) = b.final_active.iter().find(|&&a| !b.f_plus.has_edge(a, circ, l)) {
            problems.push(format!("{a} lacks a {l}-edge to the closing point"));
        }
    }
    if problems.is_empty() {
        check("C-i", true, format!("F- = F+ - {removed}"))
    } else {
        check("C-i", false, problems.join("; "))
    }
}

/// Checks C-i .. C-vi exhaustively. C-v ranges over every homomorphism
/// `D -> F+` with `x0 |-> w0`.
pub fn verify_rank1(d: &Diagram, b: &ConstructionBundle) -> Rank1Report {
    let mut conditions = vec![c_i(d, b)];

    conditions.push(match satisfies_e(&b.f_minus, b.root, d) {
        None => check("C-ii", true, "no homomorphism D -> F- at w0"),
        Some(h) => check("C-ii", false, format!("F- satisfies e^D at w0 via {}", show_hom(&h))),
    });

    conditions.push(match satisfies_e(&b.f_plus, b.root, d) {
        Some(h) => check("C-iii", true, format!("witness {}", show_hom(&h))),
        None => check("C-iii", false, "no homomorphism D -> F+ at w0"),
    });

    let path = b.selected.as_ref().and_then(|e| {
        let image = b.image();
        let allowed = |p: usize| p != b.root && image.contains(&p);
        let sub = Frame::new(
            b.f_minus.size(),
            b.f_minus.edges().iter().filter(|x| allowed(x.src) && allowed(x.dst)).cloned(),
        )
        .expect("same carrier");
        undirected_path(&sub, b.g[e.src], b.g[e.dst], &[]).ok().flatten()
    });
    conditions.push(match &path {
        Some(steps) => {
            let pts: Vec<String> = std::iter::once(steps.first().map_or(0, |s| s.from))
                .chain(steps.iter().map(|s| s.to))
                .map(|p| p.to_string())
                .collect();
            check("C-iv", true, format!("path {}", pts.join(" ~ ")))
        }
        None => check("C-iv", false, "no undirected path inside the image of g avoiding w0"),
    });

    let mut homomorphisms = Vec::new();
    let mut bad: Option<String> = None;
    let image = b.image();
    for_each_hom(d.frame(), Diagram::ROOT, &b.f_plus, b.root, |h| {
        homomorphisms.push(h.to_vec());
        let img: BTreeSet<usize> = h.iter().copied().collect();
        if img != image {
            bad = Some(format!("{} has image {:?}", show_hom(h), img));
            return ControlFlow::Break(());
        }
        for i in d.frame().points() {
            for j in d.frame().points() {
                for l in b.f_plus.labels() {
                    if b.f_plus.has_edge(h[i], h[j], l) && !d.has_edge(i, j, l) {
                        bad = Some(format!("{}: {}-edge {}->{} has no preimage x{i}->x{j}", show_hom(h), l, h[i], h[j]));
                        return ControlFlow::Break(());
                    }
                }
            }
        }
        ControlFlow::Continue(())
    });
    conditions.push(match bad {
        None => check("C-v", true, format!("{} homomorphisms, each onto the image of g and edge-reflecting", homomorphisms.len())),
        Some(why) => check("C-v", false, why),
    });

    let failing: Vec<usize> =
        b.f_minus.points().filter(|&w| w != b.root && satisfies_e(&b.f_minus, w, d).is_none()).collect();
    conditions.push(if failing.is_empty() {
        check("C-vi", true, format!("e^D holds in F- at all {} points other than w0", b.f_minus.size() - 1))
    } else {
        check("C-vi", false, format!("e^D fails in F- at {failing:?}"))
    });

    Rank1Report { conditions, homomorphisms, path }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;

    fn d_tri() -> Diagram {
        Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap()
    }
    fn d_refsucc() -> Diagram {
        Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap()
    }
    fn d_fig3() -> Diagram {
        Diagram::new(4, [edge(0, 1, "a"), edge(1, 2, "a"), edge(2, 3, "a"), edge(3, 2, "a")]).unwrap()
    }

    #[test]
    fn tri_f_plus() {
        let b = build_f_plus(&d_tri()).unwrap();
        assert_eq!(b.rounds, 1);
        assert_eq!(b.g, vec![0, 1, 2]);
        assert_eq!(b.reflexive_point, 3);
        let mut es: Vec<Edge> = d_tri().edges().iter().cloned().collect();
        es.extend([edge(1, 3, "a"), edge(2, 3, "a"), edge(3, 3, "a")]);
        assert_eq!(b.f_plus, Frame::new(4, es).unwrap());
    }

    #[test]
    fn refsucc_f_plus() {
        let b = build_bundle(&d_refsucc()).unwrap();
        assert_eq!(b.f_plus, Frame::new(3, [edge(0, 1, "a"), edge(1, 1, "a"), edge(1, 2, "a"), edge(2, 2, "a")]).unwrap());
        assert_eq!(b.selected, Some(edge(1, 1, "a")));
    }

    #[test]
    fn tri_selection() {
        let tree = spanning_tree(&d_tri()).unwrap();
        let b = select_edge_and_build_f_minus(build_f_plus(&d_tri()).unwrap(), &tree).unwrap();
        assert_eq!(b.selected, Some(edge(2, 1, "a")));
        assert_eq!(b.removed_edge(), Some(edge(2, 1, "a")));
        let again = select_edge_and_build_f_minus(b.clone(), &tree).unwrap();
        assert_eq!(again.selected, b.selected);
        assert_eq!(again.f_minus, b.f_minus);
    }

    #[test]
    fn preconditions() {
        let chain = Diagram::new(3, [edge(0, 1, "a"), edge(1, 2, "a")]).unwrap();
        assert!(matches!(build_f_plus(&chain), Err(ConstructionError::NotMinimal)));
        let succ = Diagram::new(2, [edge(0, 1, "a")]).unwrap();
        assert!(matches!(build_f_plus(&succ), Err(ConstructionError::NoInnerCycle)));
        let cut = Diagram::new(2, []).unwrap();
        assert!(matches!(build_f_plus(&cut), Err(ConstructionError::NotRooted(1))));
    }

    #[test]
    fn tri_passes_with_two_homomorphisms() {
        let b = build_bundle(&d_tri()).unwrap();
        let r = verify_rank1(&d_tri(), &b);
        assert!(r.all_hold(), "{r:#?}");
        assert_eq!(r.homomorphisms, vec![vec![0, 1, 2], vec![0, 2, 1]]);
        assert_eq!(r.path.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn refsucc_passes() {
        let r = verify_rank1(&d_refsucc(), &build_bundle(&d_refsucc()).unwrap());
        assert!(r.all_hold(), "{r:#?}");
        assert_eq!(r.path, Some(vec![]));
    }

    #[test]
    fn fig3_chase_and_naive_closing() {
        let b = build_bundle(&d_fig3()).unwrap();
        assert_eq!(b.rounds, 3);
        assert_eq!(b.b(), 41);
        assert_eq!(b.selected, Some(edge(3, 2, "a")));
        assert!(verify_rank1(&d_fig3(), &b).all_hold());

        let naive = build_naive_bundle(&d_fig3()).unwrap();
        assert_eq!(naive.b(), 5);
        let r = verify_rank1(&d_fig3(), &naive);
        assert!(!r.condition("C-ii").unwrap().holds);
    }
}
