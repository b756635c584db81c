//! Hybrid translation of a diagram and the modal axiom families built from it.
//!
//! `chi_i = j_i & /\ <l> j_k` over diagram edges `x_i -l-> x_k`;
//! `eta_i = chi_i & /\ <l> eta_k` over spanning-tree edges; `eta = eta_0`.
//! `gamma_Psi` is the disjunction of `eta` with each nominal `j_l` replaced by
//! `Psi[kappa(l)]`, over all maps `kappa`, and `gamma_m` guards
//! `gamma_{p1..pm}` with `[sigma](p1 | ... | pm)` for every label string
//! `sigma` of length at most the guard depth (the empty string included).

use thiserror::Error;

use super::Formula;
use crate::diagram::paths::spanning_tree;
use crate::diagram::{Diagram, DiagramError, Label, SpanningTree};

pub const DEFAULT_EXPANSION_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("expansion needs {required} disjuncts, above the cap of {cap}; use the semantic evaluator")]
    ExpansionCapExceeded { required: u128, cap: u64 },
    #[error("colour formula list is empty")]
    EmptyPsi,
    #[error("m must be at least 1")]
    ZeroColours,
    #[error("spanning tree does not fit the diagram")]
    BadTree,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Everything needed to generate `eta` and the `gamma` axioms of a diagram.
#[derive(Clone, Debug)]
pub struct AxiomSpec {
    diagram: Diagram,
    tree: SpanningTree,
    depth: usize,
    pub prune_redundant: bool,
    pub guard_depth: usize,
}

impl AxiomSpec {
    /// Uses the deterministic BFS spanning tree, pruning on, guard depth = tree depth.
    pub fn new(diagram: Diagram) -> Result<Self, AxiomError> {
        let tree = spanning_tree(&diagram)?;
        Self::with_tree(diagram, tree)
    }

    pub fn with_tree(diagram: Diagram, tree: SpanningTree) -> Result<Self, AxiomError> {
        if !tree.is_valid_for(&diagram) {
            return Err(AxiomError::BadTree);
        }
        let depth = tree.depth();
        Ok(AxiomSpec { diagram, tree, depth, prune_redundant: true, guard_depth: depth })
    }

    pub fn unpruned(mut self) -> Self {
        self.prune_redundant = false;
        self
    }

    pub fn with_guard_depth(mut self, g: usize) -> Self {
        self.guard_depth = g;
        self
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Label strings of length `0..=guard_depth`, shortest first, then
    /// lexicographic.
    pub fn guard_strings(&self) -> Vec<Vec<Label>> {
        let labels: Vec<Label> = self.diagram.labels().cloned().collect();
        let mut out = vec![Vec::new()];
        let mut layer: Vec<Vec<Label>> = vec![Vec::new()];
        for _ in 0..self.guard_depth {
            if labels.is_empty() {
                break;
            }
            layer = layer
                .iter()
                .flat_map(|s| {
                    labels.iter().map(move |l| {
                        let mut t = s.clone();
                        t.push(l.clone());
                        t
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

/// `chi_i`, conjuncts ordered by `(label, target)`.
pub fn build_chi(d: &Diagram, i: usize) -> Result<Formula, AxiomError> {
    d.frame().check_point(i)?;
    let mut items = vec![Formula::nominal(i)];
    items.extend(out_diamonds(d, i, |_| false));
    Ok(Formula::and(items))
}

fn out_diamonds<'a>(
    d: &'a Diagram,
    i: usize,
    skip: impl Fn(&crate::diagram::Edge) -> bool + 'a,
) -> impl Iterator<Item = Formula> + 'a {
    let mut edges: Vec<_> = d.frame().out_edges(i).filter(move |e| !skip(e)).collect();
    edges.sort_by(|a, b| (&a.label, a.dst).cmp(&(&b.label, b.dst)));
    edges.into_iter().map(|e| Formula::diamond(e.label.clone(), Formula::nominal(e.dst)))
}

/// The hybrid formula `eta`. With pruning, `<l> j_k` is dropped from `chi_i`
/// when `x_i -l-> x_k` is a tree edge, since the sibling `<l> eta_k` already
/// contains `j_k`.
pub fn build_eta(spec: &AxiomSpec) -> Formula {
    eta_at(spec, Diagram::ROOT)
}

fn eta_at(spec: &AxiomSpec, i: usize) -> Formula {
    let d = &spec.diagram;
    let tree = &spec.tree;
    let mut items = vec![Formula::nominal(i)];
    items.extend(out_diamonds(d, i, |e| spec.prune_redundant && tree.contains(e)));
    for (label, k) in tree.children(i) {
        items.push(Formula::diamond(label, eta_at(spec, k)));
    }
    Formula::and(items)
}

fn disjunct_count(psi_len: usize, points: usize) -> u128 {
    (psi_len as u128).checked_pow(points as u32).unwrap_or(u128::MAX)
}

/// `gamma_Psi`: one disjunct per map `kappa: {0..n} -> Psi`, in lexicographic
/// order of `(kappa(0), ..., kappa(n))`.
pub fn gamma_psi(spec: &AxiomSpec, psi: &[Formula], cap: u64) -> Result<Formula, AxiomError> {
    if psi.is_empty() {
        return Err(AxiomError::EmptyPsi);
    }
    let points = spec.diagram.point_count();
    let required = disjunct_count(psi.len(), points);
    if required > cap as u128 {
        return Err(AxiomError::ExpansionCapExceeded { required, cap });
    }
    let eta = build_eta(spec);
    let mut kappa = vec![0usize; points];
    let mut disjuncts = Vec::with_capacity(required as usize);
    loop {
        disjuncts.push(eta.substitute_with(&|a| match a {
            super::Atom::Nominal(l) if l < points => Some(psi[kappa[l]].clone()),
            _ => None,
        }));
        // Odometer with kappa(0) most significant.
        let mut pos = points;
        loop {
            if pos == 0 {
                return Ok(Formula::or(disjuncts));
            }
            pos -= 1;
            kappa[pos] += 1;
            if kappa[pos] < psi.len() {
                break;
            }
            kappa[pos] = 0;
        }
    }
}

/// The guard `/\ [sigma](p1 | ... | pm)`.
pub fn gamma_guard(spec: &AxiomSpec, m: usize) -> Formula {
    let cover = Formula::colour_cover(m);
    Formula::and(
        spec.guard_strings()
            .into_iter()
            .map(|sigma| sigma.into_iter().rev().fold(cover.clone(), |acc, l| Formula::boxed(l, acc)))
            .collect(),
    )
}

/// `gamma_m = guard -> gamma_{p1..pm}`.
pub fn gamma_m(spec: &AxiomSpec, m: usize, cap: u64) -> Result<Formula, AxiomError> {
    if m == 0 {
        return Err(AxiomError::ZeroColours);
    }
    let psi: Vec<Formula> = (1..=m).map(Formula::var).collect();
    let body = gamma_psi(spec, &psi, cap)?;
    Ok(Formula::implies(gamma_guard(spec, m), body))
}

/// `Psi_h`: all `2^h` sign patterns `p1^e1 & ... & ph^eh`, where `p^1 = p`
/// and `p^0 = ~p`; patterns ordered by the bit vector read as a binary
/// number with `e1` most significant.
pub fn psi_h(h: usize) -> Vec<Formula> {
    (0..1usize << h)
        .map(|bits| {
            Formula::and(
                (1..=h)
                    .map(|j| {
                        let on = bits >> (h - j) & 1 == 1;
                        if on {
                            Formula::var(j)
                        } else {
                            Formula::not(Formula::var(j))
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::edge;
    use crate::formula::{render, Format};

    fn a() -> Label {
        Label::new("a").unwrap()
    }
    fn j(k: usize) -> Formula {
        Formula::nominal(k)
    }
    fn dia(f: Formula) -> Formula {
        Formula::diamond(a(), f)
    }
    fn d_tri() -> Diagram {
        Diagram::new(3, [edge(0, 1, "a"), edge(0, 2, "a"), edge(1, 2, "a"), edge(2, 1, "a")]).unwrap()
    }
    fn d_chain() -> Diagram {
        Diagram::new(3, [edge(0, 1, "a"), edge(1, 2, "a")]).unwrap()
    }
    fn d_refsucc() -> Diagram {
        Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "a")]).unwrap()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(build_chi(&d_tri(), 1).unwrap(), Formula::and(vec![j(1), dia(j(2))]));
        assert_eq!(build_chi(&Diagram::new(2, [edge(0, 1, "a")]).unwrap(), 1).unwrap(), j(1));
        assert_eq!(build_chi(&d_refsucc(), 1).unwrap(), Formula::and(vec![j(1), dia(j(1))]));
        assert!(build_chi(&d_refsucc(), 5).is_err());
    }

    #[test]
    fn chi_orders_by_label_then_target() {
        let d = Diagram::new(3, [edge(0, 2, "a"), edge(0, 1, "b"), edge(0, 1, "a")]).unwrap();
        let b = Label::new("b").unwrap();
        assert_eq!(
            build_chi(&d, 0).unwrap(),
            Formula::and(vec![j(0), dia(j(1)), dia(j(2)), Formula::diamond(b, j(1))])
        );
    }

    #[test]
    fn eta_of_triangle_matches_example() {
        let spec = AxiomSpec::new(d_tri()).unwrap();
        let want = Formula::and(vec![
            j(0),
            dia(Formula::and(vec![j(1), dia(j(2))])),
            dia(Formula::and(vec![j(2), dia(j(1))])),
        ]);
        assert_eq!(build_eta(&spec), want);
        let unpruned = build_eta(&spec.unpruned());
        assert_eq!(
            unpruned,
            Formula::and(vec![
                j(0),
                dia(j(1)),
                dia(j(2)),
                dia(Formula::and(vec![j(1), dia(j(2))])),
                dia(Formula::and(vec![j(2), dia(j(1))])),
            ])
        );
    }

    #[test]
    fn eta_small_cases() {
        let single = AxiomSpec::new(Diagram::new(1, []).unwrap()).unwrap();
        assert_eq!(build_eta(&single), j(0));
        let chain = AxiomSpec::new(d_chain()).unwrap();
        assert_eq!(build_eta(&chain), Formula::and(vec![j(0), dia(Formula::and(vec![j(1), dia(j(2))]))]));
    }

    #[test]
    fn gamma_psi_counts() {
        let spec = AxiomSpec::new(d_tri()).unwrap();
        let p = |k| Formula::var(k);
        let one = gamma_psi(&spec, &[p(1)], DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(
            one,
            Formula::and(vec![
                p(1),
                dia(Formula::and(vec![p(1), dia(p(1))])),
                dia(Formula::and(vec![p(1), dia(p(1))])),
            ])
        );
        let two = gamma_psi(&spec, &[p(1), p(2)], DEFAULT_EXPANSION_CAP).unwrap();
        assert!(matches!(two, Formula::Or(ref v) if v.len() == 8));
        let chain = AxiomSpec::new(d_chain()).unwrap();
        let Formula::Or(ds) = gamma_psi(&chain, &[p(1), p(2)], DEFAULT_EXPANSION_CAP).unwrap() else {
            panic!("expected a disjunction")
        };
        assert_eq!(ds.len(), 8);
        // kappa = (0, 1, 1) is the fourth map in lexicographic order.
        assert_eq!(ds[3], Formula::and(vec![p(1), dia(Formula::and(vec![p(2), dia(p(2))]))]));
        assert!(gamma_psi(&chain, &[], 10).is_err());
    }

    #[test]
    fn expansion_cap() {
        let spec = AxiomSpec::new(d_tri()).unwrap();
        let psi: Vec<Formula> = (1..=50).map(Formula::var).collect();
        assert_eq!(
            gamma_psi(&spec, &psi, DEFAULT_EXPANSION_CAP),
            Err(AxiomError::ExpansionCapExceeded { required: 125_000, cap: DEFAULT_EXPANSION_CAP })
        );
    }

    #[test]
    fn gamma_m_shapes() {
        let spec = AxiomSpec::new(d_tri()).unwrap();
        let g = gamma_m(&spec, 2, DEFAULT_EXPANSION_CAP).unwrap();
        let Formula::Implies(guard, body) = &g else { panic!() };
        assert_eq!(render(guard, Format::Text), "(p1 | p2) & [a] (p1 | p2)");
        assert!(matches!(**body, Formula::Or(ref v) if v.len() == 8));

        let single = AxiomSpec::new(Diagram::new(1, []).unwrap()).unwrap();
        assert_eq!(gamma_m(&single, 1, 10).unwrap(), Formula::implies(Formula::var(1), Formula::var(1)));

        let refsucc = AxiomSpec::new(d_refsucc()).unwrap();
        let text = render(&gamma_m(&refsucc, 1, 10).unwrap(), Format::Text);
        assert!(text.contains("<a> (p1 & <a> p1)"), "{text}");
        assert_eq!(gamma_m(&refsucc, 0, 10), Err(AxiomError::ZeroColours));
    }

    #[test]
    fn guard_strings_multi_label() {
        let d = Diagram::new(2, [edge(0, 1, "a"), edge(1, 1, "b")]).unwrap();
        let spec = AxiomSpec::new(d).unwrap().with_guard_depth(2);
        let names: Vec<String> = spec
            .guard_strings()
            .iter()
            .map(|s| s.iter().map(Label::name).collect::<Vec<_>>().join(""))
            .collect();
        assert_eq!(names, ["", "a", "b", "aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn psi_h_patterns() {
        let ps = psi_h(2);
        assert_eq!(ps.len(), 4);
        assert_eq!(render(&ps[0], Format::Text), "~p1 & ~p2");
        assert_eq!(render(&ps[3], Format::Text), "p1 & p2");
        assert_eq!(psi_h(0), vec![Formula::top()]);
    }

    #[test]
    fn bad_tree_rejected() {
        let tree = SpanningTree::from_parents(vec![None, Some(edge(0, 1, "a")), Some(edge(0, 1, "a"))]);
        assert_eq!(AxiomSpec::with_tree(d_tri(), tree).unwrap_err(), AxiomError::BadTree);
    }
}
