//! Modal and hybrid formulas.
//!
//! One AST serves both: a formula is *modal* when it contains no nominals.
//! Derived connectives (`&`, `|`, `~`, boxes) are explicit constructors and
//! can be rewritten to the primitives `false`, `->`, `<l>` with
//! [`Formula::to_primitive`].

pub mod axioms;
pub mod text;
pub mod tree;

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::Label;

pub use axioms::{build_chi, build_eta, gamma_m, gamma_psi, AxiomError, AxiomSpec, DEFAULT_EXPANSION_CAP};
pub use text::{parse_formula, render, FormulaParseError, Format};
pub use tree::{reduced_tree, LabelledTree, TreeError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Var(usize),
    Nominal(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Label, Box<Formula>),
    Box(Label, Box<Formula>),
}

/// A substitutable atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(usize),
    Nominal(usize),
}

impl Formula {
    pub fn var(k: usize) -> Self {
        Formula::Var(k)
    }

    pub fn nominal(k: usize) -> Self {
        Formula::Nominal(k)
    }

    pub fn top() -> Self {
        Formula::Not(Box::new(Formula::Bot))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond(l: Label, f: Formula) -> Self {
        Formula::Diamond(l, Box::new(f))
    }

    pub fn boxed(l: Label, f: Formula) -> Self {
        Formula::Box(l, Box::new(f))
    }

    /// Conjunction that keeps lists nonempty: `[]` is `true`, `[a]` is `a`.
    pub fn and(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::top(),
            1 => items.pop().expect("one item"),
            _ => Formula::And(items),
        }
    }

    /// Disjunction that keeps lists nonempty: `[]` is `false`, `[a]` is `a`.
    pub fn or(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::Bot,
            1 => items.pop().expect("one item"),
            _ => Formula::Or(items),
        }
    }

    /// `p1 | ... | pm`.
    pub fn colour_cover(m: usize) -> Self {
        Formula::or((1..=m).map(Formula::Var).collect())
    }

    fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bot | Formula::Var(_) | Formula::Nominal(_) => vec![],
            Formula::Not(a) | Formula::Diamond(_, a) | Formula::Box(_, a) => vec![a],
            Formula::Implies(a, b) => vec![a, b],
            Formula::And(xs) | Formula::Or(xs) => xs.iter().collect(),
        }
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut |a| {
            if let Atom::Var(k) = a {
                out.insert(k);
            }
        });
        out
    }

    pub fn nominals(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut |a| {
            if let Atom::Nominal(k) = a {
                out.insert(k);
            }
        });
        out
    }

    pub fn is_modal(&self) -> bool {
        self.nominals().is_empty()
    }

    fn collect_atoms(&self, f: &mut impl FnMut(Atom)) {
        match self {
            Formula::Var(k) => f(Atom::Var(*k)),
            Formula::Nominal(k) => f(Atom::Nominal(*k)),
            other => other.children().into_iter().for_each(|c| c.collect_atoms(f)),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn modal_depth(&self) -> usize {
        let inner = self.children().into_iter().map(Formula::modal_depth).max().unwrap_or(0);
        match self {
            Formula::Diamond(..) | Formula::Box(..) => inner + 1,
            _ => inner,
        }
    }

    /// Replaces atoms by formulas. There are no binders, so this is plain
    /// structural replacement.
    pub fn substitute(&self, mapping: &BTreeMap<Atom, Formula>) -> Formula {
        self.substitute_with(&|a| mapping.get(&a).cloned())
    }

    pub fn substitute_with(&self, mapping: &impl Fn(Atom) -> Option<Formula>) -> Formula {
        let rec = |f: &Formula| Box::new(f.substitute_with(mapping));
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Var(k) => mapping(Atom::Var(*k)).unwrap_or(Formula::Var(*k)),
            Formula::Nominal(k) => mapping(Atom::Nominal(*k)).unwrap_or(Formula::Nominal(*k)),
            Formula::Not(a) => Formula::Not(rec(a)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.substitute_with(mapping)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.substitute_with(mapping)).collect()),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Diamond(l, a) => Formula::Diamond(l.clone(), rec(a)),
            Formula::Box(l, a) => Formula::Box(l.clone(), rec(a)),
        }
    }

    /// Rewrites into `false`, atoms, `->` and diamonds only.
    pub fn to_primitive(&self) -> Formula {
        let neg = |f: Formula| Formula::implies(f, Formula::Bot);
        match self {
            Formula::Bot | Formula::Var(_) | Formula::Nominal(_) => self.clone(),
            Formula::Not(a) => neg(a.to_primitive()),
            Formula::Implies(a, b) => Formula::implies(a.to_primitive(), b.to_primitive()),
            Formula::Diamond(l, a) => Formula::diamond(l.clone(), a.to_primitive()),
            Formula::Box(l, a) => neg(Formula::diamond(l.clone(), neg(a.to_primitive()))),
            // a | b  ==  ~a -> b
            Formula::Or(xs) => {
                let mut it = xs.iter().rev().map(Formula::to_primitive);
                let last = it.next().unwrap_or(Formula::Bot);
                it.fold(last, |acc, x| Formula::implies(neg(x), acc))
            }
            // a & b  ==  ~(a -> ~b)
            Formula::And(xs) => {
                let mut it = xs.iter().rev().map(Formula::to_primitive);
                let last = it.next().unwrap_or_else(|| neg(Formula::Bot));
                it.fold(last, |acc, x| neg(Formula::implies(x, neg(acc))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Label {
        Label::new("a").unwrap()
    }

    #[test]
    fn smart_constructors_keep_lists_nonempty() {
        assert_eq!(Formula::and(vec![]), Formula::top());
        assert_eq!(Formula::or(vec![]), Formula::Bot);
        assert_eq!(Formula::and(vec![Formula::var(1)]), Formula::var(1));
        assert_eq!(Formula::colour_cover(1), Formula::var(1));
        assert!(matches!(Formula::colour_cover(3), Formula::Or(ref v) if v.len() == 3));
    }

    #[test]
    fn substitution() {
        // j0 |-> p1 in j0 & <a> j1
        let phi = Formula::and(vec![Formula::nominal(0), Formula::diamond(a(), Formula::nominal(1))]);
        let map = BTreeMap::from([(Atom::Nominal(0), Formula::var(1))]);
        let want = Formula::and(vec![Formula::var(1), Formula::diamond(a(), Formula::nominal(1))]);
        assert_eq!(phi.substitute(&map), want);
        assert_eq!(phi.substitute(&BTreeMap::new()), phi);
        assert_eq!(phi.nominals(), BTreeSet::from([0, 1]));
        assert!(!phi.is_modal());
        assert_eq!(phi.modal_depth(), 1);
    }

    #[test]
    fn primitive_form_has_only_primitives() {
        let phi = Formula::implies(
            Formula::and(vec![Formula::var(1), Formula::boxed(a(), Formula::var(2))]),
            Formula::or(vec![Formula::not(Formula::var(1)), Formula::var(3)]),
        );
        fn primitive_only(f: &Formula) -> bool {
            match f {
                Formula::Bot | Formula::Var(_) | Formula::Nominal(_) => true,
                Formula::Implies(a, b) => primitive_only(a) && primitive_only(b),
                Formula::Diamond(_, a) => primitive_only(a),
                _ => false,
            }
        }
        assert!(primitive_only(&phi.to_primitive()));
        assert_eq!(phi.to_primitive().variables(), phi.variables());
    }
}
