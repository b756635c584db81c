//! Entailment between diagram sentences, minimality, minimization and the
//! dichotomy verdict.
//!
//! Local entailment `e^{d1}(x0) |= e^{d2}(x0)` is a root-anchored homomorphism
//! `d2 -> d1`. Global entailment `forall x0 e^{d1} |= forall x0 e^{d2}` is a
//! root-anchored homomorphism from `d2` into the chase of `d1`, truncated at
//! the largest rank `r` of `d2`: the infinite chase is a universal model of
//! `forall x0 e^{d1}`, a homomorphic image of the rooted `d2` anchored at
//! `c0` stays within distance `r`, and every point within distance `r` of
//! `c0` is created by round `r` (points of round `k` lie at distance `>= k`).

pub mod chase;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagram::paths::{has_inner_cycle, max_rank};
use crate::diagram::{Diagram, DiagramError, Edge};
use crate::semantics::hom::{find_hom, satisfies_e};

pub use chase::{chase, ChaseState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinimizerError {
    #[error("diagram is not rooted: x{0} is unreachable from x0")]
    NotRooted(usize),
    #[error("{edges} edges exceed the limit of {max} for exploring every deletion order")]
    TooManyEdges { edges: usize, max: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn require_rooted(d: &Diagram) -> Result<(), MinimizerError> {
    let reach = crate::diagram::paths::reachable_from(d.frame(), Diagram::ROOT, None);
    match reach.iter().position(|r| !r) {
        Some(x) => Err(MinimizerError::NotRooted(x)),
        None => Ok(()),
    }
}

/// `e^{d1}(x0)` entails `e^{d2}(x0)`.
pub fn entails_locally(d1: &Diagram, d2: &Diagram) -> bool {
    find_hom(d2.frame(), Diagram::ROOT, d1.frame(), Diagram::ROOT).is_some()
}

/// `forall x0 e^{d1}(x0)` entails `forall x0 e^{d2}(x0)`. `d2` must be rooted.
/// Chases `d1` one round past the largest rank of `d2`.
pub fn entails_globally(d1: &Diagram, d2: &Diagram) -> Result<bool, MinimizerError> {
    require_rooted(d2)?;
    let r = max_rank(d2)?;
    let c = chase(d1, r + 1);
    Ok(satisfies_e(&c.frame, c.origin, d2).is_some())
}

pub fn is_locally_minimal(d: &Diagram) -> bool {
    d.edges().iter().all(|e| {
        let smaller = d.delete_edge(e).expect("edge is present");
        !entails_locally(&smaller, d)
    })
}

pub fn is_globally_minimal(d: &Diagram) -> Result<bool, MinimizerError> {
    for e in d.edges() {
        let smaller = d.delete_edge(e)?;
        if entails_globally(&smaller, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One accepted step of [`minimize`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deletion {
    pub edge: Edge,
    /// Points (indices before the step) dropped as unreachable.
    pub dropped: Vec<usize>,
    /// The diagram after the step, in the text format.
    pub result: String,
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub diagram: Diagram,
    pub log: Vec<Deletion>,
}

/// The diagram after deleting `e`, if the deletion keeps the global sentence
/// equivalent. Deletions that disconnect points are judged on the reachable
/// part, checked in both directions.
fn try_delete(d: &Diagram, e: &Edge) -> Result<Option<(Diagram, Vec<usize>)>, MinimizerError> {
    let smaller = d.delete_edge(e)?;
    if smaller.is_rooted() {
        return Ok(entails_globally(&smaller, d)?.then_some((smaller, vec![])));
    }
    let reach = crate::diagram::paths::reachable_from(smaller.frame(), Diagram::ROOT, None);
    let dropped: Vec<usize> = (0..reach.len()).filter(|&x| !reach[x]).collect();
    let part = smaller.reachable_part();
    let ok = entails_globally(&part, d)? && entails_globally(d, &part)?;
    Ok(ok.then_some((part, dropped)))
}

/// Greedy minimization: scan edges in `(src, dst, label)` order, accept the
/// first deletion that keeps the sentence equivalent, and rescan.
pub fn minimize(d: &Diagram) -> Result<Minimization, MinimizerError> {
    require_rooted(d)?;
    let mut cur = d.clone();
    let mut log = Vec::new();
    'scan: loop {
        let edges: Vec<Edge> = cur.edges().iter().cloned().collect();
        for e in edges {
            if let Some((next, dropped)) = try_delete(&cur, &e)? {
                log.push(Deletion { edge: e, dropped, result: next.to_dsl() });
                cur = next;
                continue 'scan;
            }
        }
        return Ok(Minimization { diagram: cur, log });
    }
}

/// Every diagram reachable as the end of some maximal sequence of accepted
/// deletions, in any order. Exponential; meant for small inputs.
pub fn minimize_all_orders(d: &Diagram, max_edges: usize) -> Result<Vec<Diagram>, MinimizerError> {
    require_rooted(d)?;
    if d.edges().len() > max_edges {
        return Err(MinimizerError::TooManyEdges { edges: d.edges().len(), max: max_edges });
    }
    let mut finals: Vec<Diagram> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut stack = vec![d.clone()];
    while let Some(cur) = stack.pop() {
        if !seen.insert(cur.to_dsl()) {
            continue;
        }
        let mut terminal = true;
        for e in cur.edges() {
            if let Some((next, _)) = try_delete(&cur, e)? {
                terminal = false;
                stack.push(next);
            }
        }
        if terminal {
            finals.push(cur);
        }
    }
    finals.sort_by_key(Diagram::to_dsl);
    Ok(finals)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Class {
    Positive,
    Negative,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Positive => "POSITIVE",
            Class::Negative => "NEGATIVE",
        })
    }
}

/// The ten properties decided together by the verdict.
pub const PROPERTIES: [(&str, &str); 10] = [
    ("I-i", "e(x0) is modally definable by a generalised Sahlqvist formula"),
    ("I-ii", "e(x0) is locally modally definable"),
    ("I-iii", "forall x0 e(x0) is globally modally definable"),
    ("I-iv", "Log(C) is axiomatisable by a generalised Sahlqvist formula"),
    ("I-v", "Log(C) is finitely axiomatisable"),
    ("I-vi", "Log(C) is axiomatisable with finitely many propositional variables"),
    ("I-vii", "Log(C) is axiomatisable by canonical formulas"),
    ("I-viii", "Log(C) is axiomatisable by one formula plus canonical formulas"),
    ("I-ix", "the frames of Log(C) are exactly C"),
    ("I-x", "the frames of Log(C) form an elementary class"),
];

pub const VERDICT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Verdict {
    pub input: Diagram,
    pub minimal_diagram: Diagram,
    pub inner_cycle: bool,
    pub class: Class,
    pub deletions: Vec<Deletion>,
}

impl Verdict {
    /// `(name, holds)` for I-i .. I-x; uniform by construction.
    pub fn property_table(&self) -> Vec<(&'static str, bool)> {
        PROPERTIES.iter().map(|(name, _)| (*name, self.class == Class::Positive)).collect()
    }
}

struct PropertyMap(Vec<(&'static str, bool)>);

impl Serialize for PropertyMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (*k, if *v { "hold" } else { "fail" })))
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            schema_version: u32,
            class: Class,
            inner_cycle: bool,
            minimal: String,
            properties: PropertyMap,
            deletions: &'a [Deletion],
        }
        Out {
            schema_version: VERDICT_SCHEMA_VERSION,
            class: self.class,
            inner_cycle: self.inner_cycle,
            minimal: self.minimal_diagram.to_dsl(),
            properties: PropertyMap(self.property_table()),
            deletions: &self.deletions,
        }
        .serialize(s)
    }
}

/// Minimize, then test the result for an inner cycle.
pub fn classify(d: &Diagram) -> Result<Verdict, MinimizerError> {
    let m = minimize(d)?;
    let inner_cycle = has_inner_cycle(&m.diagram);
    Ok(Verdict {
        input: d.clone(),
        minimal_diagram: m.diagram,
        inner_cycle,
        class: if inner_cycle { Class::Negative } else { Class::Positive },
        deletions: m.log,
    })
}
