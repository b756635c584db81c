//! Labelled frames and diagrams.
//!
//! A [`Frame`] is a finite set of points `0..size` with one binary relation per
//! [`Label`]. A [`Diagram`] is a frame whose root is always point `0`; it stands
//! for the first-order formula `exists x1..xn. /\ xi R_l xj` with `x0` free.
//! Rootedness is a predicate ([`Diagram::is_rooted`]), not a construction
//! invariant, because edge deletion can break it.

pub mod dsl;
pub mod paths;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dsl::{parse_diagram, parse_frame, parse_graph, ParseError, ParseWarning, Parsed};
pub use paths::{Direction, SpanningTree, UndirectedStep};

/// An element of the modality alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self, DiagramError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Label(name))
        } else {
            Err(DiagramError::BadLabel(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A labelled edge `src -label-> dst`. Ordered by `(src, dst, label)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Label,
}

impl Edge {
    pub fn new(src: usize, dst: usize, label: Label) -> Self {
        Edge { src, dst, label }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.src, self.dst, self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("label `{0}` is not an identifier")]
    BadLabel(String),
    #[error("edge {edge} has an endpoint outside 0..{size}")]
    EndpointOutOfRange { edge: Edge, size: usize },
    #[error("a diagram needs at least one point")]
    Empty,
    #[error("edge {0} is not present")]
    MissingEdge(Edge),
    #[error("diagram is not rooted: point {0} is unreachable from x0")]
    NotRooted(usize),
    #[error("the root x0 has no Del set")]
    RootHasNoDelSet,
    #[error("point {point} is outside 0..{size}")]
    PointOutOfRange { point: usize, size: usize },
}

/// One relation `R_l` of a frame, stored both as adjacency lists and as a
/// dense membership matrix.
#[derive(Clone, Debug)]
pub struct Relation {
    size: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl Relation {
    fn empty(size: usize) -> Self {
        Relation {
            size,
            succ: vec![Vec::new(); size],
            pred: vec![Vec::new(); size],
            matrix: vec![false; size * size],
        }
    }

    fn insert(&mut self, src: usize, dst: usize) {
        let slot = &mut self.matrix[src * self.size + dst];
        if !*slot {
            *slot = true;
            self.succ[src].push(dst);
            self.pred[dst].push(src);
        }
    }

    fn sort(&mut self) {
        self.succ.iter_mut().for_each(|v| v.sort_unstable());
        self.pred.iter_mut().for_each(|v| v.sort_unstable());
    }

    #[inline]
    pub fn contains(&self, src: usize, dst: usize) -> bool {
        self.matrix[src * self.size + dst]
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn predecessors(&self, x: usize) -> &[usize] {
        &self.pred[x]
    }
}

/// A finite Kripke frame over points `0..size`.
#[derive(Clone, Debug)]
pub struct Frame {
    size: usize,
    edges: BTreeSet<Edge>,
    relations: BTreeMap<Label, Relation>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.edges == other.edges
    }
}

impl Eq for Frame {}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Frame", 2)?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

impl Frame {
    pub fn new(size: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, DiagramError> {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        if let Some(edge) = edges.iter().find(|e| e.src >= size || e.dst >= size) {
            return Err(DiagramError::EndpointOutOfRange { edge: edge.clone(), size });
        }
        let mut relations: BTreeMap<Label, Relation> = BTreeMap::new();
        for e in &edges {
            relations
                .entry(e.label.clone())
                .or_insert_with(|| Relation::empty(size))
                .insert(e.src, e.dst);
        }
        relations.values_mut().for_each(Relation::sort);
        Ok(Frame { size, edges, relations })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Labels that occur on at least one edge, in sorted order.
    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.relations.keys()
    }

    pub fn relation(&self, label: &Label) -> Option<&Relation> {
        self.relations.get(label)
    }

    pub fn has_edge(&self, src: usize, dst: usize, label: &Label) -> bool {
        src < self.size
            && dst < self.size
            && self.relations.get(label).is_some_and(|r| r.contains(src, dst))
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.has_edge(e.src, e.dst, &e.label)
    }

    /// Successors of `x` along `label`, sorted.
    pub fn successors<'a>(&'a self, x: usize, label: &Label) -> &'a [usize] {
        self.relations.get(label).map_or(&[], |r| r.successors(x))
    }

    /// Predecessors of `x` along `label`, sorted.
    pub fn predecessors<'a>(&'a self, x: usize, label: &Label) -> &'a [usize] {
        self.relations.get(label).map_or(&[], |r| r.predecessors(x))
    }

    /// Successors of `x` along any label, sorted and deduplicated.
    pub fn any_successors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.relations.values().flat_map(|r| r.successors(x).iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges leaving `x`, in `(dst, label)` order.
    pub fn out_edges(&self, x: usize) -> impl Iterator<Item = &Edge> + '_ {
        let lo = Edge { src: x, dst: 0, label: Label(String::new()) };
        self.edges.range(lo..).take_while(move |e| e.src == x)
    }

    pub fn without_edge(&self, e: &Edge) -> Result<Frame, DiagramError> {
        if !self.edges.contains(e) {
            return Err(DiagramError::MissingEdge(e.clone()));
        }
        Frame::new(self.size, self.edges.iter().filter(|x| *x != e).cloned())
    }

    pub fn with_edge(&self, e: Edge) -> Result<Frame, DiagramError> {
        Frame::new(self.size, self.edges.iter().cloned().chain(std::iter::once(e)))
    }

    /// The sub-frame on `keep` (given in ascending order), renumbered
    /// consecutively in that order.
    pub fn restrict(&self, keep: &[usize]) -> Frame {
        let mut index = vec![usize::MAX; self.size];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.src] != usize::MAX && index[e.dst] != usize::MAX)
            .map(|e| Edge::new(index[e.src], index[e.dst], e.label.clone()));
        Frame::new(keep.len(), edges).expect("restriction stays in range")
    }

    pub(crate) fn check_point(&self, point: usize) -> Result<(), DiagramError> {
        if point < self.size {
            Ok(())
        } else {
            Err(DiagramError::PointOutOfRange { point, size: self.size })
        }
    }
}

/// A pointed finite frame with root `x0` = point `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    frame: Frame,
}

impl Diagram {
    pub const ROOT: usize = 0;

    pub fn new(point_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, DiagramError> {
        if point_count == 0 {
            return Err(DiagramError::Empty);
        }
        Ok(Diagram { frame: Frame::new(point_count, edges)? })
    }

    pub fn from_frame(frame: Frame) -> Result<Self, DiagramError> {
        if frame.size() == 0 {
            return Err(DiagramError::Empty);
        }
        Ok(Diagram { frame })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn into_frame(self) -> Frame {
        self.frame
    }

    pub fn point_count(&self) -> usize {
        self.frame.size()
    }

    /// Index of the last point, i.e. the `n` in `x0..xn`.
    pub fn n(&self) -> usize {
        self.frame.size() - 1
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        self.frame.edges()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.frame.labels()
    }

    pub fn has_edge(&self, src: usize, dst: usize, label: &Label) -> bool {
        self.frame.has_edge(src, dst, label)
    }

    pub fn is_rooted(&self) -> bool {
        paths::is_rooted(self)
    }

    pub fn delete_edge(&self, e: &Edge) -> Result<Diagram, DiagramError> {
        Ok(Diagram { frame: self.frame.without_edge(e)? })
    }

    pub fn add_edge(&self, e: Edge) -> Result<Diagram, DiagramError> {
        Ok(Diagram { frame: self.frame.with_edge(e)? })
    }

    /// The sub-diagram on the points reachable from the root, renumbered in
    /// index order (so the root stays `0`).
    pub fn reachable_part(&self) -> Diagram {
        let reach = paths::reachable_from(&self.frame, Self::ROOT, None);
        let keep: Vec<usize> = self.frame.points().filter(|&p| reach[p]).collect();
        Diagram { frame: self.frame.restrict(&keep) }
    }

    /// Renders the diagram in the text DSL accepted by [`parse_diagram`].
    pub fn to_dsl(&self) -> String {
        let mut out = format!("points {}\n", self.point_count());
        for e in self.edges() {
            out.push_str(&format!("edge x{} -{}-> x{}\n", e.src, e.label, e.dst));
        }
        out
    }
}

/// Shorthand used throughout tests and fixtures.
pub fn edge(src: usize, dst: usize, label: &str) -> Edge {
    Edge::new(src, dst, Label::new(label).expect("valid label"))
}
