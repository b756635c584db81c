//! Reachability, distance, spanning trees and undirected cycles.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{Diagram, DiagramError, Edge, Frame, Label};

/// Marks the points reachable from `start` by directed paths, optionally
/// treating `removed` as deleted.
pub(crate) fn reachable_from(f: &Frame, start: usize, removed: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; f.size()];
    if Some(start) == removed {
        return seen;
    }
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in f.any_successors(x) {
            if !seen[y] && Some(y) != removed {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// BFS distances from `start`; `None` marks unreachable points.
pub fn distances_from(f: &Frame, start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; f.size()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].expect("queued points have a distance");
        for y in f.any_successors(x) {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// True iff every point is reachable from `x0`.
pub fn is_rooted(d: &Diagram) -> bool {
    reachable_from(d.frame(), Diagram::ROOT, None).into_iter().all(|r| r)
}

/// Length of the shortest directed path from `y` to `z`, ignoring labels;
/// `None` stands for infinity.
pub fn distance(f: &Frame, y: usize, z: usize) -> Result<Option<usize>, DiagramError> {
    f.check_point(y)?;
    f.check_point(z)?;
    Ok(distances_from(f, y)[z])
}

/// Distance from the root. Requires a rooted diagram.
pub fn rank(d: &Diagram, x: usize) -> Result<usize, DiagramError> {
    d.frame().check_point(x)?;
    ranks(d).map(|r| r[x])
}

/// Ranks of all points of a rooted diagram.
pub fn ranks(d: &Diagram) -> Result<Vec<usize>, DiagramError> {
    distances_from(d.frame(), Diagram::ROOT)
        .into_iter()
        .enumerate()
        .map(|(p, r)| r.ok_or(DiagramError::NotRooted(p)))
        .collect()
}

/// Largest rank in a rooted diagram.
pub fn max_rank(d: &Diagram) -> Result<usize, DiagramError> {
    Ok(ranks(d)?.into_iter().max().unwrap_or(0))
}

/// Points other than `x` all of whose root paths pass through `x`.
pub fn del_set(d: &Diagram, x: usize) -> Result<Vec<usize>, DiagramError> {
    d.frame().check_point(x)?;
    if x == Diagram::ROOT {
        return Err(DiagramError::RootHasNoDelSet);
    }
    if let Some(p) = first_unreachable(d) {
        return Err(DiagramError::NotRooted(p));
    }
    let reach = reachable_from(d.frame(), Diagram::ROOT, Some(x));
    Ok(d.frame().points().filter(|&p| p != x && !reach[p]).collect())
}

fn first_unreachable(d: &Diagram) -> Option<usize> {
    reachable_from(d.frame(), Diagram::ROOT, None).iter().position(|r| !r)
}

/// An oriented spanning tree rooted at `x0`: one parent edge per non-root point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    parent: Vec<Option<Edge>>,
}

impl SpanningTree {
    /// Builds a tree from explicit parent edges (index = child point).
    pub fn from_parents(parent: Vec<Option<Edge>>) -> Self {
        SpanningTree { parent }
    }

    pub fn parent_edge(&self, x: usize) -> Option<&Edge> {
        self.parent.get(x).and_then(Option::as_ref)
    }

    /// Tree edges in `(src, dst, label)` order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.parent.iter().flatten().cloned().collect();
        out.sort();
        out
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.parent_edge(e.dst) == Some(e)
    }

    /// Children of `x` ordered by `(label, child index)`.
    pub fn children(&self, x: usize) -> Vec<(Label, usize)> {
        let mut out: Vec<(Label, usize)> = self
            .parent
            .iter()
            .flatten()
            .filter(|e| e.src == x)
            .map(|e| (e.label.clone(), e.dst))
            .collect();
        out.sort();
        out
    }

    pub fn depth(&self) -> usize {
        (0..self.parent.len()).map(|x| self.depth_of(x)).max().unwrap_or(0)
    }

    /// Number of tree edges between the root and `x`.
    pub fn depth_of(&self, mut x: usize) -> usize {
        let mut d = 0;
        while let Some(e) = self.parent_edge(x) {
            x = e.src;
            d += 1;
            if d > self.parent.len() {
                break;
            }
        }
        d
    }

    /// Checks the tree axioms against `d`: edges are diagram edges, nothing
    /// enters the root, and every non-root point has exactly one root path.
    pub fn is_valid_for(&self, d: &Diagram) -> bool {
        let n = d.point_count();
        if self.parent.len() != n || self.parent[Diagram::ROOT].is_some() {
            return false;
        }
        for (x, p) in self.parent.iter().enumerate().skip(1) {
            match p {
                Some(e) if e.dst == x && d.frame().contains_edge(e) && e.dst != Diagram::ROOT => {}
                _ => return false,
            }
        }
        // Following parents from any point must reach the root without repeating.
        (0..n).all(|x| {
            let mut cur = x;
            for _ in 0..=n {
                match self.parent_edge(cur) {
                    None => return cur == Diagram::ROOT,
                    Some(e) => cur = e.src,
                }
            }
            false
        })
    }
}

/// Deterministic BFS spanning tree: each non-root point takes as parent the
/// least `(src, label)` edge coming from the previous BFS layer.
pub fn spanning_tree(d: &Diagram) -> Result<SpanningTree, DiagramError> {
    let rank = ranks(d)?;
    let mut best: Vec<Option<Edge>> = vec![None; d.point_count()];
    for e in d.edges() {
        if e.dst != Diagram::ROOT && rank[e.src] + 1 == rank[e.dst] {
            let slot = &mut best[e.dst];
            let better = match slot {
                None => true,
                Some(cur) => (e.src, &e.label) < (cur.src, &cur.label),
            };
            if better {
                *slot = Some(e.clone());
            }
        }
    }
    Ok(SpanningTree { parent: best })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn inner_edges(d: &Diagram) -> impl Iterator<Item = &Edge> + '_ {
    d.edges().iter().filter(|e| e.src != Diagram::ROOT && e.dst != Diagram::ROOT)
}

/// True iff the multigraph of edge identities among non-root points is not a
/// forest, i.e. some undirected cycle avoids the root.
pub fn has_inner_cycle(d: &Diagram) -> bool {
    let mut uf = UnionFind::new(d.point_count());
    inner_edges(d).any(|e| e.src == e.dst || !uf.union(e.src, e.dst))
}

/// Edges among non-root points that lie on some inner cycle: loops, and edges
/// whose endpoints stay connected once that edge identity is removed.
pub fn inner_cycle_edges(d: &Diagram) -> Vec<Edge> {
    let inner: Vec<&Edge> = inner_edges(d).collect();
    inner
        .iter()
        .filter(|e| {
            if e.src == e.dst {
                return true;
            }
            let mut uf = UnionFind::new(d.point_count());
            for other in inner.iter().filter(|o| **o != **e) {
                uf.union(other.src, other.dst);
            }
            uf.find(e.src) == uf.find(e.dst)
        })
        .map(|e| (*e).clone())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One step of an undirected path: forward along an edge, or backward along
/// its converse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UndirectedStep {
    pub from: usize,
    pub to: usize,
    pub label: Label,
    pub direction: Direction,
}

impl UndirectedStep {
    /// The frame edge this step traverses.
    pub fn edge(&self) -> Edge {
        match self.direction {
            Direction::Forward => Edge::new(self.from, self.to, self.label.clone()),
            Direction::Backward => Edge::new(self.to, self.from, self.label.clone()),
        }
    }
}

/// Shortest undirected path from `y` to `z` whose points other than the
/// endpoints avoid `avoid`. Returns the empty path when `y == z`.
pub fn undirected_path(
    f: &Frame,
    y: usize,
    z: usize,
    avoid: &[usize],
) -> Result<Option<Vec<UndirectedStep>>, DiagramError> {
    f.check_point(y)?;
    f.check_point(z)?;
    if y == z {
        return Ok(Some(Vec::new()));
    }
    let blocked = |p: usize| p != y && p != z && avoid.contains(&p);
    // Adjacency in Lambda^{+-}: (neighbour, label, direction), deterministic order.
    let mut adj: BTreeMap<usize, Vec<(usize, Label, Direction)>> = BTreeMap::new();
    for e in f.edges() {
        adj.entry(e.src).or_default().push((e.dst, e.label.clone(), Direction::Forward));
        adj.entry(e.dst).or_default().push((e.src, e.label.clone(), Direction::Backward));
    }
    adj.values_mut().for_each(|v| v.sort());
    let mut prev: Vec<Option<UndirectedStep>> = vec![None; f.size()];
    let mut seen = vec![false; f.size()];
    seen[y] = true;
    let mut queue = VecDeque::from([y]);
    while let Some(x) = queue.pop_front() {
        if x == z {
            break;
        }
        for (w, label, dir) in adj.get(&x).into_iter().flatten() {
            if seen[*w] || blocked(*w) {
                continue;
            }
            seen[*w] = true;
            prev[*w] = Some(UndirectedStep { from: x, to: *w, label: label.clone(), direction: *dir });
            queue.push_back(*w);
        }
    }
    if !seen[z] {
        return Ok(None);
    }
    let mut steps = Vec::new();
    let mut cur = z;
    while cur != y {
        let step = prev[cur].clone().expect("visited points have a predecessor step");
        cur = step.from;
        steps.push(step);
    }
    steps.reverse();
    Ok(Some(steps))
}
