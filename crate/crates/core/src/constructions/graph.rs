//! Undirected graphs, exact colouring and the edge-lifting predicate.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex v{vertex} is outside a graph of {size} vertices")]
    VertexOutOfRange { vertex: usize, size: usize },
    #[error("exact colouring is limited to {max} vertices; the graph has {size}")]
    BudgetExceeded { size: usize, max: usize },
}

/// Default vertex limit for exact chromatic numbers.
pub const DEFAULT_CHROMATIC_BUDGET: usize = 12;

/// A finite graph with a symmetric edge relation; loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut adj = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, size: n });
                }
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(Graph { adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adj.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(&b))
    }

    pub fn neighbours(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_loop(&self) -> bool {
        self.vertices().any(|v| self.adjacent(v, v))
    }

    /// Edges `(a, b)` with `a <= b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices()
            .flat_map(|a| self.adj[a].iter().filter(move |&&b| a <= b).map(move |&b| (a, b)))
            .collect()
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("in range")
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|a| (a, (a + 1) % n))).expect("in range")
    }

    /// Vertices of `self` first, then those of `other` shifted by `|self|`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let k = self.vertex_count();
        let edges = self.edges().into_iter().chain(other.edges().into_iter().map(|(a, b)| (a + k, b + k)));
        Graph::new(k + other.vertex_count(), edges).expect("in range")
    }

    /// Mycielskian: vertices `v`, shadows `n + v`, and apex `2n`; each shadow
    /// is joined to the neighbours of its original and to the apex.
    pub fn mycielski(&self) -> Graph {
        let n = self.vertex_count();
        let mut edges = self.edges();
        for (a, b) in self.edges() {
            edges.push((a, n + b));
            edges.push((b, n + a));
        }
        edges.extend((0..n).map(|v| (n + v, 2 * n)));
        Graph::new(2 * n + 1, edges).expect("in range")
    }

    pub fn to_dsl(&self) -> String {
        let mut out = format!("graph {}\n", self.vertex_count());
        for (a, b) in self.edges() {
            out.push_str(&format!("edge v{a} -- v{b}\n"));
        }
        out
    }
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::complete(n)
}

pub fn mycielski(g: &Graph) -> Graph {
    g.mycielski()
}

/// Vertex colours in `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Colouring {
    colours: Vec<usize>,
}

impl Colouring {
    pub fn new(colours: Vec<usize>) -> Self {
        Colouring { colours }
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    /// Largest colour used.
    pub fn count(&self) -> usize {
        self.colours.iter().copied().max().unwrap_or(0)
    }

    pub fn is_proper_for(&self, g: &Graph) -> bool {
        self.colours.len() == g.vertex_count()
            && self.colours.iter().all(|&c| c >= 1)
            && g.edges().iter().all(|&(a, b)| self.colours[a] != self.colours[b])
    }
}

/// A proper colouring with at most `n` colours, by backtracking in vertex
/// order with symmetry breaking on fresh colours.
pub fn find_colouring(g: &Graph, n: usize) -> Option<Colouring> {
    if g.has_loop() {
        return None;
    }
    fn go(g: &Graph, n: usize, v: usize, used: usize, col: &mut Vec<usize>) -> bool {
        if v == g.vertex_count() {
            return true;
        }
        for c in 1..=n.min(used + 1) {
            if g.neighbours(v).iter().all(|&u| u >= v || col[u] != c) {
                col[v] = c;
                if go(g, n, v + 1, used.max(c), col) {
                    return true;
                }
            }
        }
        col[v] = 0;
        false
    }
    let mut col = vec![0; g.vertex_count()];
    go(g, n, 0, 0, &mut col).then(|| Colouring::new(col))
}

/// Least `N` with a proper `N`-colouring; `None` when a loop rules out every
/// colouring.
pub fn chromatic_number(g: &Graph, max_vertices: usize) -> Result<Option<usize>, GraphError> {
    if g.vertex_count() > max_vertices {
        return Err(GraphError::BudgetExceeded { size: g.vertex_count(), max: max_vertices });
    }
    if g.has_loop() {
        return Ok(None);
    }
    Ok((0..=g.vertex_count()).find(|&n| find_colouring(g, n).is_some()))
}

/// `rho: hi -> lo` is a surjective homomorphism and every edge `{x, y}` of
/// `lo` lifts from every `x' in rho^-1(x)` to some `y' in rho^-1(y)`.
pub fn check_edge_lifting(hi: &Graph, lo: &Graph, rho: &[usize]) -> bool {
    if rho.len() != hi.vertex_count() || rho.iter().any(|&v| v >= lo.vertex_count()) {
        return false;
    }
    let hom = hi.edges().iter().all(|&(a, b)| lo.adjacent(rho[a], rho[b]));
    let onto = lo.vertices().all(|v| rho.contains(&v));
    let lifts = lo.edges().iter().all(|&(x, y)| {
        [(x, y), (y, x)].iter().all(|&(x, y)| {
            hi.vertices()
                .filter(|&x2| rho[x2] == x)
                .all(|x2| hi.neighbours(x2).iter().any(|&y2| rho[y2] == y))
        })
    });
    hom && onto && lifts
}
