//! Frame constructions built from a diagram: the rank-one frames, their
//! pseudoproducts with graphs, and the colouring experiments.

pub mod colouring;
pub mod graph;
pub mod pseudo;
pub mod rank1;

use thiserror::Error;

use crate::diagram::{DiagramError, Edge};
use crate::minimizer::MinimizerError;

pub use colouring::{
    c1_sample_check, c2_check, refuted_index, refuting_valuation, verify_complete1, C1Report, C2Report, Complete1Row,
};
pub use graph::{
    check_edge_lifting, chromatic_number, complete_graph, find_colouring, mycielski, Colouring, Graph, GraphError,
    DEFAULT_CHROMATIC_BUDGET,
};
pub use pseudo::{dagger, dagger_relation, dagger_valuation, is_isomorphism, isomorphism_to_f_minus, lift_vertex_map, pseudoproduct, Pseudoproduct};
pub use rank1::{
    build_bundle, build_f_plus, build_naive, build_naive_bundle, select_edge, select_edge_and_build_f_minus,
    verify_rank1, ConditionCheck, ConstructionBundle, Rank1Report,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("diagram is not rooted: x{0} is unreachable from x0")]
    NotRooted(usize),
    #[error("diagram is not globally minimal")]
    NotMinimal,
    #[error("diagram has no inner cycle")]
    NoInnerCycle,
    #[error("no edge has been selected for removal")]
    NoSelectedEdge,
    #[error("colouring is not proper for the graph or uses too many colours")]
    BadColouring,
    #[error("five-clause and projection definitions disagree on {edge} (present in the clause version: {in_clauses})")]
    Disagreement { edge: Edge, in_clauses: bool },
    #[error(transparent)]
    Minimizer(#[from] MinimizerError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
