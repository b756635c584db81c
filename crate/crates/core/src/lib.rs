//! Diagrams, modal axioms, frame constructions and model checking for
//! logics axiomatised by forall-exists-conjunctive frame conditions.

pub mod catalog;
pub mod constructions;
pub mod diagram;
pub mod dot;
pub mod formula;
pub mod minimizer;
pub mod semantics;
pub mod verify;
