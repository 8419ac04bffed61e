//! Generalized Milnor invariants of cut-diagrams.

pub mod cdj;
pub mod chen;
pub mod diagram;
pub mod gauss;
mod int;
pub mod lattice;
pub mod magnus;
pub mod milnor;
pub mod presentation;
pub mod spun;
pub mod suite;
pub mod word;
