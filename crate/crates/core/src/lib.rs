//! Commutation graphs of finite rings.
//!
//! Vertices are ring elements; `cd` and `dc` are joined whenever they differ.
//! The crate builds the graph for rings given by a short textual spec
//! (`Z(12)`, `GF(2^2)`, `M(3,GF(2))`, products with `x`), computes
//! commutative closures, distances, diameters and girth, and checks the
//! structure of nilpotent and matrix classes against independent oracles.

pub mod analytics;
pub mod cache;
pub mod closure;
pub mod error;
pub mod export;
pub mod identities;
pub mod linalg;
pub mod ring;
pub mod verify;

pub use closure::{
    build_commutation_graph, build_commutation_graph_with, ClosureResult, CommutationGraph, GraphOptions,
};
pub use error::{Error, Result};
pub use ring::{parse_ring_spec, ElementId, MatrixRep, RingDescriptor, RingHandle};
