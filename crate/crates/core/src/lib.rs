//! Degree-balanced spanning tree factorizations of multigraphs.
//!
//! A `k`-multiple tree is a multigraph whose edges split into `k` spanning
//! trees. This crate packs such a split ([`packing`]), rebalances two trees
//! so that every vertex has degree difference at most five ([`balance2`]),
//! and extends that to `k` trees with per-tree deviation bounded by an exact
//! rational schedule ([`balancek`]). An exhaustive [`oracle`] cross-checks
//! everything on small instances.

pub mod balance2;
pub mod balancek;
pub mod error;
pub mod exchange;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod packing;
pub mod rat;

pub use error::{Error, Result};
pub use graph::{
    balance_report, build_graph, fundamental_cut, fundamental_cycle, verify_factorization,
    BalanceReport, EdgeId, Factorization, FactorizationCheck, MultiGraph, Vertex, Violation,
};
pub use packing::{is_k_multiple_tree, pack, Deficiency, PackingResult};
