//! Two trees with degree difference at most five at every vertex.
//!
//! The driver strips reducible configurations off the graph, runs exchange
//! local search on what is left, and lifts the result back step by step.
//! Small kernels that local search cannot settle are solved exhaustively.

mod classify;
mod discharge;
mod reduction;
mod search;

use std::path::PathBuf;

pub use classify::{classify, is_big, ThreeKind, VertexClass, BIG_DEGREE};
pub use discharge::{discharge_audit, ChargeReport};
pub use reduction::{
    find_case, find_reduction, lift, lift_trace, push_forward, reduce, reduce_to_kernel, CaseKind,
    ReductionCase, ReductionEntry, ReductionTrace,
};
pub use search::{local_search, potential};

use crate::error::{Error, Result};
use crate::graph::{balance_report, imbalance_of, verify_factorization, BalanceReport, Factorization, MultiGraph};
use crate::io::persist_instance;
use crate::oracle::optimal_imbalance_with;
use crate::packing::{pack, PackingResult};

/// Largest imbalance every double tree can be brought down to.
pub const BOUND: u64 = 5;

#[derive(Clone, Debug)]
pub struct Balance2Options {
    /// Kernels with at most this many edges are solved by enumeration when
    /// local search gets stuck.
    pub exhaustive_edge_threshold: usize,
    /// Where stuck instances are written.
    pub persist_dir: Option<PathBuf>,
}

impl Default for Balance2Options {
    fn default() -> Self {
        Self {
            exhaustive_edge_threshold: 12,
            persist_dir: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Balance2Outcome {
    pub factorization: Factorization,
    pub report: BalanceReport,
    pub reductions: usize,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub used_enumeration: bool,
}

pub fn balance_double_tree(g: &MultiGraph) -> Result<(Factorization, BalanceReport)> {
    let out = balance_double_tree_with(g, None, &Balance2Options::default())?;
    Ok((out.factorization, out.report))
}

/// Balances `g`, starting from `start` when given instead of a fresh packing.
pub fn balance_double_tree_with(
    g: &MultiGraph,
    start: Option<&Factorization>,
    opts: &Balance2Options,
) -> Result<Balance2Outcome> {
    let n = g.vertex_count();
    if g.edge_count() != 2 * (n - 1) {
        return Err(Error::NotADoubleTree(format!(
            "{} edges on {n} vertices",
            g.edge_count()
        )));
    }
    let f0 = match start {
        Some(f) => {
            verify_factorization(g, f).into_result()?;
            if f.k != 2 {
                return Err(Error::InvalidFactorization(format!("expected 2 trees, got {}", f.k)));
            }
            f.clone()
        }
        None => match pack(g, 2) {
            PackingResult::Factorization(f) => f,
            PackingResult::Deficiency(d) => return Err(Error::NotADoubleTree(d.to_string())),
        },
    };

    let (trace, kernel, kernel_f) = reduce_to_kernel(g, &f0)?;
    let mut kernel_f = local_search(&kernel, &kernel_f, BOUND);
    let mut used_enumeration = false;
    let stuck = imbalance_of(&kernel_f.degree_table(&kernel));
    if stuck > BOUND {
        let not_certified = |imbalance| Error::BoundNotCertified {
            kernel_edges: kernel.edge_count(),
            imbalance,
            persisted: persist_instance(opts.persist_dir.as_deref(), "kernel-stuck", g, 2),
        };
        if kernel.edge_count() > opts.exhaustive_edge_threshold {
            return Err(not_certified(stuck));
        }
        let best = optimal_imbalance_with(&kernel, 2, opts.exhaustive_edge_threshold)?;
        if best.minimum > BOUND {
            return Err(not_certified(best.minimum));
        }
        kernel_f = best.witness;
        used_enumeration = true;
    }

    let f = lift_trace(&trace, &kernel_f)?;
    let report = balance_report(g, &f)?;
    if report.max_imbalance > BOUND {
        return Err(Error::BoundNotCertified {
            kernel_edges: kernel.edge_count(),
            imbalance: report.max_imbalance,
            persisted: persist_instance(opts.persist_dir.as_deref(), "lift-failed", g, 2),
        });
    }
    Ok(Balance2Outcome {
        factorization: f,
        report,
        reductions: trace.entries.len(),
        kernel_vertices: kernel.vertex_count(),
        kernel_edges: kernel.edge_count(),
        used_enumeration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn double_edge() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let (f, r) = balance_double_tree(&g).unwrap();
        assert!(verify_factorization(&g, &f).is_valid());
        assert_eq!(r.max_imbalance, 0);
    }

    #[test]
    fn k4_reaches_one() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap();
        let (_, r) = balance_double_tree(&g).unwrap();
        assert_eq!(r.max_imbalance, 1);
    }

    #[test]
    fn star_path_is_rebalanced() {
        let mut edges: Vec<(usize, usize)> = (1..=8).map(|v| (0, v)).collect();
        edges.extend((0..8).map(|v| (v, v + 1)));
        let g = build_graph(9, &edges).unwrap();
        let (f, r) = balance_double_tree(&g).unwrap();
        assert!(verify_factorization(&g, &f).is_valid());
        assert!(r.max_imbalance <= BOUND);
    }

    #[test]
    fn rejects_non_double_trees() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(balance_double_tree(&g), Err(Error::NotADoubleTree(_))));
        let g = build_graph(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap();
        assert!(matches!(balance_double_tree(&g), Err(Error::NotADoubleTree(_))));
    }
}
