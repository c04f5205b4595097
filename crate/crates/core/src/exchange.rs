//! Single-edge exchanges between two trees of a factorization.
//!
//! For `e` in tree `i`, an edge `f` of tree `j` is a valid partner iff `f`
//! crosses the cut of `e` in tree `i` and lies on the path of tree `j`
//! between the endpoints of `e`. The tree-mapping edge of `e` is the
//! smallest such partner; it is computed per edge, not as one global map.

use crate::error::{Error, Result};
use crate::graph::{verify_factorization, EdgeId, Factorization, MultiGraph, RootedTree, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwapMove {
    /// Tree currently holding `e`.
    pub source: usize,
    /// Tree currently holding `f`.
    pub target: usize,
    pub e: EdgeId,
    pub f: EdgeId,
}

/// Rooted views of two trees of a valid factorization.
pub struct TreePair {
    pub i: usize,
    pub j: usize,
    ti: RootedTree,
    tj: RootedTree,
}

impl TreePair {
    pub fn new(g: &MultiGraph, fac: &Factorization, i: usize, j: usize) -> Result<Self> {
        Ok(Self {
            i,
            j,
            ti: RootedTree::new(g, &fac.tree(i))?,
            tj: RootedTree::new(g, &fac.tree(j))?,
        })
    }

    /// Every `f` in tree `j` that can trade places with `e` from tree `i`, sorted.
    pub fn partners(&self, g: &MultiGraph, e: EdgeId) -> Vec<EdgeId> {
        let (u, v) = g.endpoints(e);
        let mut out: Vec<EdgeId> = self
            .tj
            .path(u, v)
            .into_iter()
            .filter(|&f| self.ti.crosses_cut(g, e, f))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn tree_i(&self) -> &RootedTree {
        &self.ti
    }

    pub fn tree_j(&self) -> &RootedTree {
        &self.tj
    }
}

/// Smallest-id edge of tree `j` whose swap with `e` keeps both trees spanning.
pub fn tree_mapping_edge(
    g: &MultiGraph,
    fac: &Factorization,
    i: usize,
    j: usize,
    e: EdgeId,
) -> Result<EdgeId> {
    verify_factorization(g, fac).into_result()?;
    if i == j || i >= fac.k || j >= fac.k {
        return Err(Error::InvalidFactorization(format!(
            "tree indices {i} and {j} must be distinct and below {}",
            fac.k
        )));
    }
    if fac.assignment.get(e) != Some(&i) {
        return Err(Error::EdgeNotInTree { edge: e, tree: i });
    }
    let pair = TreePair::new(g, fac, i, j)?;
    let partners = pair.partners(g, e);
    // the path in tree j between e's endpoints must cross e's cut in tree i
    Ok(*partners
        .first()
        .expect("a spanning-tree path always crosses the cut"))
}

pub fn apply_swap(g: &MultiGraph, fac: &Factorization, mv: SwapMove) -> Result<Factorization> {
    let invalid = Error::InvalidSwap { e: mv.e, f: mv.f };
    if fac.assignment.get(mv.e) != Some(&mv.source)
        || fac.assignment.get(mv.f) != Some(&mv.target)
        || mv.source == mv.target
    {
        return Err(invalid);
    }
    let mut out = fac.clone();
    out.assignment[mv.e] = mv.target;
    out.assignment[mv.f] = mv.source;
    if verify_factorization(g, &out).is_valid() {
        Ok(out)
    } else {
        Err(invalid)
    }
}

/// Swaps `e` with its tree-mapping edge.
pub fn sigma_swap(
    g: &MultiGraph,
    fac: &Factorization,
    i: usize,
    j: usize,
    e: EdgeId,
) -> Result<(Factorization, EdgeId)> {
    let f = tree_mapping_edge(g, fac, i, j, e)?;
    let out = apply_swap(
        g,
        fac,
        SwapMove {
            source: i,
            target: j,
            e,
            f,
        },
    )?;
    Ok((out, f))
}

/// The edge of a 3-vertex lying in the tree where it has degree one.
pub fn special_edge(g: &MultiGraph, fac: &Factorization, v: Vertex) -> Result<(EdgeId, usize)> {
    if g.degree(v) != 3 {
        return Err(Error::NotDegreeThree(v));
    }
    special_edge_unchecked(g, fac, v)
}

pub(crate) fn special_edge_unchecked(
    g: &MultiGraph,
    fac: &Factorization,
    v: Vertex,
) -> Result<(EdgeId, usize)> {
    let inc = g.incident(v);
    for &e in inc {
        let t = fac.assignment[e];
        if inc.iter().filter(|&&x| fac.assignment[x] == t).count() == 1 {
            return Ok((e, t));
        }
    }
    Err(Error::InvalidFactorization(format!(
        "vertex {v} has no tree of degree one"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    const A: EdgeId = 0;
    const B: EdgeId = 1;
    const C: EdgeId = 2;
    const D: EdgeId = 3;

    /// x=0, y=1, z=2; a=xy, b=xz, c=yz, d=xy'; T0={a,b}, T1={c,d}
    fn tpp() -> (MultiGraph, Factorization) {
        let g = build_graph(3, &[(0, 1), (0, 2), (1, 2), (0, 1)]).unwrap();
        (g, Factorization::new(2, vec![0, 0, 1, 1]))
    }

    #[test]
    fn sigma_examples() {
        let (g, f) = tpp();
        assert_eq!(tree_mapping_edge(&g, &f, 0, 1, A).unwrap(), D);
        assert_eq!(tree_mapping_edge(&g, &f, 0, 1, B).unwrap(), C);

        let g2 = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let f2 = Factorization::new(2, vec![0, 1]);
        assert_eq!(tree_mapping_edge(&g2, &f2, 0, 1, 0).unwrap(), 1);
    }

    #[test]
    fn sigma_errors() {
        let (g, f) = tpp();
        assert!(matches!(
            tree_mapping_edge(&g, &f, 0, 1, C),
            Err(Error::EdgeNotInTree { edge: C, tree: 0 })
        ));
        let broken = Factorization::new(2, vec![0, 1, 1, 0]);
        assert!(matches!(
            tree_mapping_edge(&g, &broken, 0, 1, A),
            Err(Error::InvalidFactorization(_))
        ));
    }

    #[test]
    fn swap_examples() {
        let (g, f) = tpp();
        let out = apply_swap(&g, &f, SwapMove { source: 0, target: 1, e: A, f: D }).unwrap();
        assert_eq!(out.tree(0), vec![B, D]);
        assert_eq!(out.tree(1), vec![A, C]);

        let g2 = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let out = apply_swap(
            &g2,
            &Factorization::new(2, vec![0, 1]),
            SwapMove { source: 0, target: 1, e: 0, f: 1 },
        )
        .unwrap();
        assert_eq!(out.assignment, vec![1, 0]);

        assert!(matches!(
            apply_swap(&g, &f, SwapMove { source: 0, target: 1, e: A, f: C }),
            Err(Error::InvalidSwap { e: A, f: C })
        ));
    }

    #[test]
    fn special_edge_examples() {
        let (g, f) = tpp();
        assert_eq!(special_edge(&g, &f, 1).unwrap(), (A, 0));
        assert_eq!(special_edge(&g, &f, 0).unwrap(), (D, 1));
        assert!(matches!(special_edge(&g, &f, 2), Err(Error::NotDegreeThree(2))));

        let k4 = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap();
        let f = Factorization::new(2, vec![0, 0, 0, 1, 1, 1]);
        let table = f.degree_table(&k4);
        for v in 0..4 {
            let (e, t) = special_edge(&k4, &f, v).unwrap();
            assert_eq!(table[v][t], 1);
            assert!(k4.is_incident(e, v));
        }
    }

    #[test]
    fn partners_are_exactly_valid_swaps() {
        let (g, f) = tpp();
        let pair = TreePair::new(&g, &f, 0, 1).unwrap();
        for e in f.tree(0) {
            let partners = pair.partners(&g, e);
            for cand in f.tree(1) {
                let ok = apply_swap(&g, &f, SwapMove { source: 0, target: 1, e, f: cand }).is_ok();
                assert_eq!(ok, partners.contains(&cand), "e={e} f={cand}");
            }
        }
    }
}
