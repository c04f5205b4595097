//! Packing `k` edge-disjoint spanning trees that cover every edge.
//!
//! Edges are inserted one at a time into `k` forests. When an edge fits in no
//! forest directly, a breadth-first search over the exchange graph looks for
//! the shortest sequence of displacements ending in a forest with room. If
//! none exists, the searched edges span a vertex set that carries more than
//! `k(|X| - 1)` edges, which no union of `k` forests can hold.

use std::collections::VecDeque;

use crate::graph::{EdgeId, Factorization, MultiGraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deficiency {
    /// A `k`-multiple tree on `n` vertices has exactly `k(n-1)` edges.
    EdgeCount { expected: usize, actual: usize },
    /// `vertices` induce `induced_edges > capacity = k(|X|-1)` edges.
    Overfull {
        vertices: Vec<Vertex>,
        induced_edges: usize,
        capacity: usize,
    },
}

impl std::fmt::Display for Deficiency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Deficiency::EdgeCount { expected, actual } => {
                write!(f, "edge count {actual} differs from k(n-1) = {expected}")
            }
            Deficiency::Overfull {
                vertices,
                induced_edges,
                capacity,
            } => write!(
                f,
                "{} vertices induce {induced_edges} edges but {capacity} fit in k forests",
                vertices.len()
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackingResult {
    Factorization(Factorization),
    Deficiency(Deficiency),
}

impl PackingResult {
    pub fn factorization(self) -> Option<Factorization> {
        match self {
            PackingResult::Factorization(f) => Some(f),
            PackingResult::Deficiency(_) => None,
        }
    }
}

/// Parent pointers for one forest, rebuilt whenever the forest changes.
struct ForestIndex {
    parent: Vec<Option<(Vertex, EdgeId)>>,
    depth: Vec<usize>,
    root: Vec<Vertex>,
}

impl ForestIndex {
    fn build(g: &MultiGraph, assignment: &[Option<usize>], forest: usize) -> Self {
        let n = g.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut root = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if root[s] != usize::MAX {
                continue;
            }
            root[s] = s;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &e in g.incident(v) {
                    if assignment[e] != Some(forest) {
                        continue;
                    }
                    let w = g.other_end(e, v);
                    if root[w] == usize::MAX {
                        root[w] = s;
                        parent[w] = Some((v, e));
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        Self {
            parent,
            depth,
            root,
        }
    }

    fn connected(&self, u: Vertex, v: Vertex) -> bool {
        self.root[u] == self.root[v]
    }

    fn path(&self, mut u: Vertex, mut v: Vertex) -> Vec<EdgeId> {
        let mut out = Vec::new();
        while self.depth[u] > self.depth[v] {
            let (p, e) = self.parent[u].unwrap();
            out.push(e);
            u = p;
        }
        while self.depth[v] > self.depth[u] {
            let (p, e) = self.parent[v].unwrap();
            out.push(e);
            v = p;
        }
        while u != v {
            let (pu, eu) = self.parent[u].unwrap();
            let (pv, ev) = self.parent[v].unwrap();
            out.push(eu);
            out.push(ev);
            u = pu;
            v = pv;
        }
        out.sort_unstable();
        out
    }
}

/// Packs `g` into `k` spanning trees, or explains why that is impossible.
/// Deterministic in `g` and `k`.
pub fn pack(g: &MultiGraph, k: usize) -> PackingResult {
    let n = g.vertex_count();
    let m = g.edge_count();
    let expected = k * (n - 1);
    if m != expected {
        return PackingResult::Deficiency(Deficiency::EdgeCount {
            expected,
            actual: m,
        });
    }
    let mut assignment: Vec<Option<usize>> = vec![None; m];
    let mut forests: Vec<ForestIndex> = (0..k)
        .map(|i| ForestIndex::build(g, &assignment, i))
        .collect();

    for e in 0..m {
        let (u, v) = g.endpoints(e);
        if let Some(i) = (0..k).find(|&i| !forests[i].connected(u, v)) {
            assignment[e] = Some(i);
            forests[i] = ForestIndex::build(g, &assignment, i);
            continue;
        }
        match augment(g, k, &forests, &assignment, e) {
            Ok(changes) => {
                let mut touched = vec![false; k];
                for (edge, forest) in changes {
                    assignment[edge] = Some(forest);
                    touched[forest] = true;
                }
                for (i, t) in touched.into_iter().enumerate() {
                    if t {
                        forests[i] = ForestIndex::build(g, &assignment, i);
                    }
                }
            }
            Err(reached) => return PackingResult::Deficiency(overfull_witness(g, k, &reached)),
        }
    }

    let assignment = assignment.into_iter().map(Option::unwrap).collect();
    PackingResult::Factorization(Factorization::new(k, assignment))
}

/// Shortest augmenting sequence for `start`. On success returns the new
/// forest of every edge that moves; on failure returns the searched edges.
fn augment(
    g: &MultiGraph,
    k: usize,
    forests: &[ForestIndex],
    assignment: &[Option<usize>],
    start: EdgeId,
) -> Result<Vec<(EdgeId, usize)>, Vec<EdgeId>> {
    let m = g.edge_count();
    // pred[x] = (y, i): y enters forest i in place of x
    let mut pred: Vec<Option<(EdgeId, usize)>> = vec![None; m];
    let mut visited = vec![false; m];
    visited[start] = true;
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(y) = queue.pop_front() {
        let (a, b) = g.endpoints(y);
        for i in 0..k {
            if assignment[y] == Some(i) {
                continue;
            }
            if !forests[i].connected(a, b) {
                let mut changes = vec![(y, i)];
                let mut cur = y;
                while let Some((prev, forest)) = pred[cur] {
                    changes.push((prev, forest));
                    cur = prev;
                }
                return Ok(changes);
            }
            for x in forests[i].path(a, b) {
                if !visited[x] {
                    visited[x] = true;
                    pred[x] = Some((y, i));
                    order.push(x);
                    queue.push_back(x);
                }
            }
        }
    }
    Err(order)
}

fn overfull_witness(g: &MultiGraph, k: usize, reached: &[EdgeId]) -> Deficiency {
    let mut inside = vec![false; g.vertex_count()];
    for &e in reached {
        let (u, v) = g.endpoints(e);
        inside[u] = true;
        inside[v] = true;
    }
    let vertices: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| inside[v]).collect();
    let induced_edges = g
        .edges()
        .iter()
        .filter(|&&(u, v)| inside[u] && inside[v])
        .count();
    Deficiency::Overfull {
        capacity: k * (vertices.len() - 1),
        vertices,
        induced_edges,
    }
}

pub fn is_k_multiple_tree(g: &MultiGraph, k: usize) -> bool {
    matches!(pack(g, k), PackingResult::Factorization(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, verify_factorization};

    fn k4() -> MultiGraph {
        build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap()
    }

    #[test]
    fn double_edge_packs() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let f = pack(&g, 2).factorization().unwrap();
        assert_eq!(f.assignment, vec![0, 1]);
    }

    #[test]
    fn k4_packs_into_two_trees() {
        let g = k4();
        let f = pack(&g, 2).factorization().unwrap();
        assert!(verify_factorization(&g, &f).is_valid());
        assert!(is_k_multiple_tree(&g, 2));
        assert!(!is_k_multiple_tree(&g, 3));
    }

    #[test]
    fn path_has_wrong_edge_count() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            pack(&g, 2),
            PackingResult::Deficiency(Deficiency::EdgeCount {
                expected: 4,
                actual: 2
            })
        );
    }

    #[test]
    fn overfull_witness_is_dense() {
        // a triple edge between 0 and 1 plus a pendant path: m = 4 = 2(3-1)
        let g = build_graph(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap();
        match pack(&g, 2) {
            PackingResult::Deficiency(Deficiency::Overfull {
                vertices,
                induced_edges,
                capacity,
            }) => {
                assert_eq!(vertices, vec![0, 1]);
                assert!(induced_edges > capacity);
            }
            other => panic!("expected overfull witness, got {other:?}"),
        }
    }

    #[test]
    fn single_vertex_packs_empty_trees() {
        let g = build_graph(1, &[]).unwrap();
        let f = pack(&g, 3).factorization().unwrap();
        assert_eq!(f.k, 3);
        assert!(verify_factorization(&g, &f).is_valid());
    }

    #[test]
    fn forced_augmentation() {
        // edge order chosen so that the greedy pass fills forest 0 badly
        let g = build_graph(
            4,
            &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)],
        )
        .unwrap();
        let f = pack(&g, 2).factorization().unwrap();
        assert!(verify_factorization(&g, &f).is_valid());
    }
}
