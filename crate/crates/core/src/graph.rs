//! Multigraph storage, spanning-tree queries and factorization checks.
//!
//! Vertices are `0..n` and edges carry a stable [`EdgeId`] equal to their
//! insertion index. Parallel edges are ordinary distinct edges; self-loops
//! are rejected because no spanning tree can contain one.


use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type EdgeId = usize;
pub type Vertex = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    incidence: Vec<Vec<EdgeId>>,
}

/// Builds a multigraph on `n` vertices; edge ids follow input order.
pub fn build_graph(n: usize, endpoints: &[(Vertex, Vertex)]) -> Result<MultiGraph> {
    MultiGraph::new(n, endpoints.to_vec())
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut incidence = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange(id));
            }
            if u == v {
                return Err(Error::SelfLoop(id));
            }
            incidence[u].push(id);
            incidence[v].push(id);
        }
        Ok(Self {
            n,
            edges,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn is_incident(&self, e: EdgeId, v: Vertex) -> bool {
        let (a, b) = self.edges[e];
        a == v || b == v
    }

    /// Edges incident to `v`, in increasing id order.
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incidence[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    /// Edges linking `u` and `v`.
    pub fn edges_between(&self, u: Vertex, v: Vertex) -> Vec<EdgeId> {
        self.incidence[u]
            .iter()
            .copied()
            .filter(|&e| self.other_end(e, u) == v)
            .collect()
    }

    /// Spanning subgraph keeping every vertex and only `edges`.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Subgraph {
        let list = edges.iter().map(|&e| self.edges[e]).collect();
        let graph = MultiGraph::new(self.n, list).expect("subgraph of a valid graph");
        Subgraph {
            graph,
            parent_edge: edges.to_vec(),
        }
    }
}

/// A spanning subgraph together with the parent id of each of its edges.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: MultiGraph,
    pub parent_edge: Vec<EdgeId>,
}

impl Subgraph {
    /// Translates a list of parent edge ids into local ids. Panics on edges
    /// outside the subgraph.
    pub fn localize(&self, parent_edges: &[EdgeId]) -> Vec<EdgeId> {
        let mut local = std::collections::HashMap::with_capacity(self.parent_edge.len());
        for (i, &p) in self.parent_edge.iter().enumerate() {
            local.insert(p, i);
        }
        parent_edges.iter().map(|p| local[p]).collect()
    }

    pub fn globalize(&self, local_edges: &[EdgeId]) -> Vec<EdgeId> {
        local_edges.iter().map(|&e| self.parent_edge[e]).collect()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}

/// A spanning tree rooted at vertex 0, supporting path and cut queries.
#[derive(Clone, Debug)]
pub struct RootedTree {
    parent: Vec<Option<(Vertex, EdgeId)>>,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    in_tree: Vec<bool>,
}

impl RootedTree {
    pub fn new(g: &MultiGraph, tree: &[EdgeId]) -> Result<Self> {
        let n = g.vertex_count();
        if tree.len() + 1 != n {
            return Err(Error::NotASpanningTree);
        }
        let mut in_tree = vec![false; g.edge_count()];
        let mut adj = vec![Vec::new(); n];
        for &e in tree {
            if e >= g.edge_count() || in_tree[e] {
                return Err(Error::NotASpanningTree);
            }
            in_tree[e] = true;
            let (u, v) = g.endpoints(e);
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut seen = vec![false; n];
        // iterative DFS recording entry/exit times
        let mut clock = 0;
        let mut stack = vec![(0usize, 0usize)];
        seen[0] = true;
        tin[0] = clock;
        clock += 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let (w, e) = adj[v][*next];
                *next += 1;
                if parent[v].map(|(_, pe)| pe) == Some(e) {
                    continue;
                }
                if seen[w] {
                    return Err(Error::NotASpanningTree);
                }
                seen[w] = true;
                parent[w] = Some((v, e));
                depth[w] = depth[v] + 1;
                tin[w] = clock;
                clock += 1;
                stack.push((w, 0));
            } else {
                tout[v] = clock;
                stack.pop();
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotASpanningTree);
        }
        Ok(Self {
            parent,
            depth,
            tin,
            tout,
            in_tree,
        })
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_tree.get(e).copied().unwrap_or(false)
    }

    /// Tree edges on the path between `u` and `v`.
    pub fn path(&self, mut u: Vertex, mut v: Vertex) -> Vec<EdgeId> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[u] > self.depth[v] {
            let (p, e) = self.parent[u].unwrap();
            left.push(e);
            u = p;
        }
        while self.depth[v] > self.depth[u] {
            let (p, e) = self.parent[v].unwrap();
            right.push(e);
            v = p;
        }
        while u != v {
            let (pu, eu) = self.parent[u].unwrap();
            let (pv, ev) = self.parent[v].unwrap();
            left.push(eu);
            right.push(ev);
            u = pu;
            v = pv;
        }
        left.extend(right.into_iter().rev());
        left
    }

    /// Whether `v` lies in the subtree below tree edge `e`.
    fn below(&self, g: &MultiGraph, e: EdgeId, v: Vertex) -> bool {
        let child = self.child_of(g, e);
        self.tin[child] <= self.tin[v] && self.tin[v] < self.tout[child]
    }

    fn child_of(&self, g: &MultiGraph, e: EdgeId) -> Vertex {
        let (a, b) = g.endpoints(e);
        if self.parent[a].map(|(_, pe)| pe) == Some(e) {
            a
        } else {
            b
        }
    }

    /// All graph edges crossing the split made by deleting tree edge `e`.
    pub fn cut(&self, g: &MultiGraph, e: EdgeId) -> Vec<EdgeId> {
        (0..g.edge_count())
            .filter(|&f| {
                let (a, b) = g.endpoints(f);
                self.below(g, e, a) != self.below(g, e, b)
            })
            .collect()
    }

    /// Whether graph edge `f` crosses the cut of tree edge `e`.
    pub fn crosses_cut(&self, g: &MultiGraph, e: EdgeId, f: EdgeId) -> bool {
        let (a, b) = g.endpoints(f);
        self.below(g, e, a) != self.below(g, e, b)
    }
}

/// The unique cycle of `tree + e`, as a sorted edge set containing `e`.
pub fn fundamental_cycle(g: &MultiGraph, tree: &[EdgeId], e: EdgeId) -> Result<Vec<EdgeId>> {
    let rooted = RootedTree::new(g, tree)?;
    if rooted.contains(e) {
        return Err(Error::EdgeInTree(e));
    }
    let (u, v) = g.endpoints(e);
    let mut cycle = rooted.path(u, v);
    cycle.push(e);
    cycle.sort_unstable();
    Ok(cycle)
}

/// Edges of `g` linking the two components of `tree - e`, sorted; includes `e`.
pub fn fundamental_cut(g: &MultiGraph, tree: &[EdgeId], e: EdgeId) -> Result<Vec<EdgeId>> {
    let rooted = RootedTree::new(g, tree)?;
    if !rooted.contains(e) {
        return Err(Error::EdgeNotInTree { edge: e, tree: 0 });
    }
    Ok(rooted.cut(g, e))
}

/// Ordered assignment of every edge to one of `k` trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl Factorization {
    pub fn new(k: usize, assignment: Vec<usize>) -> Self {
        Self { k, assignment }
    }

    /// Builds the assignment from explicit tree edge lists.
    pub fn from_trees(m: usize, trees: &[Vec<EdgeId>]) -> Self {
        let mut assignment = vec![usize::MAX; m];
        for (i, tree) in trees.iter().enumerate() {
            for &e in tree {
                assignment[e] = i;
            }
        }
        Self {
            k: trees.len(),
            assignment,
        }
    }

    pub fn tree(&self, i: usize) -> Vec<EdgeId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t == i)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn trees(&self) -> Vec<Vec<EdgeId>> {
        let mut trees = vec![Vec::new(); self.k];
        for (e, &t) in self.assignment.iter().enumerate() {
            if t < self.k {
                trees[t].push(e);
            }
        }
        trees
    }

    pub fn tree_of(&self, e: EdgeId) -> usize {
        self.assignment[e]
    }

    /// `table[v][i]` = degree of `v` in tree `i`.
    pub fn degree_table(&self, g: &MultiGraph) -> Vec<Vec<usize>> {
        let mut table = vec![vec![0; self.k]; g.vertex_count()];
        for (e, &t) in self.assignment.iter().enumerate() {
            let (u, v) = g.endpoints(e);
            table[u][t] += 1;
            table[v][t] += 1;
        }
        table
    }

    /// Swaps the labels of trees `i` and `j`.
    pub fn relabel(&mut self, i: usize, j: usize) {
        for t in &mut self.assignment {
            if *t == i {
                *t = j;
            } else if *t == j {
                *t = i;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch { expected: usize, actual: usize },
    TreeIndexOutOfRange { edge: EdgeId, tree: usize },
    WrongEdgeCount { tree: usize, count: usize, expected: usize },
    Cyclic { tree: usize },
    NotSpanning { tree: usize, components: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LengthMismatch { expected, actual } => {
                write!(f, "assignment has {actual} entries, graph has {expected} edges")
            }
            Violation::TreeIndexOutOfRange { edge, tree } => {
                write!(f, "edge {edge} assigned to out-of-range tree {tree}")
            }
            Violation::WrongEdgeCount {
                tree,
                count,
                expected,
            } => write!(f, "tree {tree} has {count} edges, expected {expected}"),
            Violation::Cyclic { tree } => write!(f, "tree {tree} contains a cycle"),
            Violation::NotSpanning { tree, components } => {
                write!(f, "tree {tree} is disconnected ({components} components)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCheck {
    pub violations: Vec<Violation>,
}

impl FactorizationCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msg = self
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::InvalidFactorization(msg))
        }
    }
}

pub fn verify_factorization(g: &MultiGraph, f: &Factorization) -> FactorizationCheck {
    let mut violations = Vec::new();
    let m = g.edge_count();
    if f.assignment.len() != m {
        violations.push(Violation::LengthMismatch {
            expected: m,
            actual: f.assignment.len(),
        });
        return FactorizationCheck { violations };
    }
    let n = g.vertex_count();
    let mut forests = vec![UnionFind::new(n); f.k];
    let mut counts = vec![0usize; f.k];
    let mut cyclic = vec![false; f.k];
    for (e, &t) in f.assignment.iter().enumerate() {
        if t >= f.k {
            violations.push(Violation::TreeIndexOutOfRange { edge: e, tree: t });
            continue;
        }
        counts[t] += 1;
        let (u, v) = g.endpoints(e);
        if !forests[t].union(u, v) {
            cyclic[t] = true;
        }
    }
    for t in 0..f.k {
        if counts[t] != n - 1 {
            violations.push(Violation::WrongEdgeCount {
                tree: t,
                count: counts[t],
                expected: n - 1,
            });
        }
        if cyclic[t] {
            violations.push(Violation::Cyclic { tree: t });
        }
        if forests[t].components() > 1 {
            violations.push(Violation::NotSpanning {
                tree: t,
                components: forests[t].components(),
            });
        }
    }
    FactorizationCheck { violations }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub k: usize,
    /// `degrees[v][i]` = degree of `v` in tree `i`.
    pub degrees: Vec<Vec<usize>>,
    pub max_imbalance: u64,
    pub max_deviation: BigRational,
}

impl BalanceReport {
    pub fn imbalance_at(&self, v: Vertex) -> u64 {
        spread(&self.degrees[v])
    }
}

fn spread(row: &[usize]) -> u64 {
    match (row.iter().max(), row.iter().min()) {
        (Some(hi), Some(lo)) => (hi - lo) as u64,
        _ => 0,
    }
}

/// Largest `|d_i(v) - d(v)/k|` over the table, exact.
pub(crate) fn deviation_of(table: &[Vec<usize>], k: usize) -> BigRational {
    let mut worst: i64 = 0;
    for row in table {
        let total: usize = row.iter().sum();
        for &d in row {
            worst = worst.max((k as i64 * d as i64 - total as i64).abs());
        }
    }
    if k == 0 {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(worst), BigInt::from(k))
}

pub(crate) fn imbalance_of(table: &[Vec<usize>]) -> u64 {
    table.iter().map(|row| spread(row)).max().unwrap_or(0)
}

pub fn balance_report(g: &MultiGraph, f: &Factorization) -> Result<BalanceReport> {
    verify_factorization(g, f).into_result()?;
    let degrees = f.degree_table(g);
    Ok(BalanceReport {
        k: f.k,
        max_imbalance: imbalance_of(&degrees),
        max_deviation: deviation_of(&degrees, f.k),
        degrees,
    })
}
