//! Ground truth for small instances: seeded generators, exhaustive
//! factorization enumeration, optimal imbalance and lower-bound search.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{imbalance_of, Factorization, MultiGraph, Vertex};
use crate::packing::is_k_multiple_tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    UniformRandomTrees,
    StarHeavy,
    PathHeavy,
    ParallelRich,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::UniformRandomTrees,
        Model::StarHeavy,
        Model::PathHeavy,
        Model::ParallelRich,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::UniformRandomTrees => "uniform-random-trees",
            Model::StarHeavy => "star-heavy",
            Model::PathHeavy => "path-heavy",
            Model::ParallelRich => "parallel-rich",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
}

/// Union of `k` random spanning trees on `0..n`, edges shuffled, with the
/// planted factorization. Deterministic in the spec.
pub fn generate(spec: &GeneratorSpec) -> (MultiGraph, Factorization) {
    let GeneratorSpec { model, n, k, seed } = *spec;
    assert!(n >= 1 && k >= 1, "generator needs n >= 1 and k >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let hubs: Vec<Vertex> = {
        let mut all: Vec<Vertex> = (0..n).collect();
        all.shuffle(&mut rng);
        all.truncate((n / 12).max(1));
        all
    };
    let mut trees: Vec<Vec<(Vertex, Vertex)>> = Vec::with_capacity(k);
    for t in 0..k {
        let tree = match model {
            Model::UniformRandomTrees => prufer_tree(n, &mut rng),
            Model::StarHeavy => hub_tree(n, &hubs, &mut rng),
            Model::PathHeavy => path_tree(n, &mut rng),
            Model::ParallelRich if t == 0 => prufer_tree(n, &mut rng),
            Model::ParallelRich => echo_tree(n, &trees[0], &mut rng),
        };
        debug_assert_eq!(tree.len(), n - 1);
        trees.push(tree);
    }

    let mut labelled: Vec<((Vertex, Vertex), usize)> = trees
        .into_iter()
        .enumerate()
        .flat_map(|(t, edges)| edges.into_iter().map(move |e| (e, t)))
        .collect();
    labelled.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(labelled.len());
    let mut assignment = Vec::with_capacity(labelled.len());
    for ((u, v), t) in labelled {
        edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        assignment.push(t);
    }
    let g = MultiGraph::new(n, edges).expect("generated edges are in range");
    (g, Factorization::new(k, assignment))
}

fn prufer_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BTreeSet<Vertex> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let mut rest = leaves.into_iter();
    let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((a, b));
    edges
}

/// Random attachment in a random order, each vertex picking its parent
/// among earlier vertices via `choose`.
fn attach_tree(
    n: usize,
    rng: &mut ChaCha8Rng,
    mut choose: impl FnMut(&[Vertex], &mut ChaCha8Rng) -> Vertex,
) -> Vec<(Vertex, Vertex)> {
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let parent = choose(&order[..i], rng);
        edges.push((order[i], parent));
    }
    edges
}

fn hub_tree(n: usize, hubs: &[Vertex], rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    // hubs first so that every later vertex can reach one
    let mut order: Vec<Vertex> = hubs.to_vec();
    let mut rest: Vec<Vertex> = (0..n).filter(|v| !hubs.contains(v)).collect();
    rest.shuffle(rng);
    order.extend(rest);
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let placed_hubs = i.min(hubs.len());
        let parent = if rng.gen_bool(0.7) {
            order[rng.gen_range(0..placed_hubs)]
        } else {
            order[rng.gen_range(0..i)]
        };
        edges.push((order[i], parent));
    }
    edges
}

fn path_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    attach_tree(n, rng, |before, rng| {
        if rng.gen_bool(0.85) {
            before[before.len() - 1]
        } else {
            before[rng.gen_range(0..before.len())]
        }
    })
}

/// Keeps a random part of `base` and reconnects the pieces at random, so
/// that many edges reappear as parallel copies.
fn echo_tree(n: usize, base: &[(Vertex, Vertex)], rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    let mut uf = crate::graph::UnionFind::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for &(u, v) in base {
        if rng.gen_bool(0.6) && uf.union(u, v) {
            edges.push((u, v));
        }
    }
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let v = order[i];
        let u = order[rng.gen_range(0..i)];
        if uf.union(u, v) {
            edges.push((u, v));
        }
    }
    // stitch whatever is still apart
    for i in 1..n {
        if uf.union(order[0], order[i]) {
            edges.push((order[0], order[i]));
        }
    }
    edges
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Refuse instances with more edges than this.
    pub edge_cap: usize,
    /// Only yield factorizations with edge 0 in tree 0.
    pub fix_first_edge: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            edge_cap: 18,
            fix_first_edge: false,
        }
    }
}

/// Depth-first stream of ordered factorizations. Each edge in id order is
/// tried in every tree that still has room and stays acyclic.
pub struct Factorizations<'a> {
    g: &'a MultiGraph,
    k: usize,
    fix_first: bool,
    assign: Vec<usize>,
    next_try: Vec<usize>,
    undo: Vec<(usize, Vertex)>,
    parent: Vec<Vec<Vertex>>,
    counts: Vec<usize>,
    depth: usize,
    done: bool,
}

impl<'a> Factorizations<'a> {
    fn new(g: &'a MultiGraph, k: usize, fix_first: bool) -> Self {
        let n = g.vertex_count();
        let m = g.edge_count();
        Self {
            g,
            k,
            fix_first,
            assign: vec![0; m],
            next_try: vec![0; m],
            undo: vec![(0, 0); m],
            parent: vec![(0..n).collect(); k],
            counts: vec![0; k],
            depth: 0,
            done: m != k * (n - 1),
        }
    }

    fn root(&self, t: usize, mut v: Vertex) -> Vertex {
        while self.parent[t][v] != v {
            v = self.parent[t][v];
        }
        v
    }

    fn retract(&mut self) {
        self.depth -= 1;
        let (t, r) = self.undo[self.depth];
        self.parent[t][r] = r;
        self.counts[t] -= 1;
    }
}

impl Iterator for Factorizations<'_> {
    type Item = Factorization;

    fn next(&mut self) -> Option<Factorization> {
        let m = self.g.edge_count();
        let cap = self.g.vertex_count() - 1;
        loop {
            if self.done {
                return None;
            }
            if self.depth == m {
                let out = Factorization::new(self.k, self.assign.clone());
                if m == 0 {
                    self.done = true;
                } else {
                    self.retract();
                }
                return Some(out);
            }
            let d = self.depth;
            let t = self.next_try[d];
            let limit = if self.fix_first && d == 0 { 1 } else { self.k };
            if t >= limit {
                self.next_try[d] = 0;
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.retract();
                continue;
            }
            self.next_try[d] = t + 1;
            if self.counts[t] == cap {
                continue;
            }
            let (u, v) = self.g.endpoints(d);
            let (ru, rv) = (Self::root(self, t, u), Self::root(self, t, v));
            if ru == rv {
                continue;
            }
            self.parent[t][rv] = ru;
            self.undo[d] = (t, rv);
            self.counts[t] += 1;
            self.assign[d] = t;
            self.depth += 1;
        }
    }
}

pub fn enumerate_factorizations(g: &MultiGraph, k: usize) -> Result<Factorizations<'_>> {
    enumerate_with(g, k, EnumerationOptions::default())
}

pub fn enumerate_with(
    g: &MultiGraph,
    k: usize,
    opts: EnumerationOptions,
) -> Result<Factorizations<'_>> {
    if g.edge_count() > opts.edge_cap {
        return Err(Error::TooLarge {
            edges: g.edge_count(),
            cap: opts.edge_cap,
        });
    }
    Ok(Factorizations::new(g, k, opts.fix_first_edge && k >= 2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub minimum: u64,
    pub witness: Factorization,
    /// Factorizations visited; with `k = 2` edge 0 is pinned to tree 0, so
    /// this is half the ordered count.
    pub examined: u64,
}

pub fn optimal_imbalance(g: &MultiGraph, k: usize) -> Result<OracleResult> {
    optimal_imbalance_with(g, k, EnumerationOptions::default().edge_cap)
}

pub fn optimal_imbalance_with(g: &MultiGraph, k: usize, edge_cap: usize) -> Result<OracleResult> {
    let opts = EnumerationOptions {
        edge_cap,
        fix_first_edge: true,
    };
    let mut best: Option<(u64, Factorization)> = None;
    let mut examined = 0u64;
    for f in enumerate_with(g, k, opts)? {
        examined += 1;
        let score = imbalance_of(&f.degree_table(g));
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, f));
        }
    }
    let (minimum, witness) = best.ok_or_else(|| Error::NotKMultipleTree {
        k,
        reason: "no factorization exists".into(),
    })?;
    Ok(OracleResult {
        minimum,
        witness,
        examined,
    })
}

#[derive(Clone, Debug)]
pub struct LowerBoundWitness {
    pub graph: MultiGraph,
    pub result: OracleResult,
}

#[derive(Clone, Debug)]
pub struct LowerBoundSearch {
    pub witnesses: Vec<LowerBoundWitness>,
    /// Distinct double trees whose optimum was computed.
    pub instances_checked: usize,
}

/// Searches double trees with at most `max_edges` edges for instances whose
/// optimal imbalance is at least `target`. Every double tree on at most five
/// vertices is tried (up to degree-sorted relabelling), followed by seeded
/// random samples of every generator model up to the edge cap.
pub fn search_lower_bound(target: u64, max_edges: usize, seed: u64) -> LowerBoundSearch {
    let mut seen: BTreeSet<Vec<(Vertex, Vertex)>> = BTreeSet::new();
    let mut out = LowerBoundSearch {
        witnesses: Vec::new(),
        instances_checked: 0,
    };
    let mut consider = |g: MultiGraph, out: &mut LowerBoundSearch| {
        let mut key: Vec<(Vertex, Vertex)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        key.sort_unstable();
        key.insert(0, (g.vertex_count(), 0));
        if !seen.insert(key) || !is_k_multiple_tree(&g, 2) {
            return;
        }
        out.instances_checked += 1;
        if let Ok(result) = optimal_imbalance_with(&g, 2, max_edges) {
            if result.minimum >= target {
                out.witnesses.push(LowerBoundWitness { graph: g, result });
            }
        }
    };

    let exhaustive_n = ((max_edges + 2) / 2).min(5);
    for n in 2..=exhaustive_n {
        for g in small_double_tree_candidates(n) {
            consider(g, &mut out);
        }
    }

    let max_n = (max_edges + 2) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in (exhaustive_n + 1)..=max_n {
        for model in Model::ALL {
            for _ in 0..400 {
                let spec = GeneratorSpec {
                    model,
                    n,
                    k: 2,
                    seed: rng.gen(),
                };
                consider(generate(&spec).0, &mut out);
            }
        }
    }
    out
}

/// Multigraphs on `n` vertices with `2n - 2` edges, edge multiplicity at most
/// two, minimum degree two and non-increasing degrees.
fn small_double_tree_candidates(n: usize) -> Vec<MultiGraph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let m = 2 * n - 2;
    let mut out = Vec::new();
    let mut mult = vec![0usize; pairs.len()];
    fn rec(
        idx: usize,
        left: usize,
        n: usize,
        pairs: &[(Vertex, Vertex)],
        mult: &mut Vec<usize>,
        out: &mut Vec<MultiGraph>,
    ) {
        if idx == pairs.len() {
            if left != 0 {
                return;
            }
            let mut deg = vec![0; n];
            let mut edges = Vec::new();
            for (p, &c) in pairs.iter().zip(mult.iter()) {
                for _ in 0..c {
                    edges.push(*p);
                    deg[p.0] += 1;
                    deg[p.1] += 1;
                }
            }
            if deg.iter().all(|&d| d >= 2) && deg.windows(2).all(|w| w[0] >= w[1]) {
                out.push(MultiGraph::new(n, edges).unwrap());
            }
            return;
        }
        for c in 0..=left.min(2) {
            mult[idx] = c;
            rec(idx + 1, left - c, n, pairs, mult, out);
        }
        mult[idx] = 0;
    }
    rec(0, m, n, &pairs, &mut mult, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, verify_factorization};

    fn k4() -> MultiGraph {
        build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap()
    }

    /// Independent check: all k^m assignments filtered by verify_factorization.
    fn brute_force_count(g: &MultiGraph, k: usize) -> usize {
        let m = g.edge_count() as u32;
        (0..k.pow(m))
            .filter(|&code| {
                let mut c = code;
                let assignment = (0..m)
                    .map(|_| {
                        let t = c % k;
                        c /= k;
                        t
                    })
                    .collect();
                verify_factorization(g, &Factorization::new(k, assignment)).is_valid()
            })
            .count()
    }

    #[test]
    fn generator_small_cases() {
        for model in Model::ALL {
            let (g, f) = generate(&GeneratorSpec { model, n: 1, k: 3, seed: 1 });
            assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
            assert_eq!(f.k, 3);
            assert!(verify_factorization(&g, &f).is_valid());

            let (g, f) = generate(&GeneratorSpec { model, n: 2, k: 2, seed: 9 });
            assert_eq!(g.edge_count(), 2);
            assert!(g.edges().iter().all(|&(u, v)| u.min(v) == 0 && u.max(v) == 1));
            assert!(verify_factorization(&g, &f).is_valid());
        }
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for model in Model::ALL {
            let spec = GeneratorSpec { model, n: 30, k: 3, seed: 7 };
            let (g, f) = generate(&spec);
            assert_eq!(g.edge_count(), 87);
            assert!(verify_factorization(&g, &f).is_valid());
            assert_eq!(generate(&spec), (g, f));
        }
    }

    #[test]
    fn models_round_trip_names() {
        for model in Model::ALL {
            assert_eq!(model.name().parse::<Model>().unwrap(), model);
        }
        assert!("nope".parse::<Model>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(enumerate_factorizations(&g, 2).unwrap().count(), 2);

        let g = k4();
        let count = enumerate_factorizations(&g, 2).unwrap().count();
        assert_eq!(count, brute_force_count(&g, 2));
        // ordered count on K4: each of its 12 Hamiltonian paths pairs with its complement
        assert_eq!(count, 12);

        let path = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(enumerate_factorizations(&path, 2).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_matches_brute_force_on_generated() {
        for seed in 0..12 {
            for model in Model::ALL {
                let k = 2 + (seed as usize % 2);
                let n = if k == 2 { 5 } else { 4 };
                let (g, _) = generate(&GeneratorSpec { model, n, k, seed });
                let all: Vec<_> = enumerate_factorizations(&g, k).unwrap().collect();
                assert_eq!(all.len(), brute_force_count(&g, k));
                let distinct: BTreeSet<_> = all.iter().map(|f| f.assignment.clone()).collect();
                assert_eq!(distinct.len(), all.len());
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        let (g, _) = generate(&GeneratorSpec {
            model: Model::UniformRandomTrees,
            n: 12,
            k: 2,
            seed: 0,
        });
        assert!(matches!(
            enumerate_factorizations(&g, 2),
            Err(Error::TooLarge { edges: 22, cap: 18 })
        ));
    }

    #[test]
    fn optimal_examples() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(optimal_imbalance(&g, 2).unwrap().minimum, 0);

        let r = optimal_imbalance(&k4(), 2).unwrap();
        assert_eq!(r.minimum, 1);
        assert!(verify_factorization(&k4(), &r.witness).is_valid());
        assert_eq!(r.examined, 6);

        let star = build_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 0), (1, 2), (1, 3)]).unwrap();
        assert_eq!(optimal_imbalance(&star, 2).unwrap().minimum, 0);
    }

    #[test]
    fn lower_bound_targets() {
        let found = search_lower_bound(1, 6, 3);
        assert!(found
            .witnesses
            .iter()
            .any(|w| w.graph.vertex_count() == 4 && w.graph.degrees() == vec![3, 3, 3, 3]));
        assert!(search_lower_bound(6, 8, 3).witnesses.is_empty());
    }

    #[test]
    fn candidate_counts_are_double_trees_or_filtered() {
        let cands = small_double_tree_candidates(3);
        // multigraphs on 3 vertices, 4 edges, multiplicity <= 2, min degree 2
        assert!(cands.iter().all(|g| g.edge_count() == 4));
        assert!(!cands.is_empty());
    }
}
