//! Local configurations that can be cut out of a double tree, and the way a
//! balanced factorization of the smaller graph is carried back.
//!
//! Every reduction removes exactly one vertex. Its lift turns any
//! factorization of the reduced graph with imbalance at most five into one
//! of the original graph with the same guarantee.

use crate::error::{Error, Result};
use crate::exchange::{special_edge_unchecked, tree_mapping_edge, TreePair};
use crate::graph::{imbalance_of, verify_factorization, EdgeId, Factorization, MultiGraph, Vertex};
use crate::packing::pack;

use super::classify::{classify, is_big};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseKind {
    ParallelTwoVertex,
    TwoVertexSmallNeighbor,
    BigWithTwoTwoNeighbors,
    SpecialEdgeToSmall,
    CriticalParallelPoor,
    CriticalAdjacentThrees,
}

impl CaseKind {
    /// Search order used by [`find_reduction`].
    pub const PRIORITY: [CaseKind; 6] = [
        CaseKind::ParallelTwoVertex,
        CaseKind::TwoVertexSmallNeighbor,
        CaseKind::BigWithTwoTwoNeighbors,
        CaseKind::SpecialEdgeToSmall,
        CaseKind::CriticalParallelPoor,
        CaseKind::CriticalAdjacentThrees,
    ];
}

/// A configuration found in a graph. Field names follow the usual picture of
/// each configuration: `x` is the anchor vertex, edges are named by their ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionCase {
    /// 2-vertex `x` joined to `y` by the parallel edges `e` and `f`.
    ParallelTwoVertex {
        x: Vertex,
        y: Vertex,
        e: EdgeId,
        f: EdgeId,
    },
    /// 2-vertex `x` with distinct neighbours `y` (small) and `z`.
    TwoVertexSmallNeighbor {
        x: Vertex,
        y: Vertex,
        z: Vertex,
        xy: EdgeId,
        xz: EdgeId,
    },
    /// Big `x` adjacent to the 2-vertices `y1`, `y2`, whose other
    /// neighbours are `z1` and `z2`.
    BigWithTwoTwoNeighbors {
        x: Vertex,
        y1: Vertex,
        y2: Vertex,
        z1: Vertex,
        z2: Vertex,
        xy1: EdgeId,
        xy2: EdgeId,
        y1z1: EdgeId,
        y2z2: EdgeId,
    },
    /// 3-vertex `x` whose special edge `xy` ends at a small `y`.
    SpecialEdgeToSmall {
        x: Vertex,
        y: Vertex,
        z1: Vertex,
        z2: Vertex,
        xy: EdgeId,
        xz1: EdgeId,
        xz2: EdgeId,
    },
    /// Critical `x` joined by parallel `e`, `f` to a poor `y` with third edge `yz`.
    CriticalParallelPoor {
        x: Vertex,
        y: Vertex,
        z: Vertex,
        e: EdgeId,
        f: EdgeId,
        yz: EdgeId,
    },
    /// Critical `x` with adjacent 3-vertex neighbours `y1`, `y2`.
    CriticalAdjacentThrees {
        x: Vertex,
        y1: Vertex,
        y2: Vertex,
        z1: Vertex,
        z2: Vertex,
        xy1: EdgeId,
        xy2: EdgeId,
        y1y2: EdgeId,
        y1z1: EdgeId,
        y2z2: EdgeId,
    },
}

impl ReductionCase {
    pub fn kind(&self) -> CaseKind {
        match self {
            ReductionCase::ParallelTwoVertex { .. } => CaseKind::ParallelTwoVertex,
            ReductionCase::TwoVertexSmallNeighbor { .. } => CaseKind::TwoVertexSmallNeighbor,
            ReductionCase::BigWithTwoTwoNeighbors { .. } => CaseKind::BigWithTwoTwoNeighbors,
            ReductionCase::SpecialEdgeToSmall { .. } => CaseKind::SpecialEdgeToSmall,
            ReductionCase::CriticalParallelPoor { .. } => CaseKind::CriticalParallelPoor,
            ReductionCase::CriticalAdjacentThrees { .. } => CaseKind::CriticalAdjacentThrees,
        }
    }

    /// Checks the configuration against `g`. Special edges depend on a
    /// factorization and are not checked here.
    pub fn check(&self, g: &MultiGraph) -> Result<()> {
        let ok = match *self {
            ReductionCase::ParallelTwoVertex { x, y, e, f } => {
                g.degree(x) == 2 && ends(g, e, x, y) && ends(g, f, x, y) && e != f
            }
            ReductionCase::TwoVertexSmallNeighbor { x, y, z, xy, xz } => {
                g.degree(x) == 2
                    && y != z
                    && !is_big(g, y)
                    && ends(g, xy, x, y)
                    && ends(g, xz, x, z)
            }
            ReductionCase::BigWithTwoTwoNeighbors {
                x,
                y1,
                y2,
                z1,
                z2,
                xy1,
                xy2,
                y1z1,
                y2z2,
            } => {
                is_big(g, x)
                    && y1 != y2
                    && g.degree(y1) == 2
                    && g.degree(y2) == 2
                    && z1 != x
                    && z2 != x
                    && z1 != y2
                    && z2 != y1
                    && ends(g, xy1, x, y1)
                    && ends(g, xy2, x, y2)
                    && ends(g, y1z1, y1, z1)
                    && ends(g, y2z2, y2, z2)
            }
            ReductionCase::SpecialEdgeToSmall {
                x,
                y,
                z1,
                z2,
                xy,
                xz1,
                xz2,
            } => {
                g.degree(x) == 3
                    && !is_big(g, y)
                    && z1 != z2
                    && ends(g, xy, x, y)
                    && ends(g, xz1, x, z1)
                    && ends(g, xz2, x, z2)
                    && xy != xz1
                    && xy != xz2
            }
            ReductionCase::CriticalParallelPoor { x, y, z, e, f, yz } => {
                classify(g, x).critical
                    && classify(g, y).is_poor()
                    && e != f
                    && z != x
                    && ends(g, e, x, y)
                    && ends(g, f, x, y)
                    && ends(g, yz, y, z)
            }
            ReductionCase::CriticalAdjacentThrees {
                x,
                y1,
                y2,
                z1,
                z2,
                xy1,
                xy2,
                y1y2,
                y1z1,
                y2z2,
            } => {
                classify(g, x).critical
                    && y1 != y2
                    && g.degree(y1) == 3
                    && g.degree(y2) == 3
                    && g.edges_between(x, y1).len() == 1
                    && g.edges_between(x, y2).len() == 1
                    && g.edges_between(y1, y2).len() == 1
                    && ![x, y2].contains(&z1)
                    && ![x, y1].contains(&z2)
                    && ends(g, xy1, x, y1)
                    && ends(g, xy2, x, y2)
                    && ends(g, y1y2, y1, y2)
                    && ends(g, y1z1, y1, z1)
                    && ends(g, y2z2, y2, z2)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::CaseNotPresent(format!("{self:?}")))
        }
    }
}

fn ends(g: &MultiGraph, e: EdgeId, a: Vertex, b: Vertex) -> bool {
    e < g.edge_count() && {
        let (u, v) = g.endpoints(e);
        (u, v) == (a, b) || (u, v) == (b, a)
    }
}

fn tree_degree(g: &MultiGraph, f: &Factorization, v: Vertex, t: usize) -> usize {
    g.incident(v).iter().filter(|&&e| f.assignment[e] == t).count()
}

/// Edges of a 2-vertex or 3-vertex other than `skip`, with their far ends.
fn others(g: &MultiGraph, v: Vertex, skip: &[EdgeId]) -> Vec<(EdgeId, Vertex)> {
    g.incident(v)
        .iter()
        .filter(|e| !skip.contains(e))
        .map(|&e| (e, g.other_end(e, v)))
        .collect()
}

/// First configuration in priority order, anchored at the smallest vertex.
pub fn find_reduction(g: &MultiGraph, f: &Factorization) -> Option<ReductionCase> {
    CaseKind::PRIORITY
        .into_iter()
        .find_map(|kind| find_case(g, f, kind))
}

/// First configuration of one kind, anchored at the smallest vertex.
pub fn find_case(g: &MultiGraph, f: &Factorization, kind: CaseKind) -> Option<ReductionCase> {
    let n = g.vertex_count();
    match kind {
        CaseKind::ParallelTwoVertex => (0..n).find_map(|x| {
            let inc = g.incident(x);
            if inc.len() != 2 {
                return None;
            }
            let (e, f) = (inc[0], inc[1]);
            let y = g.other_end(e, x);
            (g.other_end(f, x) == y).then_some(ReductionCase::ParallelTwoVertex { x, y, e, f })
        }),
        CaseKind::TwoVertexSmallNeighbor => (0..n).find_map(|x| {
            let inc = g.incident(x);
            if inc.len() != 2 {
                return None;
            }
            let (a, b) = (inc[0], inc[1]);
            let (va, vb) = (g.other_end(a, x), g.other_end(b, x));
            if va == vb {
                return None;
            }
            let mut small: Vec<(Vertex, EdgeId, Vertex, EdgeId)> = Vec::new();
            if !is_big(g, va) {
                small.push((va, a, vb, b));
            }
            if !is_big(g, vb) {
                small.push((vb, b, va, a));
            }
            small.sort_unstable();
            small
                .first()
                .map(|&(y, xy, z, xz)| ReductionCase::TwoVertexSmallNeighbor { x, y, z, xy, xz })
        }),
        CaseKind::BigWithTwoTwoNeighbors => (0..n).filter(|&x| is_big(g, x)).find_map(|x| {
            // (y, xy, z, yz) for every 2-vertex neighbour y with distinct neighbours
            let mut twos: Vec<(Vertex, EdgeId, Vertex, EdgeId)> = g
                .incident(x)
                .iter()
                .filter_map(|&xy| {
                    let y = g.other_end(xy, x);
                    if g.degree(y) != 2 {
                        return None;
                    }
                    let (yz, z) = others(g, y, &[xy])[0];
                    (z != x).then_some((y, xy, z, yz))
                })
                .collect();
            twos.sort_unstable();
            for (i, &(y1, xy1, z1, y1z1)) in twos.iter().enumerate() {
                for &(y2, xy2, z2, y2z2) in &twos[i + 1..] {
                    if y1 != y2 && z1 != y2 && z2 != y1 {
                        return Some(ReductionCase::BigWithTwoTwoNeighbors {
                            x,
                            y1,
                            y2,
                            z1,
                            z2,
                            xy1,
                            xy2,
                            y1z1,
                            y2z2,
                        });
                    }
                }
            }
            None
        }),
        CaseKind::SpecialEdgeToSmall => (0..n).filter(|&x| g.degree(x) == 3).find_map(|x| {
            let (xy, _) = special_edge_unchecked(g, f, x).ok()?;
            let y = g.other_end(xy, x);
            if is_big(g, y) {
                return None;
            }
            let rest = others(g, x, &[xy]);
            let ((xz1, z1), (xz2, z2)) = (rest[0], rest[1]);
            (z1 != z2).then_some(ReductionCase::SpecialEdgeToSmall {
                x,
                y,
                z1,
                z2,
                xy,
                xz1,
                xz2,
            })
        }),
        CaseKind::CriticalParallelPoor => (0..n)
            .filter(|&x| classify(g, x).critical)
            .find_map(|x| {
                let mut ys: Vec<Vertex> = g.incident(x).iter().map(|&e| g.other_end(e, x)).collect();
                ys.sort_unstable();
                ys.dedup();
                ys.into_iter().find_map(|y| {
                    let par = g.edges_between(x, y);
                    if par.len() != 2 || !classify(g, y).is_poor() {
                        return None;
                    }
                    let (yz, z) = others(g, y, &par)[0];
                    Some(ReductionCase::CriticalParallelPoor {
                        x,
                        y,
                        z,
                        e: par[0],
                        f: par[1],
                        yz,
                    })
                })
            }),
        CaseKind::CriticalAdjacentThrees => (0..n)
            .filter(|&x| classify(g, x).critical)
            .find_map(|x| critical_adjacent_at(g, f, x)),
    }
}

fn critical_adjacent_at(g: &MultiGraph, f: &Factorization, x: Vertex) -> Option<ReductionCase> {
    let mut ys: Vec<(Vertex, EdgeId)> = g
        .incident(x)
        .iter()
        .map(|&e| (g.other_end(e, x), e))
        .filter(|&(y, _)| g.degree(y) == 3 && g.edges_between(x, y).len() == 1)
        .collect();
    ys.sort_unstable();
    for (i, &(y1, xy1)) in ys.iter().enumerate() {
        for &(y2, xy2) in &ys[i + 1..] {
            let between = g.edges_between(y1, y2);
            if between.len() != 1 {
                continue;
            }
            let y1y2 = between[0];
            let (y1z1, z1) = others(g, y1, &[xy1, y1y2])[0];
            let (y2z2, z2) = others(g, y2, &[xy2, y1y2])[0];
            if z1 == x || z2 == x {
                continue;
            }
            let case = ReductionCase::CriticalAdjacentThrees {
                x,
                y1,
                y2,
                z1,
                z2,
                xy1,
                xy2,
                y1y2,
                y1z1,
                y2z2,
            };
            return Some(match normalize_adjacent_threes(g, f, &case) {
                Some((_, true)) => case,
                Some((_, false)) => mirrored(&case),
                None => case,
            });
        }
    }
    None
}

fn mirrored(case: &ReductionCase) -> ReductionCase {
    match *case {
        ReductionCase::CriticalAdjacentThrees {
            x,
            y1,
            y2,
            z1,
            z2,
            xy1,
            xy2,
            y1y2,
            y1z1,
            y2z2,
        } => ReductionCase::CriticalAdjacentThrees {
            x,
            y1: y2,
            y2: y1,
            z1: z2,
            z2: z1,
            xy1: xy2,
            xy2: xy1,
            y1y2,
            y1z1: y2z2,
            y2z2: y1z1,
        },
        other => other,
    }
}

fn swap_pair(g: &MultiGraph, f: &Factorization, e: EdgeId, partner: EdgeId) -> Option<Factorization> {
    let mut out = f.clone();
    out.assignment.swap(e, partner);
    verify_factorization(g, &out).is_valid().then_some(out)
}

/// Rearranges `f` so that `xy1, y2z2` share tree 0 and `xy2, y1z1` share
/// tree 1. The flag tells whether `y1y2` then lies in tree 0; if not, the
/// mirrored naming has it there.
fn normalize_adjacent_threes(
    g: &MultiGraph,
    f: &Factorization,
    case: &ReductionCase,
) -> Option<(Factorization, bool)> {
    let ReductionCase::CriticalAdjacentThrees {
        xy1,
        xy2,
        y1y2,
        y1z1,
        y2z2,
        ..
    } = *case
    else {
        return None;
    };
    let quad = [xy1, xy2, y1z1, y2z2];
    let mut u = f.clone();
    let in0 = quad.iter().filter(|&&e| u.assignment[e] == 0).count();
    if in0 != 2 {
        // three of the four share a tree; move y1y2 into it
        let full = if in0 == 3 { 0 } else { 1 };
        let from = u.assignment[y1y2];
        if from == full {
            return None;
        }
        let s = tree_mapping_edge(g, &u, from, full, y1y2).ok()?;
        u = swap_pair(g, &u, y1y2, s)?;
        if quad.iter().filter(|&&e| u.assignment[e] == 0).count() != 2 {
            return None;
        }
    }
    if u.assignment[xy1] != 0 {
        u.relabel(0, 1);
    }
    if u.assignment[y2z2] != 0 {
        // xy2 shares tree 0 with xy1, so y1y2 is in tree 1
        let pair = TreePair::new(g, &u, 0, 1).ok()?;
        if pair.partners(g, xy2).contains(&y2z2) {
            u = swap_pair(g, &u, xy2, y2z2)?;
        } else if pair.partners(g, xy1).contains(&y1z1) {
            u = swap_pair(g, &u, xy1, y1z1)?;
            u.relabel(0, 1);
        } else {
            return None;
        }
    }
    let ok = u.assignment[xy1] == 0
        && u.assignment[y2z2] == 0
        && u.assignment[xy2] == 1
        && u.assignment[y1z1] == 1;
    if !ok {
        return None;
    }
    if u.assignment[y1y2] == 0 {
        Some((u, true))
    } else {
        u.relabel(0, 1);
        Some((u, false))
    }
}

/// One step of a reduction chain: the graphs on both sides and the
/// correspondence between them.
#[derive(Clone, Debug)]
pub struct ReductionEntry {
    pub case: ReductionCase,
    pub original: MultiGraph,
    pub reduced: MultiGraph,
    /// Original vertex to reduced vertex, `None` for removed vertices.
    pub vertex_map: Vec<Option<Vertex>>,
    /// Original edge to reduced edge, `None` for removed edges.
    pub edge_map: Vec<Option<EdgeId>>,
    /// Reduced ids of the edges that exist only in the reduced graph.
    pub added: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionTrace {
    pub entries: Vec<ReductionEntry>,
}

#[derive(Clone, Copy)]
enum End {
    Old(Vertex),
    New,
}

struct Rebuilt {
    graph: MultiGraph,
    vertex_map: Vec<Option<Vertex>>,
    edge_map: Vec<Option<EdgeId>>,
    added: Vec<EdgeId>,
}

/// Deletes `removed`, optionally appends one vertex, then appends `extra`.
fn rebuild(g: &MultiGraph, removed: &[Vertex], extra: &[(End, End)]) -> Rebuilt {
    let n = g.vertex_count();
    let mut vertex_map = vec![None; n];
    let mut next = 0;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if !removed.contains(&v) {
            *slot = Some(next);
            next += 1;
        }
    }
    let has_new = extra
        .iter()
        .any(|&(a, b)| matches!(a, End::New) || matches!(b, End::New));
    let new_vertex = next;
    let total = next + usize::from(has_new);
    let resolve = |end: End| match end {
        End::Old(v) => vertex_map[v].expect("added edge touches a removed vertex"),
        End::New => new_vertex,
    };

    let mut edges = Vec::with_capacity(g.edge_count());
    let mut edge_map = vec![None; g.edge_count()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if let (Some(a), Some(b)) = (vertex_map[u], vertex_map[v]) {
            edge_map[e] = Some(edges.len());
            edges.push((a, b));
        }
    }
    let mut added = Vec::with_capacity(extra.len());
    for &(a, b) in extra {
        added.push(edges.len());
        edges.push((resolve(a), resolve(b)));
    }
    Rebuilt {
        graph: MultiGraph::new(total, edges).expect("reduced graph is well formed"),
        vertex_map,
        edge_map,
        added,
    }
}

/// Builds the reduced graph. Edge and vertex ids outside the configuration
/// keep their relative order.
pub fn reduce(g: &MultiGraph, case: &ReductionCase) -> Result<ReductionEntry> {
    case.check(g)?;
    let rebuilt = match *case {
        ReductionCase::ParallelTwoVertex { x, .. } | ReductionCase::TwoVertexSmallNeighbor { x, .. } => {
            rebuild(g, &[x], &[])
        }
        ReductionCase::BigWithTwoTwoNeighbors { y1, y2, z1, z2, .. } => rebuild(
            g,
            &[y1, y2],
            &[(End::Old(z1), End::New), (End::Old(z2), End::New)],
        ),
        ReductionCase::SpecialEdgeToSmall { x, z1, z2, .. } => {
            rebuild(g, &[x], &[(End::Old(z1), End::Old(z2))])
        }
        ReductionCase::CriticalParallelPoor { x, y, z, .. } => {
            rebuild(g, &[y], &[(End::Old(x), End::Old(z))])
        }
        ReductionCase::CriticalAdjacentThrees { x, y1, y2, z2, .. } => rebuild(
            g,
            &[y1, y2],
            &[
                (End::Old(x), End::New),
                (End::Old(x), End::New),
                (End::New, End::Old(z2)),
            ],
        ),
    };
    debug_assert_eq!(rebuilt.graph.vertex_count() + 1, g.vertex_count());
    Ok(ReductionEntry {
        case: *case,
        original: g.clone(),
        reduced: rebuilt.graph,
        vertex_map: rebuilt.vertex_map,
        edge_map: rebuilt.edge_map,
        added: rebuilt.added,
    })
}

/// Carries a factorization of the original graph over to the reduced one,
/// following the construction that shows the reduced graph is a double tree.
/// Falls back to packing the reduced graph if that construction fails.
pub fn push_forward(entry: &ReductionEntry, f: &Factorization) -> Result<Factorization> {
    let g = &entry.original;
    let mut base = f.clone();
    let mut added_trees: Vec<usize> = Vec::new();
    match entry.case {
        ReductionCase::ParallelTwoVertex { .. } | ReductionCase::TwoVertexSmallNeighbor { .. } => {}
        ReductionCase::BigWithTwoTwoNeighbors { .. } => added_trees = vec![0, 1],
        ReductionCase::SpecialEdgeToSmall { xy, .. } => {
            added_trees = vec![1 - f.assignment[xy]];
        }
        ReductionCase::CriticalParallelPoor { yz, .. } => added_trees = vec![f.assignment[yz]],
        ReductionCase::CriticalAdjacentThrees { .. } => {
            match normalize_adjacent_threes(g, f, &entry.case) {
                Some((u, true)) => {
                    base = u;
                    added_trees = vec![0, 1, 0];
                }
                _ => return repack(entry),
            }
        }
    }
    let mut assignment = vec![usize::MAX; entry.reduced.edge_count()];
    for (e, mapped) in entry.edge_map.iter().enumerate() {
        if let Some(e2) = mapped {
            assignment[*e2] = base.assignment[e];
        }
    }
    for (&e2, &t) in entry.added.iter().zip(&added_trees) {
        assignment[e2] = t;
    }
    let out = Factorization::new(2, assignment);
    if verify_factorization(&entry.reduced, &out).is_valid() {
        Ok(out)
    } else {
        repack(entry)
    }
}

fn repack(entry: &ReductionEntry) -> Result<Factorization> {
    pack(&entry.reduced, 2)
        .factorization()
        .ok_or_else(|| Error::NotADoubleTree(format!("reduced graph of {:?}", entry.case)))
}

/// Turns a factorization of the reduced graph with imbalance at most five
/// into one of the original graph with imbalance at most five.
pub fn lift(entry: &ReductionEntry, reduced_f: &Factorization) -> Result<Factorization> {
    let gr = &entry.reduced;
    verify_factorization(gr, reduced_f).into_result()?;
    let input = imbalance_of(&reduced_f.degree_table(gr));
    if input > 5 {
        return Err(Error::ImbalancedInput(input));
    }
    let mut a = reduced_f.clone();
    let vmap = |v: Vertex| entry.vertex_map[v].expect("vertex survives the reduction");
    let mut out = vec![usize::MAX; entry.original.edge_count()];

    match entry.case {
        ReductionCase::ParallelTwoVertex { e, f, .. } => {
            out[e] = 0;
            out[f] = 1;
        }
        ReductionCase::TwoVertexSmallNeighbor { z, xy, xz, .. } => {
            let z2 = vmap(z);
            let s1 = if tree_degree(gr, &a, z2, 0) >= tree_degree(gr, &a, z2, 1) {
                0
            } else {
                1
            };
            out[xy] = s1;
            out[xz] = 1 - s1;
        }
        ReductionCase::BigWithTwoTwoNeighbors {
            xy1,
            xy2,
            y1z1,
            y2z2,
            ..
        } => {
            let s2 = a.assignment[entry.added[0]];
            let s1 = a.assignment[entry.added[1]];
            debug_assert_ne!(s1, s2);
            out[xy1] = s1;
            out[y2z2] = s1;
            out[xy2] = s2;
            out[y1z1] = s2;
        }
        ReductionCase::SpecialEdgeToSmall { xy, xz1, xz2, .. } => {
            let s2 = a.assignment[entry.added[0]];
            out[xy] = 1 - s2;
            out[xz1] = s2;
            out[xz2] = s2;
        }
        ReductionCase::CriticalParallelPoor { x, e, f, yz, .. } => {
            let xz = entry.added[0];
            let s1 = a.assignment[xz];
            if tree_degree(gr, &a, vmap(x), s1) == 1 {
                let partner = tree_mapping_edge(gr, &a, s1, 1 - s1, xz)?;
                a.assignment.swap(xz, partner);
            }
            let s1 = a.assignment[xz];
            out[e] = s1;
            out[yz] = s1;
            out[f] = 1 - s1;
        }
        ReductionCase::CriticalAdjacentThrees {
            z1,
            xy1,
            xy2,
            y1y2,
            y1z1,
            y2z2,
            ..
        } => {
            let s1 = a.assignment[entry.added[2]];
            let s2 = 1 - s1;
            let z = vmap(z1);
            let gap = tree_degree(gr, &a, z, s2) as i64 - tree_degree(gr, &a, z, s1) as i64;
            if gap < 5 {
                out[xy1] = s1;
                out[y1y2] = s1;
                out[y2z2] = s1;
                out[xy2] = s2;
                out[y1z1] = s2;
            } else {
                out[xy2] = s1;
                out[y1z1] = s1;
                out[y2z2] = s1;
                out[xy1] = s2;
                out[y1y2] = s2;
            }
        }
    }

    for (e, mapped) in entry.edge_map.iter().enumerate() {
        if let Some(e2) = mapped {
            out[e] = a.assignment[*e2];
        }
    }
    debug_assert!(out.iter().all(|&t| t < 2));
    Ok(Factorization::new(2, out))
}

/// Applies reductions until none is present. Returns the trace, the kernel
/// and a factorization of the kernel.
pub fn reduce_to_kernel(
    g: &MultiGraph,
    f: &Factorization,
) -> Result<(ReductionTrace, MultiGraph, Factorization)> {
    let mut trace = ReductionTrace::default();
    let mut cur_g = g.clone();
    let mut cur_f = f.clone();
    while let Some(case) = find_reduction(&cur_g, &cur_f) {
        let entry = reduce(&cur_g, &case)?;
        cur_f = push_forward(&entry, &cur_f)?;
        cur_g = entry.reduced.clone();
        trace.entries.push(entry);
    }
    Ok((trace, cur_g, cur_f))
}

/// Lifts a kernel factorization back through the whole trace.
pub fn lift_trace(trace: &ReductionTrace, kernel_f: &Factorization) -> Result<Factorization> {
    trace
        .entries
        .iter()
        .rev()
        .try_fold(kernel_f.clone(), |f, entry| lift(entry, &f))
}
