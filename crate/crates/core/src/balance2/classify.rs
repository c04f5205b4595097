//! Degree classes of vertices. All of them depend on the graph only.

use crate::graph::{MultiGraph, Vertex};

/// Vertices of degree at least this are big.
pub const BIG_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThreeKind {
    /// Three (3,big)-edges.
    Rich,
    /// Exactly two (3,big)-edges.
    Poor,
    /// At most one (3,big)-edge.
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexClass {
    pub degree: usize,
    pub big: bool,
    /// Set for 3-vertices only.
    pub three: Option<ThreeKind>,
    /// An 8-vertex with one (2,8)-edge and seven (3,8)-edges.
    pub critical: bool,
}

impl VertexClass {
    pub fn is_rich(&self) -> bool {
        self.three == Some(ThreeKind::Rich)
    }

    pub fn is_poor(&self) -> bool {
        self.three == Some(ThreeKind::Poor)
    }
}

pub fn is_big(g: &MultiGraph, v: Vertex) -> bool {
    g.degree(v) >= BIG_DEGREE
}

pub fn classify(g: &MultiGraph, v: Vertex) -> VertexClass {
    let degree = g.degree(v);
    let three = (degree == 3).then(|| {
        let to_big = g
            .incident(v)
            .iter()
            .filter(|&&e| is_big(g, g.other_end(e, v)))
            .count();
        match to_big {
            3 => ThreeKind::Rich,
            2 => ThreeKind::Poor,
            _ => ThreeKind::Neither,
        }
    });
    let critical = degree == 8 && {
        let ends: Vec<usize> = g
            .incident(v)
            .iter()
            .map(|&e| g.degree(g.other_end(e, v)))
            .collect();
        ends.iter().filter(|&&d| d == 2).count() == 1 && ends.iter().filter(|&&d| d == 3).count() == 7
    };
    VertexClass {
        degree,
        big: degree >= BIG_DEGREE,
        three,
        critical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    /// Star at u = 0 over 1..=8 plus the path 0,1,...,8.
    pub(crate) fn star_path() -> MultiGraph {
        let mut edges: Vec<(usize, usize)> = (1..=8).map(|v| (0, v)).collect();
        edges.extend((0..8).map(|v| (v, v + 1)));
        build_graph(9, &edges).unwrap()
    }

    #[test]
    fn double_edge_is_small_two_vertex() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        for v in 0..2 {
            let c = classify(&g, v);
            assert_eq!((c.degree, c.big, c.three, c.critical), (2, false, None, false));
        }
    }

    #[test]
    fn k4_vertices_are_plain_threes() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap();
        for v in 0..4 {
            let c = classify(&g, v);
            assert!(!c.big);
            assert_eq!(c.three, Some(ThreeKind::Neither));
        }
    }

    #[test]
    fn star_path_classes() {
        let g = star_path();
        let u = classify(&g, 0);
        assert!(u.big && u.degree == 9 && !u.critical);
        assert_eq!(classify(&g, 8).degree, 2);
        // v1 has both of its edges to u doubled up, so two (3,big)-edges
        assert!(classify(&g, 1).is_poor());
        for v in 2..=7 {
            assert_eq!(classify(&g, v).three, Some(ThreeKind::Neither), "v{v}");
        }
    }

    #[test]
    fn critical_vertex() {
        // hub 0 with a 2-vertex neighbour and seven 3-vertex neighbours
        let mut edges = vec![(0, 1), (1, 9)];
        for v in 2..=8 {
            edges.push((0, v));
        }
        edges.extend([(2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (2, 9)]);
        let g = build_graph(10, &edges).unwrap();
        assert!(classify(&g, 0).critical);
        assert!(classify(&g, 2).three.is_some());
    }
}
