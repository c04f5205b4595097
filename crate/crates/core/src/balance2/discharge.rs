//! Charge redistribution from big vertices to their 2- and 3-vertex neighbours.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exchange::special_edge_unchecked;
use crate::graph::{Factorization, MultiGraph, Vertex};
use crate::rat::{int, ratio};

use super::classify::{classify, is_big};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeReport {
    pub charges: Vec<BigRational>,
    pub min: BigRational,
    pub total: BigRational,
}

impl ChargeReport {
    pub fn argmin(&self) -> Vertex {
        (0..self.charges.len())
            .min_by(|&a, &b| self.charges[a].cmp(&self.charges[b]))
            .unwrap_or(0)
    }
}

/// Every vertex starts with its degree. A big vertex sends along each edge
/// to a 2-vertex 1, to a rich 3-vertex 1/2 over its special edge and 1/4
/// otherwise, and to any other 3-vertex 1/2.
pub fn discharge_audit(g: &MultiGraph, f: &Factorization) -> ChargeReport {
    let n = g.vertex_count();
    let mut charges: Vec<BigRational> = (0..n).map(|v| int(g.degree(v) as i64)).collect();
    let half = ratio(1, 2);
    let quarter = ratio(1, 4);
    let special: Vec<Option<usize>> = (0..n)
        .map(|v| {
            (g.degree(v) == 3)
                .then(|| special_edge_unchecked(g, f, v).ok().map(|(e, _)| e))
                .flatten()
        })
        .collect();

    for x in (0..n).filter(|&x| is_big(g, x)) {
        for &e in g.incident(x) {
            let y = g.other_end(e, x);
            let amount = match g.degree(y) {
                2 => BigRational::one(),
                3 if classify(g, y).is_rich() => {
                    if special[y] == Some(e) {
                        half.clone()
                    } else {
                        quarter.clone()
                    }
                }
                3 => half.clone(),
                _ => continue,
            };
            charges[x] -= &amount;
            charges[y] += amount;
        }
    }
    let total = charges.iter().fold(BigRational::zero(), |acc, c| acc + c);
    let min = charges.iter().min().cloned().unwrap_or_else(BigRational::zero);
    ChargeReport {
        charges,
        min,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn no_big_vertices_means_no_transfers() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let r = discharge_audit(&g, &Factorization::new(2, vec![0, 1]));
        assert_eq!(r.charges, vec![int(2), int(2)]);
        assert_eq!(r.total, int(4));

        let k4 = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap();
        let r = discharge_audit(&k4, &Factorization::new(2, vec![0, 0, 0, 1, 1, 1]));
        assert_eq!(r.charges, vec![int(3); 4]);
        assert_eq!(r.total, int(12));
    }

    #[test]
    fn star_path_charges() {
        let mut edges: Vec<(usize, usize)> = (1..=8).map(|v| (0, v)).collect();
        edges.extend((0..8).map(|v| (v, v + 1)));
        let g = build_graph(9, &edges).unwrap();
        let f = Factorization::new(2, [vec![0; 8], vec![1; 8]].concat());
        let r = discharge_audit(&g, &f);
        // v1 is joined to u twice, so it is poor and receives 1/2 twice
        let mut expected = vec![int(4), int(4)];
        expected.extend(std::iter::repeat_n(ratio(7, 2), 6));
        expected.push(int(3));
        assert_eq!(r.charges, expected);
        assert_eq!(r.total, int(32));
        assert_eq!(r.min, int(3));
        assert_eq!(r.argmin(), 8);
    }

    #[test]
    fn rich_vertex_special_split() {
        // three hubs 0,1,2 of degree >= 8 share the 3-vertex 3
        let mut edges = vec![(3, 0), (3, 1), (3, 2)];
        for hub in 0..3 {
            for leaf in 0..7 {
                edges.push((hub, 4 + hub * 7 + leaf));
            }
        }
        let g = build_graph(25, &edges).unwrap();
        assert!(classify(&g, 3).is_rich());
        // edge 0 alone in tree 0 at vertex 3
        let mut assignment = vec![1; g.edge_count()];
        assignment[0] = 0;
        let r = discharge_audit(&g, &Factorization::new(2, assignment));
        assert_eq!(r.charges[3], int(3) + ratio(1, 2) + ratio(1, 4) + ratio(1, 4));
        assert_eq!(r.total, int(2 * g.edge_count() as i64));
    }
}
