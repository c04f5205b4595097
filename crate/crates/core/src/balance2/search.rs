//! Steepest descent on the squared degree gaps, one valid exchange at a time.

use std::collections::BTreeMap;

use crate::exchange::TreePair;
use crate::graph::{imbalance_of, EdgeId, Factorization, MultiGraph};

/// Sum over vertices of the squared difference of the two tree degrees.
pub fn potential(g: &MultiGraph, f: &Factorization) -> u64 {
    f.degree_table(g)
        .iter()
        .map(|d| {
            let gap = d[0] as i64 - d[1] as i64;
            (gap * gap) as u64
        })
        .sum()
}

/// Change of the potential when `e` leaves tree 0 and `partner` leaves tree 1.
fn swap_delta(g: &MultiGraph, gaps: &[i64], e: EdgeId, partner: EdgeId) -> i64 {
    let mut shift: BTreeMap<usize, i64> = BTreeMap::new();
    let (a, b) = g.endpoints(e);
    let (c, d) = g.endpoints(partner);
    for v in [a, b] {
        *shift.entry(v).or_default() -= 2;
    }
    for v in [c, d] {
        *shift.entry(v).or_default() += 2;
    }
    shift
        .into_iter()
        .map(|(v, s)| {
            let old = gaps[v];
            let new = old + s;
            new * new - old * old
        })
        .sum()
}

/// Applies the best potential-decreasing exchange until the imbalance is at
/// most `target` or no exchange helps. The potential strictly decreases, so
/// this stops after at most `potential(g, f)` moves.
pub fn local_search(g: &MultiGraph, f: &Factorization, target: u64) -> Factorization {
    let mut cur = f.clone();
    loop {
        let table = cur.degree_table(g);
        if imbalance_of(&table) <= target {
            return cur;
        }
        let gaps: Vec<i64> = table.iter().map(|d| d[0] as i64 - d[1] as i64).collect();
        let Ok(pair) = TreePair::new(g, &cur, 0, 1) else {
            return cur;
        };
        let mut best: Option<(i64, EdgeId, EdgeId)> = None;
        for e in cur.tree(0) {
            for partner in pair.partners(g, e) {
                let delta = swap_delta(g, &gaps, e, partner);
                if delta < 0 && best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, e, partner));
                }
            }
        }
        match best {
            Some((_, e, partner)) => cur.assignment.swap(e, partner),
            None => return cur,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, verify_factorization};

    #[test]
    fn double_star_reaches_zero() {
        // u=0, w=1, x=2, y=3; u-star then w-star, uw doubled
        let g = build_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 0), (1, 2), (1, 3)]).unwrap();
        let f = Factorization::new(2, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(imbalance_of(&f.degree_table(&g)), 2);
        let out = local_search(&g, &f, 0);
        assert!(verify_factorization(&g, &out).is_valid());
        assert_eq!(imbalance_of(&out.degree_table(&g)), 0);
        assert!(potential(&g, &out) < potential(&g, &f));
    }

    #[test]
    fn balanced_input_is_untouched() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)]).unwrap();
        let f = Factorization::new(2, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(imbalance_of(&f.degree_table(&g)), 1);
        assert_eq!(local_search(&g, &f, 1), f);
    }

    #[test]
    fn double_edge_returns_immediately() {
        let g = build_graph(2, &[(0, 1), (0, 1)]).unwrap();
        let f = Factorization::new(2, vec![0, 1]);
        assert_eq!(local_search(&g, &f, 0), f);
    }
}
