//! Balancing `k` trees at once.
//!
//! A constant `c` is `k`-feasible when every `k`-multiple tree has a
//! factorization with `|d_T(v) - d(v)/k| <= c` for every tree `T` and vertex
//! `v`. Two constructions grow feasible constants: pairing the trees of two
//! halves (even `k`), and extracting one well-balanced tree by iterated
//! rebalancing before recursing on the rest (odd `k`). [`balance_k`]
//! follows exactly that recursion, so its output certifies [`feasible_constant`].

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::balance2::{balance_double_tree_with, Balance2Options};
use crate::error::{Error, Result};
use crate::graph::{balance_report, verify_factorization, BalanceReport, EdgeId, Factorization, MultiGraph};
use crate::io::persist_instance;
use crate::packing::{pack, PackingResult};
use crate::rat::{int, ratio};

/// The feasible constant produced by the recursion: `c_1 = 0`,
/// `c_2m = c_m + 5/2`, `c_2m+1 = (1 + 1/(2m+1)) c_2m + 5`.
pub fn feasible_constant(k: usize) -> BigRational {
    assert!(k >= 1, "feasible constants start at k = 1");
    static MEMO: OnceLock<Mutex<HashMap<usize, BigRational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(c) = memo.lock().unwrap().get(&k) {
        return c.clone();
    }
    let c = if k == 1 {
        BigRational::zero()
    } else if k.is_multiple_of(2) {
        feasible_constant(k / 2) + ratio(5, 2)
    } else {
        (BigRational::one() + ratio(1, k as i64)) * feasible_constant(k - 1) + int(5)
    };
    memo.lock().unwrap().insert(k, c.clone());
    c
}

/// Degree bounds for the first tree while extracting it from a
/// `(k+1)`-multiple tree.
#[derive(Clone, Debug)]
pub struct BaumBounds {
    pub k: usize,
    pub c_k: BigRational,
}

impl BaumBounds {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            c_k: feasible_constant(k),
        }
    }

    /// `1/2 - 1/2k`.
    fn rate(&self) -> BigRational {
        ratio(1, 2) - ratio(1, 2 * self.k as i64)
    }

    /// `c_k/2 + 5/2`.
    fn spread(&self) -> BigRational {
        &self.c_k / int(2) + ratio(5, 2)
    }

    /// `(x^0, y^0) = (0, d)`.
    pub fn initial(&self, d: usize) -> (BigRational, BigRational) {
        (BigRational::zero(), int(d as i64))
    }

    /// `x' = x(1/2 - 1/2k) + d/2k - (c_k/2 + 5/2)`, and `y'` with `+`.
    pub fn step(&self, d: usize, x: &BigRational, y: &BigRational) -> (BigRational, BigRational) {
        let base = ratio(d as i64, 2 * self.k as i64);
        let rate = self.rate();
        let spread = self.spread();
        (
            x * &rate + &base - &spread,
            y * &rate + &base + &spread,
        )
    }

    /// Fixed points of [`Self::step`], as `offset / (1 - rate)`.
    pub fn fixed_points(&self, d: usize) -> (BigRational, BigRational) {
        let base = ratio(d as i64, 2 * self.k as i64);
        let denom = BigRational::one() - self.rate();
        (
            (&base - self.spread()) / &denom,
            (&base + self.spread()) / &denom,
        )
    }

    /// `d/(k+1) -+ k(c_k+5)/(k+1)`.
    pub fn limits(&self, d: usize) -> (BigRational, BigRational) {
        let k1 = int(self.k as i64 + 1);
        let centre = int(d as i64) / &k1;
        let half = int(self.k as i64) * (&self.c_k + int(5)) / &k1;
        (&centre - &half, centre + half)
    }

    /// How far `deg` lies outside the limit window; zero or negative inside.
    pub fn slack(&self, d: usize, deg: usize) -> BigRational {
        let (lo, hi) = self.limits(d);
        let deg = int(deg as i64);
        std::cmp::max(&lo - &deg, deg - hi)
    }
}

#[derive(Clone, Debug)]
pub struct BalanceKOptions {
    /// Rebalancing rounds allowed per first-tree extraction.
    pub max_iters: usize,
    /// Follow the per-vertex degree bounds and count violations.
    pub track_bounds: bool,
    /// Keep one record per extraction round.
    pub log: bool,
    /// Where instances that hit the round cap are written.
    pub persist_dir: Option<PathBuf>,
    pub balance2: Balance2Options,
}

impl Default for BalanceKOptions {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            track_bounds: false,
            log: false,
            persist_dir: None,
            balance2: Balance2Options::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    /// Number of trees of the graph being split.
    pub trees: usize,
    pub iteration: usize,
    /// Largest distance of a first-tree degree outside its window.
    pub max_slack: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Rebalancing rounds over all extractions.
    pub iterations: usize,
    pub extractions: usize,
    pub sandwich_checks: usize,
    pub sandwich_violations: usize,
    pub log: Vec<IterationRecord>,
}

impl RunStats {
    fn absorb(&mut self, other: RunStats) {
        self.iterations += other.iterations;
        self.extractions += other.extractions;
        self.sandwich_checks += other.sandwich_checks;
        self.sandwich_violations += other.sandwich_violations;
        self.log.extend(other.log);
    }
}

#[derive(Clone, Debug)]
pub struct BalanceKOutcome {
    pub factorization: Factorization,
    pub report: BalanceReport,
    pub stats: RunStats,
}

pub fn balance_k(g: &MultiGraph, k: usize) -> Result<(Factorization, BalanceReport)> {
    let out = balance_k_with(g, k, None, &BalanceKOptions::default())?;
    Ok((out.factorization, out.report))
}

/// Balances `g` into `k` trees with deviation at most `feasible_constant(k)`.
pub fn balance_k_with(
    g: &MultiGraph,
    k: usize,
    start: Option<&Factorization>,
    opts: &BalanceKOptions,
) -> Result<BalanceKOutcome> {
    if k == 0 {
        return Err(Error::NotKMultipleTree {
            k,
            reason: "k must be positive".into(),
        });
    }
    let start = match start {
        Some(f) => {
            verify_factorization(g, f).into_result()?;
            if f.k != k {
                return Err(Error::InvalidFactorization(format!("expected {k} trees, got {}", f.k)));
            }
            f.clone()
        }
        None => match pack(g, k) {
            PackingResult::Factorization(f) => f,
            PackingResult::Deficiency(d) => {
                return Err(Error::NotKMultipleTree {
                    k,
                    reason: d.to_string(),
                })
            }
        },
    };
    let mut stats = RunStats::default();
    let trees = balance_trees(g, k, start.trees(), opts, &mut stats)?;
    let factorization = Factorization::from_trees(g.edge_count(), &trees);
    let report = balance_report(g, &factorization)?;
    let bound = feasible_constant(k);
    assert!(
        report.max_deviation <= bound,
        "deviation {} exceeds the feasible constant {} for k = {k}",
        report.max_deviation,
        bound
    );
    Ok(BalanceKOutcome {
        factorization,
        report,
        stats,
    })
}

/// Recursive core on edge lists of `g`.
fn balance_trees(
    g: &MultiGraph,
    k: usize,
    start: Vec<Vec<EdgeId>>,
    opts: &BalanceKOptions,
    stats: &mut RunStats,
) -> Result<Vec<Vec<EdgeId>>> {
    debug_assert_eq!(start.len(), k);
    match k {
        1 => Ok(start),
        2 => balance_pair(g, &start[0], &start[1], &opts.balance2),
        _ if k.is_multiple_of(2) => {
            let (a, b) = start.split_at(k / 2);
            let ((ra, sa), (rb, sb)) = rayon::join(
                || balance_part(g, a.to_vec(), opts),
                || balance_part(g, b.to_vec(), opts),
            );
            let (ra, rb) = (ra?, rb?);
            stats.absorb(sa);
            stats.absorb(sb);
            combine_pairs(g, &ra, &rb, &opts.balance2)
        }
        _ => {
            let extracted = extract_trees(g, k, start, opts, stats)?;
            let first = extracted[0].clone();
            let rest = balance_part_into(g, extracted[1..].to_vec(), opts, stats)?;
            let mut out = Vec::with_capacity(k);
            out.push(first);
            out.extend(rest);
            Ok(out)
        }
    }
}

/// Balances the trees `part` on the subgraph they cover.
fn balance_part(
    g: &MultiGraph,
    part: Vec<Vec<EdgeId>>,
    opts: &BalanceKOptions,
) -> (Result<Vec<Vec<EdgeId>>>, RunStats) {
    let mut stats = RunStats::default();
    let out = balance_part_into(g, part, opts, &mut stats);
    (out, stats)
}

fn balance_part_into(
    g: &MultiGraph,
    part: Vec<Vec<EdgeId>>,
    opts: &BalanceKOptions,
    stats: &mut RunStats,
) -> Result<Vec<Vec<EdgeId>>> {
    let all: Vec<EdgeId> = part.iter().flatten().copied().collect();
    let sub = g.edge_subgraph(&all);
    let local: Vec<Vec<EdgeId>> = part.iter().map(|t| sub.localize(t)).collect();
    let out = balance_trees(&sub.graph, part.len(), local, opts, stats)?;
    Ok(out.iter().map(|t| sub.globalize(t)).collect())
}

/// 2-balances the double tree formed by `a` and `b`, starting from that split.
fn balance_pair(
    g: &MultiGraph,
    a: &[EdgeId],
    b: &[EdgeId],
    opts: &Balance2Options,
) -> Result<Vec<Vec<EdgeId>>> {
    let all: Vec<EdgeId> = a.iter().chain(b).copied().collect();
    let sub = g.edge_subgraph(&all);
    let warm = Factorization::from_trees(
        sub.graph.edge_count(),
        &[sub.localize(a), sub.localize(b)],
    );
    let out = balance_double_tree_with(&sub.graph, Some(&warm), opts)?;
    Ok(out
        .factorization
        .trees()
        .iter()
        .map(|t| sub.globalize(t))
        .collect())
}

fn combine_pairs(
    g: &MultiGraph,
    a: &[Vec<EdgeId>],
    b: &[Vec<EdgeId>],
    opts: &Balance2Options,
) -> Result<Vec<Vec<EdgeId>>> {
    let k = a.len();
    let pairs: Vec<Vec<Vec<EdgeId>>> = (0..k)
        .into_par_iter()
        .map(|i| balance_pair(g, &a[i], &b[i], opts))
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); 2 * k];
    for (i, mut pair) in pairs.into_iter().enumerate() {
        out[k + i] = pair.pop().unwrap();
        out[i] = pair.pop().unwrap();
    }
    Ok(out)
}

/// Pairs tree `i` of `a` with tree `i` of `b` and 2-balances each pair.
/// `a` and `b` must be factorizations of two edge-disjoint halves of `g`.
/// Output tree `i` and tree `k + i` come from pair `i`.
pub fn combine_double(
    g: &MultiGraph,
    a: &[Vec<EdgeId>],
    b: &[Vec<EdgeId>],
    opts: &Balance2Options,
) -> Result<Factorization> {
    let k = a.len();
    let mut all: Vec<Vec<EdgeId>> = a.to_vec();
    all.extend(b.iter().cloned());
    let mut seen = vec![false; g.edge_count()];
    let disjoint = all.iter().flatten().all(|&e| e < seen.len() && !std::mem::replace(&mut seen[e], true));
    let f = Factorization::from_trees(g.edge_count(), &all);
    if k == 0 || b.len() != k || !disjoint || !seen.iter().all(|&s| s) || !verify_factorization(g, &f).is_valid() {
        return Err(Error::InvalidHalves(k));
    }
    let trees = combine_pairs(g, a, b, opts)?;
    Ok(Factorization::from_trees(g.edge_count(), &trees))
}

#[derive(Clone, Debug)]
pub struct ExtractOutcome {
    pub factorization: Factorization,
    pub stats: RunStats,
}

/// Rebalances until the first tree of a `(k+1)`-factorization has every
/// degree within `d(v)/(k+1) -+ k(c_k+5)/(k+1)`.
pub fn extract_first_tree(
    g: &MultiGraph,
    k_plus_1: usize,
    f0: &Factorization,
    opts: &BalanceKOptions,
) -> Result<ExtractOutcome> {
    if k_plus_1 < 2 {
        return Err(Error::NotKMultipleTree {
            k: k_plus_1,
            reason: "extraction needs at least two trees".into(),
        });
    }
    verify_factorization(g, f0).into_result()?;
    if f0.k != k_plus_1 {
        return Err(Error::InvalidFactorization(format!(
            "expected {k_plus_1} trees, got {}",
            f0.k
        )));
    }
    let mut stats = RunStats::default();
    let trees = extract_trees(g, k_plus_1, f0.trees(), opts, &mut stats)?;
    Ok(ExtractOutcome {
        factorization: Factorization::from_trees(g.edge_count(), &trees),
        stats,
    })
}

fn tree_degrees(g: &MultiGraph, tree: &[EdgeId]) -> Vec<usize> {
    let mut d = vec![0; g.vertex_count()];
    for &e in tree {
        let (u, v) = g.endpoints(e);
        d[u] += 1;
        d[v] += 1;
    }
    d
}

fn extract_trees(
    g: &MultiGraph,
    k_plus_1: usize,
    start: Vec<Vec<EdgeId>>,
    opts: &BalanceKOptions,
    stats: &mut RunStats,
) -> Result<Vec<Vec<EdgeId>>> {
    let k = k_plus_1 - 1;
    let bounds = BaumBounds::new(k);
    let degrees = g.degrees();
    let mut trees = start;
    let mut sandwich: Option<Vec<(BigRational, BigRational)>> = opts
        .track_bounds
        .then(|| degrees.iter().map(|&d| bounds.initial(d)).collect());
    stats.extractions += 1;

    for j in 0..=opts.max_iters {
        let first = tree_degrees(g, &trees[0]);
        if let Some(xy) = &sandwich {
            for (v, (x, y)) in xy.iter().enumerate() {
                let deg = int(first[v] as i64);
                stats.sandwich_checks += 1;
                if deg < *x || deg > *y {
                    stats.sandwich_violations += 1;
                }
            }
        }
        let max_slack = degrees
            .iter()
            .zip(&first)
            .map(|(&d, &deg)| bounds.slack(d, deg))
            .max()
            .unwrap_or_else(BigRational::zero);
        let settled = max_slack <= BigRational::zero();
        if opts.log {
            stats.log.push(IterationRecord {
                trees: k_plus_1,
                iteration: j,
                max_slack,
            });
        }
        if settled {
            return Ok(trees);
        }
        if j == opts.max_iters {
            break;
        }

        // balance the other k trees, then pair the first tree with one of them
        let rest = balance_part_into(g, trees[1..].to_vec(), opts, stats)?;
        let pair = balance_pair(g, &trees[0], &rest[0], &opts.balance2)?;
        let mut next = pair;
        next.extend(rest.into_iter().skip(1));
        trees = next;
        stats.iterations += 1;

        if let Some(xy) = &mut sandwich {
            for (v, slot) in xy.iter_mut().enumerate() {
                *slot = bounds.step(degrees[v], &slot.0, &slot.1);
            }
        }
    }
    Err(Error::IterationCapExceeded {
        cap: opts.max_iters,
        persisted: persist_instance(opts.persist_dir.as_deref(), "iteration-cap", g, k_plus_1),
    })
}
