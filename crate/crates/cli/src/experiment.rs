//! Batch runs over a grid of generated instances.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Context;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Deserialize;
use treebal::balance2::{balance_double_tree_with, BOUND};
use treebal::balancek::{balance_k_with, feasible_constant, BalanceKOptions};
use treebal::oracle::{generate, GeneratorSpec, Model};
use treebal::rat::{int, to_decimal};
use treebal::{BalanceReport, MultiGraph};

/// Bumped whenever the column set changes.
const CSV_VERSION: u32 = 1;
const COLUMNS: &str =
    "id,n,m,k,seed,model,imbalance,deviation,bound,bound_kind,iterations,wall_ms,status";

#[derive(Clone, Debug)]
pub struct Suite {
    pub models: Vec<Model>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    /// Seeds per grid point, counted up from the global seed.
    pub seeds: u64,
    pub jobs: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    models: Option<Vec<String>>,
    n: Vec<usize>,
    k: Vec<usize>,
    #[serde(default = "one")]
    seeds: u64,
    jobs: Option<usize>,
}

fn one() -> u64 {
    1
}

impl Default for Suite {
    fn default() -> Self {
        Self {
            models: Model::ALL.to_vec(),
            n: vec![10, 40, 120],
            k: vec![2, 3, 4, 5],
            seeds: 2,
            jobs: None,
        }
    }
}

impl Suite {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading suite {}", path.display()))?;
        let raw: SuiteFile = toml::from_str(&text).with_context(|| format!("parsing suite {}", path.display()))?;
        let models = match raw.models {
            Some(names) => names
                .iter()
                .map(|s| s.parse::<Model>().map_err(anyhow::Error::msg))
                .collect::<anyhow::Result<_>>()?,
            None => Model::ALL.to_vec(),
        };
        if raw.n.contains(&0) || raw.k.contains(&0) {
            anyhow::bail!("suite sizes must be positive");
        }
        Ok(Self {
            models,
            n: raw.n,
            k: raw.k,
            seeds: raw.seeds,
            jobs: raw.jobs,
        })
    }

    fn grid(&self, base_seed: u64) -> Vec<GeneratorSpec> {
        let mut out = Vec::new();
        for &model in &self.models {
            for &n in &self.n {
                for &k in &self.k {
                    for s in 0..self.seeds {
                        out.push(GeneratorSpec { model, n, k, seed: base_seed.wrapping_add(s) });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub id: usize,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    /// `None` for instances read from a file.
    pub model: Option<Model>,
    pub imbalance: Option<u64>,
    pub deviation: Option<BigRational>,
    pub iterations: usize,
    pub wall: Duration,
    /// `ok` or an error tag.
    pub status: String,
}

/// Certified bound for `k` trees: imbalance 5 for two trees, deviation
/// `c_k` otherwise.
fn certified(k: usize) -> (BigRational, &'static str) {
    if k == 2 {
        (int(BOUND as i64), "imbalance")
    } else {
        (feasible_constant(k), "deviation")
    }
}

impl ExperimentRow {
    pub fn single(g: &MultiGraph, k: usize, seed: u64, r: &BalanceReport, iterations: usize, wall: Duration) -> Self {
        let mut row = Self {
            id: 0,
            n: g.vertex_count(),
            m: g.edge_count(),
            k,
            seed,
            model: None,
            imbalance: Some(r.max_imbalance),
            deviation: Some(r.max_deviation.clone()),
            iterations,
            wall,
            status: "ok".into(),
        };
        if !row.within_bound() {
            row.status = "BoundExceeded".into();
        }
        row
    }

    fn within_bound(&self) -> bool {
        let (bound, kind) = certified(self.k);
        match (kind, self.imbalance, &self.deviation) {
            ("imbalance", Some(i), _) => int(i as i64) <= bound,
            (_, _, Some(d)) => *d <= bound,
            _ => false,
        }
    }

    pub fn csv_header() -> String {
        format!("# treebal experiment csv v{CSV_VERSION}\n{COLUMNS}\n")
    }

    pub fn csv_line(&self) -> String {
        let (bound, kind) = certified(self.k);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.id,
            self.n,
            self.m,
            self.k,
            self.seed,
            self.model.map_or("file", |m| m.name()),
            self.imbalance.map(|i| i.to_string()).unwrap_or_default(),
            self.deviation.as_ref().map(|d| to_decimal(d, 4)).unwrap_or_default(),
            to_decimal(&bound, 4),
            kind,
            self.iterations,
            self.wall.as_millis(),
            self.status
        )
    }

    pub fn text_line(&self) -> String {
        let (bound, kind) = certified(self.k);
        match (&self.imbalance, &self.deviation) {
            (Some(i), Some(d)) => format!(
                "#{} {} n={} k={} seed={}: imbalance {i}, deviation {}, {kind} bound {}, {}\n",
                self.id,
                self.model.map_or("file", |m| m.name()),
                self.n,
                self.k,
                self.seed,
                to_decimal(d, 4),
                to_decimal(&bound, 4),
                self.status
            ),
            _ => format!(
                "#{} {} n={} k={} seed={}: {}\n",
                self.id,
                self.model.map_or("file", |m| m.name()),
                self.n,
                self.k,
                self.seed,
                self.status
            ),
        }
    }
}

fn run_one(id: usize, spec: GeneratorSpec, opts: &BalanceKOptions) -> ExperimentRow {
    let (g, _) = generate(&spec);
    let start = Instant::now();
    let result = if spec.k == 2 {
        balance_double_tree_with(&g, None, &opts.balance2).map(|o| (o.report, 0))
    } else {
        balance_k_with(&g, spec.k, None, opts).map(|o| (o.report, o.stats.iterations))
    };
    let wall = start.elapsed();
    let mut row = match result {
        Ok((report, iterations)) => ExperimentRow::single(&g, spec.k, spec.seed, &report, iterations, wall),
        Err(e) => ExperimentRow {
            id,
            n: g.vertex_count(),
            m: g.edge_count(),
            k: spec.k,
            seed: spec.seed,
            model: None,
            imbalance: None,
            deviation: None,
            iterations: 0,
            wall,
            status: e.tag().into(),
        },
    };
    row.id = id;
    row.model = Some(spec.model);
    row
}

/// Rows in grid order, computed on `jobs` worker threads.
pub fn run_suite(
    suite: &Suite,
    base_seed: u64,
    jobs: Option<usize>,
    opts: &BalanceKOptions,
) -> anyhow::Result<Vec<ExperimentRow>> {
    let grid = suite.grid(base_seed);
    let work = || {
        grid.par_iter()
            .enumerate()
            .map(|(id, &spec)| run_one(id, spec, opts))
            .collect()
    };
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(work)),
        None => Ok(work()),
    }
}

pub fn exit_code(rows: &[ExperimentRow]) -> ExitCode {
    let research = ["BoundNotCertified", "IterationCapExceeded", "BoundExceeded"];
    if rows.iter().any(|r| research.contains(&r.status.as_str())) {
        ExitCode::from(3)
    } else if rows.iter().any(|r| r.status != "ok") {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
