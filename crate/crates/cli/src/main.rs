//! `treebal` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 contract failure, 3 research event.

mod experiment;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use treebal::balance2::{balance_double_tree_with, discharge_audit, Balance2Options};
use treebal::balancek::{balance_k_with, feasible_constant, BalanceKOptions};
use treebal::io::{read_factorization_file, read_graph_file, write_factorization, write_graph, GraphFile};
use treebal::oracle::{generate, optimal_imbalance_with, search_lower_bound, GeneratorSpec, Model};
use treebal::rat::to_decimal;
use treebal::{balance_report, pack, verify_factorization, BalanceReport, Error, PackingResult};

use crate::experiment::{ExperimentRow, Suite};

#[derive(Parser, Debug)]
#[command(name = "treebal", version, about = "Balanced spanning-tree factorizations of multigraphs")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rebalancing rounds allowed per first-tree extraction.
    #[arg(long, global = true, default_value_t = 1000)]
    max_iters: usize,
    /// Main output file (factorization, graph, or CSV) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory receiving instances that trigger research events.
    #[arg(long, global = true, default_value = "research-events")]
    persist_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a factorization splits the graph into spanning trees.
    Verify { graph: PathBuf, factorization: PathBuf },
    /// Split a k-multiple tree into k spanning trees.
    Pack {
        graph: PathBuf,
        /// Number of trees; defaults to the value in the graph header.
        #[arg(short)]
        k: Option<usize>,
    },
    /// Two spanning trees with degree difference at most 5 everywhere.
    Balance2 {
        graph: PathBuf,
        /// Start from this factorization instead of a fresh packing.
        #[arg(long)]
        start: Option<PathBuf>,
    },
    /// k spanning trees with every degree near d(v)/k.
    Balancek {
        graph: PathBuf,
        #[arg(short)]
        k: Option<usize>,
        /// Start from this factorization instead of a fresh packing.
        #[arg(long)]
        start: Option<PathBuf>,
    },
    /// Discharging charges of a double-tree factorization.
    Audit { graph: PathBuf, factorization: PathBuf },
    /// Optimal imbalance by exhaustive enumeration.
    Oracle {
        graph: PathBuf,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, default_value_t = 18)]
        edge_cap: usize,
    },
    /// Random k-multiple tree from a planted factorization.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value = "uniform-random-trees")]
        model: Model,
        /// Also write the planted factorization here.
        #[arg(long)]
        planted: Option<PathBuf>,
    },
    /// Run a grid of generated instances and report one row each.
    Experiment {
        /// `default` or a TOML file with `models`, `n`, `k`, `seeds`.
        #[arg(long, default_value = "default")]
        suite: String,
        /// Worker threads; defaults to the suite value, then to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Look for double trees whose optimal imbalance reaches a target.
    Search {
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 14)]
        max_edges: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> ExitCode {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_research_event() => {
            if let Some(p) = persisted_path(e) {
                eprintln!("instance written to {}", p.display());
            }
            ExitCode::from(3)
        }
        Some(Error::Io(_)) | None => ExitCode::from(1),
        Some(_) => ExitCode::from(2),
    }
}

fn persisted_path(e: &Error) -> Option<&Path> {
    match e {
        Error::BoundNotCertified { persisted, .. } | Error::IterationCapExceeded { persisted, .. } => {
            persisted.as_deref()
        }
        _ => None,
    }
}

fn read_graph(path: &Path) -> anyhow::Result<GraphFile> {
    read_graph_file(path).with_context(|| format!("reading graph {}", path.display()))
}

/// Writes `text` to `--out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Report lines go to stdout. The factorization follows them on stdout, or
/// goes to `--out`. Report lines are comments so stdout parses as a
/// factorization file either way.
fn emit_with_report(cli: &Cli, report: &str, body: &str) -> anyhow::Result<()> {
    let commented: String = report.lines().map(|l| format!("# {l}\n")).collect();
    match &cli.out {
        Some(_) => {
            print!("{commented}");
            emit(cli.out.as_deref(), body)
        }
        None => emit(None, &(commented + body)),
    }
}

fn report_text(r: &BalanceReport) -> String {
    format!(
        "max imbalance {}\nmax deviation {}\n",
        r.max_imbalance,
        to_decimal(&r.max_deviation, 4)
    )
}

fn kopts(cli: &Cli) -> BalanceKOptions {
    BalanceKOptions {
        max_iters: cli.max_iters,
        persist_dir: Some(cli.persist_dir.clone()),
        balance2: b2opts(cli),
        ..Default::default()
    }
}

fn b2opts(cli: &Cli) -> Balance2Options {
    Balance2Options {
        persist_dir: Some(cli.persist_dir.clone()),
        ..Default::default()
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Verify { graph, factorization } => {
            let gf = read_graph(graph)?;
            let f = read_factorization_file(factorization, gf.graph.edge_count(), gf.k)?;
            verify_factorization(&gf.graph, &f).into_result()?;
            println!("valid");
            Ok(ExitCode::SUCCESS)
        }
        Command::Pack { graph, k } => {
            let gf = read_graph(graph)?;
            let k = k.unwrap_or(gf.k);
            match pack(&gf.graph, k) {
                PackingResult::Factorization(f) => {
                    emit_with_report(cli, &format!("{k} spanning trees\n"), &write_factorization(&f))?;
                    Ok(ExitCode::SUCCESS)
                }
                PackingResult::Deficiency(d) => Err(Error::NotKMultipleTree {
                    k,
                    reason: d.to_string(),
                }
                .into()),
            }
        }
        Command::Balance2 { graph, start } => {
            let gf = read_graph(graph)?;
            let start = match start {
                Some(p) => Some(read_factorization_file(p, gf.graph.edge_count(), 2)?),
                None => None,
            };
            let t = std::time::Instant::now();
            let out = balance_double_tree_with(&gf.graph, start.as_ref(), &b2opts(cli))?;
            if cli.format == Some(Format::Csv) {
                let row = ExperimentRow::single(&gf.graph, 2, cli.seed, &out.report, 0, t.elapsed());
                emit(None, &(ExperimentRow::csv_header() + &row.csv_line()))?;
                if let Some(p) = &cli.out {
                    emit(Some(p), &write_factorization(&out.factorization))?;
                }
            } else {
                let mut report = report_text(&out.report);
                writeln!(
                    report,
                    "reductions {}, kernel {} vertices {} edges{}",
                    out.reductions,
                    out.kernel_vertices,
                    out.kernel_edges,
                    if out.used_enumeration { ", kernel solved exhaustively" } else { "" }
                )?;
                emit_with_report(cli, &report, &write_factorization(&out.factorization))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Balancek { graph, k, start } => {
            let gf = read_graph(graph)?;
            let k = k.unwrap_or(gf.k);
            let start = match start {
                Some(p) => Some(read_factorization_file(p, gf.graph.edge_count(), k)?),
                None => None,
            };
            let t = std::time::Instant::now();
            let out = balance_k_with(&gf.graph, k, start.as_ref(), &kopts(cli))?;
            if cli.format == Some(Format::Csv) {
                let row = ExperimentRow::single(&gf.graph, k, cli.seed, &out.report, out.stats.iterations, t.elapsed());
                emit(None, &(ExperimentRow::csv_header() + &row.csv_line()))?;
                if let Some(p) = &cli.out {
                    emit(Some(p), &write_factorization(&out.factorization))?;
                }
            } else {
                let mut report = report_text(&out.report);
                writeln!(
                    report,
                    "certified deviation {}\nextraction rounds {}",
                    to_decimal(&feasible_constant(k), 4),
                    out.stats.iterations
                )?;
                emit_with_report(cli, &report, &write_factorization(&out.factorization))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { graph, factorization } => {
            let gf = read_graph(graph)?;
            let f = read_factorization_file(factorization, gf.graph.edge_count(), 2)?;
            let r = balance_report(&gf.graph, &f)?;
            if r.k != 2 {
                bail!(Error::InvalidFactorization(format!("audit needs 2 trees, got {}", r.k)));
            }
            let charges = discharge_audit(&gf.graph, &f);
            let mut text = String::new();
            if cli.format == Some(Format::Csv) {
                text.push_str("vertex,degree,imbalance,charge\n");
                for (v, c) in charges.charges.iter().enumerate() {
                    writeln!(text, "{v},{},{},{}", gf.graph.degree(v), r.imbalance_at(v), to_decimal(c, 4))?;
                }
            } else {
                for (v, c) in charges.charges.iter().enumerate() {
                    writeln!(text, "vertex {v}: degree {}, charge {c}", gf.graph.degree(v))?;
                }
                writeln!(
                    text,
                    "total {} (2m = {}), min {} at vertex {}",
                    charges.total,
                    2 * gf.graph.edge_count(),
                    charges.min,
                    charges.argmin()
                )?;
            }
            emit(cli.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { graph, k, edge_cap } => {
            let gf = read_graph(graph)?;
            let k = k.unwrap_or(gf.k);
            let res = optimal_imbalance_with(&gf.graph, k, *edge_cap)?;
            let report = format!(
                "optimal imbalance {}\nfactorizations examined {}\n",
                res.minimum, res.examined
            );
            emit_with_report(cli, &report, &write_factorization(&res.witness))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { n, k, model, planted } => {
            if *n == 0 || *k == 0 {
                bail!("n and k must be positive");
            }
            let (g, f) = generate(&GeneratorSpec {
                model: *model,
                n: *n,
                k: *k,
                seed: cli.seed,
            });
            emit(cli.out.as_deref(), &write_graph(&g, *k))?;
            if let Some(p) = planted {
                emit(Some(p), &write_factorization(&f))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { suite, jobs } => {
            let suite = if suite == "default" {
                Suite::default()
            } else {
                Suite::from_file(Path::new(suite))?
            };
            let jobs = jobs.or(suite.jobs);
            let rows = experiment::run_suite(&suite, cli.seed, jobs, &kopts(cli))?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = ExperimentRow::csv_header();
                    rows.iter().for_each(|r| s.push_str(&r.csv_line()));
                    s
                }
                Format::Text => rows.iter().map(|r| r.text_line()).collect(),
            };
            emit(cli.out.as_deref(), &text)?;
            Ok(experiment::exit_code(&rows))
        }
        Command::Search { target, max_edges } => {
            let found = search_lower_bound(*target, *max_edges, cli.seed);
            let mut text = String::from("id,n,m,optimal\n");
            for (i, w) in found.witnesses.iter().enumerate() {
                writeln!(
                    text,
                    "{i},{},{},{}",
                    w.graph.vertex_count(),
                    w.graph.edge_count(),
                    w.result.minimum
                )?;
                if let Some(dir) = &cli.out {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join(format!("witness-{i}.txt")), write_graph(&w.graph, 2))?;
                }
            }
            print!("{text}");
            eprintln!(
                "{} witnesses among {} double trees with at most {max_edges} edges",
                found.witnesses.len(),
                found.instances_checked
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
