//! Command-line surface. The binary is a thin wrapper over these
//! functions; everything here is also callable from tests, which is how
//! the determinism checks exercise the exact command paths.
//!
//! Exit codes: for `wl`, 0 means indistinguishable, 1 means
//! distinguishable, 2 means error. For `selftest`, 0 means every check
//! passed and 1 means some failed. All other subcommands use 0 on success
//! and 2 on error. Stdout carries a single JSON value on every success
//! path.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{cospectral_fixture, generate_benchmark, nearest_centroid_eval, write_dataset_dir};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, parse_tu_dataset, reference_graph, Graph, ReferenceGraph};
use crate::kwl::DiagonalKwl;
use crate::spectral::{
    approximate_heat_diag, decompose, features_to_csv, features_to_json, laplacian,
    spectral_features, spectrum_to_json, SpectralColoring, SpectralConfig, SpectralFeatures,
};
use crate::wl::{joint_refine_full, Constant, DegreeColoring, JointRefinement};

#[derive(Parser)]
#[command(
    name = "wlspectra",
    about = "Combinatorial and spectral graph invariants: refinement verdicts, heat-kernel features, synthetic benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PreKind {
    Constant,
    Degree,
    Spectral,
    DiagKwl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two edge-list graphs by pre-colored color refinement.
    Wl {
        g1: PathBuf,
        g2: PathBuf,
        /// Initial coloring fed to the refinement.
        #[arg(long, value_enum, default_value = "constant")]
        pre: PreKind,
        /// Spectral sampling plan `(start_exp,end_exp,samples,quantiles)`.
        #[arg(long, default_value = "(-1,1,10,none)")]
        spectral_cfg: String,
        /// Tuple arity for the diag-kwl pre-coloring.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Include the stable disjoint-union coloring in the report, for
        /// external rendering.
        #[arg(long)]
        colorings: bool,
    },
    /// Export spectral features for one edge-list graph or a TU-format
    /// dataset directory.
    Features {
        input: PathBuf,
        #[arg(long, default_value = "(-1,1,10,none)")]
        spectral_cfg: String,
        /// Keep only the k smallest eigenpairs and integrate the reduced
        /// system instead of evaluating exactly (diagonal features only).
        #[arg(long)]
        truncation: Option<usize>,
        /// Implicit Euler steps per time sample in the reduced path.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Generate a perturbed-pair benchmark and report baseline accuracy.
    Bench {
        /// Source pair: the two reference molecules, or the cospectral
        /// fixture pair.
        #[arg(long, default_value = "molecules")]
        sources: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Falls back to the WLSPECTRA_SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the Laplacian spectrum of an edge-list graph as JSON.
    Spectrum {
        input: PathBuf,
        /// Include eigenvector columns in the output.
        #[arg(long)]
        eigenvectors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks and report one line per criterion.
    Selftest,
}

/// Entry point used by the binary: parses `std::env::args` and returns the
/// process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Parses and dispatches an explicit argument list.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success paths
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 2 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Wl { g1, g2, pre, spectral_cfg, k, colorings } => {
            let graph1 = parse_edge_list(&fs::read_to_string(&g1)?)?;
            let graph2 = parse_edge_list(&fs::read_to_string(&g2)?)?;
            let joint = match pre {
                PreKind::Constant => joint_refine_full(&graph1, &graph2, &Constant)?,
                PreKind::Degree => joint_refine_full(&graph1, &graph2, &DegreeColoring)?,
                PreKind::Spectral => {
                    let cfg = SpectralConfig::parse(&spectral_cfg)?;
                    joint_refine_full(&graph1, &graph2, &SpectralColoring::new(cfg))?
                }
                PreKind::DiagKwl => joint_refine_full(&graph1, &graph2, &DiagonalKwl { k })?,
            };
            let verdict = joint.distinguishable();
            println!("{}", wl_report(&joint, colorings));
            Ok(i32::from(verdict))
        }
        Command::Features { input, spectral_cfg, truncation, steps, out, format } => {
            let cfg = SpectralConfig::parse(&spectral_cfg)?;
            let format = match format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            let written = cmd_features(&input, &cfg, truncation, steps, &out, format)?;
            println!("{}", serde_json::json!({
                "input": input.display().to_string(),
                "out": out.display().to_string(),
                "format": format,
                "graphs": written.graphs,
                "rows": written.rows,
            }));
            Ok(0)
        }
        Command::Bench { sources, count, seed, out } => {
            let seed = seed
                .or_else(|| {
                    std::env::var("WLSPECTRA_SEED")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or(0);
            let report = cmd_bench(&sources, count, seed, &out)?;
            println!("{report}");
            Ok(0)
        }
        Command::Spectrum { input, eigenvectors, out } => {
            let graph = parse_edge_list(&fs::read_to_string(&input)?)?;
            let spectrum = decompose(&laplacian(&graph))?;
            let json = spectrum_to_json(&spectrum, eigenvectors);
            match out {
                Some(path) => {
                    fs::write(&path, serde_json::to_string_pretty(&json).expect("serializes"))?;
                    println!("{}", serde_json::json!({
                        "out": path.display().to_string(),
                        "n": graph.vertex_count(),
                    }));
                }
                None => println!("{json}"),
            }
            Ok(0)
        }
        Command::Selftest => {
            let results = crate::acceptance::run_all_with(|r| eprintln!("{}", r.summary_line()));
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{}", serde_json::json!({
                "criteria": results,
                "total": results.len(),
                "failed": failed,
                "passed": failed == 0,
            }));
            Ok(i32::from(failed > 0))
        }
    }
}

fn wl_report(joint: &JointRefinement, include_colorings: bool) -> String {
    let mut report = serde_json::json!({
        "distinguishable": joint.distinguishable(),
        "iterations": joint.iterations,
        "histograms": [joint.histogram1, joint.histogram2],
    });
    if include_colorings {
        report["union_coloring"] =
            serde_json::to_value(&joint.union_coloring).expect("coloring serializes");
    }
    report.to_string()
}

/// What a `features` invocation wrote.
pub struct FeaturesWritten {
    pub graphs: usize,
    pub rows: usize,
}

/// Computes and writes features for an edge-list file or a TU dataset
/// directory. Deterministic: identical inputs produce identical bytes.
pub fn cmd_features(
    input: &Path,
    cfg: &SpectralConfig,
    truncation: Option<usize>,
    steps: usize,
    out: &Path,
    format: &str,
) -> Result<FeaturesWritten> {
    let graphs: Vec<Graph> = if input.is_dir() {
        load_tu_directory(input)?
    } else {
        vec![parse_edge_list(&fs::read_to_string(input)?)?]
    };
    let features: Vec<SpectralFeatures> = graphs
        .iter()
        .map(|g| match truncation {
            Some(k) => approximate_heat_diag(g, &cfg.clone().with_truncation(k), steps),
            None => spectral_features(g, cfg),
        })
        .collect::<Result<_>>()?;
    let rows = features.iter().map(SpectralFeatures::vertex_count).sum();
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    match format {
        "csv" => fs::write(out, features_to_csv(&features))?,
        "json" => fs::write(
            out,
            serde_json::to_string_pretty(&features_to_json(&features)).expect("serializes"),
        )?,
        other => return Err(Error::Config(format!("unknown format {other:?}"))),
    }
    Ok(FeaturesWritten { graphs: graphs.len(), rows })
}

fn load_tu_directory(dir: &Path) -> Result<Vec<Graph>> {
    let mut adjacency: Option<PathBuf> = None;
    let mut indicator: Option<PathBuf> = None;
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if name.ends_with("_A.txt") {
            adjacency = Some(path);
        } else if name.ends_with("_graph_indicator.txt") {
            indicator = Some(path);
        }
    }
    match (adjacency, indicator) {
        (Some(a), Some(i)) => {
            parse_tu_dataset(&fs::read_to_string(a)?, &fs::read_to_string(i)?)
        }
        _ => Err(Error::Format(format!(
            "directory {} needs *_A.txt and *_graph_indicator.txt files",
            dir.display()
        ))),
    }
}

/// The two sampling plans reported by the benchmark command.
const BENCH_CONFIGS: [&str; 2] = ["(-1,1,10,none)", "(-1,1,5,max)"];

/// Generates a benchmark dataset, writes it under `out`, evaluates the
/// nearest-centroid baseline for both standard sampling plans, and returns
/// the report as a JSON string.
pub fn cmd_bench(sources: &str, count: usize, seed: u64, out: &Path) -> Result<String> {
    let (name, g0, g1) = match sources {
        "molecules" => (
            "molecules",
            reference_graph(ReferenceGraph::Decalin),
            reference_graph(ReferenceGraph::Bicyclopentyl),
        ),
        "cospectral" => {
            let (a, b) = cospectral_fixture();
            ("cospectral", a, b)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown sources {other:?} (expected molecules or cospectral)"
            )))
        }
    };
    let ds = generate_benchmark(&g0, &g1, count, seed)?;
    write_dataset_dir(&ds, out)?;
    let mut results = Vec::new();
    for config in BENCH_CONFIGS {
        let cfg = SpectralConfig::parse(config)?;
        let accuracy = nearest_centroid_eval(&ds, &cfg)?;
        results.push(serde_json::json!({
            "config": config,
            "accuracy": accuracy,
        }));
    }
    Ok(serde_json::json!({
        "sources": name,
        "count": count,
        "seed": seed,
        "out": out.display().to_string(),
        "train": ds.train.len(),
        "test": ds.test.len(),
        "results": results,
    })
    .to_string())
}
