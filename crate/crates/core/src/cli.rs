//! Command line front end. Exit status 0 means YES (or success), 1 means
//! NO, 2 means an error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::boundaried::BoundaryError;
use crate::dp::{self, DpError, DpOptions};
use crate::flag::{Embedding, FlagError};
use crate::generators::{self, GenError};
use crate::nicify::{self, EnumLimits, NiceError};
use crate::oracle::{self, OracleError, DEFAULT_MAX_SCHEMES};
use crate::treedecomp::{parse_graph, parse_td, Graph, TdError, TreeDecomposition};

const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Td(#[from] TdError),
    #[error("{0}")]
    Dp(#[from] DpError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Nice(#[from] NiceError),
    #[error("{0}")]
    Gen(#[from] GenError),
    #[error("{0}")]
    Flag(#[from] FlagError),
    #[error("{0}")]
    Boundary(#[from] BoundaryError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "gvd",
    version,
    about = "Genus vertex deletion over tree decompositions"
)]
struct Cli {
    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true, env = "GVD_THREADS", default_value_t = 0)]
    threads: usize,
    /// Print a JSON report instead of text.
    #[arg(long, global = true, env = "GVD_JSON")]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Instance {
    /// Graph in .gr format.
    #[arg(long, env = "GVD_GRAPH")]
    graph: PathBuf,
    /// Tree decomposition in .td format; a heuristic one is used if absent.
    #[arg(long, env = "GVD_TD")]
    td: Option<PathBuf>,
    /// Count only orientable surfaces.
    #[arg(long, env = "GVD_ORIENTABLE")]
    orientable: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide whether at most BUDGET deletions reach Euler genus at most GENUS.
    Solve {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, env = "GVD_GENUS")]
        genus: usize,
        #[arg(long, env = "GVD_BUDGET")]
        budget: usize,
        /// Print the deleted vertices (1-based) and re-check them.
        #[arg(long, env = "GVD_EMIT_WITNESS")]
        emit_witness: bool,
        #[arg(long, env = "GVD_MAX_SCHEMES", default_value_t = DEFAULT_MAX_SCHEMES)]
        max_schemes: u128,
    },
    /// Euler genus of a graph (by the table computation) or of an embedding file.
    Genus {
        #[arg(
            long,
            env = "GVD_GRAPH",
            conflicts_with = "embedding",
            required_unless_present = "embedding"
        )]
        graph: Option<PathBuf>,
        #[arg(long, env = "GVD_TD")]
        td: Option<PathBuf>,
        #[arg(long, env = "GVD_ORIENTABLE")]
        orientable: bool,
        /// Flag system in the four-line text format.
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// Exhaustive search over embedding schemes.
    Oracle {
        #[arg(long, env = "GVD_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "GVD_ORIENTABLE")]
        orientable: bool,
        /// With --budget, answer the deletion question instead of printing the genus.
        #[arg(long, env = "GVD_GENUS", requires = "budget")]
        genus: Option<usize>,
        #[arg(long, env = "GVD_BUDGET", requires = "genus")]
        budget: Option<usize>,
        #[arg(long, env = "GVD_MAX_SCHEMES", default_value_t = DEFAULT_MAX_SCHEMES)]
        max_schemes: u128,
    },
    /// Count nice boundaried embeddings with the given labels and genus bound.
    EnumerateNice {
        #[arg(long)]
        labels: usize,
        #[arg(long, env = "GVD_GENUS")]
        genus: usize,
        #[arg(long, env = "GVD_ORIENTABLE")]
        orientable: bool,
        #[arg(long, env = "GVD_MAX_FLAGS", default_value_t = EnumLimits::default().max_flags)]
        max_flags: usize,
        /// Print every embedding after the count.
        #[arg(long)]
        emit: bool,
    },
    /// Write a generated graph in .gr format.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    Grid { rows: usize, cols: usize },
    Wall { s: usize },
    BEll { l: usize },
    Random { n: usize, m: usize, seed: u64 },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(graph: &Path, td: Option<&Path>) -> Result<(Graph, Option<TreeDecomposition>), CliError> {
    let g = parse_graph(&read(graph)?)?;
    let td = match td {
        Some(p) => Some(parse_td(&read(p)?, &g)?),
        None => None,
    };
    Ok((g, td))
}

#[derive(Serialize)]
struct SolveReport {
    schema: u32,
    answer: &'static str,
    minimum: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    nodes: usize,
    max_table: usize,
    total_cells: usize,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct GenusReport {
    schema: u32,
    genus: usize,
}

#[derive(Serialize)]
struct CountReport {
    schema: u32,
    count: usize,
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn cmd_solve(
    inst: &Instance,
    genus: usize,
    budget: usize,
    emit_witness: bool,
    max_schemes: u128,
    json: bool,
) -> Result<i32, CliError> {
    let (g, td) = load(&inst.graph, inst.td.as_deref())?;
    let opts = DpOptions::new(genus, inst.orientable);
    let v = dp::solve_graph(&g, td.as_ref(), budget, &opts)?;
    let witness = if v.yes && emit_witness {
        v.witness.clone()
    } else {
        None
    };
    let verified = match &witness {
        Some(w) => Some(dp::verify_witness(
            &g,
            w,
            genus,
            inst.orientable,
            max_schemes,
        )?),
        None => None,
    };
    let one_based = witness.map(|w| w.iter().map(|x| x + 1).collect::<Vec<_>>());
    if json {
        print_json(&SolveReport {
            schema: SCHEMA,
            answer: if v.yes { "YES" } else { "NO" },
            minimum: v.min,
            witness: one_based,
            verified,
            nodes: v.stats.table_sizes.len(),
            max_table: v.stats.max_table(),
            total_cells: v.stats.total_cells(),
            elapsed_ms: v.stats.elapsed.as_millis(),
        });
    } else {
        match (v.yes, v.min) {
            (true, Some(m)) => println!("YES {m}"),
            _ => println!("NO"),
        }
        if !v.yes {
            match v.min {
                Some(m) => println!("minimum {m}"),
                None => println!("minimum none"),
            }
        }
        if let Some(w) = one_based {
            let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            println!("{}", format!("witness {}", parts.join(" ")).trim_end());
        }
        if let Some(ok) = verified {
            println!("verified {}", if ok { "yes" } else { "no" });
        }
        println!(
            "tables nodes={} max={} total={}",
            v.stats.table_sizes.len(),
            v.stats.max_table(),
            v.stats.total_cells()
        );
        println!("time {:.3}s", v.stats.elapsed.as_secs_f64());
    }
    Ok(if v.yes { 0 } else { 1 })
}

/// Euler genus via the table computation with no deletions, trying
/// `g = 0, 1, 2, ...`.
pub fn graph_genus(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    orientable: bool,
) -> Result<usize, DpError> {
    let mut genus = 0;
    loop {
        let mut opts = DpOptions::new(genus, orientable);
        opts.prune_above = Some(0);
        if dp::solve_graph(g, td, 0, &opts)?.yes {
            return Ok(genus);
        }
        genus += if orientable { 2 } else { 1 };
    }
}

fn cmd_genus(
    graph: Option<&Path>,
    td: Option<&Path>,
    orientable: bool,
    embedding: Option<&Path>,
    json: bool,
) -> Result<i32, CliError> {
    let genus = match (graph, embedding) {
        (_, Some(p)) => {
            let e: Embedding = read(p)?.parse()?;
            if orientable && !e.is_orientable() {
                return Err(CliError::Usage("embedding is not orientable".into()));
            }
            e.euler_genus()
        }
        (Some(p), None) => {
            let (g, td) = load(p, td)?;
            graph_genus(&g, td.as_ref(), orientable)?
        }
        (None, None) => return Err(CliError::Usage("--graph or --embedding required".into())),
    };
    if json {
        print_json(&GenusReport {
            schema: SCHEMA,
            genus,
        });
    } else {
        println!("genus {genus}");
    }
    Ok(0)
}

fn cmd_oracle(
    graph: &Path,
    orientable: bool,
    question: Option<(usize, usize)>,
    max_schemes: u128,
    json: bool,
) -> Result<i32, CliError> {
    let g = parse_graph(&read(graph)?)?;
    match question {
        Some((genus, budget)) => {
            let w = oracle::brute_force_gvd_witness(&g, genus, budget, orientable, max_schemes)?;
            let w1 = w
                .as_ref()
                .map(|w| w.iter().map(|x| x + 1).collect::<Vec<_>>());
            if json {
                #[derive(Serialize)]
                struct R {
                    schema: u32,
                    answer: &'static str,
                    minimum: Option<usize>,
                    witness: Option<Vec<usize>>,
                }
                print_json(&R {
                    schema: SCHEMA,
                    answer: if w.is_some() { "YES" } else { "NO" },
                    minimum: w.as_ref().map(|w| w.len()),
                    witness: w1,
                });
            } else {
                match &w1 {
                    Some(w) => {
                        println!("YES {}", w.len());
                        let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                        println!("{}", format!("witness {}", parts.join(" ")).trim_end());
                    }
                    None => println!("NO"),
                }
            }
            Ok(if w.is_some() { 0 } else { 1 })
        }
        None => {
            let genus = oracle::exact_genus_edges(g.n(), g.edges(), orientable, max_schemes)?;
            if json {
                print_json(&GenusReport {
                    schema: SCHEMA,
                    genus,
                });
            } else {
                println!("genus {genus}");
            }
            Ok(0)
        }
    }
}

fn cmd_enumerate(
    labels: usize,
    genus: usize,
    orientable: bool,
    max_flags: usize,
    emit: bool,
    json: bool,
) -> Result<i32, CliError> {
    let limits = EnumLimits {
        max_flags,
        ..EnumLimits::default()
    };
    let all = nicify::enumerate_nice(labels, genus, orientable, limits)?;
    if json {
        print_json(&CountReport {
            schema: SCHEMA,
            count: all.len(),
        });
    } else {
        println!("count {}", all.len());
        if emit {
            for b in all.values() {
                println!();
                print!("{b}");
            }
        }
    }
    Ok(0)
}

fn cmd_gen(family: &Family, out: Option<&Path>) -> Result<i32, CliError> {
    let g = match *family {
        Family::Complete { n } => generators::complete(n),
        Family::CompleteBipartite { a, b } => generators::complete_bipartite(a, b),
        Family::Grid { rows, cols } => generators::grid(rows, cols),
        Family::Wall { s } => generators::wall(s)?,
        Family::BEll { l } => generators::b_ell(l)?,
        Family::Random { n, m, seed } => generators::random_connected(n, m, seed)?,
    };
    let text = g.to_gr();
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    if cli.threads > 0 {
        // fails only if a pool was already built, which is harmless here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match &cli.cmd {
        Cmd::Solve {
            inst,
            genus,
            budget,
            emit_witness,
            max_schemes,
        } => cmd_solve(inst, *genus, *budget, *emit_witness, *max_schemes, cli.json),
        Cmd::Genus {
            graph,
            td,
            orientable,
            embedding,
        } => cmd_genus(
            graph.as_deref(),
            td.as_deref(),
            *orientable,
            embedding.as_deref(),
            cli.json,
        ),
        Cmd::Oracle {
            graph,
            orientable,
            genus,
            budget,
            max_schemes,
        } => cmd_oracle(
            graph,
            *orientable,
            genus.zip(*budget),
            *max_schemes,
            cli.json,
        ),
        Cmd::EnumerateNice {
            labels,
            genus,
            orientable,
            max_flags,
            emit,
        } => cmd_enumerate(*labels, *genus, *orientable, *max_flags, *emit, cli.json),
        Cmd::Gen { family, out } => cmd_gen(family, out.as_deref()),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
