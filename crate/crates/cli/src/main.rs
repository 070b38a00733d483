//! `loggraph` command-line front end.

mod bench;
mod run;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use flate2::read::GzDecoder;

use loggraph::analysis::{self, Model};
use loggraph::compressed::{compatibility_matrix, BuildOptions, CompressedGraph};
use loggraph::container::{self, Container};
use loggraph::graph::{generate, load_edge_list, AdjacencyGraph, GraphSpec, GraphView};
use loggraph::offsets::OffsetScheme;
use loggraph::permute::{Permuter, DEFAULT_IMBALANCE};
use loggraph::transform::TransformKind;

const EXIT_INPUT: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "loggraph", version, about = "Logarithmized adjacency-array graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read an edge list (optionally .gz) into a graph container.
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::EdgeList)]
        format: Format,
        /// Expect a third column with nonnegative integer weights.
        #[arg(long)]
        weighted: bool,
    },
    /// Write a synthetic graph container.
    Generate {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Encode a graph container with the chosen schemes and print the size report.
    Compress(CompressArgs),
    /// Run a graph kernel and print result digests plus timing as JSON.
    Run(run::RunArgs),
    /// Time random offset lookups over a thread sweep.
    BenchOffsets(bench::BenchArgs),
    /// Analytic size estimates and lower bounds as CSV.
    Estimate {
        #[command(subcommand)]
        model: EstimateModel,
    },
    /// Print header fields and section sizes of a container.
    Stats { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    EdgeList,
}

#[derive(Args)]
struct GenCommon {
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attach uniform weights in 1..=max-weight.
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 255)]
    max_weight: u64,
}

#[derive(Subcommand)]
enum GenModel {
    /// Erdős-Rényi G(n, p).
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Kronecker graph with 2^scale vertices and edge_factor * 2^scale samples.
    Kron {
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = 16)]
        edge_factor: u32,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// ptr32, ptr64, ptrlogn, bvpl, bvil or bvsd.
    #[arg(long)]
    offsets: String,
    /// global, local, global-gap, local-gap (each optionally +wg or +wl), varint-gap, varint-full or brb.
    #[arg(long)]
    adjacency: String,
    /// identity, degmin, greedy, rb or brb.
    #[arg(long, default_value = "identity")]
    permuter: String,
    #[arg(long)]
    brb_depth: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_IMBALANCE)]
    imbalance: f64,
    /// Block size B of bit-vector offsets.
    #[arg(long)]
    block_bits: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum EstimateModel {
    /// Expected |A| and |O| of G(n, p).
    Er {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        max_weight: Option<u64>,
    },
    /// Expected sizes under a power-law degree distribution alpha * d^-beta.
    Pl {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        max_weight: Option<u64>,
    },
    /// Storage lower bounds; n and m accept float syntax such as 4.398e12.
    Bounds {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        max_weight: f64,
        /// Word size W of the reference adjacency array.
        #[arg(long, default_value_t = 64)]
        w: u32,
        #[arg(long, default_value_t = 8)]
        block_bits: u32,
    },
    /// Theory curves for ER and power-law models over n = 2^lo ..= 2^hi.
    Figure {
        #[arg(long, default_value_t = 10)]
        lo: u32,
        #[arg(long, default_value_t = 30)]
        hi: u32,
        #[arg(long, default_value_t = 1e-4)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.5)]
        beta: f64,
    },
}

/// Error carrying a specific exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

pub(crate) fn config_error(message: impl Into<String>) -> anyhow::Error {
    Exit {
        code: EXIT_CONFIG,
        message: message.into(),
    }
    .into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Exit>() {
        return e.code;
    }
    if let Some(e) = err.downcast_ref::<loggraph::Error>() {
        use loggraph::Error::*;
        return match e {
            Parse { .. } | Decode(_) | Domain(_) | Capacity(_) | Io(_) => EXIT_INPUT,
            Config(_) | Precondition(_) => EXIT_CONFIG,
            Encode(_) => EXIT_INTERNAL,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_INPUT;
    }
    EXIT_INTERNAL
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest {
            input,
            output,
            format: Format::EdgeList,
            weighted,
        } => {
            let g = load_edge_list(open_text(&input)?, weighted)?;
            write_file(&output, &container::write_graph(&g))?;
            println!("n={} m={} weighted={}", g.num_vertices(), g.num_edges(), g.is_weighted());
        }
        Command::Generate { model } => {
            let (spec, c) = match model {
                GenModel::Er { n, p, common } => (GraphSpec::ErdosRenyi { n, p, seed: common.seed }, common),
                GenModel::Kron { scale, edge_factor, common } => (
                    GraphSpec::Kronecker {
                        scale,
                        edge_factor,
                        seed: common.seed,
                    },
                    common,
                ),
            };
            let g = generate(&spec, c.weighted, c.max_weight)?;
            write_file(&c.output, &container::write_graph(&g))?;
            println!("{} n={} m={}", spec.describe(), g.num_vertices(), g.num_edges());
        }
        Command::Compress(args) => compress(args)?,
        Command::Run(args) => run::run(args)?,
        Command::BenchOffsets(args) => bench::bench(args)?,
        Command::Estimate { model } => estimate(model)?,
        Command::Stats { input } => stats(&input)?,
    }
    Ok(())
}

fn open_text(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufReader::new(GzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)?;
    Ok(())
}

pub(crate) fn read_container(path: &Path) -> Result<Container> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(container::read(&bytes)?)
}

/// The uncompressed graph behind any container, in the container's own labels.
pub(crate) fn logical_graph(c: &Container) -> Result<AdjacencyGraph> {
    match c {
        Container::Graph(g) => Ok(g.clone()),
        Container::Compressed(cg) => decompress(cg),
    }
}

fn decompress(cg: &CompressedGraph) -> Result<AdjacencyGraph> {
    let n = cg.num_vertices();
    let weighted = cg.stores_weights();
    let mut offsets = vec![0u64];
    let mut neighbors = Vec::new();
    let mut weights = Vec::new();
    for v in 0..n as u32 {
        cg.visit_weighted(v, |u, w| {
            neighbors.push(u);
            weights.push(w);
            true
        });
        offsets.push(neighbors.len() as u64);
    }
    Ok(AdjacencyGraph::from_csr(offsets, neighbors, weighted.then_some(weights))?)
}

fn parse_build_options(a: &CompressArgs) -> Result<BuildOptions> {
    let offsets: OffsetScheme = a.offsets.parse().map_err(|e: loggraph::Error| config_error(e.to_string()))?;
    let adjacency: TransformKind = a.adjacency.parse().map_err(|e: loggraph::Error| config_error(e.to_string()))?;
    let permuter = match a.permuter.parse().map_err(|e: loggraph::Error| config_error(e.to_string()))? {
        Permuter::Rb { .. } => Permuter::Rb {
            imbalance: a.imbalance,
            seed: a.seed,
        },
        Permuter::Brb { .. } => Permuter::Brb {
            depth: a.brb_depth.unwrap_or(0),
            imbalance: a.imbalance,
            seed: a.seed,
        },
        other => other,
    };
    if a.brb_depth.is_some() && !matches!(permuter, Permuter::Brb { .. }) {
        return Err(config_error("--brb-depth only applies to --permuter brb"));
    }
    let opts = BuildOptions {
        block_bits: a.block_bits,
        ..BuildOptions::new(offsets, adjacency, permuter)
    };
    if let Err(e) = opts.check() {
        // the check error already carries the matrix
        return Err(config_error(e.to_string()));
    }
    Ok(opts)
}

fn compress(args: CompressArgs) -> Result<()> {
    let opts = parse_build_options(&args)?;
    let g = match read_container(&args.input)? {
        Container::Graph(g) => g,
        Container::Compressed(_) => bail!(config_error("input is already compressed; pass a graph container")),
    };
    let start = Instant::now();
    let cg = CompressedGraph::build(&g, &opts).map_err(|e| match e {
        loggraph::Error::Config(m) => config_error(format!("{m}\n{}", compatibility_matrix())),
        other => other.into(),
    })?;
    let seconds = start.elapsed().as_secs_f64();
    write_file(&args.output, &container::write_compressed(&cg))?;
    let report = cg.size_report();
    println!("{}", loggraph::compressed::SizeReport::CSV_HEADER);
    println!("{}", report.csv_row());
    // timing varies between runs, keep it off stdout
    eprintln!("preprocessing ({}, {} + {}): {seconds:.3} s", opts.permuter.name(), opts.offsets, opts.adjacency);
    Ok(())
}

fn estimate(model: EstimateModel) -> Result<()> {
    match model {
        EstimateModel::Er { n, p, max_weight } => {
            let e = analysis::er_expected_sizes(n, p, max_weight)?;
            println!("model,n,p,expected_a_bits,expected_o_bits");
            println!("er,{n},{p},{},{}", e.expected_a_bits, e.expected_o_bits);
        }
        EstimateModel::Pl { n, alpha, beta, max_weight } => {
            let e = analysis::pl_expected_size(n, alpha, beta, max_weight)?;
            println!("model,n,alpha,beta,d_hat,m_estimate,expected_a_bits,expected_o_bits");
            println!(
                "pl,{n},{alpha},{beta},{},{},{},{}",
                e.d_hat, e.m_estimate, e.expected_a_bits, e.expected_o_bits
            );
        }
        EstimateModel::Bounds { n, m, max_weight, w, block_bits } => {
            let lb = analysis::lower_bounds(n, m, max_weight, w, block_bits)?;
            println!("quantity,bits,ceiled_bits");
            for (name, b) in [
                ("vertex_id", lb.vertex_id),
                ("offset", lb.offset),
                ("weight", lb.weight),
                ("bitvector", lb.bitvector),
                ("graph", lb.graph),
            ] {
                println!("{name},{},{}", b.exact, b.ceiled);
            }
            println!("adjacency_array,{0},{0}", lb.adjacency_array_bits);
        }
        EstimateModel::Figure { lo, hi, p, alpha, beta } => {
            if lo > hi || hi > 62 {
                return Err(config_error("need lo <= hi <= 62"));
            }
            let ns: Vec<u64> = (lo..=hi).map(|k| 1u64 << k).collect();
            let models = [Model::ErdosRenyi { p }, Model::PowerLaw { alpha, beta }];
            print!("{}", analysis::emit_theory_figure_data(&ns, &models)?);
        }
    }
    Ok(())
}

fn stats(path: &Path) -> Result<()> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let h = container::read_header(&bytes)?;
    println!("kind,{}", if h.compressed { "compressed" } else { "graph" });
    println!("n,{}", h.n);
    println!("m,{}", h.m);
    println!("weighted,{}", h.weighted);
    if let Some(o) = h.o_scheme {
        println!("offsets,{o}");
    }
    if let Some(a) = h.a_scheme {
        println!("adjacency,{a}");
    }
    println!("block_bits,{}", h.block_bits);
    println!("max_weight,{}", h.max_weight);
    println!("permutation,{}", h.has_permutation);
    for (tag, len) in container::section_sizes(&bytes)? {
        println!("section_{tag},{len}");
    }
    Ok(())
}
