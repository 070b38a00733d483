//! `loggraph run`: kernels, digests and timing.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use loggraph::algorithms::{self, Mode, PageRankOptions};
use loggraph::container::Container;
use loggraph::graph::GraphView;

use crate::{config_error, read_container};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Bfs,
    Pr,
    Cc,
    Sssp,
    Tc,
}

#[derive(Args)]
pub struct RunArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub alg: Alg,
    /// Source vertex for bfs and sssp, in original labels.
    #[arg(long, default_value_t = 0)]
    pub source: u32,
    /// Worker threads; overrides LOGGRAPH_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Use the sequential kernels (bit-reproducible).
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, default_value_t = 20)]
    pub iterations: usize,
    /// Stop PageRank once the L1 change drops below this.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Bucket width of delta-stepping; defaults to max(1, max weight).
    #[arg(long)]
    pub delta: Option<u64>,
}

/// Thread count from the flag, else `LOGGRAPH_THREADS`, else rayon's default.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var("LOGGRAPH_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| config_error(format!("LOGGRAPH_THREADS='{s}' is not a thread count"))),
        Err(_) => Ok(None),
    }
}

pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(config_error("thread count must be positive"));
        }
        b = b.num_threads(t);
    }
    Ok(b.build()?)
}

pub fn run(args: RunArgs) -> Result<()> {
    let c = read_container(&args.input)?;
    let (n, m, weighted, max_weight) = match &c {
        Container::Graph(g) => (g.num_vertices(), g.num_edges(), g.is_weighted(), g.max_weight()),
        Container::Compressed(cg) => (cg.num_vertices(), cg.num_edges(), cg.stores_weights(), cg.max_weight()),
    };
    if args.alg == Alg::Sssp && !weighted {
        return Err(config_error("sssp needs a weighted container"));
    }
    if matches!(args.alg, Alg::Bfs | Alg::Sssp) && args.source as usize >= n {
        return Err(config_error(format!("source {} not in 0..{n}", args.source)));
    }
    let mode = if args.sequential { Mode::Sequential } else { Mode::Parallel };
    let threads = if args.sequential { Some(1) } else { thread_count(args.threads)? };
    let pool = pool(threads)?;
    let (mut out, seconds) = pool.install(|| match &c {
        Container::Graph(g) => kernel(g, &args, mode, max_weight, |v| v),
        Container::Compressed(cg) => kernel(cg, &args, mode, max_weight, |v| cg.relabel(v)),
    })?;
    let name = match args.alg {
        Alg::Bfs => "bfs",
        Alg::Pr => "pr",
        Alg::Cc => "cc",
        Alg::Sssp => "sssp",
        Alg::Tc => "tc",
    };
    out["alg"] = json!(name);
    out["n"] = json!(n);
    out["m"] = json!(m);
    out["mode"] = json!(if args.sequential { "sequential" } else { "parallel" });
    out["threads"] = json!(pool.current_num_threads());
    out["seconds"] = json!(seconds);
    println!("{}", serde_json::to_string(&out)?);
    Ok(())
}

fn sha256_hex(bytes: impl IntoIterator<Item = u8>) -> String {
    let mut h = Sha256::new();
    h.update(bytes.into_iter().collect::<Vec<u8>>());
    format!("{:x}", h.finalize())
}

/// Runs the kernel in storage labels and reports results in original labels, so the
/// digests do not depend on the representation.
fn kernel<G: GraphView>(
    g: &G,
    args: &RunArgs,
    mode: Mode,
    max_weight: u64,
    relabel: impl Fn(u32) -> u32,
) -> Result<(serde_json::Value, f64)> {
    let n = g.num_vertices();
    let to_original = |xs: &[u64]| -> Vec<u64> { (0..n as u32).map(|v| xs[relabel(v) as usize]).collect() };
    let start = Instant::now();
    let value = match args.alg {
        Alg::Bfs => {
            let r = algorithms::bfs(g, relabel(args.source), mode)?;
            let seconds = start.elapsed().as_secs_f64();
            let dist = to_original(&r.dist.iter().map(|&d| d as u64).collect::<Vec<_>>());
            let reached = dist.iter().filter(|&&d| d != algorithms::UNREACHED as u64).count();
            let depth = dist.iter().filter(|&&d| d != algorithms::UNREACHED as u64).max().copied().unwrap_or(0);
            let digest = sha256_hex(dist.iter().flat_map(|&d| (d as u32).to_le_bytes()));
            return Ok((json!({ "source": args.source, "reached": reached, "depth": depth, "dist_sha256": digest }), seconds));
        }
        Alg::Sssp => {
            let delta = args.delta.unwrap_or_else(|| algorithms::default_delta(max_weight));
            let d = algorithms::sssp(g, relabel(args.source), delta, mode)?;
            let seconds = start.elapsed().as_secs_f64();
            let dist = to_original(&d);
            let reached = dist.iter().filter(|&&d| d != algorithms::INFINITE).count();
            let digest = sha256_hex(dist.iter().flat_map(|d| d.to_le_bytes()));
            return Ok((json!({ "source": args.source, "delta": delta, "reached": reached, "dist_sha256": digest }), seconds));
        }
        Alg::Cc => {
            let labels = algorithms::connected_components(g, mode);
            let seconds = start.elapsed().as_secs_f64();
            // name each component by its smallest original vertex
            let mut name = vec![u32::MAX; n];
            let canon: Vec<u32> = (0..n as u32)
                .map(|v| {
                    let l = labels[relabel(v) as usize] as usize;
                    if name[l] == u32::MAX {
                        name[l] = v;
                    }
                    name[l]
                })
                .collect();
            let count = algorithms::component_count(&canon);
            let digest = sha256_hex(canon.iter().flat_map(|l| l.to_le_bytes()));
            return Ok((json!({ "components": count, "labels_sha256": digest }), seconds));
        }
        Alg::Pr => {
            let opts = PageRankOptions {
                max_iters: args.iterations,
                tolerance: args.tolerance,
                ..Default::default()
            };
            let r = algorithms::pagerank(g, &opts, mode);
            let seconds = start.elapsed().as_secs_f64();
            let l1: f64 = r.iter().map(|x| x.abs()).sum();
            let (top, top_rank) = (0..n as u32)
                .map(|v| (v, r[relabel(v) as usize]))
                .fold((0, f64::MIN), |best, x| if x.1 > best.1 { x } else { best });
            // ranks differ in the last bits across storage orders, so report rounded values
            return Ok((
                json!({ "iterations": args.iterations, "rank_l1": format!("{l1:.12}"), "top_vertex": top, "top_rank": format!("{top_rank:.12}") }),
                seconds,
            ));
        }
        Alg::Tc => algorithms::triangle_count(g, mode),
    };
    let seconds = start.elapsed().as_secs_f64();
    Ok((json!({ "triangles": value }), seconds))
}
