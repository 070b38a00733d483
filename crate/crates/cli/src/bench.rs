//! `loggraph bench-offsets`: offset lookup latency per structure and thread count.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use loggraph::compressed::{BuildOptions, CompressedGraph};
use loggraph::container::Container;
use loggraph::offsets::{OffsetScheme, OffsetStructure};
use loggraph::permute::Permuter;
use loggraph::transform::TransformKind;

use crate::{config_error, logical_graph, read_container};

#[derive(Args)]
pub struct BenchArgs {
    pub input: PathBuf,
    /// Thread counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub threads: Vec<usize>,
    /// Queries per worker.
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rebuild the graph with every offset structure (varint-gap payload) instead of
    /// timing only the container's own.
    #[arg(long)]
    pub all_structures: bool,
}

pub const CSV_HEADER: &str = "structure,threads,queries,mean_ns,median_ns,checksum";

/// Query `i` of worker `w` is the same for every run with one seed.
pub fn queries(seed: u64, worker: usize, q: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    (0..q).map(|_| rng.gen_range(0..n)).collect()
}

pub fn bench(args: BenchArgs) -> Result<()> {
    if args.threads.contains(&0) || args.queries == 0 {
        return Err(config_error("thread counts and --queries must be positive"));
    }
    let c = read_container(&args.input)?;
    let mut structures: Vec<(String, CompressedGraph)> = Vec::new();
    if args.all_structures || matches!(c, Container::Graph(_)) {
        let g = logical_graph(&c)?;
        for o in OffsetScheme::ALL {
            let opts = BuildOptions::new(o, TransformKind::VarintGap, Permuter::Identity);
            structures.push((o.name().to_string(), CompressedGraph::build(&g, &opts)?));
        }
    }
    if let Container::Compressed(cg) = c {
        if !args.all_structures {
            structures.push((cg.offset_scheme().name().to_string(), cg));
        }
    }
    println!("{CSV_HEADER}");
    for (name, cg) in &structures {
        let n = cg.num_vertices();
        if n == 0 {
            continue;
        }
        for &t in &args.threads {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
            let per_worker: Vec<(Vec<u64>, u64)> = pool.install(|| {
                (0..t)
                    .into_par_iter()
                    .map(|w| time_queries(cg.offsets(), &queries(args.seed, w, args.queries, n)))
                    .collect()
            });
            let mut lat: Vec<u64> = per_worker.iter().flat_map(|(l, _)| l.iter().copied()).collect();
            let checksum = per_worker.iter().fold(0u64, |a, (_, s)| a.wrapping_add(*s));
            lat.sort_unstable();
            let mean = lat.iter().sum::<u64>() as f64 / lat.len() as f64;
            let median = lat[lat.len() / 2];
            println!("{name},{t},{},{mean:.1},{median},{checksum}", args.queries);
        }
    }
    Ok(())
}

fn time_queries(o: &OffsetStructure, vs: &[usize]) -> (Vec<u64>, u64) {
    let mut lat = Vec::with_capacity(vs.len());
    let mut sum = 0u64;
    for &v in vs {
        let t = Instant::now();
        let off = black_box(o.offset_of(black_box(v)));
        lat.push(t.elapsed().as_nanos() as u64);
        sum = sum.wrapping_add(off.unwrap_or(u64::MAX));
    }
    (lat, sum)
}
