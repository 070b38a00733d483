//! Graph kernels over any [`GraphView`](crate::graph::GraphView).
//!
//! Every kernel has a sequential mode with bit-reproducible output and a parallel
//! mode running on the ambient rayon pool.

mod bfs;
mod cc;
mod pagerank;
mod sssp;
mod tc;

pub use bfs::{bfs, BfsResult, ALPHA, BETA, UNREACHED};
pub use cc::{component_count, connected_components};
pub use pagerank::{pagerank, PageRankOptions};
pub use sssp::{default_delta, sssp, INFINITE};
pub use tc::triangle_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Sequential,
    Parallel,
}

#[cfg(test)]
pub(crate) mod testgraphs {
    use crate::compressed::{BuildOptions, CompressedGraph};
    use crate::fine::{FineScheme, GapMode, IdMode, WeightMode};
    use crate::graph::AdjacencyGraph;
    use crate::offsets::OffsetScheme;
    use crate::permute::Permuter;
    use crate::transform::TransformKind;

    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> AdjacencyGraph {
        let e: Vec<_> = pairs.iter().map(|&(a, b)| (a, b, 1)).collect();
        AdjacencyGraph::from_edges(n, &e, false).unwrap()
    }

    /// A few representations of `g` that keep vertex IDs (identity permuter).
    pub fn representations(g: &AdjacencyGraph) -> Vec<CompressedGraph> {
        let weight = if g.is_weighted() { WeightMode::Local } else { WeightMode::None };
        [
            BuildOptions::new(OffsetScheme::Sparse, TransformKind::VarintGap, Permuter::Identity),
            BuildOptions::new(OffsetScheme::Plain, TransformKind::VarintFull, Permuter::Identity),
            BuildOptions::new(
                OffsetScheme::PtrLogn,
                TransformKind::Fixed(FineScheme::new(IdMode::Local, GapMode::Gap, weight)),
                Permuter::Identity,
            ),
        ]
        .iter()
        .map(|o| CompressedGraph::build(g, o).unwrap())
        .collect()
    }
}
