//! Pull-based PageRank without atomics.

use rayon::prelude::*;

use super::Mode;
use crate::graph::GraphView;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    pub max_iters: usize,
    /// Stop early once the L1 change of an iteration drops below this.
    pub tolerance: Option<f64>,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self {
            damping: 0.85,
            max_iters: 20,
            tolerance: None,
        }
    }
}

/// `r'(v) = (1 - d)/n + d (Σ_{u ∈ N_v} r(u)/d_u + D/n)` where `D` is the rank held by
/// isolated vertices. Each vertex sums its neighbors in storage order, so the
/// sequential result is independent of the representation.
pub fn pagerank<G: GraphView>(g: &G, opts: &PageRankOptions, mode: Mode) -> Vec<f64> {
    let n = g.num_vertices();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let d = opts.damping;
    let degree: Vec<usize> = match mode {
        Mode::Sequential => (0..n as u32).map(|v| g.degree(v)).collect(),
        Mode::Parallel => (0..n as u32).into_par_iter().map(|v| g.degree(v)).collect(),
    };
    let mut rank = vec![1.0 / nf; n];
    let mut contrib = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..opts.max_iters {
        for v in 0..n {
            contrib[v] = if degree[v] > 0 { rank[v] / degree[v] as f64 } else { 0.0 };
        }
        let dangling: f64 = (0..n).filter(|&v| degree[v] == 0).map(|v| rank[v]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        let pull = |v: usize| -> f64 {
            let mut s = 0.0;
            g.for_each_neighbor(v as u32, |u| s += contrib[u as usize]);
            base + d * s
        };
        match mode {
            Mode::Sequential => next.iter_mut().enumerate().for_each(|(v, x)| *x = pull(v)),
            Mode::Parallel => next.par_iter_mut().enumerate().for_each(|(v, x)| *x = pull(v)),
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if opts.tolerance.is_some_and(|t| change < t) {
            break;
        }
    }
    rank
}
