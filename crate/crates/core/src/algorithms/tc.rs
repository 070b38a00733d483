//! Triangle counting over a degree-ordered orientation.

use rayon::prelude::*;

use super::Mode;
use crate::graph::GraphView;

/// Orients every edge from lower to higher `(degree, id)` rank, then counts for each
/// oriented edge `v → u` the common out-neighbors by sorted intersection. Each
/// triangle is found exactly once, from its lowest-ranked vertex.
pub fn triangle_count<G: GraphView>(g: &G, mode: Mode) -> u64 {
    let n = g.num_vertices();
    let degree: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let higher = |v: u32, u: u32| (degree[u as usize], u) > (degree[v as usize], v);
    let out_of = |v: u32| -> Vec<u32> {
        let mut out = Vec::new();
        g.for_each_neighbor(v, |u| {
            if higher(v, u) {
                out.push(u);
            }
        });
        out.sort_unstable();
        out
    };
    let out: Vec<Vec<u32>> = match mode {
        Mode::Sequential => (0..n as u32).map(out_of).collect(),
        Mode::Parallel => (0..n as u32).into_par_iter().map(out_of).collect(),
    };
    let count = |v: usize| -> u64 {
        out[v]
            .iter()
            .map(|&u| intersect(&out[v], &out[u as usize]))
            .sum()
    };
    match mode {
        Mode::Sequential => (0..n).map(count).sum(),
        Mode::Parallel => (0..n).into_par_iter().map(count).sum(),
    }
}

fn intersect(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}
