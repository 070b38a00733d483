//! Delta-stepping single-source shortest paths.

use rayon::prelude::*;

use super::Mode;
use crate::error::{Error, Result};
use crate::graph::GraphView;

pub const INFINITE: u64 = u64::MAX;

/// `max(1, Ŵ)`.
pub fn default_delta(max_weight: u64) -> u64 {
    max_weight.max(1)
}

/// Exact distances with buckets of width `delta`: light edges (`w <= delta`) are
/// relaxed until the current bucket empties, heavy edges once per settled vertex.
pub fn sssp<G: GraphView>(g: &G, source: u32, delta: u64, mode: Mode) -> Result<Vec<u64>> {
    let n = g.num_vertices();
    if source as usize >= n {
        return Err(Error::Domain(format!("source {source} not in 0..{n}")));
    }
    if delta == 0 {
        return Err(Error::Config("delta must be positive".into()));
    }
    let mut dist = vec![INFINITE; n];
    let mut buckets: Vec<Vec<u32>> = vec![vec![source]];
    dist[source as usize] = 0;
    let relax = |dist: &mut [u64], buckets: &mut Vec<Vec<u32>>, reqs: Vec<(u32, u64)>| {
        for (u, d) in reqs {
            if d < dist[u as usize] {
                dist[u as usize] = d;
                let b = (d / delta) as usize;
                if b >= buckets.len() {
                    buckets.resize_with(b + 1, Vec::new);
                }
                buckets[b].push(u);
            }
        }
    };
    let requests = |dist: &[u64], vs: &[u32], light: bool| -> Vec<(u32, u64)> {
        let gen = |v: &u32| {
            let dv = dist[*v as usize];
            let mut out = Vec::new();
            g.visit_weighted(*v, |u, w| {
                if (w <= delta) == light {
                    out.push((u, dv + w));
                }
                true
            });
            out
        };
        match mode {
            Mode::Sequential => vs.iter().flat_map(gen).collect(),
            Mode::Parallel => vs.par_iter().flat_map_iter(gen).collect(),
        }
    };
    let mut i = 0;
    while i < buckets.len() {
        let mut settled = Vec::new();
        while !buckets[i].is_empty() {
            let mut frontier = std::mem::take(&mut buckets[i]);
            // drop entries that moved to an earlier bucket or were pushed twice
            frontier.retain(|&v| (dist[v as usize] / delta) as usize == i);
            frontier.sort_unstable();
            frontier.dedup();
            let reqs = requests(&dist, &frontier, true);
            settled.extend_from_slice(&frontier);
            relax(&mut dist, &mut buckets, reqs);
        }
        settled.sort_unstable();
        settled.dedup();
        let reqs = requests(&dist, &settled, false);
        relax(&mut dist, &mut buckets, reqs);
        i += 1;
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testgraphs::representations;
    use crate::algorithms::{bfs, UNREACHED};
    use crate::graph::{generate, load_edge_list, AdjacencyGraph, GraphSpec};
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    fn dijkstra(g: &AdjacencyGraph, s: u32) -> Vec<u64> {
        let mut dist = vec![INFINITE; g.num_vertices()];
        dist[s as usize] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for (i, &u) in g.neighbors(v).iter().enumerate() {
                let w = g.weights(v).map_or(1, |ws| ws[i]);
                if d + w < dist[u as usize] {
                    dist[u as usize] = d + w;
                    heap.push(Reverse((d + w, u)));
                }
            }
        }
        dist
    }

    #[test]
    fn weighted_triangle() {
        let g = load_edge_list("0 1 1\n1 2 1\n0 2 3".as_bytes(), true).unwrap();
        assert_eq!(sssp(&g, 0, 1, Mode::Sequential).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn unit_weights_equal_bfs() {
        let g = generate(&GraphSpec::ErdosRenyi { n: 500, p: 0.01, seed: 5 }, false, 0).unwrap();
        let b = bfs(&g, 0, Mode::Sequential).unwrap().dist;
        let s = sssp(&g, 0, 1, Mode::Sequential).unwrap();
        for (x, y) in b.iter().zip(&s) {
            assert_eq!(if *x == UNREACHED { INFINITE } else { *x as u64 }, *y);
        }
    }

    #[test]
    fn random_weighted_match_dijkstra() {
        for seed in 0..10 {
            let g = generate(&GraphSpec::ErdosRenyi { n: 200, p: 0.03, seed }, true, 40).unwrap();
            let reference = dijkstra(&g, 0);
            for delta in [1, 7, default_delta(g.max_weight()), 1000] {
                assert_eq!(sssp(&g, 0, delta, Mode::Sequential).unwrap(), reference);
                assert_eq!(sssp(&g, 0, delta, Mode::Parallel).unwrap(), reference);
            }
            for cg in representations(&g) {
                if cg.stores_weights() {
                    assert_eq!(sssp(&cg, 0, 10, Mode::Sequential).unwrap(), reference);
                }
            }
        }
    }
}
