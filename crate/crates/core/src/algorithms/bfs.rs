//! Direction-optimizing breadth-first search.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use super::Mode;
use crate::error::{Error, Result};
use crate::graph::GraphView;

pub const UNREACHED: u32 = u32::MAX;
/// Go bottom-up once the frontier's edges exceed `1/ALPHA` of the unexplored edges.
pub const ALPHA: u64 = 15;
/// Return top-down once the frontier holds fewer than `n / BETA` vertices.
pub const BETA: u64 = 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsResult {
    /// Hop count from the source, [`UNREACHED`] if unreachable.
    pub dist: Vec<u32>,
    /// BFS-tree parent; the source is its own parent.
    pub parent: Vec<u32>,
}

pub fn bfs<G: GraphView>(g: &G, source: u32, mode: Mode) -> Result<BfsResult> {
    let n = g.num_vertices();
    if source as usize >= n {
        return Err(Error::Domain(format!("source {source} not in 0..{n}")));
    }
    let parent: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(UNREACHED)).collect();
    let mut dist = vec![UNREACHED; n];
    parent[source as usize].store(source, Ordering::Relaxed);
    dist[source as usize] = 0;
    let mut frontier = vec![source];
    let mut edges_unexplored = 2 * g.num_edges();
    let mut level = 0u32;
    let mut bottom_up = false;
    while !frontier.is_empty() {
        if bottom_up && (frontier.len() as u64) < n as u64 / BETA {
            bottom_up = false;
        }
        // degrees are only summed while top-down, as in the usual formulation; this
        // keeps bottom-up levels from decoding every frontier neighborhood twice
        if !bottom_up {
            let frontier_edges: u64 = match mode {
                Mode::Sequential => frontier.iter().map(|&v| g.degree(v) as u64).sum(),
                Mode::Parallel => frontier.par_iter().map(|&v| g.degree(v) as u64).sum(),
            };
            if frontier_edges > edges_unexplored / ALPHA {
                bottom_up = true;
            } else {
                edges_unexplored = edges_unexplored.saturating_sub(frontier_edges);
            }
        }
        let next = if bottom_up {
            bottom_up_step(g, &frontier, &parent, mode)
        } else {
            top_down_step(g, &frontier, &parent, mode)
        };
        level += 1;
        for &v in &next {
            dist[v as usize] = level;
        }
        frontier = next;
    }
    Ok(BfsResult {
        dist,
        parent: parent.into_iter().map(AtomicU32::into_inner).collect(),
    })
}

fn top_down_step<G: GraphView>(g: &G, frontier: &[u32], parent: &[AtomicU32], mode: Mode) -> Vec<u32> {
    let visit = |v: u32, out: &mut Vec<u32>| {
        g.for_each_neighbor(v, |u| {
            let p = &parent[u as usize];
            if p.load(Ordering::Relaxed) == UNREACHED
                && p.compare_exchange(UNREACHED, v, Ordering::Relaxed, Ordering::Relaxed).is_ok()
            {
                out.push(u);
            }
        });
    };
    match mode {
        Mode::Sequential => {
            let mut out = Vec::new();
            for &v in frontier {
                visit(v, &mut out);
            }
            out
        }
        Mode::Parallel => {
            let mut out: Vec<u32> = frontier
                .par_iter()
                .fold(Vec::new, |mut acc, &v| {
                    visit(v, &mut acc);
                    acc
                })
                .reduce(Vec::new, |mut a, mut b| {
                    a.append(&mut b);
                    a
                });
            out.sort_unstable();
            out
        }
    }
}

fn bottom_up_step<G: GraphView>(g: &G, frontier: &[u32], parent: &[AtomicU32], mode: Mode) -> Vec<u32> {
    let n = parent.len();
    let mut in_frontier = vec![false; n];
    for &v in frontier {
        in_frontier[v as usize] = true;
    }
    let probe = |v: u32| -> Option<(u32, u32)> {
        if parent[v as usize].load(Ordering::Relaxed) != UNREACHED {
            return None;
        }
        let mut found = None;
        g.visit_neighbors(v, |u| {
            if in_frontier[u as usize] {
                found = Some((v, u));
                false
            } else {
                true
            }
        });
        found
    };
    let discovered: Vec<(u32, u32)> = match mode {
        Mode::Sequential => (0..n as u32).filter_map(probe).collect(),
        Mode::Parallel => (0..n as u32).into_par_iter().filter_map(probe).collect(),
    };
    discovered
        .into_iter()
        .map(|(v, p)| {
            parent[v as usize].store(p, Ordering::Relaxed);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testgraphs::{from_pairs, representations};
    use crate::graph::{generate, AdjacencyGraph, GraphSpec};
    use std::collections::VecDeque;

    fn queue_bfs(g: &AdjacencyGraph, s: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHED; g.num_vertices()];
        dist[s as usize] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &u in g.neighbors(v) {
                if dist[u as usize] == UNREACHED {
                    dist[u as usize] = dist[v as usize] + 1;
                    q.push_back(u);
                }
            }
        }
        dist
    }

    fn check_tree(g: &AdjacencyGraph, r: &BfsResult, s: u32) {
        for v in 0..g.num_vertices() as u32 {
            let p = r.parent[v as usize];
            if v == s {
                assert_eq!(p, s);
            } else if r.dist[v as usize] == UNREACHED {
                assert_eq!(p, UNREACHED);
            } else {
                assert!(g.neighbors(v).contains(&p));
                assert_eq!(r.dist[p as usize] + 1, r.dist[v as usize]);
            }
        }
    }

    #[test]
    fn path_and_isolated() {
        let g = from_pairs(5, &[(0, 1), (1, 2), (2, 3)]);
        let r = bfs(&g, 0, Mode::Sequential).unwrap();
        assert_eq!(r.dist, vec![0, 1, 2, 3, UNREACHED]);
        assert!(bfs(&g, 5, Mode::Sequential).is_err());
    }

    #[test]
    fn kronecker_matches_queue_bfs_both_modes() {
        let g = generate(&GraphSpec::Kronecker { scale: 14, edge_factor: 16, seed: 3 }, false, 0).unwrap();
        let s = (0..g.num_vertices() as u32).max_by_key(|&v| g.degree(v)).unwrap();
        let reference = queue_bfs(&g, s);
        for mode in [Mode::Sequential, Mode::Parallel] {
            let r = bfs(&g, s, mode).unwrap();
            assert_eq!(r.dist, reference);
            check_tree(&g, &r, s);
        }
    }

    #[test]
    fn compressed_representations_agree() {
        let g = generate(&GraphSpec::ErdosRenyi { n: 200, p: 0.03, seed: 8 }, false, 0).unwrap();
        let reference = queue_bfs(&g, 0);
        for cg in representations(&g) {
            assert_eq!(bfs(&cg, 0, Mode::Sequential).unwrap().dist, reference);
            assert_eq!(bfs(&cg, 0, Mode::Parallel).unwrap().dist, reference);
        }
    }
}
