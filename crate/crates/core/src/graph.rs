//! Uncompressed adjacency arrays, edge-list ingestion and synthetic generators.

use std::collections::HashMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// R-MAT initiator probabilities `(a, b, c, d)` used by [`GraphSpec::Kronecker`].
pub const KRONECKER_INITIATOR: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Read-only query surface shared by the uncompressed and compressed graphs.
///
/// Neighbors are reported in storage order, which is ascending for every
/// representation in this crate.
pub trait GraphView: Sync {
    fn num_vertices(&self) -> usize;

    /// Undirected edge count `m`.
    fn num_edges(&self) -> u64;

    fn is_weighted(&self) -> bool;

    fn degree(&self, v: u32) -> usize;

    /// Calls `f` on each neighbor of `v` until it returns `false`.
    fn visit_neighbors<F: FnMut(u32) -> bool>(&self, v: u32, f: F);

    /// Like [`GraphView::visit_neighbors`] with edge weights (1 when unweighted).
    fn visit_weighted<F: FnMut(u32, u64) -> bool>(&self, v: u32, f: F);

    fn for_each_neighbor<F: FnMut(u32)>(&self, v: u32, mut f: F) {
        self.visit_neighbors(v, |u| {
            f(u);
            true
        });
    }

    fn neighbor_vec(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree(v));
        self.for_each_neighbor(v, |u| out.push(u));
        out
    }
}

/// CSR ground truth: `offsets` has `n + 1` entries and `neighbors[offsets[v]..offsets[v+1]]`
/// is the strictly ascending neighborhood of `v`. Every undirected edge is stored twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    offsets: Vec<u64>,
    neighbors: Vec<u32>,
    weights: Option<Vec<u64>>,
    max_weight: u64,
}

/// Source description for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    Kronecker { scale: u32, edge_factor: u32, seed: u64 },
}

impl GraphSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphSpec::ErdosRenyi { n, p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
                }
                if n > u32::MAX as usize {
                    return Err(Error::Capacity(format!("{n} vertices exceed 32-bit IDs")));
                }
            }
            GraphSpec::Kronecker { scale, edge_factor, .. } => {
                if scale < 1 || edge_factor < 1 {
                    return Err(Error::Config("kronecker needs scale >= 1 and edge_factor >= 1".into()));
                }
                if scale > 31 {
                    return Err(Error::Capacity(format!("scale {scale} exceeds 32-bit vertex IDs")));
                }
                let samples = (edge_factor as u128) << scale;
                if samples * 2 > usize::MAX as u128 / 16 {
                    return Err(Error::Capacity(format!("{samples} edge samples exceed the address space")));
                }
            }
        }
        Ok(())
    }

    /// Short tag in the `sX_eY` style for Kronecker graphs.
    pub fn describe(&self) -> String {
        match *self {
            GraphSpec::ErdosRenyi { n, p, seed } => format!("er_n{n}_p{p}_seed{seed}"),
            GraphSpec::Kronecker { scale, edge_factor, seed } => {
                let [a, b, c, d] = KRONECKER_INITIATOR;
                format!("s{scale}_e{edge_factor}_seed{seed}_init({a},{b},{c},{d})")
            }
        }
    }
}

impl AdjacencyGraph {
    /// Builds a normalized graph from raw (possibly directed, duplicated) edges.
    ///
    /// Edges are symmetrized, self-loops dropped and duplicates merged keeping the
    /// minimum weight.
    pub fn from_edges(n: usize, edges: &[(u32, u32, u64)], weighted: bool) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::Capacity(format!("{n} vertices exceed 32-bit IDs")));
        }
        let mut degree = vec![0u64; n + 1];
        for &(u, v, _) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = vec![0u64; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let total = offsets[n] as usize;
        let mut cursor: Vec<u64> = offsets[..n].to_vec();
        let mut slots: Vec<(u32, u64)> = vec![(0, 0); total];
        for &(u, v, w) in edges {
            if u == v {
                continue;
            }
            let w = if weighted { w } else { 0 };
            slots[cursor[u as usize] as usize] = (v, w);
            cursor[u as usize] += 1;
            slots[cursor[v as usize] as usize] = (u, w);
            cursor[v as usize] += 1;
        }
        drop(cursor);

        let mut neighbors = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(if weighted { total } else { 0 });
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0u64);
        for v in 0..n {
            let seg = &mut slots[offsets[v] as usize..offsets[v + 1] as usize];
            seg.sort_unstable();
            let mut last: Option<u32> = None;
            for &(u, w) in seg.iter() {
                // sorted by (id, weight): the first copy carries the minimum weight
                if last != Some(u) {
                    neighbors.push(u);
                    if weighted {
                        weights.push(w);
                    }
                    last = Some(u);
                }
            }
            new_offsets.push(neighbors.len() as u64);
        }
        let max_weight = weights.iter().copied().max().unwrap_or(0);
        Ok(Self {
            offsets: new_offsets,
            neighbors,
            weights: weighted.then_some(weights),
            max_weight,
        })
    }

    /// Assembles a graph from CSR arrays, checking every invariant.
    pub fn from_csr(offsets: Vec<u64>, neighbors: Vec<u32>, weights: Option<Vec<u64>>) -> Result<Self> {
        let max_weight = weights.as_ref().and_then(|w| w.iter().copied().max()).unwrap_or(0);
        let g = Self {
            offsets,
            neighbors,
            weights,
            max_weight,
        };
        g.check_invariants()?;
        Ok(g)
    }

    /// Verifies offsets, sortedness, ranges and symmetry (including weights).
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Decode(m));
        if self.offsets.is_empty() || self.offsets[0] != 0 {
            return bad("offsets must start at 0".into());
        }
        let n = self.num_vertices();
        if *self.offsets.last().unwrap() != self.neighbors.len() as u64 {
            return bad("last offset must equal the neighbor count".into());
        }
        if !self.neighbors.len().is_multiple_of(2) {
            return bad("odd number of adjacency entries".into());
        }
        if let Some(w) = &self.weights {
            if w.len() != self.neighbors.len() {
                return bad("weight array length mismatch".into());
            }
        }
        for v in 0..n {
            if self.offsets[v] > self.offsets[v + 1] {
                return bad(format!("offsets decrease at vertex {v}"));
            }
            let nv = self.neighbors(v as u32);
            for (i, &u) in nv.iter().enumerate() {
                if u as usize >= n {
                    return bad(format!("neighbor {u} of {v} out of range"));
                }
                if u as usize == v {
                    return bad(format!("self-loop at {v}"));
                }
                if i > 0 && nv[i - 1] >= u {
                    return bad(format!("neighborhood of {v} not strictly ascending"));
                }
            }
        }
        for v in 0..n as u32 {
            for (i, &u) in self.neighbors(v).iter().enumerate() {
                let back = self.neighbors(u);
                let Ok(j) = back.binary_search(&v) else {
                    return bad(format!("edge ({v}, {u}) not symmetric"));
                };
                if let Some(w) = &self.weights {
                    let (a, b) = (self.offsets[v as usize] as usize + i, self.offsets[u as usize] as usize + j);
                    if w[a] != w[b] {
                        return bad(format!("edge ({v}, {u}) has asymmetric weights"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> u64 {
        self.neighbors.len() as u64 / 2
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn weight_array(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// `Ŵ`, the largest edge weight (0 when unweighted).
    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn weights(&self, v: u32) -> Option<&[u64]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize])
    }

    /// Checked variants of [`Self::degree`] and [`Self::neighbors`].
    pub fn try_degree(&self, v: u32) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree(v))
    }

    pub fn try_neighbors(&self, v: u32) -> Result<&[u32]> {
        self.check_vertex(v)?;
        Ok(self.neighbors(v))
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::Domain(format!("vertex {v} not in 0..{}", self.num_vertices())))
        }
    }

    /// Largest neighbor ID `N̂_v`, if any.
    pub fn max_neighbor(&self, v: u32) -> Option<u32> {
        self.neighbors(v).last().copied()
    }

    /// Drops weights, keeping the structure.
    pub fn without_weights(&self) -> Self {
        Self {
            offsets: self.offsets.clone(),
            neighbors: self.neighbors.clone(),
            weights: None,
            max_weight: 0,
        }
    }
}

impl GraphView for AdjacencyGraph {
    fn num_vertices(&self) -> usize {
        AdjacencyGraph::num_vertices(self)
    }

    fn num_edges(&self) -> u64 {
        AdjacencyGraph::num_edges(self)
    }

    fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    fn degree(&self, v: u32) -> usize {
        AdjacencyGraph::degree(self, v)
    }

    #[inline]
    fn visit_neighbors<F: FnMut(u32) -> bool>(&self, v: u32, mut f: F) {
        for &u in self.neighbors(v) {
            if !f(u) {
                break;
            }
        }
    }

    fn visit_weighted<F: FnMut(u32, u64) -> bool>(&self, v: u32, mut f: F) {
        let nv = self.neighbors(v);
        match self.weights(v) {
            Some(ws) => {
                for (&u, &w) in nv.iter().zip(ws) {
                    if !f(u, w) {
                        break;
                    }
                }
            }
            None => {
                for &u in nv {
                    if !f(u, 1) {
                        break;
                    }
                }
            }
        }
    }
}

/// Parses a whitespace-separated edge list (`u v` or `u v w`, `#` comments).
///
/// IDs are compacted to `0..n` in order of first appearance. With `weighted`
/// set every edge line must carry a weight; otherwise a third column is ignored.
pub fn load_edge_list<R: BufRead>(reader: R, weighted: bool) -> Result<AdjacencyGraph> {
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut edges = Vec::new();
    let intern = |raw: u64, ids: &mut HashMap<u64, u32>| -> Result<u32> {
        let next = ids.len();
        if next >= u32::MAX as usize {
            return Err(Error::Capacity("more than 2^32 - 1 distinct vertex IDs".into()));
        }
        Ok(*ids.entry(raw).or_insert(next as u32))
    };
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 'u v' or 'u v w', found {} fields", fields.len()),
            });
        }
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("'{s}' is not a nonnegative integer ({e})"),
            })
        };
        let (a, b) = (num(fields[0])?, num(fields[1])?);
        let w = match (weighted, fields.get(2)) {
            (true, Some(s)) => num(s)?,
            (true, None) => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "weighted input requires a weight column".into(),
                })
            }
            (false, Some(s)) => {
                num(s)?;
                0
            }
            (false, None) => 0,
        };
        let u = intern(a, &mut ids)?;
        let v = intern(b, &mut ids)?;
        edges.push((u, v, w));
    }
    AdjacencyGraph::from_edges(ids.len(), &edges, weighted)
}

/// Generates a synthetic graph; weights, when requested, are uniform in `1..=max_weight`.
pub fn generate(spec: &GraphSpec, weighted: bool, max_weight: u64) -> Result<AdjacencyGraph> {
    spec.validate()?;
    if weighted && max_weight == 0 {
        return Err(Error::Config("weighted generation needs max_weight >= 1".into()));
    }
    match *spec {
        GraphSpec::ErdosRenyi { n, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for_each_er_pair(n, p, &mut rng, |u, v| edges.push((u, v)));
            let edges: Vec<(u32, u32, u64)> = edges
                .into_iter()
                .map(|(u, v)| (u, v, if weighted { rng.gen_range(1..=max_weight) } else { 0 }))
                .collect();
            AdjacencyGraph::from_edges(n, &edges, weighted)
        }
        GraphSpec::Kronecker { scale, edge_factor, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1usize << scale;
            let samples = (edge_factor as usize) << scale;
            let [a, b, c, _] = KRONECKER_INITIATOR;
            let mut edges = Vec::with_capacity(samples);
            for _ in 0..samples {
                let (mut u, mut v) = (0u32, 0u32);
                for _ in 0..scale {
                    let r: f64 = rng.gen();
                    let (bu, bv) = if r < a {
                        (0, 0)
                    } else if r < a + b {
                        (0, 1)
                    } else if r < a + b + c {
                        (1, 0)
                    } else {
                        (1, 1)
                    };
                    u = (u << 1) | bu;
                    v = (v << 1) | bv;
                }
                let w = if weighted { rng.gen_range(1..=max_weight) } else { 0 };
                edges.push((u, v, w));
            }
            // Vertex IDs are shuffled after sampling, as in the Graph500 and GAPBS generators,
            // so that degree does not correlate with ID.
            let mut relabel: Vec<u32> = (0..n as u32).collect();
            relabel.shuffle(&mut rng);
            for e in edges.iter_mut() {
                e.0 = relabel[e.0 as usize];
                e.1 = relabel[e.1 as usize];
            }
            AdjacencyGraph::from_edges(n, &edges, weighted)
        }
    }
}

/// Enumerates unordered pairs `(u, v)`, `u > v`, each independently with probability `p`,
/// by drawing geometric skip lengths.
fn for_each_er_pair<R: Rng>(n: usize, p: f64, rng: &mut R, mut emit: impl FnMut(u32, u32)) {
    if n < 2 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for u in 1..n as u32 {
            for v in 0..u {
                emit(u, v);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut u, mut v) = (1usize, -1i64);
    loop {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        v += 1 + skip.min(1e18) as i64;
        while v >= u as i64 && u < n {
            v -= u as i64;
            u += 1;
        }
        if u >= n {
            break;
        }
        emit(u as u32, v as u32);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> AdjacencyGraph {
        load_edge_list(s.as_bytes(), false).unwrap()
    }

    #[test]
    fn path_of_three() {
        let g = parse("0 1\n1 2");
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn self_loops_and_duplicates_normalized() {
        let g = parse("0 1\n1 0\n0 0");
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
        g.check_invariants().unwrap();
    }

    #[test]
    fn ids_compacted_by_first_appearance() {
        let g = parse("# comment\n5 9\n\n9 7");
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn weighted_duplicates_keep_minimum() {
        let g = load_edge_list("0 1 7\n1 0 3\n1 2 5".as_bytes(), true).unwrap();
        assert_eq!(g.weights(0).unwrap(), &[3]);
        assert_eq!(g.weights(1).unwrap(), &[3, 5]);
        assert_eq!(g.max_weight(), 5);
        g.check_invariants().unwrap();
    }

    #[test]
    fn malformed_lines_report_line_number() {
        match load_edge_list("0 1\n1 x".as_bytes(), false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load_edge_list("0 1 2\n1 2".as_bytes(), true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_edge_list("0 1 2 3".as_bytes(), false).is_err());
        assert!(load_edge_list("-1 2".as_bytes(), false).is_err());
    }

    #[test]
    fn er_extremes() {
        let k4 = generate(&GraphSpec::ErdosRenyi { n: 4, p: 1.0, seed: 1 }, false, 0).unwrap();
        assert_eq!(k4.num_edges(), 6);
        assert_eq!(k4.neighbors(0), &[1, 2, 3]);
        let empty = generate(&GraphSpec::ErdosRenyi { n: 100, p: 0.0, seed: 1 }, false, 0).unwrap();
        assert_eq!(empty.num_edges(), 0);
        assert_eq!(empty.num_vertices(), 100);
        assert_eq!(empty.degree(42), 0);
        assert!(empty.neighbors(42).is_empty());
    }

    #[test]
    fn er_edge_count_near_expectation() {
        let n = 2000;
        let p = 0.01;
        let g = generate(&GraphSpec::ErdosRenyi { n, p, seed: 3 }, false, 0).unwrap();
        let expected = p * (n * (n - 1) / 2) as f64;
        let m = g.num_edges() as f64;
        assert!((m - expected).abs() < 5.0 * expected.sqrt(), "m={m} expected={expected}");
        g.check_invariants().unwrap();
    }

    #[test]
    fn kronecker_is_deterministic() {
        let spec = GraphSpec::Kronecker { scale: 10, edge_factor: 16, seed: 7 };
        let a = generate(&spec, false, 0).unwrap();
        let b = generate(&spec, false, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_vertices(), 1024);
        a.check_invariants().unwrap();
        let c = generate(&GraphSpec::Kronecker { scale: 10, edge_factor: 16, seed: 8 }, false, 0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn weighted_generation_is_symmetric() {
        let g = generate(&GraphSpec::ErdosRenyi { n: 60, p: 0.2, seed: 5 }, true, 9).unwrap();
        g.check_invariants().unwrap();
        assert!(g.max_weight() <= 9 && g.max_weight() >= 1);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&GraphSpec::ErdosRenyi { n: 3, p: 1.5, seed: 0 }, false, 0).is_err());
        assert!(matches!(
            generate(&GraphSpec::Kronecker { scale: 40, edge_factor: 1, seed: 0 }, false, 0),
            Err(Error::Capacity(_))
        ));
        assert!(generate(&GraphSpec::Kronecker { scale: 0, edge_factor: 1, seed: 0 }, false, 0).is_err());
    }

    #[test]
    fn out_of_range_vertex_is_domain_error() {
        let g = parse("0 1");
        assert!(matches!(g.try_degree(2), Err(Error::Domain(_))));
        assert!(g.try_neighbors(1).is_ok());
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let g = generate(&GraphSpec::Kronecker { scale: 8, edge_factor: 8, seed: 2 }, false, 0).unwrap();
        let total: usize = (0..g.num_vertices() as u32).map(|v| g.degree(v)).sum();
        assert_eq!(total as u64, 2 * g.num_edges());
    }
}
