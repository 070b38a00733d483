//! Recursive edge-cut bisection: BFS-grown seed partition refined with
//! Fiduccia-Mattheyses passes.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

pub const MAX_DEPTH: u32 = 63;

/// Partition decisions of a recursive bisection. Bit `depth - 1 - l` of a vertex's
/// prefix is its side at level `l`, so prefixes order the leaves inorder.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorTree {
    prefix: Vec<u64>,
    depth: u32,
    imbalance: f64,
}

impl SeparatorTree {
    pub fn num_vertices(&self) -> usize {
        self.prefix.len()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn imbalance(&self) -> f64 {
        self.imbalance
    }

    #[inline]
    pub fn prefix(&self, v: u32) -> u64 {
        self.prefix[v as usize]
    }

    /// Side of `v` (false = first half) at `level` in `0..depth`.
    pub fn side(&self, level: u32, v: u32) -> bool {
        (self.prefix[v as usize] >> (self.depth - 1 - level)) & 1 == 1
    }

    /// Sizes of the parts at the deepest level, by prefix (only nonempty parts).
    pub fn leaf_sizes(&self) -> Vec<(u64, usize)> {
        let mut p = self.prefix.clone();
        p.sort_unstable();
        let mut out: Vec<(u64, usize)> = Vec::new();
        for x in p {
            match out.last_mut() {
                Some((q, c)) if *q == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

/// Edges whose endpoints differ in their side at `level`, counted only between
/// vertices that were still in the same part above that level.
pub fn cut_size(g: &AdjacencyGraph, tree: &SeparatorTree, level: u32) -> u64 {
    let shift = tree.depth - level;
    let mut cut = 0;
    for v in 0..g.num_vertices() as u32 {
        for &u in g.neighbors(v) {
            if u > v
                && tree.prefix(u) >> shift == tree.prefix(v) >> shift
                && tree.side(level, u) != tree.side(level, v)
            {
                cut += 1;
            }
        }
    }
    cut
}

fn check_imbalance(imbalance: f64) -> Result<()> {
    if !(0.0..1.0).contains(&imbalance) {
        return Err(Error::Config(format!("imbalance {imbalance} outside [0, 1)")));
    }
    Ok(())
}

/// Bisects every part `depth` times; parts of at most one vertex are not split further.
pub fn bisect(g: &AdjacencyGraph, depth: u32, imbalance: f64, seed: u64) -> Result<SeparatorTree> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Precondition(format!("bisection depth must be in 1..={MAX_DEPTH}")));
    }
    check_imbalance(imbalance)?;
    Ok(run(g, Some(depth), imbalance, seed))
}

/// Bisects until every part has at most one vertex.
pub fn bisect_full(g: &AdjacencyGraph, imbalance: f64, seed: u64) -> Result<SeparatorTree> {
    check_imbalance(imbalance)?;
    Ok(run(g, None, imbalance, seed))
}

fn run(g: &AdjacencyGraph, depth: Option<u32>, imbalance: f64, seed: u64) -> SeparatorTree {
    let n = g.num_vertices();
    let mut prefix = vec![0u64; n];
    let mut parts: Vec<Vec<u32>> = if n > 0 { vec![(0..n as u32).collect()] } else { Vec::new() };
    let mut ws = Workspace::new(n);
    let mut levels = 0u32;
    loop {
        let done = match depth {
            Some(d) => levels == d,
            None => parts.iter().all(|p| p.len() <= 1) || levels == MAX_DEPTH,
        };
        if done {
            break;
        }
        let mut next = Vec::with_capacity(parts.len() * 2);
        for (pi, part) in parts.iter().enumerate() {
            for &v in part {
                prefix[v as usize] <<= 1;
            }
            if part.len() <= 1 {
                next.push(part.clone());
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((levels as u64) << 48) ^ (pi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let sides = ws.bipartition(g, part, imbalance, &mut rng);
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, &v) in part.iter().enumerate() {
                if sides[i] == 1 {
                    prefix[v as usize] |= 1;
                    b.push(v);
                } else {
                    a.push(v);
                }
            }
            next.push(a);
            next.push(b);
        }
        parts = next;
        levels += 1;
    }
    SeparatorTree {
        prefix,
        depth: levels,
        imbalance,
    }
}

/// Reusable scratch space for per-part bipartitioning.
struct Workspace {
    local: Vec<u32>,
}

const NO_LOCAL: u32 = u32::MAX;
const MAX_PASSES: usize = 16;
const MAX_FRUITLESS_MOVES: usize = 128;

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            local: vec![NO_LOCAL; n],
        }
    }

    /// Side (0 or 1) of each vertex of `part`, in `part` order.
    fn bipartition(&mut self, g: &AdjacencyGraph, part: &[u32], imbalance: f64, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let s = part.len();
        for (i, &v) in part.iter().enumerate() {
            self.local[v as usize] = i as u32;
        }
        // induced subgraph in local indices
        let mut off = Vec::with_capacity(s + 1);
        let mut adj = Vec::new();
        off.push(0usize);
        for &v in part {
            for &u in g.neighbors(v) {
                let l = self.local[u as usize];
                if l != NO_LOCAL {
                    adj.push(l);
                }
            }
            off.push(adj.len());
        }
        for &v in part {
            self.local[v as usize] = NO_LOCAL;
        }
        let nb = |i: usize| &adj[off[i]..off[i + 1]];

        let allowance = ((s % 2) as i64).max((imbalance * s as f64).floor() as i64);
        let mut side = grow_seed(s, &nb, rng);
        fm_refine(s, &nb, &mut side, allowance);
        side
    }
}

/// Grows side 0 breadth-first from a pseudo-peripheral vertex until it holds `s / 2` vertices.
fn grow_seed<'a>(s: usize, nb: &dyn Fn(usize) -> &'a [u32], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let target = s / 2;
    let start = rng.gen_range(0..s);
    // the last vertex reached by a BFS from `start`
    let mut seen = vec![false; s];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut last = start;
    while let Some(x) = queue.pop_front() {
        last = x;
        for &y in nb(x) {
            if !seen[y as usize] {
                seen[y as usize] = true;
                queue.push_back(y as usize);
            }
        }
    }
    let mut side = vec![1u8; s];
    let mut taken = 0;
    let mut queued = vec![false; s];
    let mut queue = VecDeque::from([last]);
    queued[last] = true;
    let mut next_unvisited = 0;
    while taken < target {
        let x = match queue.pop_front() {
            Some(x) => x,
            None => {
                while queued[next_unvisited] {
                    next_unvisited += 1;
                }
                queued[next_unvisited] = true;
                next_unvisited
            }
        };
        side[x] = 0;
        taken += 1;
        for &y in nb(x) {
            if !queued[y as usize] {
                queued[y as usize] = true;
                queue.push_back(y as usize);
            }
        }
    }
    side
}

/// Fiduccia-Mattheyses passes with lazy max-heaps; each pass keeps its best balanced prefix
/// of moves and passes repeat while the cut shrinks.
fn fm_refine<'a>(s: usize, nb: &dyn Fn(usize) -> &'a [u32], side: &mut [u8], allowance: i64) {
    let gain_of = |side: &[u8], x: usize| -> i64 {
        nb(x)
            .iter()
            .map(|&y| if side[y as usize] != side[x] { 1 } else { -1 })
            .sum()
    };
    let mut sizes = [0i64; 2];
    for &x in side.iter() {
        sizes[x as usize] += 1;
    }
    let mut cut: i64 = (0..s).map(|x| nb(x).iter().filter(|&&y| side[y as usize] != side[x]).count() as i64).sum::<i64>() / 2;
    let mut gain = vec![0i64; s];
    let mut locked = vec![false; s];
    for _ in 0..MAX_PASSES {
        let start_cut = cut;
        let mut heaps: [BinaryHeap<(i64, Reverse<u32>)>; 2] = [BinaryHeap::new(), BinaryHeap::new()];
        for x in 0..s {
            gain[x] = gain_of(side, x);
            locked[x] = false;
            heaps[side[x] as usize].push((gain[x], Reverse(x as u32)));
        }
        let mut moves: Vec<usize> = Vec::new();
        let mut best_cut = cut;
        let mut best_len = 0;
        loop {
            let mut cand: [Option<(i64, usize)>; 2] = [None, None];
            for from in 0..2 {
                let diff_after = (sizes[1 - from] + 1) - (sizes[from] - 1);
                if diff_after.abs() > allowance + 2 {
                    continue;
                }
                while let Some(&(gn, Reverse(x))) = heaps[from].peek() {
                    let x = x as usize;
                    if locked[x] || gain[x] != gn || side[x] as usize != from {
                        heaps[from].pop();
                    } else {
                        cand[from] = Some((gn, x));
                        break;
                    }
                }
            }
            let from = match (cand[0], cand[1]) {
                (None, None) => break,
                (Some(_), None) => 0,
                (None, Some(_)) => 1,
                (Some((g0, x0)), Some((g1, x1))) => {
                    if g0 != g1 {
                        (g1 > g0) as usize
                    } else if sizes[0] != sizes[1] {
                        (sizes[1] > sizes[0]) as usize
                    } else {
                        (x1 < x0) as usize
                    }
                }
            };
            let (gn, x) = cand[from].unwrap();
            heaps[from].pop();
            locked[x] = true;
            side[x] = 1 - from as u8;
            sizes[from] -= 1;
            sizes[1 - from] += 1;
            cut -= gn;
            for &y in nb(x) {
                let y = y as usize;
                if locked[y] {
                    continue;
                }
                gain[y] += if side[y] == side[x] { -2 } else { 2 };
                heaps[side[y] as usize].push((gain[y], Reverse(y as u32)));
            }
            moves.push(x);
            if (sizes[0] - sizes[1]).abs() <= allowance && cut < best_cut {
                best_cut = cut;
                best_len = moves.len();
            }
            if moves.len() - best_len > MAX_FRUITLESS_MOVES {
                break;
            }
        }
        for &x in moves[best_len..].iter().rev() {
            let from = side[x] as usize;
            side[x] = 1 - from as u8;
            sizes[from] -= 1;
            sizes[1 - from] += 1;
        }
        cut = best_cut;
        if cut >= start_cut {
            break;
        }
    }
}
