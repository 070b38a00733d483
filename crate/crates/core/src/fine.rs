//! Fine-element logarithmization: vertex-ID and weight widths, fixed-size gap
//! encoding, and the associated size and access-cost models.
//!
//! A neighborhood `N_v = (N_1 < N_2 < ... < N_d)` is stored as `d` entries of one
//! fixed width, each optionally followed by its edge weight:
//!
//! | id mode | gap mode | entries | width |
//! |---------|----------|---------|-------|
//! | global  | absolute | `N_i` | `bits_for(n - 1)` |
//! | local   | absolute | `N_i` | `bits_for(N_d)` |
//! | global  | gap | `zigzag(N_1 - v), N_2 - N_1, ...` | graph-wide `bits_for(max entry)` |
//! | local   | gap | same | `bits_for(max entry of N_v)` |
//!
//! Local widths are kept in a per-vertex header of fixed size storing `width - 1`.

use std::fmt;
use std::str::FromStr;

use crate::bitio::{bits_for, ceil_log2, unzigzag, zigzag, BitBuf, BitWriter};
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdMode {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapMode {
    Absolute,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    None,
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FineScheme {
    pub id: IdMode,
    pub gap: GapMode,
    pub weight: WeightMode,
}

impl FineScheme {
    pub const fn new(id: IdMode, gap: GapMode, weight: WeightMode) -> Self {
        Self { id, gap, weight }
    }

    /// All twelve combinations.
    pub fn all() -> Vec<FineScheme> {
        let mut out = Vec::with_capacity(12);
        for id in [IdMode::Global, IdMode::Local] {
            for gap in [GapMode::Absolute, GapMode::Gap] {
                for weight in [WeightMode::None, WeightMode::Global, WeightMode::Local] {
                    out.push(FineScheme { id, gap, weight });
                }
            }
        }
        out
    }

    /// True when every entry in the graph has the same width.
    pub fn is_uniform(self) -> bool {
        self.id == IdMode::Global && self.weight != WeightMode::Local
    }

    pub fn has_header(self) -> bool {
        !self.is_uniform()
    }

    /// Command-line name of the ID/gap part (`global`, `local`, `global-gap`, `local-gap`).
    pub fn adjacency_name(self) -> &'static str {
        match (self.id, self.gap) {
            (IdMode::Global, GapMode::Absolute) => "global",
            (IdMode::Local, GapMode::Absolute) => "local",
            (IdMode::Global, GapMode::Gap) => "global-gap",
            (IdMode::Local, GapMode::Gap) => "local-gap",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        let id = matches!(self.id, IdMode::Local) as u8;
        let gap = matches!(self.gap, GapMode::Gap) as u8;
        let w = match self.weight {
            WeightMode::None => 0,
            WeightMode::Global => 1,
            WeightMode::Local => 2,
        };
        id | gap << 1 | w << 2
    }

    pub(crate) fn from_tag(t: u8) -> Result<Self> {
        let id = if t & 1 == 1 { IdMode::Local } else { IdMode::Global };
        let gap = if t & 2 == 2 { GapMode::Gap } else { GapMode::Absolute };
        let weight = match t >> 2 {
            0 => WeightMode::None,
            1 => WeightMode::Global,
            2 => WeightMode::Local,
            _ => return Err(Error::Decode(format!("bad fine scheme tag {t}"))),
        };
        Ok(Self { id, gap, weight })
    }
}

impl fmt::Display for FineScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.adjacency_name())?;
        match self.weight {
            WeightMode::None => Ok(()),
            WeightMode::Global => f.write_str("+wg"),
            WeightMode::Local => f.write_str("+wl"),
        }
    }
}

impl FromStr for FineScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ids, weight) = match s.split_once('+') {
            None => (s, WeightMode::None),
            Some((a, "wg")) => (a, WeightMode::Global),
            Some((a, "wl")) => (a, WeightMode::Local),
            Some(_) => return Err(Error::Config(format!("unknown weight suffix in '{s}'"))),
        };
        let (id, gap) = match ids {
            "global" => (IdMode::Global, GapMode::Absolute),
            "local" => (IdMode::Local, GapMode::Absolute),
            "global-gap" => (IdMode::Global, GapMode::Gap),
            "local-gap" => (IdMode::Local, GapMode::Gap),
            _ => return Err(Error::Config(format!("unknown fine scheme '{s}'"))),
        };
        Ok(Self { id, gap, weight })
    }
}

/// ID entries of one neighborhood under `gap`.
fn id_entries(v: u32, nv: &[u32], gap: GapMode) -> Result<Vec<u64>> {
    if nv.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Encode(format!("neighborhood of {v} is not strictly ascending")));
    }
    Ok(match gap {
        GapMode::Absolute => nv.iter().map(|&u| u as u64).collect(),
        GapMode::Gap => {
            let mut out = Vec::with_capacity(nv.len());
            let mut prev = None;
            for &u in nv {
                out.push(match prev {
                    None => zigzag(u as i64 - v as i64),
                    Some(p) => (u - p) as u64,
                });
                prev = Some(u);
            }
            out
        }
    })
}

/// One encoded neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedNeighborhood {
    pub id_width: u32,
    /// 0 when weights are not stored.
    pub weight_width: u32,
    pub entries: Vec<u64>,
    pub weights: Vec<u64>,
}

impl EncodedNeighborhood {
    pub fn entry_bits(&self) -> u32 {
        self.id_width + self.weight_width
    }

    pub fn payload_bits(&self) -> u64 {
        self.entries.len() as u64 * self.entry_bits() as u64
    }
}

/// Graph-wide parameters of a fine scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FineLayout {
    pub scheme: FineScheme,
    pub n: usize,
    /// ID width for global modes.
    pub global_id_width: u32,
    /// Weight width for global weights.
    pub global_weight_width: u32,
    /// Header field widths (0 when the field is absent).
    pub id_header_width: u32,
    pub weight_header_width: u32,
}

impl FineLayout {
    pub fn for_graph(g: &AdjacencyGraph, scheme: FineScheme) -> Result<Self> {
        if scheme.weight != WeightMode::None && !g.is_weighted() {
            return Err(Error::Config(format!(
                "scheme {scheme} stores weights but the graph is unweighted"
            )));
        }
        let n = g.num_vertices();
        let max_id = n.saturating_sub(1) as u64;
        let global_id_width = match (scheme.id, scheme.gap) {
            (IdMode::Global, GapMode::Absolute) => bits_for(max_id),
            (IdMode::Global, GapMode::Gap) => {
                let mut max_entry = 0u64;
                for v in 0..n as u32 {
                    for e in id_entries(v, g.neighbors(v), GapMode::Gap)? {
                        max_entry = max_entry.max(e);
                    }
                }
                bits_for(max_entry)
            }
            (IdMode::Local, _) => 0,
        };
        let global_weight_width = match scheme.weight {
            WeightMode::Global => bits_for(g.max_weight()),
            _ => 0,
        };
        // the widest local value the scheme could need, as a function of n and Ŵ
        let id_header_width = match (scheme.id, scheme.gap) {
            (IdMode::Global, _) => 0,
            (IdMode::Local, GapMode::Absolute) => bits_for(bits_for(max_id) as u64 - 1),
            (IdMode::Local, GapMode::Gap) => bits_for(bits_for(zigzag(-(max_id as i64))) as u64 - 1),
        };
        let weight_header_width = match scheme.weight {
            WeightMode::Local => bits_for(bits_for(g.max_weight()) as u64 - 1),
            _ => 0,
        };
        Ok(Self {
            scheme,
            n,
            global_id_width,
            global_weight_width,
            id_header_width,
            weight_header_width,
        })
    }

    pub fn header_bits(&self) -> u32 {
        self.id_header_width + self.weight_header_width
    }

    /// Entry width for uniform schemes.
    pub fn uniform_entry_bits(&self) -> Option<u32> {
        self.scheme
            .is_uniform()
            .then_some(self.global_id_width + self.global_weight_width)
    }

    pub fn encode(&self, v: u32, nv: &[u32], weights: Option<&[u64]>) -> Result<EncodedNeighborhood> {
        let entries = id_entries(v, nv, self.scheme.gap)?;
        let id_width = match self.scheme.id {
            IdMode::Global => self.global_id_width,
            IdMode::Local => bits_for(entries.iter().copied().max().unwrap_or(0)),
        };
        let (weight_width, weights) = match self.scheme.weight {
            WeightMode::None => (0, Vec::new()),
            mode => {
                let ws = weights
                    .ok_or_else(|| Error::Encode("weights required by the scheme".into()))?
                    .to_vec();
                if ws.len() != nv.len() {
                    return Err(Error::Encode("weight count differs from degree".into()));
                }
                let w = match mode {
                    WeightMode::Global => self.global_weight_width,
                    _ => bits_for(ws.iter().copied().max().unwrap_or(0)),
                };
                (w, ws)
            }
        };
        if id_width > 64 || entries.iter().any(|&e| id_width < 64 && e >> id_width != 0) {
            return Err(Error::Encode(format!("entry of vertex {v} exceeds the {id_width}-bit width")));
        }
        if weight_width > 0 && weights.iter().any(|&w| weight_width < 64 && w >> weight_width != 0) {
            return Err(Error::Encode(format!("weight of vertex {v} exceeds the {weight_width}-bit width")));
        }
        Ok(EncodedNeighborhood {
            id_width,
            weight_width,
            entries,
            weights,
        })
    }

    pub fn write(&self, enc: &EncodedNeighborhood, out: &mut BitWriter) {
        for (i, &e) in enc.entries.iter().enumerate() {
            out.push(e, enc.id_width);
            if enc.weight_width > 0 {
                out.push(enc.weights[i], enc.weight_width);
            }
        }
    }

    /// Packs the local widths into one header value (`width - 1` per field).
    pub fn header_value(&self, enc: &EncodedNeighborhood) -> u64 {
        let mut h = 0u64;
        if self.id_header_width > 0 {
            h = (enc.id_width - 1) as u64;
        }
        if self.weight_header_width > 0 {
            h |= ((enc.weight_width - 1) as u64) << self.id_header_width;
        }
        h
    }

    /// Inverse of [`Self::header_value`]: `(id_width, weight_width)`.
    #[inline]
    pub fn widths_from_header(&self, header: u64) -> (u32, u32) {
        let id = if self.id_header_width > 0 {
            (header & ((1u64 << self.id_header_width) - 1)) as u32 + 1
        } else {
            self.global_id_width
        };
        let w = match self.scheme.weight {
            WeightMode::None => 0,
            WeightMode::Global => self.global_weight_width,
            WeightMode::Local => (header >> self.id_header_width) as u32 + 1,
        };
        (id, w)
    }

    /// Decodes `degree` entries starting at `start_bit`.
    pub fn decode(
        &self,
        buf: &BitBuf,
        start_bit: u64,
        degree: usize,
        widths: (u32, u32),
        v: u32,
    ) -> (Vec<u32>, Vec<u64>) {
        let mut ids = Vec::with_capacity(degree);
        let mut ws = Vec::new();
        let mut it = FixedIter::new(buf, start_bit, degree, widths, self.scheme.gap, v);
        while let Some((u, w)) = it.next_weighted() {
            ids.push(u);
            if widths.1 > 0 {
                ws.push(w);
            }
        }
        (ids, ws)
    }
}

/// Sequential decoder: one multiplication to find the first entry, additions after.
#[derive(Debug, Clone)]
pub struct FixedIter<'a> {
    buf: &'a BitBuf,
    pos: u64,
    remaining: usize,
    id_width: u32,
    weight_width: u32,
    gap: GapMode,
    prev: Option<u32>,
    v: u32,
}

impl<'a> FixedIter<'a> {
    #[inline]
    pub fn new(buf: &'a BitBuf, start_bit: u64, degree: usize, widths: (u32, u32), gap: GapMode, v: u32) -> Self {
        Self {
            buf,
            pos: start_bit,
            remaining: degree,
            id_width: widths.0,
            weight_width: widths.1,
            gap,
            prev: None,
            v,
        }
    }

    #[inline]
    pub fn next_weighted(&mut self) -> Option<(u32, u64)> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let e = self.buf.read(self.pos, self.id_width);
        self.pos += self.id_width as u64;
        let w = if self.weight_width > 0 {
            let w = self.buf.read(self.pos, self.weight_width);
            self.pos += self.weight_width as u64;
            w
        } else {
            1
        };
        let u = match self.gap {
            GapMode::Absolute => e as u32,
            GapMode::Gap => match self.prev {
                None => (self.v as i64 + unzigzag(e)) as u32,
                Some(p) => p + e as u32,
            },
        };
        self.prev = Some(u);
        Some((u, w))
    }
}

impl Iterator for FixedIter<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        self.next_weighted().map(|(u, _)| u)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Encodes one neighborhood standalone: `(header, packed entries)`.
pub fn encode_neighborhood(
    layout: &FineLayout,
    v: u32,
    nv: &[u32],
    weights: Option<&[u64]>,
) -> Result<(u64, BitBuf, EncodedNeighborhood)> {
    let enc = layout.encode(v, nv, weights)?;
    let mut w = BitWriter::new();
    layout.write(&enc, &mut w);
    Ok((layout.header_value(&enc), w.finish(), enc))
}

/// Inverse of [`encode_neighborhood`].
pub fn decode_neighborhood(
    layout: &FineLayout,
    v: u32,
    header: u64,
    payload: &BitBuf,
    degree: usize,
) -> (Vec<u32>, Vec<u64>) {
    let widths = layout.widths_from_header(header);
    layout.decode(payload, 0, degree, widths, v)
}

/// Formula and measured sizes of a fine-encoded adjacency payload, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FineSizeReport {
    /// `Σ d_v (⌈log #ids⌉ + ⌈log #weights⌉)` with the scheme's per-graph or per-neighborhood value ranges.
    pub formula_payload_bits: u64,
    /// `Σ (⌈log log N̂_v⌉ + ⌈log log Ŵ_v⌉)` over nonempty neighborhoods in local modes.
    pub formula_header_bits: u64,
    pub encoded_payload_bits: u64,
    /// Fixed-size headers for every vertex, including isolated ones.
    pub encoded_header_bits: u64,
    /// Payload bits added by the one-bit floor of `bits_for` (formula width 0).
    pub floor_slack_bits: u64,
}

/// Analytic and measured payload size of `g` under `scheme`.
pub fn fine_size_bits(g: &AdjacencyGraph, scheme: FineScheme) -> Result<FineSizeReport> {
    let layout = FineLayout::for_graph(g, scheme)?;
    let mut r = FineSizeReport::default();
    let n = g.num_vertices();
    let global_id_formula = match (scheme.id, scheme.gap) {
        (IdMode::Global, GapMode::Absolute) => ceil_log2(n as u64),
        (IdMode::Global, GapMode::Gap) => {
            // graph-wide maximum entry; bits_for floors at 1 so recover the formula width directly
            let mut max_entry = 0u64;
            for v in 0..n as u32 {
                for e in id_entries(v, g.neighbors(v), GapMode::Gap)? {
                    max_entry = max_entry.max(e);
                }
            }
            ceil_log2(max_entry + 1)
        }
        _ => 0,
    };
    let global_weight_formula = ceil_log2(g.max_weight() + 1);
    for v in 0..n as u32 {
        let nv = g.neighbors(v);
        let enc = layout.encode(v, nv, g.weights(v))?;
        let d = nv.len() as u64;
        r.encoded_payload_bits += enc.payload_bits();
        if d == 0 {
            continue;
        }
        let id_formula = match scheme.id {
            IdMode::Global => global_id_formula,
            IdMode::Local => ceil_log2(enc.entries.iter().copied().max().unwrap() + 1),
        };
        let weight_formula = match scheme.weight {
            WeightMode::None => 0,
            WeightMode::Global => global_weight_formula,
            WeightMode::Local => ceil_log2(enc.weights.iter().copied().max().unwrap() + 1),
        };
        r.formula_payload_bits += d * (id_formula + weight_formula) as u64;
        r.floor_slack_bits += d * ((id_formula == 0) as u64 + (weight_formula == 0 && enc.weight_width > 0) as u64);
        if scheme.id == IdMode::Local {
            r.formula_header_bits += ceil_log2(id_formula as u64) as u64;
        }
        if scheme.weight == WeightMode::Local {
            r.formula_header_bits += ceil_log2(weight_formula as u64) as u64;
        }
    }
    r.encoded_header_bits = n as u64 * layout.header_bits() as u64;
    Ok(r)
}

/// Machine hierarchy for the distributed vertex-ID model: `counts[i]` elements at level `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchySpec {
    pub counts: Vec<u64>,
    /// Number of compute nodes for the flat (single-level) model.
    pub node_count: u64,
}

impl HierarchySpec {
    pub fn new(counts: Vec<u64>, node_count: u64) -> Result<Self> {
        if counts.first() != Some(&1) || counts.contains(&0) || node_count == 0 {
            return Err(Error::Config(
                "hierarchy needs H_1 = 1, positive counts and a positive node count".into(),
            ));
        }
        Ok(Self { counts, node_count })
    }

    pub fn levels(&self) -> usize {
        self.counts.len()
    }
}

/// Modeled vertex-ID storage for the flat node split and the multi-level split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchicalSize {
    /// `n⌈log(n/𝓗)⌉ + 𝓗⌈log 𝓗⌉`.
    pub flat_bits: u64,
    /// `n⌈log(n/H_N)⌉ + Σ_{j=2}^{N-1} H_j⌈log H_j⌉`.
    pub multilevel_bits: u64,
}

fn ceil_log2_ratio(n: u64, d: u64) -> u64 {
    // ⌈log2(n / d)⌉ for real division, 0 when n <= d
    if n <= d {
        return 0;
    }
    let mut k = 0u64;
    while (d as u128) << k < n as u128 {
        k += 1;
    }
    k
}

pub fn hierarchical_size(n: u64, h: &HierarchySpec) -> HierarchicalSize {
    let nodes = h.node_count;
    let flat_bits = n * ceil_log2_ratio(n, nodes) + nodes * ceil_log2(nodes) as u64;
    let bottom = *h.counts.last().unwrap();
    let inner: u64 = if h.counts.len() > 2 {
        h.counts[1..h.counts.len() - 1]
            .iter()
            .map(|&c| c * ceil_log2(c) as u64)
            .sum()
    } else {
        0
    };
    HierarchicalSize {
        flat_bits,
        multilevel_bits: n * ceil_log2_ratio(n, bottom) + inner,
    }
}

/// Latencies of the primitive operations on the access path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub t_cm: f64,
    pub t_mul: f64,
    pub t_shf: f64,
    pub t_and: f64,
    pub t_bxr: f64,
    pub t_add: f64,
    pub t_sub: f64,
}

impl CostParams {
    pub fn uniform(t: f64) -> Self {
        Self {
            t_cm: t,
            t_mul: t,
            t_shf: t,
            t_and: t,
            t_bxr: t,
            t_add: t,
            t_sub: t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessCost {
    pub t_edge: f64,
    pub t_neigh: f64,
    pub t_degree: f64,
}

/// Symbolic access-cost model for one edge, a whole neighborhood of degree `d_v`, and a degree.
pub fn cost_model(p: &CostParams, d_v: u64) -> Result<AccessCost> {
    let all = [p.t_cm, p.t_mul, p.t_shf, p.t_and, p.t_bxr, p.t_add, p.t_sub];
    if all.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Config("latencies must be finite and nonnegative".into()));
    }
    let t_edge = 2.0 * p.t_cm + p.t_mul + p.t_shf + p.t_and + p.t_bxr;
    let t_neigh = t_edge + d_v.saturating_sub(1) as f64 * (p.t_add + p.t_shf + p.t_and + p.t_bxr);
    let t_degree = 2.0 * p.t_cm + p.t_sub;
    Ok(AccessCost { t_edge, t_neigh, t_degree })
}
