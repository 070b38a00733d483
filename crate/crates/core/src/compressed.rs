//! A queryable graph assembled from an offset structure, an encoded adjacency
//! payload and the relabeling that produced it.

use std::fmt;

use crate::bitio::{BitBuf, BitWriter, PackedArray};
use crate::error::{Error, Result};
use crate::fine::{FineLayout, FineScheme, FixedIter, GapMode, IdMode, WeightMode};
use crate::graph::{AdjacencyGraph, GraphView};
use crate::offsets::{
    BitVectorOffsets, Flavor, OffsetArray, OffsetScheme, OffsetSizeReport, OffsetStructure, PtrWidth, DEFAULT_PERIOD,
};
use crate::permute::{apply, BrbLayout, Permutation, Permuter};
use crate::ser::{Reader, Writer};
use crate::transform::{brb_degree, encode_bytes, varint_degree, BrbIter, TransformKind, TransformScheme, VarintIter};

/// Everything `build` needs besides the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub offsets: OffsetScheme,
    pub adjacency: TransformKind,
    pub permuter: Permuter,
    /// Block size `B` for bit-vector offsets. `None` picks the entry width for
    /// fixed-width payloads and 8 for byte payloads.
    pub block_bits: Option<u32>,
    /// Interleaving period of bvIL.
    pub period: u32,
}

impl BuildOptions {
    pub fn new(offsets: OffsetScheme, adjacency: TransformKind, permuter: Permuter) -> Self {
        Self {
            offsets,
            adjacency,
            permuter,
            block_bits: None,
            period: DEFAULT_PERIOD,
        }
    }

    fn flavor(&self) -> Option<Flavor> {
        match self.offsets {
            OffsetScheme::Plain => Some(Flavor::Plain),
            OffsetScheme::Interleaved => Some(Flavor::Interleaved { period: self.period }),
            OffsetScheme::Sparse => Some(Flavor::Sparse),
            _ => None,
        }
    }

    /// Checks the (offsets, adjacency, permuter) triple against the compatibility matrix
    /// without looking at a graph.
    pub fn check(&self) -> Result<()> {
        let fail = |why: &str| Err(Error::Config(format!("{why}\n{}", compatibility_matrix())));
        let brb_perm = matches!(self.permuter, Permuter::Brb { .. });
        if self.adjacency == TransformKind::Brb && !brb_perm {
            return fail("brb adjacency requires the brb permuter");
        }
        if let Permuter::Brb { depth, .. } = self.permuter {
            if depth == 0 {
                return fail("the brb permuter needs a positive --brb-depth");
            }
        }
        if !self.offsets.is_bit_vector() {
            if self.block_bits.is_some() {
                return fail("a block size only applies to bit-vector offsets");
            }
            return Ok(());
        }
        match self.adjacency {
            TransformKind::Fixed(s) if !s.is_uniform() => {
                fail("bit-vector offsets need block-aligned neighborhoods; local fixed widths are bit aligned")
            }
            TransformKind::Fixed(_) => Ok(()),
            TransformKind::VarintFull => match self.block_bits {
                None | Some(8) => Ok(()),
                Some(_) => fail("varint-full pairs with bit vectors only at B = 8"),
            },
            TransformKind::VarintGap | TransformKind::Brb => match self.block_bits {
                None | Some(8) | Some(64) => Ok(()),
                Some(_) => fail("byte payloads pair with bit vectors at B = 8 or B = 64"),
            },
        }
    }
}

/// Human-readable list of valid scheme pairs.
pub fn compatibility_matrix() -> String {
    [
        "valid (offsets, adjacency) pairs:",
        "  ptr32|ptr64|ptrlogn   x any adjacency",
        "  bvpl|bvil|bvsd        x global|global-gap (B = entry width, weights none or global)",
        "  bvpl|bvil|bvsd        x varint-gap|varint-full|brb (B = 8)",
        "  bvpl|bvil|bvsd        x varint-gap|brb (B = 64, zero-padded neighborhoods)",
        "adjacency brb requires --permuter brb with --brb-depth k",
        "weights are stored only by the fixed-width adjacency schemes (+wg, +wl)",
    ]
    .join("\n")
}

/// Every (offsets, adjacency, block size) combination accepted by [`BuildOptions::check`].
pub fn valid_layouts(weighted: bool) -> Vec<(OffsetScheme, TransformKind, Option<u32>)> {
    let mut adjacency: Vec<TransformKind> = FineScheme::all()
        .into_iter()
        .filter(|s| weighted || s.weight == WeightMode::None)
        .map(TransformKind::Fixed)
        .collect();
    adjacency.extend([TransformKind::VarintGap, TransformKind::VarintFull, TransformKind::Brb]);
    let mut out = Vec::new();
    for o in OffsetScheme::ALL {
        for &a in &adjacency {
            let blocks: &[Option<u32>] = if !o.is_bit_vector() {
                &[None]
            } else if a.is_byte_oriented() {
                &[None, Some(64)]
            } else {
                &[None]
            };
            for &b in blocks {
                let opts = BuildOptions {
                    block_bits: b,
                    ..BuildOptions::new(
                        o,
                        a,
                        Permuter::Brb {
                            depth: 1,
                            imbalance: 0.0,
                            seed: 0,
                        },
                    )
                };
                if opts.check().is_ok() {
                    out.push((o, a, b));
                }
            }
        }
    }
    out
}

/// Itemized size in bits. The six components add up to the serialized sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeReport {
    pub offsets_bits: u64,
    pub payload_bits: u64,
    pub headers_bits: u64,
    pub permutation_bits: u64,
    /// Block alignment and byte rounding.
    pub padding_bits: u64,
    /// Section descriptors, length fields and codec parameters.
    pub metadata_bits: u64,
    pub offsets_detail: OffsetSizeReport,
    /// `32(n + 1) + 32 * 2m`: a CSR with 32-bit offsets and IDs.
    pub baseline_ptr32_bits: u64,
}

impl SizeReport {
    pub fn total_bits(&self) -> u64 {
        self.offsets_bits + self.payload_bits + self.headers_bits + self.permutation_bits + self.padding_bits + self.metadata_bits
    }

    /// Offsets, headers and payload: the structure proper.
    pub fn structure_bits(&self) -> u64 {
        self.offsets_bits + self.payload_bits + self.headers_bits
    }

    pub const CSV_HEADER: &'static str =
        "offsets_bits,payload_bits,headers_bits,permutation_bits,padding_bits,metadata_bits,total_bits,offsets_raw_bits,offsets_aux_bits,offsets_side_bits,offsets_formula_bits,baseline_ptr32_bits";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.3},{}",
            self.offsets_bits,
            self.payload_bits,
            self.headers_bits,
            self.permutation_bits,
            self.padding_bits,
            self.metadata_bits,
            self.total_bits(),
            self.offsets_detail.raw_bits,
            self.offsets_detail.aux_bits,
            self.offsets_detail.side_bits,
            self.offsets_detail.formula_bits,
            self.baseline_ptr32_bits
        )
    }
}

/// Container section tags of a compressed graph.
pub(crate) mod section {
    pub const OFFSETS: u8 = 1;
    pub const HEADERS: u8 = 2;
    pub const PAYLOAD: u8 = 3;
    pub const CODEC: u8 = 4;
    pub const PERMUTATION: u8 = 5;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedGraph {
    n: usize,
    m: u64,
    max_weight: u64,
    o_scheme: OffsetScheme,
    scheme: TransformScheme,
    offsets: OffsetStructure,
    headers: Option<PackedArray>,
    payload: BitBuf,
    /// Zero bits inserted to block-align neighborhoods.
    align_padding_bits: u64,
    permutation: Option<Permutation>,
}

impl CompressedGraph {
    /// Relabels `g` with the configured permuter and encodes it.
    pub fn build(g: &AdjacencyGraph, opts: &BuildOptions) -> Result<Self> {
        opts.check()?;
        let (p, brb) = opts.permuter.run(g)?;
        Self::build_with_permutation(g, opts, p, brb)
    }

    /// As [`Self::build`] with a precomputed relabeling.
    pub fn build_with_permutation(
        g: &AdjacencyGraph,
        opts: &BuildOptions,
        p: Permutation,
        brb: Option<BrbLayout>,
    ) -> Result<Self> {
        opts.check()?;
        let keep_weights = matches!(opts.adjacency, TransformKind::Fixed(s) if s.weight != WeightMode::None);
        let base;
        let g = if g.is_weighted() && !keep_weights {
            base = g.without_weights();
            &base
        } else {
            g
        };
        let relabeled;
        let h = if p.is_identity() {
            g
        } else {
            relabeled = apply(g, &p)?;
            &relabeled
        };
        let scheme = match opts.adjacency {
            TransformKind::Fixed(s) => TransformScheme::Fixed(FineLayout::for_graph(h, s)?),
            TransformKind::VarintGap => TransformScheme::VarintGap,
            TransformKind::VarintFull => TransformScheme::VarintFull,
            TransformKind::Brb => TransformScheme::Brb(
                brb.ok_or_else(|| Error::Config("brb adjacency requires the brb permuter's part layout".into()))?,
            ),
        };
        let n = h.num_vertices();
        let mut w = BitWriter::new();
        let mut bit_offsets = Vec::with_capacity(n + 1);
        bit_offsets.push(0u64);
        let mut headers = Vec::new();
        let mut align_padding_bits = 0;
        let block_bits = match opts.flavor() {
            None => None,
            Some(_) => Some(match (&scheme, opts.block_bits) {
                (TransformScheme::Fixed(l), b) => {
                    let e = l.uniform_entry_bits().expect("checked: uniform scheme");
                    match b {
                        None => e,
                        Some(b) if b == e => e,
                        Some(b) => {
                            return Err(Error::Config(format!(
                                "fixed-width payload with {e}-bit entries needs B = {e}, got {b}\n{}",
                                compatibility_matrix()
                            )))
                        }
                    }
                }
                (_, b) => b.unwrap_or(8),
            }),
        };
        match &scheme {
            TransformScheme::Fixed(layout) => {
                for v in 0..n as u32 {
                    let enc = layout.encode(v, h.neighbors(v), h.weights(v))?;
                    layout.write(&enc, &mut w);
                    if layout.scheme.has_header() {
                        headers.push(layout.header_value(&enc));
                    }
                    bit_offsets.push(w.bit_len());
                }
            }
            _ => {
                let mut bytes = Vec::new();
                for v in 0..n as u32 {
                    bytes.clear();
                    encode_bytes(v, h.neighbors(v), &scheme, &mut bytes)?;
                    w.push_bytes(&bytes);
                    if let Some(b) = block_bits {
                        if !bytes.is_empty() {
                            let before = w.bit_len();
                            w.align_to(b as u64);
                            align_padding_bits += w.bit_len() - before;
                        }
                    }
                    bit_offsets.push(w.bit_len());
                }
            }
        }
        let payload = w.finish();
        let offsets = match opts.flavor() {
            Some(flavor) => {
                OffsetStructure::Bits(BitVectorOffsets::build(&bit_offsets, block_bits.unwrap(), flavor)?)
            }
            None => {
                let unit = match &scheme {
                    TransformScheme::Fixed(l) => l.uniform_entry_bits().unwrap_or(1),
                    _ => 8,
                };
                let units: Vec<u64> = bit_offsets.iter().map(|&b| b / unit as u64).collect();
                let width = match opts.offsets {
                    OffsetScheme::Ptr32 => PtrWidth::W32,
                    OffsetScheme::Ptr64 => PtrWidth::W64,
                    _ => PtrWidth::Logn,
                };
                OffsetStructure::Array(OffsetArray::build(&units, width, unit)?)
            }
        };
        let headers = match &scheme {
            TransformScheme::Fixed(l) if l.scheme.has_header() => Some(PackedArray::pack(&headers, l.header_bits())?),
            _ => None,
        };
        Ok(Self {
            n,
            m: h.num_edges(),
            max_weight: if keep_weights { h.max_weight() } else { 0 },
            o_scheme: opts.offsets,
            scheme,
            offsets,
            headers,
            payload,
            align_padding_bits,
            permutation: (!p.is_identity()).then_some(p),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> u64 {
        self.m
    }

    pub fn stores_weights(&self) -> bool {
        matches!(&self.scheme, TransformScheme::Fixed(l) if l.scheme.weight != WeightMode::None)
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn offset_scheme(&self) -> OffsetScheme {
        self.o_scheme
    }

    pub fn adjacency(&self) -> TransformKind {
        self.scheme.kind()
    }

    pub fn transform(&self) -> &TransformScheme {
        &self.scheme
    }

    pub fn offsets(&self) -> &OffsetStructure {
        &self.offsets
    }

    pub fn block_bits(&self) -> u32 {
        match &self.offsets {
            OffsetStructure::Bits(b) => b.block_bits(),
            OffsetStructure::Array(_) => 0,
        }
    }

    /// Old → new IDs; `None` when the labeling is the identity.
    pub fn permutation(&self) -> Option<&Permutation> {
        self.permutation.as_ref()
    }

    /// New label of original vertex `v`.
    pub fn relabel(&self, v: u32) -> u32 {
        self.permutation.as_ref().map_or(v, |p| p.get(v))
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::Domain(format!("vertex {v} not in 0..{}", self.n)))
        }
    }

    #[inline]
    fn fixed_widths(&self, layout: &FineLayout, v: u32) -> (u32, u32) {
        match &self.headers {
            Some(h) => layout.widths_from_header(h.get(v as usize)),
            None => (layout.global_id_width, layout.global_weight_width),
        }
    }

    #[inline]
    fn bytes_of(&self, start: u64, end: u64) -> &[u8] {
        &self.payload.as_bytes()[(start / 8) as usize..(end / 8) as usize]
    }

    #[inline]
    fn degree_unchecked(&self, v: u32) -> usize {
        let (s, e) = self.offsets.span(v as usize);
        if s == e {
            return 0;
        }
        match &self.scheme {
            TransformScheme::Fixed(l) => {
                let (a, b) = self.fixed_widths(l, v);
                ((e - s) / (a + b) as u64) as usize
            }
            TransformScheme::VarintGap => varint_degree(self.bytes_of(s, e), true),
            TransformScheme::VarintFull => varint_degree(self.bytes_of(s, e), false),
            TransformScheme::Brb(l) => brb_degree(self.bytes_of(s, e), l),
        }
    }

    pub fn degree(&self, v: u32) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree_unchecked(v))
    }

    #[inline]
    fn iter_unchecked(&self, v: u32) -> NeighborIter<'_> {
        let (s, e) = self.offsets.span(v as usize);
        match &self.scheme {
            TransformScheme::Fixed(l) => {
                let widths = self.fixed_widths(l, v);
                let d = if s == e { 0 } else { ((e - s) / (widths.0 + widths.1) as u64) as usize };
                NeighborIter::Fixed(FixedIter::new(&self.payload, s, d, widths, l.scheme.gap, v))
            }
            TransformScheme::VarintGap => NeighborIter::Varint(VarintIter::new(self.bytes_of(s, e), v, true)),
            TransformScheme::VarintFull => NeighborIter::Varint(VarintIter::new(self.bytes_of(s, e), v, false)),
            TransformScheme::Brb(l) => NeighborIter::Brb(BrbIter::new(self.bytes_of(s, e), l)),
        }
    }

    /// One offset lookup, then sequential decoding.
    pub fn neighbors(&self, v: u32) -> Result<NeighborIter<'_>> {
        self.check_vertex(v)?;
        Ok(self.iter_unchecked(v))
    }

    /// The `i`-th neighbor of `v`; direct for fixed absolute entries, sequential otherwise.
    pub fn neighbor(&self, v: u32, i: usize) -> Result<u32> {
        let d = self.degree(v)?;
        if i >= d {
            return Err(Error::Domain(format!("neighbor index {i} not in 0..{d} for vertex {v}")));
        }
        if let TransformScheme::Fixed(l) = &self.scheme {
            if l.scheme.gap == GapMode::Absolute {
                let (s, _) = self.offsets.span(v as usize);
                let (a, b) = self.fixed_widths(l, v);
                return Ok(self.payload.read(s + i as u64 * (a + b) as u64, a) as u32);
            }
        }
        Ok(self.iter_unchecked(v).nth(i).unwrap())
    }

    /// `(neighbor, weight)` pairs; weight 1 when weights are not stored.
    pub fn neighbors_weighted(&self, v: u32) -> Result<Vec<(u32, u64)>> {
        self.check_vertex(v)?;
        let mut out = Vec::new();
        self.visit_weighted(v, |u, w| {
            out.push((u, w));
            true
        });
        Ok(out)
    }

    /// Serialized sections in container order.
    pub(crate) fn sections(&self) -> Vec<(u8, Vec<u8>)> {
        let mut out = Vec::new();
        let mut w = Writer::new();
        self.offsets.write(&mut w);
        out.push((section::OFFSETS, w.into_bytes()));
        if let Some(h) = &self.headers {
            let mut w = Writer::new();
            w.packed(h);
            out.push((section::HEADERS, w.into_bytes()));
        }
        let mut w = Writer::new();
        w.bitbuf(&self.payload);
        w.u64(self.align_padding_bits);
        out.push((section::PAYLOAD, w.into_bytes()));
        let mut w = Writer::new();
        match &self.scheme {
            TransformScheme::Fixed(l) => {
                w.u32(l.global_id_width);
                w.u32(l.global_weight_width);
                w.u32(l.id_header_width);
                w.u32(l.weight_header_width);
            }
            TransformScheme::Brb(l) => {
                w.u32(l.depth);
                w.u32(l.suffix_width);
                w.u64_slice(&l.part_starts);
            }
            TransformScheme::VarintGap | TransformScheme::VarintFull => {}
        }
        out.push((section::CODEC, w.into_bytes()));
        if let Some(p) = &self.permutation {
            let mut w = Writer::new();
            w.u32_slice(p.forward());
            w.u64(p.scheme().len() as u64);
            w.bytes(p.scheme().as_bytes());
            out.push((section::PERMUTATION, w.into_bytes()));
        }
        out
    }

    /// Rebuilds a graph from the container header fields and its sections.
    pub(crate) fn from_sections(
        n: usize,
        m: u64,
        max_weight: u64,
        o_scheme: OffsetScheme,
        kind: TransformKind,
        sections: &[(u8, &[u8])],
    ) -> Result<Self> {
        let find = |tag: u8| sections.iter().find(|s| s.0 == tag).map(|s| s.1);
        let need = |tag: u8| find(tag).ok_or_else(|| Error::Decode(format!("missing section {tag}")));
        let offsets = OffsetStructure::read(&mut Reader::new(need(section::OFFSETS)?))?;
        if offsets.num_vertices() != n {
            return Err(Error::Decode("offset structure has the wrong vertex count".into()));
        }
        let mut r = Reader::new(need(section::PAYLOAD)?);
        let payload = r.bitbuf()?;
        let align_padding_bits = r.u64()?;
        let mut r = Reader::new(need(section::CODEC)?);
        let scheme = match kind {
            TransformKind::Fixed(s) => {
                let layout = FineLayout {
                    scheme: s,
                    n,
                    global_id_width: r.u32()?,
                    global_weight_width: r.u32()?,
                    id_header_width: r.u32()?,
                    weight_header_width: r.u32()?,
                };
                let widths = [layout.global_id_width, layout.global_weight_width, layout.id_header_width, layout.weight_header_width];
                if widths.iter().any(|&x| x > 64) {
                    return Err(Error::Decode("fixed codec width above 64".into()));
                }
                let uniform_ok = !s.is_uniform() || (layout.global_id_width >= 1 && layout.global_id_width + layout.global_weight_width <= 64);
                let local_ok = s.id == IdMode::Global || (1..=6).contains(&layout.id_header_width);
                if !uniform_ok || !local_ok {
                    return Err(Error::Decode("inconsistent fixed codec parameters".into()));
                }
                TransformScheme::Fixed(layout)
            }
            TransformKind::VarintGap => TransformScheme::VarintGap,
            TransformKind::VarintFull => TransformScheme::VarintFull,
            TransformKind::Brb => {
                let layout = BrbLayout {
                    depth: r.u32()?,
                    suffix_width: r.u32()?,
                    part_starts: r.u64_vec()?,
                };
                layout.validate(n)?;
                if !(1..=32).contains(&layout.suffix_width) {
                    return Err(Error::Decode("BRB suffix width outside 1..=32".into()));
                }
                TransformScheme::Brb(layout)
            }
        };
        let headers = match find(section::HEADERS) {
            Some(bytes) => {
                let h = Reader::new(bytes).packed()?;
                if h.len() != n {
                    return Err(Error::Decode("header array has the wrong length".into()));
                }
                Some(h)
            }
            None => None,
        };
        if let TransformScheme::Fixed(l) = &scheme {
            if l.scheme.has_header() != headers.is_some() {
                return Err(Error::Decode("header section presence does not match the scheme".into()));
            }
        }
        let permutation = match find(section::PERMUTATION) {
            Some(bytes) => {
                let mut r = Reader::new(bytes);
                let forward = r.u32_vec()?;
                let len = r.u64()? as usize;
                let name = String::from_utf8(r.take(len)?.to_vec())
                    .map_err(|_| Error::Decode("permutation scheme name is not UTF-8".into()))?;
                if forward.len() != n {
                    return Err(Error::Decode("permutation has the wrong length".into()));
                }
                Some(Permutation::new(forward, name).map_err(|e| Error::Decode(e.to_string()))?)
            }
            None => None,
        };
        let cg = Self {
            n,
            m,
            max_weight,
            o_scheme,
            scheme,
            offsets,
            headers,
            payload,
            align_padding_bits,
            permutation,
        };
        cg.validate()?;
        Ok(cg)
    }

    /// Structural checks so that queries on a decoded container cannot read out of bounds.
    fn validate(&self) -> Result<()> {
        let total = self.payload.bit_len();
        let mut prev_end = 0;
        for v in 0..self.n {
            let (s, e) = self.offsets.span(v);
            if s > e || e > total || s < prev_end && s != e {
                return Err(Error::Decode(format!("neighborhood span of vertex {v} is out of bounds")));
            }
            let labels: Vec<i64> = if let TransformScheme::Fixed(l) = &self.scheme {
                let (a, b) = self.fixed_widths(l, v as u32);
                if a == 0 || a + b > 64 || (e - s) % (a + b) as u64 != 0 {
                    return Err(Error::Decode(format!("neighborhood of vertex {v} is not whole entries")));
                }
                let mut out: Vec<i64> = Vec::new();
                let mut pos = s;
                while pos < e {
                    let x = self.payload.read(pos, a);
                    out.push(match (l.scheme.gap, out.last()) {
                        (GapMode::Absolute, _) => x as i64,
                        (GapMode::Gap, None) => v as i64 + crate::bitio::unzigzag(x),
                        (GapMode::Gap, Some(&p)) => p.saturating_add(x.min(i64::MAX as u64) as i64),
                    });
                    pos += (a + b) as u64;
                }
                out
            } else {
                if s % 8 != 0 || e % 8 != 0 {
                    return Err(Error::Decode(format!("byte neighborhood of vertex {v} is unaligned")));
                }
                crate::transform::decode_bytes(self.bytes_of(s, e), v as u32, &self.scheme)?
                    .into_iter()
                    .map(|u| u as i64)
                    .collect()
            };
            if labels.iter().any(|&u| u < 0 || u >= self.n as i64 || u == v as i64)
                || labels.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(Error::Decode(format!("neighborhood of vertex {v} is malformed")));
            }
            if labels.len() != self.degree_unchecked(v as u32) {
                return Err(Error::Decode(format!("degree of vertex {v} disagrees with its payload")));
            }
            prev_end = prev_end.max(e);
        }
        let degree_sum: u64 = (0..self.n as u32).map(|v| self.degree_unchecked(v) as u64).sum();
        if degree_sum != 2 * self.m {
            return Err(Error::Decode("degree sum does not match the edge count".into()));
        }
        Ok(())
    }

    /// Exact accounting of the serialized sections.
    pub fn size_report(&self) -> SizeReport {
        let offsets_detail = self.offsets.size_report();
        let offsets_bits = offsets_detail.total_bits();
        let headers_bits = self.headers.as_ref().map_or(0, |h| h.bit_len());
        let payload_bits = self.payload.bit_len() - self.align_padding_bits;
        let permutation_bits = self.permutation.as_ref().map_or(0, |p| 32 * p.len() as u64);
        let rounding = |bits: u64| bits.div_ceil(8) * 8 - bits;
        let padding_bits = self.align_padding_bits + rounding(self.payload.bit_len()) + rounding(headers_bits);
        let section_bits: u64 = self.sections().iter().map(|s| 8 * s.1.len() as u64).sum();
        let metadata_bits = section_bits - offsets_bits - payload_bits - headers_bits - permutation_bits - padding_bits;
        SizeReport {
            offsets_bits,
            payload_bits,
            headers_bits,
            permutation_bits,
            padding_bits,
            metadata_bits,
            offsets_detail,
            baseline_ptr32_bits: 32 * (self.n as u64 + 1) + 64 * self.m,
        }
    }
}

impl fmt::Display for CompressedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {} (n={}, m={}, permutation={})",
            self.o_scheme,
            self.scheme.kind(),
            self.n,
            self.m,
            self.permutation.as_ref().map_or("identity", |p| p.scheme())
        )
    }
}

/// Neighbor iterator of any payload kind.
#[derive(Debug, Clone)]
pub enum NeighborIter<'a> {
    Fixed(FixedIter<'a>),
    Varint(VarintIter<'a>),
    Brb(BrbIter<'a>),
}

impl Iterator for NeighborIter<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        match self {
            NeighborIter::Fixed(it) => it.next(),
            NeighborIter::Varint(it) => it.next(),
            NeighborIter::Brb(it) => it.next(),
        }
    }
}

impl GraphView for CompressedGraph {
    fn num_vertices(&self) -> usize {
        self.n
    }

    fn num_edges(&self) -> u64 {
        self.m
    }

    fn is_weighted(&self) -> bool {
        self.stores_weights()
    }

    #[inline]
    fn degree(&self, v: u32) -> usize {
        self.degree_unchecked(v)
    }

    #[inline]
    fn visit_neighbors<F: FnMut(u32) -> bool>(&self, v: u32, mut f: F) {
        for u in self.iter_unchecked(v) {
            if !f(u) {
                break;
            }
        }
    }

    fn visit_weighted<F: FnMut(u32, u64) -> bool>(&self, v: u32, mut f: F) {
        match self.iter_unchecked(v) {
            NeighborIter::Fixed(mut it) => {
                while let Some((u, w)) = it.next_weighted() {
                    if !f(u, w) {
                        break;
                    }
                }
            }
            it => {
                for u in it {
                    if !f(u, 1) {
                        break;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, load_edge_list, GraphSpec};

    fn k4() -> AdjacencyGraph {
        load_edge_list("0 1\n0 2\n0 3\n1 2\n1 3\n2 3".as_bytes(), false).unwrap()
    }

    fn fixed(id: IdMode, gap: GapMode) -> TransformKind {
        TransformKind::Fixed(FineScheme::new(id, gap, WeightMode::None))
    }

    #[test]
    fn k4_global_ptr64_sizes() {
        let opts = BuildOptions::new(OffsetScheme::Ptr64, fixed(IdMode::Global, GapMode::Absolute), Permuter::Identity);
        let cg = CompressedGraph::build(&k4(), &opts).unwrap();
        let r = cg.size_report();
        assert_eq!(r.payload_bits, 24);
        assert_eq!(r.offsets_bits, 5 * 64);
        assert_eq!(cg.neighbor(2, 1).unwrap(), 1);
    }

    #[test]
    fn incompatible_pairs_are_config_errors() {
        let opts = BuildOptions::new(OffsetScheme::Sparse, fixed(IdMode::Local, GapMode::Absolute), Permuter::Identity);
        let err = CompressedGraph::build(&k4(), &opts).unwrap_err();
        assert!(matches!(err, Error::Config(ref s) if s.contains("valid (offsets, adjacency) pairs")));
        let opts = BuildOptions::new(OffsetScheme::Ptr64, TransformKind::Brb, Permuter::Identity);
        assert!(matches!(CompressedGraph::build(&k4(), &opts), Err(Error::Config(_))));
        let opts = BuildOptions {
            block_bits: Some(64),
            ..BuildOptions::new(OffsetScheme::Plain, TransformKind::VarintFull, Permuter::Identity)
        };
        assert!(matches!(CompressedGraph::build(&k4(), &opts), Err(Error::Config(_))));
    }

    #[test]
    fn domain_errors() {
        let opts = BuildOptions::new(OffsetScheme::Sparse, TransformKind::VarintGap, Permuter::DegreeMin);
        let cg = CompressedGraph::build(&k4(), &opts).unwrap();
        assert!(matches!(cg.degree(4), Err(Error::Domain(_))));
        assert!(matches!(cg.neighbor(0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn every_layout_round_trips_with_isolated_vertices() {
        let mut g = generate(&GraphSpec::Kronecker { scale: 8, edge_factor: 4, seed: 11 }, true, 20).unwrap();
        assert!((0..g.num_vertices() as u32).any(|v| g.degree(v) == 0));
        for weighted in [true, false] {
            if !weighted {
                g = g.without_weights();
            }
            for (o, a, b) in valid_layouts(weighted) {
                for permuter in [
                    Permuter::Identity,
                    Permuter::DegreeMin,
                    Permuter::Brb { depth: 3, imbalance: 0.001, seed: 1 },
                ] {
                    let opts = BuildOptions { block_bits: b, ..BuildOptions::new(o, a, permuter) };
                    if opts.check().is_err() {
                        continue;
                    }
                    let cg = CompressedGraph::build(&g, &opts).unwrap_or_else(|e| panic!("{o} {a} {b:?}: {e}"));
                    for v in 0..g.num_vertices() as u32 {
                        let nv = cg.relabel(v);
                        let mut expect: Vec<(u32, u64)> = match g.weights(v) {
                            Some(ws) if cg.stores_weights() => {
                                g.neighbors(v).iter().zip(ws).map(|(&u, &w)| (cg.relabel(u), w)).collect()
                            }
                            _ => g.neighbors(v).iter().map(|&u| (cg.relabel(u), 1)).collect(),
                        };
                        expect.sort_unstable();
                        assert_eq!(cg.degree(nv).unwrap(), expect.len(), "{o} {a} {b:?} v={v}");
                        assert_eq!(cg.neighbors_weighted(nv).unwrap(), expect, "{o} {a} {b:?} v={v}");
                    }
                    let r = cg.size_report();
                    let section_bits: u64 = cg.sections().iter().map(|s| 8 * s.1.len() as u64).sum();
                    assert_eq!(r.total_bits(), section_bits);
                }
            }
        }
    }

    #[test]
    fn local_gap_beats_local_on_clustered_labels() {
        let g = generate(&GraphSpec::Kronecker { scale: 12, edge_factor: 16, seed: 1 }, false, 0).unwrap();
        let local = CompressedGraph::build(&g, &BuildOptions::new(OffsetScheme::Ptr64, fixed(IdMode::Local, GapMode::Absolute), Permuter::DegreeMin)).unwrap();
        let gap = CompressedGraph::build(&g, &BuildOptions::new(OffsetScheme::Ptr64, fixed(IdMode::Local, GapMode::Gap), Permuter::DegreeMin)).unwrap();
        assert!(gap.size_report().payload_bits < local.size_report().payload_bits);
    }

    #[test]
    fn global_payload_is_exact() {
        let g = generate(&GraphSpec::ErdosRenyi { n: 1000, p: 0.01, seed: 4 }, false, 0).unwrap();
        let cg = CompressedGraph::build(&g, &BuildOptions::new(OffsetScheme::Ptr32, fixed(IdMode::Global, GapMode::Absolute), Permuter::Identity)).unwrap();
        let r = cg.size_report();
        assert_eq!(r.payload_bits, 2 * g.num_edges() * 10);
        assert_eq!(r.offsets_bits, 32 * 1001);
    }
}
