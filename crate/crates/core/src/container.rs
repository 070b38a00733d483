//! Binary container for plain and compressed graphs.
//!
//! Little-endian throughout:
//!
//! ```text
//! "LOGG" version:u16 kind:u8
//! n:u64 m:u64 flags:u8 o_scheme:u8 a_scheme:u8 block_bits:u32 max_weight:u64 has_permutation:u8
//! section_count:u32 { tag:u8 length:u64 bytes[length] }*
//! ```
//!
//! `kind` is 0 for an adjacency graph and 1 for a compressed graph. Flag bit 0 marks
//! stored weights. Scheme fields are `0xff` for adjacency graphs. A compressed
//! container ends with a [`REPORT_TAG`] section holding its size report as CSV; the
//! report accounts for every other section byte.

use crate::compressed::{CompressedGraph, SizeReport};
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;
use crate::offsets::OffsetScheme;
use crate::ser::{Reader, Writer};
use crate::transform::TransformKind;

pub const MAGIC: &[u8; 4] = b"LOGG";
pub const VERSION: u16 = 1;
pub const REPORT_TAG: u8 = 0x10;

const KIND_GRAPH: u8 = 0;
const KIND_COMPRESSED: u8 = 1;
const NO_SCHEME: u8 = 0xff;

const GRAPH_OFFSETS: u8 = 1;
const GRAPH_NEIGHBORS: u8 = 2;
const GRAPH_WEIGHTS: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Container {
    Graph(AdjacencyGraph),
    Compressed(CompressedGraph),
}

/// Fixed header fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub compressed: bool,
    pub n: u64,
    pub m: u64,
    pub weighted: bool,
    pub o_scheme: Option<OffsetScheme>,
    pub a_scheme: Option<TransformKind>,
    pub block_bits: u32,
    pub max_weight: u64,
    pub has_permutation: bool,
}

fn frame(header: &Header, sections: &[(u8, Vec<u8>)]) -> Vec<u8> {
    let mut w = Writer::new();
    w.bytes(MAGIC);
    w.u16(VERSION);
    w.u8(if header.compressed { KIND_COMPRESSED } else { KIND_GRAPH });
    w.u64(header.n);
    w.u64(header.m);
    w.u8(header.weighted as u8);
    w.u8(header.o_scheme.map_or(NO_SCHEME, |o| o.tag()));
    w.u8(header.a_scheme.map_or(NO_SCHEME, |a| a.tag()));
    w.u32(header.block_bits);
    w.u64(header.max_weight);
    w.u8(header.has_permutation as u8);
    w.u32(sections.len() as u32);
    for (tag, bytes) in sections {
        w.u8(*tag);
        w.u64(bytes.len() as u64);
        w.bytes(bytes);
    }
    w.into_bytes()
}

pub fn write_graph(g: &AdjacencyGraph) -> Vec<u8> {
    let mut sections = Vec::new();
    let mut w = Writer::new();
    w.u64_slice(g.offsets());
    sections.push((GRAPH_OFFSETS, w.into_bytes()));
    let mut w = Writer::new();
    w.u32_slice(g.neighbor_array());
    sections.push((GRAPH_NEIGHBORS, w.into_bytes()));
    if let Some(ws) = g.weight_array() {
        let mut w = Writer::new();
        w.u64_slice(ws);
        sections.push((GRAPH_WEIGHTS, w.into_bytes()));
    }
    let header = Header {
        compressed: false,
        n: g.num_vertices() as u64,
        m: g.num_edges(),
        weighted: g.is_weighted(),
        o_scheme: None,
        a_scheme: None,
        block_bits: 0,
        max_weight: g.max_weight(),
        has_permutation: false,
    };
    frame(&header, &sections)
}

pub fn write_compressed(cg: &CompressedGraph) -> Vec<u8> {
    let mut sections = cg.sections();
    let report = cg.size_report();
    sections.push((REPORT_TAG, format!("{}\n{}\n", SizeReport::CSV_HEADER, report.csv_row()).into_bytes()));
    let header = Header {
        compressed: true,
        n: cg.num_vertices() as u64,
        m: cg.num_edges(),
        weighted: cg.stores_weights(),
        o_scheme: Some(cg.offset_scheme()),
        a_scheme: Some(cg.adjacency()),
        block_bits: cg.block_bits(),
        max_weight: cg.max_weight(),
        has_permutation: cg.permutation().is_some(),
    };
    frame(&header, &sections)
}

fn parse(bytes: &[u8]) -> Result<(Header, Vec<(u8, &[u8])>)> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MAGIC {
        return Err(Error::Decode("not a graph container (bad magic)".into()));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::Decode(format!("unsupported container version {version}")));
    }
    let compressed = match r.u8()? {
        KIND_GRAPH => false,
        KIND_COMPRESSED => true,
        k => return Err(Error::Decode(format!("unknown container kind {k}"))),
    };
    let n = r.u64()?;
    let m = r.u64()?;
    let flags = r.u8()?;
    if flags > 1 {
        return Err(Error::Decode(format!("unknown header flags {flags:#x}")));
    }
    let o = r.u8()?;
    let a = r.u8()?;
    let header = Header {
        compressed,
        n,
        m,
        weighted: flags & 1 == 1,
        o_scheme: if o == NO_SCHEME { None } else { Some(OffsetScheme::from_tag(o)?) },
        a_scheme: if a == NO_SCHEME { None } else { Some(TransformKind::from_tag(a)?) },
        block_bits: r.u32()?,
        max_weight: r.u64()?,
        has_permutation: match r.u8()? {
            0 => false,
            1 => true,
            x => return Err(Error::Decode(format!("bad permutation flag {x}"))),
        },
    };
    if n > u32::MAX as u64 {
        return Err(Error::Decode(format!("vertex count {n} exceeds 32-bit IDs")));
    }
    let count = r.u32()?;
    let mut sections = Vec::new();
    for _ in 0..count {
        let tag = r.u8()?;
        let len = r.u64()?;
        let len = usize::try_from(len).map_err(|_| Error::Decode("section too large".into()))?;
        sections.push((tag, r.take(len)?));
    }
    if r.remaining() != 0 {
        return Err(Error::Decode("trailing bytes after the last section".into()));
    }
    let mut tags: Vec<u8> = sections.iter().map(|s| s.0).collect();
    tags.sort_unstable();
    if tags.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Decode("duplicate section".into()));
    }
    Ok((header, sections))
}

/// Header of a container without decoding its sections.
pub fn read_header(bytes: &[u8]) -> Result<Header> {
    parse(bytes).map(|(h, _)| h)
}

/// Byte lengths of the sections, report section excluded.
pub fn section_sizes(bytes: &[u8]) -> Result<Vec<(u8, u64)>> {
    Ok(parse(bytes)?
        .1
        .iter()
        .filter(|s| s.0 != REPORT_TAG)
        .map(|s| (s.0, s.1.len() as u64))
        .collect())
}

pub fn read(bytes: &[u8]) -> Result<Container> {
    let (h, sections) = parse(bytes)?;
    let find = |tag: u8| {
        sections
            .iter()
            .find(|s| s.0 == tag)
            .map(|s| s.1)
            .ok_or_else(|| Error::Decode(format!("missing section {tag}")))
    };
    if !h.compressed {
        let offsets = Reader::new(find(GRAPH_OFFSETS)?).u64_vec()?;
        let neighbors = Reader::new(find(GRAPH_NEIGHBORS)?).u32_vec()?;
        let weights = if h.weighted { Some(Reader::new(find(GRAPH_WEIGHTS)?).u64_vec()?) } else { None };
        let g = AdjacencyGraph::from_csr(offsets, neighbors, weights).map_err(|e| Error::Decode(e.to_string()))?;
        if g.num_vertices() as u64 != h.n || g.num_edges() != h.m {
            return Err(Error::Decode("graph sections disagree with the header".into()));
        }
        return Ok(Container::Graph(g));
    }
    let o = h.o_scheme.ok_or_else(|| Error::Decode("compressed container without offset scheme".into()))?;
    let a = h.a_scheme.ok_or_else(|| Error::Decode("compressed container without adjacency scheme".into()))?;
    let body: Vec<(u8, &[u8])> = sections.iter().copied().filter(|s| s.0 != REPORT_TAG).collect();
    let cg = CompressedGraph::from_sections(h.n as usize, h.m, h.max_weight, o, a, &body)?;
    if cg.permutation().is_some() != h.has_permutation
        || cg.stores_weights() != h.weighted
        || cg.block_bits() != h.block_bits
    {
        return Err(Error::Decode("compressed sections disagree with the header".into()));
    }
    Ok(Container::Compressed(cg))
}
