//! Neighborhood codecs (transformers): fixed-width entries, varint gaps, varint
//! full labels, and BRB prefix groups.
//!
//! Byte-oriented layouts:
//!
//! * `varint-gap`: `zigzag(N_1 - v)`, then `N_i - N_{i-1}`, each a varint. No value
//!   is ever zero, so trailing `0x00` bytes are unambiguous padding.
//! * `varint-full`: each `N_i` as a varint.
//! * `brb`: groups of neighbors sharing a part prefix, each group
//!   `varint(count >= 1) varint(prefix)` followed by `count` suffixes of the
//!   graph-wide suffix width, padded to a byte. A zero count byte is padding.

use std::collections::BTreeMap;
use std::fmt;

use crate::bitio::{read_bits, unzigzag, varint_decode, varint_encode, zigzag, BitBuf, BitWriter};
use crate::error::{Error, Result};
use crate::fine::{FineLayout, FineScheme};
use crate::graph::AdjacencyGraph;
use crate::permute::BrbLayout;

/// Adjacency codec kind as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Fixed(FineScheme),
    VarintGap,
    VarintFull,
    Brb,
}

impl TransformKind {
    pub fn is_byte_oriented(self) -> bool {
        !matches!(self, TransformKind::Fixed(_))
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            TransformKind::Fixed(s) => s.tag(),
            TransformKind::VarintGap => 0x40,
            TransformKind::VarintFull => 0x41,
            TransformKind::Brb => 0x42,
        }
    }

    pub(crate) fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            0x40 => TransformKind::VarintGap,
            0x41 => TransformKind::VarintFull,
            0x42 => TransformKind::Brb,
            t if t < 0x40 => TransformKind::Fixed(FineScheme::from_tag(t)?),
            _ => return Err(Error::Decode(format!("bad adjacency tag {t:#x}"))),
        })
    }
}

impl std::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "varint-gap" => TransformKind::VarintGap,
            "varint-full" => TransformKind::VarintFull,
            "brb" => TransformKind::Brb,
            _ => TransformKind::Fixed(s.parse()?),
        })
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Fixed(s) => write!(f, "{s}"),
            TransformKind::VarintGap => f.write_str("varint-gap"),
            TransformKind::VarintFull => f.write_str("varint-full"),
            TransformKind::Brb => f.write_str("brb"),
        }
    }
}

/// A codec together with its graph-wide parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformScheme {
    Fixed(FineLayout),
    VarintGap,
    VarintFull,
    Brb(BrbLayout),
}

impl TransformScheme {
    pub fn kind(&self) -> TransformKind {
        match self {
            TransformScheme::Fixed(l) => TransformKind::Fixed(l.scheme),
            TransformScheme::VarintGap => TransformKind::VarintGap,
            TransformScheme::VarintFull => TransformKind::VarintFull,
            TransformScheme::Brb(_) => TransformKind::Brb,
        }
    }
}

/// One encoded neighborhood: the fixed-width header (local fixed schemes only) and payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub header: Option<u64>,
    pub payload: BitBuf,
}

fn check_sorted(v: u32, nv: &[u32]) -> Result<()> {
    if nv.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Encode(format!("neighborhood of {v} is not strictly ascending")));
    }
    Ok(())
}

/// Appends the byte encoding of `N_v` for the byte-oriented schemes.
pub fn encode_bytes(v: u32, nv: &[u32], scheme: &TransformScheme, out: &mut Vec<u8>) -> Result<()> {
    check_sorted(v, nv)?;
    match scheme {
        TransformScheme::VarintGap => {
            let mut prev = None;
            for &u in nv {
                let value = match prev {
                    None => zigzag(u as i64 - v as i64),
                    Some(p) => (u - p) as u64,
                };
                if value == 0 {
                    return Err(Error::Encode(format!("self loop at vertex {v}")));
                }
                varint_encode(value, out);
                prev = Some(u);
            }
        }
        TransformScheme::VarintFull => {
            for &u in nv {
                varint_encode(u as u64, out);
            }
        }
        TransformScheme::Brb(layout) => encode_brb(nv, layout, out),
        TransformScheme::Fixed(_) => {
            return Err(Error::Encode("fixed-width schemes are bit oriented".into()));
        }
    }
    Ok(())
}

fn encode_brb(nv: &[u32], layout: &BrbLayout, out: &mut Vec<u8>) {
    let mut i = 0;
    while i < nv.len() {
        let prefix = layout.prefix_of(nv[i]);
        let start = layout.part_starts[prefix as usize];
        let mut j = i;
        while j < nv.len() && layout.prefix_of(nv[j]) == prefix {
            j += 1;
        }
        varint_encode((j - i) as u64, out);
        varint_encode(prefix, out);
        let mut w = BitWriter::new();
        for &u in &nv[i..j] {
            w.push(u as u64 - start, layout.suffix_width);
        }
        let bytes = w.bit_len().div_ceil(8) as usize;
        out.extend_from_slice(&w.finish().as_bytes()[..bytes]);
        i = j;
    }
}

/// Encodes `N_v` under any scheme; fixed schemes carry their weights if the layout stores them.
pub fn encode(v: u32, nv: &[u32], weights: Option<&[u64]>, scheme: &TransformScheme) -> Result<Encoded> {
    match scheme {
        TransformScheme::Fixed(layout) => {
            let enc = layout.encode(v, nv, weights)?;
            let mut w = BitWriter::new();
            layout.write(&enc, &mut w);
            Ok(Encoded {
                header: layout.scheme.has_header().then(|| layout.header_value(&enc)),
                payload: w.finish(),
            })
        }
        _ => {
            let mut bytes = Vec::new();
            encode_bytes(v, nv, scheme, &mut bytes)?;
            let bits = bytes.len() as u64 * 8;
            Ok(Encoded {
                header: None,
                payload: BitBuf::from_bytes(bytes, bits)?,
            })
        }
    }
}

/// Inverse of [`encode`]; the degree of fixed payloads follows from the payload length.
pub fn decode(enc: &Encoded, v: u32, scheme: &TransformScheme) -> Result<Vec<u32>> {
    match scheme {
        TransformScheme::Fixed(layout) => {
            let widths = layout.widths_from_header(enc.header.unwrap_or(0));
            let entry = (widths.0 + widths.1) as u64;
            if !enc.payload.bit_len().is_multiple_of(entry) {
                return Err(Error::Decode("fixed payload is not a whole number of entries".into()));
            }
            let degree = (enc.payload.bit_len() / entry) as usize;
            Ok(layout.decode(&enc.payload, 0, degree, widths, v).0)
        }
        _ => {
            let bytes = &enc.payload.as_bytes()[..(enc.payload.bit_len() / 8) as usize];
            decode_bytes(bytes, v, scheme)
        }
    }
}

/// Decodes a byte-oriented neighborhood, checking it is well formed.
pub fn decode_bytes(bytes: &[u8], v: u32, scheme: &TransformScheme) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    match scheme {
        TransformScheme::VarintGap | TransformScheme::VarintFull => {
            let gap = matches!(scheme, TransformScheme::VarintGap);
            let mut pos = 0;
            let mut prev: Option<i64> = None;
            while pos < bytes.len() {
                if gap && bytes[pos] == 0 {
                    if bytes[pos..].iter().any(|&b| b != 0) {
                        return Err(Error::Decode("data after neighborhood padding".into()));
                    }
                    break;
                }
                let (value, next) = varint_decode(bytes, pos)?;
                pos = next;
                let u = match (gap, prev) {
                    (false, _) => value as i64,
                    (true, None) => v as i64 + unzigzag(value),
                    (true, Some(p)) => p + value as i64,
                };
                if !(0..=u32::MAX as i64).contains(&u) {
                    return Err(Error::Decode(format!("decoded label {u} out of range")));
                }
                out.push(u as u32);
                prev = Some(u);
            }
        }
        TransformScheme::Brb(layout) => {
            let mut pos = 0;
            while pos < bytes.len() {
                if bytes[pos] == 0 {
                    if bytes[pos..].iter().any(|&b| b != 0) {
                        return Err(Error::Decode("data after neighborhood padding".into()));
                    }
                    break;
                }
                let (count, p1) = varint_decode(bytes, pos)?;
                let (prefix, p2) = varint_decode(bytes, p1)?;
                let start = *layout
                    .part_starts
                    .get(prefix as usize)
                    .ok_or_else(|| Error::Decode(format!("BRB prefix {prefix} out of range")))?;
                let suffix_bytes = (count * layout.suffix_width as u64).div_ceil(8) as usize;
                if p2 + suffix_bytes > bytes.len() {
                    return Err(Error::Decode("truncated BRB group".into()));
                }
                for k in 0..count {
                    let s = read_bits(&bytes[p2..p2 + suffix_bytes], k * layout.suffix_width as u64, layout.suffix_width);
                    out.push((start + s) as u32);
                }
                pos = p2 + suffix_bytes;
            }
        }
        TransformScheme::Fixed(_) => {
            return Err(Error::Decode("fixed-width schemes are bit oriented".into()));
        }
    }
    Ok(out)
}

/// Number of neighbors in a varint neighborhood: terminating bytes that are not padding.
#[inline]
pub fn varint_degree(bytes: &[u8], zero_is_padding: bool) -> usize {
    if zero_is_padding {
        bytes.iter().filter(|&&b| b & 0x80 == 0 && b != 0).count()
    } else {
        bytes.iter().filter(|&&b| b & 0x80 == 0).count()
    }
}

/// Number of neighbors in a BRB neighborhood: the sum of its group counts.
pub fn brb_degree(bytes: &[u8], layout: &BrbLayout) -> usize {
    let mut pos = 0;
    let mut total = 0;
    while pos < bytes.len() && bytes[pos] != 0 {
        let (count, p1) = match varint_decode(bytes, pos) {
            Ok(x) => x,
            Err(_) => break,
        };
        let p2 = match varint_decode(bytes, p1) {
            Ok((_, p)) => p,
            Err(_) => break,
        };
        total += count as usize;
        pos = p2 + (count * layout.suffix_width as u64).div_ceil(8) as usize;
    }
    total
}

/// Streaming varint decoder over one neighborhood.
#[derive(Debug, Clone)]
pub struct VarintIter<'a> {
    bytes: &'a [u8],
    pos: usize,
    prev: i64,
    first: bool,
    gap: bool,
}

impl<'a> VarintIter<'a> {
    #[inline]
    pub fn new(bytes: &'a [u8], v: u32, gap: bool) -> Self {
        Self {
            bytes,
            pos: 0,
            prev: v as i64,
            first: true,
            gap,
        }
    }
}

impl Iterator for VarintIter<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        let b0 = *self.bytes.get(self.pos)?;
        if self.gap && b0 == 0 {
            return None;
        }
        let mut value = (b0 & 0x7f) as u64;
        self.pos += 1;
        if b0 & 0x80 != 0 {
            let mut shift = 7;
            loop {
                let b = self.bytes[self.pos];
                self.pos += 1;
                value |= ((b & 0x7f) as u64) << shift;
                if b & 0x80 == 0 {
                    break;
                }
                shift += 7;
            }
        }
        let u = if !self.gap {
            value as i64
        } else if self.first {
            self.first = false;
            self.prev + unzigzag(value)
        } else {
            self.prev + value as i64
        };
        self.prev = u;
        Some(u as u32)
    }
}

/// Streaming BRB decoder over one neighborhood.
#[derive(Debug, Clone)]
pub struct BrbIter<'a> {
    bytes: &'a [u8],
    layout: &'a BrbLayout,
    pos: usize,
    group_left: u64,
    group_start: u64,
    suffix_bit: u64,
    suffix_base: usize,
}

impl<'a> BrbIter<'a> {
    #[inline]
    pub fn new(bytes: &'a [u8], layout: &'a BrbLayout) -> Self {
        Self {
            bytes,
            layout,
            pos: 0,
            group_left: 0,
            group_start: 0,
            suffix_bit: 0,
            suffix_base: 0,
        }
    }
}

impl Iterator for BrbIter<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.group_left == 0 {
            if self.pos >= self.bytes.len() || self.bytes[self.pos] == 0 {
                return None;
            }
            let (count, p1) = varint_decode(self.bytes, self.pos).ok()?;
            let (prefix, p2) = varint_decode(self.bytes, p1).ok()?;
            self.group_left = count;
            self.group_start = self.layout.part_starts[prefix as usize];
            self.suffix_base = p2;
            self.suffix_bit = 0;
            self.pos = p2 + (count * self.layout.suffix_width as u64).div_ceil(8) as usize;
        }
        let w = self.layout.suffix_width;
        let s = read_bits(&self.bytes[self.suffix_base..], self.suffix_bit, w);
        self.suffix_bit += w as u64;
        self.group_left -= 1;
        Some((self.group_start + s) as u32)
    }
}

/// Measured payload size of a whole graph under one scheme.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransformMeasure {
    pub payload_bits: u64,
    pub header_bits: u64,
    /// BRB only: count/prefix varints and per-group byte padding, included in `payload_bits`.
    pub group_overhead_bits: u64,
    /// Neighborhood payload size in bytes (rounded up) → number of neighborhoods.
    pub histogram: BTreeMap<u64, u64>,
}

pub fn measure(g: &AdjacencyGraph, scheme: &TransformScheme) -> Result<TransformMeasure> {
    let mut m = TransformMeasure::default();
    let mut buf = Vec::new();
    for v in 0..g.num_vertices() as u32 {
        let nv = g.neighbors(v);
        let bits = match scheme {
            TransformScheme::Fixed(layout) => {
                let enc = layout.encode(v, nv, g.weights(v))?;
                enc.payload_bits()
            }
            _ => {
                buf.clear();
                encode_bytes(v, nv, scheme, &mut buf)?;
                if let TransformScheme::Brb(layout) = scheme {
                    let suffix_bits = nv.len() as u64 * layout.suffix_width as u64;
                    m.group_overhead_bits += buf.len() as u64 * 8 - suffix_bits;
                }
                buf.len() as u64 * 8
            }
        };
        m.payload_bits += bits;
        *m.histogram.entry(bits.div_ceil(8)).or_default() += 1;
    }
    if let TransformScheme::Fixed(layout) = scheme {
        m.header_bits = g.num_vertices() as u64 * layout.header_bits() as u64;
    }
    Ok(m)
}
