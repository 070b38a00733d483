//! The offset structure: where each neighborhood starts in the adjacency payload.
//!
//! Two families answer `offset_of(v)`:
//!
//! * pointer arrays of `n + 1` absolute offsets at 32, 64 or `ceil(log2(total + 1))` bits;
//! * bit vectors over the payload divided into blocks of `B` bits, where bit `i` is set
//!   iff a nonempty neighborhood starts at block `i`. The offset of the `j`-th nonempty
//!   neighborhood is `select(j) * B`. A final set bit marks the payload end so that a
//!   neighborhood's end is the next `select`.
//!
//! Plain and interleaved bit vectors only mark nonempty neighborhoods. When a graph has
//! isolated vertices a side [`RankSelect`] over "has nonzero degree" maps a vertex to
//! its rank among the nonempty ones; isolated vertices resolve to the start of the next
//! nonempty neighborhood and report degree 0. The sparse flavor stores all `n + 1`
//! block offsets as an Elias-Fano multiset instead, so vertex `v` is `select(v + 1)`
//! and no side structure is needed.

mod interleaved;
pub mod rank_select;
mod sparse;

use std::fmt;
use std::str::FromStr;

pub use interleaved::{InterleavedBits, DEFAULT_PERIOD};
pub use rank_select::RankSelect;
pub use sparse::EliasFano;

use crate::bitio::{bits_for, PackedArray};
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

/// Offset structure kinds, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OffsetScheme {
    Ptr32,
    Ptr64,
    PtrLogn,
    Plain,
    Interleaved,
    Sparse,
}

impl OffsetScheme {
    pub const ALL: [OffsetScheme; 6] = [
        OffsetScheme::Ptr32,
        OffsetScheme::Ptr64,
        OffsetScheme::PtrLogn,
        OffsetScheme::Plain,
        OffsetScheme::Interleaved,
        OffsetScheme::Sparse,
    ];

    pub fn is_bit_vector(self) -> bool {
        matches!(self, Self::Plain | Self::Interleaved | Self::Sparse)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ptr32 => "ptr32",
            Self::Ptr64 => "ptr64",
            Self::PtrLogn => "ptrlogn",
            Self::Plain => "bvpl",
            Self::Interleaved => "bvil",
            Self::Sparse => "bvsd",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        Self::ALL.iter().position(|&s| s == self).unwrap() as u8
    }

    pub(crate) fn from_tag(t: u8) -> Result<Self> {
        Self::ALL
            .get(t as usize)
            .copied()
            .ok_or_else(|| Error::Decode(format!("unknown offset scheme tag {t}")))
    }
}

impl fmt::Display for OffsetScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OffsetScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown offset scheme '{s}'")))
    }
}

/// Entry width of a pointer array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtrWidth {
    W32,
    W64,
    /// `bits_for(total)`: just enough for the largest offset.
    Logn,
}

/// Pointer array: `n + 1` nondecreasing offsets measured in units of `unit_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetArray {
    entries: PackedArray,
    unit_bits: u32,
}

impl OffsetArray {
    /// `offsets` holds `n + 1` nondecreasing offsets in units of `unit_bits`.
    pub fn build(offsets: &[u64], width: PtrWidth, unit_bits: u32) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Precondition("offset array needs n + 1 >= 1 entries".into()));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition("offsets must be nondecreasing".into()));
        }
        let total = *offsets.last().unwrap();
        let bits = match width {
            PtrWidth::W32 => 32,
            PtrWidth::W64 => 64,
            PtrWidth::Logn => bits_for(total),
        };
        if bits < 64 && total >> bits != 0 {
            return Err(Error::Capacity(format!(
                "offset {total} does not fit in a {bits}-bit pointer"
            )));
        }
        Ok(Self {
            entries: PackedArray::pack(offsets, bits)?,
            unit_bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.entries.width()
    }

    pub fn unit_bits(&self) -> u32 {
        self.unit_bits
    }

    pub fn num_vertices(&self) -> usize {
        self.entries.len() - 1
    }

    #[inline]
    pub fn entry(&self, i: usize) -> u64 {
        self.entries.get(i)
    }

    /// `W * (n + 1)`.
    pub fn size_bits(&self) -> u64 {
        self.entries.bit_len()
    }
}

/// Bit vector flavor for [`OffsetScheme`]'s bit-vector variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Plain,
    Interleaved { period: u32 },
    Sparse,
}

/// A select-capable bit vector in one of three encodings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetBitVector {
    Plain(RankSelect),
    Interleaved(InterleavedBits),
    Sparse(EliasFano),
}

impl OffsetBitVector {
    /// Builds a length-`len` vector with ones exactly at `positions` (ascending).
    pub fn build(positions: &[u64], len: u64, flavor: Flavor) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("set positions must be strictly ascending".into()));
        }
        if positions.last().is_some_and(|&p| p >= len) {
            return Err(Error::Precondition("set position beyond the vector length".into()));
        }
        Ok(match flavor {
            Flavor::Plain => Self::Plain(RankSelect::from_positions(positions, len, false)),
            Flavor::Interleaved { period } => Self::Interleaved(InterleavedBits::new(
                &rank_select::words_from_positions(positions, len),
                len,
                period,
            )?),
            Flavor::Sparse => Self::Sparse(EliasFano::new(positions, len)?),
        })
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            Self::Plain(_) => Flavor::Plain,
            Self::Interleaved(il) => Flavor::Interleaved { period: il.period() },
            Self::Sparse(_) => Flavor::Sparse,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Self::Plain(b) => b.len(),
            Self::Interleaved(b) => b.len(),
            Self::Sparse(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count_ones(&self) -> u64 {
        match self {
            Self::Plain(b) => b.count_ones(),
            Self::Interleaved(b) => b.count_ones(),
            Self::Sparse(b) => b.count_ones(),
        }
    }

    pub fn get(&self, i: u64) -> bool {
        match self {
            Self::Plain(b) => b.get(i),
            Self::Interleaved(b) => b.get(i),
            Self::Sparse(b) => b.get(i),
        }
    }

    /// Unchecked select: position of the `j`-th one, `1 <= j <= count_ones()`.
    #[inline]
    pub fn select_unchecked(&self, j: u64) -> u64 {
        match self {
            Self::Plain(b) => b.select1(j),
            Self::Interleaved(b) => b.select1(j),
            Self::Sparse(b) => b.select1(j),
        }
    }

    /// Position (0-based) of the `j`-th one (1-based).
    pub fn select(&self, j: u64) -> Result<u64> {
        if j == 0 || j > self.count_ones() {
            return Err(Error::Domain(format!(
                "select({j}) outside 1..={}",
                self.count_ones()
            )));
        }
        Ok(self.select_unchecked(j))
    }

    /// Number of ones in positions `0..=x`.
    pub fn rank(&self, x: u64) -> Result<u64> {
        if x >= self.len() {
            return Err(Error::Domain(format!("rank({x}) outside 0..{}", self.len())));
        }
        Ok(match self {
            Self::Plain(b) => b.rank1(x),
            Self::Interleaved(b) => b.rank1(x),
            Self::Sparse(b) => b.rank1(x),
        })
    }

    pub fn raw_bits(&self) -> u64 {
        match self {
            Self::Plain(b) => b.raw_bits(),
            Self::Interleaved(b) => b.raw_bits(),
            Self::Sparse(b) => b.raw_bits(),
        }
    }

    pub fn aux_bits(&self) -> u64 {
        match self {
            Self::Plain(b) => b.aux_bits(),
            Self::Interleaved(b) => b.aux_bits(),
            Self::Sparse(b) => b.aux_bits(),
        }
    }

    fn write(&self, w: &mut Writer) {
        match self {
            Self::Plain(b) => {
                w.u8(0);
                b.write(w);
            }
            Self::Interleaved(b) => {
                w.u8(1);
                b.write(w);
            }
            Self::Sparse(b) => {
                w.u8(2);
                b.write(w);
            }
        }
    }

    fn read(r: &mut Reader) -> Result<Self> {
        Ok(match r.u8()? {
            0 => Self::Plain(RankSelect::read(r)?),
            1 => Self::Interleaved(InterleavedBits::read(r)?),
            2 => Self::Sparse(EliasFano::read(r)?),
            t => return Err(Error::Decode(format!("unknown bit vector flavor {t}"))),
        })
    }
}

/// Bit-vector offsets over a block-aligned payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVectorOffsets {
    bits: OffsetBitVector,
    /// Present iff some vertex has degree 0 and the flavor is not sparse.
    nonempty: Option<RankSelect>,
    block_bits: u32,
    n: usize,
}

impl BitVectorOffsets {
    /// `bit_offsets` holds the `n + 1` payload bit offsets of the neighborhoods (last =
    /// payload end). Every nonempty neighborhood and the payload end must lie on a block
    /// boundary.
    pub fn build(bit_offsets: &[u64], block_bits: u32, flavor: Flavor) -> Result<Self> {
        if block_bits == 0 {
            return Err(Error::Config("block size must be positive".into()));
        }
        let n = bit_offsets.len().saturating_sub(1);
        let b = block_bits as u64;
        let total = *bit_offsets
            .last()
            .ok_or_else(|| Error::Precondition("need n + 1 offsets".into()))?;
        if total % b != 0 {
            return Err(Error::Precondition(format!(
                "payload length {total} is not a multiple of the {b}-bit block"
            )));
        }
        if flavor == Flavor::Sparse {
            // Elias-Fano stores repeated offsets directly, so isolated vertices need no
            // side structure
            if let Some(v) = bit_offsets.iter().position(|&s| s % b != 0) {
                return Err(Error::Precondition(format!(
                    "offset {v} at bit {} is not on a {b}-bit block boundary",
                    bit_offsets[v]
                )));
            }
            let blocks: Vec<u64> = bit_offsets.iter().map(|&s| s / b).collect();
            let ef = EliasFano::from_nondecreasing(&blocks, total / b + 1).map_err(|_| {
                Error::Precondition("offsets must be nondecreasing".into())
            })?;
            return Ok(Self {
                bits: OffsetBitVector::Sparse(ef),
                nonempty: None,
                block_bits,
                n,
            });
        }
        let mut starts = Vec::with_capacity(n + 1);
        let mut nonempty = vec![false; n];
        for v in 0..n {
            let (s, e) = (bit_offsets[v], bit_offsets[v + 1]);
            if e < s {
                return Err(Error::Precondition("offsets must be nondecreasing".into()));
            }
            if e > s {
                if s % b != 0 {
                    return Err(Error::Precondition(format!(
                        "neighborhood of vertex {v} starts at bit {s}, not on a {b}-bit block boundary"
                    )));
                }
                starts.push(s / b);
                nonempty[v] = true;
            }
        }
        starts.push(total / b);
        let bits = OffsetBitVector::build(&starts, total / b + 1, flavor)?;
        let nonempty = (!nonempty.iter().all(|&x| x)).then(|| RankSelect::from_bools(&nonempty));
        Ok(Self {
            bits,
            nonempty,
            block_bits,
            n,
        })
    }

    pub fn bits(&self) -> &OffsetBitVector {
        &self.bits
    }

    pub fn block_bits(&self) -> u32 {
        self.block_bits
    }

    pub fn has_side_structure(&self) -> bool {
        self.nonempty.is_some()
    }

    /// Payload bit range of `v`'s neighborhood; empty for isolated vertices.
    #[inline]
    pub fn span(&self, v: usize) -> (u64, u64) {
        let b = self.block_bits as u64;
        match &self.nonempty {
            None => {
                let j = v as u64 + 1;
                if let OffsetBitVector::Sparse(ef) = &self.bits {
                    let (s, e) = ef.select1_pair(j);
                    return (s * b, e * b);
                }
                (self.bits.select_unchecked(j) * b, self.bits.select_unchecked(j + 1) * b)
            }
            Some(ne) => {
                let r = ne.rank1(v as u64);
                if ne.get(v as u64) {
                    (self.bits.select_unchecked(r) * b, self.bits.select_unchecked(r + 1) * b)
                } else {
                    let s = self.bits.select_unchecked(r + 1) * b;
                    (s, s)
                }
            }
        }
    }
}

/// Any offset structure; answers spans in payload bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetStructure {
    Array(OffsetArray),
    Bits(BitVectorOffsets),
}

/// Measured and modeled size of an offset structure, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetSizeReport {
    /// The offsets or bit vector proper.
    pub raw_bits: u64,
    /// Rank/select directories of the bit vector (interleaved counts for bvIL).
    pub aux_bits: u64,
    /// The nonempty-vertex rank structure, when present.
    pub side_bits: u64,
    /// Exact-size expression for this structure type.
    pub formula_bits: f64,
}

impl OffsetSizeReport {
    pub fn total_bits(&self) -> u64 {
        self.raw_bits + self.aux_bits + self.side_bits
    }
}

/// Closed-form size of an offset structure over `n` vertices whose payload spans
/// `blocks` blocks (`2Wm/B` for a word-per-entry payload).
pub fn formula_bits(scheme: OffsetScheme, n: u64, blocks: u64, ptr_width: u32, period: u32) -> f64 {
    let blocks = blocks as f64;
    let n_f = n as f64;
    match scheme {
        OffsetScheme::Ptr32 | OffsetScheme::Ptr64 | OffsetScheme::PtrLogn => ptr_width as f64 * (n_f + 1.0),
        OffsetScheme::Plain => blocks,
        OffsetScheme::Interleaved => blocks * (1.0 + 64.0 / period as f64),
        OffsetScheme::Sparse => {
            if n == 0 || blocks == 0.0 {
                0.0
            } else {
                n_f * (2.0 + (blocks / n_f).log2())
            }
        }
    }
}

impl OffsetStructure {
    pub fn num_vertices(&self) -> usize {
        match self {
            Self::Array(a) => a.num_vertices(),
            Self::Bits(b) => b.n,
        }
    }

    /// Size of the offset unit in bits (pointer unit or block size `B`).
    pub fn unit_bits(&self) -> u32 {
        match self {
            Self::Array(a) => a.unit_bits,
            Self::Bits(b) => b.block_bits,
        }
    }

    /// Payload bit range `[start, end)` of vertex `v`'s neighborhood.
    #[inline]
    pub fn span(&self, v: usize) -> (u64, u64) {
        match self {
            Self::Array(a) => {
                let u = a.unit_bits as u64;
                (a.entry(v) * u, a.entry(v + 1) * u)
            }
            Self::Bits(b) => b.span(v),
        }
    }

    /// Offset of `v` in units (entries for pointer arrays, blocks for bit vectors).
    pub fn offset_of(&self, v: usize) -> Result<u64> {
        if v >= self.num_vertices() {
            return Err(Error::Domain(format!(
                "vertex {v} not in 0..{}",
                self.num_vertices()
            )));
        }
        Ok(self.span(v).0 / self.unit_bits() as u64)
    }

    pub fn size_report(&self) -> OffsetSizeReport {
        match self {
            Self::Array(a) => {
                let scheme = match a.width() {
                    32 => OffsetScheme::Ptr32,
                    64 => OffsetScheme::Ptr64,
                    _ => OffsetScheme::PtrLogn,
                };
                OffsetSizeReport {
                    raw_bits: a.size_bits(),
                    aux_bits: 0,
                    side_bits: 0,
                    formula_bits: formula_bits(scheme, a.num_vertices() as u64, 0, a.width(), 0),
                }
            }
            Self::Bits(b) => {
                let (scheme, period) = match b.bits.flavor() {
                    Flavor::Plain => (OffsetScheme::Plain, 0),
                    Flavor::Interleaved { period } => (OffsetScheme::Interleaved, period),
                    Flavor::Sparse => (OffsetScheme::Sparse, 0),
                };
                let blocks = b.bits.len() - 1;
                OffsetSizeReport {
                    raw_bits: b.bits.raw_bits(),
                    aux_bits: b.bits.aux_bits(),
                    side_bits: b.nonempty.as_ref().map_or(0, |s| s.raw_bits() + s.aux_bits()),
                    formula_bits: formula_bits(scheme, b.n as u64, blocks, 0, period),
                }
            }
        }
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        match self {
            Self::Array(a) => {
                w.u8(0);
                w.u32(a.unit_bits);
                w.packed(&a.entries);
            }
            Self::Bits(b) => {
                w.u8(1);
                w.u32(b.block_bits);
                w.u64(b.n as u64);
                b.bits.write(w);
                match &b.nonempty {
                    Some(ne) => {
                        w.u8(1);
                        ne.write(w);
                    }
                    None => w.u8(0),
                }
            }
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        match r.u8()? {
            0 => {
                let unit_bits = r.u32()?;
                let entries = r.packed()?;
                if entries.is_empty() {
                    return Err(Error::Decode("empty offset array".into()));
                }
                if (1..entries.len()).any(|i| entries.get(i - 1) > entries.get(i)) {
                    return Err(Error::Decode("offset array decreases".into()));
                }
                Ok(Self::Array(OffsetArray { entries, unit_bits }))
            }
            1 => {
                let block_bits = r.u32()?;
                let n = r.u64()? as usize;
                let bits = OffsetBitVector::read(r)?;
                let nonempty = match r.u8()? {
                    0 => None,
                    1 => Some(RankSelect::read(r)?),
                    t => return Err(Error::Decode(format!("bad side-structure flag {t}"))),
                };
                let nonempty_count = nonempty.as_ref().map_or(n as u64, |s| s.count_ones());
                if block_bits == 0
                    || nonempty.as_ref().is_some_and(|s| s.len() != n as u64)
                    || bits.count_ones() != nonempty_count + 1
                    || bits.is_empty()
                    || !bits.get(bits.len() - 1)
                {
                    return Err(Error::Decode("bit-vector offsets are inconsistent".into()));
                }
                Ok(Self::Bits(BitVectorOffsets {
                    bits,
                    nonempty,
                    block_bits,
                    n,
                }))
            }
            t => Err(Error::Decode(format!("unknown offset structure tag {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FLAVORS: [Flavor; 3] = [Flavor::Plain, Flavor::Interleaved { period: 512 }, Flavor::Sparse];

    #[test]
    fn path_offsets() {
        // degrees 1, 2, 1
        let a = OffsetArray::build(&[0, 1, 3, 4], PtrWidth::W64, 1).unwrap();
        assert_eq!((0..4).map(|i| a.entry(i)).collect::<Vec<_>>(), vec![0, 1, 3, 4]);
        assert_eq!(a.size_bits(), 64 * 4);
    }

    #[test]
    fn ptr_logn_width() {
        // m = 3: 2m = 6 entries, offsets up to 6 need 3 bits
        let a = OffsetArray::build(&[0, 2, 4, 6], PtrWidth::Logn, 1).unwrap();
        assert_eq!(a.width(), 3);
    }

    #[test]
    fn empty_graph_offsets() {
        let a = OffsetArray::build(&[0, 0, 0], PtrWidth::W32, 1).unwrap();
        assert_eq!((0..3).map(|i| a.entry(i)).collect::<Vec<_>>(), vec![0, 0, 0]);
        let o = OffsetStructure::Bits(BitVectorOffsets::build(&[0, 0, 0], 8, Flavor::Sparse).unwrap());
        assert_eq!(o.span(0), (0, 0));
        assert_eq!(o.span(1), (0, 0));
    }

    #[test]
    fn ptr_capacity_error() {
        assert!(matches!(
            OffsetArray::build(&[0, 1u64 << 33], PtrWidth::W32, 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn bitvector_from_block_starts() {
        let bv = OffsetBitVector::build(&[0, 2, 3], 5, Flavor::Plain).unwrap();
        let bits: String = (0..5).map(|i| if bv.get(i) { '1' } else { '0' }).collect();
        assert_eq!(bits, "10110");
        let sd = OffsetBitVector::build(&[0, 2, 3], 5, Flavor::Sparse).unwrap();
        let decoded: Vec<u64> = (1..=3).map(|j| sd.select(j).unwrap()).collect();
        assert_eq!(decoded, vec![0, 2, 3]);
    }

    #[test]
    fn select_rank_domain_errors() {
        for flavor in FLAVORS {
            let bv = OffsetBitVector::build(&[1, 2, 4], 8, flavor).unwrap();
            assert_eq!(bv.select(1).unwrap(), 1);
            assert_eq!(bv.select(3).unwrap(), 4);
            assert_eq!(bv.rank(4).unwrap(), 3);
            assert!(matches!(bv.select(0), Err(Error::Domain(_))));
            assert!(matches!(bv.select(4), Err(Error::Domain(_))));
            assert!(matches!(bv.rank(8), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn unaligned_start_rejected() {
        assert!(matches!(
            BitVectorOffsets::build(&[0, 3, 8], 8, Flavor::Plain),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn path_with_bit_vector_offsets() {
        // block = one entry of 2 bits
        let o = OffsetStructure::Bits(BitVectorOffsets::build(&[0, 2, 6, 8], 2, Flavor::Plain).unwrap());
        let offs: Vec<u64> = (0..3).map(|v| o.offset_of(v).unwrap()).collect();
        assert_eq!(offs, vec![0, 1, 3]);
        assert!(o.offset_of(3).is_err());
    }

    #[test]
    fn isolated_vertex_between_nonempty() {
        for flavor in FLAVORS {
            let o = OffsetStructure::Bits(BitVectorOffsets::build(&[0, 8, 8, 16, 16], 8, flavor).unwrap());
            assert_eq!(o.span(0), (0, 8));
            assert_eq!(o.span(1), (8, 8));
            assert_eq!(o.span(2), (8, 16));
            assert_eq!(o.span(3), (16, 16));
        }
    }

    #[test]
    fn bit_vector_offsets_match_pointer_array() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..20 {
            let n = rng.gen_range(1..400);
            let unit = [1u32, 3, 8, 17][trial % 4];
            let mut offs = vec![0u64];
            for _ in 0..n {
                let d = if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..20) };
                offs.push(offs.last().unwrap() + d);
            }
            let ptr = OffsetStructure::Array(OffsetArray::build(&offs, PtrWidth::W64, unit).unwrap());
            let bit_offs: Vec<u64> = offs.iter().map(|o| o * unit as u64).collect();
            for flavor in FLAVORS {
                let bv = OffsetStructure::Bits(BitVectorOffsets::build(&bit_offs, unit, flavor).unwrap());
                let mut prev = 0;
                for v in 0..n {
                    assert_eq!(bv.span(v), ptr.span(v), "vertex {v} flavor {flavor:?}");
                    let o = bv.offset_of(v).unwrap();
                    assert!(o >= prev);
                    prev = o;
                }
            }
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(formula_bits(OffsetScheme::Ptr64, 1_000_000, 0, 64, 0), 64.0 * 1_000_001.0);
        // bvPL with B = W: 2Wm/B = 2m blocks
        assert_eq!(formula_bits(OffsetScheme::Plain, 10, 2 * 500, 0, 0), 1000.0);
        let sd = formula_bits(OffsetScheme::Sparse, 100_000, 1_000_000, 0, 0);
        assert!((sd - 100_000.0 * (2.0 + 10f64.log2())).abs() < 1e-6);
        assert!((sd - 5.32e5).abs() / 5.32e5 < 0.01);
    }

    #[test]
    fn sparse_measured_within_bound_of_formula() {
        // n = 1e5 neighborhoods over 1e6 one-entry blocks
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 100_000usize;
        let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(1..1_000_000)).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let mut offs = vec![0u64];
        offs.extend(cuts);
        offs.push(1_000_000);
        let o = OffsetStructure::Bits(BitVectorOffsets::build(&offs, 1, Flavor::Sparse).unwrap());
        let r = o.size_report();
        let measured = (r.raw_bits + r.aux_bits) as f64;
        assert!(measured <= 1.25 * r.formula_bits, "{measured} vs {}", r.formula_bits);
        assert!(measured >= r.formula_bits * 0.8);
    }

    #[test]
    fn serialization_round_trip() {
        let offs = [0u64, 8, 8, 24, 32];
        for flavor in FLAVORS {
            let o = OffsetStructure::Bits(BitVectorOffsets::build(&offs, 8, flavor).unwrap());
            let mut w = Writer::new();
            o.write(&mut w);
            let bytes = w.into_bytes();
            let back = OffsetStructure::read(&mut Reader::new(&bytes)).unwrap();
            assert_eq!(back, o);
        }
        let o = OffsetStructure::Array(OffsetArray::build(&offs, PtrWidth::Logn, 8).unwrap());
        let mut w = Writer::new();
        o.write(&mut w);
        let bytes = w.into_bytes();
        assert_eq!(OffsetStructure::read(&mut Reader::new(&bytes)).unwrap(), o);
    }
}
