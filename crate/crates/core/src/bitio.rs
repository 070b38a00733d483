//! Bit-granular packed arrays and byte-oriented integer codecs.
//!
//! Every bit stream in this crate is least-significant-bit first: bit `k` of
//! the stream lives in byte `k >> 3` at in-byte position `k & 7`. An `s`-bit
//! entry starting at bit `o` is therefore recovered with one unaligned 64-bit
//! little-endian load at byte `o >> 3`, a right shift by `o & 7` and a mask.

use crate::error::{Error, Result};

/// Zero bytes appended after every packed payload so the unconditional
/// 8-byte load used by [`read_bits`] never runs past the buffer.
pub const SLACK_BYTES: usize = 7;

/// Minimum number of bits able to represent every value in `0..=max_value`.
///
/// Floors at one bit: a zero-width entry cannot be located or decoded.
#[inline]
pub fn bits_for(max_value: u64) -> u32 {
    (64 - max_value.leading_zeros()).max(1)
}

/// `ceil(log2(count))` for a count of distinct values, 0 for `count <= 1`.
///
/// This is the unfloored width that the analytic size formulas use.
#[inline]
pub fn ceil_log2(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

#[inline]
fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[inline]
fn load_u64(bytes: &[u8], at: usize) -> u64 {
    let mut word = [0u8; 8];
    let end = (at + 8).min(bytes.len());
    if end > at {
        word[..end - at].copy_from_slice(&bytes[at..end]);
    }
    u64::from_le_bytes(word)
}

/// Reads `width` bits starting at absolute bit position `bit_pos`.
///
/// Single-load path: byte address `bit_pos >> 3`, in-byte distance
/// `bit_pos & 7`, one 64-bit load, shift and mask. Entries that do not fit
/// into that window (only possible for widths above 57) take a second load.
#[inline]
pub fn read_bits(bytes: &[u8], bit_pos: u64, width: u32) -> u64 {
    debug_assert!((1..=64).contains(&width));
    let address = (bit_pos >> 3) as usize;
    let distance = (bit_pos & 7) as u32;
    let value = if address + 8 <= bytes.len() {
        u64::from_le_bytes(bytes[address..address + 8].try_into().unwrap())
    } else {
        load_u64(bytes, address)
    };
    if distance + width <= 64 {
        (value >> distance) & mask(width)
    } else {
        let low = value >> distance;
        let high = load_u64(bytes, address + 8);
        (low | (high << (64 - distance))) & mask(width)
    }
}

/// Append-only LSB-first bit stream writer.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_bits(bits: u64) -> Self {
        Self {
            bytes: Vec::with_capacity((bits as usize).div_ceil(8) + SLACK_BYTES),
            bit_len: 0,
        }
    }

    #[inline]
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Appends the low `width` bits of `value`. `width` may be 0.
    #[inline]
    pub fn push(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value >> width == 0);
        let mut remaining = width;
        let mut value = value;
        while remaining > 0 {
            let in_byte = (self.bit_len & 7) as u32;
            if in_byte == 0 {
                self.bytes.push(0);
            }
            let take = remaining.min(8 - in_byte);
            let last = self.bytes.len() - 1;
            self.bytes[last] |= ((value & mask(take)) as u8) << in_byte;
            value = if take >= 64 { 0 } else { value >> take };
            remaining -= take;
            self.bit_len += take as u64;
        }
    }

    /// Appends whole bytes; the stream must currently be byte aligned.
    pub fn push_bytes(&mut self, data: &[u8]) {
        assert_eq!(self.bit_len & 7, 0, "byte append on unaligned stream");
        self.bytes.extend_from_slice(data);
        self.bit_len += 8 * data.len() as u64;
    }

    /// Pads with zero bits up to the next multiple of `block_bits`.
    pub fn align_to(&mut self, block_bits: u64) {
        let rem = self.bit_len % block_bits;
        if rem != 0 {
            let mut pad = block_bits - rem;
            while pad > 0 {
                let step = pad.min(64) as u32;
                self.push(0, step);
                pad -= step as u64;
            }
        }
    }

    /// Freezes the stream, appending the read slack.
    pub fn finish(mut self) -> BitBuf {
        self.bytes.truncate((self.bit_len as usize).div_ceil(8));
        self.bytes.extend_from_slice(&[0u8; SLACK_BYTES]);
        BitBuf {
            bytes: self.bytes,
            bit_len: self.bit_len,
        }
    }
}

/// An immutable bit stream plus its exact length in bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitBuf {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitBuf {
    pub fn empty() -> Self {
        BitWriter::new().finish()
    }

    /// Rebuilds a stream from its serialized form (`ceil(bit_len / 8)` bytes).
    pub fn from_bytes(mut bytes: Vec<u8>, bit_len: u64) -> Result<Self> {
        let need = (bit_len as usize).div_ceil(8);
        if bytes.len() != need {
            return Err(Error::Decode(format!(
                "bit stream of {bit_len} bits needs {need} bytes, got {}",
                bytes.len()
            )));
        }
        bytes.extend_from_slice(&[0u8; SLACK_BYTES]);
        Ok(Self { bytes, bit_len })
    }

    #[inline]
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Payload bytes including the trailing read slack.
    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Payload bytes without slack, i.e. the serialized form.
    pub fn payload_bytes(&self) -> &[u8] {
        &self.bytes[..(self.bit_len as usize).div_ceil(8)]
    }

    #[inline]
    pub fn read(&self, bit_pos: u64, width: u32) -> u64 {
        read_bits(&self.bytes, bit_pos, width)
    }
}

/// Fixed-width integer array: entry `i` occupies bits `[i*width, (i+1)*width)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedArray {
    buf: BitBuf,
    width: u32,
    len: usize,
}

impl PackedArray {
    /// Packs `values` at `width` bits each.
    pub fn pack(values: &[u64], width: u32) -> Result<Self> {
        if !(1..=64).contains(&width) {
            return Err(Error::Encode(format!("packed width {width} outside 1..=64")));
        }
        let mut w = BitWriter::with_capacity_bits(values.len() as u64 * width as u64);
        for (i, &v) in values.iter().enumerate() {
            if width < 64 && v >> width != 0 {
                return Err(Error::Encode(format!(
                    "value {v} at index {i} does not fit in {width} bits"
                )));
            }
            w.push(v, width);
        }
        Ok(Self {
            buf: w.finish(),
            width,
            len: values.len(),
        })
    }

    pub fn from_buf(buf: BitBuf, width: u32, len: usize) -> Result<Self> {
        if !(1..=64).contains(&width) || buf.bit_len() != len as u64 * width as u64 {
            return Err(Error::Decode(format!(
                "packed array of {len} x {width} bits does not match {} stored bits",
                buf.bit_len()
            )));
        }
        Ok(Self { buf, width, len })
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.buf.read(i as u64 * self.width as u64, self.width)
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Exact payload size, `len * width`.
    pub fn bit_len(&self) -> u64 {
        self.buf.bit_len()
    }

    pub fn buf(&self) -> &BitBuf {
        &self.buf
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Appends the canonical 7-bit little-endian group code of `value`.
#[inline]
pub fn varint_encode(mut value: u64, out: &mut Vec<u8>) {
    while value >= 0x80 {
        out.push((value as u8) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Decodes one varint at `pos`, returning the value and the position after it.
#[inline]
pub fn varint_decode(bytes: &[u8], pos: usize) -> Result<(u64, usize)> {
    let mut value = 0u64;
    let mut shift = 0u32;
    let mut at = pos;
    loop {
        let Some(&b) = bytes.get(at) else {
            return Err(Error::Decode(format!("truncated varint at byte {pos}")));
        };
        if shift >= 64 || (shift == 63 && b > 1) {
            return Err(Error::Decode(format!("varint overflow at byte {pos}")));
        }
        value |= ((b & 0x7f) as u64) << shift;
        at += 1;
        if b & 0x80 == 0 {
            return Ok((value, at));
        }
        shift += 7;
    }
}

/// Encoded length of `value` in bytes.
#[inline]
pub fn varint_len(value: u64) -> usize {
    (bits_for(value) as usize).div_ceil(7)
}

/// Maps signed to unsigned: `k >= 0 -> 2k`, `k < 0 -> -2k - 1`.
#[inline]
pub fn zigzag(k: i64) -> u64 {
    ((k << 1) ^ (k >> 63)) as u64
}

#[inline]
pub fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Test oracle: reads one bit at a time.
    fn naive_get(bytes: &[u8], i: usize, width: u32) -> u64 {
        let start = i as u64 * width as u64;
        let mut v = 0u64;
        for k in 0..width as u64 {
            let bit = start + k;
            let b = (bytes[(bit / 8) as usize] >> (bit % 8)) & 1;
            v |= (b as u64) << k;
        }
        v
    }

    #[test]
    fn bits_for_examples() {
        assert_eq!(bits_for(7), 3);
        assert_eq!(bits_for((1 << 22) - 1), 22);
        assert_eq!(bits_for(0), 1);
        assert_eq!(bits_for(8), 4);
        assert_eq!(bits_for(u64::MAX), 64);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn pack_layout_is_lsb_first() {
        let pa = PackedArray::pack(&[1, 2, 3], 2).unwrap();
        assert_eq!(pa.buf().payload_bytes(), &[0x39]);
        assert_eq!(pa.bit_len(), 6);
        assert!(pa.buf().as_bytes().len() > SLACK_BYTES);
    }

    #[test]
    fn pack_rejects_oversized_value() {
        assert!(matches!(PackedArray::pack(&[4], 2), Err(Error::Encode(_))));
        assert!(PackedArray::pack(&[1], 0).is_err());
    }

    #[test]
    fn get_matches_naive_reader_for_all_widths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for width in 1..=64u32 {
            let values: Vec<u64> = (0..10_000)
                .map(|_| rng.gen::<u64>() & mask(width))
                .collect();
            let pa = PackedArray::pack(&values, width).unwrap();
            for (i, &v) in values.iter().enumerate() {
                assert_eq!(naive_get(pa.buf().as_bytes(), i, width), v);
                assert_eq!(pa.get(i), v, "width {width} index {i}");
            }
        }
    }

    #[test]
    fn width_57_entries_spanning_eight_bytes() {
        let values: Vec<u64> = (0..64).map(|i| mask(57) - i).collect();
        let pa = PackedArray::pack(&values, 57).unwrap();
        for i in 0..values.len() {
            // entries with start distance 7 touch exactly eight bytes
            assert_eq!(pa.get(i), naive_get(pa.buf().as_bytes(), i, 57));
            assert_eq!(pa.get(i), values[i]);
        }
    }

    #[test]
    fn varint_examples() {
        let enc = |v| {
            let mut out = Vec::new();
            varint_encode(v, &mut out);
            out
        };
        assert_eq!(enc(127), vec![0x7f]);
        assert_eq!(enc(128), vec![0x80, 0x01]);
        assert_eq!(enc(300), vec![0xac, 0x02]);
        assert_eq!(enc(0), vec![0x00]);
        assert_eq!(varint_decode(&[0xac, 0x02], 0).unwrap(), (300, 2));
    }

    #[test]
    fn varint_truncated_is_error() {
        assert!(matches!(varint_decode(&[0x80], 0), Err(Error::Decode(_))));
        assert!(varint_decode(&[], 0).is_err());
    }

    #[test]
    fn zigzag_examples() {
        assert_eq!(zigzag(0), 0);
        assert_eq!(zigzag(-1), 1);
        assert_eq!(zigzag(5), 10);
        assert_eq!(zigzag(-7), 13);
        assert_eq!(unzigzag(13), -7);
    }

    #[test]
    fn writer_align_pads_with_zeros() {
        let mut w = BitWriter::new();
        w.push(0b101, 3);
        w.align_to(8);
        w.push(0xff, 8);
        w.align_to(64);
        let buf = w.finish();
        assert_eq!(buf.bit_len(), 64);
        assert_eq!(buf.read(0, 8), 0b101);
        assert_eq!(buf.read(8, 8), 0xff);
    }

    proptest! {
        #[test]
        fn pack_get_identity(width in 1u32..=64, raw in prop::collection::vec(any::<u64>(), 0..200)) {
            let values: Vec<u64> = raw.iter().map(|v| v & mask(width)).collect();
            let pa = PackedArray::pack(&values, width).unwrap();
            prop_assert_eq!(pa.bit_len(), values.len() as u64 * width as u64);
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(pa.get(i), naive_get(pa.buf().as_bytes(), i, width));
                prop_assert_eq!(pa.get(i), v);
            }
        }

        #[test]
        fn varint_round_trip_and_length(v in any::<u64>()) {
            let mut out = Vec::new();
            varint_encode(v, &mut out);
            prop_assert_eq!(out.len(), (bits_for(v) as usize).div_ceil(7));
            prop_assert_eq!(out.len(), varint_len(v));
            prop_assert_eq!(varint_decode(&out, 0).unwrap(), (v, out.len()));
        }

        #[test]
        fn zigzag_bijective(k in any::<i64>()) {
            prop_assert_eq!(unzigzag(zigzag(k)), k);
        }
    }
}
