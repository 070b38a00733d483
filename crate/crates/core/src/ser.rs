//! Little-endian byte writer/reader used by the binary container.

use crate::bitio::{BitBuf, PackedArray};
use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    /// Length-prefixed u64 array.
    pub fn u64_slice(&mut self, vs: &[u64]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.u64(v);
        }
    }

    pub fn u32_slice(&mut self, vs: &[u32]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.u32(v);
        }
    }

    /// The first `ceil(bit_len / 8)` bytes of a little-endian word vector.
    pub fn bit_words(&mut self, words: &[u64], bit_len: u64) {
        let nbytes = bit_len.div_ceil(8) as usize;
        let mut written = 0;
        for w in words {
            let b = w.to_le_bytes();
            let take = (nbytes - written).min(8);
            self.buf.extend_from_slice(&b[..take]);
            written += take;
            if written == nbytes {
                break;
            }
        }
    }

    /// Bit length followed by `ceil(bit_len / 8)` payload bytes.
    pub fn bitbuf(&mut self, b: &BitBuf) {
        self.u64(b.bit_len());
        self.bytes(b.payload_bytes());
    }

    pub fn packed(&mut self, p: &PackedArray) {
        self.u32(p.width());
        self.u64(p.len() as u64);
        self.bytes(p.buf().payload_bytes());
    }
}

#[derive(Debug)]
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Decode(format!(
                "unexpected end of data: wanted {n} bytes at offset {}",
                self.pos
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn count(&mut self, elem: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.checked_mul(elem).is_none_or(|b| b > self.remaining()) {
            return Err(Error::Decode(format!("array of {n} elements overruns the data")));
        }
        Ok(n)
    }

    pub fn u64_vec(&mut self) -> Result<Vec<u64>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.u64()).collect()
    }

    pub fn u32_vec(&mut self) -> Result<Vec<u32>> {
        let n = self.count(4)?;
        (0..n).map(|_| self.u32()).collect()
    }

    pub fn bit_words(&mut self, bit_len: u64) -> Result<Vec<u64>> {
        let nbytes = bit_len.div_ceil(8) as usize;
        let raw = self.take(nbytes)?;
        let mut words = vec![0u64; bit_len.div_ceil(64) as usize];
        for (i, chunk) in raw.chunks(8).enumerate() {
            let mut b = [0u8; 8];
            b[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(b);
        }
        if !bit_len.is_multiple_of(64) {
            if let Some(last) = words.last() {
                if last >> (bit_len % 64) != 0 {
                    return Err(Error::Decode("nonzero bits past the end of a bit vector".into()));
                }
            }
        }
        Ok(words)
    }

    pub fn bitbuf(&mut self) -> Result<BitBuf> {
        let bit_len = self.u64()?;
        let bytes = self.take(bit_len.div_ceil(8) as usize)?.to_vec();
        BitBuf::from_bytes(bytes, bit_len)
    }

    pub fn packed(&mut self) -> Result<PackedArray> {
        let width = self.u32()?;
        let len = self.u64()? as usize;
        if !(1..=64).contains(&width) {
            return Err(Error::Decode(format!("packed width {width} outside 1..=64")));
        }
        let bits = (len as u64)
            .checked_mul(width as u64)
            .ok_or_else(|| Error::Decode("packed array size overflow".into()))?;
        let bytes = self.take(bits.div_ceil(8) as usize)?.to_vec();
        PackedArray::from_buf(BitBuf::from_bytes(bytes, bits)?, width, len)
    }
}
