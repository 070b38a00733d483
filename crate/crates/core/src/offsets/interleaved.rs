//! Bit vector with running popcounts interleaved into the data every `period` bits.

use super::rank_select::select_in_word;
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

pub const DEFAULT_PERIOD: u32 = 512;

/// Layout: for each chunk, one 64-bit count of ones before the chunk followed by
/// `period / 64` data words. `rank` is O(1); `select` binary-searches the counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedBits {
    data: Vec<u64>,
    len: u64,
    ones: u64,
    period: u32,
}

impl InterleavedBits {
    pub fn new(words: &[u64], len: u64, period: u32) -> Result<Self> {
        if period == 0 || !period.is_multiple_of(64) {
            return Err(Error::Config(format!(
                "interleaving period {period} must be a positive multiple of 64"
            )));
        }
        let wpc = (period / 64) as usize;
        let chunks = words.len().div_ceil(wpc);
        let mut data = Vec::with_capacity(chunks * (wpc + 1));
        let mut ones = 0u64;
        for c in 0..chunks {
            data.push(ones);
            for i in 0..wpc {
                let w = words.get(c * wpc + i).copied().unwrap_or(0);
                ones += w.count_ones() as u64;
                data.push(w);
            }
        }
        Ok(Self { data, len, ones, period })
    }

    #[inline]
    fn words_per_chunk(&self) -> usize {
        (self.period / 64) as usize
    }

    fn chunks(&self) -> usize {
        self.data.len() / (self.words_per_chunk() + 1)
    }

    #[inline]
    fn word(&self, w: usize) -> u64 {
        let wpc = self.words_per_chunk();
        self.data[(w / wpc) * (wpc + 1) + 1 + w % wpc]
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    pub fn get(&self, i: u64) -> bool {
        (self.word((i / 64) as usize) >> (i % 64)) & 1 == 1
    }

    /// Ones in `0..=x`.
    pub fn rank1(&self, x: u64) -> u64 {
        let wpc = self.words_per_chunk();
        let word = (x / 64) as usize;
        let chunk = word / wpc;
        let base = chunk * (wpc + 1);
        let mut r = self.data[base];
        for i in 0..word % wpc {
            r += self.data[base + 1 + i].count_ones() as u64;
        }
        let bit = x % 64;
        let m = if bit == 63 { u64::MAX } else { (1u64 << (bit + 1)) - 1 };
        r + (self.data[base + 1 + word % wpc] & m).count_ones() as u64
    }

    /// Position of the `j`-th one (1-based).
    pub fn select1(&self, j: u64) -> u64 {
        debug_assert!(j >= 1 && j <= self.ones);
        let wpc = self.words_per_chunk();
        let (mut lo, mut hi) = (0usize, self.chunks());
        // last chunk whose running count is below j
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.data[mid * (wpc + 1)] < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let base = lo * (wpc + 1);
        let mut remaining = j - self.data[base];
        for i in 0..wpc {
            let w = self.data[base + 1 + i];
            let pc = w.count_ones() as u64;
            if remaining <= pc {
                return (lo * wpc + i) as u64 * 64 + select_in_word(w, (remaining - 1) as u32) as u64;
            }
            remaining -= pc;
        }
        unreachable!("select past the last one")
    }

    pub fn raw_bits(&self) -> u64 {
        self.len
    }

    /// The interleaved 64-bit counts.
    pub fn aux_bits(&self) -> u64 {
        64 * self.chunks() as u64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u32(self.period);
        w.u64(self.len);
        w.u64(self.ones);
        w.u64_slice(&self.data);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let period = r.u32()?;
        let len = r.u64()?;
        let ones = r.u64()?;
        let data = r.u64_vec()?;
        if period == 0 || period % 64 != 0 {
            return Err(Error::Decode(format!("bad interleaving period {period}")));
        }
        let wpc = (period / 64) as usize;
        let words: Vec<u64> = data
            .chunks(wpc + 1)
            .flat_map(|c| c.iter().skip(1).copied())
            .collect();
        let rebuilt = Self::new(&words[..words.len().min(len.div_ceil(64) as usize)], len, period)?;
        if rebuilt.data != data || rebuilt.ones != ones {
            return Err(Error::Decode("interleaved counts do not match their bits".into()));
        }
        Ok(rebuilt)
    }
}
