//! Plain rank/select bit vector with a sampled select directory.

use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

/// Bits per rank block.
pub const BLOCK_BITS: u64 = 512;
const WORDS_PER_BLOCK: usize = (BLOCK_BITS / 64) as usize;
/// Every `SELECT_SAMPLE`-th one (or zero) records the block holding it.
pub const SELECT_SAMPLE: u64 = 512;

const fn build_select_in_byte() -> [[u8; 8]; 256] {
    let mut table = [[8u8; 8]; 256];
    let mut b = 0;
    while b < 256 {
        let mut seen = 0;
        let mut bit = 0;
        while bit < 8 {
            if (b >> bit) & 1 == 1 {
                table[b][seen] = bit as u8;
                seen += 1;
            }
            bit += 1;
        }
        b += 1;
    }
    table
}

/// `SELECT_IN_BYTE[b][r]` is the position of the `r`-th (0-based) set bit of `b`.
static SELECT_IN_BYTE: [[u8; 8]; 256] = build_select_in_byte();

/// Position of the `r`-th (0-based) set bit in `word`; `r < word.count_ones()`.
#[inline]
pub fn select_in_word(word: u64, r: u32) -> u32 {
    debug_assert!(r < word.count_ones());
    const ONES: u64 = 0x0101_0101_0101_0101;
    const HIGHS: u64 = 0x8080_8080_8080_8080;
    // per-byte popcounts, then inclusive prefix sums per byte
    let mut s = word - ((word >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    let prefix = s.wrapping_mul(ONES);
    // bytes whose prefix is <= r; all lanes stay below 128 so no borrow crosses lanes
    let le = ((r as u64 * ONES) | HIGHS).wrapping_sub(prefix) & HIGHS;
    let byte = le.count_ones();
    let before = if byte == 0 { 0 } else { (prefix >> (8 * (byte - 1))) & 0xff };
    let b = ((word >> (8 * byte)) & 0xff) as usize;
    8 * byte + SELECT_IN_BYTE[b][(r as u64 - before) as usize] as u32
}

/// Builds a word vector of `len` bits from set positions (ascending, < len).
pub fn words_from_positions(positions: &[u64], len: u64) -> Vec<u64> {
    let mut words = vec![0u64; len.div_ceil(64) as usize];
    for &p in positions {
        words[(p / 64) as usize] |= 1u64 << (p % 64);
    }
    words
}

/// Raw bits plus a cumulative popcount per 512-bit block and sampled select
/// positions; `select1` is O(1) expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSelect {
    words: Vec<u64>,
    len: u64,
    ones: u64,
    /// Ones strictly before each block, plus a trailing total.
    block_ranks: Vec<u64>,
    select1_samples: Vec<u64>,
    select0_samples: Option<Vec<u64>>,
}

impl RankSelect {
    /// Builds the directories over `words` (bits at or beyond `len` must be zero).
    pub fn new(words: Vec<u64>, len: u64, with_select0: bool) -> Self {
        assert_eq!(words.len() as u64, len.div_ceil(64));
        if !len.is_multiple_of(64) {
            debug_assert_eq!(words.last().unwrap() >> (len % 64), 0);
        }
        let blocks = words.len().div_ceil(WORDS_PER_BLOCK);
        let mut block_ranks = Vec::with_capacity(blocks + 1);
        let mut select1_samples = Vec::new();
        let mut select0_samples = Vec::new();
        let mut ones = 0u64;
        for b in 0..blocks {
            block_ranks.push(ones);
            let zeros_before = b as u64 * BLOCK_BITS - ones;
            let chunk = &words[b * WORDS_PER_BLOCK..((b + 1) * WORDS_PER_BLOCK).min(words.len())];
            let block_ones: u64 = chunk.iter().map(|w| w.count_ones() as u64).sum();
            let block_len = (len - b as u64 * BLOCK_BITS).min(BLOCK_BITS);
            // sample k covers the (k * SELECT_SAMPLE + 1)-th one
            while (select1_samples.len() as u64) * SELECT_SAMPLE < ones + block_ones {
                select1_samples.push(b as u64);
            }
            if with_select0 {
                let block_zeros = block_len - block_ones;
                while (select0_samples.len() as u64) * SELECT_SAMPLE < zeros_before + block_zeros {
                    select0_samples.push(b as u64);
                }
            }
            ones += block_ones;
        }
        block_ranks.push(ones);
        Self {
            words,
            len,
            ones,
            block_ranks,
            select1_samples,
            select0_samples: with_select0.then_some(select0_samples),
        }
    }

    pub fn from_positions(positions: &[u64], len: u64, with_select0: bool) -> Self {
        Self::new(words_from_positions(positions, len), len, with_select0)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::new(words, bits.len() as u64, false)
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    /// Number of ones in positions `0..=x`.
    #[inline]
    pub fn rank1(&self, x: u64) -> u64 {
        debug_assert!(x < self.len);
        let word = (x / 64) as usize;
        let block = word / WORDS_PER_BLOCK;
        let mut r = self.block_ranks[block];
        for w in &self.words[block * WORDS_PER_BLOCK..word] {
            r += w.count_ones() as u64;
        }
        let bit = x % 64;
        let m = if bit == 63 { u64::MAX } else { (1u64 << (bit + 1)) - 1 };
        r + (self.words[word] & m).count_ones() as u64
    }

    /// Number of ones in positions `0..x` (exclusive).
    #[inline]
    pub fn rank1_exclusive(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.rank1(x - 1)
        }
    }

    /// Position of the `j`-th one, 1-based; `1 <= j <= count_ones()`.
    #[inline]
    pub fn select1(&self, j: u64) -> u64 {
        debug_assert!(j >= 1 && j <= self.ones);
        let k = ((j - 1) / SELECT_SAMPLE) as usize;
        let lo = self.select1_samples[k] as usize;
        let hi = self
            .select1_samples
            .get(k + 1)
            .map_or(self.block_ranks.len() - 1, |&b| b as usize + 1);
        // last block in [lo, hi) with fewer than j ones before it
        let block = lo + self.block_ranks[lo..hi].partition_point(|&r| r < j) - 1;
        let mut remaining = j - self.block_ranks[block];
        let mut w = block * WORDS_PER_BLOCK;
        loop {
            let pc = self.words[w].count_ones() as u64;
            if remaining <= pc {
                return w as u64 * 64 + select_in_word(self.words[w], (remaining - 1) as u32) as u64;
            }
            remaining -= pc;
            w += 1;
        }
    }

    /// First set position after `pos`; the caller guarantees one exists.
    #[inline]
    pub fn next_one(&self, pos: u64) -> u64 {
        let mut w = (pos / 64) as usize;
        let shift = pos % 64 + 1;
        let mut word = if shift == 64 { 0 } else { self.words[w] >> shift << shift };
        while word == 0 {
            w += 1;
            word = self.words[w];
        }
        w as u64 * 64 + word.trailing_zeros() as u64
    }

    /// Position of the `j`-th zero, 1-based. Requires the select0 directory.
    pub fn select0(&self, j: u64) -> u64 {
        let samples = self
            .select0_samples
            .as_ref()
            .expect("select0 directory not built");
        debug_assert!(j >= 1 && j <= self.len - self.ones);
        let zeros_before = |b: usize| b as u64 * BLOCK_BITS - self.block_ranks[b];
        let k = ((j - 1) / SELECT_SAMPLE) as usize;
        let lo = samples[k] as usize;
        let hi = samples
            .get(k + 1)
            .map_or(self.block_ranks.len() - 1, |&b| b as usize + 1);
        let mut a = lo;
        let mut b = hi;
        while b - a > 1 {
            let mid = (a + b) / 2;
            if zeros_before(mid) < j {
                a = mid;
            } else {
                b = mid;
            }
        }
        let block = a;
        let mut remaining = j - zeros_before(block);
        let mut w = block * WORDS_PER_BLOCK;
        loop {
            let inv = !self.words[w];
            let pc = inv.count_ones() as u64;
            if remaining <= pc {
                return w as u64 * 64 + select_in_word(inv, (remaining - 1) as u32) as u64;
            }
            remaining -= pc;
            w += 1;
        }
    }

    /// Exact raw payload: `len` bits.
    pub fn raw_bits(&self) -> u64 {
        self.len
    }

    /// Directory bits: block counts and select samples, 64 bits each.
    pub fn aux_bits(&self) -> u64 {
        64 * (self.block_ranks.len() + self.select1_samples.len()
            + self.select0_samples.as_ref().map_or(0, |s| s.len())) as u64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len);
        w.u64(self.ones);
        w.bit_words(&self.words, self.len);
        w.u64_slice(&self.block_ranks);
        w.u64_slice(&self.select1_samples);
        match &self.select0_samples {
            Some(s) => {
                w.u8(1);
                w.u64_slice(s);
            }
            None => w.u8(0),
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let len = r.u64()?;
        let ones = r.u64()?;
        let words = r.bit_words(len)?;
        let block_ranks = r.u64_vec()?;
        let select1_samples = r.u64_vec()?;
        let select0_samples = match r.u8()? {
            0 => None,
            1 => Some(r.u64_vec()?),
            t => return Err(Error::Decode(format!("bad select0 flag {t}"))),
        };
        let rebuilt = Self::new(words, len, select0_samples.is_some());
        if rebuilt.ones != ones
            || rebuilt.block_ranks != block_ranks
            || rebuilt.select1_samples != select1_samples
            || rebuilt.select0_samples != select0_samples
        {
            return Err(Error::Decode("rank/select directory does not match its bits".into()));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_select(bits: &[bool], j: u64, value: bool) -> u64 {
        let mut seen = 0;
        for (i, &b) in bits.iter().enumerate() {
            if b == value {
                seen += 1;
                if seen == j {
                    return i as u64;
                }
            }
        }
        panic!("select out of range")
    }

    #[test]
    fn select_in_word_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let w: u64 = rng.gen();
            let mut r = 0;
            for bit in 0..64 {
                if (w >> bit) & 1 == 1 {
                    assert_eq!(select_in_word(w, r), bit);
                    r += 1;
                }
            }
        }
    }

    #[test]
    fn small_definitions() {
        // bits 01101000, position 0 first
        let bits = [false, true, true, false, true, false, false, false];
        let rs = RankSelect::from_bools(&bits);
        assert_eq!(rs.select1(1), 1);
        assert_eq!(rs.select1(2), 2);
        assert_eq!(rs.select1(3), 4);
        assert_eq!(rs.rank1(4), 3);
        assert_eq!(rs.rank1(0), 0);
    }

    #[test]
    fn random_vectors_match_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &density in &[0.001, 0.05, 0.5, 0.97] {
            let len = 20_000 + rng.gen_range(0..64);
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
            let positions: Vec<u64> = (0..len as u64).filter(|&i| bits[i as usize]).collect();
            let rs = RankSelect::from_positions(&positions, len as u64, true);
            assert_eq!(rs.count_ones(), positions.len() as u64);
            for (j, &p) in positions.iter().enumerate() {
                assert_eq!(rs.select1(j as u64 + 1), p);
                assert_eq!(rs.rank1(p), j as u64 + 1);
            }
            let zeros = len as u64 - positions.len() as u64;
            for j in (1..=zeros).step_by(7) {
                assert_eq!(rs.select0(j), naive_select(&bits, j, false));
            }
            let mut acc = 0;
            for (x, &b) in bits.iter().enumerate() {
                acc += b as u64;
                assert_eq!(rs.rank1(x as u64), acc);
            }
        }
    }
}
