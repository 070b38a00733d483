//! Elias-Fano encoded sparse bit vector.

use super::rank_select::RankSelect;
use crate::bitio::PackedArray;
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

/// Ascending set-bit positions of a length-`len` bit vector, split into `low_width`
/// explicit low bits per position and a unary-coded high part.
///
/// The high part has a one at `(p >> low_width) + i` for the `i`-th position `p`, so
/// `select` is one `select1` on the high bits. `rank` binary-searches over `select`;
/// it is off the neighborhood access path, and skipping a select0 directory keeps the
/// structure close to its nominal size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliasFano {
    len: u64,
    count: u64,
    low_width: u32,
    low: Option<PackedArray>,
    high: RankSelect,
}

impl EliasFano {
    pub fn new(positions: &[u64], len: u64) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Encode("Elias-Fano positions must be strictly ascending".into()));
        }
        Self::from_nondecreasing(positions, len)
    }

    /// Encodes a nondecreasing sequence below `len`; repeated values are allowed, so
    /// this is a multiset rather than a bit vector. `select1(j)` is the `j`-th value
    /// and `rank1(x)` the number of values `<= x`.
    pub fn from_nondecreasing(positions: &[u64], len: u64) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Encode("Elias-Fano values must be nondecreasing".into()));
        }
        if let Some(&last) = positions.last() {
            if last >= len {
                return Err(Error::Encode(format!("position {last} outside bit vector of length {len}")));
            }
        }
        let count = positions.len() as u64;
        let low_width = if count > 0 && len > count {
            63 - (len / count).leading_zeros()
        } else {
            0
        };
        let low = if low_width > 0 {
            let m = (1u64 << low_width) - 1;
            let lows: Vec<u64> = positions.iter().map(|p| p & m).collect();
            Some(PackedArray::pack(&lows, low_width)?)
        } else {
            None
        };
        let high_len = count + (len >> low_width) + 1;
        let high_positions: Vec<u64> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (p >> low_width) + i as u64)
            .collect();
        let high = RankSelect::from_positions(&high_positions, high_len, false);
        Ok(Self {
            len,
            count,
            low_width,
            low,
            high,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.count
    }

    pub fn low_width(&self) -> u32 {
        self.low_width
    }

    #[inline]
    fn low(&self, i: u64) -> u64 {
        self.low.as_ref().map_or(0, |l| l.get(i as usize))
    }

    /// Position of the `j`-th one (1-based).
    #[inline]
    pub fn select1(&self, j: u64) -> u64 {
        debug_assert!(j >= 1 && j <= self.count);
        let high = self.high.select1(j) - (j - 1);
        (high << self.low_width) | self.low(j - 1)
    }

    /// Positions of the `j`-th and `(j+1)`-th ones; one select plus a short scan.
    #[inline]
    pub fn select1_pair(&self, j: u64) -> (u64, u64) {
        debug_assert!(j >= 1 && j < self.count);
        let h1 = self.high.select1(j);
        let h2 = self.high.next_one(h1);
        (
            ((h1 - (j - 1)) << self.low_width) | self.low(j - 1),
            ((h2 - j) << self.low_width) | self.low(j),
        )
    }

    /// Ones in `0..=x`.
    pub fn rank1(&self, x: u64) -> u64 {
        debug_assert!(x < self.len);
        // largest j with select1(j) <= x
        let (mut lo, mut hi) = (0, self.count);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.select1(mid) <= x {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    pub fn get(&self, x: u64) -> bool {
        let r = self.rank1(x);
        r > 0 && self.select1(r) == x
    }

    /// Decodes every position (test and debugging helper).
    pub fn positions(&self) -> Vec<u64> {
        (1..=self.count).map(|j| self.select1(j)).collect()
    }

    /// Low bits plus high bits.
    pub fn raw_bits(&self) -> u64 {
        self.low.as_ref().map_or(0, |l| l.bit_len()) + self.high.raw_bits()
    }

    /// Select directories over the high bits.
    pub fn aux_bits(&self) -> u64 {
        self.high.aux_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len);
        w.u64(self.count);
        w.u32(self.low_width);
        if let Some(l) = &self.low {
            w.packed(l);
        }
        self.high.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let len = r.u64()?;
        let count = r.u64()?;
        let low_width = r.u32()?;
        if low_width >= 64 {
            return Err(Error::Decode(format!("bad Elias-Fano low width {low_width}")));
        }
        let low = if low_width > 0 { Some(r.packed()?) } else { None };
        let high = RankSelect::read(r)?;
        if let Some(l) = &low {
            if l.width() != low_width || l.len() as u64 != count {
                return Err(Error::Decode("Elias-Fano low part has the wrong shape".into()));
            }
        }
        if high.count_ones() != count || high.len() != count + (len >> low_width) + 1 {
            return Err(Error::Decode("Elias-Fano high part has the wrong shape".into()));
        }
        Ok(Self {
            len,
            count,
            low_width,
            low,
            high,
        })
    }
}
