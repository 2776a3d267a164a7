use std::fmt;

use super::PIXELS;

const WORDS: usize = PIXELS.div_ceil(64);

/// Fixed-capacity bit vector of up to 784 pixel truth values.
///
/// Images smaller than 28x28 (the toy 5x5 examples, downscaled test
/// fixtures) use a shorter `len`; bits at and beyond `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PixelBits {
    len: u16,
    words: [u64; WORDS],
}

impl PixelBits {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= PIXELS, "at most {PIXELS} pixels");
        PixelBits {
            len: len as u16,
            words: [0; WORDS],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = PixelBits::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// `len` pixels with exactly the listed (0-based) indices set.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut out = PixelBits::zeros(len);
        for i in ones {
            out.set(i, true);
        }
        out
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "pixel {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len(), "pixel {i} out of range {}", self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Number of differing pixels.
    #[inline]
    pub fn hamming(&self, other: &PixelBits) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    /// Number of differing pixels among those set in `mask`.
    #[inline]
    pub fn masked_hamming(&self, other: &PixelBits, mask: &PixelBits) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&mask.words)
            .map(|((a, b), m)| ((a ^ b) & m).count_ones())
            .sum()
    }

    /// Indices of set pixels, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for PixelBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PixelBits[{}](", self.len)?;
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}
