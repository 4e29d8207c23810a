//! Fixed-length bit vectors over genes: the chromosome of the search.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Bit vector with one bit per gene; bit `i` set means gene `i` participates
/// in classification.
///
/// Serialized as `{ "len": N, "ones": [indices] }` to keep 2000-bit masks
/// readable in JSON artifacts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "MaskRepr", try_from = "MaskRepr")]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Mask of `len` zeros with the listed bits set.
    pub fn from_indices(len: usize, ones: &[usize]) -> Result<Self> {
        let mut bits = vec![false; len];
        for &i in ones {
            if i >= len {
                return Err(Error::Dimension {
                    what: "mask index",
                    expected: len,
                    found: i,
                });
            }
            bits[i] = true;
        }
        Ok(Self { bits })
    }

    pub fn all_ones(len: usize) -> Self {
        Self {
            bits: vec![true; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.bits
    }

    /// Stable 64-bit digest of the bit pattern, independent of process and
    /// platform. Used to derive per-mask RNG seeds.
    pub fn stable_hash(&self) -> u64 {
        let mut packed = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        let mut hasher = Sha256::new();
        hasher.update((self.bits.len() as u64).to_le_bytes());
        hasher.update(&packed);
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 8+ bytes"))
    }

    /// Short human-readable identification for error messages.
    pub fn summary(&self) -> String {
        format!(
            "len={} popcount={} hash={:016x}",
            self.len(),
            self.popcount(),
            self.stable_hash()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct MaskRepr {
    len: usize,
    ones: Vec<usize>,
}

impl From<FeatureMask> for MaskRepr {
    fn from(mask: FeatureMask) -> Self {
        MaskRepr {
            len: mask.len(),
            ones: mask.ones(),
        }
    }
}

impl TryFrom<MaskRepr> for FeatureMask {
    type Error = Error;

    fn try_from(repr: MaskRepr) -> Result<Self> {
        FeatureMask::from_indices(repr.len, &repr.ones)
    }
}
