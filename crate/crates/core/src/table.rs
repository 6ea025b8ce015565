//! Classical data tables and their binary/hex encodings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("table must have at least one entry")]
    Empty,
    #[error("word width must be in 1..=64, got {0}")]
    WordWidth(usize),
    #[error("entry {index} = {value:#x} does not fit in {width} bits")]
    WordTooWide { index: usize, value: u64, width: usize },
    #[error("bad table file: {0}")]
    Format(String),
}

/// `N` words of `w` bits each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitTable {
    entries: Vec<u64>,
    word_width: usize,
}

pub const QTBL_MAGIC: &[u8; 4] = b"QTBL";

/// Number of address bits for `n` entries: ⌈lg n⌉, but at least one.
pub fn address_bits(n: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < n {
        bits += 1;
    }
    bits.max(1)
}

impl BitTable {
    pub fn new(entries: Vec<u64>, word_width: usize) -> Result<Self, TableError> {
        if entries.is_empty() {
            return Err(TableError::Empty);
        }
        if word_width == 0 || word_width > 64 {
            return Err(TableError::WordWidth(word_width));
        }
        if word_width < 64 {
            if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| **v >> word_width != 0) {
                return Err(TableError::WordTooWide { index, value, width: word_width });
            }
        }
        Ok(BitTable { entries, word_width })
    }

    /// One-bit table from a bit slice.
    pub fn from_bits(bits: &[bool]) -> Result<Self, TableError> {
        BitTable::new(bits.iter().map(|&b| b as u64).collect(), 1)
    }

    pub fn random(n: usize, word_width: usize, seed: u64) -> Result<Self, TableError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n, word_width, &mut rng)
    }

    pub fn random_with<R: Rng>(n: usize, word_width: usize, rng: &mut R) -> Result<Self, TableError> {
        if word_width == 0 || word_width > 64 {
            return Err(TableError::WordWidth(word_width));
        }
        let mask = word_mask(word_width);
        BitTable::new((0..n).map(|_| rng.random::<u64>() & mask).collect(), word_width)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn word_width(&self) -> usize {
        self.word_width
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn word(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn bit(&self, i: usize, b: usize) -> bool {
        (self.entries[i] >> b) & 1 == 1
    }

    pub fn address_bits(&self) -> usize {
        address_bits(self.len())
    }

    /// Zero-padded copy with `2^address_bits` entries.
    pub fn padded_pow2(&self) -> BitTable {
        let target = 1usize << self.address_bits();
        let mut entries = self.entries.clone();
        entries.resize(target, 0);
        BitTable { entries, word_width: self.word_width }
    }

    /// Packed payload: bit `b` of word `i` at bit index `i*w + b`, little-endian.
    pub fn packed_bits(&self) -> Vec<u8> {
        let total = self.len() * self.word_width;
        let mut out = vec![0u8; total.div_ceil(8)];
        for i in 0..self.len() {
            for b in 0..self.word_width {
                if self.bit(i, b) {
                    let k = i * self.word_width + b;
                    out[k / 8] |= 1 << (k % 8);
                }
            }
        }
        out
    }

    fn from_packed(payload: &[u8], n: usize, w: usize) -> Result<Self, TableError> {
        if w == 0 || w > 64 {
            return Err(TableError::WordWidth(w));
        }
        let need = (n * w).div_ceil(8);
        if payload.len() != need {
            return Err(TableError::Format(format!(
                "expected {need} payload bytes for N={n}, w={w}, found {}",
                payload.len()
            )));
        }
        let mut entries = vec![0u64; n];
        for (i, e) in entries.iter_mut().enumerate() {
            for b in 0..w {
                let k = i * w + b;
                if (payload[k / 8] >> (k % 8)) & 1 == 1 {
                    *e |= 1 << b;
                }
            }
        }
        BitTable::new(entries, w)
    }

    pub fn to_qtbl(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.len() * self.word_width / 8 + 1);
        out.extend_from_slice(QTBL_MAGIC);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.word_width as u32).to_le_bytes());
        out.extend_from_slice(&self.packed_bits());
        out
    }

    pub fn from_qtbl(bytes: &[u8]) -> Result<Self, TableError> {
        if bytes.len() < 12 || &bytes[..4] != QTBL_MAGIC {
            return Err(TableError::Format("missing QTBL header".into()));
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        BitTable::from_packed(&bytes[12..], n, w)
    }

    /// Hex form of the packed payload, two digits per byte.
    pub fn to_hex(&self) -> String {
        self.packed_bits().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str, n: usize, w: usize) -> Result<Self, TableError> {
        if !hex.len().is_multiple_of(2) {
            return Err(TableError::Format("odd number of hex digits".into()));
        }
        let payload = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|e| TableError::Format(e.to_string()))?;
        BitTable::from_packed(&payload, n, w)
    }
}

pub(crate) fn word_mask(w: usize) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}
