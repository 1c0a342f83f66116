//! Bit strings: the payloads the scheme encodes and decodes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("bit strings use only '0' and '1', found {found:?} at position {pos}")]
    BadCharacter { found: char, pos: usize },
}

/// An ordered bit sequence, displayed as a string of `0`/`1` characters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Bits {
        Bits(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Inserts `other` as a contiguous block starting at `offset`.
    pub fn insert_block(&self, other: &Bits, offset: usize) -> Bits {
        assert!(offset <= self.len(), "offset beyond payload");
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0[..offset]);
        out.extend_from_slice(&other.0);
        out.extend_from_slice(&self.0[offset..]);
        Bits(out)
    }

    /// All offsets where `needle` occurs as a contiguous substring.
    pub fn find_all(&self, needle: &Bits) -> Vec<usize> {
        if needle.len() > self.len() {
            return Vec::new();
        }
        (0..=self.len() - needle.len())
            .filter(|&start| self.0[start..start + needle.len()] == needle.0[..])
            .collect()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.0 {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Bits, BitsError> {
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(BitsError::BadCharacter { found, pos }),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(Bits)
    }
}
