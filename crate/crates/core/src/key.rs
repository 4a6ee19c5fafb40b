//! 512-bit keys and the derivation of the four (initial value, control
//! parameter) pairs that drive the cipher stages.
//!
//! The main key is the XOR of the public and secret keys. It is cut into eight
//! 8x8 bit slabs in reading order; the parity of each slab row gives one bit
//! of an 8x8 matrix whose column `k` comes from slab `k`. Weighting rows by
//! 128, 64, ..., 1 turns the columns into eight bytes `s_1..s_8`, and
//!
//! ```text
//! v_i = s_i / 256
//! u_i = s_{i+4} / 256 + (s_{i+4} mod 10)
//! ```
//!
//! Although the key is 512 bits, only the 64 parity bits reach the cipher.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::chaos::{MapParams, ZERO_REMAP};
use crate::error::{Error, Result};

pub const KEY_BITS: usize = 512;
const KEY_BYTES: usize = KEY_BITS / 8;

/// A 512-bit key. Bit 1 (reading order) is the most significant bit of
/// byte 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitKey512([u8; KEY_BYTES]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyFormat {
    Binary,
    Hex,
}

impl FromStr for KeyFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binary" | "bin" => Ok(KeyFormat::Binary),
            "hex" => Ok(KeyFormat::Hex),
            other => Err(format!(
                "unknown key format '{other}' (expected binary or hex)"
            )),
        }
    }
}

impl BitKey512 {
    pub const ZERO: BitKey512 = BitKey512([0; KEY_BYTES]);

    pub fn from_bytes(bytes: [u8; KEY_BYTES]) -> Self {
        BitKey512(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; KEY_BYTES] {
        &self.0
    }

    /// Bit at 1-based reading-order `position`.
    pub fn bit(&self, position: usize) -> bool {
        assert!(
            (1..=KEY_BITS).contains(&position),
            "bit position {position} out of range"
        );
        let idx = position - 1;
        self.0[idx / 8] >> (7 - idx % 8) & 1 == 1
    }

    /// Copy of the key with the bit at 1-based `position` inverted.
    pub fn flip_bit(&self, position: usize) -> Result<BitKey512> {
        if !(1..=KEY_BITS).contains(&position) {
            return Err(Error::domain(format!(
                "bit position {position} outside 1..={KEY_BITS}"
            )));
        }
        let idx = position - 1;
        let mut out = *self;
        out.0[idx / 8] ^= 0x80 >> (idx % 8);
        Ok(out)
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|b| b.count_ones()).sum()
    }

    /// Number of differing bit positions.
    pub fn hamming(&self, other: &BitKey512) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    /// Canonical 512-character `0`/`1` rendering.
    pub fn to_binary_string(&self) -> String {
        let mut s = String::with_capacity(KEY_BITS);
        for byte in self.0 {
            for shift in (0..8).rev() {
                s.push(if byte >> shift & 1 == 1 { '1' } else { '0' });
            }
        }
        s
    }

    pub fn to_hex_string(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn parse(text: &str, format: KeyFormat) -> Result<BitKey512> {
        parse_key(text, format)
    }

    /// Reads a key file: a single line, trailing newline permitted.
    pub fn read_file(path: &Path, format: KeyFormat) -> Result<BitKey512> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_key(&text, format)
    }

    /// Writes the canonical binary line followed by a newline.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, format!("{}\n", self.to_binary_string())).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl fmt::Debug for BitKey512 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitKey512({})", self.to_hex_string())
    }
}

impl std::ops::BitXor for BitKey512 {
    type Output = BitKey512;

    fn bitxor(self, rhs: BitKey512) -> BitKey512 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o ^= r;
        }
        BitKey512(out)
    }
}

/// Parses a key in reading order. Surrounding whitespace is ignored; any
/// other stray character is reported with its 1-based position.
pub fn parse_key(text: &str, format: KeyFormat) -> Result<BitKey512> {
    let body = text.trim();
    let expected = match format {
        KeyFormat::Binary => KEY_BITS,
        KeyFormat::Hex => KEY_BITS / 4,
    };
    let mut bytes = [0u8; KEY_BYTES];
    let mut count = 0usize;
    for (i, ch) in body.chars().enumerate() {
        let position = i + 1;
        if count >= expected {
            return Err(Error::KeyFormat {
                position,
                message: format!("key longer than {expected} characters"),
            });
        }
        match format {
            KeyFormat::Binary => {
                let bit = match ch {
                    '0' => 0u8,
                    '1' => 1u8,
                    _ => {
                        return Err(Error::KeyFormat {
                            position,
                            message: format!("unexpected character {ch:?}"),
                        })
                    }
                };
                bytes[count / 8] |= bit << (7 - count % 8);
            }
            KeyFormat::Hex => {
                let nibble = ch.to_digit(16).ok_or_else(|| Error::KeyFormat {
                    position,
                    message: format!("unexpected character {ch:?}"),
                })? as u8;
                bytes[count / 2] |= nibble << if count.is_multiple_of(2) { 4 } else { 0 };
            }
        }
        count += 1;
    }
    if count != expected {
        return Err(Error::KeyFormat {
            position: count + 1,
            message: format!("expected {expected} characters, found {count}"),
        });
    }
    Ok(BitKey512(bytes))
}

/// Main key as the bitwise XOR of the public and secret keys.
pub fn derive_main_key(public: &BitKey512, secret: &BitKey512) -> BitKey512 {
    *public ^ *secret
}

/// Four initial values, four control parameters, and the eight bytes they
/// were computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub v: [f64; 4],
    pub u: [f64; 4],
    pub s: [u8; 8],
}

impl DerivedParams {
    /// Computes V and U from the eight schedule bytes.
    pub fn from_schedule_bytes(s: [u8; 8]) -> Self {
        let mut v = [0.0; 4];
        let mut u = [0.0; 4];
        for i in 0..4 {
            let init = f64::from(s[i]) / 256.0;
            v[i] = if init == 0.0 { ZERO_REMAP } else { init };
            let c = s[i + 4];
            u[i] = f64::from(c) / 256.0 + f64::from(c % 10);
        }
        DerivedParams { v, u, s }
    }

    /// Map parameters for stage `i` (0 = permutation, 1 = DNA coding,
    /// 2 = diffusion, 3 = bit reversion).
    pub fn stage(&self, i: usize) -> MapParams {
        MapParams::new(self.v[i], self.u[i])
    }
}

/// Key schedule: reshape, row parity, weighted sum, then V/U.
pub fn derive_params(main_key: &BitKey512) -> DerivedParams {
    DerivedParams::from_schedule_bytes(schedule_bytes(main_key))
}

/// Public and secret key straight to cipher parameters.
pub fn derive_params_from_keys(public: &BitKey512, secret: &BitKey512) -> DerivedParams {
    derive_params(&derive_main_key(public, secret))
}

fn schedule_bytes(main_key: &BitKey512) -> [u8; 8] {
    // Slab k occupies bytes 8k..8k+8; each byte is one slab row, so a row
    // parity is the parity of one byte. Row r of column k carries weight
    // 2^(7-r).
    let mut s = [0u8; 8];
    for (k, slab) in main_key.0.chunks_exact(8).enumerate() {
        s[k] = slab
            .iter()
            .fold(0u8, |acc, row| acc << 1 | (row.count_ones() & 1) as u8);
    }
    s
}

/// Uniformly random key from a cryptographically strong generator.
pub fn random_public_key<R: RngCore + CryptoRng>(rng: &mut R) -> Result<BitKey512> {
    let mut bytes = [0u8; KEY_BYTES];
    rng.try_fill_bytes(&mut bytes)
        .map_err(|e| Error::Entropy(e.to_string()))?;
    Ok(BitKey512(bytes))
}

/// Random key drawn from the operating system's entropy source.
pub fn random_public_key_os() -> Result<BitKey512> {
    random_public_key(&mut rand::rngs::OsRng)
}
