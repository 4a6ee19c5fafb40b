//! The eight DNA coding rules.
//!
//! Each pixel splits into four 2-bit groups, most significant first. Rule `r`
//! sends a group to the nucleotide in that group's row of the rule table,
//! which is then written back with the canonical bits A=00, C=01, G=10, T=11.
//! Rule 1 is the identity.

use crate::error::{Error, Result};

/// Rule table as nucleotides, indexed `[group][rule - 1]`.
const RULE_TABLE: [[u8; 8]; 4] = [
    *b"AACGCGTT", // 00
    *b"CGAATTCG", // 01
    *b"GCTTAAGC", // 10
    *b"TTGCGCAA", // 11
];

const fn nucleotide_bits(n: u8) -> u8 {
    match n {
        b'A' => 0b00,
        b'C' => 0b01,
        b'G' => 0b10,
        b'T' => 0b11,
        _ => panic!("not a nucleotide"),
    }
}

const fn build_pair_maps() -> [[u8; 4]; 8] {
    let mut maps = [[0u8; 4]; 8];
    let mut rule = 0;
    while rule < 8 {
        let mut group = 0;
        while group < 4 {
            maps[rule][group] = nucleotide_bits(RULE_TABLE[group][rule]);
            group += 1;
        }
        rule += 1;
    }
    maps
}

const PAIR_MAPS: [[u8; 4]; 8] = build_pair_maps();

const fn invert(maps: [[u8; 4]; 8]) -> [[u8; 4]; 8] {
    let mut inv = [[0u8; 4]; 8];
    let mut rule = 0;
    while rule < 8 {
        let mut group = 0;
        while group < 4 {
            inv[rule][maps[rule][group] as usize] = group as u8;
            group += 1;
        }
        rule += 1;
    }
    inv
}

const INVERSE_PAIR_MAPS: [[u8; 4]; 8] = invert(PAIR_MAPS);

/// Whole-byte lookup tables, `[rule - 1][value]`.
struct ByteTables {
    encode: [[u8; 256]; 8],
    decode: [[u8; 256]; 8],
}

const fn apply(map: &[u8; 4], value: u8) -> u8 {
    let mut out = 0u8;
    let mut shift = 8;
    while shift > 0 {
        shift -= 2;
        out |= map[((value >> shift) & 0b11) as usize] << shift;
    }
    out
}

const fn build_byte_tables() -> ByteTables {
    let mut encode = [[0u8; 256]; 8];
    let mut decode = [[0u8; 256]; 8];
    let mut rule = 0;
    while rule < 8 {
        let mut v = 0;
        while v < 256 {
            encode[rule][v] = apply(&PAIR_MAPS[rule], v as u8);
            decode[rule][v] = apply(&INVERSE_PAIR_MAPS[rule], v as u8);
            v += 1;
        }
        rule += 1;
    }
    ByteTables { encode, decode }
}

static TABLES: ByteTables = build_byte_tables();

/// A DNA coding rule, numbered 1 through 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DnaRule(u8);

impl DnaRule {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=8).contains(&index) {
            Ok(DnaRule(index))
        } else {
            Err(Error::domain(format!(
                "DNA rule index {index} outside 1..=8"
            )))
        }
    }

    pub fn all() -> impl Iterator<Item = DnaRule> {
        (1..=8).map(DnaRule)
    }

    /// Rule selected by a chaotic value in [0, 1): `1 + floor(8 x)`.
    pub fn from_chaotic(x: f64) -> DnaRule {
        let idx = (8.0 * x).floor() as i64;
        DnaRule(1 + idx.clamp(0, 7) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// The 2-bit group mapping, `pair_map()[group]`.
    pub fn pair_map(self) -> [u8; 4] {
        PAIR_MAPS[self.0 as usize - 1]
    }

    #[inline]
    pub fn encode(self, value: u8) -> u8 {
        TABLES.encode[self.0 as usize - 1][value as usize]
    }

    #[inline]
    pub fn decode(self, value: u8) -> u8 {
        TABLES.decode[self.0 as usize - 1][value as usize]
    }

    /// The four nucleotides a value is written as under this rule.
    pub fn nucleotides(self, value: u8) -> String {
        let encoded = self.encode(value);
        (0..4)
            .map(|g| ['A', 'C', 'G', 'T'][(encoded >> (6 - 2 * g) & 0b11) as usize])
            .collect()
    }
}

pub fn dna_encode_pixel(value: u8, rule: DnaRule) -> u8 {
    rule.encode(value)
}

pub fn dna_decode_pixel(value: u8, rule: DnaRule) -> u8 {
    rule.decode(value)
}
