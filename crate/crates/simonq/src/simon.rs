//! The SIMON block cipher family: parameters, key schedule, round function.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Constant sequences z0..z4, bit (i mod 62) is the i-th character.
const Z: [&str; 5] = [
    "11111010001001010110000111001101111101000100101011000011100110",
    "10001110111110010011000010110101000111011111001001100001011010",
    "10101111011100000011010010011000101000010001111110010110110011",
    "11011011101011000110010111100000010010001010011100110100001111",
    "11010001111001101011011000100000010111000011001010010011101111",
];

pub fn z_bit(j: usize, i: usize) -> u64 {
    u64::from(Z[j].as_bytes()[i % 62] == b'1')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "32/64")]
    Simon32_64,
    #[serde(rename = "48/72")]
    Simon48_72,
    #[serde(rename = "48/96")]
    Simon48_96,
    #[serde(rename = "64/96")]
    Simon64_96,
    #[serde(rename = "64/128")]
    Simon64_128,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Simon32_64,
        Variant::Simon48_72,
        Variant::Simon48_96,
        Variant::Simon64_96,
        Variant::Simon64_128,
    ];

    pub fn params(self) -> SimonParams {
        let (n, m, t, z) = match self {
            Variant::Simon32_64 => (16, 4, 32, 0),
            Variant::Simon48_72 => (24, 3, 36, 0),
            Variant::Simon48_96 => (24, 4, 36, 1),
            Variant::Simon64_96 => (32, 3, 42, 2),
            Variant::Simon64_128 => (32, 4, 44, 3),
        };
        SimonParams {
            word_bits: n,
            key_words: m,
            rounds: t,
            z_index: z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Simon32_64 => "32/64",
            Variant::Simon48_72 => "48/72",
            Variant::Simon48_96 => "48/96",
            Variant::Simon64_96 => "64/96",
            Variant::Simon64_128 => "64/128",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SIMON{}", self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s
            .trim()
            .trim_start_matches("SIMON")
            .trim_start_matches("simon");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s || v.name().replace('/', "_") == s)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonParams {
    pub word_bits: u32,
    pub key_words: u32,
    pub rounds: u32,
    pub z_index: usize,
}

impl SimonParams {
    pub fn mask(&self) -> u64 {
        if self.word_bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.word_bits) - 1
        }
    }

    pub fn block_bits(&self) -> u32 {
        2 * self.word_bits
    }

    pub fn key_bits(&self) -> u32 {
        self.word_bits * self.key_words
    }

    /// Constant c = 2^n - 4.
    pub fn c(&self) -> u64 {
        self.mask() ^ 3
    }

    /// Round constant added at key-schedule step `i` (i >= m).
    pub fn round_constant(&self, i: usize) -> u64 {
        self.c() ^ z_bit(self.z_index, i - self.key_words as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = Variant::ALL.iter().any(|v| v.params() == *self);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self:?}")))
        }
    }

    pub fn rotl(&self, x: u64, r: u32) -> u64 {
        let n = self.word_bits;
        let r = r % n;
        ((x << r) | (x >> ((n - r) % n))) & self.mask()
    }

    pub fn rotr(&self, x: u64, r: u32) -> u64 {
        let n = self.word_bits;
        self.rotl(x, n - r % n)
    }

    pub fn f(&self, x: u64) -> u64 {
        (self.rotl(x, 1) & self.rotl(x, 8)) ^ self.rotl(x, 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Block {
    pub left: u64,
    pub right: u64,
}

impl Block {
    pub fn new(left: u64, right: u64) -> Self {
        Block { left, right }
    }

    pub fn from_u128(params: &SimonParams, v: u128) -> Self {
        let n = params.word_bits;
        let m = u128::from(params.mask());
        Block {
            left: ((v >> n) & m) as u64,
            right: (v & m) as u64,
        }
    }

    pub fn to_u128(self, params: &SimonParams) -> u128 {
        (u128::from(self.left) << params.word_bits) | u128::from(self.right)
    }

    pub fn xor(self, other: Block) -> Block {
        Block {
            left: self.left ^ other.left,
            right: self.right ^ other.right,
        }
    }

    /// Hex in (left||right) order.
    pub fn to_hex(self, params: &SimonParams) -> String {
        let w = (params.word_bits / 4) as usize;
        format!("{:0w$x}{:0w$x}", self.left, self.right, w = w)
    }
}

pub type RoundKeys = Vec<u64>;

/// Expand the master key; word 0 is the least significant `n` bits.
pub fn key_schedule(params: &SimonParams, master: u128) -> Result<RoundKeys> {
    params.validate()?;
    let n = params.word_bits;
    let m = params.key_words as usize;
    if params.key_bits() < 128 && master >> params.key_bits() != 0 {
        return Err(Error::KeyTooWide(params.key_bits()));
    }
    let mask = u128::from(params.mask());
    let mut k: Vec<u64> = (0..m)
        .map(|i| ((master >> (n * i as u32)) & mask) as u64)
        .collect();
    for i in m..params.rounds as usize {
        k.push(next_round_key(params, &k, i));
    }
    Ok(k)
}

fn schedule_tmp(params: &SimonParams, k: &[u64], i: usize) -> u64 {
    let m = params.key_words as usize;
    let mut tmp = params.rotr(k[i - 1], 3);
    if m == 4 {
        tmp ^= k[i - 3];
    }
    tmp ^ params.rotr(tmp, 1)
}

fn next_round_key(params: &SimonParams, k: &[u64], i: usize) -> u64 {
    let m = params.key_words as usize;
    k[i - m] ^ schedule_tmp(params, k, i) ^ params.round_constant(i)
}

/// Recover the master key from `m` adjacent round keys starting at round `start`.
pub fn invert_key_schedule(params: &SimonParams, start: usize, window: &[u64]) -> Result<u128> {
    params.validate()?;
    let m = params.key_words as usize;
    if window.len() != m {
        return Err(Error::InvalidParams(format!(
            "need {m} adjacent round keys, got {}",
            window.len()
        )));
    }
    if start + m > params.rounds as usize {
        return Err(Error::RoundsOutOfRange(start + m, params.rounds));
    }
    // k[j] is stored at index j; fill downwards.
    let mut k = vec![0u64; start + m];
    k[start..].copy_from_slice(window);
    for j in (0..start).rev() {
        let i = j + m;
        k[j] = k[i] ^ schedule_tmp(params, &k, i) ^ params.round_constant(i);
    }
    Ok(k[..m].iter().enumerate().fold(0u128, |acc, (i, &w)| {
        acc | (u128::from(w) << (params.word_bits * i as u32))
    }))
}

pub fn encrypt_round(params: &SimonParams, b: Block, k: u64) -> Block {
    Block {
        left: b.right ^ params.f(b.left) ^ k,
        right: b.left,
    }
}

pub fn decrypt_round(params: &SimonParams, b: Block, k: u64) -> Block {
    Block {
        left: b.right,
        right: b.left ^ params.f(b.right) ^ k,
    }
}

pub fn encrypt(params: &SimonParams, keys: &[u64], pt: Block, rounds: usize) -> Result<Block> {
    if rounds > params.rounds as usize || rounds > keys.len() {
        return Err(Error::RoundsOutOfRange(rounds, params.rounds));
    }
    Ok(keys[..rounds]
        .iter()
        .fold(pt, |b, &k| encrypt_round(params, b, k)))
}

/// Undo rounds `rounds-1` down to 0.
pub fn decrypt(params: &SimonParams, keys: &[u64], ct: Block, rounds: usize) -> Result<Block> {
    if rounds > params.rounds as usize || rounds > keys.len() {
        return Err(Error::RoundsOutOfRange(rounds, params.rounds));
    }
    Ok(keys[..rounds]
        .iter()
        .rev()
        .fold(ct, |b, &k| decrypt_round(params, b, k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const VECTORS: [(Variant, u128, u128, u128); 5] = [
        (
            Variant::Simon32_64,
            0x1918111009080100,
            0x65656877,
            0xc69be9bb,
        ),
        (
            Variant::Simon48_72,
            0x1211100a0908020100,
            0x6120676e696c,
            0xdae5ac292cac,
        ),
        (
            Variant::Simon48_96,
            0x1a19181211100a0908020100,
            0x72696320646e,
            0x6e06a5acf156,
        ),
        (
            Variant::Simon64_96,
            0x131211100b0a090803020100,
            0x6f7220676e696c63,
            0x5ca2e27f111a8fc8,
        ),
        (
            Variant::Simon64_128,
            0x1b1a1918131211100b0a090803020100,
            0x656b696c20646e75,
            0x44c8fc20b9dfa07a,
        ),
    ];

    #[test]
    fn test_vectors() {
        for (v, key, pt, ct) in VECTORS {
            let p = v.params();
            let ks = key_schedule(&p, key).unwrap();
            assert_eq!(ks.len(), p.rounds as usize);
            let c = encrypt(&p, &ks, Block::from_u128(&p, pt), p.rounds as usize).unwrap();
            assert_eq!(c.to_u128(&p), ct, "{v}");
            let back = decrypt(&p, &ks, c, p.rounds as usize).unwrap();
            assert_eq!(back.to_u128(&p), pt);
        }
    }

    #[test]
    fn zero_key_first_expansion_is_constant() {
        let p = Variant::Simon32_64.params();
        let ks = key_schedule(&p, 0).unwrap();
        assert_eq!(ks[4], p.c() ^ z_bit(0, 0));
    }

    #[test]
    fn zero_rounds_is_identity() {
        let p = Variant::Simon48_96.params();
        let ks = key_schedule(&p, 7).unwrap();
        let b = Block::new(0x123456, 0xabcdef);
        assert_eq!(encrypt(&p, &ks, b, 0).unwrap(), b);
    }

    #[test]
    fn too_many_rounds() {
        let p = Variant::Simon32_64.params();
        let ks = key_schedule(&p, 0).unwrap();
        assert!(encrypt(&p, &ks, Block::default(), 33).is_err());
    }

    #[test]
    fn key_too_wide() {
        let p = Variant::Simon32_64.params();
        assert!(key_schedule(&p, 1u128 << 64).is_err());
    }

    #[test]
    fn invert_from_late_window() {
        let p = Variant::Simon32_64.params();
        let key = 0x1918111009080100;
        let ks = key_schedule(&p, key).unwrap();
        assert_eq!(invert_key_schedule(&p, 15, &ks[15..19]).unwrap(), key);
    }

    #[test]
    fn parse_variant() {
        assert_eq!("32/64".parse::<Variant>().unwrap(), Variant::Simon32_64);
        assert_eq!(
            "SIMON64/128".parse::<Variant>().unwrap(),
            Variant::Simon64_128
        );
        assert!("16/32".parse::<Variant>().is_err());
    }
}
