//! Differential attack data: truncated patterns, key-bit lists, the
//! ciphertext filter and the partial-decryption difference function `h`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::simon::{Block, SimonParams, Variant};

const BUILTIN: &str = include_str!("../data/catalog.toml");

/// One word of a truncated difference. `mask` marks fixed bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedWord {
    pub width: u32,
    pub mask: u64,
    pub value: u64,
}

impl TruncatedWord {
    pub fn exact(width: u32, value: u64) -> Self {
        let full = word_mask(width);
        TruncatedWord {
            width,
            mask: full,
            value: value & full,
        }
    }

    pub fn parse(s: &str, width: u32) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != width as usize {
            return Err(Error::Catalog(format!(
                "pattern `{s}` has {} symbols, expected {width}",
                chars.len()
            )));
        }
        let (mut mask, mut value) = (0u64, 0u64);
        for (k, ch) in chars.iter().enumerate() {
            let bit = width as usize - 1 - k;
            match ch {
                '0' => mask |= 1 << bit,
                '1' => {
                    mask |= 1 << bit;
                    value |= 1 << bit;
                }
                '*' => {}
                _ => return Err(Error::Catalog(format!("bad symbol `{ch}` in `{s}`"))),
            }
        }
        Ok(TruncatedWord { width, mask, value })
    }

    pub fn matches(&self, x: u64) -> bool {
        x & self.mask == self.value
    }

    pub fn fixed_bits(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Bits whose difference may be 1.
    pub fn maybe_nonzero(&self) -> u64 {
        (!self.mask | self.value) & word_mask(self.width)
    }

    pub fn unknown(&self) -> u64 {
        !self.mask & word_mask(self.width)
    }
}

impl fmt::Display for TruncatedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.width {
            let bit = self.width - 1 - k;
            if k > 0 && k % 4 == 0 {
                f.write_str(" ")?;
            }
            let c = if self.mask >> bit & 1 == 0 {
                '*'
            } else if self.value >> bit & 1 == 1 {
                '1'
            } else {
                '0'
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn word_mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedDiff {
    pub left: TruncatedWord,
    pub right: TruncatedWord,
}

impl TruncatedDiff {
    pub fn exact(width: u32, d: Block) -> Self {
        TruncatedDiff {
            left: TruncatedWord::exact(width, d.left),
            right: TruncatedWord::exact(width, d.right),
        }
    }

    pub fn parse(s: &str, width: u32) -> Result<Self> {
        let (l, r) = s
            .split_once(',')
            .ok_or_else(|| Error::Catalog(format!("pattern `{s}` lacks a comma")))?;
        Ok(TruncatedDiff {
            left: TruncatedWord::parse(l, width)?,
            right: TruncatedWord::parse(r, width)?,
        })
    }

    pub fn matches(&self, d: Block) -> bool {
        self.left.matches(d.left) && self.right.matches(d.right)
    }

    pub fn fixed_bits(&self) -> u32 {
        self.left.fixed_bits() + self.right.fixed_bits()
    }

    /// Key-free propagation through one encryption round: an AND difference
    /// is zero only when both of its input differences are fixed zero.
    pub fn forward(&self, p: &SimonParams) -> TruncatedDiff {
        let full = p.mask();
        let nz = self.left.maybe_nonzero();
        let and_unknown = p.rotl(nz, 1) | p.rotl(nz, 8);
        let unknown = self.right.unknown() | p.rotl(self.left.unknown(), 2) | and_unknown;
        let value = (self.right.value ^ p.rotl(self.left.value, 2)) & !unknown & full;
        TruncatedDiff {
            left: TruncatedWord {
                width: p.word_bits,
                mask: !unknown & full,
                value,
            },
            right: self.left,
        }
    }
}

impl fmt::Display for TruncatedDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// XOR of round-key bits, each given as (round, bit).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeyTerm(pub Vec<(u32, u32)>);

impl KeyTerm {
    pub fn eval(&self, round_keys: &[u64]) -> u8 {
        self.0.iter().fold(0, |a, &(r, b)| {
            a ^ ((round_keys[r as usize] >> b) & 1) as u8
        })
    }

    fn normalized(mut self) -> Self {
        self.0.sort();
        self
    }
}

impl fmt::Display for KeyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(r, b)| format!("K{r}[{b}]")).collect();
        f.write_str(&parts.join("^"))
    }
}

/// Parse entries like `K18`, `K17[4,6-9]`, `K16[7]^K17[5]`.
pub fn parse_key_terms(entries: &[String], width: u32) -> Result<Vec<KeyTerm>> {
    let mut out = Vec::new();
    for e in entries {
        let e = e.replace(' ', "");
        if e.contains('^') {
            let mut bits = Vec::new();
            for part in e.split('^') {
                let (r, list) = parse_key_atom(part, width)?;
                if list.len() != 1 {
                    return Err(Error::Catalog(format!("ambiguous combination `{e}`")));
                }
                bits.push((r, list[0]));
            }
            out.push(KeyTerm(bits).normalized());
        } else {
            let (r, list) = parse_key_atom(&e, width)?;
            out.extend(list.into_iter().map(|b| KeyTerm(vec![(r, b)])));
        }
    }
    Ok(out)
}

fn parse_key_atom(s: &str, width: u32) -> Result<(u32, Vec<u32>)> {
    let bad = || Error::Catalog(format!("bad key-bit entry `{s}`"));
    let s = s.strip_prefix('K').ok_or_else(bad)?;
    let (round, rest) = match s.find('[') {
        Some(i) => (&s[..i], Some(&s[i..])),
        None => (s, None),
    };
    let round: u32 = round.parse().map_err(|_| bad())?;
    let bits = match rest {
        None => (0..width).collect(),
        Some(r) => {
            let inner = r
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(bad)?;
            let mut bits = Vec::new();
            for item in inner.split(',') {
                match item.split_once('-') {
                    Some((a, b)) => {
                        let a: u32 = a.parse().map_err(|_| bad())?;
                        let b: u32 = b.parse().map_err(|_| bad())?;
                        bits.extend(a..=b);
                    }
                    None => bits.push(item.parse().map_err(|_| bad())?),
                }
            }
            if bits.iter().any(|&b| b >= width) {
                return Err(bad());
            }
            bits
        }
    };
    Ok((round, bits))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Differential {
    pub variant: Variant,
    pub index: usize,
    pub delta_in: Block,
    pub delta_out: Block,
    pub input_pattern: TruncatedDiff,
    pub key_terms: Vec<KeyTerm>,
}

impl Differential {
    pub fn k1_from_round_keys(&self, round_keys: &[u64]) -> Vec<u8> {
        self.key_terms.iter().map(|t| t.eval(round_keys)).collect()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AttackParams {
    pub attack_rounds: u32,
    /// Rounds peeled off behind the differential output.
    pub tail_rounds: u32,
    #[serde(default)]
    pub first_round: Option<u32>,
    #[serde(default)]
    pub differential_rounds: Option<u32>,
    #[serde(default)]
    pub structure_pairs_log2: Option<f64>,
    pub filtered_pairs_log2: f64,
    pub guessed_key_bits: u32,
    pub check_probability_log2: f64,
    pub runs_log2: f64,
    #[serde(default)]
    pub combined_key_bits: Option<u32>,
    #[serde(default)]
    pub overlap_log2: Vec<f64>,
    pub differentials: u32,
    pub h_cnot: u64,
    pub h_toffoli: u64,
    pub h_t_depth: u64,
    pub h_full_depth: u64,
}

#[derive(Deserialize)]
struct RawDifferential {
    variant: String,
    index: usize,
    delta_in: String,
    delta_out: String,
    input_pattern: String,
    key_bits: Vec<String>,
}

#[derive(Deserialize)]
struct RawCatalog {
    #[serde(default)]
    differential: Vec<RawDifferential>,
    #[serde(default)]
    attack: BTreeMap<String, AttackParams>,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub differentials: Vec<Differential>,
    pub attacks: BTreeMap<Variant, AttackParams>,
}

fn parse_pair(s: &str) -> Result<Block> {
    let (l, r) = s
        .split_once(',')
        .ok_or_else(|| Error::Catalog(format!("difference `{s}` lacks a comma")))?;
    let h = |x: &str| {
        u64::from_str_radix(x.trim(), 16).map_err(|_| Error::Catalog(format!("bad hex `{x}`")))
    };
    Ok(Block::new(h(l)?, h(r)?))
}

impl Catalog {
    pub fn builtin() -> Self {
        Catalog::from_toml_str(BUILTIN).expect("shipped catalog parses")
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let raw: RawCatalog = toml::from_str(s).map_err(|e| Error::Catalog(e.to_string()))?;
        let mut differentials = Vec::new();
        for d in raw.differential {
            let variant: Variant = d.variant.parse()?;
            let n = variant.params().word_bits;
            differentials.push(Differential {
                variant,
                index: d.index,
                delta_in: parse_pair(&d.delta_in)?,
                delta_out: parse_pair(&d.delta_out)?,
                input_pattern: TruncatedDiff::parse(&d.input_pattern, n)?,
                key_terms: parse_key_terms(&d.key_bits, n)?,
            });
        }
        let mut attacks = BTreeMap::new();
        for (k, v) in raw.attack {
            attacks.insert(k.parse::<Variant>()?, v);
        }
        Ok(Catalog {
            differentials,
            attacks,
        })
    }

    pub fn differential(&self, variant: Variant, index: usize) -> Result<&Differential> {
        self.differentials
            .iter()
            .find(|d| d.variant == variant && d.index == index)
            .ok_or(Error::UnknownDifferential(index))
    }

    pub fn attack(&self, variant: Variant) -> Result<&AttackParams> {
        self.attacks
            .get(&variant)
            .ok_or_else(|| Error::Unsupported(format!("no attack data for {variant}")))
    }
}

/// The hard-coded attack data for one variant.
pub fn differential_catalog(variant: Variant) -> Result<(Vec<Differential>, AttackParams)> {
    let cat = Catalog::builtin();
    let attack = cat.attack(variant)?.clone();
    let diffs = cat
        .differentials
        .into_iter()
        .filter(|d| d.variant == variant)
        .collect();
    Ok((diffs, attack))
}

/// AND-difference term of one output bit in the backward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AndTerm {
    /// Only partner `nonzero` may differ: term = Δx[nonzero] & x[value].
    Single {
        bit: usize,
        nonzero: usize,
        value: usize,
    },
    /// Both partners may differ: term from values on both sides.
    Both { bit: usize, p: usize, q: usize },
}

impl AndTerm {
    pub fn bit(&self) -> usize {
        match *self {
            AndTerm::Single { bit, .. } | AndTerm::Both { bit, .. } => bit,
        }
    }
}

/// Everything the backward computation of Δ at the output of the
/// differential needs, derived from the truncated forward patterns.
///
/// Naming follows a 4-round tail: ciphertexts after round `r+4`, the
/// differential output after round `r`. Registers for the last three
/// layers are called 18, 17, 16 and 15 after the 19-round attack.
#[derive(Debug, Clone, Serialize)]
pub struct HPlan {
    pub params: SimonParams,
    pub delta_out: Block,
    pub tail_round: u32,
    pub d16: TruncatedDiff,
    pub d17: TruncatedDiff,
    pub d18: TruncatedDiff,
    /// Bits of ΔR17 whose AND difference is kept.
    pub and17: Vec<usize>,
    /// Bits of R17 whose values are computed on both sides.
    pub values17: Vec<usize>,
    /// Positions q for which R17[q-2]^K16[q] is computed.
    pub combos: Vec<usize>,
    pub and16: Vec<AndTerm>,
    pub and15: Vec<AndTerm>,
    /// Catalog position of each derived key term: K18 bits, then values17,
    /// then combos.
    pub k18_pos: Vec<usize>,
    pub k17_pos: Vec<usize>,
    pub combo_pos: Vec<usize>,
}

fn bits_of(x: u64, n: u32) -> Vec<usize> {
    (0..n as usize).filter(|&i| x >> i & 1 == 1).collect()
}

fn and_terms(nonzero: u64, n: u32) -> Vec<AndTerm> {
    let n = n as usize;
    let nz = |i: usize| nonzero >> (i % n) & 1 == 1;
    (0..n)
        .filter_map(|i| {
            let p = (i + n - 1) % n;
            let q = (i + n - 8) % n;
            match (nz(p), nz(q)) {
                (false, false) => None,
                (true, false) => Some(AndTerm::Single {
                    bit: i,
                    nonzero: p,
                    value: q,
                }),
                (false, true) => Some(AndTerm::Single {
                    bit: i,
                    nonzero: q,
                    value: p,
                }),
                (true, true) => Some(AndTerm::Both { bit: i, p, q }),
            }
        })
        .collect()
}

impl HPlan {
    pub fn derive(diff: &Differential, attack: &AttackParams) -> Result<Self> {
        let params = diff.variant.params();
        let n = params.word_bits;
        let tail_round = attack.attack_rounds - 4;
        let d15 = TruncatedDiff::exact(n, diff.delta_out);
        let d16 = d15.forward(&params);
        let d17 = d16.forward(&params);
        let d18 = d17.forward(&params);

        let nz17 = d17.left.maybe_nonzero();
        let and17: Vec<usize> = bits_of(params.rotl(nz17, 1) | params.rotl(nz17, 8), n);
        let and16 = and_terms(d16.left.maybe_nonzero(), n);
        let and15 = and_terms(d15.left.maybe_nonzero(), n);

        let mut values17 = Vec::new();
        let mut combos = Vec::new();
        for t in &and16 {
            match *t {
                AndTerm::Single { value, .. } => values17.push(value),
                AndTerm::Both { p, q, .. } => values17.extend([p, q]),
            }
        }
        let nn = n as usize;
        for t in &and15 {
            match *t {
                AndTerm::Single { value, .. } => {
                    // R16[value] = L17[value] ^ R17[v-1]&R17[v-8] ^ (R17[v-2]^K16[v])
                    values17.push((value + nn - 1) % nn);
                    values17.push((value + nn - 8) % nn);
                    combos.push(value);
                }
                AndTerm::Both { .. } => {
                    return Err(Error::Unsupported(
                        "two-sided AND difference in the last backward round".into(),
                    ))
                }
            }
        }
        values17.sort_unstable();
        values17.dedup();
        combos.sort_unstable();
        combos.dedup();
        if combos
            .iter()
            .any(|&q| values17.contains(&((q + nn - 2) % nn)))
        {
            return Err(Error::Unsupported(
                "combination overlaps a value bit".into(),
            ));
        }

        let r18 = attack.attack_rounds - 1;
        let (r17, r16) = (r18 - 1, r18 - 2);
        let find = |t: KeyTerm| -> Result<usize> {
            let t = t.normalized();
            diff.key_terms
                .iter()
                .position(|k| *k == t)
                .ok_or_else(|| Error::Catalog(format!("catalog lacks key term {t}")))
        };
        let k18_pos = (0..n)
            .map(|b| find(KeyTerm(vec![(r18, b)])))
            .collect::<Result<Vec<_>>>()?;
        let k17_pos = values17
            .iter()
            .map(|&b| find(KeyTerm(vec![(r17, b as u32)])))
            .collect::<Result<Vec<_>>>()?;
        let combo_pos = combos
            .iter()
            .map(|&q| {
                find(KeyTerm(vec![
                    (r16, q as u32),
                    (r17, ((q + nn - 2) % nn) as u32),
                ]))
            })
            .collect::<Result<Vec<_>>>()?;
        let used = k18_pos.len() + k17_pos.len() + combo_pos.len();
        if used != diff.key_terms.len() {
            return Err(Error::Catalog(format!(
                "catalog lists {} key terms, the derivation uses {used}",
                diff.key_terms.len()
            )));
        }
        Ok(HPlan {
            params,
            delta_out: diff.delta_out,
            tail_round,
            d16,
            d17,
            d18,
            and17,
            values17,
            combos,
            and16,
            and15,
            k18_pos,
            k17_pos,
            combo_pos,
        })
    }

    pub fn key_bits(&self) -> usize {
        self.k18_pos.len() + self.k17_pos.len() + self.combo_pos.len()
    }

    /// Key-free check of the fixed bits of Δ^18.
    pub fn filter_pass(&self, a: Block, b: Block) -> bool {
        let p = &self.params;
        let dl18 = a.right ^ b.right;
        let dr18 = a.left ^ b.left ^ p.f(a.right) ^ p.f(b.right);
        self.d18.matches(Block::new(dl18, dr18))
    }

    /// Backward difference at the differential output for the ciphertext
    /// pair (a, b) under the guessed key bits `k1` (catalog order).
    pub fn h(&self, a: Block, b: Block, k1: &[u8]) -> Block {
        let p = &self.params;
        let n = p.word_bits as usize;
        let bit = |x: u64, i: usize| (x >> (i % n)) & 1;
        let at = |i: isize| ((i % n as isize + n as isize) % n as isize) as usize;
        let k18 = self
            .k18_pos
            .iter()
            .enumerate()
            .fold(0u64, |w, (b, &pos)| w | u64::from(k1[pos]) << b);
        let k17 = |i: usize| {
            let j = self.values17.iter().position(|&v| v == i).unwrap();
            u64::from(k1[self.k17_pos[j]])
        };
        let combo = |q: usize| {
            let j = self.combos.iter().position(|&v| v == q).unwrap();
            u64::from(k1[self.combo_pos[j]])
        };

        // Undo the last round: L17 values in `l`, L18 values in `r`.
        let side = |c: Block| (c.left ^ p.f(c.right) ^ k18, c.right);
        let (al, ar) = side(a);
        let (bl, br) = side(b);
        let and_at = |x: u64, i: usize| bit(x, at(i as isize - 1)) & bit(x, at(i as isize - 8));

        // R17 values (or R17^K16 combinations) on both sides.
        let mut ra = BTreeMap::new();
        let mut rb = BTreeMap::new();
        for &i in &self.values17 {
            for (l, r, m) in [(al, ar, &mut ra), (bl, br, &mut rb)] {
                m.insert(
                    i,
                    bit(r, i) ^ and_at(l, i) ^ bit(l, at(i as isize - 2)) ^ k17(i),
                );
            }
        }
        for &q in &self.combos {
            let i = at(q as isize - 2);
            for (l, r, m) in [(al, ar, &mut ra), (bl, br, &mut rb)] {
                m.insert(
                    i,
                    bit(r, i) ^ and_at(l, i) ^ bit(l, at(i as isize - 2)) ^ combo(q),
                );
            }
        }

        let mut dr17 = 0u64;
        for i in 0..n {
            let d = if let Some(v) = ra.get(&i) {
                v ^ rb[&i]
            } else {
                let mut d = bit(ar ^ br, i) ^ bit(al ^ bl, at(i as isize - 2));
                if self.and17.contains(&i) {
                    d ^= and_at(al, i) ^ and_at(bl, i);
                }
                d
            };
            dr17 |= d << i;
        }

        let mut dr16 = 0u64;
        for i in 0..n {
            dr16 |= (bit(al ^ bl, i) ^ bit(dr17, at(i as isize - 2))) << i;
        }
        for t in &self.and16 {
            let v = match *t {
                AndTerm::Single { nonzero, value, .. } => bit(dr17, nonzero) & ra[&value],
                AndTerm::Both { p: x, q: y, .. } => (ra[&x] & ra[&y]) ^ (rb[&x] & rb[&y]),
            };
            dr16 ^= v << t.bit();
        }

        let mut dr15 = dr17 ^ p.rotl(dr16, 2);
        for t in &self.and15 {
            if let AndTerm::Single { nonzero, value, .. } = *t {
                let r16 = bit(al, value) & 1
                    ^ (ra[&at(value as isize - 1)] & ra[&at(value as isize - 8)])
                    ^ ra[&at(value as isize - 2)];
                dr15 ^= (bit(dr16, nonzero) & r16) << t.bit();
            }
        }
        Block::new(dr16, dr15)
    }

    /// Ciphertext pair with a random Δ^18 drawn from the filter pattern.
    pub fn sample_filtered_pair<R: Rng>(&self, rng: &mut R) -> (Block, Block) {
        let p = &self.params;
        let m = p.mask();
        let a = Block::new(rng.gen::<u64>() & m, rng.gen::<u64>() & m);
        let free = |w: &TruncatedWord, x: u64| (x & !w.mask & m) | w.value;
        let dl18 = free(&self.d18.left, rng.gen());
        let dr18 = free(&self.d18.right, rng.gen());
        let br = a.right ^ dl18;
        let bl = a.left ^ dr18 ^ p.f(a.right) ^ p.f(br);
        (a, Block::new(bl, br))
    }

    /// Pair that follows the differential output through the last four
    /// rounds under `round_keys`.
    pub fn sample_tail_pair<R: Rng>(&self, rng: &mut R, round_keys: &[u64]) -> (Block, Block) {
        let p = &self.params;
        let m = p.mask();
        let x = Block::new(rng.gen::<u64>() & m, rng.gen::<u64>() & m);
        let y = x.xor(self.delta_out);
        let r = self.tail_round as usize;
        let run = |mut s: Block| {
            for k in &round_keys[r..r + 4] {
                s = crate::simon::encrypt_round(p, s, *k);
            }
            s
        };
        (run(x), run(y))
    }
}

/// Filter by differential index using the shipped SIMON32/64 catalog.
pub fn filter_pass(a: Block, b: Block, index: usize) -> Result<bool> {
    let cat = Catalog::builtin();
    let d = cat.differential(Variant::Simon32_64, index)?;
    let plan = HPlan::derive(d, cat.attack(Variant::Simon32_64)?)?;
    Ok(plan.filter_pass(a, b))
}

/// The D2 difference function on a ciphertext pair.
pub fn classical_h(a: Block, b: Block, k1: &[u8]) -> Result<Block> {
    let cat = Catalog::builtin();
    let d = cat.differential(Variant::Simon32_64, 2)?;
    let plan = HPlan::derive(d, cat.attack(Variant::Simon32_64)?)?;
    if k1.len() != plan.key_bits() {
        return Err(Error::WidthMismatch {
            expected: plan.key_bits(),
            got: k1.len(),
        });
    }
    Ok(plan.h(a, b, k1))
}
