//! Reduced end-to-end two-phase key recovery on SIMON32/64 with a planted key.
//!
//! Phase 1 searches (pair index, unknown partial-key bits) for pairs whose
//! backward difference equals the differential output. Repeated measurement
//! collects candidate partial keys. Phase 2 searches (candidate, unknown
//! remaining bits) for the master key that encrypts the known plaintexts
//! correctly.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::Register;
use crate::diff::{Catalog, Differential, HPlan};
use crate::error::{Error, Result};
use crate::qaa::{
    build_phase1_iterator, expected_distinct, iteration_count, marked_mass, simulate_qaa_table,
    success_probability, uniform, Reflection,
};
use crate::sim::simulate_bitsliced;
use crate::simon::{encrypt, invert_key_schedule, key_schedule, Block, SimonParams, Variant};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToyConfig {
    /// Partial-key bits left unknown in phase 1.
    pub unknown_bits: usize,
    /// log2 of the number of filtered pairs.
    pub index_bits: u32,
    pub right_pairs: usize,
    /// Remaining key coordinates left unknown in phase 2.
    pub phase2_bits: usize,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            unknown_bits: 12,
            index_bits: 10,
            right_pairs: 8,
            phase2_bits: 8,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase1Report {
    pub space_bits: u32,
    pub marked: usize,
    pub oracle_agrees: bool,
    pub registers_restored: bool,
    pub iterations: u64,
    pub success: f64,
    pub success_formula: f64,
    pub runs: usize,
    pub distinct_observed: usize,
    pub distinct_expected: f64,
    pub candidates: usize,
    pub planted_found: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase2Report {
    pub space: usize,
    pub marked: usize,
    pub p: f64,
    pub iterations: u64,
    pub success: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyReport {
    pub config: ToyConfig,
    pub planted_key: String,
    pub recovered_key: Option<String>,
    pub phase1: Phase1Report,
    pub phase2: Option<Phase2Report>,
    pub seconds: f64,
}

impl ToyReport {
    pub fn recovered(&self) -> bool {
        self.recovered_key.as_ref() == Some(&self.planted_key)
    }
}

/// Invertible linear change of coordinates on a window of adjacent round
/// keys: the first coordinates are the partial-key terms, the rest are unit
/// vectors completing a basis.
#[derive(Debug, Clone)]
pub struct KeyRelabel {
    params: SimonParams,
    start: usize,
    forward: Vec<u128>,
    inverse: Vec<u128>,
}

impl KeyRelabel {
    pub fn new(p: &SimonParams, d: &Differential) -> Result<Self> {
        let n = p.word_bits as usize;
        let m = p.key_words as usize;
        let width = n * m;
        let last = d
            .key_terms
            .iter()
            .flat_map(|t| t.0.iter().map(|&(r, _)| r as usize))
            .max()
            .ok_or_else(|| Error::InvalidParams("no key terms".into()))?;
        let start = last + 1 - m;
        let mut forward: Vec<u128> = Vec::with_capacity(width);
        for t in &d.key_terms {
            let row = t.0.iter().fold(0u128, |v, &(r, b)| {
                v ^ 1 << ((r as usize - start) * n + b as usize)
            });
            forward.push(row);
        }
        for j in 0..width {
            let mut cand = forward.clone();
            cand.push(1 << j);
            if rank(&cand) == cand.len() {
                forward.push(1 << j);
            }
        }
        let inverse = invert(&forward, width)
            .ok_or_else(|| Error::InvalidParams("key terms are dependent".into()))?;
        Ok(KeyRelabel {
            params: *p,
            start,
            forward,
            inverse,
        })
    }

    pub fn width(&self) -> usize {
        self.forward.len()
    }

    pub fn coords(&self, round_keys: &[u64]) -> u128 {
        let u = self.window_bits(round_keys);
        self.forward
            .iter()
            .enumerate()
            .fold(0, |c, (i, r)| c | ((r & u).count_ones() as u128 & 1) << i)
    }

    pub fn master_key(&self, coords: u128) -> Result<u128> {
        let n = self.params.word_bits as usize;
        let u = self.inverse.iter().enumerate().fold(0u128, |v, (i, r)| {
            v | ((r & coords).count_ones() as u128 & 1) << i
        });
        let window: Vec<u64> = (0..self.params.key_words as usize)
            .map(|w| (u >> (w * n)) as u64 & self.params.mask())
            .collect();
        invert_key_schedule(&self.params, self.start, &window)
    }

    fn window_bits(&self, round_keys: &[u64]) -> u128 {
        let n = self.params.word_bits as usize;
        (0..self.params.key_words as usize).fold(0, |v, w| {
            v | (round_keys[self.start + w] as u128) << (w * n)
        })
    }
}

fn rank(rows: &[u128]) -> usize {
    let mut rows = rows.to_vec();
    let mut r = 0;
    for bit in 0..128 {
        if let Some(i) = (r..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(r, i);
            for j in 0..rows.len() {
                if j != r && rows[j] >> bit & 1 == 1 {
                    rows[j] ^= rows[r];
                }
            }
            r += 1;
        }
    }
    r
}

/// Inverse of a square GF(2) matrix given as rows; row i of the result
/// gives input bit i as a combination of output coordinates.
fn invert(rows: &[u128], width: usize) -> Option<Vec<u128>> {
    if rows.len() != width {
        return None;
    }
    let mut a = rows.to_vec();
    let mut b: Vec<u128> = (0..width).map(|i| 1 << i).collect();
    for col in 0..width {
        let piv = (col..width).find(|&i| a[i] >> col & 1 == 1)?;
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..width {
            if i != col && a[i] >> col & 1 == 1 {
                a[i] ^= a[col];
                b[i] ^= b[col];
            }
        }
    }
    // a is now the identity: b = F^-1 with rows indexed by input bit.
    Some(b)
}

fn with_guess(k1: &[u8], bits: usize, g: u64) -> Vec<u8> {
    let mut k = k1.to_vec();
    for (i, x) in k.iter_mut().enumerate().take(bits) {
        *x = (g >> i & 1) as u8;
    }
    k
}

fn set_lane(lanes: &mut [u64], r: &Register, value: u128, lane: usize) {
    for i in 0..r.len {
        lanes[r.start + i] |= ((value >> i & 1) as u64) << lane;
    }
}

/// Marks every (pair index, guess) with the phase-1 oracle circuit, 64
/// inputs per pass. Returns the marks and whether every non-flag qubit was
/// restored.
fn circuit_marks(
    plan: &HPlan,
    pairs: &[(Block, Block)],
    k1: &[u8],
    bits: usize,
) -> Result<(Vec<bool>, bool)> {
    let (c, lay) = build_phase1_iterator(plan, Reflection::Initial)?;
    let oracle = c.with_gates(c.gates()[..lay.oracle_len].to_vec())?;
    let total = pairs.len() << bits;
    let mut marks = vec![false; total];
    let mut restored = true;
    for base in (0..total).step_by(64) {
        let mut lanes = vec![0u64; oracle.width()];
        let end = (base + 64).min(total);
        for (lane, e) in (base..end).enumerate() {
            let (a, b) = pairs[e >> bits];
            let kw = with_guess(k1, bits, (e & ((1 << bits) - 1)) as u64)
                .iter()
                .enumerate()
                .fold(0u128, |v, (i, &x)| v | (x as u128) << i);
            set_lane(&mut lanes, &lay.h.ct_a.left, a.left as u128, lane);
            set_lane(&mut lanes, &lay.h.ct_a.right, a.right as u128, lane);
            set_lane(&mut lanes, &lay.h.ct_b.left, b.left as u128, lane);
            set_lane(&mut lanes, &lay.h.ct_b.right, b.right as u128, lane);
            set_lane(&mut lanes, &lay.h.k1, kw, lane);
        }
        let before = lanes.clone();
        simulate_bitsliced(&oracle, &mut lanes)?;
        for (lane, m) in marks[base..end].iter_mut().enumerate() {
            *m = lanes[lay.flag] >> lane & 1 == 1;
        }
        lanes[lay.flag] = 0;
        restored &= lanes == before;
    }
    Ok((marks, restored))
}

pub fn run_toy(cfg: &ToyConfig) -> Result<ToyReport> {
    let t0 = Instant::now();
    let v = Variant::Simon32_64;
    let p = v.params();
    let cat = Catalog::builtin();
    let diff = cat.differential(v, 2)?;
    let attack = cat.attack(v)?;
    let plan = HPlan::derive(diff, attack)?;
    let kb = plan.key_bits();
    if cfg.unknown_bits > 16.min(kb) || cfg.index_bits as usize + cfg.unknown_bits > 24 {
        return Err(Error::InvalidParams(format!(
            "toy space too large: {} unknown bits, {} index bits",
            cfg.unknown_bits, cfg.index_bits
        )));
    }
    let relabel = KeyRelabel::new(&p, diff)?;
    if cfg.phase2_bits > relabel.width() - kb {
        return Err(Error::InvalidParams(format!(
            "phase-2 bits {}",
            cfg.phase2_bits
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let key = (rng.gen::<u128>()) & ((1u128 << p.key_bits()) - 1);
    let ks = key_schedule(&p, key)?;
    let k1 = diff.k1_from_round_keys(&ks);
    let planted_guess = (0..cfg.unknown_bits).fold(0u64, |g, i| g | (k1[i] as u64) << i);

    // Filtered data with a few right pairs at random positions.
    let n_pairs = 1usize << cfg.index_bits;
    let right: BTreeSet<usize> =
        rand::seq::index::sample(&mut rng, n_pairs, cfg.right_pairs.min(n_pairs))
            .into_iter()
            .collect();
    let pairs: Vec<(Block, Block)> = (0..n_pairs)
        .map(|i| {
            if right.contains(&i) {
                plan.sample_tail_pair(&mut rng, &ks)
            } else {
                plan.sample_filtered_pair(&mut rng)
            }
        })
        .collect();
    if !pairs.iter().all(|&(a, b)| plan.filter_pass(a, b)) {
        return Err(Error::InvalidParams("sampled pair fails the filter".into()));
    }

    // Phase 1.
    let bits = cfg.unknown_bits;
    let total = n_pairs << bits;
    let marked: Vec<bool> = (0..total)
        .map(|e| {
            let (a, b) = pairs[e >> bits];
            plan.h(a, b, &with_guess(&k1, bits, (e & ((1 << bits) - 1)) as u64)) == plan.delta_out
        })
        .collect();
    let (by_circuit, registers_restored) = circuit_marks(&plan, &pairs, &k1, bits)?;
    let m1 = marked.iter().filter(|&&x| x).count();
    let p1 = m1 as f64 / total as f64;
    let it1 = iteration_count(p1)?;
    let probs = simulate_qaa_table(&uniform(total), &marked, it1)?;
    let success = marked_mass(&probs, &marked);

    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let runs = m1;
    let mut seen = BTreeSet::new();
    for _ in 0..runs {
        let e = dist.sample(&mut rng);
        if marked[e] {
            seen.insert(e);
        }
    }
    let candidates: BTreeSet<u64> = seen
        .iter()
        .map(|&e| (e & ((1 << bits) - 1)) as u64)
        .collect();
    let phase1 = Phase1Report {
        space_bits: cfg.index_bits + bits as u32,
        marked: m1,
        oracle_agrees: by_circuit == marked,
        registers_restored,
        iterations: it1,
        success,
        success_formula: success_probability(p1, it1),
        runs,
        distinct_observed: seen.len(),
        distinct_expected: expected_distinct(m1 as f64, runs as f64),
        candidates: candidates.len(),
        planted_found: candidates.contains(&planted_guess),
    };

    // Phase 2 over the measured candidates and the remaining unknown bits.
    let known: Vec<(Block, Block)> = (0..2)
        .map(|_| {
            let m = Block::from_u128(&p, rng.gen::<u128>() & ((1u128 << p.block_bits()) - 1));
            encrypt(&p, &ks, m, attack.attack_rounds as usize).map(|c| (m, c))
        })
        .collect::<Result<_>>()?;
    let planted_coords = relabel.coords(&ks);
    let cands: Vec<u64> = candidates.into_iter().collect();
    let b2 = cfg.phase2_bits;
    let space2 = cands.len() << b2;
    let mut keys2 = Vec::with_capacity(space2);
    for &g in &cands {
        for r in 0..1u128 << b2 {
            let mut c = planted_coords;
            c &= !((1u128 << bits) - 1);
            c |= g as u128;
            c &= !(((1u128 << b2) - 1) << kb);
            c |= r << kb;
            keys2.push(relabel.master_key(c)?);
        }
    }
    let marked2: Vec<bool> = keys2
        .iter()
        .map(|&k| {
            let ks = key_schedule(&p, k)?;
            Ok(known
                .iter()
                .all(|(m, c)| encrypt(&p, &ks, *m, attack.attack_rounds as usize).ok() == Some(*c)))
        })
        .collect::<Result<_>>()?;
    let m2 = marked2.iter().filter(|&&x| x).count();
    let (phase2, recovered) = if m2 == 0 {
        (None, None)
    } else {
        let p2 = m2 as f64 / space2 as f64;
        let it2 = iteration_count(p2)?;
        let probs2 = simulate_qaa_table(&uniform(space2), &marked2, it2)?;
        let success2 = marked_mass(&probs2, &marked2);
        let d2 = WeightedIndex::new(&probs2).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let e = d2.sample(&mut rng);
        (
            Some(Phase2Report {
                space: space2,
                marked: m2,
                p: p2,
                iterations: it2,
                success: success2,
            }),
            marked2[e].then_some(keys2[e]),
        )
    };
    let hex = |k: u128| format!("{:016x}", k);
    Ok(ToyReport {
        config: *cfg,
        planted_key: hex(key),
        recovered_key: recovered.map(hex),
        phase1,
        phase2,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabel_round_trips() {
        let p = Variant::Simon32_64.params();
        let cat = Catalog::builtin();
        let d = cat.differential(Variant::Simon32_64, 2).unwrap();
        let r = KeyRelabel::new(&p, d).unwrap();
        assert_eq!(r.width(), 64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let key = rng.gen::<u64>() as u128;
            let ks = key_schedule(&p, key).unwrap();
            let c = r.coords(&ks);
            let k1 = d.k1_from_round_keys(&ks);
            for (i, &b) in k1.iter().enumerate() {
                assert_eq!(c >> i & 1, b as u128);
            }
            assert_eq!(r.master_key(c).unwrap(), key);
        }
    }

    #[test]
    fn small_toy_recovers_key() {
        let cfg = ToyConfig {
            unknown_bits: 6,
            index_bits: 8,
            phase2_bits: 4,
            ..ToyConfig::default()
        };
        let r = run_toy(&cfg).unwrap();
        assert!(r.phase1.oracle_agrees && r.phase1.registers_restored);
        assert!((r.phase1.success - r.phase1.success_formula).abs() < 1e-9);
        assert!(r.phase1.planted_found);
        assert!(r.recovered(), "{r:?}");
    }
}
