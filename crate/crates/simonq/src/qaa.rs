//! Amplitude amplification: iteration counts, two-dimensional and per-element
//! simulation, and the iterator circuits of the three searches.

use serde::Serialize;
use std::f64::consts::PI;

use crate::circuit::{Circuit, ConstRole, Gate, Qubit, Register};
use crate::circuits::{append_encryption, append_equality, build_h_circuit, HLayout, WordPair};
use crate::diff::HPlan;
use crate::error::{Error, Result};
use crate::simon::{Block, SimonParams};

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

/// floor(pi / (4 asin sqrt p)).
pub fn iteration_count(p: f64) -> Result<u64> {
    check_p(p)?;
    Ok((PI / (4.0 * p.sqrt().asin())).floor() as u64)
}

/// Iteration count for p = 2^-k, exact for large k where p underflows the
/// asin argument's precision.
pub fn iteration_count_log2(log2_p: f64) -> Result<f64> {
    if log2_p > 0.0 {
        return Err(Error::ProbabilityOutOfRange(log2_p.exp2()));
    }
    if log2_p > -60.0 {
        return iteration_count(log2_p.exp2()).map(|m| m as f64);
    }
    Ok((PI / 4.0 * (-log2_p / 2.0).exp2()).floor())
}

/// Success probability after m iterations: sin^2((2m+1) asin sqrt p).
pub fn success_probability(p: f64, m: u64) -> f64 {
    let th = p.sqrt().asin();
    ((2 * m + 1) as f64 * th).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QaaPlan {
    pub search_bits: f64,
    pub solutions: f64,
    pub p: f64,
    pub iterations: u64,
}

impl QaaPlan {
    pub fn from_probability(search_bits: f64, p: f64) -> Result<Self> {
        Ok(QaaPlan {
            search_bits,
            solutions: p * search_bits.exp2(),
            p,
            iterations: iteration_count(p)?,
        })
    }

    pub fn from_counts(search_bits: f64, solutions: f64) -> Result<Self> {
        QaaPlan::from_probability(search_bits, solutions / search_bits.exp2())
    }
}

/// Real amplitudes on the good and bad aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubspaceState {
    pub good: f64,
    pub bad: f64,
}

impl SubspaceState {
    pub fn initial(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(SubspaceState {
            good: p.sqrt(),
            bad: (1.0 - p).sqrt(),
        })
    }

    /// One iteration: phase flip on good, reflection about the initial
    /// state. The global sign of the iterator is dropped.
    pub fn step(&mut self, p: f64) {
        let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
        let g = -self.good;
        let overlap = a * g + b * self.bad;
        self.good = 2.0 * overlap * a - g;
        self.bad = 2.0 * overlap * b - self.bad;
    }

    pub fn norm(&self) -> f64 {
        self.good * self.good + self.bad * self.bad
    }
}

pub const MAX_TABLE_BITS: u32 = 24;

#[derive(Debug, Clone, Serialize)]
pub struct QaaOutcome {
    pub p: f64,
    pub iterations: u64,
    pub success: f64,
    /// Probability per element; empty in aggregate mode.
    pub distribution: Vec<f64>,
}

/// Two-dimensional evolution for a marked set given as a table.
pub fn simulate_qaa_subspace(marked: &[bool], iterations: Option<u64>) -> Result<QaaOutcome> {
    let n = marked.len();
    if n == 0 || n > 1 << MAX_TABLE_BITS {
        return Err(Error::TooWide(n, 1 << MAX_TABLE_BITS));
    }
    let m = marked.iter().filter(|&&x| x).count();
    let p = m as f64 / n as f64;
    let out = simulate_qaa_aggregate(p, iterations)?;
    let per_good = if m > 0 { out.success / m as f64 } else { 0.0 };
    let per_bad = if m < n {
        (1.0 - out.success) / (n - m) as f64
    } else {
        0.0
    };
    Ok(QaaOutcome {
        distribution: marked
            .iter()
            .map(|&g| if g { per_good } else { per_bad })
            .collect(),
        ..out
    })
}

/// Aggregate mode: only p is needed.
pub fn simulate_qaa_aggregate(p: f64, iterations: Option<u64>) -> Result<QaaOutcome> {
    let m = match iterations {
        Some(m) => m,
        None => iteration_count(p)?,
    };
    let mut s = SubspaceState::initial(p)?;
    for _ in 0..m {
        s.step(p);
    }
    Ok(QaaOutcome {
        p,
        iterations: m,
        success: s.good * s.good,
        distribution: Vec::new(),
    })
}

/// Element-wise amplitude amplification from an arbitrary real initial
/// state: flip the marked signs, then reflect about the initial state.
pub fn simulate_qaa_table(initial: &[f64], marked: &[bool], iterations: u64) -> Result<Vec<f64>> {
    if initial.len() != marked.len() {
        return Err(Error::WidthMismatch {
            expected: initial.len(),
            got: marked.len(),
        });
    }
    if initial.len() > 1 << MAX_TABLE_BITS {
        return Err(Error::TooWide(initial.len(), 1 << MAX_TABLE_BITS));
    }
    let mut v = initial.to_vec();
    for _ in 0..iterations {
        for (x, &g) in v.iter_mut().zip(marked) {
            if g {
                *x = -*x;
            }
        }
        let overlap: f64 = v
            .chunks(1024)
            .zip(initial.chunks(1024))
            .map(|(x, a)| x.iter().zip(a).map(|(x, a)| x * a).sum::<f64>())
            .sum();
        for (x, a) in v.iter_mut().zip(initial) {
            *x = 2.0 * overlap * a - *x;
        }
    }
    Ok(v.iter().map(|x| x * x).collect())
}

/// Total probability on the marked elements.
pub fn marked_mass(probs: &[f64], marked: &[bool]) -> f64 {
    probs
        .chunks(1024)
        .zip(marked.chunks(1024))
        .map(|(p, m)| {
            p.iter()
                .zip(m)
                .filter(|(_, &g)| g)
                .map(|(x, _)| x)
                .sum::<f64>()
        })
        .sum()
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

/// Expected number of distinct outcomes in `r` uniform draws from `n`.
pub fn expected_distinct(n: f64, r: f64) -> f64 {
    n * -(r * (-1.0 / n).ln_1p()).exp_m1()
}

/// Same in log2 terms.
pub fn expected_distinct_log2(n_log2: f64, r_log2: f64) -> f64 {
    expected_distinct(n_log2.exp2(), r_log2.exp2()).log2()
}

/// Diffusion about H on `h_qubits` combined with prep markers: A^-1, the
/// NOT-conjugated MCX over `reflect`, then A.
fn append_diffusion(
    c: &mut Circuit,
    h_qubits: &[Qubit],
    preps: &[(&str, Vec<Qubit>)],
    reflect: &[Qubit],
    flag: Qubit,
) -> Result<()> {
    for (label, qs) in preps.iter().rev() {
        c.push(Gate::Prep {
            label: format!("{label}^-1"),
            qubits: qs.clone(),
        })?;
    }
    for &q in h_qubits {
        c.push(Gate::H(q))?;
    }
    c.barrier_all()?;
    append_equality(c, 0, reflect, flag)?;
    c.barrier_all()?;
    for &q in h_qubits {
        c.push(Gate::H(q))?;
    }
    for (label, qs) in preps {
        c.push(Gate::Prep {
            label: label.to_string(),
            qubits: qs.clone(),
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct QmksLayout {
    pub params: SimonParams,
    pub rounds: usize,
    pub key: Register,
    pub states: Vec<WordPair>,
    pub flag: Qubit,
    /// Gates [0, oracle_len) form the oracle.
    pub oracle_len: usize,
}

/// Master-key search iterator: one encryption per known pair on a shared
/// key register, comparison with the ciphertexts, uncompute, then the
/// diffusion over the key.
pub fn build_qmks_iterator(
    p: &SimonParams,
    rounds: usize,
    pairs: &[(Block, Block)],
) -> Result<(Circuit, QmksLayout)> {
    if pairs.is_empty() {
        return Err(Error::InvalidParams("need at least one pair".into()));
    }
    let n = p.word_bits as usize;
    let mut c = Circuit::new(0);
    let key = c.add_register("k", p.key_bits() as usize)?;
    let mut states = Vec::new();
    for j in 0..pairs.len() {
        states.push(WordPair {
            left: c.add_register(&format!("l{j}"), n)?,
            right: c.add_register(&format!("r{j}"), n)?,
        });
    }
    let compare = pairs.len() * 2 * n;
    let anc = compare.max(p.key_bits() as usize) - 2;
    c.add_ancillas("anc", anc)?;
    let flag = c.add_register("flag", 1)?.qubit(0);

    let mut body = c.clone();
    let out = append_encryption(&mut body, p, rounds, &key, &states)?;
    let enc = body.gates().to_vec();
    let mut bits = Vec::new();
    let mut pattern = Vec::new();
    for (s, (_, ct)) in out.iter().zip(pairs) {
        bits.extend(s.left.qubits());
        bits.extend(s.right.qubits());
        pattern.push(ct.left);
        pattern.push(ct.right);
    }
    c.extend(enc.iter().cloned())?;
    c.barrier_all()?;
    append_word_equality(&mut c, &bits, &pattern, n, flag)?;
    c.barrier_all()?;
    c.extend(enc.iter().rev().map(Gate::inverse))?;
    c.barrier_all()?;
    let oracle_len = c.len();
    append_diffusion(&mut c, &key.qubits(), &[], &key.qubits(), flag)?;
    Ok((
        c,
        QmksLayout {
            params: *p,
            rounds,
            key,
            states,
            flag,
            oracle_len,
        },
    ))
}

/// Equality against a list of n-bit words laid out back to back.
fn append_word_equality(
    c: &mut Circuit,
    bits: &[Qubit],
    words: &[u64],
    n: usize,
    flag: Qubit,
) -> Result<()> {
    let xor = |c: &mut Circuit| -> Result<()> {
        for (w, chunk) in words.iter().zip(bits.chunks(n)) {
            let v = !w & low_mask(n);
            if v != 0 {
                c.push(Gate::XorConst {
                    role: ConstRole::Pattern,
                    value: v,
                    qubits: chunk.to_vec(),
                })?;
            }
        }
        Ok(())
    };
    xor(c)?;
    c.barrier_all()?;
    c.mcx(bits.to_vec(), flag)?;
    c.barrier_all()?;
    xor(c)
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// Which state the phase-1 diffusion reflects about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Reflection {
    /// About A = C2 (C1 x H on the key bits): H on the key bits only.
    #[default]
    Initial,
    /// About the uniform state on key and index bits.
    Uniform,
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase1Layout {
    pub h: HLayout,
    pub index: Register,
    pub flag: Qubit,
    pub oracle_len: usize,
}

/// Partial-key guessing iterator: h, comparison of the output with the
/// differential output, h inverse, then the diffusion over key and index.
pub fn build_phase1_iterator(
    plan: &HPlan,
    reflection: Reflection,
) -> Result<(Circuit, Phase1Layout)> {
    let n = plan.params.word_bits as usize;
    let (hc, hl) = build_h_circuit(plan)?;
    let mut c = Circuit::new(0);
    let mut map = Vec::with_capacity(hc.width());
    for r in hc.registers() {
        let reg = c.add_register(&r.name, r.len)?;
        map.extend(reg.qubits());
    }
    let index = c.add_register("idx", 2 * n)?;
    let reflect_width = hl.k1.len + index.len;
    c.add_ancillas("anc", reflect_width.max(2 * n) - 2)?;
    let flag = c.add_register("flag", 1)?.qubit(0);
    let h = HLayout {
        ct_a: remap_pair(&hl.ct_a, &map),
        ct_b: remap_pair(&hl.ct_b, &map),
        k1: remap(&hl.k1, &map),
        out: remap_pair(&hl.out, &map),
    };

    c.compose(&hc, &map)?;
    c.barrier_all()?;
    let out_bits = h.out.qubits();
    let target = plan.delta_out;
    append_word_equality(&mut c, &out_bits, &[target.left, target.right], n, flag)?;
    c.barrier_all()?;
    c.compose(&hc.inverse(), &map)?;
    c.barrier_all()?;
    let oracle_len = c.len();

    let mut ct = h.ct_a.qubits();
    ct.extend(h.ct_b.qubits());
    ct.extend(index.qubits());
    let preps = [("C1", index.qubits()), ("C2", ct)];
    let mut reflect = h.k1.qubits();
    reflect.extend(index.qubits());
    let h_qubits = match reflection {
        Reflection::Initial => h.k1.qubits(),
        Reflection::Uniform => reflect.clone(),
    };
    let preps: &[(&str, Vec<Qubit>)] = match reflection {
        Reflection::Initial => &preps,
        Reflection::Uniform => &preps[1..],
    };
    append_diffusion(&mut c, &h_qubits, preps, &reflect, flag)?;
    Ok((
        c,
        Phase1Layout {
            h,
            index,
            flag,
            oracle_len,
        },
    ))
}

fn remap(r: &Register, map: &[Qubit]) -> Register {
    Register {
        name: r.name.clone(),
        start: map[r.start],
        len: r.len,
    }
}

fn remap_pair(p: &WordPair, map: &[Qubit]) -> WordPair {
    WordPair {
        left: remap(&p.left, map),
        right: remap(&p.right, map),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase2Layout {
    pub key: Register,
    pub states: Vec<WordPair>,
    pub flag: Qubit,
    /// Key qubits put in uniform superposition by the diffusion.
    pub free_key_bits: usize,
    pub oracle_len: usize,
}

/// Remaining-key search iterator: encryption of the known plaintexts under
/// the candidate key, comparison, uncompute, diffusion over the key. The
/// key register holds the master key; candidate preparation is a marker
/// and `free_key_bits` qubits are put in superposition with H.
pub fn build_phase2_iterator(
    p: &SimonParams,
    rounds: usize,
    pairs: &[(Block, Block)],
    free_key_bits: usize,
) -> Result<(Circuit, Phase2Layout)> {
    if free_key_bits > p.key_bits() as usize {
        return Err(Error::WidthMismatch {
            expected: p.key_bits() as usize,
            got: free_key_bits,
        });
    }
    let (mut c, lay) = build_qmks_iterator(p, rounds, pairs)?;
    c = c.with_gates(c.gates()[..lay.oracle_len].to_vec())?;
    let key = lay.key.qubits();
    let fixed: Vec<Qubit> = key[free_key_bits..].to_vec();
    append_diffusion(
        &mut c,
        &key[..free_key_bits],
        &[("C", fixed)],
        &key,
        lay.flag,
    )?;
    Ok((
        c,
        Phase2Layout {
            key: lay.key,
            states: lay.states,
            flag: lay.flag,
            free_key_bits,
            oracle_len: lay.oracle_len,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(1.0).unwrap(), 0);
        assert_eq!(iteration_count((-14f64).exp2()).unwrap(), 100);
        assert_eq!(iteration_count(1.0 / 1024.0).unwrap(), 25);
        assert!(iteration_count(0.0).is_err());
        assert!(iteration_count(1.5).is_err());
        let m = iteration_count_log2(-64.0).unwrap();
        assert_eq!(m, (PI / 4.0 * 2f64.powi(32)).floor());
    }

    #[test]
    fn zero_iterations_give_p() {
        let o = simulate_qaa_aggregate(0.1, Some(0)).unwrap();
        assert!((o.success - 0.1).abs() < 1e-15);
    }

    #[test]
    fn table_matches_closed_form() {
        let n = 1 << 12;
        let marked: Vec<bool> = (0..n).map(|i| i % 397 == 5).collect();
        let m = marked.iter().filter(|&&x| x).count();
        let p = m as f64 / n as f64;
        let it = iteration_count(p).unwrap();
        let probs = simulate_qaa_table(&uniform(n), &marked, it).unwrap();
        let good: f64 = probs
            .iter()
            .zip(&marked)
            .filter(|(_, &g)| g)
            .map(|(x, _)| x)
            .sum();
        assert!((good - success_probability(p, it)).abs() < 1e-9);
        let sub = simulate_qaa_subspace(&marked, None).unwrap();
        for (a, b) in probs.iter().zip(&sub.distribution) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn distinct_counts() {
        assert!((expected_distinct(1e6, 1.0) - 1.0).abs() < 1e-9);
        let d = expected_distinct_log2(23.5, 23.5);
        assert!((d - 22.8).abs() < 0.05, "{d}");
        let d = expected_distinct_log2(24.5, 24.5);
        assert!((d - 23.8).abs() < 0.05, "{d}");
    }
}
