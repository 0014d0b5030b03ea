//! Reversible SIMON circuits: in-place encryption with interleaved key
//! expansion, standalone key expansion, the backward difference circuit `h`
//! and equality oracles.

use serde::Serialize;

use crate::circuit::{Circuit, ConstRole, Gate, Qubit, Register};
use crate::diff::{AndTerm, HPlan};
use crate::error::{Error, Result};
use crate::simon::SimonParams;

/// A (left, right) word pair of registers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordPair {
    pub left: Register,
    pub right: Register,
}

impl WordPair {
    pub fn qubits(&self) -> Vec<Qubit> {
        let mut v = self.left.qubits();
        v.extend(self.right.qubits());
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimonCircuitLayout {
    pub params: SimonParams,
    pub rounds: usize,
    /// Master key words, word j on qubits j*n..(j+1)*n.
    pub key: Register,
    /// Plaintext registers per instance.
    pub input: Vec<WordPair>,
    /// Where each instance's ciphertext ends up.
    pub output: Vec<WordPair>,
}

fn check_rounds(p: &SimonParams, rounds: usize) -> Result<()> {
    p.validate()?;
    if rounds > p.rounds as usize {
        return Err(Error::RoundsOutOfRange(rounds, p.rounds));
    }
    Ok(())
}

/// Qubit of bit `b` of the key slot holding round key `i`.
fn key_bit(p: &SimonParams, key: &Register, i: usize, b: usize) -> Qubit {
    let n = p.word_bits as usize;
    let m = p.key_words as usize;
    key.qubit((i % m) * n + b % n)
}

/// Overwrites the slot of round key i-m with round key i.
pub fn key_expansion_step(
    c: &mut Circuit,
    p: &SimonParams,
    key: &Register,
    i: usize,
) -> Result<()> {
    let n = p.word_bits as usize;
    let m = p.key_words as usize;
    let t = |b| key_bit(p, key, i, b);
    for shift in [3, 4] {
        for b in 0..n {
            c.cnot(key_bit(p, key, i - 1, b + shift), t(b))?;
        }
    }
    if m == 4 {
        for shift in [0, 1] {
            for b in 0..n {
                c.cnot(key_bit(p, key, i - 3, b + shift), t(b))?;
            }
        }
    }
    c.push(Gate::XorConst {
        role: ConstRole::RoundConstant,
        value: p.round_constant(i),
        qubits: (0..n).map(t).collect(),
    })
}

/// Key expansion producing round keys up to `rounds - 1`.
pub fn build_key_expansion(p: &SimonParams, rounds: usize) -> Result<(Circuit, Register)> {
    check_rounds(p, rounds)?;
    let mut c = Circuit::new(0);
    let key = c.add_register("k", p.key_bits() as usize)?;
    for i in p.key_words as usize..rounds {
        key_expansion_step(&mut c, p, &key, i)?;
    }
    Ok((c, key))
}

/// One in-place round on each state pair; each pair swaps roles afterwards.
fn round(
    c: &mut Circuit,
    p: &SimonParams,
    key: &Register,
    r: usize,
    states: &mut [WordPair],
) -> Result<()> {
    let n = p.word_bits as usize;
    let at = |reg: &Register, i: isize| reg.qubit(i.rem_euclid(n as isize) as usize);
    for s in states.iter() {
        for i in 0..n as isize {
            c.toffoli(at(&s.left, i - 1), at(&s.left, i - 8), at(&s.right, i))?;
        }
    }
    // Keeps the Toffoli stage aligned when the round is run backwards.
    c.barrier(states.iter().flat_map(WordPair::qubits).collect())?;
    for s in states.iter() {
        for i in 0..n as isize {
            c.cnot(at(&s.left, i - 2), at(&s.right, i))?;
        }
    }
    for s in states.iter() {
        for i in 0..n {
            c.cnot(key_bit(p, key, r, i), s.right.qubit(i))?;
        }
    }
    for s in states.iter_mut() {
        std::mem::swap(&mut s.left, &mut s.right);
    }
    Ok(())
}

/// Appends `rounds` rounds on the given state pairs sharing one key register
/// that initially holds the master key. Round-key slots are overwritten as
/// the expansion proceeds; a barrier closes every round.
pub fn append_encryption(
    c: &mut Circuit,
    p: &SimonParams,
    rounds: usize,
    key: &Register,
    states: &[WordPair],
) -> Result<Vec<WordPair>> {
    check_rounds(p, rounds)?;
    let m = p.key_words as usize;
    let mut cur = states.to_vec();
    let mut fence = key.qubits();
    for s in states {
        fence.extend(s.qubits());
    }
    for r in 0..rounds {
        let i = r + m - 1;
        if r >= 1 && i < rounds {
            key_expansion_step(c, p, key, i)?;
        }
        round(c, p, key, r, &mut cur)?;
        c.barrier(fence.clone())?;
    }
    Ok(cur)
}

/// Encryption of `instances` plaintexts under one shared key.
pub fn build_encryption_instances(
    p: &SimonParams,
    rounds: usize,
    instances: usize,
) -> Result<(Circuit, SimonCircuitLayout)> {
    check_rounds(p, rounds)?;
    let n = p.word_bits as usize;
    let mut c = Circuit::new(0);
    let key = c.add_register("k", p.key_bits() as usize)?;
    let mut input = Vec::new();
    for j in 0..instances {
        input.push(WordPair {
            left: c.add_register(&format!("l{j}"), n)?,
            right: c.add_register(&format!("r{j}"), n)?,
        });
    }
    let output = append_encryption(&mut c, p, rounds, &key, &input)?;
    Ok((
        c,
        SimonCircuitLayout {
            params: *p,
            rounds,
            key,
            input,
            output,
        },
    ))
}

pub fn build_encryption_circuit(
    p: &SimonParams,
    rounds: usize,
) -> Result<(Circuit, SimonCircuitLayout)> {
    build_encryption_instances(p, rounds, 1)
}

/// Flips `target` iff the qubits hold `pattern` (bit i on qubits[i]).
pub fn append_equality(
    c: &mut Circuit,
    pattern: u128,
    qubits: &[Qubit],
    target: Qubit,
) -> Result<()> {
    let flip = |c: &mut Circuit, lo: usize| -> Result<()> {
        let chunk: Vec<Qubit> = qubits.iter().skip(lo).take(64).copied().collect();
        let v = !((pattern >> lo) as u64) & low_mask(chunk.len());
        if v != 0 {
            c.push(Gate::XorConst {
                role: ConstRole::Pattern,
                value: v,
                qubits: chunk,
            })?;
        }
        Ok(())
    };
    for lo in (0..qubits.len()).step_by(64) {
        flip(c, lo)?;
    }
    // Pattern NOTs on some controls would otherwise stagger the ladder's T layers.
    c.barrier_all()?;
    c.mcx(qubits.to_vec(), target)?;
    c.barrier_all()?;
    for lo in (0..qubits.len()).step_by(64) {
        flip(c, lo)?;
    }
    Ok(())
}

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1 << len) - 1
    }
}

/// Standalone equality oracle on `width` qubits plus one target qubit.
pub fn build_equality_oracle(pattern: u128, width: usize) -> Result<Circuit> {
    if width < 128 && pattern >> width != 0 {
        return Err(Error::WidthMismatch {
            expected: width,
            got: 128 - pattern.leading_zeros() as usize,
        });
    }
    let mut c = Circuit::new(0);
    let x = c.add_register("x", width)?;
    let t = c.add_register("t", 1)?;
    c.add_ancillas("anc", width.saturating_sub(2))?;
    append_equality(&mut c, pattern, &x.qubits(), t.qubit(0))?;
    Ok(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct HLayout {
    pub ct_a: WordPair,
    pub ct_b: WordPair,
    /// Guessed key bits in catalog order.
    pub k1: Register,
    /// Output: left word gets the left difference, right word the right.
    pub out: WordPair,
}

impl HLayout {
    pub fn inputs(&self) -> Vec<Qubit> {
        let mut v = self.ct_a.qubits();
        v.extend(self.ct_b.qubits());
        v.extend(self.k1.qubits());
        v
    }
}

/// In-place circuit for the backward difference of `plan`. The ciphertext
/// registers are left scrambled and must be restored by the inverse.
pub fn build_h_circuit(plan: &HPlan) -> Result<(Circuit, HLayout)> {
    let n = plan.params.word_bits as usize;
    let mut c = Circuit::new(0);
    let pair = |c: &mut Circuit, name: &str| -> Result<WordPair> {
        Ok(WordPair {
            left: c.add_register(&format!("{name}l"), n)?,
            right: c.add_register(&format!("{name}r"), n)?,
        })
    };
    let ct_a = pair(&mut c, "ca")?;
    let ct_b = pair(&mut c, "cb")?;
    let k1 = c.add_register("k1", plan.key_bits())?;
    let out = pair(&mut c, "o")?;
    let w = |i: isize| i.rem_euclid(n as isize) as usize;
    let (ol, or) = (&out.left, &out.right);
    let sides = [&ct_a, &ct_b];

    // Undo the last round: left words become L17.
    for s in sides {
        for i in 0..n as isize {
            c.toffoli(
                s.right.qubit(w(i - 1)),
                s.right.qubit(w(i - 8)),
                s.left.qubit(w(i)),
            )?;
        }
    }
    for s in sides {
        for i in 0..n as isize {
            c.cnot(s.right.qubit(w(i - 2)), s.left.qubit(w(i)))?;
        }
    }
    for s in sides {
        for i in 0..n {
            c.cnot(k1.qubit(plan.k18_pos[i]), s.left.qubit(i))?;
        }
    }

    // R17 values and R17^K16 combinations, in place of L18 bits.
    let mut slots: Vec<(usize, usize)> = plan
        .values17
        .iter()
        .enumerate()
        .map(|(j, &i)| (i, plan.k17_pos[j]))
        .collect();
    for (j, &q) in plan.combos.iter().enumerate() {
        slots.push((w(q as isize - 2), plan.combo_pos[j]));
    }
    for s in sides {
        for &(i, _) in &slots {
            let i = i as isize;
            c.toffoli(
                s.left.qubit(w(i - 1)),
                s.left.qubit(w(i - 8)),
                s.right.qubit(w(i)),
            )?;
        }
    }
    for s in sides {
        for &(i, _) in &slots {
            c.cnot(s.left.qubit(w(i as isize - 2)), s.right.qubit(i))?;
        }
    }
    for s in sides {
        for &(i, kpos) in &slots {
            c.cnot(k1.qubit(kpos), s.right.qubit(i))?;
        }
    }

    // ΔR17 into the right output word.
    for s in sides {
        for i in 0..n {
            c.cnot(s.right.qubit(i), or.qubit(i))?;
        }
    }
    let plain: Vec<usize> = (0..n)
        .filter(|i| !slots.iter().any(|s| s.0 == *i))
        .collect();
    for s in sides {
        for &i in &plain {
            c.cnot(s.left.qubit(w(i as isize - 2)), or.qubit(i))?;
        }
    }
    for s in sides {
        for &i in plain.iter().filter(|i| plan.and17.contains(i)) {
            let i = i as isize;
            c.toffoli(
                s.left.qubit(w(i - 1)),
                s.left.qubit(w(i - 8)),
                or.qubit(w(i)),
            )?;
        }
    }

    // ΔR16 into the left output word.
    for s in sides {
        for i in 0..n {
            c.cnot(s.left.qubit(i), ol.qubit(i))?;
        }
    }
    for i in 0..n as isize {
        c.cnot(or.qubit(w(i - 2)), ol.qubit(w(i)))?;
    }
    for t in &plan.and16 {
        match *t {
            AndTerm::Single {
                bit,
                nonzero,
                value,
            } => c.toffoli(or.qubit(nonzero), ct_a.right.qubit(value), ol.qubit(bit))?,
            AndTerm::Both { bit, p, q } => {
                for s in sides {
                    c.toffoli(s.right.qubit(p), s.right.qubit(q), ol.qubit(bit))?;
                }
            }
        }
    }

    // ΔR15: the right output word picks up ΔR16 rotated and the last ANDs.
    for i in 0..n as isize {
        c.cnot(ol.qubit(w(i - 2)), or.qubit(w(i)))?;
    }
    for t in &plan.and15 {
        if let AndTerm::Single { value, .. } = *t {
            let v = value as isize;
            let a = &ct_a;
            c.toffoli(
                a.right.qubit(w(v - 1)),
                a.right.qubit(w(v - 8)),
                a.left.qubit(value),
            )?;
        }
    }
    for t in &plan.and15 {
        if let AndTerm::Single { value, .. } = *t {
            c.cnot(
                ct_a.right.qubit(w(value as isize - 2)),
                ct_a.left.qubit(value),
            )?;
        }
    }
    for t in &plan.and15 {
        if let AndTerm::Single {
            bit,
            nonzero,
            value,
        } = *t
        {
            c.toffoli(ol.qubit(nonzero), ct_a.left.qubit(value), or.qubit(bit))?;
        }
    }
    Ok((
        c,
        HLayout {
            ct_a,
            ct_b,
            k1,
            out,
        },
    ))
}

/// The h circuit for SIMON32/64 differential D2.
pub fn build_h_circuit_d2() -> Result<(Circuit, HLayout, HPlan)> {
    let cat = crate::diff::Catalog::builtin();
    let v = crate::simon::Variant::Simon32_64;
    let plan = HPlan::derive(cat.differential(v, 2)?, cat.attack(v)?)?;
    let (c, l) = build_h_circuit(&plan)?;
    Ok((c, l, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{summarize_resources, LoweringScheme};
    use crate::sim::{simulate_basis, BasisState};
    use crate::simon::{encrypt, key_schedule, Block, Variant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_word(rng: &mut impl Rng, p: &SimonParams) -> u64 {
        rng.gen::<u64>() & p.mask()
    }

    fn rand_key(rng: &mut impl Rng, p: &SimonParams) -> u128 {
        let k: u128 = rng.gen();
        if p.key_bits() == 128 {
            k
        } else {
            k & ((1u128 << p.key_bits()) - 1)
        }
    }

    #[test]
    fn table4_rows_simon32() {
        let p = Variant::Simon32_64.params();
        let (c32, _) = build_encryption_circuit(&p, 32).unwrap();
        let r = summarize_resources(&c32, LoweringScheme::paper()).unwrap();
        assert_eq!((r.not, r.cnot, r.toff_s, r.qubits), (448, 2816, 512, 96));
        assert_eq!((r.toff_c, r.toff_h, r.t), (3584, 1024, 3584));
        let (c19, _) = build_encryption_circuit(&p, 19).unwrap();
        let r = summarize_resources(&c19, LoweringScheme::paper()).unwrap();
        assert_eq!((r.not, r.cnot, r.toff_s), (240, 1568, 304));
        assert_eq!((r.t_depth, r.full_depth), (171, 608));
        assert_eq!(r.toffoli_depth, 57);
    }

    #[test]
    fn full_key_expansion_counts() {
        let p = Variant::Simon32_64.params();
        let (c, _) = build_key_expansion(&p, 32).unwrap();
        let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
        assert_eq!((r.not, r.cnot), (448, 1792));
    }

    #[test]
    fn key_expansion_matches_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for v in Variant::ALL {
            let p = v.params();
            let t = p.rounds as usize;
            let (c, key) = build_key_expansion(&p, t).unwrap();
            let m = p.key_words as usize;
            let n = p.word_bits as usize;
            for _ in 0..200 {
                let mk = rand_key(&mut rng, &p);
                let ks = key_schedule(&p, mk).unwrap();
                let mut s = BasisState::zeros(c.width());
                s.set_register(&key, mk);
                simulate_basis(&c, &mut s).unwrap();
                for i in t - m..t {
                    let slot: Vec<Qubit> = (0..n).map(|b| key.qubit((i % m) * n + b)).collect();
                    assert_eq!(s.bits(&slot) as u64, ks[i]);
                }
                simulate_basis(&c.inverse(), &mut s).unwrap();
                assert_eq!(s.register(&key), mk);
            }
        }
    }

    #[test]
    fn encryption_matches_reference_all_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in Variant::ALL {
            let p = v.params();
            let rounds = p.rounds as usize;
            let (c, lay) = build_encryption_circuit(&p, rounds).unwrap();
            for _ in 0..1000 {
                let mk = rand_key(&mut rng, &p);
                let pt = Block::new(rand_word(&mut rng, &p), rand_word(&mut rng, &p));
                let ks = key_schedule(&p, mk).unwrap();
                let want = encrypt(&p, &ks, pt, rounds).unwrap();
                let mut s = BasisState::zeros(c.width());
                s.set_register(&lay.key, mk);
                s.set_register(&lay.input[0].left, pt.left.into());
                s.set_register(&lay.input[0].right, pt.right.into());
                simulate_basis(&c, &mut s).unwrap();
                let got = Block::new(
                    s.register(&lay.output[0].left) as u64,
                    s.register(&lay.output[0].right) as u64,
                );
                assert_eq!(got, want, "{v}");
            }
        }
    }

    #[test]
    fn three_instances_run_in_parallel() {
        let p = Variant::Simon32_64.params();
        let s = LoweringScheme::paper();
        let one =
            summarize_resources(&build_encryption_instances(&p, 19, 1).unwrap().0, s).unwrap();
        let three =
            summarize_resources(&build_encryption_instances(&p, 19, 3).unwrap().0, s).unwrap();
        assert_eq!(three.toff_s, 3 * one.toff_s);
        assert_eq!(three.t_depth, one.t_depth);
        assert!(three.full_depth < 2 * one.full_depth);
        assert_eq!(three.full_depth, 34 * 19);
    }

    #[test]
    fn rounds_out_of_range() {
        let p = Variant::Simon32_64.params();
        assert!(matches!(
            build_encryption_circuit(&p, 33),
            Err(Error::RoundsOutOfRange(33, 32))
        ));
    }

    #[test]
    fn equality_oracle_patterns() {
        let c = build_equality_oracle(0, 4).unwrap();
        assert_eq!(c.gates().len(), 5);
        assert!(matches!(&c.gates()[0], Gate::XorConst { value: 0xf, .. }));
        let c = build_equality_oracle(0b1010, 4).unwrap();
        for x in 0..16u128 {
            let mut s = BasisState::zeros(c.width());
            s.set_bits(&[0, 1, 2, 3], x);
            simulate_basis(&crate::decompose::lower_mcx(&c).unwrap(), &mut s).unwrap();
            assert_eq!(s.get(4), x == 0b1010);
            assert_eq!(s.bits(&[0, 1, 2, 3]), x);
        }
        assert!(build_equality_oracle(0x10, 4).is_err());
    }

    #[test]
    fn h_circuit_matches_classical_h() {
        let (c, lay, plan) = build_h_circuit_d2().unwrap();
        let low = crate::decompose::lower_mcx(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..1000 {
            let (a, b) = if trial % 2 == 0 {
                plan.sample_filtered_pair(&mut rng)
            } else {
                let mut w = || rng.gen::<u64>() & 0xffff;
                (Block::new(w(), w()), Block::new(w(), w()))
            };
            let k1: Vec<u8> = (0..plan.key_bits()).map(|_| rng.gen::<u8>() & 1).collect();
            let want = plan.h(a, b, &k1);
            let mut s = BasisState::zeros(c.width());
            s.set_register(&lay.ct_a.left, a.left.into());
            s.set_register(&lay.ct_a.right, a.right.into());
            s.set_register(&lay.ct_b.left, b.left.into());
            s.set_register(&lay.ct_b.right, b.right.into());
            let kv = k1
                .iter()
                .enumerate()
                .fold(0u128, |v, (i, &x)| v | u128::from(x) << i);
            s.set_register(&lay.k1, kv);
            let before = s.clone();
            simulate_basis(&low, &mut s).unwrap();
            let got = Block::new(
                s.register(&lay.out.left) as u64,
                s.register(&lay.out.right) as u64,
            );
            assert_eq!(got, want);
            simulate_basis(&low.inverse(), &mut s).unwrap();
            assert_eq!(s, before);
        }
    }

    #[test]
    fn h_circuit_inventory() {
        let (c, _, _) = build_h_circuit_d2().unwrap();
        let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
        assert_eq!((r.cnot, r.toff_s, r.qubits), (212, 68, 121));
    }
}
