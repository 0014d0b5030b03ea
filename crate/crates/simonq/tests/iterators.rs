use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simonq::decompose::{summarize_resources, LoweringScheme, McxAccounting, ToffoliScheme};
use simonq::diff::{Catalog, HPlan};
use simonq::qaa::{build_phase1_iterator, build_phase2_iterator, build_qmks_iterator, Reflection};
use simonq::sim::{simulate_basis, BasisState};
use simonq::simon::{encrypt, key_schedule, Block, Variant};

fn known_pairs(v: Variant, rounds: usize, key: u128, n: usize, seed: u64) -> Vec<(Block, Block)> {
    let p = v.params();
    let ks = key_schedule(&p, key).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m = Block::from_u128(&p, rng.gen::<u128>() & ((1u128 << p.block_bits()) - 1));
            (m, encrypt(&p, &ks, m, rounds).unwrap())
        })
        .collect()
}

#[test]
fn qmks_iterator_inventory() {
    let p = Variant::Simon32_64.params();
    let pairs = known_pairs(Variant::Simon32_64, 19, 0x1918_1110_0908_0100, 3, 1);
    let (c, _) = build_qmks_iterator(&p, 19, &pairs).unwrap();
    let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
    assert_eq!((r.not, r.cnot, r.toff_s, r.h), (480, 5568, 2141, 128));
    assert_eq!(
        (r.cliff, r.t, r.t_depth, r.full_depth),
        (27586, 14987, 1293, 4434)
    );
    assert_eq!(r.qubits, 255);
    assert_eq!(r.t_depth, 3 * r.toffoli_depth);

    let (c, _) = build_qmks_iterator(&p, 32, &pairs).unwrap();
    let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
    assert_eq!((r.not, r.cnot), (896, 9728));
}

#[test]
fn qmks_oracle_marks_exactly_the_key() {
    let v = Variant::Simon32_64;
    let p = v.params();
    let key: u128 = 0x1918_1110_0908_0100;
    let pairs = known_pairs(v, 8, key, 3, 2);
    let (c, lay) = build_qmks_iterator(&p, 8, &pairs).unwrap();
    let oracle = c.with_gates(c.gates()[..lay.oracle_len].to_vec()).unwrap();
    // Exhaust the low 10 key bits with the rest planted.
    for guess in 0..1u128 << 10 {
        let k = key & !0x3ff | guess;
        let mut s = BasisState::zeros(oracle.width());
        s.set_register(&lay.key, k);
        for (st, (m, _)) in lay.states.iter().zip(&pairs) {
            s.set_register(&st.left, m.left as u128);
            s.set_register(&st.right, m.right as u128);
        }
        let before = s.clone();
        simulate_basis(&oracle, &mut s).unwrap();
        let ks = key_schedule(&p, k).unwrap();
        let ok = pairs
            .iter()
            .all(|(m, ct)| encrypt(&p, &ks, *m, 8).unwrap() == *ct);
        assert_eq!(s.get(lay.flag), ok, "{k:x}");
        s.flip(lay.flag);
        if !ok {
            s.flip(lay.flag);
        }
        let mut want = before;
        want.set(lay.flag, false);
        s.set(lay.flag, false);
        assert_eq!(s, want);
    }
}

#[test]
fn phase1_iterator_inventory() {
    let plan = HPlan::derive(
        Catalog::builtin()
            .differential(Variant::Simon32_64, 2)
            .unwrap(),
        Catalog::builtin().attack(Variant::Simon32_64).unwrap(),
    )
    .unwrap();
    let (c, _) = build_phase1_iterator(&plan, Reflection::Initial).unwrap();
    let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
    assert_eq!((r.not, r.h, r.qubits), (0, 50, 209));
    // Two h instances, 32-fold comparator, 57-fold reflection.
    assert_eq!(r.toff_s, 2 * 68 + 61 + 111 + 3);
    let (c, _) = build_phase1_iterator(&plan, Reflection::Uniform).unwrap();
    let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
    assert_eq!(r.h, 114);
}

#[test]
fn phase1_oracle_matches_classical_check() {
    let cat = Catalog::builtin();
    let plan = HPlan::derive(
        cat.differential(Variant::Simon32_64, 2).unwrap(),
        cat.attack(Variant::Simon32_64).unwrap(),
    )
    .unwrap();
    let (c, lay) = build_phase1_iterator(&plan, Reflection::Initial).unwrap();
    let oracle = c.with_gates(c.gates()[..lay.oracle_len].to_vec()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut hits = 0;
    for t in 0..3000 {
        let keys: Vec<u64> = (0..19).map(|_| rng.gen::<u64>() & 0xffff).collect();
        let (a, b) = if t % 3 == 0 {
            plan.sample_tail_pair(&mut rng, &keys)
        } else {
            plan.sample_filtered_pair(&mut rng)
        };
        let k1: Vec<u8> = (0..plan.key_bits()).map(|_| rng.gen_range(0..2)).collect();
        let k1_word = k1
            .iter()
            .enumerate()
            .fold(0u128, |v, (i, &b)| v | (b as u128) << i);
        let mut s = BasisState::zeros(oracle.width());
        for (w, reg) in [
            (a.left, &lay.h.ct_a.left),
            (a.right, &lay.h.ct_a.right),
            (b.left, &lay.h.ct_b.left),
            (b.right, &lay.h.ct_b.right),
        ] {
            s.set_register(reg, w as u128);
        }
        s.set_register(&lay.h.k1, k1_word);
        simulate_basis(&oracle, &mut s).unwrap();
        let want = plan.h(a, b, &k1) == plan.delta_out;
        hits += want as u32;
        assert_eq!(s.get(lay.flag), want);
        assert_eq!(
            s.register(&lay.h.out.left) | s.register(&lay.h.out.right),
            0
        );
    }
    assert!(hits > 0);
}

#[test]
fn phase2_iterator_inventory() {
    let v = Variant::Simon32_64;
    let p = v.params();
    let pairs = known_pairs(v, 19, 0x1918_1110_0908_0100, 2, 4);
    let (c, _) = build_phase2_iterator(&p, 19, &pairs, 25).unwrap();
    let scheme = LoweringScheme {
        mcx: McxAccounting::Strict,
        ..LoweringScheme::paper()
    };
    let r = summarize_resources(&c, scheme).unwrap();
    assert_eq!(r.toff_s, 4 * 304 + 125 + 125);
    assert_eq!((r.not, r.h, r.qubits), (480, 50, 191));
    assert_eq!(r.t_depth, 1092);
    assert_eq!(r.t_depth, 3 * r.toffoli_depth);
    // One expansion per pass over the key register, two passes.
    assert_eq!(r.cnot, 2 * 960 + 4 * 19 * 32);
    assert_eq!(r.full_depth, 2 * 33 * 19 + 2500 + 2);
    let r = summarize_resources(&c, LoweringScheme::strict(ToffoliScheme::Amy3)).unwrap();
    assert_eq!(r.toff_s, 1466);
}
