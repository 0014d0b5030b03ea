//! The nine acceptance checks, shared by `simonq verify` and the
//! acceptance test binary.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Qubit, Register};
use crate::circuits::{build_encryption_circuit, build_h_circuit_d2, build_key_expansion};
use crate::cost::{encryption_complexity, table_report, CostOptions, Technique};
use crate::decompose::{
    lower_circuit, lower_mcx, mcx_to_toffoli, summarize_resources, LoweringScheme, ToffoliScheme,
};
use crate::diff::{Catalog, HPlan};
use crate::error::Result;
use crate::par::count_trials;
use crate::qaa::{iteration_count, simulate_qaa_aggregate, success_probability};
use crate::sim::{distance_up_to_phase, simulate_bitsliced, unitary};
use crate::simon::{encrypt, key_schedule, Block, SimonParams, Variant};
use crate::toy::{run_toy, ToyConfig};

/// Cells known not to reproduce, with the reason. Keys are
/// `table|row|column`.
pub const DIVERGENCES: &[(&str, &[&str])] = &[
    (
        "reference value inconsistent with the other cells of its row",
        &[
            "8|all iterations|cnot",
            "8|all iterations|t",
            "10|QRKR phase 1|cnot",
            "10|QRKR phase 1|t",
            "11|64/128 r44|not",
            "11|64/128 r44|cnot",
            "11|64/128 r44|cliff",
            "11|64/128 r44|t_depth",
            "11|64/128 r44|full_depth",
            "11|64/128 r26|toff_c",
            "11|64/128 r26|cliff",
            "11|64/128 r26|t",
            "12|48/96 r36|toff_s",
            "12|64/96 r42|t_depth",
            "12|64/96 r42|full_depth",
            "12|64/128 r44|toff_h",
            "12|64/128 r44|full_depth",
            "13|phase 2 48/96 r19|toff_h",
            "13|phase 2 48/96 r19|toff_s",
            "13|phase 2 64/96 r26|toff_c",
            "13|phase 2 64/96 r26|t",
            "14|64/96 QRKR|t",
        ],
    ),
    (
        "reference counts the key expansion once per encryption instance",
        &[
            "12|48/72 r36|cnot",
            "12|48/72 r36|cliff",
            "12|48/72 r19|not",
            "12|48/72 r19|cnot",
            "12|48/72 r19|cliff",
            "12|48/96 r36|cnot",
            "12|48/96 r36|cliff",
            "12|48/96 r19|not",
            "12|48/96 r19|cnot",
            "12|48/96 r19|cliff",
            "12|64/96 r42|cnot",
            "12|64/96 r42|cliff",
            "12|64/96 r26|not",
            "12|64/96 r26|cnot",
            "12|64/96 r26|cliff",
            "12|64/128 r44|cnot",
            "12|64/128 r44|cliff",
            "12|64/128 r26|not",
            "12|64/128 r26|cnot",
            "12|64/128 r26|cliff",
            "13|phase 2 48/72 r19|not",
            "13|phase 2 48/72 r19|cnot",
            "13|phase 2 48/72 r19|cliff",
            "13|phase 2 48/96 r19|not",
            "13|phase 2 48/96 r19|cnot",
            "13|phase 2 48/96 r19|cliff",
            "13|phase 2 64/96 r26|not",
            "13|phase 2 64/96 r26|cnot",
            "13|phase 2 64/96 r26|cliff",
            "13|phase 2 64/128 r26|not",
            "13|phase 2 64/128 r26|cnot",
            "13|phase 2 64/128 r26|cliff",
            "14|48/72 QMKS|cliff",
            "14|48/72 QRKR|cliff",
            "14|48/96 QMKS|cliff",
            "14|48/96 QRKR|cliff",
            "14|64/96 QMKS|cliff",
            "14|64/96 QRKR|cliff",
            "14|64/128 QMKS|cliff",
            "14|64/128 QRKR|cliff",
        ],
    ),
    (
        "48/96 36-round Toffoli total below iterator encryption plus comparator and diffusion ladders",
        &["12|48/96 r36|toff_c", "12|48/96 r36|toff_h", "12|48/96 r36|t"],
    ),
    (
        "remaining-key search: reference expands the shared key once, applies H to all 39 combined bits, Full-depth 3718",
        &[
            "9|iteration|cnot",
            "9|iteration|h",
            "9|iteration|cliff",
            "9|iteration|full_depth",
            "9|all iterations|cnot",
            "9|all iterations|h",
            "9|all iterations|cliff",
            "10|QRKR phase 2|cnot",
            "10|QRKR phase 2|h",
        ],
    ),
    (
        "phase-2 Cliff differs between the two reference tables (1.32*2^41 vs 1.15*2^41); both printed",
        &["10|QRKR phase 2|cliff", "14|32/64 QRKR|cliff"],
    ),
    (
        "partial-key guessing qubits: reference exceeds the register layout by 2n",
        &[
            "13|phase 1 48/72 r19|qubits",
            "13|phase 1 48/96 r19|qubits",
            "13|phase 1 64/96 r26|qubits",
            "13|phase 1 64/128 r26|qubits",
            "14|48/72 QRKR|qubits",
            "14|48/96 QRKR|qubits",
            "14|64/96 QRKR|qubits",
            "14|64/128 QRKR|qubits",
        ],
    ),
    (
        "64-bit partial-key guessing depths do not follow from the per-iteration figures and run count",
        &[
            "13|phase 1 64/96 r26|t_depth",
            "13|phase 1 64/96 r26|full_depth",
            "13|phase 1 64/128 r26|t_depth",
            "13|phase 1 64/128 r26|full_depth",
            "14|64/96 QRKR|t_depth",
            "14|64/96 QRKR|full_depth",
            "14|64/128 QRKR|t_depth",
        ],
    ),
    (
        "64-bit round-key recovery complexity uses 4 tail rounds; 3 reproduces the reference",
        &["14|64/96 QRKR|ec_log2", "14|64/128 QRKR|ec_log2"],
    ),
    (
        "h circuit built here: 212 CNOT, 68 Toffoli, T-depth 57, Full-depth 117; the reference design is not specified",
        &["h|d2|cnot", "h|d2|toffoli", "h|d2|t_depth", "h|d2|full_depth"],
    ),
];

pub fn divergence_reason(key: &str) -> Option<&'static str> {
    DIVERGENCES
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(r, _)| *r)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Every failing check, as `table|row|column` for table cells.
    pub failures: Vec<String>,
    /// Failures not covered by [`DIVERGENCES`].
    pub unexpected: Vec<String>,
    pub seconds: f64,
    pub time_limit: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "criterion {}: {status} {} [{:.2}s] {}",
            self.id, self.title, self.seconds, self.detail
        );
        if !self.failures.is_empty() {
            let documented = self.failures.len() - self.unexpected.len();
            s.push_str(&format!(
                " ({} failing, {documented} documented",
                self.failures.len()
            ));
            if !self.unexpected.is_empty() {
                s.push_str(&format!(", unexpected: {}", self.unexpected.join(", ")));
            }
            s.push(')');
        }
        s
    }
}

struct Outcome {
    detail: String,
    failures: Vec<String>,
    seed: Option<u64>,
    samples: Option<u64>,
}

impl Outcome {
    fn new(detail: impl Into<String>, failures: Vec<String>) -> Self {
        Outcome {
            detail: detail.into(),
            failures,
            seed: None,
            samples: None,
        }
    }
}

pub const TITLES: [&str; 9] = [
    "classical SIMON test vectors",
    "circuit and classical agree",
    "decomposition unitarity",
    "exact table rows",
    "table rows within 5%",
    "amplitude amplification bound",
    "filter statistics",
    "toy key recovery",
    "encryption complexity",
];

const LIMITS: [Option<f64>; 9] = [
    Some(1.0),
    Some(60.0),
    None,
    None,
    Some(10.0),
    None,
    Some(120.0),
    Some(300.0),
    None,
];

pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let t0 = Instant::now();
    let out = match id {
        1 => simon_vectors()?,
        2 => circuit_equivalence()?,
        3 => decompositions()?,
        4 => exact_tables()?,
        5 => tolerance_tables()?,
        6 => qaa_bound()?,
        7 => filter_statistics()?,
        8 => toy()?,
        9 => complexity()?,
        _ => {
            return Err(crate::error::Error::InvalidParams(format!(
                "no criterion {id}"
            )))
        }
    };
    let seconds = t0.elapsed().as_secs_f64();
    let limit = LIMITS[id as usize - 1];
    let mut failures = out.failures;
    if limit.is_some_and(|l| seconds > l) {
        failures.push(format!("runtime {seconds:.1}s"));
    }
    let unexpected = failures
        .iter()
        .filter(|f| divergence_reason(f).is_none())
        .cloned()
        .collect();
    Ok(CriterionResult {
        id,
        title: TITLES[id as usize - 1],
        passed: failures.is_empty(),
        detail: out.detail,
        failures,
        unexpected,
        seconds,
        time_limit: limit,
        seed: out.seed,
        samples: out.samples,
    })
}

pub fn run_all() -> Result<Vec<CriterionResult>> {
    (1..=9).map(run_criterion).collect()
}

/// Independent SIMON written from the published description, used as an
/// oracle for the library cipher.
mod reference {
    const Z: [&str; 4] = [
        "11111010001001010110000111001101111101000100101011000011100110",
        "10001110111110010011000010110101000111011111001001100001011010",
        "10101111011100000011010010011000101000010001111110010110110011",
        "11011011101011000110010111100000010010001010011100110100001111",
    ];

    pub struct Cipher {
        n: u32,
        mask: u64,
        keys: Vec<u64>,
    }

    impl Cipher {
        pub fn new(n: u32, m: usize, t: usize, z: usize, key: u128) -> Cipher {
            let mask = if n == 64 { u64::MAX } else { (1 << n) - 1 };
            let ror = |x: u64, r: u32| ((x >> r) | (x << (n - r))) & mask;
            let zbits: Vec<u64> = Z[z].bytes().map(|b| u64::from(b - b'0')).collect();
            let mut k: Vec<u64> = (0..m)
                .map(|i| ((key >> (n as usize * i)) as u64) & mask)
                .collect();
            for i in m..t {
                let mut tmp = ror(k[i - 1], 3);
                if m == 4 {
                    tmp ^= k[i - 3];
                }
                tmp ^= ror(tmp, 1);
                k.push(!k[i - m] & mask ^ tmp ^ zbits[(i - m) % 62] ^ 3);
            }
            Cipher { n, mask, keys: k }
        }

        pub fn encrypt(&self, mut x: u64, mut y: u64) -> (u64, u64) {
            let rol = |v: u64, r: u32| ((v << r) | (v >> (self.n - r))) & self.mask;
            for &k in &self.keys {
                let f = (rol(x, 1) & rol(x, 8)) ^ rol(x, 2);
                (x, y) = (y ^ f ^ k, x);
            }
            (x, y)
        }
    }
}

fn random_key(rng: &mut ChaCha8Rng, p: &SimonParams) -> u128 {
    let bits = p.key_bits();
    let k: u128 = rng.gen();
    if bits >= 128 {
        k
    } else {
        k & ((1u128 << bits) - 1)
    }
}

fn random_block(rng: &mut ChaCha8Rng, p: &SimonParams) -> Block {
    Block::new(rng.gen::<u64>() & p.mask(), rng.gen::<u64>() & p.mask())
}

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

fn z_index(v: Variant) -> usize {
    match v {
        Variant::Simon32_64 | Variant::Simon48_72 => 0,
        Variant::Simon48_96 => 1,
        Variant::Simon64_96 => 2,
        Variant::Simon64_128 => 3,
    }
}

fn simon_vectors() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    const RANDOM: usize = 200;
    for (v, key, pt, ct) in VECTORS {
        let p = v.params();
        let oracle = |key: u128, b: Block| {
            let c = reference::Cipher::new(
                p.word_bits,
                p.key_words as usize,
                p.rounds as usize,
                z_index(v),
                key,
            );
            let (x, y) = c.encrypt(b.left, b.right);
            Block::new(x, y)
        };
        let lib = |key: u128, b: Block| -> Result<Block> {
            encrypt(&p, &key_schedule(&p, key)?, b, p.rounds as usize)
        };
        let pt = Block::from_u128(&p, pt);
        if oracle(key, pt).to_u128(&p) != ct {
            failures.push(format!("{v} reference oracle vector"));
        }
        if lib(key, pt)?.to_u128(&p) != ct {
            failures.push(format!("{v} vector"));
        }
        for _ in 0..RANDOM {
            let k = random_key(&mut rng, &p);
            let b = random_block(&mut rng, &p);
            if lib(k, b)? != oracle(k, b) {
                failures.push(format!("{v} random input"));
                break;
            }
        }
    }
    Ok(Outcome {
        seed: Some(1),
        samples: Some(5 * RANDOM as u64),
        ..Outcome::new(
            "5 variants, vectors plus random inputs against an independent oracle",
            failures,
        )
    })
}

/// Bit-sliced run of up to 64 inputs; `inputs[j]` assigns register values
/// for lane j.
fn run_lanes(c: &Circuit, regs: &[&Register], inputs: &[Vec<u128>]) -> Result<Vec<u64>> {
    let mut lanes = vec![0u64; c.width()];
    for (j, vals) in inputs.iter().enumerate() {
        for (r, &v) in regs.iter().zip(vals) {
            for i in 0..r.len {
                lanes[r.qubit(i)] |= (((v >> i) & 1) as u64) << j;
            }
        }
    }
    simulate_bitsliced(c, &mut lanes)?;
    Ok(lanes)
}

fn lane_value(lanes: &[u64], qubits: &[Qubit], j: usize) -> u128 {
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| {
        acc | ((((lanes[q] >> j) & 1) as u128) << i)
    })
}

fn ancillas_clean(c: &Circuit, lanes: &[u64]) -> bool {
    c.ancillas().iter().all(|&q| lanes[q] == 0)
}

const INPUTS: usize = 1024;

fn circuit_equivalence() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for v in Variant::ALL {
        let p = v.params();
        let t = p.rounds as usize;
        let (c, lay) = build_encryption_circuit(&p, t)?;
        let low = lower_mcx(&c)?;
        let (kc, key) = build_key_expansion(&p, t)?;
        let n = p.word_bits as usize;
        let m = p.key_words as usize;
        for _ in 0..INPUTS / 64 {
            let keys: Vec<u128> = (0..64).map(|_| random_key(&mut rng, &p)).collect();
            let pts: Vec<Block> = (0..64).map(|_| random_block(&mut rng, &p)).collect();
            let inputs: Vec<Vec<u128>> = keys
                .iter()
                .zip(&pts)
                .map(|(&k, b)| vec![k, b.left.into(), b.right.into()])
                .collect();
            let lanes = run_lanes(
                &low,
                &[&lay.key, &lay.input[0].left, &lay.input[0].right],
                &inputs,
            )?;
            let klanes = run_lanes(
                &kc,
                &[&key],
                &keys.iter().map(|&k| vec![k]).collect::<Vec<_>>(),
            )?;
            let mut back = klanes.clone();
            simulate_bitsliced(&kc.inverse(), &mut back)?;
            for j in 0..64 {
                let ks = key_schedule(&p, keys[j])?;
                let want = encrypt(&p, &ks, pts[j], t)?;
                let out = &lay.output[0];
                let got = Block::new(
                    lane_value(&lanes, &out.left.qubits(), j) as u64,
                    lane_value(&lanes, &out.right.qubits(), j) as u64,
                );
                if got != want || !ancillas_clean(&low, &lanes) {
                    failures.push(format!("{v} encryption"));
                    break;
                }
                let expanded = (t - m..t).all(|i| {
                    let slot: Vec<Qubit> = (0..n).map(|b| key.qubit((i % m) * n + b)).collect();
                    lane_value(&klanes, &slot, j) as u64 == ks[i]
                });
                if !expanded || lane_value(&back, &key.qubits(), j) != keys[j] {
                    failures.push(format!("{v} key expansion"));
                    break;
                }
            }
        }
    }
    let (c, lay, plan) = build_h_circuit_d2()?;
    let low = lower_mcx(&c)?;
    let kb = plan.key_bits();
    for batch in 0..INPUTS / 64 {
        let cases: Vec<(Block, Block, Vec<u8>)> = (0..64)
            .map(|j| {
                let (a, b) = if (batch + j) % 2 == 0 {
                    plan.sample_filtered_pair(&mut rng)
                } else {
                    (
                        random_block(&mut rng, &plan.params),
                        random_block(&mut rng, &plan.params),
                    )
                };
                let k1: Vec<u8> = (0..kb).map(|_| rng.gen::<u8>() & 1).collect();
                (a, b, k1)
            })
            .collect();
        let regs = [
            &lay.ct_a.left,
            &lay.ct_a.right,
            &lay.ct_b.left,
            &lay.ct_b.right,
            &lay.k1,
        ];
        let inputs: Vec<Vec<u128>> = cases
            .iter()
            .map(|(a, b, k1)| {
                let k = k1
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (i, &x)| acc | (u128::from(x) << i));
                vec![
                    a.left.into(),
                    a.right.into(),
                    b.left.into(),
                    b.right.into(),
                    k,
                ]
            })
            .collect();
        let lanes = run_lanes(&low, &regs, &inputs)?;
        // In place: the inputs come back only through the uncompute.
        let mut back = lanes.clone();
        simulate_bitsliced(&low.inverse(), &mut back)?;
        for (j, (a, b, k1)) in cases.iter().enumerate() {
            let want = plan.h(*a, *b, k1);
            let got = Block::new(
                lane_value(&lanes, &lay.out.left.qubits(), j) as u64,
                lane_value(&lanes, &lay.out.right.qubits(), j) as u64,
            );
            let restored = regs
                .iter()
                .zip(&inputs[j])
                .all(|(r, &v)| lane_value(&back, &r.qubits(), j) == v);
            if got != want || !restored || !ancillas_clean(&low, &lanes) {
                failures.push("h circuit".into());
                break;
            }
        }
        if !failures.is_empty() {
            break;
        }
    }
    Ok(Outcome {
        seed: Some(2),
        samples: Some(INPUTS as u64),
        ..Outcome::new(
            format!("{INPUTS} inputs per circuit: 5 encryptions, 5 key expansions, h"),
            failures,
        )
    })
}

fn decompositions() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut one = Circuit::new(3);
    one.toffoli(0, 1, 2)?;
    let want = unitary(&one)?;
    let mut worst: f64 = 0.0;
    for s in [ToffoliScheme::Nc7, ToffoliScheme::Amy3] {
        let d = distance_up_to_phase(&unitary(&lower_circuit(&one, s)?)?, &want);
        worst = worst.max(d);
        if d > 1e-12 {
            failures.push(format!("{s:?} unitary {d:e}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 3..=64usize {
        let mut c = Circuit::new(0);
        let ctl = c.add_register("c", k)?;
        let t = c.add_register("t", 1)?;
        let anc = c.add_ancillas("anc", k - 2)?;
        let gates = mcx_to_toffoli(&ctl.qubits(), t.qubit(0), &anc.qubits())?;
        if gates.len() != 2 * k - 3 {
            failures.push(format!("k={k} count {}", gates.len()));
        }
        c.extend(gates)?;
        // Lane 0 all ones, lanes 1..=k one control cleared, the rest random.
        let mut ok = true;
        for batch in 0..2 {
            let rows: Vec<u128> = (0..64)
                .map(|j| {
                    let all = if k == 128 {
                        u128::MAX
                    } else {
                        (1u128 << k) - 1
                    };
                    let idx = batch * 64 + j;
                    match idx {
                        0 => all,
                        i if i <= k => all & !(1 << (i - 1)),
                        _ => all & !(rng.gen::<u128>() & rng.gen::<u128>() & rng.gen::<u128>()),
                    }
                })
                .collect();
            let lanes = run_lanes(
                &c,
                &[&ctl],
                &rows.iter().map(|&r| vec![r]).collect::<Vec<_>>(),
            )?;
            for (j, &r) in rows.iter().enumerate() {
                let fire = r.count_ones() as usize == k;
                let tgt = (lanes[t.qubit(0)] >> j) & 1 == 1;
                if tgt != fire || lane_value(&lanes, &ctl.qubits(), j) != r {
                    ok = false;
                }
            }
            ok &= ancillas_clean(&c, &lanes);
        }
        if !ok {
            failures.push(format!("k={k} ladder"));
        }
    }
    Ok(Outcome::new(
        format!("Toffoli distance {worst:.1e}; ladders k=3..64 exact with 2k-3 Toffolis"),
        failures,
    ))
}

fn compare(key: &str, got: f64, want: f64, failures: &mut Vec<String>) {
    if got != want {
        failures.push(key.to_string());
    }
}

fn exact_tables() -> Result<Outcome> {
    let mut failures = Vec::new();
    let paper = CostOptions::default();
    let mut cells = 0;
    for (id, row) in [
        (4, "32/64 r32"),
        (4, "32/64 r19"),
        (5, "32/64 r19"),
        (8, "iteration"),
        (9, "iteration"),
    ] {
        let t = table_report(id, &paper)?;
        let r = t.rows.iter().find(|r| r.key == row).expect("row present");
        for c in &r.cells {
            cells += 1;
            if !c.ok() {
                failures.push(format!("{id}|{row}|{}", c.column));
            }
        }
    }
    let v = Variant::Simon32_64;
    let a = Catalog::builtin().attack(v)?.clone();
    let (h, _, _) = build_h_circuit_d2()?;
    let s = summarize_resources(&h, LoweringScheme::paper())?;
    compare("h|d2|cnot", s.cnot as f64, a.h_cnot as f64, &mut failures);
    compare(
        "h|d2|toffoli",
        s.toff_s as f64,
        a.h_toffoli as f64,
        &mut failures,
    );
    compare(
        "h|d2|t_depth",
        s.t_depth as f64,
        a.h_t_depth as f64,
        &mut failures,
    );
    compare(
        "h|d2|full_depth",
        s.full_depth as f64,
        a.h_full_depth as f64,
        &mut failures,
    );
    Ok(Outcome::new(
        format!("{} cells plus 4 h-circuit figures", cells),
        failures,
    ))
}

fn tolerance_tables() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut cells = 0;
    let opts = CostOptions::default();
    for id in [6, 10, 11, 12, 13, 14] {
        let t = table_report(id, &opts)?;
        cells += t.rows.iter().map(|r| r.cells.len()).sum::<usize>();
        failures.extend(
            t.failures()
                .into_iter()
                .map(|(row, col, _)| format!("{id}|{row}|{col}")),
        );
    }
    Ok(Outcome::new(
        format!("{cells} cells, 5% relative (0.1 in log2 for E.C.)"),
        failures,
    ))
}

fn qaa_bound() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 1..=30 {
        let p = (-(k as f64)).exp2();
        let m = iteration_count(p)?;
        let sim = simulate_qaa_aggregate(p, Some(m))?.success;
        let formula = success_probability(p, m);
        let diff = (sim - formula).abs();
        worst = worst.max(diff);
        // 1e-12 absorbs rounding at the p = 1/2 equality case.
        if sim < (1.0 - p).max(p) - 1e-12 || diff > 1e-9 {
            failures.push(format!("k={k}"));
        }
    }
    Ok(Outcome::new(
        format!("p=2^-1..2^-30, max formula gap {worst:.1e}"),
        failures,
    ))
}

fn filter_statistics() -> Result<Outcome> {
    let cat = Catalog::builtin();
    let v = Variant::Simon32_64;
    let d = cat.differential(v, 2)?.clone();
    let plan = HPlan::derive(&d, cat.attack(v)?)?;
    let kb = plan.key_bits();
    const SEED: u64 = 11;
    let n = 1u64 << 20;
    let hits = count_trials(n, SEED, |rng| {
        let (x, y) = plan.sample_filtered_pair(rng);
        let k1: Vec<u8> = (0..kb).map(|_| rng.gen::<u8>() & 1).collect();
        plan.h(x, y, &k1) == d.delta_out
    });
    let p = (-14f64).exp2();
    let mean = n as f64 * p;
    let sigma = (mean * (1.0 - p)).sqrt();
    let z = (hits as f64 - mean) / sigma;
    let failures = if z.abs() <= 3.0 {
        vec![]
    } else {
        vec![format!("z={z:.2}")]
    };
    Ok(Outcome {
        seed: Some(SEED),
        samples: Some(n),
        ..Outcome::new(
            format!("{hits} hits in 2^20, expected {mean:.0}, z={z:.2}"),
            failures,
        )
    })
}

fn toy() -> Result<Outcome> {
    let cfg = ToyConfig::default();
    let r = run_toy(&cfg)?;
    let mut failures = Vec::new();
    let p1 = &r.phase1;
    if !p1.oracle_agrees {
        failures.push("phase-1 marks differ from brute force".into());
    }
    if !p1.registers_restored {
        failures.push("phase-1 oracle leaves garbage".into());
    }
    if (p1.distinct_observed as f64 - p1.distinct_expected).abs()
        > 4.0 * p1.distinct_expected.sqrt()
    {
        failures.push("distinct candidates off expectation".into());
    }
    if !p1.planted_found {
        failures.push("planted partial key not among candidates".into());
    }
    match &r.phase2 {
        Some(p2) if p2.success >= 1.0 - p2.p => {}
        _ => failures.push("phase-2 success below 1-p".into()),
    }
    if !r.recovered() {
        failures.push("recovered key differs".into());
    }
    Ok(Outcome {
        seed: Some(cfg.seed),
        samples: Some(p1.runs as u64),
        ..Outcome::new(
            format!(
                "2^{} space, {} marked, {} distinct of {:.1} expected, key {}",
                p1.space_bits,
                p1.marked,
                p1.distinct_observed,
                p1.distinct_expected,
                r.recovered_key.as_deref().unwrap_or("none")
            ),
            failures,
        )
    })
}

fn complexity() -> Result<Outcome> {
    let v = Variant::Simon32_64;
    let q = encryption_complexity(Technique::Qmks, v)?;
    let r = encryption_complexity(Technique::QrkrTotal, v)?;
    let mut failures = Vec::new();
    if (q - 32.6).abs() > 0.1 {
        failures.push("32/64 QMKS".into());
    }
    if (r - 31.1).abs() > 0.1 {
        failures.push("32/64 QRKR".into());
    }
    let t = table_report(14, &CostOptions::default())?;
    for row in &t.rows {
        let c = &row.cells[0];
        if !c.ok() {
            failures.push(format!("14|{}|ec_log2", row.key));
        }
    }
    Ok(Outcome::new(
        format!("QMKS 2^{q:.2}, QRKR 2^{r:.2}, 10 comparison rows"),
        failures,
    ))
}
