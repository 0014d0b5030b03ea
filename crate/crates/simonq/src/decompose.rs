//! Toffoli to Clifford+T, MCX to Toffoli ladders, and resource summaries.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::str::FromStr;

use crate::circuit::{Circuit, ConstRole, Gate, Qubit};
use crate::error::{Error, Result};
use crate::schedule::{is_t, is_toffoli, schedule_layers, schedule_toffoli_layers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ToffoliScheme {
    /// 7 T, 6 CNOT, T-depth 7.
    Nc7,
    /// 7 T, 7 CNOT, T-depth 3, depth 10.
    #[default]
    Amy3,
}

/// How several multi-controlled gates of one circuit are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum McxAccounting {
    /// Each k-controlled gate costs 2k-3 Toffolis.
    #[default]
    Strict,
    /// g gates with k_1..k_g controls cost 2(k_1+..+k_g)-3 together.
    Paper,
}

/// How XORed-in constants turn into NOT gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NotAccounting {
    /// One NOT per set bit.
    #[default]
    Physical,
    /// A full word of NOTs per key-schedule constant, none for patterns.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct LoweringScheme {
    pub toffoli: ToffoliScheme,
    pub mcx: McxAccounting,
    pub nots: NotAccounting,
}

impl LoweringScheme {
    pub fn strict(toffoli: ToffoliScheme) -> Self {
        LoweringScheme {
            toffoli,
            mcx: McxAccounting::Strict,
            nots: NotAccounting::Physical,
        }
    }

    /// The conventions the published tables follow.
    pub fn paper() -> Self {
        LoweringScheme {
            toffoli: ToffoliScheme::Amy3,
            mcx: McxAccounting::Paper,
            nots: NotAccounting::Paper,
        }
    }
}

impl FromStr for ToffoliScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nc7" => Ok(ToffoliScheme::Nc7),
            "amy3" => Ok(ToffoliScheme::Amy3),
            _ => Err(Error::InvalidParams(format!(
                "unknown Toffoli scheme `{s}`"
            ))),
        }
    }
}

impl FromStr for McxAccounting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(McxAccounting::Strict),
            "paper" => Ok(McxAccounting::Paper),
            _ => Err(Error::InvalidParams(format!(
                "unknown MCX accounting `{s}`"
            ))),
        }
    }
}

impl ToffoliScheme {
    pub fn cnots(self) -> u64 {
        match self {
            ToffoliScheme::Nc7 => 6,
            ToffoliScheme::Amy3 => 7,
        }
    }

    pub fn t_depth(self) -> u64 {
        match self {
            ToffoliScheme::Nc7 => 7,
            ToffoliScheme::Amy3 => 3,
        }
    }
}

/// Clifford+T sequence for a Toffoli with controls `a`, `b` and target `t`.
pub fn toffoli_to_clifford_t(scheme: ToffoliScheme, a: Qubit, b: Qubit, t: Qubit) -> Vec<Gate> {
    let q = [a, b, t];
    let cx = |c: usize, x: usize| Gate::Cnot {
        control: q[c],
        target: q[x],
    };
    match scheme {
        ToffoliScheme::Amy3 => vec![
            Gate::H(t),
            cx(0, 1),
            Gate::T(a),
            Gate::Tdg(b),
            Gate::Tdg(t),
            cx(2, 0),
            cx(0, 1),
            Gate::S(t),
            Gate::Tdg(a),
            Gate::Tdg(b),
            cx(2, 1),
            cx(1, 0),
            Gate::T(a),
            Gate::T(b),
            cx(2, 0),
            Gate::H(t),
            cx(1, 0),
        ],
        ToffoliScheme::Nc7 => vec![
            Gate::T(a),
            Gate::H(t),
            cx(1, 2),
            Gate::Tdg(t),
            cx(0, 2),
            Gate::T(t),
            cx(1, 2),
            Gate::Tdg(t),
            cx(0, 2),
            Gate::T(t),
            cx(0, 1),
            Gate::H(t),
            Gate::Tdg(b),
            cx(0, 1),
            Gate::Tdg(b),
            Gate::S(b),
        ],
    }
}

/// Compute, apply, uncompute ladder for a k-controlled NOT with k-2 ancillas.
pub fn mcx_to_toffoli(controls: &[Qubit], target: Qubit, ancillas: &[Qubit]) -> Result<Vec<Gate>> {
    let k = controls.len();
    if k < 3 {
        return Err(Error::InvalidParams(format!(
            "ladder needs 3 or more controls, got {k}"
        )));
    }
    if ancillas.len() != k - 2 {
        return Err(Error::InsufficientAncillas {
            needed: k - 2,
            available: ancillas.len(),
        });
    }
    let ops: HashSet<Qubit> = controls.iter().copied().chain([target]).collect();
    if let Some(&a) = ancillas.iter().find(|a| ops.contains(a)) {
        return Err(Error::AncillaOverlap(a));
    }
    let tof = |c0, c1, target| Gate::Toffoli { c0, c1, target };
    let mut up = vec![tof(controls[0], controls[1], ancillas[0])];
    for i in 1..k - 2 {
        up.push(tof(controls[i + 1], ancillas[i - 1], ancillas[i]));
    }
    let mut out = up.clone();
    out.push(tof(controls[k - 1], ancillas[k - 3], target));
    out.extend(up.into_iter().rev());
    Ok(out)
}

/// Replaces every MCX by CNOT, Toffoli or a ladder over the circuit's clean
/// ancilla pool.
pub fn lower_mcx(c: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        match g {
            Gate::Mcx { controls, target } => match controls.len() {
                1 => gates.push(Gate::Cnot {
                    control: controls[0],
                    target: *target,
                }),
                2 => gates.push(Gate::Toffoli {
                    c0: controls[0],
                    c1: controls[1],
                    target: *target,
                }),
                k => {
                    let busy: HashSet<Qubit> = g.qubits().into_iter().collect();
                    let free: Vec<Qubit> = c
                        .ancillas()
                        .iter()
                        .copied()
                        .filter(|a| !busy.contains(a))
                        .take(k - 2)
                        .collect();
                    if free.len() < k - 2 {
                        return Err(Error::InsufficientAncillas {
                            needed: k - 2,
                            available: free.len(),
                        });
                    }
                    gates.extend(mcx_to_toffoli(controls, *target, &free)?);
                }
            },
            g => gates.push(g.clone()),
        }
    }
    c.with_gates(gates)
}

/// Fully lowered Clifford+T circuit (constants stay as XOR gates).
pub fn lower_circuit(c: &Circuit, scheme: ToffoliScheme) -> Result<Circuit> {
    let m = lower_mcx(c)?;
    let mut gates = Vec::with_capacity(m.len() * 8);
    for g in m.gates() {
        match g {
            Gate::Toffoli { c0, c1, target } => {
                gates.extend(toffoli_to_clifford_t(scheme, *c0, *c1, *target))
            }
            g => gates.push(g.clone()),
        }
    }
    m.with_gates(gates)
}

/// One row of a cost table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub not: u64,
    pub cnot: u64,
    pub toff_c: u64,
    pub h: u64,
    pub toff_h: u64,
    /// Toffoli count: one S per Toffoli.
    pub toff_s: u64,
    /// Native S and S† outside Toffolis.
    pub s: u64,
    pub cliff: u64,
    pub t: u64,
    pub toffoli_depth: u64,
    pub t_depth: u64,
    pub full_depth: u64,
    pub qubits: u64,
}

impl ResourceSummary {
    pub fn toffolis(&self) -> u64 {
        self.toff_s
    }

    pub fn with_cliff(mut self) -> Self {
        self.cliff =
            self.not + self.cnot + self.toff_c + self.h + self.toff_h + self.toff_s + self.s;
        self
    }

    /// Counts add, depths add, qubits take the max: running one after another.
    pub fn then(&self, o: &ResourceSummary) -> ResourceSummary {
        ResourceSummary {
            not: self.not + o.not,
            cnot: self.cnot + o.cnot,
            toff_c: self.toff_c + o.toff_c,
            h: self.h + o.h,
            toff_h: self.toff_h + o.toff_h,
            toff_s: self.toff_s + o.toff_s,
            s: self.s + o.s,
            cliff: self.cliff + o.cliff,
            t: self.t + o.t,
            toffoli_depth: self.toffoli_depth + o.toffoli_depth,
            t_depth: self.t_depth + o.t_depth,
            full_depth: self.full_depth + o.full_depth,
            qubits: self.qubits.max(o.qubits),
        }
    }
}

/// Rewrites constants per the NOT convention: physical keeps them, paper
/// drops patterns.
fn apply_not_convention(c: &Circuit, nots: NotAccounting) -> Result<Circuit> {
    match nots {
        NotAccounting::Physical => Ok(c.clone()),
        NotAccounting::Paper => c.with_gates(
            c.gates()
                .iter()
                .filter(|g| {
                    !matches!(
                        g,
                        Gate::XorConst {
                            role: ConstRole::Pattern,
                            ..
                        }
                    )
                })
                .cloned()
                .collect(),
        ),
    }
}

/// Number of extra Toffoli stages the paper convention charges.
pub fn paper_mcx_surcharge(c: &Circuit) -> u64 {
    let g = c
        .gates()
        .iter()
        .filter(|g| matches!(g, Gate::Mcx { controls, .. } if controls.len() >= 3))
        .count() as u64;
    3 * g.saturating_sub(1)
}

pub fn summarize_resources(c: &Circuit, scheme: LoweringScheme) -> Result<ResourceSummary> {
    let mut r = ResourceSummary {
        qubits: c.width() as u64,
        ..Default::default()
    };
    for g in c.gates() {
        match g {
            Gate::Not(_) => r.not += 1,
            Gate::Cnot { .. } => r.cnot += 1,
            Gate::H(_) => r.h += 1,
            Gate::S(_) | Gate::Sdg(_) => r.s += 1,
            Gate::T(_) | Gate::Tdg(_) => r.t += 1,
            Gate::XorConst {
                role,
                value,
                qubits,
            } => {
                r.not += match (scheme.nots, role) {
                    (NotAccounting::Physical, _) => u64::from(value.count_ones()),
                    (NotAccounting::Paper, ConstRole::RoundConstant) => qubits.len() as u64,
                    (NotAccounting::Paper, ConstRole::Pattern) => 0,
                }
            }
            Gate::Mcx { controls, .. } if controls.len() == 1 => r.cnot += 1,
            _ => {}
        }
    }
    let surcharge = match scheme.mcx {
        McxAccounting::Strict => 0,
        McxAccounting::Paper => paper_mcx_surcharge(c),
    };
    let base = apply_not_convention(c, scheme.nots)?;
    let tl = lower_mcx(&base)?;
    let tof = tl.gates().iter().filter(|g| is_toffoli(g)).count() as u64 + surcharge;
    r.toff_s = tof;
    r.toff_c = tof * scheme.toffoli.cnots();
    r.toff_h = 2 * tof;
    r.t += 7 * tof;
    let tlayers = schedule_toffoli_layers(&tl)?;
    r.toffoli_depth = tlayers.count_layers(&tl, is_toffoli) as u64 + surcharge;

    let low = lower_circuit(&base, scheme.toffoli)?;
    let layers = schedule_layers(&low)?;
    r.t_depth = layers.count_layers(&low, is_t) as u64 + surcharge * scheme.toffoli.t_depth();
    r.full_depth = layers.depth() as u64;
    Ok(r.with_cliff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{distance_up_to_phase, simulate_basis, unitary, BasisState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_toffoli() -> Circuit {
        let mut c = Circuit::new(3);
        c.toffoli(0, 1, 2).unwrap();
        c
    }

    #[test]
    fn both_schemes_are_toffoli() {
        let want = unitary(&one_toffoli()).unwrap();
        for s in [ToffoliScheme::Nc7, ToffoliScheme::Amy3] {
            let got = unitary(&lower_circuit(&one_toffoli(), s).unwrap()).unwrap();
            assert!(distance_up_to_phase(&got, &want) < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn toffoli_gate_counts_and_depths() {
        let amy = summarize_resources(&one_toffoli(), LoweringScheme::strict(ToffoliScheme::Amy3))
            .unwrap();
        assert_eq!((amy.toff_c, amy.toff_h, amy.toff_s, amy.t), (7, 2, 1, 7));
        assert_eq!((amy.t_depth, amy.full_depth), (3, 10));
        let nc = summarize_resources(&one_toffoli(), LoweringScheme::strict(ToffoliScheme::Nc7))
            .unwrap();
        assert_eq!((nc.toff_c, nc.toff_h, nc.toff_s, nc.t), (6, 2, 1, 7));
        assert_eq!((nc.t_depth, nc.full_depth), (7, 13));
    }

    #[test]
    fn empty_circuit_is_zero() {
        let r = summarize_resources(&Circuit::new(0), LoweringScheme::default()).unwrap();
        assert_eq!(r, ResourceSummary::default());
    }

    #[test]
    fn ladder_sizes() {
        for k in 3..=96usize {
            let controls: Vec<usize> = (0..k).collect();
            let anc: Vec<usize> = (k + 1..2 * k - 1).collect();
            let g = mcx_to_toffoli(&controls, k, &anc).unwrap();
            assert_eq!(g.len(), 2 * k - 3);
        }
        assert!(matches!(
            mcx_to_toffoli(&[0, 1, 2], 3, &[]),
            Err(Error::InsufficientAncillas { needed: 1, .. })
        ));
        assert!(matches!(
            mcx_to_toffoli(&[0, 1, 2], 3, &[2]),
            Err(Error::AncillaOverlap(2))
        ));
    }

    fn mcx_circuit(k: usize) -> Circuit {
        let mut c = Circuit::new(0);
        let ctl = c.add_register("c", k).unwrap();
        let t = c.add_register("t", 1).unwrap();
        c.add_ancillas("anc", k.saturating_sub(2)).unwrap();
        c.mcx(ctl.qubits(), t.qubit(0)).unwrap();
        c
    }

    #[test]
    fn ladder_depths_for_96() {
        let r = summarize_resources(
            &mcx_circuit(96),
            LoweringScheme::strict(ToffoliScheme::Amy3),
        )
        .unwrap();
        assert_eq!(r.toff_s, 189);
        assert_eq!(r.toffoli_depth, 189);
        assert_eq!(r.t_depth, 567);
        assert_eq!(r.full_depth, 1890);
    }

    #[test]
    fn mcx2_lowers_like_toffoli() {
        let mut c = Circuit::new(3);
        c.mcx(vec![0, 1], 2).unwrap();
        let s = LoweringScheme::default();
        assert_eq!(
            summarize_resources(&c, s).unwrap(),
            summarize_resources(&one_toffoli(), s).unwrap()
        );
    }

    #[test]
    fn ladder_flips_target_and_cleans_ancillas() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [3usize, 5, 17, 64] {
            let c = mcx_circuit(k);
            let low = lower_mcx(&c).unwrap();
            let ctl = c.register("c").unwrap().clone();
            let t = c.register("t").unwrap().qubit(0);
            for trial in 0..1000 {
                let mut s = BasisState::zeros(c.width());
                let all = trial % 4 == 0;
                for q in ctl.qubits() {
                    s.set(q, all || rng.gen_bool(0.9));
                }
                let fire = ctl.qubits().iter().all(|&q| s.get(q));
                simulate_basis(&low, &mut s).unwrap();
                assert_eq!(s.get(t), fire);
                assert!(s.is_zero_on(c.ancillas()));
            }
        }
    }

    #[test]
    fn paper_surcharge_counts_pairs() {
        let mut c = Circuit::new(0);
        let a = c.add_register("a", 96).unwrap();
        let b = c.add_register("b", 64).unwrap();
        let t = c.add_register("t", 1).unwrap();
        c.add_ancillas("anc", 94).unwrap();
        c.mcx(a.qubits(), t.qubit(0)).unwrap();
        c.mcx(b.qubits(), t.qubit(0)).unwrap();
        let strict = summarize_resources(&c, LoweringScheme::strict(ToffoliScheme::Amy3)).unwrap();
        let paper = summarize_resources(
            &c,
            LoweringScheme {
                mcx: McxAccounting::Paper,
                ..LoweringScheme::default()
            },
        )
        .unwrap();
        assert_eq!(strict.toff_s, 314);
        assert_eq!(paper.toff_s, 317);
        assert_eq!(paper.t_depth, strict.t_depth + 9);
        assert_eq!(paper.full_depth, strict.full_depth);
    }

    #[test]
    fn not_conventions() {
        let mut c = Circuit::new(4);
        c.push(Gate::XorConst {
            role: ConstRole::RoundConstant,
            value: 0b0101,
            qubits: vec![0, 1, 2, 3],
        })
        .unwrap();
        c.push(Gate::XorConst {
            role: ConstRole::Pattern,
            value: 0b1,
            qubits: vec![0, 1, 2, 3],
        })
        .unwrap();
        let phys = summarize_resources(&c, LoweringScheme::default()).unwrap();
        let paper = summarize_resources(&c, LoweringScheme::paper()).unwrap();
        assert_eq!(phys.not, 3);
        assert_eq!(phys.full_depth, 2);
        assert_eq!(paper.not, 4);
        assert_eq!(paper.full_depth, 1);
    }
}
