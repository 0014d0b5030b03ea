//! Reversible-circuit IR: gates, registers, composition, inversion and a
//! line-based text format.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Qubit = usize;

/// Why a constant is XORed in. Round constants of the key schedule and
/// comparison patterns are tracked apart because they are costed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstRole {
    RoundConstant,
    Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Not(Qubit),
    Cnot {
        control: Qubit,
        target: Qubit,
    },
    Toffoli {
        c0: Qubit,
        c1: Qubit,
        target: Qubit,
    },
    H(Qubit),
    S(Qubit),
    Sdg(Qubit),
    T(Qubit),
    Tdg(Qubit),
    Mcx {
        controls: Vec<Qubit>,
        target: Qubit,
    },
    /// `qubits[i] ^= bit i of value`.
    XorConst {
        role: ConstRole,
        value: u64,
        qubits: Vec<Qubit>,
    },
    /// Scheduling fence, no cost.
    Barrier(Vec<Qubit>),
    /// Marks a register loaded outside the circuit, no cost.
    Prep {
        label: String,
        qubits: Vec<Qubit>,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<Qubit> {
        match self {
            Gate::Not(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => {
                vec![*q]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Toffoli { c0, c1, target } => vec![*c0, *c1, *target],
            Gate::Mcx { controls, target } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::XorConst { qubits, .. } | Gate::Barrier(qubits) | Gate::Prep { qubits, .. } => {
                qubits.clone()
            }
        }
    }

    /// Qubits the gate acts on for scheduling; constants touch only set bits.
    pub fn active_qubits(&self) -> Vec<Qubit> {
        match self {
            Gate::XorConst { value, qubits, .. } => qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| *i < 64 && value >> i & 1 == 1)
                .map(|(_, q)| *q)
                .collect(),
            g => g.qubits(),
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            g => g.clone(),
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(self, Gate::Barrier(_) | Gate::Prep { .. })
    }

    /// Permutes basis states.
    pub fn is_classical(&self) -> bool {
        !matches!(
            self,
            Gate::H(_) | Gate::S(_) | Gate::Sdg(_) | Gate::T(_) | Gate::Tdg(_)
        )
    }

    pub fn map_qubits(&self, f: impl Fn(Qubit) -> Qubit) -> Gate {
        let v = |qs: &Vec<Qubit>| qs.iter().map(|&q| f(q)).collect::<Vec<_>>();
        match self {
            Gate::Not(q) => Gate::Not(f(*q)),
            Gate::H(q) => Gate::H(f(*q)),
            Gate::S(q) => Gate::S(f(*q)),
            Gate::Sdg(q) => Gate::Sdg(f(*q)),
            Gate::T(q) => Gate::T(f(*q)),
            Gate::Tdg(q) => Gate::Tdg(f(*q)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(*control),
                target: f(*target),
            },
            Gate::Toffoli { c0, c1, target } => Gate::Toffoli {
                c0: f(*c0),
                c1: f(*c1),
                target: f(*target),
            },
            Gate::Mcx { controls, target } => Gate::Mcx {
                controls: v(controls),
                target: f(*target),
            },
            Gate::XorConst {
                role,
                value,
                qubits,
            } => Gate::XorConst {
                role: *role,
                value: *value,
                qubits: v(qubits),
            },
            Gate::Barrier(qs) => Gate::Barrier(v(qs)),
            Gate::Prep { label, qubits } => Gate::Prep {
                label: label.clone(),
                qubits: v(qubits),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub start: Qubit,
    pub len: usize,
}

impl Register {
    pub fn qubit(&self, i: usize) -> Qubit {
        assert!(i < self.len, "bit {i} outside register {}", self.name);
        self.start + i
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        (self.start..self.start + self.len).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    registers: Vec<Register>,
    /// Clean ancillas available to lowering passes.
    ancillas: Vec<Qubit>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            ..Default::default()
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn ancillas(&self) -> &[Qubit] {
        &self.ancillas
    }

    /// Appends a named register after the current width.
    pub fn add_register(&mut self, name: &str, len: usize) -> Result<Register> {
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let reg = Register {
            name: name.to_string(),
            start: self.width,
            len,
        };
        self.width += len;
        self.registers.push(reg.clone());
        Ok(reg)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    /// Adds `n` clean ancillas as register `name`.
    pub fn add_ancillas(&mut self, name: &str, n: usize) -> Result<Register> {
        let reg = self.add_register(name, n)?;
        self.ancillas.extend(reg.qubits());
        Ok(reg)
    }

    fn check(&self, gate: &Gate) -> Result<()> {
        let qs = gate.qubits();
        if let Gate::Mcx { controls, .. } = gate {
            if controls.is_empty() {
                return Err(Error::EmptyControls);
            }
        }
        let mut seen = HashSet::new();
        for q in qs {
            if q >= self.width {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn not(&mut self, q: Qubit) -> Result<()> {
        self.push(Gate::Not(q))
    }

    pub fn cnot(&mut self, control: Qubit, target: Qubit) -> Result<()> {
        self.push(Gate::Cnot { control, target })
    }

    pub fn toffoli(&mut self, c0: Qubit, c1: Qubit, target: Qubit) -> Result<()> {
        self.push(Gate::Toffoli { c0, c1, target })
    }

    pub fn mcx(&mut self, controls: Vec<Qubit>, target: Qubit) -> Result<()> {
        self.push(Gate::Mcx { controls, target })
    }

    pub fn barrier(&mut self, qubits: Vec<Qubit>) -> Result<()> {
        self.push(Gate::Barrier(qubits))
    }

    /// Barrier over every qubit.
    pub fn barrier_all(&mut self) -> Result<()> {
        self.push(Gate::Barrier((0..self.width).collect()))
    }

    /// Appends `other` with its qubit `i` placed on `map[i]`.
    pub fn compose(&mut self, other: &Circuit, map: &[Qubit]) -> Result<()> {
        if map.len() != other.width {
            return Err(Error::WidthMismatch {
                expected: other.width,
                got: map.len(),
            });
        }
        let mut seen = HashSet::new();
        for &q in map {
            if !seen.insert(q) {
                return Err(Error::MapCollision(q));
            }
        }
        for g in &other.gates {
            self.push(g.map_qubits(|q| map[q]))?;
        }
        Ok(())
    }

    /// Appends `other` on the identity map.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        let map: Vec<Qubit> = (0..other.width).collect();
        self.compose(other, &map)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            registers: self.registers.clone(),
            ancillas: self.ancillas.clone(),
        }
    }

    /// Replaces the gate list, keeping the layout.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Circuit> {
        let mut c = Circuit {
            gates: Vec::with_capacity(gates.len()),
            ..self.clone()
        };
        c.extend(gates)?;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qubits {}", self.width);
        for r in &self.registers {
            let _ = writeln!(s, "register {} {} {}", r.name, r.start, r.len);
        }
        if !self.ancillas.is_empty() {
            let _ = writeln!(s, "ancilla {}", join(&self.ancillas));
        }
        for g in &self.gates {
            let line = match g {
                Gate::Not(q) => format!("NOT {q}"),
                Gate::Cnot { control, target } => format!("CNOT {control} {target}"),
                Gate::Toffoli { c0, c1, target } => format!("TOF {c0} {c1} {target}"),
                Gate::H(q) => format!("H {q}"),
                Gate::S(q) => format!("S {q}"),
                Gate::Sdg(q) => format!("SDG {q}"),
                Gate::T(q) => format!("T {q}"),
                Gate::Tdg(q) => format!("TDG {q}"),
                Gate::Mcx { controls, target } => format!("MCX {} {target}", join(controls)),
                Gate::XorConst {
                    role,
                    value,
                    qubits,
                } => {
                    let r = match role {
                        ConstRole::RoundConstant => "round",
                        ConstRole::Pattern => "pattern",
                    };
                    format!("XORC {r} {value:#x} {}", join(qubits))
                }
                Gate::Barrier(qs) => format!("BARRIER {}", join(qs)),
                Gate::Prep { label, qubits } => format!("PREP {label} {}", join(qubits)),
            };
            s.push_str(line.trim_end());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut c = Circuit::default();
        let mut sized = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: &str| Error::Parse {
                line,
                msg: msg.to_string(),
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut it = body.split_whitespace();
            let op = it.next().unwrap();
            let rest: Vec<&str> = it.collect();
            let nums = |xs: &[&str]| -> Result<Vec<usize>> {
                xs.iter()
                    .map(|x| {
                        x.parse::<usize>()
                            .map_err(|_| err(&format!("bad qubit `{x}`")))
                    })
                    .collect()
            };
            if !sized && op != "qubits" {
                return Err(err("expected `qubits` header"));
            }
            let arity = |n: usize| -> Result<Vec<usize>> {
                let v = nums(&rest)?;
                if v.len() != n {
                    return Err(err(&format!("`{op}` takes {n} operands")));
                }
                Ok(v)
            };
            let gate = match op {
                "qubits" => {
                    c.width = arity(1)?[0];
                    sized = true;
                    continue;
                }
                "register" => {
                    if rest.len() != 3 {
                        return Err(err("register takes name start len"));
                    }
                    let v = nums(&rest[1..])?;
                    if v[0] + v[1] > c.width {
                        return Err(err("register exceeds width"));
                    }
                    c.registers.push(Register {
                        name: rest[0].to_string(),
                        start: v[0],
                        len: v[1],
                    });
                    continue;
                }
                "ancilla" => {
                    c.ancillas.extend(nums(&rest)?);
                    continue;
                }
                "NOT" => Gate::Not(arity(1)?[0]),
                "H" => Gate::H(arity(1)?[0]),
                "S" => Gate::S(arity(1)?[0]),
                "SDG" => Gate::Sdg(arity(1)?[0]),
                "T" => Gate::T(arity(1)?[0]),
                "TDG" => Gate::Tdg(arity(1)?[0]),
                "CNOT" => {
                    let v = arity(2)?;
                    Gate::Cnot {
                        control: v[0],
                        target: v[1],
                    }
                }
                "TOF" => {
                    let v = arity(3)?;
                    Gate::Toffoli {
                        c0: v[0],
                        c1: v[1],
                        target: v[2],
                    }
                }
                "MCX" => {
                    let mut v = nums(&rest)?;
                    let target = v.pop().ok_or_else(|| err("MCX needs operands"))?;
                    Gate::Mcx {
                        controls: v,
                        target,
                    }
                }
                "XORC" => {
                    if rest.len() < 2 {
                        return Err(err("XORC takes role value qubits"));
                    }
                    let role = match rest[0] {
                        "round" => ConstRole::RoundConstant,
                        "pattern" => ConstRole::Pattern,
                        r => return Err(err(&format!("unknown role `{r}`"))),
                    };
                    let v = rest[1].trim_start_matches("0x");
                    let value = u64::from_str_radix(v, 16).map_err(|_| err("bad constant"))?;
                    Gate::XorConst {
                        role,
                        value,
                        qubits: nums(&rest[2..])?,
                    }
                }
                "BARRIER" => Gate::Barrier(nums(&rest)?),
                "PREP" => {
                    let label = rest.first().ok_or_else(|| err("PREP needs a label"))?;
                    Gate::Prep {
                        label: label.to_string(),
                        qubits: nums(&rest[1..])?,
                    }
                }
                other => return Err(err(&format!("unknown gate `{other}`"))),
            };
            c.push(gate).map_err(|e| err(&e.to_string()))?;
        }
        if !sized {
            return Err(Error::Parse {
                line: 0,
                msg: "empty circuit".into(),
            });
        }
        Ok(c)
    }

    /// OpenQASM 2.0 over the Clifford+T+Toffoli basis. Multi-controlled
    /// gates must be lowered first.
    pub fn to_qasm(&self) -> Result<String> {
        let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(s, "qreg q[{}];", self.width.max(1));
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Not(q) => {
                    let _ = writeln!(s, "x q[{q}];");
                }
                Gate::Cnot { control, target } => {
                    let _ = writeln!(s, "cx q[{control}],q[{target}];");
                }
                Gate::Toffoli { c0, c1, target } => {
                    let _ = writeln!(s, "ccx q[{c0}],q[{c1}],q[{target}];");
                }
                Gate::H(q) => {
                    let _ = writeln!(s, "h q[{q}];");
                }
                Gate::S(q) => {
                    let _ = writeln!(s, "s q[{q}];");
                }
                Gate::Sdg(q) => {
                    let _ = writeln!(s, "sdg q[{q}];");
                }
                Gate::T(q) => {
                    let _ = writeln!(s, "t q[{q}];");
                }
                Gate::Tdg(q) => {
                    let _ = writeln!(s, "tdg q[{q}];");
                }
                Gate::Mcx { controls, target } => match controls.len() {
                    1 => {
                        let _ = writeln!(s, "cx q[{}],q[{target}];", controls[0]);
                    }
                    2 => {
                        let _ =
                            writeln!(s, "ccx q[{}],q[{}],q[{target}];", controls[0], controls[1]);
                    }
                    _ => return Err(Error::Unlowered(i)),
                },
                Gate::XorConst { value, qubits, .. } => {
                    for (b, q) in qubits.iter().enumerate() {
                        if b < 64 && value >> b & 1 == 1 {
                            let _ = writeln!(s, "x q[{q}];");
                        }
                    }
                }
                Gate::Barrier(qs) => {
                    if !qs.is_empty() {
                        let list: Vec<String> = qs.iter().map(|q| format!("q[{q}]")).collect();
                        let _ = writeln!(s, "barrier {};", list.join(","));
                    }
                }
                Gate::Prep { label, .. } => {
                    let _ = writeln!(s, "// prep {label}");
                }
            }
        }
        Ok(s)
    }
}

fn join(qs: &[Qubit]) -> String {
    qs.iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(0);
        let a = c.add_register("a", 3).unwrap();
        c.add_ancillas("anc", 2).unwrap();
        c.toffoli(a.qubit(0), a.qubit(1), a.qubit(2)).unwrap();
        c.push(Gate::T(0)).unwrap();
        c.mcx(vec![0, 1, 2, 3], 4).unwrap();
        c.push(Gate::XorConst {
            role: ConstRole::RoundConstant,
            value: 5,
            qubits: vec![0, 1, 2],
        })
        .unwrap();
        c.barrier_all().unwrap();
        c.push(Gate::Prep {
            label: "ct".into(),
            qubits: vec![1, 2],
        })
        .unwrap();
        c
    }

    #[test]
    fn text_round_trip() {
        let c = sample();
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_gates() {
        let mut c = Circuit::new(3);
        assert!(matches!(c.cnot(1, 1), Err(Error::DuplicateQubit(1))));
        assert!(matches!(c.not(3), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(c.mcx(vec![], 0), Err(Error::EmptyControls)));
        assert!(Circuit::from_text("NOT 0").is_err());
        assert!(Circuit::from_text("qubits 2\nFOO 1").is_err());
        assert!(matches!(
            Circuit::from_text("qubits 2\nTOF 0 1"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn register_names_unique() {
        let mut c = Circuit::new(0);
        c.add_register("x", 2).unwrap();
        assert!(c.add_register("x", 1).is_err());
        assert!(c.register("y").is_err());
        assert_eq!(c.register("x").unwrap().qubits(), vec![0, 1]);
    }

    #[test]
    fn compose_maps_qubits() {
        let mut inner = Circuit::new(2);
        inner.cnot(0, 1).unwrap();
        let mut outer = Circuit::new(4);
        outer.compose(&inner, &[3, 1]).unwrap();
        assert_eq!(
            outer.gates()[0],
            Gate::Cnot {
                control: 3,
                target: 1
            }
        );
        assert!(matches!(
            outer.compose(&inner, &[2, 2]),
            Err(Error::MapCollision(2))
        ));
        assert!(outer.compose(&inner, &[0]).is_err());
    }

    #[test]
    fn qasm_needs_lowered_mcx() {
        assert!(matches!(sample().to_qasm(), Err(Error::Unlowered(2))));
        let mut c = Circuit::new(3);
        c.toffoli(0, 1, 2).unwrap();
        c.push(Gate::Tdg(0)).unwrap();
        let q = c.to_qasm().unwrap();
        assert!(q.contains("ccx q[0],q[1],q[2];"));
        assert!(q.contains("tdg q[0];"));
    }

    fn arb_gate(w: usize) -> impl Strategy<Value = Gate> {
        let q = 0..w;
        prop_oneof![
            q.clone().prop_map(Gate::Not),
            q.clone().prop_map(Gate::H),
            q.clone().prop_map(Gate::T),
            q.clone().prop_map(Gate::Sdg),
            proptest::sample::subsequence((0..w).collect::<Vec<_>>(), 2)
                .prop_shuffle()
                .prop_map(|v| Gate::Cnot {
                    control: v[0],
                    target: v[1]
                }),
            proptest::sample::subsequence((0..w).collect::<Vec<_>>(), 3)
                .prop_shuffle()
                .prop_map(|v| Gate::Toffoli {
                    c0: v[0],
                    c1: v[1],
                    target: v[2]
                }),
            proptest::sample::subsequence((0..w).collect::<Vec<_>>(), 4).prop_map(|mut v| {
                let t = v.pop().unwrap();
                Gate::Mcx {
                    controls: v,
                    target: t,
                }
            }),
        ]
    }

    proptest! {
        #[test]
        fn double_inverse_is_identity(gates in proptest::collection::vec(arb_gate(6), 0..40)) {
            let c = Circuit::new(6).with_gates(gates).unwrap();
            prop_assert_eq!(c.inverse().inverse(), c);
        }

        #[test]
        fn text_format_round_trips(gates in proptest::collection::vec(arb_gate(6), 0..40)) {
            let c = Circuit::new(6).with_gates(gates).unwrap();
            prop_assert_eq!(Circuit::from_text(&c.to_text()).unwrap(), c);
        }
    }
}
