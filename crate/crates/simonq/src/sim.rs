//! Simulators: a computational-basis simulator for reversible circuits of any
//! width, and a dense statevector simulator for small ones.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Qubit, Register};
use crate::error::{Error, Result};

/// Bit string over the qubits of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    words: Vec<u64>,
    width: usize,
}

impl BasisState {
    pub fn zeros(width: usize) -> Self {
        BasisState {
            words: vec![0; width.div_ceil(64).max(1)],
            width,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, q: Qubit) -> bool {
        self.words[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn set(&mut self, q: Qubit, v: bool) {
        let m = 1u64 << (q % 64);
        if v {
            self.words[q / 64] |= m;
        } else {
            self.words[q / 64] &= !m;
        }
    }

    pub fn flip(&mut self, q: Qubit) {
        self.words[q / 64] ^= 1 << (q % 64);
    }

    /// Writes `value` into the register, bit i on qubit start+i.
    pub fn set_register(&mut self, r: &Register, value: u128) {
        for i in 0..r.len {
            self.set(r.start + i, i < 128 && value >> i & 1 == 1);
        }
    }

    pub fn register(&self, r: &Register) -> u128 {
        (0..r.len.min(128)).fold(0, |v, i| v | (self.get(r.start + i) as u128) << i)
    }

    pub fn set_bits(&mut self, qubits: &[Qubit], value: u128) {
        for (i, &q) in qubits.iter().enumerate() {
            self.set(q, value >> i & 1 == 1);
        }
    }

    pub fn bits(&self, qubits: &[Qubit]) -> u128 {
        qubits
            .iter()
            .enumerate()
            .fold(0, |v, (i, &q)| v | (self.get(q) as u128) << i)
    }

    pub fn is_zero_on(&self, qubits: &[Qubit]) -> bool {
        qubits.iter().all(|&q| !self.get(q))
    }
}

pub fn apply_basis(g: &Gate, s: &mut BasisState) -> Result<()> {
    match g {
        Gate::Not(q) => s.flip(*q),
        Gate::Cnot { control, target } => {
            if s.get(*control) {
                s.flip(*target)
            }
        }
        Gate::Toffoli { c0, c1, target } => {
            if s.get(*c0) && s.get(*c1) {
                s.flip(*target)
            }
        }
        Gate::Mcx { controls, target } => {
            if controls.iter().all(|&c| s.get(c)) {
                s.flip(*target)
            }
        }
        Gate::XorConst { value, qubits, .. } => {
            for (i, &q) in qubits.iter().enumerate() {
                if i < 64 && value >> i & 1 == 1 {
                    s.flip(q);
                }
            }
        }
        Gate::Barrier(_) | Gate::Prep { .. } => {}
        // Diagonal phases leave basis states in place.
        Gate::S(_) | Gate::Sdg(_) | Gate::T(_) | Gate::Tdg(_) => {}
        Gate::H(q) => return Err(Error::NonClassicalGate(format!("H {q}"))),
    }
    Ok(())
}

/// Runs a reversible circuit on a basis state.
pub fn simulate_basis(c: &Circuit, s: &mut BasisState) -> Result<()> {
    if s.width != c.width() {
        return Err(Error::WidthMismatch {
            expected: c.width(),
            got: s.width,
        });
    }
    for g in c.gates() {
        apply_basis(g, s)?;
    }
    Ok(())
}

/// Runs a reversible circuit on 64 basis states at once: bit j of
/// `lanes[q]` is qubit q of input j.
pub fn simulate_bitsliced(c: &Circuit, lanes: &mut [u64]) -> Result<()> {
    if lanes.len() != c.width() {
        return Err(Error::WidthMismatch {
            expected: c.width(),
            got: lanes.len(),
        });
    }
    for g in c.gates() {
        match g {
            Gate::Not(q) => lanes[*q] = !lanes[*q],
            Gate::Cnot { control, target } => lanes[*target] ^= lanes[*control],
            Gate::Toffoli { c0, c1, target } => lanes[*target] ^= lanes[*c0] & lanes[*c1],
            Gate::Mcx { controls, target } => {
                lanes[*target] ^= controls.iter().fold(!0, |a, &q| a & lanes[q])
            }
            Gate::XorConst { value, qubits, .. } => {
                for (i, &q) in qubits.iter().enumerate() {
                    if i < 64 && value >> i & 1 == 1 {
                        lanes[q] = !lanes[q];
                    }
                }
            }
            Gate::Barrier(_) | Gate::Prep { .. } => {}
            Gate::S(_) | Gate::Sdg(_) | Gate::T(_) | Gate::Tdg(_) => {}
            Gate::H(q) => return Err(Error::NonClassicalGate(format!("H {q}"))),
        }
    }
    Ok(())
}

pub const MAX_STATEVECTOR_QUBITS: usize = 24;

#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::TooWide(n, MAX_STATEVECTOR_QUBITS));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[f(i)] = *a;
        }
        self.amps = out;
    }

    fn phase(&mut self, q: Qubit, p: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i >> q & 1 == 1 {
                *a *= p;
            }
        }
    }

    pub fn apply(&mut self, g: &Gate) {
        let bit = |i: usize, q: usize| i >> q & 1 == 1;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match g {
            Gate::Not(q) => {
                let q = *q;
                self.permute(|i| i ^ 1 << q)
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (*control, *target);
                self.permute(|i| if bit(i, c) { i ^ 1 << t } else { i })
            }
            Gate::Toffoli { c0, c1, target } => {
                let (a, b, t) = (*c0, *c1, *target);
                self.permute(|i| {
                    if bit(i, a) && bit(i, b) {
                        i ^ 1 << t
                    } else {
                        i
                    }
                })
            }
            Gate::Mcx { controls, target } => {
                let m: usize = controls.iter().map(|&c| 1 << c).sum();
                let t = *target;
                self.permute(|i| if i & m == m { i ^ 1 << t } else { i })
            }
            Gate::XorConst { value, qubits, .. } => {
                let m: usize = qubits
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| *b < 64 && value >> b & 1 == 1)
                    .map(|(_, &q)| 1 << q)
                    .sum();
                self.permute(|i| i ^ m)
            }
            Gate::H(q) => {
                let q = *q;
                for i in 0..self.amps.len() {
                    if !bit(i, q) {
                        let j = i | 1 << q;
                        let (a, b) = (self.amps[i], self.amps[j]);
                        self.amps[i] = (a + b) * r;
                        self.amps[j] = (a - b) * r;
                    }
                }
            }
            Gate::S(q) => self.phase(*q, Complex64::new(0.0, 1.0)),
            Gate::Sdg(q) => self.phase(*q, Complex64::new(0.0, -1.0)),
            Gate::T(q) => self.phase(*q, Complex64::new(r, r)),
            Gate::Tdg(q) => self.phase(*q, Complex64::new(r, -r)),
            Gate::Barrier(_) | Gate::Prep { .. } => {}
        }
    }

    pub fn run(&mut self, c: &Circuit) -> Result<()> {
        if c.width() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                got: c.width(),
            });
        }
        for g in c.gates() {
            self.apply(g);
        }
        Ok(())
    }
}

/// Column-major unitary of a small circuit: entry [col][row].
pub fn unitary(c: &Circuit) -> Result<Vec<Vec<Complex64>>> {
    (0..1usize << c.width())
        .map(|col| {
            let mut s = StateVector::basis(c.width(), col)?;
            s.run(c)?;
            Ok(s.amps)
        })
        .collect()
}

/// Max-norm distance between two unitaries after removing a global phase.
pub fn distance_up_to_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let mut phase = None;
    'outer: for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            if y.norm() > 1e-9 {
                phase = Some(x / y);
                break 'outer;
            }
        }
    }
    let p = phase.unwrap_or(Complex64::new(1.0, 0.0));
    a.iter()
        .zip(b)
        .flat_map(|(ca, cb)| ca.iter().zip(cb).map(move |(x, y)| (x - y * p).norm()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_toffoli_truth_table() {
        let mut c = Circuit::new(3);
        c.toffoli(0, 1, 2).unwrap();
        for x in 0..8u128 {
            let mut s = BasisState::zeros(3);
            s.set_bits(&[0, 1, 2], x);
            simulate_basis(&c, &mut s).unwrap();
            let want = if x & 3 == 3 { x ^ 4 } else { x };
            assert_eq!(s.bits(&[0, 1, 2]), want);
        }
    }

    #[test]
    fn hadamard_is_rejected_in_basis_mode() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        let mut s = BasisState::zeros(1);
        assert!(matches!(
            simulate_basis(&c, &mut s),
            Err(Error::NonClassicalGate(_))
        ));
    }

    #[test]
    fn wide_state_bits() {
        let mut s = BasisState::zeros(200);
        s.set(150, true);
        assert!(s.get(150));
        s.flip(150);
        assert!(s.is_zero_on(&(0..200).collect::<Vec<_>>()));
    }

    #[test]
    fn hh_is_identity() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(1)).unwrap();
        c.push(Gate::H(1)).unwrap();
        let mut id = Circuit::new(2);
        id.barrier_all().unwrap();
        assert!(distance_up_to_phase(&unitary(&c).unwrap(), &unitary(&id).unwrap()) < 1e-12);
    }

    #[test]
    fn t_squared_is_s() {
        let mut a = Circuit::new(1);
        a.push(Gate::T(0)).unwrap();
        a.push(Gate::T(0)).unwrap();
        let mut b = Circuit::new(1);
        b.push(Gate::S(0)).unwrap();
        assert!(distance_up_to_phase(&unitary(&a).unwrap(), &unitary(&b).unwrap()) < 1e-12);
    }

    #[test]
    fn bitsliced_agrees_with_basis() {
        let mut c = Circuit::new(5);
        c.toffoli(0, 1, 2).unwrap();
        c.mcx(vec![0, 2, 3], 4).unwrap();
        c.cnot(4, 1).unwrap();
        c.not(3).unwrap();
        let mut lanes = vec![0u64; 5];
        for x in 0..32u64 {
            for q in 0..5 {
                lanes[q] |= (x >> q & 1) << x;
            }
        }
        simulate_bitsliced(&c, &mut lanes).unwrap();
        for x in 0..32u128 {
            let mut s = BasisState::zeros(5);
            s.set_bits(&[0, 1, 2, 3, 4], x);
            simulate_basis(&c, &mut s).unwrap();
            let got = (0..5).fold(0u128, |v, q| v | ((lanes[q] >> x & 1) as u128) << q);
            assert_eq!(got, s.bits(&[0, 1, 2, 3, 4]));
        }
    }

    #[test]
    fn width_limit() {
        assert!(matches!(
            StateVector::basis(25, 0),
            Err(Error::TooWide(25, 24))
        ));
    }
}
