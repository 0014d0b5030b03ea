//! Greedy as-soon-as-possible layering. A gate goes in the first layer after
//! every earlier gate that touches one of its qubits. Barriers and prep
//! markers take no layer of their own but hold back later gates on their
//! qubits until everything before them has finished.

use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DepthLayering {
    /// Gate indices per layer. Markers and empty constants are not listed.
    pub layers: Vec<Vec<usize>>,
}

impl DepthLayering {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of layers holding at least one gate that satisfies `pred`.
    pub fn count_layers(&self, c: &Circuit, pred: impl Fn(&Gate) -> bool) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(|&i| pred(&c.gates()[i])))
            .count()
    }

    pub fn layer_of(&self, gates: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; gates];
        for (l, idx) in self.layers.iter().enumerate() {
            for &i in idx {
                out[i] = Some(l);
            }
        }
        out
    }
}

pub fn is_t(g: &Gate) -> bool {
    matches!(g, Gate::T(_) | Gate::Tdg(_))
}

pub fn is_toffoli(g: &Gate) -> bool {
    matches!(g, Gate::Toffoli { .. })
}

fn layer(c: &Circuit, allow_toffoli: bool) -> Result<DepthLayering> {
    let mut ready = vec![0usize; c.width()];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        match g {
            Gate::Mcx { .. } => return Err(Error::Unlowered(i)),
            Gate::Toffoli { .. } if !allow_toffoli => return Err(Error::Unlowered(i)),
            _ => {}
        }
        if g.is_marker() {
            let qs = g.qubits();
            let m = qs.iter().map(|&q| ready[q]).max().unwrap_or(0);
            for q in qs {
                ready[q] = m;
            }
            continue;
        }
        let qs = g.active_qubits();
        if qs.is_empty() {
            continue;
        }
        let l = qs.iter().map(|&q| ready[q]).max().unwrap_or(0);
        if l == layers.len() {
            layers.push(Vec::new());
        }
        layers[l].push(i);
        for q in qs {
            ready[q] = l + 1;
        }
    }
    Ok(DepthLayering { layers })
}

/// Layering of a Clifford+T circuit.
pub fn schedule_layers(c: &Circuit) -> Result<DepthLayering> {
    layer(c, false)
}

/// Layering of a circuit that may still hold Toffolis (but no wider MCX).
pub fn schedule_toffoli_layers(c: &Circuit) -> Result<DepthLayering> {
    layer(c, true)
}

pub fn toffoli_depth(c: &Circuit) -> Result<usize> {
    Ok(schedule_toffoli_layers(c)?.count_layers(c, is_toffoli))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn disjoint_cnots_share_a_layer() {
        let mut c = Circuit::new(4);
        c.cnot(0, 1).unwrap();
        c.cnot(2, 3).unwrap();
        assert_eq!(schedule_layers(&c).unwrap().depth(), 1);
    }

    #[test]
    fn barrier_holds_back() {
        let mut c = Circuit::new(3);
        c.not(0).unwrap();
        c.not(0).unwrap();
        c.barrier(vec![0, 1]).unwrap();
        c.not(1).unwrap();
        c.not(2).unwrap();
        let l = schedule_layers(&c).unwrap();
        assert_eq!(l.depth(), 3);
        assert_eq!(l.layers[0], vec![0, 4]);
        assert_eq!(l.layers[2], vec![3]);
    }

    #[test]
    fn mcx_must_be_lowered() {
        let mut c = Circuit::new(4);
        c.mcx(vec![0, 1, 2], 3).unwrap();
        assert!(matches!(schedule_layers(&c), Err(Error::Unlowered(0))));
        let mut t = Circuit::new(3);
        t.toffoli(0, 1, 2).unwrap();
        assert!(schedule_layers(&t).is_err());
        assert_eq!(toffoli_depth(&t).unwrap(), 1);
    }

    fn arb_gates(w: usize) -> impl Strategy<Value = Vec<Gate>> {
        let g = prop_oneof![
            (0..w).prop_map(Gate::Not),
            (0..w).prop_map(Gate::T),
            proptest::sample::subsequence((0..w).collect::<Vec<_>>(), 2)
                .prop_shuffle()
                .prop_map(|v| Gate::Cnot {
                    control: v[0],
                    target: v[1]
                }),
            proptest::sample::subsequence((0..w).collect::<Vec<_>>(), 1..w).prop_map(Gate::Barrier),
        ];
        proptest::collection::vec(g, 0..60)
    }

    proptest! {
        #[test]
        fn layering_is_valid_and_order_consistent(gates in arb_gates(6)) {
            let c = Circuit::new(6).with_gates(gates).unwrap();
            let l = schedule_layers(&c).unwrap();
            let at = l.layer_of(c.len());
            for layer in &l.layers {
                let mut seen = std::collections::HashSet::new();
                for &i in layer {
                    for q in c.gates()[i].active_qubits() {
                        prop_assert!(seen.insert(q));
                    }
                }
            }
            for (i, g) in c.gates().iter().enumerate() {
                prop_assert_eq!(at[i].is_some(), !g.is_marker());
                for j in 0..i {
                    let (Some(a), Some(b)) = (at[j], at[i]) else { continue };
                    let share = c.gates()[j].active_qubits().iter()
                        .any(|q| g.active_qubits().contains(q));
                    if share {
                        prop_assert!(a < b);
                    }
                }
            }
        }
    }
}
