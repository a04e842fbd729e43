//! The Hermitian Y-free gate set.

use super::{RealStateVector, Result, SimError};
use nalgebra::DMatrix;
use std::fmt;

/// Supported gate kinds. Every matrix is real, Hermitian, unitary, and has a
/// Y-free Pauli decomposition, which the Hamiltonian compiler relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
    Cz,
    Ccx,
    Ccz,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cz => 2,
            GateKind::Ccx | GateKind::Ccz => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Ccx => "CCX",
            GateKind::Ccz => "CCZ",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        match name {
            "H" => Some(GateKind::H),
            "X" => Some(GateKind::X),
            "Z" => Some(GateKind::Z),
            "CNOT" => Some(GateKind::Cnot),
            "CZ" => Some(GateKind::Cz),
            "CCX" => Some(GateKind::Ccx),
            "CCZ" => Some(GateKind::Ccz),
            _ => None,
        }
    }

    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Ccx,
        GateKind::Ccz,
    ];

    /// Dense matrix on `arity` qubits, operand order = qubit order
    /// (first operand is the most significant bit).
    pub fn matrix(&self) -> DMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            GateKind::H => DMatrix::from_row_slice(2, 2, &[s, s, s, -s]),
            GateKind::X => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            GateKind::Z => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            GateKind::Cnot => {
                let mut m = DMatrix::identity(4, 4);
                // |10> <-> |11|
                m[(2, 2)] = 0.0;
                m[(3, 3)] = 0.0;
                m[(2, 3)] = 1.0;
                m[(3, 2)] = 1.0;
                m
            }
            GateKind::Cz => {
                let mut m = DMatrix::identity(4, 4);
                m[(3, 3)] = -1.0;
                m
            }
            GateKind::Ccx => {
                let mut m = DMatrix::identity(8, 8);
                m[(6, 6)] = 0.0;
                m[(7, 7)] = 0.0;
                m[(6, 7)] = 1.0;
                m[(7, 6)] = 1.0;
                m
            }
            GateKind::Ccz => {
                let mut m = DMatrix::identity(8, 8);
                m[(7, 7)] = -1.0;
                m
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A gate applied to specific (distinct, 1-based) qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(SimError::BadArity {
                kind: kind.name(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q == 0 {
                return Err(SimError::IndexOutOfRange {
                    index: 0,
                    num_qubits: 0,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(SimError::DuplicateQubit { index: q });
            }
        }
        Ok(Gate { kind, qubits })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits.iter().copied().max().unwrap_or(0)
    }

    /// Re-index operands through `map` (local qubit `i` -> `map[i-1]`).
    pub fn remap(&self, map: &[usize]) -> Result<Gate> {
        let mut qubits = Vec::with_capacity(self.qubits.len());
        for &q in &self.qubits {
            let mapped = *map.get(q - 1).ok_or(SimError::IndexOutOfRange {
                index: q,
                num_qubits: map.len(),
            })?;
            qubits.push(mapped);
        }
        Gate::new(self.kind, qubits)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// Apply a gate, returning the new state. Norm is preserved exactly up to
/// floating-point rounding.
pub fn apply_gate(state: &RealStateVector, gate: &Gate) -> Result<RealStateVector> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate)?;
    Ok(out)
}

pub(crate) fn apply_gate_in_place(state: &mut RealStateVector, gate: &Gate) -> Result<()> {
    let n = state.num_qubits();
    for &q in gate.qubits() {
        if q == 0 || q > n {
            return Err(SimError::IndexOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
    }
    let bit = |q: usize| 1usize << (n - q);
    let amps = state.amplitudes_mut();
    let dim = amps.len();
    match gate.kind() {
        GateKind::H => {
            let t = bit(gate.qubits()[0]);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & t == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | t];
                    amps[i] = s * (a0 + a1);
                    amps[i | t] = s * (a0 - a1);
                }
            }
        }
        GateKind::X => {
            let t = bit(gate.qubits()[0]);
            for i in 0..dim {
                if i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Z => {
            let t = bit(gate.qubits()[0]);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & t != 0 {
                    *a = -*a;
                }
            }
        }
        GateKind::Cnot => {
            let c = bit(gate.qubits()[0]);
            let t = bit(gate.qubits()[1]);
            for i in 0..dim {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Cz => {
            let a = bit(gate.qubits()[0]);
            let b = bit(gate.qubits()[1]);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & a != 0 && i & b != 0 {
                    *amp = -*amp;
                }
            }
        }
        GateKind::Ccx => {
            let c1 = bit(gate.qubits()[0]);
            let c2 = bit(gate.qubits()[1]);
            let t = bit(gate.qubits()[2]);
            for i in 0..dim {
                if i & c1 != 0 && i & c2 != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Ccz => {
            let c1 = bit(gate.qubits()[0]);
            let c2 = bit(gate.qubits()[1]);
            let c3 = bit(gate.qubits()[2]);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & c1 != 0 && i & c2 != 0 && i & c3 != 0 {
                    *amp = -*amp;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_on_zero() {
        let s = RealStateVector::zero_state(1).unwrap();
        let g = Gate::new(GateKind::H, vec![1]).unwrap();
        let out = apply_gate(&s, &g).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - r).abs() < 1e-15);
        assert!((out.amplitudes()[1] - r).abs() < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        // |11> -> |10>
        let s = RealStateVector::basis_state(2, 0b11).unwrap();
        let g = Gate::new(GateKind::Cnot, vec![1, 2]).unwrap();
        let out = apply_gate(&s, &g).unwrap();
        assert_eq!(out.amplitudes()[0b10], 1.0);
    }

    #[test]
    fn ccz_phases_only_111() {
        let g = Gate::new(GateKind::Ccz, vec![1, 2, 3]).unwrap();
        for idx in 0..8u64 {
            let s = RealStateVector::basis_state(3, idx).unwrap();
            let out = apply_gate(&s, &g).unwrap();
            let expected = if idx == 7 { -1.0 } else { 1.0 };
            assert_eq!(out.amplitudes()[idx as usize], expected);
        }
    }

    #[test]
    fn gate_matrices_match_simulation() {
        // Column j of the matrix must equal the gate applied to |j>.
        for kind in GateKind::ALL {
            let k = kind.arity();
            let m = kind.matrix();
            let qubits: Vec<usize> = (1..=k).collect();
            let gate = Gate::new(kind, qubits).unwrap();
            for j in 0..(1u64 << k) {
                let s = RealStateVector::basis_state(k, j).unwrap();
                let out = apply_gate(&s, &gate).unwrap();
                for (i, &a) in out.amplitudes().iter().enumerate() {
                    assert!(
                        (m[(i, j as usize)] - a).abs() < 1e-15,
                        "{kind:?} column {j} row {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn every_gate_is_an_involution() {
        use crate::seeds::rng_from;
        use rand::Rng;
        let mut rng = rng_from(11);
        for kind in GateKind::ALL {
            let n = 4;
            let mut qubits: Vec<usize> = (1..=n).collect();
            // Pick `arity` distinct targets.
            for i in 0..kind.arity() {
                let j = rng.random_range(i..n);
                qubits.swap(i, j);
            }
            let gate = Gate::new(kind, qubits[..kind.arity()].to_vec()).unwrap();
            let amps: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
            let state = RealStateVector::from_amplitudes_normalized(amps).unwrap();
            let once = apply_gate(&state, &gate).unwrap();
            let twice = apply_gate(&once, &gate).unwrap();
            let diff: f64 = state
                .amplitudes()
                .iter()
                .zip(twice.amplitudes())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "{kind:?} squared differs by {diff}");
        }
    }

    #[test]
    fn arity_and_duplicates_rejected() {
        assert!(Gate::new(GateKind::Cnot, vec![1]).is_err());
        assert!(Gate::new(GateKind::Cnot, vec![1, 1]).is_err());
    }

    #[test]
    fn out_of_range_rejected_at_apply() {
        let s = RealStateVector::zero_state(1).unwrap();
        let g = Gate::new(GateKind::X, vec![2]).unwrap();
        assert!(matches!(
            apply_gate(&s, &g),
            Err(SimError::IndexOutOfRange { .. })
        ));
    }
}
