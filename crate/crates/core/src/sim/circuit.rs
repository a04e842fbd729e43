//! Circuits and the circuit text format.

use super::gate::apply_gate_in_place;
use super::{Gate, GateKind, RealStateVector, Result, SimError};

/// An ordered gate list with register metadata.
///
/// The register layout convention: the last `ancilla_count` qubits are
/// ancillas (expected `|0>` on honest inputs) and the output qubit is the
/// last qubit, `num_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    ancilla_count: usize,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>, ancilla_count: usize) -> Result<Self> {
        if ancilla_count > num_qubits {
            return Err(SimError::IndexOutOfRange {
                index: ancilla_count,
                num_qubits,
            });
        }
        for gate in &gates {
            if gate.max_qubit() > num_qubits {
                return Err(SimError::IndexOutOfRange {
                    index: gate.max_qubit(),
                    num_qubits,
                });
            }
        }
        Ok(QuantumCircuit {
            num_qubits,
            gates,
            ancilla_count,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_count
    }

    /// Number of non-ancilla (witness) qubits.
    pub fn witness_qubits(&self) -> usize {
        self.num_qubits - self.ancilla_count
    }

    /// The designated output qubit: always the last one.
    pub fn output_qubit(&self) -> usize {
        self.num_qubits
    }

    /// Append a no-op `X X` pair on qubit 1 until the gate count reaches
    /// `min`. The represented unitary is unchanged.
    pub fn padded_to_min_gates(&self, min: usize) -> Result<QuantumCircuit> {
        let mut gates = self.gates.clone();
        while gates.len() < min {
            gates.push(Gate::new(GateKind::X, vec![1])?);
            gates.push(Gate::new(GateKind::X, vec![1])?);
        }
        QuantumCircuit::new(self.num_qubits, gates, self.ancilla_count)
    }

    /// State after the first `t` gates, starting from `input`.
    pub fn run_prefix(&self, input: &RealStateVector, t: usize) -> Result<RealStateVector> {
        if input.num_qubits() != self.num_qubits {
            return Err(SimError::DimensionMismatch {
                left: input.num_qubits(),
                right: self.num_qubits,
            });
        }
        let mut state = input.clone();
        for gate in self.gates.iter().take(t) {
            apply_gate_in_place(&mut state, gate)?;
        }
        Ok(state)
    }

    /// Probability that the output qubit measures 1 after the full circuit,
    /// with ancillas initialized to `|0>` and the given witness state on the
    /// leading qubits.
    pub fn acceptance_probability(&self, witness: &RealStateVector) -> Result<f64> {
        if witness.num_qubits() != self.witness_qubits() {
            return Err(SimError::DimensionMismatch {
                left: witness.num_qubits(),
                right: self.witness_qubits(),
            });
        }
        let input = if self.ancilla_count == 0 {
            witness.clone()
        } else {
            witness.tensor(&RealStateVector::zero_state(self.ancilla_count)?)?
        };
        let out = self.run(&input)?;
        out.prob_one(self.output_qubit())
    }
}

/// Run all gates of the circuit on `input`.
pub fn run_circuit(circuit: &QuantumCircuit, input: &RealStateVector) -> Result<RealStateVector> {
    circuit.run_prefix(input, circuit.num_gates())
}

impl QuantumCircuit {
    /// Alias for [`run_circuit`].
    pub fn run(&self, input: &RealStateVector) -> Result<RealStateVector> {
        run_circuit(self, input)
    }
}

/// Parse the circuit text format: header lines `qubits n` / `ancillas k`,
/// `#` comments, then one gate per line (`H 1`, `CNOT 1 2`, `CCZ 1 2 3`).
pub fn parse_circuit(text: &str) -> Result<QuantumCircuit> {
    let mut num_qubits: Option<usize> = None;
    let mut ancillas: usize = 0;
    let mut gates = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().unwrap();
        match head {
            "qubits" => {
                let v = fields.next().ok_or_else(|| SimError::Parse {
                    line: lineno,
                    msg: "missing qubit count".into(),
                })?;
                num_qubits = Some(v.parse().map_err(|_| SimError::Parse {
                    line: lineno,
                    msg: format!("bad qubit count '{v}'"),
                })?);
            }
            "ancillas" => {
                let v = fields.next().ok_or_else(|| SimError::Parse {
                    line: lineno,
                    msg: "missing ancilla count".into(),
                })?;
                ancillas = v.parse().map_err(|_| SimError::Parse {
                    line: lineno,
                    msg: format!("bad ancilla count '{v}'"),
                })?;
            }
            name => {
                let kind = GateKind::from_name(name).ok_or_else(|| SimError::Parse {
                    line: lineno,
                    msg: format!("unknown gate '{name}'"),
                })?;
                let mut qubits = Vec::new();
                for field in fields {
                    qubits.push(field.parse().map_err(|_| SimError::Parse {
                        line: lineno,
                        msg: format!("bad qubit index '{field}'"),
                    })?);
                }
                let gate = Gate::new(kind, qubits).map_err(|e| SimError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                gates.push(gate);
            }
        }
    }

    let num_qubits = num_qubits.ok_or(SimError::Parse {
        line: 0,
        msg: "missing 'qubits' header".into(),
    })?;
    QuantumCircuit::new(num_qubits, gates, ancillas)
}

/// Serialize to the circuit text format.
pub fn write_circuit(circuit: &QuantumCircuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", circuit.num_qubits()));
    out.push_str(&format!("ancillas {}\n", circuit.ancilla_count()));
    for gate in circuit.gates() {
        out.push_str(&format!("{gate}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1_circuit() -> QuantumCircuit {
        QuantumCircuit::new(1, vec![Gate::new(GateKind::H, vec![1]).unwrap()], 0).unwrap()
    }

    #[test]
    fn single_hadamard_makes_plus() {
        let out = h1_circuit()
            .run(&RealStateVector::zero_state(1).unwrap())
            .unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - r).abs() < 1e-15);
        assert!((out.amplitudes()[1] - r).abs() < 1e-15);
    }

    #[test]
    fn empty_prefix_is_identity() {
        let c = h1_circuit();
        let s = RealStateVector::zero_state(1).unwrap();
        let out = c.run_prefix(&s, 0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn double_hadamard_is_identity() {
        let g = Gate::new(GateKind::H, vec![1]).unwrap();
        let c = QuantumCircuit::new(1, vec![g.clone(), g], 0).unwrap();
        let s = RealStateVector::zero_state(1).unwrap();
        let out = c.run(&s).unwrap();
        assert!((out.amplitudes()[0] - 1.0).abs() < 1e-15);
        assert!(out.amplitudes()[1].abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let c = h1_circuit();
        let s = RealStateVector::zero_state(2).unwrap();
        assert!(matches!(c.run(&s), Err(SimError::DimensionMismatch { .. })));
    }

    #[test]
    fn parse_and_write_round_trip() {
        let text = "qubits 3\nancillas 1\nH 1\nCNOT 1 2\nCCZ 1 2 3\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.num_qubits(), 3);
        assert_eq!(c.ancilla_count(), 1);
        assert_eq!(c.num_gates(), 3);
        assert_eq!(write_circuit(&c), text);
    }

    #[test]
    fn parse_errors_have_line_numbers() {
        match parse_circuit("qubits 2\nFOO 1\n") {
            Err(SimError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_circuit("qubits 2\nH 1 2\n") {
            Err(SimError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn padding_preserves_unitary() {
        let c = h1_circuit();
        let padded = c.padded_to_min_gates(2).unwrap();
        assert!(padded.num_gates() >= 2);
        let s = RealStateVector::zero_state(1).unwrap();
        let a = c.run(&s).unwrap();
        let b = padded.run(&s).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn acceptance_probability_of_constant_accept() {
        // X on the output/ancilla qubit: accepts everything.
        let c = QuantumCircuit::new(
            2,
            vec![
                Gate::new(GateKind::X, vec![2]).unwrap(),
                Gate::new(GateKind::X, vec![1]).unwrap(),
                Gate::new(GateKind::X, vec![1]).unwrap(),
            ],
            1,
        )
        .unwrap();
        let w = RealStateVector::zero_state(1).unwrap();
        assert!((c.acceptance_probability(&w).unwrap() - 1.0).abs() < 1e-15);
    }
}
