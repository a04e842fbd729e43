//! Circuit-to-Hamiltonian compilation via a unary clock register.
//!
//! A circuit with `T` gates on `ell` data qubits compiles to a Hamiltonian on
//! `ell + T` qubits, with the clock held in unary on the trailing `T` qubits.
//! Four components are produced: an ancilla-initialization penalty, a
//! non-unary-clock penalty, a propagation term per gate, and an output
//! penalty at the final time. Every supported gate is Hermitian, so each
//! propagation step reduces to one gate decomposition tensored with a
//! clock-hopping operator.
//!
//! Pauli words are deliberately *not* merged across terms in the compiled
//! output; consumers that need the merged form call
//! [`Hamiltonian::canonicalize`].

use crate::pauli::{decompose_yfree, Hamiltonian, Letter, PauliError, PauliTerm, PauliWord};
use crate::sim::{QuantumCircuit, RealStateVector, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClockError {
    #[error("clock index {value} out of range (max {max})")]
    RangeError { value: usize, max: usize },
    #[error(
        "circuit has {got} gates but compilation needs at least 2; pad with a \
         self-inverse gate pair (e.g. two X gates on a data qubit)"
    )]
    TooFewGates { got: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T> = std::result::Result<T, ClockError>;

/// Unary clock encoding of time `t` with `T` clock qubits: `1^t 0^(T-t)`.
pub fn unary_clock(t: usize, clock_qubits: usize) -> Result<String> {
    if t > clock_qubits {
        return Err(ClockError::RangeError {
            value: t,
            max: clock_qubits,
        });
    }
    let mut s = String::with_capacity(clock_qubits);
    for c in 0..clock_qubits {
        s.push(if c < t { '1' } else { '0' });
    }
    Ok(s)
}

/// Basis index (within the clock block) whose bits are `unary_clock(t, T)`.
fn unary_index(t: usize, clock_qubits: usize) -> u64 {
    // 1^t 0^(T-t) with clock qubit 1 as the most significant bit.
    ((1u64 << clock_qubits) - 1) ^ ((1u64 << (clock_qubits - t)) - 1)
}

/// Which clock operator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockOperator {
    /// Projector onto clock value `j`: `clock(|j><j|)`.
    Diag(usize),
    /// Hermitian hop `clock(|j><j-1|) + clock(|j-1><j|)` for `j >= 1`.
    Hop(usize),
}

/// Single-qubit projector `|value><value|` as a Hamiltonian on `q` qubits:
/// `1/2 (I +- Z)`.
fn projector(q: usize, qubit: usize, value: bool) -> Hamiltonian {
    let sign = if value { -0.5 } else { 0.5 };
    Hamiltonian::new(
        q,
        [
            PauliTerm::new(0.5, PauliWord::identity(q)),
            PauliTerm::new(sign, PauliWord::single(q, qubit, Letter::Z).unwrap()),
        ],
    )
    .unwrap()
}

fn x_word(q: usize, qubit: usize) -> Hamiltonian {
    Hamiltonian::single(q, 1.0, qubit, Letter::X).unwrap()
}

/// Y-free decomposition of a clock operator on `T` qubits.
///
/// The unary encoding makes each of these at most 3-local:
/// `diag(0) = |0><0|_1`, `diag(j) = |10><10|` at positions `(j, j+1)`,
/// `diag(T) = |1><1|_T`, and each hop flips one clock qubit under diagonal
/// neighbor constraints, i.e. a diagonal tensor an `X`.
pub fn clock_operator(kind: ClockOperator, clock_qubits: usize) -> Result<Hamiltonian> {
    let t_count = clock_qubits;
    if t_count < 2 {
        return Err(ClockError::TooFewGates { got: t_count });
    }
    match kind {
        ClockOperator::Diag(j) => {
            if j > t_count {
                return Err(ClockError::RangeError {
                    value: j,
                    max: t_count,
                });
            }
            Ok(if j == 0 {
                projector(t_count, 1, false)
            } else if j == t_count {
                projector(t_count, t_count, true)
            } else {
                projector(t_count, j, true).product_disjoint(&projector(t_count, j + 1, false))?
            })
        }
        ClockOperator::Hop(j) => {
            if j == 0 || j > t_count {
                return Err(ClockError::RangeError {
                    value: j,
                    max: t_count,
                });
            }
            Ok(if j == 1 {
                // X_1 (x) |0><0|_2
                x_word(t_count, 1).product_disjoint(&projector(t_count, 2, false))?
            } else if j == t_count {
                // |1><1|_{T-1} (x) X_T
                projector(t_count, t_count - 1, true).product_disjoint(&x_word(t_count, t_count))?
            } else {
                // |1><1|_{j-1} (x) X_j (x) |0><0|_{j+1}
                projector(t_count, j - 1, true)
                    .product_disjoint(&x_word(t_count, j))?
                    .product_disjoint(&projector(t_count, j + 1, false))?
            })
        }
    }
}

/// The compiled Hamiltonian and its bookkeeping.
#[derive(Debug, Clone)]
pub struct ClockBundle {
    data_qubits: usize,
    ancilla_count: usize,
    clock_qubits: usize,
    h_init: Hamiltonian,
    h_clock: Hamiltonian,
    h_prop: Hamiltonian,
    h_final: Hamiltonian,
    h_total: Hamiltonian,
    init_terms: Vec<Hamiltonian>,
    clock_terms: Vec<Hamiltonian>,
    prop_terms: Vec<Hamiltonian>,
    pre_expansion_terms: usize,
    one_norm_bound: f64,
}

impl ClockBundle {
    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_count
    }

    pub fn clock_qubits(&self) -> usize {
        self.clock_qubits
    }

    /// Total register size `ell + T`.
    pub fn total_qubits(&self) -> usize {
        self.data_qubits + self.clock_qubits
    }

    pub fn h_init(&self) -> &Hamiltonian {
        &self.h_init
    }

    pub fn h_clock(&self) -> &Hamiltonian {
        &self.h_clock
    }

    pub fn h_prop(&self) -> &Hamiltonian {
        &self.h_prop
    }

    pub fn h_final(&self) -> &Hamiltonian {
        &self.h_final
    }

    /// The full Hamiltonian, duplicate words kept.
    pub fn h_total(&self) -> &Hamiltonian {
        &self.h_total
    }

    /// Per-gate propagation terms, in gate order.
    pub fn prop_terms(&self) -> &[Hamiltonian] {
        &self.prop_terms
    }

    /// Per-ancilla initialization penalties, each an exact projector.
    pub fn init_penalties(&self) -> &[Hamiltonian] {
        &self.init_terms
    }

    /// Per-window non-unary clock penalties, each an exact projector. The
    /// summed component is a projector only when no two windows can fire
    /// together, i.e. for T <= 3.
    pub fn clock_penalties(&self) -> &[Hamiltonian] {
        &self.clock_terms
    }

    /// Number of projector/propagation summands before Pauli expansion:
    /// `|Q|` (init) + `T-1` (clock) + `T` (prop) + `1` (final).
    pub fn pre_expansion_terms(&self) -> usize {
        self.pre_expansion_terms
    }

    /// Bound on the total Pauli 1-norm recorded at compile time: each
    /// pre-expansion term is at most 6-local with operator norm at most 2,
    /// so its 1-norm is at most `2^6 * 2 = 128`.
    pub fn one_norm_bound(&self) -> f64 {
        self.one_norm_bound
    }
}

/// Compile a circuit into its clock Hamiltonian.
///
/// The data register keeps the circuit's qubit indices `1..=ell` (ancillas
/// are the trailing `|Q|` of them, the output is qubit `ell`); clock qubit
/// `j` lands on global index `ell + j`.
pub fn compile(circuit: &QuantumCircuit) -> Result<ClockBundle> {
    let t_count = circuit.num_gates();
    if t_count < 2 {
        return Err(ClockError::TooFewGates { got: t_count });
    }
    let ell = circuit.num_qubits();
    let anc = circuit.ancilla_count();
    let total = ell + t_count;

    let clock_map: Vec<usize> = (1..=t_count).map(|j| ell + j).collect();
    let embed_clock = |h: &Hamiltonian| h.embed(&clock_map, total);

    // Ancillas must be |0> at time 0.
    let mut init_parts = Vec::new();
    let diag0 = embed_clock(&clock_operator(ClockOperator::Diag(0), t_count)?)?;
    for i in 1..=anc {
        let anc_qubit = ell - anc + i;
        init_parts.push(projector(total, anc_qubit, true).product_disjoint(&diag0)?);
    }
    let h_init = if init_parts.is_empty() {
        Hamiltonian::empty(total)
    } else {
        Hamiltonian::concat(&init_parts.iter().collect::<Vec<_>>())?
    };

    // Penalize the non-unary pattern "01" on adjacent clock qubits.
    let mut clock_parts = Vec::new();
    for j in 1..t_count {
        clock_parts.push(
            projector(total, ell + j, false).product_disjoint(&projector(
                total,
                ell + j + 1,
                true,
            ))?,
        );
    }
    let h_clock = if clock_parts.is_empty() {
        Hamiltonian::empty(total)
    } else {
        Hamiltonian::concat(&clock_parts.iter().collect::<Vec<_>>())?
    };

    // Propagation: every gate is Hermitian, so the two off-diagonal clock
    // terms collapse into one gate decomposition times the Hermitian hop.
    let mut prop_terms = Vec::with_capacity(t_count);
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let j = idx + 1;
        let diag_j = embed_clock(&clock_operator(ClockOperator::Diag(j), t_count)?)?;
        let diag_prev = embed_clock(&clock_operator(ClockOperator::Diag(j - 1), t_count)?)?;
        let hop_j = embed_clock(&clock_operator(ClockOperator::Hop(j), t_count)?)?;

        let gate_dec = decompose_yfree(&gate.kind().matrix(), 1e-12)?;
        let gate_embedded = gate_dec.embed(gate.qubits(), total)?;

        let step = Hamiltonian::concat(&[
            &diag_j.scale(0.5),
            &diag_prev.scale(0.5),
            &gate_embedded.product_disjoint(&hop_j)?.scale(-0.5),
        ])?;
        prop_terms.push(step);
    }
    let h_prop = Hamiltonian::concat(&prop_terms.iter().collect::<Vec<_>>())?;

    // Output qubit must not be |0> at time T.
    let diag_t = embed_clock(&clock_operator(ClockOperator::Diag(t_count), t_count)?)?;
    let h_final = projector(total, ell, false).product_disjoint(&diag_t)?;

    let h_total = Hamiltonian::concat(&[&h_prop, &h_init, &h_clock, &h_final])?;

    let pre_expansion_terms = anc + (t_count - 1) + t_count + 1;
    let one_norm_bound = 128.0 * pre_expansion_terms as f64;

    Ok(ClockBundle {
        data_qubits: ell,
        ancilla_count: anc,
        clock_qubits: t_count,
        h_init,
        h_clock,
        h_prop,
        h_final,
        h_total,
        init_terms: init_parts,
        clock_terms: clock_parts,
        prop_terms,
        pre_expansion_terms,
        one_norm_bound,
    })
}

/// A history state together with its provenance.
#[derive(Debug, Clone)]
pub struct HistoryState {
    state: RealStateVector,
    clock_qubits: usize,
    input_label: String,
}

impl HistoryState {
    pub fn state(&self) -> &RealStateVector {
        &self.state
    }

    pub fn into_state(self) -> RealStateVector {
        self.state
    }

    pub fn clock_qubits(&self) -> usize {
        self.clock_qubits
    }

    pub fn input_label(&self) -> &str {
        &self.input_label
    }
}

/// Uniform superposition over partial executions tagged by unary clock
/// times: `1/sqrt(T+1) sum_t U_{<=t} |input> (x) |1^t 0^(T-t)>`.
pub fn history_state(circuit: &QuantumCircuit, input: &RealStateVector) -> Result<HistoryState> {
    history_state_labeled(circuit, input, "unnamed input")
}

pub fn history_state_labeled(
    circuit: &QuantumCircuit,
    input: &RealStateVector,
    label: &str,
) -> Result<HistoryState> {
    let ell = circuit.num_qubits();
    if input.num_qubits() != ell {
        return Err(SimError::DimensionMismatch {
            left: input.num_qubits(),
            right: ell,
        }
        .into());
    }
    let t_count = circuit.num_gates();
    let total = ell + t_count;
    let dim = 1usize
        .checked_shl(total as u32)
        .filter(|_| total <= crate::sim::MAX_QUBITS)
        .ok_or(SimError::TooLarge {
            qubits: total,
            max: crate::sim::MAX_QUBITS,
        })?;

    let weight = 1.0 / ((t_count + 1) as f64).sqrt();
    let mut amplitudes = vec![0.0; dim];
    let mut partial = input.clone();
    for t in 0..=t_count {
        if t > 0 {
            partial = crate::sim::apply_gate(&partial, &circuit.gates()[t - 1])?;
        }
        let clock_idx = unary_index(t, t_count);
        for (x, &a) in partial.amplitudes().iter().enumerate() {
            if a != 0.0 {
                let idx = ((x as u64) << t_count) | clock_idx;
                amplitudes[idx as usize] += weight * a;
            }
        }
    }
    let state = RealStateVector::from_amplitudes(amplitudes)?;
    Ok(HistoryState {
        state,
        clock_qubits: t_count,
        input_label: label.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::word_matrix;
    use crate::sim::{expectation, Gate, GateKind};
    use nalgebra::DMatrix;

    fn circuit_hh() -> QuantumCircuit {
        let h = Gate::new(GateKind::H, vec![1]).unwrap();
        QuantumCircuit::new(1, vec![h.clone(), h], 0).unwrap()
    }

    #[test]
    fn unary_clock_examples() {
        assert_eq!(unary_clock(0, 3).unwrap(), "000");
        assert_eq!(unary_clock(3, 3).unwrap(), "111");
        assert_eq!(unary_clock(2, 5).unwrap(), "11000");
        assert!(unary_clock(4, 3).is_err());
    }

    #[test]
    fn diag_zero_is_projector_on_first_clock_qubit() {
        // |0><0| (x) I on 2 clock qubits.
        let h = clock_operator(ClockOperator::Diag(0), 2).unwrap();
        let m = h.to_matrix().unwrap();
        let mut expected = DMatrix::<f64>::zeros(4, 4);
        expected[(0, 0)] = 1.0;
        expected[(1, 1)] = 1.0;
        assert!((m - expected).abs().max() < 1e-12);
    }

    #[test]
    fn diag_t_is_projector_on_last_clock_qubit() {
        // I (x) |1><1| = 1/2 (II - IZ) on 2 clock qubits.
        let h = clock_operator(ClockOperator::Diag(2), 2).unwrap();
        for term in h.terms() {
            if term.word.is_identity() {
                assert!((term.coeff - 0.5).abs() < 1e-15);
            } else {
                assert_eq!(term.word.letter_at(2), Some(Letter::Z));
                assert!((term.coeff + 0.5).abs() < 1e-15);
            }
        }
        let m = h.to_matrix().unwrap();
        let mut expected = DMatrix::<f64>::zeros(4, 4);
        expected[(1, 1)] = 1.0;
        expected[(3, 3)] = 1.0;
        assert!((m - expected).abs().max() < 1e-12);
    }

    #[test]
    fn hop_one_matches_definition() {
        // |10><00| + |00><10| on 2 clock qubits.
        let h = clock_operator(ClockOperator::Hop(1), 2).unwrap();
        let m = h.to_matrix().unwrap();
        let mut expected = DMatrix::<f64>::zeros(4, 4);
        expected[(2, 0)] = 1.0;
        expected[(0, 2)] = 1.0;
        assert!((m - expected).abs().max() < 1e-12);
    }

    #[test]
    fn hop_middle_matches_definition() {
        // T=3, j=2: |110><100| + |100><110|.
        let h = clock_operator(ClockOperator::Hop(2), 3).unwrap();
        let m = h.to_matrix().unwrap();
        let mut expected = DMatrix::<f64>::zeros(8, 8);
        expected[(0b110, 0b100)] = 1.0;
        expected[(0b100, 0b110)] = 1.0;
        assert!((m - expected).abs().max() < 1e-12);
    }

    #[test]
    fn compile_rejects_short_circuits() {
        let c = QuantumCircuit::new(1, vec![Gate::new(GateKind::H, vec![1]).unwrap()], 0).unwrap();
        match compile(&c) {
            Err(ClockError::TooFewGates { got }) => assert_eq!(got, 1),
            other => panic!("expected TooFewGates, got {other:?}"),
        }
    }

    #[test]
    fn compile_hh_shape() {
        let bundle = compile(&circuit_hh()).unwrap();
        assert_eq!(bundle.total_qubits(), 3);
        assert!(bundle.h_init().is_empty());
        // |Q| + (T-1) + T + 1 = 0 + 1 + 2 + 1.
        assert_eq!(bundle.pre_expansion_terms(), 4);
        // h_clock is the single 01-penalty on the clock pair: 4 words.
        assert_eq!(bundle.h_clock().num_terms(), 4);
        assert!(bundle.h_total().one_norm() <= bundle.one_norm_bound());
    }

    #[test]
    fn compiled_terms_are_six_local() {
        let gates = vec![
            Gate::new(GateKind::Ccz, vec![1, 2, 3]).unwrap(),
            Gate::new(GateKind::Ccx, vec![1, 2, 3]).unwrap(),
            Gate::new(GateKind::H, vec![2]).unwrap(),
        ];
        let c = QuantumCircuit::new(3, gates, 1).unwrap();
        let bundle = compile(&c).unwrap();
        assert!(bundle.h_total().max_locality() <= 6);
        assert!(bundle.h_init().max_locality() <= 2);
        assert!(bundle.h_clock().max_locality() <= 2);
        assert!(bundle.h_final().max_locality() <= 2);
    }

    #[test]
    fn compiled_total_is_psd_and_prop_norm_bounded() {
        let bundle = compile(&circuit_hh()).unwrap();
        let m = bundle.h_total().to_matrix().unwrap();
        let eig = m.symmetric_eigen();
        let min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-9, "min eigenvalue {min}");
        assert!(bundle.h_prop().operator_norm().unwrap() <= 2.0 + 1e-9);
    }

    #[test]
    fn projector_components_square_to_themselves() {
        let gates = vec![
            Gate::new(GateKind::X, vec![2]).unwrap(),
            Gate::new(GateKind::H, vec![1]).unwrap(),
            Gate::new(GateKind::Cnot, vec![1, 2]).unwrap(),
        ];
        let c = QuantumCircuit::new(2, gates, 1).unwrap();
        let bundle = compile(&c).unwrap();
        for h in [bundle.h_init(), bundle.h_clock(), bundle.h_final()] {
            let m = h.to_matrix().unwrap();
            assert!(((&m * &m) - &m).abs().max() < 1e-9);
            // Nonzero projectors have operator norm exactly 1.
            assert!((h.operator_norm().unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn history_state_of_hh_is_the_three_term_superposition() {
        // (|0>|00> + |+>|10> + |0>|11>)/sqrt(3)
        let input = RealStateVector::zero_state(1).unwrap();
        let hs = history_state(&circuit_hh(), &input).unwrap();
        let amps = hs.state().amplitudes();
        let s3 = 1.0 / 3f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        let expected = [s3, 0.0, s6, s3, 0.0, 0.0, s6, 0.0];
        for (i, (&got, &want)) in amps.iter().zip(&expected).enumerate() {
            assert!((got - want).abs() < 1e-12, "index {i}: {got} vs {want}");
        }
    }

    #[test]
    fn history_state_energy_ledger_for_hh() {
        let input = RealStateVector::zero_state(1).unwrap();
        let bundle = compile(&circuit_hh()).unwrap();
        let hs = history_state(&circuit_hh(), &input).unwrap();
        let ground =
            Hamiltonian::concat(&[bundle.h_init(), bundle.h_clock(), bundle.h_prop()]).unwrap();
        let e = expectation(hs.state(), &ground).unwrap();
        assert!(e.abs() < 1e-10, "ground energy {e}");

        // p_acc for H H on |0> measuring qubit 1: output returns to |0>, so
        // p_acc = 0 and the final penalty is (1 - 0)/(T+1) = 1/3.
        let ef = expectation(hs.state(), bundle.h_final()).unwrap();
        assert!((ef - 1.0 / 3.0).abs() < 1e-10, "final energy {ef}");
    }

    #[test]
    fn clock_operator_realizations_match_unary_projectors() {
        // diag(j) realized equals the projector built from unary indices.
        for t_count in [2usize, 3, 4] {
            for j in 0..=t_count {
                let m = clock_operator(ClockOperator::Diag(j), t_count)
                    .unwrap()
                    .to_matrix()
                    .unwrap();
                // Check action on every unary clock basis state.
                for t in 0..=t_count {
                    let idx = unary_index(t, t_count) as usize;
                    let expected = if t == j { 1.0 } else { 0.0 };
                    assert!(
                        (m[(idx, idx)] - expected).abs() < 1e-12,
                        "T={t_count} diag({j}) at t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn hop_connects_adjacent_unary_times() {
        for t_count in [2usize, 3, 4] {
            for j in 1..=t_count {
                let m = clock_operator(ClockOperator::Hop(j), t_count)
                    .unwrap()
                    .to_matrix()
                    .unwrap();
                let a = unary_index(j - 1, t_count) as usize;
                let b = unary_index(j, t_count) as usize;
                assert!((m[(b, a)] - 1.0).abs() < 1e-12);
                assert!((m[(a, b)] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn word_matrix_agrees_with_clock_operator_terms() {
        // Spot-check that the term expansion reproduces the realized matrix.
        let h = clock_operator(ClockOperator::Hop(2), 3).unwrap();
        let mut acc = DMatrix::<f64>::zeros(8, 8);
        for t in h.terms() {
            acc += word_matrix(&t.word).unwrap() * t.coeff;
        }
        assert!((acc - h.to_matrix().unwrap()).abs().max() < 1e-12);
    }
}
