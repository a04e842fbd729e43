//! Exact real-amplitude statevector simulation.
//!
//! States are dense vectors of `2^n` real amplitudes, hard-capped at 20
//! qubits. Qubit indexing is big-endian and 1-based everywhere: qubit 1 is
//! the most significant bit of a computational-basis index. The gate set
//! {H, X, Z, CNOT, CZ, CCX, CCZ} is real, Hermitian, unitary, and Y-free,
//! so amplitudes have no imaginary part by construction — the representation
//! cannot even store one.

mod circuit;
mod gate;
mod measure;
mod state;

pub use circuit::{parse_circuit, run_circuit, write_circuit, QuantumCircuit};
pub use gate::{apply_gate, Gate, GateKind};
pub use measure::{
    measure, measure_product, outcome_distribution, record_from_key, BasisChoice, BasisString,
    MeasurementRecord,
};
pub use state::{parse_state_dump, write_state_dump, ProductState, RealStateVector, MAX_QUBITS};

use crate::pauli::Hamiltonian;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{qubits} qubits exceeds the statevector cap of {max}")]
    TooLarge { qubits: usize, max: usize },
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("gate {kind} takes {expected} qubits, got {got}")]
    BadArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("duplicate qubit {index} in gate operand list")]
    DuplicateQubit { index: usize },
    #[error("amplitude vector of length {len} is not a power of two")]
    BadLength { len: usize },
    #[error("state norm {norm} is not 1 within 1e-10")]
    NotNormalized { norm: f64 },
    #[error("basis length {basis} does not match state on {state} qubits")]
    BasisMismatch { basis: usize, state: usize },
    #[error("{count} measured qubits exceeds the exact-distribution cap of {max}")]
    TooManyMeasured { count: usize, max: usize },
    #[error("measurement record inconsistent with basis at position {index}")]
    RecordMismatch { index: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, SimError>;

/// `<psi| H |psi>`, computed term-wise without realizing any matrix.
pub fn expectation(state: &RealStateVector, hamiltonian: &Hamiltonian) -> Result<f64> {
    if state.num_qubits() != hamiltonian.num_qubits() {
        return Err(SimError::DimensionMismatch {
            left: state.num_qubits(),
            right: hamiltonian.num_qubits(),
        });
    }
    let amps = state.amplitudes();
    let mut total = 0.0;
    for term in hamiltonian.terms() {
        let (xmask, zmask) = term.word.masks();
        let mut acc = 0.0;
        for (j, &aj) in amps.iter().enumerate() {
            let sign = if (j as u64 & zmask).count_ones() & 1 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += amps[j ^ xmask as usize] * sign * aj;
        }
        total += term.coeff * acc;
    }
    Ok(total)
}
