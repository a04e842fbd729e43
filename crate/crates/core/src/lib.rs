//! Desk-scale laboratory for verifying quantum computations with classical
//! interaction.
//!
//! The pipeline implemented here runs end to end on exact, seeded numerics:
//!
//! 1. [`sim`] — dense real-amplitude statevector simulation over a Hermitian,
//!    Y-free gate set, with single-shot X/Z measurement.
//! 2. [`pauli`] — Y-free Pauli-word algebra: matrix realization, trace-based
//!    decomposition of Hermitian matrices, and norm bookkeeping.
//! 3. [`clock`] — the circuit-to-Hamiltonian compiler producing the four
//!    clock-Hamiltonian components and history states.
//! 4. [`mf`] — measurement-only energy-estimation verdicts: term sampling,
//!    the derandomized sampler, and the instance-independent wrapper.
//! 5. [`flatten`] — folding a 3-message public-coin proof into a single
//!    verifier circuit, plus threshold amplification helpers.
//! 6. [`commit`] — a reference classical commitment to quantum states with
//!    Real/Ideal binding experiment harnesses and named adversaries.
//! 7. [`protocol`] — the classical argument session state machine, PRG
//!    derandomization, sequential repetition, and cheating-prover
//!    experiments.
//!
//! Everything is a pure function of `(inputs, seed)`: two runs with the same
//! seeds produce byte-identical transcripts and reports. States are capped at
//! 20 qubits; exactness beats scale throughout.

pub mod clock;
pub mod commit;
pub mod flatten;
pub mod mf;
pub mod pauli;
pub mod protocol;
pub mod seeds;
pub mod sim;
pub mod stats;
