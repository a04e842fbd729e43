//! Prover strategies behind a common trait, registered by name.
//!
//! All built-in provers run the honest protocol flow; they differ only in
//! which state gets committed and in the committer behavior, drawn from the
//! commitment strategy registry.

use super::prg::prg_expand;
use super::{ProtocolError, Result};
use crate::clock::ClockBundle;
use crate::commit::{
    strategy::{FlipXCommitter, HonestCommitter, RefuseOpenCommitter},
    CommitterStrategy, Opening,
};
use crate::sim::{BasisChoice, ProductState, RealStateVector};

pub trait ProverStrategy {
    /// Registry name.
    fn name(&self) -> &str;

    /// First prover move: commit to the session state, return `y`.
    /// Starts a fresh session.
    fn on_public_key(&mut self, pk: &[u8], seed: u64) -> Result<Vec<u8>>;

    /// Test round: open every index in the uniform basis `h`.
    fn on_test_challenge(&mut self, h: BasisChoice, seed: u64) -> Result<Opening>;

    /// Measurement round: derive bases from `PRG(s1)` and open everything.
    fn on_measure_challenge(&mut self, s1: &[u8], s2: &[u8], seed: u64) -> Result<Opening>;

    /// Measurement round with explicitly transmitted bases (the
    /// true-randomness experiment knob).
    fn on_explicit_bases(&mut self, bases: &[BasisChoice], seed: u64) -> Result<Opening>;
}

/// Honest protocol flow around a pluggable committer and committed state.
pub struct StandardProver {
    name: String,
    per_copy_state: RealStateVector,
    copies: usize,
    committer: Box<dyn CommitterStrategy>,
}

impl StandardProver {
    pub fn new(
        name: impl Into<String>,
        per_copy_state: RealStateVector,
        copies: usize,
        committer: Box<dyn CommitterStrategy>,
    ) -> Self {
        StandardProver {
            name: name.into(),
            per_copy_state,
            copies,
            committer,
        }
    }

    fn total_qubits(&self) -> usize {
        self.per_copy_state.num_qubits() * self.copies
    }

    fn open_all(&mut self, bases: Vec<BasisChoice>, seed: u64) -> Result<Opening> {
        let indices: Vec<usize> = (1..=self.total_qubits()).collect();
        self.committer
            .open(&indices, &bases, seed)
            .map_err(|e| ProtocolError::ProverFailed(e.to_string()))
    }
}

impl ProverStrategy for StandardProver {
    fn name(&self) -> &str {
        &self.name
    }

    fn on_public_key(&mut self, pk: &[u8], seed: u64) -> Result<Vec<u8>> {
        let sigma = ProductState::new(vec![self.per_copy_state.clone(); self.copies]);
        self.committer
            .commit(pk, &sigma, seed)
            .map_err(|e| ProtocolError::ProverFailed(e.to_string()))
    }

    fn on_test_challenge(&mut self, h: BasisChoice, seed: u64) -> Result<Opening> {
        self.open_all(vec![h; self.total_qubits()], seed)
    }

    fn on_measure_challenge(&mut self, s1: &[u8], _s2: &[u8], seed: u64) -> Result<Opening> {
        let bases: Vec<BasisChoice> = prg_expand(s1, self.total_qubits())
            .into_iter()
            .map(BasisChoice::from_bit)
            .collect();
        self.open_all(bases, seed)
    }

    fn on_explicit_bases(&mut self, bases: &[BasisChoice], seed: u64) -> Result<Opening> {
        self.open_all(bases.to_vec(), seed)
    }
}

/// The deliberately wrong committed state used by the `wrong-state` prover:
/// data register all zero, clock register in the alternating (maximally
/// non-unary) pattern `0101...`.
pub fn wrong_state_for(bundle: &ClockBundle) -> RealStateVector {
    let ell = bundle.data_qubits();
    let t = bundle.clock_qubits();
    let mut clock_bits = 0u64;
    for c in 1..=t {
        if c % 2 == 0 {
            clock_bits |= 1 << (t - c);
        }
    }
    RealStateVector::basis_state(ell + t, clock_bits).expect("bundle within state cap")
}

/// Names accepted by [`make_prover`].
pub fn prover_names() -> &'static [&'static str] {
    &["honest", "wrong-state", "refuse-open", "flip-x"]
}

/// Instantiate a registered prover.
///
/// `honest_per_copy` is the honest per-copy state (a history state of the
/// compiled circuit on a witness); the wrong-state prover substitutes
/// [`wrong_state_for`].
pub fn make_prover(
    name: &str,
    bundle: &ClockBundle,
    honest_per_copy: &RealStateVector,
    copies: usize,
) -> Result<Box<dyn ProverStrategy>> {
    Ok(match name {
        "honest" => Box::new(StandardProver::new(
            "honest",
            honest_per_copy.clone(),
            copies,
            Box::new(HonestCommitter::new()),
        )),
        "wrong-state" => Box::new(StandardProver::new(
            "wrong-state",
            wrong_state_for(bundle),
            copies,
            Box::new(HonestCommitter::new()),
        )),
        "refuse-open" => Box::new(StandardProver::new(
            "refuse-open",
            honest_per_copy.clone(),
            copies,
            Box::new(RefuseOpenCommitter::new()),
        )),
        "flip-x" => Box::new(StandardProver::new(
            "flip-x",
            honest_per_copy.clone(),
            copies,
            Box::new(FlipXCommitter::new()),
        )),
        other => return Err(ProtocolError::UnknownProver(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::compile;
    use crate::sim::{Gate, GateKind, QuantumCircuit};

    #[test]
    fn wrong_state_is_alternating_clock() {
        let gates = vec![
            Gate::new(GateKind::X, vec![1]).unwrap(),
            Gate::new(GateKind::X, vec![1]).unwrap(),
            Gate::new(GateKind::X, vec![2]).unwrap(),
            Gate::new(GateKind::X, vec![2]).unwrap(),
        ];
        let circuit = QuantumCircuit::new(2, gates, 1).unwrap();
        let bundle = compile(&circuit).unwrap();
        let state = wrong_state_for(&bundle);
        assert_eq!(state.num_qubits(), 6);
        // Data 00, clock 0101 -> index 0b000101.
        assert_eq!(state.amplitudes()[0b000101], 1.0);
    }

    #[test]
    fn registry_rejects_unknown() {
        let gates = vec![
            Gate::new(GateKind::X, vec![1]).unwrap(),
            Gate::new(GateKind::X, vec![1]).unwrap(),
        ];
        let circuit = QuantumCircuit::new(1, gates, 0).unwrap();
        let bundle = compile(&circuit).unwrap();
        let state = RealStateVector::zero_state(3).unwrap();
        assert!(make_prover("nope", &bundle, &state, 2).is_err());
        for name in prover_names() {
            assert!(make_prover(name, &bundle, &state, 2).is_ok());
        }
    }
}
