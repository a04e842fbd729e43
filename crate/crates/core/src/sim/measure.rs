//! Single-shot X/Z measurement and the exact outcome distribution oracle.

use super::gate::apply_gate_in_place;
use super::{Gate, GateKind, ProductState, RealStateVector, Result, SimError};
use crate::seeds::{child_seed, rng_from};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

const MAX_MEASURED: usize = 20;

/// Measurement basis for one qubit: `Z` (standard) or `X` (Hadamard).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisChoice {
    Z,
    X,
}

impl BasisChoice {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            BasisChoice::X
        } else {
            BasisChoice::Z
        }
    }

    pub fn as_bit(self) -> bool {
        matches!(self, BasisChoice::X)
    }
}

/// Per-qubit basis choices; `None` marks an unmeasured position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisString {
    entries: Vec<Option<BasisChoice>>,
}

impl BasisString {
    pub fn new(entries: Vec<Option<BasisChoice>>) -> Self {
        BasisString { entries }
    }

    /// All positions measured, bases from bits (false = Z, true = X).
    pub fn from_bits(bits: &[bool]) -> Self {
        BasisString {
            entries: bits
                .iter()
                .map(|&b| Some(BasisChoice::from_bit(b)))
                .collect(),
        }
    }

    /// Nothing measured.
    pub fn unmeasured(len: usize) -> Self {
        BasisString {
            entries: vec![None; len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Option<BasisChoice>] {
        &self.entries
    }

    pub fn get(&self, qubit: usize) -> Option<BasisChoice> {
        self.entries[qubit - 1]
    }

    pub fn set(&mut self, qubit: usize, basis: Option<BasisChoice>) {
        self.entries[qubit - 1] = basis;
    }

    /// Measured qubit indices, ascending.
    pub fn measured_positions(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|_| i + 1))
            .collect()
    }

    pub fn fully_measured(&self) -> bool {
        self.entries.iter().all(|e| e.is_some())
    }

    /// True when `self` never disagrees with `full` on a measured position.
    pub fn consistent_with(&self, full: &BasisString) -> bool {
        self.entries
            .iter()
            .zip(full.entries())
            .all(|(mine, theirs)| match (mine, theirs) {
                (Some(a), Some(b)) => a == b,
                (Some(_), None) => false,
                (None, _) => true,
            })
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e {
                Some(BasisChoice::Z) => write!(f, "0")?,
                Some(BasisChoice::X) => write!(f, "1")?,
                None => write!(f, "-")?,
            }
        }
        Ok(())
    }
}

/// Measurement outcomes; `None` exactly where the basis was unmeasured.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementRecord {
    entries: Vec<Option<bool>>,
}

impl MeasurementRecord {
    pub fn new(entries: Vec<Option<bool>>) -> Self {
        MeasurementRecord { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Option<bool>] {
        &self.entries
    }

    pub fn get(&self, qubit: usize) -> Option<bool> {
        self.entries[qubit - 1]
    }

    /// Outcomes at `positions`, failing if any is unmeasured.
    pub fn outcomes_at(&self, positions: &[usize]) -> Result<Vec<bool>> {
        positions
            .iter()
            .map(|&q| self.entries[q - 1].ok_or(SimError::RecordMismatch { index: q }))
            .collect()
    }
}

impl fmt::Display for MeasurementRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e {
                Some(false) => write!(f, "0")?,
                Some(true) => write!(f, "1")?,
                None => write!(f, "-")?,
            }
        }
        Ok(())
    }
}

fn check_lengths(basis: &BasisString, state: &RealStateVector) -> Result<()> {
    if basis.len() != state.num_qubits() {
        return Err(SimError::BasisMismatch {
            basis: basis.len(),
            state: state.num_qubits(),
        });
    }
    Ok(())
}

/// Rotate X-basis positions into the computational frame (apply H there).
fn conjugate_x_positions(state: &RealStateVector, basis: &BasisString) -> Result<RealStateVector> {
    let mut rotated = state.clone();
    for (i, entry) in basis.entries().iter().enumerate() {
        if let Some(BasisChoice::X) = entry {
            apply_gate_in_place(&mut rotated, &Gate::new(GateKind::H, vec![i + 1])?)?;
        }
    }
    Ok(rotated)
}

/// Born-rule measurement of all non-unmeasured positions.
///
/// X positions are measured by conjugation with Hadamard. Returns the record
/// and the post-measurement state (in the original frame). Deterministic
/// given `rng_seed`.
pub fn measure(
    basis: &BasisString,
    state: &RealStateVector,
    rng_seed: u64,
) -> Result<(MeasurementRecord, RealStateVector)> {
    check_lengths(basis, state)?;
    let n = state.num_qubits();
    let mut rotated = conjugate_x_positions(state, basis)?;
    let mut rng = rng_from(rng_seed);
    let mut outcomes: Vec<Option<bool>> = vec![None; n];

    for qubit in 1..=n {
        if basis.get(qubit).is_none() {
            continue;
        }
        let bit = 1usize << (n - qubit);
        let p_one: f64 = rotated
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a * a)
            .sum();
        let outcome = rng.random::<f64>() < p_one;
        outcomes[qubit - 1] = Some(outcome);
        let keep_prob = if outcome { p_one } else { 1.0 - p_one };
        let scale = 1.0 / keep_prob.sqrt();
        let amps = rotated.amplitudes_mut();
        for (i, a) in amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = 0.0;
            }
        }
    }

    // Back to the original frame.
    let post = conjugate_x_positions(&rotated, basis)?;
    Ok((MeasurementRecord::new(outcomes), post))
}

/// Exact outcome distribution over the measured positions, marginalizing the
/// unmeasured ones.
///
/// Keys pack the outcomes of the measured positions in ascending qubit
/// order, first measured qubit as the most significant bit. Probabilities
/// sum to 1 within 1e-10.
pub fn outcome_distribution(
    basis: &BasisString,
    state: &RealStateVector,
) -> Result<BTreeMap<u64, f64>> {
    check_lengths(basis, state)?;
    let positions = basis.measured_positions();
    if positions.len() > MAX_MEASURED {
        return Err(SimError::TooManyMeasured {
            count: positions.len(),
            max: MAX_MEASURED,
        });
    }
    let n = state.num_qubits();
    let rotated = conjugate_x_positions(state, basis)?;
    let mut dist = BTreeMap::new();
    for (i, a) in rotated.amplitudes().iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        let mut key = 0u64;
        for &q in &positions {
            key = (key << 1) | ((i >> (n - q)) as u64 & 1);
        }
        *dist.entry(key).or_insert(0.0) += a * a;
    }
    Ok(dist)
}

/// Expand a packed outcome key back into a record over `len` positions.
pub fn record_from_key(key: u64, positions: &[usize], len: usize) -> MeasurementRecord {
    let mut entries = vec![None; len];
    for (rank, &q) in positions.iter().enumerate() {
        let bit = (key >> (positions.len() - 1 - rank)) & 1;
        entries[q - 1] = Some(bit == 1);
    }
    MeasurementRecord::new(entries)
}

/// Measure a product state block by block; bases index the global register.
///
/// Block `b` uses the child seed `(rng_seed, "block", b)`, so outcomes are
/// reproducible regardless of block count.
pub fn measure_product(
    bases: &BasisString,
    state: &ProductState,
    rng_seed: u64,
) -> Result<(MeasurementRecord, ProductState)> {
    if bases.len() != state.total_qubits() {
        return Err(SimError::BasisMismatch {
            basis: bases.len(),
            state: state.total_qubits(),
        });
    }
    let mut entries = Vec::with_capacity(bases.len());
    let mut post_blocks = Vec::with_capacity(state.blocks().len());
    let mut offset = 0;
    for (b, block) in state.blocks().iter().enumerate() {
        let q = block.num_qubits();
        let local = BasisString::new(bases.entries()[offset..offset + q].to_vec());
        let (record, post) = measure(&local, block, child_seed(rng_seed, "block", b as u64))?;
        entries.extend(record.entries().iter().copied());
        post_blocks.push(post);
        offset += q;
    }
    Ok((
        MeasurementRecord::new(entries),
        ProductState::new(post_blocks),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> RealStateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        RealStateVector::from_amplitudes(vec![r, r]).unwrap()
    }

    #[test]
    fn z_measurement_of_one_is_deterministic() {
        let state = RealStateVector::basis_state(1, 1).unwrap();
        let basis = BasisString::from_bits(&[false]);
        for seed in 0..20 {
            let (m, post) = measure(&basis, &state, seed).unwrap();
            assert_eq!(m.get(1), Some(true));
            assert_eq!(post.amplitudes()[1], 1.0);
        }
    }

    #[test]
    fn x_measurement_of_plus_is_deterministic() {
        let basis = BasisString::from_bits(&[true]);
        for seed in 0..20 {
            let (m, _) = measure(&basis, &plus(), seed).unwrap();
            assert_eq!(m.get(1), Some(false));
        }
    }

    #[test]
    fn product_state_measured_in_mixed_bases() {
        // |+> (x) |0> measured in (X, Z) gives (0, 0) with certainty.
        let state = plus()
            .tensor(&RealStateVector::zero_state(1).unwrap())
            .unwrap();
        let basis = BasisString::from_bits(&[true, false]);
        for seed in 0..20 {
            let (m, _) = measure(&basis, &state, seed).unwrap();
            assert_eq!(m.get(1), Some(false));
            assert_eq!(m.get(2), Some(false));
        }
    }

    #[test]
    fn distribution_of_plus_in_z() {
        let basis = BasisString::from_bits(&[false]);
        let dist = outcome_distribution(&basis, &plus()).unwrap();
        assert!((dist[&0] - 0.5).abs() < 1e-12);
        assert!((dist[&1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn distribution_of_zero_in_x() {
        let basis = BasisString::from_bits(&[true]);
        let state = RealStateVector::zero_state(1).unwrap();
        let dist = outcome_distribution(&basis, &state).unwrap();
        assert!((dist[&0] - 0.5).abs() < 1e-12);
        assert!((dist[&1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn marginal_of_entangled_state() {
        // (|00> + |11>)/sqrt(2), measure only qubit 2 in Z: uniform.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let state = RealStateVector::from_amplitudes(vec![r, 0.0, 0.0, r]).unwrap();
        let basis = BasisString::new(vec![None, Some(BasisChoice::Z)]);
        let dist = outcome_distribution(&basis, &state).unwrap();
        assert!((dist[&0] - 0.5).abs() < 1e-12);
        assert!((dist[&1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn record_marks_unmeasured_positions() {
        let state = RealStateVector::zero_state(2).unwrap();
        let basis = BasisString::new(vec![None, Some(BasisChoice::Z)]);
        let (m, _) = measure(&basis, &state, 3).unwrap();
        assert_eq!(m.get(1), None);
        assert_eq!(m.get(2), Some(false));
    }

    #[test]
    fn measure_is_reproducible() {
        let state = plus().tensor(&plus()).unwrap();
        let basis = BasisString::from_bits(&[false, false]);
        let (a, _) = measure(&basis, &state, 42).unwrap();
        let (b, _) = measure(&basis, &state, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn post_measurement_state_collapses() {
        let basis = BasisString::from_bits(&[false]);
        let (m, post) = measure(&basis, &plus(), 7).unwrap();
        let idx = m.get(1).unwrap() as usize;
        assert!((post.amplitudes()[idx].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_measurement_matches_blocks() {
        let p = ProductState::new(vec![
            RealStateVector::basis_state(1, 1).unwrap(),
            RealStateVector::zero_state(2).unwrap(),
        ]);
        let bases = BasisString::from_bits(&[false, false, false]);
        let (m, _) = measure_product(&bases, &p, 9).unwrap();
        assert_eq!(m.get(1), Some(true));
        assert_eq!(m.get(2), Some(false));
        assert_eq!(m.get(3), Some(false));
    }

    #[test]
    fn basis_consistency_predicate() {
        let partial = BasisString::new(vec![Some(BasisChoice::Z), None, Some(BasisChoice::X)]);
        let full_match = BasisString::from_bits(&[false, true, true]);
        let full_clash = BasisString::from_bits(&[true, true, true]);
        assert!(partial.consistent_with(&full_match));
        assert!(!partial.consistent_with(&full_clash));
    }
}
