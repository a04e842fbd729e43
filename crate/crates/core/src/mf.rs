//! Energy-estimation verdicts from single-shot X/Z measurements.
//!
//! One verdict works like this: draw a Hamiltonian term with probability
//! proportional to |coefficient|, measure each qubit in the term's support in
//! the basis named by its letter, and accept when the outcome parity
//! disagrees with the coefficient's sign. Averaged over terms and outcomes,
//! the acceptance probability is exactly
//! `1/2 - <psi|H|psi> / (2 sum_S |d_S|)`.
//!
//! The sampler is derandomized: all of its choices are read off a fixed-size
//! bit tape, so a verdict is a pure function of `(tape, basis, outcomes)`.
//! The instance-independent wrapper accepts immediately when an externally
//! chosen basis string is inconsistent with the sampled one; with padded
//! locality `L` the consistency probability over a uniform basis is exactly
//! `2^-L`, giving acceptance `1 - 2^-L (1/2 + <H>/(2 sum|d|))`, i.e.
//! `127/128 - <H>/(128 sum|d|)` at the 6-local clock setting.

use crate::pauli::{Hamiltonian, Letter};
use crate::seeds::rng_from;
use crate::sim::{measure, BasisChoice, BasisString, MeasurementRecord, RealStateVector};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MfError {
    #[error("sampler needs at least one Hamiltonian term")]
    EmptyHamiltonian,
    #[error("cannot pad to locality {locality} on only {qubits} qubits")]
    PaddingExhausted { qubits: usize, locality: usize },
    #[error("Hamiltonian is {max_locality}-local, above the padded locality {limit}")]
    LocalityTooLarge { max_locality: usize, limit: usize },
    #[error("measurement record missing an outcome at qubit {index}")]
    MissingOutcome { index: usize },
    #[error("randomness tape has {got} bits, {needed} required")]
    TapeTooShort { needed: usize, got: usize },
    #[error("term index {index} out of range ({terms} terms)")]
    TermOutOfRange { index: usize, terms: usize },
    #[error("wrapper verdict requires a fully specified basis string")]
    BasisNotFull,
    #[error("record and basis disagree about qubit {index} being measured")]
    RecordBasisMismatch { index: usize },
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

pub type Result<T> = std::result::Result<T, MfError>;

/// Padded locality used for clock-compiled Hamiltonians.
pub const CLOCK_LOCALITY: usize = 6;

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

/// A fixed-length bitstring driving one derandomized verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomnessTape {
    bits: Vec<bool>,
}

impl RandomnessTape {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        RandomnessTape { bits }
    }

    /// Uniformly random tape of the given length, deterministic in the seed.
    pub fn from_seed(len: usize, seed: u64) -> Self {
        let mut rng = rng_from(seed);
        RandomnessTape {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn draw(len: usize, rng: &mut impl Rng) -> Self {
        RandomnessTape {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    fn read_uint(&self, offset: usize, nbits: usize) -> Result<u128> {
        if offset + nbits > self.bits.len() {
            return Err(MfError::TapeTooShort {
                needed: offset + nbits,
                got: self.bits.len(),
            });
        }
        let mut v: u128 = 0;
        for &b in &self.bits[offset..offset + nbits] {
            v = (v << 1) | (b as u128);
        }
        Ok(v)
    }
}

/// Term sampler with deterministic padding to a fixed locality.
#[derive(Debug, Clone)]
pub struct MfSampler {
    hamiltonian: Hamiltonian,
    locality: usize,
    weights: Vec<f64>,
    /// Inverse-CDF thresholds at `2^fixed_point_bits` resolution.
    thresholds: Vec<u128>,
    fixed_point_bits: usize,
    position_bits: usize,
}

impl MfSampler {
    /// Build a sampler over the *canonicalized* form of `h`, padding every
    /// emitted basis to exactly `locality` measured positions.
    ///
    /// Merging duplicates first keeps term identity unambiguous; the
    /// represented operator, and hence the acceptance law, is unchanged.
    pub fn new(h: &Hamiltonian, locality: usize) -> Result<Self> {
        let hamiltonian = h.canonicalize();
        if hamiltonian.is_empty() {
            return Err(MfError::EmptyHamiltonian);
        }
        let q = hamiltonian.num_qubits();
        if q < locality {
            return Err(MfError::PaddingExhausted {
                qubits: q,
                locality,
            });
        }
        let max_locality = hamiltonian.max_locality();
        if max_locality > locality {
            return Err(MfError::LocalityTooLarge {
                max_locality,
                limit: locality,
            });
        }

        let one_norm = hamiltonian.one_norm();
        let weights: Vec<f64> = hamiltonian
            .terms()
            .iter()
            .map(|t| t.coeff.abs() / one_norm)
            .collect();
        let n_terms = weights.len();
        let fixed_point_bits = 64 + ceil_log2(n_terms);
        let scale = 2f64.powi(fixed_point_bits as i32);
        let mut thresholds = Vec::with_capacity(n_terms);
        let mut cdf = 0.0;
        for w in &weights {
            cdf += w;
            thresholds.push((cdf * scale).round() as u128);
        }
        // Force the last threshold so every tape value lands on a term.
        *thresholds.last_mut().unwrap() = 1u128 << fixed_point_bits;

        Ok(MfSampler {
            hamiltonian,
            locality,
            weights,
            thresholds,
            fixed_point_bits,
            position_bits: ceil_log2(q),
        })
    }

    /// Sampler for a clock-compiled Hamiltonian: merged terms, locality 6.
    pub fn for_clock(h: &Hamiltonian) -> Result<Self> {
        Self::new(h, CLOCK_LOCALITY)
    }

    /// The canonicalized Hamiltonian the sampler draws from.
    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }

    /// Normalized term weights `|d_k| / sum |d|`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Required tape length: `ceil(log2 #terms) + 64` bits of fixed-point
    /// term selection plus `locality * (ceil(log2 q) + 1)` bits of padding
    /// positions and letters.
    pub fn tape_len(&self) -> usize {
        self.fixed_point_bits + self.locality * (self.position_bits + 1)
    }

    /// Derandomized sampling: term index plus a basis string with exactly
    /// `locality` measured positions (the term's support, then padding).
    ///
    /// Identical tapes give identical output. The fixed-point term selection
    /// quantizes cumulative weights at f64 precision; the bias is below
    /// 2^-50 per term and is accepted.
    pub fn sample_basis(&self, tape: &RandomnessTape) -> Result<(usize, BasisString)> {
        let v = tape.read_uint(0, self.fixed_point_bits)?;
        let k = self.thresholds.partition_point(|&t| t <= v);
        let term = &self.hamiltonian.terms()[k];

        let q = self.num_qubits();
        let mut basis = BasisString::unmeasured(q);
        for (idx, letter) in term.word.letters() {
            let choice = match letter {
                Letter::X => BasisChoice::X,
                Letter::Z => BasisChoice::Z,
            };
            basis.set(idx, Some(choice));
        }

        let needed = self.locality - term.word.locality();
        let mut offset = self.fixed_point_bits;
        for _ in 0..needed {
            let pos_raw = tape.read_uint(offset, self.position_bits)? as usize;
            offset += self.position_bits;
            let letter_bit = tape.read_uint(offset, 1)? == 1;
            offset += 1;
            let mut candidate = (pos_raw % q) + 1;
            while basis.get(candidate).is_some() {
                candidate = candidate % q + 1;
            }
            basis.set(
                candidate,
                Some(if letter_bit {
                    BasisChoice::X
                } else {
                    BasisChoice::Z
                }),
            );
        }
        Ok((k, basis))
    }
}

/// Deterministic verdict for one sampled term: compute the outcome product
/// `pi = prod (-1)^{m_i}` over the term's support and accept exactly when
/// `sign(d_k) * pi = -1`.
pub fn decide(h: &Hamiltonian, term_index: usize, record: &MeasurementRecord) -> Result<bool> {
    let term = h.terms().get(term_index).ok_or(MfError::TermOutOfRange {
        index: term_index,
        terms: h.num_terms(),
    })?;
    let mut parity = false;
    for (idx, _) in term.word.letters() {
        let outcome = record
            .get(idx)
            .ok_or(MfError::MissingOutcome { index: idx })?;
        parity ^= outcome;
    }
    let pi_negative = parity;
    Ok(if term.coeff > 0.0 {
        pi_negative
    } else {
        !pi_negative
    })
}

/// Instance-independent wrapper verdict.
///
/// Recomputes `(k, b_hat)` from the tape; accepts immediately when the
/// sampled basis is inconsistent with the externally chosen full basis `b`,
/// otherwise defers to [`decide`] on the sampled term.
pub fn vmf(
    sampler: &MfSampler,
    tape: &RandomnessTape,
    b: &BasisString,
    record: &MeasurementRecord,
) -> Result<bool> {
    if !b.fully_measured() {
        return Err(MfError::BasisNotFull);
    }
    for (i, (be, me)) in b.entries().iter().zip(record.entries()).enumerate() {
        if be.is_some() != me.is_some() {
            return Err(MfError::RecordBasisMismatch { index: i + 1 });
        }
    }
    let (k, b_hat) = sampler.sample_basis(tape)?;
    if !b_hat.consistent_with(b) {
        return Ok(true);
    }
    decide(sampler.hamiltonian(), k, record)
}

/// Threshold vote: accept iff at least `ceil(threshold * k)` of `k` verdicts
/// accept.
pub fn threshold_vmf(threshold: f64, verdicts: &[bool]) -> bool {
    let k = verdicts.len();
    let needed = (threshold * k as f64).ceil() as usize;
    verdicts.iter().filter(|&&v| v).count() >= needed
}

/// Closed-form acceptance of one plain verdict on a state with the given
/// energy: `1/2 - energy / (2 sum|d|)`.
pub fn mf_law(energy: f64, one_norm: f64) -> f64 {
    0.5 - energy / (2.0 * one_norm)
}

/// Closed-form acceptance of the wrapper at padded locality `L`:
/// `(1 - 2^-L) + 2^-L * mf_law`. At `L = 6` this is
/// `127/128 - energy/(128 sum|d|)`.
pub fn wrapper_law(energy: f64, one_norm: f64, locality: usize) -> f64 {
    let p = 2f64.powi(-(locality as i32));
    (1.0 - p) + p * mf_law(energy, one_norm)
}

/// One seeded Monte Carlo wrapper trial: random tape, uniform full basis,
/// single-shot measurement, wrapper verdict.
pub fn run_vmf_trial(sampler: &MfSampler, state: &RealStateVector, seed: u64) -> Result<bool> {
    let mut rng = rng_from(seed);
    let tape = RandomnessTape::draw(sampler.tape_len(), &mut rng);
    let q = sampler.num_qubits();
    let bits: Vec<bool> = (0..q).map(|_| rng.random::<bool>()).collect();
    let basis = BasisString::from_bits(&bits);
    let measure_seed = rng.random::<u64>();
    let (record, _) = measure(&basis, state, measure_seed)?;
    vmf(sampler, &tape, &basis, &record)
}
