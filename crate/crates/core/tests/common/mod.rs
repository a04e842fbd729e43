//! Shared oracles and generators for the integration suites.
//!
//! Everything here is deliberately independent of the implementation path it
//! checks: acceptance probabilities come from exhaustive enumeration over
//! terms and outcome distributions, never from the closed-form laws.

// Each test binary compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use xzlab_core::mf::MfSampler;
use xzlab_core::pauli::{Hamiltonian, Letter, PauliTerm, PauliWord};
use xzlab_core::seeds::rng_from;
use xzlab_core::sim::{outcome_distribution, BasisChoice, BasisString, RealStateVector};

use rand::Rng;

/// Random normalized real state on `n` qubits.
pub fn random_state(n: usize, seed: u64) -> RealStateVector {
    let mut rng = rng_from(seed);
    let amps: Vec<f64> = (0..(1usize << n))
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    RealStateVector::from_amplitudes_normalized(amps).unwrap()
}

/// Random Y-free Hamiltonian: up to `max_terms` distinct words on `q`
/// qubits with coefficients in [-2, 2] bounded away from zero.
pub fn random_yfree_hamiltonian(q: usize, max_terms: usize, seed: u64) -> Hamiltonian {
    random_yfree_hamiltonian_local(q, max_terms, q, seed)
}

/// As [`random_yfree_hamiltonian`], with every word's locality capped.
pub fn random_yfree_hamiltonian_local(
    q: usize,
    max_terms: usize,
    max_locality: usize,
    seed: u64,
) -> Hamiltonian {
    let mut rng = rng_from(seed);
    // 3^q distinct Y-free words exist in total; stay under that so the
    // rejection loop below terminates.
    let available = 3usize.saturating_pow(q.min(10) as u32);
    let n_terms = rng.random_range(1..=max_terms.min(available / 2).max(1));
    let mut words = std::collections::BTreeSet::new();
    while words.len() < n_terms {
        let mut letters = Vec::new();
        for qubit in 1..=q {
            match rng.random_range(0..3) {
                0 => {}
                1 => letters.push((qubit, Letter::X)),
                _ => letters.push((qubit, Letter::Z)),
            }
        }
        if letters.len() > max_locality {
            continue;
        }
        words.insert(PauliWord::from_letters(q, letters).unwrap());
    }
    let terms: Vec<PauliTerm> = words
        .into_iter()
        .map(|w| {
            let mag = rng.random_range(0.1..2.0);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            PauliTerm::new(sign * mag, w)
        })
        .collect();
    Hamiltonian::new(q, terms).unwrap()
}

/// Exhaustively enumerated acceptance probability of the plain
/// sample-then-decide verdict on `state`.
///
/// For every term (with its exact weight) the support is measured in the
/// term's bases through the exact outcome-distribution oracle, and the
/// decision rule is evaluated outcome by outcome. No closed-form law is
/// used.
pub fn enumerate_mf_acceptance(sampler: &MfSampler, state: &RealStateVector) -> f64 {
    let h = sampler.hamiltonian();
    let mut total = 0.0;
    for (term, &weight) in h.terms().iter().zip(sampler.weights()) {
        total += weight * enumerate_term_acceptance(h, term_index(h, term), state);
    }
    total
}

fn term_index(h: &Hamiltonian, term: &PauliTerm) -> usize {
    h.terms()
        .iter()
        .position(|t| t.word == term.word && t.coeff == term.coeff)
        .unwrap()
}

/// Acceptance probability of `decide` on one term by exhaustive outcome
/// enumeration.
pub fn enumerate_term_acceptance(h: &Hamiltonian, k: usize, state: &RealStateVector) -> f64 {
    let term = &h.terms()[k];
    let positions: Vec<usize> = term.word.support().collect();
    let q = state.num_qubits();
    let mut basis = BasisString::unmeasured(q);
    for (idx, letter) in term.word.letters() {
        basis.set(
            idx,
            Some(match letter {
                Letter::X => BasisChoice::X,
                Letter::Z => BasisChoice::Z,
            }),
        );
    }
    if positions.is_empty() {
        // Identity term: outcome product is +1; accept iff coefficient < 0.
        return if term.coeff < 0.0 { 1.0 } else { 0.0 };
    }
    let dist = outcome_distribution(&basis, state).unwrap();
    let mut acc = 0.0;
    for (key, prob) in dist {
        let parity_negative = key.count_ones() & 1 == 1;
        let accepts = if term.coeff > 0.0 {
            parity_negative
        } else {
            !parity_negative
        };
        if accepts {
            acc += prob;
        }
    }
    acc
}

/// Exhaustively enumerated acceptance of the instance-independent wrapper:
/// `(1 - 2^-L) + 2^-L * enumerated-plain-acceptance`, where the consistency
/// factor `2^-L` is itself verified by basis enumeration elsewhere.
pub fn enumerate_wrapper_acceptance(sampler: &MfSampler, state: &RealStateVector) -> f64 {
    let miss = 1.0 - 2f64.powi(-(sampler.locality() as i32));
    miss + (1.0 - miss) * enumerate_mf_acceptance(sampler, state)
}

/// Pauli 1-norm of the *full* four-letter decomposition of a real symmetric
/// matrix, enumerated over all 4^k words.
///
/// Words with an odd number of Y factors are purely imaginary and vanish
/// against a real symmetric matrix (asserted); even-Y words contribute
/// `i^y * sum_j (-1)^{(j^x) & z} M[j^x, j] / 2^k`.
pub fn full_pauli_one_norm(m: &nalgebra::DMatrix<f64>) -> f64 {
    let dim = m.nrows();
    assert!(dim.is_power_of_two());
    let k = dim.trailing_zeros() as usize;
    let mut one_norm = 0.0;
    // Letter code per qubit: 0 = I, 1 = X, 2 = Y, 3 = Z.
    for word in 0..(4usize.pow(k as u32)) {
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        let mut y_count = 0usize;
        let mut w = word;
        for qubit in 0..k {
            let letter = w % 4;
            w /= 4;
            let bit = 1usize << qubit;
            match letter {
                1 => xmask |= bit,
                2 => {
                    xmask |= bit;
                    zmask |= bit;
                    y_count += 1;
                }
                3 => zmask |= bit,
                _ => {}
            }
        }
        let mut trace = 0.0;
        for j in 0..dim {
            let sign = if ((j ^ xmask) & zmask).count_ones() & 1 == 0 {
                1.0
            } else {
                -1.0
            };
            trace += sign * m[(j ^ xmask, j)];
        }
        let coeff = trace / dim as f64;
        if y_count % 2 == 1 {
            // i^odd is imaginary; the real trace must vanish for symmetric M.
            assert!(coeff.abs() < 1e-12, "odd-Y coefficient {coeff}");
        } else {
            one_norm += coeff.abs();
        }
    }
    one_norm
}

/// Random real symmetric matrix on `k` qubits with entries in [-1, 1].
pub fn random_symmetric_matrix(k: usize, seed: u64) -> nalgebra::DMatrix<f64> {
    let dim = 1usize << k;
    let mut rng = rng_from(seed);
    let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}
