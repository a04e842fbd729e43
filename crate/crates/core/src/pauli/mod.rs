//! Y-free Pauli-word algebra.
//!
//! Words are tensor products of `I`, `X`, and `Z` factors only; the type
//! cannot represent a `Y` letter. Hermitian matrices built from such words
//! are exactly the real symmetric matrices measurable with X/Z bases alone,
//! which is what the rest of the pipeline relies on.
//!
//! Words are stored sparsely (index -> letter) so that 6-local terms on many
//! qubits stay cheap, and the whole-matrix realization is only used for
//! desk-scale oracles.

mod decompose;
mod format;
mod hamiltonian;

pub use decompose::{
    all_yfree_words, ccz_decomposition, decompose_yfree, one_norm_bound_check, word_matrix,
    OneNormReport, DEFAULT_TOL,
};
pub use format::{parse_hamiltonian, write_hamiltonian, Metadata};
pub use hamiltonian::{Hamiltonian, PauliTerm};

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("{qubits} qubits exceeds the dense realization cap of {max}")]
    TooLarge { qubits: usize, max: usize },
    #[error("matrix is not Hermitian: max |M - M^T| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix has Y content: Y-free residual max entry = {residual:e}")]
    YFreeViolation { residual: f64 },
    #[error("operator norm of the zero matrix is undefined")]
    ZeroMatrix,
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    InvalidIndex { index: usize, num_qubits: usize },
    #[error("duplicate qubit index {index} in Pauli word")]
    DuplicateIndex { index: usize },
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("matrix dimension {dim} is not a power of two")]
    BadDimension { dim: usize },
    #[error("Pauli words overlap on qubit {index}")]
    OverlappingSupport { index: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, PauliError>;

/// A single non-identity tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Z,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::X => write!(f, "X"),
            Letter::Z => write!(f, "Z"),
        }
    }
}

/// A tensor product of `I`, `X`, `Z` factors on `num_qubits` qubits.
///
/// Only the non-identity letters are stored, keyed by 1-based qubit index.
/// Qubit 1 is the most significant bit of a computational-basis index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord {
    num_qubits: usize,
    letters: BTreeMap<usize, Letter>,
}

impl PauliWord {
    /// The identity word.
    pub fn identity(num_qubits: usize) -> Self {
        PauliWord {
            num_qubits,
            letters: BTreeMap::new(),
        }
    }

    pub fn from_letters(
        num_qubits: usize,
        letters: impl IntoIterator<Item = (usize, Letter)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (index, letter) in letters {
            if index == 0 || index > num_qubits {
                return Err(PauliError::InvalidIndex { index, num_qubits });
            }
            if map.insert(index, letter).is_some() {
                return Err(PauliError::DuplicateIndex { index });
            }
        }
        Ok(PauliWord {
            num_qubits,
            letters: map,
        })
    }

    /// Single-letter word, e.g. `Z` on one qubit.
    pub fn single(num_qubits: usize, index: usize, letter: Letter) -> Result<Self> {
        Self::from_letters(num_qubits, [(index, letter)])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn letters(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.letters.iter().map(|(&i, &l)| (i, l))
    }

    pub fn letter_at(&self, index: usize) -> Option<Letter> {
        self.letters.get(&index).copied()
    }

    /// Qubit indices carrying a non-identity letter, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    /// Number of non-identity letters.
    pub fn locality(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Bit masks over computational-basis indices: `(xmask, zmask)`.
    ///
    /// Qubit `k` occupies bit `num_qubits - k`, matching the big-endian
    /// statevector convention.
    pub fn masks(&self) -> (u64, u64) {
        let mut xmask = 0u64;
        let mut zmask = 0u64;
        for (&idx, &letter) in &self.letters {
            let bit = 1u64 << (self.num_qubits - idx);
            match letter {
                Letter::X => xmask |= bit,
                Letter::Z => zmask |= bit,
            }
        }
        (xmask, zmask)
    }

    /// Re-index the word into a larger register: local qubit `i` maps to
    /// `map[i - 1]` (1-based global indices).
    pub fn embed(&self, map: &[usize], total_qubits: usize) -> Result<Self> {
        let mut letters = Vec::with_capacity(self.letters.len());
        for (&idx, &letter) in &self.letters {
            let global = *map.get(idx - 1).ok_or(PauliError::InvalidIndex {
                index: idx,
                num_qubits: map.len(),
            })?;
            letters.push((global, letter));
        }
        Self::from_letters(total_qubits, letters)
    }

    /// Union of two words with disjoint supports on the same register.
    pub fn union_disjoint(&self, other: &PauliWord) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(PauliError::QubitMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let mut map = self.letters.clone();
        for (&idx, &letter) in &other.letters {
            if map.insert(idx, letter).is_some() {
                return Err(PauliError::OverlappingSupport { index: idx });
            }
        }
        Ok(PauliWord {
            num_qubits: self.num_qubits,
            letters: map,
        })
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (&idx, &letter) in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{idx}:{letter}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_masks_are_big_endian() {
        // Z on qubit 1 of 3 -> most significant bit.
        let w = PauliWord::single(3, 1, Letter::Z).unwrap();
        assert_eq!(w.masks(), (0, 0b100));
        let w = PauliWord::single(3, 3, Letter::X).unwrap();
        assert_eq!(w.masks(), (0b001, 0));
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(PauliWord::single(2, 3, Letter::X).is_err());
        assert!(PauliWord::single(2, 0, Letter::X).is_err());
        assert!(PauliWord::from_letters(2, [(1, Letter::X), (1, Letter::Z)]).is_err());
    }

    #[test]
    fn union_disjoint_rejects_overlap() {
        let a = PauliWord::single(3, 1, Letter::X).unwrap();
        let b = PauliWord::single(3, 1, Letter::Z).unwrap();
        assert!(a.union_disjoint(&b).is_err());
        let c = PauliWord::single(3, 2, Letter::Z).unwrap();
        let u = a.union_disjoint(&c).unwrap();
        assert_eq!(u.locality(), 2);
    }

    #[test]
    fn display_round_readable() {
        let w = PauliWord::from_letters(4, [(2, Letter::X), (4, Letter::Z)]).unwrap();
        assert_eq!(w.to_string(), "2:X 4:Z");
        assert_eq!(PauliWord::identity(4).to_string(), "I");
    }
}
