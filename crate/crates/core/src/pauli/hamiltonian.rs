//! Weighted sums of Y-free Pauli words.

use super::{Letter, PauliError, PauliWord, Result};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Dense realizations are capped here; beyond this the Hamiltonian is only
/// handled term-wise.
pub(crate) const DENSE_CAP: usize = 12;

/// One summand: a real coefficient times a Y-free word.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coeff: f64, word: PauliWord) -> Self {
        PauliTerm { coeff, word }
    }
}

/// A real linear combination of Y-free Pauli words on a fixed register.
///
/// Duplicate words are allowed (the clock compiler deliberately keeps them);
/// [`Hamiltonian::canonicalize`] merges them. The 1-norm over coefficients is
/// cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
    one_norm: f64,
}

impl Hamiltonian {
    /// Build from terms, dropping exact-zero coefficients.
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut kept = Vec::new();
        for term in terms {
            if term.word.num_qubits() != num_qubits {
                return Err(PauliError::QubitMismatch {
                    left: term.word.num_qubits(),
                    right: num_qubits,
                });
            }
            if term.coeff != 0.0 {
                kept.push(term);
            }
        }
        let one_norm = kept.iter().map(|t| t.coeff.abs()).sum();
        Ok(Hamiltonian {
            num_qubits,
            terms: kept,
            one_norm,
        })
    }

    pub fn empty(num_qubits: usize) -> Self {
        Hamiltonian {
            num_qubits,
            terms: Vec::new(),
            one_norm: 0.0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cached sum of |coefficients|.
    pub fn one_norm(&self) -> f64 {
        self.one_norm
    }

    /// Largest locality over terms.
    pub fn max_locality(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.word.locality())
            .max()
            .unwrap_or(0)
    }

    /// Merge duplicate words, drop vanished terms, and order terms by word.
    ///
    /// The represented operator is unchanged; only the bookkeeping differs.
    pub fn canonicalize(&self) -> Hamiltonian {
        let mut merged: BTreeMap<PauliWord, f64> = BTreeMap::new();
        for term in &self.terms {
            *merged.entry(term.word.clone()).or_insert(0.0) += term.coeff;
        }
        let terms: Vec<PauliTerm> = merged
            .into_iter()
            .filter(|(_, c)| c.abs() > 1e-14)
            .map(|(word, coeff)| PauliTerm { coeff, word })
            .collect();
        let one_norm = terms.iter().map(|t| t.coeff.abs()).sum();
        Hamiltonian {
            num_qubits: self.num_qubits,
            terms,
            one_norm,
        }
    }

    /// Concatenate summands, keeping duplicates.
    pub fn concat(parts: &[&Hamiltonian]) -> Result<Hamiltonian> {
        let num_qubits = parts.first().map(|h| h.num_qubits).unwrap_or(0);
        let mut terms = Vec::new();
        for part in parts {
            if part.num_qubits != num_qubits {
                return Err(PauliError::QubitMismatch {
                    left: part.num_qubits,
                    right: num_qubits,
                });
            }
            terms.extend(part.terms.iter().cloned());
        }
        Hamiltonian::new(num_qubits, terms)
    }

    /// Multiply every coefficient by `factor`.
    pub fn scale(&self, factor: f64) -> Hamiltonian {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm::new(t.coeff * factor, t.word.clone()))
            .collect::<Vec<_>>();
        Hamiltonian::new(self.num_qubits, terms).expect("scaling preserves register")
    }

    /// Re-index into a larger register; local qubit `i` maps to `map[i-1]`.
    pub fn embed(&self, map: &[usize], total_qubits: usize) -> Result<Hamiltonian> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(PauliTerm::new(t.coeff, t.word.embed(map, total_qubits)?));
        }
        Hamiltonian::new(total_qubits, terms)
    }

    /// Product of two Hamiltonians whose words live on disjoint qubits of the
    /// same register (a tensor product written on the joint index space).
    pub fn product_disjoint(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        if self.num_qubits != other.num_qubits {
            return Err(PauliError::QubitMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(PauliTerm::new(
                    a.coeff * b.coeff,
                    a.word.union_disjoint(&b.word)?,
                ));
            }
        }
        Hamiltonian::new(self.num_qubits, terms)
    }

    /// Dense realization. Capped at 12 qubits.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.num_qubits > DENSE_CAP {
            return Err(PauliError::TooLarge {
                qubits: self.num_qubits,
                max: DENSE_CAP,
            });
        }
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for term in &self.terms {
            let (xmask, zmask) = term.word.masks();
            for col in 0..dim as u64 {
                let row = col ^ xmask;
                let sign = if (col & zmask).count_ones() & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                m[(row as usize, col as usize)] += term.coeff * sign;
            }
        }
        Ok(m)
    }

    /// Exact operator norm (largest singular value) of the realized matrix,
    /// by dense symmetric eigendecomposition.
    pub fn operator_norm(&self) -> Result<f64> {
        let m = self.to_matrix()?;
        Ok(symmetric_operator_norm(&m))
    }

    /// Convenience: a single-letter Hamiltonian `coeff * L_index`.
    pub fn single(num_qubits: usize, coeff: f64, index: usize, letter: Letter) -> Result<Self> {
        Hamiltonian::new(
            num_qubits,
            [PauliTerm::new(
                coeff,
                PauliWord::single(num_qubits, index, letter)?,
            )],
        )
    }
}

/// Largest |eigenvalue| of a real symmetric matrix.
pub(crate) fn symmetric_operator_norm(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::word_matrix;

    fn z1(q: usize, coeff: f64) -> PauliTerm {
        PauliTerm::new(coeff, PauliWord::single(q, 1, Letter::Z).unwrap())
    }

    #[test]
    fn canonicalize_merges_duplicates() {
        // {Z:1, Z:2} -> {Z:3}
        let h = Hamiltonian::new(1, [z1(1, 1.0), z1(1, 2.0)]).unwrap();
        let c = h.canonicalize();
        assert_eq!(c.num_terms(), 1);
        assert_eq!(c.terms()[0].coeff, 3.0);
        assert_eq!(c.one_norm(), 3.0);
    }

    #[test]
    fn canonicalize_drops_cancelled_terms() {
        // {X:1, X:-1} -> empty
        let x = PauliWord::single(1, 1, Letter::X).unwrap();
        let h =
            Hamiltonian::new(1, [PauliTerm::new(1.0, x.clone()), PauliTerm::new(-1.0, x)]).unwrap();
        assert!(h.canonicalize().is_empty());
    }

    #[test]
    fn one_norm_tracks_terms() {
        let h = Hamiltonian::new(2, [z1(2, -0.5), z1(2, 0.25)]).unwrap();
        assert!((h.one_norm() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_of_z_is_one() {
        let h = Hamiltonian::single(1, 1.0, 1, Letter::Z).unwrap();
        assert!((h.operator_norm().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn to_matrix_matches_word_matrix_sum() {
        let h = Hamiltonian::new(
            2,
            [
                PauliTerm::new(0.5, PauliWord::from_letters(2, [(1, Letter::X)]).unwrap()),
                PauliTerm::new(
                    -0.25,
                    PauliWord::from_letters(2, [(1, Letter::Z), (2, Letter::X)]).unwrap(),
                ),
            ],
        )
        .unwrap();
        let mut expected = DMatrix::<f64>::zeros(4, 4);
        for t in h.terms() {
            expected += word_matrix(&t.word).unwrap() * t.coeff;
        }
        let got = h.to_matrix().unwrap();
        assert!((got - expected).abs().max() < 1e-14);
    }

    #[test]
    fn product_disjoint_matches_kronecker() {
        // (0.5 X_1) * (2 Z_2) on 2 qubits = X (x) Z with coefficient 1.
        let a = Hamiltonian::single(2, 0.5, 1, Letter::X).unwrap();
        let b = Hamiltonian::single(2, 2.0, 2, Letter::Z).unwrap();
        let p = a.product_disjoint(&b).unwrap();
        assert_eq!(p.num_terms(), 1);
        let w = PauliWord::from_letters(2, [(1, Letter::X), (2, Letter::Z)]).unwrap();
        let expected = word_matrix(&w).unwrap();
        assert!((p.to_matrix().unwrap() - expected).abs().max() < 1e-14);
    }
}
