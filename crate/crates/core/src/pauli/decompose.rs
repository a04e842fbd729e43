//! Trace-based decomposition of real Hermitian matrices into Y-free words.

use super::hamiltonian::symmetric_operator_norm;
use super::{Hamiltonian, Letter, PauliError, PauliTerm, PauliWord, Result};
use nalgebra::DMatrix;

/// Default tolerance for Hermiticity and Y-freeness checks. Trace
/// computations on the <= 4-qubit matrices handled here accumulate well
/// under 1e-12 of error.
pub const DEFAULT_TOL: f64 = 1e-9;

const WORD_MATRIX_CAP: usize = 10;
const DECOMPOSE_CAP: usize = 4;

/// Dense realization of a single word. Capped at 10 qubits.
pub fn word_matrix(word: &PauliWord) -> Result<DMatrix<f64>> {
    let q = word.num_qubits();
    if q > WORD_MATRIX_CAP {
        return Err(PauliError::TooLarge {
            qubits: q,
            max: WORD_MATRIX_CAP,
        });
    }
    let dim = 1usize << q;
    let (xmask, zmask) = word.masks();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for col in 0..dim as u64 {
        let row = col ^ xmask;
        let sign = if (col & zmask).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(row as usize, col as usize)] = sign;
    }
    Ok(m)
}

/// All 3^q Y-free words on `q` qubits, in lexicographic order.
pub fn all_yfree_words(q: usize) -> Vec<PauliWord> {
    let mut words = vec![PauliWord::identity(q)];
    for qubit in 1..=q {
        let mut next = Vec::with_capacity(words.len() * 3);
        for w in &words {
            next.push(w.clone());
            for letter in [Letter::X, Letter::Z] {
                let ext = w
                    .union_disjoint(&PauliWord::single(q, qubit, letter).unwrap())
                    .unwrap();
                next.push(ext);
            }
        }
        words = next;
    }
    words.sort();
    words
}

/// trace(P * M) without materializing P.
fn trace_with_word(word: &PauliWord, m: &DMatrix<f64>) -> f64 {
    let dim = m.nrows() as u64;
    let (xmask, zmask) = word.masks();
    let mut acc = 0.0;
    for col in 0..dim {
        let row = col ^ xmask;
        // P[col][row] = sign computed at the column P acts on.
        let sign = if (row & zmask).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        acc += sign * m[(row as usize, col as usize)];
    }
    acc
}

fn qubit_count_of(m: &DMatrix<f64>) -> Result<usize> {
    let dim = m.nrows();
    if dim == 0 || m.ncols() != dim || !dim.is_power_of_two() {
        return Err(PauliError::BadDimension { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Decompose a real Hermitian matrix on k <= 4 qubits into Y-free words.
///
/// Coefficients are `trace(P * M) / 2^k`; words with |coefficient| below
/// `tol` are dropped. Fails with [`PauliError::YFreeViolation`] when the
/// Y-free reconstruction leaves a residual above `tol` (the matrix has Y
/// content), and with [`PauliError::NotHermitian`] when `M` is not symmetric
/// within `tol`.
pub fn decompose_yfree(m: &DMatrix<f64>, tol: f64) -> Result<Hamiltonian> {
    let k = qubit_count_of(m)?;
    if k > DECOMPOSE_CAP {
        return Err(PauliError::TooLarge {
            qubits: k,
            max: DECOMPOSE_CAP,
        });
    }
    let mut max_asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if max_asym > tol {
        return Err(PauliError::NotHermitian {
            max_asymmetry: max_asym,
        });
    }

    let dim = 1usize << k;
    let mut terms = Vec::new();
    for word in all_yfree_words(k) {
        let coeff = trace_with_word(&word, m) / dim as f64;
        if coeff.abs() >= tol {
            terms.push(PauliTerm::new(coeff, word));
        }
    }
    let h = Hamiltonian::new(k, terms)?;

    let residual = (m - h.to_matrix()?).abs().max();
    if residual > tol {
        return Err(PauliError::YFreeViolation { residual });
    }
    Ok(h)
}

/// The 3-qubit decomposition of the doubly-controlled Z gate, built from
/// `CCZ = (I - |11><11|) (x) I + |11><11| (x) Z` and merged.
pub fn ccz_decomposition() -> Hamiltonian {
    // |11><11| on qubits (1,2) = 1/4 (II - IZ - ZI + ZZ).
    let q = 3;
    let w =
        |letters: &[(usize, Letter)]| PauliWord::from_letters(q, letters.iter().copied()).unwrap();
    let proj11 = Hamiltonian::new(
        q,
        [
            PauliTerm::new(0.25, PauliWord::identity(q)),
            PauliTerm::new(-0.25, w(&[(2, Letter::Z)])),
            PauliTerm::new(-0.25, w(&[(1, Letter::Z)])),
            PauliTerm::new(0.25, w(&[(1, Letter::Z), (2, Letter::Z)])),
        ],
    )
    .unwrap();
    let z3 = Hamiltonian::single(q, 1.0, 3, Letter::Z).unwrap();
    // III - proj11 (x) I + proj11 (x) Z_3
    let identity = Hamiltonian::new(q, [PauliTerm::new(1.0, PauliWord::identity(q))]).unwrap();
    let minus_proj = proj11.scale(-1.0);
    let proj_z = proj11.product_disjoint(&z3).unwrap();
    Hamiltonian::concat(&[&identity, &minus_proj, &proj_z])
        .unwrap()
        .canonicalize()
}

/// Outcome of checking the Pauli 1-norm inequalities
/// `2^{-k/2} ||M|| <= sum |c_P| <= 2^k ||M||`.
#[derive(Debug, Clone)]
pub struct OneNormReport {
    pub qubits: usize,
    pub operator_norm: f64,
    pub one_norm: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl OneNormReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Check both 1-norm inequalities for a matrix and its decomposition.
pub fn one_norm_bound_check(
    m: &DMatrix<f64>,
    decomposition: &Hamiltonian,
) -> Result<OneNormReport> {
    let qubits = qubit_count_of(m)?;
    let operator_norm = symmetric_operator_norm(m);
    if operator_norm < 1e-300 {
        return Err(PauliError::ZeroMatrix);
    }
    let one_norm = decomposition.one_norm();
    let lower_bound = operator_norm / 2f64.powf(qubits as f64 / 2.0);
    let upper_bound = operator_norm * 2f64.powi(qubits as i32);
    // Tiny slack for the floating-point trace arithmetic around exact ties
    // (e.g. single-qubit Z where the lower bound is attained).
    let eps = 1e-12 * operator_norm.max(1.0);
    Ok(OneNormReport {
        qubits,
        operator_norm,
        one_norm,
        lower_bound,
        upper_bound,
        lower_ok: one_norm >= lower_bound - eps,
        upper_ok: one_norm <= upper_bound + eps,
    })
}
