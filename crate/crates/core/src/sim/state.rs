//! State storage and the state dump text format.

use super::{Result, SimError};

/// Hard cap on dense statevector size.
pub const MAX_QUBITS: usize = 20;

const NORM_TOL: f64 = 1e-10;

/// A normalized real amplitude vector on `n` qubits.
///
/// Index convention is big-endian: qubit 1 is the most significant bit, so
/// `|10>` on two qubits is index 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStateVector {
    num_qubits: usize,
    amplitudes: Vec<f64>,
}

impl RealStateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    /// The computational-basis state with the given index.
    pub fn basis_state(num_qubits: usize, index: u64) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooLarge {
                qubits: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index as usize >= dim {
            return Err(SimError::IndexOutOfRange {
                index: index as usize,
                num_qubits,
            });
        }
        let mut amplitudes = vec![0.0; dim];
        amplitudes[index as usize] = 1.0;
        Ok(RealStateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Build from raw amplitudes; the vector must already be normalized
    /// within 1e-10 and have power-of-two length.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::BadLength { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooLarge {
                qubits: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized { norm });
        }
        Ok(RealStateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Build from raw amplitudes, rescaling to unit norm.
    pub fn from_amplitudes_normalized(mut amplitudes: Vec<f64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SimError::NotNormalized { norm });
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Tensor product `self (x) other` (self occupies the high bits).
    pub fn tensor(&self, other: &RealStateVector) -> Result<Self> {
        let num_qubits = self.num_qubits + other.num_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooLarge {
                qubits: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for &a in &self.amplitudes {
            for &b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(RealStateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Bit of qubit `index` (1-based) within a basis index.
    pub fn bit_of(&self, basis_index: usize, qubit: usize) -> bool {
        (basis_index >> (self.num_qubits - qubit)) & 1 == 1
    }

    /// Probability that `qubit` measures 1 in the Z basis.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(SimError::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let bit = 1usize << (self.num_qubits - qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a * a)
            .sum())
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &RealStateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let dot: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum();
        Ok(dot * dot)
    }
}

/// An ordered list of independent state blocks, treated as one register.
///
/// Qubits are numbered globally and contiguously: block 0 holds qubits
/// `1..=q_0`, block 1 holds the next `q_1`, and so on. Measurements
/// factorize exactly across blocks, which keeps many-copy experiments inside
/// the per-block qubit cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    blocks: Vec<RealStateVector>,
}

impl ProductState {
    pub fn new(blocks: Vec<RealStateVector>) -> Self {
        ProductState { blocks }
    }

    pub fn single(state: RealStateVector) -> Self {
        ProductState {
            blocks: vec![state],
        }
    }

    pub fn blocks(&self) -> &[RealStateVector] {
        &self.blocks
    }

    pub fn total_qubits(&self) -> usize {
        self.blocks.iter().map(|b| b.num_qubits()).sum()
    }

    /// Map a global 1-based qubit index to `(block, local 1-based index)`.
    pub fn locate(&self, qubit: usize) -> Result<(usize, usize)> {
        let mut offset = 0;
        if qubit > 0 {
            for (b, block) in self.blocks.iter().enumerate() {
                if qubit <= offset + block.num_qubits() {
                    return Ok((b, qubit - offset));
                }
                offset += block.num_qubits();
            }
        }
        Err(SimError::IndexOutOfRange {
            index: qubit,
            num_qubits: self.total_qubits(),
        })
    }
}

/// Serialize a state as the plain dump format: comments, then one amplitude
/// per line in basis-index order (big-endian, qubit 1 most significant).
pub fn write_state_dump(state: &RealStateVector) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# state dump: {} qubits, 2^n amplitudes, index order big-endian (qubit 1 = most significant bit)\n",
        state.num_qubits()
    ));
    for a in state.amplitudes() {
        out.push_str(&format!("{a}\n"));
    }
    out
}

/// Parse the state dump format.
pub fn parse_state_dump(text: &str) -> Result<RealStateVector> {
    let mut amplitudes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for field in line.split_whitespace() {
            let a: f64 = field.parse().map_err(|_| SimError::Parse {
                line: idx + 1,
                msg: format!("bad amplitude '{field}'"),
            })?;
            amplitudes.push(a);
        }
    }
    RealStateVector::from_amplitudes(amplitudes)
}
