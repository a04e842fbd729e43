//! Folding a 3-message public-coin proof into one verifier circuit.
//!
//! The input protocol has the fixed shape: the prover applies `u1` to its
//! state on registers A/B/C and sends A; the verifier replies with uniform
//! coins `r`; the prover applies `u2(r)` to B/C and sends B; the verifier
//! applies its verdict `v2(r)` on R/A/B plus work ancillas D and reads the
//! output qubit O. `u2` and `v2` are supplied as coherent circuits that only
//! *control* on the coin register, so running them under a Hadamard layer on
//! R reproduces the classical average over coins exactly.
//!
//! The flattened verifier is a single circuit with witness register A/B/C in
//! front and ancillas R/D/O trailing (output last), which is exactly the
//! layout the clock compiler expects.

use crate::sim::{apply_gate, Gate, GateKind, QuantumCircuit, RealStateVector, SimError};
use crate::stats::binomial_tail_geq;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlattenError {
    #[error("register layout error: {0}")]
    LayoutError(String),
    #[error("{circuit} is not control-only on the coin register (leak {leak:e})")]
    ControlOnlyViolation { circuit: &'static str, leak: f64 },
    #[error("{rand_len} coin bits exceeds the enumeration cap of {max}")]
    TooManyCoins { rand_len: usize, max: usize },
    #[error("completeness {c} does not exceed soundness {s}")]
    GapNonpositive { c: f64, s: f64 },
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("{copies} copies exceeds the product-repetition cap of {max}")]
    TooManyCopies { copies: usize, max: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T> = std::result::Result<T, FlattenError>;

const MAX_COINS: usize = 12;
const MAX_COPIES: usize = 4;
const CONTROL_CHECK_TRIALS: usize = 8;
const CONTROL_TOL: f64 = 1e-9;

/// A 3-message public-coin proof in the fixed register shape.
#[derive(Debug, Clone)]
pub struct PublicCoinQip {
    reg_a: usize,
    reg_b: usize,
    reg_c: usize,
    reg_d: usize,
    rand_len: usize,
    u1: QuantumCircuit,
    u2: QuantumCircuit,
    v2: QuantumCircuit,
}

impl PublicCoinQip {
    /// Validate the register shape and the control-only contract on R.
    ///
    /// `u1` acts on A|B|C; `u2` on R|B|C; `v2` on R|A|B|D|O with
    /// `ancilla_count = |D| + 1` and the output qubit last.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        reg_a: usize,
        reg_b: usize,
        reg_c: usize,
        reg_d: usize,
        rand_len: usize,
        u1: QuantumCircuit,
        u2: QuantumCircuit,
        v2: QuantumCircuit,
    ) -> Result<Self> {
        if rand_len == 0 {
            return Err(FlattenError::LayoutError("rand_len must be >= 1".into()));
        }
        let abc = reg_a + reg_b + reg_c;
        if u1.num_qubits() != abc {
            return Err(FlattenError::LayoutError(format!(
                "u1 acts on {} qubits, A|B|C needs {abc}",
                u1.num_qubits()
            )));
        }
        if u2.num_qubits() != rand_len + reg_b + reg_c {
            return Err(FlattenError::LayoutError(format!(
                "u2 acts on {} qubits, R|B|C needs {}",
                u2.num_qubits(),
                rand_len + reg_b + reg_c
            )));
        }
        let v2_qubits = rand_len + reg_a + reg_b + reg_d + 1;
        if v2.num_qubits() != v2_qubits {
            return Err(FlattenError::LayoutError(format!(
                "v2 acts on {} qubits, R|A|B|D|O needs {v2_qubits}",
                v2.num_qubits()
            )));
        }
        if v2.ancilla_count() != reg_d + 1 {
            return Err(FlattenError::LayoutError(format!(
                "v2 declares {} ancillas, D|O needs {}",
                v2.ancilla_count(),
                reg_d + 1
            )));
        }
        let qip = PublicCoinQip {
            reg_a,
            reg_b,
            reg_c,
            reg_d,
            rand_len,
            u1,
            u2,
            v2,
        };
        qip.check_control_only(&qip.u2, "u2")?;
        qip.check_control_only(&qip.v2, "v2")?;
        Ok(qip)
    }

    pub fn reg_a(&self) -> usize {
        self.reg_a
    }

    pub fn reg_b(&self) -> usize {
        self.reg_b
    }

    pub fn reg_c(&self) -> usize {
        self.reg_c
    }

    pub fn reg_d(&self) -> usize {
        self.reg_d
    }

    pub fn rand_len(&self) -> usize {
        self.rand_len
    }

    pub fn u1(&self) -> &QuantumCircuit {
        &self.u1
    }

    pub fn u2(&self) -> &QuantumCircuit {
        &self.u2
    }

    pub fn v2(&self) -> &QuantumCircuit {
        &self.v2
    }

    /// Witness register size |A| + |B| + |C|.
    pub fn witness_qubits(&self) -> usize {
        self.reg_a + self.reg_b + self.reg_c
    }

    /// Probe that a circuit is block-diagonal in the computational basis of
    /// its leading coin qubits: on `|r> (x) psi` inputs the coin prefix
    /// stays `|r>` exactly.
    fn check_control_only(&self, circuit: &QuantumCircuit, name: &'static str) -> Result<()> {
        use rand::Rng;
        let n = circuit.num_qubits();
        let r = self.rand_len;
        let rest = n - r;
        let mut rng = crate::seeds::rng_from(0x436f696e); // fixed probe seed
        for _ in 0..CONTROL_CHECK_TRIALS {
            let coin = rng.random_range(0..(1u64 << r));
            let tail: Vec<f64> = (0..(1usize << rest))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let tail = RealStateVector::from_amplitudes_normalized(tail)?;
            let coin_state = RealStateVector::basis_state(r, coin)?;
            let input = coin_state.tensor(&tail)?;
            let out = circuit.run(&input)?;
            let mut leak = 0.0;
            for (i, a) in out.amplitudes().iter().enumerate() {
                if (i >> rest) as u64 != coin {
                    leak += a * a;
                }
            }
            let leak = leak.sqrt();
            if leak > CONTROL_TOL {
                return Err(FlattenError::ControlOnlyViolation {
                    circuit: name,
                    leak,
                });
            }
        }
        Ok(())
    }
}

/// The folded verifier: witness qubits leading, ancillas R|D|O trailing.
#[derive(Debug, Clone)]
pub struct FlattenedVerifier {
    circuit: QuantumCircuit,
    reg_a: usize,
    reg_b: usize,
    reg_c: usize,
    reg_d: usize,
    rand_len: usize,
}

impl FlattenedVerifier {
    pub fn circuit(&self) -> &QuantumCircuit {
        &self.circuit
    }

    pub fn into_circuit(self) -> QuantumCircuit {
        self.circuit
    }

    pub fn witness_qubits(&self) -> usize {
        self.reg_a + self.reg_b + self.reg_c
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.rand_len + self.reg_d + 1
    }

    /// Acceptance probability on `witness (x) |0...0>`.
    pub fn acceptance(&self, witness: &RealStateVector) -> Result<f64> {
        Ok(self.circuit.acceptance_probability(witness)?)
    }
}

/// Fold the interaction into one circuit: Hadamards on R, then `u1`, `u2`,
/// `v2`, with qubits remapped so the witness registers lead and the
/// ancillas (R, D, O) trail.
pub fn flatten(qip: &PublicCoinQip) -> Result<FlattenedVerifier> {
    let (a, b, c, d, r) = (qip.reg_a, qip.reg_b, qip.reg_c, qip.reg_d, qip.rand_len);
    let abc = a + b + c;
    let total = abc + r + d + 1;

    // Global positions.
    let a_pos: Vec<usize> = (1..=a).collect();
    let b_pos: Vec<usize> = (a + 1..=a + b).collect();
    let c_pos: Vec<usize> = (a + b + 1..=abc).collect();
    let r_pos: Vec<usize> = (abc + 1..=abc + r).collect();
    let d_pos: Vec<usize> = (abc + r + 1..=abc + r + d).collect();
    let o_pos = total;

    let mut gates: Vec<Gate> = Vec::new();
    for &q in &r_pos {
        gates.push(Gate::new(GateKind::H, vec![q])?);
    }

    // u1 on A|B|C: identity placement.
    let u1_map: Vec<usize> = (1..=abc).collect();
    for g in qip.u1.gates() {
        gates.push(g.remap(&u1_map)?);
    }

    // u2 on R|B|C.
    let mut u2_map = Vec::with_capacity(r + b + c);
    u2_map.extend(&r_pos);
    u2_map.extend(&b_pos);
    u2_map.extend(&c_pos);
    for g in qip.u2.gates() {
        gates.push(g.remap(&u2_map)?);
    }

    // v2 on R|A|B|D|O.
    let mut v2_map = Vec::with_capacity(r + a + b + d + 1);
    v2_map.extend(&r_pos);
    v2_map.extend(&a_pos);
    v2_map.extend(&b_pos);
    v2_map.extend(&d_pos);
    v2_map.push(o_pos);
    for g in qip.v2.gates() {
        gates.push(g.remap(&v2_map)?);
    }

    let circuit = QuantumCircuit::new(total, gates, r + d + 1)?;
    Ok(FlattenedVerifier {
        circuit,
        reg_a: a,
        reg_b: b,
        reg_c: c,
        reg_d: d,
        rand_len: r,
    })
}

/// Exact interactive acceptance: average over all `2^rand_len` coin strings
/// of the verdict probability, by direct simulation of the message flow.
pub fn interactive_accept_prob(qip: &PublicCoinQip, aux: &RealStateVector) -> Result<f64> {
    let (a, b, c, d, r) = (qip.reg_a, qip.reg_b, qip.reg_c, qip.reg_d, qip.rand_len);
    let abc = a + b + c;
    if aux.num_qubits() != abc {
        return Err(SimError::DimensionMismatch {
            left: aux.num_qubits(),
            right: abc,
        }
        .into());
    }
    if r > MAX_COINS {
        return Err(FlattenError::TooManyCoins {
            rand_len: r,
            max: MAX_COINS,
        });
    }

    // Prover's first move is coin-independent.
    let sigma = qip.u1.run(aux)?;

    // Joint register for the rest of the interaction: A|B|C|R|D|O with the
    // coins held as a classical basis state.
    let total = abc + r + d + 1;
    let mut u2_map = Vec::new();
    u2_map.extend(abc + 1..=abc + r); // R
    u2_map.extend(a + 1..=a + b); // B
    u2_map.extend(a + b + 1..=abc); // C
    let mut v2_map = Vec::new();
    v2_map.extend(abc + 1..=abc + r); // R
    v2_map.extend(1..=a); // A
    v2_map.extend(a + 1..=a + b); // B
    v2_map.extend(abc + r + 1..=abc + r + d); // D
    v2_map.push(total); // O

    let mut acc = 0.0;
    for coin in 0..(1u64 << r) {
        let coin_state = RealStateVector::basis_state(r, coin)?;
        let tail = coin_state.tensor(&RealStateVector::zero_state(d + 1)?)?;
        let mut state = sigma.tensor(&tail)?;
        for g in qip.u2.gates() {
            state = apply_gate(&state, &g.remap(&u2_map)?)?;
        }
        for g in qip.v2.gates() {
            state = apply_gate(&state, &g.remap(&v2_map)?)?;
        }
        acc += state.prob_one(total)?;
    }
    Ok(acc / (1u64 << r) as f64)
}

/// Closed-form tail bound `e^{-2 eps^2 n}` for the deviation of a Bernoulli
/// mean.
pub fn chernoff(p: f64, eps: f64, n: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(FlattenError::RangeError(format!("p = {p} not in [0, 1]")));
    }
    if eps <= 0.0 {
        return Err(FlattenError::RangeError(format!("eps = {eps} must be > 0")));
    }
    Ok((-2.0 * eps * eps * n as f64).exp())
}

/// Threshold-amplification report for `k` parallel copies judged at
/// threshold `(c + s) / 2`.
#[derive(Debug, Clone)]
pub struct AmplifyReport {
    pub completeness: f64,
    pub soundness: f64,
    pub copies: u64,
    /// Accepting count threshold `ceil((c+s)/2 * k)`.
    pub threshold_count: u64,
    /// Chernoff lower bound on accepting a product witness: `1 - e^{-k(c-s)^2/2}`.
    pub completeness_bound: f64,
    /// Chernoff upper bound on accepting in the soundness case: `e^{-k(c-s)^2/2}`.
    pub soundness_bound: f64,
    /// Exact `P[Bin(k, c) >= threshold]` for independent per-copy verdicts.
    pub exact_completeness: f64,
    /// Exact `P[Bin(k, s) >= threshold]`.
    pub exact_soundness: f64,
}

pub fn threshold_amplify(c: f64, s: f64, copies: u64) -> Result<AmplifyReport> {
    if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) {
        return Err(FlattenError::RangeError(format!(
            "(c, s) = ({c}, {s}) not in [0, 1]^2"
        )));
    }
    if c <= s {
        return Err(FlattenError::GapNonpositive { c, s });
    }
    let threshold = (c + s) / 2.0;
    let threshold_count = (threshold * copies as f64).ceil() as u64;
    let tail = (-(copies as f64) * (c - s) * (c - s) / 2.0).exp();
    Ok(AmplifyReport {
        completeness: c,
        soundness: s,
        copies,
        threshold_count,
        completeness_bound: 1.0 - tail,
        soundness_bound: tail,
        exact_completeness: binomial_tail_geq(copies, c, threshold_count),
        exact_soundness: binomial_tail_geq(copies, s, threshold_count),
    })
}

fn multi_controlled_x(controls: &[usize], ancillas: &[usize], target: usize) -> Result<Vec<Gate>> {
    Ok(match controls.len() {
        0 => vec![Gate::new(GateKind::X, vec![target])?],
        1 => vec![Gate::new(GateKind::Cnot, vec![controls[0], target])?],
        2 => vec![Gate::new(
            GateKind::Ccx,
            vec![controls[0], controls[1], target],
        )?],
        3 => {
            let a1 = ancillas[0];
            let up = Gate::new(GateKind::Ccx, vec![controls[0], controls[1], a1])?;
            vec![
                up.clone(),
                Gate::new(GateKind::Ccx, vec![a1, controls[2], target])?,
                up,
            ]
        }
        4 => {
            let (a1, a2) = (ancillas[0], ancillas[1]);
            let up1 = Gate::new(GateKind::Ccx, vec![controls[0], controls[1], a1])?;
            let up2 = Gate::new(GateKind::Ccx, vec![controls[2], controls[3], a2])?;
            vec![
                up1.clone(),
                up2.clone(),
                Gate::new(GateKind::Ccx, vec![a1, a2, target])?,
                up2,
                up1,
            ]
        }
        n => {
            return Err(FlattenError::TooManyCopies {
                copies: n,
                max: MAX_COPIES,
            })
        }
    })
}

fn threshold_ancillas_needed(copies: usize) -> usize {
    match copies {
        0..=2 => 0,
        3 => 1,
        _ => 2,
    }
}

/// Parallel threshold repetition as a proof-to-proof product construction.
///
/// Registers blow up k-fold: the new A is `A_1..A_k` and so on; each copy
/// gets independent coins. The new verdict circuit runs the per-copy `v2`s
/// on disjoint registers, then computes "at least `threshold_count` of the k
/// output bits are 1" into a fresh output qubit with a pattern-enumerated
/// controlled-X network (clean work ancillas, uncomputed). Desk-scale only:
/// `k <= 4`.
pub fn product_repeat(
    qip: &PublicCoinQip,
    copies: usize,
    threshold_count: usize,
) -> Result<PublicCoinQip> {
    if copies == 0 || copies > MAX_COPIES {
        return Err(FlattenError::TooManyCopies {
            copies,
            max: MAX_COPIES,
        });
    }
    let (a, b, c, d, r) = (qip.reg_a, qip.reg_b, qip.reg_c, qip.reg_d, qip.rand_len);
    let k = copies;
    let extra = threshold_ancillas_needed(k);
    let new_d = k * d + k + extra;

    // u1' on A'|B'|C'.
    let mut u1_gates = Vec::new();
    for i in 0..k {
        let mut map = Vec::with_capacity(a + b + c);
        map.extend(i * a + 1..=i * a + a);
        map.extend(k * a + i * b + 1..=k * a + i * b + b);
        map.extend(k * (a + b) + i * c + 1..=k * (a + b) + i * c + c);
        for g in qip.u1.gates() {
            u1_gates.push(g.remap(&map)?);
        }
    }
    let u1 = QuantumCircuit::new(k * (a + b + c), u1_gates, 0)?;

    // u2' on R'|B'|C'.
    let mut u2_gates = Vec::new();
    for i in 0..k {
        let mut map = Vec::with_capacity(r + b + c);
        map.extend(i * r + 1..=i * r + r);
        map.extend(k * r + i * b + 1..=k * r + i * b + b);
        map.extend(k * (r + b) + i * c + 1..=k * (r + b) + i * c + c);
        for g in qip.u2.gates() {
            u2_gates.push(g.remap(&map)?);
        }
    }
    let u2 = QuantumCircuit::new(k * (r + b + c), u2_gates, 0)?;

    // v2' on R'|A'|B'|D'|O' where D' = per-copy D blocks, per-copy output
    // bits, then threshold work ancillas.
    let v2_total = k * (r + a + b) + new_d + 1;
    let d_base = k * (r + a + b);
    let o_block = d_base + k * d; // per-copy outputs live here
    let anc_base = o_block + k;
    let target = v2_total;

    let mut v2_gates = Vec::new();
    for i in 0..k {
        let mut map = Vec::with_capacity(r + a + b + d + 1);
        map.extend(i * r + 1..=i * r + r);
        map.extend(k * r + i * a + 1..=k * r + i * a + a);
        map.extend(k * (r + a) + i * b + 1..=k * (r + a) + i * b + b);
        map.extend(d_base + i * d + 1..=d_base + i * d + d);
        map.push(o_block + i + 1);
        for g in qip.v2.gates() {
            v2_gates.push(g.remap(&map)?);
        }
    }

    // Threshold of the k per-copy output bits into the fresh output.
    let o_positions: Vec<usize> = (1..=k).map(|i| o_block + i).collect();
    let anc_positions: Vec<usize> = (1..=extra).map(|i| anc_base + i).collect();
    for pattern in 0u32..(1 << k) {
        if (pattern.count_ones() as usize) < threshold_count {
            continue;
        }
        let zero_positions: Vec<usize> = (0..k)
            .filter(|i| pattern & (1 << i) == 0)
            .map(|i| o_positions[i])
            .collect();
        for &z in &zero_positions {
            v2_gates.push(Gate::new(GateKind::X, vec![z])?);
        }
        v2_gates.extend(multi_controlled_x(&o_positions, &anc_positions, target)?);
        for &z in &zero_positions {
            v2_gates.push(Gate::new(GateKind::X, vec![z])?);
        }
    }

    let v2 = QuantumCircuit::new(v2_total, v2_gates, new_d + 1)?;

    PublicCoinQip::new(k * a, k * b, k * c, new_d, k * r, u1, u2, v2)
}

/// Hand-built example proofs, also used by the experiment fixtures.
pub mod toys {
    use super::*;
    use rand::Rng;

    /// The matching-bit toy: no A or C registers, one B qubit, one coin.
    /// The honest prover flips B to match the coin; the verifier accepts
    /// when B equals the coin. Honest acceptance 1; with `u2 = identity`
    /// the prover leaves B at its auxiliary value and acceptance is 1/2 on
    /// `|0>`.
    pub fn matching_bit_qip(honest_u2: bool) -> PublicCoinQip {
        let u1 = QuantumCircuit::new(1, vec![], 0).unwrap();
        let u2_gates = if honest_u2 {
            vec![Gate::new(GateKind::Cnot, vec![1, 2]).unwrap()]
        } else {
            vec![]
        };
        let u2 = QuantumCircuit::new(2, u2_gates, 0).unwrap();
        // v2 on R|B|O: B ^= r, flip B, copy to O.
        let v2 = QuantumCircuit::new(
            3,
            vec![
                Gate::new(GateKind::Cnot, vec![1, 2]).unwrap(),
                Gate::new(GateKind::X, vec![2]).unwrap(),
                Gate::new(GateKind::Cnot, vec![2, 3]).unwrap(),
            ],
            1,
        )
        .unwrap();
        PublicCoinQip::new(0, 1, 0, 0, 1, u1, u2, v2).unwrap()
    }

    /// A toy whose verdict is constant-accept: `v2` just flips O.
    pub fn constant_accept_qip() -> PublicCoinQip {
        let u1 = QuantumCircuit::new(1, vec![], 0).unwrap();
        let u2 = QuantumCircuit::new(2, vec![], 0).unwrap();
        let v2 = QuantumCircuit::new(3, vec![Gate::new(GateKind::X, vec![3]).unwrap()], 1).unwrap();
        PublicCoinQip::new(0, 1, 0, 0, 1, u1, u2, v2).unwrap()
    }

    /// Random small proof with the control-only discipline on R: gates
    /// touching coin qubits are restricted to diagonal roles or control
    /// positions. Registers satisfy |A|+|B|+|C| <= 3 and |R| <= 4.
    pub fn random_qip(seed: u64) -> PublicCoinQip {
        let mut rng = crate::seeds::rng_from(seed);
        let a = rng.random_range(0..=1usize);
        let b = rng.random_range(1..=2usize);
        let c = if a + b < 3 {
            rng.random_range(0..=1usize)
        } else {
            0
        };
        let d = rng.random_range(0..=1usize);
        let r = rng.random_range(1..=4usize);

        let abc = a + b + c;
        let u1 = random_free_circuit(&mut rng, abc, 0, 3);
        let u2 = random_controlled_circuit(&mut rng, r, b + c, 4);
        let mut v2 = random_controlled_circuit(&mut rng, r, a + b + d + 1, 4);
        // Give the verdict qubit some dependence on the rest.
        let n_v2 = v2.num_qubits();
        let mut gates = v2.gates().to_vec();
        if n_v2 - r >= 2 {
            let src = rng.random_range(r + 1..n_v2);
            gates.push(Gate::new(GateKind::Cnot, vec![src, n_v2]).unwrap());
        } else {
            gates.push(Gate::new(GateKind::X, vec![n_v2]).unwrap());
        }
        v2 = QuantumCircuit::new(n_v2, gates, d + 1).unwrap();

        PublicCoinQip::new(a, b, c, d, r, u1, u2, v2).unwrap()
    }

    fn random_free_circuit(
        rng: &mut impl Rng,
        qubits: usize,
        ancillas: usize,
        max_gates: usize,
    ) -> QuantumCircuit {
        let mut gates = Vec::new();
        if qubits >= 1 {
            for _ in 0..rng.random_range(0..=max_gates) {
                gates.push(random_gate(rng, qubits, &(1..=qubits).collect::<Vec<_>>()));
            }
        }
        QuantumCircuit::new(qubits, gates, ancillas).unwrap()
    }

    /// Random circuit on `r + rest` qubits where the first `r` qubits only
    /// appear in diagonal gates or as controls.
    fn random_controlled_circuit(
        rng: &mut impl Rng,
        r: usize,
        rest: usize,
        max_gates: usize,
    ) -> QuantumCircuit {
        let n = r + rest;
        let mut gates = Vec::new();
        let targets: Vec<usize> = (r + 1..=n).collect();
        for _ in 0..rng.random_range(1..=max_gates) {
            // Diagonal gates may touch R; bit-flipping gates must target
            // beyond it.
            let roll = rng.random_range(0..6);
            let gate = match roll {
                0 => Gate::new(GateKind::Z, vec![rng.random_range(1..=n)]),
                1 if n >= 2 => {
                    let (q1, q2) = two_distinct(rng, 1, n);
                    Gate::new(GateKind::Cz, vec![q1, q2])
                }
                2 => Gate::new(
                    GateKind::X,
                    vec![targets[rng.random_range(0..targets.len())]],
                ),
                3 => Gate::new(
                    GateKind::H,
                    vec![targets[rng.random_range(0..targets.len())]],
                ),
                4 if n >= 2 => {
                    let t = targets[rng.random_range(0..targets.len())];
                    let ctl = distinct_from(rng, 1, n, &[t]);
                    Gate::new(GateKind::Cnot, vec![ctl, t])
                }
                _ if n >= 3 => {
                    let t = targets[rng.random_range(0..targets.len())];
                    let c1 = distinct_from(rng, 1, n, &[t]);
                    let c2 = distinct_from(rng, 1, n, &[t, c1]);
                    Gate::new(GateKind::Ccx, vec![c1, c2, t])
                }
                _ => Gate::new(
                    GateKind::X,
                    vec![targets[rng.random_range(0..targets.len())]],
                ),
            };
            gates.push(gate.unwrap());
        }
        QuantumCircuit::new(n, gates, 0).unwrap()
    }

    fn random_gate(rng: &mut impl Rng, n: usize, allowed: &[usize]) -> Gate {
        loop {
            let kinds: &[GateKind] = if n >= 3 {
                &GateKind::ALL
            } else if n == 2 {
                &GateKind::ALL[..5]
            } else {
                &GateKind::ALL[..3]
            };
            let kind = kinds[rng.random_range(0..kinds.len())];
            let mut qubits = Vec::new();
            let mut pool = allowed.to_vec();
            for _ in 0..kind.arity() {
                let i = rng.random_range(0..pool.len());
                qubits.push(pool.swap_remove(i));
            }
            if let Ok(g) = Gate::new(kind, qubits) {
                return g;
            }
        }
    }

    fn two_distinct(rng: &mut impl Rng, lo: usize, hi: usize) -> (usize, usize) {
        let q1 = rng.random_range(lo..=hi);
        let mut q2 = rng.random_range(lo..=hi);
        while q2 == q1 {
            q2 = rng.random_range(lo..=hi);
        }
        (q1, q2)
    }

    fn distinct_from(rng: &mut impl Rng, lo: usize, hi: usize, taken: &[usize]) -> usize {
        loop {
            let q = rng.random_range(lo..=hi);
            if !taken.contains(&q) {
                return q;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_matching_bit_accepts_always() {
        let qip = toys::matching_bit_qip(true);
        let aux = RealStateVector::zero_state(1).unwrap();
        let p = interactive_accept_prob(&qip, &aux).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let flat = flatten(&qip).unwrap();
        let pf = flat.acceptance(&aux).unwrap();
        assert!((pf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lazy_matching_bit_accepts_half() {
        let qip = toys::matching_bit_qip(false);
        let aux = RealStateVector::zero_state(1).unwrap();
        let p = interactive_accept_prob(&qip, &aux).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let flat = flatten(&qip).unwrap();
        let pf = flat.acceptance(&aux).unwrap();
        assert!((pf - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_accept_is_one_for_any_aux() {
        let qip = toys::constant_accept_qip();
        let aux = RealStateVector::from_amplitudes_normalized(vec![0.6, -0.8]).unwrap();
        assert!((interactive_accept_prob(&qip, &aux).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flattening_matches_interactive_on_random_toys() {
        use rand::Rng;
        for seed in 0..20u64 {
            let qip = toys::random_qip(seed);
            let mut rng = crate::seeds::rng_from(seed ^ 0xAAAA);
            let amps: Vec<f64> = (0..(1usize << qip.witness_qubits()))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let aux = RealStateVector::from_amplitudes_normalized(amps).unwrap();
            let interactive = interactive_accept_prob(&qip, &aux).unwrap();
            let flat = flatten(&qip).unwrap().acceptance(&aux).unwrap();
            assert!(
                (interactive - flat).abs() < 1e-10,
                "seed {seed}: {interactive} vs {flat}"
            );
        }
    }

    #[test]
    fn hadamard_layer_gives_uniform_coin_marginal() {
        // Before u2, the flattened circuit's R register is exactly uniform.
        let qip = toys::matching_bit_qip(true);
        let flat = flatten(&qip).unwrap();
        // The first rand_len gates are the Hadamard layer.
        let aux = RealStateVector::zero_state(1).unwrap();
        let input = aux
            .tensor(&RealStateVector::zero_state(flat.ancilla_qubits()).unwrap())
            .unwrap();
        let after_h = flat.circuit().run_prefix(&input, qip.rand_len()).unwrap();
        // Coin register is qubit 2 of [B|R|D(empty)|O]; its marginal must be
        // exactly 1/2.
        let p1 = after_h.prob_one(2).unwrap();
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn control_only_violation_detected() {
        // u2 applying H on the coin qubit is not a controlled operation.
        let u1 = QuantumCircuit::new(1, vec![], 0).unwrap();
        let u2 = QuantumCircuit::new(2, vec![Gate::new(GateKind::H, vec![1]).unwrap()], 0).unwrap();
        let v2 = QuantumCircuit::new(3, vec![Gate::new(GateKind::X, vec![3]).unwrap()], 1).unwrap();
        assert!(matches!(
            PublicCoinQip::new(0, 1, 0, 0, 1, u1, u2, v2),
            Err(FlattenError::ControlOnlyViolation { .. })
        ));
    }

    #[test]
    fn chernoff_values() {
        let v = chernoff(0.5, 0.1, 100).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-12);
        assert_eq!(chernoff(0.3, 0.2, 0).unwrap(), 1.0);
        assert!(chernoff(1.5, 0.1, 10).is_err());
        assert!(chernoff(0.5, 0.0, 10).is_err());
    }

    #[test]
    fn amplification_report_bounds_hold() {
        let report = threshold_amplify(0.9, 0.1, 10).unwrap();
        // 1 - e^{-10 * 0.64 / 2} = 1 - e^{-3.2}
        assert!((report.completeness_bound - (1.0 - (-3.2f64).exp())).abs() < 1e-12);
        assert!(report.exact_completeness >= report.completeness_bound - 1e-12);
        assert!(report.exact_soundness <= report.soundness_bound + 1e-12);
    }

    #[test]
    fn amplification_single_copy_is_per_copy() {
        let report = threshold_amplify(0.8, 0.2, 1).unwrap();
        assert!((report.exact_completeness - 0.8).abs() < 1e-12);
        assert!((report.exact_soundness - 0.2).abs() < 1e-12);
    }

    #[test]
    fn gap_nonpositive_rejected() {
        assert!(matches!(
            threshold_amplify(0.4, 0.4, 5),
            Err(FlattenError::GapNonpositive { .. })
        ));
    }

    #[test]
    fn product_repeat_matches_binomial_on_product_witness() {
        // Per-copy acceptance of the lazy toy on |0> is 1/2; the threshold
        // repetition must hit the exact binomial tail.
        let qip = toys::matching_bit_qip(false);
        for k in 1..=3usize {
            for m in 0..=k {
                let repeated = product_repeat(&qip, k, m).unwrap();
                let aux = RealStateVector::zero_state(k).unwrap();
                let p = interactive_accept_prob(&repeated, &aux).unwrap();
                let expected = binomial_tail_geq(k as u64, 0.5, m as u64);
                assert!(
                    (p - expected).abs() < 1e-10,
                    "k={k} m={m}: {p} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn product_repeat_flattening_equivalence() {
        let qip = toys::matching_bit_qip(true);
        let repeated = product_repeat(&qip, 2, 2).unwrap();
        let aux = RealStateVector::zero_state(2).unwrap();
        let interactive = interactive_accept_prob(&repeated, &aux).unwrap();
        let flat = flatten(&repeated).unwrap().acceptance(&aux).unwrap();
        assert!((interactive - flat).abs() < 1e-10);
        assert!((interactive - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_repeat_rejects_large_k() {
        let qip = toys::matching_bit_qip(true);
        assert!(matches!(
            product_repeat(&qip, 5, 3),
            Err(FlattenError::TooManyCopies { .. })
        ));
    }
}
