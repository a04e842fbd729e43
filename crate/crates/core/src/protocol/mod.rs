//! The classical argument protocol: session state machine, sequential
//! repetition, and cheating-prover experiments.
//!
//! One session: the verifier sends a commitment key; the prover commits to
//! `k` copies of its per-copy state and sends the commitment string; the
//! verifier flips a coin. On the *test* branch it asks for every qubit
//! opened in one uniform basis and checks the openings. On the *measurement*
//! branch it sends two short seeds; the prover opens every qubit in the
//! bases derived from the first seed, and the verifier checks the openings,
//! expands the second seed into per-copy verdict tapes, and accepts when at
//! least a threshold fraction of per-copy energy verdicts accept.
//!
//! Everything is message-logged: re-running with the same seeds reproduces a
//! byte-identical transcript.

pub mod prg;
pub mod prover;

pub use prg::{prg_expand, prg_expand_bytes, to_hex};
pub use prover::{make_prover, prover_names, wrong_state_for, ProverStrategy, StandardProver};

use crate::clock::ClockBundle;
use crate::commit::{gen, out, verify, CommitError};
use crate::mf::{threshold_vmf, vmf, wrapper_law, MfError, MfSampler, RandomnessTape};
use crate::seeds::{child_seed, rng_from};
use crate::sim::{
    expectation, BasisChoice, BasisString, MeasurementRecord, RealStateVector, SimError,
};
use crate::stats::{binomial_tail_geq, wilson_interval};
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("prover failed: {0}")]
    ProverFailed(String),
    #[error("unknown prover '{0}'")]
    UnknownProver(String),
    #[error("bad session parameters: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Commit(#[from] CommitError),
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Clock(#[from] crate::clock::ClockError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

/// Desk-scale caps: copies and sequential repetitions stay small by default.
pub const DEFAULT_COPY_CAP: usize = 64;
pub const DEFAULT_REPS_CAP: usize = 16;

/// Minimum security parameter of the commitment layer; the protocol-level
/// lambda may be smaller at desk scale.
const COMMIT_LAMBDA_MIN: usize = 16;

/// Fixed parameters of one argument session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    lambda: usize,
    copies: usize,
    threshold: f64,
    declared_c: f64,
    declared_s: f64,
    per_copy_qubits: usize,
    tape_len: usize,
    sampler: MfSampler,
    /// Experiment knob: draw bases and verdict tapes fresh instead of
    /// expanding them from seeds. The bases are then sent explicitly.
    pub use_true_randomness: bool,
}

impl SessionConfig {
    /// Build a session over a compiled bundle with declared per-copy
    /// completeness/soundness targets `(c, s)`.
    ///
    /// The copy count follows `k = lambda^2 * p^2` with `p = ceil(1/(c-s))`,
    /// capped at `copy_cap`.
    pub fn new(
        bundle: &ClockBundle,
        lambda: usize,
        declared_c: f64,
        declared_s: f64,
        copy_cap: usize,
    ) -> Result<Self> {
        if lambda == 0 {
            return Err(ProtocolError::BadConfig("lambda must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&declared_c) || !(0.0..=1.0).contains(&declared_s) {
            return Err(ProtocolError::BadConfig(format!(
                "(c, s) = ({declared_c}, {declared_s}) out of range"
            )));
        }
        if declared_c <= declared_s {
            return Err(ProtocolError::BadConfig(format!(
                "completeness {declared_c} must exceed soundness {declared_s}"
            )));
        }
        let p = (1.0 / (declared_c - declared_s)).ceil() as usize;
        let copies = (lambda * lambda)
            .saturating_mul(p * p)
            .clamp(1, copy_cap.max(1));
        let sampler = MfSampler::for_clock(bundle.h_total())?;
        Ok(SessionConfig {
            lambda,
            copies,
            threshold: (declared_c + declared_s) / 2.0,
            declared_c,
            declared_s,
            per_copy_qubits: bundle.total_qubits(),
            tape_len: sampler.tape_len(),
            sampler,
            use_true_randomness: false,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn declared_c(&self) -> f64 {
        self.declared_c
    }

    pub fn declared_s(&self) -> f64 {
        self.declared_s
    }

    pub fn per_copy_qubits(&self) -> usize {
        self.per_copy_qubits
    }

    /// Total committed qubits `l = k * per-copy`.
    pub fn total_qubits(&self) -> usize {
        self.copies * self.per_copy_qubits
    }

    pub fn sampler(&self) -> &MfSampler {
        &self.sampler
    }

    fn commit_lambda(&self) -> usize {
        self.lambda.max(COMMIT_LAMBDA_MIN)
    }

    /// Seed length in bits for s1 and s2.
    pub fn seed_bits(&self) -> usize {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sender {
    Prover,
    Verifier,
}

impl fmt::Display for Sender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sender::Prover => write!(f, "P"),
            Sender::Verifier => write!(f, "V"),
        }
    }
}

/// One logged message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: Sender,
    pub round_tag: String,
    pub payload_hex: String,
}

/// Ordered record of one session plus the final verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub accepted: bool,
}

impl Transcript {
    fn push(&mut self, sender: Sender, tag: &str, payload_hex: String) {
        self.messages.push(Message {
            sender,
            round_tag: tag.to_string(),
            payload_hex,
        });
    }

    /// One message per line: `{sender} {round_tag} {payload_hex}`, then the
    /// final verdict.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&format!("{} {} {}\n", m.sender, m.round_tag, m.payload_hex));
        }
        out.push_str(&format!("accept {}\n", self.accepted as u8));
        out
    }
}

/// Result of one session.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub accepted: bool,
    /// True when the measurement branch ran (challenge bit 1).
    pub measurement_branch: bool,
    /// Test-branch basis, when the test branch ran.
    pub test_basis: Option<BasisChoice>,
}

fn draw_seed_bytes(rng: &mut impl Rng, bits: usize) -> Vec<u8> {
    let nbytes = bits.div_ceil(8);
    let mut bytes = vec![0u8; nbytes];
    rng.fill(&mut bytes[..]);
    let spare = nbytes * 8 - bits;
    if spare > 0 {
        let last = bytes.last_mut().unwrap();
        *last &= 0xFFu8 << spare;
    }
    bytes
}

fn bit_payload(b: bool) -> String {
    if b {
        "01".into()
    } else {
        "00".into()
    }
}

/// Run one full session between the verifier and the given prover.
///
/// Deterministic in `(prover_seed, verifier_seed)`; replaying yields a
/// byte-identical transcript.
pub fn run_session(
    config: &SessionConfig,
    prover: &mut dyn ProverStrategy,
    prover_seed: u64,
    verifier_seed: u64,
) -> Result<SessionOutcome> {
    let mut rng = rng_from(verifier_seed);
    let mut transcript = Transcript::default();

    let keys = gen(config.commit_lambda(), rng.random())?;
    transcript.push(Sender::Verifier, "pk", to_hex(&keys.pk));

    let y = prover.on_public_key(&keys.pk, child_seed(prover_seed, "commit", 0))?;
    transcript.push(Sender::Prover, "y", to_hex(&y));

    let measurement_branch = rng.random::<bool>();
    transcript.push(
        Sender::Verifier,
        "challenge",
        bit_payload(measurement_branch),
    );

    let total = config.total_qubits();
    let indices: Vec<usize> = (1..=total).collect();

    if !measurement_branch {
        // Test round: open everything in one uniform basis.
        let h_bit = rng.random::<bool>();
        let h = BasisChoice::from_bit(h_bit);
        transcript.push(Sender::Verifier, "test-basis", bit_payload(h_bit));
        let opening = prover.on_test_challenge(h, child_seed(prover_seed, "open", 0))?;
        transcript.push(Sender::Prover, "opening", opening.to_hex());
        let bases = vec![h; total];
        let accepted = verify(&keys.sk, &y, &indices, &bases, &opening);
        transcript.push(Sender::Verifier, "verdict", bit_payload(accepted));
        transcript.accepted = accepted;
        return Ok(SessionOutcome {
            transcript,
            accepted,
            measurement_branch,
            test_basis: Some(h),
        });
    }

    // Measurement round.
    let (bases, opening, r_bits) = if config.use_true_randomness {
        let base_bits: Vec<bool> = (0..total).map(|_| rng.random()).collect();
        let bases: Vec<BasisChoice> = base_bits
            .iter()
            .copied()
            .map(BasisChoice::from_bit)
            .collect();
        let payload: String = base_bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        transcript.push(Sender::Verifier, "bases", payload);
        let opening = prover.on_explicit_bases(&bases, child_seed(prover_seed, "open", 0))?;
        transcript.push(Sender::Prover, "opening", opening.to_hex());
        let r_bits: Vec<bool> = (0..config.copies * config.tape_len)
            .map(|_| rng.random())
            .collect();
        (bases, opening, r_bits)
    } else {
        let s1 = draw_seed_bytes(&mut rng, config.seed_bits());
        let s2 = draw_seed_bytes(&mut rng, config.seed_bits());
        let mut payload = to_hex(&s1);
        payload.push_str(&to_hex(&s2));
        transcript.push(Sender::Verifier, "seeds", payload);
        let opening = prover.on_measure_challenge(&s1, &s2, child_seed(prover_seed, "open", 0))?;
        transcript.push(Sender::Prover, "opening", opening.to_hex());
        let bases: Vec<BasisChoice> = prg_expand(&s1, total)
            .into_iter()
            .map(BasisChoice::from_bit)
            .collect();
        let r_bits = prg_expand(&s2, config.copies * config.tape_len);
        (bases, opening, r_bits)
    };

    let opening_valid = verify(&keys.sk, &y, &indices, &bases, &opening);
    let accepted = if opening_valid {
        let outcomes = out(&keys.sk, &y, &indices, &bases, &opening);
        let verdicts = per_copy_verdicts(config, &bases, &outcomes, &r_bits)?;
        threshold_vmf(config.threshold, &verdicts)
    } else {
        false
    };
    transcript.push(Sender::Verifier, "verdict", bit_payload(accepted));
    transcript.accepted = accepted;
    Ok(SessionOutcome {
        transcript,
        accepted,
        measurement_branch,
        test_basis: None,
    })
}

/// Split the opened outcomes into per-copy wrapper verdicts.
fn per_copy_verdicts(
    config: &SessionConfig,
    bases: &[BasisChoice],
    outcomes: &[bool],
    r_bits: &[bool],
) -> Result<Vec<bool>> {
    let q = config.per_copy_qubits;
    if bases.len() != config.total_qubits() || outcomes.len() != bases.len() {
        return Err(ProtocolError::ProtocolViolation(format!(
            "opening covers {} qubits, session needs {}",
            outcomes.len(),
            config.total_qubits()
        )));
    }
    let mut verdicts = Vec::with_capacity(config.copies);
    for i in 0..config.copies {
        let tape = RandomnessTape::from_bits(
            r_bits[i * config.tape_len..(i + 1) * config.tape_len].to_vec(),
        );
        let copy_bases: Vec<bool> = bases[i * q..(i + 1) * q]
            .iter()
            .map(|b| b.as_bit())
            .collect();
        let basis = BasisString::from_bits(&copy_bases);
        let record = MeasurementRecord::new(
            outcomes[i * q..(i + 1) * q]
                .iter()
                .map(|&o| Some(o))
                .collect(),
        );
        verdicts.push(vmf(&config.sampler, &tape, &basis, &record)?);
    }
    Ok(verdicts)
}

/// Sequential repetition: fresh keys per session, all sessions execute even
/// after a rejection, final verdict is the conjunction.
pub fn run_repeated(
    config: &SessionConfig,
    prover: &mut dyn ProverStrategy,
    n_reps: usize,
    prover_seed: u64,
    verifier_seed: u64,
) -> Result<(Vec<SessionOutcome>, bool)> {
    if n_reps == 0 {
        return Err(ProtocolError::BadConfig("n_reps must be >= 1".into()));
    }
    let mut outcomes = Vec::with_capacity(n_reps);
    let mut all = true;
    for rep in 0..n_reps {
        let outcome = run_session(
            config,
            prover,
            child_seed(prover_seed, "rep", rep as u64),
            child_seed(verifier_seed, "rep", rep as u64),
        )?;
        all &= outcome.accepted;
        outcomes.push(outcome);
    }
    Ok((outcomes, all))
}

/// Closed-form session analytics for a prover that commits `per_copy_state`
/// in every block and opens honestly.
#[derive(Debug, Clone)]
pub struct SessionAnalytics {
    /// Energy of the committed per-copy state under the canonical
    /// Hamiltonian.
    pub per_copy_energy: f64,
    /// Wrapper-law acceptance of one copy.
    pub per_copy_accept: f64,
    /// `P[Bin(k, per_copy_accept) >= ceil(threshold * k)]`.
    pub measurement_accept: f64,
    /// Overall: (test branch + measurement branch) / 2.
    pub session_accept: f64,
}

pub fn analytic_acceptance(
    config: &SessionConfig,
    per_copy_state: &RealStateVector,
) -> Result<SessionAnalytics> {
    let h = config.sampler.hamiltonian();
    let energy = expectation(per_copy_state, h)?;
    let per_copy = wrapper_law(energy, h.one_norm(), config.sampler.locality());
    let needed = (config.threshold * config.copies as f64).ceil() as u64;
    let measurement = binomial_tail_geq(config.copies as u64, per_copy, needed);
    Ok(SessionAnalytics {
        per_copy_energy: energy,
        per_copy_accept: per_copy,
        measurement_accept: measurement,
        session_accept: 0.5 + 0.5 * measurement,
    })
}

/// Forced measurement-branch session with a fixed `s1`, used by the good-set
/// experiment. Returns the verdict.
fn run_measurement_branch_forced(
    config: &SessionConfig,
    prover: &mut dyn ProverStrategy,
    s1: &[u8],
    prover_seed: u64,
    verifier_seed: u64,
) -> Result<bool> {
    let mut rng = rng_from(verifier_seed);
    let keys = gen(config.commit_lambda(), rng.random())?;
    let y = prover.on_public_key(&keys.pk, child_seed(prover_seed, "commit", 0))?;
    let s2 = draw_seed_bytes(&mut rng, config.seed_bits());
    let opening = prover.on_measure_challenge(s1, &s2, child_seed(prover_seed, "open", 0))?;
    let total = config.total_qubits();
    let indices: Vec<usize> = (1..=total).collect();
    let bases: Vec<BasisChoice> = prg_expand(s1, total)
        .into_iter()
        .map(BasisChoice::from_bit)
        .collect();
    if !verify(&keys.sk, &y, &indices, &bases, &opening) {
        return Ok(false);
    }
    let outcomes = out(&keys.sk, &y, &indices, &bases, &opening);
    let r_bits = prg_expand(&s2, config.copies * config.tape_len);
    let verdicts = per_copy_verdicts(config, &bases, &outcomes, &r_bits)?;
    Ok(threshold_vmf(config.threshold, &verdicts))
}

/// Good-set experiment report.
#[derive(Debug, Clone)]
pub struct GoodSetReport {
    /// Overall failure rate of the prover across full sessions.
    pub delta_hat: f64,
    /// `min(delta_hat, 1/lambda^2)`: the soundness analysis assumes the
    /// failure rate is below `1/lambda^2`, so the good-set threshold is
    /// evaluated with the capped value when the prover is far outside that
    /// regime.
    pub delta_effective: f64,
    /// Conditional acceptance threshold `1 - lambda * delta_effective`.
    pub threshold: f64,
    /// Per-s1 conditional acceptance: (accepts, trials, Wilson 95%).
    pub per_s1: Vec<(u64, u64, (f64, f64))>,
    pub good_fraction: f64,
    /// The Markov-argument prediction `1 - 2/lambda`.
    pub markov_bound: f64,
}

/// Estimate the good set of first seeds: those on which the prover's
/// conditional acceptance over the second seed stays above
/// `1 - lambda * delta`.
pub fn good_set_experiment<F>(
    config: &SessionConfig,
    mut prover_factory: F,
    n_s1: usize,
    n_s2: usize,
    n_full: usize,
    seed: u64,
) -> Result<GoodSetReport>
where
    F: FnMut() -> Box<dyn ProverStrategy>,
{
    // Overall failure rate from full sessions.
    let mut accepts = 0u64;
    for i in 0..n_full {
        let mut prover = prover_factory();
        let outcome = run_session(
            config,
            &mut *prover,
            child_seed(seed, "full-p", i as u64),
            child_seed(seed, "full-v", i as u64),
        )?;
        accepts += outcome.accepted as u64;
    }
    let delta_hat = 1.0 - accepts as f64 / n_full.max(1) as f64;
    let delta_effective = delta_hat.min(1.0 / (config.lambda * config.lambda) as f64);
    let threshold = 1.0 - config.lambda as f64 * delta_effective;

    let mut per_s1 = Vec::with_capacity(n_s1);
    let mut good = 0usize;
    for i in 0..n_s1 {
        let mut s1_rng = rng_from(child_seed(seed, "s1", i as u64));
        let s1 = draw_seed_bytes(&mut s1_rng, config.seed_bits());
        let mut s1_accepts = 0u64;
        for j in 0..n_s2 {
            let mut prover = prover_factory();
            let trial = child_seed(seed, &format!("s1-{i}-trial"), j as u64);
            if run_measurement_branch_forced(
                config,
                &mut *prover,
                &s1,
                child_seed(trial, "p", 0),
                child_seed(trial, "v", 0),
            )? {
                s1_accepts += 1;
            }
        }
        let rate = s1_accepts as f64 / n_s2.max(1) as f64;
        if rate >= threshold {
            good += 1;
        }
        per_s1.push((
            s1_accepts,
            n_s2 as u64,
            wilson_interval(s1_accepts, n_s2 as u64, 1.96),
        ));
    }
    Ok(GoodSetReport {
        delta_hat,
        delta_effective,
        threshold,
        per_s1,
        good_fraction: good as f64 / n_s1.max(1) as f64,
        markov_bound: 1.0 - 2.0 / config.lambda as f64,
    })
}
