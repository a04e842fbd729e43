//! Classical commitments to quantum states: reference scheme and binding
//! experiment harnesses.
//!
//! The scheme implemented here is *transparent*: the committer-side handle
//! literally stores the committed state, opening measures it, and every
//! opening entry carries a keyed-hash tag over
//! `(pk, y, index, basis, outcome)`. The public key has a fixed size
//! independent of the committed state, so the protocol layer can later swap
//! in a cryptographic instantiation behind the same five algorithms. Tags
//! give bit-exact reproducibility and integrity against strategies that
//! tamper with reported outcomes; no cryptographic strength is claimed
//! against strategies that recompute tags.
//!
//! Adversaries are [`strategy::CommitterStrategy`] trait objects registered
//! by name; experiments drive them through exactly the two handles the
//! binding definition grants (`Commit` and `Open`).

pub mod strategy;

pub use strategy::{make_strategy, strategy_names, CommitterStrategy};

use crate::seeds::child_seed;
use crate::sim::{measure_product, BasisChoice, BasisString, ProductState, SimError};
use crate::stats::{total_variation, wilson_interval};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommitError {
    #[error("security parameter {lambda} below the minimum of 16")]
    LambdaTooSmall { lambda: usize },
    #[error("index {index} outside the committed register of {total} qubits")]
    InvalidIndex { index: usize, total: usize },
    #[error("strategy '{name}' exposes no state to the reference extractor")]
    ExtractorUnavailable { name: String },
    #[error("no committed state in this session")]
    NoSession,
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T> = std::result::Result<T, CommitError>;

const TAG_LEN: usize = 32;
const NONCE_LEN: usize = 16;

/// Key pair of the reference scheme. `pk` is 32 bytes for every committed
/// size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub pk: Vec<u8>,
    pub sk: SecretKey,
}

/// Secret key; carries the public key so verification needs no extra input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    bytes: Vec<u8>,
    pk: Vec<u8>,
}

impl SecretKey {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// Deterministic key generation.
pub fn gen(lambda: usize, seed: u64) -> Result<KeyPair> {
    if lambda < 16 {
        return Err(CommitError::LambdaTooSmall { lambda });
    }
    let mut h = Sha256::new();
    h.update(b"commit-pk");
    h.update((lambda as u64).to_be_bytes());
    h.update(seed.to_be_bytes());
    let pk = h.finalize().to_vec();

    let mut h = Sha256::new();
    h.update(b"commit-sk");
    h.update((lambda as u64).to_be_bytes());
    h.update(seed.to_be_bytes());
    let bytes = h.finalize().to_vec();

    Ok(KeyPair {
        pk: pk.clone(),
        sk: SecretKey { bytes, pk },
    })
}

/// Committer-held residual: the stored state plus session binding data.
#[derive(Debug, Clone)]
pub struct ResidualState {
    pk: Vec<u8>,
    y: Vec<u8>,
    state: ProductState,
}

impl ResidualState {
    pub fn state(&self) -> &ProductState {
        &self.state
    }

    pub fn total_qubits(&self) -> usize {
        self.state.total_qubits()
    }
}

/// A commitment: classical string `y` plus the committer-held residual.
#[derive(Debug, Clone)]
pub struct Commitment {
    pub y: Vec<u8>,
    pub residual: ResidualState,
}

/// One opened index: outcome plus its authentication tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningEntry {
    pub index: usize,
    pub basis: BasisChoice,
    pub outcome: bool,
    pub tag: Vec<u8>,
}

/// Opening message: entries for the requested indices, in request order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Opening {
    pub entries: Vec<OpeningEntry>,
}

impl Opening {
    pub fn outcomes(&self) -> Vec<bool> {
        self.entries.iter().map(|e| e.outcome).collect()
    }

    /// Compact hex serialization for transcripts.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{:08x}{}{}",
                e.index,
                if e.basis.as_bit() { "1" } else { "0" },
                if e.outcome { "1" } else { "0" }
            ));
            for b in &e.tag {
                out.push_str(&format!("{b:02x}"));
            }
        }
        out
    }
}

fn entry_tag(pk: &[u8], y: &[u8], index: usize, basis: BasisChoice, outcome: bool) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(b"open-tag");
    h.update(pk);
    h.update(y);
    h.update((index as u64).to_be_bytes());
    h.update([basis.as_bit() as u8, outcome as u8]);
    h.finalize()[..TAG_LEN].to_vec()
}

/// Honest commitment: `y` is a nonce plus a tag over `(pk, l, nonce)`;
/// nothing about the state enters `y`. The residual holds the state.
pub fn commit_ref(pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Commitment> {
    let total = sigma.total_qubits();
    let mut h = Sha256::new();
    h.update(b"commit-nonce");
    h.update(seed.to_be_bytes());
    let nonce = h.finalize()[..NONCE_LEN].to_vec();

    let mut h = Sha256::new();
    h.update(b"commit-y");
    h.update(pk);
    h.update((total as u64).to_be_bytes());
    h.update(&nonce);
    let mut y = nonce;
    y.extend_from_slice(&h.finalize()[..TAG_LEN]);

    Ok(Commitment {
        y: y.clone(),
        residual: ResidualState {
            pk: pk.to_vec(),
            y,
            state: sigma.clone(),
        },
    })
}

/// Honest opening: measure the held state at `indices` in `bases` (Born
/// rule, seeded), tag each outcome, and return the post-measurement
/// residual.
pub fn open_ref(
    residual: &ResidualState,
    indices: &[usize],
    bases: &[BasisChoice],
    seed: u64,
) -> Result<(Opening, ResidualState)> {
    let total = residual.state.total_qubits();
    let mut basis_string = BasisString::unmeasured(total);
    for (&index, &basis) in indices.iter().zip(bases) {
        if index == 0 || index > total {
            return Err(CommitError::InvalidIndex { index, total });
        }
        basis_string.set(index, Some(basis));
    }
    let (record, post) = measure_product(&basis_string, &residual.state, seed)?;
    let mut entries = Vec::with_capacity(indices.len());
    for (&index, &basis) in indices.iter().zip(bases) {
        let outcome = record.get(index).expect("measured position");
        entries.push(OpeningEntry {
            index,
            basis,
            outcome,
            tag: entry_tag(&residual.pk, &residual.y, index, basis, outcome),
        });
    }
    let next = ResidualState {
        pk: residual.pk.clone(),
        y: residual.y.clone(),
        state: post,
    };
    Ok((Opening { entries }, next))
}

/// Verification: conjunction over the requested indices. Returns false on
/// any truncation, misalignment, or tag mismatch.
pub fn verify(
    sk: &SecretKey,
    y: &[u8],
    indices: &[usize],
    bases: &[BasisChoice],
    opening: &Opening,
) -> bool {
    if opening.entries.len() != indices.len() || indices.len() != bases.len() {
        return false;
    }
    for ((entry, &index), &basis) in opening.entries.iter().zip(indices).zip(bases) {
        if entry.index != index || entry.basis != basis {
            return false;
        }
        if entry.tag != entry_tag(&sk.pk, y, index, basis, entry.outcome) {
            return false;
        }
    }
    true
}

/// Decoded outcome bits, in request order.
pub fn out(
    _sk: &SecretKey,
    _y: &[u8],
    indices: &[usize],
    _bases: &[BasisChoice],
    opening: &Opening,
) -> Vec<bool> {
    debug_assert_eq!(opening.entries.len(), indices.len());
    opening.outcomes()
}

/// Outcome of a Real or Ideal binding experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExperimentOutcome {
    /// Verification failed (Real only).
    Bot,
    Record {
        pk: Vec<u8>,
        y: Vec<u8>,
        basis: Vec<BasisChoice>,
        outcomes: Vec<bool>,
    },
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Structured-text log of one committer session: pk, y, each open
/// request/response, and the verify/out results. Payload encodings match
/// the protocol transcripts.
#[derive(Debug, Clone, Default)]
pub struct SessionLog {
    lines: Vec<String>,
}

impl SessionLog {
    pub fn push_keys(&mut self, pk: &[u8]) {
        self.lines.push(format!("pk {}", hex(pk)));
    }

    pub fn push_commit(&mut self, y: &[u8]) {
        self.lines.push(format!("y {}", hex(y)));
    }

    pub fn push_open_request(&mut self, indices: &[usize], bases: &[BasisChoice]) {
        let req: Vec<String> = indices
            .iter()
            .zip(bases)
            .map(|(i, b)| format!("{i}:{}", if b.as_bit() { "X" } else { "Z" }))
            .collect();
        self.lines.push(format!("open-request {}", req.join(" ")));
    }

    pub fn push_opening(&mut self, opening: &Opening) {
        self.lines.push(format!("opening {}", opening.to_hex()));
    }

    pub fn push_verify(&mut self, ok: bool) {
        self.lines.push(format!("ver {}", ok as u8));
    }

    pub fn push_out(&mut self, bits: &[bool]) {
        let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        self.lines.push(format!("out {s}"));
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

/// The Real experiment with a full session log attached.
pub fn logged_real_experiment(
    strategy: &mut dyn CommitterStrategy,
    lambda: usize,
    basis: &BasisString,
    sigma: &ProductState,
    seed: u64,
) -> Result<(ExperimentOutcome, SessionLog)> {
    let mut log = SessionLog::default();
    let keys = gen(lambda, child_seed(seed, "gen", 0))?;
    log.push_keys(&keys.pk);
    let y = strategy.commit(&keys.pk, sigma, child_seed(seed, "commit", 0))?;
    log.push_commit(&y);
    let total = sigma.total_qubits();
    let indices: Vec<usize> = (1..=total).collect();
    let bases = full_bases(basis);
    log.push_open_request(&indices, &bases);
    let opening = strategy.open(&indices, &bases, child_seed(seed, "open", 0))?;
    log.push_opening(&opening);
    let ok = verify(&keys.sk, &y, &indices, &bases, &opening);
    log.push_verify(ok);
    if !ok {
        return Ok((ExperimentOutcome::Bot, log));
    }
    let outcomes = out(&keys.sk, &y, &indices, &bases, &opening);
    log.push_out(&outcomes);
    Ok((
        ExperimentOutcome::Record {
            pk: keys.pk,
            y,
            basis: bases,
            outcomes,
        },
        log,
    ))
}

fn full_bases(basis: &BasisString) -> Vec<BasisChoice> {
    basis
        .entries()
        .iter()
        .map(|e| e.expect("basis must be fully specified"))
        .collect()
}

/// The Real experiment: keygen, adversarial commit, adversarial open of all
/// indices in `basis`, verify, decode. Deterministic given `seed`.
pub fn real_experiment(
    strategy: &mut dyn CommitterStrategy,
    lambda: usize,
    basis: &BasisString,
    sigma: &ProductState,
    seed: u64,
) -> Result<ExperimentOutcome> {
    logged_real_experiment(strategy, lambda, basis, sigma, seed).map(|(outcome, _)| outcome)
}

/// The Ideal experiment with the reference extractor: keygen, adversarial
/// commit, extract the held state from the handle, measure it in `basis`.
/// Never outputs bot.
pub fn ideal_experiment(
    strategy: &mut dyn CommitterStrategy,
    lambda: usize,
    basis: &BasisString,
    sigma: &ProductState,
    seed: u64,
) -> Result<ExperimentOutcome> {
    let keys = gen(lambda, child_seed(seed, "gen", 0))?;
    let y = strategy.commit(&keys.pk, sigma, child_seed(seed, "commit", 0))?;
    let tau = strategy
        .extract_state()
        .ok_or_else(|| CommitError::ExtractorUnavailable {
            name: strategy.name().to_string(),
        })?;
    let (record, _) = measure_product(basis, &tau, child_seed(seed, "ideal-measure", 0))?;
    let outcomes: Vec<bool> = record
        .entries()
        .iter()
        .map(|e| e.expect("fully measured"))
        .collect();
    Ok(ExperimentOutcome::Record {
        pk: keys.pk,
        y,
        basis: full_bases(basis),
        outcomes,
    })
}

/// Per-basis rejection rates behind the binding distance `delta`:
/// `delta = max over b' in {b, all-Z, all-X} of Pr[Ver = 0]`.
#[derive(Debug, Clone)]
pub struct DeltaReport {
    /// (label, rejections, samples, Wilson 95% interval) per probed basis.
    pub per_basis: Vec<(String, u64, u64, (f64, f64))>,
    pub delta_hat: f64,
}

/// Estimate `delta` for a strategy by Monte Carlo over fresh sessions.
///
/// The built-in strategies behave identically across sessions, so taking
/// the max over the three per-basis marginal rates equals the
/// expectation-then-max form of the definition.
pub fn delta_estimate<F>(
    mut strategy_factory: F,
    lambda: usize,
    basis: &BasisString,
    sigma: &ProductState,
    samples_per_basis: u64,
    seed: u64,
) -> Result<DeltaReport>
where
    F: FnMut() -> Box<dyn CommitterStrategy>,
{
    let total = sigma.total_qubits();
    let probes: Vec<(String, Vec<BasisChoice>)> = vec![
        ("b".to_string(), full_bases(basis)),
        ("all-Z".to_string(), vec![BasisChoice::Z; total]),
        ("all-X".to_string(), vec![BasisChoice::X; total]),
    ];
    let indices: Vec<usize> = (1..=total).collect();
    let mut per_basis = Vec::new();
    let mut delta_hat = 0.0f64;
    for (label, bases) in probes {
        let mut rejections = 0u64;
        for i in 0..samples_per_basis {
            let trial_seed = child_seed(seed, &format!("delta-{label}"), i);
            let keys = gen(lambda, child_seed(trial_seed, "gen", 0))?;
            let mut strategy = strategy_factory();
            let y = strategy.commit(&keys.pk, sigma, child_seed(trial_seed, "commit", 0))?;
            let opening = strategy.open(&indices, &bases, child_seed(trial_seed, "open", 0))?;
            if !verify(&keys.sk, &y, &indices, &bases, &opening) {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / samples_per_basis as f64;
        delta_hat = delta_hat.max(rate);
        per_basis.push((
            label,
            rejections,
            samples_per_basis,
            wilson_interval(rejections, samples_per_basis, 1.96),
        ));
    }
    Ok(DeltaReport {
        per_basis,
        delta_hat,
    })
}

/// Empirical total variation distance between Real and Ideal outcome
/// distributions over paired seeded sessions.
pub struct TvReport {
    pub tv: f64,
    pub pairs: u64,
}

pub fn tv_experiment<F>(
    mut strategy_factory: F,
    lambda: usize,
    basis: &BasisString,
    sigma: &ProductState,
    pairs: u64,
    seed: u64,
) -> Result<TvReport>
where
    F: FnMut() -> Box<dyn CommitterStrategy>,
{
    // Key outcome histograms by bot/outcome-bits. Real and Ideal share
    // keygen/commit seeds pairwise; measurement seeds differ by label.
    let mut real_hist: BTreeMap<Option<u64>, u64> = BTreeMap::new();
    let mut ideal_hist: BTreeMap<Option<u64>, u64> = BTreeMap::new();
    let pack = |outcome: &ExperimentOutcome| -> Option<u64> {
        match outcome {
            ExperimentOutcome::Bot => None,
            ExperimentOutcome::Record { outcomes, .. } => {
                let mut k = 0u64;
                for &b in outcomes {
                    k = (k << 1) | b as u64;
                }
                Some(k)
            }
        }
    };
    for i in 0..pairs {
        let base = child_seed(seed, "tv-pair", i);
        let mut s1 = strategy_factory();
        let real = real_experiment(&mut *s1, lambda, basis, sigma, child_seed(base, "real", 0))?;
        let mut s2 = strategy_factory();
        // Same gen/commit child labels, so (pk, y) coincide; only the
        // measurement path differs.
        let ideal = ideal_experiment(&mut *s2, lambda, basis, sigma, child_seed(base, "real", 0))?;
        *real_hist.entry(pack(&real)).or_insert(0) += 1;
        *ideal_hist.entry(pack(&ideal)).or_insert(0) += 1;
    }
    let keys: Vec<Option<u64>> = real_hist
        .keys()
        .chain(ideal_hist.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = pairs as f64;
    let p: Vec<f64> = keys
        .iter()
        .map(|k| *real_hist.get(k).unwrap_or(&0) as f64 / n)
        .collect();
    let q: Vec<f64> = keys
        .iter()
        .map(|k| *ideal_hist.get(k).unwrap_or(&0) as f64 / n)
        .collect();
    Ok(TvReport {
        tv: total_variation(&p, &q),
        pairs,
    })
}

/// Exact Real-experiment outcome distribution for the *honest* strategy:
/// it coincides with measuring `sigma` in `basis` directly.
pub fn honest_real_distribution(
    basis: &BasisString,
    sigma: &ProductState,
) -> Result<BTreeMap<u64, f64>> {
    // The honest opening measures the stored state; tags always verify. So
    // the distribution is the product of per-block outcome distributions.
    let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
    dist.insert(0, 1.0);
    let mut offset = 0;
    for block in sigma.blocks().iter() {
        let q = block.num_qubits();
        let local = BasisString::new(basis.entries()[offset..offset + q].to_vec());
        let block_dist = crate::sim::outcome_distribution(&local, block)?;
        let mut next = BTreeMap::new();
        for (&prefix, &pp) in &dist {
            for (&key, &kp) in &block_dist {
                *next.entry((prefix << q) | key).or_insert(0.0) += pp * kp;
            }
        }
        dist = next;
        offset += q;
    }
    Ok(dist)
}
