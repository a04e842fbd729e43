//! Committer strategies behind a common trait, registered by name.
//!
//! A strategy is driven through exactly the two adversarial handles of the
//! binding experiments: `commit` and `open`. The reference extractor
//! additionally reads the handle's stored state when the strategy exposes
//! one (the scheme is transparent, so every built-in does).
//!
//! Strategies act on real-amplitude states only — the state representation
//! cannot express complex amplitudes. Mixed adversarial states are handled
//! in experiments as explicit (probability, pure state) mixtures.

use super::{commit_ref, open_ref, CommitError, Opening, ResidualState, Result};
use crate::sim::{BasisChoice, ProductState, RealStateVector};

pub trait CommitterStrategy {
    /// Registry name.
    fn name(&self) -> &str;

    /// `C*.Commit`: receive the public key and the state to commit to;
    /// return the commitment string. Starts a fresh session.
    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>>;

    /// `C*.Open`: produce an opening for the requested indices and bases.
    fn open(&mut self, indices: &[usize], bases: &[BasisChoice], seed: u64) -> Result<Opening>;

    /// The state held in the committer's handle, if the strategy exposes
    /// one; consumed by the reference extractor.
    fn extract_state(&self) -> Option<ProductState>;
}

/// Honest behavior: commits the given state, opens truthfully.
pub struct HonestCommitter {
    residual: Option<ResidualState>,
}

impl HonestCommitter {
    pub fn new() -> Self {
        HonestCommitter { residual: None }
    }
}

impl Default for HonestCommitter {
    fn default() -> Self {
        Self::new()
    }
}

impl CommitterStrategy for HonestCommitter {
    fn name(&self) -> &str {
        "honest"
    }

    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>> {
        let c = commit_ref(pk, sigma, seed)?;
        self.residual = Some(c.residual);
        Ok(c.y)
    }

    fn open(&mut self, indices: &[usize], bases: &[BasisChoice], seed: u64) -> Result<Opening> {
        let residual = self.residual.as_ref().ok_or(CommitError::NoSession)?;
        let (opening, next) = open_ref(residual, indices, bases, seed)?;
        self.residual = Some(next);
        Ok(opening)
    }

    fn extract_state(&self) -> Option<ProductState> {
        self.residual.as_ref().map(|r| r.state().clone())
    }
}

/// Runs the honest machinery but on a substitute state: either a fixed one,
/// or all-zeros matching the requested shape.
pub struct WrongStateCommitter {
    inner: HonestCommitter,
    substitute: Option<ProductState>,
}

impl WrongStateCommitter {
    /// Commit all-zero blocks of the same shape as the requested state.
    pub fn zeros() -> Self {
        WrongStateCommitter {
            inner: HonestCommitter::new(),
            substitute: None,
        }
    }

    /// Commit a fixed state regardless of the requested one.
    pub fn with_state(state: ProductState) -> Self {
        WrongStateCommitter {
            inner: HonestCommitter::new(),
            substitute: Some(state),
        }
    }
}

impl CommitterStrategy for WrongStateCommitter {
    fn name(&self) -> &str {
        "wrong-state"
    }

    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>> {
        let wrong = match &self.substitute {
            Some(state) => state.clone(),
            None => ProductState::new(
                sigma
                    .blocks()
                    .iter()
                    .map(|b| RealStateVector::zero_state(b.num_qubits()))
                    .collect::<std::result::Result<_, _>>()?,
            ),
        };
        self.inner.commit(pk, &wrong, seed)
    }

    fn open(&mut self, indices: &[usize], bases: &[BasisChoice], seed: u64) -> Result<Opening> {
        self.inner.open(indices, bases, seed)
    }

    fn extract_state(&self) -> Option<ProductState> {
        self.inner.extract_state()
    }
}

/// Commits honestly, then refuses to open: openings come back empty and
/// never verify.
pub struct RefuseOpenCommitter {
    inner: HonestCommitter,
}

impl RefuseOpenCommitter {
    pub fn new() -> Self {
        RefuseOpenCommitter {
            inner: HonestCommitter::new(),
        }
    }
}

impl Default for RefuseOpenCommitter {
    fn default() -> Self {
        Self::new()
    }
}

impl CommitterStrategy for RefuseOpenCommitter {
    fn name(&self) -> &str {
        "refuse-open"
    }

    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>> {
        self.inner.commit(pk, sigma, seed)
    }

    fn open(&mut self, _indices: &[usize], _bases: &[BasisChoice], _seed: u64) -> Result<Opening> {
        Ok(Opening::default())
    }

    fn extract_state(&self) -> Option<ProductState> {
        self.inner.extract_state()
    }
}

/// Opens honestly but lies about every X-basis outcome, without fixing the
/// tags. Verification catches each flipped entry.
pub struct FlipXCommitter {
    inner: HonestCommitter,
}

impl FlipXCommitter {
    pub fn new() -> Self {
        FlipXCommitter {
            inner: HonestCommitter::new(),
        }
    }
}

impl Default for FlipXCommitter {
    fn default() -> Self {
        Self::new()
    }
}

impl CommitterStrategy for FlipXCommitter {
    fn name(&self) -> &str {
        "flip-x"
    }

    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>> {
        self.inner.commit(pk, sigma, seed)
    }

    fn open(&mut self, indices: &[usize], bases: &[BasisChoice], seed: u64) -> Result<Opening> {
        let mut opening = self.inner.open(indices, bases, seed)?;
        for entry in &mut opening.entries {
            if entry.basis == BasisChoice::X {
                entry.outcome = !entry.outcome;
            }
        }
        Ok(opening)
    }

    fn extract_state(&self) -> Option<ProductState> {
        self.inner.extract_state()
    }
}

/// Refuses to open with a fixed probability per session, drawn from the
/// opening seed; otherwise behaves honestly.
pub struct PartialRefuseCommitter {
    inner: HonestCommitter,
    refuse_prob: f64,
}

impl PartialRefuseCommitter {
    pub fn new(refuse_prob: f64) -> Self {
        PartialRefuseCommitter {
            inner: HonestCommitter::new(),
            refuse_prob,
        }
    }
}

impl CommitterStrategy for PartialRefuseCommitter {
    fn name(&self) -> &str {
        "partial-refuse"
    }

    fn commit(&mut self, pk: &[u8], sigma: &ProductState, seed: u64) -> Result<Vec<u8>> {
        self.inner.commit(pk, sigma, seed)
    }

    fn open(&mut self, indices: &[usize], bases: &[BasisChoice], seed: u64) -> Result<Opening> {
        use rand::Rng;
        let mut rng = crate::seeds::rng_from(seed);
        if rng.random::<f64>() < self.refuse_prob {
            return Ok(Opening::default());
        }
        self.inner.open(indices, bases, seed)
    }

    fn extract_state(&self) -> Option<ProductState> {
        self.inner.extract_state()
    }
}

/// Names accepted by [`make_strategy`].
pub fn strategy_names() -> &'static [&'static str] {
    &[
        "honest",
        "wrong-state",
        "refuse-open",
        "partial-refuse",
        "flip-x",
    ]
}

/// Instantiate a registered strategy by name. The partially-refusing
/// strategy defaults to refusal probability 0.3.
pub fn make_strategy(name: &str) -> Result<Box<dyn CommitterStrategy>> {
    Ok(match name {
        "honest" => Box::new(HonestCommitter::new()),
        "wrong-state" => Box::new(WrongStateCommitter::zeros()),
        "refuse-open" => Box::new(RefuseOpenCommitter::new()),
        "partial-refuse" => Box::new(PartialRefuseCommitter::new(0.3)),
        "flip-x" => Box::new(FlipXCommitter::new()),
        other => return Err(CommitError::UnknownStrategy(other.to_string())),
    })
}
