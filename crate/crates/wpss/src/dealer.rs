//! Dealer-side operations: pick a platform presentation with exactly
//! `m = C(n, t-1)` relators, cut it into shares, and encode bit strings as
//! words whose identity status carries the bits. Every emitted word is
//! verified by the exact engine before release, within the same budget the
//! combiner will use.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::access::{
    build_access_structure, check_threshold_property, make_shares, AccessError, AccessStructure,
    SchemeId, SchemeParams, Share, ThresholdReport,
};
use crate::bits::Bits;
use crate::coxeter::braid_word;
use crate::engine::{Engine, EngineError, PartialDecider, PartialVerdict};
use crate::polycyclic::builtin_presentations;
use crate::presentation::{Family, GroupPresentation, PresentationError, Relator};
use crate::word::{commutator, conjugate, random_word, Generators, Letter, Word, WordError};

/// Hard cap on message length in bits (payload plus signature).
pub const MAX_MESSAGE_BITS: usize = 4096;
pub const DEFAULT_COVERAGE_FRACTION: f64 = 0.8;
pub const DEFAULT_CONJUGATOR_LENGTH: usize = 3;
/// Post-reduction length cap for emitted words. Sized so that the default
/// commutator product for every supported scheme fits with room to spare.
pub const DEFAULT_MAX_WORD_LENGTH: usize = 512;
const MAX_ATTEMPTS: u32 = 100;

// Independent ChaCha streams per purpose, so adding draws to one never
// shifts another.
const STREAM_PLATFORM: u64 = 0;
const STREAM_SCHEME_ID: u64 = 1;
pub(crate) const STREAM_EMBED: u64 = 2;
const STREAM_BITS_BASE: u64 = 16;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The RNG stream reserved for signature embedding.
pub fn embed_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, STREAM_EMBED)
}

/// Which platform family the dealer should draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatformChoice {
    Coxeter,
    PolycyclicBuiltin,
}

impl PlatformChoice {
    pub fn parse(text: &str) -> Option<PlatformChoice> {
        match text {
            "coxeter" => Some(PlatformChoice::Coxeter),
            "polycyclic-builtin" => Some(PlatformChoice::PolycyclicBuiltin),
            _ => None,
        }
    }
}

impl fmt::Display for PlatformChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlatformChoice::Coxeter => "coxeter",
            PlatformChoice::PolycyclicBuiltin => "polycyclic-builtin",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DealerError {
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(
        "no builtin polycyclic presentation has exactly {m} distributable relators; \
         available: {}",
        .available
            .iter()
            .map(|(name, count)| format!("{name} ({count})"))
            .collect::<Vec<_>>()
            .join(", ")
    )]
    NoBuiltinMatches {
        m: usize,
        available: Vec<(&'static str, usize)>,
    },
    #[error("could not stay under the {cap}-letter cap after {attempts} attempts; raise max_word_length or lower commutator_count")]
    LengthCapUnreachable { cap: usize, attempts: u32 },
    #[error("engine verification failed {attempts} times in a row; raise the decode budget")]
    VerificationFailed { attempts: u32 },
    #[error("relator subset must be nonempty")]
    EmptySubset,
    #[error("bit payload must be nonempty")]
    EmptyBits,
    #[error("message of {len} bits exceeds the cap of {cap}")]
    MessageTooLong { len: usize, cap: usize },
    #[error("signature of {len} bits exceeds the remaining room of {room}")]
    SignatureTooLong { len: usize, room: usize },
    #[error("coverage_fraction must lie in (0, 1], got {0}")]
    BadCoverageFraction(f64),
    #[error("conjugator_length must be at least 1")]
    BadConjugatorLength,
}

/// Knobs for the encoding step.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingConfig {
    /// Fraction of the relator subset each identity word must involve.
    pub coverage_fraction: f64,
    /// Number of commutator factors per identity word; `None` means
    /// `max(m, 8)`.
    pub commutator_count: Option<usize>,
    /// Length of the random conjugators `w_j`.
    pub conjugator_length: usize,
    /// Post-reduction cap on emitted word length.
    pub max_word_length: usize,
    /// Engine budget used to verify at encode time; decoding is guaranteed
    /// to succeed within the same budget. `None` means the engine default.
    pub decode_budget: Option<u64>,
    pub seed: u64,
}

impl EncodingConfig {
    pub fn new(seed: u64) -> EncodingConfig {
        EncodingConfig {
            coverage_fraction: DEFAULT_COVERAGE_FRACTION,
            commutator_count: None,
            conjugator_length: DEFAULT_CONJUGATOR_LENGTH,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            decode_budget: None,
            seed,
        }
    }

    fn validate(&self) -> Result<(), DealerError> {
        if !(self.coverage_fraction > 0.0 && self.coverage_fraction <= 1.0) {
            return Err(DealerError::BadCoverageFraction(self.coverage_fraction));
        }
        if self.conjugator_length == 0 {
            return Err(DealerError::BadConjugatorLength);
        }
        Ok(())
    }

    /// Factor count for one identity word over a subset of the given size;
    /// never below what the coverage fraction demands.
    fn factor_count(&self, m: usize, subset_len: usize) -> usize {
        let base = self.commutator_count.unwrap_or(m.max(8));
        let needed = (self.coverage_fraction * subset_len as f64).ceil() as usize;
        base.max(needed).max(1)
    }

    pub fn budget_for(&self, engine: &Engine) -> u64 {
        self.decode_budget.unwrap_or(engine.default_budget())
    }
}

/// The dealer's working view of a platform: presentation plus its exact
/// engine.
#[derive(Debug, Clone)]
pub struct Platform {
    pub presentation: GroupPresentation,
    pub engine: Engine,
}

impl Platform {
    pub fn new(presentation: GroupPresentation) -> Result<Platform, DealerError> {
        let engine = Engine::for_presentation(&presentation)?;
        Ok(Platform {
            presentation,
            engine,
        })
    }
}

/// An encoded message: one word per bit, order significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedMessage {
    pub scheme_id: SchemeId,
    pub words: Vec<Word>,
}

impl EncodedMessage {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Everything `setup` produces in one go.
#[derive(Debug, Clone)]
pub struct SchemeSetup {
    pub scheme_id: SchemeId,
    pub presentation: GroupPresentation,
    pub structure: AccessStructure,
    pub shares: Vec<Share>,
    pub threshold_report: ThresholdReport,
}

/// Picks a platform presentation with exactly `m` relators.
///
/// Coxeter: the smallest rank `k` with `C(k,2) >= m`, `m` distinct
/// generator pairs chosen uniformly, each with a braid order uniform in
/// `2..=6`; unchosen pairs carry no relator (`∞`). Polycyclic: the first
/// builtin whose distributable relator count is exactly `m`.
pub fn generate_platform(
    choice: PlatformChoice,
    params: SchemeParams,
    seed: u64,
) -> Result<GroupPresentation, DealerError> {
    let mut rng = stream_rng(seed, STREAM_PLATFORM);
    let m = params.m();
    match choice {
        PlatformChoice::Coxeter => {
            let mut k = 2;
            while k * (k - 1) / 2 < m {
                k += 1;
            }
            let mut pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .collect();
            pairs.shuffle(&mut rng);
            let mut chosen: Vec<(usize, usize)> = pairs.into_iter().take(m).collect();
            chosen.sort_unstable();
            let relators = chosen
                .into_iter()
                .enumerate()
                .map(|(idx, (i, j))| {
                    let order = rng.random_range(2..=6u32);
                    Relator::new(idx + 1, braid_word(i, j, order))
                })
                .collect::<Result<Vec<Relator>, _>>()?;
            let generators = Generators::numbered("s", k);
            Ok(GroupPresentation::new(
                generators,
                relators,
                Family::Coxeter,
            )?)
        }
        PlatformChoice::PolycyclicBuiltin => {
            let catalog = builtin_presentations();
            let builtin = catalog
                .iter()
                .find(|b| b.distributable_relator_count() == m)
                .ok_or_else(|| DealerError::NoBuiltinMatches {
                    m,
                    available: catalog
                        .iter()
                        .map(|b| (b.name, b.distributable_relator_count()))
                        .collect(),
                })?;
            let relators = builtin
                .pc
                .relator_words()
                .into_iter()
                .enumerate()
                .map(|(idx, word)| Relator::new(idx + 1, word))
                .collect::<Result<Vec<Relator>, _>>()?;
            Ok(GroupPresentation::new(
                builtin.generators.clone(),
                relators,
                Family::Polycyclic,
            )?)
        }
    }
}

/// Runs the whole setup: platform, access structure, shares, and the
/// exhaustive threshold check.
pub fn setup_scheme(
    choice: PlatformChoice,
    n: usize,
    t: usize,
    seed: u64,
) -> Result<SchemeSetup, DealerError> {
    let structure = build_access_structure(n, t)?;
    let presentation = generate_platform(choice, structure.params, seed)?;
    let scheme_id = SchemeId(stream_rng(seed, STREAM_SCHEME_ID).next_u64());
    let shares = make_shares(&presentation, &structure, scheme_id)?;
    let threshold_report = check_threshold_property(&structure);
    Ok(SchemeSetup {
        scheme_id,
        presentation,
        structure,
        shares,
        threshold_report,
    })
}

/// The commutator product `∏ [r_{c(j)}, w_j]` over a shuffled cycle of the
/// subset, conjugated by one more random word. Identity by construction;
/// returns the distinct relator indices involved.
fn identity_product(
    platform: &Platform,
    subset: &[usize],
    factors: usize,
    cfg: &EncodingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Word, BTreeSet<usize>), DealerError> {
    let gens = platform.presentation.generators();
    let mut order: Vec<usize> = subset.to_vec();
    order.shuffle(rng);
    let mut used = BTreeSet::new();
    let mut product = Word::empty();
    for slot in 0..factors {
        let index = order[slot % order.len()];
        used.insert(index);
        let relator = platform
            .presentation
            .relator(index)
            .expect("subset indices are valid");
        let conjugator = random_word(gens, cfg.conjugator_length, rng)?;
        product = product.concat(&commutator(&relator.word, &conjugator));
    }
    let outer = random_word(gens, cfg.conjugator_length, rng)?;
    Ok((conjugate(&product, &outer).freely_reduced(), used))
}

/// Encodes a 1-bit: an engine-verified identity word involving at least
/// `coverage_fraction` of the subset.
pub fn encode_identity_word(
    platform: &Platform,
    subset: &[usize],
    cfg: &EncodingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Word, BTreeSet<usize>), DealerError> {
    cfg.validate()?;
    if subset.is_empty() {
        return Err(DealerError::EmptySubset);
    }
    let m = platform.presentation.relator_count();
    let factors = cfg.factor_count(m, subset.len());
    let budget = cfg.budget_for(&platform.engine);
    let mut over_length = 0;
    for _ in 0..MAX_ATTEMPTS {
        let (word, used) = identity_product(platform, subset, factors, cfg, rng)?;
        if word.is_empty() || word.len() > cfg.max_word_length {
            over_length += 1;
            continue;
        }
        match platform.engine.decide(&word, budget) {
            Ok(decision) => {
                assert!(
                    decision.is_identity,
                    "exact engine rejected a commutator product of relators"
                );
                return Ok((word, used));
            }
            Err(e) if e.is_budget() => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if over_length == MAX_ATTEMPTS {
        Err(DealerError::LengthCapUnreachable {
            cap: cfg.max_word_length,
            attempts: MAX_ATTEMPTS,
        })
    } else {
        Err(DealerError::VerificationFailed {
            attempts: MAX_ATTEMPTS,
        })
    }
}

/// A short word that is certainly not the identity: for Coxeter platforms
/// `s_a s_b` with `a != b` (its order is `m_ab >= 2`), otherwise a random
/// two-letter word checked exactly by the engine.
fn nonidentity_core(
    platform: &Platform,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Word, DealerError> {
    let gens = platform.presentation.generators();
    let k = gens.count();
    if platform.presentation.family() == Family::Coxeter && k >= 2 {
        let a = rng.random_range(0..k);
        let mut b = rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        return Ok(Word::from_letters(vec![
            Letter::positive(a),
            Letter::positive(b),
        ]));
    }
    for _ in 0..MAX_ATTEMPTS {
        let core = random_word(gens, 2, rng)?;
        match platform.engine.decide(&core, budget) {
            Ok(decision) if !decision.is_identity => return Ok(core),
            Ok(_) => continue,
            Err(e) if e.is_budget() => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(DealerError::VerificationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Encodes a 0-bit: a camouflaged word the engine exactly decides to be
/// non-identity. The word is an identity-style commutator product times a
/// short non-identity core, so its length and letter statistics track the
/// 1-words.
pub fn encode_nonidentity_word(
    platform: &Platform,
    subset: &[usize],
    cfg: &EncodingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Word, DealerError> {
    cfg.validate()?;
    if subset.is_empty() {
        return Err(DealerError::EmptySubset);
    }
    let m = platform.presentation.relator_count();
    let factors = cfg.factor_count(m, subset.len());
    let budget = cfg.budget_for(&platform.engine);
    let mut over_length = 0;
    for _ in 0..MAX_ATTEMPTS {
        let core = nonidentity_core(platform, budget, rng)?;
        let (camouflage, _) = identity_product(platform, subset, factors, cfg, rng)?;
        let word = if rng.random_bool(0.5) {
            camouflage.concat(&core)
        } else {
            core.concat(&camouflage)
        }
        .freely_reduced();
        if word.is_empty() || word.len() > cfg.max_word_length {
            over_length += 1;
            continue;
        }
        match platform.engine.decide(&word, budget) {
            Ok(decision) => {
                assert!(
                    !decision.is_identity,
                    "camouflage times a non-identity core cannot be the identity"
                );
                return Ok(word);
            }
            Err(e) if e.is_budget() => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if over_length == MAX_ATTEMPTS {
        Err(DealerError::LengthCapUnreachable {
            cap: cfg.max_word_length,
            attempts: MAX_ATTEMPTS,
        })
    } else {
        Err(DealerError::VerificationFailed {
            attempts: MAX_ATTEMPTS,
        })
    }
}

/// Everything the encoder reports alongside the message itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOutcome {
    pub message: EncodedMessage,
    /// Relator indices involved in at least one identity word.
    pub coverage: BTreeSet<usize>,
    pub relator_count: usize,
    pub warnings: Vec<String>,
}

/// Encodes a bit string against the full relator set: word `i` is the
/// identity iff bit `i` is 1. With at least one 1-bit present, every
/// relator index ends up involved in some identity word.
pub fn encode_message(
    platform: &Platform,
    scheme_id: SchemeId,
    bits: &Bits,
    cfg: &EncodingConfig,
) -> Result<EncodeOutcome, DealerError> {
    cfg.validate()?;
    if bits.is_empty() {
        return Err(DealerError::EmptyBits);
    }
    if bits.len() > MAX_MESSAGE_BITS {
        return Err(DealerError::MessageTooLong {
            len: bits.len(),
            cap: MAX_MESSAGE_BITS,
        });
    }
    let m = platform.presentation.relator_count();
    let all: Vec<usize> = (1..=m).collect();
    let mut words = Vec::with_capacity(bits.len());
    let mut coverage = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut first_one_seen = false;
    for (index, bit) in bits.iter().enumerate() {
        let mut rng = stream_rng(cfg.seed, STREAM_BITS_BASE + index as u64);
        if bit {
            // The first identity word alone must touch every relator, so
            // whole-message coverage never depends on how many 1-bits
            // follow.
            let mut word_cfg = cfg.clone();
            if !first_one_seen {
                let factors = cfg.factor_count(m, all.len()).max(m);
                word_cfg.commutator_count = Some(factors);
                first_one_seen = true;
            }
            let (word, used) = encode_identity_word(platform, &all, &word_cfg, &mut rng)?;
            coverage.extend(used);
            words.push(word);
        } else {
            words.push(encode_nonidentity_word(platform, &all, cfg, &mut rng)?);
        }
    }
    if !first_one_seen {
        warnings.push(
            "payload has no 1-bits: no identity words exist, so total relator coverage \
             is impossible"
                .to_string(),
        );
    } else {
        debug_assert_eq!(coverage.len(), m, "first identity word covers all relators");
    }
    Ok(EncodeOutcome {
        message: EncodedMessage { scheme_id, words },
        coverage,
        relator_count: m,
        warnings,
    })
}

/// Encodes one bit for a single recipient, using only the relators in their
/// share, and verifies the result with exactly the decision procedure that
/// recipient will run.
pub fn encode_for_recipient(
    platform: &Platform,
    share: &Share,
    bit: bool,
    cfg: &EncodingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Word, DealerError> {
    cfg.validate()?;
    let subset: Vec<usize> = share.relators.iter().map(|r| r.index).collect();
    if subset.is_empty() {
        return Err(DealerError::EmptySubset);
    }
    let decider = PartialDecider::from_parts(
        share.public_facts,
        share.generators.count(),
        &share.relators,
    )?;
    let budget = cfg.budget_for(&platform.engine);
    if bit {
        for _ in 0..MAX_ATTEMPTS {
            let (word, _) = encode_identity_word(platform, &subset, cfg, rng)?;
            // The recipient must be able to prove it with their share alone.
            if decider.decide(&word, budget).0 == PartialVerdict::Identity {
                return Ok(word);
            }
        }
        Err(DealerError::VerificationFailed {
            attempts: MAX_ATTEMPTS,
        })
    } else {
        // Non-identity in the full group implies non-identity in the
        // recipient's larger quotient, so the full-engine check suffices.
        encode_nonidentity_word(platform, &subset, cfg, rng)
    }
}

/// Encodes a whole payload for one recipient.
pub fn encode_message_for_recipient(
    platform: &Platform,
    share: &Share,
    bits: &Bits,
    cfg: &EncodingConfig,
) -> Result<EncodedMessage, DealerError> {
    cfg.validate()?;
    if bits.is_empty() {
        return Err(DealerError::EmptyBits);
    }
    if bits.len() > MAX_MESSAGE_BITS {
        return Err(DealerError::MessageTooLong {
            len: bits.len(),
            cap: MAX_MESSAGE_BITS,
        });
    }
    let mut words = Vec::with_capacity(bits.len());
    for (index, bit) in bits.iter().enumerate() {
        let mut rng = stream_rng(cfg.seed, STREAM_BITS_BASE + index as u64);
        words.push(encode_for_recipient(platform, share, bit, cfg, &mut rng)?);
    }
    Ok(EncodedMessage {
        scheme_id: share.scheme_id,
        words,
    })
}

/// Inserts the signature contiguously at a uniformly random offset of the
/// payload. Where the signature sits is deliberately not recorded.
pub fn embed_signature(
    payload: &Bits,
    signature: &Bits,
    rng: &mut impl Rng,
) -> Result<Bits, DealerError> {
    let room = MAX_MESSAGE_BITS.saturating_sub(payload.len());
    if signature.len() > room {
        return Err(DealerError::SignatureTooLong {
            len: signature.len(),
            room,
        });
    }
    if signature.is_empty() {
        return Ok(payload.clone());
    }
    let offset = rng.random_range(0..=payload.len());
    Ok(payload.insert_block(signature, offset))
}
