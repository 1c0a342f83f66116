//! Combiner-side operations: union at least `t` shares, rebuild the
//! presentation, decide every message word with the matching engine, and
//! check signatures in the decoded bits.

use thiserror::Error;

use crate::access::{reconstruct, AccessError, SchemeId, Share};
use crate::bits::Bits;
use crate::dealer::EncodedMessage;
use crate::engine::{
    infer_family, Engine, EngineError, PartialDecider, PartialVerdict, DEFAULT_PROVER_BUDGET,
};
use crate::presentation::{Family, GroupPresentation, PresentationError, PublicFacts};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CombinerError {
    #[error("{have} distinct shares present but the threshold is {need}")]
    BelowThreshold { have: usize, need: usize },
    #[error("shares belong to scheme {share} but the message to {message}")]
    SchemeMismatch { share: SchemeId, message: SchemeId },
    #[error("reconstruction from {have} shares is missing relators {missing:?}; share files are damaged")]
    IncompleteAtThreshold { have: usize, missing: Vec<usize> },
    #[error("decoding needs an exact engine but the reconstructed family is {0}")]
    UnsupportedFamily(Family),
    #[error(
        "word {index} exceeded the decode budget; dealer-produced words verify within it, \
         so the message or shares are corrupt"
    )]
    UndecidedWord { index: usize },
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Per-word decision outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordVerdict {
    Identity,
    NonIdentity,
    /// Only from single-share or bounded decoding; never from a full
    /// threshold decode.
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordReport {
    pub verdict: WordVerdict,
    pub work: u64,
}

/// Decoded bits plus per-word diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub bits: Bits,
    pub per_word: Vec<WordReport>,
    /// Whether the underlying reconstruction had all `m` relators.
    pub complete: bool,
    pub participants: Vec<usize>,
}

/// Full threshold decode: reconstruct from at least `t` distinct shares and
/// decide every word exactly. Bit `i` is 1 iff word `i` is the identity.
pub fn decode_message(
    shares: &[Share],
    message: &EncodedMessage,
    budget: Option<u64>,
) -> Result<DecodeResult, CombinerError> {
    let rec = reconstruct(shares)?;
    let need = rec.params.t();
    let have = rec.participants.len();
    if have < need {
        return Err(CombinerError::BelowThreshold { have, need });
    }
    if rec.scheme_id != message.scheme_id {
        return Err(CombinerError::SchemeMismatch {
            share: rec.scheme_id,
            message: message.scheme_id,
        });
    }
    if !rec.complete {
        return Err(CombinerError::IncompleteAtThreshold {
            have,
            missing: rec.missing.clone(),
        });
    }
    let family = infer_family(rec.public_facts, rec.generators.count(), &rec.relators);
    if family == Family::Raw {
        return Err(CombinerError::UnsupportedFamily(family));
    }
    let presentation = GroupPresentation::new(rec.generators, rec.relators, family)?;
    let engine = Engine::for_presentation(&presentation)?;
    let budget = budget.unwrap_or_else(|| engine.default_budget());
    let mut bits = Bits::default();
    let mut per_word = Vec::with_capacity(message.words.len());
    for (index, word) in message.words.iter().enumerate() {
        match engine.decide(word, budget) {
            Ok(decision) => {
                bits.push(decision.is_identity);
                per_word.push(WordReport {
                    verdict: if decision.is_identity {
                        WordVerdict::Identity
                    } else {
                        WordVerdict::NonIdentity
                    },
                    work: decision.work,
                });
            }
            Err(e) if e.is_budget() => {
                return Err(CombinerError::UndecidedWord { index: index + 1 });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(DecodeResult {
        bits,
        per_word,
        complete: true,
        participants: rec.participants,
    })
}

/// Single-share decode for targeted messages: decisions happen in the
/// smaller quotient `G'` presented by the share's relators alone. For
/// Coxeter shares the decisions are exact in `G'`; otherwise a sound
/// bounded prover is used and honest `Undecided` verdicts decode as 0.
pub fn decode_single(
    share: &Share,
    message: &EncodedMessage,
    budget: Option<u64>,
) -> Result<DecodeResult, CombinerError> {
    if share.scheme_id != message.scheme_id {
        return Err(CombinerError::SchemeMismatch {
            share: share.scheme_id,
            message: message.scheme_id,
        });
    }
    let decider = PartialDecider::from_parts(
        share.public_facts,
        share.generators.count(),
        &share.relators,
    )?;
    let budget = budget.unwrap_or(match share.public_facts {
        PublicFacts::CoxeterInvolutions => crate::coxeter::DEFAULT_COXETER_BUDGET,
        PublicFacts::None => DEFAULT_PROVER_BUDGET,
    });
    let mut bits = Bits::default();
    let mut per_word = Vec::with_capacity(message.words.len());
    for word in &message.words {
        let (verdict, work) = decider.decide(word, budget);
        let (bit, verdict) = match verdict {
            PartialVerdict::Identity => (true, WordVerdict::Identity),
            PartialVerdict::NonIdentity => (false, WordVerdict::NonIdentity),
            PartialVerdict::Unknown => (false, WordVerdict::Undecided),
        };
        bits.push(bit);
        per_word.push(WordReport { verdict, work });
    }
    Ok(DecodeResult {
        bits,
        per_word,
        complete: share.relators.len() == share.params.m(),
        participants: vec![share.participant],
    })
}

/// Result of scanning decoded bits for a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureReport {
    /// Every offset where the signature occurs as a contiguous substring.
    pub offsets: Vec<usize>,
    pub authentic: bool,
    /// An empty signature matches everywhere and proves nothing.
    pub degenerate: bool,
}

/// Reports all offsets where the signature occurs; the verifier does not
/// need to know where it was embedded.
pub fn verify_signature(bits: &Bits, signature: &Bits) -> SignatureReport {
    let offsets = bits.find_all(signature);
    SignatureReport {
        authentic: !offsets.is_empty(),
        degenerate: signature.is_empty(),
        offsets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dealer::{
        encode_message, encode_message_for_recipient, setup_scheme, EncodingConfig, Platform,
        PlatformChoice,
    };
    use crate::word::Letter;
    use crate::word::Word;
    use proptest::prelude::*;

    fn scheme_3_2() -> (Platform, crate::dealer::SchemeSetup) {
        let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, 101).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        (platform, setup)
    }

    #[test]
    fn round_trip_with_two_of_three_shares() {
        let (platform, setup) = scheme_3_2();
        let cfg = EncodingConfig::new(9);
        let bits: Bits = "1011".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let shares = vec![setup.shares[0].clone(), setup.shares[2].clone()];
        let decoded = decode_message(&shares, &outcome.message, None).unwrap();
        assert_eq!(decoded.bits, bits);
        assert!(decoded.complete);
        assert_eq!(decoded.participants, vec![1, 3]);
    }

    #[test]
    fn below_threshold_is_an_error() {
        let (platform, setup) = scheme_3_2();
        let cfg = EncodingConfig::new(9);
        let bits: Bits = "1".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let err = decode_message(&setup.shares[..1], &outcome.message, None).unwrap_err();
        assert_eq!(err, CombinerError::BelowThreshold { have: 1, need: 2 });
    }

    #[test]
    fn scheme_mismatch_is_detected() {
        let (platform, setup) = scheme_3_2();
        let cfg = EncodingConfig::new(9);
        let bits: Bits = "1".parse().unwrap();
        let mut outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        outcome.message.scheme_id = SchemeId(setup.scheme_id.0 ^ 1);
        assert!(matches!(
            decode_message(&setup.shares[..2], &outcome.message, None),
            Err(CombinerError::SchemeMismatch { .. })
        ));
    }

    #[test]
    fn tampering_with_a_one_word_flips_it_to_zero() {
        let (platform, setup) = scheme_3_2();
        let cfg = EncodingConfig::new(9);
        let bits: Bits = "1".parse().unwrap();
        let mut outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        // Append one generator: odd length can never be the identity in a
        // Coxeter group.
        let tampered = outcome.message.words[0]
            .concat(&Word::from_letters(vec![Letter::positive(0)]));
        outcome.message.words[0] = tampered;
        let decoded = decode_message(&setup.shares[..2], &outcome.message, None).unwrap();
        assert_eq!(decoded.bits.to_string(), "0");
    }

    #[test]
    fn all_coalitions_decode_identically() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 4, 3, 33).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(11);
        let bits: Bits = "110".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        for coalition in crate::access::enumerate_subsets(4, 3).unwrap() {
            let members: Vec<Share> = coalition
                .iter()
                .map(|&i| setup.shares[i - 1].clone())
                .collect();
            let decoded = decode_message(&members, &outcome.message, None).unwrap();
            assert_eq!(decoded.bits, bits, "coalition {coalition:?}");
        }
    }

    #[test]
    fn polycyclic_round_trip() {
        let setup = setup_scheme(PlatformChoice::PolycyclicBuiltin, 3, 2, 55).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(13);
        let bits: Bits = "0110".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let decoded =
            decode_message(&setup.shares[1..3], &outcome.message, None).unwrap();
        assert_eq!(decoded.bits, bits);
    }

    #[test]
    fn smallest_scheme_round_trips_for_both_families() {
        // (2,2) has m = 2: Coxeter always works, and the polycyclic catalog
        // covers it with the rank-2 mixed abelian group.
        for choice in [PlatformChoice::Coxeter, PlatformChoice::PolycyclicBuiltin] {
            let setup = setup_scheme(choice, 2, 2, 59).unwrap();
            let platform = Platform::new(setup.presentation.clone()).unwrap();
            let cfg = EncodingConfig::new(61);
            let bits: Bits = "1001".parse().unwrap();
            let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
            let decoded = decode_message(&setup.shares, &outcome.message, None).unwrap();
            assert_eq!(decoded.bits, bits, "{choice}");
            // One share alone must not suffice.
            assert!(matches!(
                decode_message(&setup.shares[..1], &outcome.message, None),
                Err(CombinerError::BelowThreshold { have: 1, need: 2 })
            ));
        }
    }

    #[test]
    fn targeted_message_decodes_with_one_share() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 4, 3, 77).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(21);
        let bits: Bits = "101".parse().unwrap();
        let share = &setup.shares[0];
        let message =
            encode_message_for_recipient(&platform, share, &bits, &cfg).unwrap();
        let decoded = decode_single(share, &message, None).unwrap();
        assert_eq!(decoded.bits, bits);
        assert!(!decoded.complete);
        // Every verdict is definite for the intended recipient.
        assert!(decoded
            .per_word
            .iter()
            .all(|r| r.verdict != WordVerdict::Undecided));
    }

    #[test]
    fn polycyclic_targeted_message_decodes_with_one_share() {
        let setup = setup_scheme(PlatformChoice::PolycyclicBuiltin, 3, 2, 79).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(81);
        let bits: Bits = "1010".parse().unwrap();
        let share = &setup.shares[1];
        let message = encode_message_for_recipient(&platform, share, &bits, &cfg).unwrap();
        let decoded = decode_single(share, &message, None).unwrap();
        assert_eq!(decoded.bits, bits);
    }

    #[test]
    fn empty_message_decodes_to_empty_bits() {
        let (_, setup) = scheme_3_2();
        let message = EncodedMessage {
            scheme_id: setup.scheme_id,
            words: vec![],
        };
        let decoded = decode_single(&setup.shares[0], &message, None).unwrap();
        assert!(decoded.bits.is_empty());
    }

    #[test]
    fn signature_scan_examples() {
        let bits: Bits = "11101".parse().unwrap();
        let sig: Bits = "11".parse().unwrap();
        let report = verify_signature(&bits, &sig);
        assert_eq!(report.offsets, vec![0, 1]);
        assert!(report.authentic);
        assert!(!report.degenerate);

        let long: Bits = "111111".parse().unwrap();
        let report = verify_signature(&bits, &long);
        assert!(report.offsets.is_empty());
        assert!(!report.authentic);

        let report = verify_signature(&bits, &Bits::default());
        assert!(report.degenerate);
        assert_eq!(report.offsets.len(), bits.len() + 1);
    }

    proptest! {
        #[test]
        fn signature_scan_agrees_with_naive_oracle(
            haystack in proptest::collection::vec(proptest::bool::ANY, 0..40),
            needle in proptest::collection::vec(proptest::bool::ANY, 1..8),
        ) {
            let bits = Bits::new(haystack.clone());
            let sig = Bits::new(needle.clone());
            let report = verify_signature(&bits, &sig);
            let mut expected = Vec::new();
            for start in 0..haystack.len().saturating_sub(needle.len() - 1) {
                if haystack[start..start + needle.len()] == needle[..] {
                    expected.push(start);
                }
            }
            prop_assert_eq!(report.offsets, expected);
        }
    }
}
