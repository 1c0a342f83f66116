//! Desk-scale adversary simulations: what a sub-threshold coalition can
//! prove about a message, and how far a presentation-pool search gets.
//!
//! Verdicts never guess. A coalition's partial presentation presents a
//! group `G'` of which the real platform `G` is a quotient, so identity in
//! `G'` transfers to `G` but non-identity does not; that asymmetry is
//! surfaced, not resolved. Quotient attacks on the platform itself are out
//! of scope here.

use std::fmt;

use thiserror::Error;

use crate::access::{reconstruct, AccessError, SchemeId, Share};
use crate::bits::Bits;
use crate::dealer::EncodedMessage;
use crate::engine::{
    infer_family, Engine, EngineError, PartialDecider, PartialVerdict, DEFAULT_PROVER_BUDGET,
};
use crate::presentation::{Family, GroupPresentation, PublicFacts};
use crate::word::Word;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("shares belong to scheme {share} but the message to {message}")]
    SchemeMismatch { share: SchemeId, message: SchemeId },
}

/// What the attacker can assert about one word of the message, as a claim
/// about the real platform group `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackVerdict {
    /// `w = 1` in the partial group, hence in `G`. Always a true 1-bit.
    ProvedIdentity,
    /// `w != 1` in `G`, by exact decision (full reconstruction) or by the
    /// public parity argument (Coxeter words of odd length).
    ProvedNonIdentity,
    /// Nothing sound can be said about `G`.
    Undecided,
}

impl fmt::Display for AttackVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackVerdict::ProvedIdentity => "proved-identity",
            AttackVerdict::ProvedNonIdentity => "proved-non-identity",
            AttackVerdict::Undecided => "undecided",
        })
    }
}

/// Per-word attack outcome; when the partial Coxeter engine reached an
/// exact `G'` verdict that does not transfer to `G`, it is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordAttack {
    pub verdict: AttackVerdict,
    /// Exact `w != 1 in G'` finding that stays inconclusive for `G`.
    pub nonidentity_in_partial: bool,
    pub work: u64,
}

/// Everything a coalition run reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionReport {
    pub coalition: Vec<usize>,
    pub complete: bool,
    /// Relator indices the coalition is missing.
    pub missing: Vec<usize>,
    pub words: Vec<WordAttack>,
}

impl CoalitionReport {
    pub fn verdict_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for word in &self.words {
            match word.verdict {
                AttackVerdict::ProvedIdentity => counts.0 += 1,
                AttackVerdict::ProvedNonIdentity => counts.1 += 1,
                AttackVerdict::Undecided => counts.2 += 1,
            }
        }
        counts
    }
}

impl fmt::Display for CoalitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "coalition {:?}: {} of m relators missing{}",
            self.coalition,
            self.missing.len(),
            if self.complete { " (full decode)" } else { "" },
        )?;
        for (index, word) in self.words.iter().enumerate() {
            write!(f, "word {}: {}", index + 1, word.verdict)?;
            if word.nonidentity_in_partial && word.verdict == AttackVerdict::Undecided {
                write!(f, " (non-identity in the partial group)")?;
            }
            writeln!(f, " [work {}]", word.work)?;
        }
        Ok(())
    }
}

/// Coxeter words of odd length are never the identity: length mod 2 is a
/// homomorphism onto Z/2 because every braid and involution relator has
/// even length. This uses only public facts, so it is sound for `G`.
fn odd_length_coxeter(word: &Word) -> bool {
    word.len() % 2 == 1
}

/// Runs a coalition (usually sub-threshold) against a message.
///
/// Complete reconstructions behave as a full decode with exact verdicts. A
/// partial Coxeter presentation is still Coxeter, so `G'` decisions are
/// exact: identity transfers to `G`, non-identity is reported but stays
/// `Undecided` for `G` unless parity settles it. Partial polycyclic
/// presentations lose their shape, so only the bounded prover runs.
pub fn coalition_attack(
    shares: &[Share],
    message: &EncodedMessage,
    budget: Option<u64>,
) -> Result<CoalitionReport, AnalysisError> {
    let rec = reconstruct(shares)?;
    if rec.scheme_id != message.scheme_id {
        return Err(AnalysisError::SchemeMismatch {
            share: rec.scheme_id,
            message: message.scheme_id,
        });
    }
    let family = infer_family(rec.public_facts, rec.generators.count(), &rec.relators);
    let is_coxeter = rec.public_facts == PublicFacts::CoxeterInvolutions;
    let mut words = Vec::with_capacity(message.words.len());
    if rec.complete && family != Family::Raw {
        let presentation = GroupPresentation::new(
            rec.generators.clone(),
            rec.relators.clone(),
            family,
        )
        .expect("complete reconstructions are valid presentations");
        let engine = Engine::for_presentation(&presentation)?;
        let budget = budget.unwrap_or_else(|| engine.default_budget());
        for word in &message.words {
            let outcome = match engine.decide(word, budget) {
                Ok(decision) if decision.is_identity => WordAttack {
                    verdict: AttackVerdict::ProvedIdentity,
                    nonidentity_in_partial: false,
                    work: decision.work,
                },
                Ok(decision) => WordAttack {
                    verdict: AttackVerdict::ProvedNonIdentity,
                    nonidentity_in_partial: false,
                    work: decision.work,
                },
                Err(e) if e.is_budget() => WordAttack {
                    verdict: AttackVerdict::Undecided,
                    nonidentity_in_partial: false,
                    work: budget,
                },
                Err(e) => return Err(e.into()),
            };
            words.push(outcome);
        }
    } else {
        let decider =
            PartialDecider::from_parts(rec.public_facts, rec.generators.count(), &rec.relators)?;
        let budget = budget.unwrap_or(if is_coxeter {
            crate::coxeter::DEFAULT_COXETER_BUDGET
        } else {
            DEFAULT_PROVER_BUDGET
        });
        for word in &message.words {
            let (partial, work) = decider.decide(word, budget);
            let outcome = match partial {
                PartialVerdict::Identity => WordAttack {
                    verdict: AttackVerdict::ProvedIdentity,
                    nonidentity_in_partial: false,
                    work,
                },
                PartialVerdict::NonIdentity => WordAttack {
                    verdict: if is_coxeter && odd_length_coxeter(word) {
                        AttackVerdict::ProvedNonIdentity
                    } else {
                        AttackVerdict::Undecided
                    },
                    nonidentity_in_partial: true,
                    work,
                },
                PartialVerdict::Unknown => WordAttack {
                    verdict: AttackVerdict::Undecided,
                    nonidentity_in_partial: false,
                    work,
                },
            };
            words.push(outcome);
        }
    }
    Ok(CoalitionReport {
        coalition: rec.participants,
        complete: rec.complete,
        missing: rec.missing,
        words,
    })
}

/// One pool candidate's outcome: the bits it decodes to (if it can decode
/// at all) and where the known signature shows up in them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolCandidate {
    /// Position in the input pool.
    pub position: usize,
    pub decoded: Option<Bits>,
    pub signature_offsets: Vec<usize>,
    /// Words the candidate's engine could not settle within budget
    /// (decoded as 0).
    pub undecided_words: usize,
}

impl PoolCandidate {
    pub fn matched(&self) -> bool {
        !self.signature_offsets.is_empty()
    }
}

/// Pool-search report, candidates with signature matches ranked first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolReport {
    pub candidates: Vec<PoolCandidate>,
    pub candidate_count: usize,
    pub match_count: usize,
}

impl PoolReport {
    /// Fraction of candidates whose decode contains the signature; with
    /// decoys only, this is the measured false-positive rate.
    pub fn match_fraction(&self) -> f64 {
        if self.candidate_count == 0 {
            0.0
        } else {
            self.match_count as f64 / self.candidate_count as f64
        }
    }
}

impl fmt::Display for PoolReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "pool of {}: {} candidate(s) contain the signature",
            self.candidate_count, self.match_count
        )?;
        for candidate in &self.candidates {
            match &candidate.decoded {
                Some(bits) => writeln!(
                    f,
                    "candidate {}: decoded {} offsets {:?}{}",
                    candidate.position,
                    bits,
                    candidate.signature_offsets,
                    if candidate.undecided_words > 0 {
                        format!(" ({} undecided)", candidate.undecided_words)
                    } else {
                        String::new()
                    }
                )?,
                None => writeln!(f, "candidate {}: cannot decode", candidate.position)?,
            }
        }
        Ok(())
    }
}

/// Decodes the message under every candidate presentation and ranks the
/// candidates by whether the known signature appears in their decode.
pub fn pool_attack(
    pool: &[GroupPresentation],
    message: &EncodedMessage,
    known_signature: &Bits,
    budget: u64,
) -> PoolReport {
    let mut candidates: Vec<PoolCandidate> = Vec::with_capacity(pool.len());
    for (position, presentation) in pool.iter().enumerate() {
        let Ok(engine) = Engine::for_presentation(presentation) else {
            candidates.push(PoolCandidate {
                position,
                decoded: None,
                signature_offsets: Vec::new(),
                undecided_words: 0,
            });
            continue;
        };
        let mut bits = Bits::default();
        let mut undecided_words = 0;
        let mut usable = true;
        for word in &message.words {
            match engine.decide(word, budget) {
                Ok(decision) => bits.push(decision.is_identity),
                Err(e) if e.is_budget() => {
                    undecided_words += 1;
                    bits.push(false);
                }
                Err(_) => {
                    // Words outside the candidate's alphabet: not a
                    // plausible platform for this message.
                    usable = false;
                    break;
                }
            }
        }
        if !usable {
            candidates.push(PoolCandidate {
                position,
                decoded: None,
                signature_offsets: Vec::new(),
                undecided_words: 0,
            });
            continue;
        }
        let signature_offsets = if known_signature.is_empty() {
            Vec::new()
        } else {
            bits.find_all(known_signature)
        };
        candidates.push(PoolCandidate {
            position,
            decoded: Some(bits),
            signature_offsets,
            undecided_words,
        });
    }
    let match_count = candidates.iter().filter(|c| c.matched()).count();
    let candidate_count = candidates.len();
    // Matches first; input order otherwise.
    candidates.sort_by_key(|c| (!c.matched(), c.position));
    PoolReport {
        candidates,
        candidate_count,
        match_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::enumerate_subsets;
    use crate::dealer::{
        encode_message, generate_platform, setup_scheme, EncodingConfig, Platform,
        PlatformChoice,
    };
    use crate::access::SchemeParams;

    #[test]
    fn subthreshold_coalition_misses_exactly_one_and_stays_sound() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 4, 3, 201).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(17);
        let bits: Bits = "1100101".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        for coalition in enumerate_subsets(4, 2).unwrap() {
            let members: Vec<Share> = coalition
                .iter()
                .map(|&i| setup.shares[i - 1].clone())
                .collect();
            let report = coalition_attack(&members, &outcome.message, None).unwrap();
            assert!(!report.complete);
            assert_eq!(report.missing.len(), 1, "coalition {coalition:?}");
            // Soundness: every ProvedIdentity is a true 1-bit, every
            // ProvedNonIdentity a true 0-bit.
            for (word, bit) in report.words.iter().zip(bits.iter()) {
                match word.verdict {
                    AttackVerdict::ProvedIdentity => assert!(bit),
                    AttackVerdict::ProvedNonIdentity => assert!(!bit),
                    AttackVerdict::Undecided => {}
                }
            }
        }
    }

    #[test]
    fn full_coalition_behaves_as_decode() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, 207).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(19);
        let bits: Bits = "101".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let report =
            coalition_attack(&setup.shares[..2], &outcome.message, None).unwrap();
        assert!(report.complete);
        let decoded: Vec<bool> = report
            .words
            .iter()
            .map(|w| w.verdict == AttackVerdict::ProvedIdentity)
            .collect();
        assert_eq!(Bits::new(decoded), bits);
        let (identities, nonid, undecided) = report.verdict_counts();
        assert_eq!(identities, 2);
        assert_eq!(nonid, 1);
        assert_eq!(undecided, 0);
    }

    #[test]
    fn polycyclic_partial_reports_bounded_outcomes_only() {
        let setup = setup_scheme(PlatformChoice::PolycyclicBuiltin, 3, 2, 209).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let cfg = EncodingConfig::new(23);
        let bits: Bits = "10".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let report =
            coalition_attack(&setup.shares[..1], &outcome.message, None).unwrap();
        assert!(!report.complete);
        for (word, bit) in report.words.iter().zip(bits.iter()) {
            match word.verdict {
                AttackVerdict::ProvedIdentity => assert!(bit),
                // The bounded prover never proves non-identity.
                AttackVerdict::ProvedNonIdentity => panic!("unsound verdict"),
                AttackVerdict::Undecided => {}
            }
        }
    }

    #[test]
    fn pool_attack_finds_the_true_platform() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, 211).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let mut cfg = EncodingConfig::new(29);
        cfg.commutator_count = Some(4);
        let payload: Bits = "1010".parse().unwrap();
        let signature: Bits = "0110".parse().unwrap();
        let mut rng = crate::dealer::stream_rng(29, 2);
        let bits = crate::dealer::embed_signature(&payload, &signature, &mut rng).unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();

        let params = SchemeParams::new(3, 2).unwrap();
        let mut pool: Vec<GroupPresentation> = (0..20)
            .map(|i| generate_platform(PlatformChoice::Coxeter, params, 1000 + i).unwrap())
            .collect();
        let true_position = 7;
        pool.insert(true_position, setup.presentation.clone());

        let report = pool_attack(&pool, &outcome.message, &signature, 200_000);
        let winner = report
            .candidates
            .iter()
            .find(|c| c.position == true_position)
            .unwrap();
        assert!(winner.matched(), "true platform must contain the signature");
        assert!(report.match_count >= 1);
        assert!(report.match_fraction() <= 1.0);
    }

    #[test]
    fn empty_pool_gives_empty_ranking() {
        let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, 213).unwrap();
        let message = EncodedMessage {
            scheme_id: setup.scheme_id,
            words: vec![],
        };
        let report = pool_attack(&[], &message, &Bits::default(), 1000);
        assert!(report.candidates.is_empty());
        assert_eq!(report.match_fraction(), 0.0);
    }
}
