//! Engine dispatch: one front door for deciding `w = 1`, whichever platform
//! family the presentation belongs to, plus a sound bounded prover for
//! partial relator sets that no exact engine covers.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use thiserror::Error;

use crate::coxeter::{self, CoxeterError, CoxeterMatrix, DEFAULT_COXETER_BUDGET};
use crate::polycyclic::{PcError, PolycyclicPresentation, DEFAULT_PC_BUDGET};
use crate::presentation::{Family, GroupPresentation, PublicFacts, Relator};
use crate::word::Word;

/// Default cap on explored states for the bounded prover.
pub const DEFAULT_PROVER_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Polycyclic(#[from] PcError),
    #[error("no exact engine for family {0}")]
    UnsupportedFamily(Family),
}

impl EngineError {
    /// Whether this is a budget exhaustion, i.e. "undecided", rather than a
    /// malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            EngineError::Coxeter(CoxeterError::BudgetExhausted { .. })
                | EngineError::Polycyclic(PcError::BudgetExhausted { .. })
        )
    }
}

/// An exact decision together with how much work it took (explored words
/// for Coxeter, rewrite steps for polycyclic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordDecision {
    pub is_identity: bool,
    pub work: u64,
}

/// An exact word-problem decision procedure for one platform.
#[derive(Debug, Clone)]
pub enum Engine {
    Coxeter(CoxeterMatrix),
    Polycyclic(PolycyclicPresentation),
}

impl Engine {
    pub fn for_presentation(p: &GroupPresentation) -> Result<Engine, EngineError> {
        match p.family() {
            Family::Coxeter => Ok(Engine::Coxeter(coxeter::validate_coxeter(p)?)),
            Family::Polycyclic => Ok(Engine::Polycyclic(crate::polycyclic::validate_polycyclic(p)?)),
            Family::Raw => Err(EngineError::UnsupportedFamily(Family::Raw)),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Engine::Coxeter(_) => Family::Coxeter,
            Engine::Polycyclic(_) => Family::Polycyclic,
        }
    }

    pub fn default_budget(&self) -> u64 {
        match self {
            Engine::Coxeter(_) => DEFAULT_COXETER_BUDGET,
            Engine::Polycyclic(_) => DEFAULT_PC_BUDGET,
        }
    }

    /// Exact decision; budget exhaustion is an error, never a verdict.
    pub fn decide(&self, word: &Word, budget: u64) -> Result<WordDecision, EngineError> {
        match self {
            Engine::Coxeter(matrix) => {
                let decision = coxeter::is_identity_tits(matrix, word, budget)?;
                Ok(WordDecision {
                    is_identity: decision.is_identity,
                    work: decision.explored,
                })
            }
            Engine::Polycyclic(pc) => {
                let collected = pc.collect(word, budget)?;
                Ok(WordDecision {
                    is_identity: collected.normal_form.is_identity(),
                    work: collected.steps,
                })
            }
        }
    }
}

/// Guesses the family of a relator set that arrived without a tag (share
/// files carry public facts but no family line): the involution fact pins
/// Coxeter; otherwise polycyclic shape is tried; anything else is raw.
pub fn infer_family(public_facts: PublicFacts, k: usize, relators: &[Relator]) -> Family {
    match public_facts {
        PublicFacts::CoxeterInvolutions => Family::Coxeter,
        PublicFacts::None => {
            if PolycyclicPresentation::from_relators(k, relators).is_ok() {
                Family::Polycyclic
            } else {
                Family::Raw
            }
        }
    }
}

/// Verdicts a partial-presentation decider can reach about the group `G'`
/// presented by the relators it was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialVerdict {
    /// `w = 1` in `G'` (hence in every quotient of `G'`).
    Identity,
    /// `w != 1` in `G'`, exactly decided (Coxeter partials only).
    NonIdentity,
    /// The bounded search gave up; nothing is known.
    Unknown,
}

/// Decides words against a partial relator set. Coxeter partials stay
/// Coxeter (missing braid relators become `∞` entries), so decisions there
/// are exact; anything else falls back to the sound bounded prover.
#[derive(Debug, Clone)]
pub enum PartialDecider {
    Coxeter(CoxeterMatrix),
    Bounded(BoundedProver),
}

impl PartialDecider {
    pub fn from_parts(
        public_facts: PublicFacts,
        k: usize,
        relators: &[Relator],
    ) -> Result<PartialDecider, EngineError> {
        match public_facts {
            PublicFacts::CoxeterInvolutions => Ok(PartialDecider::Coxeter(
                CoxeterMatrix::from_relators(k, relators)?,
            )),
            PublicFacts::None => Ok(PartialDecider::Bounded(BoundedProver::new(
                relators.iter().map(|r| &r.word),
            ))),
        }
    }

    pub fn decide(&self, word: &Word, budget: u64) -> (PartialVerdict, u64) {
        match self {
            PartialDecider::Coxeter(matrix) => {
                match coxeter::is_identity_tits(matrix, word, budget) {
                    Ok(decision) if decision.is_identity => {
                        (PartialVerdict::Identity, decision.explored)
                    }
                    Ok(decision) => (PartialVerdict::NonIdentity, decision.explored),
                    Err(CoxeterError::BudgetExhausted { explored, .. }) => {
                        (PartialVerdict::Unknown, explored)
                    }
                    Err(_) => (PartialVerdict::Unknown, 0),
                }
            }
            PartialDecider::Bounded(prover) => {
                let (proved, explored) = prover.proves_identity(word, budget);
                if proved {
                    (PartialVerdict::Identity, explored)
                } else {
                    (PartialVerdict::Unknown, explored)
                }
            }
        }
    }
}

/// A sound semidecision procedure for `w = 1` over an arbitrary relator
/// set: breadth-first search over words reachable by deleting one literal
/// occurrence of a relator (any cyclic rotation, either orientation) and
/// freely reducing. Every move preserves the group element and strictly
/// shortens the word, so the search always terminates; reaching the empty
/// word proves identity, exhausting the space proves nothing.
#[derive(Debug, Clone)]
pub struct BoundedProver {
    rules: Vec<Vec<crate::word::Letter>>,
}

impl BoundedProver {
    pub fn new<'a>(relators: impl IntoIterator<Item = &'a Word>) -> BoundedProver {
        let mut rules: Vec<Vec<crate::word::Letter>> = Vec::new();
        let mut seen: HashSet<Vec<crate::word::Letter>> = HashSet::new();
        for relator in relators {
            let reduced = relator.freely_reduced();
            for oriented in [reduced.clone(), reduced.inverse()] {
                let letters = oriented.letters();
                for rotation in 0..letters.len().max(1) {
                    let mut rotated: Vec<crate::word::Letter> =
                        letters[rotation..].to_vec();
                    rotated.extend_from_slice(&letters[..rotation]);
                    let rotated = Word::from_letters(rotated).freely_reduced();
                    if rotated.is_empty() {
                        continue;
                    }
                    let key = rotated.letters().to_vec();
                    if seen.insert(key.clone()) {
                        rules.push(key);
                    }
                }
            }
        }
        BoundedProver { rules }
    }

    /// Returns whether identity was proved, plus the number of explored
    /// states.
    pub fn proves_identity(&self, word: &Word, budget: u64) -> (bool, u64) {
        let start = word.freely_reduced();
        if start.is_empty() {
            return (true, 1);
        }
        // Fast path: commutator-product style words usually dissolve under
        // repeated leftmost-longest deletion; fall back to the full search
        // only when that gets stuck.
        let mut greedy = start.letters().to_vec();
        let mut greedy_steps: u64 = 1;
        loop {
            let Some((at, rule_len)) = self.leftmost_longest_match(&greedy) else {
                break;
            };
            let mut shorter = greedy[..at].to_vec();
            shorter.extend_from_slice(&greedy[at + rule_len..]);
            greedy = Word::from_letters(shorter).freely_reduced().letters().to_vec();
            greedy_steps += 1;
            if greedy.is_empty() {
                return (true, greedy_steps);
            }
        }
        // Shortest-first search: every deletion strictly shortens, so
        // expanding the shortest frontier word first reaches the empty word
        // along the cheapest line while staying exhaustive.
        let mut explored: u64 = greedy_steps;
        let mut visited: HashSet<Vec<crate::word::Letter>> = HashSet::new();
        let mut queue: BinaryHeap<Reverse<(usize, Vec<crate::word::Letter>)>> = BinaryHeap::new();
        visited.insert(start.letters().to_vec());
        queue.push(Reverse((start.len(), start.letters().to_vec())));
        while let Some(Reverse((_, current))) = queue.pop() {
            for rule in &self.rules {
                if rule.len() > current.len() {
                    continue;
                }
                for at in 0..=current.len() - rule.len() {
                    if current[at..at + rule.len()] != rule[..] {
                        continue;
                    }
                    let mut shorter = current[..at].to_vec();
                    shorter.extend_from_slice(&current[at + rule.len()..]);
                    let shorter = Word::from_letters(shorter).freely_reduced();
                    if shorter.is_empty() {
                        return (true, explored);
                    }
                    let key = shorter.letters().to_vec();
                    if visited.contains(&key) {
                        continue;
                    }
                    explored += 1;
                    if explored > budget {
                        return (false, explored);
                    }
                    visited.insert(key.clone());
                    queue.push(Reverse((key.len(), key)));
                }
            }
        }
        (false, explored)
    }

    fn leftmost_longest_match(&self, word: &[crate::word::Letter]) -> Option<(usize, usize)> {
        for at in 0..word.len() {
            let mut best: Option<usize> = None;
            for rule in &self.rules {
                if rule.len() <= word.len() - at
                    && word[at..at + rule.len()] == rule[..]
                    && best.is_none_or(|len| rule.len() > len)
                {
                    best = Some(rule.len());
                }
            }
            if let Some(len) = best {
                return Some((at, len));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{commutator, conjugate, Generators};

    #[test]
    fn engine_dispatch_by_family() {
        let gens = Generators::numbered("s", 2);
        let braid = Relator::new(1, coxeter::braid_word(0, 1, 3)).unwrap();
        let p = GroupPresentation::new(gens, vec![braid], Family::Coxeter).unwrap();
        let engine = Engine::for_presentation(&p).unwrap();
        assert_eq!(engine.family(), Family::Coxeter);
        let decision = engine
            .decide(&coxeter::braid_word(0, 1, 3), engine.default_budget())
            .unwrap();
        assert!(decision.is_identity);
    }

    #[test]
    fn raw_family_has_no_exact_engine() {
        let gens = Generators::numbered("a", 1);
        let word = gens.parse_word("a1 a1").unwrap();
        let p = GroupPresentation::new(gens, vec![Relator::new(1, word).unwrap()], Family::Raw)
            .unwrap();
        assert!(matches!(
            Engine::for_presentation(&p),
            Err(EngineError::UnsupportedFamily(Family::Raw))
        ));
    }

    #[test]
    fn family_inference() {
        let heis = crate::polycyclic::heisenberg();
        let relators: Vec<Relator> = heis
            .pc
            .relator_words()
            .into_iter()
            .enumerate()
            .map(|(idx, w)| Relator::new(idx + 1, w).unwrap())
            .collect();
        assert_eq!(
            infer_family(PublicFacts::None, 3, &relators),
            Family::Polycyclic
        );
        assert_eq!(
            infer_family(PublicFacts::None, 3, &relators[..2]),
            Family::Raw
        );
        assert_eq!(
            infer_family(PublicFacts::CoxeterInvolutions, 3, &relators),
            Family::Coxeter
        );
    }

    #[test]
    fn bounded_prover_handles_commutator_products() {
        let gens = Generators::numbered("x", 3);
        let r1 = gens.parse_word("x1 x2 x1^-1 x2^-1").unwrap();
        let r2 = gens.parse_word("x3 x3 x3").unwrap();
        let prover = BoundedProver::new([&r1, &r2]);
        let w1 = gens.parse_word("x2 x3^-1").unwrap();
        let w2 = gens.parse_word("x1 x3").unwrap();
        let product = commutator(&r1, &w1)
            .concat(&commutator(&r2, &w2))
            .freely_reduced();
        let (proved, _) = prover.proves_identity(&product, 100_000);
        assert!(proved);

        let conjugated = conjugate(&r2, &gens.parse_word("x1^-1 x2").unwrap());
        let (proved, _) = prover.proves_identity(&conjugated, 100_000);
        assert!(proved);
    }

    #[test]
    fn bounded_prover_never_proves_nonidentities_it_cannot_reach() {
        let gens = Generators::numbered("x", 2);
        let r1 = gens.parse_word("x1 x1").unwrap();
        let prover = BoundedProver::new([&r1]);
        let (proved, _) = prover.proves_identity(&gens.parse_word("x2").unwrap(), 10_000);
        assert!(!proved);
        let (proved, _) = prover.proves_identity(&gens.parse_word("x1").unwrap(), 10_000);
        assert!(!proved);
        let (proved, _) = prover.proves_identity(&gens.parse_word("x1 x1").unwrap(), 10_000);
        assert!(proved);
    }
}
