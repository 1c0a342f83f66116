//! Exact word-problem decisions for Coxeter presentations.
//!
//! The decision procedure rests on Tits' theorem: a word represents the
//! identity iff the empty word is reachable from it by length-preserving
//! braid moves and deletions of adjacent equal letters. Both moves never
//! increase length, so the reachable set is finite and the search is an
//! exact decision, not a heuristic.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::presentation::{Family, GroupPresentation, PublicFacts, Relator};
use crate::word::{Letter, Sign, Word};

/// Default cap on explored words per decision.
pub const DEFAULT_COXETER_BUDGET: u64 = 5_000_000;

/// Off-diagonal Coxeter matrix entry. `None` encodes `∞`: no relator binds
/// the pair, which is exactly how a missing share manifests.
pub type BraidOrder = Option<u32>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("presentation family is {0}, not coxeter")]
    WrongFamily(Family),
    #[error("coxeter platforms require the involution public fact")]
    MissingInvolutionFact,
    #[error("relator {index} is not of braid-power shape (s_i s_j)^m with m >= 2")]
    NotBraidShape { index: usize },
    #[error("relators {first} and {second} both constrain the same generator pair")]
    DuplicatePair { first: usize, second: usize },
    #[error("relator {index} contains an inverse letter; involutions make signs redundant")]
    NegativeLetter { index: usize },
    #[error("word uses generator index {gen} but the matrix has only {k} generators")]
    GeneratorOutOfRange { gen: usize, k: usize },
    #[error("at most 255 generators are supported, got {0}")]
    TooManyGenerators(usize),
    #[error("budget of {budget} explored words exhausted (undecided)")]
    BudgetExhausted { budget: u64, explored: u64 },
}

/// Symmetric Coxeter matrix, stored upper-triangular. `m_ii = 1` is
/// implicit; off-diagonal entries are finite orders `>= 2` or `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterMatrix {
    k: usize,
    upper: Vec<BraidOrder>,
}

impl CoxeterMatrix {
    /// All off-diagonal entries `∞`.
    pub fn unconstrained(k: usize) -> Result<CoxeterMatrix, CoxeterError> {
        if k > 255 {
            return Err(CoxeterError::TooManyGenerators(k));
        }
        Ok(CoxeterMatrix {
            k,
            upper: vec![None; k * k.saturating_sub(1) / 2],
        })
    }

    /// Type-A matrix: `m_{i,i+1} = 3`, all other off-diagonal entries `2`.
    /// The resulting group is the symmetric group on `k + 1` points.
    pub fn type_a(k: usize) -> CoxeterMatrix {
        let mut mat = CoxeterMatrix::unconstrained(k).expect("small k");
        for i in 0..k {
            for j in i + 1..k {
                mat.set(i, j, Some(if j == i + 1 { 3 } else { 2 }));
            }
        }
        mat
    }

    pub fn generator_count(&self) -> usize {
        self.k
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.k);
        i * self.k - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Off-diagonal order for an unordered pair.
    pub fn order(&self, a: usize, b: usize) -> BraidOrder {
        debug_assert_ne!(a, b);
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.upper[self.slot(i, j)]
    }

    pub fn set(&mut self, a: usize, b: usize, order: BraidOrder) {
        debug_assert_ne!(a, b);
        debug_assert!(order.map_or(true, |m| m >= 2));
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let slot = self.slot(i, j);
        self.upper[slot] = order;
    }

    /// Pairs with a finite entry, ascending, with their orders.
    pub fn finite_pairs(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                if let Some(m) = self.upper[self.slot(i, j)] {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    /// Builds a matrix from indexed relators, each of which must be a braid
    /// power `(s_i s_j)^m`. Accepts partial relator sets: unmentioned pairs
    /// stay `∞`.
    pub fn from_relators<'a>(
        k: usize,
        relators: impl IntoIterator<Item = &'a Relator>,
    ) -> Result<CoxeterMatrix, CoxeterError> {
        let mut mat = CoxeterMatrix::unconstrained(k)?;
        let mut claimed: Vec<Option<usize>> = vec![None; mat.upper.len()];
        for relator in relators {
            let (i, j, order) = braid_shape(relator, k)?;
            let slot = mat.slot(i, j);
            if let Some(first) = claimed[slot] {
                return Err(CoxeterError::DuplicatePair {
                    first,
                    second: relator.index,
                });
            }
            claimed[slot] = Some(relator.index);
            mat.set(i, j, Some(order));
        }
        Ok(mat)
    }
}

/// The braid relator word `(s_i s_j)^m` over positive letters.
pub fn braid_word(i: usize, j: usize, order: u32) -> Word {
    let pair = Word::from_letters(vec![Letter::positive(i), Letter::positive(j)]);
    pair.repeat(order as usize)
}

/// Recognizes `(s_i s_j)^m`, `m >= 2`, returning `(min, max, m)`.
fn braid_shape(relator: &Relator, k: usize) -> Result<(usize, usize, u32), CoxeterError> {
    let letters = relator.word.letters();
    if letters.iter().any(|l| l.sign == Sign::Minus) {
        return Err(CoxeterError::NegativeLetter {
            index: relator.index,
        });
    }
    if let Some(gen) = relator.word.max_gen() {
        if gen >= k {
            return Err(CoxeterError::GeneratorOutOfRange { gen, k });
        }
    }
    if letters.len() < 4 || letters.len() % 2 != 0 {
        return Err(CoxeterError::NotBraidShape {
            index: relator.index,
        });
    }
    let a = letters[0].gen;
    let b = letters[1].gen;
    if a == b {
        return Err(CoxeterError::NotBraidShape {
            index: relator.index,
        });
    }
    for (pos, letter) in letters.iter().enumerate() {
        let expected = if pos % 2 == 0 { a } else { b };
        if letter.gen != expected {
            return Err(CoxeterError::NotBraidShape {
                index: relator.index,
            });
        }
    }
    let order = (letters.len() / 2) as u32;
    Ok((a.min(b), a.max(b), order))
}

/// Checks that a presentation has Coxeter shape and extracts its matrix.
pub fn validate_coxeter(p: &GroupPresentation) -> Result<CoxeterMatrix, CoxeterError> {
    if p.family() != Family::Coxeter {
        return Err(CoxeterError::WrongFamily(p.family()));
    }
    if p.public_facts() != PublicFacts::CoxeterInvolutions {
        return Err(CoxeterError::MissingInvolutionFact);
    }
    CoxeterMatrix::from_relators(p.generators().count(), p.relators())
}

/// Outcome of one Tits decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoxeterDecision {
    pub is_identity: bool,
    /// Words examined across all levels.
    pub explored: u64,
    /// Largest breadth-first frontier seen.
    pub peak_frontier: usize,
}

/// Strips signs (involutions) and returns generator indices as bytes.
fn normalize(word: &Word, k: usize) -> Result<Vec<u8>, CoxeterError> {
    if k > 255 {
        return Err(CoxeterError::TooManyGenerators(k));
    }
    word.letters()
        .iter()
        .map(|l| {
            if l.gen >= k {
                Err(CoxeterError::GeneratorOutOfRange { gen: l.gen, k })
            } else {
                Ok(l.gen as u8)
            }
        })
        .collect()
}

/// Deletes adjacent equal letters until none remain (`s s = 1`).
fn cascade_squares(word: &mut Vec<u8>) {
    let mut out: Vec<u8> = Vec::with_capacity(word.len());
    for &letter in word.iter() {
        if out.last() == Some(&letter) {
            out.pop();
        } else {
            out.push(letter);
        }
    }
    *word = out;
}

fn has_square(word: &[u8]) -> bool {
    word.windows(2).any(|w| w[0] == w[1])
}

/// Exact identity decision by exhausting length-non-increasing moves.
///
/// Each level holds words of one fixed length that all represent the same
/// group element, so following a single deletion down is complete: if the
/// element is shorter than the level, some braid sequence from any of its
/// words exposes an adjacent square. A level whose entire braid closure is
/// square-free therefore consists of reduced words, and the element is the
/// identity only at length zero.
pub fn is_identity_tits(
    matrix: &CoxeterMatrix,
    word: &Word,
    budget: u64,
) -> Result<CoxeterDecision, CoxeterError> {
    let mut current = normalize(word, matrix.generator_count())?;
    let initial_len = current.len();
    cascade_squares(&mut current);
    let mut explored: u64 = 1;
    let mut peak_frontier: usize = 1;
    'level: loop {
        if current.is_empty() {
            return Ok(CoxeterDecision {
                is_identity: true,
                explored,
                peak_frontier,
            });
        }
        let mut visited: HashSet<Vec<u8>> = HashSet::new();
        let mut queue: VecDeque<Vec<u8>> = VecDeque::new();
        visited.insert(current.clone());
        queue.push_back(current.clone());
        while let Some(next) = queue.pop_front() {
            for neighbor in braid_neighbors(matrix, &next) {
                debug_assert!(neighbor.len() <= initial_len);
                if visited.contains(&neighbor) {
                    continue;
                }
                explored += 1;
                if explored > budget {
                    return Err(CoxeterError::BudgetExhausted { budget, explored });
                }
                if has_square(&neighbor) {
                    let mut shorter = neighbor;
                    cascade_squares(&mut shorter);
                    debug_assert!(shorter.len() < current.len());
                    current = shorter;
                    continue 'level;
                }
                visited.insert(neighbor.clone());
                queue.push_back(neighbor);
                peak_frontier = peak_frontier.max(queue.len());
            }
        }
        // The whole braid closure is square-free: `current` is reduced and
        // nonempty, so the element is not the identity.
        return Ok(CoxeterDecision {
            is_identity: false,
            explored,
            peak_frontier,
        });
    }
}

/// All words obtained from `word` by one braid move: an alternating window
/// `(s_a s_b s_a ...)` of length `m_ab` rewritten to start with `s_b`.
fn braid_neighbors(matrix: &CoxeterMatrix, word: &[u8]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for start in 0..word.len().saturating_sub(1) {
        let a = word[start];
        let b = word[start + 1];
        if a == b {
            continue;
        }
        let Some(order) = matrix.order(a as usize, b as usize) else {
            continue;
        };
        let m = order as usize;
        if start + m > word.len() {
            continue;
        }
        let window_alternates = (0..m).all(|offset| {
            let expected = if offset % 2 == 0 { a } else { b };
            word[start + offset] == expected
        });
        if !window_alternates {
            continue;
        }
        let mut neighbor = word.to_vec();
        for (offset, slot) in neighbor[start..start + m].iter_mut().enumerate() {
            *slot = if offset % 2 == 0 { b } else { a };
        }
        out.push(neighbor);
    }
    out
}

/// Test oracle for the type-A matrix: multiplies out adjacent
/// transpositions `(i, i+1)` of `{1..k+1}` and checks for the identity
/// permutation. Signs are ignored since transpositions are involutions.
pub fn perm_oracle_type_a(k: usize, word: &Word) -> bool {
    let mut perm: Vec<usize> = (0..=k).collect();
    for letter in word.letters() {
        debug_assert!(letter.gen < k);
        perm.swap(letter.gen, letter.gen + 1);
    }
    perm.iter().enumerate().all(|(slot, &value)| slot == value)
}
