//! The threshold access structure: subsets `A_1..A_m` of participants and
//! the derived share sets `R_1..R_n`, with membership rule
//! `j ∈ R_i  ⇔  i ∉ A_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::presentation::{GroupPresentation, PublicFacts, Relator};
use crate::word::{Generators, Word};

/// Refuse to build structures with more relators than this; `C(n, t-1)`
/// explodes quickly and a huge `m` is always a configuration mistake.
pub const DEFAULT_M_CAP: u64 = 1_000_000;

/// Opaque scheme identifier, rendered as 16 lowercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeId(pub u64);

impl SchemeId {
    pub fn parse(text: &str) -> Option<SchemeId> {
        if text.len() != 16 || !text.bytes().all(|b| b.is_ascii_hexdigit()) {
            return None;
        }
        u64::from_str_radix(text, 16).ok().map(SchemeId)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// `C(n, k)` with overflow checking.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut result: u64 = 1;
    for i in 0..k {
        result = result.checked_mul(n - i)?;
        result /= i + 1;
    }
    Some(result)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AccessError {
    #[error("threshold must satisfy 2 <= t <= n, got n={n}, t={t}")]
    ThresholdOutOfRange { n: usize, t: usize },
    #[error("relator count C({n}, {k}) exceeds the cap of {cap}")]
    RelatorCountOverCap { n: usize, k: usize, cap: u64 },
    #[error("subset size {size} exceeds set size {n}")]
    SizeExceedsSet { n: usize, size: usize },
    #[error("presentation has {found} relators but the scheme needs exactly {expected}")]
    RelatorCountMismatch { expected: usize, found: usize },
    #[error("no shares given")]
    NoShares,
    #[error("shares disagree on {field}")]
    InconsistentShares { field: &'static str },
    #[error("participant {participant} appears in more than one share")]
    DuplicateParticipant { participant: usize },
    #[error("participant index {participant} outside 1..={n}")]
    ParticipantOutOfRange { participant: usize, n: usize },
    #[error("shares carry different words for relator {index} (tamper signal)")]
    TamperedRelator { index: usize },
    #[error("reconstruction is missing {missing} of {m} relators")]
    Incomplete { missing: usize, m: usize },
}

/// Validated scheme parameters; `m` is always `C(n, t-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeParams {
    n: usize,
    t: usize,
    m: usize,
}

impl SchemeParams {
    pub fn new(n: usize, t: usize) -> Result<SchemeParams, AccessError> {
        SchemeParams::with_cap(n, t, DEFAULT_M_CAP)
    }

    pub fn with_cap(n: usize, t: usize, cap: u64) -> Result<SchemeParams, AccessError> {
        if t < 2 || t > n {
            return Err(AccessError::ThresholdOutOfRange { n, t });
        }
        let m = binomial(n as u64, (t - 1) as u64)
            .filter(|&m| m <= cap)
            .ok_or(AccessError::RelatorCountOverCap {
                n,
                k: t - 1,
                cap,
            })?;
        Ok(SchemeParams {
            n,
            t,
            m: m as usize,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// All `size`-element subsets of `{1..=n}` in lexicographic order of their
/// sorted index tuples.
pub fn enumerate_subsets(n: usize, size: usize) -> Result<Vec<Vec<usize>>, AccessError> {
    if size > n {
        return Err(AccessError::SizeExceedsSet { n, size });
    }
    if size == 0 {
        return Ok(vec![vec![]]);
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=size).collect();
    loop {
        out.push(current.clone());
        // Advance to the lexicographic successor.
        let mut i = size;
        while i > 0 {
            i -= 1;
            if current[i] < n - (size - 1 - i) {
                current[i] += 1;
                for j in i + 1..size {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return Ok(out);
            }
        }
    }
}

/// The full combinatorial design: `A_1..A_m` plus the derived `R_1..R_n`.
///
/// Fields are public so tests can inject faults; use
/// [`build_access_structure`] to obtain a correct instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    pub params: SchemeParams,
    /// `A_j` for `j = 1..=m`, each a sorted (t-1)-subset of `{1..=n}`.
    pub subsets: Vec<Vec<usize>>,
    /// `R_i` for `i = 1..=n`, each the set of relator indices participant
    /// `i` receives.
    pub share_index_sets: Vec<BTreeSet<usize>>,
}

pub fn build_access_structure(n: usize, t: usize) -> Result<AccessStructure, AccessError> {
    let params = SchemeParams::new(n, t)?;
    let subsets = enumerate_subsets(n, t - 1)?;
    debug_assert_eq!(subsets.len(), params.m());
    let share_index_sets = (1..=n)
        .map(|i| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.contains(&i))
                .map(|(idx, _)| idx + 1)
                .collect::<BTreeSet<usize>>()
        })
        .collect();
    Ok(AccessStructure {
        params,
        subsets,
        share_index_sets,
    })
}

impl AccessStructure {
    /// Relator indices visible to a coalition: the union of its `R_i`.
    pub fn union_of(&self, coalition: &[usize]) -> BTreeSet<usize> {
        coalition
            .iter()
            .flat_map(|&i| self.share_index_sets[i - 1].iter().copied())
            .collect()
    }
}

/// A witness that the threshold property failed for one coalition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdFailure {
    /// A t-coalition that does not see every relator.
    FullCoalitionMissing {
        coalition: Vec<usize>,
        missing: Vec<usize>,
    },
    /// A (t-1)-coalition that sees every relator.
    SubThresholdSeesAll { coalition: Vec<usize> },
}

/// Result of exhaustively checking the threshold property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub pass: bool,
    pub failures: Vec<ThresholdFailure>,
    pub full_coalitions_checked: usize,
    pub sub_coalitions_checked: usize,
    /// How many (t-1)-coalitions miss exactly one relator (with the intended
    /// construction: all of them).
    pub sub_missing_exactly_one: usize,
}

/// Exhaustive check: every t-coalition sees all `m` relators; every
/// (t-1)-coalition misses at least one (and, reported, exactly one).
pub fn check_threshold_property(structure: &AccessStructure) -> ThresholdReport {
    let params = structure.params;
    let (n, t, m) = (params.n(), params.t(), params.m());
    let mut failures = Vec::new();
    let full: Vec<Vec<usize>> = enumerate_subsets(n, t).expect("t <= n");
    for coalition in &full {
        let seen = structure.union_of(coalition);
        if seen.len() != m {
            let missing = (1..=m).filter(|j| !seen.contains(j)).collect();
            failures.push(ThresholdFailure::FullCoalitionMissing {
                coalition: coalition.clone(),
                missing,
            });
        }
    }
    let sub: Vec<Vec<usize>> = enumerate_subsets(n, t - 1).expect("t-1 <= n");
    let mut sub_missing_exactly_one = 0;
    for coalition in &sub {
        let seen = structure.union_of(coalition);
        match m - seen.len() {
            0 => failures.push(ThresholdFailure::SubThresholdSeesAll {
                coalition: coalition.clone(),
            }),
            1 => sub_missing_exactly_one += 1,
            _ => {}
        }
    }
    ThresholdReport {
        pass: failures.is_empty(),
        failures,
        full_coalitions_checked: full.len(),
        sub_coalitions_checked: sub.len(),
        sub_missing_exactly_one,
    }
}

/// One participant's share: their relator subset plus the public metadata
/// everyone holds (generators, parameters, platform facts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    pub scheme_id: SchemeId,
    pub participant: usize,
    pub params: SchemeParams,
    pub generators: Generators,
    pub public_facts: PublicFacts,
    /// Held relators sorted by global index.
    pub relators: Vec<Relator>,
}

/// Splits a presentation into `n` shares along an access structure.
pub fn make_shares(
    presentation: &GroupPresentation,
    structure: &AccessStructure,
    scheme_id: SchemeId,
) -> Result<Vec<Share>, AccessError> {
    let m = structure.params.m();
    if presentation.relator_count() != m {
        return Err(AccessError::RelatorCountMismatch {
            expected: m,
            found: presentation.relator_count(),
        });
    }
    Ok(structure
        .share_index_sets
        .iter()
        .enumerate()
        .map(|(i, indices)| Share {
            scheme_id,
            participant: i + 1,
            params: structure.params,
            generators: presentation.generators().clone(),
            public_facts: presentation.public_facts(),
            relators: indices
                .iter()
                .map(|&j| presentation.relator(j).expect("index in 1..=m").clone())
                .collect(),
        })
        .collect())
}

/// Union of a set of shares: the partial (or full) presentation a coalition
/// can assemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub scheme_id: SchemeId,
    pub params: SchemeParams,
    pub generators: Generators,
    pub public_facts: PublicFacts,
    pub participants: Vec<usize>,
    /// Recovered relators sorted by global index; may have gaps.
    pub relators: Vec<Relator>,
    pub complete: bool,
    /// Global indices not covered by any share in the union.
    pub missing: Vec<usize>,
}

impl Reconstruction {
    /// Which relator indices the coalition holds.
    pub fn held_indices(&self) -> BTreeSet<usize> {
        self.relators.iter().map(|r| r.index).collect()
    }
}

/// Takes the union of the given shares. Sub-threshold unions are allowed and
/// come back flagged incomplete; inconsistent or tampered share sets are
/// errors.
pub fn reconstruct(shares: &[Share]) -> Result<Reconstruction, AccessError> {
    let first = shares.first().ok_or(AccessError::NoShares)?;
    let mut participants = Vec::with_capacity(shares.len());
    let mut union: BTreeMap<usize, Word> = BTreeMap::new();
    for share in shares {
        if share.scheme_id != first.scheme_id {
            return Err(AccessError::InconsistentShares { field: "scheme-id" });
        }
        if share.params != first.params {
            return Err(AccessError::InconsistentShares { field: "params" });
        }
        if share.generators != first.generators {
            return Err(AccessError::InconsistentShares { field: "generators" });
        }
        if share.public_facts != first.public_facts {
            return Err(AccessError::InconsistentShares {
                field: "public-facts",
            });
        }
        if share.participant == 0 || share.participant > share.params.n() {
            return Err(AccessError::ParticipantOutOfRange {
                participant: share.participant,
                n: share.params.n(),
            });
        }
        if participants.contains(&share.participant) {
            return Err(AccessError::DuplicateParticipant {
                participant: share.participant,
            });
        }
        participants.push(share.participant);
        for relator in &share.relators {
            match union.get(&relator.index) {
                Some(word) if *word != relator.word => {
                    return Err(AccessError::TamperedRelator {
                        index: relator.index,
                    });
                }
                Some(_) => {}
                None => {
                    union.insert(relator.index, relator.word.clone());
                }
            }
        }
    }
    let m = first.params.m();
    let missing: Vec<usize> = (1..=m).filter(|j| !union.contains_key(j)).collect();
    let relators = union
        .into_iter()
        .map(|(index, word)| Relator { index, word })
        .collect();
    participants.sort_unstable();
    Ok(Reconstruction {
        scheme_id: first.scheme_id,
        params: first.params,
        generators: first.generators.clone(),
        public_facts: first.public_facts,
        participants,
        relators,
        complete: missing.is_empty(),
        missing,
    })
}
