//! Group presentations: a generator alphabet plus an indexed relator list.
//! The relator list is the secret object the whole scheme shares out.

use std::fmt;

use thiserror::Error;

use crate::word::{Generators, Word, WordError};

/// Platform family tag carried by presentations and scheme files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Coxeter,
    Polycyclic,
    Raw,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Coxeter => "coxeter",
            Family::Polycyclic => "polycyclic",
            Family::Raw => "raw",
        }
    }

    pub fn parse(text: &str) -> Option<Family> {
        match text {
            "coxeter" => Some(Family::Coxeter),
            "polycyclic" => Some(Family::Polycyclic),
            "raw" => Some(Family::Raw),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Family-specific data that is public by design rather than part of the
/// shared secret. For Coxeter platforms every generator is an involution,
/// and everyone is told so.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PublicFacts {
    None,
    CoxeterInvolutions,
}

impl PublicFacts {
    pub fn for_family(family: Family) -> PublicFacts {
        match family {
            Family::Coxeter => PublicFacts::CoxeterInvolutions,
            Family::Polycyclic | Family::Raw => PublicFacts::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PublicFacts::None => "none",
            PublicFacts::CoxeterInvolutions => "coxeter-involutions",
        }
    }

    pub fn parse(text: &str) -> Option<PublicFacts> {
        match text {
            "none" => Some(PublicFacts::None),
            "coxeter-involutions" => Some(PublicFacts::CoxeterInvolutions),
            _ => None,
        }
    }
}

impl fmt::Display for PublicFacts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One relator: a nonempty freely reduced word with its global index
/// `j` in `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub index: usize,
    pub word: Word,
}

impl Relator {
    pub fn new(index: usize, word: Word) -> Result<Relator, PresentationError> {
        if index == 0 {
            return Err(PresentationError::ZeroRelatorIndex);
        }
        if word.is_empty() {
            return Err(PresentationError::EmptyRelator { index });
        }
        if !word.is_freely_reduced() {
            return Err(PresentationError::RelatorNotReduced { index });
        }
        Ok(Relator { index, word })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("relator indices must start at 1")]
    ZeroRelatorIndex,
    #[error("relator {index} is empty")]
    EmptyRelator { index: usize },
    #[error("relator {index} is not freely reduced")]
    RelatorNotReduced { index: usize },
    #[error("relator indices must be exactly 1..={expected}, found {found} at position {position}")]
    RelatorIndexGap {
        expected: usize,
        found: usize,
        position: usize,
    },
    #[error("relator {index} uses generator index {gen} but only {count} generators are listed")]
    GeneratorOutOfRange {
        index: usize,
        gen: usize,
        count: usize,
    },
    #[error("line {line}: expected `{expected}`")]
    MalformedLine { line: usize, expected: &'static str },
    #[error("line {line}: {source}")]
    WordAtLine { line: usize, source: WordError },
    #[error("line {line}: unknown family `{text}`")]
    UnknownFamily { line: usize, text: String },
}

/// A finite presentation `⟨ generators | relators ⟩` with a family tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Generators,
    relators: Vec<Relator>,
    family: Family,
    public_facts: PublicFacts,
}

impl GroupPresentation {
    /// Validates that relator indices are exactly `1..=m` in order and that
    /// every relator word stays inside the alphabet.
    pub fn new(
        generators: Generators,
        relators: Vec<Relator>,
        family: Family,
    ) -> Result<GroupPresentation, PresentationError> {
        for (position, relator) in relators.iter().enumerate() {
            if relator.index != position + 1 {
                return Err(PresentationError::RelatorIndexGap {
                    expected: relators.len(),
                    found: relator.index,
                    position: position + 1,
                });
            }
            if let Some(gen) = relator.word.max_gen() {
                if gen >= generators.count() {
                    return Err(PresentationError::GeneratorOutOfRange {
                        index: relator.index,
                        gen,
                        count: generators.count(),
                    });
                }
            }
        }
        let public_facts = PublicFacts::for_family(family);
        Ok(GroupPresentation {
            generators,
            relators,
            family,
            public_facts,
        })
    }

    pub fn generators(&self) -> &Generators {
        &self.generators
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn relator(&self, index: usize) -> Option<&Relator> {
        self.relators.get(index.checked_sub(1)?)
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn public_facts(&self) -> PublicFacts {
        self.public_facts
    }

    /// The presentation text block: one `generators:` line, one
    /// `relator j:` line per relator, one `family:` line.
    pub fn to_text_block(&self) -> String {
        let mut out = String::new();
        out.push_str("generators:");
        for name in self.generators.names() {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for relator in &self.relators {
            out.push_str(&format_relator_line(&self.generators, relator));
            out.push('\n');
        }
        out.push_str(&format!("family: {}\n", self.family));
        out
    }

    /// Parses the text block produced by [`GroupPresentation::to_text_block`];
    /// the trailing `family:` line may be omitted (family defaults to `raw`).
    pub fn parse_text_block(text: &str) -> Result<GroupPresentation, PresentationError> {
        let mut lines = text.lines().enumerate().peekable();
        let (line_no, first) = lines.next().ok_or(PresentationError::MalformedLine {
            line: 1,
            expected: "generators: <name> ...",
        })?;
        let generators = parse_generators_line(first, line_no + 1)?;
        let mut relators = Vec::new();
        let mut family = Family::Raw;
        for (line_no, line) in lines {
            let line_no = line_no + 1;
            if let Some(rest) = line.strip_prefix("family: ") {
                family =
                    Family::parse(rest).ok_or_else(|| PresentationError::UnknownFamily {
                        line: line_no,
                        text: rest.to_string(),
                    })?;
            } else if line.starts_with("relator ") {
                relators.push(parse_relator_line(line, &generators, line_no)?);
            } else if line.is_empty() {
                continue;
            } else {
                return Err(PresentationError::MalformedLine {
                    line: line_no,
                    expected: "relator <j>: <word> or family: <tag>",
                });
            }
        }
        GroupPresentation::new(generators, relators, family)
    }
}

pub(crate) fn parse_generators_line(
    line: &str,
    line_no: usize,
) -> Result<Generators, PresentationError> {
    let rest = line
        .strip_prefix("generators: ")
        .ok_or(PresentationError::MalformedLine {
            line: line_no,
            expected: "generators: <name> ...",
        })?;
    let names = rest.split(' ').map(|s| s.to_string()).collect();
    Generators::new(names).map_err(|source| PresentationError::WordAtLine {
        line: line_no,
        source,
    })
}

pub(crate) fn format_relator_line(gens: &Generators, relator: &Relator) -> String {
    format!("relator {}: {}", relator.index, gens.format_word(&relator.word))
}

pub(crate) fn parse_relator_line(
    line: &str,
    gens: &Generators,
    line_no: usize,
) -> Result<Relator, PresentationError> {
    let malformed = PresentationError::MalformedLine {
        line: line_no,
        expected: "relator <j>: <word>",
    };
    let rest = line.strip_prefix("relator ").ok_or_else(|| malformed.clone())?;
    let (index_text, word_text) = rest.split_once(": ").ok_or_else(|| malformed.clone())?;
    let index: usize = index_text.parse().map_err(|_| malformed.clone())?;
    let word = gens
        .parse_word(word_text)
        .map_err(|source| PresentationError::WordAtLine {
            line: line_no,
            source,
        })?;
    Relator::new(index, word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coxeter_sample() -> GroupPresentation {
        let gens = Generators::numbered("s", 2);
        let braid = gens.parse_word("s1 s2 s1 s2 s1 s2").unwrap();
        GroupPresentation::new(gens, vec![Relator::new(1, braid).unwrap()], Family::Coxeter)
            .unwrap()
    }

    #[test]
    fn public_facts_follow_family() {
        assert_eq!(
            coxeter_sample().public_facts(),
            PublicFacts::CoxeterInvolutions
        );
    }

    #[test]
    fn relator_indices_must_be_contiguous() {
        let gens = Generators::numbered("s", 2);
        let word = gens.parse_word("s1 s2").unwrap();
        let err = GroupPresentation::new(
            gens,
            vec![Relator::new(2, word).unwrap()],
            Family::Raw,
        )
        .unwrap_err();
        assert!(matches!(err, PresentationError::RelatorIndexGap { .. }));
    }

    #[test]
    fn relators_must_be_reduced_and_nonempty() {
        let gens = Generators::numbered("s", 2);
        let unreduced = gens.parse_word("s1 s1^-1 s2").unwrap();
        assert!(matches!(
            Relator::new(1, unreduced),
            Err(PresentationError::RelatorNotReduced { .. })
        ));
        assert!(matches!(
            Relator::new(1, Word::empty()),
            Err(PresentationError::EmptyRelator { .. })
        ));
    }

    #[test]
    fn relators_must_stay_in_alphabet() {
        let gens = Generators::numbered("s", 2);
        let wide = Generators::numbered("s", 3);
        let word = wide.parse_word("s3").unwrap();
        let err = GroupPresentation::new(
            gens,
            vec![Relator::new(1, word).unwrap()],
            Family::Raw,
        )
        .unwrap_err();
        assert!(matches!(err, PresentationError::GeneratorOutOfRange { .. }));
    }

    #[test]
    fn text_block_round_trips() {
        let p = coxeter_sample();
        let block = p.to_text_block();
        assert_eq!(
            block,
            "generators: s1 s2\nrelator 1: s1 s2 s1 s2 s1 s2\nfamily: coxeter\n"
        );
        assert_eq!(GroupPresentation::parse_text_block(&block).unwrap(), p);
    }

    #[test]
    fn text_block_family_defaults_to_raw() {
        let p =
            GroupPresentation::parse_text_block("generators: a b\nrelator 1: a b a^-1 b^-1\n")
                .unwrap();
        assert_eq!(p.family(), Family::Raw);
        assert_eq!(p.public_facts(), PublicFacts::None);
    }

    #[test]
    fn text_block_rejects_garbage() {
        assert!(GroupPresentation::parse_text_block("nope").is_err());
        assert!(
            GroupPresentation::parse_text_block("generators: a\nrelator x: a\n").is_err()
        );
        assert!(
            GroupPresentation::parse_text_block("generators: a\nfamily: weird\n").is_err()
        );
    }
}
