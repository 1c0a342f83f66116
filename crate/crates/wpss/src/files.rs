//! Bit-exact text file formats: master scheme files, share files, and
//! encoded message files. All output is UTF-8 with LF line endings and a
//! trailing newline; formatting then parsing reproduces the value exactly.

use thiserror::Error;

use crate::access::{AccessError, SchemeId, SchemeParams, Share};
use crate::dealer::EncodedMessage;
use crate::presentation::{
    format_relator_line, parse_generators_line, parse_relator_line, GroupPresentation,
    PresentationError, PublicFacts,
};
use crate::word::Generators;

pub const SHARE_MAGIC: &str = "WPSS-SHARE v1";
pub const SCHEME_MAGIC: &str = "WPSS-SCHEME v1";
pub const MESSAGE_MAGIC: &str = "WPSS-MSG v1";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FileError {
    #[error("line 1: expected magic `{expected}`")]
    BadMagic { expected: &'static str },
    #[error("line {line}: expected `{expected}`")]
    MalformedLine { line: usize, expected: &'static str },
    #[error("line {line}: bad scheme id (need 16 hex digits)")]
    BadSchemeId { line: usize },
    #[error("line {line}: unknown public facts `{text}`")]
    UnknownPublicFacts { line: usize, text: String },
    #[error("declared count {declared} does not match {found} entries")]
    CountMismatch { declared: usize, found: usize },
    #[error("declared m={declared} but C(n, t-1)={computed}")]
    ParamsMismatch { declared: usize, computed: usize },
    #[error("relator index {index} outside 1..={m}")]
    RelatorIndexOutOfRange { index: usize, m: usize },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Access(#[from] AccessError),
}

/// Line cursor with one-based positions for error reporting.
struct Lines<'a> {
    lines: Vec<&'a str>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines {
            lines: text.lines().collect(),
            at: 0,
        }
    }

    fn number(&self) -> usize {
        self.at + 1
    }

    fn next(&mut self, expected: &'static str) -> Result<&'a str, FileError> {
        let line = self
            .lines
            .get(self.at)
            .copied()
            .ok_or(FileError::MalformedLine {
                line: self.number(),
                expected,
            })?;
        self.at += 1;
        Ok(line)
    }

    fn rest(&self) -> &[&'a str] {
        &self.lines[self.at..]
    }

    fn field(&mut self, key: &'static str) -> Result<&'a str, FileError> {
        let line = self.next(key)?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or(FileError::MalformedLine {
                line: self.at,
                expected: key,
            })
    }

    fn usize_field(&mut self, key: &'static str) -> Result<usize, FileError> {
        self.field(key)?
            .parse()
            .map_err(|_| FileError::MalformedLine {
                line: self.at,
                expected: key,
            })
    }
}

fn parse_scheme_id(text: &str, line: usize) -> Result<SchemeId, FileError> {
    SchemeId::parse(text).ok_or(FileError::BadSchemeId { line })
}

fn check_params(n: usize, t: usize, declared_m: usize) -> Result<SchemeParams, FileError> {
    let params = SchemeParams::new(n, t)?;
    if params.m() != declared_m {
        return Err(FileError::ParamsMismatch {
            declared: declared_m,
            computed: params.m(),
        });
    }
    Ok(params)
}

/// A master scheme file: identity, parameters, and the full presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeFile {
    pub scheme_id: SchemeId,
    pub params: SchemeParams,
    pub presentation: GroupPresentation,
}

pub fn format_scheme(scheme: &SchemeFile) -> String {
    let mut out = String::new();
    out.push_str(SCHEME_MAGIC);
    out.push('\n');
    out.push_str(&format!("scheme-id: {}\n", scheme.scheme_id));
    out.push_str(&format!("n: {}\n", scheme.params.n()));
    out.push_str(&format!("t: {}\n", scheme.params.t()));
    out.push_str(&format!("m: {}\n", scheme.params.m()));
    out.push_str(&scheme.presentation.to_text_block());
    out
}

pub fn parse_scheme(text: &str) -> Result<SchemeFile, FileError> {
    let mut lines = Lines::new(text);
    if lines.next(SCHEME_MAGIC)? != SCHEME_MAGIC {
        return Err(FileError::BadMagic {
            expected: SCHEME_MAGIC,
        });
    }
    let id_text = lines.field("scheme-id:")?;
    let scheme_id = parse_scheme_id(id_text, lines.at)?;
    let n = lines.usize_field("n:")?;
    let t = lines.usize_field("t:")?;
    let m = lines.usize_field("m:")?;
    let params = check_params(n, t, m)?;
    let block = lines.rest().join("\n");
    let presentation = GroupPresentation::parse_text_block(&block)?;
    if presentation.relator_count() != params.m() {
        return Err(FileError::CountMismatch {
            declared: params.m(),
            found: presentation.relator_count(),
        });
    }
    Ok(SchemeFile {
        scheme_id,
        params,
        presentation,
    })
}

pub fn format_share(share: &Share) -> String {
    let mut out = String::new();
    out.push_str(SHARE_MAGIC);
    out.push('\n');
    out.push_str(&format!("scheme-id: {}\n", share.scheme_id));
    out.push_str(&format!("n: {}\n", share.params.n()));
    out.push_str(&format!("t: {}\n", share.params.t()));
    out.push_str(&format!("m: {}\n", share.params.m()));
    out.push_str(&format!("participant: {}\n", share.participant));
    out.push_str("generators:");
    for name in share.generators.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    out.push_str(&format!("public-facts: {}\n", share.public_facts));
    for relator in &share.relators {
        out.push_str(&format_relator_line(&share.generators, relator));
        out.push('\n');
    }
    out
}

pub fn parse_share(text: &str) -> Result<Share, FileError> {
    let mut lines = Lines::new(text);
    if lines.next(SHARE_MAGIC)? != SHARE_MAGIC {
        return Err(FileError::BadMagic {
            expected: SHARE_MAGIC,
        });
    }
    let id_text = lines.field("scheme-id:")?;
    let scheme_id = parse_scheme_id(id_text, lines.at)?;
    let n = lines.usize_field("n:")?;
    let t = lines.usize_field("t:")?;
    let m = lines.usize_field("m:")?;
    let params = check_params(n, t, m)?;
    let participant = lines.usize_field("participant:")?;
    if participant == 0 || participant > params.n() {
        return Err(FileError::Access(AccessError::ParticipantOutOfRange {
            participant,
            n: params.n(),
        }));
    }
    let generators_line = lines.next("generators:")?;
    let generators = parse_generators_line(generators_line, lines.at)?;
    let facts_text = lines.field("public-facts:")?;
    let public_facts =
        PublicFacts::parse(facts_text).ok_or_else(|| FileError::UnknownPublicFacts {
            line: lines.at,
            text: facts_text.to_string(),
        })?;
    let mut relators = Vec::new();
    while !lines.rest().is_empty() {
        let line_no = lines.number();
        let line = lines.next("relator <j>: <word>")?;
        if line.is_empty() {
            continue;
        }
        let relator = parse_relator_line(line, &generators, line_no)?;
        if relator.index > params.m() {
            return Err(FileError::RelatorIndexOutOfRange {
                index: relator.index,
                m: params.m(),
            });
        }
        relators.push(relator);
    }
    Ok(Share {
        scheme_id,
        participant,
        params,
        generators,
        public_facts,
        relators,
    })
}

pub fn format_message(message: &EncodedMessage, gens: &Generators) -> String {
    let mut out = String::new();
    out.push_str(MESSAGE_MAGIC);
    out.push('\n');
    out.push_str(&format!("scheme-id: {}\n", message.scheme_id));
    out.push_str(&format!("count: {}\n", message.words.len()));
    for word in &message.words {
        out.push_str(&format!("word: {}\n", gens.format_word(word)));
    }
    out
}

pub fn parse_message(text: &str, gens: &Generators) -> Result<EncodedMessage, FileError> {
    let mut lines = Lines::new(text);
    if lines.next(MESSAGE_MAGIC)? != MESSAGE_MAGIC {
        return Err(FileError::BadMagic {
            expected: MESSAGE_MAGIC,
        });
    }
    let id_text = lines.field("scheme-id:")?;
    let scheme_id = parse_scheme_id(id_text, lines.at)?;
    let count = lines.usize_field("count:")?;
    let mut words = Vec::new();
    while !lines.rest().is_empty() {
        let line_no = lines.number();
        let line = lines.next("word: <word>")?;
        if line.is_empty() {
            continue;
        }
        let word_text = line
            .strip_prefix("word: ")
            .or_else(|| (line == "word:").then_some(""))
            .ok_or(FileError::MalformedLine {
                line: line_no,
                expected: "word: <word>",
            })?;
        let word = gens
            .parse_word(word_text)
            .map_err(|source| FileError::Presentation(PresentationError::WordAtLine {
                line: line_no,
                source,
            }))?;
        words.push(word);
    }
    if words.len() != count {
        return Err(FileError::CountMismatch {
            declared: count,
            found: words.len(),
        });
    }
    Ok(EncodedMessage { scheme_id, words })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{build_access_structure, make_shares};
    use crate::presentation::{Family, Relator};

    fn sample_scheme() -> SchemeFile {
        let gens = Generators::numbered("s", 3);
        let relators = vec![
            Relator::new(1, crate::coxeter::braid_word(0, 1, 3)).unwrap(),
            Relator::new(2, crate::coxeter::braid_word(0, 2, 2)).unwrap(),
            Relator::new(3, crate::coxeter::braid_word(1, 2, 4)).unwrap(),
        ];
        SchemeFile {
            scheme_id: SchemeId(0xdead_beef_0123_4567),
            params: SchemeParams::new(3, 2).unwrap(),
            presentation: GroupPresentation::new(gens, relators, Family::Coxeter).unwrap(),
        }
    }

    #[test]
    fn scheme_file_round_trips_bit_exactly() {
        let scheme = sample_scheme();
        let text = format_scheme(&scheme);
        assert_eq!(
            text,
            "WPSS-SCHEME v1\n\
             scheme-id: deadbeef01234567\n\
             n: 3\n\
             t: 2\n\
             m: 3\n\
             generators: s1 s2 s3\n\
             relator 1: s1 s2 s1 s2 s1 s2\n\
             relator 2: s1 s3 s1 s3\n\
             relator 3: s2 s3 s2 s3 s2 s3 s2 s3\n\
             family: coxeter\n"
        );
        let parsed = parse_scheme(&text).unwrap();
        assert_eq!(parsed, scheme);
        assert_eq!(format_scheme(&parsed), text);
    }

    #[test]
    fn share_file_round_trips_bit_exactly() {
        let scheme = sample_scheme();
        let structure = build_access_structure(3, 2).unwrap();
        let shares = make_shares(&scheme.presentation, &structure, scheme.scheme_id).unwrap();
        for share in &shares {
            let text = format_share(share);
            let parsed = parse_share(&text).unwrap();
            assert_eq!(&parsed, share);
            assert_eq!(format_share(&parsed), text);
        }
        let text = format_share(&shares[0]);
        assert!(text.starts_with(
            "WPSS-SHARE v1\n\
             scheme-id: deadbeef01234567\n\
             n: 3\n\
             t: 2\n\
             m: 3\n\
             participant: 1\n\
             generators: s1 s2 s3\n\
             public-facts: coxeter-involutions\n\
             relator 2: "
        ));
    }

    #[test]
    fn message_file_round_trips() {
        let scheme = sample_scheme();
        let gens = scheme.presentation.generators();
        let message = EncodedMessage {
            scheme_id: scheme.scheme_id,
            words: vec![
                gens.parse_word("s1 s2 s1").unwrap(),
                gens.parse_word("s3^2 s1^-1").unwrap(),
            ],
        };
        let text = format_message(&message, gens);
        assert_eq!(
            text,
            "WPSS-MSG v1\n\
             scheme-id: deadbeef01234567\n\
             count: 2\n\
             word: s1 s2 s1\n\
             word: s3^2 s1^-1\n"
        );
        assert_eq!(parse_message(&text, gens).unwrap(), message);
    }

    #[test]
    fn parsers_reject_malformed_input() {
        let scheme = sample_scheme();
        let gens = scheme.presentation.generators();
        assert!(matches!(
            parse_scheme("nope\n"),
            Err(FileError::BadMagic { .. })
        ));
        assert!(matches!(
            parse_share("WPSS-SHARE v1\nscheme-id: zz\n"),
            Err(FileError::BadSchemeId { .. })
        ));
        // m inconsistent with (n, t).
        let bad = "WPSS-SCHEME v1\nscheme-id: 0000000000000001\nn: 3\nt: 2\nm: 4\n";
        assert!(matches!(
            parse_scheme(bad),
            Err(FileError::ParamsMismatch { .. })
        ));
        // Declared count differs from word lines.
        let bad_msg = "WPSS-MSG v1\nscheme-id: 0000000000000001\ncount: 2\nword: s1\n";
        assert!(matches!(
            parse_message(bad_msg, gens),
            Err(FileError::CountMismatch {
                declared: 2,
                found: 1
            })
        ));
    }
}
